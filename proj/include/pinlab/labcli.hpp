#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace pinlab {

// Runtime configuration of one experiment. JSON config plus CLI overrides;
// seed is mandatory (runs must be replayable, no wall-clock default).
struct ExperimentConfig {
    std::string experiment;
    double eps = -1.0;      // absolute pinning strength (used when >= 0)
    double eps_rel = -1.0;  // relative to eps_c (used when > 0)
    std::vector<int> n_list;
    int replicas = 1000;
    std::uint64_t seed = 0;
    bool seed_set = false;
    double grid_r = 8.0;  // half-width of the J grid in units of sigma
    int grid_m = 64;
    int n_max = 16384;
    double sigma = 1.0;
    std::vector<double> breakpoints = {0.25, 0.5, 0.75};
    std::string out_dir = ".";
    std::string cache_dir;  // PINLAB_CACHE_DIR when empty
    int threads = 2;
    bool dump_paths = false;
    // pre-registered statistical tolerances
    double tol_ks_critical = 0.1;
    double tol_tv_oracle = 0.03;

    void validate() const;  // throws std::invalid_argument with the field path
};

ExperimentConfig config_from_json_text(const std::string& text);

struct Criterion {
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    bool less_is_pass = true;
    bool pass = false;
};

struct ExperimentResult {
    std::string results_csv;
    std::string summary_json;
    std::vector<Criterion> criteria;
    bool all_pass() const;
};

// Builds/loads the kernel cache as needed, runs the named experiment, and
// returns the artifacts. Identical (config, seed) pairs produce identical
// artifacts regardless of thread count.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

// writes results.csv / summary.json under cfg.out_dir and prints one
// pass/fail line per criterion; returns a process exit status
int run_and_emit(const ExperimentConfig& cfg);

// 17-significant-digit float formatting used for every CSV/JSON number
std::string format_double(double v);

} // namespace pinlab
