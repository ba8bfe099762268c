#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "pinlab/labcli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"pinlab: pinning-model simulation lab"};

    std::string config_path;
    pinlab::ExperimentConfig cfg;
    std::string experiment, out_dir, cache_dir;
    double eps = -1.0, eps_rel = -1.0, grid_r = -1.0, sigma = -1.0;
    std::vector<int> n_list;
    int replicas = -1, grid_m = -1, n_max = -1, threads = -1;
    std::uint64_t seed = 0;
    bool seed_given = false, dump_paths = false;

    app.add_option("--config", config_path, "JSON config file; flags override its fields");
    app.add_option("--experiment", experiment,
                   "eigenproblem | scaling | critical-measure | renewal-gaps | area-law | "
                   "constants | small-n-oracle");
    app.add_option("--eps", eps, "pinning strength (absolute)");
    app.add_option("--eps-rel", eps_rel, "pinning strength relative to eps_c");
    app.add_option("--n", n_list, "volume size(s)");
    app.add_option("--replicas", replicas, "replica count");
    auto* seed_opt = app.add_option("--seed", seed, "master seed (required unless in config)");
    app.add_option("--grid-r", grid_r, "J-grid half width in units of sigma");
    app.add_option("--grid-m", grid_m, "number of quadrature nodes (even)");
    app.add_option("--nmax", n_max, "jump length truncation of the operator");
    app.add_option("--sigma", sigma, "step standard deviation of the Gaussian potential");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--cache-dir", cache_dir, "kernel cache directory (or PINLAB_CACHE_DIR)");
    app.add_option("--threads", threads, "worker threads");
    app.add_flag("--dump-paths", dump_paths, "also write sampled paths");

    CLI11_PARSE(app, argc, argv);
    seed_given = seed_opt->count() > 0;

    try {
        if (!config_path.empty()) {
            std::ifstream is(config_path);
            if (!is) {
                std::fprintf(stderr, "error: cannot open config %s\n", config_path.c_str());
                return 2;
            }
            std::stringstream ss;
            ss << is.rdbuf();
            cfg = pinlab::config_from_json_text(ss.str());
        }
        if (!experiment.empty()) cfg.experiment = experiment;
        if (eps >= 0.0) cfg.eps = eps;
        if (eps_rel > 0.0) cfg.eps_rel = eps_rel;
        if (!n_list.empty()) cfg.n_list = n_list;
        if (replicas > 0) cfg.replicas = replicas;
        if (seed_given) {
            cfg.seed = seed;
            cfg.seed_set = true;
        }
        if (grid_r > 0.0) cfg.grid_r = grid_r;
        if (grid_m > 0) cfg.grid_m = grid_m;
        if (n_max > 0) cfg.n_max = n_max;
        if (sigma > 0.0) cfg.sigma = sigma;
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (!cache_dir.empty()) cfg.cache_dir = cache_dir;
        if (threads > 0) cfg.threads = threads;
        if (dump_paths) cfg.dump_paths = true;
        return pinlab::run_and_emit(cfg);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
