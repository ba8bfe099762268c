#pragma once

#include <cstdint>
#include <vector>

#include "pinlab/sampler.hpp"

namespace pinlab {

struct ScalingFit {
    double slope = 0.0;
    double intercept = 0.0;
    double stderr_ = 0.0;
};

// least squares of log(statistic) against log(N)
ScalingFit fit_scaling_exponent(const std::vector<std::pair<double, double>>& points);

struct HillEstimate {
    double alpha = 0.0;
    int k_used = 0;
    bool heavy_tailed = false;
    std::vector<std::pair<int, double>> curve;  // (k, alpha(k)) plateau plot
};

// Hill estimator over the top-k order statistics of positive samples;
// k < 50 is rejected. heavy_tailed is the plateau check.
HillEstimate hill_tail_index(std::vector<double> samples, int k);

// contact-set distribution over subsets of {1..N-1}, indexed by bitmask
struct ContactDistribution {
    int N = 0;
    std::vector<double> prob;
};

// exact law from the Gaussian representation: weight(A) is eps^|A| times the
// centered normal density of (Z_i)_{i in A + {N, N+1}} at the origin
ContactDistribution exact_contact_distribution(int N, double eps, double sigma);

// law implied by the discretized kernel (quadrature over the J heights; the
// eigenfunction and free-energy factors telescope out)
ContactDistribution kernel_contact_distribution(const DiscreteKernel& k, int N);

ContactDistribution empirical_contact_distribution(const PinningSampler& s, int N, int replicas,
                                                   std::uint64_t seed, int threads = 2);

double tv_distance(const ContactDistribution& a, const ContactDistribution& b);

// signed and absolute area of one chi-block of length n (conditioned on
// chi_1 = n), with the excursions filled in
std::pair<double, double> sample_gap_area(const PinningSampler& s, int n, RngStream& rng);

struct AreaLawResult {
    int n_conditional = 0;
    std::vector<double> conditional_scaled;  // A_1 / (sigma n^{5/2})
    double ks_conditional = 0.0;             // one-sample KS against N(0, 1/720)
    std::vector<double> unconditional_abs;   // |A_1| under the q-mixture
    double hill_alpha = 0.0;
    bool hill_heavy = false;
    int hill_k = 0;
    double moment_bound_max = 0.0;  // max over the (n,x) lattice of P(Atilde>x|chi1=n) x^2/n^5
};

AreaLawResult area_law_experiment(const PinningSampler& s, int n_conditional, int cond_replicas,
                                  int uncond_samples, std::uint64_t seed, int threads = 2);

struct CriticalMeasureResult {
    std::vector<double> breakpoints;
    std::vector<std::vector<double>> mu_inc;   // [coordinate][replica]
    std::vector<std::vector<double>> ref_inc;  // matched stable increments
    std::vector<double> ks_per_coord;
    std::vector<double> corr_pairs;            // correlation of disjoint increment pairs
    std::vector<double> tight_K;
    std::vector<double> tight_P;               // P(|mu_N|([0,1]) > K)
};

CriticalMeasureResult critical_measure_experiment(const PinningSampler& s, int N,
                                                  const std::vector<double>& breakpoints,
                                                  int replicas, std::uint64_t seed,
                                                  int threads = 2);

struct RegimeRow {
    double eps = 0.0;
    int N = 0;
    int replicas = 0;
    double mean_max_abs = 0.0;
    double q10_max_abs = 0.0, q50_max_abs = 0.0, q90_max_abs = 0.0;
    double mean_ell = 0.0, sd_ell = 0.0;
    double mean_iota = 0.0;
    double mean_Delta = 0.0, mean_delta = 0.0;
    double frac_window_empty = 0.0;  // tau does not meet [L, N-L]
};

// per-(eps, N) path statistics; pass sampler = nullptr for the free case
std::vector<RegimeRow> regime_table_experiment(const PinningSampler* sampler,
                                               const PotentialSpec& pot,
                                               const std::vector<int>& n_list, int replicas,
                                               int window_L, std::uint64_t seed, int threads = 2);

} // namespace pinlab
