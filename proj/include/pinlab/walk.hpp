#pragma once

#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "pinlab/potential.hpp"
#include "pinlab/rng.hpp"

namespace pinlab {

// Walk Y started at a with step law exp(-V), integrated walk Z started at b.
struct WalkState {
    double a = 0.0;
    double b = 0.0;
    double sigma2 = 1.0;
};

struct GaussianMoments {
    double meanY, meanZ, varY, varZ, covYZ;
};

GaussianMoments yz_moments(int n, const WalkState& state);

// Cov(Z_i, Z_j) under P^{(0,0)} for 1 <= i <= j:
// sigma2 * i(i+1)(3j - i + 1)/6
double zz_cov(int i, int j, double sigma2);

// free (Y_1..Y_n, Z_1..Z_n)
std::pair<std::vector<double>, std::vector<double>>
sample_free_path(int n, const WalkState& state, const PotentialSpec& pot, RngStream& rng);

struct Pin {
    int index;     // constraint Z_index = value, 1 <= index <= n
    double value;
};

// Exact conditional law of the unpinned coordinates of (Z_1..Z_n) under
// P^{(a,b)} given the pins. Gaussian potentials only.
struct BridgeConditional {
    std::vector<int> free_indices;
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
};
BridgeConditional bridge_conditional(int n, const WalkState& state, const std::vector<Pin>& pins);

// Samples (Z_1..Z_n) with pins satisfied exactly; terminal, when given, is a
// constraint (Y_n, Z_n) = (terminal->first, terminal->second), expressed
// through Z_{n-1} and Z_n.
std::vector<double> sample_bridge(int n, const WalkState& state, std::vector<Pin> pins,
                                  const std::optional<std::pair<double, double>>& terminal,
                                  RngStream& rng);

// Excursion bridge: (Z_1..Z_{l-1}) under P^{(-a,0)}( . | Z_{l-1} = b, Z_l = 0),
// sampled by forward one-site conditioning in O(l). Exact for Gaussian steps.
std::vector<double> sample_excursion_bridge(int l, double a, double b, double sigma,
                                            RngStream& rng);

// Var(Z_k | Z_t = 0 for t in pins) under P^{(0,0)}; exact linear algebra.
double pinned_conditional_variance(int n, int k, const std::vector<int>& pins, double sigma2);

// g(y,z) = sqrt(3)/pi exp(-2y^2 - 6z^2 + 6yz), density of (B_1, I_1)
double local_limit_density(double y, double z);

struct LocalLimitReport {
    double sup_discrepancy = 0.0;
    double cov_yy = 0.0, cov_yz = 0.0, cov_zz = 0.0;
    int bins_y = 0, bins_z = 0;
    std::vector<double> density;  // bins_y x bins_z histogram density, row-major
    double y_lo = 0.0, y_hi = 0.0, z_lo = 0.0, z_hi = 0.0;
};
LocalLimitReport verify_local_limit(int n, int samples, const PotentialSpec& pot,
                                    RngStream& rng);

// Covariance matrix of (G_1, I_1, B_1) with G_t the integral of I, and the
// variance of G_1 given (I_1, B_1) = (0, 0), which equals 1/720.
struct ConditionedBmCov {
    Eigen::Matrix3d A;
    double conditional_variance;
};
ConditionedBmCov conditioned_bm_cov();

// P(N(0, 1/720) > t)
double phi_of_t(double t);

// Exact sampler of (Bhat_t, Ihat_t) on a fixed grid of times in (0,1),
// conditioned on (B_1, I_1) = (0, 0).
class ConditionedIBM {
  public:
    explicit ConditionedIBM(std::vector<double> grid);
    // returns (B values, I values) on the grid
    std::pair<std::vector<double>, std::vector<double>> sample(RngStream& rng) const;
    const std::vector<double>& grid() const { return grid_; }

  private:
    std::vector<double> grid_;
    Eigen::MatrixXd chol_;  // lower factor of the conditional covariance
};

} // namespace pinlab
