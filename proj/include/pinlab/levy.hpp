#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "pinlab/rng.hpp"

namespace pinlab {

// Finite signed measure on [0,1] given by atoms (position, signed mass).
// Interval masses are prefix-sum differences, so additivity over adjacent
// intervals is exact.
class AtomicSignedMeasure {
  public:
    AtomicSignedMeasure() = default;
    explicit AtomicSignedMeasure(std::vector<std::pair<double, double>> atoms);

    const std::vector<std::pair<double, double>>& atoms() const { return atoms_; }

    double cum(double t) const;      // nu([0, t])
    double cum_abs(double t) const;  // |nu|([0, t])
    double mass(double a, double b) const { return cum(b) - cum(a); }  // nu((a, b])
    double total_variation() const { return prefix_abs_.empty() ? 0.0 : prefix_abs_.back(); }

    AtomicSignedMeasure positive_part() const;
    AtomicSignedMeasure negative_part() const;

  private:
    std::vector<std::pair<double, double>> atoms_;  // sorted by position
    std::vector<double> prefix_;
    std::vector<double> prefix_abs_;
};

// c_L of the critical limit: 3 sqrt(10) / (sqrt(pi) 360^{7/10}) Gamma(7/10) sigma^{2/5}
double c_L_constant(double sigma);
// the same constant through the integral form (6 sqrt(10)/sqrt(pi)) sigma^{2/5}
// int_0^inf s^{2/5} e^{-360 s^2} ds, evaluated by quadrature
double c_L_constant_quadrature(double sigma);

// tail constant of the standard symmetric alpha-stable law (unit scale,
// characteristic function e^{-|t|^alpha}): P(X > x) ~ tail_const * x^{-alpha}
double symmetric_stable_tail_constant(double alpha);

// symmetric alpha-stable variate with P(X > x) ~ c_tail x^{-alpha}
double sample_stable_symmetric(double c_tail, RngStream& rng, double alpha = 0.4);

// positive alpha-stable variate with P(X > x) ~ c_tail x^{-alpha}
double sample_subordinator(double c_tail, RngStream& rng, double alpha = 0.4);

int sample_poisson(double mean, RngStream& rng);

struct DLSample {
    AtomicSignedMeasure measure;
    double truncation_bias = 0.0;  // E of discarded total variation, (10/3) c_L eta^{3/5}
    double expected_atoms = 0.0;   // 5 c_L eta^{-2/5}
};

// Poisson point process realization of dL with atom-size cutoff eta:
// intensity dx (x) c_L |y|^{-7/5} dy restricted to |y| > eta
DLSample sample_dL(double eta, double sigma, RngStream& rng);

// increments (nu((0,a_1]), nu((a_1,a_2]), ...) of any cumulative evaluator
std::vector<double> finite_dim_marginals(const std::function<double(double)>& cum,
                                         const std::vector<double>& breakpoints);

// Kolmogorov-Smirnov statistics. Both inputs need >= 100 points for the
// two-sample form; the one-sample form compares against a CDF callable.
double ks_distance(std::vector<double> a, std::vector<double> b);
double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf);

} // namespace pinlab
