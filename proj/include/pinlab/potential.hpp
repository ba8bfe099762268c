#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include "pinlab/rng.hpp"

namespace pinlab {

enum class PotentialKind { Gaussian, TabulatedConvex };

// Symmetric, uniformly convex potential V with exp(-V) a normalized
// probability density of zero mean. Gaussian kind carries exact machinery;
// tabulated kind supports free trajectory sampling only.
class PotentialSpec {
  public:
    static PotentialSpec gaussian(double sigma);

    // Builds V = shape + const with the constant fixed so that
    // integral of exp(-V) over [-half_width, half_width] equals 1.
    // shape must be symmetric and uniformly convex on the support.
    static PotentialSpec tabulated(const std::function<double(double)>& shape,
                                   double half_width, int n_points = 4096);

    PotentialKind kind() const { return kind_; }
    double sigma2() const { return sigma2_; }
    double sigma() const { return sigma_; }
    double gamma() const { return gamma_; }

    // V(x); +infinity outside the tabulated support
    double V(double x) const;
    double exp_neg_V(double x) const;

    // one step X ~ exp(-V(x)) dx
    double sample_step(RngStream& rng) const;

    // max |integral exp(-V) - 1| as measured at construction
    double normalization_residual() const { return norm_residual_; }

  private:
    PotentialSpec() = default;

    PotentialKind kind_ = PotentialKind::Gaussian;
    double sigma2_ = 1.0;
    double sigma_ = 1.0;
    double gamma_ = 1.0;
    double norm_residual_ = 0.0;

    // tabulated representation on [-a, a]
    double half_width_ = 0.0;
    std::vector<double> v_table_;    // V at uniform grid points
    std::vector<double> cdf_table_;  // CDF of exp(-V) at the same grid
};

} // namespace pinlab
