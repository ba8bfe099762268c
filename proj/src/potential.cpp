#include "pinlab/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pinlab {

PotentialSpec PotentialSpec::gaussian(double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("gaussian potential: sigma must be > 0");
    PotentialSpec p;
    p.kind_ = PotentialKind::Gaussian;
    p.sigma_ = sigma;
    p.sigma2_ = sigma * sigma;
    p.gamma_ = 1.0 / p.sigma2_;
    p.norm_residual_ = 0.0;
    return p;
}

PotentialSpec PotentialSpec::tabulated(const std::function<double(double)>& shape,
                                       double half_width, int n_points) {
    if (!(half_width > 0.0) || n_points < 16)
        throw std::invalid_argument("tabulated potential: bad support or table size");
    PotentialSpec p;
    p.kind_ = PotentialKind::TabulatedConvex;
    p.half_width_ = half_width;
    p.v_table_.resize(n_points);
    double h = 2.0 * half_width / (n_points - 1);

    // symmetrize to guard against asymmetric shape callables
    for (int i = 0; i < n_points; ++i) {
        double x = -half_width + i * h;
        p.v_table_[i] = 0.5 * (shape(x) + shape(-x));
    }

    // trapezoid normalization constant: V <- V + log Z
    double z = 0.0;
    for (int i = 0; i + 1 < n_points; ++i)
        z += 0.5 * h * (std::exp(-p.v_table_[i]) + std::exp(-p.v_table_[i + 1]));
    double logz = std::log(z);
    for (double& v : p.v_table_) v += logz;

    // CDF table, second moment, and convexity constant
    p.cdf_table_.assign(n_points, 0.0);
    double m2 = 0.0;
    double gamma = std::numeric_limits<double>::infinity();
    for (int i = 0; i + 1 < n_points; ++i) {
        double x0 = -half_width + i * h, x1 = x0 + h;
        double f0 = std::exp(-p.v_table_[i]), f1 = std::exp(-p.v_table_[i + 1]);
        p.cdf_table_[i + 1] = p.cdf_table_[i] + 0.5 * h * (f0 + f1);
        m2 += 0.5 * h * (x0 * x0 * f0 + x1 * x1 * f1);
        if (i >= 1) {
            double d2 = (p.v_table_[i + 1] + p.v_table_[i - 1] - 2.0 * p.v_table_[i]) / (h * h);
            gamma = std::min(gamma, d2);
        }
    }
    p.norm_residual_ = std::abs(p.cdf_table_.back() - 1.0);
    if (p.norm_residual_ > 1e-8)
        throw std::runtime_error("tabulated potential: normalization residual above 1e-8");
    if (!(gamma > 0.0))
        throw std::invalid_argument("tabulated potential: not uniformly convex");
    p.sigma2_ = m2;
    p.sigma_ = std::sqrt(m2);
    p.gamma_ = gamma;
    return p;
}

double PotentialSpec::V(double x) const {
    if (kind_ == PotentialKind::Gaussian)
        return 0.5 * x * x / sigma2_ + std::log(sigma_ * std::sqrt(2.0 * M_PI));
    double ax = std::abs(x);
    if (ax >= half_width_) return std::numeric_limits<double>::infinity();
    double h = 2.0 * half_width_ / (v_table_.size() - 1);
    double t = (x + half_width_) / h;
    int i = std::min<int>(static_cast<int>(t), static_cast<int>(v_table_.size()) - 2);
    double frac = t - i;
    return v_table_[i] * (1.0 - frac) + v_table_[i + 1] * frac;
}

double PotentialSpec::exp_neg_V(double x) const {
    double v = V(x);
    return std::isinf(v) ? 0.0 : std::exp(-v);
}

double PotentialSpec::sample_step(RngStream& rng) const {
    if (kind_ == PotentialKind::Gaussian) return sigma_ * rng.normal();
    double u = rng.uniform() * cdf_table_.back();
    auto it = std::upper_bound(cdf_table_.begin(), cdf_table_.end(), u);
    int i = std::max<int>(1, static_cast<int>(it - cdf_table_.begin()));
    i = std::min<int>(i, static_cast<int>(cdf_table_.size()) - 1);
    double h = 2.0 * half_width_ / (cdf_table_.size() - 1);
    double c0 = cdf_table_[i - 1], c1 = cdf_table_[i];
    double frac = (c1 > c0) ? (u - c0) / (c1 - c0) : 0.5;
    return -half_width_ + (i - 1 + frac) * h;
}

} // namespace pinlab
