#include "pinlab/levy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pinlab/grid.hpp"

namespace pinlab {

AtomicSignedMeasure::AtomicSignedMeasure(std::vector<std::pair<double, double>> atoms)
    : atoms_(std::move(atoms)) {
    for (auto& [x, y] : atoms_) {
        (void)y;
        if (!(x >= 0.0 && x <= 1.0))
            throw std::invalid_argument("AtomicSignedMeasure: positions must lie in [0,1]");
    }
    std::sort(atoms_.begin(), atoms_.end());
    prefix_.resize(atoms_.size());
    prefix_abs_.resize(atoms_.size());
    double s = 0.0, sa = 0.0;
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
        s += atoms_[i].second;
        sa += std::abs(atoms_[i].second);
        prefix_[i] = s;
        prefix_abs_[i] = sa;
    }
}

double AtomicSignedMeasure::cum(double t) const {
    auto it = std::upper_bound(atoms_.begin(), atoms_.end(), t,
                               [](double v, const std::pair<double, double>& a) { return v < a.first; });
    if (it == atoms_.begin()) return 0.0;
    return prefix_[it - atoms_.begin() - 1];
}

double AtomicSignedMeasure::cum_abs(double t) const {
    auto it = std::upper_bound(atoms_.begin(), atoms_.end(), t,
                               [](double v, const std::pair<double, double>& a) { return v < a.first; });
    if (it == atoms_.begin()) return 0.0;
    return prefix_abs_[it - atoms_.begin() - 1];
}

AtomicSignedMeasure AtomicSignedMeasure::positive_part() const {
    std::vector<std::pair<double, double>> a;
    for (auto& [x, y] : atoms_)
        if (y > 0.0) a.emplace_back(x, y);
    return AtomicSignedMeasure(std::move(a));
}

AtomicSignedMeasure AtomicSignedMeasure::negative_part() const {
    std::vector<std::pair<double, double>> a;
    for (auto& [x, y] : atoms_)
        if (y < 0.0) a.emplace_back(x, -y);
    return AtomicSignedMeasure(std::move(a));
}

double c_L_constant(double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("c_L_constant: sigma must be > 0");
    return 3.0 * std::sqrt(10.0) / (std::sqrt(M_PI) * std::pow(360.0, 0.7)) * std::tgamma(0.7) *
           std::pow(sigma, 0.4);
}

double c_L_constant_quadrature(double sigma) {
    // substitution s = x^5 removes the s^{2/5} endpoint singularity:
    // integral becomes int_0^X 5 x^6 e^{-360 x^10} dx
    std::vector<double> x, w;
    gauss_legendre_rule(96, x, w);
    const double X = 1.2;
    double s = 0.0;
    for (int i = 0; i < 96; ++i) {
        double t = 0.5 * X * (x[i] + 1.0);
        double t2 = t * t;
        double t10 = t2 * t2 * t2 * t2 * t2;
        s += 0.5 * X * w[i] * 5.0 * t2 * t2 * t2 * std::exp(-360.0 * t10);
    }
    return 6.0 * std::sqrt(10.0) / std::sqrt(M_PI) * std::pow(sigma, 0.4) * s;
}

double symmetric_stable_tail_constant(double alpha) {
    return std::tgamma(alpha) * std::sin(M_PI * alpha / 2.0) / M_PI;
}

double sample_stable_symmetric(double c_tail, RngStream& rng, double alpha) {
    if (!(c_tail > 0.0)) throw std::invalid_argument("sample_stable_symmetric: scale must be > 0");
    double scale = std::pow(c_tail / symmetric_stable_tail_constant(alpha), 1.0 / alpha);
    // Chambers-Mallows-Stuck, symmetric case
    double u = M_PI * (rng.uniform() - 0.5);
    double w = rng.exponential();
    double x = std::sin(alpha * u) / std::pow(std::cos(u), 1.0 / alpha) *
               std::pow(std::cos(u - alpha * u) / w, (1.0 - alpha) / alpha);
    return scale * x;
}

double sample_subordinator(double c_tail, RngStream& rng, double alpha) {
    if (!(c_tail > 0.0)) throw std::invalid_argument("sample_subordinator: scale must be > 0");
    // standard one-sided stable (Laplace transform e^{-lambda^alpha}) has
    // P(S > x) ~ x^{-alpha} / Gamma(1-alpha)
    double scale = std::pow(c_tail * std::tgamma(1.0 - alpha), 1.0 / alpha);
    double u = M_PI * rng.uniform();
    double w = rng.exponential();
    double a = std::pow(std::sin(alpha * u), alpha / (1.0 - alpha)) *
               std::sin((1.0 - alpha) * u) /
               std::pow(std::sin(u), 1.0 / (1.0 - alpha));
    return scale * std::pow(a / w, (1.0 - alpha) / alpha);
}

int sample_poisson(double mean, RngStream& rng) {
    if (mean < 0.0) throw std::invalid_argument("sample_poisson: negative mean");
    if (mean < 60.0) {
        double limit = std::exp(-mean);
        double prod = rng.uniform();
        int n = 0;
        while (prod > limit) {
            prod *= rng.uniform();
            ++n;
        }
        return n;
    }
    // split recursively; keeps the multiplication method exact for large means
    int half = sample_poisson(mean / 2.0, rng);
    return half + sample_poisson(mean - mean / 2.0, rng);
}

DLSample sample_dL(double eta, double sigma, RngStream& rng) {
    if (!(eta > 0.0)) throw std::invalid_argument("sample_dL: eta must be > 0");
    DLSample out;
    double cl = c_L_constant(sigma);
    out.expected_atoms = 5.0 * cl * std::pow(eta, -0.4);
    out.truncation_bias = (10.0 / 3.0) * cl * std::pow(eta, 0.6);
    int count = sample_poisson(out.expected_atoms, rng);
    std::vector<std::pair<double, double>> atoms;
    atoms.reserve(count);
    for (int i = 0; i < count; ++i) {
        double pos = rng.uniform();
        double mag = eta * std::pow(rng.uniform(), -2.5);
        double sign = (rng.uniform() < 0.5) ? -1.0 : 1.0;
        atoms.emplace_back(pos, sign * mag);
    }
    out.measure = AtomicSignedMeasure(std::move(atoms));
    return out;
}

std::vector<double> finite_dim_marginals(const std::function<double(double)>& cum,
                                         const std::vector<double>& breakpoints) {
    for (std::size_t i = 0; i < breakpoints.size(); ++i) {
        if (!(breakpoints[i] > 0.0 && breakpoints[i] < 1.0))
            throw std::invalid_argument("finite_dim_marginals: breakpoints must lie in (0,1)");
        if (i > 0 && breakpoints[i] <= breakpoints[i - 1])
            throw std::invalid_argument("finite_dim_marginals: breakpoints must be increasing");
    }
    std::vector<double> inc;
    double prev = cum(0.0);
    for (double a : breakpoints) {
        double c = cum(a);
        inc.push_back(c - prev);
        prev = c;
    }
    return inc;
}

double ks_distance(std::vector<double> a, std::vector<double> b) {
    if (a.size() < 100 || b.size() < 100)
        throw std::invalid_argument("ks_distance: need at least 100 samples per side");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j])
            ++i;
        else
            ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / a.size() -
                                 static_cast<double>(j) / b.size()));
    }
    return d;
}

double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf) {
    if (samples.size() < 100)
        throw std::invalid_argument("ks_distance: need at least 100 samples");
    std::sort(samples.begin(), samples.end());
    double d = 0.0;
    const double n = static_cast<double>(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        double f = cdf(samples[i]);
        d = std::max(d, std::max(std::abs((i + 1) / n - f), std::abs(i / n - f)));
    }
    return d;
}

} // namespace pinlab
