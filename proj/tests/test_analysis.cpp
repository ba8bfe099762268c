#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pinlab/analysis.hpp"

using namespace pinlab;

TEST_CASE("scaling fit: exact, noisy, constant") {
    std::vector<std::pair<double, double>> exact;
    for (int n : {16, 32, 64, 128, 256}) exact.emplace_back(n, std::pow(n, 1.5));
    ScalingFit f = fit_scaling_exponent(exact);
    CHECK(f.slope == doctest::Approx(1.5).epsilon(1e-12));

    RngStream rng = seed_stream(61, 0);
    std::vector<std::pair<double, double>> noisy;
    for (int n : {16, 32, 64, 128, 256, 512})
        noisy.emplace_back(n, 3.1 * std::pow(n, 1.5) * (1.0 + 0.01 * rng.normal()));
    ScalingFit g = fit_scaling_exponent(noisy);
    CHECK(g.slope == doctest::Approx(1.5).epsilon(0.02 / 1.5));

    std::vector<std::pair<double, double>> flat;
    for (int n : {16, 32, 64, 128}) flat.emplace_back(n, 7.0);
    CHECK(fit_scaling_exponent(flat).slope == doctest::Approx(0.0));

    CHECK_THROWS(fit_scaling_exponent({{1.0, 1.0}, {2.0, 2.0}}));
    CHECK_THROWS(fit_scaling_exponent({{1, 1}, {2, 1}, {3, 1}, {2.5, 1}}));
    CHECK_THROWS(fit_scaling_exponent({{1, 1}, {2, -1}, {3, 1}, {4, 1}}));
}

TEST_CASE("hill estimator: pareto oracle, exponential flag, scale freedom") {
    RngStream rng = seed_stream(62, 0);
    const int n = 1000000;
    std::vector<double> pareto(n);
    for (int i = 0; i < n; ++i) pareto[i] = std::pow(rng.uniform(), -2.5);  // alpha = 0.4
    HillEstimate h = hill_tail_index(pareto, 10000);
    CHECK(h.alpha == doctest::Approx(0.4).epsilon(0.02 / 0.4));
    CHECK(h.heavy_tailed);

    std::vector<double> scaled = pareto;
    for (double& v : scaled) v *= 17.0;
    HillEstimate hs = hill_tail_index(scaled, 10000);
    CHECK(hs.alpha == doctest::Approx(h.alpha).epsilon(1e-12));

    std::vector<double> expo(200000);
    for (double& v : expo) v = rng.exponential();
    HillEstimate he = hill_tail_index(expo, 20000);
    CHECK_FALSE(he.heavy_tailed);

    CHECK_THROWS(hill_tail_index(pareto, 10));
    CHECK_THROWS(hill_tail_index(std::vector<double>(100, 1.0), 60));
}

TEST_CASE("exact contact distribution: normalization and eps-monotonicity") {
    ContactDistribution d0 = exact_contact_distribution(5, 0.5, 1.0);
    double s = 0.0;
    for (double p : d0.prob) s += p;
    CHECK(s == doctest::Approx(1.0).epsilon(1e-12));

    // raising eps raises the relative weight of the full contact set
    ContactDistribution d1 = exact_contact_distribution(5, 2.0, 1.0);
    int full = (1 << 4) - 1;
    CHECK(d1.prob[full] > d0.prob[full]);
    CHECK(d0.prob[0] > d1.prob[0]);

    // eps -> 0 concentrates on the empty set
    ContactDistribution tiny = exact_contact_distribution(4, 1e-9, 1.0);
    CHECK(tiny.prob[0] > 0.999);
}
