#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pinlab/potential.hpp"

using namespace pinlab;

TEST_CASE("gaussian potential basics") {
    PotentialSpec p = PotentialSpec::gaussian(1.0);
    CHECK(p.V(0.0) == doctest::Approx(0.5 * std::log(2.0 * M_PI)).epsilon(1e-15));
    CHECK(p.V(1.5) == p.V(-1.5));
    CHECK(p.gamma() == doctest::Approx(1.0));
    CHECK(p.sigma2() == doctest::Approx(1.0));

    PotentialSpec p2 = PotentialSpec::gaussian(2.0);
    CHECK(p2.gamma() == doctest::Approx(1.0 / 4.0));  // gamma = 1/sigma^2 exactly
}

TEST_CASE("gaussian normalization by quadrature") {
    PotentialSpec p = PotentialSpec::gaussian(0.7);
    double h = 1e-3, s = 0.0;
    for (double x = -8.0; x < 8.0; x += h) s += h * 0.5 * (p.exp_neg_V(x) + p.exp_neg_V(x + h));
    CHECK(s == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("tabulated potential: quartic example") {
    // V shape x^2/2 + x^4/8 before normalization
    auto shape = [](double x) { return 0.5 * x * x + 0.125 * x * x * x * x; };
    PotentialSpec p = PotentialSpec::tabulated(shape, 8.0);
    CHECK(p.normalization_residual() < 1e-8);
    CHECK(p.gamma() > 0.0);
    CHECK(p.sigma2() > 0.0);
    CHECK(p.sigma2() < 1.0);  // quartic term narrows the step law
    CHECK(p.V(0.5) == doctest::Approx(p.V(-0.5)).epsilon(1e-12));
    CHECK(std::isinf(p.V(9.0)));
    CHECK(p.exp_neg_V(9.0) == 0.0);

    RngStream rng = seed_stream(3, 0);
    const int n = 400000;
    double m1 = 0, m2 = 0;
    for (int i = 0; i < n; ++i) {
        double x = p.sample_step(rng);
        m1 += x;
        m2 += x * x;
    }
    CHECK(std::abs(m1 / n) < 4.0 * std::sqrt(p.sigma2() / n));
    CHECK(m2 / n == doctest::Approx(p.sigma2()).epsilon(0.02));
}

TEST_CASE("non-convex tabulated shape is rejected") {
    auto shape = [](double x) { return -0.5 * x * x + 0.25 * x * x * x * x; };  // double well
    CHECK_THROWS(PotentialSpec::tabulated(shape, 4.0));
}
