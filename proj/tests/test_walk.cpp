#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "pinlab/grid.hpp"
#include "pinlab/walk.hpp"

using namespace pinlab;

TEST_CASE("yz moments against brute-force coefficient sums") {
    WalkState st{0.4, -1.3, 1.7};
    for (int n = 1; n <= 50; ++n) {
        GaussianMoments m = yz_moments(n, st);
        // Z_n = b + na + sum_k (n-k+1) X_k, Y_n = a + sum_k X_k
        double vz = 0.0, cyz = 0.0;
        for (int k = 1; k <= n; ++k) {
            double c = n - k + 1;
            vz += c * c * st.sigma2;
            cyz += c * st.sigma2;
        }
        CHECK(m.meanY == doctest::Approx(st.a));
        CHECK(m.meanZ == doctest::Approx(st.b + n * st.a));
        CHECK(m.varY == doctest::Approx(n * st.sigma2));
        CHECK(m.varZ == doctest::Approx(vz));
        CHECK(m.covYZ == doctest::Approx(cyz));
    }
    CHECK(yz_moments(3, WalkState{0, 0, 1.0}).varZ == doctest::Approx(14.0));
}

TEST_CASE("zz_cov brute force and frozen values") {
    double s2 = 0.9;
    for (int i = 1; i <= 20; ++i)
        for (int j = i; j <= 20; ++j) {
            double direct = 0.0;
            for (int k = 1; k <= i; ++k) direct += (i - k + 1.0) * (j - k + 1.0) * s2;
            CHECK(zz_cov(i, j, s2) == doctest::Approx(direct).epsilon(1e-12));
        }
    CHECK(zz_cov(1, 1, 1.0) == doctest::Approx(1.0));
    CHECK(zz_cov(2, 3, 1.0) == doctest::Approx(8.0));
    CHECK(zz_cov(3, 3, 1.0) == doctest::Approx(yz_moments(3, WalkState{0, 0, 1.0}).varZ));
    CHECK_THROWS(zz_cov(3, 2, 1.0));
}

TEST_CASE("free path moments") {
    PotentialSpec pot = PotentialSpec::gaussian(1.0);
    WalkState st{0, 0, 1.0};
    RngStream rng = seed_stream(11, 0);
    const int reps = 100000, n = 3;
    double vz = 0, cyz = 0, mz = 0;
    for (int r = 0; r < reps; ++r) {
        auto [y, z] = sample_free_path(n, st, pot, rng);
        mz += z[n - 1];
        vz += z[n - 1] * z[n - 1];
        cyz += y[n - 1] * z[n - 1];
    }
    mz /= reps;
    vz = vz / reps - mz * mz;
    cyz /= reps;
    CHECK(std::abs(mz) < 3.0 * std::sqrt(14.0 / reps));
    CHECK(vz == doctest::Approx(14.0).epsilon(0.02));
    CHECK(cyz == doctest::Approx(6.0).epsilon(0.02));
}

TEST_CASE("fully constrained bridge returns the pin") {
    WalkState st{0, 0, 1.0};
    RngStream rng = seed_stream(12, 0);
    std::vector<double> z = sample_bridge(2, st, {{1, 0.77}, {2, -0.1}}, std::nullopt, rng);
    CHECK(z[0] == doctest::Approx(0.77));
    CHECK(z[1] == doctest::Approx(-0.1));
}

TEST_CASE("bridge conditional covariance matches analytic conditioning") {
    WalkState st{0.3, -0.2, 1.3};
    std::vector<Pin> pins = {{3, 0.0}, {7, 0.5}};
    BridgeConditional bc = bridge_conditional(12, st, pins);
    RngStream rng = seed_stream(13, 0);
    const int reps = 200000;
    std::vector<double> mean(bc.free_indices.size(), 0.0);
    std::vector<double> m2(bc.free_indices.size(), 0.0);
    for (int r = 0; r < reps; ++r) {
        std::vector<double> z = sample_bridge(12, st, pins, std::nullopt, rng);
        for (std::size_t i = 0; i < bc.free_indices.size(); ++i) {
            double v = z[bc.free_indices[i] - 1];
            mean[i] += v;
            m2[i] += v * v;
        }
    }
    for (std::size_t i = 0; i < bc.free_indices.size(); ++i) {
        mean[i] /= reps;
        double var = m2[i] / reps - mean[i] * mean[i];
        double se_mean = std::sqrt(bc.cov(i, i) / reps);
        CHECK(std::abs(mean[i] - bc.mean(i)) < 4.0 * se_mean);
        double se_var = bc.cov(i, i) * std::sqrt(2.0 / reps);
        CHECK(std::abs(var - bc.cov(i, i)) < 4.0 * se_var);
    }
}

TEST_CASE("terminal-conditioned bridge midpoint variance approaches 1/192") {
    WalkState st{0, 0, 1.0};
    RngStream rng = seed_stream(14, 0);
    {
        const int n = 256;
        BridgeConditional bc = bridge_conditional(n, st, {{n - 1, 0.0}, {n, 0.0}});
        int mid_free = -1;
        for (std::size_t i = 0; i < bc.free_indices.size(); ++i)
            if (bc.free_indices[i] == n / 2) mid_free = static_cast<int>(i);
        REQUIRE(mid_free >= 0);
        double expect = bc.cov(mid_free, mid_free) / std::pow(static_cast<double>(n), 3.0);
        CHECK(expect == doctest::Approx(1.0 / 192.0).epsilon(0.02));
    }
    const int n = 128, reps = 20000;
    BridgeConditional bc = bridge_conditional(n, st, {{n - 1, 0.0}, {n, 0.0}});
    int mid_free = -1;
    for (std::size_t i = 0; i < bc.free_indices.size(); ++i)
        if (bc.free_indices[i] == n / 2) mid_free = static_cast<int>(i);
    REQUIRE(mid_free >= 0);
    double expect = bc.cov(mid_free, mid_free);
    double s = 0, s2 = 0;
    for (int r = 0; r < reps; ++r) {
        std::vector<double> z = sample_bridge(n, st, {}, std::make_pair(0.0, 0.0), rng);
        double v = z[n / 2 - 1];
        s += v;
        s2 += v * v;
    }
    s /= reps;
    double var = s2 / reps - s * s;
    CHECK(std::abs(var - expect) < 4.0 * expect * std::sqrt(2.0 / reps));
}

TEST_CASE("sequential excursion bridge agrees with dense conditioning") {
    RngStream rng = seed_stream(15, 0);
    const int l = 24, reps = 150000;
    const double a = 0.6, b = -0.4, sigma = 1.2;
    // dense reference through the generic bridge machinery
    WalkState st{-a, 0.0, sigma * sigma};
    BridgeConditional bc = bridge_conditional(l, st, {{l - 1, b}, {l, 0.0}});
    std::vector<double> mean(l - 2, 0.0), var(l - 2, 0.0);
    for (int r = 0; r < reps; ++r) {
        std::vector<double> z = sample_excursion_bridge(l, a, b, sigma, rng);
        for (int i = 0; i < l - 2; ++i) {
            mean[i] += z[i];
            var[i] += z[i] * z[i];
        }
    }
    for (int i = 0; i < l - 2; ++i) {
        mean[i] /= reps;
        var[i] = var[i] / reps - mean[i] * mean[i];
        CHECK(std::abs(mean[i] - bc.mean(i)) < 5.0 * std::sqrt(bc.cov(i, i) / reps));
        CHECK(std::abs(var[i] - bc.cov(i, i)) < 5.0 * bc.cov(i, i) * std::sqrt(2.0 / reps));
    }
    // endpoints exact
    std::vector<double> z = sample_excursion_bridge(l, a, b, sigma, rng);
    CHECK(z[l - 2] == b);
    CHECK(sample_excursion_bridge(1, 0.3, 0.0, 1.0, rng).empty());
    std::vector<double> z2 = sample_excursion_bridge(2, 0.3, 1.7, 1.0, rng);
    CHECK(z2.size() == 1);
    CHECK(z2[0] == 1.7);
}

TEST_CASE("brascamp-lieb variance domination, equality at empty pins") {
    RngStream rng = seed_stream(16, 0);
    const double sigma2 = 0.8, gamma = 1.0 / sigma2;
    for (int trial = 0; trial < 200; ++trial) {
        int n = 4 + static_cast<int>(rng.uniform() * 29);
        int npins = static_cast<int>(rng.uniform() * std::min(6, n - 1));
        std::vector<int> pins;
        for (int p = 0; p < npins; ++p) pins.push_back(1 + static_cast<int>(rng.uniform() * n));
        int k = 1 + static_cast<int>(rng.uniform() * n);
        double bound = k * (k + 1.0) * (2.0 * k + 1.0) / (6.0 * gamma);
        double v = pinned_conditional_variance(n, k, pins, sigma2);
        CHECK(v <= bound * (1.0 + 1e-9));
        if (pins.empty()) CHECK(v == doctest::Approx(bound).epsilon(1e-10));
    }
}

TEST_CASE("local limit density: value, symmetry, normalization, covariance") {
    CHECK(local_limit_density(0, 0) == doctest::Approx(std::sqrt(3.0) / M_PI).epsilon(1e-15));
    CHECK(local_limit_density(0.7, -0.2) == doctest::Approx(local_limit_density(-0.7, 0.2)));

    std::vector<double> x, w;
    gauss_legendre_rule(128, x, w);
    double total = 0.0, myy = 0.0, myz = 0.0, mzz = 0.0;
    const double Ly = 9.0, Lz = 6.0;
    for (int i = 0; i < 128; ++i)
        for (int j = 0; j < 128; ++j) {
            double y = Ly * x[i], z = Lz * x[j];
            double g = Ly * Lz * w[i] * w[j] * local_limit_density(y, z);
            total += g;
            myy += g * y * y;
            myz += g * y * z;
            mzz += g * z * z;
        }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(myy == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(myz == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(mzz == doctest::Approx(1.0 / 3.0).epsilon(1e-8));
}

TEST_CASE("verify_local_limit: covariance and shrinking discrepancy") {
    PotentialSpec pot = PotentialSpec::gaussian(1.0);
    RngStream rng = seed_stream(17, 0);
    double prev = 1e9;
    for (int n : {16, 64, 256}) {
        LocalLimitReport rep = verify_local_limit(n, 400000, pot, rng);
        CHECK(rep.cov_yy == doctest::Approx(1.0).epsilon(0.02));
        CHECK(rep.cov_yz == doctest::Approx(0.5 * (n + 1.0) / n).epsilon(0.02));
        CHECK(rep.cov_zz ==
              doctest::Approx((n + 1.0) * (2.0 * n + 1.0) / (6.0 * n * n)).epsilon(0.02));
        CHECK(rep.sup_discrepancy < prev + 0.003);  // allow sampling noise on top of the trend
        prev = rep.sup_discrepancy;
    }
    CHECK_THROWS(verify_local_limit(5, 20000, pot, rng));
    CHECK_THROWS(verify_local_limit(16, 100, pot, rng));
}

TEST_CASE("conditioned bm covariance and 1/720") {
    ConditionedBmCov bm = conditioned_bm_cov();
    CHECK(bm.A(0, 0) == doctest::Approx(1.0 / 20.0));
    CHECK(bm.A(0, 1) == doctest::Approx(1.0 / 8.0));
    CHECK(bm.A(0, 2) == doctest::Approx(1.0 / 6.0));
    CHECK(bm.A(1, 1) == doctest::Approx(1.0 / 3.0));
    CHECK(bm.A(1, 2) == doctest::Approx(1.0 / 2.0));
    CHECK(bm.A(2, 2) == doctest::Approx(1.0));
    CHECK(bm.conditional_variance == doctest::Approx(1.0 / 720.0).epsilon(1e-12));
    Eigen::LLT<Eigen::Matrix3d> llt(bm.A);
    CHECK(llt.info() == Eigen::Success);
}

TEST_CASE("phi_of_t values") {
    CHECK(phi_of_t(0.0) == doctest::Approx(0.5));
    CHECK(phi_of_t(1.0 / std::sqrt(720.0)) == doctest::Approx(0.15865525393146).epsilon(1e-10));
    for (double t : {0.01, 0.05, 0.2}) CHECK(phi_of_t(t) + phi_of_t(-t) == doctest::Approx(1.0));
}

TEST_CASE("conditioned integrated brownian motion sampler") {
    std::vector<double> grid;
    const int k = 256;
    for (int i = 1; i <= k; ++i) grid.push_back(static_cast<double>(i) / (k + 1));
    ConditionedIBM ibm(grid);
    RngStream rng = seed_stream(18, 0);
    const int reps = 50000;
    int mid = -1;
    for (int i = 0; i < k; ++i)
        if (std::abs(grid[i] - 0.5) < 0.5 / (k + 1)) mid = i;
    REQUIRE(mid >= 0);
    double s = 0, s2 = 0, strap = 0, strap2 = 0, sb = 0;
    for (int r = 0; r < reps; ++r) {
        auto [b, ii] = ibm.sample(rng);
        s += ii[mid];
        s2 += ii[mid] * ii[mid];
        double trap = 0.0;
        for (int i = 0; i + 1 < k; ++i)
            trap += 0.5 * (ii[i] + ii[i + 1]) * (grid[i + 1] - grid[i]);
        trap += 0.5 * ii[0] * grid[0] + 0.5 * ii[k - 1] * (1.0 - grid[k - 1]);
        strap += trap;
        strap2 += trap * trap;
        sb += b[mid];
    }
    s /= reps;
    sb /= reps;
    double var_mid = s2 / reps - s * s;
    strap /= reps;
    double var_trap = strap2 / reps - strap * strap;
    CHECK(std::abs(s) < 3.5 * std::sqrt(var_mid / reps));
    CHECK(std::abs(sb) < 3.5 * std::sqrt(0.25 / reps));
    CHECK(var_mid == doctest::Approx(1.0 / 192.0).epsilon(0.03));
    CHECK(var_trap == doctest::Approx(1.0 / 720.0).epsilon(0.03));
}
