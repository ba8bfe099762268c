#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pinlab/renewal.hpp"
#include "pinlab/transfer.hpp"

using namespace pinlab;

namespace {
// 99% chi-square quantile via Wilson-Hilferty
double chi2_99(int dof) {
    double k = dof;
    double z = 2.3263478740408408;
    double t = 1.0 - 2.0 / (9.0 * k) + z * std::sqrt(2.0 / (9.0 * k));
    return k * t * t * t;
}
} // namespace

TEST_CASE("synthetic q: geometric and critical-power heads") {
    SyntheticQ g = synthetic_q(SyntheticKind::Geometric, 0.5, 64);
    CHECK(g.q[1] == doctest::Approx(0.5));
    CHECK(g.q[2] == doctest::Approx(0.25));
    CHECK(g.total() == doctest::Approx(1.0).epsilon(1e-12));

    SyntheticQ c = synthetic_q(SyntheticKind::CriticalPower, 1.5, 1 << 14);
    CHECK(c.total() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(c.q[100] == doctest::Approx(1.5 / 1e4).epsilon(1e-12));
    CHECK_THROWS(synthetic_q(SyntheticKind::CriticalPower, 1.6, 1 << 10));  // head would go negative
}

TEST_CASE("synthetic q: exponential mean matches the closed form") {
    const double G = 0.4;
    SyntheticQ e = synthetic_q(SyntheticKind::Exponential, G, 2048);
    double r = std::exp(-G);
    double mean_closed = 1.0 / (1.0 - r);
    double mean_table = 0.0;
    for (int n = 1; n <= e.n_max; ++n) mean_table += n * e.q[n];
    // analytic remainder of sum_{n>N} n q(n) for the geometric law
    double norm = (1.0 - r) / r;
    double tN = std::pow(r, e.n_max + 1);
    double tail_mean = norm * tN * ((e.n_max + 1) - e.n_max * r) / ((1.0 - r) * (1.0 - r));
    CHECK(mean_table + tail_mean == doctest::Approx(mean_closed).epsilon(1e-10));
    CHECK(e.total() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("free renewal: density laws across regimes") {
    SyntheticQ g = synthetic_q(SyntheticKind::Geometric, 0.5, 256);
    AliasTable ga = g.make_alias();
    RngStream rng = seed_stream(41, 0);
    const int N = 100000;
    double iota = 0.0;
    const int reps = 200;
    for (int r = 0; r < reps; ++r) iota += sample_renewal(g, ga, N, rng).iota_N;
    CHECK(iota / reps / N == doctest::Approx(0.5).epsilon(0.02));

    SyntheticQ c = synthetic_q(SyntheticKind::CriticalPower, 1.5, 1 << 16);
    AliasTable ca = c.make_alias();
    const int Nc = 1 << 16;
    double icrit = 0.0;
    for (int r = 0; r < 200; ++r) icrit += sample_renewal(c, ca, Nc, rng).iota_N;
    icrit /= 200;
    double predicted = Nc / (1.5 * std::log(static_cast<double>(Nc)));
    CHECK(icrit / predicted == doctest::Approx(1.0).epsilon(0.15));
}

TEST_CASE("renewal equation: empirical u against the tabulated recursion") {
    SyntheticQ g = synthetic_q(SyntheticKind::Geometric, 0.35, 256);
    AliasTable ga = g.make_alias();
    std::vector<double> q(g.q.begin(), g.q.end());
    RenewalTables t = renewal_tables(q, 70);
    RngStream rng = seed_stream(42, 0);
    const int reps = 1000000;
    std::vector<int> hits(65, 0);
    for (int r = 0; r < reps; ++r) {
        int c = 0;
        while (c <= 64) {
            c += g.sample_gap(ga, rng);
            if (c <= 64) ++hits[c];
        }
    }
    for (int n = 1; n <= 64; ++n) {
        double emp = static_cast<double>(hits[n]) / reps;
        double se = std::sqrt(t.u[n] * (1.0 - t.u[n]) / reps);
        CHECK(std::abs(emp - t.u[n]) <= 3.5 * se);
    }
}

TEST_CASE("conditioned sampler: exact conditional gap law (chi-square at 1%)") {
    SyntheticQ g = synthetic_q(SyntheticKind::Geometric, 0.3, 64);
    const int N = 18;
    std::vector<double> q(g.q.begin(), g.q.end());
    q.resize(N + 2, 0.0);
    RenewalTables t = renewal_tables(q, N);
    AliasTable alias(q);
    RngStream rng = seed_stream(43, 0);
    const int reps = 200000;
    std::vector<int> counts(N + 2, 0);
    for (int r = 0; r < reps; ++r) {
        RenewalRun run = sample_conditioned_renewal(q, alias, t.u, N, rng);
        REQUIRE(run.chi.size() >= 2);
        CHECK(run.chi.back() == N + 1);
        ++counts[run.chi[1]];
    }
    // exact first-gap law: q(j) u(N+1-j) / u(N+1)
    double chi2 = 0.0;
    int dof = 0;
    for (int j = 1; j <= N + 1; ++j) {
        double p = q[j] * t.u[N + 1 - j] / t.u[N + 1];
        double expect = p * reps;
        if (expect < 5.0) continue;
        double diff = counts[j] - expect;
        chi2 += diff * diff / expect;
        ++dof;
    }
    CHECK(chi2 < chi2_99(dof - 1));
}

TEST_CASE("deterministic renewal is the full set") {
    std::vector<double> q(12, 0.0);
    q[1] = 1.0;
    RenewalTables t = renewal_tables(q, 10);
    AliasTable alias(q);
    RngStream rng = seed_stream(44, 0);
    RenewalRun run = sample_conditioned_renewal(q, alias, t.u, 10, rng);
    CHECK(run.chi.size() == 12);
    for (int i = 0; i < 12; ++i) CHECK(run.chi[i] == i);
}

TEST_CASE("gap statistics: frozen example, sentinel, monotonicity") {
    GapStatistics g = gap_statistics({0, 3, 4, 10}, 10);
    CHECK(g.delta_N == 6);
    CHECK(g.iota_N == 3);
    CHECK(g.argmax_left == 4);

    GapStatistics full = gap_statistics({0, 1, 2, 3, 4, 5}, 5);
    CHECK(full.delta_N == 1);

    GapStatistics empty = gap_statistics({0, 14}, 10);
    CHECK(empty.delta_N == 11);  // sentinel N+1

    SyntheticQ c = synthetic_q(SyntheticKind::CriticalPower, 1.5, 1 << 14);
    AliasTable ca = c.make_alias();
    RngStream rng = seed_stream(45, 0);
    RenewalRun run = sample_renewal(c, ca, 10000, rng);
    int prev = 0;
    for (int N : {100, 400, 1600, 6400, 10000}) {
        int d = gap_statistics(run.chi, N).delta_N;
        CHECK(d >= prev);
        prev = d;
    }
}

TEST_CASE("critical u-asymptotic: u(n) C log n near 1 at n = 2^14") {
    const int n = 1 << 14;
    SyntheticQ c = synthetic_q(SyntheticKind::CriticalPower, 1.5, n + 1);
    std::vector<double> q(c.q.begin(), c.q.end());
    RenewalTables t = renewal_tables(q, n);
    double val = t.u[n] * 1.5 * std::log(static_cast<double>(n));
    CHECK(val > 0.9);
    CHECK(val < 1.1);
    CHECK(t.C_eps == doctest::Approx(1.5).epsilon(0.01));
}

TEST_CASE("verify_gap_bounds: critical shape and exponential cutoff") {
    SyntheticQ c = synthetic_q(SyntheticKind::CriticalPower, 1.5, 1 << 14);
    auto rows = verify_gap_bounds("critical", c, {1 << 12, 1 << 14}, {0.05, 1.0, 4.0, 16.0},
                                  2000, 99, 2);
    double lower = 0.0, p1 = 0.0, p16 = 0.0;
    for (auto& r : rows) {
        if (r.N == (1 << 14) && r.t_or_c == 0.05) lower = r.estimate;
        if (r.N == (1 << 14) && r.t_or_c == 1.0) p1 = r.estimate;
        if (r.N == (1 << 14) && r.t_or_c == 16.0) p16 = r.estimate;
    }
    CHECK(lower > 0.9);   // delta_N >= t N/log N almost surely for tiny t
    CHECK(p1 > p16);      // decreasing in t

    const double G = 0.5;
    SyntheticQ e = synthetic_q(SyntheticKind::Exponential, G, 2048);
    auto erows = verify_gap_bounds("exponential", e, {1 << 14}, {2.0 / G}, 2000, 99, 2);
    CHECK(erows[0].estimate <= 0.05);
}
