#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pinlab/analysis.hpp"
#include "pinlab/levy.hpp"
#include "pinlab/sampler.hpp"

using namespace pinlab;

namespace {
const double kSigma = 1.0;
const int kNmax = 2048;

struct Fixture {
    PotentialSpec pot = PotentialSpec::gaussian(kSigma);
    GridSpec grid = GridSpec::gauss_legendre(8.0, 64);
    double eps_c = 0.0;
    DiscreteKernel kc, k_half, k_twice;
    Fixture() {
        OperatorBuilder op(grid, pot, kNmax);
        eps_c = critical_epsilon(op);
        kc = markov_kernel(eps_c, grid, pot, kNmax, 600, 2);
        k_half = markov_kernel(0.5 * eps_c, grid, pot, kNmax, 600, 2);
        k_twice = markov_kernel(2.0 * eps_c, grid, pot, kNmax, 600, 2);
    }
};

const Fixture& fx() {
    static Fixture f;
    return f;
}
} // namespace

TEST_CASE("excursion sampler edge cases") {
    RngStream rng = seed_stream(21, 0);
    PotentialSpec pot = PotentialSpec::gaussian(1.0);
    CHECK(sample_excursion(1, 0.4, 0.0, pot, rng).empty());
    CHECK_THROWS(sample_excursion(1, 0.4, 0.2, pot, rng));
    std::vector<double> z = sample_excursion(2, 0.0, 1.23, pot, rng);
    CHECK(z.size() == 1);
    CHECK(z[0] == 1.23);
}

TEST_CASE("excursion midpoint variance at l = 64") {
    RngStream rng = seed_stream(22, 0);
    PotentialSpec pot = PotentialSpec::gaussian(1.0);
    const int l = 64, reps = 100000;
    double s = 0, s2 = 0;
    for (int r = 0; r < reps; ++r) {
        std::vector<double> z = sample_excursion(l, 0.0, 0.0, pot, rng);
        s += z[l / 2 - 1];
        s2 += z[l / 2 - 1] * z[l / 2 - 1];
    }
    s /= reps;
    double var = s2 / reps - s * s;
    CHECK(var / std::pow(static_cast<double>(l), 3.0) ==
          doctest::Approx(1.0 / 192.0).epsilon(0.05));
}

TEST_CASE("free pinning path: pins and N^{3/2} scaling") {
    PotentialSpec pot = PotentialSpec::gaussian(1.0);
    RngStream rng = seed_stream(23, 0);
    FieldPath f = sample_free_pinning_path(64, pot, rng);
    CHECK(f[64] == 0.0);
    CHECK(f[65] == 0.0);
    CHECK(f.boundary_pinned());

    std::vector<std::pair<double, double>> pts;
    for (int N : {32, 64, 128, 256, 512}) {
        double acc = 0.0;
        const int reps = 600;
        for (int r = 0; r < reps; ++r) {
            FieldPath g = sample_free_pinning_path(N, pot, rng);
            double mx = 0.0;
            for (int i = 0; i <= N; ++i) mx = std::max(mx, std::abs(g[i]));
            acc += mx;
        }
        pts.emplace_back(N, acc / reps);
    }
    ScalingFit fit = fit_scaling_exponent(pts);
    CHECK(fit.slope == doctest::Approx(1.5).epsilon(0.05));
}

TEST_CASE("contact chain structure: endpoints and A_N membership") {
    const Fixture& f = fx();
    PinningSampler s(f.kc);
    RngStream rng = seed_stream(24, 0);
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<ChainPoint> chain = s.sample_contact_chain(200, rng);
        CHECK(chain.front().t == 0);
        CHECK(chain.front().state == 0);
        CHECK(chain.back().t == 201);
        CHECK(chain.back().state == 0);
        REQUIRE(chain.size() >= 2);
        CHECK(chain[chain.size() - 2].t == 200);  // N in tau, closing jump has length 1
        for (std::size_t i = 1; i < chain.size(); ++i) {
            int gap = chain[i].t - chain[i - 1].t;
            CHECK(gap >= 1);
            CHECK((gap == 1) == (chain[i].state == 0));
        }
    }
}

TEST_CASE("small-N contact law matches enumeration across regimes") {
    const Fixture& f = fx();
    for (const DiscreteKernel* k : {&f.k_half, &f.kc, &f.k_twice}) {
        PinningSampler s(*k);
        for (int N : {3, 5}) {
            ContactDistribution exact = exact_contact_distribution(N, k->eps, kSigma);
            ContactDistribution emp = empirical_contact_distribution(s, N, 50000, 777 + N, 2);
            CHECK(tv_distance(exact, emp) < 0.03);
        }
    }
}

TEST_CASE("exact and skeleton chain modes agree in law") {
    const Fixture& f = fx();
    PinningSampler s(f.kc);
    const int N = 128, reps = 20000;
    std::vector<double> ell_a(reps), ell_b(reps), delta_a(reps), delta_b(reps);
    RngStream rng = seed_stream(25, 0);
    for (int r = 0; r < reps; ++r) {
        std::vector<ChainPoint> ca = s.sample_contact_chain_mode(N, rng, true);
        std::vector<ChainPoint> cb = s.sample_contact_chain_mode(N, rng, false);
        auto stats = [N](const std::vector<ChainPoint>& c) {
            int ell = 0, last = 0, delta = 0;
            for (const ChainPoint& p : c) {
                if (p.t >= 1 && p.t <= N) ++ell;
                if (p.t <= N && p.t - last > delta) delta = p.t - last;
                if (p.t <= N) last = p.t;
            }
            return std::make_pair(static_cast<double>(ell), static_cast<double>(delta));
        };
        std::tie(ell_a[r], delta_a[r]) = stats(ca);
        std::tie(ell_b[r], delta_b[r]) = stats(cb);
    }
    CHECK(ks_distance(ell_a, ell_b) < 0.02);
    CHECK(ks_distance(delta_a, delta_b) < 0.02);
}

TEST_CASE("pinning path: invariants, stored contacts, symmetry") {
    const Fixture& f = fx();
    PinningSampler s(f.kc);
    RngStream rng = seed_stream(26, 0);
    const int N = 256, reps = 4000;
    double mid_sum = 0.0, mid_sq = 0.0;
    int sign_pos = 0, sign_tot = 0;
    for (int r = 0; r < reps; ++r) {
        FieldPath fld = s.sample_pinning_path(N, rng);
        CHECK(fld.boundary_pinned());
        if (r < 50) {
            ContactStructure cs = contact_structure(fld);
            REQUIRE(fld.known_contacts().has_value());
            CHECK(cs.tau == *fld.known_contacts());  // scan agrees with the stored set
            for (int t : cs.tau) CHECK(fld[t] == 0.0);
            ExcursionAreas ex = excursion_areas(fld, cs);
            for (std::size_t i = 0; i < ex.A.size(); ++i) {
                CHECK(ex.A[i] <= ex.Atilde[i] + 1e-12);
                if (ex.A[i] != 0.0) {
                    ++sign_tot;
                    if (ex.A[i] > 0.0) ++sign_pos;
                }
            }
        }
        mid_sum += fld[N / 2];
        mid_sq += fld[N / 2] * fld[N / 2];
    }
    double mean = mid_sum / reps;
    double sd = std::sqrt(std::max(mid_sq / reps - mean * mean, 1e-30));
    CHECK(std::abs(mean) <= 3.5 * sd / std::sqrt(static_cast<double>(reps)));
    // sign balance of block areas (binomial 3.5 sigma)
    CHECK(std::abs(sign_pos - 0.5 * sign_tot) <= 3.5 * 0.5 * std::sqrt(static_cast<double>(sign_tot)));
}

TEST_CASE("adjacent block areas are uncorrelated") {
    const Fixture& f = fx();
    PinningSampler s(f.k_twice);
    RngStream rng = seed_stream(27, 0);
    const int N = 512;
    std::vector<double> a1, a2;
    for (int r = 0; r < 3000; ++r) {
        FieldPath fld = s.sample_pinning_path(N, rng);
        ContactStructure cs = contact_structure(fld);
        ExcursionAreas ex = excursion_areas(fld, cs);
        for (std::size_t i = 0; i + 1 < ex.A.size(); i += 2) {
            a1.push_back(ex.A[i]);
            a2.push_back(ex.A[i + 1]);
        }
    }
    double n = static_cast<double>(a1.size());
    double m1 = 0, m2 = 0;
    for (std::size_t i = 0; i < a1.size(); ++i) {
        m1 += a1[i];
        m2 += a2[i];
    }
    m1 /= n;
    m2 /= n;
    double c12 = 0, v1 = 0, v2 = 0;
    for (std::size_t i = 0; i < a1.size(); ++i) {
        c12 += (a1[i] - m1) * (a2[i] - m2);
        v1 += (a1[i] - m1) * (a1[i] - m1);
        v2 += (a2[i] - m2) * (a2[i] - m2);
    }
    double corr = c12 / std::sqrt(v1 * v2);
    CHECK(std::abs(corr) < 3.5 / std::sqrt(n));
}

TEST_CASE("localized concentration: ell_N/N tightens as N doubles") {
    const Fixture& f = fx();
    PinningSampler s(f.k_twice);
    RngStream rng = seed_stream(28, 0);
    double prev_sd = 1e9;
    for (int N : {128, 256, 512}) {
        const int reps = 1500;
        double m = 0, m2 = 0;
        for (int r = 0; r < reps; ++r) {
            FieldPath fld = s.sample_pinning_path(N, rng);
            ContactStructure cs = contact_structure(fld);
            double frac = static_cast<double>(cs.ell_N) / N;
            m += frac;
            m2 += frac * frac;
        }
        m /= reps;
        double sd = std::sqrt(std::max(m2 / reps - m * m, 0.0));
        CHECK(sd < prev_sd + 0.01);
        prev_sd = sd;
    }
}

TEST_CASE("infinite-volume prefix: termination rate below criticality") {
    const Fixture& f = fx();
    PinningSampler s(f.k_half);
    RngStream rng = seed_stream(29, 0);
    const int reps = 4000;
    long jumps = 0, deaths = 0;
    for (int r = 0; r < reps; ++r) {
        bool terminated = false;
        FieldPath fld = s.sample_infinite_volume_prefix(400, rng, &terminated);
        REQUIRE(fld.known_contacts().has_value());
        jumps += static_cast<long>(fld.known_contacts()->size()) - 1;
        if (terminated) ++deaths;
    }
    // every jump survives with probability eps/eps_c = 1/2
    double death_rate = static_cast<double>(deaths) / (jumps + deaths);
    CHECK(death_rate == doctest::Approx(0.5).epsilon(0.04));
}

TEST_CASE("infinite-volume prefix: localized density matches 1/E[chi1]") {
    const Fixture& f = fx();
    PinningSampler s(f.k_twice);
    RngStream rng = seed_stream(30, 0);
    double e_chi = 0.0;
    for (int n = 1; n < f.k_twice.table_len(); ++n) e_chi += n * f.k_twice.q[n];
    const int N = 512, reps = 2000;
    double iota_acc = 0.0;
    for (int r = 0; r < reps; ++r) {
        FieldPath fld = s.sample_infinite_volume_prefix(N, rng);
        ContactStructure cs = contact_structure(fld);
        iota_acc += cs.iota_N;
    }
    CHECK(iota_acc / reps / N == doctest::Approx(1.0 / e_chi).epsilon(0.05));
}

TEST_CASE("gap interior: conditional block length is exact") {
    const Fixture& f = fx();
    PinningSampler s(f.kc);
    RngStream rng = seed_stream(31, 0);
    std::vector<ChainPoint> pts;
    for (int gap : {1, 3, 17, 200}) {
        for (int rep = 0; rep < 20; ++rep) {
            pts.clear();
            s.sample_gap_interior(gap, rng, pts);
            int last = 0;
            for (const ChainPoint& p : pts) {
                CHECK(p.t > last);
                CHECK(p.t < gap);
                CHECK(p.state >= 1);  // interior tau-points carry continuous heights
                last = p.t;
            }
            if (!pts.empty()) CHECK(pts.back().t == gap - 1);
        }
    }
    CHECK_THROWS(s.sample_gap_interior(2, rng, pts));
}
