#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "pinlab/rng.hpp"

using namespace pinlab;

TEST_CASE("same (seed, index) reproduces the stream") {
    RngStream a = seed_stream(1234, 7);
    RngStream b = seed_stream(1234, 7);
    for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("distinct indices give decorrelated streams") {
    const int n = 10000;
    RngStream a = seed_stream(99, 0);
    RngStream b = seed_stream(99, 1);
    double sa = 0, sb = 0, sab = 0, saa = 0, sbb = 0;
    for (int i = 0; i < n; ++i) {
        double x = a.uniform() - 0.5, y = b.uniform() - 0.5;
        sa += x;
        sb += y;
        sab += x * y;
        saa += x * x;
        sbb += y * y;
    }
    double corr = (sab - sa * sb / n) / std::sqrt((saa - sa * sa / n) * (sbb - sb * sb / n));
    CHECK(std::abs(corr) < 0.05);
}

TEST_CASE("stream output does not depend on interleaving") {
    RngStream a = seed_stream(5, 0);
    std::vector<std::uint64_t> first;
    for (int i = 0; i < 100; ++i) first.push_back(a.next_u64());
    RngStream c = seed_stream(5, 1);
    RngStream b = seed_stream(5, 0);
    std::vector<std::uint64_t> second;
    for (int i = 0; i < 100; ++i) {
        c.next_u64();
        second.push_back(b.next_u64());
    }
    CHECK(first == second);
}

TEST_CASE("normal moments") {
    RngStream r = seed_stream(42, 0);
    const int n = 200000;
    double s = 0, s2 = 0, s4 = 0;
    for (int i = 0; i < n; ++i) {
        double x = r.normal();
        s += x;
        s2 += x * x;
        s4 += x * x * x * x;
    }
    CHECK(std::abs(s / n) < 0.01);
    CHECK(s2 / n == doctest::Approx(1.0).epsilon(0.01));
    CHECK(s4 / n == doctest::Approx(3.0).epsilon(0.05));
}

TEST_CASE("uniform stays inside (0,1)") {
    RngStream r = seed_stream(1, 2);
    for (int i = 0; i < 100000; ++i) {
        double u = r.uniform();
        CHECK(u > 0.0);
        CHECK(u < 1.0);
    }
}
