#include "pinlab/renewal.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <thread>

#include "pinlab/transfer.hpp"

namespace pinlab {

double SyntheticQ::total() const {
    double s = tail_mass;
    for (double v : q) s += v;
    return s;
}

AliasTable SyntheticQ::make_alias() const {
    std::vector<double> w = q;
    w.push_back(tail_mass);  // last slot = overflow bucket
    return AliasTable(w);
}

int SyntheticQ::sample_gap(const AliasTable& alias, RngStream& rng) const {
    int n = alias.sample(rng);
    if (n <= n_max) return n;
    // overflow bucket
    switch (kind) {
        case SyntheticKind::CriticalPower:
            return static_cast<int>(std::floor(n_max / rng.uniform())) + 1;
        case SyntheticKind::Exponential: {
            double ratio = std::exp(-param);
            return n_max + 1 + static_cast<int>(std::log(rng.uniform()) / std::log(ratio));
        }
        case SyntheticKind::Geometric: {
            double ratio = 1.0 - param;
            return n_max + 1 + static_cast<int>(std::log(rng.uniform()) / std::log(ratio));
        }
    }
    return n_max + 1;
}

SyntheticQ synthetic_q(SyntheticKind kind, double param, int n_max) {
    if (n_max < 4) throw std::invalid_argument("synthetic_q: n_max too small");
    SyntheticQ s;
    s.kind = kind;
    s.param = param;
    s.n_max = n_max;
    s.q.assign(n_max + 1, 0.0);
    switch (kind) {
        case SyntheticKind::CriticalPower: {
            // q(n) = C/n^2 for n >= 2, head deficit at n = 1, exact zeta mass
            // in the overflow bucket
            const double zeta2_minus_1 = M_PI * M_PI / 6.0 - 1.0;
            if (!(param > 0.0) || param * zeta2_minus_1 > 1.0)
                throw std::invalid_argument("synthetic_q: critical-power C not normalizable");
            double trig = 0.0;  // sum_{n > n_max} 1/n^2 via recurrence-free asymptotic
            {
                double z = n_max + 1.0;
                double iz = 1.0 / z, iz2 = iz * iz;
                trig = iz * (1.0 + iz * (0.5 + iz * (1.0 / 6.0 - iz2 * (1.0 / 30.0 - iz2 / 42.0))));
            }
            for (int n = 2; n <= n_max; ++n) s.q[n] = param / (static_cast<double>(n) * n);
            s.tail_mass = param * trig;
            double head = 1.0 - param * zeta2_minus_1;
            s.q[1] = head;
            break;
        }
        case SyntheticKind::Exponential: {
            if (!(param > 0.0)) throw std::invalid_argument("synthetic_q: rate must be > 0");
            double r = std::exp(-param);
            double norm = (1.0 - r) / r;  // sum_{n>=1} r^n = r/(1-r)
            double t = r;
            double acc = 0.0;
            for (int n = 1; n <= n_max; ++n) {
                s.q[n] = norm * t;
                acc += s.q[n];
                t *= r;
            }
            s.tail_mass = std::max(0.0, 1.0 - acc);
            break;
        }
        case SyntheticKind::Geometric: {
            if (!(param > 0.0 && param < 1.0))
                throw std::invalid_argument("synthetic_q: p must be in (0,1)");
            double t = param;
            for (int n = 1; n <= n_max; ++n) {
                s.q[n] = t;
                t *= 1.0 - param;
            }
            double acc = 0.0;
            for (int n = 1; n <= n_max; ++n) acc += s.q[n];
            s.tail_mass = std::max(0.0, 1.0 - acc);
            break;
        }
    }
    return s;
}

RenewalRun sample_renewal(const SyntheticQ& q, const AliasTable& alias, int N, RngStream& rng) {
    RenewalRun run;
    run.chi.push_back(0);
    int c = 0;
    while (true) {
        c += q.sample_gap(alias, rng);
        if (c > N) break;
        run.chi.push_back(c);
        ++run.iota_N;
    }
    return run;
}

int conditioned_gap(const std::vector<double>& q, const AliasTable& alias, double q_total,
                    const std::vector<double>& u, int R, RngStream& rng) {
    if (R < 1) throw std::invalid_argument("conditioned_gap: R must be >= 1");
    if (R == 1) return 1;
    auto direct = [&]() {
        double tot = 0.0;
        for (int n = 1; n <= R; ++n) tot += q[n] * u[R - n];
        if (!(tot > 0.0)) throw std::runtime_error("conditioned_gap: conditioning event has zero mass");
        double target = rng.uniform() * tot;
        double acc = 0.0;
        for (int n = 1; n <= R; ++n) {
            acc += q[n] * u[R - n];
            if (acc >= target) return n;
        }
        return R;
    };
    if (R <= 4096) return direct();
    for (int attempt = 0; attempt < 256; ++attempt) {
        int n = alias.sample(rng);
        if (n > R || !(q[n] > 0.0)) continue;
        // acceptance u(R-n) <= 1 dominates q(n)u(R-n)/q_total
        if (rng.uniform() < u[R - n]) return n;
    }
    (void)q_total;
    return direct();
}

RenewalRun sample_conditioned_renewal(const std::vector<double>& q, const AliasTable& alias,
                                      const std::vector<double>& u, int N, RngStream& rng) {
    if (static_cast<int>(u.size()) < N + 2 || static_cast<int>(q.size()) < N + 2)
        throw std::invalid_argument("sample_conditioned_renewal: tables shorter than N+1");
    RenewalRun run;
    run.chi.push_back(0);
    int c = 0;
    while (c < N + 1) {
        int gap = conditioned_gap(q, alias, 0.0, u, N + 1 - c, rng);
        c += gap;
        run.chi.push_back(c);
        if (c <= N) ++run.iota_N;
    }
    return run;
}

GapStatistics gap_statistics(const std::vector<int>& chi, int N) {
    if (chi.empty() || chi.front() != 0)
        throw std::invalid_argument("gap_statistics: chi must start at 0");
    GapStatistics g;
    for (int c : chi)
        if (c >= 1 && c <= N) ++g.iota_N;
    if (g.iota_N == 0) {
        g.delta_N = N + 1;  // sentinel: no renewal in (0, N]
        g.argmax_left = 0;
        return g;
    }
    for (size_t k = 1; k < chi.size() && chi[k] <= N; ++k) {
        int gap = chi[k] - chi[k - 1];
        if (gap > g.delta_N) {
            g.delta_N = gap;
            g.argmax_left = chi[k - 1];
        }
    }
    return g;
}

std::vector<GapBoundRow> verify_gap_bounds(const std::string& regime, const SyntheticQ& q,
                                           const std::vector<int>& n_list,
                                           const std::vector<double>& t_list, int replicas,
                                           std::uint64_t seed, int threads) {
    std::vector<GapBoundRow> rows;
    AliasTable alias = q.make_alias();
    for (int N : n_list) {
        std::vector<double> qx(q.q.begin(), q.q.end());
        qx.resize(N + 2, 0.0);
        if (q.kind == SyntheticKind::CriticalPower)
            for (int n = q.n_max + 1; n <= N + 1; ++n) qx[n] = q.param / (static_cast<double>(n) * n);
        RenewalTables tab = renewal_tables(qx, N, 0.0);
        AliasTable cond_alias(std::vector<double>(qx.begin(), qx.end()));

        std::vector<int> deltas(replicas);
        std::atomic<int> next{0};
        auto worker = [&]() {
            for (int r = next.fetch_add(1); r < replicas; r = next.fetch_add(1)) {
                RngStream rng = seed_stream(seed, static_cast<std::uint64_t>(N) * 1000003 + r);
                RenewalRun run = sample_conditioned_renewal(qx, cond_alias, tab.u, N, rng);
                deltas[r] = gap_statistics(run.chi, N).delta_N;
            }
        };
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();

        double logn = std::log(static_cast<double>(N));
        for (double t : t_list) {
            double threshold = (regime == "exponential") ? t * logn : t * N / logn;
            int hits = 0;
            for (int d : deltas)
                if (d >= threshold) ++hits;
            GapBoundRow row;
            row.regime = regime;
            row.N = N;
            row.t_or_c = t;
            row.estimate = static_cast<double>(hits) / replicas;
            row.stderr_ = std::sqrt(row.estimate * (1.0 - row.estimate) / replicas);
            row.replicas = replicas;
            rows.push_back(row);
        }
    }
    return rows;
}

} // namespace pinlab
