#include "pinlab/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pinlab/renewal.hpp"
#include "pinlab/walk.hpp"

namespace pinlab {

namespace {

// per-n constants of the bivariate Gaussian (Z_{n-1}, Z_n); duplicated from
// the operator assembly on purpose: the sampler evaluates rows on the fly
struct WRow {
    double n, ia, ib, ic, norm;
};

WRow w_row(int n, double sigma2) {
    WRow c;
    double dn = n;
    c.n = dn;
    double va = sigma2 * (dn - 1.0) * dn * (2.0 * dn - 1.0) / 6.0;
    double vb = sigma2 * dn * (dn + 1.0) * (2.0 * dn + 1.0) / 6.0;
    double cv = sigma2 * (dn - 1.0) * dn * (dn + 1.0) / 3.0;
    double det = sigma2 * sigma2 * (dn * dn * dn * dn - dn * dn) / 12.0;
    c.ia = vb / det;
    c.ib = -cv / det;
    c.ic = va / det;
    c.norm = 1.0 / (2.0 * M_PI * std::sqrt(det));
    return c;
}

inline double w_val(const WRow& c, double x, double y) {
    double d1 = y + (c.n - 1.0) * x;
    double d2 = c.n * x;
    double e = -0.5 * (c.ia * d1 * d1 + 2.0 * c.ib * d1 * d2 + c.ic * d2 * d2);
    return e < -745.0 ? 0.0 : c.norm * std::exp(e);
}

inline double w_log(const WRow& c, double x, double y) {
    double d1 = y + (c.n - 1.0) * x;
    double d2 = c.n * x;
    return std::log(c.norm) - 0.5 * (c.ia * d1 * d1 + 2.0 * c.ib * d1 * d2 + c.ic * d2 * d2);
}

} // namespace

std::vector<double> sample_excursion(int l, double a, double b, const PotentialSpec& pot,
                                     RngStream& rng) {
    if (pot.kind() != PotentialKind::Gaussian)
        throw std::invalid_argument("sample_excursion: Gaussian potential only");
    return sample_excursion_bridge(l, a, b, pot.sigma(), rng);
}

FieldPath sample_free_pinning_path(int N, const PotentialSpec& pot, RngStream& rng) {
    std::vector<double> z = sample_excursion(N + 1, 0.0, 0.0, pot, rng);
    FieldPath f(N);
    for (int i = 1; i <= N - 1; ++i) f.set(i, z[i - 1]);
    f.set_known_contacts({0, N, N + 1});
    return f;
}

PinningSampler::PinningSampler(const DiscreteKernel& kernel) : k_(kernel) {
    q_alias_ = AliasTable(k_.q);
    q_total_ = q_alias_.total();

    const int ns = k_.states();
    const int m = k_.grid.m;
    const int tl = k_.table_len();
    const double s2 = k_.pot.sigma2();

    // unconditioned jump-length law per state (slot 1 = length-1 jump)
    marginal_alias_.resize(ns);
    for (int x = 0; x < ns; ++x) {
        std::vector<double> w(k_.marg_row(x), k_.marg_row(x) + tl);
        w[0] = 0.0;
        w[1] = k_.K1[x];
        marginal_alias_[x] = AliasTable(w);
    }

    // time-major copies of f and h keep the enumeration loops contiguous
    f_t_.resize(static_cast<std::size_t>(tl) * ns);
    h_t_.resize(static_cast<std::size_t>(tl) * ns);
    for (int x = 0; x < ns; ++x)
        for (int r = 0; r < tl; ++r) {
            f_t_[static_cast<std::size_t>(r) * ns + x] = k_.f_row(x)[r];
            h_t_[static_cast<std::size_t>(r) * ns + x] = k_.h_row(x)[r];
        }

    // within-gap (s, j) cumulative tables for small remaining horizons
    memo_.resize(static_cast<std::size_t>(ns) * (r_memo_ + 1));
    std::vector<WRow> wr(r_memo_ + 1);
    for (int s = 2; s <= r_memo_; ++s) wr[s] = w_row(s, s2);
    for (int x = 0; x < ns; ++x) {
        double xv = k_.node_value(x);
        for (int r = 3; r <= r_memo_; ++r) {
            std::vector<float>& cum = memo_[static_cast<std::size_t>(x) * (r_memo_ + 1) + r];
            cum.resize(static_cast<std::size_t>(r - 2) * m);
            double acc = 0.0;
            std::size_t idx = 0;
            for (int s = 2; s <= r - 1; ++s) {
                double base = k_.eps * std::exp(-k_.F * s) / k_.v[x];
                for (int j = 0; j < m; ++j) {
                    double khat = base * k_.v[j + 1] * k_.grid.weights[j] *
                                  w_val(wr[s], xv, k_.grid.nodes[j]);
                    acc += khat * k_.f_row(j + 1)[r - s];
                    cum[idx++] = static_cast<float>(acc);
                }
            }
        }
    }
}

std::pair<int, int> PinningSampler::gap_jump(int state, int r, RngStream& rng) const {
    const int m = k_.grid.m;
    const double s2 = k_.pot.sigma2();
    const double xv = k_.node_value(state);
    if (r <= r_memo_) {
        const std::vector<float>& cum = memo_[static_cast<std::size_t>(state) * (r_memo_ + 1) + r];
        double total = cum.back();
        if (total > 0.0) {
            float target = static_cast<float>(rng.uniform() * total);
            auto it = std::upper_bound(cum.begin(), cum.end(), target);
            std::size_t idx = std::min<std::size_t>(it - cum.begin(), cum.size() - 1);
            return {2 + static_cast<int>(idx / m), 1 + static_cast<int>(idx % m)};
        }
        // fall through to the log-space path
    } else {
        thread_local std::vector<double> agg;
        agg.assign(r, 0.0);
        double total = 0.0;
        const int ns = k_.states();
        double ef = std::exp(-k_.F);
        double fs = ef * ef;
        for (int s = 2; s <= r - 1; ++s) {
            WRow c = w_row(s, s2);
            const double* ft = f_t_.data() + static_cast<std::size_t>(r - s) * ns + 1;
            double row = 0.0;
            for (int j = 0; j < m; ++j)
                row += k_.v[j + 1] * k_.grid.weights[j] * w_val(c, xv, k_.grid.nodes[j]) * ft[j];
            agg[s] = k_.eps * fs * row / k_.v[state];
            total += agg[s];
            fs *= ef;
        }
        if (total > 0.0) {
            double target = rng.uniform() * total;
            double acc = 0.0;
            int s_pick = r - 1;
            for (int s = 2; s <= r - 1; ++s) {
                acc += agg[s];
                if (acc >= target) {
                    s_pick = s;
                    break;
                }
            }
            // j within the chosen s
            WRow c = w_row(s_pick, s2);
            double row_total = 0.0;
            thread_local std::vector<double> jw;
            jw.assign(m, 0.0);
            for (int j = 0; j < m; ++j) {
                jw[j] = k_.v[j + 1] * k_.grid.weights[j] * w_val(c, xv, k_.grid.nodes[j]) *
                        k_.f_row(j + 1)[r - s_pick];
                row_total += jw[j];
            }
            double jt = rng.uniform() * row_total;
            double jacc = 0.0;
            for (int j = 0; j < m; ++j) {
                jacc += jw[j];
                if (jacc >= jt) return {s_pick, j + 1};
            }
            return {s_pick, m};
        }
    }

    // log-space fallback for underflowed weight sets
    log_space_falls_.fetch_add(1, std::memory_order_relaxed);
    double best = -std::numeric_limits<double>::infinity();
    for (int s = 2; s <= r - 1; ++s) {
        WRow c = w_row(s, s2);
        for (int j = 0; j < m; ++j) {
            double fj = k_.f_row(j + 1)[r - s];
            if (fj <= 0.0) continue;
            double lw = -k_.F * s + w_log(c, xv, k_.grid.nodes[j]) +
                        std::log(k_.v[j + 1] * k_.grid.weights[j]) + std::log(fj);
            best = std::max(best, lw);
        }
    }
    if (!std::isfinite(best))
        throw std::runtime_error("gap_jump: no admissible continuation (zero conditional mass)");
    double total = 0.0;
    for (int s = 2; s <= r - 1; ++s) {
        WRow c = w_row(s, s2);
        for (int j = 0; j < m; ++j) {
            double fj = k_.f_row(j + 1)[r - s];
            if (fj <= 0.0) continue;
            total += std::exp(-k_.F * s + w_log(c, xv, k_.grid.nodes[j]) +
                              std::log(k_.v[j + 1] * k_.grid.weights[j]) + std::log(fj) - best);
        }
    }
    double target = rng.uniform() * total;
    double acc = 0.0;
    for (int s = 2; s <= r - 1; ++s) {
        WRow c = w_row(s, s2);
        for (int j = 0; j < m; ++j) {
            double fj = k_.f_row(j + 1)[r - s];
            if (fj <= 0.0) continue;
            acc += std::exp(-k_.F * s + w_log(c, xv, k_.grid.nodes[j]) +
                            std::log(k_.v[j + 1] * k_.grid.weights[j]) + std::log(fj) - best);
            if (acc >= target) return {s, j + 1};
        }
    }
    return {r - 1, m};
}

void PinningSampler::sample_gap_interior(int n, RngStream& rng, std::vector<ChainPoint>& out) const {
    if (n == 2) throw std::logic_error("sample_gap_interior: chi-gaps of length 2 are impossible");
    int t = 0, state = 0;
    while (n - t > 1) {
        auto [s, jstate] = gap_jump(state, n - t, rng);
        t += s;
        out.push_back({t, jstate});
        state = jstate;
    }
}

std::vector<ChainPoint> PinningSampler::chain_skeleton(int N, RngStream& rng) const {
    std::vector<ChainPoint> chain;
    chain.push_back({0, 0});
    std::vector<ChainPoint> interior;
    int c = 0;
    while (c < N + 1) {
        int gap = conditioned_gap(k_.q, q_alias_, q_total_, k_.u, N + 1 - c, rng);
        interior.clear();
        sample_gap_interior(gap, rng, interior);
        for (const ChainPoint& p : interior) chain.push_back({c + p.t, p.state});
        c += gap;
        chain.push_back({c, 0});
    }
    return chain;
}

std::vector<ChainPoint> PinningSampler::chain_exact(int N, RngStream& rng) const {
    const int m = k_.grid.m;
    const double s2 = k_.pot.sigma2();
    std::vector<ChainPoint> chain;
    chain.push_back({0, 0});
    int t = 0, state = 0;
    const int ns = k_.states();
    thread_local std::vector<double> agg;
    while (t < N + 1) {
        int R = N + 1 - t;
        double xv = k_.node_value(state);
        double w_atom = k_.K1[state] * k_.h_row(0)[R - 1];
        agg.assign(R + 1, 0.0);
        double total = w_atom;
        double ef = std::exp(-k_.F);
        double fs = ef * ef;
        for (int s = 2; s <= R; ++s) {
            WRow c = w_row(s, s2);
            const double* ht = h_t_.data() + static_cast<std::size_t>(R - s) * ns + 1;
            double row = 0.0;
            for (int j = 0; j < m; ++j)
                row += k_.v[j + 1] * k_.grid.weights[j] * w_val(c, xv, k_.grid.nodes[j]) * ht[j];
            agg[s] = k_.eps * fs * row / k_.v[state];
            total += agg[s];
            fs *= ef;
        }
        if (!(total > 0.0))
            throw std::runtime_error("sample_contact_chain: conditional weights underflowed");
        double target = rng.uniform() * total;
        if (target <= w_atom) {
            t += 1;
            state = 0;
            chain.push_back({t, 0});
            continue;
        }
        target -= w_atom;
        double acc = 0.0;
        int s_pick = R;
        for (int s = 2; s <= R; ++s) {
            acc += agg[s];
            if (acc >= target) {
                s_pick = s;
                break;
            }
        }
        WRow c = w_row(s_pick, s2);
        thread_local std::vector<double> jw;
        jw.assign(m, 0.0);
        double row_total = 0.0;
        for (int j = 0; j < m; ++j) {
            jw[j] = k_.v[j + 1] * k_.grid.weights[j] * w_val(c, xv, k_.grid.nodes[j]) *
                    k_.h_row(j + 1)[R - s_pick];
            row_total += jw[j];
        }
        double jt = rng.uniform() * row_total;
        double jacc = 0.0;
        int j_pick = m - 1;
        for (int j = 0; j < m; ++j) {
            jacc += jw[j];
            if (jacc >= jt) {
                j_pick = j;
                break;
            }
        }
        t += s_pick;
        state = j_pick + 1;
        chain.push_back({t, state});
    }
    return chain;
}

std::vector<ChainPoint> PinningSampler::sample_contact_chain(int N, RngStream& rng) const {
    if (N < 2) throw std::invalid_argument("sample_contact_chain: N must be >= 2");
    if (N > k_.n_limit)
        throw std::invalid_argument("sample_contact_chain: N exceeds the kernel table limit");
    if (!(k_.h_row(0)[N + 1] > 0.0))
        throw std::runtime_error("sample_contact_chain: P(A_N) underflowed to zero");
    return (N <= exact_mode_threshold) ? chain_exact(N, rng) : chain_skeleton(N, rng);
}

FieldPath PinningSampler::sample_pinning_path(int N, RngStream& rng) const {
    std::vector<ChainPoint> chain = sample_contact_chain(N, rng);
    FieldPath field(N);
    std::vector<int> tau;
    tau.reserve(chain.size());
    for (const ChainPoint& p : chain) tau.push_back(p.t);
    for (std::size_t i = 1; i < chain.size(); ++i) {
        int l = chain[i].t - chain[i - 1].t;
        if (l < 2) continue;
        double a = k_.node_value(chain[i - 1].state);
        double b = k_.node_value(chain[i].state);
        std::vector<double> z = sample_excursion_bridge(l, a, b, k_.pot.sigma(), rng);
        for (int j = 1; j <= l - 1; ++j) field.set(chain[i - 1].t + j, z[j - 1]);
        field.set(chain[i].t, 0.0);
    }
    field.set_known_contacts(std::move(tau));
    return field;
}

FieldPath PinningSampler::sample_infinite_volume_prefix(int N, RngStream& rng,
                                                        bool* terminated) const {
    if (N < 2) throw std::invalid_argument("sample_infinite_volume_prefix: N must be >= 2");
    FieldPath field(N);
    std::vector<int> tau;
    tau.push_back(0);
    if (terminated) *terminated = false;
    const bool defective = k_.eps < k_.eps_c;
    int t = 0, state = 0;
    while (t <= N) {
        if (defective && rng.uniform() > std::min(1.0, k_.row_mass[state])) {
            // chain dies; the remainder is a free walk started from (-J, 0)
            if (terminated) *terminated = true;
            WalkState ws{-k_.node_value(state), 0.0, k_.pot.sigma2()};
            auto [y, z] = sample_free_path(N + 1 - t, ws, k_.pot, rng);
            for (int i = 1; i + t <= N + 1; ++i) field.set(t + i, z[i - 1]);
            break;
        }
        int n = marginal_alias_[state].sample(rng);
        int jstate = 0;
        if (n > 1) {
            // target node given (state, length)
            const int m = k_.grid.m;
            WRow c = w_row(n, k_.pot.sigma2());
            double xv = k_.node_value(state);
            thread_local std::vector<double> jw;
            jw.assign(m, 0.0);
            double tot = 0.0;
            for (int j = 0; j < m; ++j) {
                jw[j] = k_.v[j + 1] * k_.grid.weights[j] * w_val(c, xv, k_.grid.nodes[j]);
                tot += jw[j];
            }
            double target = rng.uniform() * tot;
            double acc = 0.0;
            jstate = m;
            for (int j = 0; j < m; ++j) {
                acc += jw[j];
                if (acc >= target) {
                    jstate = j + 1;
                    break;
                }
            }
            std::vector<double> z = sample_excursion_bridge(n, k_.node_value(state),
                                                            k_.node_value(jstate),
                                                            k_.pot.sigma(), rng);
            for (int i = 1; i <= n - 1 && t + i <= N + 1; ++i) field.set(t + i, z[i - 1]);
        }
        t += n;
        state = (n == 1) ? 0 : jstate;
        if (t <= N + 1) {
            field.set(t, 0.0);
            tau.push_back(t);
        }
    }
    field.set_known_contacts(std::move(tau));
    return field;
}

} // namespace pinlab
