#include "pinlab/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include <Eigen/Dense>

#include "pinlab/levy.hpp"
#include "pinlab/walk.hpp"

namespace pinlab {

namespace {

void run_replicas(int replicas, int threads, const std::function<void(int)>& fn) {
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int r = next.fetch_add(1); r < replicas; r = next.fetch_add(1)) fn(r);
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < std::max(1, threads); ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

double quantile_sorted(const std::vector<double>& v, double p) {
    if (v.empty()) return 0.0;
    double idx = p * (v.size() - 1);
    std::size_t lo = static_cast<std::size_t>(idx);
    std::size_t hi = std::min(lo + 1, v.size() - 1);
    double frac = idx - lo;
    return v[lo] * (1.0 - frac) + v[hi] * frac;
}

} // namespace

ScalingFit fit_scaling_exponent(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 4)
        throw std::invalid_argument("fit_scaling_exponent: need at least 4 points");
    double prev = 0.0;
    for (auto& [n, s] : points) {
        if (!(n > prev)) throw std::invalid_argument("fit_scaling_exponent: N must be increasing");
        if (!(s > 0.0)) throw std::invalid_argument("fit_scaling_exponent: nonpositive statistic");
        prev = n;
    }
    const int n = static_cast<int>(points.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto& [N, s] : points) {
        double x = std::log(N), y = std::log(s);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    ScalingFit f;
    double denom = n * sxx - sx * sx;
    f.slope = (n * sxy - sx * sy) / denom;
    f.intercept = (sy - f.slope * sx) / n;
    double ss = 0.0;
    for (auto& [N, s] : points) {
        double e = std::log(s) - (f.intercept + f.slope * std::log(N));
        ss += e * e;
    }
    if (n > 2) f.stderr_ = std::sqrt(ss / (n - 2) * n / denom);
    return f;
}

HillEstimate hill_tail_index(std::vector<double> samples, int k) {
    if (k < 50) throw std::invalid_argument("hill_tail_index: k below 50 rejected");
    if (k >= static_cast<int>(samples.size()))
        throw std::invalid_argument("hill_tail_index: k must be below the sample count");
    for (double s : samples)
        if (!(s > 0.0)) throw std::invalid_argument("hill_tail_index: samples must be positive");
    std::sort(samples.begin(), samples.end(), std::greater<>());
    auto hill_at = [&](int kk) {
        double h = 0.0;
        for (int i = 0; i < kk; ++i) h += std::log(samples[i] / samples[kk]);
        return kk / std::max(h, 1e-300);
    };
    HillEstimate e;
    e.k_used = k;
    e.alpha = hill_at(k);
    for (int kk = 50; kk <= k; kk = std::max(kk + 1, kk * 2))
        e.curve.emplace_back(kk, hill_at(kk));
    double a_quarter = hill_at(std::max(50, k / 4));
    e.heavy_tailed = std::abs(e.alpha - a_quarter) <= 0.25 * e.alpha;
    return e;
}

ContactDistribution exact_contact_distribution(int N, double eps, double sigma) {
    if (N < 2 || N > 12) throw std::invalid_argument("exact_contact_distribution: N out of range");
    ContactDistribution d;
    d.N = N;
    const int masks = 1 << (N - 1);
    d.prob.assign(masks, 0.0);
    double total = 0.0;
    for (int mask = 0; mask < masks; ++mask) {
        std::vector<int> idx;
        for (int i = 1; i <= N - 1; ++i)
            if (mask & (1 << (i - 1))) idx.push_back(i);
        int sz = static_cast<int>(idx.size());
        idx.push_back(N);
        idx.push_back(N + 1);
        const int d2 = sz + 2;
        Eigen::MatrixXd cov(d2, d2);
        for (int r = 0; r < d2; ++r)
            for (int c = 0; c < d2; ++c)
                cov(r, c) = zz_cov(std::min(idx[r], idx[c]), std::max(idx[r], idx[c]),
                                   sigma * sigma);
        Eigen::LLT<Eigen::MatrixXd> llt(cov);
        double logdet = 0.0;
        for (int i = 0; i < d2; ++i) logdet += 2.0 * std::log(llt.matrixL()(i, i));
        double density = std::exp(-0.5 * (d2 * std::log(2.0 * M_PI) + logdet));
        double w = std::pow(eps, sz) * density;
        d.prob[mask] = w;
        total += w;
    }
    for (double& p : d.prob) p /= total;
    return d;
}

ContactDistribution kernel_contact_distribution(const DiscreteKernel& k, int N) {
    if (N < 2 || N > 12) throw std::invalid_argument("kernel_contact_distribution: N out of range");
    ContactDistribution d;
    d.N = N;
    const int masks = 1 << (N - 1);
    d.prob.assign(masks, 0.0);
    const int m = k.grid.m;
    double total = 0.0;
    for (int mask = 0; mask < masks; ++mask) {
        std::vector<int> times;
        times.push_back(0);
        int sz = 0;
        for (int i = 1; i <= N - 1; ++i)
            if (mask & (1 << (i - 1))) {
                times.push_back(i);
                ++sz;
            }
        times.push_back(N);
        times.push_back(N + 1);
        // DP over the J state; raw w-kernels, the v/F factors cancel
        std::vector<double> cur(m + 1, 0.0), nxt(m + 1, 0.0);
        cur[0] = 1.0;
        for (std::size_t step = 1; step < times.size(); ++step) {
            int g = times[step] - times[step - 1];
            std::fill(nxt.begin(), nxt.end(), 0.0);
            if (g == 1) {
                for (int x = 0; x <= m; ++x)
                    nxt[0] += cur[x] * k.pot.exp_neg_V(k.node_value(x));
            } else {
                for (int x = 0; x <= m; ++x) {
                    if (cur[x] == 0.0) continue;
                    double xv = k.node_value(x);
                    for (int j = 0; j < m; ++j)
                        nxt[j + 1] += cur[x] * w_kernel(g, xv, k.grid.nodes[j], k.pot) *
                                      k.grid.weights[j];
                }
            }
            cur.swap(nxt);
        }
        double w = std::pow(k.eps, sz) * cur[0];
        d.prob[mask] = w;
        total += w;
    }
    for (double& p : d.prob) p /= total;
    return d;
}

ContactDistribution empirical_contact_distribution(const PinningSampler& s, int N, int replicas,
                                                   std::uint64_t seed, int threads) {
    ContactDistribution d;
    d.N = N;
    const int masks = 1 << (N - 1);
    std::vector<std::atomic<long long>> counts(masks);
    for (auto& c : counts) c.store(0);
    run_replicas(replicas, threads, [&](int r) {
        RngStream rng = seed_stream(seed, r);
        std::vector<ChainPoint> chain = s.sample_contact_chain(N, rng);
        int mask = 0;
        for (const ChainPoint& p : chain)
            if (p.t >= 1 && p.t <= N - 1) mask |= 1 << (p.t - 1);
        counts[mask].fetch_add(1, std::memory_order_relaxed);
    });
    d.prob.resize(masks);
    for (int i = 0; i < masks; ++i) d.prob[i] = static_cast<double>(counts[i]) / replicas;
    return d;
}

double tv_distance(const ContactDistribution& a, const ContactDistribution& b) {
    if (a.prob.size() != b.prob.size())
        throw std::invalid_argument("tv_distance: mismatched supports");
    double s = 0.0;
    for (std::size_t i = 0; i < a.prob.size(); ++i) s += std::abs(a.prob[i] - b.prob[i]);
    return 0.5 * s;
}

std::pair<double, double> sample_gap_area(const PinningSampler& s, int n, RngStream& rng) {
    const DiscreteKernel& k = s.kernel();
    std::vector<ChainPoint> pts;
    pts.push_back({0, 0});
    if (n >= 2) {
        s.sample_gap_interior(n, rng, pts);
    }
    pts.push_back({n, 0});
    double area = 0.0, abs_area = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        int l = pts[i].t - pts[i - 1].t;
        if (l < 2) continue;
        double a = k.node_value(pts[i - 1].state);
        double b = k.node_value(pts[i].state);
        std::vector<double> z = sample_excursion_bridge(l, a, b, k.pot.sigma(), rng);
        for (double v : z) {
            area += v;
            abs_area += std::abs(v);
        }
    }
    return {area, abs_area};
}

AreaLawResult area_law_experiment(const PinningSampler& s, int n_conditional, int cond_replicas,
                                  int uncond_samples, std::uint64_t seed, int threads) {
    AreaLawResult res;
    res.n_conditional = n_conditional;
    const double sigma = s.kernel().pot.sigma();
    double scale = sigma * std::pow(static_cast<double>(n_conditional), 2.5);

    res.conditional_scaled.assign(cond_replicas, 0.0);
    run_replicas(cond_replicas, threads, [&](int r) {
        RngStream rng = seed_stream(seed, r);
        res.conditional_scaled[r] = sample_gap_area(s, n_conditional, rng).first / scale;
    });
    res.ks_conditional = ks_distance(res.conditional_scaled, [](double t) {
        return 0.5 * std::erfc(-t * std::sqrt(360.0));
    });

    // unconditional mixture over chi_1 ~ q (table-renormalized)
    AliasTable qalias(s.kernel().q);
    res.unconditional_abs.assign(uncond_samples, 0.0);
    std::vector<double> signed_area(uncond_samples);
    run_replicas(uncond_samples, threads, [&](int r) {
        RngStream rng = seed_stream(seed ^ 0x5151515151515151ull, r);
        int n = qalias.sample(rng);
        auto [a, at] = sample_gap_area(s, n, rng);
        signed_area[r] = a;
        res.unconditional_abs[r] = std::max(std::abs(a), 1e-300);
    });
    int k = static_cast<int>(std::ceil(std::pow(static_cast<double>(uncond_samples), 0.6)));
    HillEstimate hill = hill_tail_index(res.unconditional_abs, k);
    res.hill_alpha = hill.alpha;
    res.hill_heavy = hill.heavy_tailed;
    res.hill_k = hill.k_used;

    // second-moment bound over a small (n, x) lattice
    for (int n : {64, 128, 256}) {
        std::vector<double> abs_areas(2000);
        run_replicas(2000, threads, [&](int r) {
            RngStream rng = seed_stream(seed ^ (0xabcdefull + n), r);
            abs_areas[r] = sample_gap_area(s, n, rng).second;
        });
        std::sort(abs_areas.begin(), abs_areas.end());
        double n5 = std::pow(static_cast<double>(n), 5.0);
        for (double p : {0.5, 0.75, 0.9, 0.95}) {
            double x = quantile_sorted(abs_areas, p);
            if (x > 0.0)
                res.moment_bound_max =
                    std::max(res.moment_bound_max, (1.0 - p) * x * x / n5);
        }
    }
    return res;
}

CriticalMeasureResult critical_measure_experiment(const PinningSampler& s, int N,
                                                  const std::vector<double>& breakpoints,
                                                  int replicas, std::uint64_t seed, int threads) {
    CriticalMeasureResult res;
    res.breakpoints = breakpoints;
    const int nb = static_cast<int>(breakpoints.size());
    res.mu_inc.assign(nb, std::vector<double>(replicas, 0.0));
    res.ref_inc.assign(nb, std::vector<double>(replicas, 0.0));
    std::vector<double> tv(replicas, 0.0);

    const double sigma = s.kernel().pot.sigma();
    const double cl = c_L_constant(sigma);

    run_replicas(replicas, threads, [&](int r) {
        RngStream rng = seed_stream(seed, r);
        FieldPath f = s.sample_pinning_path(N, rng);
        MuMeasure mu(f);
        std::vector<double> inc =
            finite_dim_marginals([&](double t) { return mu.cum(t); }, breakpoints);
        for (int c = 0; c < nb; ++c) res.mu_inc[c][r] = inc[c];
        tv[r] = mu.cum_abs(1.0);
        RngStream ref_rng = seed_stream(seed ^ 0x7272727272727272ull, r);
        double prev = 0.0;
        for (int c = 0; c < nb; ++c) {
            double len = breakpoints[c] - prev;
            prev = breakpoints[c];
            res.ref_inc[c][r] = std::pow(len, 2.5) * sample_stable_symmetric(cl, ref_rng);
        }
    });

    for (int c = 0; c < nb; ++c)
        res.ks_per_coord.push_back(ks_distance(res.mu_inc[c], res.ref_inc[c]));

    for (int c = 0; c + 1 < nb; ++c) {
        double ma = 0, mb = 0;
        for (int r = 0; r < replicas; ++r) {
            ma += res.mu_inc[c][r];
            mb += res.mu_inc[c + 1][r];
        }
        ma /= replicas;
        mb /= replicas;
        double sab = 0, sa = 0, sb = 0;
        for (int r = 0; r < replicas; ++r) {
            double da = res.mu_inc[c][r] - ma, db = res.mu_inc[c + 1][r] - mb;
            sab += da * db;
            sa += da * da;
            sb += db * db;
        }
        res.corr_pairs.push_back(sab / std::sqrt(std::max(sa * sb, 1e-300)));
    }

    std::sort(tv.begin(), tv.end());
    for (double K : {0.5, 1.0, 2.0, 4.0, 8.0, 16.0}) {
        auto it = std::upper_bound(tv.begin(), tv.end(), K);
        res.tight_K.push_back(K);
        res.tight_P.push_back(1.0 - static_cast<double>(it - tv.begin()) / replicas);
    }
    return res;
}

std::vector<RegimeRow> regime_table_experiment(const PinningSampler* sampler,
                                               const PotentialSpec& pot,
                                               const std::vector<int>& n_list, int replicas,
                                               int window_L, std::uint64_t seed, int threads) {
    std::vector<RegimeRow> rows;
    for (int N : n_list) {
        std::vector<double> max_abs(replicas), ell(replicas), iota(replicas), dlt(replicas),
            sdelta(replicas), window_empty(replicas);
        run_replicas(replicas, threads, [&](int r) {
            RngStream rng = seed_stream(seed + N, r);
            FieldPath f = sampler ? sampler->sample_pinning_path(N, rng)
                                  : sample_free_pinning_path(N, pot, rng);
            ContactStructure cs = contact_structure(f);
            double mx = 0.0;
            for (int i = 0; i <= N; ++i) mx = std::max(mx, std::abs(f[i]));
            max_abs[r] = mx;
            ell[r] = cs.ell_N;
            iota[r] = cs.iota_N;
            dlt[r] = cs.Delta_N;
            sdelta[r] = cs.delta_N;
            bool empty = true;
            for (int t : cs.tau)
                if (t >= window_L && t <= N - window_L) empty = false;
            window_empty[r] = empty ? 1.0 : 0.0;
        });
        RegimeRow row;
        row.eps = sampler ? sampler->kernel().eps : 0.0;
        row.N = N;
        row.replicas = replicas;
        std::vector<double> sorted = max_abs;
        std::sort(sorted.begin(), sorted.end());
        auto mean_of = [&](const std::vector<double>& v) {
            double s = 0.0;
            for (double x : v) s += x;
            return s / v.size();
        };
        row.mean_max_abs = mean_of(max_abs);
        row.q10_max_abs = quantile_sorted(sorted, 0.10);
        row.q50_max_abs = quantile_sorted(sorted, 0.50);
        row.q90_max_abs = quantile_sorted(sorted, 0.90);
        row.mean_ell = mean_of(ell);
        double sse = 0.0;
        for (double e : ell) sse += (e - row.mean_ell) * (e - row.mean_ell);
        row.sd_ell = std::sqrt(sse / std::max<std::size_t>(1, ell.size() - 1));
        row.mean_iota = mean_of(iota);
        row.mean_Delta = mean_of(dlt);
        row.mean_delta = mean_of(sdelta);
        row.frac_window_empty = mean_of(window_empty);
        rows.push_back(row);
    }
    return rows;
}

} // namespace pinlab
