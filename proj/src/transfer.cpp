#include "pinlab/transfer.hpp"

#include <fftw3.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace pinlab {

namespace {

std::mutex g_fftw_mutex;  // fftw plan creation is not thread-safe

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
    threads = std::max(1, std::min(threads, n));
    if (threads == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
        });
    for (auto& th : pool) th.join();
}

// per-n constants of the bivariate Gaussian (Z_{n-1}, Z_n)
struct WConsts {
    double n = 0.0;
    double ia = 0.0, ib = 0.0, ic = 0.0;  // inverse covariance entries
    double norm = 0.0;
};

WConsts w_consts(int n, double sigma2) {
    WConsts c;
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

inline double w_eval(const WConsts& c, double x, double y) {
    double d1 = y + (c.n - 1.0) * x;
    double d2 = c.n * x;
    double e = -0.5 * (c.ia * d1 * d1 + 2.0 * c.ib * d1 * d2 + c.ic * d2 * d2);
    return e < -745.0 ? 0.0 : c.norm * std::exp(e);
}

double trigamma(double z) {
    double acc = 0.0;
    while (z < 8.0) {
        acc += 1.0 / (z * z);
        z += 1.0;
    }
    double iz = 1.0 / z, iz2 = iz * iz;
    return acc + iz * (1.0 + iz * (0.5 + iz * (1.0 / 6.0 - iz2 * (1.0 / 30.0 - iz2 / 42.0))));
}

// sum_{n > N} e^{-delta n} / n^2
double tail_sum(double delta, int N) {
    if (delta <= 1e-12) return trigamma(N + 1.0);
    double ed = std::exp(-delta);
    double t = std::exp(-delta * (N + 1.0));
    if (t == 0.0) return 0.0;
    double s = 0.0;
    for (long n = N + 1; n < N + 3000000; ++n) {
        double term = t / (static_cast<double>(n) * n);
        s += term;
        if (term < 1e-22 * s) break;
        t *= ed;
        if (t == 0.0) break;
    }
    return s;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace

double w_kernel(int n, double x, double y, const PotentialSpec& pot) {
    if (n < 1) throw std::invalid_argument("w_kernel: n must be >= 1");
    if (pot.kind() != PotentialKind::Gaussian)
        throw std::invalid_argument("w_kernel: Gaussian potential only");
    if (n == 1) return pot.exp_neg_V(x);
    return w_eval(w_consts(n, pot.sigma2()), x, y);
}

EigenPair leading_eigen(const Eigen::MatrixXd& G, double tol, int max_iter) {
    const int d = static_cast<int>(G.rows());
    if (G.minCoeff() < 0.0) throw std::invalid_argument("leading_eigen: negative entries");
    Eigen::VectorXd v = Eigen::VectorXd::Ones(d);
    for (int it = 0; it < max_iter; ++it) {
        Eigen::VectorXd w = G * v;
        double lambda = w(0);  // v is kept normalized with v(0) = 1
        if (!(lambda > 0.0)) throw std::runtime_error("leading_eigen: lost positivity");
        double res = (w - lambda * v).lpNorm<Eigen::Infinity>() /
                     (lambda * v.lpNorm<Eigen::Infinity>());
        v = w / lambda;
        if (res < tol) {
            EigenPair ep;
            ep.lambda = lambda;
            ep.v = v;
            return ep;
        }
    }
    throw std::runtime_error("leading_eigen: no convergence after max_iter iterations");
}

OperatorBuilder::OperatorBuilder(GridSpec grid, PotentialSpec pot, int n_max)
    : grid_(std::move(grid)), pot_(std::move(pot)), n_max_(n_max) {
    if (pot_.kind() != PotentialKind::Gaussian)
        throw std::invalid_argument("OperatorBuilder: Gaussian potential only");
    if (n_max_ < 4) throw std::invalid_argument("OperatorBuilder: n_max too small");
}

void OperatorBuilder::enable_store() {
    const int m = grid_.m;
    const std::size_t per_n = static_cast<std::size_t>(m + 1) * m;
    const std::size_t total = per_n * (n_max_ - 1);
    if (total * sizeof(float) > (std::size_t)1500 * 1024 * 1024) return;  // too large, stay direct
    if (!store_.empty()) return;
    store_.resize(total);
    for (int n = 2; n <= n_max_; ++n) {
        WConsts c = w_consts(n, pot_.sigma2());
        float* dst = store_.data() + per_n * (n - 2);
        for (int x = 0; x <= m; ++x) {
            double xv = (x == 0) ? 0.0 : grid_.nodes[x - 1];
            for (int j = 0; j < m; ++j)
                dst[static_cast<std::size_t>(x) * m + j] =
                    static_cast<float>(w_eval(c, xv, grid_.nodes[j]) * grid_.weights[j]);
        }
    }
}

void OperatorBuilder::release_store() {
    store_.clear();
    store_.shrink_to_fit();
}

Eigen::MatrixXd OperatorBuilder::build(double delta) const {
    if (delta < 0.0) throw std::invalid_argument("build_operator: delta must be >= 0");
    const int m = grid_.m;
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(m + 1, m + 1);
    // atom column: the n = 1 Dirac term
    for (int x = 0; x <= m; ++x) {
        double xv = (x == 0) ? 0.0 : grid_.nodes[x - 1];
        G(x, 0) = std::exp(-delta) * pot_.exp_neg_V(xv);
    }
    std::vector<double> acc(static_cast<std::size_t>(m + 1) * m, 0.0);
    const std::size_t per_n = static_cast<std::size_t>(m + 1) * m;
    if (!store_.empty()) {
        for (int n = 2; n <= n_max_; ++n) {
            double coeff = std::exp(-delta * n);
            if (coeff < 1e-300) break;
            const float* src = store_.data() + per_n * (n - 2);
            for (std::size_t i = 0; i < per_n; ++i) acc[i] += coeff * src[i];
        }
    } else {
        std::vector<double> wq(per_n);
        for (int n = 2; n <= n_max_; ++n) {
            double coeff = std::exp(-delta * n);
            if (coeff < 1e-300) break;
            WConsts c = w_consts(n, pot_.sigma2());
            for (int x = 0; x <= m; ++x) {
                double xv = (x == 0) ? 0.0 : grid_.nodes[x - 1];
                for (int j = 0; j < m; ++j)
                    acc[static_cast<std::size_t>(x) * m + j] +=
                        coeff * w_eval(c, xv, grid_.nodes[j]) * grid_.weights[j];
            }
        }
    }
    // n > n_max tail: 1/n^2 shape frozen at n_max
    double ts = tail_sum(delta, n_max_) * static_cast<double>(n_max_) * n_max_;
    WConsts cN = w_consts(n_max_, pot_.sigma2());
    for (int x = 0; x <= m; ++x) {
        double xv = (x == 0) ? 0.0 : grid_.nodes[x - 1];
        for (int j = 0; j < m; ++j)
            acc[static_cast<std::size_t>(x) * m + j] +=
                ts * w_eval(cN, xv, grid_.nodes[j]) * grid_.weights[j];
    }
    for (int x = 0; x <= m; ++x)
        for (int j = 0; j < m; ++j) G(x, j + 1) = acc[static_cast<std::size_t>(x) * m + j];
    return G;
}

double OperatorBuilder::leading_lambda(double delta) const { return leading_eigen(build(delta)).lambda; }

double critical_epsilon(const OperatorBuilder& op) { return 1.0 / op.leading_lambda(0.0); }

double free_energy(OperatorBuilder& op, double eps, double eps_c) {
    if (!(eps > 0.0)) throw std::invalid_argument("free_energy: eps must be > 0");
    if (eps <= eps_c) return 0.0;
    op.enable_store();
    double lo = 0.0;
    double hi = 1e-3;
    int guard = 0;
    while (eps * op.leading_lambda(hi) > 1.0) {
        lo = hi;
        hi *= 2.0;
        if (++guard > 64) {
            throw std::runtime_error("free_energy: bracketing failure, lambda(" +
                                     std::to_string(hi) + ") still above 1/eps");
        }
    }
    while (hi - lo > 1e-10) {
        double mid = 0.5 * (lo + hi);
        (eps * op.leading_lambda(mid) > 1.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double DiscreteKernel::khat(int n, int state, int j) const {
    if (n < 2) return 0.0;
    WConsts c = w_consts(n, pot.sigma2());
    double w = w_eval(c, node_value(state), grid.nodes[j]);
    return eps * std::exp(-F * n) * (v[j + 1] / v[state]) * w * grid.weights[j];
}

double DiscreteKernel::tail_limit_constant() const {
    return eps * (std::sqrt(3.0) / M_PI) / pot.sigma2();
}

DiscreteKernel markov_kernel(double eps, const GridSpec& grid, const PotentialSpec& pot,
                             int n_max, int n_limit, int threads) {
    if (!(eps > 0.0)) throw std::invalid_argument("markov_kernel: eps must be > 0");
    if (pot.kind() != PotentialKind::Gaussian)
        throw std::invalid_argument("markov_kernel: Gaussian potential only");

    DiscreteKernel k;
    k.pot = pot;
    k.grid = grid;
    k.eps = eps;
    k.n_max = n_max;
    k.n_limit = n_limit;

    OperatorBuilder op(grid, pot, n_max);
    op.enable_store();
    EigenPair base = leading_eigen(op.build(0.0));
    k.eps_c = 1.0 / base.lambda;
    k.F = free_energy(op, eps, k.eps_c);
    EigenPair tilted = (k.F == 0.0) ? base : leading_eigen(op.build(k.F));
    op.release_store();
    k.v.assign(tilted.v.data(), tilted.v.data() + tilted.v.size());

    const int m = grid.m;
    const int ns = m + 1;
    const int tl = n_limit + 2;

    k.K1.resize(ns);
    for (int x = 0; x < ns; ++x)
        k.K1[x] = eps * std::exp(-k.F) * pot.exp_neg_V(k.node_value(x)) / k.v[x];

    // FFT length for the first-passage solve; jumps >= n_fft cannot enter any
    // first passage at r < n_fft, so a shorter transform stays exact there
    int n_fft = 256;
    while (n_fft < 2 * tl && n_fft < n_max) n_fft *= 2;
    n_fft = std::min(n_fft, n_max);
    const int n_half = n_fft / 2 + 1;
    const double rho = std::exp(-7.0 / n_fft);
    const double damp = rho * std::exp(-k.F);

    std::vector<WConsts> wc(n_fft);
    for (int n = 2; n < n_fft; ++n) wc[n] = w_consts(n, pot.sigma2());

    k.jump_marginal.assign(static_cast<std::size_t>(ns) * tl, 0.0);
    k.row_mass.assign(ns, 0.0);

    // spectra of the damped khat sequences, omega-major
    std::vector<std::complex<double>> mhat(static_cast<std::size_t>(n_half) * ns * m);

    {
        std::vector<fftw_plan> plans(threads);
        std::vector<double*> inbuf(threads);
        std::vector<fftw_complex*> outbuf(threads);
        {
            std::lock_guard<std::mutex> lock(g_fftw_mutex);
            for (int t = 0; t < threads; ++t) {
                inbuf[t] = fftw_alloc_real(n_fft);
                outbuf[t] = fftw_alloc_complex(n_half);
                plans[t] = fftw_plan_dft_r2c_1d(n_fft, inbuf[t], outbuf[t], FFTW_ESTIMATE);
            }
        }
        const double ef = std::exp(-k.F);
        std::atomic<int> next_row{0};
        auto worker = [&](int t) {
            for (int x = next_row.fetch_add(1); x < ns; x = next_row.fetch_add(1)) {
                double xv = k.node_value(x);
                double* marg = k.jump_marginal.data() + static_cast<std::size_t>(x) * tl;
                double mass = 0.0;
                double last_rowsum = 0.0;  // sum_j khat at n = n_fft - 1
                for (int j = 0; j < m; ++j) {
                    double scale = eps * (k.v[j + 1] / k.v[x]) * grid.weights[j];
                    double* in = inbuf[t];
                    in[0] = in[1] = 0.0;
                    double dn = damp * damp;  // damp^n at n = 2
                    double fn = ef * ef;      // e^{-Fn} at n = 2
                    for (int n = 2; n < n_fft; ++n) {
                        double w = w_eval(wc[n], xv, grid.nodes[j]);
                        in[n] = scale * w * dn;
                        double undamped = scale * w * fn;
                        if (n < tl) marg[n] += undamped;
                        if (n == n_fft - 1) last_rowsum += undamped;
                        mass += undamped;
                        dn *= damp;
                        fn *= ef;
                    }
                    fftw_execute_dft_r2c(plans[t], in, outbuf[t]);
                    for (int kk = 0; kk < n_half; ++kk)
                        mhat[static_cast<std::size_t>(kk) * ns * m + static_cast<std::size_t>(x) * m + j] =
                            std::complex<double>(outbuf[t][kk][0], outbuf[t][kk][1]);
                }
                // 1/n^2 e^{-Fn} continuation beyond the solve range, constant
                // fitted at n_fft - 1
                double nl = n_fft - 1.0;
                double fitc = (last_rowsum > 0.0 && k.F * nl < 600.0)
                                  ? last_rowsum * nl * nl * std::exp(k.F * nl)
                                  : 0.0;
                for (int n = n_fft; n < tl; ++n) {
                    double e = k.F * n;
                    marg[n] = (e > 700.0 || fitc == 0.0)
                                  ? 0.0
                                  : fitc * std::exp(-e) / (static_cast<double>(n) * n);
                }
                if (fitc > 0.0) mass += fitc * tail_sum(k.F, n_fft - 1);
                k.row_mass[x] = k.K1[x] + mass;
            }
        };
        parallel_for(threads, threads, worker);
        {
            std::lock_guard<std::mutex> lock(g_fftw_mutex);
            for (int t = 0; t < threads; ++t) {
                fftw_destroy_plan(plans[t]);
                fftw_free(inbuf[t]);
                fftw_free(outbuf[t]);
            }
        }
    }

    // per-frequency solves (I - M(omega)) fhat = rho e^{i omega} K1
    std::vector<std::complex<double>> fhat(static_cast<std::size_t>(n_half) * ns);
    parallel_for(n_half, threads, [&](int kk) {
        Eigen::MatrixXcd A = Eigen::MatrixXcd::Identity(ns, ns);
        const std::complex<double>* src = mhat.data() + static_cast<std::size_t>(kk) * ns * m;
        for (int x = 0; x < ns; ++x)
            for (int j = 0; j < m; ++j)
                A(x, j + 1) -= src[static_cast<std::size_t>(x) * m + j];
        // fftw's forward transform pairs with z = rho e^{-i omega}
        double omega = 2.0 * M_PI * kk / n_fft;
        std::complex<double> z = rho * std::complex<double>(std::cos(omega), -std::sin(omega));
        Eigen::VectorXcd rhs(ns);
        for (int x = 0; x < ns; ++x) rhs(x) = z * k.K1[x];
        Eigen::VectorXcd sol = A.partialPivLu().solve(rhs);
        for (int x = 0; x < ns; ++x) fhat[static_cast<std::size_t>(kk) * ns + x] = sol(x);
    });
    mhat.clear();
    mhat.shrink_to_fit();

    // invert the transforms and undo the damping
    k.f.assign(static_cast<std::size_t>(ns) * tl, 0.0);
    {
        std::vector<fftw_plan> plans(threads);
        std::vector<fftw_complex*> inbuf(threads);
        std::vector<double*> outbuf(threads);
        {
            std::lock_guard<std::mutex> lock(g_fftw_mutex);
            for (int t = 0; t < threads; ++t) {
                inbuf[t] = fftw_alloc_complex(n_half);
                outbuf[t] = fftw_alloc_real(n_fft);
                plans[t] = fftw_plan_dft_c2r_1d(n_fft, inbuf[t], outbuf[t], FFTW_ESTIMATE);
            }
        }
        std::atomic<int> next_row{0};
        auto worker = [&](int t) {
            for (int x = next_row.fetch_add(1); x < ns; x = next_row.fetch_add(1)) {
                for (int kk = 0; kk < n_half; ++kk) {
                    inbuf[t][kk][0] = fhat[static_cast<std::size_t>(kk) * ns + x].real();
                    inbuf[t][kk][1] = fhat[static_cast<std::size_t>(kk) * ns + x].imag();
                }
                fftw_execute_dft_c2r(plans[t], inbuf[t], outbuf[t]);
                double* frow = k.f.data() + static_cast<std::size_t>(x) * tl;
                double undamp = 1.0;
                int upto = std::min(n_fft, tl);
                for (int n = 0; n < upto; ++n) {
                    double val = outbuf[t][n] / n_fft * undamp;
                    frow[n] = (val > 0.0) ? val : 0.0;
                    undamp /= rho;
                }
                frow[0] = 0.0;
                // first atom-hit at exactly 2 is impossible (it would need a
                // continuous state to sit at height zero); the solver leaves
                // aliasing residue there
                if (tl > 2) frow[2] = 0.0;
                // Tail constant of f(x, .) ~ c e^{-Fn} / n^2, fitted over the
                // deepest quartile of the transform range. A genuine 1/n^2
                // tail gives a flat run of fitted constants; when the true f
                // sits below the c2r roundoff floor (strongly localized
                // regime) the window holds amplified noise instead, which the
                // quartile-spread filter rejects. The skipped tail mass is
                // bounded by e^{-F n_fft}.
                std::vector<double> fits;
                {
                    double un = std::pow(1.0 / rho, 3 * n_fft / 4);
                    for (int n = 3 * n_fft / 4; n < n_fft; ++n) {
                        double val = outbuf[t][n] / n_fft * un;
                        un /= rho;
                        double e = k.F * n;
                        if (e < 600.0 && val > 1e-11)
                            fits.push_back(val * n * static_cast<double>(n) * std::exp(e));
                    }
                }
                double cfit = 0.0;
                if (fits.size() >= 8) {
                    std::sort(fits.begin(), fits.end());
                    double med = fits[fits.size() / 2];
                    double iqr = fits[3 * fits.size() / 4] - fits[fits.size() / 4];
                    if (iqr <= 0.5 * med) cfit = med;
                }
                for (int n = n_fft; n < tl; ++n) {
                    double e = k.F * n;
                    frow[n] = (e > 700.0 || cfit == 0.0)
                                  ? 0.0
                                  : cfit * std::exp(-e) / (static_cast<double>(n) * n);
                }
                if (x == 0) k.C_eps = cfit;
            }
        };
        parallel_for(threads, threads, worker);
        {
            std::lock_guard<std::mutex> lock(g_fftw_mutex);
            for (int t = 0; t < threads; ++t) {
                fftw_destroy_plan(plans[t]);
                fftw_free(inbuf[t]);
                fftw_free(outbuf[t]);
            }
        }
    }

    // q is the atom row of f; u by the renewal recursion
    k.q.assign(k.f.begin(), k.f.begin() + tl);
    k.u.assign(tl, 0.0);
    k.u[0] = 1.0;
    for (int r = 1; r < tl; ++r) {
        double s = 0.0;
        const double* qq = k.q.data();
        const double* uu = k.u.data();
        for (int n = 1; n <= r; ++n) s += qq[n] * uu[r - n];
        k.u[r] = s;
    }

    // h = f conv u, one padded FFT per state
    {
        int L = 1;
        while (L < 2 * tl) L *= 2;
        int Lh = L / 2 + 1;
        double* rbuf = fftw_alloc_real(L);
        fftw_complex* cbuf = fftw_alloc_complex(Lh);
        fftw_complex* uhat = fftw_alloc_complex(Lh);
        fftw_plan fwd, bwd;
        {
            std::lock_guard<std::mutex> lock(g_fftw_mutex);
            fwd = fftw_plan_dft_r2c_1d(L, rbuf, cbuf, FFTW_ESTIMATE);
            bwd = fftw_plan_dft_c2r_1d(L, cbuf, rbuf, FFTW_ESTIMATE);
        }
        std::memset(rbuf, 0, sizeof(double) * L);
        std::memcpy(rbuf, k.u.data(), sizeof(double) * tl);
        fftw_execute(fwd);
        std::memcpy(uhat, cbuf, sizeof(fftw_complex) * Lh);

        k.h.assign(static_cast<std::size_t>(ns) * tl, 0.0);
        for (int x = 0; x < ns; ++x) {
            std::memset(rbuf, 0, sizeof(double) * L);
            std::memcpy(rbuf, k.f.data() + static_cast<std::size_t>(x) * tl, sizeof(double) * tl);
            fftw_execute(fwd);
            for (int i = 0; i < Lh; ++i) {
                double re = cbuf[i][0] * uhat[i][0] - cbuf[i][1] * uhat[i][1];
                double im = cbuf[i][0] * uhat[i][1] + cbuf[i][1] * uhat[i][0];
                cbuf[i][0] = re;
                cbuf[i][1] = im;
            }
            fftw_execute(bwd);
            double* hrow = k.h.data() + static_cast<std::size_t>(x) * tl;
            for (int r = 0; r < tl; ++r) {
                double val = rbuf[r] / L;
                hrow[r] = std::clamp(val, 0.0, 1.0);
            }
        }
        k.h[0] = 1.0;  // h(atom, 0): zero-step hit
        {
            std::lock_guard<std::mutex> lock(g_fftw_mutex);
            fftw_destroy_plan(fwd);
            fftw_destroy_plan(bwd);
            fftw_free(rbuf);
            fftw_free(cbuf);
            fftw_free(uhat);
        }
    }
    return k;
}

std::vector<double> step_law_q(const DiscreteKernel& kernel) { return kernel.q; }

RenewalTables renewal_tables(const std::vector<double>& q, int n_limit, double F) {
    RenewalTables t;
    int tl = n_limit + 2;
    t.q = q;
    t.q.resize(tl, 0.0);
    t.u.assign(tl, 0.0);
    t.u[0] = 1.0;
    for (int r = 1; r < tl; ++r) {
        double s = 0.0;
        for (int n = 1; n <= r; ++n) s += t.q[n] * t.u[r - n];
        t.u[r] = s;
    }
    t.U.assign(tl, 0.0);
    t.U[0] = t.u[0];
    for (int r = 1; r < tl; ++r) t.U[r] = t.U[r - 1] + t.u[r];
    int hi = tl - 1;
    while (hi > 2 && t.q[hi] == 0.0) --hi;
    int lo = std::max(2, hi - (hi - 2) / 4);
    std::vector<double> fits;
    for (int n = lo; n <= hi; ++n)
        if (t.q[n] > 0.0 && F * n < 600.0)
            fits.push_back(t.q[n] * n * static_cast<double>(n) * std::exp(F * n));
    if (!fits.empty()) {
        std::nth_element(fits.begin(), fits.begin() + fits.size() / 2, fits.end());
        t.C_eps = fits[fits.size() / 2];
    }
    return t;
}

std::vector<std::vector<double>> hit_tables(const DiscreteKernel& kernel, int N) {
    if (N + 1 >= kernel.table_len())
        throw std::invalid_argument("hit_tables: N exceeds the table limit");
    std::vector<std::vector<double>> out(kernel.states());
    for (int x = 0; x < kernel.states(); ++x)
        out[x].assign(kernel.h_row(x), kernel.h_row(x) + N + 2);
    return out;
}

std::string kernel_cache_key(double eps, const GridSpec& grid, const PotentialSpec& pot,
                             int n_max, int n_limit) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "v1|%.17g|%.17g|%d|%d|%d|%.17g", eps, grid.R, grid.m, n_max,
                  n_limit, pot.sigma());
    char out[32];
    std::snprintf(out, sizeof(out), "%016llx",
                  static_cast<unsigned long long>(fnv1a(buf)));
    return out;
}

namespace {
constexpr std::uint32_t kCacheMagic = 0x504c4b54;  // "PLKT"
constexpr std::uint32_t kCacheVersion = 1;

template <class T>
void put(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <class T>
bool get(std::istream& is, T& v) {
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    return bool(is);
}
void put_vec(std::ostream& os, const std::vector<double>& v) {
    put(os, static_cast<std::uint64_t>(v.size()));
    os.write(reinterpret_cast<const char*>(v.data()), sizeof(double) * v.size());
}
bool get_vec(std::istream& is, std::vector<double>& v) {
    std::uint64_t n = 0;
    if (!get(is, n)) return false;
    v.resize(n);
    is.read(reinterpret_cast<char*>(v.data()), sizeof(double) * n);
    return bool(is);
}
} // namespace

bool save_kernel(const DiscreteKernel& k, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) return false;
    put(os, kCacheMagic);
    put(os, kCacheVersion);
    put(os, k.eps);
    put(os, k.grid.R);
    put(os, static_cast<std::int32_t>(k.grid.m));
    put(os, static_cast<std::int32_t>(k.n_max));
    put(os, static_cast<std::int32_t>(k.n_limit));
    put(os, k.pot.sigma());
    put(os, k.eps_c);
    put(os, k.F);
    put(os, k.C_eps);
    put_vec(os, k.grid.nodes);
    put_vec(os, k.grid.weights);
    put_vec(os, k.v);
    put_vec(os, k.K1);
    put_vec(os, k.row_mass);
    put_vec(os, k.q);
    put_vec(os, k.u);
    put_vec(os, k.f);
    put_vec(os, k.h);
    put_vec(os, k.jump_marginal);
    return bool(os);
}

bool load_kernel(DiscreteKernel& k, const std::string& path, double eps, const GridSpec& grid,
                 const PotentialSpec& pot, int n_max, int n_limit) {
    std::ifstream is(path, std::ios::binary);
    if (!is) return false;
    std::uint32_t magic = 0, ver = 0;
    double e = 0, r = 0, sig = 0;
    std::int32_t m = 0, nm = 0, nl = 0;
    if (!get(is, magic) || magic != kCacheMagic) return false;
    if (!get(is, ver) || ver != kCacheVersion) return false;
    get(is, e);
    get(is, r);
    get(is, m);
    get(is, nm);
    get(is, nl);
    get(is, sig);
    if (e != eps || r != grid.R || m != grid.m || nm != n_max || nl != n_limit ||
        sig != pot.sigma())
        return false;
    k.pot = pot;
    k.grid = grid;
    k.eps = eps;
    k.n_max = n_max;
    k.n_limit = n_limit;
    if (!get(is, k.eps_c) || !get(is, k.F) || !get(is, k.C_eps)) return false;
    std::vector<double> nodes, weights;
    if (!get_vec(is, nodes) || !get_vec(is, weights)) return false;
    if (!get_vec(is, k.v) || !get_vec(is, k.K1) || !get_vec(is, k.row_mass)) return false;
    if (!get_vec(is, k.q) || !get_vec(is, k.u) || !get_vec(is, k.f) || !get_vec(is, k.h) ||
        !get_vec(is, k.jump_marginal))
        return false;
    return k.f.size() == static_cast<std::size_t>(k.states()) * k.table_len();
}

DiscreteKernel get_kernel(double eps, const GridSpec& grid, const PotentialSpec& pot,
                          int n_max, int n_limit, const std::string& cache_dir, int threads) {
    if (!cache_dir.empty()) {
        std::string path =
            cache_dir + "/kernel_" + kernel_cache_key(eps, grid, pot, n_max, n_limit) + ".bin";
        DiscreteKernel k;
        if (load_kernel(k, path, eps, grid, pot, n_max, n_limit)) return k;
        k = markov_kernel(eps, grid, pot, n_max, n_limit, threads);
        save_kernel(k, path);
        return k;
    }
    return markov_kernel(eps, grid, pot, n_max, n_limit, threads);
}

} // namespace pinlab
