#include "pinlab/walk.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pinlab {

GaussianMoments yz_moments(int n, const WalkState& state) {
    if (n < 1) throw std::invalid_argument("yz_moments: n must be >= 1");
    double nn = n;
    GaussianMoments m;
    m.meanY = state.a;
    m.meanZ = state.b + nn * state.a;
    m.varY = state.sigma2 * nn;
    m.varZ = state.sigma2 * nn * (nn + 1.0) * (2.0 * nn + 1.0) / 6.0;
    m.covYZ = state.sigma2 * nn * (nn + 1.0) / 2.0;
    return m;
}

double zz_cov(int i, int j, double sigma2) {
    if (i < 1 || j < i) throw std::invalid_argument("zz_cov: need 1 <= i <= j");
    double di = i, dj = j;
    return sigma2 * di * (di + 1.0) * (3.0 * dj - di + 1.0) / 6.0;
}

std::pair<std::vector<double>, std::vector<double>>
sample_free_path(int n, const WalkState& state, const PotentialSpec& pot, RngStream& rng) {
    std::vector<double> y(n), z(n);
    double yc = state.a, zc = state.b;
    for (int k = 0; k < n; ++k) {
        yc += pot.sample_step(rng);
        zc += yc;
        y[k] = yc;
        z[k] = zc;
    }
    return {std::move(y), std::move(z)};
}

BridgeConditional bridge_conditional(int n, const WalkState& state, const std::vector<Pin>& pins) {
    std::vector<char> pinned(n + 1, 0);
    std::vector<double> pin_value(n + 1, 0.0);
    for (const Pin& p : pins) {
        if (p.index < 1 || p.index > n) throw std::invalid_argument("bridge pin out of range");
        if (pinned[p.index] && pin_value[p.index] != p.value)
            throw std::invalid_argument("inconsistent duplicate pin");
        pinned[p.index] = 1;
        pin_value[p.index] = p.value;
    }
    BridgeConditional bc;
    std::vector<int> pidx;
    for (int i = 1; i <= n; ++i)
        (pinned[i] ? pidx : bc.free_indices).push_back(i);

    const int nf = static_cast<int>(bc.free_indices.size());
    const int np = static_cast<int>(pidx.size());
    auto mean_of = [&](int i) { return state.b + i * state.a; };
    auto cov_of = [&](int i, int j) { return zz_cov(std::min(i, j), std::max(i, j), state.sigma2); };

    bc.mean.resize(nf);
    bc.cov.resize(nf, nf);
    for (int r = 0; r < nf; ++r) {
        bc.mean(r) = mean_of(bc.free_indices[r]);
        for (int c = 0; c < nf; ++c) bc.cov(r, c) = cov_of(bc.free_indices[r], bc.free_indices[c]);
    }
    if (np == 0) return bc;

    Eigen::MatrixXd spp(np, np), sfp(nf, np);
    Eigen::VectorXd dev(np);
    for (int r = 0; r < np; ++r) {
        dev(r) = pin_value[pidx[r]] - mean_of(pidx[r]);
        for (int c = 0; c < np; ++c) spp(r, c) = cov_of(pidx[r], pidx[c]);
        for (int f = 0; f < nf; ++f) sfp(f, r) = cov_of(bc.free_indices[f], pidx[r]);
    }
    // pinned blocks with adjacent indices are ill-conditioned; jitter the
    // diagonal before factorizing
    double jitter = 1e-12 * spp.diagonal().maxCoeff();
    Eigen::LDLT<Eigen::MatrixXd> ldlt(spp + jitter * Eigen::MatrixXd::Identity(np, np));
    if (ldlt.info() != Eigen::Success)
        throw std::runtime_error("bridge_conditional: pin covariance factorization failed");
    bc.mean += sfp * ldlt.solve(dev);
    bc.cov -= sfp * ldlt.solve(sfp.transpose());
    return bc;
}

std::vector<double> sample_bridge(int n, const WalkState& state, std::vector<Pin> pins,
                                  const std::optional<std::pair<double, double>>& terminal,
                                  RngStream& rng) {
    if (terminal) {
        if (n < 2) throw std::invalid_argument("sample_bridge: terminal pair needs n >= 2");
        double yn = terminal->first, zn = terminal->second;
        pins.push_back({n - 1, zn - yn});
        pins.push_back({n, zn});
    }
    BridgeConditional bc = bridge_conditional(n, state, pins);
    std::vector<double> z(n + 1, 0.0);
    for (const Pin& p : pins) z[p.index] = p.value;

    const int nf = static_cast<int>(bc.free_indices.size());
    if (nf > 0) {
        Eigen::MatrixXd c = bc.cov;
        double jitter = 1e-12 * std::max(1.0, c.diagonal().maxCoeff());
        Eigen::LLT<Eigen::MatrixXd> llt(c);
        if (llt.info() != Eigen::Success) {
            llt.compute(c + jitter * Eigen::MatrixXd::Identity(nf, nf));
            if (llt.info() != Eigen::Success)
                throw std::runtime_error("sample_bridge: conditional covariance not PSD");
        }
        Eigen::VectorXd g(nf);
        for (int i = 0; i < nf; ++i) g(i) = rng.normal();
        Eigen::VectorXd x = bc.mean + llt.matrixL() * g;
        for (int i = 0; i < nf; ++i) z[bc.free_indices[i]] = x(i);
    }
    // check the constraints survived the factorization
    for (const Pin& p : pins)
        if (std::abs(z[p.index] - p.value) > 1e-9)
            throw std::runtime_error("sample_bridge: constraint residual above 1e-9");
    return std::vector<double>(z.begin() + 1, z.end());
}

std::vector<double> sample_excursion_bridge(int l, double a, double b, double sigma,
                                            RngStream& rng) {
    if (l < 1) throw std::invalid_argument("sample_excursion_bridge: l must be >= 1");
    if (l == 1) {
        if (b != 0.0) throw std::invalid_argument("excursion of length 1 requires b = 0");
        return {};
    }
    std::vector<double> z(l - 1);
    double y0 = -a, z0 = 0.0;
    double sigma2 = sigma * sigma;
    // One site at a time: given the walk state (y0, z0) at k-1 and the targets
    // Z_{l-1} = b, Z_l = 0, the law of Z_k is Gaussian with
    //   mean = z0 + y0 + (2/u)(b - z0 - (u-1)y0) + (2(u-2)/(u(u+1)))(z0 + u y0)
    //   var  = sigma^2 (u-1)(u-2) / (u(u+1)),  u = l - k + 1.
    for (int k = 1; k <= l - 2; ++k) {
        double u = l - k + 1.0;
        double mean = z0 + y0 + (2.0 / u) * (b - z0 - (u - 1.0) * y0) +
                      (2.0 * (u - 2.0) / (u * (u + 1.0))) * (z0 + u * y0);
        double var = sigma2 * (u - 1.0) * (u - 2.0) / (u * (u + 1.0));
        double zk = mean + std::sqrt(std::max(0.0, var)) * rng.normal();
        z[k - 1] = zk;
        y0 = zk - z0;
        z0 = zk;
    }
    z[l - 2] = b;
    return z;
}

double pinned_conditional_variance(int n, int k, const std::vector<int>& pins, double sigma2) {
    if (k < 1 || k > n) throw std::invalid_argument("pinned_conditional_variance: bad k");
    std::vector<Pin> pv;
    for (int t : pins)
        if (t != k) pv.push_back({t, 0.0});
    WalkState st{0.0, 0.0, sigma2};
    BridgeConditional bc = bridge_conditional(n, st, pv);
    for (size_t i = 0; i < bc.free_indices.size(); ++i)
        if (bc.free_indices[i] == k) return bc.cov(i, i);
    return 0.0;  // k itself pinned
}

double local_limit_density(double y, double z) {
    return std::sqrt(3.0) / M_PI * std::exp(-2.0 * y * y - 6.0 * z * z + 6.0 * y * z);
}

LocalLimitReport verify_local_limit(int n, int samples, const PotentialSpec& pot,
                                    RngStream& rng) {
    if (n < 10) throw std::invalid_argument("verify_local_limit: n must be >= 10");
    if (samples < 10000) throw std::invalid_argument("verify_local_limit: need >= 1e4 samples");
    LocalLimitReport rep;
    rep.bins_y = 25;
    rep.bins_z = 15;
    rep.y_lo = -2.5;
    rep.y_hi = 2.5;
    rep.z_lo = -1.5;
    rep.z_hi = 1.5;
    std::vector<long long> counts(rep.bins_y * rep.bins_z, 0);
    double sy = pot.sigma() * std::sqrt(static_cast<double>(n));
    double sz = pot.sigma() * std::pow(static_cast<double>(n), 1.5);
    double syy = 0, syz = 0, szz = 0;
    for (int s = 0; s < samples; ++s) {
        double yc = 0.0, zc = 0.0;
        for (int k = 0; k < n; ++k) {
            yc += pot.sample_step(rng);
            zc += yc;
        }
        double yh = yc / sy, zh = zc / sz;
        syy += yh * yh;
        syz += yh * zh;
        szz += zh * zh;
        int iy = static_cast<int>((yh - rep.y_lo) / (rep.y_hi - rep.y_lo) * rep.bins_y);
        int iz = static_cast<int>((zh - rep.z_lo) / (rep.z_hi - rep.z_lo) * rep.bins_z);
        if (iy >= 0 && iy < rep.bins_y && iz >= 0 && iz < rep.bins_z)
            ++counts[iy * rep.bins_z + iz];
    }
    rep.cov_yy = syy / samples;
    rep.cov_yz = syz / samples;
    rep.cov_zz = szz / samples;
    double dy = (rep.y_hi - rep.y_lo) / rep.bins_y;
    double dz = (rep.z_hi - rep.z_lo) / rep.bins_z;
    rep.density.resize(counts.size());
    for (int iy = 0; iy < rep.bins_y; ++iy)
        for (int iz = 0; iz < rep.bins_z; ++iz) {
            double yc = rep.y_lo + (iy + 0.5) * dy;
            double zc = rep.z_lo + (iz + 0.5) * dz;
            double dens = counts[iy * rep.bins_z + iz] / (samples * dy * dz);
            rep.density[iy * rep.bins_z + iz] = dens;
            rep.sup_discrepancy =
                std::max(rep.sup_discrepancy, std::abs(dens - local_limit_density(yc, zc)));
        }
    return rep;
}

ConditionedBmCov conditioned_bm_cov() {
    ConditionedBmCov r;
    r.A << 1.0 / 20.0, 1.0 / 8.0, 1.0 / 6.0,
           1.0 / 8.0, 1.0 / 3.0, 1.0 / 2.0,
           1.0 / 6.0, 1.0 / 2.0, 1.0;
    Eigen::Matrix2d s22 = r.A.block<2, 2>(1, 1);
    Eigen::RowVector2d s12 = r.A.block<1, 2>(0, 1);
    r.conditional_variance = r.A(0, 0) - (s12 * s22.inverse() * s12.transpose())(0, 0);
    return r;
}

double phi_of_t(double t) { return 0.5 * std::erfc(t * std::sqrt(360.0)); }

namespace {
// covariances of the unconditioned pair (B_s, I_t)
double cov_bb(double s, double t) { return std::min(s, t); }
double cov_ib(double s, double t) {
    // Cov(I_s, B_t)
    return (s <= t) ? 0.5 * s * s : s * t - 0.5 * t * t;
}
double cov_ii(double s, double t) {
    double a = std::min(s, t), b = std::max(s, t);
    return 0.5 * a * a * b - a * a * a / 6.0;
}
} // namespace

ConditionedIBM::ConditionedIBM(std::vector<double> grid) : grid_(std::move(grid)) {
    const int k = static_cast<int>(grid_.size());
    if (k == 0) throw std::invalid_argument("ConditionedIBM: empty grid");
    for (int i = 0; i < k; ++i) {
        if (!(grid_[i] > 0.0 && grid_[i] < 1.0))
            throw std::invalid_argument("ConditionedIBM: grid points must lie in (0,1)");
        if (i > 0 && grid_[i] <= grid_[i - 1])
            throw std::invalid_argument("ConditionedIBM: grid must be strictly increasing");
    }
    // variables: B at grid (k), I at grid (k); condition on (B_1, I_1) = (0,0)
    const int d = 2 * k;
    Eigen::MatrixXd s11(d, d), s12(d, 2);
    Eigen::Matrix2d s22;
    auto var_of = [&](int i) { return i < k ? grid_[i] : grid_[i - k]; };
    auto cov = [&](int i, int j) {
        bool bi = i < k, bj = j < k;
        double ti = bi ? grid_[i] : grid_[i - k];
        double tj = bj ? grid_[j] : grid_[j - k];
        if (bi && bj) return cov_bb(ti, tj);
        if (!bi && !bj) return cov_ii(ti, tj);
        return bi ? cov_ib(tj, ti) : cov_ib(ti, tj);
    };
    (void)var_of;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) s11(i, j) = cov(i, j);
    for (int i = 0; i < d; ++i) {
        bool bi = i < k;
        double ti = bi ? grid_[i] : grid_[i - k];
        s12(i, 0) = bi ? cov_bb(ti, 1.0) : cov_ib(ti, 1.0);
        s12(i, 1) = bi ? cov_ib(1.0, ti) : cov_ii(ti, 1.0);
    }
    s22 << 1.0, 0.5, 0.5, 1.0 / 3.0;
    Eigen::MatrixXd c = s11 - s12 * s22.inverse() * s12.transpose();
    Eigen::LLT<Eigen::MatrixXd> llt(c);
    if (llt.info() != Eigen::Success) {
        double jitter = 1e-12 * c.diagonal().maxCoeff();
        llt.compute(c + jitter * Eigen::MatrixXd::Identity(d, d));
        if (llt.info() != Eigen::Success)
            throw std::runtime_error("ConditionedIBM: degenerate grid");
    }
    chol_ = llt.matrixL();
}

std::pair<std::vector<double>, std::vector<double>> ConditionedIBM::sample(RngStream& rng) const {
    const int k = static_cast<int>(grid_.size());
    Eigen::VectorXd g(2 * k);
    for (int i = 0; i < 2 * k; ++i) g(i) = rng.normal();
    Eigen::VectorXd x = chol_ * g;  // conditional mean is zero
    std::vector<double> b(k), ii(k);
    for (int i = 0; i < k; ++i) {
        b[i] = x(i);
        ii[i] = x(k + i);
    }
    return {std::move(b), std::move(ii)};
}

} // namespace pinlab
