#include "pinlab/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace pinlab {

void gauss_legendre_rule(int m, std::vector<double>& x, std::vector<double>& w) {
    x.assign(m, 0.0);
    w.assign(m, 0.0);
    // Newton iteration on P_m from the Chebyshev-angle initial guess
    for (int i = 0; i < (m + 1) / 2; ++i) {
        double z = std::cos(M_PI * (i + 0.75) / (m + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < m; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = m * (z * p0 - p1) / (z * z - 1.0);
            double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        x[i] = -z;
        x[m - 1 - i] = z;
        w[i] = w[m - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
    }
}

GridSpec GridSpec::gauss_legendre(double R, int m) {
    if (!(R > 0.0)) throw std::invalid_argument("GridSpec: R must be > 0");
    if (m < 2 || m % 2 != 0)
        throw std::invalid_argument("GridSpec: m must be even and >= 2 (atom must not be a node)");
    GridSpec g;
    g.R = R;
    g.m = m;
    std::vector<double> x, w;
    gauss_legendre_rule(m, x, w);
    g.nodes.resize(m);
    g.weights.resize(m);
    for (int i = 0; i < m; ++i) {
        g.nodes[i] = R * x[i];
        g.weights[i] = R * w[i];
    }
    return g;
}

} // namespace pinlab
