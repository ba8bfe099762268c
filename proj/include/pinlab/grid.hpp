#pragma once

#include <vector>

namespace pinlab {

// Hybrid state space of the discretized Markov renewal kernel: a distinguished
// atom at height 0 plus m Gauss-Legendre nodes on [-R, R]. m must be even so
// no quadrature node coincides with the atom.
struct GridSpec {
    double R = 0.0;
    int m = 0;
    std::vector<double> nodes;    // ascending, symmetric about 0
    std::vector<double> weights;  // positive, sum = 2R

    static GridSpec gauss_legendre(double R, int m);
};

// Nodes and weights of m-point Gauss-Legendre quadrature on [-1, 1].
void gauss_legendre_rule(int m, std::vector<double>& x, std::vector<double>& w);

} // namespace pinlab
