#pragma once

#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pinlab/grid.hpp"
#include "pinlab/potential.hpp"

namespace pinlab {

// Joint density of (Z_{n-1}, Z_n) at (y, 0) under P^{(-x,0)} for n >= 2;
// for n = 1 the y-marginal is a Dirac at 0 and the returned value is its
// coefficient exp(-V(x)).
double w_kernel(int n, double x, double y, const PotentialSpec& pot);

struct EigenPair {
    double lambda = 0.0;
    Eigen::VectorXd v;  // positive, v(0) = 1 (atom component first)
};

// Power iteration for the leading eigenpair of a nonnegative irreducible
// matrix. Relative tolerance 1e-12 on lambda; throws after max_iter.
EigenPair leading_eigen(const Eigen::MatrixXd& G, double tol = 1e-12, int max_iter = 100000);

// Base operator G^delta over atom+nodes: row x, column 0 the atom (fed by the
// n = 1 Dirac term), columns 1..m the quadrature cells, with the n > n_max
// tail approximated by the 1/n^2 shape frozen at n_max.
class OperatorBuilder {
  public:
    OperatorBuilder(GridSpec grid, PotentialSpec pot, int n_max);

    Eigen::MatrixXd build(double delta) const;
    double leading_lambda(double delta) const;

    // Keeps the n-resolved kernel values in memory (float) so repeated
    // build(delta) calls run at memcpy speed. ~(n_max * m^2 * 4) bytes.
    void enable_store();
    void release_store();

    const GridSpec& grid() const { return grid_; }
    const PotentialSpec& pot() const { return pot_; }
    int n_max() const { return n_max_; }

  private:
    GridSpec grid_;
    PotentialSpec pot_;
    int n_max_;
    std::vector<float> store_;  // [(n-2)*(m+1) + x]*m + j, value w_n * weight_j
};

// eps_c = 1 / lambda(0)
double critical_epsilon(const OperatorBuilder& op);

// F(eps) = 0 for eps <= eps_c, else the root of eps * lambda(F) = 1,
// located by bisection to 1e-10.
double free_energy(OperatorBuilder& op, double eps, double eps_c);

// Discretized Markov renewal kernel K^eps together with every derived table
// the samplers and experiments consume. States: 0 = atom, 1..m = grid nodes.
struct DiscreteKernel {
    PotentialSpec pot = PotentialSpec::gaussian(1.0);
    GridSpec grid;
    double eps = 0.0;
    double eps_c = 0.0;
    double F = 0.0;
    double C_eps = 0.0;            // tail constant of q
    int n_max = 0;                 // jump-length truncation of the operator
    int n_limit = 0;               // tables cover n = 0 .. n_limit + 1
    std::vector<double> v;         // eigenfunction on atom+nodes, v[0] = 1
    std::vector<double> K1;        // length-1 jump probability per state
    std::vector<double> row_mass;  // total outgoing kernel mass per state
    std::vector<double> q;         // step law of the adjacent-contact renewal
    std::vector<double> u;         // renewal mass function of q
    std::vector<double> f;         // (m+1) rows: first atom-hit at exactly r
    std::vector<double> h;         // (m+1) rows: P(hit (r, atom)) = U_{x,{0}}(r)
    std::vector<double> jump_marginal;  // (m+1) rows: sum_j khat[n](x -> j)

    int states() const { return grid.m + 1; }
    int table_len() const { return n_limit + 2; }
    double node_value(int state) const { return state == 0 ? 0.0 : grid.nodes[state - 1]; }

    const double* f_row(int state) const { return f.data() + state * table_len(); }
    const double* h_row(int state) const { return h.data() + state * table_len(); }
    const double* marg_row(int state) const { return jump_marginal.data() + state * table_len(); }

    // kernel entry for a jump of length n >= 2 from `state` into grid cell j
    // (quadrature weight folded in)
    double khat(int n, int state, int j) const;

    // limit of K(n) n^2 e^{Fn} v(x)/v(y); from the local limit theorem this is
    // eps * g(0,0) / sigma^2
    double tail_limit_constant() const;
};

// Assembles the kernel at pinning strength eps and builds all tables up to
// n_limit. n_fft, when 0, is chosen automatically.
DiscreteKernel markov_kernel(double eps, const GridSpec& grid, const PotentialSpec& pot,
                             int n_max, int n_limit, int threads = 2);

// step law table (already part of DiscreteKernel; exposed for the spec surface)
std::vector<double> step_law_q(const DiscreteKernel& kernel);

struct RenewalTables {
    std::vector<double> q, u, U;  // U = prefix sums of u
    double C_eps = 0.0;
};

// u by the renewal recursion, U by prefix sums, C by the median of
// n^2 e^{Fn} q(n) over the top quartile of the fitted window.
RenewalTables renewal_tables(const std::vector<double>& q, int n_limit, double F = 0.0);

// h rows for r = 0..N+1 from an assembled kernel (slice of the cached table)
std::vector<std::vector<double>> hit_tables(const DiscreteKernel& kernel, int N);

// binary cache
std::string kernel_cache_key(double eps, const GridSpec& grid, const PotentialSpec& pot,
                             int n_max, int n_limit);
bool save_kernel(const DiscreteKernel& k, const std::string& path);
bool load_kernel(DiscreteKernel& k, const std::string& path, double eps, const GridSpec& grid,
                 const PotentialSpec& pot, int n_max, int n_limit);

// Loads from cache_dir if present, else builds and stores. Empty cache_dir
// disables caching.
DiscreteKernel get_kernel(double eps, const GridSpec& grid, const PotentialSpec& pot,
                          int n_max, int n_limit, const std::string& cache_dir, int threads = 2);

} // namespace pinlab
