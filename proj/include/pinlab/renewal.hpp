#pragma once

#include <string>
#include <vector>

#include "pinlab/alias.hpp"
#include "pinlab/rng.hpp"

namespace pinlab {

enum class SyntheticKind { CriticalPower, Exponential, Geometric };

// Step law table q(1..n_max) plus an overflow bucket holding the exact mass
// beyond n_max. Critical-power buckets are drawn by the continuous
// inverse-power transform; exponential/geometric buckets are exact.
struct SyntheticQ {
    SyntheticKind kind = SyntheticKind::Geometric;
    std::vector<double> q;  // index 0 unused
    double tail_mass = 0.0;
    int n_max = 0;
    double param = 0.0;  // C, G, or p

    double total() const;
    int sample_gap(const AliasTable& alias, RngStream& rng) const;
    AliasTable make_alias() const;
};

// critical-power: q(n) = C/n^2 for n >= 2 with q(1) absorbing the head
// deficit (requires C <= 1/(zeta(2)-1)); exponential: q(n) proportional to
// e^{-Gn}; geometric: q(n) = p(1-p)^{n-1}.
SyntheticQ synthetic_q(SyntheticKind kind, double param, int n_max);

// free renewal run: points of chi in [0, N] plus iota_N
struct RenewalRun {
    std::vector<int> chi;
    int iota_N = 0;
};
RenewalRun sample_renewal(const SyntheticQ& q, const AliasTable& alias, int N, RngStream& rng);

// One conditioned gap: law q(n) u(R-n) / u(R) on n in [1, R]. Rejection from
// the unconditioned alias with acceptance u(R-n), falling back to a direct
// scan when R is small or the acceptance rate is poor.
int conditioned_gap(const std::vector<double>& q, const AliasTable& alias, double q_total,
                    const std::vector<double>& u, int R, RngStream& rng);

// chi conditioned on N+1 in chi (u must extend to N+1)
RenewalRun sample_conditioned_renewal(const std::vector<double>& q, const AliasTable& alias,
                                      const std::vector<double>& u, int N, RngStream& rng);

struct GapStatistics {
    int delta_N = 0;     // max gap among chi_k <= N; sentinel N+1 when no interior point
    int iota_N = 0;
    int argmax_left = 0; // left end of the maximal gap
};
GapStatistics gap_statistics(const std::vector<int>& chi, int N);

struct GapBoundRow {
    std::string regime;
    int N = 0;
    double t_or_c = 0.0;
    double estimate = 0.0;
    double stderr_ = 0.0;
    int replicas = 0;
};

// P(delta_N >= t N / log N | N+1 in chi) over the (N, t) lattice for the
// critical regime, and P(delta_N >= c log N | N+1 in chi) for the
// exponential regime.
std::vector<GapBoundRow> verify_gap_bounds(const std::string& regime, const SyntheticQ& q,
                                           const std::vector<int>& n_list,
                                           const std::vector<double>& t_list, int replicas,
                                           std::uint64_t seed, int threads = 2);

} // namespace pinlab
