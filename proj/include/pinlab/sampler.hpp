#pragma once

#include <atomic>
#include <vector>

#include "pinlab/alias.hpp"
#include "pinlab/field.hpp"
#include "pinlab/transfer.hpp"

namespace pinlab {

struct ChainPoint {
    int t = 0;      // epoch in tau
    int state = 0;  // 0 = atom, 1..m = grid node index + 1
};

// one excursion interior: (Z_1..Z_{l-1}) under P^{(-a,0)}(.|Z_{l-1}=b, Z_l=0)
std::vector<double> sample_excursion(int l, double a, double b, const PotentialSpec& pot,
                                     RngStream& rng);

// exact sample of P_{0,N} (free bridge)
FieldPath sample_free_pinning_path(int N, const PotentialSpec& pot, RngStream& rng);

// Sampler of P_{eps,N} and of the infinite-volume law, driven by an assembled
// kernel. Construction precomputes alias and enumeration tables; all sampling
// methods are const and safe to call from parallel replicas.
class PinningSampler {
  public:
    explicit PinningSampler(const DiscreteKernel& kernel);

    const DiscreteKernel& kernel() const { return k_; }

    // (tau_k, J_k) chain under P_eps( . | A_N ); first point (0, atom), last
    // point (N+1, atom). N + 1 must be within the kernel tables.
    std::vector<ChainPoint> sample_contact_chain(int N, RngStream& rng) const;

    // full field under P_{eps,N}; contact set stored on the path
    FieldPath sample_pinning_path(int N, RngStream& rng) const;

    // unconditioned chain under P_eps truncated at N; for eps < eps_c the
    // chain may terminate, in which case the tail is a free walk and
    // *terminated is set
    FieldPath sample_infinite_volume_prefix(int N, RngStream& rng,
                                            bool* terminated = nullptr) const;

    // interior (tau, J) points of one chi-gap of length n, conditioned on the
    // first adjacent contact falling at exactly n; local epochs in (0, n)
    void sample_gap_interior(int n, RngStream& rng, std::vector<ChainPoint>& out) const;

    // chains below this N use full sequential K*h sampling; above it, the
    // chi-skeleton factorization (same law, cheaper at scale)
    int exact_mode_threshold = 1024;

    // force one of the two equivalent chain constructions (law-equality tests)
    std::vector<ChainPoint> sample_contact_chain_mode(int N, RngStream& rng, bool exact) const {
        return exact ? chain_exact(N, rng) : chain_skeleton(N, rng);
    }

    long log_space_fallbacks() const { return log_space_falls_.load(); }

  private:
    std::vector<ChainPoint> chain_exact(int N, RngStream& rng) const;
    std::vector<ChainPoint> chain_skeleton(int N, RngStream& rng) const;
    // enumerate-and-draw of the within-gap jump from `state` with `r` steps
    // remaining; returns (s, j)
    std::pair<int, int> gap_jump(int state, int r, RngStream& rng) const;

    const DiscreteKernel& k_;
    AliasTable q_alias_;
    double q_total_ = 0.0;
    std::vector<AliasTable> marginal_alias_;      // per state, jump-length law (n >= 2 slots)
    std::vector<std::vector<float>> memo_;        // per (state, r <= r_memo): cumulative (s,j) table
    std::vector<double> f_t_;                     // f transposed: [time][state]
    std::vector<double> h_t_;                     // h transposed: [time][state]
    int r_memo_ = 64;
    mutable std::atomic<long> log_space_falls_{0};
};

} // namespace pinlab
