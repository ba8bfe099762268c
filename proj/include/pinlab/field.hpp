#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "pinlab/potential.hpp"

namespace pinlab {

// Field realization phi_{-1}, ..., phi_{N+1} with pinned boundary
// phi_{-1} = phi_0 = phi_N = phi_{N+1} = 0. Stored as a 0-based array of
// length N+3; array slot i+1 holds phi_i.
class FieldPath {
  public:
    explicit FieldPath(int n);

    int N() const { return n_; }
    double operator[](int i) const { return values_[i + 1]; }
    void set(int i, double v) { values_[i + 1] = v; }

    // contact epochs known at construction time (samplers fill this in)
    void set_known_contacts(std::vector<int> tau) { known_tau_ = std::move(tau); }
    const std::optional<std::vector<int>>& known_contacts() const { return known_tau_; }

    bool boundary_pinned() const;

    void write_csv(std::ostream& os) const;
    static FieldPath read_csv(std::istream& is);

  private:
    int n_;
    std::vector<double> values_;
    std::optional<std::vector<int>> known_tau_;
};

// Contact epochs tau (phi_i = 0), adjacent contacts chi (phi_{i-1} = phi_i = 0),
// heights J_k = phi_{tau_k - 1}, and the derived gap statistics.
struct ContactStructure {
    std::vector<int> tau;   // sorted, starts at 0, runs through N+1
    std::vector<int> chi;   // sorted, starts at 0
    std::vector<double> J;  // J[k] = phi_{tau[k]-1}; J[0] = 0
    int ell_N = 0;          // #(tau intersect [1,N])
    int iota_N = 0;         // #(chi intersect [1,N])
    int Delta_N = 0;        // max tau-gap among tau_k <= N
    int delta_N = 0;        // max chi-gap among chi_k <= N; N+1 sentinel if empty
    // max chi-gap among gaps whose left end is <= N (counts the gap
    // straddling N); every tau-gap counted by Delta_N sits inside one of these
    int delta_N_inclusive = 0;
};

struct ExcursionAreas {
    std::vector<double> A;       // signed block areas over chi-blocks
    std::vector<double> Atilde;  // absolute block areas
    std::vector<double> S;       // partial sums of A
    std::vector<double> Stilde;  // partial sums of Atilde
};

// Measure mu_N(dt) = phitilde_N(t) dt with the step density
// phitilde_N(t) = (log N)^{5/2} N^{-3/2} phi_{floor(Nt)}, floor(Nt) clamped
// to [0, N]. Interval masses are differences of one prefix table, so
// additivity over adjacent intervals is exact in floating point.
class MuMeasure {
  public:
    MuMeasure(const FieldPath& field);

    double cum(double t) const;       // nu([0, t])
    double cum_abs(double t) const;   // |nu|([0, t])
    double mass(double a, double b) const { return cum(b) - cum(a); }       // nu((a,b])
    double abs_mass(double a, double b) const { return cum_abs(b) - cum_abs(a); }

  private:
    int n_;
    double scale_;
    std::vector<double> prefix_;      // prefix_[i] = integral over [0, i/N]
    std::vector<double> prefix_abs_;
};

double discrete_laplacian(const FieldPath& field, int n);
double hamiltonian(const FieldPath& field, const PotentialSpec& pot);
ContactStructure contact_structure(const FieldPath& field);
double rescale_hat(const FieldPath& field, const PotentialSpec& pot, double t);
ExcursionAreas excursion_areas(const FieldPath& field, const ContactStructure& cs);

void write_contact_structure_json(const ContactStructure& cs, std::ostream& os);

} // namespace pinlab
