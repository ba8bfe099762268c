#include "pinlab/field.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace pinlab {

FieldPath::FieldPath(int n) : n_(n) {
    if (n < 2) throw std::invalid_argument("FieldPath: N must be >= 2");
    values_.assign(n + 3, 0.0);
}

bool FieldPath::boundary_pinned() const {
    return (*this)[-1] == 0.0 && (*this)[0] == 0.0 && (*this)[n_] == 0.0 &&
           (*this)[n_ + 1] == 0.0;
}

void FieldPath::write_csv(std::ostream& os) const {
    os << "index,value\n";
    char buf[64];
    for (int i = -1; i <= n_ + 1; ++i) {
        std::snprintf(buf, sizeof(buf), "%d,%.17g\n", i, (*this)[i]);
        os << buf;
    }
}

FieldPath FieldPath::read_csv(std::istream& is) {
    std::string line;
    std::getline(is, line);  // header
    std::vector<std::pair<int, double>> rows;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string a, b;
        std::getline(ss, a, ',');
        std::getline(ss, b, ',');
        rows.emplace_back(std::stoi(a), std::stod(b));
    }
    if (rows.size() < 5) throw std::runtime_error("FieldPath csv: too few rows");
    int n = static_cast<int>(rows.size()) - 3;
    FieldPath f(n);
    for (auto& [i, v] : rows) f.set(i, v);
    return f;
}

double discrete_laplacian(const FieldPath& field, int n) {
    if (n <= -1 || n >= field.N() + 1)
        throw std::out_of_range("discrete_laplacian: need -1 < n < N+1");
    return field[n + 1] + field[n - 1] - 2.0 * field[n];
}

double hamiltonian(const FieldPath& field, const PotentialSpec& pot) {
    double h = 0.0;
    for (int n = 0; n <= field.N(); ++n) {
        h += pot.V(discrete_laplacian(field, n));
        if (std::isinf(h)) return h;
    }
    return h;
}

ContactStructure contact_structure(const FieldPath& field) {
    const int n = field.N();
    ContactStructure cs;

    if (field.known_contacts()) {
        cs.tau = *field.known_contacts();
    } else {
        for (int i = 0; i <= n + 1; ++i)
            if (field[i] == 0.0) cs.tau.push_back(i);
    }
    // chi: i in tau with i-1 in tau; phi_{-1} = phi_0 = 0 puts 0 in chi
    for (size_t k = 0; k < cs.tau.size(); ++k) {
        int i = cs.tau[k];
        if (i == 0 || (k > 0 && cs.tau[k - 1] == i - 1)) cs.chi.push_back(i);
    }
    cs.J.resize(cs.tau.size());
    for (size_t k = 0; k < cs.tau.size(); ++k)
        cs.J[k] = (cs.tau[k] == 0) ? 0.0 : field[cs.tau[k] - 1];

    for (int t : cs.tau)
        if (t >= 1 && t <= n) ++cs.ell_N;
    for (int c : cs.chi)
        if (c >= 1 && c <= n) ++cs.iota_N;

    for (size_t k = 1; k < cs.tau.size() && cs.tau[k] <= n; ++k)
        cs.Delta_N = std::max(cs.Delta_N, cs.tau[k] - cs.tau[k - 1]);

    if (cs.iota_N == 0) {
        cs.delta_N = n + 1;  // sentinel: no adjacent contact in (0, N]
    } else {
        for (size_t k = 1; k < cs.chi.size() && cs.chi[k] <= n; ++k)
            cs.delta_N = std::max(cs.delta_N, cs.chi[k] - cs.chi[k - 1]);
    }
    cs.delta_N_inclusive = cs.delta_N;
    for (size_t k = 1; k < cs.chi.size(); ++k)
        if (cs.chi[k - 1] <= n)
            cs.delta_N_inclusive = std::max(cs.delta_N_inclusive, cs.chi[k] - cs.chi[k - 1]);
    return cs;
}

double rescale_hat(const FieldPath& field, const PotentialSpec& pot, double t) {
    const int n = field.N();
    double scale = pot.sigma() * std::pow(static_cast<double>(n), 1.5);
    double nt = n * t;
    int k = std::min(static_cast<int>(std::floor(nt)), n);
    double frac = nt - k;
    double next = (k + 1 <= n + 1) ? field[k + 1] : 0.0;
    return field[k] / scale + frac * (next - field[k]) / scale;
}

ExcursionAreas excursion_areas(const FieldPath& field, const ContactStructure& cs) {
    ExcursionAreas ex;
    const int n = field.N();
    // complete chi-blocks only: blocks ending at chi_k <= N
    for (size_t k = 1; k < cs.chi.size() && cs.chi[k] <= n; ++k) {
        double a = 0.0, at = 0.0;
        for (int i = cs.chi[k - 1] + 1; i <= cs.chi[k]; ++i) {
            a += field[i];
            at += std::abs(field[i]);
        }
        ex.A.push_back(a);
        ex.Atilde.push_back(at);
        ex.S.push_back((ex.S.empty() ? 0.0 : ex.S.back()) + a);
        ex.Stilde.push_back((ex.Stilde.empty() ? 0.0 : ex.Stilde.back()) + at);
    }
    return ex;
}

MuMeasure::MuMeasure(const FieldPath& field) : n_(field.N()) {
    double logn = std::log(static_cast<double>(n_));
    scale_ = std::pow(logn, 2.5) / std::pow(static_cast<double>(n_), 1.5);
    prefix_.assign(n_ + 1, 0.0);
    prefix_abs_.assign(n_ + 1, 0.0);
    for (int i = 0; i < n_; ++i) {
        prefix_[i + 1] = prefix_[i] + scale_ * field[i] / n_;
        prefix_abs_[i + 1] = prefix_abs_[i] + scale_ * std::abs(field[i]) / n_;
    }
}

double MuMeasure::cum(double t) const {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return prefix_.back();
    double nt = n_ * t;
    int i = std::min(static_cast<int>(std::floor(nt)), n_ - 1);
    double frac = nt - i;
    return prefix_[i] + frac * (prefix_[i + 1] - prefix_[i]);
}

double MuMeasure::cum_abs(double t) const {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return prefix_abs_.back();
    double nt = n_ * t;
    int i = std::min(static_cast<int>(std::floor(nt)), n_ - 1);
    double frac = nt - i;
    return prefix_abs_[i] + frac * (prefix_abs_[i + 1] - prefix_abs_[i]);
}

void write_contact_structure_json(const ContactStructure& cs, std::ostream& os) {
    auto ints = [&os](const std::vector<int>& v) {
        os << "[";
        for (size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
        os << "]";
    };
    os << "{\"tau\":";
    ints(cs.tau);
    os << ",\"chi\":";
    ints(cs.chi);
    os << ",\"J\":[";
    char buf[40];
    for (size_t i = 0; i < cs.J.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g", cs.J[i]);
        os << (i ? "," : "") << buf;
    }
    os << "],\"ell_N\":" << cs.ell_N << ",\"iota_N\":" << cs.iota_N
       << ",\"Delta_N\":" << cs.Delta_N << ",\"delta_N\":" << cs.delta_N << "}";
}

} // namespace pinlab
