#ifndef LOBSA_MODE_MAP_HPP
#define LOBSA_MODE_MAP_HPP

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "lobsa/fock.hpp"

namespace lobsa {

// Isometric substitution rule on creation operators: the operator of
// domain mode i is replaced by sum_j matrix[j][i] * (codomain operator j).
class ModeLinearMap {
public:
    ModeLinearMap(std::vector<ModeId> domain, std::vector<ModeId> codomain,
                  std::vector<std::vector<Complex>> matrix)
        : domain_(std::move(domain)), codomain_(std::move(codomain)), u_(std::move(matrix)) {
        check_unique(domain_, "domain");
        check_unique(codomain_, "codomain");
        if (u_.size() != codomain_.size()) {
            throw std::invalid_argument("mode map: matrix row count != codomain size");
        }
        for (auto& row : u_) {
            if (row.size() != domain_.size()) {
                throw std::invalid_argument("mode map: matrix column count != domain size");
            }
        }
        if (codomain_.size() < domain_.size()) {
            throw std::invalid_argument("mode map: codomain smaller than domain");
        }
        // u^H u = identity within 1e-10
        for (std::size_t i = 0; i < domain_.size(); ++i) {
            for (std::size_t k = 0; k < domain_.size(); ++k) {
                Complex acc{0.0, 0.0};
                for (std::size_t j = 0; j < codomain_.size(); ++j) {
                    acc += std::conj(u_[j][i]) * u_[j][k];
                }
                Complex expected = (i == k) ? Complex{1.0, 0.0} : Complex{0.0, 0.0};
                if (std::abs(acc - expected) > kNormTol) {
                    throw std::invalid_argument("mode map: matrix is not an isometry");
                }
            }
        }
    }

    const std::vector<ModeId>& domain_modes() const { return domain_; }
    const std::vector<ModeId>& codomain_modes() const { return codomain_; }
    const std::vector<std::vector<Complex>>& matrix() const { return u_; }

    // Matrix-level composition check helper: column i applied after `other`.
    bool is_identity(double tol = 1e-12) const {
        if (domain_ != codomain_) return false;
        for (std::size_t j = 0; j < u_.size(); ++j) {
            for (std::size_t i = 0; i < u_[j].size(); ++i) {
                Complex expected = (i == j) ? Complex{1.0, 0.0} : Complex{0.0, 0.0};
                if (std::abs(u_[j][i] - expected) > tol) return false;
            }
        }
        return true;
    }

private:
    static void check_unique(const std::vector<ModeId>& modes, const char* what) {
        std::set<ModeId> seen;
        for (auto& m : modes) {
            if (!seen.insert(m).second) {
                throw std::invalid_argument(std::string("mode map: duplicate ") + what +
                                            " mode " + m.str());
            }
        }
    }

    std::vector<ModeId> domain_;
    std::vector<ModeId> codomain_;
    std::vector<std::vector<Complex>> u_;
};

// compose(g, f): apply f then g; both must act on matching mode lists.
inline ModeLinearMap compose(const ModeLinearMap& g, const ModeLinearMap& f) {
    if (f.codomain_modes() != g.domain_modes()) {
        throw std::invalid_argument("compose: mode lists do not chain");
    }
    std::size_t rows = g.codomain_modes().size();
    std::size_t cols = f.domain_modes().size();
    std::size_t inner = g.domain_modes().size();
    std::vector<std::vector<Complex>> m(rows, std::vector<Complex>(cols, Complex{0.0, 0.0}));
    for (std::size_t j = 0; j < rows; ++j) {
        for (std::size_t i = 0; i < cols; ++i) {
            for (std::size_t k = 0; k < inner; ++k) {
                m[j][i] += g.matrix()[j][k] * f.matrix()[k][i];
            }
        }
    }
    return ModeLinearMap(f.domain_modes(), g.codomain_modes(), std::move(m));
}

inline ModeLinearMap adjoint(const ModeLinearMap& map) {
    std::size_t rows = map.domain_modes().size();
    std::size_t cols = map.codomain_modes().size();
    std::vector<std::vector<Complex>> m(rows, std::vector<Complex>(cols));
    for (std::size_t j = 0; j < rows; ++j) {
        for (std::size_t i = 0; i < cols; ++i) {
            m[j][i] = std::conj(map.matrix()[i][j]);
        }
    }
    return ModeLinearMap(map.codomain_modes(), map.domain_modes(), std::move(m));
}

// Rewrites every basis term as a creation-operator product on vacuum,
// substitutes the domain operators, and re-collects occupation numbers with
// the bosonic sqrt(n!) normalization.
inline PhotonicState apply_map(const PhotonicState& state, const ModeLinearMap& map,
                               int photon_cap = kDefaultPhotonCap) {
    if (state.empty()) return state;
    std::set<ModeId> domain_set(map.domain_modes().begin(), map.domain_modes().end());
    for (auto& mode : map.domain_modes()) {
        if (!state.registry().count(mode)) {
            throw std::invalid_argument("apply_map: domain mode " + mode.str() +
                                        " not in state registry");
        }
    }
    std::set<ModeId> new_registry;
    for (auto& mode : state.registry()) {
        if (!domain_set.count(mode)) new_registry.insert(mode);
    }
    for (auto& mode : map.codomain_modes()) new_registry.insert(mode);

    PhotonicState::TermMap out;
    for (auto& [basis, amp] : state.terms()) {
        if (basis.total_photons() > photon_cap) {
            throw std::invalid_argument("apply_map: photon cap exceeded");
        }
        // Operator-product prefactor: divide out sqrt(n!) of every input mode.
        Complex pref = amp;
        for (auto& [mode, n] : basis.occupations()) pref /= std::sqrt(factorial(n));

        // Polynomial in codomain creation operators, seeded with the
        // untouched (pass-through) part of the term.
        using Monomial = std::map<ModeId, int>;
        std::map<Monomial, Complex> poly;
        poly.emplace(basis.without(domain_set).occupations(), pref);

        for (std::size_t i = 0; i < map.domain_modes().size(); ++i) {
            int n = basis.count(map.domain_modes()[i]);
            for (int rep = 0; rep < n; ++rep) {
                std::map<Monomial, Complex> next;
                for (auto& [mono, coef] : poly) {
                    for (std::size_t j = 0; j < map.codomain_modes().size(); ++j) {
                        Complex c = map.matrix()[j][i];
                        if (std::abs(c) <= kAmplitudeEps) continue;
                        Monomial m = mono;
                        m[map.codomain_modes()[j]] += 1;
                        next[std::move(m)] += coef * c;
                    }
                }
                poly = std::move(next);
            }
        }

        for (auto& [mono, coef] : poly) {
            Complex value = coef;
            for (auto& [mode, n] : mono) value *= std::sqrt(factorial(n));
            out[FockBasisVector(Monomial(mono))] += value;
        }
    }
    return PhotonicState::from_terms(std::move(new_registry), std::move(out), photon_cap);
}

}  // namespace lobsa

#endif  // LOBSA_MODE_MAP_HPP
