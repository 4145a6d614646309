#ifndef LOBSA_FOCK_HPP
#define LOBSA_FOCK_HPP

#include <cmath>
#include <complex>
#include <compare>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lobsa {

using Complex = std::complex<double>;

// Amplitudes smaller than this are pruned from sparse states.
inline constexpr double kAmplitudeEps = 1e-12;
// Comparison tolerance for norms, fidelities and probabilities.
inline constexpr double kNormTol = 1e-10;
// Default total-photon cap; covers the largest analysis scenario here.
inline constexpr int kDefaultPhotonCap = 16;

enum class Pol : int { H = 0, V = 1 };

inline char pol_char(Pol p) { return p == Pol::H ? 'H' : 'V'; }

// One bosonic mode: a spatial label plus a polarization.
struct ModeId {
    std::string spatial;
    Pol pol = Pol::H;

    friend auto operator<=>(const ModeId&, const ModeId&) = default;

    std::string str() const { return spatial + ":" + pol_char(pol); }

    static ModeId parse(const std::string& s) {
        auto colon = s.rfind(':');
        if (colon == std::string::npos || colon + 2 != s.size() ||
            (s[colon + 1] != 'H' && s[colon + 1] != 'V')) {
            throw std::invalid_argument("bad mode id: " + s);
        }
        return ModeId{s.substr(0, colon), s[colon + 1] == 'H' ? Pol::H : Pol::V};
    }
};

inline ModeId mode_h(const std::string& spatial) { return ModeId{spatial, Pol::H}; }
inline ModeId mode_v(const std::string& spatial) { return ModeId{spatial, Pol::V}; }

inline double factorial(int n) {
    static const std::vector<double> table = [] {
        std::vector<double> t(33, 1.0);
        for (int i = 1; i < 33; ++i) t[i] = t[i - 1] * i;
        return t;
    }();
    if (n < 0 || n >= static_cast<int>(table.size())) {
        throw std::invalid_argument("factorial argument out of range");
    }
    return table[n];
}

// Sparse occupation vector; modes with zero photons are omitted, so equality
// of the stored maps is equality of basis vectors.
class FockBasisVector {
public:
    FockBasisVector() = default;

    explicit FockBasisVector(std::map<ModeId, int> occ) {
        for (auto& [mode, n] : occ) {
            if (n < 0) throw std::invalid_argument("negative occupation on " + mode.str());
            if (n > 0) occ_.emplace(mode, n);
        }
    }

    int count(const ModeId& m) const {
        auto it = occ_.find(m);
        return it == occ_.end() ? 0 : it->second;
    }

    int spatial_count(const std::string& spatial) const {
        return count(mode_h(spatial)) + count(mode_v(spatial));
    }

    int total_photons() const {
        int t = 0;
        for (auto& [mode, n] : occ_) t += n;
        return t;
    }

    const std::map<ModeId, int>& occupations() const { return occ_; }

    // Occupations restricted to the given modes.
    FockBasisVector restricted_to(const std::set<ModeId>& modes) const {
        std::map<ModeId, int> out;
        for (auto& [mode, n] : occ_) {
            if (modes.count(mode)) out.emplace(mode, n);
        }
        return FockBasisVector(std::move(out));
    }

    // Occupations with the given modes removed.
    FockBasisVector without(const std::set<ModeId>& modes) const {
        std::map<ModeId, int> out;
        for (auto& [mode, n] : occ_) {
            if (!modes.count(mode)) out.emplace(mode, n);
        }
        return FockBasisVector(std::move(out));
    }

    friend auto operator<=>(const FockBasisVector&, const FockBasisVector&) = default;

    std::string str() const {
        std::ostringstream os;
        os << '|';
        bool first = true;
        for (auto& [mode, n] : occ_) {
            if (!first) os << ' ';
            first = false;
            os << mode.str();
            if (n != 1) os << '^' << n;
        }
        if (first) os << "vac";
        os << ">";
        return os.str();
    }

private:
    std::map<ModeId, int> occ_;
};

inline FockBasisVector fock_term(std::initializer_list<std::pair<ModeId, int>> occ) {
    std::map<ModeId, int> m;
    for (auto& [mode, n] : occ) m[mode] += n;
    return FockBasisVector(std::move(m));
}

// Single photon per listed mode.
inline FockBasisVector photons(std::initializer_list<ModeId> modes) {
    std::map<ModeId, int> m;
    for (auto& mode : modes) m[mode] += 1;
    return FockBasisVector(std::move(m));
}

// Sparse state vector over an explicit, ordered mode registry.
// Instances are immutable after construction; all operations return new values.
class PhotonicState {
public:
    using TermMap = std::map<FockBasisVector, Complex>;

    PhotonicState() = default;  // empty-state marker (zero vector, no registry)

    static PhotonicState vacuum(std::set<ModeId> registry = {}) {
        PhotonicState s;
        s.registry_ = std::move(registry);
        s.terms_.emplace(FockBasisVector{}, Complex{1.0, 0.0});
        s.norm2_ = 1.0;
        return s;
    }

    static PhotonicState from_terms(std::set<ModeId> registry, TermMap terms,
                                    int photon_cap = kDefaultPhotonCap) {
        PhotonicState s;
        s.registry_ = std::move(registry);
        for (auto& [basis, amp] : terms) {
            for (auto& [mode, n] : basis.occupations()) {
                if (!s.registry_.count(mode)) {
                    throw std::invalid_argument("mode " + mode.str() + " not in registry");
                }
            }
            if (basis.total_photons() > photon_cap) {
                throw std::invalid_argument("photon cap exceeded: " + basis.str());
            }
            if (std::abs(amp) > kAmplitudeEps) s.terms_.emplace(basis, amp);
        }
        s.norm2_ = 0.0;
        for (auto& [basis, amp] : s.terms_) s.norm2_ += std::norm(amp);
        return s;
    }

    const std::set<ModeId>& registry() const { return registry_; }
    const TermMap& terms() const { return terms_; }
    double norm_squared() const { return norm2_; }
    bool empty() const { return terms_.empty(); }
    std::size_t term_count() const { return terms_.size(); }

    Complex amplitude(const FockBasisVector& basis) const {
        auto it = terms_.find(basis);
        return it == terms_.end() ? Complex{0.0, 0.0} : it->second;
    }

    bool is_normalized() const { return std::abs(norm2_ - 1.0) <= kNormTol; }

    PhotonicState normalized() const {
        if (empty()) throw std::domain_error("cannot normalize the empty state");
        return scaled(1.0 / std::sqrt(norm2_));
    }

    PhotonicState scaled(Complex factor) const {
        TermMap out;
        for (auto& [basis, amp] : terms_) out.emplace(basis, amp * factor);
        return from_terms(registry_, std::move(out));
    }

    // Same registry, amplitudes within tol of each other.
    bool approx_equal(const PhotonicState& other, double tol = kNormTol) const {
        if (registry_ != other.registry_) return false;
        for (auto& [basis, amp] : terms_) {
            if (std::abs(amp - other.amplitude(basis)) > tol) return false;
        }
        for (auto& [basis, amp] : other.terms_) {
            if (std::abs(amp - amplitude(basis)) > tol) return false;
        }
        return true;
    }

private:
    std::set<ModeId> registry_;
    TermMap terms_;
    double norm2_ = 0.0;
};

// Registry with both polarization modes of each listed spatial label.
inline std::set<ModeId> spatial_registry(const std::vector<std::string>& spatials) {
    std::set<ModeId> reg;
    for (auto& s : spatials) {
        reg.insert(mode_h(s));
        reg.insert(mode_v(s));
    }
    return reg;
}

inline PhotonicState tensor(const PhotonicState& left, const PhotonicState& right,
                            int photon_cap = kDefaultPhotonCap) {
    std::set<ModeId> reg = left.registry();
    for (auto& mode : right.registry()) {
        if (!reg.insert(mode).second) {
            throw std::invalid_argument("tensor: mode registries overlap on " + mode.str());
        }
    }
    PhotonicState::TermMap out;
    for (auto& [lb, la] : left.terms()) {
        for (auto& [rb, ra] : right.terms()) {
            std::map<ModeId, int> occ = lb.occupations();
            for (auto& [mode, n] : rb.occupations()) occ[mode] += n;
            out[FockBasisVector(std::move(occ))] += la * ra;
        }
    }
    return PhotonicState::from_terms(std::move(reg), std::move(out), photon_cap);
}

// Conjugate-linear in the first argument.
inline Complex inner_product(const PhotonicState& a, const PhotonicState& b) {
    if (a.registry() != b.registry()) {
        throw std::invalid_argument("inner_product: mode registries differ");
    }
    Complex acc{0.0, 0.0};
    for (auto& [basis, amp] : a.terms()) acc += std::conj(amp) * b.amplitude(basis);
    return acc;
}

inline double fidelity(const PhotonicState& a, const PhotonicState& b) {
    return std::norm(inner_product(a.normalized(), b.normalized()));
}

// alpha*a + beta*b over a shared registry.
inline PhotonicState superpose(Complex alpha, const PhotonicState& a, Complex beta,
                               const PhotonicState& b) {
    if (a.registry() != b.registry()) {
        throw std::invalid_argument("superpose: mode registries differ");
    }
    PhotonicState::TermMap out;
    for (auto& [basis, amp] : a.terms()) out[basis] += alpha * amp;
    for (auto& [basis, amp] : b.terms()) out[basis] += beta * amp;
    return PhotonicState::from_terms(a.registry(), std::move(out));
}

// Restriction of the state to basis vectors satisfying the predicate.
// Returns the renormalized residue and the surviving probability mass.
// Zero surviving mass yields an empty-state marker with probability 0.
inline std::pair<PhotonicState, double> post_select(
    const PhotonicState& state, const std::function<bool(const FockBasisVector&)>& predicate) {
    if (state.empty()) throw std::domain_error("post_select: empty state");
    PhotonicState::TermMap kept;
    double mass = 0.0;
    for (auto& [basis, amp] : state.terms()) {
        if (predicate(basis)) {
            kept.emplace(basis, amp);
            mass += std::norm(amp);
        }
    }
    double probability = mass / state.norm_squared();
    if (mass <= kAmplitudeEps * kAmplitudeEps) {
        return {PhotonicState::from_terms(state.registry(), {}), 0.0};
    }
    auto survivor = PhotonicState::from_terms(state.registry(), std::move(kept));
    return {survivor.normalized(), probability};
}

}  // namespace lobsa

#endif  // LOBSA_FOCK_HPP
