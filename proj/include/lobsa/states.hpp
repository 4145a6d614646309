#ifndef LOBSA_STATES_HPP
#define LOBSA_STATES_HPP

#include <string>
#include <vector>

#include "lobsa/fock.hpp"

namespace lobsa {

// Bell-state families. The same four labels name the polarized Bell states
// (phi/psi, lowercase in reports) and the logic Bell states (Phi/Psi).
enum class BellLabel { phi_plus, phi_minus, psi_plus, psi_minus };

inline std::string bell_name(BellLabel label, bool logic = false) {
    switch (label) {
        case BellLabel::phi_plus: return logic ? "Phi+" : "phi+";
        case BellLabel::phi_minus: return logic ? "Phi-" : "phi-";
        case BellLabel::psi_plus: return logic ? "Psi+" : "psi+";
        case BellLabel::psi_minus: return logic ? "Psi-" : "psi-";
    }
    throw std::logic_error("bell_name: bad label");
}

inline BellLabel parse_bell_label(const std::string& raw) {
    if (raw == "φ+" || raw == "Φ+" || raw == "ϕ+") return BellLabel::phi_plus;
    if (raw == "φ-" || raw == "Φ-" || raw == "ϕ-") return BellLabel::phi_minus;
    if (raw == "ψ+" || raw == "Ψ+") return BellLabel::psi_plus;
    if (raw == "ψ-" || raw == "Ψ-") return BellLabel::psi_minus;
    std::string s = raw;
    for (auto& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    if (s == "phi+") return BellLabel::phi_plus;
    if (s == "phi-") return BellLabel::phi_minus;
    if (s == "psi+") return BellLabel::psi_plus;
    if (s == "psi-") return BellLabel::psi_minus;
    throw std::invalid_argument("unknown Bell-state label: " + raw);
}

// Single photon of the given polarization.
inline PhotonicState single_photon(const std::string& spatial, Pol pol) {
    return PhotonicState::from_terms(spatial_registry({spatial}),
                                     {{photons({ModeId{spatial, pol}}), Complex{1, 0}}});
}

inline PhotonicState polarization_qubit(const std::string& spatial, Complex alpha,
                                        Complex beta) {
    return PhotonicState::from_terms(
        spatial_registry({spatial}),
        {{photons({mode_h(spatial)}), alpha}, {photons({mode_v(spatial)}), beta}});
}

// Two-photon polarized Bell state on a pair of spatial modes.
inline PhotonicState make_bell(BellLabel label, const std::string& s1, const std::string& s2) {
    const double r = 1.0 / std::sqrt(2.0);
    double sign = (label == BellLabel::phi_minus || label == BellLabel::psi_minus) ? -r : r;
    PhotonicState::TermMap terms;
    if (label == BellLabel::phi_plus || label == BellLabel::phi_minus) {
        terms.emplace(photons({mode_h(s1), mode_h(s2)}), Complex{r, 0});
        terms.emplace(photons({mode_v(s1), mode_v(s2)}), Complex{sign, 0});
    } else {
        terms.emplace(photons({mode_h(s1), mode_v(s2)}), Complex{r, 0});
        terms.emplace(photons({mode_v(s1), mode_h(s2)}), Complex{sign, 0});
    }
    return PhotonicState::from_terms(spatial_registry({s1, s2}), std::move(terms));
}

// M-photon polarized GHZ state (|H...H> + sign |V...V>)/sqrt(2).
inline PhotonicState make_ghz(int sign, const std::vector<std::string>& spatials) {
    if (spatials.size() < 2) throw std::invalid_argument("make_ghz: need M >= 2 photons");
    if (sign != 1 && sign != -1) throw std::invalid_argument("make_ghz: sign must be +1/-1");
    const double r = 1.0 / std::sqrt(2.0);
    std::map<ModeId, int> all_h, all_v;
    for (auto& s : spatials) {
        all_h[mode_h(s)] = 1;
        all_v[mode_v(s)] = 1;
    }
    PhotonicState::TermMap terms;
    terms.emplace(FockBasisVector(std::move(all_h)), Complex{r, 0});
    terms.emplace(FockBasisVector(std::move(all_v)), Complex{sign * r, 0});
    return PhotonicState::from_terms(spatial_registry(spatials), std::move(terms));
}

// Canonical spatial label of photon j (1-based) of logic qubit i (1-based):
// "a1", "a2", ..., "b1", ... Logic qubit letters run a..z.
inline std::string logic_spatial(int qubit, int photon) {
    if (qubit < 1 || qubit > 26 || photon < 1) {
        throw std::invalid_argument("logic_spatial: index out of range");
    }
    return std::string(1, static_cast<char>('a' + qubit - 1)) + std::to_string(photon);
}

inline std::vector<std::string> logic_qubit_spatials(int qubit, int M) {
    std::vector<std::string> out;
    for (int j = 1; j <= M; ++j) out.push_back(logic_spatial(qubit, j));
    return out;
}

// Canonical registry of the (N, M) protocol inputs.
inline std::set<ModeId> cghz_registry(int N, int M) {
    std::vector<std::string> spatials;
    for (int i = 1; i <= N; ++i) {
        for (int j = 1; j <= M; ++j) spatials.push_back(logic_spatial(i, j));
    }
    return spatial_registry(spatials);
}

// C-GHZ state on N logic qubits of M photons each. Index k in 1..2^(N-1)
// selects which logic positions carry the minus-sign GHZ state in the first
// branch: k-1 read as bits over positions 1..N-1, with k=1 the all-plus case.
inline PhotonicState make_cghz(int N, int M, int k, int sign) {
    if (N < 2 || M < 2) throw std::invalid_argument("make_cghz: need N >= 2 and M >= 2");
    if (sign != 1 && sign != -1) throw std::invalid_argument("make_cghz: sign must be +1/-1");
    if (k < 1 || k > (1 << (N - 1))) {
        throw std::invalid_argument("make_cghz: index k out of range 1..2^(N-1)");
    }
    std::vector<bool> minus_first(N + 1, false);
    for (int i = 1; i < N; ++i) minus_first[i] = ((k - 1) >> (i - 1)) & 1;

    const double norm = std::pow(0.5, (N + 1) / 2.0);
    PhotonicState::TermMap terms;
    for (int branch = 0; branch < 2; ++branch) {
        double branch_sign = branch == 0 ? 1.0 : static_cast<double>(sign);
        // Each logic qubit contributes H^M or V^M with the GHZ sign on V.
        for (int assignment = 0; assignment < (1 << N); ++assignment) {
            double amp = norm * branch_sign;
            std::map<ModeId, int> occ;
            for (int i = 1; i <= N; ++i) {
                bool vertical = (assignment >> (i - 1)) & 1;
                bool ghz_minus = minus_first[i] != (branch == 1);
                if (vertical && ghz_minus) amp = -amp;
                for (int j = 1; j <= M; ++j) {
                    occ[ModeId{logic_spatial(i, j), vertical ? Pol::V : Pol::H}] = 1;
                }
            }
            terms[FockBasisVector(std::move(occ))] += Complex{amp, 0};
        }
    }
    return PhotonicState::from_terms(cghz_registry(N, M), std::move(terms));
}

// Logic Bell state on logic qubits A (a1..aM) and B (b1..bM), each an
// M-photon GHZ state.
inline PhotonicState make_logic_bell(BellLabel label, int M) {
    if (M < 2) throw std::invalid_argument("make_logic_bell: need M >= 2");
    switch (label) {
        case BellLabel::phi_plus: return make_cghz(2, M, 1, +1);
        case BellLabel::phi_minus: return make_cghz(2, M, 1, -1);
        default: break;
    }
    // Psi family: (G+ G- +/- G- G+)/sqrt(2).
    int sign = label == BellLabel::psi_plus ? +1 : -1;
    auto a_plus = make_ghz(+1, logic_qubit_spatials(1, M));
    auto a_minus = make_ghz(-1, logic_qubit_spatials(1, M));
    auto b_plus = make_ghz(+1, logic_qubit_spatials(2, M));
    auto b_minus = make_ghz(-1, logic_qubit_spatials(2, M));
    const double r = 1.0 / std::sqrt(2.0);
    return superpose(Complex{r, 0}, tensor(a_plus, b_minus), Complex{sign * r, 0},
                     tensor(a_minus, b_plus));
}

}  // namespace lobsa

#endif  // LOBSA_STATES_HPP
