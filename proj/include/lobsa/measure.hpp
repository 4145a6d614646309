#ifndef LOBSA_MEASURE_HPP
#define LOBSA_MEASURE_HPP

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "lobsa/elements.hpp"
#include "lobsa/states.hpp"

namespace lobsa {

using DetectorId = std::string;

// Numeric-aware detector ordering so D5 sorts before D11.
inline bool detector_less(const DetectorId& a, const DetectorId& b) {
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        bool da = std::isdigit(static_cast<unsigned char>(a[i]));
        bool db = std::isdigit(static_cast<unsigned char>(b[j]));
        if (da && db) {
            std::size_t ia = i, jb = j;
            while (ia < a.size() && std::isdigit(static_cast<unsigned char>(a[ia]))) ++ia;
            while (jb < b.size() && std::isdigit(static_cast<unsigned char>(b[jb]))) ++jb;
            long long na = std::stoll(a.substr(i, ia - i));
            long long nb = std::stoll(b.substr(j, jb - j));
            if (na != nb) return na < nb;
            i = ia;
            j = jb;
        } else {
            if (a[i] != b[j]) return a[i] < b[j];
            ++i;
            ++j;
        }
    }
    return a.size() < b.size();
}

// Set of detectors that fired at least once in one run.
struct CoincidencePattern {
    std::set<DetectorId> fired;

    friend auto operator<=>(const CoincidencePattern&, const CoincidencePattern&) = default;

    // "+"-joined names in numeric-aware order, e.g. "D5+D7+D9+D11".
    std::string str() const {
        std::vector<DetectorId> names(fired.begin(), fired.end());
        std::sort(names.begin(), names.end(), detector_less);
        std::string out;
        for (auto& n : names) {
            if (!out.empty()) out += '+';
            out += n;
        }
        return out;
    }

    std::vector<DetectorId> sorted() const {
        std::vector<DetectorId> names(fired.begin(), fired.end());
        std::sort(names.begin(), names.end(), detector_less);
        return names;
    }
};

inline CoincidencePattern pattern_of(std::initializer_list<DetectorId> ids) {
    return CoincidencePattern{std::set<DetectorId>(ids)};
}

// One measurement outcome: the detectors that fired (with photon counts for
// the number-resolving model), its probability, and the conditional state on
// the unmeasured modes. The residual is empty when nothing remains or when
// threshold merging collapses distinct conditional states.
struct OutcomeBranch {
    CoincidencePattern pattern;
    std::map<DetectorId, int> counts;
    double probability = 0.0;
    PhotonicState residual;
};

enum class DetectorModel { photon_number_resolving, threshold };

// Full outcome enumeration on the listed modes. Branch probabilities sum to 1.
inline std::vector<OutcomeBranch> measure_modes(
    const PhotonicState& state, const std::vector<std::pair<ModeId, DetectorId>>& detectors,
    DetectorModel model = DetectorModel::photon_number_resolving) {
    if (detectors.empty()) throw std::invalid_argument("measure_modes: empty mode list");
    if (state.empty()) throw std::domain_error("measure_modes: empty state");
    std::set<ModeId> measured;
    std::map<ModeId, DetectorId> names;
    for (auto& [mode, id] : detectors) {
        if (!state.registry().count(mode)) {
            throw std::invalid_argument("measure_modes: mode " + mode.str() +
                                        " not in registry");
        }
        measured.insert(mode);
        names.emplace(mode, id);
    }

    std::set<ModeId> remaining;
    for (auto& mode : state.registry()) {
        if (!measured.count(mode)) remaining.insert(mode);
    }

    struct Group {
        double mass = 0.0;
        PhotonicState::TermMap residual_terms;
    };
    std::map<FockBasisVector, Group> groups;
    for (auto& [basis, amp] : state.terms()) {
        auto& g = groups[basis.restricted_to(measured)];
        g.mass += std::norm(amp);
        g.residual_terms[basis.without(measured)] += amp;
    }

    double total = state.norm_squared();
    std::vector<OutcomeBranch> branches;
    for (auto& [outcome, group] : groups) {
        OutcomeBranch b;
        for (auto& [mode, id] : names) {
            int n = outcome.count(mode);
            if (n > 0) {
                b.pattern.fired.insert(id);
                b.counts[id] += n;
            }
        }
        b.probability = group.mass / total;
        auto residual = PhotonicState::from_terms(remaining, std::move(group.residual_terms));
        if (!residual.empty()) b.residual = residual.normalized();
        branches.push_back(std::move(b));
    }

    if (model == DetectorModel::threshold) {
        std::map<CoincidencePattern, OutcomeBranch> merged;
        std::map<CoincidencePattern, int> multiplicity;
        for (auto& b : branches) {
            auto it = merged.find(b.pattern);
            if (it == merged.end()) {
                OutcomeBranch t = b;
                for (auto& [id, n] : t.counts) n = 1;
                merged.emplace(b.pattern, std::move(t));
                multiplicity[b.pattern] = 1;
            } else {
                it->second.probability += b.probability;
                multiplicity[b.pattern] += 1;
            }
        }
        branches.clear();
        for (auto& [pattern, b] : merged) {
            // A merged threshold outcome conditions on a mixture; no pure
            // residual exists in that case.
            if (multiplicity[pattern] > 1) b.residual = PhotonicState();
            branches.push_back(std::move(b));
        }
    }
    return branches;
}

// Disjoint pattern-class -> label lookup.
class ClassificationTable {
public:
    void add_class(const std::string& label, const std::vector<CoincidencePattern>& patterns) {
        for (auto& p : patterns) {
            if (!by_pattern_.emplace(p, label).second) {
                throw std::invalid_argument("classification table: overlapping pattern " +
                                            p.str());
            }
        }
    }

    std::string classify(const CoincidencePattern& pattern) const {
        auto it = by_pattern_.find(pattern);
        return it == by_pattern_.end() ? std::string("unclassified") : it->second;
    }

    const std::map<CoincidencePattern, std::string>& entries() const { return by_pattern_; }

private:
    std::map<CoincidencePattern, std::string> by_pattern_;
};

// Projection of the two-spatial-mode pair (sA, sB) onto a Bell state.
// Returns the renormalized residual on the remaining modes plus the outcome
// probability. Terms whose photon content on the pair does not match the
// Bell support contribute nothing.
inline std::pair<PhotonicState, double> project_bell(const PhotonicState& state,
                                                     const std::string& sA,
                                                     const std::string& sB, BellLabel label) {
    if (state.empty()) throw std::domain_error("project_bell: empty state");
    std::set<ModeId> pair_modes = spatial_registry({sA, sB});
    for (auto& mode : pair_modes) {
        if (!state.registry().count(mode)) {
            throw std::invalid_argument("project_bell: mode " + mode.str() + " not in registry");
        }
    }
    const double r = 1.0 / std::sqrt(2.0);
    double sign = (label == BellLabel::phi_minus || label == BellLabel::psi_minus) ? -r : r;
    FockBasisVector first, second;
    if (label == BellLabel::phi_plus || label == BellLabel::phi_minus) {
        first = photons({mode_h(sA), mode_h(sB)});
        second = photons({mode_v(sA), mode_v(sB)});
    } else {
        first = photons({mode_h(sA), mode_v(sB)});
        second = photons({mode_v(sA), mode_h(sB)});
    }

    std::set<ModeId> remaining;
    for (auto& mode : state.registry()) {
        if (!pair_modes.count(mode)) remaining.insert(mode);
    }
    PhotonicState::TermMap out;
    for (auto& [basis, amp] : state.terms()) {
        auto on_pair = basis.restricted_to(pair_modes);
        if (on_pair == first) {
            out[basis.without(pair_modes)] += amp * r;
        } else if (on_pair == second) {
            out[basis.without(pair_modes)] += amp * sign;
        }
    }
    auto residual = PhotonicState::from_terms(std::move(remaining), std::move(out));
    double probability = residual.norm_squared() / state.norm_squared();
    if (residual.empty()) return {residual, 0.0};
    return {residual.normalized(), probability};
}

enum class QndVariant { one_bell, two_bell };
enum class QndPath { projection, interferometric };

inline std::string qnd_variant_name(QndVariant v) {
    return v == QndVariant::one_bell ? "one_bell" : "two_bell";
}

inline QndVariant parse_qnd_variant(const std::string& s) {
    if (s == "one_bell") return QndVariant::one_bell;
    if (s == "two_bell") return QndVariant::two_bell;
    throw std::invalid_argument("unknown QND variant: " + s);
}

// Result of one teleportation-based QND outcome. On success the teleported
// state contains the output spatial mode in place of the watched one.
struct QndResult {
    bool success = false;
    CoincidencePattern heralds;
    double probability = 0.0;
    PhotonicState teleported;
    std::string bell_outcome;  // "phi+" / "phi-" on success, "" on failure
};

namespace detail {

inline void append_qnd_outcome(std::vector<QndResult>& out, PhotonicState residual,
                               double probability, const std::string& bell,
                               const std::pair<DetectorId, DetectorId>& heralds) {
    if (probability <= kAmplitudeEps) return;
    QndResult r;
    r.success = true;
    r.heralds.fired = {heralds.first, heralds.second};
    r.probability = probability;
    r.teleported = std::move(residual);
    r.bell_outcome = bell;
    out.push_back(std::move(r));
}

}  // namespace detail

// Teleportation-based QND on the watched spatial mode: a fresh phi+ ancilla
// pair is attached, one photon is Bell-measured against the watched mode and
// the other leaves in the output mode. one_bell succeeds on the phi+ outcome
// only (probability 1/4 for a single incoming photon); two_bell also accepts
// phi-, applying the heralded Z correction (1/2 total). Failures are lumped
// into one herald-free branch so probabilities sum to 1.
inline std::vector<QndResult> qnd_teleport(
    const PhotonicState& state, const std::string& watched, const std::string& output,
    QndVariant variant = QndVariant::one_bell, QndPath path = QndPath::projection,
    std::pair<DetectorId, DetectorId> heralds = {"D1", "D2"},
    int photon_cap = kDefaultPhotonCap) {
    if (watched == output) {
        throw std::invalid_argument("qnd_teleport: watched and output labels identical");
    }
    if (!state.registry().count(mode_h(watched))) {
        throw std::invalid_argument("qnd_teleport: watched mode " + watched +
                                    " not in registry");
    }
    if (state.registry().count(mode_h(output))) {
        throw std::invalid_argument("qnd_teleport: output mode " + output +
                                    " already in registry");
    }
    const std::string anc = output + "#anc";
    auto big = tensor(state, make_bell(BellLabel::phi_plus, anc, output), photon_cap);

    std::vector<QndResult> out;
    if (path == QndPath::projection) {
        auto [plus, p_plus] = project_bell(big, watched, anc, BellLabel::phi_plus);
        detail::append_qnd_outcome(out, std::move(plus), p_plus, "phi+", heralds);
        if (variant == QndVariant::two_bell) {
            auto [minus, p_minus] = project_bell(big, watched, anc, BellLabel::phi_minus);
            if (p_minus > kAmplitudeEps) {
                minus = apply_map(minus, polarization_phase(output, {1, 0}, {-1, 0}));
            }
            detail::append_qnd_outcome(out, std::move(minus), p_minus, "phi-", heralds);
        }
    } else {
        // Cross-check path: PBS interference of the watched photon with the
        // ancilla, then diagonal-basis detection on both PBS outputs. Equal
        // diagonal outcomes herald phi+, opposite ones phi-.
        const std::string x = watched + "#x", y = watched + "#y";
        auto mixed = apply_map(big, pbs(watched, anc, x, y), photon_cap);
        mixed = apply_map(mixed, hadamard_hwp(x), photon_cap);
        mixed = apply_map(mixed, hadamard_hwp(y), photon_cap);
        std::map<std::string, std::pair<PhotonicState, double>> outcomes;
        for (auto px : {Pol::H, Pol::V}) {
            for (auto py : {Pol::H, Pol::V}) {
                auto [residual, p] = post_select(mixed, [&](const FockBasisVector& b) {
                    return b.count(ModeId{x, px}) == 1 && b.count(ModeId{y, py}) == 1 &&
                           b.count(ModeId{x, px == Pol::H ? Pol::V : Pol::H}) == 0 &&
                           b.count(ModeId{y, py == Pol::H ? Pol::V : Pol::H}) == 0;
                });
                if (p <= kAmplitudeEps) continue;
                // Strip the (now empty) interferometer modes from the registry.
                std::set<ModeId> keep;
                for (auto& mode : residual.registry()) {
                    if (mode.spatial != x && mode.spatial != y) keep.insert(mode);
                }
                PhotonicState::TermMap stripped;
                for (auto& [basis, amp] : residual.terms()) {
                    stripped[basis.without(spatial_registry({x, y}))] += amp;
                }
                auto cleaned = PhotonicState::from_terms(keep, std::move(stripped));
                std::string key = (px == py) ? "phi+" : "phi-";
                auto it = outcomes.find(key);
                if (it == outcomes.end()) {
                    outcomes.emplace(key, std::make_pair(cleaned, p));
                } else {
                    // Same-herald outcomes teleport the same state; weights add.
                    it->second.second += p;
                }
            }
        }
        if (auto it = outcomes.find("phi+"); it != outcomes.end()) {
            detail::append_qnd_outcome(out, it->second.first, it->second.second, "phi+",
                                       heralds);
        }
        if (variant == QndVariant::two_bell) {
            if (auto it = outcomes.find("phi-"); it != outcomes.end()) {
                auto corrected =
                    apply_map(it->second.first, polarization_phase(output, {1, 0}, {-1, 0}));
                detail::append_qnd_outcome(out, std::move(corrected), it->second.second,
                                           "phi-", heralds);
            }
        }
    }

    double success_mass = 0.0;
    for (auto& r : out) success_mass += r.probability;
    QndResult failure;
    failure.success = false;
    failure.probability = std::max(0.0, 1.0 - success_mass);
    out.push_back(std::move(failure));
    return out;
}

}  // namespace lobsa

#endif  // LOBSA_MEASURE_HPP
