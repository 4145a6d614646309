#ifndef LOBSA_PROTOCOLS_HPP
#define LOBSA_PROTOCOLS_HPP

#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "lobsa/measure.hpp"

namespace lobsa {

struct StageProbability {
    std::string stage;
    double probability = 0.0;
};

struct ClassifiedBranch {
    CoincidencePattern pattern;
    double conditional_probability = 0.0;
    std::string classified_as;
};

// Structural counts from the circuit actually built, with the paper's
// printed counts alongside (the two agree only when M = N).
struct ResourceCount {
    int ancilla_sources = 0;
    int qnd_count = 0;
    int detector_count = 0;
    int detected_photons = 0;
    int paper_sources = 0;
    int paper_detectors = 0;
};

inline ResourceCount resource_count(int N, int M) {
    if (N < 2 || M < 2) throw std::invalid_argument("resource_count: need N >= 2 and M >= 2");
    ResourceCount rc;
    rc.qnd_count = M * (N - 1);
    rc.ancilla_sources = rc.qnd_count;
    rc.detected_photons = M * N + 2 * rc.qnd_count;
    rc.detector_count = 2 * M * N + 2 * rc.qnd_count;
    rc.paper_sources = (M - 1) * N;
    rc.paper_detectors = (2 * (M - 1) + M) * N;
    return rc;
}

// One optical element as placed by a protocol builder; serialized into the
// circuit JSON for inspection and replay.
struct ElementDesc {
    std::string type;
    std::vector<std::pair<std::string, std::string>> attrs;
};

struct ProtocolOptions {
    QndVariant qnd = QndVariant::one_bell;
    QndPath qnd_path = QndPath::projection;
    BsConvention bs = BsConvention::hadamard;
    int photon_cap = kDefaultPhotonCap;
};

struct ProtocolReport {
    std::string protocol;  // "logic-bsa" or "cghz"
    std::string input_label;
    int N = 2;
    int M = 2;
    QndVariant qnd = QndVariant::one_bell;
    bool rejected = false;
    std::string status = "ok";
    std::vector<StageProbability> ledger;
    double success_probability = 0.0;
    PhotonicState collapsed;  // post-selection residual, before the QNDs
    std::vector<ClassifiedBranch> branches;
    // cghz only: marginal pattern tables per position group, detector names
    // without the group prefix.
    std::vector<std::vector<ClassifiedBranch>> group_branches;
    CoincidencePattern qnd_heralds;
    ResourceCount resources;
    std::vector<ElementDesc> elements;

    std::map<CoincidencePattern, std::string> classification() const {
        std::map<CoincidencePattern, std::string> out;
        for (auto& b : branches) out.emplace(b.pattern, b.classified_as);
        return out;
    }
};

namespace detail {

inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline void record(std::vector<ElementDesc>& elements, std::string type,
                   std::initializer_list<std::pair<std::string, std::string>> attrs) {
    ElementDesc e;
    e.type = std::move(type);
    e.attrs.assign(attrs);
    elements.push_back(std::move(e));
}

inline double ledger_product(const std::vector<StageProbability>& ledger) {
    double p = 1.0;
    for (auto& s : ledger) p *= s.probability;
    return p;
}

// Cartesian product of per-unit pattern choices.
inline std::vector<CoincidencePattern> product_patterns(
    const std::vector<std::vector<CoincidencePattern>>& per_unit) {
    std::vector<CoincidencePattern> acc{CoincidencePattern{}};
    for (auto& choices : per_unit) {
        std::vector<CoincidencePattern> next;
        for (auto& base : acc) {
            for (auto& extra : choices) {
                CoincidencePattern p = base;
                p.fired.insert(extra.fired.begin(), extra.fired.end());
                next.push_back(std::move(p));
            }
        }
        acc = std::move(next);
    }
    return acc;
}

}  // namespace detail

// Polarization Bell-state analyzer on a two-photon pair: PBS, then a
// Hadamard HWP on each output, then polarization detection. Detectors are
// D{base}..D{base+3} in H-port/V-port order per spatial output. phi+ gives
// even V-detector counts, phi- odd; bunched inputs come back unclassified.
inline std::vector<ClassifiedBranch> run_pbsa(const PhotonicState& pair, const std::string& sA,
                                              const std::string& sB, int base = 1) {
    const std::string gA = sA + "'", gB = sB + "'";
    auto st = apply_map(pair, pbs(sA, sB, gA, gB));
    st = apply_map(st, hadamard_hwp(gA));
    st = apply_map(st, hadamard_hwp(gB));
    auto name = [&](int offset) { return "D" + std::to_string(base + offset); };
    std::vector<std::pair<ModeId, DetectorId>> detectors = {
        {mode_h(gA), name(0)}, {mode_v(gA), name(1)}, {mode_h(gB), name(2)}, {mode_v(gB), name(3)}};
    std::vector<ClassifiedBranch> out;
    for (auto& b : measure_modes(st, detectors)) {
        ClassifiedBranch cb{b.pattern, b.probability, "unclassified"};
        bool one_per_arm = b.pattern.fired.size() == 2 &&
                           (b.counts.count(name(0)) + b.counts.count(name(1)) == 1) &&
                           (b.counts.count(name(2)) + b.counts.count(name(3)) == 1);
        bool single_counts = true;
        for (auto& [id, n] : b.counts) single_counts = single_counts && n == 1;
        if (one_per_arm && single_counts) {
            int v_count = static_cast<int>(b.counts.count(name(1))) +
                          static_cast<int>(b.counts.count(name(3)));
            cb.classified_as = (v_count % 2 == 0) ? "phi+" : "phi-";
        }
        out.push_back(std::move(cb));
    }
    return out;
}

// Polarization GHZ-state analyzer on N single photons: a Hadamard HWP per
// photon, then polarization detection. Even V-parity patterns mean GHZ_N^+,
// odd mean GHZ_N^-. Detectors are D{base+2i-2} (H) and D{base+2i-1} (V) for
// the i-th spatial mode.
inline std::vector<ClassifiedBranch> run_pgsa(const PhotonicState& group,
                                              const std::vector<std::string>& spatials,
                                              int base = 1) {
    if (spatials.size() < 2) throw std::invalid_argument("run_pgsa: need at least 2 photons");
    auto st = group;
    std::vector<std::pair<ModeId, DetectorId>> detectors;
    for (std::size_t i = 0; i < spatials.size(); ++i) {
        st = apply_map(st, hadamard_hwp(spatials[i]));
        detectors.emplace_back(mode_h(spatials[i]), "D" + std::to_string(base + 2 * i));
        detectors.emplace_back(mode_v(spatials[i]), "D" + std::to_string(base + 2 * i + 1));
    }
    const int n = static_cast<int>(spatials.size());
    std::string plus = "GHZ" + std::to_string(n) + "+";
    std::string minus = "GHZ" + std::to_string(n) + "-";
    std::vector<ClassifiedBranch> out;
    for (auto& b : measure_modes(st, detectors)) {
        ClassifiedBranch cb{b.pattern, b.probability, "unclassified"};
        bool single_counts = b.pattern.fired.size() == spatials.size();
        int v_count = 0;
        for (auto& [id, cnt] : b.counts) {
            single_counts = single_counts && cnt == 1;
            int idx = std::stoi(id.substr(1)) - base;
            if (idx % 2 == 1) ++v_count;
        }
        if (single_counts) cb.classified_as = (v_count % 2 == 0) ? plus : minus;
        out.push_back(std::move(cb));
    }
    return out;
}

// Logic Bell-state analysis (Fig. 1 layout, generalized to M photons per
// logic qubit): Hadamard HWPs on all 2M photons, one PBS per photon pair
// (a_j, b_j) with post-selection on singly occupied outputs, a QND on each
// c-arm, then a P-BSA per teleported pair. Detector labels: D1/D2 heralds of
// the first QND, D3/D4 of the second, and so on; the P-BSA of pair j uses
// D{4j+1}..D{4j+4}.
inline ProtocolReport run_logic_bsa(const PhotonicState& input, int M,
                                    const ProtocolOptions& opts = {},
                                    const std::string& input_label = "") {
    if (M < 2) throw std::invalid_argument("run_logic_bsa: need M >= 2");
    if (input.registry() != cghz_registry(2, M)) {
        throw std::invalid_argument("run_logic_bsa: input registry is not the canonical "
                                    "a1..aM, b1..bM layout");
    }
    ProtocolReport report;
    report.protocol = "logic-bsa";
    report.input_label = input_label;
    report.N = 2;
    report.M = M;
    report.qnd = opts.qnd;
    report.resources = resource_count(2, M);

    auto state = input;
    for (int q = 1; q <= 2; ++q) {
        for (int j = 1; j <= M; ++j) {
            auto s = logic_spatial(q, j);
            state = apply_map(state, hwp(s, kHadamardHwpAngle), opts.photon_cap);
            detail::record(report.elements, "hwp",
                           {{"spatial", s}, {"angle", detail::fmt_double(kHadamardHwpAngle)}});
        }
    }
    std::vector<std::string> c(M + 1), d(M + 1), e(M + 1);
    for (int j = 1; j <= M; ++j) {
        c[j] = "c" + std::to_string(j);
        d[j] = "d" + std::to_string(j);
        e[j] = "e" + std::to_string(j);
        state = apply_map(state, pbs(logic_spatial(1, j), logic_spatial(2, j), c[j], d[j]),
                          opts.photon_cap);
        detail::record(report.elements, "pbs",
                       {{"in1", logic_spatial(1, j)},
                        {"in2", logic_spatial(2, j)},
                        {"out1", c[j]},
                        {"out2", d[j]}});
    }

    auto [collapsed, p_select] = post_select(state, [&](const FockBasisVector& b) {
        for (int j = 1; j <= M; ++j) {
            if (b.spatial_count(c[j]) != 1 || b.spatial_count(d[j]) != 1) return false;
        }
        return true;
    });
    report.ledger.push_back({"pbs-post-selection", p_select});
    report.collapsed = collapsed;
    if (p_select <= 1e-12) {
        report.rejected = true;
        report.status = "rejected by construction";
        report.success_probability = 0.0;
        return report;
    }

    auto st = collapsed;
    for (int j = 1; j <= M; ++j) {
        std::pair<DetectorId, DetectorId> heralds{"D" + std::to_string(2 * j - 1),
                                                  "D" + std::to_string(2 * j)};
        auto outcomes =
            qnd_teleport(st, c[j], e[j], opts.qnd, opts.qnd_path, heralds, opts.photon_cap);
        double p_qnd = 0.0;
        PhotonicState next;
        for (auto& r : outcomes) {
            if (!r.success) continue;
            p_qnd += r.probability;
            if (next.empty()) next = r.teleported;
        }
        report.ledger.push_back({"qnd-" + std::to_string(j), p_qnd});
        detail::record(report.elements, "qnd",
                       {{"watched", c[j]},
                        {"output", e[j]},
                        {"variant", qnd_variant_name(opts.qnd)},
                        {"heralds", heralds.first + "+" + heralds.second}});
        if (p_qnd <= 1e-12) {
            report.rejected = true;
            report.status = "rejected by construction";
            report.success_probability = 0.0;
            return report;
        }
        report.qnd_heralds.fired.insert(heralds.first);
        report.qnd_heralds.fired.insert(heralds.second);
        st = next;
    }

    // P-BSA per teleported pair (e_j, d_j).
    std::vector<std::pair<ModeId, DetectorId>> detectors;
    std::vector<std::vector<CoincidencePattern>> even_choices, odd_choices;
    for (int j = 1; j <= M; ++j) {
        const std::string g = "g" + std::to_string(j), h = "h" + std::to_string(j);
        st = apply_map(st, pbs(e[j], d[j], g, h), opts.photon_cap);
        st = apply_map(st, hadamard_hwp(g), opts.photon_cap);
        st = apply_map(st, hadamard_hwp(h), opts.photon_cap);
        detail::record(report.elements, "pbs",
                       {{"in1", e[j]}, {"in2", d[j]}, {"out1", g}, {"out2", h}});
        detail::record(report.elements, "hwp",
                       {{"spatial", g}, {"angle", detail::fmt_double(kHadamardHwpAngle)}});
        detail::record(report.elements, "hwp",
                       {{"spatial", h}, {"angle", detail::fmt_double(kHadamardHwpAngle)}});
        const int base = 4 * j;  // D{4j+1}..D{4j+4}
        auto name = [&](int offset) { return "D" + std::to_string(base + 1 + offset); };
        detectors.emplace_back(mode_h(g), name(0));
        detectors.emplace_back(mode_v(g), name(1));
        detectors.emplace_back(mode_h(h), name(2));
        detectors.emplace_back(mode_v(h), name(3));
        for (int off = 0; off < 4; ++off) {
            detail::record(report.elements, "detector",
                           {{"mode", (off < 2 ? g : h) + ":" + (off % 2 == 0 ? "H" : "V")},
                            {"name", name(off)}});
        }
        even_choices.push_back({pattern_of({name(0), name(2)}), pattern_of({name(1), name(3)})});
        odd_choices.push_back({pattern_of({name(0), name(3)}), pattern_of({name(1), name(2)})});
    }

    ClassificationTable table;
    table.add_class("Phi+", detail::product_patterns(even_choices));
    table.add_class("Phi-", detail::product_patterns(odd_choices));

    for (auto& b : measure_modes(st, detectors)) {
        report.branches.push_back({b.pattern, b.probability, table.classify(b.pattern)});
    }
    report.success_probability = detail::ledger_product(report.ledger);
    return report;
}

// C-GHZ state analysis (Figs. 2-3 layout): Hadamard HWPs on all NM photons;
// per position group j a chain of N-1 PBSs over the j-th photons of every
// logic qubit, post-selection on singly occupied chain outputs, one QND per
// PBS, then a P-GSA per group. Group j's P-GSA detectors are G{j}.D1..D2N.
inline ProtocolReport run_cghz_analysis(const PhotonicState& input, int N, int M,
                                        const ProtocolOptions& opts = {},
                                        const std::string& input_label = "") {
    if (N < 2 || M < 2) {
        throw std::invalid_argument("run_cghz_analysis: need N >= 2 and M >= 2");
    }
    if (input.registry() != cghz_registry(N, M)) {
        throw std::invalid_argument("run_cghz_analysis: input registry is not the canonical "
                                    "N x M layout");
    }
    ProtocolReport report;
    report.protocol = "cghz";
    report.input_label = input_label;
    report.N = N;
    report.M = M;
    report.qnd = opts.qnd;
    report.resources = resource_count(N, M);

    auto state = input;
    for (int i = 1; i <= N; ++i) {
        for (int j = 1; j <= M; ++j) {
            auto s = logic_spatial(i, j);
            state = apply_map(state, hwp(s, kHadamardHwpAngle), opts.photon_cap);
            detail::record(report.elements, "hwp",
                           {{"spatial", s}, {"angle", detail::fmt_double(kHadamardHwpAngle)}});
        }
    }

    // PBS chain per position group; outputs O{j}.1..O{j}.N-1 plus the final
    // carry T{j}.N-1.
    std::vector<std::vector<std::string>> outputs(M + 1);
    for (int j = 1; j <= M; ++j) {
        std::string carry = logic_spatial(1, j);
        for (int i = 2; i <= N; ++i) {
            std::string o = "O" + std::to_string(j) + "." + std::to_string(i - 1);
            std::string t = "T" + std::to_string(j) + "." + std::to_string(i - 1);
            state = apply_map(state, pbs(carry, logic_spatial(i, j), o, t), opts.photon_cap);
            detail::record(report.elements, "pbs",
                           {{"in1", carry}, {"in2", logic_spatial(i, j)}, {"out1", o},
                            {"out2", t}});
            outputs[j].push_back(o);
            carry = t;
        }
        outputs[j].push_back(carry);
    }

    auto [collapsed, p_select] = post_select(state, [&](const FockBasisVector& b) {
        for (int j = 1; j <= M; ++j) {
            for (auto& s : outputs[j]) {
                if (b.spatial_count(s) != 1) return false;
            }
        }
        return true;
    });
    report.ledger.push_back({"pbs-post-selection", p_select});
    report.collapsed = collapsed;
    if (p_select <= 1e-12) {
        report.rejected = true;
        report.status = "rejected by construction";
        report.success_probability = 0.0;
        return report;
    }

    auto st = collapsed;
    std::vector<std::vector<std::string>> analyzed(M + 1);
    for (int j = 1; j <= M; ++j) {
        for (int i = 1; i < N; ++i) {
            std::string watched = outputs[j][i - 1];
            std::string out = "E" + std::to_string(j) + "." + std::to_string(i);
            std::string tag = "Q" + std::to_string(j) + "." + std::to_string(i);
            std::pair<DetectorId, DetectorId> heralds{tag + "a", tag + "b"};
            auto outcomes =
                qnd_teleport(st, watched, out, opts.qnd, opts.qnd_path, heralds, opts.photon_cap);
            double p_qnd = 0.0;
            PhotonicState next;
            for (auto& r : outcomes) {
                if (!r.success) continue;
                p_qnd += r.probability;
                if (next.empty()) next = r.teleported;
            }
            report.ledger.push_back(
                {"qnd-" + std::to_string(j) + "." + std::to_string(i), p_qnd});
            detail::record(report.elements, "qnd",
                           {{"watched", watched},
                            {"output", out},
                            {"variant", qnd_variant_name(opts.qnd)},
                            {"heralds", heralds.first + "+" + heralds.second}});
            if (p_qnd <= 1e-12) {
                report.rejected = true;
                report.status = "rejected by construction";
                report.success_probability = 0.0;
                return report;
            }
            report.qnd_heralds.fired.insert(heralds.first);
            report.qnd_heralds.fired.insert(heralds.second);
            st = next;
            analyzed[j].push_back(out);
        }
        analyzed[j].push_back(outputs[j][N - 1]);  // final carry, no QND needed
    }

    // P-GSA per group, measured jointly with group-prefixed detector names.
    std::vector<std::pair<ModeId, DetectorId>> detectors;
    for (int j = 1; j <= M; ++j) {
        const std::string prefix = "G" + std::to_string(j) + ".";
        for (int i = 0; i < N; ++i) {
            const std::string& s = analyzed[j][static_cast<std::size_t>(i)];
            st = apply_map(st, hadamard_hwp(s), opts.photon_cap);
            detail::record(report.elements, "hwp",
                           {{"spatial", s}, {"angle", detail::fmt_double(kHadamardHwpAngle)}});
            detectors.emplace_back(mode_h(s), prefix + "D" + std::to_string(2 * i + 1));
            detectors.emplace_back(mode_v(s), prefix + "D" + std::to_string(2 * i + 2));
            detail::record(report.elements, "detector",
                           {{"mode", s + ":H"}, {"name", prefix + "D" + std::to_string(2 * i + 1)}});
            detail::record(report.elements, "detector",
                           {{"mode", s + ":V"}, {"name", prefix + "D" + std::to_string(2 * i + 2)}});
        }
    }

    const std::string ghz_plus = "GHZ" + std::to_string(N) + "+";
    const std::string ghz_minus = "GHZ" + std::to_string(N) + "-";
    std::vector<std::map<CoincidencePattern, double>> marginals(M + 1);
    for (auto& b : measure_modes(st, detectors)) {
        bool valid = true;
        int plus_groups = 0, minus_groups = 0;
        for (int j = 1; j <= M; ++j) {
            const std::string prefix = "G" + std::to_string(j) + ".";
            CoincidencePattern local;
            int v_count = 0, total = 0;
            for (auto& [id, cnt] : b.counts) {
                if (id.rfind(prefix, 0) != 0) continue;
                std::string name = id.substr(prefix.size());
                local.fired.insert(name);
                total += cnt;
                if (cnt != 1) valid = false;
                if (std::stoi(name.substr(1)) % 2 == 0) v_count += cnt;
            }
            if (static_cast<int>(local.fired.size()) != N || total != N) valid = false;
            if (valid) (v_count % 2 == 0 ? plus_groups : minus_groups) += 1;
            marginals[j][local] += b.probability;
        }
        std::string label = "unclassified";
        if (valid && plus_groups == M) label = "Phi1+";
        if (valid && minus_groups == M) label = "Phi1-";
        report.branches.push_back({b.pattern, b.probability, label});
    }
    for (int j = 1; j <= M; ++j) {
        std::vector<ClassifiedBranch> rows;
        for (auto& [pattern, prob] : marginals[j]) {
            std::string label = "unclassified";
            if (static_cast<int>(pattern.fired.size()) == N) {
                int v_count = 0;
                for (auto& id : pattern.fired) {
                    if (std::stoi(id.substr(1)) % 2 == 0) ++v_count;
                }
                label = (v_count % 2 == 0) ? ghz_plus : ghz_minus;
            }
            rows.push_back({pattern, prob, label});
        }
        report.group_branches.push_back(std::move(rows));
    }
    report.success_probability = detail::ledger_product(report.ledger);
    return report;
}

}  // namespace lobsa

#endif  // LOBSA_PROTOCOLS_HPP
