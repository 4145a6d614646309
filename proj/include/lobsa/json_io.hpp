#ifndef LOBSA_JSON_IO_HPP
#define LOBSA_JSON_IO_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include "lobsa/protocols.hpp"
#include "lobsa/states.hpp"

namespace lobsa {

using nlohmann::json;

// State schema: { "modes": [...], "terms": [{ "occ": {mode: count},
// "re": x, "im": y }] }, modes and terms in canonical order.
inline json state_to_json(const PhotonicState& state) {
    json modes = json::array();
    for (auto& mode : state.registry()) modes.push_back(mode.str());
    json terms = json::array();
    for (auto& [basis, amp] : state.terms()) {
        json occ = json::object();
        for (auto& [mode, n] : basis.occupations()) occ[mode.str()] = n;
        terms.push_back({{"occ", std::move(occ)}, {"re", amp.real()}, {"im", amp.imag()}});
    }
    return {{"modes", std::move(modes)}, {"terms", std::move(terms)}};
}

inline PhotonicState state_from_json(const json& j) {
    std::set<ModeId> registry;
    for (auto& m : j.at("modes")) registry.insert(ModeId::parse(m.get<std::string>()));
    PhotonicState::TermMap terms;
    for (auto& t : j.at("terms")) {
        std::map<ModeId, int> occ;
        for (auto& [key, value] : t.at("occ").items()) {
            occ[ModeId::parse(key)] = value.get<int>();
        }
        terms[FockBasisVector(std::move(occ))] +=
            Complex{t.at("re").get<double>(), t.at("im").get<double>()};
    }
    return PhotonicState::from_terms(std::move(registry), std::move(terms));
}

inline json pattern_to_json(const CoincidencePattern& pattern) {
    json arr = json::array();
    for (auto& id : pattern.sorted()) arr.push_back(id);
    return arr;
}

inline json elements_to_json(const std::vector<ElementDesc>& elements) {
    json arr = json::array();
    for (auto& e : elements) {
        json obj = {{"type", e.type}};
        for (auto& [key, value] : e.attrs) obj[key] = value;
        arr.push_back(std::move(obj));
    }
    return arr;
}

// Circuit schema: { "protocol": "logic-bsa"|"cghz", "N": int, "M": int,
// "qnd": "one_bell"|"two_bell", "inputs": [...], "elements": [...] }.
inline json circuit_to_json(const ProtocolReport& report,
                            const std::vector<std::string>& inputs) {
    return {{"protocol", report.protocol},
            {"N", report.N},
            {"M", report.M},
            {"qnd", qnd_variant_name(report.qnd)},
            {"inputs", inputs},
            {"elements", elements_to_json(report.elements)}};
}

inline json report_to_json(const ProtocolReport& r) {
    json ledger = json::array();
    for (auto& s : r.ledger) ledger.push_back({{"stage", s.stage}, {"probability", s.probability}});
    json branches = json::array();
    for (auto& b : r.branches) {
        branches.push_back({{"pattern", b.pattern.str()},
                            {"detectors", pattern_to_json(b.pattern)},
                            {"conditional_probability", b.conditional_probability},
                            {"classified_as", b.classified_as}});
    }
    json out = {{"protocol", r.protocol},
                {"input", r.input_label},
                {"N", r.N},
                {"M", r.M},
                {"qnd", qnd_variant_name(r.qnd)},
                {"status", r.status},
                {"ledger", std::move(ledger)},
                {"success_probability", r.success_probability},
                {"branches", std::move(branches)},
                {"qnd_heralds", r.qnd_heralds.str()},
                {"resources",
                 {{"ancilla_sources", r.resources.ancilla_sources},
                  {"qnd_count", r.resources.qnd_count},
                  {"detector_count", r.resources.detector_count},
                  {"detected_photons", r.resources.detected_photons},
                  {"paper_sources", r.resources.paper_sources},
                  {"paper_detectors", r.resources.paper_detectors}}}};
    if (!r.group_branches.empty()) {
        json groups = json::array();
        for (std::size_t g = 0; g < r.group_branches.size(); ++g) {
            json rows = json::array();
            for (auto& b : r.group_branches[g]) {
                rows.push_back({{"pattern", b.pattern.str()},
                                {"probability", b.conditional_probability},
                                {"classified_as", b.classified_as}});
            }
            groups.push_back({{"group", g + 1}, {"patterns", std::move(rows)}});
        }
        out["group_tables"] = std::move(groups);
    }
    if (!r.collapsed.empty()) out["collapsed_state"] = state_to_json(r.collapsed);
    return out;
}

// Replays a circuit JSON: rebuilds the protocol runs it describes and
// returns one report per listed input label.
inline std::vector<ProtocolReport> replay_circuit(const json& circuit) {
    const std::string protocol = circuit.at("protocol").get<std::string>();
    const int N = circuit.at("N").get<int>();
    const int M = circuit.at("M").get<int>();
    ProtocolOptions opts;
    opts.qnd = parse_qnd_variant(circuit.at("qnd").get<std::string>());
    std::vector<ProtocolReport> reports;
    for (auto& entry : circuit.at("inputs")) {
        const std::string label = entry.get<std::string>();
        if (protocol == "logic-bsa") {
            auto input = make_logic_bell(parse_bell_label(label), M);
            reports.push_back(run_logic_bsa(input, M, opts, label));
        } else if (protocol == "cghz") {
            // Labels of the form "Phi<k><sign>", e.g. "Phi1+".
            if (label.size() < 5 || label.rfind("Phi", 0) != 0) {
                throw std::invalid_argument("replay: bad cghz input label " + label);
            }
            int sign = label.back() == '+' ? +1 : -1;
            int k = std::stoi(label.substr(3, label.size() - 4));
            auto input = make_cghz(N, M, k, sign);
            reports.push_back(run_cghz_analysis(input, N, M, opts, label));
        } else {
            throw std::invalid_argument("replay: unknown protocol " + protocol);
        }
    }
    return reports;
}

}  // namespace lobsa

#endif  // LOBSA_JSON_IO_HPP
