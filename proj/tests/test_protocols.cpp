#include <catch2/catch_amalgamated.hpp>

#include "lobsa/protocols.hpp"
#include "test_helpers.hpp"

using namespace lobsa;
using Catch::Matchers::WithinAbs;

namespace {

std::map<std::string, double> branch_probabilities(const std::vector<ClassifiedBranch>& bs) {
    std::map<std::string, double> out;
    for (auto& b : bs) {
        if (b.conditional_probability > 1e-12) out[b.pattern.str()] += b.conditional_probability;
    }
    return out;
}

// Collapse oracle for the M-pair layout: sum over polarization words w of the
// given parity, each photon pair (c_j, d_j) carrying identical polarization
// w_j; the odd-parity block takes the input's sign.
PhotonicState pair_collapse_oracle(int M, int sign) {
    std::vector<std::string> spatials;
    for (int j = 1; j <= M; ++j) {
        spatials.push_back("c" + std::to_string(j));
        spatials.push_back("d" + std::to_string(j));
    }
    PhotonicState::TermMap terms;
    const double amp = std::pow(0.5, (M + 1) / 2.0);
    for (int w = 0; w < (1 << M); ++w) {
        int v_parity = 0;
        std::map<ModeId, int> occ;
        for (int j = 1; j <= M; ++j) {
            bool vertical = (w >> (j - 1)) & 1;
            v_parity ^= vertical ? 1 : 0;
            Pol p = vertical ? Pol::V : Pol::H;
            occ[ModeId{"c" + std::to_string(j), p}] = 1;
            occ[ModeId{"d" + std::to_string(j), p}] = 1;
        }
        double a = amp * (v_parity == 0 ? 1.0 : sign);
        terms[FockBasisVector(std::move(occ))] += Complex{a, 0};
    }
    return PhotonicState::from_terms(spatial_registry(spatials), std::move(terms));
}

}  // namespace

TEST_CASE("logic-bsa: Phi+ detector pattern table at M = 2") {
    auto report = run_logic_bsa(make_logic_bell(BellLabel::phi_plus, 2), 2);
    REQUIRE_FALSE(report.rejected);
    auto probs = branch_probabilities(report.branches);
    REQUIRE(probs.size() == 4);
    for (auto& key : {"D5+D7+D9+D11", "D5+D7+D10+D12", "D6+D8+D9+D11", "D6+D8+D10+D12"}) {
        REQUIRE_THAT(probs.at(key), WithinAbs(0.25, 1e-10));
    }
    for (auto& b : report.branches) {
        if (b.conditional_probability > 1e-12) REQUIRE(b.classified_as == "Phi+");
    }
}

TEST_CASE("logic-bsa: Phi- detector pattern table at M = 2") {
    auto report = run_logic_bsa(make_logic_bell(BellLabel::phi_minus, 2), 2);
    REQUIRE_FALSE(report.rejected);
    auto probs = branch_probabilities(report.branches);
    REQUIRE(probs.size() == 4);
    for (auto& key : {"D5+D8+D9+D12", "D5+D8+D10+D11", "D6+D7+D9+D12", "D6+D7+D10+D11"}) {
        REQUIRE_THAT(probs.at(key), WithinAbs(0.25, 1e-10));
    }
    for (auto& b : report.branches) {
        if (b.conditional_probability > 1e-12) REQUIRE(b.classified_as == "Phi-");
    }
}

TEST_CASE("logic-bsa: Phi+ and Phi- tables never overlap") {
    auto plus = run_logic_bsa(make_logic_bell(BellLabel::phi_plus, 2), 2);
    auto minus = run_logic_bsa(make_logic_bell(BellLabel::phi_minus, 2), 2);
    for (auto& bp : plus.branches) {
        if (bp.conditional_probability <= 1e-12) continue;
        for (auto& bm : minus.branches) {
            if (bm.conditional_probability <= 1e-12) continue;
            REQUIRE(bp.pattern != bm.pattern);
        }
    }
}

TEST_CASE("logic-bsa: stage ledger with single-outcome QND") {
    auto report = run_logic_bsa(make_logic_bell(BellLabel::phi_plus, 2), 2);
    REQUIRE(report.ledger.size() == 3);
    REQUIRE(report.ledger[0].stage == "pbs-post-selection");
    REQUIRE_THAT(report.ledger[0].probability, WithinAbs(0.5, 1e-10));
    REQUIRE(report.ledger[1].stage == "qnd-1");
    REQUIRE_THAT(report.ledger[1].probability, WithinAbs(0.25, 1e-10));
    REQUIRE(report.ledger[2].stage == "qnd-2");
    REQUIRE_THAT(report.ledger[2].probability, WithinAbs(0.25, 1e-10));
    REQUIRE_THAT(report.success_probability, WithinAbs(1.0 / 32.0, 1e-10));
}

TEST_CASE("logic-bsa: two-outcome QND halves are accepted") {
    ProtocolOptions opts;
    opts.qnd = QndVariant::two_bell;
    auto report = run_logic_bsa(make_logic_bell(BellLabel::phi_minus, 2), 2, opts);
    REQUIRE(report.ledger.size() == 3);
    REQUIRE_THAT(report.ledger[0].probability, WithinAbs(0.5, 1e-10));
    REQUIRE_THAT(report.ledger[1].probability, WithinAbs(0.5, 1e-10));
    REQUIRE_THAT(report.ledger[2].probability, WithinAbs(0.5, 1e-10));
    REQUIRE_THAT(report.success_probability, WithinAbs(1.0 / 8.0, 1e-10));
}

TEST_CASE("logic-bsa: Psi inputs are rejected by the post-selection") {
    for (int M : {2, 3, 4}) {
        for (auto label : {BellLabel::psi_plus, BellLabel::psi_minus}) {
            auto report = run_logic_bsa(make_logic_bell(label, M), M);
            REQUIRE(report.rejected);
            REQUIRE(report.status == "rejected by construction");
            REQUIRE(report.ledger.size() == 1);
            REQUIRE(report.ledger[0].probability <= 1e-12);
            REQUIRE(report.success_probability == 0.0);
        }
    }
}

TEST_CASE("logic-bsa: post-selection collapse matches the pair-product oracle") {
    for (int M : {2, 3}) {
        for (int sign : {+1, -1}) {
            auto label = sign > 0 ? BellLabel::phi_plus : BellLabel::phi_minus;
            auto report = run_logic_bsa(make_logic_bell(label, M), M);
            REQUIRE_THAT(report.ledger[0].probability,
                         WithinAbs(std::pow(2.0, 1 - M), 1e-10));
            REQUIRE_THAT(fidelity(report.collapsed, pair_collapse_oracle(M, sign)),
                         WithinAbs(1.0, 1e-10));
        }
    }
}

TEST_CASE("logic-bsa: M = 2 collapse is a product of identical Bell pairs") {
    auto plus = run_logic_bsa(make_logic_bell(BellLabel::phi_plus, 2), 2);
    auto expect_plus = tensor(make_bell(BellLabel::phi_plus, "c1", "d1"),
                              make_bell(BellLabel::phi_plus, "c2", "d2"));
    REQUIRE_THAT(fidelity(plus.collapsed, expect_plus), WithinAbs(1.0, 1e-10));
    auto minus = run_logic_bsa(make_logic_bell(BellLabel::phi_minus, 2), 2);
    auto expect_minus = tensor(make_bell(BellLabel::phi_minus, "c1", "d1"),
                               make_bell(BellLabel::phi_minus, "c2", "d2"));
    REQUIRE_THAT(fidelity(minus.collapsed, expect_minus), WithinAbs(1.0, 1e-10));
}

TEST_CASE("logic-bsa: M = 3 run uses three QNDs and classifies correctly") {
    for (auto path : {QndPath::projection, QndPath::interferometric}) {
        ProtocolOptions opts;
        opts.qnd_path = path;
        auto report = run_logic_bsa(make_logic_bell(BellLabel::phi_plus, 3), 3, opts);
        REQUIRE_FALSE(report.rejected);
        REQUIRE(report.ledger.size() == 4);  // post-selection + 3 QNDs
        for (std::size_t i = 1; i < report.ledger.size(); ++i) {
            REQUIRE_THAT(report.ledger[i].probability, WithinAbs(0.25, 1e-10));
        }
        double classified = 0.0;
        for (auto& b : report.branches) {
            if (b.conditional_probability > 1e-12) {
                REQUIRE(b.classified_as == "Phi+");
                classified += b.conditional_probability;
            }
        }
        REQUIRE_THAT(classified, WithinAbs(1.0, 1e-10));
    }
}

TEST_CASE("logic-bsa: classification is exhaustive and sound for Phi inputs") {
    for (auto label : {BellLabel::phi_plus, BellLabel::phi_minus}) {
        for (auto variant : {QndVariant::one_bell, QndVariant::two_bell}) {
            ProtocolOptions opts;
            opts.qnd = variant;
            auto report = run_logic_bsa(make_logic_bell(label, 2), 2, opts);
            std::string want = bell_name(label, true);
            double mass = 0.0;
            for (auto& b : report.branches) {
                if (b.conditional_probability <= 1e-12) continue;
                REQUIRE(b.classified_as == want);
                mass += b.conditional_probability;
            }
            REQUIRE_THAT(mass, WithinAbs(1.0, 1e-10));
        }
    }
}

TEST_CASE("logic-bsa rejects a non-canonical registry") {
    auto wrong = make_bell(BellLabel::phi_plus, "x1", "x2");
    REQUIRE_THROWS_AS(run_logic_bsa(wrong, 2), std::invalid_argument);
}

TEST_CASE("p-bsa standalone: Bell pairs and bunched rejections") {
    auto plus = run_pbsa(make_bell(BellLabel::phi_plus, "u", "v"), "u", "v");
    auto probs = branch_probabilities(plus);
    REQUIRE_THAT(probs.at("D1+D3"), WithinAbs(0.5, 1e-10));
    REQUIRE_THAT(probs.at("D2+D4"), WithinAbs(0.5, 1e-10));
    for (auto& b : plus) {
        if (b.conditional_probability > 1e-12) REQUIRE(b.classified_as == "phi+");
    }

    auto minus = run_pbsa(make_bell(BellLabel::phi_minus, "u", "v"), "u", "v");
    for (auto& b : minus) {
        if (b.conditional_probability > 1e-12) REQUIRE(b.classified_as == "phi-");
    }

    // psi inputs bunch at the PBS: single-detector events, never classified.
    auto psi = run_pbsa(make_bell(BellLabel::psi_plus, "u", "v"), "u", "v");
    for (auto& b : psi) {
        if (b.conditional_probability > 1e-12) {
            REQUIRE(b.classified_as == "unclassified");
            REQUIRE(b.pattern.fired.size() == 1);
        }
    }
}

TEST_CASE("p-gsa standalone: three-photon GHZ pattern tables") {
    auto plus = run_pgsa(make_ghz(+1, {"u", "v", "w"}), {"u", "v", "w"});
    auto probs_plus = branch_probabilities(plus);
    REQUIRE(probs_plus.size() == 4);
    for (auto& key : {"D1+D3+D5", "D1+D4+D6", "D2+D3+D6", "D2+D4+D5"}) {
        REQUIRE_THAT(probs_plus.at(key), WithinAbs(0.25, 1e-10));
    }
    for (auto& b : plus) {
        if (b.conditional_probability > 1e-12) REQUIRE(b.classified_as == "GHZ3+");
    }

    auto minus = run_pgsa(make_ghz(-1, {"u", "v", "w"}), {"u", "v", "w"});
    auto probs_minus = branch_probabilities(minus);
    REQUIRE(probs_minus.size() == 4);
    for (auto& key : {"D2+D4+D6", "D1+D4+D5", "D2+D3+D5", "D1+D3+D6"}) {
        REQUIRE_THAT(probs_minus.at(key), WithinAbs(0.25, 1e-10));
    }
    for (auto& b : minus) {
        if (b.conditional_probability > 1e-12) REQUIRE(b.classified_as == "GHZ3-");
    }
}

TEST_CASE("p-gsa at N = 2 reduces to the Bell-pair parity table") {
    auto plus = run_pgsa(make_bell(BellLabel::phi_plus, "u", "v"), {"u", "v"});
    auto probs = branch_probabilities(plus);
    REQUIRE_THAT(probs.at("D1+D3"), WithinAbs(0.5, 1e-10));
    REQUIRE_THAT(probs.at("D2+D4"), WithinAbs(0.5, 1e-10));
    for (auto& b : plus) {
        if (b.conditional_probability > 1e-12) REQUIRE(b.classified_as == "GHZ2+");
    }
}

TEST_CASE("cghz: post-selection probability is 2^(1-N) at M = 2") {
    for (int N : {2, 3, 4}) {
        auto report = run_cghz_analysis(make_cghz(N, 2, 1, +1), N, 2);
        REQUIRE_FALSE(report.rejected);
        REQUIRE_THAT(report.ledger[0].probability, WithinAbs(std::pow(2.0, 1 - N), 1e-10));
        // Independent count oracle: of the 2^N diagonal branch products, the
        // surviving single-occupancy words contribute 4 * (1/sqrt(2))^(2N+2).
        double oracle = 4.0 * std::pow(0.5, N + 1);
        REQUIRE_THAT(report.ledger[0].probability, WithinAbs(oracle, 1e-10));
    }
}

TEST_CASE("cghz: every QND stage heralds with the Bell-measurement factor") {
    auto report = run_cghz_analysis(make_cghz(3, 2, 1, -1), 3, 2);
    REQUIRE(report.ledger.size() == 1 + 2 * 2);  // post-selection + M(N-1) QNDs
    for (std::size_t i = 1; i < report.ledger.size(); ++i) {
        REQUIRE_THAT(report.ledger[i].probability, WithinAbs(0.25, 1e-10));
    }
    REQUIRE_THAT(report.success_probability,
                 WithinAbs(std::pow(2.0, 1 - 3) * std::pow(0.25, 4), 1e-10));
}

TEST_CASE("cghz: N = 3 collapse is a product of two three-photon GHZ states") {
    for (int sign : {+1, -1}) {
        auto report = run_cghz_analysis(make_cghz(3, 2, 1, sign), 3, 2);
        auto expect = tensor(make_ghz(sign, {"O1.1", "O1.2", "T1.2"}),
                             make_ghz(sign, {"O2.1", "O2.2", "T2.2"}));
        REQUIRE_THAT(fidelity(report.collapsed, expect), WithinAbs(1.0, 1e-10));
    }
}

TEST_CASE("classification tables are independent of the bs50 phase convention") {
    ProtocolOptions hadamard, symmetric;
    hadamard.bs = BsConvention::hadamard;
    symmetric.bs = BsConvention::symmetric;
    for (auto label : {BellLabel::phi_plus, BellLabel::phi_minus}) {
        auto a = run_logic_bsa(make_logic_bell(label, 2), 2, hadamard);
        auto b = run_logic_bsa(make_logic_bell(label, 2), 2, symmetric);
        REQUIRE(a.classification() == b.classification());
    }
}

TEST_CASE("cghz: joint classification is sound for both signs") {
    for (int sign : {+1, -1}) {
        auto report = run_cghz_analysis(make_cghz(3, 2, 1, sign), 3, 2);
        std::string want = sign > 0 ? "Phi1+" : "Phi1-";
        double mass = 0.0;
        for (auto& b : report.branches) {
            if (b.conditional_probability <= 1e-12) continue;
            REQUIRE(b.classified_as == want);
            mass += b.conditional_probability;
        }
        REQUIRE_THAT(mass, WithinAbs(1.0, 1e-10));
    }
}

TEST_CASE("cghz: per-group marginals form GHZ parity tables") {
    auto report = run_cghz_analysis(make_cghz(3, 2, 1, +1), 3, 2);
    REQUIRE(report.group_branches.size() == 2);
    for (auto& rows : report.group_branches) {
        double mass = 0.0;
        for (auto& b : rows) {
            if (b.conditional_probability <= 1e-12) continue;
            REQUIRE((b.classified_as == "GHZ3+" || b.classified_as == "GHZ3-"));
            mass += b.conditional_probability;
        }
        REQUIRE_THAT(mass, WithinAbs(1.0, 1e-10));
    }
}

TEST_CASE("cghz: non-first index inputs are rejected by construction") {
    auto report = run_cghz_analysis(make_cghz(3, 2, 2, +1), 3, 2);
    REQUIRE(report.rejected);
    REQUIRE(report.ledger[0].probability <= 1e-12);
    auto report2 = run_cghz_analysis(make_cghz(3, 2, 3, -1), 3, 2);
    REQUIRE(report2.rejected);
}

TEST_CASE("cghz at N = 2 matches the logic-bsa probabilities") {
    auto bsa = run_logic_bsa(make_logic_bell(BellLabel::phi_plus, 2), 2);
    auto cghz = run_cghz_analysis(make_cghz(2, 2, 1, +1), 2, 2);
    REQUIRE_THAT(cghz.ledger[0].probability, WithinAbs(bsa.ledger[0].probability, 1e-10));
    REQUIRE_THAT(cghz.success_probability, WithinAbs(bsa.success_probability, 1e-10));
}

TEST_CASE("resource counts follow the circuit structure") {
    auto rc22 = resource_count(2, 2);
    REQUIRE(rc22.qnd_count == 2);
    REQUIRE(rc22.ancilla_sources == 2);
    REQUIRE(rc22.detected_photons == 8);
    REQUIRE(rc22.detector_count == 12);
    REQUIRE(rc22.paper_sources == 2);
    REQUIRE(rc22.paper_detectors == 8);

    auto rc32 = resource_count(3, 2);  // N = 3, M = 2
    REQUIRE(rc32.qnd_count == 4);
    REQUIRE(rc32.detected_photons == 14);

    // The two counting conventions agree exactly when M = N.
    auto rc33 = resource_count(3, 3);
    REQUIRE(rc33.ancilla_sources == rc33.paper_sources);
}

TEST_CASE("protocol reports carry the element list of the circuit built") {
    auto report = run_logic_bsa(make_logic_bell(BellLabel::phi_plus, 2), 2);
    int hwps = 0, pbss = 0, qnds = 0, dets = 0;
    for (auto& e : report.elements) {
        if (e.type == "hwp") ++hwps;
        if (e.type == "pbs") ++pbss;
        if (e.type == "qnd") ++qnds;
        if (e.type == "detector") ++dets;
    }
    REQUIRE(hwps == 4 + 4);  // input HWPs + analyzer HWPs
    REQUIRE(pbss == 2 + 2);
    REQUIRE(qnds == 2);
    REQUIRE(dets == 8);
}
