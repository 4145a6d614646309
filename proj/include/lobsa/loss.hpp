#ifndef LOBSA_LOSS_HPP
#define LOBSA_LOSS_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

#include "lobsa/protocols.hpp"

namespace lobsa {

// Exponent convention for the total success probability P_t.
// paper:      P_t = p_s^((M-1)N)   * p_d^((2(M-1)+M)N)   -- as printed
// structural: P_t = p_s^(M(N-1))   * p_d^(MN + 2M(N-1))  -- from the circuit
// actually built (one ancilla pair and two heralds per PBS, every photon
// detected). The two coincide when M = N.
enum class CountingConvention { paper, structural };

struct SuccessExponents {
    int source = 0;
    int detector = 0;
};

inline SuccessExponents success_exponents(int M, int N, CountingConvention counting) {
    if (N < 2 || M < 2) throw std::invalid_argument("success_exponents: need N, M >= 2");
    if (counting == CountingConvention::paper) {
        return {(M - 1) * N, (2 * (M - 1) + M) * N};
    }
    return {M * (N - 1), M * N + 2 * M * (N - 1)};
}

inline double success_probability_formula(int M, int N, double p_s, double p_d,
                                          CountingConvention counting) {
    if (p_s < 0.0 || p_s > 1.0 || p_d < 0.0 || p_d > 1.0) {
        throw std::invalid_argument("success_probability_formula: probabilities in [0,1]");
    }
    auto e = success_exponents(M, N, counting);
    return std::pow(p_s, e.source) * std::pow(p_d, e.detector);
}

// Ideal (lossless) success probability of the full analysis: post-selection
// mass 2^(M-1-N(M-1)) for the Phi_1 inputs times the per-QND Bell-measurement
// factor for each of the M(N-1) QNDs.
inline double ideal_success_probability(int N, int M, QndVariant variant) {
    if (N < 2 || M < 2) throw std::invalid_argument("ideal_success_probability: N, M >= 2");
    double post_selection = std::pow(2.0, M - 1 - N * (M - 1));
    double per_qnd = variant == QndVariant::one_bell ? 0.25 : 0.5;
    return post_selection * std::pow(per_qnd, M * (N - 1));
}

struct MonteCarloResult {
    long long shots = 0;
    std::uint64_t seed = 0;
    // All sources fire and every photon is detected.
    double resource_estimate = 0.0;
    double resource_se = 0.0;
    double resource_analytic = 0.0;
    // Resource success gated on the ideal-protocol success branch.
    double gated_estimate = 0.0;
    double gated_se = 0.0;
    double gated_analytic = 0.0;
};

// Bernoulli sampling of source firings (p_s per ancilla pair) and per-photon
// detection (p_d), gated on the ideal success branch. Deterministic given the
// seed.
inline MonteCarloResult monte_carlo_success(int M, int N, double p_s, double p_d,
                                            long long shots, std::uint64_t seed,
                                            QndVariant variant = QndVariant::one_bell) {
    if (shots < 1) throw std::invalid_argument("monte_carlo_success: shots >= 1");
    if (p_s < 0.0 || p_s > 1.0 || p_d < 0.0 || p_d > 1.0) {
        throw std::invalid_argument("monte_carlo_success: probabilities in [0,1]");
    }
    auto rc = resource_count(N, M);
    const double p_ideal = ideal_success_probability(N, M, variant);

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    long long resource_hits = 0, gated_hits = 0;
    for (long long shot = 0; shot < shots; ++shot) {
        bool ok = true;
        for (int s = 0; s < rc.ancilla_sources; ++s) {
            if (uniform(rng) >= p_s) ok = false;
        }
        for (int dphoton = 0; dphoton < rc.detected_photons; ++dphoton) {
            if (uniform(rng) >= p_d) ok = false;
        }
        bool ideal = uniform(rng) < p_ideal;
        if (ok) ++resource_hits;
        if (ok && ideal) ++gated_hits;
    }

    auto stderr_of = [&](double p) { return std::sqrt(p * (1.0 - p) / shots); };
    MonteCarloResult r;
    r.shots = shots;
    r.seed = seed;
    r.resource_estimate = static_cast<double>(resource_hits) / shots;
    r.resource_se = stderr_of(r.resource_estimate);
    r.resource_analytic =
        success_probability_formula(M, N, p_s, p_d, CountingConvention::structural);
    r.gated_estimate = static_cast<double>(gated_hits) / shots;
    r.gated_se = stderr_of(r.gated_estimate);
    r.gated_analytic = r.resource_analytic * p_ideal;
    return r;
}

}  // namespace lobsa

#endif  // LOBSA_LOSS_HPP
