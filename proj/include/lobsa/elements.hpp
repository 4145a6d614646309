#ifndef LOBSA_ELEMENTS_HPP
#define LOBSA_ELEMENTS_HPP

#include <cmath>
#include <numbers>
#include <string>

#include "lobsa/mode_map.hpp"

namespace lobsa {

// 22.5 degrees: the half-wave plate angle that enacts the Hadamard
// transform H -> (H+V)/sqrt(2), V -> (H-V)/sqrt(2).
inline constexpr double kHadamardHwpAngle = std::numbers::pi / 8.0;

// Half-wave plate on one spatial mode. Jones matrix is a rotation by
// 2*angle with determinant -1.
inline ModeLinearMap hwp(const std::string& spatial, double angle) {
    if (!std::isfinite(angle)) throw std::invalid_argument("hwp: angle must be finite");
    double c = std::cos(2.0 * angle);
    double s = std::sin(2.0 * angle);
    return ModeLinearMap({mode_h(spatial), mode_v(spatial)},
                         {mode_h(spatial), mode_v(spatial)},
                         {{Complex{c, 0}, Complex{s, 0}}, {Complex{s, 0}, Complex{-c, 0}}});
}

inline ModeLinearMap hadamard_hwp(const std::string& spatial) {
    return hwp(spatial, kHadamardHwpAngle);
}

// Polarizing beam splitter: transmits H, reflects V, with no reflection phase.
inline ModeLinearMap pbs(const std::string& in1, const std::string& in2,
                         const std::string& out1, const std::string& out2) {
    std::set<std::string> labels{in1, in2, out1, out2};
    if (labels.size() != 4) throw std::invalid_argument("pbs: spatial labels must be distinct");
    const Complex one{1, 0}, zero{0, 0};
    // rows: out1H, out1V, out2H, out2V; columns: in1H, in1V, in2H, in2V
    return ModeLinearMap(
        {mode_h(in1), mode_v(in1), mode_h(in2), mode_v(in2)},
        {mode_h(out1), mode_v(out1), mode_h(out2), mode_v(out2)},
        {{one, zero, zero, zero},
         {zero, zero, zero, one},
         {zero, zero, one, zero},
         {zero, one, zero, zero}});
}

// Phase convention of the 50:50 beam splitter. The paper fixes none; the
// real Hadamard convention is the documented default, and all coincidence
// predictions are convention-independent.
enum class BsConvention { hadamard, symmetric };

// Polarization-preserving 50:50 beam splitter.
// hadamard:  in1 -> (out1 + out2)/sqrt(2),  in2 -> (out1 - out2)/sqrt(2)
// symmetric: in1 -> (out1 + i out2)/sqrt(2), in2 -> (i out1 + out2)/sqrt(2)
inline ModeLinearMap bs50(const std::string& in1, const std::string& in2,
                          const std::string& out1, const std::string& out2,
                          BsConvention convention = BsConvention::hadamard) {
    std::set<std::string> labels{in1, in2, out1, out2};
    if (labels.size() != 4) throw std::invalid_argument("bs50: spatial labels must be distinct");
    const double r = 1.0 / std::sqrt(2.0);
    Complex a{r, 0}, b{r, 0}, c{r, 0}, d{-r, 0};
    if (convention == BsConvention::symmetric) {
        b = Complex{0, r};
        c = Complex{0, r};
        d = Complex{r, 0};
    }
    const Complex zero{0, 0};
    // rows: out1H, out1V, out2H, out2V; columns: in1H, in1V, in2H, in2V
    return ModeLinearMap(
        {mode_h(in1), mode_v(in1), mode_h(in2), mode_v(in2)},
        {mode_h(out1), mode_v(out1), mode_h(out2), mode_v(out2)},
        {{a, zero, c, zero},
         {zero, a, zero, c},
         {b, zero, d, zero},
         {zero, b, zero, d}});
}

// Diagonal phase on the two polarization modes of one spatial label.
// polarization_phase(s, 1, -1) is the Z correction used after teleportation.
inline ModeLinearMap polarization_phase(const std::string& spatial, Complex phase_h,
                                        Complex phase_v) {
    const Complex zero{0, 0};
    return ModeLinearMap({mode_h(spatial), mode_v(spatial)},
                         {mode_h(spatial), mode_v(spatial)},
                         {{phase_h, zero}, {zero, phase_v}});
}

// Measurement-side descriptor: transmits the component along `axis`
// (radians from H) and discards the orthogonal component. Not a unitary
// map; consumed by detector assemblies only.
struct Polarizer {
    std::string spatial;
    double axis = 0.0;
};

// Lossy projection of every photon in the polarizer's spatial mode onto the
// transmission axis. Returns the renormalized transmitted state (in the
// original H/V basis) and the transmission probability.
inline std::pair<PhotonicState, double> apply_polarizer(const PhotonicState& state,
                                                        const Polarizer& pol) {
    double c = std::cos(pol.axis);
    double s = std::sin(pol.axis);
    // Basis change sending the transmission axis to H and its orthogonal to V.
    ModeLinearMap to_axis({mode_h(pol.spatial), mode_v(pol.spatial)},
                          {mode_h(pol.spatial), mode_v(pol.spatial)},
                          {{Complex{c, 0}, Complex{s, 0}}, {Complex{-s, 0}, Complex{c, 0}}});
    auto rotated = apply_map(state, to_axis);
    auto [kept, probability] = post_select(rotated, [&](const FockBasisVector& b) {
        return b.count(mode_v(pol.spatial)) == 0;
    });
    if (kept.empty()) return {kept, 0.0};
    return {apply_map(kept, adjoint(to_axis)), probability};
}

}  // namespace lobsa

#endif  // LOBSA_ELEMENTS_HPP
