#pragma once

// Unsharp two-outcome measurements: effect operators, their square roots in
// closed form, the selective state update with outcome probability, and the
// azimuth-averaged non-selective channel that produces the state seen by the
// next observer.

#include <cmath>
#include <stdexcept>
#include <utility>

#include "cmatrix.hpp"
#include "states.hpp"

namespace seqrsp {

inline constexpr int kDefaultQuadratureNodes = 64;
inline constexpr double kProbabilityFloor = 1e-14;

enum class Sign { Plus, Minus };

// E_+- = lambda P_+- + (1-lambda)/2 * identity, with P_+ = |psi><psi| and
// P_- = |psi_perp><psi_perp|. Eigenvalues are (1 +- lambda)/2.
struct UnsharpEffect {
    double lambda = 1.0;
    BlochCircleState basis;
    Sign sign = Sign::Plus;
};

inline void validate_sharpness(double lambda) {
    if (!(lambda >= 0.0 && lambda <= 1.0))
        throw std::invalid_argument("sharpness parameter outside [0,1]");
}

inline CMat2 effect(const UnsharpEffect& e) {
    validate_sharpness(e.lambda);
    const CMat2 p = outer(pure_state(e.basis, e.sign == Sign::Minus));
    return e.lambda * p + cplx(0.5 * (1.0 - e.lambda)) * CMat2::identity();
}

// sqrt(E_+-) = sqrt((1 +- l)/2) P_+- + sqrt((1 -+ l)/2) P_-+, assembled in the
// {psi, psi_perp} eigenbasis so no eigensolve is needed in the hot path.
inline CMat2 sqrt_effect(const UnsharpEffect& e) {
    validate_sharpness(e.lambda);
    const CMat2 p_own = outer(pure_state(e.basis, e.sign == Sign::Minus));
    const CMat2 p_other = outer(pure_state(e.basis, e.sign == Sign::Plus));
    const double hi = std::sqrt(0.5 * (1.0 + e.lambda));
    const double lo = std::sqrt(0.5 * (1.0 - e.lambda));
    return hi * p_own + lo * p_other;
}

// Selective Lueders update of the joint state for one outcome:
// (1 (x) sqrt(E)) rho (1 (x) sqrt(E)) / p. Returns the normalized joint state
// and p.
inline std::pair<CMat4, double> post_measurement_state(const CMat4& rho, const UnsharpEffect& e) {
    CMat4 updated = sandwich_second(rho, sqrt_effect(e));
    const double p = std::real(updated.trace());
    if (p < kProbabilityFloor)
        throw std::domain_error("post-measurement state undefined: outcome probability is ~0");
    updated *= cplx(1.0 / p);
    return {updated, p};
}

// The receiver's normalized conditional state for one outcome, with the
// outcome probability p = Tr[(1 (x) sqrt(E)) rho (1 (x) sqrt(E))].
inline std::pair<CMat2, double> conditional_state(const CMat4& rho, const UnsharpEffect& e) {
    const auto [joint, p] = post_measurement_state(rho, e);
    return {partial_trace_second(joint), p};
}

// Non-selective channel averaged over the measurement azimuth:
//   (1/2pi) int d phi  sum_a (1 (x) sqrt(E_a)) rho (1 (x) sqrt(E_a)).
// Uniform nodes on [0,2pi) integrate the trigonometric-polynomial integrand
// (degree <= 2 in phi) exactly for any nodes >= 16.
inline CMat4 phi_averaged_channel(const CMat4& rho, double lambda, double theta,
                                  int nodes = kDefaultQuadratureNodes) {
    validate_sharpness(lambda);
    if (nodes < 16) throw std::invalid_argument("phi_averaged_channel: nodes must be >= 16");

    CMat4 acc;
    for (int j = 0; j < nodes; ++j) {
        const double phi = 2.0 * kPi * static_cast<double>(j) / nodes;
        const BlochCircleState basis{theta, phi};
        acc += sandwich_second(rho, sqrt_effect({lambda, basis, Sign::Plus}));
        acc += sandwich_second(rho, sqrt_effect({lambda, basis, Sign::Minus}));
    }
    acc *= cplx(1.0 / nodes);
    return acc;
}

}  // namespace seqrsp
