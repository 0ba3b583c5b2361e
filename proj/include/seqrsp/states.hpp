#pragma once

// State families shared between the sender chain and the receiver, the
// Bloch-circle pure states with their complements, the receiver's correction
// unitaries, and correlation-matrix extraction.
//
// Tensor-factor convention everywhere: the first factor is the receiver
// (Alice), the second factor is the measuring side (the Bobs).

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <variant>

#include "cmatrix.hpp"

namespace seqrsp {

inline constexpr double kPi = std::numbers::pi_v<double>;

// A circle on the Bloch sphere is picked by the polar angle theta; a state on
// it by the azimuth phi.
struct BlochCircleState {
    double theta = kPi / 2.0;
    double phi = 0.0;
};

// Circle classification drives the correction strategy. theta within 1e-5 of
// the equator is treated as equatorial so that values like 1.5708 behave as
// intended; the closed forms are smooth there, so the snap is harmless.
enum class CircleClass { Equatorial, Pole, General };

inline constexpr double kEquatorTol = 1e-5;
inline constexpr double kPoleTol = 1e-9;

inline CircleClass classify_circle(double theta) {
    if (std::abs(theta - kPi / 2.0) < kEquatorTol) return CircleClass::Equatorial;
    if (theta < kPoleTol || theta > kPi - kPoleTol) return CircleClass::Pole;
    return CircleClass::General;
}

// |psi>  = cos(t/2)|0> + e^{i phi} sin(t/2)|1>
// |psi_> = -sin(t/2)|0> + e^{i phi} cos(t/2)|1>
// Global phase is fixed by making the |0> amplitude real non-negative.
inline CVec2 pure_state(const BlochCircleState& s, bool complement = false) {
    const double h = 0.5 * s.theta;
    const cplx ph = std::polar(1.0, s.phi);
    CVec2 v;
    if (!complement) {
        v = {cplx(std::cos(h), 0.0), ph * std::sin(h)};
    } else {
        v = {cplx(std::sin(h), 0.0), -ph * std::cos(h)};
    }
    return v;
}

// --- initial-state families -------------------------------------------------

enum class BellKind { PsiMinus, PsiPlus, PhiPlus, PhiMinus };

struct Singlet {};

struct BellState {
    BellKind kind = BellKind::PsiMinus;
};

// cos(xi)|01> - sin(xi)|10>
struct NonMaximal {
    double xi = kPi / 4.0;
};

// c |psi-><psi-| + (1-c)/4 * identity
struct Werner {
    double c = 1.0;
};

struct BellDiagonalCoeffs {
    double c1 = 0.0, c2 = 0.0, c3 = 0.0;
};

struct BellDiagonal {
    BellDiagonalCoeffs c;
};

using InitialFamily = std::variant<Singlet, BellState, NonMaximal, Werner, BellDiagonal>;

inline CVec4 bell_vector(BellKind kind) {
    const double r = 1.0 / std::numbers::sqrt2_v<double>;
    switch (kind) {
        case BellKind::PsiMinus: return {0.0, r, -r, 0.0};
        case BellKind::PsiPlus: return {0.0, r, r, 0.0};
        case BellKind::PhiPlus: return {r, 0.0, 0.0, r};
        case BellKind::PhiMinus: return {r, 0.0, 0.0, -r};
    }
    throw std::invalid_argument("unknown Bell state kind");
}

// 1/4 (1(x)1 + sum_j c_j sigma_j (x) sigma_j); PSD iff all four Bell-basis
// weights (1 -+ c1 -+ c2 -+ c3)/4 are non-negative, checked in closed form.
inline CMat4 bell_diagonal_state(const BellDiagonalCoeffs& c) {
    for (double x : {c.c1, c.c2, c.c3})
        if (std::abs(x) > 1.0 + 1e-12)
            throw std::invalid_argument("bell_diagonal_state: coefficient outside [-1,1]");
    const std::array<double, 4> weights = {
        0.25 * (1.0 - c.c1 - c.c2 - c.c3),
        0.25 * (1.0 + c.c1 + c.c2 - c.c3),
        0.25 * (1.0 + c.c1 - c.c2 + c.c3),
        0.25 * (1.0 - c.c1 + c.c2 + c.c3),
    };
    for (double w : weights)
        if (w < kPsdTol)
            throw std::invalid_argument("bell_diagonal_state: coefficients give a non-PSD state");

    CMat4 rho = 0.25 * CMat4::identity();
    rho += 0.25 * c.c1 * kron(pauli_x(), pauli_x());
    rho += 0.25 * c.c2 * kron(pauli_y(), pauli_y());
    rho += 0.25 * c.c3 * kron(pauli_z(), pauli_z());
    return rho;
}

inline CMat4 make_initial(const InitialFamily& family) {
    return std::visit(
        [](const auto& f) -> CMat4 {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, Singlet>) {
                return outer(bell_vector(BellKind::PsiMinus));
            } else if constexpr (std::is_same_v<T, BellState>) {
                return outer(bell_vector(f.kind));
            } else if constexpr (std::is_same_v<T, NonMaximal>) {
                if (f.xi < 0.0 || f.xi > kPi / 2.0)
                    throw std::invalid_argument("make_initial: xi outside [0, pi/2]");
                const CVec4 v = {0.0, std::cos(f.xi), -std::sin(f.xi), 0.0};
                return outer(v);
            } else if constexpr (std::is_same_v<T, Werner>) {
                if (f.c < 0.0 || f.c > 1.0)
                    throw std::invalid_argument("make_initial: Werner c outside [0,1]");
                return bell_diagonal_state({-f.c, -f.c, -f.c});
            } else {
                return bell_diagonal_state(f.c);
            }
        },
        family);
}

// M_pq = Tr[(sigma_p (x) sigma_q) rho]; real for Hermitian rho.
inline std::array<std::array<double, 3>, 3> correlation_matrix(const CMat4& rho) {
    const std::array<CMat2, 3> sig = {pauli_x(), pauli_y(), pauli_z()};
    std::array<std::array<double, 3>, 3> m{};
    for (int p = 0; p < 3; ++p)
        for (int q = 0; q < 3; ++q)
            m[p][q] = std::real((kron(sig[p], sig[q]) * rho).trace());
    return m;
}

// --- the receiver's correction unitaries -------------------------------------

enum class Outcome { Up, Down };  // Up: the sender projected onto |psi>

// "Frame" unitary that maps the receiver's conditional state on the Down
// outcome to |psi> for every circle.
inline CMat2 down_unitary(BellKind kind) {
    switch (kind) {
        case BellKind::PsiMinus: return CMat2::identity();
        case BellKind::PsiPlus: return pauli_z();
        case BellKind::PhiPlus: return cplx(0.0, 1.0) * pauli_y();
        case BellKind::PhiMinus: return pauli_x();
    }
    throw std::invalid_argument("unknown Bell state kind");
}

// On the equator the Up branch is corrected by sigma_z composed with the
// frame unitary; off the equator the complement transformation does not
// exist, so Up is an explicit rejection (nullopt) and Down keeps the state.
inline std::optional<CMat2> correction_unitary(BellKind kind, Outcome outcome, double theta) {
    const CMat2 w = down_unitary(kind);
    if (outcome == Outcome::Down) return w;
    if (classify_circle(theta) == CircleClass::Equatorial) return pauli_z() * w;
    return std::nullopt;
}

}  // namespace seqrsp
