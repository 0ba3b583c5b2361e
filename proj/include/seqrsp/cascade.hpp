#pragma once

// The multi-observer cascade: the shared two-qubit state seen by each
// successive sender, and every sender's average preparation fidelity, both in
// closed form and through the explicit quadrature channel.
//
// Accounting per circle class:
//  - equator: both outcomes are corrected with {W, sigma_z W}, fully
//    successful preparation;
//  - poles: both outcomes corrected with {W, sigma_x W};
//  - any other circle: the receiver keeps one outcome branch and scores the
//    rejected branch at the classical bound (50% post-selection).

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "classical.hpp"
#include "cmatrix.hpp"
#include "measurement.hpp"
#include "states.hpp"

namespace seqrsp {

using SharpnessChain = std::vector<double>;

inline constexpr int kMaxChainLength = 12;

enum class Target { Psi, PsiPerp };

struct ProtocolConfig {
    InitialFamily family = Singlet{};
    double theta = kPi / 2.0;
    Target target = Target::Psi;
};

// Correction frame of the initial family; non-Bell families behave as the
// singlet sector.
inline BellKind family_kind(const InitialFamily& f) {
    if (const auto* b = std::get_if<BellState>(&f)) return b->kind;
    return BellKind::PsiMinus;
}

// Multiplicative factor in front of the quantum term of the closed-form
// fidelities: sin(2 xi) for the non-maximal pure family, the visibility c for
// the Werner family, 1 for Bell states.
inline double family_scale(const InitialFamily& f) {
    if (const auto* n = std::get_if<NonMaximal>(&f)) return std::sin(2.0 * n->xi);
    if (const auto* w = std::get_if<Werner>(&f)) return w->c;
    return 1.0;
}

inline void validate_config(const ProtocolConfig& cfg) {
    if (!(cfg.theta >= 0.0 && cfg.theta <= kPi))
        throw std::invalid_argument("config: theta outside [0, pi]");
    if (const auto* n = std::get_if<NonMaximal>(&cfg.family)) {
        if (n->xi < 0.0 || n->xi > kPi / 2.0)
            throw std::invalid_argument("config: xi outside [0, pi/2]");
        if (classify_circle(cfg.theta) != CircleClass::Equatorial)
            throw std::invalid_argument(
                "config: the non-maximal pure family supports the equatorial circle only "
                "(other circles would need biased outcome bookkeeping)");
    }
    if (const auto* w = std::get_if<Werner>(&cfg.family)) {
        if (w->c < 0.0 || w->c > 1.0)
            throw std::invalid_argument("config: Werner c outside [0,1]");
    }
}

inline void validate_chain(std::span<const double> chain) {
    if (chain.size() > kMaxChainLength)
        throw std::invalid_argument("chain: longer than " + std::to_string(kMaxChainLength) +
                                    " observers");
    for (std::size_t k = 0; k < chain.size(); ++k)
        if (!(chain[k] >= 0.0 && chain[k] <= 1.0))
            throw std::invalid_argument("chain: sharpness at index " + std::to_string(k + 1) +
                                        " outside [0,1]");
}

inline void validate_step(std::span<const double> chain, int bob_index, int needed) {
    if (bob_index < 1) throw std::invalid_argument("observer index must be >= 1");
    if (static_cast<int>(chain.size()) < needed)
        throw std::invalid_argument("chain too short for observer " + std::to_string(bob_index));
}

// The success threshold each sender must exceed.
inline double classical_threshold(const ProtocolConfig& cfg) {
    switch (classify_circle(cfg.theta)) {
        case CircleClass::Equatorial: return 0.75;
        case CircleClass::Pole: return 1.0;
        case CircleClass::General: return classical_bound(cfg.theta);
    }
    throw std::logic_error("unreachable");
}

// --- shared state in closed form ---------------------------------------------

// Pauli expansion of the two-qubit X-states the cascade produces:
// rho = 1/4 [1 + alice_z sz(x)1 + bob_z 1(x)sz + c1 sx(x)sx + c2 sy(x)sy + c3 sz(x)sz].
struct StateCoeffs {
    double c1 = 0.0, c2 = 0.0, c3 = 0.0;
    double alice_z = 0.0, bob_z = 0.0;
};

inline StateCoeffs initial_coeffs(const InitialFamily& family) {
    return std::visit(
        [](const auto& f) -> StateCoeffs {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, Singlet>) {
                return {-1.0, -1.0, -1.0, 0.0, 0.0};
            } else if constexpr (std::is_same_v<T, BellState>) {
                switch (f.kind) {
                    case BellKind::PsiMinus: return {-1.0, -1.0, -1.0, 0.0, 0.0};
                    case BellKind::PsiPlus: return {1.0, 1.0, -1.0, 0.0, 0.0};
                    case BellKind::PhiPlus: return {1.0, -1.0, 1.0, 0.0, 0.0};
                    case BellKind::PhiMinus: return {-1.0, 1.0, 1.0, 0.0, 0.0};
                }
                throw std::invalid_argument("unknown Bell state kind");
            } else if constexpr (std::is_same_v<T, NonMaximal>) {
                const double s = std::sin(2.0 * f.xi);
                const double c = std::cos(2.0 * f.xi);
                return {-s, -s, -1.0, c, -c};
            } else if constexpr (std::is_same_v<T, Werner>) {
                return {-f.c, -f.c, -f.c, 0.0, 0.0};
            } else {
                return {f.c.c1, f.c.c2, f.c.c3, 0.0, 0.0};
            }
        },
        family);
}

// The azimuth-averaged non-selective channel is diagonal on the Pauli basis
// of the measured side: transverse components shrink by
// s + (1-s) sin^2(theta)/2 and the z component by 1 - (1-s) sin^2(theta),
// where s = sqrt(1 - lambda^2). Iterating this gives the exact state in
// front of observer `bob_index`.
inline StateCoeffs shared_state_coeffs(const ProtocolConfig& cfg, std::span<const double> chain,
                                       int bob_index) {
    validate_config(cfg);
    validate_chain(chain);
    validate_step(chain, bob_index, bob_index - 1);

    StateCoeffs sc = initial_coeffs(cfg.family);
    const double sin2 = std::sin(cfg.theta) * std::sin(cfg.theta);
    for (int k = 0; k < bob_index - 1; ++k) {
        const double s = std::sqrt(1.0 - chain[k] * chain[k]);
        const double mu_xy = s + 0.5 * (1.0 - s) * sin2;
        const double mu_z = 1.0 - (1.0 - s) * sin2;
        sc.c1 *= mu_xy;
        sc.c2 *= mu_xy;
        sc.c3 *= mu_z;
        sc.bob_z *= mu_z;
    }
    return sc;
}

inline CMat4 state_from_coeffs(const StateCoeffs& sc) {
    CMat4 rho = 0.25 * CMat4::identity();
    rho += 0.25 * sc.alice_z * kron(pauli_z(), CMat2::identity());
    rho += 0.25 * sc.bob_z * kron(CMat2::identity(), pauli_z());
    rho += 0.25 * sc.c1 * kron(pauli_x(), pauli_x());
    rho += 0.25 * sc.c2 * kron(pauli_y(), pauli_y());
    rho += 0.25 * sc.c3 * kron(pauli_z(), pauli_z());
    return rho;
}

inline CMat4 shared_state(const ProtocolConfig& cfg, std::span<const double> chain, int bob_index) {
    return state_from_coeffs(shared_state_coeffs(cfg, chain, bob_index));
}

// --- closed-form fidelities ---------------------------------------------------

// Outcome-averaged fidelity of observer `bob_index` computed from the Pauli
// coefficients of the state in front of them.
inline double fidelity_from_coeffs(const StateCoeffs& sc, double lambda_i, double theta) {
    switch (classify_circle(theta)) {
        case CircleClass::Equatorial:
            return 0.5 - 0.25 * lambda_i * (sc.c1 + sc.c2);
        case CircleClass::Pole:
            return 0.5 * (1.0 - lambda_i * sc.c3);
        case CircleClass::General: {
            const double s2 = std::sin(theta) * std::sin(theta);
            const double c2 = 1.0 - s2;
            const double kept =
                0.5 - 0.25 * lambda_i * ((sc.c1 + sc.c2) * s2 + 2.0 * sc.c3 * c2);
            return 0.5 * classical_bound(theta) + 0.5 * kept;
        }
    }
    throw std::logic_error("unreachable");
}

namespace detail {

// Product forms of the average fidelity for the singlet-sector families.
inline double product_fidelity(double scale, double theta, std::span<const double> chain,
                               int i) {
    const double lambda_i = chain[i - 1];
    switch (classify_circle(theta)) {
        case CircleClass::Equatorial: {
            double prod = 1.0;
            for (int k = 0; k < i - 1; ++k) prod *= 1.0 + std::sqrt(1.0 - chain[k] * chain[k]);
            return 0.5 + scale * lambda_i * prod / static_cast<double>(1 << i);
        }
        case CircleClass::Pole:
            return 0.5 * (1.0 + scale * lambda_i);
        case CircleClass::General: {
            const double s2 = std::sin(theta) * std::sin(theta);
            const double c2 = 1.0 - s2;
            double prod_a = 1.0, prod_b = 1.0;
            for (int k = 0; k < i - 1; ++k) {
                const double s = std::sqrt(1.0 - chain[k] * chain[k]);
                prod_a *= c2 + s2 * s;
                prod_b *= s2 + (c2 + 1.0) * s;
            }
            const double bracket =
                c2 * prod_a + s2 * prod_b / static_cast<double>(1 << (i - 1));
            return 0.5 * classical_bound(theta) + 0.25 + 0.25 * scale * lambda_i * bracket;
        }
    }
    throw std::logic_error("unreachable");
}

}  // namespace detail

// Average preparation fidelity of observer `bob_index`, all input states on
// the agreed circle and both outcomes accounted for. Identical for both
// target choices.
inline double average_fidelity(const ProtocolConfig& cfg, std::span<const double> chain,
                               int bob_index) {
    validate_config(cfg);
    validate_chain(chain);
    validate_step(chain, bob_index, bob_index);

    if (std::holds_alternative<BellDiagonal>(cfg.family)) {
        const StateCoeffs sc = shared_state_coeffs(cfg, chain, bob_index);
        return fidelity_from_coeffs(sc, chain[bob_index - 1], cfg.theta);
    }
    return detail::product_fidelity(family_scale(cfg.family), cfg.theta, chain, bob_index);
}

// Fidelity conditioned on the receiver keeping the state. Away from the
// equator/poles this removes the classically scored rejected branch:
// f_kept = 2 f_av - f_cl.
inline double success_branch_fidelity(const ProtocolConfig& cfg, std::span<const double> chain,
                                      int bob_index) {
    if (classify_circle(cfg.theta) != CircleClass::General)
        return average_fidelity(cfg, chain, bob_index);
    const StateCoeffs sc = shared_state_coeffs(cfg, chain, bob_index);
    const double s2 = std::sin(cfg.theta) * std::sin(cfg.theta);
    const double lambda_i = chain[bob_index - 1];
    return 0.5 - 0.25 * lambda_i * ((sc.c1 + sc.c2) * s2 + 2.0 * sc.c3 * (1.0 - s2));
}

// --- quadrature route ---------------------------------------------------------

inline CMat4 numeric_shared_state(const ProtocolConfig& cfg, std::span<const double> chain,
                                  int bob_index, int nodes = kDefaultQuadratureNodes) {
    validate_config(cfg);
    validate_chain(chain);
    validate_step(chain, bob_index, bob_index - 1);
    CMat4 rho = make_initial(cfg.family);
    for (int k = 0; k < bob_index - 1; ++k)
        rho = phi_averaged_channel(rho, chain[k], cfg.theta, nodes);
    return rho;
}

namespace detail {

struct BranchCorrections {
    std::optional<CMat2> up, down;  // nullopt: reject, score the classical bound
    bool target_complement = false;
};

inline BranchCorrections branch_corrections(const ProtocolConfig& cfg) {
    const CMat2 w = down_unitary(family_kind(cfg.family));
    BranchCorrections bc;
    bc.target_complement = (cfg.target == Target::PsiPerp);
    const bool want_psi = (cfg.target == Target::Psi);
    switch (classify_circle(cfg.theta)) {
        case CircleClass::Equatorial:
            bc.up = want_psi ? pauli_z() * w : w;
            bc.down = want_psi ? w : pauli_z() * w;
            break;
        case CircleClass::Pole:
            bc.up = want_psi ? pauli_x() * w : w;
            bc.down = want_psi ? w : pauli_x() * w;
            break;
        case CircleClass::General:
            if (want_psi)
                bc.down = w;
            else
                bc.up = w;
            break;
    }
    return bc;
}

}  // namespace detail

// Average fidelity evaluated without the closed forms: the shared state is
// built by iterating the quadrature channel and the outcome-weighted fidelity
// is integrated over the target azimuth on the same uniform grid.
inline double numeric_average_fidelity(const ProtocolConfig& cfg, std::span<const double> chain,
                                       int bob_index, int nodes = kDefaultQuadratureNodes) {
    validate_step(chain, bob_index, bob_index);
    if (nodes < 16) throw std::invalid_argument("numeric_average_fidelity: nodes must be >= 16");

    const CMat4 rho = numeric_shared_state(cfg, chain, bob_index, nodes);
    const auto bc = detail::branch_corrections(cfg);
    const double f_cl = classical_bound(cfg.theta);
    const double lambda_i = chain[bob_index - 1];

    double acc = 0.0;
    for (int j = 0; j < nodes; ++j) {
        const double phi = 2.0 * kPi * static_cast<double>(j) / nodes;
        const BlochCircleState basis{cfg.theta, phi};
        const CVec2 tgt = pure_state(basis, bc.target_complement);

        const auto branch = [&](Sign sign, const std::optional<CMat2>& corr) {
            const CMat4 updated = sandwich_second(rho, sqrt_effect({lambda_i, basis, sign}));
            if (!corr) return std::real(updated.trace()) * f_cl;
            const CMat2 alice = partial_trace_second(updated);
            return expectation(*corr * alice * corr->adjoint(), tgt);
        };
        acc += branch(Sign::Plus, bc.up) + branch(Sign::Minus, bc.down);
    }
    return acc / nodes;
}

// --- cascade report -----------------------------------------------------------

struct CascadeStep {
    int bob = 0;
    double lambda = 0.0;
    double f_av = 0.0;
    double f_classical = 0.0;
    bool beats_classical = false;
    StateCoeffs coeffs;  // state in front of this observer
    double p_plus = 0.5, p_minus = 0.5;
};

struct CascadeReport {
    ProtocolConfig config;
    std::vector<CascadeStep> steps;
};

inline CascadeReport run_cascade(const ProtocolConfig& cfg, const SharpnessChain& chain) {
    validate_config(cfg);
    validate_chain(chain);
    if (chain.empty()) throw std::invalid_argument("chain: at least one sharpness value required");

    CascadeReport rep;
    rep.config = cfg;
    const double threshold = classical_threshold(cfg);
    for (int i = 1; i <= static_cast<int>(chain.size()); ++i) {
        CascadeStep st;
        st.bob = i;
        st.lambda = chain[i - 1];
        st.coeffs = shared_state_coeffs(cfg, chain, i);
        st.f_av = average_fidelity(cfg, chain, i);
        st.f_classical = threshold;
        st.beats_classical = st.f_av > threshold;
        rep.steps.push_back(st);
    }
    return rep;
}

}  // namespace seqrsp
