#pragma once

// Feasibility analysis over the sharpness parameters: minimum sharpness per
// observer, infimum chains, the maximum observer count, and the parameter
// boundary tables over the circle angle, the pure-state parameter and the
// Werner visibility.

#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "cascade.hpp"

namespace seqrsp {

// Smallest sharpness for observer `bob_index` that beats the classical
// threshold, given the predecessors' sharpness values. The fidelity is linear
// in the new sharpness, so this is an exact inversion through two closed-form
// evaluations; values > 1 mean infeasible, +inf means the quantum term has a
// non-positive slope.
inline double lambda_min(const ProtocolConfig& cfg, int bob_index,
                         std::span<const double> prefix) {
    validate_step(prefix, bob_index, bob_index - 1);
    SharpnessChain chain(prefix.begin(), prefix.begin() + (bob_index - 1));
    chain.push_back(0.0);
    const double f0 = average_fidelity(cfg, chain, bob_index);
    chain.back() = 1.0;
    const double slope = average_fidelity(cfg, chain, bob_index) - f0;
    if (slope <= 0.0) return std::numeric_limits<double>::infinity();
    return (classical_threshold(cfg) - f0) / slope;
}

// Cross-check root finder for the same quantity.
inline double lambda_min_bisect(const ProtocolConfig& cfg, int bob_index,
                                std::span<const double> prefix, double tol = 1e-10) {
    validate_step(prefix, bob_index, bob_index - 1);
    SharpnessChain chain(prefix.begin(), prefix.begin() + (bob_index - 1));
    chain.push_back(1.0);
    const double threshold = classical_threshold(cfg);
    if (average_fidelity(cfg, chain, bob_index) <= threshold)
        return std::numeric_limits<double>::infinity();
    double lo = 0.0, hi = 1.0;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        chain.back() = mid;
        (average_fidelity(cfg, chain, bob_index) > threshold ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

struct FeasibilityResult {
    ProtocolConfig config;
    // One entry per observer up to and including the first infeasible one
    // (reported as its > 1 requirement).
    std::vector<double> lambda_mins;
    int n_max = 0;  // number of observers with lambda_min < 1
};

// Infimum chain: every observer in turn takes the limiting minimal sharpness
// of its feasible interval.
inline FeasibilityResult min_chain(const ProtocolConfig& cfg, int max_bobs_considered) {
    if (max_bobs_considered < 1 || max_bobs_considered > kMaxChainLength)
        throw std::invalid_argument("min_chain: observer count outside [1, 12]");
    validate_config(cfg);

    FeasibilityResult r;
    r.config = cfg;
    SharpnessChain chain;
    for (int i = 1; i <= max_bobs_considered; ++i) {
        const double lm = lambda_min(cfg, i, chain);
        r.lambda_mins.push_back(lm);
        if (!(lm < 1.0)) break;
        chain.push_back(lm);
        ++r.n_max;
    }
    return r;
}

inline int max_bobs(const ProtocolConfig& cfg) {
    return min_chain(cfg, kMaxChainLength).n_max;
}

// --- boundary tables ----------------------------------------------------------

enum class BoundaryAxis { Theta, Xi, WernerC };

struct BoundaryInterval {
    double lo = 0.0, hi = 0.0;
    bool lo_closed = false, hi_closed = true;
};

struct BoundaryRow {
    int n = 0;
    std::vector<BoundaryInterval> intervals;
};

namespace detail {

// First axis value (scanning upward) at which at least `want` observers
// succeed, located by bisection.
template <typename NFn>
double transition_point(NFn&& n_of, double lo, double hi, int want, double resolution) {
    if (n_of(hi) < want) throw std::logic_error("transition_point: not bracketed");
    while (n_of(lo) >= want) lo *= 0.5;  // should not trigger for sane brackets
    while (hi - lo > resolution) {
        const double mid = 0.5 * (lo + hi);
        (n_of(mid) >= want ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace detail

// Transition table of the maximum observer count along one family parameter.
// Axis conventions: Theta sweeps the circle angle for the singlet family
// (symmetric about pi/2), Xi the pure-state parameter at the equator
// (symmetric about pi/4), WernerC the visibility at the equator.
inline std::vector<BoundaryRow> boundary_table(BoundaryAxis axis, double resolution = 1e-5) {
    if (!(resolution > 0.0 && resolution <= 1e-2))
        throw std::invalid_argument("boundary_table: resolution outside (0, 1e-2]");

    std::vector<BoundaryRow> rows;
    switch (axis) {
        case BoundaryAxis::Theta: {
            const auto n_of = [](double th) {
                return max_bobs({Singlet{}, th, Target::Psi});
            };
            // n(theta) climbs from 1 near the poles to 6 at the equator.
            std::vector<double> t(7, 0.0);
            for (int k = 2; k <= 6; ++k)
                t[k] = detail::transition_point(n_of, 1e-3, kPi / 2.0, k, resolution);
            rows.push_back({1, {{0.0, t[2], false, true}, {kPi - t[2], kPi, true, false}}});
            for (int k = 2; k <= 5; ++k)
                rows.push_back({k,
                                {{t[k], t[k + 1], false, true},
                                 {kPi - t[k + 1], kPi - t[k], true, false}}});
            rows.push_back({6, {{t[6], kPi - t[6], false, false}}});
            break;
        }
        case BoundaryAxis::Xi: {
            const auto n_of = [](double xi) {
                return max_bobs({NonMaximal{xi}, kPi / 2.0, Target::Psi});
            };
            std::vector<double> t(7, 0.0);
            for (int k = 1; k <= 6; ++k)
                t[k] = detail::transition_point(n_of, 1e-3, kPi / 4.0, k, resolution);
            rows.push_back(
                {0, {{0.0, t[1], true, true}, {kPi / 2.0 - t[1], kPi / 2.0, true, true}}});
            for (int k = 1; k <= 5; ++k)
                rows.push_back({k,
                                {{t[k], t[k + 1], false, true},
                                 {kPi / 2.0 - t[k + 1], kPi / 2.0 - t[k], true, false}}});
            rows.push_back({6, {{t[6], kPi / 2.0 - t[6], false, false}}});
            break;
        }
        case BoundaryAxis::WernerC: {
            const auto n_of = [](double c) {
                return max_bobs({Werner{c}, kPi / 2.0, Target::Psi});
            };
            std::vector<double> t(7, 0.0);
            for (int k = 1; k <= 6; ++k)
                t[k] = detail::transition_point(n_of, 1e-3, 1.0, k, resolution);
            rows.push_back({0, {{0.0, t[1], true, true}}});
            for (int k = 1; k <= 5; ++k) rows.push_back({k, {{t[k], t[k + 1], false, true}}});
            rows.push_back({6, {{t[6], 1.0, false, true}}});
            break;
        }
    }
    return rows;
}

}  // namespace seqrsp
