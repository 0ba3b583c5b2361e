#pragma once

// Trajectory oracle: run the protocol measurement by measurement, sampling
// the senders' azimuths and outcomes, applying the selective state update and
// the receiver's corrections, and estimate every observer's average fidelity
// statistically.
//
// Randomness contract (reproducible across platforms):
//  - trials are processed in fixed batches of 4096; batch b (0-based) uses an
//    std::mt19937_64 engine seeded with splitmix64(seed + b);
//  - within a trial each observer consumes exactly two 53-bit uniforms, in
//    order: the azimuth phi, then the outcome draw.

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "cascade.hpp"

namespace seqrsp {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

struct BobStatistics {
    int bob = 0;
    double mean = 0.0;
    double std_error = 0.0;   // sample stddev / sqrt(trials)
    double plus_fraction = 0.0;
};

struct TrajectoryRun {
    std::uint64_t seed = 0;
    long trials = 0;
    std::vector<BobStatistics> per_bob;
};

inline TrajectoryRun simulate(const ProtocolConfig& cfg, const SharpnessChain& chain,
                              long trials, std::uint64_t seed) {
    validate_config(cfg);
    validate_chain(chain);
    if (chain.empty()) throw std::invalid_argument("simulate: empty sharpness chain");
    if (trials < 1000) throw std::invalid_argument("simulate: trials must be >= 1000");

    const auto bc = detail::branch_corrections(cfg);
    const double f_cl = classical_bound(cfg.theta);
    const CMat4 rho0 = make_initial(cfg.family);
    const int n = static_cast<int>(chain.size());

    std::vector<double> sum(n, 0.0), sum_sq(n, 0.0), plus(n, 0.0);

    constexpr long kBatch = 4096;
    const auto u53 = [](std::mt19937_64& g) {
        return static_cast<double>(g() >> 11) * 0x1.0p-53;
    };

    for (long done = 0; done < trials; done += kBatch) {
        std::mt19937_64 eng(splitmix64(seed + static_cast<std::uint64_t>(done / kBatch)));
        const long batch_end = std::min(trials, done + kBatch);
        for (long t = done; t < batch_end; ++t) {
            CMat4 rho = rho0;
            for (int i = 0; i < n; ++i) {
                const double phi = 2.0 * kPi * u53(eng);
                const BlochCircleState basis{cfg.theta, phi};

                CMat4 updated = sandwich_second(rho, sqrt_effect({chain[i], basis, Sign::Plus}));
                const double p_plus = std::real(updated.trace());
                const bool up = u53(eng) < p_plus;
                double p = p_plus;
                if (!up) {
                    updated = sandwich_second(rho, sqrt_effect({chain[i], basis, Sign::Minus}));
                    p = std::real(updated.trace());
                }
                if (p < kProbabilityFloor)
                    throw std::domain_error("simulate: outcome probability is ~0");

                const auto& corr = up ? bc.up : bc.down;
                double score;
                if (corr) {
                    const CMat2 alice = cplx(1.0 / p) * partial_trace_second(updated);
                    score = expectation(*corr * alice * corr->adjoint(),
                                        pure_state(basis, bc.target_complement));
                } else {
                    score = f_cl;
                }
                sum[i] += score;
                sum_sq[i] += score * score;
                plus[i] += up ? 1.0 : 0.0;

                rho = cplx(1.0 / p) * updated;
            }
        }
    }

    TrajectoryRun run;
    run.seed = seed;
    run.trials = trials;
    const double nt = static_cast<double>(trials);
    for (int i = 0; i < n; ++i) {
        BobStatistics st;
        st.bob = i + 1;
        st.mean = sum[i] / nt;
        const double var = std::max(0.0, (sum_sq[i] / nt - st.mean * st.mean) * nt / (nt - 1.0));
        st.std_error = std::sqrt(var / nt);
        st.plus_fraction = plus[i] / nt;
        run.per_bob.push_back(st);
    }
    return run;
}

// Fixed regression panel pairing configurations with sharpness chains whose
// analytic fidelities are known; used by the trajectory regression checks and
// the CLI --panel mode.
inline std::vector<std::pair<ProtocolConfig, SharpnessChain>> regression_panel() {
    const double eq = kPi / 2.0;
    const double tb = std::atan(std::sqrt(2.0));
    std::vector<std::pair<ProtocolConfig, SharpnessChain>> panel;
    panel.push_back({{Singlet{}, eq, Target::Psi}, {1.0}});
    panel.push_back({{Singlet{}, eq, Target::Psi}, {0.6, 1.0}});
    panel.push_back({{Singlet{}, eq, Target::Psi}, {0.5, 0.536, 0.581, 0.641, 0.725, 0.859}});
    panel.push_back({{Singlet{}, eq, Target::PsiPerp}, {0.7, 0.8, 0.9}});
    panel.push_back({{Singlet{}, kPi / 3.0, Target::Psi}, {0.8, 1.0}});
    panel.push_back({{Singlet{}, kPi / 4.0, Target::Psi}, {0.9, 1.0}});
    panel.push_back({{Singlet{}, tb, Target::Psi}, {0.7, 0.75, 0.9}});
    panel.push_back({{Singlet{}, 0.0, Target::Psi}, {0.5, 0.7}});
    panel.push_back({{Singlet{}, 2.2, Target::Psi}, {0.85, 0.95}});
    panel.push_back({{Werner{0.7}, eq, Target::Psi}, {1.0}});
    panel.push_back({{Werner{0.9}, eq, Target::Psi}, {0.6, 0.9}});
    panel.push_back({{Werner{0.8}, kPi / 3.0, Target::Psi}, {0.9, 1.0}});
    panel.push_back({{Werner{0.6}, kPi, Target::Psi}, {0.8}});
    panel.push_back({{NonMaximal{kPi / 4.0}, eq, Target::Psi}, {0.6, 1.0}});
    panel.push_back({{NonMaximal{kPi / 6.0}, eq, Target::Psi}, {0.7, 0.9}});
    panel.push_back({{NonMaximal{kPi / 8.0}, eq, Target::PsiPerp}, {0.95}});
    panel.push_back({{BellState{BellKind::PsiPlus}, eq, Target::Psi}, {0.6, 1.0}});
    panel.push_back({{BellState{BellKind::PhiPlus}, eq, Target::PsiPerp}, {0.75, 0.85}});
    panel.push_back({{BellState{BellKind::PhiMinus}, kPi / 3.0, Target::Psi}, {0.8, 1.0}});
    panel.push_back({{BellDiagonal{{-0.9, -0.9, -0.8}}, eq, Target::Psi}, {0.7, 1.0}});
    return panel;
}

}  // namespace seqrsp
