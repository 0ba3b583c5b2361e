#pragma once

// Classical baseline: the best average fidelity reachable with one classical
// bit and no shared quantum resource, plus the two explicit preparation
// strategies it is the envelope of.

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace seqrsp {

// f_cl_max(theta) = 3/4 + (cos 2theta + sin^3 theta)/4, even about the
// equator, equal to 3/4 there and to 1 at the poles.
inline double classical_bound(double theta) {
    if (theta < 0.0 || theta > std::numbers::pi_v<double>)
        throw std::invalid_argument("classical_bound: theta outside [0, pi]");
    const double s = std::sin(theta);
    return 0.75 + 0.25 * (std::cos(2.0 * theta) + s * s * s);
}

// The sender measures n_B . sigma (direction theta_b, phi_b) and sends the
// outcome; the receiver prepares a state with azimuth phi_p1 on "up" and
// phi_p2 on "down" from the agreed circle. Case 1 derives the up-state from
// the down-state by a sigma_z rotation; case 2 picks both independently.
struct ClassicalStrategy {
    double theta_b = std::numbers::pi_v<double> / 2.0;
    double phi_b = 0.0;
    double phi_p1 = 0.0;
    double phi_p2 = std::numbers::pi_v<double>;
    int case_id = 2;
};

inline double classical_fidelity(double theta, const ClassicalStrategy& s) {
    const double sin3 = std::pow(std::sin(theta), 3);
    const double c2t = std::cos(2.0 * theta);
    const double sb = std::sin(s.theta_b);
    if (s.case_id == 1)
        return 0.75 + 0.25 * (c2t - std::cos(s.phi_b - s.phi_p2) * sin3 * sb);
    if (s.case_id == 2)
        return 0.75 + 0.25 * c2t +
               0.125 * sin3 * sb * (std::cos(s.phi_b - s.phi_p1) - std::cos(s.phi_b - s.phi_p2));
    throw std::invalid_argument("classical_fidelity: case_id must be 1 or 2");
}

struct ClassicalOptimum {
    double value = 0.0;
    ClassicalStrategy argmax;
};

// Coarse 33^3 grid over (theta_b, phi_b - phi_p1, phi_b - phi_p2) followed by
// per-coordinate golden-section refinement. The objective is a smooth
// trigonometric surface, so this lands on the global maximum.
inline ClassicalOptimum optimize_classical(double theta) {
    constexpr double kPi = std::numbers::pi_v<double>;
    const auto value = [&](double tb, double d1, double d2) {
        return classical_fidelity(theta, {tb, 0.0, -d1, -d2, 2});
    };

    double best = -1.0;
    double bt = 0.0, b1 = 0.0, b2 = 0.0;
    constexpr int kGrid = 33;
    for (int i = 0; i < kGrid; ++i)
        for (int j = 0; j < kGrid; ++j)
            for (int k = 0; k < kGrid; ++k) {
                const double tb = kPi * i / (kGrid - 1);
                const double d1 = 2.0 * kPi * j / (kGrid - 1);
                const double d2 = 2.0 * kPi * k / (kGrid - 1);
                const double f = value(tb, d1, d2);
                if (f > best) {
                    best = f;
                    bt = tb;
                    b1 = d1;
                    b2 = d2;
                }
            }

    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    const auto refine = [&](auto eval, double lo, double hi) {
        double a = lo, b = hi;
        while (b - a > 1e-10) {
            const double x1 = b - gr * (b - a);
            const double x2 = a + gr * (b - a);
            if (eval(x1) < eval(x2))
                a = x1;
            else
                b = x2;
        }
        return 0.5 * (a + b);
    };

    const double span_t = kPi / (kGrid - 1);
    const double span_p = 2.0 * kPi / (kGrid - 1);
    for (int pass = 0; pass < 4; ++pass) {
        bt = refine([&](double x) { return value(x, b1, b2); }, std::max(0.0, bt - span_t),
                    std::min(kPi, bt + span_t));
        b1 = refine([&](double x) { return value(bt, x, b2); }, b1 - span_p, b1 + span_p);
        b2 = refine([&](double x) { return value(bt, b1, x); }, b2 - span_p, b2 + span_p);
    }

    ClassicalOptimum opt;
    opt.value = value(bt, b1, b2);
    opt.argmax = {bt, 0.0, -b1, -b2, 2};
    return opt;
}

}  // namespace seqrsp
