#pragma once

#include <cmath>
#include <complex>
#include <numbers>

#include "aqsim/errors.hpp"
#include "aqsim/state.hpp"
#include "aqsim/units.hpp"

// Closed-form oracles: the free-particle kernel, the spreading law of a
// resting Gaussian packet, and the standard heat kernel used for the
// Brownian comparison. The Brownian density is implemented with the squared
// displacement even though the source text drops the square.

namespace aqsim {

// K(x2,t2; x1,t1) = (2 pi i hbar (t2-t1) / m)^(-1/2) exp(i m (x2-x1)^2 / 2 hbar (t2-t1))
inline cplx free_kernel(double x2, double t2, double x1, double t1,
                        const units& u = units{}) {
    if (!(t2 > t1)) throw domain_error("free_kernel: requires t2 > t1");
    const double dt = t2 - t1;
    const cplx pref =
         cplx{0.0, 2.0 * std::numbers::pi * u.hbar * dt / u.default_mass};
    const double phase = u.default_mass * (x2 - x1) * (x2 - x1) / (2.0 * u.hbar * dt);
    return std::pow(pref, -0.5) * std::polar(1.0, phase);
}

// |K| = (2 pi hbar (t2-t1) / m)^(-1/2), independent of position.
inline double free_kernel_modulus(double t2, double t1, const units& u = units{}) {
    if (!(t2 > t1)) throw domain_error("free_kernel_modulus: requires t2 > t1");
    return 1.0 / std::sqrt(2.0 * std::numbers::pi * u.hbar * (t2 - t1) / u.default_mass);
}

// width^2(t) / width^2(0) for the resting Gaussian with amplitude
// exp(-alpha x^2 / 2): equals 1 + alpha^2 hbar^2 t^2 / m^2.
inline double spreading_width_factor(double alpha, double t, const units& u = units{}) {
    double r = alpha * u.hbar * t / u.default_mass;
    return 1.0 + r * r;
}

// Probability density of the spreading packet, normalized.
inline double spreading_density(double x, double alpha, double t,
                                const units& u = units{}) {
    double f = spreading_width_factor(alpha, t, u);
    double c = alpha / f;
    return std::sqrt(c / std::numbers::pi) * std::exp(-c * x * x);
}

// Heat kernel for u_t = C/2 u_xx from a point source.
inline double heat_kernel(double x, double x0, double C, double t) {
    if (!(t > 0.0) || !(C > 0.0)) throw domain_error("heat_kernel: requires t > 0, C > 0");
    double d = x - x0;
    return std::exp(-d * d / (2.0 * C * t)) / std::sqrt(2.0 * std::numbers::pi * C * t);
}

enum class oracle_kind {
    free_kernel,
    kernel_modulus,
    spreading_width_factor,
    spreading_density,
    heat_kernel,
};

struct oracle_params {
    double x1 = 0.0, x2 = 0.0;
    double t1 = 0.0, t2 = 0.0;
    double alpha = 1.0;
    double t = 0.0;
    double C = 1.0;
    double x0 = 0.0, x = 0.0;
    units u{};
};

inline cplx analytic_oracles(oracle_kind kind, const oracle_params& p) {
    switch (kind) {
        case oracle_kind::free_kernel: return free_kernel(p.x2, p.t2, p.x1, p.t1, p.u);
        case oracle_kind::kernel_modulus: return free_kernel_modulus(p.t2, p.t1, p.u);
        case oracle_kind::spreading_width_factor:
            return spreading_width_factor(p.alpha, p.t, p.u);
        case oracle_kind::spreading_density:
            return spreading_density(p.x, p.alpha, p.t, p.u);
        case oracle_kind::heat_kernel: return heat_kernel(p.x, p.x0, p.C, p.t);
    }
    throw domain_error("analytic_oracles: unknown kind");
}

} // namespace aqsim
