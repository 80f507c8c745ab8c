#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "aqsim/grid.hpp"
#include "aqsim/state.hpp"
#include "aqsim/units.hpp"

// Deterministic finite-difference propagation of the one-dimensional
// Schroedinger equation. The step is the implicit-midpoint (Cayley) form
//   (1 + i dt H / 2 hbar) psi' = (1 - i dt H / 2 hbar) psi
// with the 3-point Laplacian, which is exactly unitary in exact arithmetic.

namespace aqsim {

struct propagator_config {
    double dt = 1e-3;
    std::size_t steps_per_output = 1;

    void validate() const {
        if (!(dt > 0.0)) throw domain_error("propagator_config: dt must be positive");
    }
};

namespace detail {

// Thomas algorithm for a tridiagonal system with constant off-diagonal.
inline std::vector<cplx> solve_tridiag(std::vector<cplx> diag, cplx off,
                                       std::vector<cplx> rhs) {
    const std::size_t n = diag.size();
    for (std::size_t i = 1; i < n; ++i) {
        cplx w = off / diag[i - 1];
        diag[i] -= w * off;
        rhs[i] -= w * rhs[i - 1];
    }
    std::vector<cplx> x(n);
    x[n - 1] = rhs[n - 1] / diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = (rhs[i] - off * x[i + 1]) / diag[i];
    return x;
}

// Sherman-Morrison correction for the periodic corner elements.
inline std::vector<cplx> solve_cyclic_tridiag(const std::vector<cplx>& diag, cplx off,
                                              const std::vector<cplx>& rhs) {
    const std::size_t n = diag.size();
    const cplx gamma = -diag[0];
    std::vector<cplx> d = diag;
    d[0] -= gamma;
    d[n - 1] -= off * off / gamma;
    std::vector<cplx> u(n, cplx{0.0, 0.0});
    u[0] = gamma;
    u[n - 1] = off;
    auto y = solve_tridiag(d, off, rhs);
    auto z = solve_tridiag(d, off, u);
    cplx vy = y[0] + off / gamma * y[n - 1];
    cplx vz = z[0] + off / gamma * z[n - 1];
    cplx f = vy / (1.0 + vz);
    std::vector<cplx> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = y[i] - f * z[i];
    return x;
}

} // namespace detail

// H psi with H = -hbar^2/2m Laplacian + V.
inline std::vector<cplx> apply_hamiltonian_grid(const std::vector<cplx>& psi,
                                                const grid1d& g, const potential& V,
                                                const units& u = units{}) {
    const double kin = u.hbar * u.hbar / (2.0 * u.default_mass * g.dx * g.dx);
    const std::size_t n = g.n;
    std::vector<cplx> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        cplx left = (i > 0) ? psi[i - 1]
                            : (g.boundary == boundary_kind::periodic ? psi[n - 1] : cplx{});
        cplx right = (i + 1 < n) ? psi[i + 1]
                                 : (g.boundary == boundary_kind::periodic ? psi[0] : cplx{});
        out[i] = kin * (2.0 * psi[i] - left - right) + V.values[i] * psi[i];
    }
    return out;
}

inline double grid_energy(const std::vector<cplx>& psi, const grid1d& g,
                          const potential& V, const units& u = units{}) {
    auto hpsi = apply_hamiltonian_grid(psi, g, V, u);
    cplx num{0.0, 0.0};
    double den = 0.0;
    for (std::size_t i = 0; i < g.n; ++i) {
        num += std::conj(psi[i]) * hpsi[i];
        den += std::norm(psi[i]);
    }
    return num.real() / den;
}

// Documented step bound: beyond this the Cayley rational function no longer
// tracks exp(-i H dt / hbar) for the stiffest grid mode.
inline double max_stable_dt(const grid1d& g, const potential& V, const units& u = units{}) {
    double vmax = *std::max_element(V.values.begin(), V.values.end());
    double vmin = *std::min_element(V.values.begin(), V.values.end());
    double lambda_max = 2.0 * u.hbar * u.hbar / (u.default_mass * g.dx * g.dx) + (vmax - vmin);
    return 10.0 * u.hbar / lambda_max;
}

// One Cayley step; negative dt propagates backwards in time.
inline std::vector<cplx> evolve_step(const std::vector<cplx>& psi, const grid1d& g,
                                     const potential& V, double dt,
                                     const units& u = units{}) {
    g.validate();
    V.validate(g);
    if (psi.size() != g.n) throw dimension_mismatch("evolve_step: psi size != grid");
    if (std::abs(dt) > max_stable_dt(g, V, u))
        throw stability_error("evolve_step: |dt| exceeds documented bound " +
                              std::to_string(max_stable_dt(g, V, u)));
    if (dt == 0.0) return psi;

    const double kin = u.hbar * u.hbar / (2.0 * u.default_mass * g.dx * g.dx);
    const cplx ihalf = cplx{0.0, dt / (2.0 * u.hbar)};
    const cplx off = -ihalf * kin;
    std::vector<cplx> diag(g.n);
    for (std::size_t i = 0; i < g.n; ++i)
        diag[i] = 1.0 + ihalf * (2.0 * kin + V.values[i]);

    // rhs = (1 - i dt H / 2 hbar) psi
    std::vector<cplx> rhs(g.n);
    auto hpsi = apply_hamiltonian_grid(psi, g, V, u);
    for (std::size_t i = 0; i < g.n; ++i) rhs[i] = psi[i] - ihalf * hpsi[i];

    if (g.boundary == boundary_kind::periodic)
        return detail::solve_cyclic_tridiag(diag, off, rhs);
    return detail::solve_tridiag(std::move(diag), off, std::move(rhs));
}

// ---------------------------------------------------------------------------
// Division points with continuous positions: cells are drawn from |psi|^2 and
// the position inside a cell follows the cubic-interpolated density.

inline double density_at(const std::vector<cplx>& psi, const grid1d& g, double s) {
    // Catmull-Rom interpolation of |psi|^2 at fractional index s.
    auto dens = [&](std::ptrdiff_t i) -> double {
        if (g.boundary == boundary_kind::periodic) {
            std::ptrdiff_t n = static_cast<std::ptrdiff_t>(g.n);
            return std::norm(psi[static_cast<std::size_t>(((i % n) + n) % n)]);
        }
        if (i < 0 || i >= static_cast<std::ptrdiff_t>(g.n)) return 0.0;
        return std::norm(psi[static_cast<std::size_t>(i)]);
    };
    double fi = std::floor(s);
    double t = s - fi;
    auto i = static_cast<std::ptrdiff_t>(fi);
    double p0 = dens(i - 1), p1 = dens(i), p2 = dens(i + 1), p3 = dens(i + 2);
    double a = -0.5 * p0 + 1.5 * p1 - 1.5 * p2 + 0.5 * p3;
    double b = p0 - 2.5 * p1 + 2.0 * p2 - 0.5 * p3;
    double c = -0.5 * p0 + 0.5 * p2;
    double v = ((a * t + b) * t + c) * t + p1;
    return std::max(v, 0.0);
}

inline std::vector<double> division_points_continuous(const std::vector<cplx>& psi,
                                                      const grid1d& g, double gq,
                                                      std::uint64_t seed) {
    if (!(gq > 0.0)) throw domain_error("division_points: g must be positive");
    const auto count = static_cast<std::size_t>(std::ceil(1.0 / (gq * gq)));
    std::vector<double> cdf(g.n);
    double acc = 0.0;
    for (std::size_t i = 0; i < g.n; ++i) {
        acc += std::norm(psi[i]);
        cdf[i] = acc;
    }
    std::vector<double> pts(count);
    constexpr int sub = 4;
    for (std::size_t d = 0; d < count; ++d) {
        double u = rng::uniform01(rng::draw(seed, 2, d)) * acc;
        auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
        auto cell = static_cast<std::size_t>(std::min<std::ptrdiff_t>(
            it - cdf.begin(), static_cast<std::ptrdiff_t>(g.n) - 1));
        // interpolated sub-cell placement
        double w[sub];
        double tot = 0.0;
        for (int k = 0; k < sub; ++k) {
            w[k] = density_at(psi, g, double(cell) - 0.5 + (k + 0.5) / sub);
            tot += w[k];
        }
        double v = rng::uniform01(rng::draw(seed, 3, d)) * tot;
        int k = 0;
        for (; k < sub - 1; ++k) {
            if (v < w[k]) break;
            v -= w[k];
        }
        double frac = (tot > 0.0) ? (k + 0.5) / sub - 0.5 : 0.0;
        pts[d] = g.x(cell) + frac * g.dx;
    }
    return pts;
}

// Evolution of the pair (psi, P): lock-step state update and resampling of
// the division points from the new density.
struct pair_state {
    std::vector<cplx> psi;
    std::vector<double> points;
};

inline pair_state evolve_pair(const pair_state& in, const grid1d& g, const potential& V,
                              double dt, double gq, std::uint64_t seed,
                              const units& u = units{}) {
    pair_state out;
    out.psi = evolve_step(in.psi, g, V, dt, u);
    out.points = division_points_continuous(out.psi, g, gq, seed);
    return out;
}

// ---------------------------------------------------------------------------
// Conversions between dense grid vectors and grained states.

inline grained_wavefunction to_grained(const std::vector<cplx>& psi, const grid1d& g,
                                       grain_policy grain = grain_policy{}) {
    grained_wavefunction out;
    out.grain = grain;
    out.basis_meta = grid_meta{g.n, g.dx, g.origin};
    for (std::size_t i = 0; i < psi.size(); ++i)
        if (std::abs(psi[i]) > 0.0) out.entries.emplace_back(i, psi[i]);
    return out;
}

inline std::vector<cplx> to_dense(const grained_wavefunction& psi, std::size_t n) {
    std::vector<cplx> out(n, cplx{0.0, 0.0});
    for (const auto& [l, a] : psi.entries) out.at(l) = a;
    return out;
}

inline std::vector<cplx> gaussian_packet(const grid1d& g, double center, double sigma,
                                         double momentum = 0.0, const units& u = units{}) {
    std::vector<cplx> psi(g.n);
    for (std::size_t i = 0; i < g.n; ++i) {
        double d = g.x(i) - center;
        psi[i] = std::polar(std::exp(-d * d / (4.0 * sigma * sigma)),
                            momentum * g.x(i) / u.hbar);
    }
    double nrm = 0.0;
    for (auto& a : psi) nrm += std::norm(a);
    nrm = std::sqrt(nrm);
    for (auto& a : psi) a /= nrm;
    return psi;
}

inline double density_mean(const std::vector<cplx>& psi, const grid1d& g) {
    double m = 0.0, w = 0.0;
    for (std::size_t i = 0; i < g.n; ++i) {
        m += g.x(i) * std::norm(psi[i]);
        w += std::norm(psi[i]);
    }
    return m / w;
}

inline double density_variance(const std::vector<cplx>& psi, const grid1d& g) {
    double mu = density_mean(psi, g);
    double v = 0.0, w = 0.0;
    for (std::size_t i = 0; i < g.n; ++i) {
        double d = g.x(i) - mu;
        v += d * d * std::norm(psi[i]);
        w += std::norm(psi[i]);
    }
    return v / w;
}

} // namespace aqsim
