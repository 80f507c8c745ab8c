#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "aqsim/propagator.hpp"

// Coordinate-space variational minimization: steepest descent on the
// Rayleigh quotient with a backtracking line search, renormalizing after
// every accepted step. Stage 1 keeps a two-particle state in product form;
// stage 2 releases it to fully entangled grid amplitudes.

namespace aqsim {

struct variational_options {
    std::size_t max_iterations = 400000;
    double energy_tolerance = 1e-12;  // stop when an accepted step improves less
    double gradient_tolerance = 1e-8;
    double initial_step = 0.5;
};

struct variational_result {
    std::vector<cplx> psi;
    double energy = 0.0;
    std::size_t iterations = 0;
    std::vector<double> energy_trace;
};

namespace detail {

inline void normalize_vec(std::vector<cplx>& v) {
    double n = 0.0;
    for (const auto& a : v) n += std::norm(a);
    n = std::sqrt(n);
    for (auto& a : v) a /= n;
}

// Generic Rayleigh-quotient descent for a Hermitian operator given as a
// matrix-free apply. Deterministic; energies decrease monotonically.
inline variational_result rayleigh_descent(
    std::vector<cplx> psi, const std::function<std::vector<cplx>(const std::vector<cplx>&)>& apply,
    const variational_options& opts) {
    normalize_vec(psi);
    auto energy_of = [&](const std::vector<cplx>& v) {
        auto hv = apply(v);
        cplx num{0.0, 0.0};
        for (std::size_t i = 0; i < v.size(); ++i) num += std::conj(v[i]) * hv[i];
        return num.real();
    };

    variational_result res;
    auto hpsi = apply(psi);
    cplx e{0.0, 0.0};
    for (std::size_t i = 0; i < psi.size(); ++i) e += std::conj(psi[i]) * hpsi[i];
    double E = e.real();
    res.energy_trace.push_back(E);

    double step = opts.initial_step;
    bool converged = false;
    std::size_t it = 0;
    for (; it < opts.max_iterations; ++it) {
        // gradient of <psi|H|psi>/<psi|psi> at unit norm: 2 (H - E) psi
        std::vector<cplx> grad(psi.size());
        double gnorm2 = 0.0;
        for (std::size_t i = 0; i < psi.size(); ++i) {
            grad[i] = 2.0 * (hpsi[i] - E * psi[i]);
            gnorm2 += std::norm(grad[i]);
        }
        if (std::sqrt(gnorm2) <= opts.gradient_tolerance) {
            converged = true;
            break;
        }

        bool accepted = false;
        double t = step;
        for (int bt = 0; bt < 60; ++bt) {
            std::vector<cplx> trial(psi.size());
            for (std::size_t i = 0; i < psi.size(); ++i) trial[i] = psi[i] - t * grad[i];
            normalize_vec(trial);
            double Et = energy_of(trial);
            if (Et <= E - 1e-4 * t * gnorm2) {
                psi = std::move(trial);
                hpsi = apply(psi);
                double improvement = E - Et;
                E = Et;
                res.energy_trace.push_back(E);
                step = t * 2.0;
                accepted = true;
                if (improvement < opts.energy_tolerance) converged = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) converged = true; // no feasible descent direction left
        if (converged) break;
    }
    if (!converged) throw max_iterations("rayleigh_descent: iteration cap reached");
    res.psi = std::move(psi);
    res.energy = E;
    res.iterations = it;
    return res;
}

} // namespace detail

inline variational_result variational_minimize_single(const grid1d& g, const potential& V,
                                                      std::vector<cplx> psi0,
                                                      const variational_options& opts = {},
                                                      const units& u = units{}) {
    g.validate();
    V.validate(g);
    return detail::rayleigh_descent(
        std::move(psi0),
        [&](const std::vector<cplx>& v) { return apply_hamiltonian_grid(v, g, V, u); },
        opts);
}

// Two particles on the same grid with a pairwise interaction W(i, j).
struct two_particle_problem {
    grid1d grid;
    potential V;                                     // external, per particle
    std::function<double(std::size_t, std::size_t)> W; // interaction on grid indices
    units u{};
};

inline std::vector<cplx> apply_two_particle(const std::vector<cplx>& psi,
                                            const two_particle_problem& p) {
    const std::size_t n = p.grid.n;
    const double kin = p.u.hbar * p.u.hbar / (2.0 * p.u.default_mass * p.grid.dx * p.grid.dx);
    std::vector<cplx> out(n * n, cplx{0.0, 0.0});
    auto wrap = [&](std::ptrdiff_t i) -> std::ptrdiff_t {
        auto sn = static_cast<std::ptrdiff_t>(n);
        return ((i % sn) + sn) % sn;
    };
    const bool periodic = p.grid.boundary == boundary_kind::periodic;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            cplx c = psi[i * n + j];
            cplx lap{0.0, 0.0};
            // particle 1
            if (i > 0) lap += psi[(i - 1) * n + j];
            else if (periodic) lap += psi[wrap(-1) * n + j];
            if (i + 1 < n) lap += psi[(i + 1) * n + j];
            else if (periodic) lap += psi[0 * n + j];
            // particle 2
            if (j > 0) lap += psi[i * n + (j - 1)];
            else if (periodic) lap += psi[i * n + wrap(-1)];
            if (j + 1 < n) lap += psi[i * n + (j + 1)];
            else if (periodic) lap += psi[i * n + 0];
            out[i * n + j] = kin * (4.0 * c - lap) +
                             (p.V.values[i] + p.V.values[j] + p.W(i, j)) * c;
        }
    }
    return out;
}

struct two_stage_result {
    variational_result stage1; // product form, psi = a (x) b flattened
    variational_result stage2; // entangled amplitudes
    std::vector<cplx> orbital_a, orbital_b;
};

// Stage 1 alternates effective one-particle minimizations of the product
// ansatz; stage 2 descends over the full two-particle amplitude grid.
inline two_stage_result variational_minimize_two(const two_particle_problem& p,
                                                 std::vector<cplx> a0, std::vector<cplx> b0,
                                                 const variational_options& opts = {}) {
    const std::size_t n = p.grid.n;
    detail::normalize_vec(a0);
    detail::normalize_vec(b0);

    auto effective_potential = [&](const std::vector<cplx>& other, bool first) {
        potential eff = p.V;
        for (std::size_t i = 0; i < n; ++i) {
            double mean = 0.0;
            for (std::size_t j = 0; j < n; ++j)
                mean += (first ? p.W(i, j) : p.W(j, i)) * std::norm(other[j]);
            eff.values[i] += mean;
        }
        return eff;
    };

    auto product_energy = [&](const std::vector<cplx>& a, const std::vector<cplx>& b) {
        std::vector<cplx> prod(n * n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) prod[i * n + j] = a[i] * b[j];
        auto hp = apply_two_particle(prod, p);
        cplx e{0.0, 0.0};
        for (std::size_t k = 0; k < prod.size(); ++k) e += std::conj(prod[k]) * hp[k];
        return e.real();
    };

    variational_result stage1;
    stage1.energy = product_energy(a0, b0);
    stage1.energy_trace.push_back(stage1.energy);
    for (int sweep = 0; sweep < 64; ++sweep) {
        auto ra = variational_minimize_single(p.grid, effective_potential(b0, true), a0,
                                              opts, p.u);
        a0 = ra.psi;
        auto rb = variational_minimize_single(p.grid, effective_potential(a0, false), b0,
                                              opts, p.u);
        b0 = rb.psi;
        double e = product_energy(a0, b0);
        stage1.iterations += ra.iterations + rb.iterations;
        if (stage1.energy - e < opts.energy_tolerance * 10.0) {
            stage1.energy = std::min(stage1.energy, e);
            stage1.energy_trace.push_back(stage1.energy);
            break;
        }
        stage1.energy = e;
        stage1.energy_trace.push_back(e);
    }
    std::vector<cplx> prod(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) prod[i * n + j] = a0[i] * b0[j];
    stage1.psi = prod;

    auto stage2 = detail::rayleigh_descent(
        prod, [&](const std::vector<cplx>& v) { return apply_two_particle(v, p); }, opts);

    return {std::move(stage1), std::move(stage2), std::move(a0), std::move(b0)};
}

} // namespace aqsim
