#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <thread>
#include <vector>

#include "aqsim/errors.hpp"
#include "aqsim/rng.hpp"
#include "aqsim/state.hpp"
#include "aqsim/units.hpp"

// Bound amplitude-quantum Monte Carlo: an ensemble of fictitious particle
// copies, each carrying a position on the eps_x lattice, a velocity and a
// complex amplitude. Amplitudes pick up exp(i dS / hbar) per flight segment
// with the Lagrangian evaluated at the middle of the way; the wavefunction
// is recovered by summing amplitudes over delta-cells.

namespace aqsim {

struct lagrangian {
    double mass = 1.0;
    std::function<double(double)> V = [](double) { return 0.0; };

    double eval(double x, double v) const { return 0.5 * mass * v * v - V(x); }
};

struct bound_quantum {
    std::uint64_t id = 0;
    std::int64_t node = 0;   // lattice node, pitch eps_x
    double frac = 0.0;       // sub-node residue in [0, 1)
    double v = 0.0;
    cplx amp{0.0, 0.0};
    double t_last = 0.0;     // last collision (staleness clock)
    double t_phase = 0.0;    // time the phase is settled to
};

enum class collision_mode { epoch, poisson };

struct bubble_config {
    double eps_x = 1.0 / 64.0;      // lattice pitch
    std::size_t cells_per_delta = 4; // r: accumulation cell = r * eps_x
    std::int64_t n_nodes = 1024;
    double origin = -8.0;
    double v_max = 4.0;
    double mass = 1.0;
    double stale_time = 1e30;
    collision_mode mode = collision_mode::epoch;
    double collision_period = 0.125; // epoch mode
    double poisson_rate = 8.0;       // poisson mode
    std::uint64_t seed = 1;
    std::size_t threads = 1;
    units u{};

    double micro_dt() const { return eps_x / v_max; }
    std::size_t n_cells() const {
        return static_cast<std::size_t>((n_nodes + static_cast<std::int64_t>(cells_per_delta) - 1) /
                                        static_cast<std::int64_t>(cells_per_delta));
    }
    double cell_width() const { return eps_x * static_cast<double>(cells_per_delta); }
    double cell_center(std::size_t c) const {
        return origin + cell_width() * (static_cast<double>(c) + 0.5);
    }

    void validate() const {
        u.validate();
        if (!(eps_x > 0.0)) throw domain_error("bubble_config: eps_x must be positive");
        if (cells_per_delta == 0) throw domain_error("bubble_config: cells_per_delta >= 1");
        if (n_nodes < 2) throw domain_error("bubble_config: n_nodes too small");
        if (!(v_max > 0.0)) throw domain_error("bubble_config: v_max must be positive");
        if (v_max > u.light_speed)
            throw speed_cap("bubble_config: v_max exceeds light_speed");
    }
};

namespace slot {
inline constexpr std::uint64_t init_cell = 1;
inline constexpr std::uint64_t init_node = 2;
inline constexpr std::uint64_t init_v = 3;
inline constexpr std::uint64_t collide_v = 4;
inline constexpr std::uint64_t poisson = 5;
inline constexpr std::uint64_t recycle_cell = 6;
inline constexpr std::uint64_t recycle_node = 7;
inline constexpr std::uint64_t recycle_v = 8;
inline constexpr std::uint64_t pair_pick = 9;
inline constexpr std::uint64_t osc_xv = 10;
inline constexpr std::uint64_t osc_x0 = 11;
} // namespace slot

struct bubble {
    std::vector<bound_quantum> quanta;
    bubble_config cfg;
    double t_now = 0.0;
    std::uint64_t step_index = 0;   // micro-step counter, drives the rng
    std::uint64_t reinject_epoch = 0;

    double position(const bound_quantum& q) const {
        return cfg.origin + (static_cast<double>(q.node) + q.frac) * cfg.eps_x;
    }
    std::size_t cell_of(const bound_quantum& q) const {
        return static_cast<std::size_t>(q.node) / cfg.cells_per_delta;
    }
};

// Action of one straight flight segment ending at x_end with velocity v:
// dS = L(midpoint) * dt, the Lagrangian taken in the middle of the way.
inline double segment_action(const lagrangian& L, double x_end, double v, double dt) {
    double x_mid = x_end - 0.5 * v * dt;
    return L.eval(x_mid, v) * dt;
}

namespace detail {

inline void settle_phase(bound_quantum& q, double t_to, const lagrangian& L,
                         const bubble& b) {
    double dt = t_to - q.t_phase;
    if (dt <= 0.0) return;
    double dS = segment_action(L, b.position(q), q.v, dt);
    q.amp *= std::polar(1.0, dS / b.cfg.u.hbar);
    q.t_phase = t_to;
}

inline void parallel_for(std::size_t n, std::size_t threads,
                         const std::function<void(std::size_t, std::size_t)>& fn) {
    if (threads <= 1 || n < 2048) {
        fn(0, n);
        return;
    }
    std::vector<std::thread> pool;
    std::size_t chunk = (n + threads - 1) / threads;
    for (std::size_t t = 0; t < threads; ++t) {
        std::size_t lo = t * chunk;
        std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back(fn, lo, hi);
    }
    for (auto& th : pool) th.join();
}

} // namespace detail

// ---------------------------------------------------------------------------
// init_bubble: draw positions with probability proportional to |psi| per
// cell and give every quantum the same modulus and the local phase, so that
// cell sums reproduce psi up to multinomial noise.
inline bubble init_bubble(const grained_wavefunction& psi, std::size_t n_quanta,
                          const bubble_config& cfg) {
    cfg.validate();
    if (n_quanta < 1000) throw domain_error("init_bubble: need at least 1e3 quanta");
    bubble b;
    b.cfg = cfg;
    b.quanta.resize(n_quanta);

    std::vector<double> cdf;
    std::vector<std::size_t> cells;
    std::vector<double> phases;
    cdf.reserve(psi.entries.size());
    double acc = 0.0;
    for (const auto& [l, a] : psi.entries) {
        if (std::abs(a) == 0.0) continue;
        acc += std::abs(a);
        cdf.push_back(acc);
        cells.push_back(static_cast<std::size_t>(l));
        phases.push_back(std::arg(a));
    }
    if (cdf.empty()) throw domain_error("init_bubble: zero state");

    const double m0 = 1.0 / static_cast<double>(n_quanta);
    const auto r = static_cast<std::int64_t>(cfg.cells_per_delta);
    for (std::size_t i = 0; i < n_quanta; ++i) {
        auto& q = b.quanta[i];
        q.id = i;
        double u = rng::uniform01(rng::draw(cfg.seed, i, 0, slot::init_cell)) * acc;
        auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
        std::size_t k = std::min<std::size_t>(it - cdf.begin(), cdf.size() - 1);
        std::size_t c = cells[k];
        if (static_cast<std::int64_t>(c) * r >= cfg.n_nodes)
            throw domain_error("init_bubble: state cell outside the lattice");
        auto off = static_cast<std::int64_t>(
            rng::pick(rng::draw(cfg.seed, i, 0, slot::init_node), cfg.cells_per_delta));
        q.node = static_cast<std::int64_t>(c) * r + off;
        q.frac = 0.0;
        q.v = rng::uniform(rng::draw(cfg.seed, i, 0, slot::init_v), -cfg.v_max, cfg.v_max);
        q.amp = std::polar(m0, phases[k]);
        q.t_last = 0.0;
        q.t_phase = 0.0;
    }
    return b;
}

// accumulate: psi(cell) = sum of amplitudes of the quanta inside it,
// globally normalized. Deterministic for a given bubble.
inline grained_wavefunction accumulate_raw(const bubble& b) {
    std::vector<cplx> sums(b.cfg.n_cells(), cplx{0.0, 0.0});
    for (const auto& q : b.quanta) sums[b.cell_of(q)] += q.amp;
    grained_wavefunction psi;
    psi.grain = grain_policy{};
    psi.basis_meta = grid_meta{b.cfg.n_cells(), b.cfg.cell_width(),
                               b.cfg.origin + 0.5 * b.cfg.cell_width()};
    for (std::size_t c = 0; c < sums.size(); ++c)
        if (std::abs(sums[c]) > 0.0) psi.entries.emplace_back(c, sums[c]);
    return psi;
}

inline grained_wavefunction accumulate(const bubble& b) {
    auto psi = accumulate_raw(b);
    if (psi.entries.empty()) throw empty_bubble("accumulate: no quanta");
    psi.normalize();
    return psi;
}

// ---------------------------------------------------------------------------
// step_ensemble: advance every quantum for a time dt in lattice micro-steps.
// Collisions settle the accumulated phase and redraw the velocity; between
// them quanta fly ballistically. No quantum may skip a lattice node.
inline void step_ensemble(bubble& b, const lagrangian& L, double dt) {
    if (!(dt > 0.0)) throw domain_error("step_ensemble: dt must be positive");
    const double mdt = b.cfg.micro_dt();
    auto n_micro = static_cast<std::size_t>(std::llround(dt / mdt));
    if (n_micro == 0 || std::abs(n_micro * mdt - dt) > 1e-9 * std::max(1.0, dt))
        throw domain_error("step_ensemble: dt must be a multiple of the micro step");
    if (b.cfg.v_max * mdt > b.cfg.eps_x * (1.0 + 1e-12))
        throw speed_cap("step_ensemble: micro step skips lattice nodes");

    std::size_t epoch_every = 0;
    if (b.cfg.mode == collision_mode::epoch) {
        epoch_every = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::llround(b.cfg.collision_period / mdt)));
    }
    const double nmax = static_cast<double>(b.cfg.n_nodes);

    for (std::size_t s = 0; s < n_micro; ++s) {
        const std::uint64_t step_id = b.step_index + 1;
        const double t_after = b.t_now + mdt;
        const bool epoch_hit = epoch_every && (step_id % epoch_every == 0);

        detail::parallel_for(
            b.quanta.size(), b.cfg.threads, [&](std::size_t lo, std::size_t hi) {
                for (std::size_t i = lo; i < hi; ++i) {
                    auto& q = b.quanta[i];
                    double p = static_cast<double>(q.node) + q.frac +
                               q.v * mdt / b.cfg.eps_x;
                    if (p < 0.0 || p >= nmax) {
                        // elastic wall: settle the phase, then bounce
                        detail::settle_phase(q, t_after, L, b);
                        p = (p < 0.0) ? -p : 2.0 * nmax - p;
                        p = std::clamp(p, 0.0, std::nexttoward(nmax, 0.0));
                        q.v = -q.v;
                    }
                    double fl = std::floor(p);
                    q.node = static_cast<std::int64_t>(fl);
                    q.frac = p - fl;
                    if (q.node >= b.cfg.n_nodes) { q.node = b.cfg.n_nodes - 1; q.frac = 0.0; }

                    bool collide = epoch_hit;
                    if (b.cfg.mode == collision_mode::poisson) {
                        double u01 = rng::uniform01(
                            rng::draw(b.cfg.seed, q.id, step_id, slot::poisson));
                        collide = u01 < b.cfg.poisson_rate * mdt;
                    }
                    if (collide) {
                        detail::settle_phase(q, t_after, L, b);
                        q.v = rng::uniform(
                            rng::draw(b.cfg.seed, q.id, step_id, slot::collide_v),
                            -b.cfg.v_max, b.cfg.v_max);
                        q.t_last = t_after;
                    }
                }
            });
        b.t_now = t_after;
        b.step_index = step_id;
    }
    // settle outstanding phase so accumulate() sees e^{iS/hbar} up to t_now
    detail::parallel_for(b.quanta.size(), b.cfg.threads,
                         [&](std::size_t lo, std::size_t hi) {
                             for (std::size_t i = lo; i < hi; ++i)
                                 detail::settle_phase(b.quanta[i], b.t_now, L, b);
                         });
}

// ---------------------------------------------------------------------------
// recycle: the norming administrative signal. Quanta that have not collided
// for stale_time are removed and the same number is reinjected with cells
// drawn from the current accumulated |psi|^2; amplitudes carry importance
// weights so the accumulated state is preserved in expectation.
inline std::size_t recycle(bubble& b, const grained_wavefunction* reference = nullptr) {
    if (b.quanta.empty()) throw empty_bubble("recycle: no quanta");
    std::vector<std::size_t> stale;
    for (std::size_t i = 0; i < b.quanta.size(); ++i)
        if (b.t_now - b.quanta[i].t_last > b.cfg.stale_time) stale.push_back(i);
    if (stale.empty()) return 0;

    grained_wavefunction ref;
    if (reference) {
        ref = *reference;
    } else {
        // survivors define the reference; fall back to the whole bubble
        bubble surv;
        surv.cfg = b.cfg;
        std::size_t si = 0;
        for (std::size_t i = 0; i < b.quanta.size(); ++i) {
            if (si < stale.size() && stale[si] == i) { ++si; continue; }
            surv.quanta.push_back(b.quanta[i]);
        }
        ref = surv.quanta.empty() ? accumulate(b) : accumulate(surv);
    }

    double l1 = 0.0, l2 = 0.0;
    for (const auto& [c, a] : ref.entries) { l1 += std::abs(a); l2 += std::norm(a); }
    if (l1 == 0.0) throw empty_bubble("recycle: empty reference state");

    // removed amplitude mass, redistributed along ref
    double removed_mass = 0.0;
    for (std::size_t i : stale) removed_mass += std::abs(b.quanta[i].amp);

    std::vector<double> cdf(ref.entries.size());
    double acc = 0.0;
    for (std::size_t k = 0; k < ref.entries.size(); ++k) {
        acc += std::norm(ref.entries[k].second) / l2;
        cdf[k] = acc;
    }
    ++b.reinject_epoch;
    const auto r = static_cast<std::int64_t>(b.cfg.cells_per_delta);
    for (std::size_t j = 0; j < stale.size(); ++j) {
        auto& q = b.quanta[stale[j]];
        std::uint64_t key = (b.reinject_epoch << 20) + j;
        double u = rng::uniform01(rng::draw(b.cfg.seed, key, 1, slot::recycle_cell)) * acc;
        auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
        std::size_t k = std::min<std::size_t>(it - cdf.begin(), cdf.size() - 1);
        auto cell = static_cast<std::int64_t>(ref.entries[k].first);
        double p_k = std::norm(ref.entries[k].second) / l2;
        cplx target = removed_mass * ref.entries[k].second / l1;
        q.amp = target / (static_cast<double>(stale.size()) * p_k);
        q.node = cell * r + static_cast<std::int64_t>(rng::pick(
                     rng::draw(b.cfg.seed, key, 1, slot::recycle_node), b.cfg.cells_per_delta));
        q.frac = 0.0;
        q.v = rng::uniform(rng::draw(b.cfg.seed, key, 1, slot::recycle_v),
                           -b.cfg.v_max, b.cfg.v_max);
        q.t_last = b.t_now;
        q.t_phase = b.t_now;
    }
    return stale.size();
}

// ---------------------------------------------------------------------------
// r_reduce: annihilate antithetic pairs (phase difference pi within tol,
// comparable modulus) inside each cell, then reinject the removed count as
// opposite-phase pairs on the current support so the accumulated state and
// the quanta count are both preserved.
inline std::size_t r_reduce(bubble& b, double phase_tol = 1e-3) {
    if (b.quanta.empty()) return 0;
    const double two_pi = 2.0 * std::numbers::pi;
    std::vector<std::vector<std::size_t>> by_cell(b.cfg.n_cells());
    for (std::size_t i = 0; i < b.quanta.size(); ++i)
        by_cell[b.cell_of(b.quanta[i])].push_back(i);

    std::vector<std::size_t> removed;
    for (auto& idxs : by_cell) {
        if (idxs.size() < 2) continue;
        std::vector<std::pair<double, std::size_t>> ph;
        ph.reserve(idxs.size());
        for (std::size_t i : idxs) {
            double a = std::arg(b.quanta[i].amp);
            if (a < 0.0) a += two_pi;
            ph.emplace_back(a, i);
        }
        std::sort(ph.begin(), ph.end());
        std::vector<bool> used(ph.size(), false);
        auto try_window = [&](std::size_t a, double lo_phase, double hi_phase) {
            auto lo = std::lower_bound(ph.begin(), ph.end(),
                                       std::make_pair(lo_phase, std::size_t{0}));
            for (auto it = lo; it != ph.end() && it->first <= hi_phase; ++it) {
                std::size_t bidx = static_cast<std::size_t>(it - ph.begin());
                if (used[bidx] || bidx == a) continue;
                double ma = std::abs(b.quanta[ph[a].second].amp);
                double mb = std::abs(b.quanta[it->second].amp);
                if (ma > 1.1 * mb || mb > 1.1 * ma) continue;
                used[a] = used[bidx] = true;
                removed.push_back(ph[a].second);
                removed.push_back(it->second);
                return true;
            }
            return false;
        };
        for (std::size_t a = 0; a < ph.size(); ++a) {
            if (used[a]) continue;
            double want = ph[a].first + std::numbers::pi;
            if (want >= two_pi) want -= two_pi;
            if (try_window(a, want - phase_tol, want + phase_tol)) continue;
            // wrapped windows at the 0/2pi seam
            if (want - phase_tol < 0.0)
                try_window(a, want - phase_tol + two_pi, two_pi);
            else if (want + phase_tol > two_pi)
                try_window(a, 0.0, want + phase_tol - two_pi);
        }
    }
    if (removed.empty()) return 0;

    auto ref = accumulate(b);
    double l2 = 0.0;
    for (const auto& [c, a] : ref.entries) l2 += std::norm(a);
    std::vector<double> cdf(ref.entries.size());
    double acc = 0.0;
    for (std::size_t k = 0; k < ref.entries.size(); ++k) {
        acc += std::norm(ref.entries[k].second) / l2;
        cdf[k] = acc;
    }
    double m0 = 0.0;
    for (std::size_t i : removed) m0 += std::abs(b.quanta[i].amp);
    m0 /= static_cast<double>(removed.size());

    ++b.reinject_epoch;
    const auto r = static_cast<std::int64_t>(b.cfg.cells_per_delta);
    for (std::size_t j = 0; j < removed.size(); ++j) {
        auto& q = b.quanta[removed[j]];
        std::uint64_t key = (b.reinject_epoch << 20) + (j / 2);
        double u = rng::uniform01(rng::draw(b.cfg.seed, key, 2, slot::recycle_cell)) * acc;
        auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
        std::size_t k = std::min<std::size_t>(it - cdf.begin(), cdf.size() - 1);
        auto cell = static_cast<std::int64_t>(ref.entries[k].first);
        double theta = std::arg(ref.entries[k].second) + ((j % 2) ? std::numbers::pi : 0.0);
        q.amp = std::polar(m0, theta); // antithetic pair: net-zero injection
        q.node = cell * r + static_cast<std::int64_t>(rng::pick(
                     rng::draw(b.cfg.seed, key, 2 + (j % 2), slot::recycle_node),
                     b.cfg.cells_per_delta));
        q.frac = 0.0;
        q.v = rng::uniform(rng::draw(b.cfg.seed, key, 2 + (j % 2), slot::recycle_v),
                           -b.cfg.v_max, b.cfg.v_max);
        q.t_last = b.t_now;
        q.t_phase = b.t_now;
    }
    return removed.size();
}

// ---------------------------------------------------------------------------
// momentum_view: windowed phase-shifted sum over quanta whose own momentum
// lies within eps_k of k0.
inline cplx momentum_view(const bubble& b, double k0, double eps_k) {
    if (!(eps_k > 0.0)) throw domain_error("momentum_view: eps_k must be positive");
    cplx s{0.0, 0.0};
    for (const auto& q : b.quanta) {
        double k = b.cfg.mass * q.v / b.cfg.u.hbar;
        if (std::abs(k - k0) < eps_k)
            s += q.amp * std::polar(1.0, -b.position(q) * k);
    }
    return s;
}

inline std::vector<cplx> momentum_sweep(const bubble& b, const std::vector<double>& k0s,
                                        double eps_k) {
    std::vector<cplx> out(k0s.size());
    double n2 = 0.0;
    for (std::size_t i = 0; i < k0s.size(); ++i) {
        out[i] = momentum_view(b, k0s[i], eps_k);
        n2 += std::norm(out[i]);
    }
    if (n2 > 0.0)
        for (auto& a : out) a /= std::sqrt(n2);
    return out;
}

// ---------------------------------------------------------------------------
// connectivity: adjacency components of occupied delta-cells with Born
// weights from the accumulated density.
struct bubble_component {
    std::vector<std::size_t> cells;
    double weight = 0.0;
};

inline std::vector<bubble_component> connectivity(const bubble& b) {
    if (b.quanta.empty()) return {};
    auto raw = accumulate_raw(b);
    std::vector<std::size_t> occupied;
    std::vector<double> dens;
    for (const auto& [c, a] : raw.entries) {
        occupied.push_back(static_cast<std::size_t>(c));
        dens.push_back(std::norm(a));
    }
    std::vector<bubble_component> comps;
    double total = 0.0;
    for (std::size_t i = 0; i < occupied.size(); ++i) {
        if (comps.empty() || occupied[i] != comps.back().cells.back() + 1)
            comps.emplace_back();
        comps.back().cells.push_back(occupied[i]);
        comps.back().weight += dens[i];
        total += dens[i];
    }
    if (total > 0.0)
        for (auto& c : comps) c.weight /= total;
    return comps;
}

} // namespace aqsim
