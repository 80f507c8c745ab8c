#pragma once

#include <cstdint>
#include <set>
#include <vector>

#include "aqsim/bubble.hpp"

// Urn-scheme measurement: complex quanta of the system particle + measuring
// apparatus. Pairs form in collisions, so the pairing rate in a cell scales
// with the squared quanta count there, and picking a complex quantum
// uniformly reproduces the Born probability of the cell.

namespace aqsim {

struct complex_quantum {
    std::vector<std::uint64_t> members; // one quantum id per particle
};

struct measurement_ensemble {
    std::vector<complex_quantum> quanta;
    std::vector<std::size_t> particle_cell; // cell of the particle member
};

// Build the measurement ensemble from a particle bubble: cell weights are
// the squared per-cell counts, the apparatus member is near-grain and only
// its identity matters here.
inline measurement_ensemble build_measurement_ensemble(const bubble& b,
                                                       std::size_t n_complex,
                                                       std::uint64_t seed) {
    std::vector<std::vector<std::uint64_t>> cell_members(b.cfg.n_cells());
    for (const auto& q : b.quanta) cell_members[b.cell_of(q)].push_back(q.id);

    std::vector<double> cdf;
    std::vector<std::size_t> cells;
    double acc = 0.0;
    for (std::size_t c = 0; c < cell_members.size(); ++c) {
        if (cell_members[c].empty()) continue;
        double m = static_cast<double>(cell_members[c].size());
        acc += m * m;
        cdf.push_back(acc);
        cells.push_back(c);
    }
    if (cdf.empty()) throw empty_bubble("build_measurement_ensemble: empty bubble");

    measurement_ensemble ens;
    ens.quanta.resize(n_complex);
    ens.particle_cell.resize(n_complex);
    for (std::size_t i = 0; i < n_complex; ++i) {
        double u = rng::uniform01(rng::draw(seed, i, 0, slot::pair_pick)) * acc;
        auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
        std::size_t k = std::min<std::size_t>(it - cdf.begin(), cdf.size() - 1);
        std::size_t c = cells[k];
        const auto& members = cell_members[c];
        std::size_t pick = rng::pick(rng::draw(seed, i, 1, slot::pair_pick), members.size());
        ens.quanta[i].members = {members[pick],
                                 static_cast<std::uint64_t>(b.quanta.size() + i)};
        ens.particle_cell[i] = c;
    }
    return ens;
}

// Fraction of complex quanta whose particle member lies in the region.
inline double urn_measure(const measurement_ensemble& ens,
                          const std::set<std::size_t>& region_cells) {
    if (ens.quanta.empty()) throw domain_error("urn_measure: empty ensemble");
    std::size_t hits = 0;
    for (std::size_t c : ens.particle_cell)
        if (region_cells.count(c)) ++hits;
    return static_cast<double>(hits) / static_cast<double>(ens.quanta.size());
}

// ---------------------------------------------------------------------------
// Joint dynamics of complex quanta for particles of one tier: members move
// independently, the shared amplitude accumulates the total action of all
// components evaluated with the joint potential.

struct tier_member {
    std::int64_t node = 0;
    double frac = 0.0;
    double v = 0.0;
};

struct tier_quantum {
    std::uint64_t id = 0;
    std::vector<tier_member> members;
    cplx amp{0.0, 0.0};
    double t_last = 0.0;
};

struct tier_ensemble {
    std::vector<tier_quantum> quanta;
    bubble_config cfg; // shared lattice for every member
    double t_now = 0.0;
    std::uint64_t step_index = 0;

    double position(const tier_member& m) const {
        return cfg.origin + (static_cast<double>(m.node) + m.frac) * cfg.eps_x;
    }
};

// Uniform-random pairing of per-particle bubbles at tier formation.
inline tier_ensemble pair_bubbles(const std::vector<const bubble*>& parts,
                                  std::size_t n_complex, std::uint64_t seed) {
    if (parts.empty()) throw domain_error("pair_bubbles: no particles");
    tier_ensemble ens;
    ens.cfg = parts[0]->cfg;
    ens.quanta.resize(n_complex);
    for (std::size_t i = 0; i < n_complex; ++i) {
        auto& tq = ens.quanta[i];
        tq.id = i;
        cplx amp{1.0, 0.0};
        for (std::size_t p = 0; p < parts.size(); ++p) {
            const auto& src = parts[p]->quanta;
            std::size_t pick =
                rng::pick(rng::draw(seed, i, p, slot::pair_pick), src.size());
            const auto& q = src[pick];
            tq.members.push_back({q.node, q.frac, q.v});
            amp *= q.amp * static_cast<double>(src.size());
        }
        tq.amp = amp / static_cast<double>(n_complex);
    }
    return ens;
}

// One synchronized collision epoch for the tier: ballistic flight, then the
// joint phase update with kinetic terms per member and the joint potential
// evaluated at the middles of the ways.
inline void step_tier(tier_ensemble& ens, double mass,
                      const std::function<double(const std::vector<double>&)>& joint_V,
                      double dt) {
    const double mdt = ens.cfg.micro_dt();
    auto n_micro = static_cast<std::size_t>(std::llround(dt / mdt));
    if (n_micro == 0) throw domain_error("step_tier: dt below micro step");
    const double nmax = static_cast<double>(ens.cfg.n_nodes);
    for (std::size_t s = 0; s < n_micro; ++s) {
        ++ens.step_index;
        for (auto& tq : ens.quanta) {
            for (auto& m : tq.members) {
                double p = static_cast<double>(m.node) + m.frac + m.v * mdt / ens.cfg.eps_x;
                if (p < 0.0 || p >= nmax) {
                    p = (p < 0.0) ? -p : 2.0 * nmax - p;
                    p = std::clamp(p, 0.0, std::nexttoward(nmax, 0.0));
                    m.v = -m.v;
                }
                double fl = std::floor(p);
                m.node = static_cast<std::int64_t>(fl);
                m.frac = p - fl;
            }
        }
        ens.t_now += mdt;
    }
    // epoch collision: joint action over the segment, velocities redrawn
    for (auto& tq : ens.quanta) {
        double seg = ens.t_now - tq.t_last;
        if (seg > 0.0) {
            double kin = 0.0;
            std::vector<double> mids(tq.members.size());
            for (std::size_t p = 0; p < tq.members.size(); ++p) {
                const auto& m = tq.members[p];
                kin += 0.5 * mass * m.v * m.v;
                mids[p] = ens.position(m) - 0.5 * m.v * seg;
            }
            double dS = (kin - joint_V(mids)) * seg;
            tq.amp *= std::polar(1.0, dS / ens.cfg.u.hbar);
        }
        for (std::size_t p = 0; p < tq.members.size(); ++p)
            tq.members[p].v = rng::uniform(
                rng::draw(ens.cfg.seed, tq.id, ens.step_index, slot::collide_v + 16 + p),
                -ens.cfg.v_max, ens.cfg.v_max);
        tq.t_last = ens.t_now;
    }
}

// Joint configuration-space accumulate over (cell_1, ..., cell_k).
inline std::vector<std::pair<std::vector<std::size_t>, cplx>> accumulate_tier(
    const tier_ensemble& ens) {
    std::vector<std::pair<std::vector<std::size_t>, cplx>> sums;
    auto cell_of = [&](const tier_member& m) {
        return static_cast<std::size_t>(m.node) / ens.cfg.cells_per_delta;
    };
    // desk scale: linear scan with sorted key insertion
    std::vector<std::vector<std::size_t>> keys;
    for (const auto& tq : ens.quanta) {
        std::vector<std::size_t> key(tq.members.size());
        for (std::size_t p = 0; p < tq.members.size(); ++p) key[p] = cell_of(tq.members[p]);
        auto it = std::lower_bound(keys.begin(), keys.end(), key);
        auto pos = static_cast<std::size_t>(it - keys.begin());
        if (it == keys.end() || *it != key) {
            keys.insert(it, key);
            sums.insert(sums.begin() + pos, {key, tq.amp});
        } else {
            sums[pos].second += tq.amp;
        }
    }
    return sums;
}

} // namespace aqsim
