#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "aqsim/errors.hpp"
#include "aqsim/rng.hpp"

// Grained wavefunctions and the reduction procedure: a state is a finite
// list of (label, amplitude) pairs plus an amplitude grain epsilon below
// which amplitudes are treated as zero.

namespace aqsim {

using cplx = std::complex<double>;
using label_t = std::uint64_t;

namespace tol {
// Module-level tolerance configuration.
inline constexpr double norm = 1e-10;
inline constexpr double unitary = 1e-10;
inline constexpr double grain_resource = 1e-12;
inline constexpr double skip_renorm = 1e-12;
} // namespace tol

struct grain_policy {
    double epsilon = 1e-9;
    std::optional<double> resource_T;

    static grain_policy from_epsilon(double eps) {
        grain_policy g{eps, std::nullopt};
        g.validate();
        return g;
    }

    // epsilon = 1/sqrt(T) for a total step budget T.
    static grain_policy from_resource(double T) {
        grain_policy g{1.0 / std::sqrt(T), T};
        g.validate();
        return g;
    }

    void validate() const {
        if (!(epsilon > 0.0) || !(epsilon < 1.0))
            throw domain_error("grain_policy: epsilon must lie in (0, 1)");
        if (resource_T &&
            std::abs(epsilon - 1.0 / std::sqrt(*resource_T)) > tol::grain_resource)
            throw domain_error("grain_policy: epsilon inconsistent with resource_T");
    }
};

// Grid descriptor attached to states living on a uniform spatial grid.
struct grid_meta {
    std::size_t n_points = 0;
    double spacing = 1.0;
    double origin = 0.0;
};

struct grained_wavefunction {
    std::vector<std::pair<label_t, cplx>> entries; // unique labels, sorted
    grain_policy grain;
    std::optional<grid_meta> basis_meta;

    grained_wavefunction() = default;
    grained_wavefunction(std::vector<std::pair<label_t, cplx>> e, grain_policy g,
                         std::optional<grid_meta> meta = std::nullopt)
        : entries(std::move(e)), grain(g), basis_meta(meta) {
        sort_entries();
    }

    std::size_t size() const { return entries.size(); }

    double norm2() const {
        double s = 0.0;
        for (const auto& [l, a] : entries) s += std::norm(a);
        return s;
    }

    cplx amp(label_t label) const {
        auto it = std::lower_bound(entries.begin(), entries.end(), label,
                                   [](const auto& e, label_t l) { return e.first < l; });
        return (it != entries.end() && it->first == label) ? it->second : cplx{0.0, 0.0};
    }

    void normalize() {
        double n = std::sqrt(norm2());
        if (n == 0.0) throw all_annihilated("normalize: zero state");
        if (std::abs(n - 1.0) <= tol::skip_renorm) return; // keep bits stable
        for (auto& [l, a] : entries) a /= n;
    }

    void sort_entries() {
        std::sort(entries.begin(), entries.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        for (std::size_t i = 1; i < entries.size(); ++i)
            if (entries[i].first == entries[i - 1].first)
                throw domain_error("grained_wavefunction: duplicate label " +
                                   std::to_string(entries[i].first));
    }
};

inline cplx inner_product(const grained_wavefunction& a, const grained_wavefunction& b) {
    cplx s{0.0, 0.0};
    auto ia = a.entries.begin();
    auto ib = b.entries.begin();
    while (ia != a.entries.end() && ib != b.entries.end()) {
        if (ia->first < ib->first) ++ia;
        else if (ib->first < ia->first) ++ib;
        else { s += std::conj(ia->second) * ib->second; ++ia; ++ib; }
    }
    return s;
}

// Classical ensemble of pure states; never a density matrix.
struct mixture {
    std::vector<std::pair<double, grained_wavefunction>> components;

    void validate() const {
        double w = 0.0;
        for (const auto& [p, s] : components) {
            if (p < 0.0) throw domain_error("mixture: negative weight");
            w += p;
        }
        if (std::abs(w - 1.0) > tol::norm)
            throw domain_error("mixture: weights must sum to 1");
    }
};

struct grain_list {
    std::vector<std::pair<std::size_t, cplx>> grains; // (branch index, grain amplitude)
    double epsilon = 0.0;
};

struct histogram {
    std::vector<label_t> labels;
    std::vector<std::size_t> counts;
    std::size_t draws = 0;

    double frequency(std::size_t i) const {
        return static_cast<double>(counts[i]) / static_cast<double>(draws);
    }
};

// ---------------------------------------------------------------------------
// reduce: null every amplitude below the grain, then renormalize.
// Idempotent; post-reduce entry count never exceeds floor(1/eps^2) for
// unit-norm inputs.
inline grained_wavefunction reduce(const grained_wavefunction& psi) {
    if (psi.entries.empty()) throw domain_error("reduce: empty state");
    grained_wavefunction out = psi;
    // Nulling and norming repeat until a fixpoint so the result is
    // idempotent even when renormalization shrinks amplitudes.
    for (;;) {
        std::vector<std::pair<label_t, cplx>> kept;
        kept.reserve(out.entries.size());
        for (const auto& [l, a] : out.entries)
            if (std::abs(a) >= out.grain.epsilon) kept.emplace_back(l, a);
        if (kept.empty())
            throw all_annihilated("reduce: every amplitude below grain epsilon=" +
                                  std::to_string(out.grain.epsilon));
        bool dropped = kept.size() != out.entries.size();
        out.entries = std::move(kept);
        out.normalize();
        if (!dropped) break;
    }
    return out;
}

// born_sample: draw labels with probability |amp|^2; deterministic per seed.
inline histogram born_sample(const grained_wavefunction& psi, std::size_t draws,
                             std::uint64_t seed) {
    if (std::abs(psi.norm2() - 1.0) > 1e-8)
        throw domain_error("born_sample: state not normalized");
    std::vector<double> cdf(psi.entries.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < psi.entries.size(); ++i) {
        acc += std::norm(psi.entries[i].second);
        cdf[i] = acc;
    }
    histogram h;
    h.draws = draws;
    h.labels.reserve(psi.entries.size());
    for (const auto& [l, a] : psi.entries) h.labels.push_back(l);
    h.counts.assign(psi.entries.size(), 0);
    for (std::size_t d = 0; d < draws; ++d) {
        double u = rng::uniform01(rng::draw(seed, 0, d)) * acc;
        auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
        std::size_t idx = std::min<std::size_t>(it - cdf.begin(), cdf.size() - 1);
        ++h.counts[idx];
    }
    return h;
}

inline double round_half_even(double x) {
    double r = std::nearbyint(x); // assumes default FE_TONEAREST
    return r;
}

// grain_expand: split branch j into l_j = max(1, round(|amp|^2/eps^2)) grains
// of modulus |amp|/sqrt(l_j); a uniform draw over grains reproduces Born
// frequencies within O(eps).
inline grain_list grain_expand(const grained_wavefunction& psi, double eps) {
    if (std::abs(psi.norm2() - 1.0) > 1e-8)
        throw domain_error("grain_expand: state not normalized");
    for (const auto& [l, a] : psi.entries)
        if (std::abs(a) > 0.0 && eps > std::abs(a) + 1e-15)
            throw domain_error("grain_expand: eps exceeds a nonzero amplitude modulus");
    grain_list out;
    out.epsilon = eps;
    for (std::size_t j = 0; j < psi.entries.size(); ++j) {
        const cplx a = psi.entries[j].second;
        if (std::abs(a) == 0.0) continue;
        auto lj = static_cast<std::size_t>(
            std::max(1.0, round_half_even(std::norm(a) / (eps * eps))));
        const cplx g = a / std::sqrt(static_cast<double>(lj));
        for (std::size_t k = 0; k < lj; ++k) out.grains.emplace_back(j, g);
    }
    return out;
}

// Distribution of branch outcomes under a uniform draw over grains.
inline std::vector<double> grain_branch_distribution(const grain_list& gl,
                                                     std::size_t n_branches) {
    std::vector<double> p(n_branches, 0.0);
    for (const auto& [j, g] : gl.grains) p.at(j) += 1.0;
    for (double& x : p) x /= static_cast<double>(gl.grains.size());
    return p;
}

// hadamard_pair: exact H (x) H on a two-qubit label space {0,1,2,3}.
inline grained_wavefunction hadamard_pair(const grained_wavefunction& psi) {
    for (const auto& [l, a] : psi.entries)
        if (l > 3) throw dimension_mismatch("hadamard_pair: label outside 2-qubit space");
    cplx in[4] = {psi.amp(0), psi.amp(1), psi.amp(2), psi.amp(3)};
    cplx out[4];
    for (int r = 0; r < 4; ++r) {
        cplx s{0.0, 0.0};
        for (int c = 0; c < 4; ++c) {
            // (H (x) H)[r][c] = 1/2 * (-1)^{popcount(r & c)}
            double sign = (std::popcount(static_cast<unsigned>(r & c)) & 1) ? -1.0 : 1.0;
            s += 0.5 * sign * in[c];
        }
        out[r] = s;
    }
    grained_wavefunction res;
    res.grain = psi.grain;
    res.basis_meta = psi.basis_meta;
    for (label_t r = 0; r < 4; ++r)
        if (std::abs(out[r]) > 0.0) res.entries.emplace_back(r, out[r]);
    return res;
}

// momentum_transform: exact unitary DFT over the grid labels,
//   phi(k) = 1/sqrt(N) sum_x psi(x) exp(-2 pi i k x / N).
inline grained_wavefunction momentum_transform(const grained_wavefunction& psi) {
    if (!psi.basis_meta || psi.basis_meta->n_points == 0)
        throw domain_error("momentum_transform: grid metadata required");
    const std::size_t n = psi.basis_meta->n_points;
    const double w = -2.0 * std::numbers::pi / static_cast<double>(n);
    std::vector<cplx> out(n, cplx{0.0, 0.0});
    for (std::size_t k = 0; k < n; ++k) {
        cplx s{0.0, 0.0};
        for (const auto& [x, a] : psi.entries)
            s += a * std::polar(1.0, w * static_cast<double>(k) * static_cast<double>(x));
        out[k] = s / std::sqrt(static_cast<double>(n));
    }
    grained_wavefunction res;
    res.grain = psi.grain;
    res.basis_meta = psi.basis_meta;
    for (label_t k = 0; k < n; ++k) res.entries.emplace_back(k, out[k]);
    return res;
}

// division_points: sample ceil(1/g^2) labels with density |psi|^2.
inline std::vector<label_t> division_points(const grained_wavefunction& psi, double g,
                                            std::uint64_t seed) {
    if (!(g > 0.0)) throw domain_error("division_points: g must be positive");
    if (std::abs(psi.norm2() - 1.0) > 1e-8)
        throw domain_error("division_points: state not normalized");
    const auto count = static_cast<std::size_t>(std::ceil(1.0 / (g * g)));
    std::vector<double> cdf(psi.entries.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < psi.entries.size(); ++i) {
        acc += std::norm(psi.entries[i].second);
        cdf[i] = acc;
    }
    std::vector<label_t> points;
    points.reserve(count);
    for (std::size_t d = 0; d < count; ++d) {
        double u = rng::uniform01(rng::draw(seed, 1, d)) * acc;
        auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
        std::size_t idx = std::min<std::size_t>(it - cdf.begin(), cdf.size() - 1);
        points.push_back(psi.entries[idx].first);
    }
    return points;
}

// emission_state: after j steps the joint atom+photon state has j+1
// equal-modulus summands (label 0: not emitted; labels 1..j: emitted
// spherical shells). Normalized to unit norm, so P(emitted) = j/(j+1).
inline grained_wavefunction emission_state(std::size_t j,
                                           grain_policy grain = grain_policy{}) {
    if (j < 1) throw domain_error("emission_state: j must be >= 1");
    grained_wavefunction psi;
    psi.grain = grain;
    const double a = 1.0 / std::sqrt(static_cast<double>(j + 1));
    for (label_t r = 0; r <= j; ++r) psi.entries.emplace_back(r, cplx{a, 0.0});
    return psi;
}

inline double emission_probability(const grained_wavefunction& emission) {
    double p = 0.0;
    for (const auto& [l, a] : emission.entries)
        if (l != 0) p += std::norm(a);
    return p / emission.norm2();
}

// Analytic outcome distribution of measuring a classical mixture in the
// computational basis.
inline std::vector<double> measurement_distribution(const mixture& mix,
                                                    std::size_t n_labels) {
    mix.validate();
    std::vector<double> p(n_labels, 0.0);
    for (const auto& [w, s] : mix.components)
        for (const auto& [l, a] : s.entries) p.at(l) += w * std::norm(a);
    return p;
}

inline double total_variation(const std::vector<double>& p, const std::vector<double>& q) {
    double tv = 0.0;
    for (std::size_t i = 0; i < std::max(p.size(), q.size()); ++i) {
        double pi = i < p.size() ? p[i] : 0.0;
        double qi = i < q.size() ? q[i] : 0.0;
        tv += std::abs(pi - qi);
    }
    return 0.5 * tv;
}

} // namespace aqsim
