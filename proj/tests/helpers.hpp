#pragma once

#include <cmath>
#include <vector>

#include "aqsim/rng.hpp"
#include "aqsim/state.hpp"

namespace aqtest {

inline aqsim::grained_wavefunction make_state(const std::vector<aqsim::cplx>& amps,
                                              double eps = 1e-9) {
    aqsim::grained_wavefunction psi;
    psi.grain = aqsim::grain_policy::from_epsilon(eps);
    for (std::size_t i = 0; i < amps.size(); ++i)
        psi.entries.emplace_back(static_cast<aqsim::label_t>(i), amps[i]);
    return psi;
}

// Random normalized state with haar-ish complex amplitudes.
inline aqsim::grained_wavefunction random_state(std::size_t n, std::uint64_t seed,
                                                double eps = 1e-9) {
    aqsim::rng::stream rs(seed, 17);
    std::vector<aqsim::cplx> amps(n);
    for (auto& a : amps)
        a = aqsim::cplx{rs.next_uniform(-1.0, 1.0), rs.next_uniform(-1.0, 1.0)};
    auto psi = make_state(amps, eps);
    psi.normalize();
    return psi;
}

inline double binomial_sigma(std::size_t n, double p) {
    return std::sqrt(static_cast<double>(n) * p * (1.0 - p));
}

// Wilson-Hilferty approximation of the 99% chi-square quantile.
inline double chi2_critical_99(std::size_t df) {
    const double z = 2.3263478740408408;
    double k = static_cast<double>(df);
    double t = 1.0 - 2.0 / (9.0 * k) + z * std::sqrt(2.0 / (9.0 * k));
    return k * t * t * t;
}

} // namespace aqtest
