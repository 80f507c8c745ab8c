#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "aqsim/errors.hpp"

namespace aqsim {

enum class boundary_kind { periodic, hard_wall };

inline std::string to_string(boundary_kind b) {
    return b == boundary_kind::periodic ? "periodic" : "hard-wall";
}

struct grid1d {
    std::size_t n = 0;
    double dx = 1.0;
    double origin = 0.0;
    boundary_kind boundary = boundary_kind::periodic;

    double x(std::size_t i) const { return origin + dx * static_cast<double>(i); }

    void validate() const {
        if (n < 8) throw domain_error("grid1d: need at least 8 points");
        if (!(dx > 0.0)) throw domain_error("grid1d: dx must be positive");
    }
};

struct potential {
    std::vector<double> values;

    static potential zero(const grid1d& g) { return potential{std::vector<double>(g.n, 0.0)}; }

    static potential harmonic(const grid1d& g, double k = 1.0, double center = 0.0) {
        potential v;
        v.values.resize(g.n);
        for (std::size_t i = 0; i < g.n; ++i) {
            double d = g.x(i) - center;
            v.values[i] = 0.5 * k * d * d;
        }
        return v;
    }

    // Quartic double well V0 * ((x/a)^2 - 1)^2.
    static potential double_well(const grid1d& g, double v0, double a) {
        potential v;
        v.values.resize(g.n);
        for (std::size_t i = 0; i < g.n; ++i) {
            double u = g.x(i) / a;
            double w = u * u - 1.0;
            v.values[i] = v0 * w * w;
        }
        return v;
    }

    void validate(const grid1d& g) const {
        if (values.size() != g.n) throw dimension_mismatch("potential: size != grid points");
        for (double v : values)
            if (!std::isfinite(v)) throw domain_error("potential: non-finite value");
    }
};

} // namespace aqsim
