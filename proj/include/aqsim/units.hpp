#pragma once

#include "aqsim/errors.hpp"

namespace aqsim {

// Natural units by default; light_speed is used only to cap quantum speeds.
struct units {
    double hbar = 1.0;
    double default_mass = 1.0;
    double light_speed = 1.0;

    void validate() const {
        if (!(hbar > 0.0) || !(default_mass > 0.0) || !(light_speed > 0.0))
            throw domain_error("units: hbar, default_mass and light_speed must be positive");
    }
};

} // namespace aqsim
