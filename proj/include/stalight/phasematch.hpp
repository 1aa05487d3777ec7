#ifndef STALIGHT_PHASEMATCH_HPP
#define STALIGHT_PHASEMATCH_HPP

#include <cmath>

#include "stalight/schedule.hpp"

namespace stalight {

// Longitudinal phase matching of the two Lambda pairs. The spinwave driven
// by the forward pair carries momentum k_p+ - k_c+ cos(a+); the backward
// pair writes -k_p- + k_c- cos(a-). Any difference shows up as a spatial
// phase between the two couplings, which this module injects as a phase
// ramp on the backward control.
//
// Wavevector magnitudes are relative units; phase_scale converts them to
// radians across the unit xi interval (i.e. the total optical phase k L of
// a unit-magnitude field across the medium).
struct BeamGeometry {
    double k_p_plus = 1.0;
    double k_c_plus = 1.0;
    double k_p_minus = 1.0;
    double k_c_minus = 1.0;
    double angle_c_plus = 0.0;  // control tilt from the axis, radians
    double angle_c_minus = 0.0;
    double phase_scale = 1.0;

    void validate() const {
        if (!(k_p_plus > 0.0 && k_c_plus > 0.0 && k_p_minus > 0.0 && k_c_minus > 0.0))
            throw range_error("phasematch: wavevector magnitudes must be > 0");
        if (std::abs(angle_c_plus) >= M_PI / 2.0 || std::abs(angle_c_minus) >= M_PI / 2.0)
            throw range_error("phasematch: |control angles| must be < pi/2");
    }
};

// Residual mismatch Dk in radians per unit xi; zero means matched.
inline double residual_mismatch(const BeamGeometry& geom) {
    geom.validate();
    const double forward = geom.k_p_plus - geom.k_c_plus * std::cos(geom.angle_c_plus);
    const double backward = -geom.k_p_minus + geom.k_c_minus * std::cos(geom.angle_c_minus);
    return (forward - backward) * geom.phase_scale;
}

// The mismatch is carried entirely by the backward coupling (only the
// relative spinwave phase matters); the forward coupling is untouched.
inline ControlSchedule apply_mismatch(const ControlSchedule& ctrl, double delta_k) {
    if (!std::isfinite(delta_k)) throw range_error("apply_mismatch: delta_k must be finite");
    ControlSchedule out = ctrl;
    out.mismatch += delta_k;
    return out;
}

} // namespace stalight

#endif
