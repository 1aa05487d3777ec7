#ifndef STALIGHT_SCHEDULE_HPP
#define STALIGHT_SCHEDULE_HPP

#include <algorithm>
#include <cmath>
#include <vector>

#include "stalight/grid.hpp"

namespace stalight {

// Piecewise complex function of time built from (t, value) breakpoints.
// Outside the breakpoint range the boundary value is held. "hold" keeps the
// value of the most recent breakpoint; "linear" interpolates between them,
// so control switching edges are modelled with a pair of close breakpoints.
class PiecewiseSchedule {
public:
    enum class Interp { hold, linear };

    PiecewiseSchedule() = default;

    static PiecewiseSchedule constant(complexd v) {
        PiecewiseSchedule s;
        s.t_.push_back(0.0);
        s.v_.push_back(v);
        return s;
    }

    PiecewiseSchedule(std::vector<double> t, carray v, Interp ip) : t_(std::move(t)), v_(std::move(v)), interp_(ip) {
        if (t_.size() != v_.size()) throw shape_error("schedule: breakpoint times/values mismatch");
        if (!std::is_sorted(t_.begin(), t_.end()))
            throw range_error("schedule: breakpoint times must be non-decreasing");
        for (size_t i = 0; i < t_.size(); ++i)
            if (!std::isfinite(t_[i]) || !std::isfinite(v_[i].real()) || !std::isfinite(v_[i].imag()))
                throw range_error("schedule: breakpoints must be finite");
    }

    complexd value(double t) const {
        if (t_.empty()) return 0.0;
        if (t <= t_.front()) return v_.front();
        if (t >= t_.back()) return v_.back();
        const auto it = std::upper_bound(t_.begin(), t_.end(), t);
        const size_t hi = static_cast<size_t>(it - t_.begin());
        const size_t lo = hi - 1;
        if (interp_ == Interp::hold || t_[hi] == t_[lo]) return v_[lo];
        const double w = (t - t_[lo]) / (t_[hi] - t_[lo]);
        return v_[lo] * (1.0 - w) + v_[hi] * w;
    }

    bool is_constant() const {
        for (size_t i = 1; i < v_.size(); ++i)
            if (v_[i] != v_[0]) return false;
        return true;
    }

    bool empty() const { return t_.empty(); }
    double max_abs() const {
        double m = 0.0;
        for (const auto& v : v_) m = std::max(m, std::abs(v));
        return m;
    }

    const std::vector<double>& times() const { return t_; }
    const carray& values() const { return v_; }
    Interp interp() const { return interp_; }

private:
    std::vector<double> t_;
    carray v_;
    Interp interp_ = Interp::linear;
};

// Control fields and detunings for the two counterpropagating Lambda pairs.
// Rabi frequencies and detunings are in units of Gamma. A single two-photon
// detuning delta is shared by both pairs. mismatch is the residual
// longitudinal phase-mismatch in radians per unit xi; it multiplies the
// backward coupling by exp(i * mismatch * xi) (see phasematch.hpp).
struct ControlSchedule {
    PiecewiseSchedule omega_plus = PiecewiseSchedule::constant(0.0);
    PiecewiseSchedule omega_minus = PiecewiseSchedule::constant(0.0);
    double delta_plus = 0.0;
    double delta_minus = 0.0;
    double two_photon_delta = 0.0;
    double mismatch = 0.0;

    bool constant_controls() const { return omega_plus.is_constant() && omega_minus.is_constant(); }
    double max_rabi() const { return std::max(omega_plus.max_abs(), omega_minus.max_abs()); }
};

// Input probe envelopes at the two medium edges: e_plus enters at xi = 0,
// e_minus at xi = 1. An optional tone multiplies the envelope by
// exp(-i tone t), which is how monochromatic drives at a two-photon
// detuning are expressed.
struct BoundaryDrive {
    PiecewiseSchedule env_plus;
    PiecewiseSchedule env_minus;
    double tone_plus = 0.0;
    double tone_minus = 0.0;

    complexd e_plus(double t) const {
        if (env_plus.empty()) return 0.0;
        return env_plus.value(t) * std::polar(1.0, -tone_plus * t);
    }
    complexd e_minus(double t) const {
        if (env_minus.empty()) return 0.0;
        return env_minus.value(t) * std::polar(1.0, -tone_minus * t);
    }
    static BoundaryDrive none() { return {}; }
};

} // namespace stalight

#endif
