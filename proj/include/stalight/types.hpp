#ifndef STALIGHT_TYPES_HPP
#define STALIGHT_TYPES_HPP

#include <cmath>

#include "stalight/grid.hpp"

namespace stalight {

// Medium parameters. Everything is dimensionless: rates in units of the
// excited-state decay Gamma (Gamma == 1 in code units), time in 1/Gamma,
// and the optical depth d absorbs atom number, coupling strength and
// medium length.
struct EnsembleConfig {
    double d = 100.0;          // optical depth
    double gamma = 0.0;        // spinwave dephasing, units of Gamma
    double gamma_motion = 0.0; // motional decay scale for order-1 coherences
    double l_over_c = 0.0;     // declared L/(c T) ratio, must stay << 1

    void validate() const {
        if (!(d > 0.0)) throw range_error("ensemble.d: must be > 0");
        if (gamma < 0.0) throw range_error("ensemble.gamma: must be >= 0");
        if (gamma_motion < 0.0) throw range_error("ensemble.gamma_motion: must be >= 0");
        if (l_over_c < 0.0 || l_over_c >= 0.1)
            throw range_error("ensemble.l_over_c: short-medium limit requires 0 <= L/cT < 0.1");
    }
};

inline constexpr double kGamma = 1.0; // excited-state decay in code units

// Complex envelopes of the five dynamical fields at one instant:
// counterpropagating probes E+/-, excited-state coherences P+/- (the
// renormalised sqrt(N) sigma_13/14) and the spinwave S (sqrt(N) sigma_12).
struct FieldState {
    carray e_plus, e_minus;
    carray p_plus, p_minus;
    carray s;

    static FieldState zero(const Grid& g) {
        FieldState st;
        st.e_plus = g.zeros();
        st.e_minus = g.zeros();
        st.p_plus = g.zeros();
        st.p_minus = g.zeros();
        st.s = g.zeros();
        return st;
    }

    int n_xi() const { return static_cast<int>(s.size()); }

    bool shapes_consistent() const {
        const size_t n = s.size();
        return e_plus.size() == n && e_minus.size() == n && p_plus.size() == n && p_minus.size() == n;
    }

    void scale(complexd c) {
        for (auto* arr : {&e_plus, &e_minus, &p_plus, &p_minus, &s})
            for (auto& v : *arr) v *= c;
    }
};

} // namespace stalight

#endif
