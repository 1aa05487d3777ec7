#ifndef STALIGHT_GRID_HPP
#define STALIGHT_GRID_HPP

#include <complex>
#include <vector>

#include "stalight/errors.hpp"

namespace stalight {

using complexd = std::complex<double>;
using carray = std::vector<complexd>;
using darray = std::vector<double>;

// Uniform grid over the density-normalised coordinate xi in [0, 1],
// endpoints included. All spatial arrays in the library live on this grid.
struct Grid {
    int n_xi = 0;

    Grid() = default;
    explicit Grid(int n) : n_xi(n) {
        if (n_xi < 16) throw range_error("grid.n_xi: must be >= 16");
    }

    double dxi() const { return 1.0 / (n_xi - 1); }
    double xi(int i) const { return static_cast<double>(i) / (n_xi - 1); }

    carray zeros() const { return carray(static_cast<size_t>(n_xi), complexd(0.0, 0.0)); }

    bool operator==(const Grid&) const = default;
};

// Time axis of a simulation. dt and t_final are in units of 1/Gamma.
struct SimulationGrid {
    int n_xi = 256;
    double dt = 0.01;
    double t_final = 1.0;

    Grid space() const { return Grid(n_xi); }
    void validate() const {
        if (n_xi < 16) throw range_error("grid.n_xi: must be >= 16");
        if (!(dt > 0.0)) throw range_error("grid.dt: must be > 0");
        if (!(t_final >= dt)) throw range_error("grid.t_final: must be >= grid.dt");
    }
};

inline void require_same_grid(const carray& a, const carray& b, const char* what) {
    if (a.size() != b.size())
        throw shape_error(std::string(what) + ": arrays live on different grids");
}

} // namespace stalight

#endif
