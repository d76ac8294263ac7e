#pragma once

#include <utility>
#include <vector>

#include "kinlaw/kinetic.hpp"

namespace kinlaw {

// Candidate jump set: cells of the measure lattice where the rescaled mass
// nu(B_r)/r stays above the threshold for some probe radius.
struct JumpSetMask {
    std::vector<std::pair<int, int>> cells;  // (t_idx, x_idx)
    double theta = 0.0;
    std::vector<double> radii;
    std::string nu_kind;
    int nt = 0, nx = 0, width = 1;
    double dt = 0.0, dx = 0.0, t0 = 0.0, L = 0.0;

    bool contains(int t_idx, int x_idx) const;
    double area() const { return cells.size() * width * dt * width * dx; }
};

// Default threshold: 0.75 x the peak rescaled mass max_r nu(B_r)/r over the
// lattice. The limsup over all radii has no canonical finite-radius analogue,
// so the threshold is exposed and the default is relative.
double default_jump_threshold(const MeasureEstimate& nu, const std::vector<double>& radii);

JumpSetMask jump_set(const MeasureEstimate& nu, const std::vector<double>& radii,
                     double theta);

// Mean-oscillation profile (1/r^2) int_{B_r} |u - avg_r| at dyadic radii,
// recomputing the average per radius. decay_flag is set when the oscillation
// drops by >= 1.5x per level at the two smallest radii.
struct VmoProfile {
    double t_center = 0.0, x_center = 0.0;
    std::vector<double> radii;       // sorted descending
    std::vector<double> oscillation;
    bool decay_flag = false;
};

VmoProfile vmo_profile(const GridSolution& sol, double t_center, double x_center,
                       std::vector<double> radii);

}  // namespace kinlaw
