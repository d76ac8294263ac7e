#pragma once

// Shared oracles for the test suites: exact pre-shock solutions of the
// decoupled system by characteristics, and synthetic GridSolution builders.

#include <cmath>
#include <numbers>

#include "kinlaw/viscous.hpp"

namespace kinlaw::testing {

// Solves u = m + A sin(k (x - c(u) t)) by Newton; valid pre-shock.
inline double characteristic_solve(double m, double A, double k, double t, double x,
                                   double speed_shift) {
    double u = m;
    for (int it = 0; it < 100; ++it) {
        const double phase = k * (x - (u + speed_shift) * t);
        const double f = u - m - A * std::sin(phase);
        const double fp = 1.0 + A * k * t * std::cos(phase);
        const double un = u - f / fp;
        if (std::abs(un - u) < 1e-15) return un;
        u = un;
    }
    return u;
}

struct SmoothSpec {
    double L = 4.0, T = 1.5;
    double m1 = 0.15, A1 = 0.25;   // component 1: speed u1
    double m2 = -0.2, A2 = 0.15;   // component 2: speed u2 + 4
};

// Exact classical (pre-shock) solution of the decoupled system sampled on a
// snapshot lattice. epsilon = 0; the field is isentropic on the window.
inline GridSolution exact_decoupled_solution(const SmoothSpec& s, int nx, int snapshots) {
    GridSolution sol;
    sol.chart_id = "decoupled";
    sol.nx = nx;
    sol.L = s.L;
    sol.dx = s.L / nx;
    sol.epsilon = 0.0;
    sol.config = {{"kind", "exact-characteristics"}, {"T", s.T}, {"nx", nx}};
    const double k = 2.0 * std::numbers::pi / s.L;
    sol.t.resize(snapshots);
    sol.u.assign(snapshots, std::vector<State>(nx));
    for (int n = 0; n < snapshots; ++n) {
        const double t = s.T * n / (snapshots - 1);
        sol.t[n] = t;
        for (int i = 0; i < nx; ++i) {
            const double x = i * sol.dx;
            sol.u[n][i] = {characteristic_solve(s.m1, s.A1, k, t, x, 0.0),
                           characteristic_solve(s.m2, s.A2, k, t, x, 4.0)};
        }
    }
    return sol;
}

inline GridSolution constant_solution(const SystemChart& chart, double w, double z, int nx,
                                      int snapshots, double T, double L) {
    GridSolution sol;
    sol.chart_id = chart.id();
    sol.nx = nx;
    sol.L = L;
    sol.dx = L / nx;
    sol.epsilon = 0.0;
    const State u = chart.from_riemann({w, z});
    sol.t.resize(snapshots);
    sol.u.assign(snapshots, std::vector<State>(nx, u));
    for (int n = 0; n < snapshots; ++n) sol.t[n] = T * n / (snapshots - 1);
    return sol;
}

}  // namespace kinlaw::testing
