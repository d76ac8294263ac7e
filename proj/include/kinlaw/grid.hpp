#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "kinlaw/errors.hpp"

namespace kinlaw {

// Conserved state of a 2x2 system.
struct State {
    double u1 = 0.0;
    double u2 = 0.0;
};

inline State operator+(State a, State b) { return {a.u1 + b.u1, a.u2 + b.u2}; }
inline State operator-(State a, State b) { return {a.u1 - b.u1, a.u2 - b.u2}; }
inline State operator*(double s, State a) { return {s * a.u1, s * a.u2}; }
inline double norm(State a) { return std::hypot(a.u1, a.u2); }

// Point in Riemann-invariant coordinates.
struct Riemann {
    double w = 0.0;
    double z = 0.0;
};

struct Mat2 {
    double a11 = 0.0, a12 = 0.0;
    double a21 = 0.0, a22 = 0.0;
};

// Rectangle in Riemann coordinates.
struct Rect {
    double w_lo = 0.0, w_hi = 0.0;
    double z_lo = 0.0, z_hi = 0.0;

    double w_center() const { return 0.5 * (w_lo + w_hi); }
    double z_center() const { return 0.5 * (z_lo + z_hi); }
    bool contains(const Riemann& p, double tol = 0.0) const {
        return p.w >= w_lo - tol && p.w <= w_hi + tol && p.z >= z_lo - tol && p.z <= z_hi + tol;
    }
};

// Uniform 1-D node grid, n nodes inclusive of both endpoints.
struct Grid1 {
    double lo = 0.0;
    double hi = 1.0;
    int n = 2;

    double dx() const { return (hi - lo) / (n - 1); }
    double x(int i) const { return lo + i * dx(); }

    // Index of the left node of the cell containing x, clamped to [0, n-2].
    int cell(double xq) const {
        int i = static_cast<int>(std::floor((xq - lo) / dx()));
        return std::clamp(i, 0, n - 2);
    }
    int nearest(double xq) const {
        int i = static_cast<int>(std::lround((xq - lo) / dx()));
        return std::clamp(i, 0, n - 1);
    }
};

inline bool same_grid(const Grid1& a, const Grid1& b, double tol = 1e-12) {
    return a.n == b.n && std::abs(a.lo - b.lo) < tol && std::abs(a.hi - b.hi) < tol;
}

// Scalar table over a (w, z) node grid; z index fastest.
struct Table2 {
    Grid1 gw, gz;
    std::vector<double> v;

    Table2() = default;
    Table2(Grid1 w, Grid1 z) : gw(w), gz(z), v(static_cast<size_t>(w.n) * z.n, 0.0) {}

    double& at(int i, int j) { return v[static_cast<size_t>(i) * gz.n + j]; }
    double at(int i, int j) const { return v[static_cast<size_t>(i) * gz.n + j]; }

    // Bilinear interpolation, clamped to the rectangle.
    double eval(double w, double z) const {
        const int i = gw.cell(w);
        const int j = gz.cell(z);
        const double s = std::clamp((w - gw.x(i)) / gw.dx(), 0.0, 1.0);
        const double t = std::clamp((z - gz.x(j)) / gz.dx(), 0.0, 1.0);
        return (1 - s) * ((1 - t) * at(i, j) + t * at(i, j + 1)) +
               s * ((1 - t) * at(i + 1, j) + t * at(i + 1, j + 1));
    }

    double min_value() const {
        double m = v.empty() ? 0.0 : v[0];
        for (double x : v) m = std::min(m, x);
        return m;
    }
    double max_abs() const {
        double m = 0.0;
        for (double x : v) m = std::max(m, std::abs(x));
        return m;
    }

    Table2 transposed() const {
        Table2 t(gz, gw);
        for (int i = 0; i < gw.n; ++i)
            for (int j = 0; j < gz.n; ++j) t.at(j, i) = at(i, j);
        return t;
    }
};

}  // namespace kinlaw
