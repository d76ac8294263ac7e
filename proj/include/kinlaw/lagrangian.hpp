#pragma once

#include <array>
#include <vector>

#include "kinlaw/goursat.hpp"
#include "kinlaw/viscous.hpp"

namespace kinlaw {

// Band geometry for the interaction functional: essential w-range of the
// window (quantile clipped), a band width r compatible with it, and the two
// cut levels a = w_max - r and b (level of the fast reference curve).
struct BandSpec {
    double w_min = 0.0, w_max = 0.0;
    double r = 0.0;
    double a = 0.0, b = 0.0;
};

BandSpec make_band(const SystemChart& chart, const GridSolution& sol, double rbar,
                   double r_frac = 0.4);

// Characteristic curve with frozen kinetic value. Positions are stored
// unwrapped (universal cover of the periodic domain); evaluation against the
// solution wraps them back.
struct Curve {
    double xi = 0.0;
    bool band_max = true;
    double weight = 1.0;
    std::vector<double> t;
    std::vector<double> x;
    std::vector<uint8_t> clamped;  // strip clamp audit per sample
    bool clipped = false;          // requested horizon exceeded the window

    double x_at_time(double tq) const;
    int clamp_count() const;
};

// RK2 integration of dx/dt = lambda1[xi](u(t,x)) with bilinear space-time
// interpolation of u and clamped family interpolation of the speed. Samples
// land on the snapshot lattice; direction -1 traces backward from t0.
Curve trace(const GridSolution& sol, const SystemChart& chart, const EntropyFamily& family,
            double x0, double t0, double xi, int direction = +1, double t_end = -1.0,
            int substeps = 1, bool allow_clip = true);

struct CurveBundle {
    std::vector<Curve> curves;
    BandSpec band;
    bool max_side = true;
    double total_weight = 0.0;
    double L = 0.0;  // spatial period of the window the curves live on
    int lattice_nx = 0, lattice_nk = 0;
};

// Deterministic quadrature seeding: midpoint lattice over (x, kinetic level)
// weighted by the band-restricted cut entropy at t = 0, then all curves are
// traced to the window end.
CurveBundle seed_bundle(const GridSolution& sol, const SystemChart& chart,
                        const EntropyFamily& family, const BandSpec& band, bool max_side,
                        int n_curves, int substeps = 1);

// Mass of the band-restricted cut entropy in a box, from the empirical curve
// measure and from the assembled field; used for superposition checks.
double bundle_box_mass(const CurveBundle& b, double tq, double x0, double x1, double k0,
                       double k1);
double field_box_mass(const GridSolution& sol, const SystemChart& chart,
                      const EntropyFamily& family, const BandSpec& band, bool max_side,
                      double tq, double x0, double x1, double k0, double k1);

struct CrossingReport {
    long pairs = 0;
    long violations = 0;
    double fraction = 0.0;
};

// Counts ordered (max, min) curve pairs whose relative position flips sign
// anywhere in the window. Violations are counted, never repaired.
CrossingReport crossing_check(const CurveBundle& bundle_max, const CurveBundle& bundle_min);

// Fraction of samples violating the band law w(t,x(t)) - r <= xi <= w(t,x(t))
// (mirrored for the min side).
double band_law_violation_fraction(const GridSolution& sol, const SystemChart& chart,
                                   const CurveBundle& bundle, double tol = 0.0);

struct QLedger {
    std::vector<double> t;
    std::vector<double> Q;
    std::vector<double> F_out, F_in;  // boundary-flux rates at each sample
    double a = 0.0, b = 0.0, r = 0.0;
    double c = 0.0, rbar = 0.0;
    double w_min = 0.0, w_max = 0.0;
    double predicted_rate = 0.0;  // c^2 (b-a)^2 / 2
    bool crossed = false;
    double cross_time = 0.0;
};

// Interaction functional between a fast max-band curve (xi = b) and a slow
// min-band curve, with the boundary-flux ledger of its decay.
QLedger q_functional(const GridSolution& sol, const SystemChart& chart,
                     const EntropyFamily& family, const Curve& gamma, const Curve& sigma,
                     const BandSpec& band);

// Shrinking one-sided averages of |u - u(curve)| along a curve at three
// dyadic radii; passes when the averages decay like the radius.
struct TraceQuality {
    std::array<double, 3> averages{};
    bool pass = false;
};
TraceQuality lebesgue_check(const GridSolution& sol, const Curve& curve, double delta0);

}  // namespace kinlaw
