#include "kinlaw/lagrangian.hpp"

#include <algorithm>
#include <cmath>

#include "kinlaw/parallel.hpp"

namespace kinlaw {

namespace {

double quantile(std::vector<double>& v, double q) {
    if (v.empty()) throw Error("quantile of empty sample");
    const size_t k = static_cast<size_t>(std::clamp(q, 0.0, 1.0) * (v.size() - 1));
    std::nth_element(v.begin(), v.begin() + k, v.end());
    return v[k];
}

// band-restricted cut entropy at a point; xi interpolated between members
double band_value(const EntropyFamily& family, const BandSpec& band, bool max_side, double w,
                  double z, double xi) {
    if (max_side) {
        if (xi < band.a || xi > band.w_max || xi > w) return 0.0;
    } else {
        if (xi < band.w_min || xi > band.w_min + band.r || xi < w) return 0.0;
    }
    const Grid1& xg = family.xigrid;
    const int k = xg.cell(std::clamp(xi, xg.lo, xg.hi));
    const double s = std::clamp((xi - xg.x(k)) / xg.dx(), 0.0, 1.0);
    return (1 - s) * family.xi_members[k].theta.eval(w, z) +
           s * family.xi_members[k + 1].theta.eval(w, z);
}

}  // namespace

BandSpec make_band(const SystemChart& chart, const GridSolution& sol, double rbar,
                   double r_frac) {
    if (rbar <= 0) throw Error("make_band needs positive strip width");
    r_frac = std::clamp(r_frac, 0.05, 0.45);
    std::vector<double> ws;
    ws.reserve(static_cast<size_t>(sol.nt()) * sol.nx);
    for (int n = 0; n < sol.nt(); ++n)
        for (int i = 0; i < sol.nx; ++i) ws.push_back(chart.to_riemann(sol.u[n][i]).w);
    BandSpec b;
    {
        std::vector<double> tmp = ws;
        b.w_min = quantile(tmp, 0.001);
    }
    {
        std::vector<double> tmp = ws;
        b.w_max = quantile(tmp, 0.999);
    }
    const double range = b.w_max - b.w_min;
    if (range < 1e-9)
        throw GeometryError("essential w-range is degenerate; no band exists");
    b.r = std::min(0.5 * rbar, r_frac * range);
    if (!(b.w_min + b.r < b.w_max - b.r))
        throw GeometryError("band width incompatible with the w-range");
    b.a = b.w_max - b.r;
    b.b = b.w_max;
    return b;
}

double Curve::x_at_time(double tq) const {
    if (t.empty()) throw Error("empty curve");
    if (t.size() == 1) return x[0];
    const bool fwd = t.back() >= t.front();
    const double lo = fwd ? t.front() : t.back();
    const double hi = fwd ? t.back() : t.front();
    tq = std::clamp(tq, lo, hi);
    // uniform samples
    const double dt = (t.back() - t.front()) / (static_cast<double>(t.size()) - 1);
    const double s = (tq - t.front()) / dt;
    const int k = std::clamp(static_cast<int>(s), 0, static_cast<int>(t.size()) - 2);
    const double a = s - k;
    return (1 - a) * x[k] + a * x[k + 1];
}

int Curve::clamp_count() const {
    int c = 0;
    for (uint8_t f : clamped) c += f;
    return c;
}

Curve trace(const GridSolution& sol, const SystemChart& chart, const EntropyFamily& family,
            double x0, double t0, double xi, int direction, double t_end, int substeps,
            bool allow_clip) {
    if (sol.nt() < 2) throw Error("trace needs at least two snapshots");
    const double w0 = sol.t.front(), w1 = sol.t.back();
    if (t0 < w0 - 1e-12 || t0 > w1 + 1e-12)
        throw WindowExitError("trace start time outside the solution window");
    if (t_end < 0) t_end = direction > 0 ? w1 : w0;
    const double target = t_end;
    const double clip_end = direction > 0 ? std::min(target, w1) : std::max(target, w0);
    const bool clipped = std::abs(clip_end - target) > 1e-12;
    if (clipped && !allow_clip)
        throw WindowExitError("requested horizon exceeds the solution window");

    Curve c;
    c.xi = xi;
    const double ts = sol.dt_snap() / substeps;
    const int nsteps = std::max(
        1, static_cast<int>(std::lround(std::abs(clip_end - t0) / ts)));
    const double dt = (clip_end - t0) / nsteps;  // signed

    auto speed_at = [&](double tq, double xq, bool& clamp_flag) {
        const Riemann p = chart.to_riemann(sol.eval(tq, xq));
        const SpeedQuery q = kinetic_speed(family, xi, p.w, p.z, false);
        clamp_flag = clamp_flag || q.clamped;
        return q.value;
    };

    double x = x0, t = t0;
    c.t.reserve(nsteps + 1);
    c.x.reserve(nsteps + 1);
    c.clamped.reserve(nsteps + 1);
    c.t.push_back(t);
    c.x.push_back(x);
    c.clamped.push_back(0);
    for (int s = 0; s < nsteps; ++s) {
        bool flag = false;
        const double k1 = speed_at(t, x, flag);
        const double k2 = speed_at(t + dt, x + dt * k1, flag);
        x += 0.5 * dt * (k1 + k2);
        t = t0 + (s + 1) * dt;
        c.t.push_back(t);
        c.x.push_back(x);
        c.clamped.push_back(flag ? 1 : 0);
    }
    c.clipped = clipped;
    return c;
}

CurveBundle seed_bundle(const GridSolution& sol, const SystemChart& chart,
                        const EntropyFamily& family, const BandSpec& band, bool max_side,
                        int n_curves, int substeps) {
    if (n_curves < 64) throw Error("seed_bundle needs n_curves >= 64");
    CurveBundle bundle;
    bundle.band = band;
    bundle.max_side = max_side;
    bundle.L = sol.L;

    const double k_lo = max_side ? band.a : band.w_min;
    const double k_hi = max_side ? band.w_max : band.w_min + band.r;

    struct Seed {
        double x, xi, wgt;
    };
    std::vector<Seed> seeds;
    auto build_lattice = [&](int budget) {
        seeds.clear();
        bundle.lattice_nk =
            std::max(4, static_cast<int>(std::lround(std::sqrt(budget / 8.0))));
        bundle.lattice_nx = std::max(8, budget / bundle.lattice_nk);
        const double dxs = sol.L / bundle.lattice_nx;
        const double dks = (k_hi - k_lo) / bundle.lattice_nk;
        for (int i = 0; i < bundle.lattice_nx; ++i) {
            const double xs = (i + 0.5) * dxs;
            const Riemann p = chart.to_riemann(sol.eval(sol.t.front(), xs));
            for (int k = 0; k < bundle.lattice_nk; ++k) {
                const double ks = k_lo + (k + 0.5) * dks;
                const double v = band_value(family, band, max_side, p.w, p.z, ks);
                if (v > 0.0) seeds.push_back({xs, ks, v * dxs * dks});
            }
        }
    };
    // the band occupies only part of the lattice; rescale its budget once so
    // the seeded count tracks the request
    build_lattice(n_curves);
    if (!seeds.empty() && static_cast<int>(seeds.size()) < (3 * n_curves) / 4) {
        const double fill = static_cast<double>(seeds.size()) /
                            (static_cast<double>(bundle.lattice_nx) * bundle.lattice_nk);
        build_lattice(static_cast<int>(n_curves / std::max(fill, 0.01)));
    }
    if (seeds.empty()) throw EmptyBandError("band carries no mass at the initial time");

    bundle.curves.resize(seeds.size());
    parallel_for(static_cast<int>(seeds.size()), [&](int s) {
        Curve c = trace(sol, chart, family, seeds[s].x, sol.t.front(), seeds[s].xi, +1, -1.0,
                        substeps, true);
        c.band_max = max_side;
        c.weight = seeds[s].wgt;
        bundle.curves[s] = std::move(c);
    });
    for (const Curve& c : bundle.curves) bundle.total_weight += c.weight;
    return bundle;
}

double bundle_box_mass(const CurveBundle& b, double tq, double x0, double x1, double k0,
                       double k1) {
    double mass = 0.0;
    for (const Curve& c : b.curves) {
        if (c.xi < k0 || c.xi > k1) continue;
        double x = c.x_at_time(tq);
        if (b.L > 0) {
            x = std::fmod(x, b.L);
            if (x < 0) x += b.L;
        }
        if (x >= x0 && x <= x1) mass += c.weight;
    }
    return mass;
}

double field_box_mass(const GridSolution& sol, const SystemChart& chart,
                      const EntropyFamily& family, const BandSpec& band, bool max_side,
                      double tq, double x0, double x1, double k0, double k1) {
    // midpoint quadrature on a fine sub-lattice of the box
    const int nx = 256, nk = 64;
    const double dx = (x1 - x0) / nx;
    const double dk = (k1 - k0) / nk;
    double mass = 0.0;
    for (int i = 0; i < nx; ++i) {
        const double x = x0 + (i + 0.5) * dx;
        const Riemann p = chart.to_riemann(sol.eval(tq, x));
        for (int k = 0; k < nk; ++k) {
            const double ks = k0 + (k + 0.5) * dk;
            mass += band_value(family, band, max_side, p.w, p.z, ks) * dx * dk;
        }
    }
    return mass;
}

CrossingReport crossing_check(const CurveBundle& bundle_max, const CurveBundle& bundle_min) {
    CrossingReport rep;
    for (const Curve& g : bundle_max.curves) {
        for (const Curve& s : bundle_min.curves) {
            const size_t n = std::min(g.x.size(), s.x.size());
            if (n < 2) continue;
            ++rep.pairs;
            int sign0 = 0;
            bool viol = false;
            for (size_t k = 0; k < n; ++k) {
                const double d = g.x[k] - s.x[k];
                const int sg = d > 0 ? 1 : (d < 0 ? -1 : 0);
                if (sg == 0) continue;
                if (sign0 == 0) {
                    sign0 = sg;
                } else if (sg != sign0) {
                    viol = true;
                    break;
                }
            }
            if (viol) ++rep.violations;
        }
    }
    rep.fraction = rep.pairs > 0 ? static_cast<double>(rep.violations) / rep.pairs : 0.0;
    return rep;
}

double band_law_violation_fraction(const GridSolution& sol, const SystemChart& chart,
                                   const CurveBundle& bundle, double tol) {
    long total = 0, bad = 0;
    for (const Curve& c : bundle.curves) {
        for (size_t k = 0; k < c.t.size(); ++k) {
            const Riemann p = chart.to_riemann(sol.eval(c.t[k], c.x[k]));
            ++total;
            if (bundle.max_side) {
                if (c.xi < p.w - bundle.band.r - tol || c.xi > p.w + tol) ++bad;
            } else {
                if (c.xi < p.w - tol || c.xi > p.w + bundle.band.r + tol) ++bad;
            }
        }
    }
    return total > 0 ? static_cast<double>(bad) / total : 0.0;
}

QLedger q_functional(const GridSolution& sol, const SystemChart& chart,
                     const EntropyFamily& family, const Curve& gamma, const Curve& sigma,
                     const BandSpec& band) {
    if (gamma.t.empty() || sigma.t.empty()) throw GeometryError("empty curve");
    if (!(gamma.x.front() < sigma.x.front()))
        throw GeometryError("fast curve must start to the left of the slow curve");
    if (!(gamma.xi > band.a))
        throw GeometryError("fast curve kinetic value must lie in the top band");

    QLedger led;
    led.a = band.a;
    led.b = band.b;
    led.r = band.r;
    led.c = family.c;
    led.rbar = family.rbar;
    led.w_min = band.w_min;
    led.w_max = band.w_max;
    led.predicted_rate = family.c * family.c * (band.b - band.a) * (band.b - band.a) / 2.0;

    // family nodes inside [a, b], trapezoid weights on the restriction
    std::vector<int> knodes;
    for (int k = 0; k < family.n_xi(); ++k)
        if (family.xi_at(k) >= band.a - 1e-12 && family.xi_at(k) <= band.b + 1e-12)
            knodes.push_back(k);
    if (knodes.size() < 2) throw GeometryError("band contains fewer than two family nodes");
    auto kweight = [&](size_t j) {
        const double dxi = family.xigrid.dx();
        return (j == 0 || j + 1 == knodes.size()) ? 0.5 * dxi : dxi;
    };

    const double tend = std::min(gamma.t.back(), sigma.t.back());
    for (int n = 0; n < sol.nt() && sol.t[n] <= tend + 1e-12; ++n) {
        const double tq = sol.t[n];
        const double xg = gamma.x_at_time(tq);
        const double xs = sigma.x_at_time(tq);
        if (xg >= xs) {
            led.crossed = true;
            led.cross_time = tq;
            break;
        }

        // Q(t): grid-cell trapezoid in x between the curves, family trapezoid in xi
        double Q = 0.0;
        const int i0 = static_cast<int>(std::ceil(xg / sol.dx));
        const int i1 = static_cast<int>(std::floor(xs / sol.dx));
        for (size_t j = 0; j < knodes.size(); ++j) {
            const int k = knodes[j];
            const double xi = family.xi_at(k);
            double acc = 0.0;
            auto chi_at = [&](double xq) {
                const Riemann p = chart.to_riemann(sol.eval(tq, xq));
                return xi <= p.w ? family.xi_members[k].theta.eval(p.w, p.z) : 0.0;
            };
            for (int i = i0; i < i1; ++i)
                acc += 0.5 * sol.dx * (chi_at(i * sol.dx) + chi_at((i + 1) * sol.dx));
            if (i0 <= i1) {  // fractional end cells
                acc += 0.5 * (i0 * sol.dx - xg) * (chi_at(xg) + chi_at(i0 * sol.dx));
                acc += 0.5 * (xs - i1 * sol.dx) * (chi_at(i1 * sol.dx) + chi_at(xs));
            } else {
                acc += 0.5 * (xs - xg) * (chi_at(xg) + chi_at(xs));
            }
            Q += kweight(j) * acc;
        }

        // boundary flux rates from the trace formulas
        auto boundary_rate = [&](double xq, double edge_speed) {
            const Riemann p = chart.to_riemann(sol.eval(tq, xq));
            double rate = 0.0;
            for (size_t j = 0; j < knodes.size(); ++j) {
                const int k = knodes[j];
                const double xi = family.xi_at(k);
                if (xi > p.w) continue;
                const double chi = family.xi_members[k].theta.eval(p.w, p.z);
                const double lk = kinetic_speed(family, xi, p.w, p.z, false).value;
                rate += kweight(j) * chi * (edge_speed - lk);
            }
            return rate;
        };
        const Riemann pg = chart.to_riemann(sol.eval(tq, xg));
        const Riemann ps = chart.to_riemann(sol.eval(tq, xs));
        const double gdot = kinetic_speed(family, gamma.xi, pg.w, pg.z, false).value;
        const double sdot = kinetic_speed(family, sigma.xi, ps.w, ps.z, false).value;
        led.t.push_back(tq);
        led.Q.push_back(Q);
        led.F_out.push_back(boundary_rate(xg, gdot));
        led.F_in.push_back(boundary_rate(xs, sdot));
    }
    if (led.t.empty()) throw GeometryError("curves cross before the first sample");
    return led;
}

TraceQuality lebesgue_check(const GridSolution& sol, const Curve& curve, double delta0) {
    TraceQuality q;
    const int nsub = 8;  // one-sided x samples per radius
    for (int level = 0; level < 3; ++level) {
        const double delta = delta0 / (1 << level);
        double acc = 0.0;
        for (size_t k = 0; k < curve.t.size(); ++k) {
            const State ref = sol.eval(curve.t[k], curve.x[k]);
            double inner = 0.0;
            for (int s = 1; s <= nsub; ++s) {
                const double off = delta * s / nsub;
                inner += norm(sol.eval(curve.t[k], curve.x[k] - off) - ref);
                inner += norm(sol.eval(curve.t[k], curve.x[k] + off) - ref);
            }
            acc += inner / (2 * nsub);
        }
        q.averages[level] = acc / static_cast<double>(curve.t.size());
    }
    const double a0 = q.averages[0], a1 = q.averages[1], a2 = q.averages[2];
    const double floor_tol = 1e-12;
    q.pass = (a1 <= 0.7 * a0 + floor_tol && a2 <= 0.7 * a1 + floor_tol) || a2 < floor_tol;
    return q;
}

}  // namespace kinlaw
