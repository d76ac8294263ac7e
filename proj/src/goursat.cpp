#include "kinlaw/goursat.hpp"

#include <cmath>
#include <limits>

#include "kinlaw/parallel.hpp"

namespace kinlaw {

GhTables compute_gh(const SystemChart& chart, Grid1 wgrid, Grid1 zgrid) {
    GhTables gh;
    gh.wgrid = wgrid;
    gh.zgrid = zgrid;
    gh.g = Table2(wgrid, zgrid);
    gh.h = Table2(wgrid, zgrid);
    gh.gz_over_g = Table2(wgrid, zgrid);
    gh.hw_over_h = Table2(wgrid, zgrid);
    gh.lam1 = Table2(wgrid, zgrid);
    gh.lam2 = Table2(wgrid, zgrid);
    gh.lam1w = Table2(wgrid, zgrid);
    gh.lam2z = Table2(wgrid, zgrid);

    for (int i = 0; i < wgrid.n; ++i) {
        for (int j = 0; j < zgrid.n; ++j) {
            const Riemann p{wgrid.x(i), zgrid.x(j)};
            auto [l1, l2] = chart.lambdas(p);
            const double gap = l1 - l2;
            const double ig = -chart.dlambda1_dz(p) / gap;
            const double ih = chart.dlambda2_dw(p) / gap;
            if (!std::isfinite(ig) || !std::isfinite(ih))
                throw QuadratureError("non-finite g/h integrand (eigenvalue gap collapse)");
            gh.lam1.at(i, j) = l1;
            gh.lam2.at(i, j) = l2;
            gh.lam1w.at(i, j) = chart.dlambda1_dw(p);
            gh.lam2z.at(i, j) = chart.dlambda2_dz(p);
            gh.gz_over_g.at(i, j) = ig;
            gh.hw_over_h.at(i, j) = ih;
        }
    }

    // g: composite trapezoid in z along each w column, then exponentiate.
    const double dz = zgrid.dx();
    for (int i = 0; i < wgrid.n; ++i) {
        double acc = 0.0;
        gh.g.at(i, 0) = 1.0;
        for (int j = 1; j < zgrid.n; ++j) {
            acc += 0.5 * dz * (gh.gz_over_g.at(i, j - 1) + gh.gz_over_g.at(i, j));
            gh.g.at(i, j) = std::exp(acc);
        }
    }
    // h: composite trapezoid in w along each z row.
    const double dw = wgrid.dx();
    for (int j = 0; j < zgrid.n; ++j) {
        double acc = 0.0;
        gh.h.at(0, j) = 1.0;
        for (int i = 1; i < wgrid.n; ++i) {
            acc += 0.5 * dw * (gh.hw_over_h.at(i - 1, j) + gh.hw_over_h.at(i, j));
            gh.h.at(i, j) = std::exp(acc);
        }
    }
    return gh;
}

GhTables transposed(const GhTables& gh) {
    GhTables t;
    t.wgrid = gh.zgrid;
    t.zgrid = gh.wgrid;
    t.g = gh.h.transposed();
    t.h = gh.g.transposed();
    t.gz_over_g = gh.hw_over_h.transposed();
    t.hw_over_h = gh.gz_over_g.transposed();
    t.lam1 = gh.lam2.transposed();
    t.lam2 = gh.lam1.transposed();
    t.lam1w = gh.lam2z.transposed();
    t.lam2z = gh.lam1w.transposed();
    return t;
}

namespace {

// March one side of the cut. Cells are filled outward from the data lines;
// the unknown corner is obtained from the integral form of the equation with
// a midpoint-rule cell integral, updated by a predictor plus two Picard
// corrector sweeps (the cell integral is O(h^4), second order globally).
void march_side(const GhTables& gh, Table2& theta, int cut, int dir) {
    const int nw = gh.wgrid.n;
    const int nz = gh.zgrid.n;
    const double dw = gh.wgrid.dx();
    const double dz = gh.zgrid.dx();
    const double area = dw * dz;
    for (int it = cut + dir; it >= 0 && it < nw; it += dir) {
        const int in = it - dir;  // neighbor column toward the cut
        for (int j = 1; j < nz; ++j) {
            const double A = theta.at(in, j - 1);
            const double B = theta.at(it, j - 1);
            const double C = theta.at(in, j);
            const double Pm = 0.25 * (gh.gz_over_g.at(in, j - 1) + gh.gz_over_g.at(it, j - 1) +
                                      gh.gz_over_g.at(in, j) + gh.gz_over_g.at(it, j));
            const double Qm = 0.25 * (gh.hw_over_h.at(in, j - 1) + gh.hw_over_h.at(it, j - 1) +
                                      gh.hw_over_h.at(in, j) + gh.hw_over_h.at(it, j));
            double D = C + B - A;  // predictor: zero right-hand side
            for (int sweep = 0; sweep < 2; ++sweep) {
                const double tw = dir * ((D - C) + (B - A)) / (2.0 * dw);
                const double tz = ((D - B) + (C - A)) / (2.0 * dz);
                D = C + B - A + dir * area * (Pm * tw + Qm * tz);
            }
            theta.at(it, j) = D;
        }
    }
}

}  // namespace

GoursatSolution solve_goursat(const GhTables& gh, double xi, const EdgeData& b0) {
    const Grid1& gw = gh.wgrid;
    if (xi < gw.lo - 0.5 * gw.dx() || xi > gw.hi + 0.5 * gw.dx())
        throw GridError("cut value " + std::to_string(xi) + " outside the w grid");
    GoursatSolution sol;
    sol.cut_index = gw.nearest(xi);
    sol.xi = gw.x(sol.cut_index);
    sol.theta = Table2(gw, gh.zgrid);

    // data lines: theta(., z_lo) = b0 and theta(xi, .) = b0(xi) g(xi, .)
    for (int i = 0; i < gw.n; ++i) sol.theta.at(i, 0) = b0(gw.x(i));
    const double bxi = b0(sol.xi);
    for (int j = 0; j < gh.zgrid.n; ++j)
        sol.theta.at(sol.cut_index, j) = bxi * gh.g.at(sol.cut_index, j);

    march_side(gh, sol.theta, sol.cut_index, +1);
    march_side(gh, sol.theta, sol.cut_index, -1);
    sol.flux = entropy_flux(gh, sol);
    return sol;
}

Table2 entropy_flux(const GhTables& gh, const GoursatSolution& sol) {
    const int nw = gh.wgrid.n;
    const int nz = gh.zgrid.n;
    const double dw = gh.wgrid.dx();
    const int c = sol.cut_index;
    Table2 flux(gh.wgrid, gh.zgrid);
    for (int j = 0; j < nz; ++j) {
        // I(w) = int_xi^w lam1_w theta dv, composite trapezoid from the cut
        std::vector<double> I(nw, 0.0);
        for (int i = c + 1; i < nw; ++i)
            I[i] = I[i - 1] + 0.5 * dw *
                                  (gh.lam1w.at(i - 1, j) * sol.theta.at(i - 1, j) +
                                   gh.lam1w.at(i, j) * sol.theta.at(i, j));
        for (int i = c - 1; i >= 0; --i)
            I[i] = I[i + 1] - 0.5 * dw *
                                  (gh.lam1w.at(i + 1, j) * sol.theta.at(i + 1, j) +
                                   gh.lam1w.at(i, j) * sol.theta.at(i, j));
        for (int i = 0; i < nw; ++i)
            flux.at(i, j) = gh.lam1.at(i, j) * sol.theta.at(i, j) - I[i];
    }
    return flux;
}

namespace {

void check_aligned(const Grid1& sub, const Grid1& full, const char* what) {
    if (sub.n < 2 || full.n < 2) throw GridError("degenerate grid");
    if (std::abs(sub.lo - full.lo) > 1e-12 || std::abs(sub.hi - full.hi) > 1e-12)
        throw GridError(std::string(what) + " grid bounds differ from the table grid");
    if ((full.n - 1) % (sub.n - 1) != 0)
        throw GridError(std::string(what) + " grid does not align with the table grid");
}

}  // namespace

EntropyFamily build_family(const SystemChart& chart, Grid1 wgrid, Grid1 zgrid,
                           Grid1 xigrid, Grid1 zetagrid, bool compute_strip) {
    check_aligned(xigrid, wgrid, "xi");
    check_aligned(zetagrid, zgrid, "zeta");

    EntropyFamily fam;
    fam.chart_id = chart.id();
    fam.wgrid = wgrid;
    fam.zgrid = zgrid;
    fam.xigrid = xigrid;
    fam.zetagrid = zetagrid;
    fam.gh = compute_gh(chart, wgrid, zgrid);
    const GhTables ght = transposed(fam.gh);

    const auto unit = [](double) { return 1.0; };
    fam.xi_members.resize(xigrid.n);
    fam.zeta_members.resize(zetagrid.n);
    fam.speed_xi.resize(xigrid.n);
    fam.speed_zeta.resize(zetagrid.n);

    parallel_for(xigrid.n, [&](int k) {
        fam.xi_members[k] = solve_goursat(fam.gh, xigrid.x(k), unit);
        Table2 s(wgrid, zgrid);
        const Table2& th = fam.xi_members[k].theta;
        const Table2& fl = fam.xi_members[k].flux;
        for (size_t q = 0; q < s.v.size(); ++q) s.v[q] = fl.v[q] / th.v[q];
        fam.speed_xi[k] = std::move(s);
    });
    parallel_for(zetagrid.n, [&](int k) {
        GoursatSolution m = solve_goursat(ght, zetagrid.x(k), unit);
        GoursatSolution back;
        back.xi = m.xi;
        back.cut_index = m.cut_index;  // index into the z grid
        back.theta = m.theta.transposed();
        back.flux = m.flux.transposed();
        Table2 s(wgrid, zgrid);
        for (size_t q = 0; q < s.v.size(); ++q) s.v[q] = back.flux.v[q] / back.theta.v[q];
        fam.zeta_members[k] = std::move(back);
        fam.speed_zeta[k] = std::move(s);
    });

    for (const auto& m : fam.xi_members)
        if (m.theta.min_value() <= 0.0)
            throw DegenerateStripError("Goursat entropy lost positivity on the rectangle");
    for (const auto& m : fam.zeta_members)
        if (m.theta.min_value() <= 0.0)
            throw DegenerateStripError("Goursat entropy lost positivity on the rectangle");

    if (compute_strip) {
        const StripConstants sc = strip_constants(fam);
        fam.rbar = sc.rbar;
        fam.c = sc.c;
    }
    return fam;
}

double EntropyFamily::chi(int k, double w, double z) const {
    const auto& m = xi_members[k];
    return w >= m.xi ? m.theta.eval(w, z) : 0.0;
}
double EntropyFamily::psi(int k, double w, double z) const {
    const auto& m = xi_members[k];
    return w >= m.xi ? m.flux.eval(w, z) : 0.0;
}
double EntropyFamily::chi_tilde(int k, double w, double z) const {
    const auto& m = xi_members[k];
    return w <= m.xi ? m.theta.eval(w, z) : 0.0;
}
double EntropyFamily::psi_tilde(int k, double w, double z) const {
    const auto& m = xi_members[k];
    return w <= m.xi ? m.flux.eval(w, z) : 0.0;
}
double EntropyFamily::upsilon(int k, double w, double z) const {
    const auto& m = zeta_members[k];
    return z >= m.xi ? m.theta.eval(w, z) : 0.0;
}
double EntropyFamily::varphi(int k, double w, double z) const {
    const auto& m = zeta_members[k];
    return z >= m.xi ? m.flux.eval(w, z) : 0.0;
}
double EntropyFamily::upsilon_tilde(int k, double w, double z) const {
    const auto& m = zeta_members[k];
    return z <= m.xi ? m.theta.eval(w, z) : 0.0;
}
double EntropyFamily::varphi_tilde(int k, double w, double z) const {
    const auto& m = zeta_members[k];
    return z <= m.xi ? m.flux.eval(w, z) : 0.0;
}

namespace {

struct StripScan {
    std::vector<double> value_min;  // per strip width, min of the cut entropy
    std::vector<double> dspeed_min; // per strip width, min of d speed / d cut
};

// Column minima of theta and of the centered xi-derivative of the speed,
// then sliding minima over strip widths r = m * dxi.
StripScan scan_family_side(const std::vector<GoursatSolution>& members,
                           const std::vector<Table2>& speeds, const Grid1& cutgrid,
                           bool cut_in_w) {
    const int nk = static_cast<int>(members.size());
    const int M = nk - 1;
    const double dxi = cutgrid.dx();
    const Grid1 colgrid = cut_in_w ? members[0].theta.gw : members[0].theta.gz;
    const int ncol = colgrid.n;
    const int stride = (ncol - 1) / (nk - 1);

    auto col_min = [&](const Table2& t, int col) {
        double m = std::numeric_limits<double>::infinity();
        if (cut_in_w) {
            for (int j = 0; j < t.gz.n; ++j) m = std::min(m, t.at(col, j));
        } else {
            for (int i = 0; i < t.gw.n; ++i) m = std::min(m, t.at(i, col));
        }
        return m;
    };

    StripScan out;
    out.value_min.assign(M + 1, std::numeric_limits<double>::infinity());
    out.dspeed_min.assign(M + 1, std::numeric_limits<double>::infinity());
    for (int k = 0; k < nk; ++k) {
        const int c = members[k].cut_index;
        // one-sided xi-derivative at the family ends, centered inside
        const int klo = std::max(0, k - 1), khi = std::min(nk - 1, k + 1);
        const double dden = (khi - klo) * dxi;
        std::vector<double> vmin(ncol), dmin(ncol);
        for (int col = 0; col < ncol; ++col) {
            vmin[col] = col_min(members[k].theta, col);
            double m = std::numeric_limits<double>::infinity();
            if (cut_in_w) {
                for (int j = 0; j < speeds[k].gz.n; ++j)
                    m = std::min(m, (speeds[khi].at(col, j) - speeds[klo].at(col, j)) / dden);
            } else {
                for (int i = 0; i < speeds[k].gw.n; ++i)
                    m = std::min(m, (speeds[khi].at(i, col) - speeds[klo].at(i, col)) / dden);
            }
            dmin[col] = m;
        }
        for (int m = 1; m <= M; ++m) {
            const int hi = std::min(ncol - 1, c + m * stride);
            double vm = std::numeric_limits<double>::infinity();
            double dm = std::numeric_limits<double>::infinity();
            for (int col = c; col <= hi; ++col) {
                vm = std::min(vm, vmin[col]);
                dm = std::min(dm, dmin[col]);
            }
            out.value_min[m] = std::min(out.value_min[m], vm);
            out.dspeed_min[m] = std::min(out.dspeed_min[m], dm);
        }
    }
    return out;
}

}  // namespace

StripConstants strip_constants(const EntropyFamily& family) {
    if (family.xigrid.n < 3 || family.zetagrid.n < 3)
        throw DegenerateStripError("family too small for a strip scan");
    const StripScan sx =
        scan_family_side(family.xi_members, family.speed_xi, family.xigrid, true);
    const StripScan sz =
        scan_family_side(family.zeta_members, family.speed_zeta, family.zetagrid, false);

    const int Mx = static_cast<int>(sx.value_min.size()) - 1;
    const int Mz = static_cast<int>(sz.value_min.size()) - 1;
    const double bx_v = sx.value_min[1], bx_d = sx.dspeed_min[1];
    const double bz_v = sz.value_min[1], bz_d = sz.dspeed_min[1];
    if (bx_v <= 0 || bx_d <= 0 || bz_v <= 0 || bz_d <= 0)
        throw DegenerateStripError("baseline strip minimum non-positive (chart not GNL?)");

    auto widest = [](const StripScan& s, double bv, double bd, int M) {
        int best = 0;
        for (int m = 1; m <= M; ++m)
            if (s.value_min[m] >= 0.5 * bv && s.dspeed_min[m] >= 0.5 * bd) best = m;
        return best;
    };
    const int mx = widest(sx, bx_v, bx_d, Mx);
    const int mz = widest(sz, bz_v, bz_d, Mz);
    if (mx < 2 || mz < 2) throw DegenerateStripError("no strip width r >= 2 dxi qualifies");

    const double rx = mx * family.xigrid.dx();
    const double rz = mz * family.zetagrid.dx();
    StripConstants sc;
    sc.rbar = std::min(rx, rz);
    sc.c = 0.9 * std::min(std::min(sx.value_min[mx], sx.dspeed_min[mx]),
                          std::min(sz.value_min[mz], sz.dspeed_min[mz]));
    return sc;
}

SpeedQuery kinetic_speed(const EntropyFamily& family, double xi, double w, double z,
                         bool strict) {
    SpeedQuery q;
    const double lo = w - family.rbar;
    if (xi < lo || xi > w) {
        if (strict)
            throw StripError("kinetic speed queried off-strip: xi=" + std::to_string(xi) +
                             ", admissible [" + std::to_string(lo) + ", " + std::to_string(w) +
                             "]");
        xi = std::clamp(xi, lo, w);
        q.clamped = true;
    }
    const Grid1& xg = family.xigrid;
    const int k = xg.cell(std::clamp(xi, xg.lo, xg.hi));
    const double s = std::clamp((xi - xg.x(k)) / xg.dx(), 0.0, 1.0);
    q.value = (1 - s) * family.speed_xi[k].eval(w, z) + s * family.speed_xi[k + 1].eval(w, z);
    return q;
}

ReconstructedPair reconstruct_entropy(const EntropyFamily& family,
                                      std::span<const double> rho1,
                                      std::span<const double> rho2) {
    if (static_cast<int>(rho1.size()) != family.n_xi() ||
        static_cast<int>(rho2.size()) != family.n_zeta())
        throw GridMismatchError("edge-derivative samples do not match the family grids");

    const Grid1& gw = family.wgrid;
    const Grid1& gz = family.zgrid;
    ReconstructedPair out{Table2(gw, gz), Table2(gw, gz)};
    const double dxi = family.xigrid.dx();
    const double dze = family.zetagrid.dx();
    const double eps = 1e-12;

    parallel_for(gw.n, [&](int i) {
        const double w = gw.x(i);
        for (int j = 0; j < gz.n; ++j) {
            const double z = gz.x(j);
            double eta = 0.0, q = 0.0;
            for (int k = 0; k < family.n_xi(); ++k) {
                if (w < family.xi_at(k) - eps) break;  // indicator cut
                const double wgt =
                    (k == 0 || k == family.n_xi() - 1) ? 0.5 * dxi : dxi;
                eta += wgt * rho1[k] * family.xi_members[k].theta.at(i, j);
                q += wgt * rho1[k] * family.xi_members[k].flux.at(i, j);
            }
            for (int k = 0; k < family.n_zeta(); ++k) {
                if (z < family.zeta_at(k) - eps) break;
                const double wgt =
                    (k == 0 || k == family.n_zeta() - 1) ? 0.5 * dze : dze;
                eta += wgt * rho2[k] * family.zeta_members[k].theta.at(i, j);
                q += wgt * rho2[k] * family.zeta_members[k].flux.at(i, j);
            }
            out.eta.at(i, j) = eta;
            out.q.at(i, j) = q;
        }
    });
    return out;
}

}  // namespace kinlaw
