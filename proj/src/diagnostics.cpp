#include "kinlaw/diagnostics.hpp"

#include <algorithm>
#include <cmath>

namespace kinlaw {

bool JumpSetMask::contains(int t_idx, int x_idx) const {
    return std::find(cells.begin(), cells.end(), std::make_pair(t_idx, x_idx)) != cells.end();
}

namespace {

// max over the probe radii of |nu|(B_r)/r at every lattice point
std::vector<std::pair<std::pair<int, int>, double>> rescaled_field(
    const MeasureEstimate& nu, const std::vector<double>& radii) {
    if (radii.size() < 3) throw Error("jump diagnostics need >= 3 dyadic radii");
    for (double r : radii)
        if (r < 2.0 * nu.dx) throw Error("jump diagnostics radii must be >= 2 dx");

    std::vector<double> dense(static_cast<size_t>(nu.nt) * nu.nx, 0.0);
    for (const auto& c : nu.cells)
        dense[static_cast<size_t>(c.t_idx) * nu.nx + c.x_idx] += std::abs(c.mass);

    std::vector<std::pair<std::pair<int, int>, double>> out;
    for (int cn : hat_lattice_interior(nu.nt, nu.width)) {
        for (int ci : hat_lattice_periodic(nu.nx, nu.width)) {
            double best = 0.0;
            for (double r : radii) {
                double ball = 0.0;
                const int st = static_cast<int>(std::ceil(r / nu.dt));
                const int sx = static_cast<int>(std::ceil(r / nu.dx));
                for (int dn = -st; dn <= st; ++dn) {
                    const int n = cn + dn;
                    if (n < 0 || n >= nu.nt) continue;
                    const double dt2 = dn * nu.dt * dn * nu.dt;
                    for (int di = -sx; di <= sx; ++di) {
                        const double ddx = di * nu.dx;
                        if (dt2 + ddx * ddx > r * r) continue;
                        const int i = ((ci + di) % nu.nx + nu.nx) % nu.nx;
                        ball += dense[static_cast<size_t>(n) * nu.nx + i];
                    }
                }
                best = std::max(best, ball / r);
            }
            out.push_back({{cn, ci}, best});
        }
    }
    return out;
}

}  // namespace

double default_jump_threshold(const MeasureEstimate& nu, const std::vector<double>& radii) {
    // The limsup diagnostic has no canonical finite-radius threshold. 0.75 x
    // the peak rescaled mass keeps the flagged set a tight tube around
    // line-concentrated dissipation while staying stable under refinement.
    double peak = 0.0;
    for (const auto& [cell, v] : rescaled_field(nu, radii)) peak = std::max(peak, v);
    return peak > 0.0 ? 0.75 * peak : std::numeric_limits<double>::infinity();
}

JumpSetMask jump_set(const MeasureEstimate& nu, const std::vector<double>& radii,
                     double theta) {
    JumpSetMask mask;
    mask.theta = theta;
    mask.radii = radii;
    mask.nu_kind = nu.kind;
    mask.nt = nu.nt;
    mask.nx = nu.nx;
    mask.width = nu.width;
    mask.dt = nu.dt;
    mask.dx = nu.dx;
    mask.t0 = nu.t0;
    mask.L = nu.L;
    for (const auto& [cell, v] : rescaled_field(nu, radii))
        if (v >= theta) mask.cells.push_back(cell);
    return mask;
}

VmoProfile vmo_profile(const GridSolution& sol, double t_center, double x_center,
                       std::vector<double> radii) {
    if (radii.size() < 2) throw Error("vmo_profile needs >= 2 radii");
    std::sort(radii.begin(), radii.end(), std::greater<>());
    const double rmax = radii.front();
    if (t_center - rmax < sol.t.front() - 1e-12 || t_center + rmax > sol.t.back() + 1e-12)
        throw BoundaryError("vmo ball leaves the time window");
    if (2.0 * rmax >= sol.L) throw BoundaryError("vmo ball wraps the periodic domain");

    VmoProfile prof;
    prof.t_center = t_center;
    prof.x_center = x_center;
    prof.radii = radii;

    const double ts = sol.dt_snap();
    for (double r : radii) {
        const int n0 = std::max(0, static_cast<int>(std::floor((t_center - r - sol.t.front()) / ts)));
        const int n1 = std::min(sol.nt() - 1,
                                static_cast<int>(std::ceil((t_center + r - sol.t.front()) / ts)));
        State avg{0, 0};
        long count = 0;
        const int sx = static_cast<int>(std::ceil(r / sol.dx));
        const int ic = static_cast<int>(std::lround(x_center / sol.dx));
        for (int n = n0; n <= n1; ++n) {
            const double dtc = sol.t[n] - t_center;
            for (int di = -sx; di <= sx; ++di) {
                const double dxc = ic * sol.dx + di * sol.dx - x_center;
                if (dtc * dtc + dxc * dxc > r * r) continue;
                const int i = ((ic + di) % sol.nx + sol.nx) % sol.nx;
                avg = avg + sol.u[n][i];
                ++count;
            }
        }
        if (count == 0) {
            prof.oscillation.push_back(0.0);
            continue;
        }
        avg = (1.0 / count) * avg;
        double osc = 0.0;
        for (int n = n0; n <= n1; ++n) {
            const double dtc = sol.t[n] - t_center;
            for (int di = -sx; di <= sx; ++di) {
                const double dxc = ic * sol.dx + di * sol.dx - x_center;
                if (dtc * dtc + dxc * dxc > r * r) continue;
                const int i = ((ic + di) % sol.nx + sol.nx) % sol.nx;
                osc += norm(sol.u[n][i] - avg) * sol.dx * ts;
            }
        }
        prof.oscillation.push_back(osc / (r * r));
    }

    const size_t n = prof.oscillation.size();
    const double tail = prof.oscillation[n - 1];
    const double mid = prof.oscillation[n - 2];
    const double head = n >= 3 ? prof.oscillation[n - 3] : mid;
    const double tiny = 1e-14;
    prof.decay_flag = (tail < tiny && mid < tiny) ||
                      (mid >= 1.5 * tail - tiny && head >= 1.5 * mid - tiny && tail < mid);
    return prof;
}

}  // namespace kinlaw
