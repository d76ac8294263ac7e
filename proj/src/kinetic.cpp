#include "kinlaw/kinetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include "kinlaw/parallel.hpp"

namespace kinlaw {

std::string to_string(KineticVariant v) {
    switch (v) {
        case KineticVariant::chi: return "chi";
        case KineticVariant::chi_tilde: return "chi_tilde";
        case KineticVariant::upsilon: return "upsilon";
        case KineticVariant::upsilon_tilde: return "upsilon_tilde";
    }
    return "chi";
}

KineticVariant variant_from_string(const std::string& s) {
    if (s == "chi") return KineticVariant::chi;
    if (s == "chi_tilde") return KineticVariant::chi_tilde;
    if (s == "upsilon") return KineticVariant::upsilon;
    if (s == "upsilon_tilde") return KineticVariant::upsilon_tilde;
    throw Error("unknown kinetic variant: " + s);
}

KineticField assemble(const GridSolution& sol, const SystemChart& chart,
                      const EntropyFamily& family, KineticVariant variant) {
    if (sol.chart_id != family.chart_id || sol.chart_id != chart.id())
        throw ChartMismatchError("solution chart '" + sol.chart_id +
                                 "' does not match family chart '" + family.chart_id + "'");
    KineticField f;
    f.variant = variant;
    f.nt = sol.nt();
    f.nx = sol.nx;
    f.t = sol.t;
    f.dx = sol.dx;
    f.L = sol.L;
    const bool on_w =
        variant == KineticVariant::chi || variant == KineticVariant::chi_tilde;
    f.kgrid = on_w ? family.xigrid : family.zetagrid;
    f.nk = f.kgrid.n;
    f.value.assign(static_cast<size_t>(f.nt) * f.nx * f.nk, 0.0);
    f.fluxval.assign(f.value.size(), 0.0);
    f.wfield.resize(static_cast<size_t>(f.nt) * f.nx);
    f.zfield.resize(f.wfield.size());

    parallel_for(f.nt, [&](int n) {
        for (int i = 0; i < f.nx; ++i) {
            const Riemann p = chart.to_riemann(sol.u[n][i]);
            f.wfield[static_cast<size_t>(n) * f.nx + i] = p.w;
            f.zfield[static_cast<size_t>(n) * f.nx + i] = p.z;
            for (int k = 0; k < f.nk; ++k) {
                double v = 0.0, fl = 0.0;
                switch (variant) {
                    case KineticVariant::chi:
                        v = family.chi(k, p.w, p.z);
                        fl = family.psi(k, p.w, p.z);
                        break;
                    case KineticVariant::chi_tilde:
                        v = family.chi_tilde(k, p.w, p.z);
                        fl = family.psi_tilde(k, p.w, p.z);
                        break;
                    case KineticVariant::upsilon:
                        v = family.upsilon(k, p.w, p.z);
                        fl = family.varphi(k, p.w, p.z);
                        break;
                    case KineticVariant::upsilon_tilde:
                        v = family.upsilon_tilde(k, p.w, p.z);
                        fl = family.varphi_tilde(k, p.w, p.z);
                        break;
                }
                f.value[f.idx(n, i, k)] = v;
                f.fluxval[f.idx(n, i, k)] = fl;
            }
        }
    });
    return f;
}

double MeasureEstimate::total() const {
    double s = 0.0;
    for (const Cell& c : cells) s += c.mass;
    return s;
}
double MeasureEstimate::total_abs() const {
    double s = 0.0;
    for (const Cell& c : cells) s += std::abs(c.mass);
    return s;
}
double MeasureEstimate::positive_part() const {
    double s = 0.0;
    for (const Cell& c : cells) s += std::max(c.mass, 0.0);
    return s;
}

// Hat centers spaced half the support width: partition of unity between the
// first and last center.
std::vector<int> hat_lattice_interior(int n_nodes, int width) {
    std::vector<int> c;
    for (int i = width; i + width <= n_nodes - 1; i += width) c.push_back(i);
    return c;
}

std::vector<int> hat_lattice_periodic(int n_nodes, int width) {
    std::vector<int> c;
    for (int i = 0; i < n_nodes; i += width) c.push_back(i);
    return c;
}

namespace {
constexpr auto hat_centers = hat_lattice_interior;
constexpr auto hat_centers_periodic = hat_lattice_periodic;
}  // namespace

// The time/space derivative is moved onto the field by centered differences
// (discrete summation by parts), so the pairing is exactly zero on constant
// fields and a second-order weak residual on smooth ones.
MeasureEstimate kinetic_residual(const KineticField& f, int width_cells) {
    if (width_cells < 2) throw Error("test width must be >= 2 cells");
    MeasureEstimate m;
    m.kind = "kinetic_residual";
    m.width = width_cells;
    m.nt = f.nt;
    m.nx = f.nx;
    m.nk = f.nk;
    m.dt = f.dt_snap();
    m.dx = f.dx;
    m.dk = f.kgrid.dx();
    m.t0 = f.t.empty() ? 0.0 : f.t.front();
    m.L = f.L;

    const auto tc = hat_centers(f.nt, width_cells);
    const auto xc = hat_centers_periodic(f.nx, width_cells);
    const double inv2dt = 1.0 / (2.0 * m.dt);
    const double inv2dx = 1.0 / (2.0 * m.dx);
    const double vol = m.dt * m.dx * m.dk;

    std::vector<std::vector<MeasureEstimate::Cell>> rows(tc.size());
    parallel_for(static_cast<int>(tc.size()), [&](int a) {
        const int cn = tc[a];
        auto& out = rows[a];
        std::vector<double> acc;
        for (int ci : xc) {
            acc.assign(static_cast<size_t>(f.nk), 0.0);
            for (int dn = -width_cells + 1; dn <= width_cells - 1; ++dn) {
                const int n = cn + dn;
                const double pt = 1.0 - std::abs(dn) / double(width_cells);
                for (int di = -width_cells + 1; di <= width_cells - 1; ++di) {
                    const int i = ((ci + di) % f.nx + f.nx) % f.nx;
                    const int im = (i + f.nx - 1) % f.nx;
                    const int ip = (i + 1) % f.nx;
                    const double wgt = pt * (1.0 - std::abs(di) / double(width_cells));
                    const double* vn = &f.value[f.idx(n + 1, i, 0)];
                    const double* vp = &f.value[f.idx(n - 1, i, 0)];
                    const double* fp = &f.fluxval[f.idx(n, ip, 0)];
                    const double* fm = &f.fluxval[f.idx(n, im, 0)];
                    for (int k = 0; k < f.nk; ++k)
                        acc[k] += wgt * ((vn[k] - vp[k]) * inv2dt + (fp[k] - fm[k]) * inv2dx);
                }
            }
            for (int k = 1; k + 1 < f.nk; ++k) {
                const double mass = acc[k] * vol;
                if (mass != 0.0) out.push_back({cn, ci, k, mass});
            }
        }
    });
    for (auto& r : rows) m.cells.insert(m.cells.end(), r.begin(), r.end());
    return m;
}

MeasureEstimate kinetic_residual_against(const KineticField& f, std::span<const double> rho,
                                         int width_cells) {
    if (static_cast<int>(rho.size()) != f.nk)
        throw GridMismatchError("rho samples do not match the kinetic grid");
    MeasureEstimate m;
    m.kind = "kinetic_residual_profile";
    m.width = width_cells;
    m.nt = f.nt;
    m.nx = f.nx;
    m.nk = 1;
    m.dt = f.dt_snap();
    m.dx = f.dx;
    m.dk = f.kgrid.dx();
    m.t0 = f.t.empty() ? 0.0 : f.t.front();
    m.L = f.L;

    // contract the kinetic axis first, trapezoid weights on the family grid
    std::vector<double> val(static_cast<size_t>(f.nt) * f.nx, 0.0);
    std::vector<double> flx(val.size(), 0.0);
    for (int n = 0; n < f.nt; ++n) {
        for (int i = 0; i < f.nx; ++i) {
            double a = 0.0, b = 0.0;
            for (int k = 0; k < f.nk; ++k) {
                const double wk = (k == 0 || k == f.nk - 1) ? 0.5 * m.dk : m.dk;
                a += wk * rho[k] * f.at(n, i, k);
                b += wk * rho[k] * f.flux_at(n, i, k);
            }
            val[static_cast<size_t>(n) * f.nx + i] = a;
            flx[static_cast<size_t>(n) * f.nx + i] = b;
        }
    }

    const auto tc = hat_centers(f.nt, width_cells);
    const auto xc = hat_centers_periodic(f.nx, width_cells);
    const double inv2dt = 1.0 / (2.0 * m.dt);
    const double inv2dx = 1.0 / (2.0 * m.dx);
    for (int cn : tc) {
        for (int ci : xc) {
            double acc = 0.0;
            for (int dn = -width_cells + 1; dn <= width_cells - 1; ++dn) {
                const int n = cn + dn;
                const double pt = 1.0 - std::abs(dn) / double(width_cells);
                for (int di = -width_cells + 1; di <= width_cells - 1; ++di) {
                    const int i = ((ci + di) % f.nx + f.nx) % f.nx;
                    const int im = (i + f.nx - 1) % f.nx;
                    const int ip = (i + 1) % f.nx;
                    const double px = 1.0 - std::abs(di) / double(width_cells);
                    acc += pt * px *
                           ((val[size_t(n + 1) * f.nx + i] - val[size_t(n - 1) * f.nx + i]) *
                                inv2dt +
                            (flx[size_t(n) * f.nx + ip] - flx[size_t(n) * f.nx + im]) * inv2dx);
                }
            }
            const double mass = acc * m.dt * m.dx;
            if (mass != 0.0) m.cells.push_back({cn, ci, -1, mass});
        }
    }
    return m;
}

KineticSplit split_residual(const MeasureEstimate& T, bool nonneg_mu1) {
    KineticSplit s;
    s.mu1 = T;
    s.mu0 = T;
    s.mu1.cells.clear();
    s.mu0.cells.clear();
    s.mu1.kind = nonneg_mu1 ? "mu1_split_nonneg" : "mu1_split";
    s.mu0.kind = "mu0_split";

    std::map<std::pair<int, int>, std::map<int, double>> by_cell;
    for (const auto& c : T.cells) by_cell[{c.t_idx, c.x_idx}][c.k_idx] += c.mass;
    for (auto& [key, vals] : by_cell) {
        // T_j = (m1_{j+1/2} - m1_{j-1/2}) / dk + mu0_j, primitive from below.
        // The walk is dense in j and the primitive is closed at the top node
        // (the leftover lands in mu0 there), so mu1 is compactly supported
        // and the identity holds exactly at every tested node.
        const int klo = vals.begin()->first;
        const int khi = vals.rbegin()->first;
        const int kend = std::min(khi + 1, T.nk - 2);
        double prim = 0.0, prev = 0.0;
        for (int k = klo; k <= kend; ++k) {
            const auto it = vals.find(k);
            const double mass = it == vals.end() ? 0.0 : it->second;
            prim += T.dk * mass;
            double m1 = nonneg_mu1 ? std::max(prim, 0.0) : prim;
            if (k == kend) m1 = 0.0;
            const double mu0 = mass - (m1 - prev) / T.dk;
            if (m1 != 0.0) s.mu1.cells.push_back({key.first, key.second, k, m1});
            if (mu0 != 0.0) s.mu0.cells.push_back({key.first, key.second, k, mu0});
            prev = m1;
        }
    }
    return s;
}

EtaSpec eta_from_pair(const EntropyPair& pair) { return {pair.id, pair.eta, pair.q}; }

EtaSpec eta_from_tables(const SystemChart& chart, const ReconstructedPair& tables,
                        const std::string& id) {
    EtaSpec s;
    s.id = id;
    const Table2 eta = tables.eta, q = tables.q;
    const SystemChart* ch = &chart;
    s.eta = [eta, ch](const State& u) {
        const Riemann p = ch->to_riemann(u);
        return eta.eval(p.w, p.z);
    };
    s.q = [q, ch](const State& u) {
        const Riemann p = ch->to_riemann(u);
        return q.eval(p.w, p.z);
    };
    return s;
}

MeasureEstimate dissipation_measure(const GridSolution& sol, const SystemChart& chart,
                                    const EtaSpec& spec, int width_cells) {
    (void)chart;
    MeasureEstimate m;
    m.kind = "mu_eta:" + spec.id;
    m.width = width_cells;
    m.nt = sol.nt();
    m.nx = sol.nx;
    m.nk = 0;
    m.dt = sol.dt_snap();
    m.dx = sol.dx;
    m.t0 = sol.t.empty() ? 0.0 : sol.t.front();
    m.L = sol.L;

    std::vector<double> ev(static_cast<size_t>(m.nt) * m.nx), qv(ev.size());
    parallel_for(m.nt, [&](int n) {
        for (int i = 0; i < m.nx; ++i) {
            ev[static_cast<size_t>(n) * m.nx + i] = spec.eta(sol.u[n][i]);
            qv[static_cast<size_t>(n) * m.nx + i] = spec.q(sol.u[n][i]);
        }
    });

    const auto tc = hat_centers(m.nt, width_cells);
    const auto xc = hat_centers_periodic(m.nx, width_cells);
    const double inv2dt = 1.0 / (2.0 * m.dt);
    const double inv2dx = 1.0 / (2.0 * m.dx);
    for (int cn : tc) {
        for (int ci : xc) {
            double acc = 0.0;
            for (int dn = -width_cells + 1; dn <= width_cells - 1; ++dn) {
                const int n = cn + dn;
                const double pt = 1.0 - std::abs(dn) / double(width_cells);
                for (int di = -width_cells + 1; di <= width_cells - 1; ++di) {
                    const int i = ((ci + di) % m.nx + m.nx) % m.nx;
                    const int im = (i + m.nx - 1) % m.nx;
                    const int ip = (i + 1) % m.nx;
                    const double px = 1.0 - std::abs(di) / double(width_cells);
                    acc += pt * px *
                           ((ev[size_t(n + 1) * m.nx + i] - ev[size_t(n - 1) * m.nx + i]) *
                                inv2dt +
                            (qv[size_t(n) * m.nx + ip] - qv[size_t(n) * m.nx + im]) * inv2dx);
                }
            }
            const double mass = acc * m.dt * m.dx;
            if (mass != 0.0) m.cells.push_back({cn, ci, -1, mass});
        }
    }
    return m;
}

MeasureEstimate mu1_from_viscous(const GridSolution& sol, const SystemChart& chart,
                                 const EntropyFamily& family) {
    if (sol.chart_id != family.chart_id)
        throw ChartMismatchError("solution and family charts differ");
    if (!(sol.epsilon > 0)) throw Error("mu1_from_viscous needs a viscous solution");
    MeasureEstimate m;
    m.kind = "mu1_eps";
    m.width = 1;
    m.nt = sol.nt();
    m.nx = sol.nx;
    m.nk = family.xigrid.n;
    m.dt = sol.dt_snap();
    m.dx = sol.dx;
    m.dk = family.xigrid.dx();
    m.t0 = sol.t.empty() ? 0.0 : sol.t.front();
    m.L = sol.L;

    std::vector<std::vector<MeasureEstimate::Cell>> rows(m.nt);
    parallel_for(m.nt, [&](int n) {
        std::vector<double> w(m.nx), z(m.nx);
        for (int i = 0; i < m.nx; ++i) {
            const Riemann p = chart.to_riemann(sol.u[n][i]);
            w[i] = p.w;
            z[i] = p.z;
        }
        const double tau = (n == 0 || n == m.nt - 1) ? 0.5 * m.dt : m.dt;
        for (int i = 0; i < m.nx; ++i) {
            const double grad =
                (w[(i + 1) % m.nx] - w[(i + m.nx - 1) % m.nx]) / (2.0 * m.dx);
            if (grad == 0.0) continue;
            const Grid1& xg = family.xigrid;
            const int k = xg.cell(std::clamp(w[i], xg.lo, xg.hi));
            const double s = std::clamp((w[i] - xg.x(k)) / xg.dx(), 0.0, 1.0);
            const double theta = (1 - s) * family.xi_members[k].theta.eval(w[i], z[i]) +
                                 s * family.xi_members[k + 1].theta.eval(w[i], z[i]);
            const double mass = theta * sol.epsilon * grad * grad * m.dx * tau;
            if (mass > 0.0) rows[n].push_back({n, i, k, mass});
        }
    });
    for (auto& r : rows) m.cells.insert(m.cells.end(), r.begin(), r.end());
    return m;
}

EntropyBank build_entropy_bank(const SystemChart& chart, const EntropyFamily& family,
                               int n_members) {
    EntropyBank bank;
    const int nxi = family.n_xi();
    const int nze = family.n_zeta();
    const Grid1& xg = family.xigrid;
    const Grid1& zg = family.zetagrid;
    const double pi = std::numbers::pi;

    auto add_member = [&](const std::vector<double>& r1, const std::vector<double>& r2,
                          const std::string& label) {
        ReconstructedPair pair = reconstruct_entropy(family, r1, r2);
        // C^2 scale estimated on the grid in Riemann coordinates
        double norm = 0.0;
        const double dw = pair.eta.gw.dx(), dz = pair.eta.gz.dx();
        for (int i = 0; i < pair.eta.gw.n; ++i) {
            for (int j = 0; j < pair.eta.gz.n; ++j) {
                norm = std::max(norm, std::abs(pair.eta.at(i, j)));
                if (i > 0 && i + 1 < pair.eta.gw.n) {
                    norm = std::max(
                        norm, std::abs(pair.eta.at(i + 1, j) - pair.eta.at(i - 1, j)) / (2 * dw));
                    norm = std::max(norm, std::abs(pair.eta.at(i + 1, j) - 2 * pair.eta.at(i, j) +
                                                   pair.eta.at(i - 1, j)) /
                                              (dw * dw));
                }
                if (j > 0 && j + 1 < pair.eta.gz.n) {
                    norm = std::max(
                        norm, std::abs(pair.eta.at(i, j + 1) - pair.eta.at(i, j - 1)) / (2 * dz));
                    norm = std::max(norm, std::abs(pair.eta.at(i, j + 1) - 2 * pair.eta.at(i, j) +
                                                   pair.eta.at(i, j - 1)) /
                                              (dz * dz));
                }
            }
        }
        if (norm <= 0) return;
        for (double& v : pair.eta.v) v /= norm;
        for (double& v : pair.q.v) v /= norm;
        bank.members.push_back(eta_from_tables(chart, pair, label));
    };

    const int quarter = std::max(1, n_members / 4);
    std::vector<double> zero1(nxi, 0.0), zero2(nze, 0.0);
    for (int m = 0; m < quarter; ++m) {  // sinusoidal in xi
        std::vector<double> r1(nxi);
        for (int k = 0; k < nxi; ++k) {
            const double s = (xg.x(k) - xg.lo) / (xg.hi - xg.lo);
            r1[k] =
                (m % 2 == 0) ? std::sin((m / 2 + 1) * pi * s) : std::cos((m / 2 + 1) * pi * s);
        }
        add_member(r1, zero2, "sin_xi_" + std::to_string(m));
    }
    for (int m = 0; m < quarter; ++m) {  // sinusoidal in zeta
        std::vector<double> r2(nze);
        for (int k = 0; k < nze; ++k) {
            const double s = (zg.x(k) - zg.lo) / (zg.hi - zg.lo);
            r2[k] =
                (m % 2 == 0) ? std::sin((m / 2 + 1) * pi * s) : std::cos((m / 2 + 1) * pi * s);
        }
        add_member(zero1, r2, "sin_zeta_" + std::to_string(m));
    }
    for (int m = 0; m < quarter; ++m) {  // bumps in xi
        std::vector<double> r1(nxi);
        const double c = xg.lo + (m + 0.5) / quarter * (xg.hi - xg.lo);
        const double s = 0.15 * (xg.hi - xg.lo);
        for (int k = 0; k < nxi; ++k) {
            const double d = (xg.x(k) - c) / s;
            r1[k] = std::exp(-d * d);
        }
        add_member(r1, zero2, "bump_xi_" + std::to_string(m));
    }
    for (int m = 0; m < quarter; ++m) {  // bumps in zeta
        std::vector<double> r2(nze);
        const double c = zg.lo + (m + 0.5) / quarter * (zg.hi - zg.lo);
        const double s = 0.15 * (zg.hi - zg.lo);
        for (int k = 0; k < nze; ++k) {
            const double d = (zg.x(k) - c) / s;
            r2[k] = std::exp(-d * d);
        }
        add_member(zero1, r2, "bump_zeta_" + std::to_string(m));
    }
    return bank;
}

MeasureEstimate nu_sup(const GridSolution& sol, const SystemChart& chart,
                       const EntropyBank& bank, int width_cells) {
    if (bank.members.empty()) throw Error("empty entropy bank");
    std::vector<MeasureEstimate> per(bank.members.size());
    parallel_for(static_cast<int>(bank.members.size()), [&](int m) {
        per[m] = dissipation_measure(sol, chart, bank.members[m], width_cells);
    });
    MeasureEstimate out = per[0];
    out.kind = "nu_sup";
    std::map<std::pair<int, int>, double> best;
    for (const auto& p : per)
        for (const auto& c : p.cells) {
            auto& b = best[{c.t_idx, c.x_idx}];
            b = std::max(b, std::abs(c.mass));
        }
    out.cells.clear();
    for (const auto& [key, v] : best)
        if (v > 0.0) out.cells.push_back({key.first, key.second, -1, v});
    return out;
}

double window_mass_rate(const MeasureEstimate& m, double t0, double t1, double x0, double x1) {
    double mass = 0.0;
    int cmin = std::numeric_limits<int>::max(), cmax = std::numeric_limits<int>::min();
    for (const auto& c : m.cells) {
        const double t = m.t0 + c.t_idx * m.dt;
        const double x = c.x_idx * m.dx;
        if (t < t0 || t > t1 || x < x0 || x > x1) continue;
        mass += c.mass;
        cmin = std::min(cmin, c.t_idx);
        cmax = std::max(cmax, c.t_idx);
    }
    if (cmax < cmin) return 0.0;
    // hat coverage: partition of unity between the extreme centers plus a
    // half-hat taper on each side
    const double span = (cmax - cmin + m.width) * m.dt;
    return span > 0 ? mass / span : 0.0;
}

}  // namespace kinlaw
