#include "kinlaw/viscous.hpp"

#include <cmath>
#include <numbers>

namespace kinlaw {

State GridSolution::eval(double tq, double xq) const {
    const double ts = dt_snap();
    int n = 0;
    double a = 0.0;
    if (ts > 0.0) {
        const double s = std::clamp((tq - t.front()) / ts, 0.0, double(nt() - 1));
        n = std::min(static_cast<int>(s), nt() - 2);
        a = s - n;
    }
    double xr = std::fmod(xq, L);
    if (xr < 0) xr += L;
    const double p = xr / dx;
    const int i = std::min(static_cast<int>(p), nx - 1);
    const double b = p - i;
    const int ip = (i + 1) % nx;
    const State lo = (1 - b) * u[n][i] + b * u[n][ip];
    if (nt() == 1) return lo;
    const State hi = (1 - b) * u[n + 1][i] + b * u[n + 1][ip];
    return (1 - a) * lo + a * hi;
}

std::vector<State> make_initial_data(const SystemChart& chart, const SimConfig& cfg) {
    const auto& P = cfg.initial_params;
    const Rect& R = chart.rectangle();
    std::vector<State> out(cfg.nx);
    const double twopi = 2.0 * std::numbers::pi;

    auto fill_riemann = [&](const std::function<Riemann(double)>& f) {
        for (int i = 0; i < cfg.nx; ++i) {
            const Riemann p = f(i * cfg.L / cfg.nx);
            if (!chart.contains_riemann(p, 1e-12))
                throw DomainError("initial data leaves the rectangle W");
            out[i] = chart.from_riemann(p);
        }
    };

    if (cfg.initial_rule == "constant") {
        const double w = P.value("w", R.w_center());
        const double z = P.value("z", R.z_center());
        fill_riemann([&](double) { return Riemann{w, z}; });
    } else if (cfg.initial_rule == "sine" || cfg.initial_rule == "ramp") {
        const double w0 = P.value("w0", R.w_center());
        const double z0 = P.value("z0", R.z_center());
        const double aw = P.value("amp_w", 0.1);
        const double az = P.value("amp_z", 0.0);
        const double phw = P.value("phase_w", 0.0);
        const double phz = P.value("phase_z", 0.0);
        const bool ramp = cfg.initial_rule == "ramp";
        fill_riemann([&](double x) {
            const double arg = twopi * x / cfg.L;
            if (ramp)  // smooth spreading profile: increasing over half the period
                return Riemann{w0 - aw * std::cos(arg), z0 - az * std::cos(arg)};
            return Riemann{w0 + aw * std::sin(arg + phw), z0 + az * std::sin(arg + phz)};
        });
    } else if (cfg.initial_rule == "two_jump") {
        const std::string comp = P.value("component", "w");
        const double left = P.value("left", R.w_center() + 0.1);
        const double right = P.value("right", R.w_center() - 0.1);
        const double other = P.value("other", comp == "w" ? R.z_center() : R.w_center());
        const std::string smoothing = P.value("smoothing", "viscous");
        const double delta = std::abs(left - right);
        double ell = 0.0;
        if (smoothing == "viscous" && delta > 0)
            ell = std::max(1.5 * cfg.L / cfg.nx, 4.0 * cfg.epsilon / delta);
        const double mid = 0.5 * (left + right);
        fill_riemann([&](double x) {
            double prof;
            if (ell > 0) {
                // periodic two-front profile; near x = L/2 this is the viscous
                // traveling-wave shape tanh((x - L/2)/ell)
                const double s = std::sin(twopi * (x - 0.5 * cfg.L) / cfg.L);
                prof = mid - 0.5 * (left - right) * std::tanh(s * cfg.L / (twopi * ell));
            } else {
                prof = (x < 0.5 * cfg.L) ? left : right;
            }
            if (comp == "w") return Riemann{prof, other};
            return Riemann{other, prof};
        });
    } else {
        throw Error("unknown initial data rule: " + cfg.initial_rule);
    }
    return out;
}

void step(const SystemChart& chart, std::vector<State>& field, double epsilon, double dt,
          double dx, double speed_hint, bool domain_check) {
    const int n = static_cast<int>(field.size());
    const double smax = speed_hint > 0 ? speed_hint : chart.speed_bound();
    if (smax * dt / dx > 0.4 + 1e-12)
        throw StabilityError("advective CFL " + std::to_string(smax * dt / dx) + " > 0.4");
    if (epsilon * dt / (dx * dx) > 0.4 + 1e-12)
        throw StabilityError("diffusion number " + std::to_string(epsilon * dt / (dx * dx)) +
                             " > 0.4");

    auto rhs = [&](const std::vector<State>& v, std::vector<State>& out) {
        for (int i = 0; i < n; ++i) {
            const int im = (i + n - 1) % n;
            const int ip = (i + 1) % n;
            const State fm = chart.flux(v[im]);
            const State fp = chart.flux(v[ip]);
            State r = (-0.5 / dx) * (fp - fm);
            if (epsilon > 0)
                r = r + (epsilon / (dx * dx)) * (v[ip] - 2.0 * v[i] + v[im]);
            out[i] = r;
        }
    };

    static thread_local std::vector<State> k1, mid, k2;
    k1.resize(n);
    mid.resize(n);
    k2.resize(n);
    rhs(field, k1);
    for (int i = 0; i < n; ++i) mid[i] = field[i] + dt * k1[i];
    rhs(mid, k2);
    for (int i = 0; i < n; ++i) field[i] = field[i] + (0.5 * dt) * (k1[i] + k2[i]);

    if (domain_check) {
        for (int i = 0; i < n; ++i) {
            if (!chart.contains(field[i], 1e-6))
                throw DomainError("state escaped the invariant region at cell " +
                                  std::to_string(i));
        }
    }
}

GridSolution simulate(const SystemChart& chart, const SimConfig& cfg) {
    if (cfg.nx < 4 || cfg.snapshots < 2 || cfg.T <= 0 || cfg.L <= 0)
        throw Error("invalid simulation config");
    GridSolution sol;
    sol.chart_id = chart.id();
    sol.nx = cfg.nx;
    sol.L = cfg.L;
    sol.dx = cfg.L / cfg.nx;
    sol.epsilon = cfg.epsilon;
    sol.config = {{"T", cfg.T},
                  {"L", cfg.L},
                  {"nx", cfg.nx},
                  {"epsilon", cfg.epsilon},
                  {"snapshots", cfg.snapshots},
                  {"initial_rule", cfg.initial_rule},
                  {"initial_params", cfg.initial_params},
                  {"cfl", cfg.cfl}};

    const double smax = chart.speed_bound();
    double dt_max = cfg.cfl * sol.dx / smax;
    if (cfg.epsilon > 0) dt_max = std::min(dt_max, cfg.cfl * sol.dx * sol.dx / cfg.epsilon);
    const double ts = cfg.T / (cfg.snapshots - 1);
    const int per_snap = std::max(1, static_cast<int>(std::ceil(ts / dt_max - 1e-12)));
    sol.dt = ts / per_snap;
    sol.cfl_adv = smax * sol.dt / sol.dx;
    sol.cfl_diff = cfg.epsilon * sol.dt / (sol.dx * sol.dx);

    std::vector<State> field = make_initial_data(chart, cfg);
    double sum1 = 0, sum2 = 0;
    for (const State& s : field) {
        sum1 += s.u1;
        sum2 += s.u2;
    }
    const double ref1 = std::max(std::abs(sum1), 1.0), ref2 = std::max(std::abs(sum2), 1.0);

    sol.t.reserve(cfg.snapshots);
    sol.u.reserve(cfg.snapshots);
    sol.t.push_back(0.0);
    sol.u.push_back(field);
    for (int s = 1; s < cfg.snapshots; ++s) {
        for (int k = 0; k < per_snap; ++k)
            step(chart, field, cfg.epsilon, sol.dt, sol.dx, smax, cfg.domain_check);
        sol.t.push_back(s * ts);
        sol.u.push_back(field);
        double c1 = 0, c2 = 0;
        for (const State& st : field) {
            c1 += st.u1;
            c2 += st.u2;
        }
        sol.conservation_drift = std::max(
            sol.conservation_drift,
            std::max(std::abs(c1 - sum1) / ref1, std::abs(c2 - sum2) / ref2));
    }
    return sol;
}

EntropyPair builtin_convex_entropy(const SystemChart& chart) {
    EntropyPair p;
    if (chart.id() == "decoupled") {
        p.id = "separable-quadratic";
        p.eta = [](const State& u) { return 0.5 * (u.u1 * u.u1 + u.u2 * u.u2); };
        p.q = [](const State& u) {
            return u.u1 * u.u1 * u.u1 / 3.0 + u.u2 * u.u2 * u.u2 / 3.0 + 2.0 * u.u2 * u.u2;
        };
        return p;
    }
    if (chart.id() == "p_system") {
        p.id = "mechanical-energy";
        p.eta = [](const State& u) {
            const double a = u.u1, v = u.u2;
            return 0.5 * v * v + 0.5 * a * a + 0.25 * a * a * a * a;
        };
        p.q = [](const State& u) { return -u.u2 * (u.u1 + u.u1 * u.u1 * u.u1); };
        return p;
    }
    if (chart.id() == "linear") {
        const auto prm = chart.params();
        const double a = prm.value("a", 1.0), b = prm.value("b", 4.0);
        p.id = "separable-quadratic";
        p.eta = [](const State& u) { return 0.5 * (u.u1 * u.u1 + u.u2 * u.u2); };
        p.q = [a, b](const State& u) { return 0.5 * (a * u.u1 * u.u1 + b * u.u2 * u.u2); };
        return p;
    }
    throw Error("no built-in entropy pair for chart " + chart.id());
}

double quadratic_entropy(const SystemChart& chart, const State& u) {
    const Rect& R = chart.rectangle();
    const Riemann p = chart.to_riemann(u);
    const double dw = p.w - R.w_center();
    const double dz = p.z - R.z_center();
    return 0.5 * (dw * dw + dz * dz);
}

EnergyLedger energy_budget(const SystemChart& chart, const GridSolution& sol, int slabs) {
    EnergyLedger led;
    const int nt = sol.nt();
    const int nx = sol.nx;
    for (int i = 0; i < nx; ++i)
        led.initial_entropy += quadratic_entropy(chart, sol.u[0][i]) * sol.dx;

    // eps |u_x|^2 per snapshot, centered differences, trapezoid in time
    std::vector<double> D(nt, 0.0);
    std::vector<double> Dcone(nt, 0.0);
    led.cone_center = 0.5 * sol.L;
    led.cone_halfwidth = sol.L / 8.0;
    led.cone_speed = chart.speed_bound();
    const double T = sol.t_end();
    for (int n = 0; n < nt; ++n) {
        const double reach = led.cone_halfwidth + led.cone_speed * (T - sol.t[n]);
        for (int i = 0; i < nx; ++i) {
            const State g = (0.5 / sol.dx) * (sol.u[n][(i + 1) % nx] - sol.u[n][(i + nx - 1) % nx]);
            const double e = sol.epsilon * (g.u1 * g.u1 + g.u2 * g.u2) * sol.dx;
            D[n] += e;
            double d = std::abs(sol.x(i) - led.cone_center);
            d = std::min(d, sol.L - d);
            if (d <= reach) Dcone[n] += e;
        }
    }
    const double ts = sol.dt_snap();
    slabs = std::max(1, std::min(slabs, nt - 1));
    const int per = (nt - 1) / slabs;
    for (int s = 0; s < slabs; ++s) {
        const int n0 = s * per;
        const int n1 = (s == slabs - 1) ? nt - 1 : (s + 1) * per;
        double acc = 0.0;
        for (int n = n0; n < n1; ++n) acc += 0.5 * ts * (D[n] + D[n + 1]);
        led.slab_t0.push_back(sol.t[n0]);
        led.slab_t1.push_back(sol.t[n1]);
        led.slab_dissipation.push_back(acc);
        led.dissipation_total += acc;
    }
    for (int n = 0; n + 1 < nt; ++n)
        led.cone_dissipation += 0.5 * ts * (Dcone[n] + Dcone[n + 1]);
    led.bound_constant =
        led.initial_entropy > 0 ? led.dissipation_total / led.initial_entropy : 0.0;
    return led;
}

ConvergenceReport vanishing_sequence(const SystemChart& chart, SimConfig cfg,
                                     const std::vector<double>& eps_list) {
    if (eps_list.size() < 3) throw Error("vanishing_sequence needs >= 3 viscosities");
    for (size_t i = 1; i < eps_list.size(); ++i)
        if (!(eps_list[i] < eps_list[i - 1]))
            throw Error("vanishing_sequence needs a strictly decreasing eps list");

    ConvergenceReport rep;
    rep.eps = eps_list;
    std::vector<std::vector<State>> finals;
    for (double e : eps_list) {
        cfg.epsilon = e;
        finals.push_back(simulate(chart, cfg).u.back());
    }
    const double dx = cfg.L / cfg.nx;
    for (size_t k = 0; k + 1 < finals.size(); ++k) {
        double d = 0.0;
        for (int i = 0; i < cfg.nx; ++i) {
            d += (std::abs(finals[k][i].u1 - finals[k + 1][i].u1) +
                  std::abs(finals[k][i].u2 - finals[k + 1][i].u2)) *
                 dx;
        }
        rep.l1_distance.push_back(d);
    }
    rep.cauchy = true;
    for (size_t k = 0; k + 1 < rep.l1_distance.size(); ++k)
        if (!(rep.l1_distance[k + 1] < rep.l1_distance[k])) rep.cauchy = false;
    return rep;
}

}  // namespace kinlaw
