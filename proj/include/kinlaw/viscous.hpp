#pragma once

#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "kinlaw/grid.hpp"
#include "kinlaw/system_model.hpp"

namespace kinlaw {

// Space-time field on a uniform periodic grid, stored as snapshots with
// uniform spacing. Snapshot states are guaranteed to lie in the chart domain.
struct GridSolution {
    std::string chart_id;
    nlohmann::json config;
    int nx = 0;
    double L = 1.0;
    double dx = 0.0;
    double epsilon = 0.0;
    double dt = 0.0;  // internal step actually used
    double cfl_adv = 0.0, cfl_diff = 0.0;
    double conservation_drift = 0.0;  // max relative drift of component sums
    std::vector<double> t;
    std::vector<std::vector<State>> u;

    int nt() const { return static_cast<int>(t.size()); }
    double t_end() const { return t.empty() ? 0.0 : t.back(); }
    double dt_snap() const { return t.size() > 1 ? t[1] - t[0] : 0.0; }
    double x(int i) const { return i * dx; }

    // Bilinear space-time interpolation, periodic in x, clamped in t.
    State eval(double tq, double xq) const;
};

struct SimConfig {
    double T = 1.0;
    double L = 1.0;
    int nx = 256;
    double epsilon = 0.01;
    int snapshots = 201;  // stored time levels including t = 0
    std::string initial_rule = "sine";
    nlohmann::json initial_params = nlohmann::json::object();
    double cfl = 0.4;
    bool domain_check = true;
};

std::vector<State> make_initial_data(const SystemChart& chart, const SimConfig& cfg);

// One explicit RK2 (Heun) step with second-order centered flux differencing
// and centered diffusion, periodic wraparound. speed_hint avoids rescanning
// the chart speed bound in inner loops; pass a negative value to recompute.
void step(const SystemChart& chart, std::vector<State>& field, double epsilon, double dt,
          double dx, double speed_hint = -1.0, bool domain_check = true);

GridSolution simulate(const SystemChart& chart, const SimConfig& cfg);

// Exact entropy / entropy-flux pair used for sign checks: separable quadratic
// for the decoupled and linear charts, mechanical energy for the p-system.
struct EntropyPair {
    std::string id;
    std::function<double(const State&)> eta;
    std::function<double(const State&)> q;
};
EntropyPair builtin_convex_entropy(const SystemChart& chart);

// Quadratic-in-Riemann energy density used by the ledger bookkeeping.
double quadratic_entropy(const SystemChart& chart, const State& u);

struct EnergyLedger {
    std::string entropy_id = "quadratic-riemann";
    double initial_entropy = 0.0;
    std::vector<double> slab_t0, slab_t1, slab_dissipation;
    double dissipation_total = 0.0;     // iint eps |u_x|^2 over the window
    double cone_dissipation = 0.0;      // restricted to |x - c| <= M + V (T - t)
    double cone_center = 0.0, cone_halfwidth = 0.0, cone_speed = 0.0;
    double bound_constant = 0.0;        // dissipation_total / initial_entropy
};

EnergyLedger energy_budget(const SystemChart& chart, const GridSolution& sol, int slabs = 8);

struct ConvergenceReport {
    std::vector<double> eps;
    std::vector<double> l1_distance;  // between consecutive resolutions at t = T
    bool cauchy = false;
};

ConvergenceReport vanishing_sequence(const SystemChart& chart, SimConfig cfg,
                                     const std::vector<double>& eps_list);

}  // namespace kinlaw
