#pragma once

#include <memory>
#include <string>
#include <utility>

#include <json.hpp>

#include "kinlaw/grid.hpp"

namespace kinlaw {

struct EigenStructure {
    double lambda1 = 0.0, lambda2 = 0.0;
    State r1, r2;  // right eigenvectors, oriented along increasing w resp. z
    State l1, l2;  // left eigenvectors, normalized l_i . r_j = delta_ij
};

struct GnlCertificate {
    double c_bar = 0.0;  // 0.9 x grid minimum of d_w lambda1 and d_z lambda2
    double gap = 0.0;    // grid minimum of lambda2 - lambda1
    int samples = 0;     // nodes per axis used for the scan
};

// A concrete 2x2 strictly hyperbolic system together with its Riemann chart.
// The state domain is phi^{-1}(W) for the rectangle W in Riemann coordinates,
// so membership checks go through the chart. All evaluations are pure.
class SystemChart {
public:
    virtual ~SystemChart() = default;

    virtual std::string id() const = 0;
    virtual nlohmann::json params() const = 0;

    const Rect& rectangle() const { return rect_; }

    virtual State flux(const State& u) const = 0;
    virtual Mat2 flux_jacobian(const State& u) const = 0;
    virtual Riemann to_riemann(const State& u) const = 0;
    virtual State from_riemann(const Riemann& p) const = 0;

    // Wave speeds (lambda1 < lambda2) as functions of the Riemann coordinates.
    // Default goes through from_riemann + the Jacobian eigenvalues; charts with
    // closed forms override.
    virtual std::pair<double, double> lambdas(const Riemann& p) const;

    // Coordinate derivatives of the speeds in the (w, z) chart. Defaults are
    // centered differences of lambdas(); closed-form overrides where available.
    virtual double dlambda1_dw(const Riemann& p) const;
    virtual double dlambda1_dz(const Riemann& p) const;
    virtual double dlambda2_dw(const Riemann& p) const;
    virtual double dlambda2_dz(const Riemann& p) const;

    bool contains_riemann(const Riemann& p, double tol = 1e-12) const {
        return rect_.contains(p, tol);
    }
    bool contains(const State& u, double tol = 1e-9) const;

    // Upper bound for max(|lambda1|, |lambda2|) over the rectangle (grid scan).
    double speed_bound() const;

protected:
    Rect rect_;
    double fd_step() const;
};

// Chart-checked operations.
State eval_flux(const SystemChart& chart, const State& u);
EigenStructure eigen_structure(const SystemChart& chart, const State& u);
Riemann to_riemann(const SystemChart& chart, const State& u);
State from_riemann(const SystemChart& chart, const Riemann& p);
GnlCertificate check_hyperbolic_gnl(const SystemChart& chart, int n_samples);

// Built-in charts: "decoupled", "p_system", "linear".
std::unique_ptr<SystemChart> make_chart(const std::string& id,
                                        const nlohmann::json& params = {});

}  // namespace kinlaw
