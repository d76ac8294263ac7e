#include "kinlaw/system_model.hpp"

#include <cmath>
#include <limits>

namespace kinlaw {

double SystemChart::fd_step() const {
    return 1e-5 * std::min(rect_.w_hi - rect_.w_lo, rect_.z_hi - rect_.z_lo);
}

std::pair<double, double> SystemChart::lambdas(const Riemann& p) const {
    const State u = from_riemann(p);
    const Mat2 J = flux_jacobian(u);
    const double tr = J.a11 + J.a22;
    const double disc2 = (J.a11 - J.a22) * (J.a11 - J.a22) + 4.0 * J.a12 * J.a21;
    if (disc2 < 0.0) throw HyperbolicityError("complex eigenvalues at sampled state");
    const double disc = std::sqrt(disc2);
    return {0.5 * (tr - disc), 0.5 * (tr + disc)};
}

namespace {

// Centered difference inside the rectangle, one-sided at the edges.
template <typename F>
double fd_axis(F&& f, double x, double lo, double hi, double h) {
    if (x - h >= lo && x + h <= hi) return (f(x + h) - f(x - h)) / (2 * h);
    if (x + h <= hi) return (f(x + h) - f(x)) / h;
    return (f(x) - f(x - h)) / h;
}

}  // namespace

double SystemChart::dlambda1_dw(const Riemann& p) const {
    const double h = fd_step();
    return fd_axis([&](double w) { return lambdas({w, p.z}).first; }, p.w, rect_.w_lo,
                   rect_.w_hi, h);
}
double SystemChart::dlambda1_dz(const Riemann& p) const {
    const double h = fd_step();
    return fd_axis([&](double z) { return lambdas({p.w, z}).first; }, p.z, rect_.z_lo,
                   rect_.z_hi, h);
}
double SystemChart::dlambda2_dw(const Riemann& p) const {
    const double h = fd_step();
    return fd_axis([&](double w) { return lambdas({w, p.z}).second; }, p.w, rect_.w_lo,
                   rect_.w_hi, h);
}
double SystemChart::dlambda2_dz(const Riemann& p) const {
    const double h = fd_step();
    return fd_axis([&](double z) { return lambdas({p.w, z}).second; }, p.z, rect_.z_lo,
                   rect_.z_hi, h);
}

bool SystemChart::contains(const State& u, double tol) const {
    try {
        return contains_riemann(to_riemann(u), tol);
    } catch (const Error&) {
        return false;
    }
}

double SystemChart::speed_bound() const {
    const int n = 33;
    double m = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const Riemann p{rect_.w_lo + i * (rect_.w_hi - rect_.w_lo) / (n - 1),
                            rect_.z_lo + j * (rect_.z_hi - rect_.z_lo) / (n - 1)};
            auto [l1, l2] = lambdas(p);
            m = std::max({m, std::abs(l1), std::abs(l2)});
        }
    }
    return m;
}

State eval_flux(const SystemChart& chart, const State& u) {
    if (!chart.contains(u))
        throw DomainError("state (" + std::to_string(u.u1) + ", " + std::to_string(u.u2) +
                          ") outside the invariant region of chart " + chart.id());
    return chart.flux(u);
}

EigenStructure eigen_structure(const SystemChart& chart, const State& u) {
    if (!chart.contains(u)) throw DomainError("state outside chart domain");
    const Mat2 J = chart.flux_jacobian(u);
    const double tr = J.a11 + J.a22;
    const double disc2 = (J.a11 - J.a22) * (J.a11 - J.a22) + 4.0 * J.a12 * J.a21;
    if (disc2 < 0.0) throw HyperbolicityError("complex eigenvalues");
    const double disc = std::sqrt(disc2);
    EigenStructure es;
    es.lambda1 = 0.5 * (tr - disc);
    es.lambda2 = 0.5 * (tr + disc);
    const double scale = std::max({std::abs(J.a11), std::abs(J.a22), std::abs(J.a12),
                                   std::abs(J.a21), 1e-300});
    if (disc < 1e-10 * scale) throw HyperbolicityError("eigenvalue gap below tolerance");

    auto right_vec = [&](double lam) -> State {
        if (std::abs(J.a12) >= std::abs(J.a21) && std::abs(J.a12) > 1e-14 * scale)
            return {J.a12, lam - J.a11};
        if (std::abs(J.a21) > 1e-14 * scale) return {lam - J.a22, J.a21};
        // diagonal Jacobian
        return std::abs(lam - J.a11) <= std::abs(lam - J.a22) ? State{1, 0} : State{0, 1};
    };
    es.r1 = right_vec(es.lambda1);
    es.r2 = right_vec(es.lambda2);
    const double n1 = norm(es.r1), n2 = norm(es.r2);
    es.r1 = (1.0 / n1) * es.r1;
    es.r2 = (1.0 / n2) * es.r2;

    // Orient r1 along increasing w and r2 along increasing z.
    const Riemann p = chart.to_riemann(u);
    const Rect& R = chart.rectangle();
    const double h = 1e-6 * std::min(R.w_hi - R.w_lo, R.z_hi - R.z_lo);
    const State ew = chart.from_riemann({std::min(p.w + h, R.w_hi), p.z}) -
                     chart.from_riemann({std::max(p.w - h, R.w_lo), p.z});
    const State ez = chart.from_riemann({p.w, std::min(p.z + h, R.z_hi)}) -
                     chart.from_riemann({p.w, std::max(p.z - h, R.z_lo)});
    if (es.r1.u1 * ew.u1 + es.r1.u2 * ew.u2 < 0) es.r1 = -1.0 * es.r1;
    if (es.r2.u1 * ez.u1 + es.r2.u2 * ez.u2 < 0) es.r2 = -1.0 * es.r2;

    const double det = es.r1.u1 * es.r2.u2 - es.r2.u1 * es.r1.u2;
    if (std::abs(det) < 1e-13) throw HyperbolicityError("eigenvector matrix singular");
    es.l1 = {es.r2.u2 / det, -es.r2.u1 / det};
    es.l2 = {-es.r1.u2 / det, es.r1.u1 / det};
    return es;
}

Riemann to_riemann(const SystemChart& chart, const State& u) {
    if (!chart.contains(u)) throw DomainError("state outside chart domain");
    return chart.to_riemann(u);
}

State from_riemann(const SystemChart& chart, const Riemann& p) {
    if (!chart.contains_riemann(p, 1e-12)) throw DomainError("point outside rectangle");
    return chart.from_riemann(p);
}

GnlCertificate check_hyperbolic_gnl(const SystemChart& chart, int n_samples) {
    if (n_samples < 16) throw Error("check_hyperbolic_gnl needs >= 16 samples per axis");
    const Rect& R = chart.rectangle();
    const double dw = (R.w_hi - R.w_lo) / (n_samples - 1);
    const double dz = (R.z_hi - R.z_lo) / (n_samples - 1);
    const double h = 0.25 * std::min(dw, dz);

    double gap = std::numeric_limits<double>::infinity();
    double dmin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n_samples; ++i) {
        for (int j = 0; j < n_samples; ++j) {
            auto [l1, l2] = chart.lambdas({R.w_lo + i * dw, R.z_lo + j * dz});
            gap = std::min(gap, l2 - l1);
            // centered derivative stencils pulled inward at the edges
            const double w = std::clamp(R.w_lo + i * dw, R.w_lo + h, R.w_hi - h);
            const double z = std::clamp(R.z_lo + j * dz, R.z_lo + h, R.z_hi - h);
            const double d1 =
                (chart.lambdas({w + h, z}).first - chart.lambdas({w - h, z}).first) / (2 * h);
            const double d2 =
                (chart.lambdas({w, z + h}).second - chart.lambdas({w, z - h}).second) / (2 * h);
            dmin = std::min({dmin, d1, d2});
        }
    }
    if (gap <= 0.0) throw HyperbolicityError("eigenvalue gap non-positive on the grid");
    if (dmin <= 0.0)
        throw NotGnlError("grid minimum of the characteristic-speed derivatives is " +
                          std::to_string(dmin));
    GnlCertificate cert;
    cert.c_bar = 0.9 * dmin;
    cert.gap = gap;
    cert.samples = n_samples;
    return cert;
}

// ---------------------------------------------------------------------------
// Built-in charts
// ---------------------------------------------------------------------------

namespace {

// Two decoupled Burgers-type laws, f = (u1^2/2, u2^2/2 + 4 u2). The Riemann
// chart is the identity, g = h = 1, and every family quantity is closed form.
class DecoupledChart final : public SystemChart {
public:
    DecoupledChart() { rect_ = {-1.0, 1.0, -1.0, 1.0}; }

    std::string id() const override { return "decoupled"; }
    nlohmann::json params() const override { return nlohmann::json::object(); }

    State flux(const State& u) const override {
        return {0.5 * u.u1 * u.u1, 0.5 * u.u2 * u.u2 + 4.0 * u.u2};
    }
    Mat2 flux_jacobian(const State& u) const override { return {u.u1, 0.0, 0.0, u.u2 + 4.0}; }
    Riemann to_riemann(const State& u) const override { return {u.u1, u.u2}; }
    State from_riemann(const Riemann& p) const override { return {p.w, p.z}; }

    std::pair<double, double> lambdas(const Riemann& p) const override {
        return {p.w, p.z + 4.0};
    }
    double dlambda1_dw(const Riemann&) const override { return 1.0; }
    double dlambda1_dz(const Riemann&) const override { return 0.0; }
    double dlambda2_dw(const Riemann&) const override { return 0.0; }
    double dlambda2_dz(const Riemann&) const override { return 1.0; }
};

// p-system  a_t - v_x = 0,  v_t - sigma(a)_x = 0  with sigma(a) = a + a^3.
// Chart orientation is chosen so that d_w lambda1 and d_z lambda2 are both
// positive: w = -v - P(a), z = -v + P(a) with P(a) = int_0^a sqrt(sigma').
// The state domain is the preimage of the rectangle W, which is inscribed in
// the image of the (a, v) box (0.2, 1) x (-0.5, 0.5).
class PSystemChart final : public SystemChart {
public:
    explicit PSystemChart(double half_width) : half_width_(half_width) {
        center_ = 0.5 * (primitive(a_min_) + primitive(a_max_));
        rect_ = {-center_ - half_width_, -center_ + half_width_, center_ - half_width_,
                 center_ + half_width_};
    }

    std::string id() const override { return "p_system"; }
    nlohmann::json params() const override {
        return {{"a_min", a_min_}, {"a_max", a_max_}, {"half_width", half_width_}};
    }

    static double sigma(double a) { return a + a * a * a; }
    static double sigma_p(double a) { return 1.0 + 3.0 * a * a; }
    static double sigma_pp(double a) { return 6.0 * a; }

    // P(a) = int_0^a sqrt(1 + 3 s^2) ds, closed form.
    static double primitive(double a) {
        const double s3 = std::sqrt(3.0);
        return 0.5 * a * std::sqrt(1.0 + 3.0 * a * a) + std::asinh(s3 * a) / (2.0 * s3);
    }

    double invert_primitive(double p) const {
        double a = 0.5 * (a_min_ + a_max_);
        for (int it = 0; it < 50; ++it) {
            const double f = primitive(a) - p;
            if (std::abs(f) < 1e-14) return a;
            double step = f / std::sqrt(sigma_p(a));
            // damping keeps the iterate in the ambient strain interval
            const double a_next = std::clamp(a - step, 0.01, 2.0);
            if (std::abs(a_next - a) < 1e-16 && std::abs(f) < 1e-12) return a_next;
            a = a_next;
        }
        if (std::abs(primitive(a) - p) < 1e-12) return a;
        throw ConvergenceError("p-system chart inverse did not converge");
    }

    State flux(const State& u) const override { return {-u.u2, -sigma(u.u1)}; }
    Mat2 flux_jacobian(const State& u) const override {
        return {0.0, -1.0, -sigma_p(u.u1), 0.0};
    }
    Riemann to_riemann(const State& u) const override {
        const double p = primitive(u.u1);
        return {-u.u2 - p, -u.u2 + p};
    }
    State from_riemann(const Riemann& p) const override {
        return {invert_primitive(0.5 * (p.z - p.w)), -0.5 * (p.w + p.z)};
    }

    std::pair<double, double> lambdas(const Riemann& p) const override {
        const double c = std::sqrt(sigma_p(invert_primitive(0.5 * (p.z - p.w))));
        return {-c, c};
    }
    // d lambda1 / dw = d lambda2 / dz = sigma'' / (4 sigma'), the mixed ones
    // carry the opposite sign.
    double gnl_rate(const Riemann& p) const {
        const double a = invert_primitive(0.5 * (p.z - p.w));
        return sigma_pp(a) / (4.0 * sigma_p(a));
    }
    double dlambda1_dw(const Riemann& p) const override { return gnl_rate(p); }
    double dlambda1_dz(const Riemann& p) const override { return -gnl_rate(p); }
    double dlambda2_dw(const Riemann& p) const override { return -gnl_rate(p); }
    double dlambda2_dz(const Riemann& p) const override { return gnl_rate(p); }

private:
    double a_min_ = 0.2, a_max_ = 1.0;
    double half_width_;
    double center_;
};

// Linear advection, f = (a u1, b u2). Strictly hyperbolic for a < b but not
// genuinely nonlinear; used as the degenerate counterexample and for exact
// transport tests.
class LinearChart final : public SystemChart {
public:
    LinearChart(double a, double b) : a_(a), b_(b) {
        if (!(a < b)) throw HyperbolicityError("linear chart needs a < b");
        rect_ = {-1.0, 1.0, -1.0, 1.0};
    }

    std::string id() const override { return "linear"; }
    nlohmann::json params() const override { return {{"a", a_}, {"b", b_}}; }

    State flux(const State& u) const override { return {a_ * u.u1, b_ * u.u2}; }
    Mat2 flux_jacobian(const State&) const override { return {a_, 0.0, 0.0, b_}; }
    Riemann to_riemann(const State& u) const override { return {u.u1, u.u2}; }
    State from_riemann(const Riemann& p) const override { return {p.w, p.z}; }

    std::pair<double, double> lambdas(const Riemann&) const override { return {a_, b_}; }
    double dlambda1_dw(const Riemann&) const override { return 0.0; }
    double dlambda1_dz(const Riemann&) const override { return 0.0; }
    double dlambda2_dw(const Riemann&) const override { return 0.0; }
    double dlambda2_dz(const Riemann&) const override { return 0.0; }

private:
    double a_, b_;
};

}  // namespace

std::unique_ptr<SystemChart> make_chart(const std::string& id, const nlohmann::json& params) {
    const nlohmann::json p = params.is_object() ? params : nlohmann::json::object();
    if (id == "decoupled") return std::make_unique<DecoupledChart>();
    if (id == "p_system") {
        const double hw = p.value("half_width", 0.4);
        if (hw <= 0.0 || hw > 0.55) throw Error("p_system half_width outside (0, 0.55]");
        return std::make_unique<PSystemChart>(hw);
    }
    if (id == "linear")
        return std::make_unique<LinearChart>(p.value("a", 1.0), p.value("b", 4.0));
    throw Error("unknown chart id: " + id);
}

}  // namespace kinlaw
