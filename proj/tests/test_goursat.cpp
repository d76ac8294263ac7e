#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <vector>

#include "kinlaw/goursat.hpp"

using namespace kinlaw;

namespace {

// adaptive Simpson quadrature, used as the independent oracle for g/h
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol) {
    std::function<double(double, double, double, double, double, double)> rec =
        [&](double lo, double hi, double flo, double fmid, double fhi, double eps) {
            const double mid = 0.5 * (lo + hi);
            const double lmid = 0.5 * (lo + mid), rmid = 0.5 * (mid + hi);
            const double fl = f(lmid), fr = f(rmid);
            const double whole = (hi - lo) / 6.0 * (flo + 4 * fmid + fhi);
            const double left = (mid - lo) / 6.0 * (flo + 4 * fl + fmid);
            const double right = (hi - mid) / 6.0 * (fmid + 4 * fr + fhi);
            if (std::abs(left + right - whole) < 15 * eps) return left + right;
            return rec(lo, mid, flo, fl, fmid, eps / 2) + rec(mid, hi, fmid, fr, fhi, eps / 2);
        };
    const double mid = 0.5 * (a + b);
    return rec(a, b, f(a), f(mid), f(b), tol);
}

// centered-difference residual of the entropy equation in interior cells
double goursat_max_residual(const GhTables& gh, const GoursatSolution& sol) {
    const double dw = gh.wgrid.dx(), dz = gh.zgrid.dx();
    double worst = 0.0;
    for (int i = 1; i + 1 < gh.wgrid.n; ++i) {
        if (std::abs(i - sol.cut_index) <= 1) continue;  // data line is not interior
        for (int j = 1; j + 1 < gh.zgrid.n; ++j) {
            const double twz = (sol.theta.at(i + 1, j + 1) - sol.theta.at(i + 1, j - 1) -
                                sol.theta.at(i - 1, j + 1) + sol.theta.at(i - 1, j - 1)) /
                               (4 * dw * dz);
            const double tw =
                (sol.theta.at(i + 1, j) - sol.theta.at(i - 1, j)) / (2 * dw);
            const double tz =
                (sol.theta.at(i, j + 1) - sol.theta.at(i, j - 1)) / (2 * dz);
            const double res =
                twz - gh.gz_over_g.at(i, j) * tw - gh.hw_over_h.at(i, j) * tz;
            worst = std::max(worst, std::abs(res));
        }
    }
    return worst;
}

Grid1 axis(double lo, double hi, int n) { return {lo, hi, n}; }

}  // namespace

TEST_CASE("decoupled chart has g = h = 1") {
    auto chart = make_chart("decoupled");
    const GhTables gh = compute_gh(*chart, axis(-1, 1, 65), axis(-1, 1, 65));
    CHECK(gh.g.max_abs() == doctest::Approx(1.0));
    CHECK(gh.g.min_value() == doctest::Approx(1.0));
    CHECK(gh.h.max_abs() == doctest::Approx(1.0));
    CHECK(gh.h.min_value() == doctest::Approx(1.0));
}

TEST_CASE("gh edge normalization and positivity") {
    auto chart = make_chart("p_system");
    const Rect& R = chart->rectangle();
    const GhTables gh =
        compute_gh(*chart, axis(R.w_lo, R.w_hi, 65), axis(R.z_lo, R.z_hi, 65));
    for (int i = 0; i < 65; ++i) CHECK(gh.g.at(i, 0) == 1.0);
    for (int j = 0; j < 65; ++j) CHECK(gh.h.at(0, j) == 1.0);
    CHECK(gh.g.min_value() > 0.0);
    CHECK(gh.h.min_value() > 0.0);
}

TEST_CASE("p-system g matches an adaptive-quadrature oracle at the center") {
    auto chart = make_chart("p_system");
    const Rect& R = chart->rectangle();
    const int n = 2049;  // trapezoid needs a fine column to reach 1e-8
    const GhTables gh =
        compute_gh(*chart, axis(R.w_lo, R.w_hi, 129), axis(R.z_lo, R.z_hi, n));
    const double wc = R.w_center();
    const double zc = R.z_center();
    const double oracle = std::exp(adaptive_simpson(
        [&](double y) {
            auto [l1, l2] = chart->lambdas({wc, y});
            return -chart->dlambda1_dz({wc, y}) / (l1 - l2);
        },
        R.z_lo, zc, 1e-12));
    const int ic = 64;  // center column of the 129-node w grid
    const int jc = (n - 1) / 2;
    CHECK(std::abs(gh.g.at(ic, jc) - oracle) < 1e-8);
}

TEST_CASE("g satisfies its defining ODE to second order") {
    auto chart = make_chart("p_system");
    const Rect& R = chart->rectangle();
    auto residual = [&](int n) {
        const GhTables gh =
            compute_gh(*chart, axis(R.w_lo, R.w_hi, n), axis(R.z_lo, R.z_hi, n));
        const double dz = gh.zgrid.dx();
        double worst = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 1; j + 1 < n; ++j) {
                const double gz = (gh.g.at(i, j + 1) - gh.g.at(i, j - 1)) / (2 * dz);
                worst = std::max(worst,
                                 std::abs(gz - gh.gz_over_g.at(i, j) * gh.g.at(i, j)));
            }
        return worst;
    };
    const double r1 = residual(33), r2 = residual(65);
    CHECK(r1 / r2 > 3.0);  // O(h^2)
    CHECK(r1 / r2 < 5.0);
}

TEST_CASE("goursat trivial solutions") {
    auto chart = make_chart("decoupled");
    const GhTables gh = compute_gh(*chart, axis(-1, 1, 65), axis(-1, 1, 65));
    SUBCASE("unit data gives the constant solution") {
        const GoursatSolution sol = solve_goursat(gh, 0.25, [](double) { return 1.0; });
        for (double v : sol.theta.v) CHECK(v == doctest::Approx(1.0).epsilon(1e-14));
    }
    SUBCASE("zero data gives zero") {
        const GoursatSolution sol = solve_goursat(gh, -0.5, [](double) { return 0.0; });
        CHECK(sol.theta.max_abs() == 0.0);
        CHECK(sol.flux.max_abs() == 0.0);
    }
}

TEST_CASE("goursat data lines are exact at the nodes") {
    auto chart = make_chart("p_system");
    const Rect& R = chart->rectangle();
    const GhTables gh =
        compute_gh(*chart, axis(R.w_lo, R.w_hi, 65), axis(R.z_lo, R.z_hi, 65));
    auto b0 = [](double w) { return 1.0 + 0.3 * std::sin(3.0 * w); };
    const GoursatSolution sol = solve_goursat(gh, R.w_center() + 0.123, b0);
    for (int i = 0; i < 65; ++i)
        CHECK(sol.theta.at(i, 0) == b0(gh.wgrid.x(i)));
    for (int j = 0; j < 65; ++j)
        CHECK(sol.theta.at(sol.cut_index, j) ==
              b0(sol.xi) * gh.g.at(sol.cut_index, j));
}

TEST_CASE("goursat cut snapping and bounds") {
    auto chart = make_chart("decoupled");
    const GhTables gh = compute_gh(*chart, axis(-1, 1, 33), axis(-1, 1, 33));
    const GoursatSolution sol = solve_goursat(gh, 0.26, [](double) { return 1.0; });
    CHECK(sol.xi == doctest::Approx(0.25));  // nearest node of the 33-grid
    CHECK_THROWS_AS(solve_goursat(gh, 1.5, [](double) { return 1.0; }), GridError);
}

TEST_CASE("goursat linearity in the boundary data") {
    auto chart = make_chart("p_system");
    const Rect& R = chart->rectangle();
    const GhTables gh =
        compute_gh(*chart, axis(R.w_lo, R.w_hi, 49), axis(R.z_lo, R.z_hi, 49));
    auto b1 = [](double w) { return std::cos(2 * w); };
    auto b2 = [](double w) { return w * w; };
    const double al = 1.7, be = -0.6;
    const double xi = R.w_center();
    const GoursatSolution s1 = solve_goursat(gh, xi, b1);
    const GoursatSolution s2 = solve_goursat(gh, xi, b2);
    const GoursatSolution s12 = solve_goursat(
        gh, xi, [&](double w) { return al * b1(w) + be * b2(w); });
    double worst = 0.0;
    for (size_t q = 0; q < s12.theta.v.size(); ++q)
        worst = std::max(worst,
                         std::abs(s12.theta.v[q] - al * s1.theta.v[q] - be * s2.theta.v[q]));
    CHECK(worst < 1e-10);
}

TEST_CASE("goursat self-convergence is second order") {
    auto chart = make_chart("p_system");
    const Rect& R = chart->rectangle();
    auto solve_at = [&](int cells) {
        const GhTables gh = compute_gh(*chart, axis(R.w_lo, R.w_hi, cells + 1),
                                       axis(R.z_lo, R.z_hi, cells + 1));
        return solve_goursat(gh, R.w_center(), [](double) { return 1.0; });
    };
    const GoursatSolution c = solve_at(64);
    const GoursatSolution f = solve_at(128);
    const GoursatSolution ff = solve_at(256);
    auto diff_on_coarse = [](const GoursatSolution& coarse, const GoursatSolution& fine,
                             int ratio) {
        double worst = 0.0;
        for (int i = 0; i < coarse.theta.gw.n; ++i)
            for (int j = 0; j < coarse.theta.gz.n; ++j)
                worst = std::max(worst, std::abs(coarse.theta.at(i, j) -
                                                 fine.theta.at(i * ratio, j * ratio)));
        return worst;
    };
    const double d1 = diff_on_coarse(c, f, 2);
    const double d2 = diff_on_coarse(f, ff, 2);
    const double order = std::log2(d1 / d2);
    CHECK(order > 1.7);
    CHECK(order < 2.3);
}

TEST_CASE("goursat interior residual decreases at second order") {
    auto chart = make_chart("p_system");
    const Rect& R = chart->rectangle();
    auto resid_at = [&](int cells) {
        const GhTables gh = compute_gh(*chart, axis(R.w_lo, R.w_hi, cells + 1),
                                       axis(R.z_lo, R.z_hi, cells + 1));
        return goursat_max_residual(
            gh, solve_goursat(gh, R.w_center(), [](double) { return 1.0; }));
    };
    const double r1 = resid_at(64), r2 = resid_at(128);
    CHECK(r1 / r2 > 2.8);
    CHECK(r1 / r2 < 5.5);
}

TEST_CASE("entropy flux on the decoupled chart is the cut value") {
    auto chart = make_chart("decoupled");
    const GhTables gh = compute_gh(*chart, axis(-1, 1, 129), axis(-1, 1, 129));
    const GoursatSolution sol = solve_goursat(gh, 0.25, [](double) { return 1.0; });
    // lambda1 = w, theta = 1: flux(w, z) = w - (w - xi) = xi on {w >= xi}
    double worst = 0.0;
    for (int i = sol.cut_index; i < 129; ++i)
        for (int j = 0; j < 129; ++j)
            worst = std::max(worst, std::abs(sol.flux.at(i, j) - sol.xi));
    CHECK(worst < 1e-10);
}

TEST_CASE("entropy flux anchor is exact on the cut line") {
    auto chart = make_chart("p_system");
    const Rect& R = chart->rectangle();
    const GhTables gh =
        compute_gh(*chart, axis(R.w_lo, R.w_hi, 65), axis(R.z_lo, R.z_hi, 65));
    const GoursatSolution sol =
        solve_goursat(gh, R.w_center(), [](double) { return 1.0; });
    for (int j = 0; j < 65; ++j)
        CHECK(sol.flux.at(sol.cut_index, j) ==
              gh.lam1.at(sol.cut_index, j) * sol.theta.at(sol.cut_index, j));
}

TEST_CASE("flux compatibility d_z flux = lambda2 d_z theta at scheme order") {
    auto chart = make_chart("p_system");
    const Rect& R = chart->rectangle();
    auto resid_at = [&](int cells) {
        const GhTables gh = compute_gh(*chart, axis(R.w_lo, R.w_hi, cells + 1),
                                       axis(R.z_lo, R.z_hi, cells + 1));
        const GoursatSolution sol =
            solve_goursat(gh, R.w_center(), [](double) { return 1.0; });
        const double dz = gh.zgrid.dx();
        double worst = 0.0;
        for (int i = sol.cut_index + 2; i + 1 < gh.wgrid.n; ++i)
            for (int j = 1; j + 1 < gh.zgrid.n; ++j) {
                const double xz = (sol.flux.at(i, j + 1) - sol.flux.at(i, j - 1)) / (2 * dz);
                const double tz =
                    (sol.theta.at(i, j + 1) - sol.theta.at(i, j - 1)) / (2 * dz);
                worst = std::max(worst, std::abs(xz - gh.lam2.at(i, j) * tz));
            }
        return worst;
    };
    const double r1 = resid_at(64), r2 = resid_at(128);
    CHECK(r1 / r2 > 2.5);  // second-order trend
}

TEST_CASE("family build populates every member") {
    auto chart = make_chart("p_system");
    const Rect& R = chart->rectangle();
    const EntropyFamily fam =
        build_family(*chart, axis(R.w_lo, R.w_hi, 65), axis(R.z_lo, R.z_hi, 65),
                     axis(R.w_lo, R.w_hi, 17), axis(R.z_lo, R.z_hi, 17));
    CHECK(fam.n_xi() == 17);
    CHECK(fam.n_zeta() == 17);
    CHECK(fam.rbar > 0.0);
    CHECK(fam.c > 0.0);
    for (const auto& m : fam.xi_members) CHECK(m.theta.min_value() > 0.0);
    for (const auto& m : fam.zeta_members) CHECK(m.theta.min_value() > 0.0);
}

TEST_CASE("family members vary smoothly in the cut parameter") {
    auto chart = make_chart("p_system");
    const Rect& R = chart->rectangle();
    auto max_neighbor_gap = [&](int nxi) {
        const EntropyFamily fam =
            build_family(*chart, axis(R.w_lo, R.w_hi, 129), axis(R.z_lo, R.z_hi, 129),
                         axis(R.w_lo, R.w_hi, nxi), axis(R.z_lo, R.z_hi, nxi), false);
        double worst = 0.0;
        for (int k = 0; k + 1 < fam.n_xi(); ++k) {
            double gap = 0.0;
            for (size_t q = 0; q < fam.xi_members[k].theta.v.size(); ++q)
                gap = std::max(gap, std::abs(fam.xi_members[k + 1].theta.v[q] -
                                             fam.xi_members[k].theta.v[q]));
            worst = std::max(worst, gap);
        }
        return worst;
    };
    const double g1 = max_neighbor_gap(17);
    const double g2 = max_neighbor_gap(33);
    CHECK(g2 < 0.75 * g1);  // shrinks linearly with the xi spacing
    CHECK(g1 < 0.2);
}

TEST_CASE("decoupled family oracle identities") {
    auto chart = make_chart("decoupled");
    const EntropyFamily fam = build_family(*chart, axis(-1, 1, 129), axis(-1, 1, 129),
                                           axis(-1, 1, 33), axis(-1, 1, 33));
    double worst = 0.0;
    for (int k = 0; k < fam.n_xi(); ++k) {
        const double xi = fam.xi_at(k);
        for (int i = 0; i < 129; ++i) {
            const double w = fam.wgrid.x(i);
            for (int j = 0; j < 129; j += 8) {
                const double z = fam.zgrid.x(j);
                const double ind = w >= xi ? 1.0 : 0.0;
                worst = std::max(worst, std::abs(fam.chi(k, w, z) - ind));
                worst = std::max(worst, std::abs(fam.psi(k, w, z) - xi * ind));
            }
        }
    }
    CHECK(worst < 1e-10);
    // chi + chi_tilde = theta away from the cut line
    for (int k = 0; k < fam.n_xi(); k += 8)
        for (int i = 0; i < 129; ++i)
            for (int j = 0; j < 129; j += 16) {
                const double w = fam.wgrid.x(i), z = fam.zgrid.x(j);
                if (std::abs(w - fam.xi_at(k)) < 1e-12) continue;
                CHECK(fam.chi(k, w, z) + fam.chi_tilde(k, w, z) ==
                      doctest::Approx(fam.xi_members[k].theta.eval(w, z)));
            }
}

TEST_CASE("kinetic speed behavior") {
    auto chart = make_chart("decoupled");
    const EntropyFamily fam = build_family(*chart, axis(-1, 1, 65), axis(-1, 1, 65),
                                           axis(-1, 1, 33), axis(-1, 1, 33));
    SUBCASE("decoupled speed equals the cut value on the strip") {
        for (double xi : {-0.7, -0.2, 0.3}) {
            for (double w = xi; w <= std::min(1.0, xi + fam.rbar); w += 0.05) {
                const SpeedQuery q = kinetic_speed(fam, xi, w, 0.1);
                CHECK(!q.clamped);
                CHECK(q.value == doctest::Approx(xi).epsilon(1e-10));
            }
        }
    }
    SUBCASE("xi = w recovers the true characteristic speed") {
        const SpeedQuery q = kinetic_speed(fam, 0.25, 0.25, -0.3);
        CHECK(q.value == doctest::Approx(0.25).epsilon(1e-10));
    }
    SUBCASE("off-strip queries clamp with a flag or throw in strict mode") {
        const SpeedQuery q = kinetic_speed(fam, 0.9, 0.1, 0.0);
        CHECK(q.clamped);
        CHECK(q.value == doctest::Approx(0.1).epsilon(1e-10));  // clamped to xi = w
        CHECK_THROWS_AS(kinetic_speed(fam, 0.9, 0.1, 0.0, true), StripError);
    }
}

TEST_CASE("p-system kinetic speed is monotone in the cut parameter") {
    auto chart = make_chart("p_system");
    const Rect& R = chart->rectangle();
    const EntropyFamily fam =
        build_family(*chart, axis(R.w_lo, R.w_hi, 129), axis(R.z_lo, R.z_hi, 129),
                     axis(R.w_lo, R.w_hi, 65), axis(R.z_lo, R.z_hi, 65));
    const double dxi = fam.xigrid.dx();
    double worst = 1e300;
    for (int k = 1; k + 1 < fam.n_xi(); ++k) {
        for (int i = 0; i < fam.wgrid.n; ++i) {
            const double w = fam.wgrid.x(i);
            if (w < fam.xi_at(k) || w > fam.xi_at(k) + fam.rbar) continue;
            for (int j = 0; j < fam.zgrid.n; j += 16) {
                const double d =
                    (fam.speed_xi[k + 1].at(i, j) - fam.speed_xi[k - 1].at(i, j)) / (2 * dxi);
                worst = std::min(worst, d);
            }
        }
    }
    CHECK(worst >= fam.c);
}

TEST_CASE("strip constants") {
    SUBCASE("decoupled: full width and c = 0.9") {
        auto chart = make_chart("decoupled");
        const EntropyFamily fam = build_family(*chart, axis(-1, 1, 65), axis(-1, 1, 65),
                                               axis(-1, 1, 33), axis(-1, 1, 33));
        CHECK(fam.rbar == doctest::Approx(2.0));
        CHECK(fam.c == doctest::Approx(0.9));
    }
    SUBCASE("non-GNL chart degenerates") {
        auto chart = make_chart("linear");
        const EntropyFamily fam = build_family(*chart, axis(-1, 1, 65), axis(-1, 1, 65),
                                               axis(-1, 1, 17), axis(-1, 1, 17), false);
        CHECK_THROWS_AS(strip_constants(fam), DegenerateStripError);
    }
    SUBCASE("p-system constants stable under refinement") {
        auto chart = make_chart("p_system");
        const Rect& R = chart->rectangle();
        const EntropyFamily coarse =
            build_family(*chart, axis(R.w_lo, R.w_hi, 65), axis(R.z_lo, R.z_hi, 65),
                         axis(R.w_lo, R.w_hi, 33), axis(R.z_lo, R.z_hi, 33));
        const EntropyFamily fine =
            build_family(*chart, axis(R.w_lo, R.w_hi, 129), axis(R.z_lo, R.z_hi, 129),
                         axis(R.w_lo, R.w_hi, 33), axis(R.z_lo, R.z_hi, 33));
        CHECK(coarse.c > 0.0);
        CHECK(std::abs(fine.c - coarse.c) <= 0.1 * coarse.c);
    }
}

TEST_CASE("entropy reconstruction") {
    SUBCASE("zero edge data reconstructs zero") {
        auto chart = make_chart("decoupled");
        const EntropyFamily fam = build_family(*chart, axis(-1, 1, 65), axis(-1, 1, 65),
                                               axis(-1, 1, 33), axis(-1, 1, 33));
        std::vector<double> r1(33, 0.0), r2(33, 0.0);
        const ReconstructedPair pair = reconstruct_entropy(fam, r1, r2);
        CHECK(pair.eta.max_abs() == 0.0);
        CHECK(pair.q.max_abs() == 0.0);
    }
    SUBCASE("grid mismatch is rejected") {
        auto chart = make_chart("decoupled");
        const EntropyFamily fam = build_family(*chart, axis(-1, 1, 65), axis(-1, 1, 65),
                                               axis(-1, 1, 33), axis(-1, 1, 33));
        std::vector<double> r1(17, 0.0), r2(33, 0.0);
        CHECK_THROWS_AS(reconstruct_entropy(fam, r1, r2), GridMismatchError);
    }
    SUBCASE("decoupled linear entropy from constant edge slope") {
        auto chart = make_chart("decoupled");
        const EntropyFamily fam = build_family(*chart, axis(-1, 1, 129), axis(-1, 1, 129),
                                               axis(-1, 1, 65), axis(-1, 1, 65));
        std::vector<double> r1(65, 1.0), r2(65, 0.0);
        const ReconstructedPair pair = reconstruct_entropy(fam, r1, r2);
        // integral of 1{w >= xi} over the xi grid is w - w_lo up to the
        // indicator half-cell at the moving endpoint
        double worst = 0.0;
        for (int i = 0; i < 129; i += 2)  // nodes aligned with the xi grid
            for (int j = 0; j < 129; j += 16) {
                const double w = fam.wgrid.x(i);
                worst = std::max(worst, std::abs(pair.eta.at(i, j) - (w + 1.0)));
            }
        CHECK(worst < 0.02);  // half-cell bias at aligned nodes
    }
}
