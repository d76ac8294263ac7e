#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "kinlaw/system_model.hpp"

using namespace kinlaw;

TEST_CASE("decoupled flux values") {
    auto chart = make_chart("decoupled");
    const State z = eval_flux(*chart, {0.0, 0.0});
    CHECK(z.u1 == doctest::Approx(0.0));
    CHECK(z.u2 == doctest::Approx(0.0));

    const State f = eval_flux(*chart, {0.8, -0.4});
    CHECK(f.u1 == doctest::Approx(0.32));
    CHECK(f.u2 == doctest::Approx(-1.52));

    CHECK_THROWS_AS(eval_flux(*chart, {1.5, 0.0}), DomainError);
}

TEST_CASE("p-system flux values") {
    auto chart = make_chart("p_system");
    // f(a, v) = (-v, -sigma(a)) with sigma(a) = a + a^3
    const State f = chart->flux({0.5, 0.1});
    CHECK(f.u1 == doctest::Approx(-0.1));
    CHECK(f.u2 == doctest::Approx(-0.625));
}

TEST_CASE("decoupled eigenstructure") {
    auto chart = make_chart("decoupled");
    const EigenStructure es = eigen_structure(*chart, {0.8, -0.4});
    CHECK(es.lambda1 == doctest::Approx(0.8));
    CHECK(es.lambda2 == doctest::Approx(3.6));
    CHECK(es.r1.u1 == doctest::Approx(1.0));
    CHECK(es.r1.u2 == doctest::Approx(0.0));
    CHECK(es.r2.u1 == doctest::Approx(0.0));
    CHECK(es.r2.u2 == doctest::Approx(1.0));
}

TEST_CASE("p-system eigenvalues are +-sqrt(sigma')") {
    auto chart = make_chart("p_system");
    const EigenStructure es = eigen_structure(*chart, {0.5, 0.1});
    CHECK(es.lambda1 == doctest::Approx(-std::sqrt(1.75)).epsilon(1e-12));
    CHECK(es.lambda2 == doctest::Approx(std::sqrt(1.75)).epsilon(1e-12));
}

TEST_CASE("left/right eigenvector normalization across charts") {
    for (const char* id : {"decoupled", "p_system", "linear"}) {
        auto chart = make_chart(id);
        const Rect& R = chart->rectangle();
        for (int i = 1; i < 8; ++i) {
            for (int j = 1; j < 8; ++j) {
                const Riemann p{R.w_lo + i * (R.w_hi - R.w_lo) / 8,
                                R.z_lo + j * (R.z_hi - R.z_lo) / 8};
                const State u = chart->from_riemann(p);
                const EigenStructure es = eigen_structure(*chart, u);
                CHECK(std::abs(es.l1.u1 * es.r1.u1 + es.l1.u2 * es.r1.u2 - 1.0) < 1e-12);
                CHECK(std::abs(es.l2.u1 * es.r2.u1 + es.l2.u2 * es.r2.u2 - 1.0) < 1e-12);
                CHECK(std::abs(es.l1.u1 * es.r2.u1 + es.l1.u2 * es.r2.u2) < 1e-12);
                CHECK(std::abs(es.l2.u1 * es.r1.u1 + es.l2.u2 * es.r1.u2) < 1e-12);

                // Df r_i = lambda_i r_i
                const Mat2 J = chart->flux_jacobian(u);
                const State Jr1{J.a11 * es.r1.u1 + J.a12 * es.r1.u2,
                                J.a21 * es.r1.u1 + J.a22 * es.r1.u2};
                CHECK(norm(Jr1 - es.lambda1 * es.r1) < 1e-10);
            }
        }
    }
}

TEST_CASE("riemann chart round trips") {
    SUBCASE("decoupled is the identity") {
        auto chart = make_chart("decoupled");
        const Riemann p = to_riemann(*chart, {0.3, -0.2});
        CHECK(p.w == doctest::Approx(0.3));
        CHECK(p.z == doctest::Approx(-0.2));
    }
    SUBCASE("p-system round trip within 1e-10") {
        auto chart = make_chart("p_system");
        const State u0{0.5, 0.1};
        const State u1 = chart->from_riemann(chart->to_riemann(u0));
        CHECK(std::abs(u1.u1 - u0.u1) < 1e-10);
        CHECK(std::abs(u1.u2 - u0.u2) < 1e-10);
    }
    SUBCASE("round trip over a 64x64 sample of W") {
        for (const char* id : {"decoupled", "p_system"}) {
            auto chart = make_chart(id);
            const Rect& R = chart->rectangle();
            double worst = 0.0;
            for (int i = 0; i < 64; ++i) {
                for (int j = 0; j < 64; ++j) {
                    const Riemann p{R.w_lo + i * (R.w_hi - R.w_lo) / 63,
                                    R.z_lo + j * (R.z_hi - R.z_lo) / 63};
                    const Riemann q = chart->to_riemann(chart->from_riemann(p));
                    worst = std::max({worst, std::abs(q.w - p.w), std::abs(q.z - p.z)});
                }
            }
            CHECK(worst < 1e-10);
        }
    }
}

TEST_CASE("chart gradients align with the left eigenvectors") {
    // finite-difference gradient of phi_1 must be parallel to l1 (same for phi_2)
    for (const char* id : {"decoupled", "p_system"}) {
        auto chart = make_chart(id);
        const Rect& R = chart->rectangle();
        const Riemann pc{R.w_center(), R.z_center()};
        const State u = chart->from_riemann(pc);
        const EigenStructure es = eigen_structure(*chart, u);
        const double h = 1e-6;
        const Riemann pw{chart->to_riemann({u.u1 + h, u.u2}).w,
                         chart->to_riemann({u.u1 + h, u.u2}).z};
        const Riemann pm{chart->to_riemann({u.u1 - h, u.u2}).w,
                         chart->to_riemann({u.u1 - h, u.u2}).z};
        const Riemann pv{chart->to_riemann({u.u1, u.u2 + h}).w,
                         chart->to_riemann({u.u1, u.u2 + h}).z};
        const Riemann pn{chart->to_riemann({u.u1, u.u2 - h}).w,
                         chart->to_riemann({u.u1, u.u2 - h}).z};
        const State grad_w{(pw.w - pm.w) / (2 * h), (pv.w - pn.w) / (2 * h)};
        const State grad_z{(pw.z - pm.z) / (2 * h), (pv.z - pn.z) / (2 * h)};
        // parallel <=> cross product vanishes
        CHECK(std::abs(grad_w.u1 * es.l1.u2 - grad_w.u2 * es.l1.u1) <
              1e-6 * (norm(grad_w) * norm(es.l1)));
        CHECK(std::abs(grad_z.u1 * es.l2.u2 - grad_z.u2 * es.l2.u1) <
              1e-6 * (norm(grad_z) * norm(es.l2)));
    }
}

TEST_CASE("corner mapping aligns with the rectangle") {
    for (const char* id : {"decoupled", "p_system"}) {
        auto chart = make_chart(id);
        const Rect& R = chart->rectangle();
        const State u = chart->from_riemann({R.w_lo, R.z_lo});
        const Riemann p = chart->to_riemann(u);
        CHECK(p.w == doctest::Approx(R.w_lo).epsilon(1e-10));
        CHECK(p.z == doctest::Approx(R.z_lo).epsilon(1e-10));
    }
}

TEST_CASE("gnl certificates") {
    SUBCASE("decoupled: unit derivatives and gap 2") {
        auto chart = make_chart("decoupled");
        const GnlCertificate cert = check_hyperbolic_gnl(*chart, 32);
        CHECK(cert.c_bar == doctest::Approx(0.9).epsilon(1e-6));
        CHECK(cert.gap == doctest::Approx(2.0).epsilon(1e-6));
    }
    SUBCASE("p-system is certified") {
        auto chart = make_chart("p_system");
        const GnlCertificate cert = check_hyperbolic_gnl(*chart, 32);
        CHECK(cert.c_bar > 0.0);
        CHECK(cert.gap > 0.0);
    }
    SUBCASE("linear flux is rejected") {
        auto chart = make_chart("linear");
        CHECK_THROWS_AS(check_hyperbolic_gnl(*chart, 32), NotGnlError);
    }
    SUBCASE("sample count precondition") {
        auto chart = make_chart("decoupled");
        CHECK_THROWS_AS(check_hyperbolic_gnl(*chart, 8), Error);
    }
}

TEST_CASE("strict hyperbolicity margin holds at certified gap") {
    for (const char* id : {"decoupled", "p_system"}) {
        auto chart = make_chart(id);
        const GnlCertificate cert = check_hyperbolic_gnl(*chart, 32);
        const Rect& R = chart->rectangle();
        for (int i = 0; i < 16; ++i)
            for (int j = 0; j < 16; ++j) {
                const Riemann p{R.w_lo + (i + 0.5) * (R.w_hi - R.w_lo) / 16,
                                R.z_lo + (j + 0.5) * (R.z_hi - R.z_lo) / 16};
                auto [l1, l2] = chart->lambdas(p);
                CHECK(l2 - l1 >= cert.gap - 1e-9);
            }
    }
}

TEST_CASE("closed-form speed derivatives match centered differences") {
    auto chart = make_chart("p_system");
    const Rect& R = chart->rectangle();
    const double h = 1e-5;
    for (int i = 1; i < 6; ++i) {
        const Riemann p{R.w_lo + i * (R.w_hi - R.w_lo) / 6, R.z_center()};
        const double fd =
            (chart->lambdas({p.w + h, p.z}).first - chart->lambdas({p.w - h, p.z}).first) /
            (2 * h);
        CHECK(chart->dlambda1_dw(p) == doctest::Approx(fd).epsilon(1e-6));
        const double fdz =
            (chart->lambdas({p.w, p.z + h}).second - chart->lambdas({p.w, p.z - h}).second) /
            (2 * h);
        CHECK(chart->dlambda2_dz(p) == doctest::Approx(fdz).epsilon(1e-6));
    }
}

TEST_CASE("unknown chart id") { CHECK_THROWS_AS(make_chart("nope"), Error); }
