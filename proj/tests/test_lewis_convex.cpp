#include <doctest.h>

#include <cmath>
#include <lewisrows/generators.hpp>
#include <lewisrows/lewis_convex.hpp>
#include <lewisrows/verify.hpp>

using namespace lewisrows;

TEST_CASE("identity input gives the identity form and unit weights") {
    for (double p : {2.0, 3.0, 6.0}) {
        ConvexConfig cfg;
        cfg.p = p;
        cfg.tolerance = 1e-8;
        Matrixd id = Matrixd::Identity(4, 4);
        auto res = lewis_quadratic_form(id, cfg);
        CHECK(res.form.matrix().isApprox(Matrixd::Identity(4, 4), 1e-6));
        CHECK(res.weights.isApprox(Vectord::Ones(4), 1e-6));
        CHECK(res.certificate <= 1.0 + 1e-8);
    }
}

TEST_CASE("p = 2 recovers leverage scores and the inverse Gram") {
    Matrixd a = gaussian_instance<double>(40, 5, 2);
    ConvexConfig cfg;
    cfg.p = 2.0;
    cfg.tolerance = 1e-8;
    auto res = lewis_quadratic_form(a, cfg);
    CHECK((res.weights - leverage_scores_exact(a)).cwiseAbs().maxCoeff() <= 1e-6);
    Matrixd inv_gram = QuadForm<double>(Matrixd(a.transpose() * a)).inverse();
    CHECK(res.form.matrix().isApprox(inv_gram, 1e-6));
}

TEST_CASE("agrees with the fixed-point iteration at p = 3") {
    Matrixd a = gaussian_instance<double>(60, 4, 5);
    ConvexConfig cfg;
    cfg.p = 3.0;
    cfg.tolerance = 1e-6;
    auto res = lewis_quadratic_form(a, cfg);
    Vectord wbar = brute_force_lewis(a, 3.0, 1e-11);
    CHECK(log_inf_distance(res.weights, wbar) <= 1e-4);
    CHECK(res.certificate <= 1.0 + 1e-6);
}

TEST_CASE("constraint saturation at the returned form") {
    Matrixd a = gaussian_instance<double>(50, 5, 9);
    for (double p : {2.5, 4.0, 6.0}) {
        ConvexConfig cfg;
        cfg.p = p;
        cfg.tolerance = 1e-6;
        auto res = lewis_quadratic_form(a, cfg);
        Vectord s = ((a * res.form.matrix()).array() * a.array()).rowwise().sum();
        const double phi = s.array().pow(p / 2.0).sum();
        CHECK(std::abs(phi - 5.0) <= 1e-8 * 5.0);
    }
}

TEST_CASE("Lagrange condition: inverse form is parallel to the weighted Gram") {
    Matrixd a = gaussian_instance<double>(45, 4, 21);
    ConvexConfig cfg;
    cfg.p = 5.0;
    cfg.tolerance = 1e-7;
    auto res = lewis_quadratic_form(a, cfg);
    Matrixd minv = res.form.inverse();
    Matrixd gw = weighted_gram(a, res.weights, 5.0).matrix();
    const double cosang = (minv.array() * gw.array()).sum() / (minv.norm() * gw.norm());
    CHECK(std::acos(std::min(1.0, cosang)) <= 1e-4);
}

TEST_CASE("uniqueness: random restarts agree") {
    Matrixd a = gaussian_instance<double>(50, 4, 33);
    ConvexConfig cfg;
    cfg.p = 6.0;
    cfg.tolerance = 1e-7;
    cfg.seed = 101;
    auto r1 = lewis_quadratic_form(a, cfg);
    cfg.seed = 2024;
    auto r2 = lewis_quadratic_form(a, cfg);
    CHECK(log_inf_distance(r1.weights, r2.weights) <= 1e-5);
}

TEST_CASE("near-optimal determinant implies a nearby form") {
    Matrixd a = gaussian_instance<double>(40, 4, 55);
    const double p = 4.0;
    ConvexConfig cfg;
    cfg.p = p;
    cfg.tolerance = 1e-8;
    auto res = lewis_quadratic_form(a, cfg);
    const Matrixd mstar = res.form.matrix();
    const double logdet_star = res.form.log_det();

    auto rng = make_rng(17);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        Matrixd e(4, 4);
        for (Index i = 0; i < 4; ++i)
            for (Index j = 0; j < 4; ++j) e(i, j) = normal(rng);
        e = ((e + e.transpose()) / 2.0).eval();
        e /= e.norm();
        Matrixd m = mstar + 0.02 * e;
        // rescale back onto the saturated constraint
        Vectord s = ((a * m).array() * a.array()).rowwise().sum();
        REQUIRE(s.minCoeff() > 0);
        const double phi = s.array().pow(p / 2.0).sum();
        m *= std::pow(4.0 / phi, 2.0 / p);
        const double delta = logdet_star - QuadForm<double>(m).log_det();
        REQUIRE(delta >= -1e-12);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(
            Eigen::MatrixXd(QuadForm<double>(mstar).solve(m)));
        const double dev = (eig.eigenvalues().array() - 1.0).abs().maxCoeff();
        CHECK(dev <= 4.0 * std::sqrt(std::max(delta, 1e-16)) + 1e-6);
    }
}

TEST_CASE("weights_from_form closed forms") {
    Matrixd rows(3, 3);
    rows << 1, 0, 0, 0, 1, 0, 0, 0, 1;
    QuadForm<double> id(Matrixd::Identity(3, 3));
    for (double p : {2.0, 3.0, 5.0})
        CHECK(weights_from_form(rows, id, p).isApprox(Vectord::Ones(3), 1e-14));

    QuadForm<double> four(Matrixd(4.0 * Matrixd::Identity(3, 3)));
    CHECK(weights_from_form(rows, four, 2.0).isApprox(Vectord::Constant(3, 4.0), 1e-14));

    Matrixd a = gaussian_instance<double>(30, 3, 3);
    ConvexConfig cfg;
    cfg.p = 4.0;
    cfg.tolerance = 1e-6;
    auto res = lewis_quadratic_form(a, cfg);
    Vectord w = weights_from_form(a, res.form, 4.0);
    CHECK(std::abs(w.sum() - 3.0) <= 1e-6 * 3.0);
}

TEST_CASE("certify_form") {
    Matrixd a = gaussian_instance<double>(25, 3, 12);
    Vectord wbar = brute_force_lewis(a, 3.0, 1e-11);
    CHECK(certify_form(a, wbar, 3.0, 1.001));
    Vectord ones = Vectord::Ones(25);
    CHECK_FALSE(certify_form(a, ones, 3.0, 1.001));
    Matrixd id = Matrixd::Identity(3, 3);
    Vectord unit = Vectord::Ones(3);
    CHECK(certify_form(id, unit, 3.0, 1.0));
}

TEST_CASE("validation and non-convergence") {
    Matrixd a = gaussian_instance<double>(20, 3, 1);
    ConvexConfig cfg;
    cfg.p = 1.5;
    CHECK_THROWS_AS(lewis_quadratic_form(a, cfg), ValidationError);
    cfg.p = 6.0;
    cfg.tolerance = 0.6;
    CHECK_THROWS_AS(lewis_quadratic_form(a, cfg), ValidationError);
    cfg.tolerance = 1e-9;
    cfg.max_ascent_steps = 1;
    try {
        lewis_quadratic_form(a, cfg);
        FAIL("expected ConvergenceError");
    } catch (const ConvergenceError& e) {
        CHECK(e.best_certificate >= 1.0);
    }
}
