#include <doctest.h>

#include <cmath>
#include <lewisrows/generators.hpp>
#include <lewisrows/linalg.hpp>
#include <lewisrows/sketch.hpp>

using namespace lewisrows;

TEST_CASE("probe budget rule") {
    CHECK(probe_count_for(1.0, 1000) == 64);
    CHECK(probe_count_for(1.01, 1000) == 8192);  // clamped high
    const int k = probe_count_for(2.0, 1000);
    CHECK(k == int(std::ceil(32.0 * std::log(1000.0) / (std::log(2.0) * std::log(2.0)))));
}

TEST_CASE("beta = 1 bypasses the sketch") {
    Matrixd a = gaussian_instance<double>(50, 5, 4);
    Vectord w = (Vectord::Random(50).array().abs() + 0.4).matrix();
    SketchConfig cfg;
    cfg.beta = 1.0;
    CHECK(leverage_scores_approx(a, w, 1.3, cfg) == weighted_leverage(a, w, 1.3));
}

TEST_CASE("identity matrix estimates stay near 1") {
    Matrixd id = Matrixd::Identity(8, 8);
    Vectord ones = Vectord::Ones(8);
    SketchConfig cfg;
    cfg.beta = 1.3;
    cfg.probe_count = 2048;
    cfg.seed = 5;
    Vectord est = leverage_scores_approx(id, ones, 1.0, cfg);
    for (Index i = 0; i < 8; ++i) CHECK(std::abs(std::log(est[i])) <= std::log(1.3));
}

TEST_CASE("same seed gives identical output") {
    Matrixd a = gaussian_instance<double>(100, 6, 8);
    Vectord w = (Vectord::Random(100).array().abs() + 0.2).matrix();
    SketchConfig cfg;
    cfg.beta = 1.5;
    cfg.probe_count = 128;
    cfg.seed = 42;
    CHECK(leverage_scores_approx(a, w, 1.0, cfg) == leverage_scores_approx(a, w, 1.0, cfg));
    cfg.seed = 43;
    CHECK(leverage_scores_approx(a, w, 1.0, cfg) !=
          leverage_scores_approx(a, w, 1.0, SketchConfig{1.5, 42, 128}));
}

TEST_CASE("large probe budgets concentrate to tight factors") {
    Matrixd a = gaussian_instance<double>(500, 10, 99);
    Vectord w = Vectord::Ones(500);
    Vectord exact = weighted_leverage(a, w, 1.0);
    int ok = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        SketchConfig cfg;
        cfg.beta = 1.25;
        cfg.probe_count = 4096;
        cfg.seed = seed;
        Vectord est = leverage_scores_approx(a, w, 1.0, cfg);
        const double worst = (est.array() / exact.array()).log().abs().maxCoeff();
        if (worst <= std::log(1.25)) ++ok;
    }
    CHECK(ok >= 19);
}

TEST_CASE("moderate budgets keep the worst ratio below 1.5") {
    Matrixd a = gaussian_instance<double>(1000, 8, 3);
    Vectord w = (Vectord::Random(1000).array().abs() + 0.3).matrix();
    Vectord exact = weighted_leverage(a, w, 1.5);
    int ok = 0;
    const int trials = 40;
    for (int t = 0; t < trials; ++t) {
        SketchConfig cfg;
        cfg.beta = 1.5;
        cfg.probe_count = 512;
        cfg.seed = std::uint64_t(t) + 1;
        Vectord est = leverage_scores_approx(a, w, 1.5, cfg);
        const double worst = (est.array() / exact.array()).log().abs().maxCoeff();
        if (worst <= std::log(1.5)) ++ok;
    }
    CHECK(ok >= int(0.95 * trials));
}

TEST_CASE("probe estimator is unbiased") {
    Matrixd a = gaussian_instance<double>(20, 3, 7);
    Vectord w = Vectord::Ones(20);
    Vectord exact = weighted_leverage(a, w, 1.0);
    SketchConfig cfg;
    cfg.beta = 2.0;
    cfg.probe_count = 100000;
    cfg.seed = 11;
    Vectord est = leverage_scores_approx(a, w, 1.0, cfg);
    for (Index i = 0; i < 20; ++i)
        CHECK(est[i] == doctest::Approx(exact[i]).epsilon(0.02));
}

TEST_CASE("quad_form_probe") {
    Matrixd a = gaussian_instance<double>(200, 5, 31);

    SUBCASE("identity form returns squared row norms") {
        QuadForm<double> id(Matrixd::Identity(5, 5));
        SketchConfig cfg;
        cfg.beta = 1.2;
        cfg.probe_count = 4096;
        cfg.seed = 3;
        Vectord u = quad_form_probe(id, a, cfg);
        Vectord exact = a.rowwise().squaredNorm();
        for (Index i = 0; i < a.rows(); ++i)
            CHECK(std::abs(std::log(u[i] / exact[i])) <= std::log(1.3));
    }

    SUBCASE("random SPD form within factor 1.3 at k = 512") {
        Matrixd g = gaussian_instance<double>(5, 5, 77);
        Matrixd spd = g * g.transpose() + Matrixd::Identity(5, 5);
        QuadForm<double> q(spd);
        SketchConfig cfg;
        cfg.beta = 1.3;
        cfg.probe_count = 512;
        cfg.seed = 9;
        Vectord u = quad_form_probe(q, a, cfg);
        Vectord exact = ((a * spd).array() * a.array()).rowwise().sum();
        CHECK((u.array() / exact.array()).log().abs().maxCoeff() <= std::log(1.3));
    }

    SUBCASE("deterministic under a fixed seed and exact at beta = 1") {
        Matrixd g = gaussian_instance<double>(5, 5, 13);
        Matrixd spd = g * g.transpose() + 2.0 * Matrixd::Identity(5, 5);
        QuadForm<double> q(spd);
        SketchConfig cfg;
        cfg.beta = 1.4;
        cfg.probe_count = 64;
        cfg.seed = 100;
        CHECK(quad_form_probe(q, a, cfg) == quad_form_probe(q, a, cfg));
        cfg.beta = 1.0;
        Vectord exact = ((a * spd).array() * a.array()).rowwise().sum();
        CHECK(quad_form_probe(q, a, cfg).isApprox(exact, 1e-13));
    }
}
