#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "lewisrows/common.hpp"
#include "lewisrows/lewis_convex.hpp"
#include "lewisrows/lewis_iteration.hpp"
#include "lewisrows/linalg.hpp"

namespace lewisrows {

// High-precision Lewis weights used as ground truth in tests: tight exact
// fixed-point iteration below p = 4, certified determinant maximization at
// and above it. tol is the almost-Lewis residual target (alpha - 1).
template <class Scalar>
Vector<Scalar> brute_force_lewis(const Matrix<Scalar>& a, double p, double tol = 1e-10) {
    check_matrix(a);
    check_no_zero_rows(a);
    if (!(p >= 1.0)) throw ValidationError("brute_force_lewis: p must be >= 1");
    if (!(tol > 0.0)) throw ValidationError("brute_force_lewis: tol must be positive");
    if (p < 4.0) {
        Vector<Scalar> w = Vector<Scalar>::Ones(a.rows());
        const int max_iter = 200000;
        for (int it = 0; it < max_iter; ++it) {
            QuadForm<Scalar> gram = weighted_gram(a, w, p);
            Vector<Scalar> quads = detail::gram_inverse_row_quads(a, gram);
            if (detail::residual_from_quads(quads, w, p) <= Scalar(1) + Scalar(tol)) return w;
            w = quads.array().pow(Scalar(p / 2.0));
        }
        throw ConvergenceError("brute_force_lewis: fixed point not reached in " +
                                   std::to_string(max_iter) + " iterations",
                               double(almost_lewis_residual(a, w, p)));
    }
    ConvexConfig cfg;
    cfg.p = p;
    cfg.tolerance = std::min(tol / 4.0, 0.4);
    ConvexResult<Scalar> res = lewis_quadratic_form(a, cfg);
    if (!(res.certificate <= Scalar(1) + Scalar(tol)))
        throw ConvergenceError("brute_force_lewis: certificate above target", double(res.certificate));
    return res.weights;
}

// Worst observed multiplicative deviation of ||A'x||_p from ||Ax||_p, split
// by direction of the deviation. The values are lower bounds on the true
// distortion: the universal quantifier is probed, not certified.
struct DistortionReport {
    double max_over = 0;          // largest log(||A'x|| / ||Ax||) above 1
    double max_under = 0;         // largest such deviation below 1, as a positive log
    long directions_tested = 0;
    long excluded_directions = 0;  // probes with ||Ax||_p = 0 (rank warning)
    Vectord worst_direction;

    bool passes(double epsilon) const {
        return std::max(max_over, max_under) <= std::log1p(epsilon);
    }

    void write(std::ostream& out) const {
        char buf[256];
        std::snprintf(buf, sizeof(buf),
                      "max_over=%.17g\nmax_under=%.17g\ndistortion=%.17g\n"
                      "directions_tested=%ld\nexcluded_directions=%ld\n",
                      max_over, max_under, std::exp(std::max(max_over, max_under)) - 1.0,
                      directions_tested, excluded_directions);
        out << buf << "worst_direction=";
        for (Index j = 0; j < worst_direction.size(); ++j) {
            std::snprintf(buf, sizeof(buf), j ? " %.17g" : "%.17g", worst_direction[j]);
            out << buf;
        }
        out << '\n';
    }
};

namespace detail {

template <class Scalar>
struct DistortionProbe {
    const Matrix<Scalar>& a;
    const Matrix<Scalar>& a_sketch;
    double p;
    DistortionReport* report;

    // Returns the signed log-ratio, or NaN when ||Ax||_p vanishes.
    double eval(const Vector<Scalar>& x) {
        const Scalar na = lp_norm(Vector<Scalar>(a * x), p);
        if (na == Scalar(0)) {
            ++report->excluded_directions;
            return std::numeric_limits<double>::quiet_NaN();
        }
        const Scalar ns = lp_norm(Vector<Scalar>(a_sketch * x), p);
        const double g = double(std::log(ns) - std::log(na));
        ++report->directions_tested;
        if (g > report->max_over) report->max_over = g;
        if (-g > report->max_under) report->max_under = -g;
        return g;
    }
};

// Coordinate-wise hill climb maximizing |log ratio| from a starting direction.
template <class Scalar>
void refine_direction(DistortionProbe<Scalar>& probe, Vector<Scalar> x, double g0,
                      Vector<Scalar>* worst, double* worst_abs) {
    const Index d = x.size();
    double best = g0;
    double eta = 0.25;
    for (int step = 0; step < 50 && eta > 1e-7; ++step) {
        bool improved = false;
        for (Index j = 0; j < d; ++j) {
            for (int sgn : {+1, -1}) {
                Vector<Scalar> cand = x;
                cand[j] += Scalar(sgn * eta) * std::max(x.norm(), Scalar(1));
                const double g = probe.eval(cand);
                if (std::isnan(g)) continue;
                if (std::abs(g) > std::abs(best)) {
                    best = g;
                    x = cand;
                    improved = true;
                }
            }
        }
        if (!improved) eta /= 2;
        if (std::abs(best) > *worst_abs) {
            *worst_abs = std::abs(best);
            *worst = x.template cast<double>();
        }
    }
}

}  // namespace detail

// Probes the distortion of a sketched matrix over the canonical axes,
// num_dirs Gaussian directions, and a local hill climb launched whenever a
// probe sets a new record. The direction stream is a fixed function of the
// seed, so reported extremes are monotone in num_dirs.
template <class Scalar>
DistortionReport distortion_estimate(const Matrix<Scalar>& a, const Matrix<Scalar>& a_sketch,
                                     double p, long num_dirs, std::uint64_t seed) {
    check_matrix(a);
    check_matrix(a_sketch, "sketched matrix");
    if (a.cols() != a_sketch.cols())
        throw ValidationError("distortion_estimate: column counts differ");
    if (!(p >= 1.0)) throw ValidationError("distortion_estimate: p must be >= 1");
    if (num_dirs < 1) throw ValidationError("distortion_estimate: need at least one direction");

    DistortionReport report;
    report.worst_direction = Vectord::Zero(a.cols());
    detail::DistortionProbe<Scalar> probe{a, a_sketch, p, &report};
    double worst_abs = -1;

    auto rng = make_rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const Index d = a.cols();
    for (long t = 0; t < d + num_dirs; ++t) {
        Vector<Scalar> x;
        if (t < d) {
            x = Vector<Scalar>::Zero(d);
            x[Index(t)] = Scalar(1);
        } else {
            x.resize(d);
            for (Index j = 0; j < d; ++j) x[j] = Scalar(normal(rng));
            const Scalar nx = x.norm();
            if (nx == Scalar(0)) continue;
            x /= nx;
        }
        const double g = probe.eval(x);
        if (std::isnan(g)) continue;
        if (std::abs(g) > worst_abs) {
            worst_abs = std::abs(g);
            report.worst_direction = x.template cast<double>();
            detail::refine_direction(probe, x, g, &report.worst_direction, &worst_abs);
        }
    }
    return report;
}

// Adding a row can only lower existing weights when p <= 2. True iff no
// existing weight rises by more than tol.
template <class Scalar>
bool check_monotonicity(const Matrix<Scalar>& a, const Vector<Scalar>& new_row, double p,
                        double tol = 1e-8, double brute_tol = 1e-10) {
    if (!(p <= 2.0)) throw ValidationError("check_monotonicity: requires p <= 2");
    if (new_row.size() != a.cols()) throw ValidationError("check_monotonicity: row size mismatch");
    Vector<Scalar> w = brute_force_lewis(a, p, brute_tol);
    Matrix<Scalar> a2(a.rows() + 1, a.cols());
    a2.topRows(a.rows()) = a;
    a2.row(a.rows()) = new_row.transpose();
    Vector<Scalar> w2 = brute_force_lewis(a2, p, brute_tol);
    return (w2.head(a.rows()).array() <= w.array() + Scalar(tol)).all();
}

// Max ratio w'_i / w_i over original rows after appending extra rows; for
// p > 2 this is bounded by d^{p/2-1}.
template <class Scalar>
Scalar check_weight_inflation(const Matrix<Scalar>& a, const Matrix<Scalar>& extra_rows, double p,
                              double brute_tol = 1e-10) {
    if (!(p > 2.0)) throw ValidationError("check_weight_inflation: requires p > 2");
    Vector<Scalar> w = brute_force_lewis(a, p, brute_tol);
    if (extra_rows.rows() == 0) return Scalar(1);
    if (extra_rows.cols() != a.cols())
        throw ValidationError("check_weight_inflation: column counts differ");
    Matrix<Scalar> a2(a.rows() + extra_rows.rows(), a.cols());
    a2.topRows(a.rows()) = a;
    a2.bottomRows(extra_rows.rows()) = extra_rows;
    Vector<Scalar> w2 = brute_force_lewis(a2, p, brute_tol);
    return (w2.head(a.rows()).array() / w.array()).maxCoeff();
}

// Realized stability exponent under multiplicative row scaling:
// max_i |log(w'_i / w_i)| / log(alpha), with alpha the largest deviation of
// the scalars from 1. Zero when all scalars are 1 or the weights do not move.
template <class Scalar>
Scalar check_stability(const Matrix<Scalar>& a, const Vector<Scalar>& row_scalars, double p,
                       double brute_tol = 1e-10) {
    check_weights(row_scalars, a.rows(), "row scalars");
    Scalar alpha = 1;
    for (Index i = 0; i < row_scalars.size(); ++i)
        alpha = std::max({alpha, row_scalars[i], Scalar(1) / row_scalars[i]});
    Vector<Scalar> w = brute_force_lewis(a, p, brute_tol);
    Matrix<Scalar> a2 = row_scalars.asDiagonal() * a;
    Vector<Scalar> w2 = brute_force_lewis(a2, p, brute_tol);
    const Scalar shift = log_inf_distance(w2, w);
    if (alpha == Scalar(1) || shift == Scalar(0)) return Scalar(0);
    return shift / std::log(alpha);
}

// Replacing row i by k copies scaled k^{-1/p} must split its weight evenly
// and leave every other weight (and every ||Ax||_p) unchanged.
template <class Scalar>
bool check_split_invariance(const Matrix<Scalar>& a, Index i, long k, double p, double tol = 1e-7,
                            double brute_tol = 1e-10, std::uint64_t seed = 7) {
    if (i < 0 || i >= a.rows()) throw ValidationError("check_split_invariance: bad row index");
    if (k < 1) throw ValidationError("check_split_invariance: k must be >= 1");
    Vector<Scalar> w = brute_force_lewis(a, p, brute_tol);
    const Scalar piece = std::pow(Scalar(k), Scalar(-1.0 / p));
    Matrix<Scalar> a2(a.rows() + k - 1, a.cols());
    a2.topRows(i) = a.topRows(i);
    for (long c = 0; c < k; ++c) a2.row(i + c) = piece * a.row(i);
    a2.bottomRows(a.rows() - i - 1) = a.bottomRows(a.rows() - i - 1);

    // Exact norm identity along random directions.
    auto rng = make_rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int t = 0; t < 100; ++t) {
        Vector<Scalar> x(a.cols());
        for (Index j = 0; j < a.cols(); ++j) x[j] = Scalar(normal(rng));
        const Scalar before = lp_norm(Vector<Scalar>(a * x), p);
        const Scalar after = lp_norm(Vector<Scalar>(a2 * x), p);
        if (std::abs(after - before) > Scalar(1e-12) * std::max(before, Scalar(1))) return false;
    }

    Vector<Scalar> w2 = brute_force_lewis(a2, p, brute_tol);
    for (long c = 0; c < k; ++c)
        if (std::abs(w2[i + c] - w[i] / Scalar(k)) > Scalar(tol)) return false;
    for (Index r = 0; r < i; ++r)
        if (std::abs(w2[r] - w[r]) > Scalar(tol)) return false;
    for (Index r = i + 1; r < a.rows(); ++r)
        if (std::abs(w2[r + k - 1] - w[r]) > Scalar(tol)) return false;
    return true;
}

}  // namespace lewisrows
