#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>

#include "lewisrows/common.hpp"
#include "lewisrows/linalg.hpp"
#include "lewisrows/quad_form.hpp"
#include "lewisrows/sketch.hpp"

namespace lewisrows {

struct IterConfig {
    double p = 1.0;          // norm exponent, in [1, 4)
    double beta = 1.0;       // leverage-score approximation factor, >= 1
    double theta = 0.5;      // target approximation exponent: result is n^theta-approximate
    int max_iterations = 0;  // 0 -> derive the budget from (p, theta)

    void validate() const {
        if (!(p >= 1.0) || !(p < 4.0))
            throw ValidationError("IterConfig: p must lie in [1, 4); the iteration only "
                                  "contracts for p < 4 and p < 1 is outside the supported API");
        if (!(theta > 0.0) || !(theta <= 1.0))
            throw ValidationError("IterConfig: theta must lie in (0, 1]");
        if (!(beta >= 1.0)) throw ValidationError("IterConfig: beta must be >= 1");
        if (max_iterations < 0) throw ValidationError("IterConfig: max_iterations must be >= 0");
    }
};

// Iteration budget T = ceil(log(2/theta) / (1 - |p/2 - 1|)). The denominator
// is the contraction margin, which vanishes as p -> 4.
inline int iteration_count(double p, double theta) {
    if (p >= 4.0)
        throw ValidationError("iteration_count: the fixed-point iteration does not contract for "
                              "p >= 4; use the determinant-maximization solver instead");
    if (!(p > 0.0)) throw ValidationError("iteration_count: p must be positive");
    if (!(theta > 0.0) || !(theta <= 1.0))
        throw ValidationError("iteration_count: theta must lie in (0, 1]");
    const double margin = 1.0 - std::abs(p / 2.0 - 1.0);
    return int(std::ceil(std::log(2.0 / theta) / margin));
}

template <class Scalar>
struct LewisResult {
    Vector<Scalar> weights;
    int iterations_used = 0;
    Scalar final_residual = Scalar(1);  // alpha of the almost-Lewis condition, >= 1
    QuadForm<Scalar> gram_inverse;      // (A^T W^{1-2/p} A)^{-1} at the returned weights
    double p = 0;
    bool underflow_clamped = false;

    // log-infinity distance bound to the true weights implied by the residual.
    Scalar log_distance_bound() const {
        const double margin = 1.0 - std::abs(p / 2.0 - 1.0);
        return Scalar(p / 2.0 / margin) * std::log(final_residual);
    }
};

namespace detail {

constexpr double kWeightFloor = 1e-300;

template <class Scalar>
Scalar residual_from_quads(const Vector<Scalar>& quads, const Vector<Scalar>& w, double p) {
    Vector<Scalar> target = w.array().pow(Scalar(2.0 / p));
    return std::exp((quads.array() / target.array()).log().abs().maxCoeff());
}

}  // namespace detail

// Smallest alpha >= 1 such that a_i^T (A^T W^{1-2/p} A)^{-1} a_i and w_i^{2/p}
// agree within a factor alpha for every row.
template <class Scalar>
Scalar almost_lewis_residual(const Matrix<Scalar>& a, const Vector<Scalar>& w, double p) {
    QuadForm<Scalar> gram = weighted_gram(a, w, p);
    Vector<Scalar> quads = detail::gram_inverse_row_quads(a, gram);
    return detail::residual_from_quads(quads, w, p);
}

// One step of the fixed-point map: w_i <- (w_i^{2/p-1} tau_i)^{p/2} where tau
// are beta-approximate leverage scores of W^{1/2-1/p} A. With beta == 1 this
// is exactly (a_i^T (A^T W^{1-2/p} A)^{-1} a_i)^{p/2}.
template <class Scalar>
Vector<Scalar> lewis_iterate(const Matrix<Scalar>& a, double p, double beta,
                             const Vector<Scalar>& w, std::uint64_t seed = 0) {
    check_matrix(a);
    check_no_zero_rows(a);
    check_weights(w, a.rows());
    if (!(p > 0)) throw ValidationError("lewis_iterate: p must be positive");
    Vector<Scalar> next;
    if (beta == 1.0) {
        QuadForm<Scalar> gram = weighted_gram(a, w, p);
        next = detail::gram_inverse_row_quads(a, gram).array().pow(Scalar(p / 2.0));
    } else {
        SketchConfig cfg{beta, seed, probe_count_for(beta, a.rows())};
        Vector<Scalar> tau = leverage_scores_approx(a, w, p, cfg);
        next = (w.array().pow(Scalar(2.0 / p - 1.0)) * tau.array()).pow(Scalar(p / 2.0));
    }
    return next.cwiseMax(Scalar(detail::kWeightFloor));
}

// Runs the fixed-point iteration from w = 1 for T = iteration_count(p, theta)
// steps (or cfg.max_iterations if set), stopping early once the almost-Lewis
// residual drops below 1 + theta/4. p == 2 is the leverage-score coincidence
// and returns in a single step.
template <class Scalar>
LewisResult<Scalar> approx_lewis_weights(const Matrix<Scalar>& a, const IterConfig& cfg,
                                         std::uint64_t seed = 0) {
    cfg.validate();
    check_matrix(a);
    check_no_zero_rows(a);
    const double p = cfg.p;
    const Scalar stop = Scalar(1) + Scalar(cfg.theta / 4.0);

    if (p == 2.0 && cfg.beta == 1.0) {
        Vector<Scalar> ones = Vector<Scalar>::Ones(a.rows());
        QuadForm<Scalar> gram = weighted_gram(a, ones, p);
        Vector<Scalar> w = detail::gram_inverse_row_quads(a, gram);
        Scalar alpha = detail::residual_from_quads(w, w, p);
        return LewisResult<Scalar>{std::move(w), 1, alpha, QuadForm<Scalar>(gram.inverse()), p,
                                   false};
    }

    const int budget = cfg.max_iterations > 0 ? cfg.max_iterations : iteration_count(p, cfg.theta);
    Vector<Scalar> w = Vector<Scalar>::Ones(a.rows());
    bool clamped = false;
    int used = 0;
    while (true) {
        QuadForm<Scalar> gram = weighted_gram(a, w, p);
        Vector<Scalar> quads = detail::gram_inverse_row_quads(a, gram);
        const Scalar alpha = detail::residual_from_quads(quads, w, p);
        if ((used >= 1 && alpha <= stop) || used >= budget)
            return LewisResult<Scalar>{std::move(w), used, alpha,
                                       QuadForm<Scalar>(gram.inverse()), p, clamped};
        if (cfg.beta == 1.0) {
            w = quads.array().pow(Scalar(p / 2.0));
        } else {
            SketchConfig scfg{cfg.beta, mix_seed(seed, std::uint64_t(used)),
                              probe_count_for(cfg.beta, a.rows())};
            Vector<Scalar> tau = leverage_scores_approx(a, w, p, scfg);
            w = (w.array().pow(Scalar(2.0 / p - 1.0)) * tau.array()).pow(Scalar(p / 2.0));
        }
        if ((w.array() < Scalar(detail::kWeightFloor)).any()) {
            clamped = true;
            w = w.cwiseMax(Scalar(detail::kWeightFloor));
        }
        ++used;
    }
}

}  // namespace lewisrows
