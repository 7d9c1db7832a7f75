#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "lewisrows/common.hpp"
#include "lewisrows/linalg.hpp"
#include "lewisrows/quad_form.hpp"

namespace lewisrows {

struct SketchConfig {
    double beta = 1.0;          // target multiplicative approximation factor, >= 1
    std::uint64_t seed = 0;
    int probe_count = 64;       // number of Gaussian probes k, >= 1

    void validate() const {
        if (!(beta >= 1.0)) throw ValidationError("SketchConfig: beta must be >= 1");
        if (probe_count < 1) throw ValidationError("SketchConfig: probe_count must be >= 1");
    }
};

// Probe budget for a target factor beta on an n-row instance:
// k = ceil(32 ln n / ln^2 beta), clamped to [64, 8192].
inline int probe_count_for(double beta, Index n) {
    if (!(beta > 1.0)) return 64;
    const double lb = std::log(beta);
    const double k = std::ceil(32.0 * std::log(double(std::max<Index>(n, 2))) / (lb * lb));
    return int(std::clamp(k, 64.0, 8192.0));
}

namespace detail {

// Estimates q_i = ||R^{-1} b_i||^2 for all rows b_i of B, where R R^T is the
// cached factorization of B's Gram matrix: q_i = (1/k) ||Pi R^{-1} b_i||^2
// with Pi a k x d standard Gaussian. The k x d sketch Pi R^{-1} is formed
// once; the cost profile is one n x d x k product instead of n solves.
template <class Scalar>
Vector<Scalar> probe_inverse_row_quads(const Matrix<Scalar>& b, const QuadForm<Scalar>& gram,
                                       int k, std::uint64_t seed) {
    Matrix<Scalar> pi = gaussian_matrix<Scalar>(k, b.cols(), seed);
    Matrix<Scalar> f = gram.sqrt_factor();
    // m = Pi F^{-1}; solve F^T m^T = Pi^T.
    Matrix<Scalar> mt = Eigen::PartialPivLU<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>>(
                            f.transpose())
                            .solve(Matrix<Scalar>(pi.transpose()));
    Matrix<Scalar> proj(b.rows(), k);
    proj.noalias() = b * mt;
    return proj.rowwise().squaredNorm() / Scalar(k);
}

}  // namespace detail

// beta-approximate leverage scores of W^{1/2-1/p} A. With beta == 1 the
// sketch is bypassed and the exact scores are returned, so the exact
// analysis path stays reproducible. Deterministic given (inputs, seed).
template <class Scalar>
Vector<Scalar> leverage_scores_approx(const Matrix<Scalar>& a, const Vector<Scalar>& w, double p,
                                      const SketchConfig& cfg) {
    cfg.validate();
    if (cfg.beta == 1.0) return weighted_leverage(a, w, p);
    Matrix<Scalar> b = reweighted_matrix(a, w, p);
    Matrix<Scalar> g(b.cols(), b.cols());
    g.noalias() = b.transpose() * b;
    QuadForm<Scalar> gram{std::move(g)};
    return detail::probe_inverse_row_quads(b, gram, cfg.probe_count, cfg.seed);
}

// Estimates u_i = a_i^T Q a_i for all rows via Gaussian probes of a square
// root factor of Q. Exact when cfg.beta == 1.
template <class Scalar>
Vector<Scalar> quad_form_probe(const QuadForm<Scalar>& q, const Matrix<Scalar>& a,
                               const SketchConfig& cfg) {
    cfg.validate();
    check_matrix(a);
    if (a.cols() != q.dim()) throw ValidationError("quad_form_probe: dimension mismatch");
    if (cfg.beta == 1.0)
        return ((a * q.matrix()).array() * a.array()).rowwise().sum();
    Matrix<Scalar> f = q.sqrt_factor();
    Matrix<Scalar> pi = gaussian_matrix<Scalar>(cfg.probe_count, q.dim(), cfg.seed);
    Matrix<Scalar> z(cfg.probe_count, q.dim());
    z.noalias() = pi * f.transpose();  // row j = g_j^T F^T, so ||z a_i|| probes ||F^T a_i||
    Matrix<Scalar> proj(a.rows(), cfg.probe_count);
    proj.noalias() = a * z.transpose();
    return proj.rowwise().squaredNorm() / Scalar(cfg.probe_count);
}

}  // namespace lewisrows
