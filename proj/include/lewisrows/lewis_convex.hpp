#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>

#include "lewisrows/common.hpp"
#include "lewisrows/lewis_iteration.hpp"
#include "lewisrows/linalg.hpp"
#include "lewisrows/quad_form.hpp"

namespace lewisrows {

struct ConvexConfig {
    double p = 2.0;            // norm exponent, >= 2 (covers the p >= 4 range)
    double tolerance = 1e-6;   // target relative accuracy of the form, in (0, 0.5)
    int max_ascent_steps = 50000;
    std::uint64_t seed = 0;    // perturbs the initial form; 0 keeps the deterministic start

    void validate() const {
        if (!(p >= 2.0)) throw ValidationError("ConvexConfig: p must be >= 2");
        if (!(tolerance > 0.0) || !(tolerance < 0.5))
            throw ValidationError("ConvexConfig: tolerance must lie in (0, 0.5)");
        if (max_ascent_steps < 1)
            throw ValidationError("ConvexConfig: max_ascent_steps must be >= 1");
    }
};

template <class Scalar>
struct ConvexResult {
    QuadForm<Scalar> form;      // M* with sum_i (a_i^T M* a_i)^{p/2} = d
    Vector<Scalar> weights;     // w_i = (a_i^T M* a_i)^{p/2}
    Scalar certificate;         // almost-Lewis residual of the weights
    int steps = 0;
};

// Pointwise w_i = (a_i^T Q a_i)^{p/2}; no normalization applied.
template <class Scalar>
Vector<Scalar> weights_from_form(const Matrix<Scalar>& a, const QuadForm<Scalar>& q, double p) {
    check_matrix(a);
    if (a.cols() != q.dim()) throw ValidationError("weights_from_form: dimension mismatch");
    if (!(p > 0)) throw ValidationError("weights_from_form: p must be positive");
    Vector<Scalar> s = ((a * q.matrix()).array() * a.array()).rowwise().sum();
    return s.array().pow(Scalar(p / 2.0));
}

// True iff w is alpha-almost Lewis for (A, p).
template <class Scalar>
bool certify_form(const Matrix<Scalar>& a, const Vector<Scalar>& w, double p, double alpha) {
    if (!(alpha >= 1.0)) throw ValidationError("certify_form: alpha must be >= 1");
    return almost_lewis_residual(a, w, p) <= Scalar(alpha);
}

namespace detail {

template <class Scalar>
struct AscentState {
    Vector<Scalar> s;    // s_i = a_i^T M a_i
    Scalar phi;          // sum_i s_i^{p/2}
    Scalar objective;    // log det M - (2d/p) log phi
};

template <class Scalar>
AscentState<Scalar> evaluate_factor(const Matrix<Scalar>& a, const Matrix<Scalar>& l, double p) {
    Matrix<Scalar> proj = a * l;  // row i = a_i^T L, so s_i = ||L^T a_i||^2
    AscentState<Scalar> st;
    st.s = proj.rowwise().squaredNorm();
    st.phi = st.s.array().pow(Scalar(p / 2.0)).sum();
    const Scalar d = Scalar(a.cols());
    st.objective =
        Scalar(2) * l.diagonal().array().log().sum() - (Scalar(2) * d / Scalar(p)) * std::log(st.phi);
    return st;
}

}  // namespace detail

// Solves the determinant-maximization characterization of Lewis weights for
// p >= 2: the maximizer of det M over M > 0 with sum_i (a_i^T M a_i)^{p/2} <= d
// defines w_i = (a_i^T M a_i)^{p/2}. The constraint is homogeneous in M, so we
// instead maximize the scale-invariant objective
//   F(M) = log det M - (2d/p) log sum_i (a_i^T M a_i)^{p/2}
// by gradient ascent on the Cholesky factor M = L L^T with backtracking line
// search, rescaling to the saturated constraint afterwards. Success is judged
// not by the ascent itself but by the fixed-point certificate of the weights.
template <class Scalar>
ConvexResult<Scalar> lewis_quadratic_form(const Matrix<Scalar>& a, const ConvexConfig& cfg) {
    cfg.validate();
    check_matrix(a);
    check_no_zero_rows(a);
    const Index n = a.rows();
    const Index d = a.cols();
    if (n < d) throw ValidationError("lewis_quadratic_form: need at least d rows");
    const double p = cfg.p;

    // Start from the inverse unweighted Gram (exact for p = 2), optionally
    // perturbed by a seeded congruence so distinct seeds explore distinct basins.
    Matrix<Scalar> gram0(d, d);
    gram0.noalias() = a.transpose() * a;
    Matrix<Scalar> m;
    try {
        m = QuadForm<Scalar>(std::move(gram0)).inverse();
    } catch (const NumericalError&) {
        throw NumericalError("lewis_quadratic_form: A is rank-deficient");
    }
    if (cfg.seed != 0) {
        Matrix<Scalar> r = Matrix<Scalar>::Identity(d, d) +
                           Scalar(0.05) * gaussian_matrix<Scalar>(d, d, cfg.seed);
        m = (r * m * r.transpose()).eval();
        m = ((m + m.transpose()) / Scalar(2)).eval();
    }

    Eigen::LLT<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>> llt(m);
    if (llt.info() != Eigen::Success)
        throw NumericalError("lewis_quadratic_form: initial form is not positive definite");
    Matrix<Scalar> l = llt.matrixL();

    auto saturate = [&](Matrix<Scalar>& factor, detail::AscentState<Scalar>& st) {
        const Scalar c = std::pow(Scalar(d) / st.phi, Scalar(1.0 / p));
        factor *= c;
        st.s *= c * c;
        st.phi = Scalar(d);
    };

    detail::AscentState<Scalar> state = detail::evaluate_factor(a, l, p);
    saturate(l, state);

    Scalar best_certificate = std::numeric_limits<Scalar>::infinity();
    Scalar step_size = Scalar(1) / Scalar(d);
    const Scalar tol = Scalar(cfg.tolerance);

    for (int step = 1; step <= cfg.max_ascent_steps; ++step) {
        // Gradient of F at M = L L^T, in M and pulled back to L.
        Vector<Scalar> c = state.s.array().pow(Scalar(p / 2.0 - 1.0));
        Matrix<Scalar> gw(d, d);
        gw.noalias() = a.transpose() * c.asDiagonal() * a;
        Matrix<Scalar> linv = l.template triangularView<Eigen::Lower>().solve(
            Matrix<Scalar>(Matrix<Scalar>::Identity(d, d)));
        Matrix<Scalar> minv = linv.transpose() * linv;
        Matrix<Scalar> grad_m = minv - (Scalar(d) / state.phi) * gw;
        Matrix<Scalar> grad_l = Scalar(2) * (grad_m * l);
        grad_l = grad_l.template triangularView<Eigen::Lower>();
        const Scalar grad_sq = grad_l.squaredNorm();

        // Weights at the saturated scale and their fixed-point certificate.
        Vector<Scalar> w = state.s.array().pow(Scalar(p / 2.0));
        w *= Scalar(d) / w.sum();
        const Scalar certificate = almost_lewis_residual(a, w, p);
        best_certificate = std::min(best_certificate, certificate);
        const Scalar rel_grad = std::sqrt(grad_sq) / std::max(minv.norm(), Scalar(1e-300));
        if (certificate <= Scalar(1) + tol && rel_grad <= tol * tol * Scalar(d)) {
            Matrix<Scalar> mstar = l * l.transpose();
            return ConvexResult<Scalar>{QuadForm<Scalar>(std::move(mstar)), std::move(w),
                                        certificate, step};
        }

        // Backtracking line search on the factor; candidates must keep a
        // positive diagonal to stay inside the cone.
        bool advanced = false;
        for (int halvings = 0; halvings < 80; ++halvings) {
            Matrix<Scalar> cand = l + step_size * grad_l;
            if ((cand.diagonal().array() <= Scalar(0)).any()) {
                step_size /= Scalar(2);
                continue;
            }
            detail::AscentState<Scalar> cand_state = detail::evaluate_factor(a, cand, p);
            if (cand_state.objective >=
                state.objective + Scalar(1e-4) * step_size * grad_sq) {
                l = std::move(cand);
                state = std::move(cand_state);
                saturate(l, state);
                step_size *= Scalar(2);
                advanced = true;
                break;
            }
            step_size /= Scalar(2);
        }
        if (!advanced) {
            // Line search is below floating-point resolution of F; accept if
            // the certificate already meets the target.
            if (certificate <= Scalar(1) + tol) {
                Matrix<Scalar> mstar = l * l.transpose();
                return ConvexResult<Scalar>{QuadForm<Scalar>(std::move(mstar)), std::move(w),
                                            certificate, step};
            }
            throw ConvergenceError(
                "lewis_quadratic_form: ascent stalled before reaching tolerance " +
                    std::to_string(cfg.tolerance) + " (best certificate " +
                    std::to_string(double(best_certificate)) + ")",
                double(best_certificate));
        }
    }
    throw ConvergenceError(
        "lewis_quadratic_form: no convergence within " + std::to_string(cfg.max_ascent_steps) +
            " ascent steps (best certificate " + std::to_string(double(best_certificate)) + ")",
        double(best_certificate));
}

}  // namespace lewisrows
