#pragma once

#include <cmath>
#include <string>

#include "lewisrows/common.hpp"
#include "lewisrows/quad_form.hpp"

namespace lewisrows {

// Row i of the result is w_i^{1/2 - 1/p} a_i: the change of density that
// turns an assignment of row weights into an ordinary l2 object.
template <class Scalar>
Matrix<Scalar> reweighted_matrix(const Matrix<Scalar>& a, const Vector<Scalar>& w, double p) {
    check_matrix(a);
    check_weights(w, a.rows());
    if (!(p > 0)) throw ValidationError("reweighted_matrix: p must be positive");
    if (p == 2.0) return a;
    Vector<Scalar> scale = w.array().pow(Scalar(0.5 - 1.0 / p));
    if (!scale.allFinite())
        throw ValidationError("reweighted_matrix: weight powers overflow or underflow");
    return scale.asDiagonal() * a;
}

// G = A^T W^{1-2/p} A = B^T B with B the reweighted matrix. Factorization
// happens inside QuadForm construction, so a rank-deficient A is rejected here.
template <class Scalar>
QuadForm<Scalar> weighted_gram(const Matrix<Scalar>& a, const Vector<Scalar>& w, double p) {
    check_matrix(a);
    check_weights(w, a.rows());
    if (!(p > 0)) throw ValidationError("weighted_gram: p must be positive");
    Vector<Scalar> wp = w.array().pow(Scalar(1.0 - 2.0 / p));
    if (!wp.allFinite())
        throw ValidationError("weighted_gram: weight powers overflow or underflow");
    Matrix<Scalar> g(a.cols(), a.cols());
    g.noalias() = a.transpose() * wp.asDiagonal() * a;
    try {
        return QuadForm<Scalar>(std::move(g));
    } catch (const NumericalError&) {
        throw NumericalError("weighted_gram: A^T W^{1-2/p} A is singular; A is rank-deficient "
                             "(columns are linearly dependent)");
    }
}

namespace detail {

// tau_i = a_i^T G^{-1} a_i for every row, one solve against all rows at once.
template <class Scalar>
Vector<Scalar> gram_inverse_row_quads(const Matrix<Scalar>& a, const QuadForm<Scalar>& g) {
    Matrix<Scalar> x = g.solve(Matrix<Scalar>(a.transpose()));  // d x n
    return (a.array() * x.transpose().array()).rowwise().sum();
}

}  // namespace detail

// Statistical leverage scores tau_i = a_i^T (A^T A)^{-1} a_i. For full
// column rank they lie in (0, 1] and sum exactly to d.
template <class Scalar>
Vector<Scalar> leverage_scores_exact(const Matrix<Scalar>& a) {
    check_matrix(a);
    Matrix<Scalar> g(a.cols(), a.cols());
    g.noalias() = a.transpose() * a;
    try {
        QuadForm<Scalar> gram(std::move(g));
        return detail::gram_inverse_row_quads(a, gram);
    } catch (const NumericalError&) {
        throw NumericalError("leverage_scores_exact: A is rank-deficient");
    }
}

// Leverage scores of the reweighted matrix W^{1/2-1/p} A, computed as
// w_i^{1-2/p} a_i^T (A^T W^{1-2/p} A)^{-1} a_i without forming the
// reweighted rows.
template <class Scalar>
Vector<Scalar> weighted_leverage(const Matrix<Scalar>& a, const Vector<Scalar>& w, double p) {
    QuadForm<Scalar> gram = weighted_gram(a, w, p);
    Vector<Scalar> quads = detail::gram_inverse_row_quads(a, gram);
    return w.array().pow(Scalar(1.0 - 2.0 / p)) * quads.array();
}

}  // namespace lewisrows
