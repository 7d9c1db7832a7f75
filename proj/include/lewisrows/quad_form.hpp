#pragma once

#include <cmath>
#include <string>
#include <utility>

#include "lewisrows/common.hpp"

namespace lewisrows {

// Symmetric positive-definite d-by-d form with a cached pivoted-Cholesky
// factorization. Construction is the validation point: a matrix that is not
// symmetric (to 1e-12 relative) or whose pivots collapse is rejected.
template <class Scalar>
class QuadForm {
public:
    explicit QuadForm(Matrix<Scalar> m, Scalar pivot_tolerance = Scalar(1e-12))
        : mat_(std::move(m)) {
        if (mat_.rows() != mat_.cols() || mat_.rows() < 1)
            throw ValidationError("QuadForm: matrix must be square and non-empty");
        if (!mat_.allFinite())
            throw ValidationError("QuadForm: entries must be finite");
        const Scalar scale = std::max(Scalar(1), mat_.cwiseAbs().maxCoeff());
        const Scalar asym = (mat_ - mat_.transpose()).cwiseAbs().maxCoeff();
        if (asym > Scalar(1e-12) * scale)
            throw ValidationError("QuadForm: matrix is not symmetric (relative asymmetry " +
                                  std::to_string(double(asym / scale)) + ")");
        mat_ = ((mat_ + mat_.transpose()) / Scalar(2)).eval();
        ldlt_.compute(mat_);
        const Vector<Scalar> d = ldlt_.vectorD();
        const Scalar dmax = d.maxCoeff();
        const Scalar dmin = d.minCoeff();
        if (!(dmax > Scalar(0)) || dmin <= pivot_tolerance * dmax)
            throw NumericalError(
                "QuadForm: matrix is rank-deficient or indefinite (pivot range [" +
                std::to_string(double(dmin)) + ", " + std::to_string(double(dmax)) + "])");
    }

    Index dim() const { return mat_.rows(); }
    const Matrix<Scalar>& matrix() const { return mat_; }

    Vector<Scalar> solve(const Vector<Scalar>& b) const {
        if (b.size() != dim()) throw ValidationError("QuadForm::solve: size mismatch");
        return ldlt_.solve(b);
    }

    Matrix<Scalar> solve(const Matrix<Scalar>& b) const {
        if (b.rows() != dim()) throw ValidationError("QuadForm::solve: size mismatch");
        return ldlt_.solve(b);
    }

    // x^T M x
    template <class Derived>
    Scalar quad(const Eigen::MatrixBase<Derived>& x) const {
        return x.dot(mat_ * x);
    }

    // x^T M^{-1} x
    template <class Derived>
    Scalar inv_quad(const Eigen::MatrixBase<Derived>& x) const {
        Vector<Scalar> xv = x;
        return xv.dot(ldlt_.solve(xv));
    }

    Matrix<Scalar> inverse() const {
        Matrix<Scalar> id = Matrix<Scalar>::Identity(dim(), dim());
        return ldlt_.solve(id);
    }

    // F with F F^T = M, built from the cached factorization.
    Matrix<Scalar> sqrt_factor() const {
        Matrix<Scalar> f = ldlt_.matrixL();
        f = f * ldlt_.vectorD().cwiseSqrt().asDiagonal();
        f = ldlt_.transpositionsP().transpose() * f;
        return f;
    }

    Scalar log_det() const { return ldlt_.vectorD().array().log().sum(); }

private:
    Matrix<Scalar> mat_;
    Eigen::LDLT<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>> ldlt_;
};

// Solves G x = b through the cached factorization.
template <class Scalar>
Vector<Scalar> spd_solve(const QuadForm<Scalar>& g, const Vector<Scalar>& b) {
    return g.solve(b);
}

}  // namespace lewisrows
