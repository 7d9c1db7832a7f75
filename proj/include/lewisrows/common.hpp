#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace lewisrows {

inline constexpr const char* kVersion = "0.1.0";

// Tall data matrices are stored dense and row-major; rows are the sampled
// objects throughout this library. Weight and score vectors are plain
// column vectors.
template <class Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <class Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Matrixd = Matrix<double>;
using Vectord = Vector<double>;
using Index = Eigen::Index;

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad arguments or malformed inputs. CLI exit code 2.
struct ValidationError : Error {
    using Error::Error;
};

// Rank deficiency, loss of positive definiteness, non-convergence. CLI exit code 3.
struct NumericalError : Error {
    using Error::Error;
};

// Filesystem and file-format failures. CLI exit code 4.
struct IoError : Error {
    using Error::Error;
};

// Iteration budget exhausted; carries the best fixed-point certificate seen.
struct ConvergenceError : NumericalError {
    ConvergenceError(const std::string& msg, double certificate)
        : NumericalError(msg), best_certificate(certificate) {}
    double best_certificate;
};

template <class Scalar>
void check_matrix(const Matrix<Scalar>& a, const char* what = "matrix") {
    if (a.rows() < 1 || a.cols() < 1)
        throw ValidationError(std::string(what) + ": dimensions must be at least 1x1");
    if (!a.allFinite())
        throw ValidationError(std::string(what) + ": entries must be finite");
}

template <class Scalar>
void check_weights(const Vector<Scalar>& w, Index n, const char* what = "weights") {
    if (w.size() != n)
        throw ValidationError(std::string(what) + ": expected length " + std::to_string(n) +
                              ", got " + std::to_string(w.size()));
    if (!w.allFinite() || (w.array() <= Scalar(0)).any())
        throw ValidationError(std::string(what) + ": entries must be finite and strictly positive");
}

template <class Scalar>
void check_no_zero_rows(const Matrix<Scalar>& a) {
    for (Index i = 0; i < a.rows(); ++i) {
        if (a.row(i).cwiseAbs().maxCoeff() == Scalar(0))
            throw ValidationError("row " + std::to_string(i) +
                                  " is identically zero; its weight has no positive fixed point");
    }
}

// splitmix64; used to derive independent seeds for sub-streams (per row,
// per iteration, per recursion level) from one master seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::mt19937_64 make_rng(std::uint64_t seed) { return std::mt19937_64(seed); }

template <class Scalar>
Matrix<Scalar> gaussian_matrix(Index rows, Index cols, std::uint64_t seed) {
    auto rng = make_rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix<Scalar> g(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) g(i, j) = Scalar(normal(rng));
    return g;
}

// max_i |log(u_i / v_i)|, the metric in which the fixed-point iteration contracts.
template <class Scalar>
Scalar log_inf_distance(const Vector<Scalar>& u, const Vector<Scalar>& v) {
    if (u.size() != v.size())
        throw ValidationError("log_inf_distance: size mismatch");
    return (u.array() / v.array()).log().abs().maxCoeff();
}

template <class Scalar>
Scalar lp_norm_pow(const Vector<Scalar>& y, double p) {
    return y.array().abs().pow(Scalar(p)).sum();
}

template <class Scalar>
Scalar lp_norm(const Vector<Scalar>& y, double p) {
    using std::pow;
    if (p == 1.0) return y.template lpNorm<1>();
    if (p == 2.0) return y.norm();
    return pow(lp_norm_pow(y, p), Scalar(1.0 / p));
}

}  // namespace lewisrows
