#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "lewisrows/common.hpp"

namespace lewisrows {

// Deterministic test and benchmark instances.

template <class Scalar>
Matrix<Scalar> gaussian_instance(Index n, Index d, std::uint64_t seed) {
    return gaussian_matrix<Scalar>(n, d, mix_seed(seed, 0x6761757373ULL));
}

// Gaussian rows with the first `spikes` rows scaled up; the heavy rows carry
// almost all of the l1 energy in their directions, which uniform sampling
// misses and weight-proportional sampling must not.
template <class Scalar>
Matrix<Scalar> spiky_instance(Index n, Index d, Index spikes = 5, Scalar scale = Scalar(1000),
                              std::uint64_t seed = 0) {
    if (spikes > n) throw ValidationError("spiky_instance: more spikes than rows");
    Matrix<Scalar> a = gaussian_instance<Scalar>(n, d, seed);
    a.topRows(spikes) *= scale;
    return a;
}

// Two identical unit rows plus a third independent one; its l1 Lewis weights
// are (1/2, 1/2, 1) in closed form.
template <class Scalar>
Matrix<Scalar> duplicated_row_instance() {
    Matrix<Scalar> a(3, 2);
    a << 1, 0, 1, 0, 0, 1;
    return a;
}

template <class Scalar>
Matrix<Scalar> identity_instance(Index d) {
    return Matrix<Scalar>::Identity(d, d);
}

// Well-conditioned random basis change for invariance tests: a random
// orthogonal factor times singular values spread over [1/2, 2].
template <class Scalar>
Matrix<Scalar> random_invertible(Index d, std::uint64_t seed) {
    Matrix<Scalar> g = gaussian_matrix<Scalar>(d, d, mix_seed(seed, 0x52ULL));
    Eigen::HouseholderQR<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>> qr(g);
    Matrix<Scalar> q = qr.householderQ();
    Vector<Scalar> diag(d);
    for (Index j = 0; j < d; ++j)
        diag[j] = Scalar(0.5) * std::pow(Scalar(4), Scalar(j) / Scalar(std::max<Index>(d - 1, 1)));
    return q * diag.asDiagonal();
}

}  // namespace lewisrows
