#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "lewisrows/common.hpp"
#include "lewisrows/lewis_convex.hpp"
#include "lewisrows/lewis_iteration.hpp"
#include "lewisrows/quad_form.hpp"
#include "lewisrows/sketch.hpp"

namespace lewisrows {

struct RecursionConfig {
    double p = 1.0;
    double theta = 0.5;            // in (0, 1)
    double f_p = 0;                // oversampling constant; 0 -> 1 for p <= 2, 4 for p > 2
    long base_case_rows = 0;       // direct-solve threshold; 0 -> d
    std::uint64_t seed = 0;
    bool trace = false;            // also collect per-level probe statistics
    bool drop_dim_factor = false;  // for p <= 2 the d^{p/2} inflation can be omitted

    void validate() const {
        if (!(p >= 1.0)) throw ValidationError("RecursionConfig: p must be >= 1");
        if (!(theta > 0.0) || !(theta < 1.0))
            throw ValidationError("RecursionConfig: theta must lie in (0, 1)");
        if (f_p < 0) throw ValidationError("RecursionConfig: f_p must be positive");
        if (base_case_rows < 0)
            throw ValidationError("RecursionConfig: base_case_rows must be >= 0");
    }

    double effective_f() const { return f_p > 0 ? f_p : (p <= 2.0 ? 1.0 : 4.0); }
};

struct LevelStats {
    int level = 0;
    long input_rows = 0;
    long sampled_rows = 0;  // rows handed to the base solver at this level
    double u_min = 0, u_max = 0, u_mean = 0;
};

struct RecursionTrace {
    std::vector<LevelStats> levels;

    void write(std::ostream& out) const {
        for (const auto& s : levels)
            out << s.level << ' ' << s.input_rows << ' ' << s.sampled_rows << '\n';
    }
};

namespace detail {

// Direct Lewis form (A^T W^{1-2/p} A)^{-1}: the contracting iteration below
// p = 2, the determinant-maximization solver at and above it.
template <class Scalar>
QuadForm<Scalar> base_lewis_form(const Matrix<Scalar>& a, double p) {
    if (p < 2.0) {
        IterConfig cfg;
        cfg.p = p;
        cfg.beta = 1.0;
        cfg.theta = 1e-4;
        cfg.max_iterations = 200;
        return approx_lewis_weights(a, cfg).gram_inverse;
    }
    ConvexConfig cfg;
    cfg.p = p;
    cfg.tolerance = 1e-4;
    return lewis_quadratic_form(a, cfg).form;
}

template <class Scalar>
QuadForm<Scalar> recurse_lewis_form(const Matrix<Scalar>& a, const RecursionConfig& cfg,
                                    int level, RecursionTrace& trace) {
    const Index n = a.rows();
    const Index d = a.cols();
    const long base_rows = cfg.base_case_rows > 0 ? cfg.base_case_rows : long(d);

    auto solve_base = [&](const Matrix<Scalar>& rows, const char* stage) {
        try {
            return base_lewis_form(rows, cfg.p);
        } catch (const NumericalError& e) {
            throw NumericalError("recursion level " + std::to_string(level) + " (" + stage +
                                 "): " + e.what());
        }
    };

    if (n <= base_rows) {
        QuadForm<Scalar> q = solve_base(a, "base case");
        trace.levels.push_back({level, long(n), long(n), 0, 0, 0});
        return q;
    }

    // Uniform half without replacement, clamped so the child keeps at least
    // d rows and a chance at full column rank.
    const Index half = std::max<Index>(n / 2, std::min<Index>(n, d));
    std::vector<Index> idx(size_t(n));
    std::iota(idx.begin(), idx.end(), Index(0));
    auto shuffle_rng = make_rng(mix_seed(cfg.seed, std::uint64_t(level) * 16 + 0));
    std::shuffle(idx.begin(), idx.end(), shuffle_rng);
    Matrix<Scalar> ahat(half, d);
    for (Index i = 0; i < half; ++i) ahat.row(i) = a.row(idx[size_t(i)]);

    QuadForm<Scalar> qhat = recurse_lewis_form(ahat, cfg, level + 1, trace);

    // Probe u_i ~ a_i^T Qhat a_i at accuracy n^{theta/p}.
    const double beta = std::pow(double(n), cfg.theta / cfg.p);
    SketchConfig probe_cfg;
    probe_cfg.beta = beta;
    probe_cfg.seed = mix_seed(cfg.seed, std::uint64_t(level) * 16 + 1);
    probe_cfg.probe_count = probe_count_for(beta, n);
    Vector<Scalar> u = quad_form_probe(qhat, a, probe_cfg);
    u = u.cwiseMax(Scalar(1e-300));

    // Bernoulli resample with keep probability
    // min(1, f(p) n^{theta/2} d^{p/2} log(d) u_i^{p/2}), kept rows rescaled.
    const double dim_factor =
        (cfg.drop_dim_factor && cfg.p <= 2.0) ? 1.0 : std::pow(double(d), cfg.p / 2.0);
    const double coef = cfg.effective_f() * std::pow(double(n), cfg.theta / 2.0) * dim_factor *
                        std::max(std::log(double(d)), 1.0);
    auto keep_rng = make_rng(mix_seed(cfg.seed, std::uint64_t(level) * 16 + 2));
    std::vector<std::pair<Index, Scalar>> kept;
    kept.reserve(size_t(n));
    for (Index i = 0; i < n; ++i) {
        const double pi = std::min(1.0, coef * std::pow(double(u[i]), cfg.p / 2.0));
        const double coin = std::ldexp(double(keep_rng() >> 11), -53);
        if (coin < pi) kept.emplace_back(i, Scalar(std::pow(pi, -1.0 / cfg.p)));
    }
    if (Index(kept.size()) < d)
        throw NumericalError("recursion level " + std::to_string(level) +
                             ": resample kept fewer rows than columns (rank collapse)");
    Matrix<Scalar> aprime(Index(kept.size()), d);
    for (Index k = 0; k < aprime.rows(); ++k)
        aprime.row(k) = kept[size_t(k)].second * a.row(kept[size_t(k)].first);

    QuadForm<Scalar> q = solve_base(aprime, "resample");
    LevelStats stats{level, long(n), long(aprime.rows()), 0, 0, 0};
    if (cfg.trace) {
        stats.u_min = double(u.minCoeff());
        stats.u_max = double(u.maxCoeff());
        stats.u_mean = double(u.mean());
    }
    trace.levels.push_back(stats);
    return q;
}

}  // namespace detail

// Recursive approximation of the inverse Lewis quadratic form
// (A^T W^{1-2/p} A)^{-1}: halve uniformly, recurse for a crude form, probe
// per-row quadratics, resample nonuniformly, and solve the small resample
// directly. The returned form is a 2-approximation with high probability.
template <class Scalar>
std::pair<QuadForm<Scalar>, RecursionTrace> approx_lewis_form(const Matrix<Scalar>& a,
                                                              const RecursionConfig& cfg) {
    cfg.validate();
    check_matrix(a);
    check_no_zero_rows(a);
    RecursionTrace trace;
    QuadForm<Scalar> q = detail::recurse_lewis_form(a, cfg, 0, trace);
    std::sort(trace.levels.begin(), trace.levels.end(),
              [](const LevelStats& x, const LevelStats& y) { return x.level < y.level; });
    return {std::move(q), std::move(trace)};
}

// Final stage: turn an (approximate) inverse form into weights
// w_i = (a_i^T Q a_i)^{p/2}, with the quadratics probed rather than solved.
template <class Scalar>
Vector<Scalar> approx_lewis_weights_from_form(const Matrix<Scalar>& a, const QuadForm<Scalar>& q,
                                              double p, const SketchConfig& cfg) {
    if (!(p > 0)) throw ValidationError("approx_lewis_weights_from_form: p must be positive");
    Vector<Scalar> u = quad_form_probe(q, a, cfg);
    return u.array().max(Scalar(1e-300)).pow(Scalar(p / 2.0));
}

}  // namespace lewisrows
