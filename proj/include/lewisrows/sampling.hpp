#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "lewisrows/common.hpp"

namespace lewisrows {

// Failure-probability regime of the sample-count table.
enum class DeltaMode { kHighProbability, kConstant };

inline const char* to_string(DeltaMode mode) {
    return mode == DeltaMode::kHighProbability ? "high-probability" : "constant";
}

inline DeltaMode delta_mode_from_string(const std::string& s) {
    if (s == "high-probability" || s == "hp") return DeltaMode::kHighProbability;
    if (s == "constant" || s == "const") return DeltaMode::kConstant;
    throw ValidationError("unknown delta mode '" + s + "' (use high-probability or constant)");
}

// Sufficient row count for a (1+epsilon) subspace sketch built from Lewis
// weights, per norm regime. Natural logs; each log factor is floored at 1 so
// the formulas stay positive at small d and epsilon near 1.
inline long row_count_bound(long d, double p, double epsilon, DeltaMode mode,
                            double oversample_constant = 4.0) {
    if (d < 1) throw ValidationError("row_count_bound: d must be >= 1");
    if (!(p >= 1.0)) throw ValidationError("row_count_bound: p < 1 is unsupported");
    if (!(epsilon > 0.0) || !(epsilon > 0.0 && epsilon <= 1.0))
        throw ValidationError("row_count_bound: epsilon must lie in (0, 1]");
    if (!(oversample_constant > 0.0))
        throw ValidationError("row_count_bound: oversample constant must be positive");
    const double dd = double(d);
    const double eps2 = epsilon * epsilon;
    auto lg = [](double x) { return std::max(std::log(x), 1.0); };
    double base = 0;
    if (p == 1.0) {
        base = mode == DeltaMode::kHighProbability ? dd * lg(dd / epsilon) / eps2
                                                   : dd * lg(dd) / eps2;
    } else if (p < 2.0) {
        const double inner = lg(std::max(std::log(dd), 1.0) / epsilon);
        base = dd * lg(dd / epsilon) * inner * inner / eps2;
    } else if (p == 2.0) {
        base = dd * lg(dd) / eps2;
    } else {
        base = std::pow(dd, p / 2.0) * lg(dd) * lg(1.0 / epsilon) / std::pow(epsilon, 5.0);
    }
    return std::max(1L, long(std::ceil(oversample_constant * base)));
}

struct SamplingPlan {
    double p = 1.0;
    Vectord values;                 // per-row sampling values p_i > 0
    long total = 0;                 // N = ceil(sum p_i)
    double epsilon = 0.5;
    double oversample_constant = 4.0;
    DeltaMode delta_mode = DeltaMode::kConstant;
};

// Distributes the table's row count over rows proportionally to their
// weights: p_i = w_i * N / sum(w). The self-referential form p_i ~ log(N) w_i
// is available for p = 1 high-probability plans via refit_log_n, which
// re-solves N = ceil(C_s log(N)/eps^2 * sum w) to a fixed point.
template <class Scalar>
SamplingPlan sampling_plan(const Vector<Scalar>& w, double p, double epsilon,
                           double oversample_constant, DeltaMode mode, bool refit_log_n = false) {
    check_weights(w, w.size(), "sampling weights");
    const double s = double(w.sum());
    const long d_eff = std::max(1L, std::lround(s));
    long bound = row_count_bound(d_eff, p, epsilon, mode, oversample_constant);
    SamplingPlan plan;
    plan.p = p;
    plan.epsilon = epsilon;
    plan.oversample_constant = oversample_constant;
    plan.delta_mode = mode;
    if (refit_log_n && p == 1.0 && mode == DeltaMode::kHighProbability) {
        double factor = 0;
        for (int pass = 0; pass < 64; ++pass) {
            factor = oversample_constant * std::max(std::log(double(bound)), 1.0) /
                     (epsilon * epsilon);
            const long next = std::max(1L, long(std::ceil(factor * s)));
            if (next == bound) break;
            bound = next;
        }
        plan.values = (w.template cast<double>() * factor).eval();
    } else {
        plan.values = (w.template cast<double>() * (double(bound) / s)).eval();
    }
    plan.total = std::max(1L, long(std::ceil(plan.values.sum())));
    return plan;
}

// Theorem-style precondition check for p = 1 high-probability plans:
// p_i >= C_s w_i log(N) / eps^2 for every row.
template <class Scalar>
bool plan_dominates(const SamplingPlan& plan, const Vector<Scalar>& w) {
    if (plan.values.size() != w.size()) throw ValidationError("plan_dominates: size mismatch");
    const double need =
        plan.oversample_constant * std::log(double(plan.total)) / (plan.epsilon * plan.epsilon);
    return (plan.values.array() >= need * w.template cast<double>().array() * (1 - 1e-12)).all();
}

// Realized sampling operator: N rows, each selecting one source row with a
// fixed rescaling. Applying it stacks the scaled source rows.
struct SketchOperator {
    Index source_rows = 0;
    double p = 1.0;
    std::vector<std::pair<Index, double>> entries;  // (source row, scale)
};

// N i.i.d. categorical draws with probabilities p_i / sum(p), each entry
// scaled p_i^{-1/p}. Deterministic given the seed.
inline SketchOperator draw_sketch(const SamplingPlan& plan, std::uint64_t seed) {
    const Index n = plan.values.size();
    if (n < 1) throw ValidationError("draw_sketch: empty plan");
    if ((plan.values.array() <= 0).any())
        throw ValidationError("draw_sketch: sampling values must be positive");
    std::vector<double> cdf(static_cast<size_t>(n));
    double acc = 0;
    for (Index i = 0; i < n; ++i) {
        acc += plan.values[i];
        cdf[size_t(i)] = acc;
    }
    SketchOperator op;
    op.source_rows = n;
    op.p = plan.p;
    op.entries.reserve(size_t(plan.total));
    auto rng = make_rng(seed);
    for (long k = 0; k < plan.total; ++k) {
        const double u = std::ldexp(double(rng() >> 11), -53) * acc;
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        const Index i = Index(std::min<std::ptrdiff_t>(it - cdf.begin(), n - 1));
        op.entries.emplace_back(i, std::pow(plan.values[i], -1.0 / plan.p));
    }
    return op;
}

template <class Scalar>
Matrix<Scalar> apply_sketch(const SketchOperator& op, const Matrix<Scalar>& a) {
    check_matrix(a);
    if (op.source_rows != a.rows())
        throw ValidationError("apply_sketch: operator built for " +
                              std::to_string(op.source_rows) + " rows, matrix has " +
                              std::to_string(a.rows()));
    Matrix<Scalar> out(Index(op.entries.size()), a.cols());
    for (Index k = 0; k < out.rows(); ++k) {
        const auto& [i, scale] = op.entries[size_t(k)];
        if (i < 0 || i >= a.rows())
            throw ValidationError("apply_sketch: row index " + std::to_string(i) +
                                  " out of range");
        out.row(k) = Scalar(scale) * a.row(i);
    }
    return out;
}

void write_sketch(std::ostream& out, const SketchOperator& op);
SketchOperator read_sketch(std::istream& in);

inline void write_sketch(std::ostream& out, const SketchOperator& op) {
    char header[128];
    std::snprintf(header, sizeof(header), "# lewisrows-sketch v1 p=%.17g N=%zu n=%lld\n", op.p,
                  op.entries.size(), (long long)op.source_rows);
    out << header;
    char line[64];
    for (const auto& [i, scale] : op.entries) {
        std::snprintf(line, sizeof(line), "%lld %.17g\n", (long long)i, scale);
        out << line;
    }
    if (!out) throw IoError("write_sketch: stream failure");
}

inline SketchOperator read_sketch(std::istream& in) {
    std::string tag, version;
    SketchOperator op;
    long long n_entries = -1;
    std::string word;
    if (!(in >> tag >> version)) throw IoError("read_sketch: missing header");
    if (tag != "#" || version != "lewisrows-sketch")
        throw IoError("read_sketch: not a lewisrows sketch file");
    if (!(in >> word) || word != "v1") throw IoError("read_sketch: unsupported version");
    auto parse_field = [&](const char* name) {
        if (!(in >> word) || word.rfind(std::string(name) + "=", 0) != 0)
            throw IoError(std::string("read_sketch: expected field ") + name);
        return word.substr(std::string(name).size() + 1);
    };
    op.p = std::stod(parse_field("p"));
    n_entries = std::stoll(parse_field("N"));
    op.source_rows = Index(std::stoll(parse_field("n")));
    if (n_entries < 0 || op.source_rows < 1) throw IoError("read_sketch: bad header counts");
    op.entries.reserve(size_t(n_entries));
    for (long long k = 0; k < n_entries; ++k) {
        long long i;
        double scale;
        if (!(in >> i >> scale)) throw IoError("read_sketch: truncated entry list");
        if (i < 0 || i >= op.source_rows) throw IoError("read_sketch: row index out of range");
        op.entries.emplace_back(Index(i), scale);
    }
    return op;
}

}  // namespace lewisrows
