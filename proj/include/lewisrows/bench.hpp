#pragma once

#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "lewisrows/common.hpp"
#include "lewisrows/generators.hpp"
#include "lewisrows/sampling.hpp"
#include "lewisrows/verify.hpp"

namespace lewisrows {

// Paired comparison of sampling schemes at equal row budgets: Lewis-weight
// sampling against uniform and l2-leverage sampling on generated instances.

struct BenchSpec {
    std::string generator = "spiky";  // spiky | gaussian
    Index n = 4000;
    Index d = 10;
    std::vector<double> p_values{1.0};
    std::vector<double> epsilons{0.25};
    std::vector<std::uint64_t> seeds{1};
    long num_dirs = 500;
    double oversample_constant = 4.0;
    DeltaMode delta_mode = DeltaMode::kConstant;
    std::uint64_t instance_seed = 42;
};

struct BenchRow {
    std::string generator;
    Index n = 0, d = 0;
    double p = 0, epsilon = 0;
    long total_rows = 0;
    std::string method;
    std::uint64_t seed = 0;
    double distortion = 0;
};

inline Matrixd bench_instance(const BenchSpec& spec) {
    if (spec.generator == "spiky")
        return spiky_instance<double>(spec.n, spec.d, 5, 1000.0, spec.instance_seed);
    if (spec.generator == "gaussian")
        return gaussian_instance<double>(spec.n, spec.d, spec.instance_seed);
    throw ValidationError("bench: unknown generator '" + spec.generator +
                          "' (use spiky or gaussian)");
}

inline std::vector<BenchRow> run_bench(const BenchSpec& spec) {
    Matrixd a = bench_instance(spec);
    std::vector<BenchRow> rows;
    const Vectord uniform = Vectord::Constant(a.rows(), double(a.cols()) / double(a.rows()));
    const Vectord leverage = leverage_scores_exact(a);
    for (double p : spec.p_values) {
        const Vectord lewis = brute_force_lewis(a, p, 1e-8);
        for (double eps : spec.epsilons) {
            const SamplingPlan plans[3] = {
                sampling_plan(lewis, p, eps, spec.oversample_constant, spec.delta_mode),
                sampling_plan(uniform, p, eps, spec.oversample_constant, spec.delta_mode),
                sampling_plan(leverage, p, eps, spec.oversample_constant, spec.delta_mode)};
            const char* names[3] = {"lewis", "uniform", "leverage"};
            for (std::uint64_t seed : spec.seeds) {
                for (int m = 0; m < 3; ++m) {
                    SketchOperator op = draw_sketch(plans[m], mix_seed(seed, std::uint64_t(m)));
                    Matrixd sketched = apply_sketch(op, a);
                    DistortionReport rep =
                        distortion_estimate(a, sketched, p, spec.num_dirs, mix_seed(seed, 77));
                    rows.push_back(BenchRow{spec.generator, a.rows(), a.cols(), p, eps,
                                            plans[m].total, names[m], seed,
                                            std::exp(std::max(rep.max_over, rep.max_under)) - 1});
                }
            }
        }
    }
    return rows;
}

inline void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
    out << "generator,n,d,p,epsilon,N,method,seed,distortion\n";
    char buf[256];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof(buf), "%s,%lld,%lld,%.17g,%.17g,%ld,%s,%llu,%.17g\n",
                      r.generator.c_str(), (long long)r.n, (long long)r.d, r.p, r.epsilon,
                      r.total_rows, r.method.c_str(), (unsigned long long)r.seed, r.distortion);
        out << buf;
    }
}

}  // namespace lewisrows
