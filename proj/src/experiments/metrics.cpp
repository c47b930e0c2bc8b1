#include "sparse_ias/errors.hpp"
#include "sparse_ias/experiments.hpp"

#include <algorithm>
#include <cmath>

namespace sias {

std::vector<FrameSummary> frame_report(std::span<const double> alpha, const CompositeDictionary& dict,
                                       double threshold) {
    if (alpha.size() != dict.cols()) {
        throw SizeError("frame_report: alpha length does not match dictionary size");
    }
    std::vector<FrameSummary> out;
    for (std::size_t f = 0; f < dict.frame_count(); ++f) {
        const auto part = dict.slice(alpha, f);
        FrameSummary s;
        s.name = dict.frame(f).name;
        double lo = 0.0;
        for (double a : part) {
            const double m = std::abs(a);
            if (m > threshold) {
                lo = s.support == 0 ? m : std::min(lo, m);
                ++s.support;
            }
            s.max_abs = std::max(s.max_abs, m);
        }
        s.min_abs = lo;
        s.contribution = dict.frame(f).map.apply(part);
        double acc = 0.0;
        for (double v : s.contribution) {
            acc += v * v;
        }
        s.contribution_norm = std::sqrt(acc);
        out.push_back(std::move(s));
    }
    return out;
}

double default_support_threshold(std::span<const double> alpha) {
    double m = 0.0;
    for (double a : alpha) {
        m = std::max(m, std::abs(a));
    }
    return 1e-6 * m;
}

double psnr(std::span<const double> reference, std::span<const double> estimate, double peak) {
    if (reference.size() != estimate.size() || reference.empty()) {
        throw SizeError("psnr: inputs differ in length or are empty");
    }
    double mse = 0.0;
    for (std::size_t i = 0; i < reference.size(); ++i) {
        const double d = reference[i] - estimate[i];
        mse += d * d;
    }
    mse /= static_cast<double>(reference.size());
    return 10.0 * std::log10(peak * peak / mse);
}

double min_nonzero_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) {
        const double a = std::abs(x);
        if (a > 0.0 && (m == 0.0 || a < m)) {
            m = a;
        }
    }
    return m;
}

Vector second_scale(const Experiment& ex) {
    const HyperParams first = HyperParams::from_eta(ex.spec.r1, ex.spec.eta1, ex.theta_scale);
    return compatible_scale(first, ex.spec.r2, ex.spec.beta2());
}

SolveReport run_experiment(const Experiment& ex, const StoppingRule& stop, IasOptions options, bool local) {
    StoppingRule rule = stop;
    rule.phase_switch = ex.spec.phase_switch;
    options.nonneg_projection = options.nonneg_projection || ex.nonneg;
    const HyperParams first = HyperParams::from_eta(ex.spec.r1, ex.spec.eta1, ex.theta_scale);
    if (local) {
        return hybrid_local(ex.problem, first, ex.spec.r2, ex.spec.beta2(), rule, options);
    }
    return hybrid_global(ex.problem, first, ex.spec.r2, ex.spec.beta2(), rule, options);
}

} // namespace sias
