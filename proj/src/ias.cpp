#include "sparse_ias/errors.hpp"
#include "sparse_ias/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace sias {

void StoppingRule::validate() const {
    if (max_outer < 1) {
        throw ParameterError("stopping rule: max_outer must be at least 1");
    }
    if (!(theta_rtol > 0.0)) {
        throw ParameterError("stopping rule: theta_rtol must be positive");
    }
    if (phase_switch.after < 0) {
        throw ParameterError("stopping rule: phase switch iteration must be nonnegative");
    }
    if (phase_switch.kind != PhaseSwitch::Kind::after_fixed && !(phase_switch.tol > 0.0)) {
        throw ParameterError("stopping rule: phase switch tolerance must be positive");
    }
}

AlphaUpdate alpha_update(std::span<const double> theta, std::span<const double> data, const LinearMap& forward_dict,
                         bool exact, int max_inner, double theta_floor) {
    const std::size_t n = forward_dict.cols();
    if (theta.size() != n) {
        throw SizeError("alpha_update: theta length does not match dictionary columns");
    }
    Vector root(n);
    for (std::size_t j = 0; j < n; ++j) {
        if (!(theta[j] > 0.0)) {
            throw DomainError("alpha_update: theta must be strictly positive");
        }
        root[j] = std::sqrt(std::max(theta[j], theta_floor));
    }
    const LinearMap scaled = scale_columns(forward_dict, root);
    const std::size_t m = forward_dict.rows();
    if (max_inner <= 0) {
        max_inner = exact ? static_cast<int>(10 * n) : static_cast<int>(std::max<std::size_t>(2 * std::min(m, n), 50));
    }
    AlphaUpdate out;
    out.cgls = exact ? cgls(scaled, data, 0.0, max_inner, 1.0)
                     : cgls(scaled, data, std::sqrt(static_cast<double>(m)), max_inner);
    out.alpha = out.cgls.solution;
    for (std::size_t j = 0; j < n; ++j) {
        out.alpha[j] *= root[j];
    }
    return out;
}

std::pair<LinearMap, Vector> whiten(const LinearMap& forward, std::span<const double> data, double noise_std) {
    if (!std::isfinite(noise_std) || !(noise_std > 0.0)) {
        throw ParameterError("whiten: noise standard deviation must be positive");
    }
    if (data.size() != forward.rows()) {
        throw SizeError("whiten: data length does not match operator rows");
    }
    const double inv = 1.0 / noise_std;
    Vector b(data.begin(), data.end());
    for (double& v : b) {
        v *= inv;
    }
    return {scale_rows(forward, Vector(forward.rows(), inv)), std::move(b)};
}

double state_objective(const IasState& state, const Problem& problem) {
    const Vector fit = problem.forward_dict.apply(state.alpha);
    double misfit = 0.0;
    for (std::size_t i = 0; i < fit.size(); ++i) {
        const double d = problem.data[i] - fit[i];
        misfit += d * d;
    }
    double pen = 0.0;
    for (std::size_t j = 0; j < state.alpha.size(); ++j) {
        const HyperParams& p = state.params[static_cast<std::size_t>(state.phase[j])];
        pen += penalty_component(state.alpha[j], state.theta[j], p.theta_scale()[j], p);
    }
    return 0.5 * misfit + pen;
}

namespace {

void validate_problem(const Problem& problem, const HyperParams& params) {
    const std::size_t n = problem.forward_dict.cols();
    if (problem.data.size() != problem.forward_dict.rows()) {
        throw SizeError("ias: data length does not match operator rows");
    }
    if (params.size() != n) {
        throw SizeError("ias: scale vector length does not match dictionary columns");
    }
    if (!params.admissible()) {
        throw ParameterError("ias: first hyperparameter set is inadmissible (need eta / r > 0)");
    }
    if (!problem.frame_sizes.empty() &&
        std::accumulate(problem.frame_sizes.begin(), problem.frame_sizes.end(), std::size_t{0}) != n) {
        throw SizeError("ias: frame sizes do not add up to the dictionary size");
    }
}

class Engine {
public:
    Engine(const Problem& problem, const IasOptions& options, const HyperParams& first)
        : problem_(problem), options_(options) {
        const std::size_t n = problem.forward_dict.cols();
        frames_ = problem.frame_sizes.empty() ? std::vector<std::size_t>{n} : problem.frame_sizes;
        state_.alpha.assign(n, 0.0);
        state_.phase.assign(n, Phase::first);
        state_.params.push_back(first);
        state_.theta = theta_update_batch(state_.alpha, first.theta_scale(), first);
    }

    IasState& state() { return state_; }
    SolveReport& report() { return report_; }

    double step() {
        const AlphaUpdate au = alpha_update(state_.theta, problem_.data, problem_.forward_dict, options_.exact_alpha,
                                            options_.max_inner, options_.theta_floor);
        state_.alpha = au.alpha;
        if (options_.nonneg_projection) {
            for (double& a : state_.alpha) {
                a = std::max(a, 0.0);
            }
        }

        const Vector previous = state_.theta;
        update_theta();
        ++state_.outer_iter;

        double diff = 0.0;
        double base = 0.0;
        for (std::size_t j = 0; j < previous.size(); ++j) {
            const double d = state_.theta[j] - previous[j];
            diff += d * d;
            base += previous[j] * previous[j];
        }
        const double change = std::sqrt(diff / base);
        record(au.cgls.iterations, change);
        return change;
    }

    SolveReport finish() {
        report_.final_state = state_;
        return std::move(report_);
    }

private:
    void update_theta() {
        const std::size_t n = state_.alpha.size();
        for (std::size_t phase = 0; phase < state_.params.size(); ++phase) {
            const HyperParams& p = state_.params[phase];
            std::vector<std::size_t> idx;
            for (std::size_t j = 0; j < n; ++j) {
                if (static_cast<std::size_t>(state_.phase[j]) == phase) {
                    idx.push_back(j);
                }
            }
            if (idx.empty()) {
                continue;
            }
            if (idx.size() == n) {
                state_.theta = theta_update_batch(state_.alpha, p.theta_scale(), p);
                return;
            }
            Vector a(idx.size());
            Vector s(idx.size());
            for (std::size_t k = 0; k < idx.size(); ++k) {
                a[k] = state_.alpha[idx[k]];
                s[k] = p.theta_scale()[idx[k]];
            }
            const Vector t = theta_update_batch(a, s, p);
            for (std::size_t k = 0; k < idx.size(); ++k) {
                state_.theta[idx[k]] = t[k];
            }
        }
    }

    void record(int cgls_count, double change) {
        const Vector fit = problem_.forward_dict.apply(state_.alpha);
        double misfit = 0.0;
        for (std::size_t i = 0; i < fit.size(); ++i) {
            const double d = problem_.data[i] - fit[i];
            misfit += d * d;
        }
        double pen = 0.0;
        for (std::size_t j = 0; j < state_.alpha.size(); ++j) {
            const HyperParams& p = state_.params[static_cast<std::size_t>(state_.phase[j])];
            pen += penalty_component(state_.alpha[j], state_.theta[j], p.theta_scale()[j], p);
        }
        const double obj = 0.5 * misfit + pen;

        double amax = 0.0;
        for (double a : state_.alpha) {
            amax = std::max(amax, std::abs(a));
        }
        const double thr = options_.support_rel * amax;
        std::vector<std::size_t> support;
        std::size_t offset = 0;
        for (std::size_t size : frames_) {
            std::size_t count = 0;
            for (std::size_t j = offset; j < offset + size; ++j) {
                if (std::abs(state_.alpha[j]) > thr) {
                    ++count;
                }
            }
            support.push_back(count);
            offset += size;
        }

        report_.objective_trace.push_back(obj);
        report_.cgls_counts.push_back(cgls_count);
        report_.data_residual.push_back(std::sqrt(misfit));
        report_.theta_change.push_back(change);
        report_.support_per_frame.push_back(std::move(support));

        if (options_.on_iteration) {
            IterationLog log;
            log.iteration = state_.outer_iter;
            log.objective = obj;
            log.cgls_count = cgls_count;
            log.residual = std::sqrt(misfit);
            log.theta_change = change;
            log.second_phase_count = static_cast<std::size_t>(
                std::count(state_.phase.begin(), state_.phase.end(), Phase::second));
            options_.on_iteration(log);
        }
    }

    const Problem& problem_;
    const IasOptions& options_;
    std::vector<std::size_t> frames_;
    IasState state_;
    SolveReport report_;
};

HyperParams second_params(const HyperParams& first, double r2, double beta2) {
    return HyperParams::from_beta(r2, beta2, compatible_scale(first, r2, beta2));
}

} // namespace

SolveReport ias_run(const Problem& problem, const HyperParams& params, const StoppingRule& stop,
                    const IasOptions& options) {
    stop.validate();
    validate_problem(problem, params);
    Engine engine(problem, options, params);
    for (int it = 0; it < stop.max_outer; ++it) {
        if (engine.step() < stop.theta_rtol) {
            break;
        }
    }
    return engine.finish();
}

SolveReport hybrid_global(const Problem& problem, const HyperParams& first, double r2, double beta2,
                          const StoppingRule& stop, const IasOptions& options) {
    stop.validate();
    validate_problem(problem, first);
    if (!first.globally_convex()) {
        throw ParameterError("hybrid_global: first hyperparameter set must be globally convex (r >= 1, eta > 0)");
    }
    const HyperParams second = second_params(first, r2, beta2);

    Engine engine(problem, options, first);
    const PhaseSwitch& rule = stop.phase_switch;
    const bool counts = rule.kind != PhaseSwitch::Kind::on_theta_rtol;
    const bool watches = rule.kind != PhaseSwitch::Kind::after_fixed;
    int k = 0;
    while (true) {
        if (counts && k >= rule.after) {
            break;
        }
        if (!counts && k >= stop.max_outer) {
            break;
        }
        const double change = engine.step();
        ++k;
        if (watches && change < rule.tol) {
            break;
        }
    }

    IasState& state = engine.state();
    state.params.push_back(second);
    std::fill(state.phase.begin(), state.phase.end(), Phase::second);
    engine.report().switch_iteration = k;

    for (int it = 0; it < stop.max_outer; ++it) {
        if (engine.step() < stop.theta_rtol) {
            break;
        }
    }
    return engine.finish();
}

SolveReport hybrid_local(const Problem& problem, const HyperParams& first, double r2, double beta2,
                         const StoppingRule& stop, const IasOptions& options) {
    stop.validate();
    validate_problem(problem, first);
    if (!first.globally_convex()) {
        throw ParameterError("hybrid_local: first hyperparameter set must be globally convex (r >= 1, eta > 0)");
    }
    const HyperParams second = second_params(first, r2, beta2);
    const std::size_t n = problem.forward_dict.cols();
    Vector threshold(n);
    for (std::size_t j = 0; j < n; ++j) {
        threshold[j] = convexity_threshold(second, j);
    }

    Engine engine(problem, options, first);
    IasState& state = engine.state();
    state.params.push_back(second);
    engine.report().component_switch.assign(n, -1);

    for (int it = 0; it < stop.max_outer; ++it) {
        const double change = engine.step();
        for (std::size_t j = 0; j < n; ++j) {
            if (state.phase[j] == Phase::first && state.theta[j] < threshold[j]) {
                state.phase[j] = Phase::second;
                engine.report().component_switch[j] = state.outer_iter;
            }
        }
        if (change < stop.theta_rtol) {
            break;
        }
    }
    return engine.finish();
}

} // namespace sias
