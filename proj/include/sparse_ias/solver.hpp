#pragma once

// Iterative alternating sequential (IAS) minimisation of
//   F(alpha, theta) = 1/2 ||b - A W alpha||^2 + P(alpha, theta | r, beta, vt)
// with a CGLS alpha-step and a closed-form / ODE theta-step, plus the global
// and local hybrid drivers that hand off from a convex hyperprior to a
// sparser one.

#include "sparse_ias/hyperprior.hpp"
#include "sparse_ias/linops.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace sias {

enum class CglsStop {
    discrepancy,     // ||b - M x_k|| <= stop_level
    normal_residual, // ||M^T r_k - damping x_k|| <= 1e-12 ||M^T b||
    max_iterations,
};

const char* cgls_stop_name(CglsStop stop);

struct CglsResult {
    Vector solution;
    int iterations = 0;
    // ||b - M x_k|| for k = 0..iterations.
    Vector residual_trace;
    CglsStop reason = CglsStop::max_iterations;
};

// Conjugate gradient for least squares on min ||M x - b||^2 + damping ||x||^2,
// started from x = 0. With damping = 0 this is early-stopped CGLS.
CglsResult cgls(const LinearMap& map, std::span<const double> data, double stop_level, int max_inner,
                double damping = 0.0);

struct Problem {
    LinearMap forward_dict; // whitened A W
    Vector data;            // whitened b
    // Sub-frame sizes used for per-frame support counts; empty means one frame.
    std::vector<std::size_t> frame_sizes;
};

enum class Phase : std::uint8_t { first, second };

struct IasState {
    Vector alpha;
    Vector theta;
    int outer_iter = 0;
    std::vector<Phase> phase;
    // params[0] drives Phase::first components, params[1] (if present) Phase::second.
    std::vector<HyperParams> params;
};

struct PhaseSwitch {
    enum class Kind { after_fixed, on_theta_rtol, whichever_first };
    Kind kind = Kind::after_fixed;
    int after = 10;
    double tol = 1e-3;

    static PhaseSwitch after_fixed(int k) { return {Kind::after_fixed, k, 1e-3}; }
    static PhaseSwitch on_theta_rtol(double tol) { return {Kind::on_theta_rtol, 0, tol}; }
    static PhaseSwitch whichever_first(int k, double tol) { return {Kind::whichever_first, k, tol}; }
};

// max_outer and theta_rtol bound a plain run, or the second phase of a
// global hybrid run (counted from the hand-off). phase_switch decides when the
// global hybrid hands off.
struct StoppingRule {
    int max_outer = 100;
    double theta_rtol = 1e-3;
    PhaseSwitch phase_switch = PhaseSwitch::after_fixed(10);

    void validate() const;
};

struct IterationLog {
    int iteration = 0;
    double objective = 0.0;
    int cgls_count = 0;
    double residual = 0.0;
    double theta_change = 0.0;
    std::size_t second_phase_count = 0;
};

struct IasOptions {
    bool nonneg_projection = false;
    // Tikhonov-exact alpha-step (damped CGLS to convergence) instead of early stopping.
    bool exact_alpha = false;
    // CGLS cap; 0 picks 10 N in exact mode and max(2 min(m, N), 50) otherwise.
    int max_inner = 0;
    double theta_floor = 1e-30;
    // |alpha_j| > support_rel * max |alpha| counts as support in reports.
    double support_rel = 1e-6;
    std::function<void(const IterationLog&)> on_iteration;
};

struct SolveReport {
    Vector objective_trace;
    std::vector<int> cgls_counts;
    Vector data_residual;
    Vector theta_change;
    std::vector<std::vector<std::size_t>> support_per_frame;
    IasState final_state;
    // Global hybrid: index of the first outer iteration run under the second
    // model (equal to the number of first-phase iterations); -1 otherwise.
    int switch_iteration = -1;
    // Local hybrid: per component, the iteration after which it switched (-1: never).
    std::vector<int> component_switch;
};

struct AlphaUpdate {
    Vector alpha;
    CglsResult cgls;
};

// alpha = D^{1/2} gamma, gamma from CGLS on (A W D^{1/2}) gamma = b.
AlphaUpdate alpha_update(std::span<const double> theta, std::span<const double> data, const LinearMap& forward_dict,
                         bool exact, int max_inner = 0, double theta_floor = 1e-30);

SolveReport ias_run(const Problem& problem, const HyperParams& params, const StoppingRule& stop,
                    const IasOptions& options = {});

SolveReport hybrid_global(const Problem& problem, const HyperParams& first, double r2, double beta2,
                          const StoppingRule& stop, const IasOptions& options = {});

SolveReport hybrid_local(const Problem& problem, const HyperParams& first, double r2, double beta2,
                         const StoppingRule& stop, const IasOptions& options = {});

// Noise N(0, sigma^2 I): A -> A / sigma, b -> b / sigma.
std::pair<LinearMap, Vector> whiten(const LinearMap& forward, std::span<const double> data, double noise_std);

// Objective with per-component parameters taken from the state's phase markers.
double state_objective(const IasState& state, const Problem& problem);

} // namespace sias
