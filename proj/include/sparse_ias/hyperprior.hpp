#pragma once

// Generalized gamma hyperprior on the prior variances theta:
//
//   pi(theta_j) ~ (theta_j / vt_j)^(r beta - 1) exp(-(theta_j / vt_j)^r),
//
// with shape r != 0, beta > 0 and per-component scale vt_j > 0 (the
// "theta_scale" vector). Together with the conditionally Gaussian prior
// alpha_j | theta_j ~ N(0, theta_j) the negative log-posterior is
//
//   F(alpha, theta) = 1/2 ||b - A W alpha||^2 + sum_j P_j(alpha_j, theta_j),
//   P_j = alpha_j^2 / (2 theta_j) - eta log(theta_j / vt_j) + (theta_j / vt_j)^r,
//
// where eta = r beta - 3/2. Minimising P_j over theta_j for fixed alpha_j
// gives theta_j = vt_j phi(|alpha_j| / sqrt(vt_j)), where phi solves
//
//   phi'(z) = 2 z phi / (2 r^2 phi^(r+1) + z^2),  phi(0) = (eta / r)^(1/r).

#include "sparse_ias/linops.hpp"

#include <span>

namespace sias {

class HyperParams {
public:
    static HyperParams from_beta(double r, double beta, Vector theta_scale);
    // beta = (eta + 3/2) / r.
    static HyperParams from_eta(double r, double eta, Vector theta_scale);

    double r() const { return r_; }
    double beta() const { return beta_; }
    double eta() const { return eta_; }
    const Vector& theta_scale() const { return theta_scale_; }
    std::size_t size() const { return theta_scale_.size(); }

    // eta / r > 0, so that phi(0) exists and is positive. The boundary
    // eta = 0 with r > 0 (the l_p penalty family) is representable but not
    // admissible for IAS: phi(0) = 0 there.
    bool admissible() const { return eta_ / r_ > 0.0; }

    // Globally convex objective: r >= 1 and eta > 0.
    bool globally_convex() const { return r_ >= 1.0 && eta_ > 0.0; }

    HyperParams with_scale(Vector theta_scale) const;

private:
    HyperParams(double r, double beta, double eta, Vector theta_scale);

    double r_;
    double beta_;
    double eta_;
    Vector theta_scale_;
};

struct PenaltyValue {
    double total = 0.0;
    Vector per_component;
};

// (eta / r)^(1/r). Throws ParameterError for inadmissible parameters.
double phi_zero(const HyperParams& params);

// Minimiser over theta of P_j(alpha, theta) for one component with scale `scale`.
double theta_update(double alpha, double scale, const HyperParams& params);

// Elementwise theta_update. General r integrates phi once along the sorted
// scaled magnitudes |alpha_j| / sqrt(scale_j).
Vector theta_update_batch(std::span<const double> alpha, std::span<const double> scales,
                          const HyperParams& params);

// Upper bound on theta_j below which F is convex in (alpha_j, theta_j);
// +infinity for r >= 1, eta > 0.
double convexity_threshold(const HyperParams& params, std::size_t j);

// Scales vt2 such that theta at alpha = 0 agrees between the two models.
Vector compatible_scale(const HyperParams& first, double r2, double beta2);

// vt_j = C / ||A W e_j||^2.
Vector sensitivity_weights(const LinearMap& forward_dict, double c = 1.0);

double penalty_component(double alpha, double theta, double scale, const HyperParams& params);
PenaltyValue penalty(std::span<const double> alpha, std::span<const double> theta, const HyperParams& params);
double objective(std::span<const double> alpha, std::span<const double> theta, std::span<const double> data,
                 const LinearMap& forward_dict, const HyperParams& params);

// Relative residual of dF/dtheta_j = 0, i.e. |sum of terms| / sum of |terms|
// after multiplying through by theta_j.
double stationarity_residual(double alpha, double theta, double scale, const HyperParams& params);

namespace detail {

// phi(z) through the ODE + root polish, never using the closed forms.
double phi_numeric(double z, const HyperParams& params);

// Classical RK4 on the phi ODE from (z0, phi0) to z1 with the step rule
// h = min((z1 - z0) / 8, 0.05 (1 + z)).
double integrate_phi(double z0, double phi0, double z1, double r);

// Safeguarded Newton on log(xi) for r xi^r - eta - z^2 / (2 xi) = 0.
double polish_phi(double z, double guess, const HyperParams& params);

} // namespace detail
} // namespace sias
