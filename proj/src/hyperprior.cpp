#include "sparse_ias/hyperprior.hpp"

#include "sparse_ias/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace sias {

namespace {

std::string describe(double r, double beta) {
    std::ostringstream os;
    os.precision(17);
    os << "(r=" << r << ", beta=" << beta << ", eta=" << r * beta - 1.5 << ")";
    return os.str();
}

void require_admissible(const HyperParams& p, const char* what) {
    if (!p.admissible()) {
        throw ParameterError(std::string(what) + ": inadmissible hyperparameters " + describe(p.r(), p.beta()) +
                             ", need eta / r > 0");
    }
}

bool is_unit(double r) { return r == 1.0; }
bool is_minus_unit(double r) { return r == -1.0; }

// H(xi) = r xi^r - eta - z^2 / (2 xi), the stationarity condition divided by
// theta. Strictly increasing in xi for every r != 0.
struct Stationarity {
    double r;
    double eta;
    double half_z2;

    double value(double xi) const { return r * std::pow(xi, r) - eta - half_z2 / xi; }
    double scale(double xi) const { return std::abs(r * std::pow(xi, r)) + std::abs(eta) + half_z2 / xi; }
    // dH / d(log xi)
    double log_slope(double xi) const { return r * r * std::pow(xi, r) + half_z2 / xi; }
};

// Closed forms: r = 1, r = -1 and the eta = 0 boundary.
bool closed_form_phi(double z, const HyperParams& p, double& xi) {
    if (is_unit(p.r())) {
        xi = 0.5 * (p.eta() + std::sqrt(p.eta() * p.eta() + 2.0 * z * z));
        return true;
    }
    if (is_minus_unit(p.r())) {
        xi = (0.5 * z * z + 1.0) / (p.beta() + 1.5);
        return true;
    }
    if (p.eta() == 0.0) {
        xi = std::pow(z * z / (2.0 * p.r()), 1.0 / (p.r() + 1.0));
        return true;
    }
    return false;
}

double phi_rhs(double z, double phi, double r) {
    return 2.0 * z * phi / (2.0 * r * r * std::pow(phi, r + 1.0) + z * z);
}

} // namespace

HyperParams::HyperParams(double r, double beta, double eta, Vector theta_scale)
    : r_(r), beta_(beta), eta_(eta), theta_scale_(std::move(theta_scale)) {
    if (!std::isfinite(r) || r == 0.0) {
        throw ParameterError("hyperparameters: r must be finite and nonzero");
    }
    if (!std::isfinite(beta) || !(beta > 0.0)) {
        throw ParameterError("hyperparameters: beta must be positive");
    }
    for (double s : theta_scale_) {
        if (!std::isfinite(s) || !(s > 0.0)) {
            throw ParameterError("hyperparameters: scale entries must be positive and finite");
        }
    }
    if (eta_ / r_ < 0.0) {
        throw ParameterError("hyperparameters " + describe(r, beta) + " are inadmissible: eta / r < 0");
    }
}

HyperParams HyperParams::from_beta(double r, double beta, Vector theta_scale) {
    return HyperParams(r, beta, r * beta - 1.5, std::move(theta_scale));
}

HyperParams HyperParams::from_eta(double r, double eta, Vector theta_scale) {
    if (!std::isfinite(r) || r == 0.0) {
        throw ParameterError("hyperparameters: r must be finite and nonzero");
    }
    // eta is kept exactly as given; beta is derived from it.
    return HyperParams(r, (eta + 1.5) / r, eta, std::move(theta_scale));
}

HyperParams HyperParams::with_scale(Vector theta_scale) const {
    return HyperParams(r_, beta_, eta_, std::move(theta_scale));
}

double phi_zero(const HyperParams& params) {
    require_admissible(params, "phi_zero");
    if (is_unit(params.r())) {
        return params.eta();
    }
    return std::pow(params.eta() / params.r(), 1.0 / params.r());
}

double stationarity_residual(double alpha, double theta, double scale, const HyperParams& params) {
    const double xi = theta / scale;
    const Stationarity s{params.r(), params.eta(), 0.5 * alpha * alpha / scale};
    return std::abs(s.value(xi)) / s.scale(xi);
}

namespace detail {

double integrate_phi(double z0, double phi0, double z1, double r) {
    const double gap = z1 - z0;
    if (!(gap > 0.0)) {
        return phi0;
    }
    double z = z0;
    double phi = phi0;
    for (bool last = false; !last;) {
        double h = std::min(gap / 8.0, 0.05 * (1.0 + z));
        // The last clause catches gaps below the spacing of doubles near z.
        if (z + h >= z1 || (z1 - (z + h)) < 1e-12 * h || z + h == z) {
            h = z1 - z;
            last = true;
        }
        const double k1 = phi_rhs(z, phi, r);
        const double k2 = phi_rhs(z + 0.5 * h, phi + 0.5 * h * k1, r);
        const double k3 = phi_rhs(z + 0.5 * h, phi + 0.5 * h * k2, r);
        const double k4 = phi_rhs(z + h, phi + h * k3, r);
        const double next = phi + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!(next > 0.0) || !std::isfinite(next)) {
            // Left the positive branch; the polish step brackets from here.
            return phi;
        }
        phi = next;
        z += h;
    }
    return phi;
}

double polish_phi(double z, double guess, const HyperParams& params) {
    const Stationarity s{params.r(), params.eta(), 0.5 * z * z};
    // H(phi(0)) = -z^2 / (2 phi(0)) <= 0 and H is increasing, so phi(0) is a lower bracket.
    double lo = std::log(phi_zero(params));
    if (s.value(std::exp(lo)) >= 0.0) {
        return std::exp(lo);
    }
    double hi = std::max(lo, std::log(std::max(guess, std::numeric_limits<double>::min()))) + 1.0;
    while (s.value(std::exp(hi)) <= 0.0) {
        lo = hi;
        hi += 2.0 * (1.0 + std::abs(hi));
        if (hi > 700.0) {
            throw DomainError("theta_update: stationary point out of floating-point range");
        }
    }
    double u = std::log(guess);
    if (!(u > lo && u < hi)) {
        u = 0.5 * (lo + hi);
    }
    for (int iter = 0; iter < 200; ++iter) {
        const double xi = std::exp(u);
        const double h = s.value(xi);
        if (std::abs(h) <= 1e-15 * s.scale(xi)) {
            return xi;
        }
        if (h < 0.0) {
            lo = u;
        } else {
            hi = u;
        }
        double next = u - h / s.log_slope(xi);
        if (!(next > lo && next < hi)) {
            next = 0.5 * (lo + hi);
        }
        if (std::abs(next - u) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(u))) {
            return std::exp(next);
        }
        u = next;
    }
    return std::exp(u);
}

double phi_numeric(double z, const HyperParams& params) {
    const double phi0 = phi_zero(params);
    if (z == 0.0) {
        return phi0;
    }
    return polish_phi(z, integrate_phi(0.0, phi0, z, params.r()), params);
}

} // namespace detail

double theta_update(double alpha, double scale, const HyperParams& params) {
    if (!std::isfinite(scale) || !(scale > 0.0)) {
        throw ParameterError("theta_update: scale must be positive");
    }
    if (!std::isfinite(alpha)) {
        throw DomainError("theta_update: non-finite coefficient");
    }
    const double z = std::abs(alpha) / std::sqrt(scale);
    if (z == 0.0) {
        return scale * phi_zero(params);
    }
    double xi = 0.0;
    if (closed_form_phi(z, params, xi)) {
        return scale * xi;
    }
    return scale * detail::phi_numeric(z, params);
}

Vector theta_update_batch(std::span<const double> alpha, std::span<const double> scales, const HyperParams& params) {
    if (alpha.size() != scales.size()) {
        throw SizeError("theta_update_batch: alpha and scales differ in length");
    }
    const std::size_t n = alpha.size();
    Vector out(n);
    Vector z(n);
    for (std::size_t j = 0; j < n; ++j) {
        if (!std::isfinite(scales[j]) || !(scales[j] > 0.0)) {
            throw ParameterError("theta_update_batch: scales must be positive");
        }
        if (!std::isfinite(alpha[j])) {
            throw DomainError("theta_update_batch: non-finite coefficient");
        }
        z[j] = std::abs(alpha[j]) / std::sqrt(scales[j]);
    }
    if (n == 0) {
        return out;
    }

    double xi = 0.0;
    if (closed_form_phi(1.0, params, xi)) {
        for (std::size_t j = 0; j < n; ++j) {
            out[j] = theta_update(alpha[j], scales[j], params);
        }
        return out;
    }

    const double phi0 = phi_zero(params);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return z[a] < z[b]; });

    // Walk the sorted magnitudes once, restarting each gap from the polished value.
    double z_prev = 0.0;
    double phi_prev = phi0;
    for (std::size_t j : order) {
        if (z[j] == 0.0) {
            out[j] = scales[j] * phi0;
            continue;
        }
        if (z[j] > z_prev) {
            phi_prev = detail::polish_phi(z[j], detail::integrate_phi(z_prev, phi_prev, z[j], params.r()), params);
            z_prev = z[j];
        }
        out[j] = scales[j] * phi_prev;
    }
    return out;
}

double convexity_threshold(const HyperParams& params, std::size_t j) {
    const double r = params.r();
    const double eta = params.eta();
    const double scale = params.theta_scale().at(j);
    if (r >= 1.0) {
        if (eta > 0.0) {
            return std::numeric_limits<double>::infinity();
        }
        throw ParameterError("convexity_threshold: r >= 1 requires eta > 0");
    }
    if (r > 0.0 && !(eta > 0.0)) {
        throw ParameterError("convexity_threshold: 0 < r < 1 requires eta > 0");
    }
    return scale * std::pow(eta / (r * std::abs(r - 1.0)), 1.0 / r);
}

Vector compatible_scale(const HyperParams& first, double r2, double beta2) {
    const HyperParams second = HyperParams::from_beta(r2, beta2, Vector{});
    require_admissible(first, "compatible_scale");
    require_admissible(second, "compatible_scale");
    const double factor = phi_zero(first) / phi_zero(second);
    Vector out(first.theta_scale());
    for (double& s : out) {
        s *= factor;
    }
    return out;
}

Vector sensitivity_weights(const LinearMap& forward_dict, double c) {
    if (!std::isfinite(c) || !(c > 0.0)) {
        throw ParameterError("sensitivity_weights: C must be positive");
    }
    Vector norms = forward_dict.column_norms_squared();
    for (std::size_t j = 0; j < norms.size(); ++j) {
        if (!(norms[j] > 0.0)) {
            throw DegenerateColumnError("sensitivity_weights: column " + std::to_string(j) +
                                        " has zero norm and is invisible to the data");
        }
        norms[j] = c / norms[j];
    }
    return norms;
}

double penalty_component(double alpha, double theta, double scale, const HyperParams& params) {
    if (!(theta > 0.0)) {
        throw DomainError("penalty: theta must be positive");
    }
    const double ratio = theta / scale;
    const double log_term = params.eta() == 0.0 ? 0.0 : params.eta() * std::log(ratio);
    return 0.5 * alpha * alpha / theta - log_term + std::pow(ratio, params.r());
}

PenaltyValue penalty(std::span<const double> alpha, std::span<const double> theta, const HyperParams& params) {
    if (alpha.size() != theta.size() || alpha.size() != params.size()) {
        throw SizeError("penalty: alpha, theta and scale lengths differ");
    }
    PenaltyValue out;
    out.per_component.resize(alpha.size());
    for (std::size_t j = 0; j < alpha.size(); ++j) {
        out.per_component[j] = penalty_component(alpha[j], theta[j], params.theta_scale()[j], params);
        out.total += out.per_component[j];
    }
    return out;
}

double objective(std::span<const double> alpha, std::span<const double> theta, std::span<const double> data,
                 const LinearMap& forward_dict, const HyperParams& params) {
    if (data.size() != forward_dict.rows()) {
        throw SizeError("objective: data length does not match operator rows");
    }
    const Vector fit = forward_dict.apply(alpha);
    double misfit = 0.0;
    for (std::size_t i = 0; i < fit.size(); ++i) {
        const double d = data[i] - fit[i];
        misfit += d * d;
    }
    return 0.5 * misfit + penalty(alpha, theta, params).total;
}

} // namespace sias
