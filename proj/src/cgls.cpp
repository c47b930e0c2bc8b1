#include "sparse_ias/errors.hpp"
#include "sparse_ias/solver.hpp"

#include <cmath>

namespace sias {

namespace {

double dot(const Vector& a, const Vector& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        acc += a[i] * b[i];
    }
    return acc;
}

} // namespace

const char* cgls_stop_name(CglsStop stop) {
    switch (stop) {
    case CglsStop::discrepancy: return "discrepancy";
    case CglsStop::normal_residual: return "normal-residual";
    case CglsStop::max_iterations: return "max-iterations";
    }
    return "unknown";
}

CglsResult cgls(const LinearMap& map, std::span<const double> data, double stop_level, int max_inner,
                double damping) {
    if (data.size() != map.rows()) {
        throw SizeError("cgls: data length does not match operator rows");
    }
    if (!(stop_level >= 0.0) || !(damping >= 0.0)) {
        throw DomainError("cgls: stop level and damping must be nonnegative");
    }
    const std::size_t n = map.cols();
    CglsResult result;
    result.solution.assign(n, 0.0);
    Vector& x = result.solution;
    Vector r(data.begin(), data.end());
    Vector s(n);
    Vector q(map.rows());
    map.apply_adjoint_into(r, s);
    Vector p = s;

    double gamma = dot(s, s);
    const double normal0 = std::sqrt(gamma);
    double rnorm = std::sqrt(dot(r, r));
    result.residual_trace.push_back(rnorm);

    if (rnorm <= stop_level) {
        result.reason = CglsStop::discrepancy;
        return result;
    }
    if (normal0 == 0.0) {
        result.reason = CglsStop::normal_residual;
        return result;
    }

    while (result.iterations < max_inner) {
        map.apply_into(p, q);
        const double denom = dot(q, q) + damping * dot(p, p);
        if (!(denom > 0.0)) {
            result.reason = CglsStop::normal_residual;
            return result;
        }
        const double step = gamma / denom;
        for (std::size_t j = 0; j < n; ++j) {
            x[j] += step * p[j];
        }
        for (std::size_t i = 0; i < r.size(); ++i) {
            r[i] -= step * q[i];
        }
        map.apply_adjoint_into(r, s);
        if (damping != 0.0) {
            for (std::size_t j = 0; j < n; ++j) {
                s[j] -= damping * x[j];
            }
        }
        ++result.iterations;
        rnorm = std::sqrt(dot(r, r));
        result.residual_trace.push_back(rnorm);
        const double gamma_next = dot(s, s);

        if (rnorm <= stop_level) {
            result.reason = CglsStop::discrepancy;
            return result;
        }
        if (std::sqrt(gamma_next) <= 1e-12 * normal0) {
            result.reason = CglsStop::normal_residual;
            return result;
        }
        const double beta = gamma_next / gamma;
        gamma = gamma_next;
        for (std::size_t j = 0; j < n; ++j) {
            p[j] = s[j] + beta * p[j];
        }
    }
    result.reason = CglsStop::max_iterations;
    return result;
}

} // namespace sias
