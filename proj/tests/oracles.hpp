#pragma once

// Independent reference computations used by the unit and acceptance tests.
// Nothing here calls into the library's solver or hyperprior code paths.

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

inline std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    std::vector<double> v(n);
    for (double& x : v) {
        x = dist(rng);
    }
    return v;
}

inline Vec to_eigen(const std::vector<double>& v) { return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size())); }

inline std::vector<double> from_eigen(const Vec& v) { return {v.data(), v.data() + v.size()}; }

inline Mat from_row_major(const std::vector<double>& a, std::size_t rows, std::size_t cols) {
    Mat m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = a[i * cols + j];
        }
    }
    return m;
}

inline std::vector<double> to_row_major(const Mat& m) {
    std::vector<double> a(static_cast<std::size_t>(m.rows() * m.cols()));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            a[static_cast<std::size_t>(i * m.cols() + j)] = m(i, j);
        }
    }
    return a;
}

// Lower-triangular ones.
inline Mat cumsum_matrix(int n) {
    Mat l = Mat::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            l(i, j) = 1.0;
        }
    }
    return l;
}

// First-difference matrix B with x_0 = 0.
inline Mat difference_matrix(int n) {
    Mat b = Mat::Identity(n, n);
    for (int i = 1; i < n; ++i) {
        b(i, i - 1) = -1.0;
    }
    return b;
}

// Orthonormal DCT-II analysis matrix C.
inline Mat dct_matrix(int n) {
    Mat c(n, n);
    for (int k = 0; k < n; ++k) {
        for (int i = 0; i < n; ++i) {
            const double w = k == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
            c(k, i) = w * std::cos(std::numbers::pi * (2 * i + 1) * k / (2.0 * n));
        }
    }
    return c;
}

inline Mat kron(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

// Dense least squares via the normal equations.
inline Vec normal_equation_solve(const Mat& a, const Vec& b) {
    return (a.transpose() * a).ldlt().solve(a.transpose() * b);
}

// argmin ||A alpha - b||^2 + ||D_theta^{-1/2} alpha||^2.
inline Vec tikhonov_solve(const Mat& a, const Vec& b, const Vec& theta) {
    Mat h = a.transpose() * a;
    for (Eigen::Index j = 0; j < h.rows(); ++j) {
        h(j, j) += 1.0 / theta(j);
    }
    return h.ldlt().solve(a.transpose() * b);
}

// P_j(alpha, theta) written out directly from the model, with u = log(theta).
inline double penalty_log(double alpha, double u, double scale, double r, double eta) {
    const double log_ratio = u - std::log(scale);
    return 0.5 * alpha * alpha * std::exp(-u) - eta * log_ratio + std::exp(r * log_ratio);
}

// Golden-section minimisation of P_j over log(theta). A coarse scan locates
// the basin first; P_j has a single stationary point in theta > 0.
inline double golden_section_theta(double alpha, double scale, double r, double eta) {
    const double centre = std::log(scale);
    double lo = centre - 80.0;
    double hi = centre + 80.0;
    const int scan = 4000;
    double best_u = lo;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= scan; ++i) {
        const double u = lo + (hi - lo) * i / scan;
        const double f = penalty_log(alpha, u, scale, r, eta);
        if (f < best) {
            best = f;
            best_u = u;
        }
    }
    const double step = (hi - lo) / scan;
    double a = best_u - step;
    double b = best_u + step;
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = penalty_log(alpha, c, scale, r, eta);
    double fd = penalty_log(alpha, d, scale, r, eta);
    for (int it = 0; it < 200 && (b - a) > 1e-13; ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = penalty_log(alpha, c, scale, r, eta);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = penalty_log(alpha, d, scale, r, eta);
        }
    }
    return std::exp(0.5 * (a + b));
}

// Stationary theta for r = 1 and r = -1, straight from dF/dtheta = 0.
inline double theta_closed_form_r1(double alpha, double scale, double eta) {
    return 0.5 * scale * (eta + std::sqrt(eta * eta + 2.0 * alpha * alpha / scale));
}

inline double theta_closed_form_rm1(double alpha, double scale, double beta) {
    return (0.5 * alpha * alpha + scale) / (beta + 1.5);
}

} // namespace oracle
