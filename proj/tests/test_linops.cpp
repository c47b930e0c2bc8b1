#include "sparse_ias/errors.hpp"
#include "sparse_ias/linops.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using sias::LinearMap;
using sias::Vector;

namespace {

double dot(const Vector& a, const Vector& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += a[i] * b[i];
    }
    return s;
}

// |<Av, u> - <v, A^T u>| relative to |A||v||u|-ish magnitude.
double adjoint_gap(const LinearMap& map, std::mt19937_64& rng) {
    const auto v = oracle::random_vector(map.cols(), rng);
    const auto u = oracle::random_vector(map.rows(), rng);
    const double lhs = dot(map.apply(v), u);
    const double rhs = dot(v, map.apply_adjoint(u));
    return std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), 1e-300});
}

void expect_near_vec(const Vector& a, const Vector& b, double tol) {
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_NEAR(a[i], b[i], tol) << "at " << i;
    }
}

TEST(Apply, IdentityReturnsInput) {
    expect_near_vec(sias::identity(3).apply(Vector{1, 2, 3}), {1, 2, 3}, 0.0);
    expect_near_vec(sias::identity(3).apply_adjoint(Vector{4, 5, 6}), {4, 5, 6}, 0.0);
}

TEST(Apply, CumsumMatchesLowerTriangularOnes) {
    expect_near_vec(sias::cumsum(4).apply(Vector{1, 0, 0, 1}), {1, 1, 1, 2}, 0.0);
    expect_near_vec(sias::cumsum(3).apply_adjoint(Vector{1, 1, 1}), {3, 2, 1}, 0.0);

    const auto l = oracle::cumsum_matrix(7);
    std::mt19937_64 rng(1);
    const auto v = oracle::random_vector(7, rng);
    expect_near_vec(sias::cumsum(7).apply(v), oracle::from_eigen(l * oracle::to_eigen(v)), 1e-14);
    // L is the inverse of the first-difference matrix.
    expect_near_vec(oracle::from_eigen(oracle::difference_matrix(7) * oracle::to_eigen(sias::cumsum(7).apply(v))), v,
                    1e-14);
}

TEST(Apply, DctSynthesisFirstColumnIsConstant) {
    const double s = 1.0 / std::sqrt(2.0);
    expect_near_vec(sias::dct_synthesis(2).apply(Vector{1, 0}), {s, s}, 1e-15);
}

TEST(Apply, DctSynthesisIsTransposeOfDctMatrix) {
    const int n = 9;
    const auto c = oracle::dct_matrix(n);
    std::mt19937_64 rng(2);
    const auto y = oracle::random_vector(n, rng);
    expect_near_vec(sias::dct_synthesis(n).apply(y), oracle::from_eigen(c.transpose() * oracle::to_eigen(y)), 1e-14);
}

TEST(Apply, SizeAndDomainErrors) {
    const auto id = sias::identity(3);
    EXPECT_THROW(id.apply(Vector{1, 2}), sias::SizeError);
    EXPECT_THROW(id.apply_adjoint(Vector{1, 2, 3, 4}), sias::SizeError);
    EXPECT_THROW(id.apply(Vector{1, std::numeric_limits<double>::quiet_NaN(), 3}), sias::DomainError);
    EXPECT_THROW(id.apply(Vector{1, std::numeric_limits<double>::infinity(), 3}), sias::DomainError);
}

TEST(Adjoint, RandomDenseWithin1e12) {
    std::mt19937_64 rng(3);
    const auto a = sias::dense(5, 3, oracle::random_vector(15, rng));
    for (int t = 0; t < 20; ++t) {
        EXPECT_LT(adjoint_gap(a, rng), 1e-12);
    }
}

TEST(GaussianBlur, FlatKernelForHugeWidth) {
    const auto grid = sias::midpoint_grid(50);
    const auto obs = sias::midpoint_grid(7);
    const auto a = sias::to_dense(sias::gaussian_blur(1e3, grid, obs));
    for (std::size_t j = 0; j < 7; ++j) {
        double lo = 1e300, hi = -1e300;
        for (std::size_t i = 0; i < 50; ++i) {
            lo = std::min(lo, a[j * 50 + i]);
            hi = std::max(hi, a[j * 50 + i]);
        }
        EXPECT_LT((hi - lo) / hi, 1e-6);
    }
}

TEST(GaussianBlur, InteriorRowSumsNearOne) {
    const std::size_t n = 500;
    const auto grid = sias::midpoint_grid(n);
    const auto a = sias::to_dense(sias::gaussian_blur(0.02, grid, grid));
    for (std::size_t j = 0; j < n; ++j) {
        // Interior: at least 4 widths from either end.
        if (grid[j] < 0.08 || grid[j] > 0.92) {
            continue;
        }
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            sum += a[j * n + i];
        }
        EXPECT_NEAR(sum, 1.0, 0.02) << "row " << j;
    }
}

TEST(GaussianBlur, DiagonalEntryIsPeakOverN) {
    const std::size_t n = 40;
    const double w = 0.03;
    const auto grid = sias::midpoint_grid(n);
    const auto a = sias::to_dense(sias::gaussian_blur(w, grid, grid));
    const double expected = 1.0 / (n * std::sqrt(2.0 * std::numbers::pi * w * w));
    for (std::size_t i = 0; i < n; ++i) {
        EXPECT_NEAR(a[i * n + i], expected, 1e-12 * expected);
    }
}

TEST(GaussianBlur, RejectsBadInput) {
    const auto grid = sias::midpoint_grid(5);
    EXPECT_THROW(sias::gaussian_blur(0.0, grid, grid), sias::DomainError);
    EXPECT_THROW(sias::gaussian_blur(-1.0, grid, grid), sias::DomainError);
    const Vector unsorted{0.5, 0.1};
    EXPECT_THROW(sias::gaussian_blur(0.1, unsorted, grid), sias::DomainError);
    const Vector outside{0.5, 1.5};
    EXPECT_THROW(sias::gaussian_blur(0.1, grid, outside), sias::DomainError);
}

TEST(Kron2d, IdentityFactorIsIdentity) {
    std::mt19937_64 rng(4);
    const auto v = oracle::random_vector(16, rng);
    expect_near_vec(sias::kron2d(sias::identity(4), sias::KronSide::left).apply(v), v, 0.0);
    expect_near_vec(sias::kron2d(sias::identity(4), sias::KronSide::right).apply(v), v, 0.0);
}

TEST(Kron2d, CumsumDownColumns) {
    // [[1,0],[0,1]] stacked columnwise.
    expect_near_vec(sias::kron2d(sias::cumsum(2), sias::KronSide::left).apply(Vector{1, 0, 0, 1}), {1, 1, 0, 1}, 0.0);
}

TEST(Kron2d, MatchesExplicitKroneckerMatrices) {
    std::mt19937_64 rng(5);
    for (int n = 1; n <= 4; ++n) {
        const auto mdata = oracle::random_vector(static_cast<std::size_t>(n * n), rng);
        const auto m = sias::dense(n, n, mdata);
        const auto mm = oracle::from_row_major(mdata, n, n);
        const auto id = oracle::Mat::Identity(n, n);
        const auto left = oracle::to_row_major(oracle::kron(id, mm));
        const auto right = oracle::to_row_major(oracle::kron(mm, id));
        expect_near_vec(sias::to_dense(sias::kron2d(m, sias::KronSide::left)), left, 1e-13);
        expect_near_vec(sias::to_dense(sias::kron2d(m, sias::KronSide::right)), right, 1e-13);
    }
}

TEST(Kron2d, SizeErrors) {
    EXPECT_THROW(sias::kron2d(sias::dense(2, 3, Vector(6, 1.0)), sias::KronSide::left), sias::SizeError);
    EXPECT_THROW(sias::kron2d(sias::cumsum(3), sias::KronSide::left).apply(Vector(8, 1.0)), sias::SizeError);
}

TEST(Kron2d, AdjointOnRandomInstance) {
    std::mt19937_64 rng(6);
    const auto m = sias::dense(3, 3, oracle::random_vector(9, rng));
    for (auto side : {sias::KronSide::left, sias::KronSide::right}) {
        EXPECT_LT(adjoint_gap(sias::kron2d(m, side), rng), 1e-12);
    }
}

TEST(ColumnNorms, ClosedFormCases) {
    expect_near_vec(sias::identity(5).column_norms_squared(), Vector(5, 1.0), 0.0);
    expect_near_vec(sias::cumsum(3).column_norms_squared(), {3, 2, 1}, 0.0);
    expect_near_vec(sias::dct_synthesis(17).column_norms_squared(), Vector(17, 1.0), 1e-12);
}

TEST(ColumnNorms, AgreeWithDenseMaterialisation) {
    std::mt19937_64 rng(7);
    const std::size_t n = 8; // 2 frames of n^2 = 64 columns each, plus a scaled 2-D DCT
    const auto blur = sias::gaussian_blur(0.08, sias::midpoint_grid(n), sias::midpoint_grid(n));
    const auto a2d = sias::kron_separable(blur, blur);
    const auto c = sias::dct_synthesis(n);
    const auto d = oracle::random_vector(n * n, rng, 0.5, 2.0);
    const auto w = sias::concat_horizontal({sias::identity(n * n), sias::kron2d(sias::cumsum(n), sias::KronSide::left),
                                            sias::kron2d(sias::cumsum(n), sias::KronSide::right),
                                            sias::scale_columns(sias::kron_separable(c, c), d)});
    const auto maps = {a2d, w, sias::compose(a2d, w), sias::scale_rows(sias::compose(a2d, w), Vector(n * n, 3.0))};
    for (const auto& map : maps) {
        ASSERT_LE(map.cols(), 512u);
        const auto dense = sias::to_dense(map);
        const auto norms = map.column_norms_squared();
        for (std::size_t j = 0; j < map.cols(); ++j) {
            double ref = 0.0;
            for (std::size_t i = 0; i < map.rows(); ++i) {
                ref += dense[i * map.cols() + j] * dense[i * map.cols() + j];
            }
            EXPECT_NEAR(norms[j], ref, 1e-12 * ref) << sias::kind_name(map.kind()) << " column " << j;
        }
    }
}

TEST(Composite, ConcatScaleCompose) {
    const auto cat = sias::concat_horizontal({sias::identity(2), sias::identity(2)});
    expect_near_vec(cat.apply(Vector{1, 2, 3, 4}), {4, 6}, 0.0);
    expect_near_vec(sias::scale_columns(sias::identity(2), Vector{2, 3}).apply(Vector{1, 1}), {2, 3}, 0.0);

    std::mt19937_64 rng(8);
    const std::size_t n = 20;
    const auto blur = sias::gaussian_blur(0.05, sias::midpoint_grid(n), sias::midpoint_grid(n));
    const auto map = sias::compose(blur, sias::concat_horizontal({sias::cumsum(n), sias::dct_synthesis(n)}));
    EXPECT_LT(adjoint_gap(map, rng), 1e-10);
}

TEST(Composite, Errors) {
    EXPECT_THROW(sias::concat_horizontal({sias::identity(2), sias::identity(3)}), sias::SizeError);
    EXPECT_THROW(sias::scale_columns(sias::identity(2), Vector{1.0, 0.0}), sias::DomainError);
    EXPECT_THROW(sias::scale_columns(sias::identity(2), Vector{1.0, -2.0}), sias::DomainError);
    EXPECT_THROW(sias::compose(sias::identity(2), sias::identity(3)), sias::SizeError);
}

TEST(CompositeDictionary, OffsetsPartitionColumns) {
    sias::CompositeDictionary dict({{"increments", sias::cumsum(4)}, {"cosine", sias::dct_synthesis(4)},
                                    {"spikes", sias::identity(4)}});
    EXPECT_EQ(dict.rows(), 4u);
    EXPECT_EQ(dict.cols(), 12u);
    EXPECT_GE(dict.cols(), dict.rows());
    EXPECT_EQ(dict.offsets(), (std::vector<std::size_t>{0, 4, 8, 12}));
    EXPECT_EQ(dict.frame_of(0), 0u);
    EXPECT_EQ(dict.frame_of(7), 1u);
    EXPECT_EQ(dict.frame_of(8), 2u);
    EXPECT_EQ(dict.as_map().kind(), LinearMap::Kind::horizontal_concat);
}

// Randomised adjoint consistency over every operator kind.
TEST(Property, AdjointConsistencyAllKinds) {
    std::mt19937_64 rng(9);
    std::uniform_int_distribution<int> size(1, 12);
    for (int trial = 0; trial < 100; ++trial) {
        const auto n = static_cast<std::size_t>(size(rng));
        const auto m = static_cast<std::size_t>(size(rng));
        const auto dn = sias::dense(m, n, oracle::random_vector(m * n, rng));
        const auto blur = sias::gaussian_blur(0.1, sias::midpoint_grid(n), sias::midpoint_grid(m));
        const auto sq = sias::dense(n, n, oracle::random_vector(n * n, rng));
        const std::vector<LinearMap> maps{
            dn,
            sias::identity(n),
            sias::cumsum(n),
            sias::dct_synthesis(n),
            blur,
            sias::kron2d(sq, sias::KronSide::left),
            sias::kron2d(sq, sias::KronSide::right),
            sias::kron_separable(dn, blur),
            sias::scale_columns(dn, oracle::random_vector(n, rng, 0.1, 3.0)),
            sias::scale_rows(dn, oracle::random_vector(m, rng, 0.1, 3.0)),
            sias::concat_horizontal({blur, dn, sias::compose(blur, sias::cumsum(n))}),
            sias::compose(blur, sias::concat_horizontal({sias::cumsum(n), sias::dct_synthesis(n)})),
        };
        for (const auto& map : maps) {
            EXPECT_LT(adjoint_gap(map, rng), 1e-10) << sias::kind_name(map.kind()) << " trial " << trial;
        }
    }
}

TEST(Property, DctRoundTrip) {
    std::mt19937_64 rng(10);
    for (std::size_t n : {1u, 2u, 3u, 16u, 100u, 256u}) {
        const auto c = sias::dct_synthesis(n);
        const auto v = oracle::random_vector(n, rng);
        expect_near_vec(c.apply_adjoint(c.apply(v)), v, 1e-12);
    }
}

} // namespace
