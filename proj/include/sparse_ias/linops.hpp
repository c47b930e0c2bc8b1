#pragma once

// Matrix-free linear operators. Every forward model and dictionary in the
// library is assembled from these: dense blocks, cumulative sums (inverse
// first differences), orthonormal DCT synthesis, separable 2-D operators on
// columnwise-stacked images, and their sums, products and diagonal scalings.

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace sias {

using Vector = std::vector<double>;

namespace detail {
class MapImpl;
}

class LinearMap {
public:
    enum class Kind {
        dense,
        identity,
        cumsum,
        dct,
        gaussian_blur,
        kronecker,
        column_scaled,
        horizontal_concat,
        composed,
        row_scaled,
    };

    explicit LinearMap(std::shared_ptr<const detail::MapImpl> impl);

    std::size_t rows() const;
    std::size_t cols() const;
    Kind kind() const;

    // Checked applications: size mismatch -> SizeError, non-finite entry -> DomainError.
    Vector apply(std::span<const double> v) const;
    Vector apply_adjoint(std::span<const double> u) const;

    // Unchecked variants writing into caller storage; `out` must not alias `in`.
    void apply_into(std::span<const double> in, std::span<double> out) const;
    void apply_adjoint_into(std::span<const double> in, std::span<double> out) const;

    // Entry j is ||apply(e_j)||^2.
    Vector column_norms_squared() const;

    const detail::MapImpl& impl() const { return *impl_; }
    const std::shared_ptr<const detail::MapImpl>& impl_ptr() const { return impl_; }

private:
    std::shared_ptr<const detail::MapImpl> impl_;
};

const char* kind_name(LinearMap::Kind kind);

enum class KronSide {
    left,  // I (x) M : M acts down each column of the image
    right, // M (x) I : M acts along each row of the image
};

LinearMap identity(std::size_t n);

// Lower-triangular ones matrix L (inverse of the first-difference matrix with x_0 = 0).
LinearMap cumsum(std::size_t n);

// Row-major rows x cols matrix.
LinearMap dense(std::size_t rows, std::size_t cols, Vector row_major);

// Orthonormal DCT-II synthesis C^T, so that x = C^T y for y = C x.
LinearMap dct_synthesis(std::size_t n);

// Midpoint-rule discretisation of the Gaussian convolution kernel:
// entry (j, i) = exp(-(s_j - t_i)^2 / 2w^2) / sqrt(2 pi w^2) / n.
LinearMap gaussian_blur(double width, std::span<const double> source_grid,
                        std::span<const double> obs_points);

// Square M acting on an n x n image stacked columnwise.
LinearMap kron2d(const LinearMap& m, KronSide side);

// General separable operator on a columnwise-stacked image X:
// vec(X) -> vec(col_factor * X * row_factor^T), i.e. row_factor (x) col_factor.
LinearMap kron_separable(const LinearMap& col_factor, const LinearMap& row_factor);

LinearMap scale_columns(const LinearMap& map, std::span<const double> d);
LinearMap scale_rows(const LinearMap& map, std::span<const double> d);

// a after b.
LinearMap compose(const LinearMap& a, const LinearMap& b);

LinearMap concat_horizontal(const std::vector<LinearMap>& blocks);

// Equidistant midpoint grid (i + 1/2)/n, i = 0..n-1.
Vector midpoint_grid(std::size_t n);

struct Subframe {
    std::string name;
    LinearMap map;
};

// Horizontal concatenation W = [W_1, ..., W_K] of named sub-frames sharing a row count.
class CompositeDictionary {
public:
    explicit CompositeDictionary(std::vector<Subframe> subframes);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return offsets_.back(); }
    std::size_t frame_count() const { return subframes_.size(); }

    const std::vector<Subframe>& subframes() const { return subframes_; }
    const Subframe& frame(std::size_t i) const { return subframes_.at(i); }

    // offsets()[i] is the first coefficient of frame i; offsets().back() == cols().
    const std::vector<std::size_t>& offsets() const { return offsets_; }
    std::vector<std::size_t> frame_sizes() const;
    std::size_t frame_of(std::size_t coefficient) const;

    std::span<const double> slice(std::span<const double> coefficients, std::size_t frame) const;

    const LinearMap& as_map() const { return map_; }

private:
    std::vector<Subframe> subframes_;
    std::vector<std::size_t> offsets_;
    std::size_t rows_ = 0;
    LinearMap map_;
};

LinearMap concat_horizontal(const CompositeDictionary& dict);

// Materialises the operator column by column. Test and diagnostics helper.
Vector to_dense(const LinearMap& map);

namespace detail {

class MapImpl {
public:
    MapImpl(std::size_t rows, std::size_t cols, LinearMap::Kind kind)
        : rows_(rows), cols_(cols), kind_(kind) {}
    virtual ~MapImpl() = default;

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    LinearMap::Kind kind() const { return kind_; }

    virtual void apply(const double* in, double* out) const = 0;
    virtual void apply_adjoint(const double* in, double* out) const = 0;

    // Default: apply to every unit vector, in parallel over columns.
    virtual Vector column_norms_squared() const;

private:
    std::size_t rows_;
    std::size_t cols_;
    LinearMap::Kind kind_;
};

// Reference column-norm evaluation through unit vectors, serial.
Vector column_norms_by_unit_vectors_serial(const MapImpl& map);
Vector column_norms_by_unit_vectors(const MapImpl& map);

} // namespace detail
} // namespace sias
