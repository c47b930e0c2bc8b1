#include "sparse_ias/linops.hpp"

#include "sparse_ias/errors.hpp"
#include "sparse_ias/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

namespace sias {

namespace detail {

namespace {

double unit_column_norm(const MapImpl& map, std::size_t j) {
    Vector e(map.cols(), 0.0);
    Vector col(map.rows());
    e[j] = 1.0;
    map.apply(e.data(), col.data());
    double acc = 0.0;
    for (double c : col) {
        acc += c * c;
    }
    return acc;
}

} // namespace

Vector column_norms_by_unit_vectors_serial(const MapImpl& map) {
    Vector out(map.cols());
    kernels::serial::for_each_index(map.cols(), [&](std::size_t j) { out[j] = unit_column_norm(map, j); });
    return out;
}

Vector column_norms_by_unit_vectors(const MapImpl& map) {
    Vector out(map.cols());
    kernels::omp::for_each_index(map.cols(), [&](std::size_t j) { out[j] = unit_column_norm(map, j); });
    return out;
}

Vector MapImpl::column_norms_squared() const { return column_norms_by_unit_vectors(*this); }

namespace {

class DenseMap final : public MapImpl {
public:
    DenseMap(std::size_t rows, std::size_t cols, Vector a, LinearMap::Kind kind)
        : MapImpl(rows, cols, kind), a_(std::move(a)), at_(rows * cols) {
        for (std::size_t i = 0; i < rows; ++i) {
            for (std::size_t j = 0; j < cols; ++j) {
                at_[j * rows + i] = a_[i * cols + j];
            }
        }
    }

    void apply(const double* in, double* out) const override {
        kernels::omp::matvec(a_.data(), rows(), cols(), in, out);
    }

    void apply_adjoint(const double* in, double* out) const override {
        kernels::omp::matvec(at_.data(), cols(), rows(), in, out);
    }

    Vector column_norms_squared() const override {
        Vector out(cols());
        kernels::omp::for_each_index(cols(), [&](std::size_t j) {
            const double* col = at_.data() + j * rows();
            double acc = 0.0;
            for (std::size_t i = 0; i < rows(); ++i) {
                acc += col[i] * col[i];
            }
            out[j] = acc;
        });
        return out;
    }

private:
    Vector a_;
    Vector at_;
};

class IdentityMap final : public MapImpl {
public:
    explicit IdentityMap(std::size_t n) : MapImpl(n, n, LinearMap::Kind::identity) {}

    void apply(const double* in, double* out) const override { std::copy(in, in + rows(), out); }
    void apply_adjoint(const double* in, double* out) const override { std::copy(in, in + rows(), out); }
    Vector column_norms_squared() const override { return Vector(cols(), 1.0); }
};

class CumsumMap final : public MapImpl {
public:
    explicit CumsumMap(std::size_t n) : MapImpl(n, n, LinearMap::Kind::cumsum) {}

    void apply(const double* in, double* out) const override {
        double acc = 0.0;
        for (std::size_t i = 0; i < rows(); ++i) {
            acc += in[i];
            out[i] = acc;
        }
    }

    void apply_adjoint(const double* in, double* out) const override {
        double acc = 0.0;
        for (std::size_t i = rows(); i-- > 0;) {
            acc += in[i];
            out[i] = acc;
        }
    }

    // Column j of L holds n - j trailing ones.
    Vector column_norms_squared() const override {
        Vector out(cols());
        for (std::size_t j = 0; j < cols(); ++j) {
            out[j] = static_cast<double>(cols() - j);
        }
        return out;
    }
};

// vec(X) -> vec(C X R^T) for X of shape (C.cols x R.cols).
class KronMap final : public MapImpl {
public:
    KronMap(LinearMap col_factor, LinearMap row_factor)
        : MapImpl(col_factor.rows() * row_factor.rows(), col_factor.cols() * row_factor.cols(),
                  LinearMap::Kind::kronecker),
          c_(std::move(col_factor)), r_(std::move(row_factor)) {}

    const LinearMap& col_factor() const { return c_; }
    const LinearMap& row_factor() const { return r_; }

    void apply(const double* in, double* out) const override {
        const std::size_t pc = c_.rows(), qc = c_.cols(), pr = r_.rows(), qr = r_.cols();
        // Stage 1: Y = C X, shape pc x qr.
        Vector y(pc * qr);
        if (c_.kind() == LinearMap::Kind::identity) {
            std::copy(in, in + qc * qr, y.begin());
        } else {
            kernels::omp::for_each_index(qr, [&](std::size_t k) {
                c_.impl().apply(in + k * qc, y.data() + k * pc);
            });
        }
        // Stage 2: Z = Y R^T, shape pc x pr; row i of Z is R applied to row i of Y.
        if (r_.kind() == LinearMap::Kind::identity) {
            std::copy(y.begin(), y.end(), out);
            return;
        }
        kernels::omp::for_each_index(pc, [&](std::size_t i) {
            Vector row(qr);
            Vector mapped(pr);
            for (std::size_t k = 0; k < qr; ++k) {
                row[k] = y[k * pc + i];
            }
            r_.impl().apply(row.data(), mapped.data());
            for (std::size_t l = 0; l < pr; ++l) {
                out[l * pc + i] = mapped[l];
            }
        });
    }

    void apply_adjoint(const double* in, double* out) const override {
        const std::size_t pc = c_.rows(), qc = c_.cols(), pr = r_.rows(), qr = r_.cols();
        // Stage 1: Y = Z R, shape pc x qr.
        Vector y(pc * qr);
        if (r_.kind() == LinearMap::Kind::identity) {
            std::copy(in, in + pc * pr, y.begin());
        } else {
            kernels::omp::for_each_index(pc, [&](std::size_t i) {
                Vector row(pr);
                Vector mapped(qr);
                for (std::size_t l = 0; l < pr; ++l) {
                    row[l] = in[l * pc + i];
                }
                r_.impl().apply_adjoint(row.data(), mapped.data());
                for (std::size_t k = 0; k < qr; ++k) {
                    y[k * pc + i] = mapped[k];
                }
            });
        }
        // Stage 2: X = C^T Y.
        if (c_.kind() == LinearMap::Kind::identity) {
            std::copy(y.begin(), y.end(), out);
            return;
        }
        kernels::omp::for_each_index(qr, [&](std::size_t k) {
            c_.impl().apply_adjoint(y.data() + k * pc, out + k * qc);
        });
    }

    // Column (i, k) of R (x) C is r_k (x) c_i, whose squared norm factorises.
    Vector column_norms_squared() const override {
        const Vector cc = c_.column_norms_squared();
        const Vector cr = r_.column_norms_squared();
        Vector out(cols());
        for (std::size_t k = 0; k < cr.size(); ++k) {
            for (std::size_t i = 0; i < cc.size(); ++i) {
                out[k * cc.size() + i] = cc[i] * cr[k];
            }
        }
        return out;
    }

private:
    LinearMap c_;
    LinearMap r_;
};

class ColumnScaledMap final : public MapImpl {
public:
    ColumnScaledMap(LinearMap inner, Vector d)
        : MapImpl(inner.rows(), inner.cols(), LinearMap::Kind::column_scaled), inner_(std::move(inner)),
          d_(std::move(d)) {}

    void apply(const double* in, double* out) const override {
        Vector scaled(cols());
        kernels::omp::scale_elementwise(d_.data(), in, scaled.data(), cols());
        inner_.impl().apply(scaled.data(), out);
    }

    void apply_adjoint(const double* in, double* out) const override {
        inner_.impl().apply_adjoint(in, out);
        kernels::omp::scale_elementwise(d_.data(), out, out, cols());
    }

    Vector column_norms_squared() const override {
        Vector out = inner_.column_norms_squared();
        for (std::size_t j = 0; j < out.size(); ++j) {
            out[j] *= d_[j] * d_[j];
        }
        return out;
    }

private:
    LinearMap inner_;
    Vector d_;
};

class RowScaledMap final : public MapImpl {
public:
    RowScaledMap(LinearMap inner, Vector d)
        : MapImpl(inner.rows(), inner.cols(), LinearMap::Kind::row_scaled), inner_(std::move(inner)),
          d_(std::move(d)) {}

    void apply(const double* in, double* out) const override {
        inner_.impl().apply(in, out);
        kernels::omp::scale_elementwise(d_.data(), out, out, rows());
    }

    void apply_adjoint(const double* in, double* out) const override {
        Vector scaled(rows());
        kernels::omp::scale_elementwise(d_.data(), in, scaled.data(), rows());
        inner_.impl().apply_adjoint(scaled.data(), out);
    }

    // A uniform row scale (whitening with one noise level) keeps the inner structure.
    Vector column_norms_squared() const override {
        if (d_.empty() || std::any_of(d_.begin(), d_.end(), [&](double v) { return v != d_.front(); })) {
            return column_norms_by_unit_vectors(*this);
        }
        Vector out = inner_.column_norms_squared();
        const double d2 = d_.front() * d_.front();
        for (double& v : out) {
            v *= d2;
        }
        return out;
    }

private:
    LinearMap inner_;
    Vector d_;
};

class ConcatMap final : public MapImpl {
public:
    ConcatMap(std::vector<LinearMap> blocks, std::size_t rows, std::size_t cols)
        : MapImpl(rows, cols, LinearMap::Kind::horizontal_concat), blocks_(std::move(blocks)) {}

    const std::vector<LinearMap>& blocks() const { return blocks_; }

    void apply(const double* in, double* out) const override {
        std::fill(out, out + rows(), 0.0);
        Vector part(rows());
        std::size_t offset = 0;
        for (const auto& b : blocks_) {
            b.impl().apply(in + offset, part.data());
            for (std::size_t i = 0; i < rows(); ++i) {
                out[i] += part[i];
            }
            offset += b.cols();
        }
    }

    void apply_adjoint(const double* in, double* out) const override {
        std::size_t offset = 0;
        for (const auto& b : blocks_) {
            b.impl().apply_adjoint(in, out + offset);
            offset += b.cols();
        }
    }

    Vector column_norms_squared() const override {
        Vector out;
        out.reserve(cols());
        for (const auto& b : blocks_) {
            const Vector part = b.column_norms_squared();
            out.insert(out.end(), part.begin(), part.end());
        }
        return out;
    }

private:
    std::vector<LinearMap> blocks_;
};

class ComposedMap final : public MapImpl {
public:
    ComposedMap(LinearMap a, LinearMap b)
        : MapImpl(a.rows(), b.cols(), LinearMap::Kind::composed), a_(std::move(a)), b_(std::move(b)) {}

    void apply(const double* in, double* out) const override {
        Vector mid(b_.rows());
        b_.impl().apply(in, mid.data());
        a_.impl().apply(mid.data(), out);
    }

    void apply_adjoint(const double* in, double* out) const override {
        Vector mid(a_.cols());
        a_.impl().apply_adjoint(in, mid.data());
        b_.impl().apply_adjoint(mid.data(), out);
    }

    // A [W_1 ... W_K] has the columns of A W_1, ..., A W_K, so the blocks can
    // be treated separately and keep whatever structure compose() finds.
    Vector column_norms_squared() const override {
        if (b_.kind() == LinearMap::Kind::horizontal_concat) {
            const auto& concat = static_cast<const ConcatMap&>(b_.impl());
            Vector out;
            out.reserve(cols());
            for (const auto& block : concat.blocks()) {
                const Vector part = compose(a_, block).column_norms_squared();
                out.insert(out.end(), part.begin(), part.end());
            }
            return out;
        }
        return column_norms_by_unit_vectors(*this);
    }

private:
    LinearMap a_;
    LinearMap b_;
};

void require_finite_positive(std::span<const double> d, const char* what) {
    for (double x : d) {
        if (!std::isfinite(x) || x <= 0.0) {
            throw DomainError(std::string(what) + ": scaling entries must be positive and finite");
        }
    }
}

void require_finite(std::span<const double> v, const char* what) {
    for (double x : v) {
        if (!std::isfinite(x)) {
            throw DomainError(std::string(what) + ": non-finite input entry");
        }
    }
}

std::string dims(std::size_t r, std::size_t c) {
    std::ostringstream os;
    os << r << "x" << c;
    return os.str();
}

} // namespace
} // namespace detail

LinearMap::LinearMap(std::shared_ptr<const detail::MapImpl> impl) : impl_(std::move(impl)) {}

std::size_t LinearMap::rows() const { return impl_->rows(); }
std::size_t LinearMap::cols() const { return impl_->cols(); }
LinearMap::Kind LinearMap::kind() const { return impl_->kind(); }

Vector LinearMap::apply(std::span<const double> v) const {
    if (v.size() != cols()) {
        throw SizeError("apply: expected vector of length " + std::to_string(cols()) + ", got " +
                        std::to_string(v.size()));
    }
    detail::require_finite(v, "apply");
    Vector out(rows());
    impl_->apply(v.data(), out.data());
    return out;
}

Vector LinearMap::apply_adjoint(std::span<const double> u) const {
    if (u.size() != rows()) {
        throw SizeError("apply_adjoint: expected vector of length " + std::to_string(rows()) + ", got " +
                        std::to_string(u.size()));
    }
    detail::require_finite(u, "apply_adjoint");
    Vector out(cols());
    impl_->apply_adjoint(u.data(), out.data());
    return out;
}

void LinearMap::apply_into(std::span<const double> in, std::span<double> out) const {
    impl_->apply(in.data(), out.data());
}

void LinearMap::apply_adjoint_into(std::span<const double> in, std::span<double> out) const {
    impl_->apply_adjoint(in.data(), out.data());
}

Vector LinearMap::column_norms_squared() const { return impl_->column_norms_squared(); }

const char* kind_name(LinearMap::Kind kind) {
    switch (kind) {
    case LinearMap::Kind::dense: return "dense";
    case LinearMap::Kind::identity: return "identity";
    case LinearMap::Kind::cumsum: return "cumsum";
    case LinearMap::Kind::dct: return "dct";
    case LinearMap::Kind::gaussian_blur: return "gaussian-blur";
    case LinearMap::Kind::kronecker: return "kronecker";
    case LinearMap::Kind::column_scaled: return "column-scaled";
    case LinearMap::Kind::horizontal_concat: return "horizontal-concat";
    case LinearMap::Kind::composed: return "composed";
    case LinearMap::Kind::row_scaled: return "row-scaled";
    }
    return "unknown";
}

LinearMap identity(std::size_t n) {
    if (n == 0) {
        throw SizeError("identity: dimension must be positive");
    }
    return LinearMap(std::make_shared<detail::IdentityMap>(n));
}

LinearMap cumsum(std::size_t n) {
    if (n == 0) {
        throw SizeError("cumsum: dimension must be positive");
    }
    return LinearMap(std::make_shared<detail::CumsumMap>(n));
}

LinearMap dense(std::size_t rows, std::size_t cols, Vector row_major) {
    if (rows == 0 || cols == 0 || row_major.size() != rows * cols) {
        throw SizeError("dense: " + detail::dims(rows, cols) + " needs " + std::to_string(rows * cols) +
                        " entries, got " + std::to_string(row_major.size()));
    }
    detail::require_finite(row_major, "dense");
    return LinearMap(std::make_shared<detail::DenseMap>(rows, cols, std::move(row_major), LinearMap::Kind::dense));
}

LinearMap dct_synthesis(std::size_t n) {
    if (n == 0) {
        throw SizeError("dct_synthesis: dimension must be positive");
    }
    // C(k, i) = c_k cos(pi (2i + 1) k / 2n); we store C^T row-major, i.e. entry (i, k).
    Vector ct(n * n);
    const double nd = static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
            const double ck = (k == 0) ? std::sqrt(1.0 / nd) : std::sqrt(2.0 / nd);
            ct[i * n + k] = ck * std::cos(std::numbers::pi * (2.0 * static_cast<double>(i) + 1.0) *
                                          static_cast<double>(k) / (2.0 * nd));
        }
    }
    return LinearMap(std::make_shared<detail::DenseMap>(n, n, std::move(ct), LinearMap::Kind::dct));
}

LinearMap gaussian_blur(double width, std::span<const double> source_grid, std::span<const double> obs_points) {
    if (!(width > 0.0) || !std::isfinite(width)) {
        throw DomainError("gaussian_blur: width must be positive");
    }
    if (source_grid.empty() || obs_points.empty()) {
        throw SizeError("gaussian_blur: grids must be non-empty");
    }
    for (auto grid : {source_grid, obs_points}) {
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (!(grid[i] >= 0.0 && grid[i] <= 1.0) || (i > 0 && grid[i] < grid[i - 1])) {
                throw DomainError("gaussian_blur: grids must be sorted within [0, 1]");
            }
        }
    }
    const std::size_t n = source_grid.size();
    const std::size_t m = obs_points.size();
    const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi * width * width);
    const double weight = 1.0 / static_cast<double>(n);
    Vector a(m * n);
    for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            const double d = obs_points[j] - source_grid[i];
            a[j * n + i] = norm * std::exp(-d * d / (2.0 * width * width)) * weight;
        }
    }
    return LinearMap(std::make_shared<detail::DenseMap>(m, n, std::move(a), LinearMap::Kind::gaussian_blur));
}

LinearMap kron2d(const LinearMap& m, KronSide side) {
    if (m.rows() != m.cols()) {
        throw SizeError("kron2d: factor must be square, got " + detail::dims(m.rows(), m.cols()));
    }
    const LinearMap id = identity(m.rows());
    return side == KronSide::left ? kron_separable(m, id) : kron_separable(id, m);
}

LinearMap kron_separable(const LinearMap& col_factor, const LinearMap& row_factor) {
    return LinearMap(std::make_shared<detail::KronMap>(col_factor, row_factor));
}

LinearMap scale_columns(const LinearMap& map, std::span<const double> d) {
    if (d.size() != map.cols()) {
        throw SizeError("scale_columns: need " + std::to_string(map.cols()) + " factors, got " +
                        std::to_string(d.size()));
    }
    detail::require_finite_positive(d, "scale_columns");
    return LinearMap(std::make_shared<detail::ColumnScaledMap>(map, Vector(d.begin(), d.end())));
}

LinearMap scale_rows(const LinearMap& map, std::span<const double> d) {
    if (d.size() != map.rows()) {
        throw SizeError("scale_rows: need " + std::to_string(map.rows()) + " factors, got " +
                        std::to_string(d.size()));
    }
    detail::require_finite_positive(d, "scale_rows");
    return LinearMap(std::make_shared<detail::RowScaledMap>(map, Vector(d.begin(), d.end())));
}

LinearMap compose(const LinearMap& a, const LinearMap& b) {
    if (a.cols() != b.rows()) {
        throw SizeError("compose: " + detail::dims(a.rows(), a.cols()) + " after " +
                        detail::dims(b.rows(), b.cols()));
    }
    if (b.kind() == LinearMap::Kind::identity) {
        return a;
    }
    if (a.kind() == LinearMap::Kind::identity) {
        return b;
    }
    if (a.kind() == LinearMap::Kind::kronecker && b.kind() == LinearMap::Kind::kronecker) {
        const auto& ka = static_cast<const detail::KronMap&>(a.impl());
        const auto& kb = static_cast<const detail::KronMap&>(b.impl());
        if (ka.col_factor().cols() == kb.col_factor().rows() && ka.row_factor().cols() == kb.row_factor().rows()) {
            return kron_separable(compose(ka.col_factor(), kb.col_factor()),
                                  compose(ka.row_factor(), kb.row_factor()));
        }
    }
    return LinearMap(std::make_shared<detail::ComposedMap>(a, b));
}

LinearMap concat_horizontal(const std::vector<LinearMap>& blocks) {
    if (blocks.empty()) {
        throw SizeError("concat_horizontal: no blocks");
    }
    const std::size_t rows = blocks.front().rows();
    std::size_t cols = 0;
    for (const auto& b : blocks) {
        if (b.rows() != rows) {
            throw SizeError("concat_horizontal: row counts differ (" + std::to_string(rows) + " vs " +
                            std::to_string(b.rows()) + ")");
        }
        cols += b.cols();
    }
    return LinearMap(std::make_shared<detail::ConcatMap>(blocks, rows, cols));
}

LinearMap concat_horizontal(const CompositeDictionary& dict) { return dict.as_map(); }

Vector midpoint_grid(std::size_t n) {
    Vector g(n);
    for (std::size_t i = 0; i < n; ++i) {
        g[i] = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    }
    return g;
}

namespace {

LinearMap build_concat(const std::vector<Subframe>& frames) {
    std::vector<LinearMap> maps;
    maps.reserve(frames.size());
    for (const auto& f : frames) {
        maps.push_back(f.map);
    }
    return concat_horizontal(maps);
}

} // namespace

CompositeDictionary::CompositeDictionary(std::vector<Subframe> subframes)
    : subframes_(std::move(subframes)), map_(build_concat(subframes_)) {
    rows_ = subframes_.front().map.rows();
    offsets_.reserve(subframes_.size() + 1);
    offsets_.push_back(0);
    for (const auto& f : subframes_) {
        offsets_.push_back(offsets_.back() + f.map.cols());
    }
}

std::vector<std::size_t> CompositeDictionary::frame_sizes() const {
    std::vector<std::size_t> sizes;
    for (const auto& f : subframes_) {
        sizes.push_back(f.map.cols());
    }
    return sizes;
}

std::size_t CompositeDictionary::frame_of(std::size_t coefficient) const {
    if (coefficient >= cols()) {
        throw SizeError("frame_of: coefficient index out of range");
    }
    const auto it = std::upper_bound(offsets_.begin(), offsets_.end(), coefficient);
    return static_cast<std::size_t>(it - offsets_.begin()) - 1;
}

std::span<const double> CompositeDictionary::slice(std::span<const double> coefficients, std::size_t frame) const {
    if (coefficients.size() != cols()) {
        throw SizeError("slice: coefficient vector has wrong length");
    }
    return coefficients.subspan(offsets_.at(frame), offsets_.at(frame + 1) - offsets_.at(frame));
}

Vector to_dense(const LinearMap& map) {
    Vector out(map.rows() * map.cols());
    Vector e(map.cols(), 0.0);
    Vector col(map.rows());
    for (std::size_t j = 0; j < map.cols(); ++j) {
        e[j] = 1.0;
        map.apply_into(e, col);
        e[j] = 0.0;
        for (std::size_t i = 0; i < map.rows(); ++i) {
            out[i * map.cols() + j] = col[i];
        }
    }
    return out;
}

} // namespace sias
