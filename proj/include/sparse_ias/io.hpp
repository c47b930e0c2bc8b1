#pragma once

// File formats: PGM images, headered atom matrices, CSV number formatting
// and atomic writes. All failures surface as IoError.

#include "sparse_ias/linops.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sias {

// Grey image, values in [0, 1], stored columnwise like every image here.
struct GrayImage {
    std::size_t rows = 0;
    std::size_t cols = 0;
    Vector values;
};

enum class PgmFormat { plain, binary }; // P2, P5

// Values are clamped to [0, 1] and quantized to 0..255.
void write_pgm(const std::filesystem::path& path, const GrayImage& image, PgmFormat format = PgmFormat::binary);
GrayImage read_pgm(const std::filesystem::path& path);

// Affine rescale of v onto [0, 1]; a constant vector maps to zeros.
Vector normalize_unit(std::span<const double> v);

// Row-major matrix with optional per-column labels.
//
// Text layout: three header lines (rows, cols, labels flag 0/1), then
// rows * cols whitespace-separated values in row-major order, then cols
// integer labels if the flag is 1. The ".bin" variant keeps the same three
// text header lines and follows them with little-endian float64 values and,
// if flagged, int32 labels.
struct MatrixFile {
    std::size_t rows = 0;
    std::size_t cols = 0;
    Vector values;
    std::vector<int> labels;
};

MatrixFile read_matrix_file(const std::filesystem::path& path);
void write_matrix_file(const std::filesystem::path& path, const MatrixFile& matrix);

// 17 significant digits in scientific notation; round-trips exactly.
std::string format_double(double v);

// Writes to a sibling temporary and renames it over `path`. The parent
// directory must exist.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

} // namespace sias
