#include "sparse_ias/io.hpp"

#include "sparse_ias/errors.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <system_error>

namespace fs = std::filesystem;

namespace sias {

namespace {

static_assert(std::endian::native == std::endian::little, "binary formats assume a little-endian host");

// Next whitespace-separated token, skipping '#' comments to end of line.
std::string pgm_token(std::istream& in) {
    std::string tok;
    char c;
    while (in.get(c)) {
        if (c == '#') {
            std::string rest;
            std::getline(in, rest);
            if (!tok.empty()) {
                break;
            }
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!tok.empty()) {
                break;
            }
            continue;
        }
        tok.push_back(c);
    }
    return tok;
}

std::size_t parse_size(const std::string& tok, const fs::path& path, const char* what) {
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
        v = std::stoull(tok, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (tok.empty() || pos != tok.size()) {
        throw IoError(path.string() + ": bad " + what + " '" + tok + "'");
    }
    return static_cast<std::size_t>(v);
}

std::string header_line(std::istream& in, const fs::path& path) {
    std::string line;
    if (!std::getline(in, line)) {
        throw IoError(path.string() + ": truncated header");
    }
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) {
        line.pop_back();
    }
    return line;
}

} // namespace

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file_atomic(const fs::path& path, std::string_view content) {
    const fs::path parent = path.has_parent_path() ? path.parent_path() : fs::path(".");
    std::error_code ec;
    if (!fs::is_directory(parent, ec)) {
        throw IoError("output directory does not exist: " + parent.string());
    }
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError("cannot write " + tmp.string());
        }
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) {
            throw IoError("write failed for " + tmp.string());
        }
    }
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoError("cannot rename onto " + path.string());
    }
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

Vector normalize_unit(std::span<const double> v) {
    Vector out(v.size(), 0.0);
    if (v.empty()) {
        return out;
    }
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    const double span = *hi - *lo;
    if (!(span > 0.0)) {
        return out;
    }
    for (std::size_t i = 0; i < v.size(); ++i) {
        out[i] = (v[i] - *lo) / span;
    }
    return out;
}

void write_pgm(const fs::path& path, const GrayImage& image, PgmFormat format) {
    if (image.values.size() != image.rows * image.cols) {
        throw SizeError("write_pgm: value count does not match rows x cols");
    }
    std::string out = (format == PgmFormat::binary ? "P5\n" : "P2\n") + std::to_string(image.cols) + " " +
                      std::to_string(image.rows) + "\n255\n";
    // PGM is row-major, the image columnwise.
    for (std::size_t r = 0; r < image.rows; ++r) {
        for (std::size_t c = 0; c < image.cols; ++c) {
            const double v = std::clamp(image.values[c * image.rows + r], 0.0, 1.0);
            const auto q = static_cast<unsigned>(std::lround(v * 255.0));
            if (format == PgmFormat::binary) {
                out.push_back(static_cast<char>(q));
            } else {
                out += std::to_string(q);
                out.push_back(c + 1 == image.cols ? '\n' : ' ');
            }
        }
    }
    write_file_atomic(path, out);
}

GrayImage read_pgm(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    const std::string magic = pgm_token(in);
    if (magic != "P2" && magic != "P5") {
        throw IoError(path.string() + ": not a PGM file");
    }
    GrayImage img;
    img.cols = parse_size(pgm_token(in), path, "width");
    img.rows = parse_size(pgm_token(in), path, "height");
    const std::size_t maxval = parse_size(pgm_token(in), path, "maxval");
    if (maxval == 0 || maxval > 65535) {
        throw IoError(path.string() + ": maxval out of range");
    }
    img.values.assign(img.rows * img.cols, 0.0);
    const double scale = 1.0 / static_cast<double>(maxval);
    for (std::size_t r = 0; r < img.rows; ++r) {
        for (std::size_t c = 0; c < img.cols; ++c) {
            std::size_t q = 0;
            if (magic == "P2") {
                q = parse_size(pgm_token(in), path, "pixel");
            } else if (maxval < 256) {
                char b;
                if (!in.get(b)) {
                    throw IoError(path.string() + ": truncated pixel data");
                }
                q = static_cast<unsigned char>(b);
            } else {
                char b[2];
                if (!in.read(b, 2)) {
                    throw IoError(path.string() + ": truncated pixel data");
                }
                q = (static_cast<std::size_t>(static_cast<unsigned char>(b[0])) << 8) |
                    static_cast<unsigned char>(b[1]);
            }
            if (q > maxval) {
                throw IoError(path.string() + ": pixel above maxval");
            }
            img.values[c * img.rows + r] = static_cast<double>(q) * scale;
        }
    }
    return img;
}

MatrixFile read_matrix_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    MatrixFile m;
    m.rows = parse_size(header_line(in, path), path, "row count");
    m.cols = parse_size(header_line(in, path), path, "column count");
    const std::string flag = header_line(in, path);
    if (flag != "0" && flag != "1") {
        throw IoError(path.string() + ": labels flag must be 0 or 1");
    }
    const bool labelled = flag == "1";
    const std::size_t count = m.rows * m.cols;
    m.values.resize(count);
    if (path.extension() == ".bin") {
        if (!in.read(reinterpret_cast<char*>(m.values.data()), static_cast<std::streamsize>(count * sizeof(double)))) {
            throw IoError(path.string() + ": truncated matrix data");
        }
        if (labelled) {
            std::vector<std::int32_t> raw(m.cols);
            if (!in.read(reinterpret_cast<char*>(raw.data()),
                         static_cast<std::streamsize>(m.cols * sizeof(std::int32_t)))) {
                throw IoError(path.string() + ": truncated labels");
            }
            m.labels.assign(raw.begin(), raw.end());
        }
    } else {
        for (double& v : m.values) {
            if (!(in >> v)) {
                throw IoError(path.string() + ": expected " + std::to_string(count) + " values");
            }
        }
        if (labelled) {
            m.labels.resize(m.cols);
            for (int& l : m.labels) {
                if (!(in >> l)) {
                    throw IoError(path.string() + ": expected " + std::to_string(m.cols) + " labels");
                }
            }
        }
        std::string extra;
        if (in >> extra) {
            throw IoError(path.string() + ": trailing data after matrix");
        }
    }
    return m;
}

void write_matrix_file(const fs::path& path, const MatrixFile& m) {
    if (m.values.size() != m.rows * m.cols || (!m.labels.empty() && m.labels.size() != m.cols)) {
        throw SizeError("write_matrix_file: sizes do not match the header");
    }
    std::string out = std::to_string(m.rows) + "\n" + std::to_string(m.cols) + "\n" +
                      (m.labels.empty() ? "0" : "1") + "\n";
    if (path.extension() == ".bin") {
        out.append(reinterpret_cast<const char*>(m.values.data()), m.values.size() * sizeof(double));
        for (int l : m.labels) {
            const auto v = static_cast<std::int32_t>(l);
            out.append(reinterpret_cast<const char*>(&v), sizeof v);
        }
    } else {
        for (std::size_t r = 0; r < m.rows; ++r) {
            for (std::size_t c = 0; c < m.cols; ++c) {
                out += format_double(m.values[r * m.cols + c]);
                out.push_back(c + 1 == m.cols ? '\n' : ' ');
            }
        }
        for (std::size_t c = 0; c < m.labels.size(); ++c) {
            out += std::to_string(m.labels[c]);
            out.push_back(c + 1 == m.labels.size() ? '\n' : ' ');
        }
    }
    write_file_atomic(path, out);
}

} // namespace sias
