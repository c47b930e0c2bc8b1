#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>

namespace sias {

enum class PlotKind { line, stem, histogram_log };

const char* plot_kind_name(PlotKind kind);

// Self-contained SVG 1.1 document. Series values are plotted against their
// index; histogram_log bins log10 |v| over the nonzero entries. Identical
// input gives identical bytes.
std::string render_svg(std::span<const double> series, PlotKind kind, std::string_view title = {});

void emit_plot(std::span<const double> series, PlotKind kind, const std::filesystem::path& path,
               std::string_view title = {});

} // namespace sias
