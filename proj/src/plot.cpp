#include "sparse_ias/plot.hpp"

#include "sparse_ias/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

namespace sias {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 400.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 30.0;
constexpr double kBottom = 40.0;
constexpr int kBins = 30;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::string escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out.push_back(c);
        }
    }
    return out;
}

struct Frame {
    double x0, x1, y0, y1;

    double px(double x) const { return kLeft + (x - x0) / (x1 - x0) * (kWidth - kLeft - kRight); }
    double py(double y) const { return kHeight - kBottom - (y - y0) / (y1 - y0) * (kHeight - kTop - kBottom); }
};

void widen(double& lo, double& hi) {
    if (!(hi > lo)) {
        const double pad = lo == 0.0 ? 1.0 : 0.5 * std::abs(lo);
        lo -= pad;
        hi += pad;
    }
}

std::string axes(const Frame& f, std::string_view title, std::string_view xlabel) {
    std::string s;
    const double l = kLeft, r = kWidth - kRight, t = kTop, b = kHeight - kBottom;
    s += "<rect x=\"" + num(l) + "\" y=\"" + num(t) + "\" width=\"" + num(r - l) + "\" height=\"" + num(b - t) +
         "\" fill=\"none\" stroke=\"black\"/>\n";
    s += "<text x=\"" + num(l - 6) + "\" y=\"" + num(b) + "\" text-anchor=\"end\">" + label(f.y0) + "</text>\n";
    s += "<text x=\"" + num(l - 6) + "\" y=\"" + num(t + 10) + "\" text-anchor=\"end\">" + label(f.y1) + "</text>\n";
    s += "<text x=\"" + num(l) + "\" y=\"" + num(b + 16) + "\" text-anchor=\"middle\">" + label(f.x0) + "</text>\n";
    s += "<text x=\"" + num(r) + "\" y=\"" + num(b + 16) + "\" text-anchor=\"middle\">" + label(f.x1) + "</text>\n";
    s += "<text x=\"" + num(0.5 * (l + r)) + "\" y=\"" + num(b + 32) + "\" text-anchor=\"middle\">" +
         escape(xlabel) + "</text>\n";
    if (!title.empty()) {
        s += "<text x=\"" + num(0.5 * (l + r)) + "\" y=\"" + num(t - 10) + "\" text-anchor=\"middle\">" +
             escape(title) + "</text>\n";
    }
    return s;
}

} // namespace

const char* plot_kind_name(PlotKind kind) {
    switch (kind) {
    case PlotKind::line: return "line";
    case PlotKind::stem: return "stem";
    case PlotKind::histogram_log: return "histogram-log";
    }
    return "unknown";
}

std::string render_svg(std::span<const double> series, PlotKind kind, std::string_view title) {
    std::string body;
    Frame f{0.0, 1.0, 0.0, 1.0};
    std::string xlabel = "index";

    if (kind == PlotKind::histogram_log) {
        xlabel = "log10 |value|";
        std::vector<double> logs;
        for (double v : series) {
            if (v != 0.0 && std::isfinite(v)) {
                logs.push_back(std::log10(std::abs(v)));
            }
        }
        if (!logs.empty()) {
            double lo = *std::min_element(logs.begin(), logs.end());
            double hi = *std::max_element(logs.begin(), logs.end());
            widen(lo, hi);
            std::vector<std::size_t> counts(kBins, 0);
            for (double v : logs) {
                auto b = static_cast<int>((v - lo) / (hi - lo) * kBins);
                counts[static_cast<std::size_t>(std::clamp(b, 0, kBins - 1))]++;
            }
            const auto top = *std::max_element(counts.begin(), counts.end());
            f = {lo, hi, 0.0, static_cast<double>(top)};
            const double w = (hi - lo) / kBins;
            for (int b = 0; b < kBins; ++b) {
                const double x = lo + b * w;
                const double y = f.py(static_cast<double>(counts[static_cast<std::size_t>(b)]));
                body += "<rect x=\"" + num(f.px(x)) + "\" y=\"" + num(y) + "\" width=\"" +
                        num(f.px(x + w) - f.px(x)) + "\" height=\"" + num(f.py(0.0) - y) +
                        "\" fill=\"steelblue\" stroke=\"white\"/>\n";
            }
        }
    } else if (!series.empty()) {
        double lo = *std::min_element(series.begin(), series.end());
        double hi = *std::max_element(series.begin(), series.end());
        if (kind == PlotKind::stem) {
            lo = std::min(lo, 0.0);
            hi = std::max(hi, 0.0);
        }
        widen(lo, hi);
        double xhi = static_cast<double>(series.size() - 1);
        double xlo = 0.0;
        widen(xlo, xhi);
        if (series.size() == 1) {
            xlo = -1.0;
            xhi = 1.0;
        }
        f = {xlo, xhi, lo, hi};
        if (kind == PlotKind::line) {
            body += "<polyline fill=\"none\" stroke=\"steelblue\" points=\"";
            for (std::size_t i = 0; i < series.size(); ++i) {
                body += (i ? " " : "") + num(f.px(static_cast<double>(i))) + "," + num(f.py(series[i]));
            }
            body += "\"/>\n";
        } else {
            const double base = f.py(0.0);
            body += "<line x1=\"" + num(f.px(f.x0)) + "\" y1=\"" + num(base) + "\" x2=\"" + num(f.px(f.x1)) +
                    "\" y2=\"" + num(base) + "\" stroke=\"gray\"/>\n";
            for (std::size_t i = 0; i < series.size(); ++i) {
                const double x = f.px(static_cast<double>(i));
                const double y = f.py(series[i]);
                body += "<line x1=\"" + num(x) + "\" y1=\"" + num(base) + "\" x2=\"" + num(x) + "\" y2=\"" + num(y) +
                        "\" stroke=\"steelblue\"/><circle cx=\"" + num(x) + "\" cy=\"" + num(y) +
                        "\" r=\"2\" fill=\"steelblue\"/>\n";
            }
        }
    }

    std::string s = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
                    "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
                    num(kWidth) + "\" height=\"" + num(kHeight) + "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s += body;
    s += axes(f, title, xlabel);
    s += "</svg>\n";
    return s;
}

void emit_plot(std::span<const double> series, PlotKind kind, const std::filesystem::path& path,
               std::string_view title) {
    write_file_atomic(path, render_svg(series, kind, title));
}

} // namespace sias
