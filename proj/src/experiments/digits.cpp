#include "sparse_ias/errors.hpp"
#include "sparse_ias/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace sias {

namespace {

constexpr std::size_t kSide = 16;
constexpr int kClasses = 10;

struct Point {
    double x;
    double y;
};

using Stroke = std::vector<Point>;

double segment_distance2(Point p, Point a, Point b) {
    const double vx = b.x - a.x, vy = b.y - a.y;
    const double len2 = vx * vx + vy * vy;
    double t = len2 > 0.0 ? ((p.x - a.x) * vx + (p.y - a.y) * vy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const double dx = p.x - (a.x + t * vx), dy = p.y - (a.y + t * vy);
    return dx * dx + dy * dy;
}

// Columnwise side x side image with max 1.
Vector render(const Stroke& stroke, double width) {
    Vector img(kSide * kSide, 0.0);
    double peak = 0.0;
    for (std::size_t c = 0; c < kSide; ++c) {
        for (std::size_t r = 0; r < kSide; ++r) {
            const Point p{static_cast<double>(c), static_cast<double>(r)};
            double d2 = 1e300;
            for (std::size_t k = 0; k + 1 < stroke.size(); ++k) {
                d2 = std::min(d2, segment_distance2(p, stroke[k], stroke[k + 1]));
            }
            const double v = std::exp(-d2 / (2.0 * width * width));
            img[c * kSide + r] = v < 1e-3 ? 0.0 : v;
            peak = std::max(peak, img[c * kSide + r]);
        }
    }
    if (peak > 0.0) {
        for (double& v : img) {
            v /= peak;
        }
    }
    return img;
}

double correlation(const Vector& a, const Vector& b) {
    double ab = 0.0, aa = 0.0, bb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ab += a[i] * b[i];
        aa += a[i] * a[i];
        bb += b[i] * b[i];
    }
    return ab / std::sqrt(aa * bb);
}

// Random polylines, rejected until every pair of classes is clearly distinct.
std::vector<Stroke> prototypes(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coord(2.5, 12.5);
    std::uniform_int_distribution<int> points(4, 6);
    std::vector<Stroke> out;
    std::vector<Vector> images;
    int attempts = 0;
    while (out.size() < static_cast<std::size_t>(kClasses)) {
        Stroke s(static_cast<std::size_t>(points(rng)));
        for (Point& p : s) {
            p = {coord(rng), coord(rng)};
        }
        Vector img = render(s, 1.0);
        bool distinct = true;
        for (const Vector& other : images) {
            if (correlation(img, other) > 0.5) {
                distinct = false;
                break;
            }
        }
        if (distinct || ++attempts > 10000) {
            out.push_back(std::move(s));
            images.push_back(std::move(img));
        }
    }
    return out;
}

Vector sample(const Stroke& proto, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> shift(-0.8, 0.8);
    std::uniform_real_distribution<double> scale(0.9, 1.1);
    std::uniform_real_distribution<double> angle(-0.12, 0.12);
    std::uniform_real_distribution<double> width(0.8, 1.2);
    std::normal_distribution<double> jitter(0.0, 0.35);
    const double dx = shift(rng), dy = shift(rng), s = scale(rng), a = angle(rng), w = width(rng);
    const double cx = 7.5, cy = 7.5;
    Stroke out(proto.size());
    for (std::size_t k = 0; k < proto.size(); ++k) {
        const double x = proto[k].x - cx, y = proto[k].y - cy;
        out[k] = {cx + s * (std::cos(a) * x - std::sin(a) * y) + dx + jitter(rng),
                  cy + s * (std::sin(a) * x + std::cos(a) * y) + dy + jitter(rng)};
    }
    return render(out, w);
}

} // namespace

Vector DigitSet::atom(std::size_t k) const {
    const std::size_t n = side * side;
    Vector v(n);
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = atoms[i * count() + k];
    }
    return v;
}

DigitSet synthetic_digits(std::size_t per_class, std::uint64_t prototype_seed, std::uint64_t sample_seed) {
    const auto protos = prototypes(prototype_seed);
    std::mt19937_64 rng(sample_seed);
    const std::size_t count = per_class * kClasses;
    const std::size_t n = kSide * kSide;
    DigitSet set;
    set.side = kSide;
    set.atoms.assign(n * count, 0.0);
    set.labels.resize(count);
    // Interleave classes so any prefix is balanced.
    for (std::size_t k = 0; k < count; ++k) {
        const int label = static_cast<int>(k % kClasses);
        const Vector img = sample(protos[static_cast<std::size_t>(label)], rng);
        for (std::size_t i = 0; i < n; ++i) {
            set.atoms[i * count + k] = img[i];
        }
        set.labels[k] = label;
    }
    return set;
}

Experiment make_dictlearn(const ExperimentSpec& spec, std::span<const double> atoms, std::span<const int> labels,
                          std::span<const double> test_digit) {
    spec.validate();
    const std::size_t n = spec.n;
    const std::size_t count = labels.size();
    if (count == 0 || atoms.size() != n * count) {
        throw SizeError("dictlearn: atom matrix size does not match the label count");
    }
    if (test_digit.size() != n) {
        throw SizeError("dictlearn: test digit length does not match atom length");
    }
    for (int label : labels) {
        if (label < 0 || label >= kClasses) {
            throw DomainError("dictlearn: labels must lie in 0..9");
        }
    }
    CompositeDictionary dict({{"atoms", dense(n, count, Vector(atoms.begin(), atoms.end()))}});
    Vector clean(test_digit.begin(), test_digit.end());
    Vector observed = clean;
    const double sigma = spec.noise_frac;
    auto [wmap, wdata] = whiten(dict.as_map(), observed, sigma);
    Problem problem{wmap, std::move(wdata), dict.frame_sizes()};
    // Sensitivity is not an issue here: one uniform scale.
    Vector scale(count, 1e-5);
    const std::size_t side = static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(n))));
    return Experiment{spec,  std::move(dict), identity(n), std::move(clean), std::move(observed), sigma,
                      std::move(problem), std::move(scale), true, side, side};
}

ClassificationResult classify_majority(std::span<const double> alpha, std::span<const int> labels, double tau,
                                       double sigma) {
    if (!(tau > 0.0)) {
        throw ParameterError("classify: tau must be positive");
    }
    if (alpha.size() != labels.size()) {
        throw SizeError("classify: alpha and labels differ in length");
    }
    ClassificationResult out;
    out.sigma_used = sigma;
    for (std::size_t j = 0; j < alpha.size(); ++j) {
        if (std::abs(alpha[j]) > tau) {
            if (labels[j] < 0 || labels[j] >= kClasses) {
                throw DomainError("classify: labels must lie in 0..9");
            }
            out.active_atoms.push_back(j);
            ++out.vote_histogram[static_cast<std::size_t>(labels[j])];
        }
    }
    if (out.active_atoms.empty()) {
        throw ClassificationError("classify: no coefficient exceeds tau, no label assigned");
    }
    const auto best = std::max_element(out.vote_histogram.begin(), out.vote_histogram.end());
    out.predicted_label = static_cast<int>(best - out.vote_histogram.begin());
    out.tie = std::count(out.vote_histogram.begin(), out.vote_histogram.end(), *best) > 1;
    return out;
}

} // namespace sias
