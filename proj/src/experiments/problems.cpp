#include "sparse_ias/errors.hpp"
#include "sparse_ias/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace sias {

namespace {

double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) {
        m = std::max(m, std::abs(x));
    }
    return m;
}

// Noise-free problems still need a whitening level for the discrepancy stop.
double whitening_sigma(double noise_frac, double peak) {
    const double sigma = noise_frac * peak;
    if (sigma > 0.0) {
        return sigma;
    }
    return 1e-3 * (peak > 0.0 ? peak : 1.0);
}

void add_noise(Vector& b, double sigma, std::uint64_t seed) {
    if (sigma <= 0.0) {
        return;
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, sigma);
    for (double& v : b) {
        v += gauss(rng);
    }
}

Experiment assemble(const ExperimentSpec& spec, CompositeDictionary dict, LinearMap forward, Vector clean,
                    Vector observed, double noise_frac, double peak, std::size_t rows, std::size_t cols) {
    const double true_sigma = noise_frac * peak;
    add_noise(observed, true_sigma, spec.seed);
    const double sigma = whitening_sigma(noise_frac, peak);
    auto [wmap, wdata] = whiten(compose(forward, dict.as_map()), observed, sigma);
    Vector scale = sensitivity_weights(wmap);
    Problem problem{wmap, std::move(wdata), dict.frame_sizes()};
    return Experiment{spec,  std::move(dict),  std::move(forward), std::move(clean), std::move(observed), sigma,
                      std::move(problem), std::move(scale), false, rows, cols};
}

std::size_t at(std::size_t n, std::size_t row, std::size_t col) { return col * n + row; }

void fill_rect(Vector& img, std::size_t n, std::size_t r0, std::size_t r1, std::size_t c0, std::size_t c1,
               double value) {
    for (std::size_t c = c0; c < c1; ++c) {
        for (std::size_t r = r0; r < r1; ++r) {
            img[at(n, r, c)] = value;
        }
    }
}

} // namespace

const char* experiment_name(ExperimentKind kind) {
    switch (kind) {
    case ExperimentKind::deconv1d: return "deconv1d";
    case ExperimentKind::denoise2d: return "denoise2d";
    case ExperimentKind::restore2d: return "restore2d";
    case ExperimentKind::natural2d: return "natural2d";
    case ExperimentKind::dictlearn: return "dictlearn";
    }
    return "unknown";
}

std::optional<ExperimentKind> parse_experiment(std::string_view name) {
    for (auto k : {ExperimentKind::deconv1d, ExperimentKind::denoise2d, ExperimentKind::restore2d,
                   ExperimentKind::natural2d, ExperimentKind::dictlearn}) {
        if (name == experiment_name(k)) {
            return k;
        }
    }
    return std::nullopt;
}

ExperimentSpec ExperimentSpec::defaults(ExperimentKind kind) {
    ExperimentSpec s;
    s.kind = kind;
    switch (kind) {
    case ExperimentKind::deconv1d:
        break;
    case ExperimentKind::denoise2d:
        s.n = 200;
        s.m = 0;
        s.n_dense = 0;
        s.blur_width = 0.0;
        s.noise_frac = 0.1;
        s.eta1 = 1e-3;
        s.eta2 = 1e-2;
        break;
    case ExperimentKind::restore2d:
        s.n = 100;
        s.m = 0;
        s.n_dense = 0;
        s.blur_width = 0.006;
        s.noise_frac = 0.01;
        s.eta2 = 1e-4;
        break;
    case ExperimentKind::natural2d:
        s.n = 128;
        s.m = 0;
        s.n_dense = 0;
        s.blur_width = 0.0;
        s.noise_frac = 0.05;
        break;
    case ExperimentKind::dictlearn:
        s.n = 256;
        s.m = 50;
        s.n_dense = 0;
        s.blur_width = 0.0;
        s.noise_frac = 0.01;
        s.r2 = -1.0;
        s.eta2 = -2.5;
        s.phase_switch = PhaseSwitch::whichever_first(80, 1e-3);
        break;
    }
    return s;
}

void ExperimentSpec::validate() const {
    if (n == 0) {
        throw ConfigError(std::string(experiment_name(kind)) + ": n must be positive");
    }
    if (!(noise_frac >= 0.0 && noise_frac < 1.0)) {
        throw ConfigError(std::string(experiment_name(kind)) + ": noise fraction must lie in [0, 1)");
    }
    if (!(blur_width >= 0.0) || !std::isfinite(blur_width)) {
        throw ConfigError(std::string(experiment_name(kind)) + ": blur width must be nonnegative");
    }
    if (kind == ExperimentKind::deconv1d) {
        if (!(n_dense > n && n > m && m > 0)) {
            throw ConfigError("deconv1d: need n_dense > n > m > 0");
        }
        if (!(blur_width > 0.0)) {
            throw ConfigError("deconv1d: blur width must be positive");
        }
    }
    if (kind == ExperimentKind::dictlearn && n != 256) {
        throw ConfigError("dictlearn: atoms are 16 x 16, so n must be 256");
    }
    if (kind == ExperimentKind::dictlearn && !(noise_frac > 0.0)) {
        throw ConfigError("dictlearn: sigma must be positive");
    }
    if (phase_switch.after < 0) {
        throw ConfigError("phase switch iteration must be nonnegative");
    }
    // Hyperparameter admissibility is checked by the solver (exit code 2 path).
}

double deconv_profile(double t) {
    if (t < 0.2) {
        return 0.0;
    }
    if (t < 0.45) {
        return 1.0;
    }
    if (t < 0.65) {
        return 0.5;
    }
    if (t < 0.85) {
        return 1.5;
    }
    return 0.0;
}

Experiment make_deconv1d(const ExperimentSpec& spec) {
    spec.validate();
    const Vector dense_grid = midpoint_grid(spec.n_dense);
    const Vector grid = midpoint_grid(spec.n);
    Vector obs(spec.m);
    for (std::size_t j = 0; j < spec.m; ++j) {
        obs[j] = static_cast<double>(j + 1) / static_cast<double>(spec.m + 1);
    }

    Vector dense_signal(spec.n_dense);
    for (std::size_t i = 0; i < spec.n_dense; ++i) {
        dense_signal[i] = deconv_profile(dense_grid[i]);
    }
    // Data from the fine grid, inversion on the coarse one.
    Vector observed = gaussian_blur(spec.blur_width, dense_grid, obs).apply(dense_signal);

    Vector clean(spec.n);
    for (std::size_t i = 0; i < spec.n; ++i) {
        clean[i] = deconv_profile(grid[i]);
    }
    CompositeDictionary dict({{"increments", cumsum(spec.n)}, {"cosine", dct_synthesis(spec.n)}});
    LinearMap forward = gaussian_blur(spec.blur_width, grid, obs);
    // The noise level refers to the generative signal's maximum.
    const double peak = *std::max_element(dense_signal.begin(), dense_signal.end());
    return assemble(spec, std::move(dict), std::move(forward), std::move(clean), std::move(observed),
                    spec.noise_frac, peak, spec.n, 1);
}

CompositeDictionary increments_dictionary(std::size_t n) {
    return CompositeDictionary({{"vertical", kron2d(cumsum(n), KronSide::left)},
                                {"horizontal", kron2d(cumsum(n), KronSide::right)}});
}

Vector blocky_image(std::size_t n) {
    // Tall off-centre rectangle: its horizontal edges are shorter than its
    // vertical ones, so vertical increments give the sparser representation.
    Vector img(n * n, 0.0);
    fill_rect(img, n, n / 5, n - n / 5, n / 4, n / 2, 1.0);
    return img;
}

Experiment make_denoise2d(const ExperimentSpec& spec) {
    spec.validate();
    const std::size_t n = spec.n;
    Vector clean = blocky_image(n);
    Vector observed = clean;
    const double peak = max_abs(clean);
    return assemble(spec, increments_dictionary(n), identity(n * n), std::move(clean), std::move(observed),
                    spec.noise_frac, peak, n, n);
}

Vector restore_scene(std::size_t n, Scene scene) {
    Vector img(n * n, 0.0);
    if (scene == Scene::empty) {
        return img;
    }
    if (scene == Scene::full || scene == Scene::cloud) {
        // Smooth sky from a handful of low-frequency cosine atoms.
        const double nn = static_cast<double>(n);
        Vector coeffs(n * n, 0.0);
        const double weight = scene == Scene::full ? 0.5 : 1.0;
        coeffs[at(n, 0, 0)] = weight * 0.35 * nn;
        if (n > 1) {
            coeffs[at(n, 1, 0)] = weight * 0.08 * nn;
            coeffs[at(n, 0, 1)] = -weight * 0.06 * nn;
            coeffs[at(n, 1, 1)] = weight * 0.04 * nn;
        }
        if (n > 2) {
            coeffs[at(n, 2, 0)] = -weight * 0.03 * nn;
        }
        const LinearMap synth = kron_separable(dct_synthesis(n), dct_synthesis(n));
        img = synth.apply(coeffs);
    }
    if (scene == Scene::full || scene == Scene::moon) {
        // Staircase crescent built from rectangles.
        const double v = 0.5;
        const std::size_t r0 = n / 8, c0 = (5 * n) / 8, s = std::max<std::size_t>(n / 4, 4);
        for (std::size_t k = 0; k < 4; ++k) {
            const std::size_t rows0 = r0 + k * s / 8;
            const std::size_t rows1 = r0 + s - k * s / 8;
            const std::size_t cols0 = c0 + k * s / 4;
            const std::size_t cols1 = std::min(n, c0 + (k + 1) * s / 4);
            for (std::size_t c = cols0; c < cols1; ++c) {
                for (std::size_t r = rows0; r < rows1 && r < n; ++r) {
                    img[at(n, r, c)] += v;
                }
            }
        }
    }
    if (scene == Scene::full || scene == Scene::stars) {
        // Fixed positions, independent of the noise seed.
        std::mt19937_64 rng(20240601);
        std::uniform_int_distribution<std::size_t> pos(0, n - 1);
        const std::size_t count = std::max<std::size_t>(n / 10, 1);
        for (std::size_t k = 0; k < count; ++k) {
            const std::size_t r = pos(rng) / 2 + n / 2; // lower half, away from the moon
            const std::size_t c = pos(rng);
            img[at(n, std::min(r, n - 1), c)] = (scene == Scene::full ? 0.35 : 0.0) + 0.6;
        }
    }
    return img;
}

Experiment make_restore2d(const ExperimentSpec& spec, Scene scene) {
    spec.validate();
    const std::size_t n = spec.n;
    const Vector grid = midpoint_grid(n);
    LinearMap forward = identity(n * n);
    if (spec.blur_width > 0.0) {
        const LinearMap blur = gaussian_blur(spec.blur_width, grid, grid);
        forward = kron_separable(blur, blur);
    }
    CompositeDictionary dict({{"pixels", identity(n * n)},
                              {"vertical", kron2d(cumsum(n), KronSide::left)},
                              {"horizontal", kron2d(cumsum(n), KronSide::right)},
                              {"cosine", kron_separable(dct_synthesis(n), dct_synthesis(n))}});
    Vector clean = restore_scene(n, scene);
    Vector observed = forward.apply(clean);
    const double peak = max_abs(clean);
    return assemble(spec, std::move(dict), std::move(forward), std::move(clean), std::move(observed),
                    spec.noise_frac, peak, n, n);
}

Vector textured_image(std::size_t n) {
    const double nn = static_cast<double>(n);
    Vector img(n * n);
    std::mt19937_64 rng(7771);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    // Low-amplitude grain, smoothed once so neighbouring pixels correlate.
    Vector grain(n * n);
    for (double& g : grain) {
        g = unit(rng) - 0.5;
    }
    Vector smooth(n * n, 0.0);
    for (std::size_t c = 0; c < n; ++c) {
        for (std::size_t r = 0; r < n; ++r) {
            double acc = 0.0;
            int cnt = 0;
            for (int dc = -1; dc <= 1; ++dc) {
                for (int dr = -1; dr <= 1; ++dr) {
                    const auto rr = static_cast<std::ptrdiff_t>(r) + dr;
                    const auto cc = static_cast<std::ptrdiff_t>(c) + dc;
                    if (rr >= 0 && cc >= 0 && rr < static_cast<std::ptrdiff_t>(n) &&
                        cc < static_cast<std::ptrdiff_t>(n)) {
                        acc += grain[at(n, static_cast<std::size_t>(rr), static_cast<std::size_t>(cc))];
                        ++cnt;
                    }
                }
            }
            smooth[at(n, r, c)] = acc / cnt;
        }
    }
    for (std::size_t c = 0; c < n; ++c) {
        for (std::size_t r = 0; r < n; ++r) {
            const double y = (static_cast<double>(r) + 0.5) / nn;
            const double x = (static_cast<double>(c) + 0.5) / nn;
            double v = 0.25 + 0.2 * x + 0.1 * y;                       // shading
            if (x > 0.1 && x < 0.45 && y > 0.15 && y < 0.6) {          // block
                v = 0.8;
            }
            if (x > 0.55 && x < 0.9 && y > 0.55 && y < 0.85) {         // darker block
                v = 0.1;
            }
            if ((x - 0.7) * (x - 0.7) + (y - 0.25) * (y - 0.25) < 0.02) { // disc
                v = 0.6 + 0.15 * std::sin(40.0 * x);                    // striped texture
            }
            v += 0.12 * smooth[at(n, r, c)];
            v = std::clamp(v, 0.0, 1.0);
            img[at(n, r, c)] = std::round(v * 255.0) / 255.0;
        }
    }
    return img;
}

Experiment make_natural2d(const ExperimentSpec& spec) {
    spec.validate();
    const std::size_t n = spec.n;
    Vector clean = textured_image(n);
    Vector observed = clean;
    const double peak = max_abs(clean);
    return assemble(spec, increments_dictionary(n), identity(n * n), std::move(clean), std::move(observed),
                    spec.noise_frac, peak, n, n);
}

} // namespace sias
