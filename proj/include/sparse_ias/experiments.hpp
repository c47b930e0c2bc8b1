#pragma once

// Generative models, dictionaries, metrics and classification for the five
// bundled test problems: 1-D deconvolution, blocky-image denoising, mixed-scene
// restoration, textured-image compression and digit classification.

#include "sparse_ias/hyperprior.hpp"
#include "sparse_ias/linops.hpp"
#include "sparse_ias/solver.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sias {

enum class ExperimentKind { deconv1d, denoise2d, restore2d, natural2d, dictlearn };

const char* experiment_name(ExperimentKind kind);
std::optional<ExperimentKind> parse_experiment(std::string_view name);

struct ExperimentSpec {
    ExperimentKind kind = ExperimentKind::deconv1d;
    // Inversion grid size (1-D), image side (2-D) or atom length (dictlearn).
    std::size_t n = 500;
    // Observation count (deconv1d) or number of test digits (dictlearn).
    std::size_t m = 46;
    // Data-generation grid for deconv1d.
    std::size_t n_dense = 1253;
    // Gaussian blur width; 0 means no blur.
    double blur_width = 0.02;
    // Noise standard deviation as a fraction of the clean signal's maximum.
    // For dictlearn this is sigma itself.
    double noise_frac = 0.02;
    double r1 = 1.0;
    double eta1 = 1e-4;
    double r2 = 0.5;
    double eta2 = 1e-3;
    PhaseSwitch phase_switch = PhaseSwitch::after_fixed(10);
    std::uint64_t seed = 0;

    // Reference parameter set for each experiment.
    static ExperimentSpec defaults(ExperimentKind kind);
    void validate() const;

    double beta1() const { return (eta1 + 1.5) / r1; }
    double beta2() const { return (eta2 + 1.5) / r2; }
};

// Which features the restoration scene contains.
enum class Scene { full, stars, moon, cloud, empty };

struct Experiment {
    ExperimentSpec spec;
    CompositeDictionary dict;
    LinearMap forward; // A, before whitening
    // Clean signal on the inversion grid; images are stored columnwise.
    Vector clean;
    Vector observed; // b, before whitening
    double noise_std = 0.0;
    Problem problem; // whitened A W and b
    Vector theta_scale;
    bool nonneg = false;
    std::size_t image_rows = 0; // 1 for 1-D signals
    std::size_t image_cols = 0;
};

// Piecewise-constant profile with four jumps and f(0) = 0.
double deconv_profile(double t);

Experiment make_deconv1d(const ExperimentSpec& spec);
Experiment make_denoise2d(const ExperimentSpec& spec);
Experiment make_restore2d(const ExperimentSpec& spec, Scene scene = Scene::full);
Experiment make_natural2d(const ExperimentSpec& spec);

// Columnwise n x n images in [0, 1].
Vector blocky_image(std::size_t n);
Vector restore_scene(std::size_t n, Scene scene);
// Mixture of blocks, smooth shading and texture, quantized to 8 bits.
Vector textured_image(std::size_t n);

// 2-D increments dictionary [I (x) L, L (x) I] on n x n images.
CompositeDictionary increments_dictionary(std::size_t n);

struct DigitSet {
    std::size_t side = 16;
    // side^2 x count, row-major.
    Vector atoms;
    std::vector<int> labels;
    std::size_t count() const { return labels.size(); }
    Vector atom(std::size_t k) const;
};

// Digit-like 16 x 16 images: each class is a smooth random stroke pattern,
// each sample a jittered, re-thickened rendering of it. The prototype seed
// fixes the classes; the sample seed fixes the perturbations.
DigitSet synthetic_digits(std::size_t per_class, std::uint64_t prototype_seed, std::uint64_t sample_seed);

// Identity forward map, dense atom dictionary, whitening by sigma, uniform
// scale 1e-5, projection onto alpha >= 0.
Experiment make_dictlearn(const ExperimentSpec& spec, std::span<const double> atoms, std::span<const int> labels,
                          std::span<const double> test_digit);

struct ClassificationResult {
    int predicted_label = -1;
    std::array<std::size_t, 10> vote_histogram{};
    std::vector<std::size_t> active_atoms;
    double sigma_used = 0.0;
    bool tie = false;
};

// Majority vote over labels of atoms with |alpha_j| > tau; ties go to the
// smallest label. Throws ClassificationError when no atom is active.
ClassificationResult classify_majority(std::span<const double> alpha, std::span<const int> labels, double tau,
                                       double sigma = 0.0);

struct FrameSummary {
    std::string name;
    std::size_t support = 0;
    double min_abs = 0.0; // over the supported entries; 0 if none
    double max_abs = 0.0;
    Vector contribution; // W_i alpha_i
    double contribution_norm = 0.0;
};

// |alpha_j| > threshold counts as support.
std::vector<FrameSummary> frame_report(std::span<const double> alpha, const CompositeDictionary& dict,
                                       double threshold);

// Default report threshold: 1e-6 max |alpha|.
double default_support_threshold(std::span<const double> alpha);

// Peak signal-to-noise ratio in dB relative to `peak`.
double psnr(std::span<const double> reference, std::span<const double> estimate, double peak = 1.0);

// Smallest strictly positive |v_j|; 0 if v vanishes.
double min_nonzero_abs(std::span<const double> v);

// Runs the experiment's hybrid scheme (global unless `local`).
SolveReport run_experiment(const Experiment& ex, const StoppingRule& stop, IasOptions options = {},
                           bool local = false);

// Second-model scale used to report theta / vt2.
Vector second_scale(const Experiment& ex);

} // namespace sias
