#pragma once

// Run configuration: one `key = value` per line, `#` starts a comment.
// Keys not given take the experiment's defaults, so a file holding only
// `experiment = deconv1d` describes the stock deconvolution run.

#include "sparse_ias/experiments.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace sias {

struct RunConfig {
    ExperimentSpec spec;
    int max_outer = 100;
    double theta_rtol = 1e-3;
    std::string out = ".";
    bool emit_csv = true;
    bool emit_pgm = false;
    bool emit_svg = false;
    bool exact_alpha = false;
    bool nonneg = false;
    bool local_hybrid = false;
    // restore2d
    Scene scene = Scene::full;
    // dictlearn: atom and test-digit files (empty: bundled synthetic
    // digits), activity threshold and synthetic atoms per class.
    std::string atoms;
    std::string tests;
    double tau = 0.01;
    int per_class = 20;

    static RunConfig defaults(ExperimentKind kind);
    StoppingRule stopping() const;
    IasOptions options() const;
};

// Throws ConfigError on unknown or repeated keys and malformed values.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

// Sets one key other than `experiment`, with the same parsing as files.
void apply_setting(RunConfig& config, std::string_view key, std::string_view value);

// Every key in a fixed order, numbers in shortest round-trip form.
std::string to_canonical(const RunConfig& config);

const char* scene_name(Scene scene);

} // namespace sias
