// sparse-ias: run the bundled experiments or a config file and write
// CSV / PGM / SVG artifacts plus a manifest.
//
// Exit codes: 0 ok, 1 configuration error, 2 solver parameter error,
// 3 I/O error, 4 anything else.

#include "sparse_ias/config.hpp"
#include "sparse_ias/errors.hpp"
#include "sparse_ias/experiments.hpp"
#include "sparse_ias/io.hpp"
#include "sparse_ias/parallel.hpp"
#include "sparse_ias/plot.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace sias;

namespace {

constexpr std::uint64_t kPrototypeSeed = 11;
constexpr std::uint64_t kAtomSeed = 12;
constexpr std::uint64_t kTestSeedBase = 1000;

struct Artifacts {
    fs::path dir;
    const RunConfig& cfg;

    void text(const std::string& name, const std::string& content) const {
        write_file_atomic(dir / name, content);
    }
};

std::string alpha_csv(const IasState& state, const CompositeDictionary& dict, std::span<const double> vt2) {
    std::string s = "frame,index,value,theta,theta_scaled\n";
    for (std::size_t f = 0; f < dict.frame_count(); ++f) {
        const std::size_t off = dict.offsets()[f];
        for (std::size_t i = 0; i < dict.frame(f).map.cols(); ++i) {
            const std::size_t j = off + i;
            s += dict.frame(f).name + "," + std::to_string(i) + "," + format_double(state.alpha[j]) + "," +
                 format_double(state.theta[j]) + "," + format_double(state.theta[j] / vt2[j]) + "\n";
        }
    }
    return s;
}

std::string trace_csv(const SolveReport& rep) {
    std::string s = "iteration,objective,cgls_count,residual\n";
    for (std::size_t k = 0; k < rep.objective_trace.size(); ++k) {
        s += std::to_string(k + 1) + "," + format_double(rep.objective_trace[k]) + "," +
             std::to_string(rep.cgls_counts[k]) + "," + format_double(rep.data_residual[k]) + "\n";
    }
    return s;
}

std::string series_csv(std::span<const double> v) {
    std::string s = "index,value\n";
    for (std::size_t i = 0; i < v.size(); ++i) {
        s += std::to_string(i) + "," + format_double(v[i]) + "\n";
    }
    return s;
}

std::string run_summary(const SolveReport& rep, const std::vector<FrameSummary>& frames) {
    std::ostringstream o;
    o << "# outer_iterations = " << rep.objective_trace.size() << "\n"
      << "# switch_iteration = " << rep.switch_iteration << "\n"
      << "# final_objective = " << format_double(rep.objective_trace.empty() ? 0.0 : rep.objective_trace.back())
      << "\n"
      << "# final_residual = " << format_double(rep.data_residual.empty() ? 0.0 : rep.data_residual.back()) << "\n";
    for (const auto& f : frames) {
        o << "# frame " << f.name << ": support = " << f.support << ", max_abs = " << format_double(f.max_abs)
          << ", contribution_norm = " << format_double(f.contribution_norm) << "\n";
    }
    return o.str();
}

void log_iterations(IasOptions& opt, bool verbose) {
    if (!verbose) {
        return;
    }
    opt.on_iteration = [](const IterationLog& l) {
        std::fprintf(stderr, "iter %3d  F = %.6e  cgls = %3d  residual = %.4e  dtheta = %.3e  switched = %zu\n",
                     l.iteration, l.objective, l.cgls_count, l.residual, l.theta_change, l.second_phase_count);
    };
}

Experiment build(const RunConfig& cfg) {
    switch (cfg.spec.kind) {
    case ExperimentKind::deconv1d: return make_deconv1d(cfg.spec);
    case ExperimentKind::denoise2d: return make_denoise2d(cfg.spec);
    case ExperimentKind::restore2d: return make_restore2d(cfg.spec, cfg.scene);
    case ExperimentKind::natural2d: return make_natural2d(cfg.spec);
    case ExperimentKind::dictlearn: break;
    }
    throw ConfigError("dictlearn is not a single-problem experiment");
}

void run_signal(const RunConfig& cfg, const Artifacts& out, bool verbose) {
    const Experiment ex = build(cfg);
    IasOptions opt = cfg.options();
    log_iterations(opt, verbose);
    const SolveReport rep = run_experiment(ex, cfg.stopping(), opt, cfg.local_hybrid);
    const auto& alpha = rep.final_state.alpha;
    const auto frames = frame_report(alpha, ex.dict, default_support_threshold(alpha));
    const Vector vt2 = second_scale(ex);
    const Vector recon = ex.dict.as_map().apply(alpha);
    const bool image = ex.image_cols > 1;

    if (cfg.emit_csv) {
        out.text("alpha.csv", alpha_csv(rep.final_state, ex.dict, vt2));
        out.text("trace.csv", trace_csv(rep));
        out.text("reconstruction.csv", series_csv(recon));
        for (const auto& f : frames) {
            out.text("contribution_" + f.name + ".csv", series_csv(f.contribution));
        }
    }
    if (cfg.emit_pgm && image) {
        const auto pgm = [&](const std::string& name, Vector v) {
            write_pgm(out.dir / name, GrayImage{ex.image_rows, ex.image_cols, std::move(v)});
        };
        pgm("clean.pgm", ex.clean);
        if (ex.observed.size() == ex.clean.size()) {
            pgm("observed.pgm", ex.observed);
        }
        pgm("reconstruction.pgm", recon);
        for (const auto& f : frames) {
            pgm("contribution_" + f.name + ".pgm", normalize_unit(f.contribution));
        }
    }
    if (cfg.emit_svg) {
        emit_plot(rep.cgls_counts.empty() ? Vector{} : Vector(rep.cgls_counts.begin(), rep.cgls_counts.end()),
                  PlotKind::line, out.dir / "cgls_counts.svg", "CGLS steps per outer iteration");
        for (std::size_t f = 0; f < frames.size(); ++f) {
            const auto part = ex.dict.slice(alpha, f);
            const std::string& name = frames[f].name;
            if (image) {
                emit_plot(part, PlotKind::histogram_log, out.dir / ("hist_" + name + ".svg"), name + " coefficients");
            } else {
                emit_plot(part, PlotKind::stem, out.dir / ("alpha_" + name + ".svg"), name + " coefficients");
                emit_plot(frames[f].contribution, PlotKind::line, out.dir / ("contribution_" + name + ".svg"),
                          name + " contribution");
            }
        }
        if (!image) {
            emit_plot(recon, PlotKind::line, out.dir / "reconstruction.svg", "reconstruction");
        }
    }
    std::string manifest = to_canonical(cfg);
    manifest += "# noise_std = " + format_double(ex.noise_std) + "\n";
    manifest += run_summary(rep, frames);
    out.text("manifest.txt", manifest);

    std::printf("%s: %zu outer iterations, final residual %.4g (sqrt(m) = %.4g)\n", experiment_name(cfg.spec.kind),
                rep.objective_trace.size(), rep.data_residual.back(),
                std::sqrt(static_cast<double>(ex.problem.data.size())));
    for (const auto& f : frames) {
        std::printf("  %-12s support %7zu  max|alpha| %.3e  ||W alpha|| %.3e\n", f.name.c_str(), f.support, f.max_abs,
                    f.contribution_norm);
    }
}

DigitSet load_digits(const std::string& path) {
    const MatrixFile m = read_matrix_file(path);
    if (m.rows != 256) {
        throw ConfigError(path + ": atoms must have 256 rows (16 x 16 images)");
    }
    if (m.labels.size() != m.cols) {
        throw ConfigError(path + ": atom file needs a label per column");
    }
    DigitSet d;
    d.side = 16;
    d.atoms = m.values;
    d.labels = m.labels;
    return d;
}

void run_dictlearn(const RunConfig& cfg, const Artifacts& out, bool verbose) {
    const auto per_class = static_cast<std::size_t>(cfg.per_class);
    const DigitSet atoms = cfg.atoms.empty() ? synthetic_digits(per_class, kPrototypeSeed, kAtomSeed)
                                             : load_digits(cfg.atoms);
    DigitSet tests;
    if (!cfg.tests.empty()) {
        tests = load_digits(cfg.tests);
    } else if (cfg.atoms.empty()) {
        tests = synthetic_digits((cfg.spec.m + 9) / 10, kPrototypeSeed, kTestSeedBase + cfg.spec.seed);
    } else {
        throw ConfigError("dictlearn: an atom file needs a matching test-digit file (key 'tests')");
    }
    const std::size_t count = std::min(cfg.spec.m, tests.count());
    if (count == 0) {
        throw ConfigError("dictlearn: no test digits (m = 0)");
    }

    std::string cls = "digit,true_label,predicted,active,tie";
    for (int b = 0; b < 10; ++b) {
        cls += ",votes_" + std::to_string(b);
    }
    cls += "\n";
    std::string summary;
    std::size_t correct = 0, active_total = 0;
    for (std::size_t k = 0; k < count; ++k) {
        const Vector digit = tests.atom(k);
        const Experiment ex = make_dictlearn(cfg.spec, atoms.atoms, atoms.labels, digit);
        IasOptions opt = cfg.options();
        log_iterations(opt, verbose);
        const SolveReport rep = run_experiment(ex, cfg.stopping(), opt, cfg.local_hybrid);
        const auto& alpha = rep.final_state.alpha;
        std::optional<ClassificationResult> c;
        try {
            c = classify_majority(alpha, atoms.labels, cfg.tau, cfg.spec.noise_frac);
        } catch (const ClassificationError&) {
        }
        const int predicted = c ? c->predicted_label : -1;
        correct += predicted == tests.labels[k] ? 1 : 0;
        active_total += c ? c->active_atoms.size() : 0;
        cls += std::to_string(k) + "," + std::to_string(tests.labels[k]) + "," + std::to_string(predicted) + "," +
               std::to_string(c ? c->active_atoms.size() : 0) + "," + (c && c->tie ? "1" : "0");
        for (int b = 0; b < 10; ++b) {
            cls += "," + std::to_string(c ? c->vote_histogram[static_cast<std::size_t>(b)] : 0);
        }
        cls += "\n";
        if (k == 0) {
            if (cfg.emit_csv) {
                out.text("alpha.csv", alpha_csv(rep.final_state, ex.dict, second_scale(ex)));
                out.text("trace.csv", trace_csv(rep));
            }
            if (cfg.emit_svg) {
                emit_plot(alpha, PlotKind::stem, out.dir / "alpha_atoms.svg", "atom coefficients, digit 0");
            }
            summary = run_summary(rep, frame_report(alpha, ex.dict, default_support_threshold(alpha)));
        }
        if (cfg.emit_pgm) {
            write_pgm(out.dir / ("digit_" + std::to_string(k) + ".pgm"), GrayImage{16, 16, digit});
            write_pgm(out.dir / ("synthesis_" + std::to_string(k) + ".pgm"),
                      GrayImage{16, 16, ex.dict.as_map().apply(alpha)});
        }
    }
    if (cfg.emit_csv) {
        out.text("classification.csv", cls);
    }
    const double accuracy = static_cast<double>(correct) / static_cast<double>(count);
    const double mean_active = static_cast<double>(active_total) / static_cast<double>(count);
    std::string manifest = to_canonical(cfg);
    manifest += "# atoms_used = " + std::to_string(atoms.count()) + "\n";
    manifest += "# test_digits = " + std::to_string(count) + "\n";
    manifest += "# accuracy = " + format_double(accuracy) + "\n";
    manifest += "# mean_active_atoms = " + format_double(mean_active) + "\n";
    manifest += "# first digit run:\n" + summary;
    out.text("manifest.txt", manifest);
    std::printf("dictlearn: %zu digits, sigma %.3g, accuracy %.3f, mean active atoms %.2f\n", count,
                cfg.spec.noise_frac, accuracy, mean_active);
}

void execute(const RunConfig& cfg, bool verbose) {
    const fs::path dir(cfg.out);
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) {
        throw IoError("output directory does not exist: " + cfg.out);
    }
    const Artifacts out{dir, cfg};
    if (cfg.spec.kind == ExperimentKind::dictlearn) {
        run_dictlearn(cfg, out, verbose);
    } else {
        run_signal(cfg, out, verbose);
    }
}

// Flag name -> config key; every value goes through the config parser.
const std::vector<std::pair<std::string, std::string>> kValueFlags = {
    {"--n", "n"},
    {"--m", "m"},
    {"--n-dense", "n_dense"},
    {"--w", "w"},
    {"--sigma-frac", "sigma_frac"},
    {"--r1", "r1"},
    {"--eta1", "eta1"},
    {"--r2", "r2"},
    {"--eta2", "eta2"},
    {"--switch-rule", "switch_rule"},
    {"--switch-after", "switch_after"},
    {"--switch-rtol", "switch_rtol"},
    {"--theta-rtol", "theta_rtol"},
    {"--max-outer", "max_outer"},
    {"--seed", "seed"},
    {"--out", "out"},
    {"--emit", "emit"},
    {"--scene", "scene"},
    {"--atoms", "atoms"},
    {"--tests", "tests"},
    {"--tau", "tau"},
    {"--per-class", "per_class"},
};
const std::vector<std::pair<std::string, std::string>> kBoolFlags = {
    {"--exact-alpha", "exact_alpha"},
    {"--nonneg", "nonneg"},
    {"--local-hybrid", "local_hybrid"},
};

struct Command {
    CLI::App* app = nullptr;
    std::optional<ExperimentKind> kind; // empty for `solve`
    std::map<std::string, std::string> values;
    std::map<std::string, bool> flags;
    std::string config_path;
};

int fail(int code, const std::string& msg) {
    std::fprintf(stderr, "sparse-ias: %s\n", msg.c_str());
    return code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hybrid IAS sparse recovery in composite frames"};
    app.require_subcommand(1);
    bool verbose = false;
    int threads = 0;
    app.add_flag("-v,--verbose", verbose, "Log one line per outer iteration to stderr");
    app.add_option("--threads", threads, "Cap on operator threads (default: SPARSE_IAS_THREADS or OpenMP default)");

    std::vector<Command> commands;
    commands.reserve(6);
    const auto add_common = [](Command& c) {
        for (const auto& [flag, key] : kValueFlags) {
            c.app->add_option(flag, c.values[key], "Config key '" + key + "'");
        }
        for (const auto& [flag, key] : kBoolFlags) {
            c.app->add_flag(flag, c.flags[key], "Config key '" + key + "' = true");
        }
    };
    for (auto kind : {ExperimentKind::deconv1d, ExperimentKind::denoise2d, ExperimentKind::restore2d,
                      ExperimentKind::natural2d, ExperimentKind::dictlearn}) {
        Command& c = commands.emplace_back();
        c.kind = kind;
        c.app = app.add_subcommand(experiment_name(kind), std::string("Run the ") + experiment_name(kind) +
                                                              " experiment with its default parameters");
        add_common(c);
    }
    Command& solve = commands.emplace_back();
    solve.app = app.add_subcommand("solve", "Run the experiment described by a key = value config file");
    solve.app->add_option("config", solve.config_path, "Config file")->required();
    add_common(solve);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }
    if (threads > 0) {
        set_thread_limit(threads);
    }

    try {
        for (Command& c : commands) {
            if (!c.app->parsed()) {
                continue;
            }
            RunConfig cfg = c.kind ? RunConfig::defaults(*c.kind) : load_config(c.config_path);
            for (const auto& [flag, key] : kValueFlags) {
                if (c.app->count(flag) > 0) {
                    apply_setting(cfg, key, c.values[key]);
                }
            }
            for (const auto& [flag, key] : kBoolFlags) {
                if (c.flags[key]) {
                    apply_setting(cfg, key, "true");
                }
            }
            cfg.spec.validate();
            execute(cfg, verbose);
        }
    } catch (const ConfigError& e) {
        return fail(1, e.what());
    } catch (const ParameterError& e) {
        return fail(2, e.what());
    } catch (const DegenerateColumnError& e) {
        return fail(2, e.what());
    } catch (const IoError& e) {
        return fail(3, e.what());
    } catch (const std::exception& e) {
        return fail(4, e.what());
    }
    return 0;
}
