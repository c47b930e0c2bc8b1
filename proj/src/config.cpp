#include "sparse_ias/config.hpp"

#include "sparse_ias/errors.hpp"
#include "sparse_ias/io.hpp"

#include <charconv>
#include <map>
#include <sstream>
#include <vector>

namespace sias {

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string shortest(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double to_double(std::string_view key, std::string_view v) {
    double out = 0.0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc{} || res.ptr != v.data() + v.size()) {
        throw ConfigError("config: '" + std::string(key) + "' expects a number, got '" + std::string(v) + "'");
    }
    return out;
}

long long to_int(std::string_view key, std::string_view v, long long lo) {
    long long out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc{} || res.ptr != v.data() + v.size() || out < lo) {
        throw ConfigError("config: '" + std::string(key) + "' expects an integer >= " + std::to_string(lo) +
                          ", got '" + std::string(v) + "'");
    }
    return out;
}

bool to_bool(std::string_view key, std::string_view v) {
    if (v == "true") {
        return true;
    }
    if (v == "false") {
        return false;
    }
    throw ConfigError("config: '" + std::string(key) + "' expects true or false");
}

Scene to_scene(std::string_view v) {
    for (Scene s : {Scene::full, Scene::stars, Scene::moon, Scene::cloud, Scene::empty}) {
        if (v == scene_name(s)) {
            return s;
        }
    }
    throw ConfigError("config: unknown scene '" + std::string(v) + "'");
}

const char* switch_rule_name(PhaseSwitch::Kind k) {
    switch (k) {
    case PhaseSwitch::Kind::after_fixed: return "after";
    case PhaseSwitch::Kind::on_theta_rtol: return "rtol";
    case PhaseSwitch::Kind::whichever_first: return "first";
    }
    return "after";
}

PhaseSwitch::Kind to_switch_rule(std::string_view v) {
    for (auto k : {PhaseSwitch::Kind::after_fixed, PhaseSwitch::Kind::on_theta_rtol,
                   PhaseSwitch::Kind::whichever_first}) {
        if (v == switch_rule_name(k)) {
            return k;
        }
    }
    throw ConfigError("config: switch_rule must be after, rtol or first");
}

void set_emit(RunConfig& c, std::string_view v) {
    c.emit_csv = c.emit_pgm = c.emit_svg = false;
    if (v == "none") {
        return;
    }
    std::size_t pos = 0;
    while (pos <= v.size()) {
        const auto comma = v.find(',', pos);
        const auto item = trim(v.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
        if (item == "csv") {
            c.emit_csv = true;
        } else if (item == "pgm") {
            c.emit_pgm = true;
        } else if (item == "svg") {
            c.emit_svg = true;
        } else {
            throw ConfigError("config: emit items are csv, pgm, svg (or none), got '" + std::string(item) + "'");
        }
        if (comma == std::string_view::npos) {
            break;
        }
        pos = comma + 1;
    }
}

std::string emit_string(const RunConfig& c) {
    std::vector<std::string> items;
    if (c.emit_csv) {
        items.emplace_back("csv");
    }
    if (c.emit_pgm) {
        items.emplace_back("pgm");
    }
    if (c.emit_svg) {
        items.emplace_back("svg");
    }
    if (items.empty()) {
        return "none";
    }
    std::string s = items[0];
    for (std::size_t i = 1; i < items.size(); ++i) {
        s += "," + items[i];
    }
    return s;
}

} // namespace

void apply_setting(RunConfig& c, std::string_view key, std::string_view v) {
    auto& s = c.spec;
    if (key == "n") {
        s.n = static_cast<std::size_t>(to_int(key, v, 1));
    } else if (key == "m") {
        s.m = static_cast<std::size_t>(to_int(key, v, 0));
    } else if (key == "n_dense") {
        s.n_dense = static_cast<std::size_t>(to_int(key, v, 0));
    } else if (key == "w") {
        s.blur_width = to_double(key, v);
    } else if (key == "sigma_frac") {
        s.noise_frac = to_double(key, v);
    } else if (key == "r1") {
        s.r1 = to_double(key, v);
    } else if (key == "eta1") {
        s.eta1 = to_double(key, v);
    } else if (key == "r2") {
        s.r2 = to_double(key, v);
    } else if (key == "eta2") {
        s.eta2 = to_double(key, v);
    } else if (key == "switch_rule") {
        s.phase_switch.kind = to_switch_rule(v);
    } else if (key == "switch_after") {
        s.phase_switch.after = static_cast<int>(to_int(key, v, 0));
    } else if (key == "switch_rtol") {
        s.phase_switch.tol = to_double(key, v);
    } else if (key == "seed") {
        s.seed = static_cast<std::uint64_t>(to_int(key, v, 0));
    } else if (key == "theta_rtol") {
        c.theta_rtol = to_double(key, v);
    } else if (key == "max_outer") {
        c.max_outer = static_cast<int>(to_int(key, v, 1));
    } else if (key == "out") {
        c.out = std::string(v);
    } else if (key == "emit") {
        set_emit(c, v);
    } else if (key == "exact_alpha") {
        c.exact_alpha = to_bool(key, v);
    } else if (key == "nonneg") {
        c.nonneg = to_bool(key, v);
    } else if (key == "local_hybrid") {
        c.local_hybrid = to_bool(key, v);
    } else if (key == "scene") {
        c.scene = to_scene(v);
    } else if (key == "atoms") {
        c.atoms = std::string(v);
    } else if (key == "tests") {
        c.tests = std::string(v);
    } else if (key == "tau") {
        c.tau = to_double(key, v);
    } else if (key == "per_class") {
        c.per_class = static_cast<int>(to_int(key, v, 1));
    } else {
        throw ConfigError("config: unknown key '" + std::string(key) + "'");
    }
}

const char* scene_name(Scene scene) {
    switch (scene) {
    case Scene::full: return "full";
    case Scene::stars: return "stars";
    case Scene::moon: return "moon";
    case Scene::cloud: return "cloud";
    case Scene::empty: return "empty";
    }
    return "full";
}

RunConfig RunConfig::defaults(ExperimentKind kind) {
    RunConfig c;
    c.spec = ExperimentSpec::defaults(kind);
    return c;
}

StoppingRule RunConfig::stopping() const {
    StoppingRule s;
    s.max_outer = max_outer;
    s.theta_rtol = theta_rtol;
    s.phase_switch = spec.phase_switch;
    return s;
}

IasOptions RunConfig::options() const {
    IasOptions o;
    o.exact_alpha = exact_alpha;
    o.nonneg_projection = nonneg;
    return o;
}

RunConfig parse_config(std::string_view text) {
    std::vector<std::pair<std::string, std::string>> entries;
    std::map<std::string, int> seen;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
        }
        std::string key(trim(line.substr(0, eq)));
        std::string value(trim(line.substr(eq + 1)));
        if (key.empty()) {
            throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
        }
        if (seen[key]++ > 0) {
            throw ConfigError("config: key '" + key + "' given twice");
        }
        entries.emplace_back(std::move(key), std::move(value));
    }
    std::optional<ExperimentKind> kind;
    for (const auto& [k, v] : entries) {
        if (k == "experiment") {
            kind = parse_experiment(v);
            if (!kind) {
                throw ConfigError("config: unknown experiment '" + v + "'");
            }
        }
    }
    if (!kind) {
        throw ConfigError("config: missing 'experiment' key");
    }
    RunConfig c = RunConfig::defaults(*kind);
    for (const auto& [k, v] : entries) {
        if (k != "experiment") {
            apply_setting(c, k, v);
        }
    }
    c.spec.validate();
    return c;
}

RunConfig load_config(const std::filesystem::path& path) { return parse_config(read_file(path)); }

std::string to_canonical(const RunConfig& c) {
    const auto& s = c.spec;
    std::ostringstream o;
    o << "experiment = " << experiment_name(s.kind) << "\n"
      << "n = " << s.n << "\n"
      << "m = " << s.m << "\n"
      << "n_dense = " << s.n_dense << "\n"
      << "w = " << shortest(s.blur_width) << "\n"
      << "sigma_frac = " << shortest(s.noise_frac) << "\n"
      << "r1 = " << shortest(s.r1) << "\n"
      << "eta1 = " << shortest(s.eta1) << "\n"
      << "r2 = " << shortest(s.r2) << "\n"
      << "eta2 = " << shortest(s.eta2) << "\n"
      << "switch_rule = " << switch_rule_name(s.phase_switch.kind) << "\n"
      << "switch_after = " << s.phase_switch.after << "\n"
      << "switch_rtol = " << shortest(s.phase_switch.tol) << "\n"
      << "theta_rtol = " << shortest(c.theta_rtol) << "\n"
      << "max_outer = " << c.max_outer << "\n"
      << "seed = " << s.seed << "\n"
      << "out = " << c.out << "\n"
      << "emit = " << emit_string(c) << "\n"
      << "exact_alpha = " << (c.exact_alpha ? "true" : "false") << "\n"
      << "nonneg = " << (c.nonneg ? "true" : "false") << "\n"
      << "local_hybrid = " << (c.local_hybrid ? "true" : "false") << "\n"
      << "scene = " << scene_name(c.scene) << "\n"
      << "atoms = " << c.atoms << "\n"
      << "tests = " << c.tests << "\n"
      << "tau = " << shortest(c.tau) << "\n"
      << "per_class = " << c.per_class << "\n";
    return o.str();
}

} // namespace sias
