#include "vecseg/cli/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <vector>

#include <fmt/format.h>

#include "vecseg/error.hpp"

namespace vecseg {

void PipelineConfig::sync_seeds() {
    graph.seed = seed;
    train.seed = seed;
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

[[noreturn]] void bad(std::string_view key, std::string_view value, std::string_view want) {
    throw Error(ErrorKind::BadFormat, fmt::format("config key '{}': expected {}, got '{}'", key, want, value));
}

template <typename T>
T parse_number(std::string_view key, std::string_view v) {
    v = trim(v);
    T out{};
    const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || end != v.data() + v.size()) bad(key, v, "a number");
    return out;
}

bool parse_bool(std::string_view key, std::string_view v) {
    v = trim(v);
    if (v == "true") return true;
    if (v == "false") return false;
    bad(key, v, "true or false");
}

std::string parse_string(std::string_view key, std::string_view v) {
    v = trim(v);
    if (v.size() >= 2 && v.front() == '"' && v.back() == '"') {
        std::string out;
        for (std::size_t i = 1; i + 1 < v.size(); ++i) {
            if (v[i] == '\\' && i + 2 < v.size()) ++i;
            out += v[i];
        }
        return out;
    }
    if (v.find_first_of("\"[]") != std::string_view::npos) bad(key, v, "a string");
    return std::string(v);
}

std::array<double, 3> parse_triple(std::string_view key, std::string_view v) {
    v = trim(v);
    if (v.size() < 2 || v.front() != '[' || v.back() != ']') bad(key, v, "[a, b, c]");
    v = v.substr(1, v.size() - 2);
    std::array<double, 3> out{};
    for (std::size_t i = 0; i < 3; ++i) {
        const std::size_t comma = v.find(',');
        if ((i < 2) != (comma != std::string_view::npos)) bad(key, v, "three values");
        out[i] = parse_number<double>(key, v.substr(0, comma));
        v = comma == std::string_view::npos ? std::string_view{} : v.substr(comma + 1);
    }
    return out;
}

std::string quote(std::string_view s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

std::string show(std::array<double, 3> v) { return fmt::format("[{}, {}, {}]", v[0], v[1], v[2]); }

struct Entry {
    std::string_view section;
    std::string_view key;
    std::function<std::string(const PipelineConfig&)> get;
    std::function<void(PipelineConfig&, std::string_view)> set;
};

#define VG_NUM(sec, name, field, T)                                                                                    \
    Entry {                                                                                                            \
        sec, name, [](const PipelineConfig& c) { return fmt::format("{}", c.field); },                                \
            [](PipelineConfig& c, std::string_view v) { c.field = parse_number<T>(name, v); }                           \
    }
#define VG_BOOL(sec, name, field)                                                                                      \
    Entry {                                                                                                            \
        sec, name, [](const PipelineConfig& c) { return std::string(c.field ? "true" : "false"); },                   \
            [](PipelineConfig& c, std::string_view v) { c.field = parse_bool(name, v); }                                \
    }

const std::vector<Entry>& entries() {
    static const std::vector<Entry> table = {
        VG_NUM("", "seed", seed, std::uint64_t),
        Entry{"", "label_map", [](const PipelineConfig& c) { return quote(c.label_map); },
              [](PipelineConfig& c, std::string_view v) { c.label_map = parse_string("label_map", v); }},
        Entry{"", "label_source", [](const PipelineConfig& c) { return quote(to_string(c.label_source)); },
              [](PipelineConfig& c, std::string_view v) {
                  c.label_source = parse_label_source(parse_string("label_source", v));
              }},
        VG_NUM("", "rare_layer_threshold", rare_layer_threshold, double),

        VG_NUM("graph", "k_neighbors", graph.k_neighbors, int),
        VG_NUM("graph", "random_fraction", graph.random_fraction, double),
        VG_NUM("graph", "n_max", graph.features.n_max, int),
        VG_NUM("graph", "contiguity_tol", graph.features.contiguity_tol, double),
        VG_NUM("graph", "median_samples", graph.features.median_samples, int),
        VG_NUM("graph", "pairwise_samples", graph.features.pairwise_samples, int),
        VG_NUM("graph", "curvature_intervals", graph.features.curvature_intervals, int),

        VG_NUM("model", "hidden", hidden, int),
        VG_NUM("model", "leaky_slope", leaky_slope, double),
        VG_BOOL("model", "standardize", standardize),

        Entry{"train", "optimizer",
              [](const PipelineConfig& c) { return quote(c.train.optimizer == OptimizerKind::Adam ? "adam" : "sgd"); },
              [](PipelineConfig& c, std::string_view v) {
                  const std::string s = parse_string("train.optimizer", v);
                  if (s == "adam") c.train.optimizer = OptimizerKind::Adam;
                  else if (s == "sgd") c.train.optimizer = OptimizerKind::Sgd;
                  else bad("train.optimizer", v, "\"adam\" or \"sgd\"");
              }},
        VG_NUM("train", "lr", train.lr, double),
        VG_NUM("train", "beta1", train.beta1, double),
        VG_NUM("train", "beta2", train.beta2, double),
        VG_NUM("train", "eps", train.eps, double),
        VG_NUM("train", "epochs", train.epochs, int),
        VG_NUM("train", "batch_size", train.batch_size, int),
        Entry{"train", "head_weights", [](const PipelineConfig& c) { return show(c.train.head_weights); },
              [](PipelineConfig& c, std::string_view v) { c.train.head_weights = parse_triple("train.head_weights", v); }},
        Entry{"train", "split", [](const PipelineConfig& c) { return show(c.split); },
              [](PipelineConfig& c, std::string_view v) { c.split = parse_triple("train.split", v); }},
        VG_NUM("train", "val_fraction", val_fraction, double),
        VG_NUM("train", "eval_level", train.eval_level, int),
        VG_BOOL("train", "early_stopping", train.early_stopping),
        VG_NUM("train", "patience", train.patience, int),
        VG_NUM("train", "jobs", train.jobs, int),
    };
    return table;
}

#undef VG_NUM
#undef VG_BOOL

std::string full_key(const Entry& e) {
    return e.section.empty() ? std::string(e.key) : fmt::format("{}.{}", e.section, e.key);
}

}  // namespace

std::vector<std::string> config_keys() {
    std::vector<std::string> out;
    for (const Entry& e : entries()) out.push_back(full_key(e));
    return out;
}

void set_config_value(PipelineConfig& cfg, std::string_view key, std::string_view value) {
    for (const Entry& e : entries()) {
        if (full_key(e) == key) {
            e.set(cfg, value);
            cfg.sync_seeds();
            return;
        }
    }
    throw Error(ErrorKind::BadFormat, fmt::format("unknown config key '{}'", key));
}

PipelineConfig parse_config(std::string_view text, PipelineConfig cfg) {
    std::string section;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const std::size_t nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        // strip comments outside quotes
        bool in_quote = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) in_quote = !in_quote;
            if (line[i] == '#' && !in_quote) {
                line = line.substr(0, i);
                break;
            }
        }
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw Error(ErrorKind::BadFormat, fmt::format("config line {}: bad section header", line_no));
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw Error(ErrorKind::BadFormat, fmt::format("config line {}: expected key = value", line_no));
        }
        const std::string_view key = trim(line.substr(0, eq));
        const std::string full = section.empty() ? std::string(key) : fmt::format("{}.{}", section, key);
        try {
            set_config_value(cfg, full, line.substr(eq + 1));
        } catch (const Error& e) {
            throw Error(e.kind(), fmt::format("config line {}: {}", line_no, e.what()));
        }
    }
    cfg.sync_seeds();
    return cfg;
}

PipelineConfig load_config(const std::string& path, PipelineConfig base) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, fmt::format("cannot read config {}", path));
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), std::move(base));
}

std::string write_config(const PipelineConfig& cfg) {
    std::string out;
    std::string_view section;
    for (const Entry& e : entries()) {
        if (e.section != section) {
            section = e.section;
            out += fmt::format("\n[{}]\n", section);
        }
        out += fmt::format("{} = {}\n", e.key, e.get(cfg));
    }
    return out;
}

void save_config(const PipelineConfig& cfg, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::Io, fmt::format("cannot write {}", path));
    out << write_config(cfg);
    if (!out) throw Error(ErrorKind::Io, fmt::format("write failed: {}", path));
}

bool apply_seed_env(PipelineConfig& cfg) {
    const char* env = std::getenv("VG_SEED");
    if (!env || !*env) return false;
    cfg.seed = parse_number<std::uint64_t>("VG_SEED", env);
    cfg.sync_seeds();
    return true;
}

}  // namespace vecseg
