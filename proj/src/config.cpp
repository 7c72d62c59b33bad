#include "lsr/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "lsr/error.hpp"

namespace lsr {
namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

using Sections = std::map<std::string, std::map<std::string, std::string>>;

// Full-line comments only (# or ;). Values may therefore contain '#'.
Sections read_ini(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw StorageError("cannot open config file: " + path.string());

    Sections sections;
    std::string current;
    bool in_section = false;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string text = trim(line);
        if (text.empty() || text[0] == '#' || text[0] == ';') continue;
        if (text.front() == '[') {
            if (text.back() != ']' || text.size() < 3)
                throw ParseError("malformed section header '" + text + "'", line_no);
            current = trim(text.substr(1, text.size() - 2));
            if (current.empty())
                throw ParseError("empty section name", line_no);
            in_section = true;
            sections[current];  // an empty section is legal
            continue;
        }
        const std::size_t eq = text.find('=');
        if (eq == std::string::npos)
            throw ParseError("expected 'key = value', got '" + text + "'", line_no);
        if (!in_section)
            throw ParseError("key before any [section] header", line_no);
        const std::string key = trim(text.substr(0, eq));
        const std::string value = trim(text.substr(eq + 1));
        if (key.empty()) throw ParseError("empty key", line_no);
        auto [it, inserted] = sections[current].emplace(key, value);
        (void)it;
        if (!inserted)
            throw ParseError("duplicate key '" + current + "." + key + "'", line_no);
    }
    return sections;
}

// Consume a key so leftover detection can flag typos at the end.
bool take(Sections& sections, const std::string& sec, const std::string& key,
          std::string& out) {
    auto sit = sections.find(sec);
    if (sit == sections.end()) return false;
    auto kit = sit->second.find(key);
    if (kit == sit->second.end()) return false;
    out = kit->second;
    sit->second.erase(kit);
    return true;
}

[[noreturn]] void bad_value(const std::string& sec, const std::string& key,
                            const std::string& value, const char* expected) {
    throw ConfigError("config " + sec + "." + key + " = '" + value + "': expected " +
                      expected);
}

Index to_index(const std::string& sec, const std::string& key, const std::string& value) {
    Index out = 0;
    const char* end = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc() || ptr != end) bad_value(sec, key, value, "an integer");
    return out;
}

u64 to_u64(const std::string& sec, const std::string& key, const std::string& value) {
    u64 out = 0;
    const char* end = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc() || ptr != end) bad_value(sec, key, value, "a nonnegative integer");
    return out;
}

f64 to_f64(const std::string& sec, const std::string& key, const std::string& value) {
    f64 out = 0.0;
    const char* end = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc() || ptr != end) bad_value(sec, key, value, "a number");
    return out;
}

bool to_bool(const std::string& sec, const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    bad_value(sec, key, value, "true or false");
}

std::vector<std::string> split_list(const std::string& sec, const std::string& key,
                                    const std::string& value) {
    std::vector<std::string> parts;
    std::string item;
    std::istringstream is(value);
    while (std::getline(is, item, ',')) {
        item = trim(item);
        if (item.empty()) bad_value(sec, key, value, "a comma-separated list");
        parts.push_back(item);
    }
    if (parts.empty()) bad_value(sec, key, value, "a comma-separated list");
    return parts;
}

}  // namespace

CompareConfig parse_compare_config(const std::filesystem::path& path) {
    Sections sections = read_ini(path);

    static const char* kKnownSections[] = {"data", "normalize", "sweep", "logreg", "output"};
    for (const auto& [name, kv] : sections) {
        (void)kv;
        if (std::find_if(std::begin(kKnownSections), std::end(kKnownSections),
                         [&](const char* s) { return name == s; }) ==
            std::end(kKnownSections))
            throw ConfigError("unknown config section [" + name + "]");
    }

    CompareConfig cfg;
    std::string v;

    // [data]
    if (take(sections, "data", "store", v)) cfg.store = v;
    if (take(sections, "data", "labels", v)) cfg.labels = v;
    if (take(sections, "data", "synthetic", v)) cfg.synthetic = to_bool("data", "synthetic", v);
    if (take(sections, "data", "n", v)) cfg.synth.n = to_index("data", "n", v);
    if (take(sections, "data", "p", v)) cfg.synth.p = to_index("data", "p", v);
    if (take(sections, "data", "rank", v)) cfg.synth.rank = to_index("data", "rank", v);
    if (take(sections, "data", "classes", v)) cfg.synth.n_classes = to_index("data", "classes", v);
    if (take(sections, "data", "noise_sd", v)) cfg.synth.noise_sd = to_f64("data", "noise_sd", v);

    // [normalize]
    if (take(sections, "normalize", "mode", v)) cfg.norm_mode = norm_mode_from_name(v);

    // [sweep]
    if (take(sections, "sweep", "ks", v))
        for (const std::string& item : split_list("sweep", "ks", v))
            cfg.ks.push_back(to_index("sweep", "ks", item));
    if (take(sections, "sweep", "seeds", v))
        for (const std::string& item : split_list("sweep", "seeds", v))
            cfg.seeds.push_back(to_u64("sweep", "seeds", item));
    if (take(sections, "sweep", "n_seeds", v)) cfg.n_seeds = to_index("sweep", "n_seeds", v);
    if (take(sections, "sweep", "folds", v)) cfg.folds = to_index("sweep", "folds", v);
    if (take(sections, "sweep", "test_fraction", v))
        cfg.test_fraction = to_f64("sweep", "test_fraction", v);
    if (take(sections, "sweep", "oversample", v)) cfg.oversample = OversampleMode::parse(v);
    if (take(sections, "sweep", "max_rows_per_slice", v))
        cfg.max_rows_per_slice = to_index("sweep", "max_rows_per_slice", v);

    // [logreg]
    if (take(sections, "logreg", "reg", v)) cfg.logreg.reg = to_f64("logreg", "reg", v);
    if (take(sections, "logreg", "max_iter", v))
        cfg.logreg.max_iter = to_index("logreg", "max_iter", v);
    if (take(sections, "logreg", "tol", v)) cfg.logreg.tol = to_f64("logreg", "tol", v);

    // [output]
    if (take(sections, "output", "csv", v)) cfg.csv_path = v;
    if (take(sections, "output", "json", v)) cfg.json_path = v;

    for (const auto& [name, kv] : sections)
        if (!kv.empty())
            throw ConfigError("unknown config key '" + name + "." + kv.begin()->first + "'");

    // Cross-field checks.
    if (cfg.synthetic && !cfg.store.empty())
        throw ConfigError("config [data]: give either synthetic = true or a store, not both");
    if (!cfg.synthetic && cfg.store.empty())
        throw ConfigError("config [data]: needs synthetic = true or a store path");
    if (!cfg.store.empty() && cfg.labels.empty())
        throw ConfigError("config [data]: a store needs a labels file");
    if (cfg.ks.empty()) throw ConfigError("config sweep.ks: at least one target dimension");
    for (Index k : cfg.ks)
        if (k < 1) throw ConfigError("config sweep.ks: dimensions must be positive");
    if (cfg.seeds.empty() && cfg.n_seeds < 1)
        throw ConfigError("config sweep.n_seeds: must be at least 1");
    if (cfg.folds < 1) throw ConfigError("config sweep.folds: must be at least 1");
    if (!(cfg.test_fraction > 0.0 && cfg.test_fraction < 1.0))
        throw ConfigError("config sweep.test_fraction: must lie strictly between 0 and 1");
    if (cfg.max_rows_per_slice < 1)
        throw ConfigError("config sweep.max_rows_per_slice: must be at least 1");
    if (cfg.logreg.reg < 0.0) throw ConfigError("config logreg.reg: must be nonnegative");
    if (cfg.logreg.max_iter < 1) throw ConfigError("config logreg.max_iter: must be at least 1");
    if (!(cfg.logreg.tol > 0.0)) throw ConfigError("config logreg.tol: must be positive");
    if (cfg.csv_path.empty() || cfg.json_path.empty())
        throw ConfigError("config [output]: csv and json paths must not be empty");
    return cfg;
}

}  // namespace lsr
