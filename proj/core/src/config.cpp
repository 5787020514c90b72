#include "pnet/config.hpp"

#include <algorithm>
#include <functional>
#include <limits>

#include "pnet/io.hpp"

namespace pnet {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::size_t as_count(const std::string& key, const std::string& value) {
    long long v = 0;
    try {
        v = io::parse_integer(value, key);
    } catch (const DataError&) {
        throw ArgumentError(key + ": expected a non-negative integer, got '" + value + "'");
    }
    if (v < 0) throw ArgumentError(key + ": expected a non-negative integer, got '" + value + "'");
    return static_cast<std::size_t>(v);
}

int as_int(const std::string& key, const std::string& value) {
    const auto v = as_count(key, value);
    if (v > static_cast<std::size_t>(std::numeric_limits<int>::max())) {
        throw ArgumentError(key + ": value too large");
    }
    return static_cast<int>(v);
}

double as_real(const std::string& key, const std::string& value) {
    try {
        return io::parse_double(value, key);
    } catch (const DataError&) {
        throw ArgumentError(key + ": expected a number, got '" + value + "'");
    }
}

bool as_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
    if (value == "false" || value == "0" || value == "no" || value == "off") return false;
    throw ArgumentError(key + ": expected true/false, got '" + value + "'");
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

const std::vector<std::pair<std::string, Setter>>& setters() {
    static const std::vector<std::pair<std::string, Setter>> table = {
        {"featsel.method", [](RunConfig& c, const std::string&, const std::string& v) {
             c.pipeline.featsel = feature_selection_from_string(v);
         }},
        {"featsel.top_k", [](RunConfig& c, const std::string& k, const std::string& v) {
             c.pipeline.top_k = as_count(k, v);
         }},
        {"featsel.shrink", [](RunConfig& c, const std::string& k, const std::string& v) {
             c.pipeline.moderated_shrink = as_bool(k, v);
         }},
        {"similarity.method", [](RunConfig& c, const std::string&, const std::string& v) {
             c.pipeline.similarity = correlation_from_string(v);
         }},
        {"kernel.kind", [](RunConfig& c, const std::string&, const std::string& v) {
             c.pipeline.kernel.kind = kernel_kind_from_string(v);
         }},
        {"kernel.p", [](RunConfig& c, const std::string& k, const std::string& v) {
             c.pipeline.kernel.steps = as_int(k, v);
         }},
        {"kernel.a", [](RunConfig& c, const std::string& k, const std::string& v) {
             c.pipeline.kernel.a = as_real(k, v);
         }},
        {"kernel.sigma", [](RunConfig& c, const std::string& k, const std::string& v) {
             c.pipeline.kernel.sigma = as_real(k, v);
         }},
        {"kernel.c", [](RunConfig& c, const std::string& k, const std::string& v) {
             c.pipeline.kernel.c = as_real(k, v);
         }},
        {"kernel.degree", [](RunConfig& c, const std::string& k, const std::string& v) {
             c.pipeline.kernel.degree = as_int(k, v);
         }},
        {"kernel.alpha", [](RunConfig& c, const std::string& k, const std::string& v) {
             c.pipeline.kernel.alpha = as_real(k, v);
         }},
        {"kernel.nonneg", [](RunConfig& c, const std::string&, const std::string& v) {
             c.pipeline.kernel.nonnegativity = nonnegativity_from_string(v);
         }},
        {"score.kind", [](RunConfig& c, const std::string&, const std::string& v) {
             c.pipeline.score.kind = score_kind_from_string(v);
         }},
        {"score.k", [](RunConfig& c, const std::string& k, const std::string& v) {
             c.pipeline.score.k = as_count(k, v);
         }},
        {"threshold.edge_grid", [](RunConfig& c, const std::string&, const std::string& v) {
             c.pipeline.edge_grid = QuantileGrid::parse(v);
         }},
        {"threshold.score_grid", [](RunConfig& c, const std::string&, const std::string& v) {
             c.pipeline.score_grid = QuantileGrid::parse(v);
         }},
        {"run.seed", [](RunConfig& c, const std::string& k, const std::string& v) {
             c.pipeline.seed = static_cast<std::uint64_t>(as_count(k, v));
         }},
        {"run.rounds", [](RunConfig& c, const std::string& k, const std::string& v) {
             c.pipeline.rounds = as_count(k, v);
         }},
        {"run.train_size", [](RunConfig& c, const std::string& k, const std::string& v) {
             c.pipeline.train_size = as_count(k, v);
         }},
        {"run.folds", [](RunConfig& c, const std::string& k, const std::string& v) {
             c.pipeline.folds = as_count(k, v);
         }},
        {"run.threads", [](RunConfig& c, const std::string& k, const std::string& v) {
             c.pipeline.threads = as_count(k, v);
         }},
        {"run.stability_top", [](RunConfig& c, const std::string& k, const std::string& v) {
             c.pipeline.stability_top = as_count(k, v);
         }},
        {"run.max_attempts", [](RunConfig& c, const std::string& k, const std::string& v) {
             c.pipeline.max_split_attempts = as_count(k, v);
         }},
        {"data.expression", [](RunConfig& c, const std::string&, const std::string& v) {
             c.expression = v;
         }},
        {"data.labels", [](RunConfig& c, const std::string&, const std::string& v) { c.labels = v; }},
        {"data.format", [](RunConfig& c, const std::string& k, const std::string& v) {
             if (v == "tsv") {
                 c.format = TableFormat::tsv;
             } else if (v == "csv") {
                 c.format = TableFormat::csv;
             } else {
                 throw ArgumentError(k + ": expected tsv or csv, got '" + v + "'");
             }
         }},
    };
    return table;
}

}  // namespace

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> out;
        for (const auto& [key, setter] : setters()) out.push_back(key);
        return out;
    }();
    return keys;
}

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value) {
    for (const auto& [name, setter] : setters()) {
        if (name == key) {
            setter(cfg, key, value);
            return;
        }
    }
    throw ArgumentError("unknown config key '" + key + "'");
}

RunConfig parse_config(std::string_view text, const std::string& origin,
                       const std::filesystem::path& base_dir) {
    RunConfig cfg;
    std::string section;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto end = std::min(text.find('\n', start), text.size());
        std::string line(text.substr(start, end - start));
        start = end + 1;
        ++line_no;
        const auto comment = line.find_first_of("#;");
        if (comment != std::string::npos) line.erase(comment);
        line = trim(line);
        if (line.empty()) continue;
        const std::string where = origin + ":" + std::to_string(line_no);
        if (line.front() == '[') {
            if (line.back() != ']') throw ArgumentError(where + ": malformed section header");
            section = trim(std::string_view(line).substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ArgumentError(where + ": expected 'key = value'");
        }
        std::string key = trim(std::string_view(line).substr(0, eq));
        const std::string value = trim(std::string_view(line).substr(eq + 1));
        if (!section.empty()) key = section + "." + key;
        try {
            apply_setting(cfg, key, value);
        } catch (const Error& e) {
            throw ArgumentError(where + ": " + e.what());
        }
    }
    if (!base_dir.empty()) {
        if (cfg.expression && cfg.expression->is_relative()) cfg.expression = base_dir / *cfg.expression;
        if (cfg.labels && cfg.labels->is_relative()) cfg.labels = base_dir / *cfg.labels;
    }
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    const auto text = io::read_text(path);
    return parse_config(text, path.string(), path.parent_path());
}

}  // namespace pnet
