#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pnet/pipeline.hpp"

namespace pnet {

/// Pipeline settings plus the input files of an experiment.
struct RunConfig {
    PipelineConfig pipeline;
    std::optional<std::filesystem::path> expression;
    std::optional<std::filesystem::path> labels;
    std::optional<TableFormat> format;
};

/// Sets one dotted key ("kernel.p", "run.seed", ...). Unknown keys and
/// malformed values throw ArgumentError.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);

/// Every key accepted by apply_setting, in documentation order.
const std::vector<std::string>& config_keys();

/// Flat `key = value` text. `[section]` lines prefix the following keys with
/// "section."; '#' and ';' start comments. Relative data paths are resolved
/// against `base_dir`.
RunConfig parse_config(std::string_view text, const std::string& origin,
                       const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

}  // namespace pnet
