#pragma once

#include <filesystem>
#include <string>

#include "pnet/pipeline.hpp"

namespace pnet {

/// Deterministic JSON: aggregates, per-patient accuracy and per-round detail.
/// Keys keep a fixed order and doubles are written at round-trip precision,
/// so equal reports serialize to equal bytes.
std::string report_json(const EvaluationReport& report);
void save_report_json(const EvaluationReport& report, const std::filesystem::path& path);

/// One line per round: round, attempts, completed, accuracy, error rate,
/// class error rates.
std::string round_table_tsv(const EvaluationReport& report);
void save_round_table(const EvaluationReport& report, const std::filesystem::path& path);

/// Flat description of the pipeline settings (used in report headers).
std::string describe(const PipelineConfig& cfg);

}  // namespace pnet
