#include "pnet/report.hpp"

#include <cmath>

#include "json.hpp"
#include "pnet/io.hpp"

namespace pnet {

namespace {

using json = nlohmann::ordered_json;

json number(double v) {
    if (!std::isfinite(v)) return nullptr;
    return v;
}

json optional_number(const std::optional<double>& v) {
    return v ? number(*v) : json(nullptr);
}

json config_json(const PipelineConfig& cfg) {
    json j;
    j["featsel"] = to_string(cfg.featsel);
    j["top_k"] = cfg.top_k;
    j["moderated_shrink"] = cfg.moderated_shrink;
    j["similarity"] = to_string(cfg.similarity);
    j["kernel"] = cfg.kernel.describe();
    j["score"] = cfg.score.describe();
    j["edge_grid"] = cfg.edge_grid.levels;
    j["score_grid"] = cfg.score_grid.levels;
    j["seed"] = cfg.seed ? json(*cfg.seed) : json(nullptr);
    j["rounds"] = cfg.rounds;
    j["train_size"] = cfg.train_size;
    j["folds"] = cfg.folds;
    j["stability_top"] = cfg.stability_top;
    j["max_split_attempts"] = cfg.max_split_attempts;
    // Thread count is deliberately absent: it must not change the report.
    return j;
}

json ids_of(const std::vector<std::size_t>& idx, const std::vector<std::string>& ids) {
    json out = json::array();
    for (const auto i : idx) out.push_back(ids[i]);
    return out;
}

json fold_json(const FoldRecord& fold, const EvaluationReport& r) {
    json j;
    j["fold"] = fold.fold;
    j["completed"] = fold.outcome.has_value();
    if (!fold.outcome) {
        j["error"] = fold.error;
        return j;
    }
    const auto& o = *fold.outcome;
    j["train"] = ids_of(o.train, r.sample_ids);
    j["test"] = ids_of(o.test, r.sample_ids);
    j["selected_feature_count"] = o.selected_features.size();
    const std::size_t shown = std::min(o.selected_features.size(), r.config.stability_top);
    j["top_features"] = std::vector<std::string>(o.selected_features.begin(),
                                                 o.selected_features.begin() + static_cast<std::ptrdiff_t>(shown));
    j["edge_quantile"] = number(o.edge_quantile);
    j["edge_threshold"] = number(o.edge_threshold);
    j["internal_auc"] = number(o.internal_auc);
    j["score_threshold"] = number(o.score_threshold.cut);
    j["score_quantile"] = number(o.score_threshold.quantile);
    j["train_accuracy"] = number(o.score_threshold.accuracy);
    json preds = json::array();
    for (std::size_t t = 0; t < o.test.size(); ++t) {
        json p;
        p["sample_id"] = r.sample_ids[o.test[t]];
        p["score"] = number(o.test_scores[t]);
        p["predicted"] = static_cast<int>(o.predicted[t]);
        p["label"] = static_cast<int>(o.truth[t]);
        preds.push_back(std::move(p));
    }
    j["predictions"] = std::move(preds);
    j["error_rate"] = number(o.error_rate());
    j["positives_tested"] = o.positives_tested;
    j["positive_errors"] = o.positive_errors;
    j["negatives_tested"] = o.negatives_tested;
    j["negative_errors"] = o.negative_errors;
    j["warnings"] = o.warnings;
    return j;
}

}  // namespace

std::string describe(const PipelineConfig& cfg) {
    std::string s = "featsel=" + to_string(cfg.featsel);
    if (cfg.featsel != FeatureSelection::none) s += " top_k=" + std::to_string(cfg.top_k);
    s += " similarity=" + to_string(cfg.similarity);
    s += " kernel=" + cfg.kernel.describe();
    s += " score=" + cfg.score.describe();
    return s;
}

std::string report_json(const EvaluationReport& r) {
    json j;
    j["harness"] = r.harness;
    j["metadata"] = {
        {"sem", "sample standard deviation of per-round accuracies divided by sqrt(completed rounds)"},
        {"graph", "similarity computed over all samples on training-selected features"},
        {"round_accuracy", r.harness == "mccv" ? "test accuracy of the round"
                                               : "1 - mean fold error rate of the round"},
    };
    j["config"] = config_json(r.config);

    json agg;
    agg["rounds"] = r.rounds.size();
    agg["completed_rounds"] = r.completed_rounds;
    agg["mean_accuracy"] = number(r.mean_accuracy);
    agg["sem"] = number(r.sem);
    agg["mean_error"] = number(r.mean_error);
    agg["positive_error_rate"] = optional_number(r.positive_error_rate);
    agg["negative_error_rate"] = optional_number(r.negative_error_rate);
    agg["stability"] = optional_number(r.stability);
    j["aggregate"] = std::move(agg);

    json patients = json::array();
    for (std::size_t i = 0; i < r.sample_ids.size(); ++i) {
        json p;
        p["sample_id"] = r.sample_ids[i];
        p["label"] = static_cast<int>(r.labels[i]);
        p["tests"] = r.per_patient_tests.empty() ? 0 : r.per_patient_tests[i];
        p["accuracy"] = r.per_patient_accuracy.empty() ? json(nullptr) : optional_number(r.per_patient_accuracy[i]);
        patients.push_back(std::move(p));
    }
    j["patients"] = std::move(patients);

    json rounds = json::array();
    for (const auto& round : r.rounds) {
        json rj;
        rj["round"] = round.round;
        rj["attempts"] = round.attempts;
        rj["completed"] = round.completed();
        if (!round.error.empty()) rj["error"] = round.error;
        if (round.completed()) {
            rj["accuracy"] = number(round.accuracy());
            rj["positive_error_rate"] = optional_number(round.class_error_rate(true));
            rj["negative_error_rate"] = optional_number(round.class_error_rate(false));
        }
        json folds = json::array();
        for (const auto& f : round.folds) folds.push_back(fold_json(f, r));
        rj["folds"] = std::move(folds);
        rounds.push_back(std::move(rj));
    }
    j["rounds"] = std::move(rounds);
    return j.dump(1) + '\n';
}

void save_report_json(const EvaluationReport& report, const std::filesystem::path& path) {
    io::write_text_atomic(path, report_json(report));
}

std::string round_table_tsv(const EvaluationReport& r) {
    std::string out = "round\tattempts\tcompleted\taccuracy\terror_rate\tpositive_error_rate\tnegative_error_rate\n";
    auto cell = [](const std::optional<double>& v) { return v ? io::format_double(*v) : std::string("NA"); };
    for (const auto& round : r.rounds) {
        const bool done = round.completed();
        out += std::to_string(round.round) + '\t' + std::to_string(round.attempts) + '\t' + (done ? "1" : "0");
        if (done) {
            out += '\t' + io::format_double(round.accuracy()) + '\t' + io::format_double(round.error_rate());
            out += '\t' + cell(round.class_error_rate(true)) + '\t' + cell(round.class_error_rate(false));
        } else {
            out += "\tNA\tNA\tNA\tNA";
        }
        out += '\n';
    }
    return out;
}

void save_round_table(const EvaluationReport& report, const std::filesystem::path& path) {
    io::write_text_atomic(path, round_table_tsv(report));
}

}  // namespace pnet
