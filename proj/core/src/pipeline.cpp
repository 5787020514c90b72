#include "pnet/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_set>

#include "parallel.hpp"

namespace pnet {

FeatureSelection feature_selection_from_string(const std::string& name) {
    if (name == "welch" || name == "ttest") return FeatureSelection::welch;
    if (name == "moderated") return FeatureSelection::moderated;
    if (name == "none") return FeatureSelection::none;
    throw ArgumentError("unknown feature selection '" + name + "' (welch, moderated, none)");
}

std::string to_string(FeatureSelection f) {
    switch (f) {
        case FeatureSelection::welch: return "welch";
        case FeatureSelection::moderated: return "moderated";
        case FeatureSelection::none: return "none";
    }
    return "?";
}

void PipelineConfig::validate() const {
    if (featsel != FeatureSelection::none && top_k < 1) {
        throw ArgumentError("top_k must be >= 1");
    }
    kernel.validate();
    score.validate();
    edge_grid.validate();
    score_grid.validate();
    if (rounds < 1) {
        throw ArgumentError("rounds must be >= 1");
    }
    if (max_split_attempts < 1) {
        throw ArgumentError("max_split_attempts must be >= 1");
    }
}

// --- fixed-kernel harnesses ------------------------------------------------

DoubleLooResult pnet_double_loo(const KernelMatrix& k, const NodeSet& positives,
                                const QuantileGrid& grid, const ScoreSpec& spec) {
    const std::size_t n = k.size();
    if (positives.universe() != n) {
        throw ArgumentError("positive set does not match the kernel size");
    }
    if (positives.size() < 2 || n - positives.size() < 2) {
        throw DataError("double leave-one-out needs at least 2 positives and 2 negatives");
    }
    const NodeSet negatives = positives.complement();
    Matrix zeroed = k.values;
    zeroed.diagonal().setZero();
    const KernelMatrix zeroed_k{k.sample_ids, zeroed, k.provenance};

    DoubleLooResult out;
    out.scores.sample_ids = k.sample_ids;
    out.scores.scores.resize(n);
    out.quantiles.resize(n);
    out.thresholds.resize(n);
    std::vector<double> row(n);
    for (std::size_t i = 0; i < n; ++i) {
        const NodeSet pos = positives.without(i);
        const NodeSet neg = negatives.without(i);
        const NodeSet targets = NodeSet::all(n).without(i);
        const auto thr = optimize_thresh_by_loo(zeroed_k, pos, neg, targets, grid, spec);
        out.quantiles[i] = thr.best_quantile;
        out.thresholds[i] = thr.best_threshold;
        for (std::size_t j = 0; j < n; ++j) {
            const double v = zeroed(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i));
            row[j] = v < thr.best_threshold ? 0.0 : v;
        }
        row[i] = 0.0;
        const auto s = score_node(row, pos, neg, spec);
        out.scores.scores[i] = s.value;
        out.scores.zero_denominators += s.zero_denominator ? 1 : 0;
    }
    return out;
}

HeldoutResult pnet_heldout(const KernelMatrix& k, const NodeSet& positives, const NodeSet& train,
                           const NodeSet& test, const QuantileGrid& grid, const ScoreSpec& spec) {
    const std::size_t n = k.size();
    if (positives.universe() != n || train.universe() != n || test.universe() != n) {
        throw ArgumentError("node sets do not match the kernel size");
    }
    if (!train.intersect(test).empty()) {
        throw ArgumentError("training and test sets overlap");
    }
    if (test.empty()) {
        throw ArgumentError("test set is empty");
    }
    const NodeSet pos = positives.intersect(train);
    const NodeSet neg = train.minus(positives);
    if (pos.empty() || neg.empty()) {
        throw DataError("training set needs both classes");
    }
    const auto thr = optimize_thresh_by_loo(k, pos, neg, train, grid, spec);
    const KernelMatrix filtered = filter_matrix(k, thr.best_threshold);

    HeldoutResult out;
    out.test_scores = score_all(filtered, pos, neg, spec, test);
    out.train_scores = thr.target_scores;
    out.quantile = thr.best_quantile;
    out.threshold = thr.best_threshold;
    out.internal_auc = thr.best_auc;
    return out;
}

std::vector<std::size_t> split_folds(std::size_t n, std::size_t folds, std::uint64_t seed,
                                     std::uint64_t stream) {
    if (folds < 2 || folds > n) {
        throw ArgumentError("fold count must be between 2 and the number of samples");
    }
    Rng rng = make_rng(seed, stream);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<std::size_t> fold_of(n);
    for (std::size_t pos = 0; pos < n; ++pos) {
        fold_of[order[pos]] = pos % folds;
    }
    return fold_of;
}

CvResult pnet_cv(const KernelMatrix& k, const NodeSet& positives, std::size_t folds,
                 const QuantileGrid& grid, const ScoreSpec& spec, std::uint64_t seed) {
    const std::size_t n = k.size();
    CvResult out;
    out.fold_of = split_folds(n, folds, seed);
    out.fold_quantiles.assign(folds, std::numeric_limits<double>::quiet_NaN());
    out.fold_errors.assign(folds, {});
    std::vector<std::optional<double>> score_of(n);
    for (std::size_t f = 0; f < folds; ++f) {
        std::vector<std::size_t> test_idx, train_idx;
        for (std::size_t i = 0; i < n; ++i) {
            (out.fold_of[i] == f ? test_idx : train_idx).push_back(i);
        }
        const NodeSet test(n, test_idx);
        const NodeSet train(n, train_idx);
        try {
            const auto res = pnet_heldout(k, positives, train, test, grid, spec);
            out.fold_quantiles[f] = res.quantile;
            for (std::size_t t = 0; t < test.size(); ++t) {
                score_of[test.members()[t]] = res.test_scores.scores[t];
            }
            out.scores.zero_denominators += res.test_scores.zero_denominators;
        } catch (const DataError& e) {
            out.fold_errors[f] = e.what();
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (score_of[i]) {
            out.scores.sample_ids.push_back(k.sample_ids[i]);
            out.scores.scores.push_back(*score_of[i]);
        }
    }
    return out;
}

ScoreThreshold select_score_threshold(std::span<const double> train_scores,
                                      const std::vector<bool>& train_labels,
                                      const QuantileGrid& grid) {
    grid.validate();
    if (train_scores.size() != train_labels.size() || train_scores.empty()) {
        throw ArgumentError("training scores and labels must be non-empty and aligned");
    }
    const auto positives = std::count(train_labels.begin(), train_labels.end(), true);
    if (positives == 0 || static_cast<std::size_t>(positives) == train_labels.size()) {
        throw DataError("score threshold selection needs both classes");
    }
    std::vector<double> sorted(train_scores.begin(), train_scores.end());
    std::sort(sorted.begin(), sorted.end());
    ScoreThreshold best;
    best.accuracy = -1.0;
    for (const double q : grid.levels) {
        const double cut = quantile_sorted(sorted, q);
        std::size_t correct = 0;
        for (std::size_t i = 0; i < train_scores.size(); ++i) {
            correct += ((train_scores[i] > cut) == train_labels[i]) ? 1 : 0;
        }
        const double acc = static_cast<double>(correct) / static_cast<double>(train_scores.size());
        if (acc > best.accuracy) {
            best = {cut, q, acc};
        }
    }
    return best;
}

// --- expression-level harnesses --------------------------------------------

double SplitOutcome::error_rate() const {
    const std::size_t tested = positives_tested + negatives_tested;
    return tested == 0 ? 0.0 : static_cast<double>(errors()) / static_cast<double>(tested);
}

namespace {

std::vector<std::size_t> sorted_unique(std::vector<std::size_t> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

std::vector<std::string> select_features(const ExpressionMatrix& train_m, const PhenotypeLabels& train_y,
                                         const PipelineConfig& cfg) {
    FeatureStats stats;
    switch (cfg.featsel) {
        case FeatureSelection::welch: stats = welch_t(train_m, train_y); break;
        case FeatureSelection::moderated:
            stats = moderated_t(train_m, train_y, ModeratedOptions{cfg.moderated_shrink});
            break;
        case FeatureSelection::none: return {};
    }
    return select_top_k(stats, std::min(cfg.top_k, stats.size()));
}

}  // namespace

SplitOutcome run_split(const ExpressionMatrix& m, const PhenotypeLabels& y,
                       std::vector<std::size_t> train, std::vector<std::size_t> test,
                       const PipelineConfig& cfg) {
    const std::size_t n = m.samples();
    if (y.sample_ids != m.sample_ids) {
        throw DataError("labels are not aligned with the expression matrix samples");
    }
    SplitOutcome out;
    out.train = sorted_unique(std::move(train));
    out.test = sorted_unique(std::move(test));
    for (const auto i : out.train) {
        if (i >= n) throw ArgumentError("training index out of range");
    }
    for (const auto i : out.test) {
        if (i >= n) throw ArgumentError("test index out of range");
    }
    const NodeSet train_set(n, out.train);
    const NodeSet test_set(n, out.test);
    if (!train_set.intersect(test_set).empty()) {
        throw ArgumentError("training and test sets overlap");
    }
    if (out.test.empty()) {
        throw ArgumentError("test set is empty");
    }
    std::size_t train_pos = 0;
    for (const auto i : out.train) train_pos += y.labels[i] ? 1 : 0;
    if (train_pos < 2 || out.train.size() - train_pos < 2) {
        throw DataError("training set needs at least 2 samples of each class");
    }

    // Feature selection sees training columns only.
    const auto train_m = m.select_columns(out.train);
    PhenotypeLabels train_y;
    train_y.sample_ids = train_m.sample_ids;
    for (const auto i : out.train) train_y.labels.push_back(y.labels[i]);
    out.selected_features = select_features(train_m, train_y, cfg);

    ExpressionMatrix selected;
    if (cfg.featsel == FeatureSelection::none) {
        selected = m;
    } else {
        const std::unordered_set<std::string> chosen(out.selected_features.begin(), out.selected_features.end());
        std::vector<std::size_t> rows;
        for (std::size_t r = 0; r < m.features(); ++r) {
            if (chosen.contains(m.feature_ids[r])) rows.push_back(r);
        }
        selected = m.select_rows(rows);
    }

    // Transductive: the graph spans every sample so test nodes can be scored.
    const auto w = similarity_matrix(selected, cfg.similarity);
    Diagnostics diag;
    const auto k = make_kernel(w, cfg.kernel, &diag);
    out.warnings = std::move(diag.warnings);

    std::vector<std::size_t> pos_idx;
    for (const auto i : out.train) {
        if (y.labels[i]) pos_idx.push_back(i);
    }
    const NodeSet positives(n, pos_idx);
    const auto held = pnet_heldout(k, positives, train_set, test_set, cfg.edge_grid, cfg.score);
    out.edge_quantile = held.quantile;
    out.edge_threshold = held.threshold;
    out.internal_auc = held.internal_auc;

    std::vector<bool> train_labels;
    for (const auto i : out.train) train_labels.push_back(y.labels[i]);
    out.score_threshold = select_score_threshold(held.train_scores.scores, train_labels, cfg.score_grid);

    out.test_scores = held.test_scores.scores;
    for (std::size_t t = 0; t < out.test.size(); ++t) {
        const bool predicted = out.test_scores[t] > out.score_threshold.cut;
        const bool truth = y.labels[out.test[t]];
        out.predicted.push_back(predicted);
        out.truth.push_back(truth);
        if (truth) {
            ++out.positives_tested;
            out.positive_errors += predicted ? 0 : 1;
        } else {
            ++out.negatives_tested;
            out.negative_errors += predicted ? 1 : 0;
        }
    }
    return out;
}

bool RoundRecord::completed() const {
    return std::any_of(folds.begin(), folds.end(), [](const FoldRecord& f) { return f.outcome.has_value(); });
}

double RoundRecord::error_rate() const {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& f : folds) {
        if (f.outcome) {
            sum += f.outcome->error_rate();
            ++count;
        }
    }
    return count == 0 ? std::numeric_limits<double>::quiet_NaN() : sum / static_cast<double>(count);
}

std::optional<double> RoundRecord::class_error_rate(bool positive_class) const {
    std::size_t errors = 0, tested = 0;
    for (const auto& f : folds) {
        if (!f.outcome) continue;
        errors += positive_class ? f.outcome->positive_errors : f.outcome->negative_errors;
        tested += positive_class ? f.outcome->positives_tested : f.outcome->negatives_tested;
    }
    if (tested == 0) return std::nullopt;
    return static_cast<double>(errors) / static_cast<double>(tested);
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> balanced_split(
    const std::vector<bool>& labels, std::size_t train_size, Rng& rng) {
    const std::size_t n = labels.size();
    if (train_size < 1 || train_size >= n) {
        throw ArgumentError("train size must be between 1 and n - 1");
    }
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < n; ++i) (labels[i] ? pos : neg).push_back(i);
    std::shuffle(pos.begin(), pos.end(), rng);
    std::shuffle(neg.begin(), neg.end(), rng);

    const std::size_t test_size = n - train_size;
    std::size_t test_pos = test_size / 2;
    if (test_size % 2 == 1 && std::bernoulli_distribution(0.5)(rng)) {
        ++test_pos;
    }
    std::size_t test_neg = test_size - test_pos;
    if (test_pos > pos.size() || test_neg > neg.size()) {
        throw DataError("cannot draw a balanced test set of size " + std::to_string(test_size) +
                        " from " + std::to_string(pos.size()) + " positives and " +
                        std::to_string(neg.size()) + " negatives");
    }
    std::vector<std::size_t> train, test;
    test.insert(test.end(), pos.begin(), pos.begin() + static_cast<std::ptrdiff_t>(test_pos));
    test.insert(test.end(), neg.begin(), neg.begin() + static_cast<std::ptrdiff_t>(test_neg));
    train.insert(train.end(), pos.begin() + static_cast<std::ptrdiff_t>(test_pos), pos.end());
    train.insert(train.end(), neg.begin() + static_cast<std::ptrdiff_t>(test_neg), neg.end());
    std::sort(train.begin(), train.end());
    std::sort(test.begin(), test.end());
    return {std::move(train), std::move(test)};
}

double stability(const std::vector<std::vector<std::string>>& feature_sets, std::size_t top_k) {
    if (feature_sets.size() < 2) {
        throw ArgumentError("stability needs at least 2 feature sets");
    }
    if (top_k < 1) {
        throw ArgumentError("stability needs top_k >= 1");
    }
    std::vector<std::unordered_set<std::string>> prefixes;
    prefixes.reserve(feature_sets.size());
    for (const auto& s : feature_sets) {
        if (s.size() < top_k) {
            throw ArgumentError("top_k " + std::to_string(top_k) + " exceeds a feature set of size " +
                                std::to_string(s.size()));
        }
        prefixes.emplace_back(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(top_k));
    }
    double total = 0.0;
    std::size_t pairs = 0;
    for (std::size_t a = 0; a < feature_sets.size(); ++a) {
        for (std::size_t b = a + 1; b < feature_sets.size(); ++b) {
            std::size_t common = 0;
            for (std::size_t i = 0; i < top_k; ++i) {
                common += prefixes[b].contains(feature_sets[a][i]) ? 1 : 0;
            }
            total += static_cast<double>(common) / static_cast<double>(top_k);
            ++pairs;
        }
    }
    return total / static_cast<double>(pairs);
}

namespace {

void check_inputs(const ExpressionMatrix& m, const PhenotypeLabels& y, const PipelineConfig& cfg) {
    cfg.validate();
    if (!cfg.seed) {
        throw ArgumentError("randomized harnesses need an explicit seed");
    }
    if (y.sample_ids != m.sample_ids) {
        throw DataError("labels are not aligned with the expression matrix samples");
    }
}

void aggregate(EvaluationReport& r) {
    const std::size_t n = r.sample_ids.size();
    std::vector<double> accuracies;
    std::vector<double> pos_rates, neg_rates;
    std::vector<std::size_t> correct(n, 0);
    r.per_patient_tests.assign(n, 0);
    std::vector<std::vector<std::string>> selections;

    for (const auto& round : r.rounds) {  // rounds are stored in index order
        if (!round.completed()) continue;
        accuracies.push_back(round.accuracy());
        if (auto p = round.class_error_rate(true)) pos_rates.push_back(*p);
        if (auto q = round.class_error_rate(false)) neg_rates.push_back(*q);
        for (const auto& fold : round.folds) {
            if (!fold.outcome) continue;
            const auto& o = *fold.outcome;
            for (std::size_t t = 0; t < o.test.size(); ++t) {
                ++r.per_patient_tests[o.test[t]];
                correct[o.test[t]] += o.predicted[t] == o.truth[t] ? 1 : 0;
            }
            if (!o.selected_features.empty()) selections.push_back(o.selected_features);
        }
    }
    auto mean = [](const std::vector<double>& v) {
        return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    };
    r.completed_rounds = accuracies.size();
    if (!accuracies.empty()) {
        r.mean_accuracy = mean(accuracies);
        r.mean_error = 1.0 - r.mean_accuracy;
        if (accuracies.size() >= 2) {
            double ss = 0.0;
            for (const double a : accuracies) ss += (a - r.mean_accuracy) * (a - r.mean_accuracy);
            const double sd = std::sqrt(ss / static_cast<double>(accuracies.size() - 1));
            r.sem = sd / std::sqrt(static_cast<double>(accuracies.size()));
        }
    }
    if (!pos_rates.empty()) r.positive_error_rate = mean(pos_rates);
    if (!neg_rates.empty()) r.negative_error_rate = mean(neg_rates);
    r.per_patient_accuracy.assign(n, std::nullopt);
    for (std::size_t i = 0; i < n; ++i) {
        if (r.per_patient_tests[i] > 0) {
            r.per_patient_accuracy[i] =
                static_cast<double>(correct[i]) / static_cast<double>(r.per_patient_tests[i]);
        }
    }
    if (selections.size() >= 2 && r.config.stability_top > 0) {
        std::size_t shortest = selections.front().size();
        for (const auto& s : selections) shortest = std::min(shortest, s.size());
        r.stability = stability(selections, std::min(r.config.stability_top, shortest));
    }
}

EvaluationReport new_report(const char* harness, const ExpressionMatrix& m, const PhenotypeLabels& y,
                            const PipelineConfig& cfg) {
    EvaluationReport r;
    r.harness = harness;
    r.config = cfg;
    r.sample_ids = m.sample_ids;
    r.labels = y.labels;
    r.rounds.resize(cfg.rounds);
    return r;
}

}  // namespace

EvaluationReport mccv(const ExpressionMatrix& m, const PhenotypeLabels& y, const PipelineConfig& cfg) {
    check_inputs(m, y, cfg);
    if (cfg.train_size < 4 || cfg.train_size >= m.samples()) {
        throw ArgumentError("MCCV train size must be at least 4 and below the sample count");
    }
    auto report = new_report("mccv", m, y, cfg);
    detail::parallel_for(cfg.rounds, cfg.threads, [&](std::size_t r) {
        RoundRecord& rec = report.rounds[r];
        rec.round = r;
        Rng rng = make_rng(*cfg.seed, r);
        FoldRecord fold;
        for (rec.attempts = 1; rec.attempts <= cfg.max_split_attempts; ++rec.attempts) {
            try {
                auto [train, test] = balanced_split(y.labels, cfg.train_size, rng);
                std::size_t train_pos = 0;
                for (const auto i : train) train_pos += y.labels[i] ? 1 : 0;
                if (train_pos < 2 || train.size() - train_pos < 2) {
                    continue;
                }
                try {
                    fold.outcome = run_split(m, y, std::move(train), std::move(test), cfg);
                } catch (const Error& e) {
                    fold.error = e.what();
                }
                break;
            } catch (const Error& e) {
                rec.error = e.what();
            }
        }
        if (rec.attempts > cfg.max_split_attempts) {
            rec.attempts = cfg.max_split_attempts;
            if (rec.error.empty()) {
                rec.error = "no class-valid split after " + std::to_string(cfg.max_split_attempts) + " attempts";
            }
        } else {
            rec.error.clear();
            rec.folds.push_back(std::move(fold));
        }
    });
    aggregate(report);
    return report;
}

EvaluationReport kfold_eval(const ExpressionMatrix& m, const PhenotypeLabels& y,
                            const PipelineConfig& cfg) {
    check_inputs(m, y, cfg);
    if (cfg.folds < 2 || cfg.folds > m.samples()) {
        throw ArgumentError("fold count must be between 2 and the sample count");
    }
    auto report = new_report("kfold", m, y, cfg);
    const std::size_t n = m.samples();
    // Each (round, fold) pair is an independent work unit.
    std::vector<std::vector<std::size_t>> fold_of(cfg.rounds);
    for (std::size_t r = 0; r < cfg.rounds; ++r) {
        fold_of[r] = split_folds(n, cfg.folds, *cfg.seed, r);
        report.rounds[r].round = r;
        report.rounds[r].folds.resize(cfg.folds);
    }
    detail::parallel_for(cfg.rounds * cfg.folds, cfg.threads, [&](std::size_t unit) {
        const std::size_t r = unit / cfg.folds;
        const std::size_t f = unit % cfg.folds;
        FoldRecord& fold = report.rounds[r].folds[f];
        fold.fold = f;
        std::vector<std::size_t> train, test;
        for (std::size_t i = 0; i < n; ++i) {
            (fold_of[r][i] == f ? test : train).push_back(i);
        }
        try {
            fold.outcome = run_split(m, y, std::move(train), std::move(test), cfg);
        } catch (const Error& e) {
            fold.error = e.what();
        }
    });
    for (auto& round : report.rounds) {
        if (!round.completed()) round.error = "every fold aborted";
    }
    aggregate(report);
    return report;
}

}  // namespace pnet
