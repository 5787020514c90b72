#include "cli.hpp"

#include <cstdlib>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "CLI11.hpp"
#include "pnet/config.hpp"
#include "pnet/graph_export.hpp"
#include "pnet/io.hpp"
#include "pnet/report.hpp"

namespace pnet::cli {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

TableFormat format_for(const std::string& flag, const std::filesystem::path& path) {
    if (flag.empty()) return table_format_from_path(path);
    if (flag == "tsv") return TableFormat::tsv;
    if (flag == "csv") return TableFormat::csv;
    throw ArgumentError("--format must be tsv or csv");
}

std::size_t default_threads() {
    if (const char* env = std::getenv("PNET_THREADS"); env != nullptr && *env != '\0') {
        const auto v = io::parse_integer(env, "PNET_THREADS");
        if (v < 1) throw ArgumentError("PNET_THREADS must be >= 1");
        return static_cast<std::size_t>(v);
    }
    return 1;
}

std::vector<std::string> read_id_lines(const std::filesystem::path& path) {
    std::vector<std::string> ids;
    for (const auto& rec : io::read_delimited(path, '\t')) {
        if (!rec.fields.empty() && !rec.fields[0].empty()) ids.push_back(rec.fields[0]);
    }
    if (ids.empty()) throw DataError(path.string() + ": no ids");
    return ids;
}

struct KernelFlags {
    std::string kind = "rwk";
    int p = 1;
    double a = 2.0;
    double sigma = 1.0;
    double c = 0.0;
    int degree = 2;
    double alpha = 1.0;
    std::string nonneg = "clip";

    void add_to(CLI::App* cmd, const std::string& default_kind) {
        kind = default_kind;
        cmd->add_option("--kernel", kind, "identity, linear, gaussian, laplacian, cauchy, invmq, polynomial, rwk")
            ->capture_default_str();
        cmd->add_option("--p", p, "random-walk steps")->capture_default_str();
        cmd->add_option("--a", a, "random-walk laziness (> 1)")->capture_default_str();
        cmd->add_option("--sigma", sigma, "gaussian/laplacian/cauchy scale")->capture_default_str();
        cmd->add_option("--c", c, "linear/polynomial offset, inverse multiquadric constant")->capture_default_str();
        cmd->add_option("--degree", degree, "polynomial degree")->capture_default_str();
        cmd->add_option("--alpha", alpha, "polynomial slope")->capture_default_str();
        cmd->add_option("--nonneg", nonneg, "negative-weight handling for rwk: clip, affine")->capture_default_str();
    }

    KernelSpec spec() const {
        KernelSpec s;
        s.kind = kernel_kind_from_string(kind);
        s.steps = p;
        s.a = a;
        s.sigma = sigma;
        s.c = c;
        s.degree = degree;
        s.alpha = alpha;
        s.nonnegativity = nonnegativity_from_string(nonneg);
        s.validate();
        return s;
    }
};

SimilarityMatrix as_similarity(KernelMatrix k) {
    return {std::move(k.sample_ids), std::move(k.values)};
}

// --- subcommands ----------------------------------------------------------

struct SynthArgs {
    std::size_t samples = 40;
    std::size_t features = 500;
    std::size_t informative = 20;
    double effect = 1.5;
    std::uint64_t seed = 0;
    std::string expr_out, labels_out;
};

void cmd_synth(const SynthArgs& a, std::ostream& out) {
    const auto cohort = synth_cohort(a.samples, a.features, a.informative, a.effect, a.seed);
    save_expression(cohort.matrix, a.expr_out, table_format_from_path(a.expr_out));
    save_labels(cohort.labels, a.labels_out);
    out << "synth: " << a.features << " features x " << a.samples << " samples (" << cohort.labels.positives()
        << " positive), seed " << a.seed << " -> " << a.expr_out << ", " << a.labels_out << '\n';
}

struct PrepArgs {
    std::string in, format, out, map, genes, survival, labels_out;
    std::optional<double> min_mean, min_sd, cutoff;
};

void cmd_prep(const PrepArgs& a, std::ostream& out, std::ostream& err) {
    if (!a.survival.empty() && (!a.cutoff || a.labels_out.empty())) {
        throw ArgumentError("--survival needs --cutoff and --labels-out");
    }
    auto m = load_expression(a.in, format_for(a.format, a.in));
    std::string trail = std::to_string(m.features());
    if (a.min_mean) {
        m = filter_by_mean(m, *a.min_mean);
        trail += " -> mean " + std::to_string(m.features());
    }
    if (a.min_sd) {
        m = filter_by_sd(m, *a.min_sd);
        trail += " -> sd " + std::to_string(m.features());
    }
    if (!a.map.empty()) {
        auto collapsed = collapse_probes(m, load_probe_map(a.map));
        m = std::move(collapsed.matrix);
        trail += " -> genes " + std::to_string(m.features()) + " (" + std::to_string(collapsed.unmapped_probes) +
                 " unmapped probes dropped)";
    }
    if (!a.genes.empty()) {
        m = filter_by_gene_list(m, load_id_list(a.genes));
        trail += " -> gene list " + std::to_string(m.features());
    }
    save_expression(m, a.out, table_format_from_path(a.out));
    std::string label_note;
    if (!a.survival.empty()) {
        const auto [ids, times] = load_survival(a.survival);
        Diagnostics diag;
        const auto y = derive_labels(ids, times, *a.cutoff, &diag);
        for (const auto& w : diag.warnings) err << "pnet: warning: " << w << '\n';
        save_labels(y.aligned_to(m.sample_ids), a.labels_out);
        label_note = ", labels " + std::to_string(y.positives()) + "/" + std::to_string(y.size()) + " positive -> " +
                     a.labels_out;
    }
    out << "prep: features " << trail << ", " << m.samples() << " samples -> " << a.out << label_note << '\n';
}

struct SelectArgs {
    std::string expr, format, labels, method = "welch", out, stats_out;
    std::size_t top_k = 1000;
    bool no_shrink = false;
};

void cmd_select(const SelectArgs& a, std::ostream& out) {
    const auto m = load_expression(a.expr, format_for(a.format, a.expr));
    const auto y = load_labels(a.labels).aligned_to(m.sample_ids);
    const auto method = feature_selection_from_string(a.method);
    FeatureStats stats;
    if (method == FeatureSelection::welch) {
        stats = welch_t(m, y);
    } else if (method == FeatureSelection::moderated) {
        stats = moderated_t(m, y, ModeratedOptions{!a.no_shrink});
    } else {
        throw ArgumentError("select needs --method welch or moderated");
    }
    const auto top = select_top_k(stats, std::min(a.top_k, stats.size()));
    std::string text;
    for (const auto& id : top) text += id + '\n';
    io::write_text_atomic(a.out, text);
    if (!a.stats_out.empty()) save_feature_stats(stats, a.stats_out);
    out << "select: " << a.method << " kept " << top.size() << " of " << stats.size() << " features -> " << a.out
        << '\n';
}

struct SimilarityArgs {
    std::string expr, format, method = "pearson", features, out;
};

void cmd_similarity(const SimilarityArgs& a, std::ostream& out) {
    auto m = load_expression(a.expr, format_for(a.format, a.expr));
    if (!a.features.empty()) m = filter_by_gene_list(m, load_id_list(a.features));
    const auto w = similarity_matrix(m, correlation_from_string(a.method));
    save_similarity(w, a.out);
    out << "similarity: " << a.method << " over " << m.features() << " features, " << w.size() << " samples -> "
        << a.out << '\n';
}

struct KernelArgs {
    std::string in, out, convergence;
    KernelFlags kernel;
};

void cmd_kernel(const KernelArgs& a, std::ostream& out, std::ostream& err) {
    const auto w = as_similarity(load_kernel(a.in));
    if (!a.convergence.empty()) {
        std::vector<int> ps;
        for (const auto& f : io::split(a.convergence, ',')) {
            ps.push_back(static_cast<int>(io::parse_integer(f, "--convergence")));
        }
        const auto res = kernel_convergence(w, ps, a.kernel.a, nonnegativity_from_string(a.kernel.nonneg));
        std::string text = "p\tcorrelation\n";
        for (const auto& pt : res.points) text += std::to_string(pt.p) + '\t' + io::format_double(pt.correlation) + '\n';
        io::write_text_atomic(a.out, text);
        int first_converged = -1;
        for (const auto& pt : res.points) {
            if (pt.correlation >= 0.999 && (first_converged < 0 || pt.p < first_converged)) first_converged = pt.p;
        }
        out << "kernel: convergence over " << res.points.size() << " steps, reference p=" << res.reference_p
            << ", top-two agreement " << fmt(res.reference_agreement) << ", first p with r>=0.999: "
            << (first_converged < 0 ? std::string("none") : std::to_string(first_converged)) << " -> " << a.out
            << '\n';
        return;
    }
    Diagnostics diag;
    const auto k = make_kernel(w, a.kernel.spec(), &diag);
    for (const auto& msg : diag.warnings) err << "pnet: warning: " << msg << '\n';
    save_kernel(k, a.out);
    out << "kernel: " << k.provenance << ", " << k.size() << " samples -> " << a.out << '\n';
}

struct RankArgs {
    std::string in, labels, mode = "double-loo", score = "nn", grid, test, out;
    std::size_t k = 3;
    std::size_t folds = 5;
    std::optional<std::uint64_t> seed;
    KernelFlags kernel;
};

void cmd_rank(const RankArgs& a, std::ostream& out, std::ostream& err) {
    auto w = as_similarity(load_kernel(a.in));
    Diagnostics diag;
    const auto k = make_kernel(w, a.kernel.spec(), &diag);
    for (const auto& msg : diag.warnings) err << "pnet: warning: " << msg << '\n';
    ScoreSpec spec{score_kind_from_string(a.score), a.k};
    spec.validate();
    const auto grid = a.grid.empty() ? QuantileGrid::standard() : QuantileGrid::parse(a.grid);
    const auto labels = load_labels(a.labels);
    const std::size_t n = k.size();

    ScoreVector scores;
    std::string detail;
    if (a.mode == "heldout") {
        if (a.test.empty()) throw ArgumentError("--mode heldout needs --test");
        std::unordered_map<std::string, bool> label_of;
        for (std::size_t i = 0; i < labels.size(); ++i) label_of[labels.sample_ids[i]] = labels.labels[i];
        std::unordered_map<std::string, std::size_t> index_of;
        for (std::size_t i = 0; i < n; ++i) index_of[k.sample_ids[i]] = i;
        std::vector<std::size_t> test_idx;
        for (const auto& id : read_id_lines(a.test)) {
            const auto it = index_of.find(id);
            if (it == index_of.end()) throw DataError("test sample '" + id + "' is not in the matrix");
            test_idx.push_back(it->second);
        }
        const NodeSet test(n, test_idx);
        std::vector<std::size_t> train_idx, pos_idx;
        for (std::size_t i = 0; i < n; ++i) {
            if (test.contains(i)) continue;
            const auto it = label_of.find(k.sample_ids[i]);
            if (it == label_of.end()) continue;  // unlabelled and not a test node
            train_idx.push_back(i);
            if (it->second) pos_idx.push_back(i);
        }
        const auto res = pnet_heldout(k, NodeSet(n, pos_idx), NodeSet(n, train_idx), test, grid, spec);
        scores = res.test_scores;
        detail = "train " + std::to_string(train_idx.size()) + ", test " + std::to_string(test.size()) +
                 ", edge quantile " + fmt(res.quantile) + ", internal AUC " + fmt(res.internal_auc);
    } else {
        const auto y = labels.aligned_to(k.sample_ids);
        const auto positives = NodeSet::from_mask(y.labels);
        if (a.mode == "double-loo") {
            scores = pnet_double_loo(k, positives, grid, spec).scores;
        } else if (a.mode == "cv") {
            if (!a.seed) throw ArgumentError("--mode cv needs --seed");
            const auto res = pnet_cv(k, positives, a.folds, grid, spec, *a.seed);
            scores = res.scores;
            std::size_t aborted = 0;
            for (const auto& e : res.fold_errors) aborted += e.empty() ? 0 : 1;
            detail = std::to_string(a.folds) + " folds, " + std::to_string(aborted) + " aborted, ";
        } else {
            throw ArgumentError("--mode must be double-loo, cv or heldout");
        }
        std::vector<bool> truth;
        std::unordered_map<std::string, bool> label_of;
        for (std::size_t i = 0; i < n; ++i) label_of[y.sample_ids[i]] = y.labels[i];
        for (const auto& id : scores.sample_ids) truth.push_back(label_of.at(id));
        const auto pos = std::count(truth.begin(), truth.end(), true);
        detail += "AUC " + ((pos > 0 && static_cast<std::size_t>(pos) < truth.size())
                                ? fmt(auc(scores.scores, truth))
                                : std::string("NA"));
    }
    if (scores.zero_denominators > 0) {
        err << "pnet: warning: " << scores.zero_denominators << " scores had a zero denominator and were set to 0\n";
    }
    save_scores(scores, a.out);
    out << "rank: " << a.mode << ", " << spec.describe() << ", " << k.provenance << ", " << scores.size()
        << " scored (" << detail << ") -> " << a.out << '\n';
}

struct EvalArgs {
    std::string config, expr, labels, format, out, rounds_out;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> rounds, train_size, folds, threads, top_k, k;
    std::optional<std::string> featsel, similarity, kernel, score, nonneg;
    std::optional<int> p;
    std::optional<double> a;
    std::vector<std::string> sets;
};

RunConfig resolve(const EvalArgs& e) {
    RunConfig rc = e.config.empty() ? RunConfig{} : load_config(e.config);
    auto set = [&](const char* key, const auto& opt) {
        if (!opt) return;
        if constexpr (std::is_same_v<std::decay_t<decltype(*opt)>, std::string>) {
            apply_setting(rc, key, *opt);
        } else {
            apply_setting(rc, key, std::to_string(*opt));
        }
    };
    set("run.seed", e.seed);
    set("run.rounds", e.rounds);
    set("run.train_size", e.train_size);
    set("run.folds", e.folds);
    set("featsel.top_k", e.top_k);
    set("featsel.method", e.featsel);
    set("similarity.method", e.similarity);
    set("kernel.kind", e.kernel);
    set("kernel.nonneg", e.nonneg);
    set("kernel.p", e.p);
    set("score.kind", e.score);
    set("score.k", e.k);
    if (e.a) apply_setting(rc, "kernel.a", io::format_double(*e.a));
    for (const auto& kv : e.sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ArgumentError("--set expects key=value, got '" + kv + "'");
        apply_setting(rc, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (!e.expr.empty()) rc.expression = e.expr;
    if (!e.labels.empty()) rc.labels = e.labels;
    if (!e.format.empty()) rc.format = format_for(e.format, {});
    rc.pipeline.threads = e.threads ? *e.threads : default_threads();
    if (rc.pipeline.threads < 1) throw ArgumentError("--threads must be >= 1");
    if (!rc.expression || !rc.labels) {
        throw ArgumentError("an expression matrix and labels are required (--expr/--labels or data.* config keys)");
    }
    return rc;
}

void cmd_eval(const EvalArgs& e, bool monte_carlo, std::ostream& out) {
    const auto rc = resolve(e);
    const auto m = load_expression(*rc.expression, rc.format ? *rc.format : table_format_from_path(*rc.expression));
    const auto y = load_labels(*rc.labels).aligned_to(m.sample_ids);
    const auto report = monte_carlo ? mccv(m, y, rc.pipeline) : kfold_eval(m, y, rc.pipeline);
    save_report_json(report, e.out);
    if (!e.rounds_out.empty()) save_round_table(report, e.rounds_out);
    out << (monte_carlo ? "eval-mccv: " : "eval-cv: ") << report.completed_rounds << "/" << report.rounds.size()
        << " rounds, accuracy " << fmt(report.mean_accuracy) << " (SEM " << fmt(report.sem) << ")";
    if (report.stability) out << ", stability " << fmt(*report.stability);
    out << " -> " << e.out << '\n';
}

struct ExportArgs {
    std::string in, labels, scores, format, out;
    std::optional<double> quantile;
};

void cmd_export(const ExportArgs& a, std::ostream& out) {
    auto k = load_kernel(a.in);
    if (a.quantile) {
        const double theta = matrix_quantile(k, *a.quantile);
        k = filter_matrix(k, theta);
    }
    GraphData g{k.sample_ids, k.values, std::nullopt, std::nullopt};
    g.weights.diagonal().setZero();
    if (!a.labels.empty()) g.labels = load_labels(a.labels).aligned_to(k.sample_ids).labels;
    if (!a.scores.empty()) {
        const auto s = load_scores(a.scores);
        std::unordered_map<std::string, double> by_id;
        for (std::size_t i = 0; i < s.size(); ++i) by_id[s.sample_ids[i]] = s.scores[i];
        std::vector<double> aligned;
        for (const auto& id : k.sample_ids) {
            const auto it = by_id.find(id);
            if (it == by_id.end()) throw DataError("no score for sample '" + id + "'");
            aligned.push_back(it->second);
        }
        g.scores = std::move(aligned);
    }
    GraphExportSpec spec;
    if (!a.format.empty()) {
        spec.format = graph_format_from_string(a.format);
    } else {
        spec.format = std::filesystem::path(a.out).extension() == ".graphml" ? GraphFormat::graphml : GraphFormat::dot;
    }
    const auto summary = export_graph(g, spec, a.out);
    out << "export-graph: " << to_string(spec.format) << ", " << summary.nodes << " nodes, " << summary.edges
        << " edges -> " << a.out << '\n';
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"P-Net: patient ranking and classification on sample similarity networks", "pnet"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "pnet 0.1.0");
    std::function<void()> action;

    SynthArgs synth;
    auto* c_synth = app.add_subcommand("synth", "Generate a synthetic two-class cohort");
    c_synth->add_option("--samples", synth.samples)->capture_default_str();
    c_synth->add_option("--features", synth.features)->capture_default_str();
    c_synth->add_option("--informative", synth.informative)->capture_default_str();
    c_synth->add_option("--effect", synth.effect, "shift in feature standard deviations")->capture_default_str();
    c_synth->add_option("--seed", synth.seed)->required();
    c_synth->add_option("--out-expr", synth.expr_out)->required();
    c_synth->add_option("--out-labels", synth.labels_out)->required();
    c_synth->callback([&] { action = [&] { cmd_synth(synth, out); }; });

    PrepArgs prep;
    auto* c_prep = app.add_subcommand("prep", "Pre-filter an expression matrix and derive labels");
    c_prep->add_option("--in", prep.in)->required()->check(CLI::ExistingFile);
    c_prep->add_option("--format", prep.format, "tsv or csv (default: by extension)");
    c_prep->add_option("--min-mean", prep.min_mean, "drop rows with mean below this");
    c_prep->add_option("--min-sd", prep.min_sd, "drop rows with standard deviation below this");
    c_prep->add_option("--map", prep.map, "probe-to-gene TSV; keeps the highest-mean probe per gene")
        ->check(CLI::ExistingFile);
    c_prep->add_option("--genes", prep.genes, "keep only features listed (one id per line)")->check(CLI::ExistingFile);
    c_prep->add_option("--survival", prep.survival, "sample id / survival TSV")->check(CLI::ExistingFile);
    c_prep->add_option("--cutoff", prep.cutoff, "positive iff survival < cutoff");
    c_prep->add_option("--labels-out", prep.labels_out);
    c_prep->add_option("--out", prep.out)->required();
    c_prep->callback([&] { action = [&] { cmd_prep(prep, out, err); }; });

    SelectArgs sel;
    auto* c_sel = app.add_subcommand("select", "Rank features by a two-group t statistic");
    c_sel->add_option("--expr", sel.expr)->required()->check(CLI::ExistingFile);
    c_sel->add_option("--format", sel.format);
    c_sel->add_option("--labels", sel.labels)->required()->check(CLI::ExistingFile);
    c_sel->add_option("--method", sel.method, "welch or moderated")->capture_default_str();
    c_sel->add_flag("--no-shrink", sel.no_shrink, "moderated t without variance shrinkage");
    c_sel->add_option("--top-k", sel.top_k)->capture_default_str();
    c_sel->add_option("--stats-out", sel.stats_out, "per-feature t, df, p TSV");
    c_sel->add_option("--out", sel.out, "selected ids, one per line")->required();
    c_sel->callback([&] { action = [&] { cmd_select(sel, out); }; });

    SimilarityArgs sim;
    auto* c_sim = app.add_subcommand("similarity", "Sample-by-sample correlation matrix");
    c_sim->add_option("--expr", sim.expr)->required()->check(CLI::ExistingFile);
    c_sim->add_option("--format", sim.format);
    c_sim->add_option("--method", sim.method, "pearson, spearman or kendall")->capture_default_str();
    c_sim->add_option("--features", sim.features, "restrict to these feature ids")->check(CLI::ExistingFile);
    c_sim->add_option("--out", sim.out)->required();
    c_sim->callback([&] { action = [&] { cmd_similarity(sim, out); }; });

    KernelArgs ker;
    auto* c_ker = app.add_subcommand("kernel", "Kernel matrix from a similarity matrix");
    c_ker->add_option("--in", ker.in)->required()->check(CLI::ExistingFile);
    ker.kernel.add_to(c_ker, "rwk");
    c_ker->add_option("--convergence", ker.convergence,
                      "comma-separated random-walk steps; writes correlation to the largest instead of a kernel");
    c_ker->add_option("--out", ker.out)->required();
    c_ker->callback([&] { action = [&] { cmd_kernel(ker, out, err); }; });

    RankArgs rank;
    auto* c_rank = app.add_subcommand("rank", "Score and rank samples on a fixed graph");
    c_rank->add_option("--in", rank.in, "similarity or kernel TSV")->required()->check(CLI::ExistingFile);
    rank.kernel.add_to(c_rank, "identity");
    c_rank->add_option("--labels", rank.labels)->required()->check(CLI::ExistingFile);
    c_rank->add_option("--mode", rank.mode, "double-loo, cv or heldout")->capture_default_str();
    c_rank->add_option("--score", rank.score, "av, nn, knn, tot, diff, dnorm")->capture_default_str();
    c_rank->add_option("--k", rank.k, "neighbours for knn")->capture_default_str();
    c_rank->add_option("--grid", rank.grid, "edge quantile levels, comma-separated");
    c_rank->add_option("--folds", rank.folds)->capture_default_str();
    c_rank->add_option("--seed", rank.seed);
    c_rank->add_option("--test", rank.test, "held-out sample ids, one per line")->check(CLI::ExistingFile);
    c_rank->add_option("--out", rank.out)->required();
    c_rank->callback([&] { action = [&] { cmd_rank(rank, out, err); }; });

    EvalArgs mc, cv;
    auto add_eval = [&](CLI::App* cmd, EvalArgs& e) {
        cmd->add_option("--config", e.config, "key = value experiment file")->check(CLI::ExistingFile);
        cmd->add_option("--expr", e.expr);
        cmd->add_option("--labels", e.labels);
        cmd->add_option("--format", e.format);
        cmd->add_option("--seed", e.seed);
        cmd->add_option("--rounds", e.rounds);
        cmd->add_option("--threads", e.threads, "worker threads (default: PNET_THREADS or 1)");
        cmd->add_option("--featsel", e.featsel, "welch, moderated or none");
        cmd->add_option("--top-k", e.top_k);
        cmd->add_option("--similarity", e.similarity);
        cmd->add_option("--kernel", e.kernel);
        cmd->add_option("--p", e.p);
        cmd->add_option("--a", e.a);
        cmd->add_option("--nonneg", e.nonneg);
        cmd->add_option("--score", e.score);
        cmd->add_option("--k", e.k);
        cmd->add_option("--set", e.sets, "any config key as key=value");
        cmd->add_option("--out", e.out, "JSON report")->required();
        cmd->add_option("--rounds-out", e.rounds_out, "per-round TSV");
    };
    auto* c_mc = app.add_subcommand("eval-mccv", "Monte Carlo cross-validation with balanced test sets");
    add_eval(c_mc, mc);
    c_mc->add_option("--train-size", mc.train_size);
    c_mc->callback([&] { action = [&] { cmd_eval(mc, true, out); }; });
    auto* c_cv = app.add_subcommand("eval-cv", "Repeated k-fold cross-validation");
    add_eval(c_cv, cv);
    c_cv->add_option("--folds", cv.folds);
    c_cv->callback([&] { action = [&] { cmd_eval(cv, false, out); }; });

    ExportArgs ex;
    auto* c_ex = app.add_subcommand("export-graph", "Write a DOT or GraphML graph of a matrix");
    c_ex->add_option("--in", ex.in)->required()->check(CLI::ExistingFile);
    c_ex->add_option("--labels", ex.labels)->check(CLI::ExistingFile);
    c_ex->add_option("--scores", ex.scores, "scores TSV from rank")->check(CLI::ExistingFile);
    c_ex->add_option("--quantile", ex.quantile, "drop edges below this weight quantile first");
    c_ex->add_option("--format", ex.format, "dot or graphml (default: by extension)");
    c_ex->add_option("--out", ex.out)->required();
    c_ex->callback([&] { action = [&] { cmd_export(ex, out); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? ok : usage_error;
    }
    try {
        action();
        return ok;
    } catch (const ArgumentError& e) {
        err << "pnet: error: " << e.what() << '\n';
        return usage_error;
    } catch (const DataError& e) {
        err << "pnet: error: " << e.what() << '\n';
        return data_error;
    } catch (const std::exception& e) {
        err << "pnet: internal error: " << e.what() << '\n';
        return internal_error;
    }
}

}  // namespace pnet::cli
