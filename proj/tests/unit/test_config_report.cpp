#include <gtest/gtest.h>

#include <json.hpp>

#include "pnet/config.hpp"
#include "pnet/report.hpp"
#include "test_util.hpp"

using namespace pnet;
using fixtures::TempDir;
using fixtures::write_file;

TEST(Config, ParsesSectionsAndComments) {
    const auto cfg = parse_config(
        "# experiment\n"
        "score.kind = knn\n"
        "[kernel]\n"
        "kind = random_walk ; lazy walk\n"
        "p = 4\n"
        "a = 3\n"
        "[run]\n"
        "seed = 17\n"
        "rounds = 12\n",
        "mem");
    EXPECT_EQ(cfg.pipeline.kernel.steps, 4);
    EXPECT_EQ(cfg.pipeline.kernel.a, 3.0);
    EXPECT_EQ(*cfg.pipeline.seed, 17u);
    EXPECT_EQ(cfg.pipeline.rounds, 12u);
    EXPECT_EQ(cfg.pipeline.score.kind, ScoreKind::knn);
    // keys after a section header are prefixed
    EXPECT_THROW(parse_config("[run]\nscore.kind = knn\n", "mem"), ArgumentError);
}

TEST(Config, EveryListedKeyIsAccepted) {
    const std::map<std::string, std::string> sample = {
        {"featsel.method", "moderated"}, {"featsel.top_k", "50"},       {"featsel.shrink", "false"},
        {"similarity.method", "kendall"}, {"kernel.kind", "gaussian"},  {"kernel.p", "3"},
        {"kernel.a", "2.5"},             {"kernel.sigma", "0.5"},       {"kernel.c", "1"},
        {"kernel.degree", "3"},          {"kernel.alpha", "0.5"},       {"kernel.nonneg", "affine"},
        {"score.kind", "dnorm"},         {"score.k", "4"},              {"threshold.edge_grid", "0,0.5"},
        {"threshold.score_grid", "0,0.25,0.5"}, {"run.seed", "3"},      {"run.rounds", "7"},
        {"run.train_size", "20"},        {"run.folds", "3"},            {"run.threads", "2"},
        {"run.stability_top", "5"},      {"run.max_attempts", "9"},     {"data.expression", "e.tsv"},
        {"data.labels", "l.tsv"},        {"data.format", "csv"}};
    RunConfig cfg;
    for (const auto& key : config_keys()) {
        ASSERT_TRUE(sample.count(key)) << key;
        EXPECT_NO_THROW(apply_setting(cfg, key, sample.at(key))) << key;
    }
    EXPECT_EQ(config_keys().size(), sample.size());
    EXPECT_EQ(cfg.pipeline.featsel, FeatureSelection::moderated);
    EXPECT_FALSE(cfg.pipeline.moderated_shrink);
    EXPECT_EQ(cfg.pipeline.similarity, Correlation::kendall);
    EXPECT_EQ(cfg.pipeline.kernel.nonnegativity, Nonnegativity::affine);
    EXPECT_EQ(cfg.pipeline.score_grid.levels.size(), 3u);
    EXPECT_EQ(cfg.pipeline.max_split_attempts, 9u);
    EXPECT_EQ(*cfg.format, TableFormat::csv);
}

TEST(Config, ErrorsCarryLocation) {
    try {
        parse_config("run.seed = 1\nkernel.q = 2\n", "exp.cfg");
        FAIL();
    } catch (const ArgumentError& e) {
        EXPECT_NE(std::string(e.what()).find("exp.cfg:2"), std::string::npos) << e.what();
    }
    EXPECT_THROW(parse_config("run.rounds = -3\n", "x"), ArgumentError);
    EXPECT_THROW(parse_config("run.rounds\n", "x"), ArgumentError);
    EXPECT_THROW(parse_config("[run\n", "x"), ArgumentError);
    EXPECT_THROW(parse_config("featsel.shrink = maybe\n", "x"), ArgumentError);
}

TEST(Config, DataPathsRelativeToConfigFile) {
    TempDir dir;
    std::filesystem::create_directories(dir / "exp");
    write_file(dir / "exp" / "run.cfg", "[data]\nexpression = expr.tsv\nlabels = /abs/labels.tsv\n");
    const auto cfg = load_config(dir / "exp" / "run.cfg");
    EXPECT_EQ(*cfg.expression, dir / "exp" / "expr.tsv");
    EXPECT_EQ(*cfg.labels, std::filesystem::path("/abs/labels.tsv"));
}

namespace {

EvaluationReport small_report() {
    const auto c = synth_cohort(24, 60, 10, 2.0, 3);
    PipelineConfig cfg;
    cfg.top_k = 20;
    cfg.seed = 5;
    cfg.rounds = 3;
    cfg.train_size = 16;
    cfg.stability_top = 5;
    return mccv(c.matrix, c.labels, cfg);
}

}  // namespace

TEST(Report, JsonStructureAndValues) {
    const auto r = small_report();
    const auto j = nlohmann::json::parse(report_json(r));
    EXPECT_EQ(j["harness"], "mccv");
    EXPECT_EQ(j["config"]["seed"], 5);
    EXPECT_FALSE(j["config"].contains("threads"));
    EXPECT_DOUBLE_EQ(j["aggregate"]["mean_accuracy"].get<double>(), r.mean_accuracy);
    EXPECT_DOUBLE_EQ(j["aggregate"]["sem"].get<double>(), r.sem);
    ASSERT_EQ(j["rounds"].size(), 3u);
    ASSERT_EQ(j["patients"].size(), 24u);
    const auto& fold = j["rounds"][0]["folds"][0];
    EXPECT_EQ(fold["test"].size(), 8u);
    EXPECT_EQ(fold["top_features"].size(), 5u);
    EXPECT_EQ(fold["predictions"].size(), 8u);
    EXPECT_TRUE(j["metadata"].contains("sem"));
}

TEST(Report, RoundTripsThroughFileExactly) {
    const auto r = small_report();
    TempDir dir;
    save_report_json(r, dir / "r.json");
    std::ifstream in(dir / "r.json");
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    EXPECT_EQ(text, report_json(r));
    const auto j = nlohmann::json::parse(text);
    EXPECT_EQ(j["aggregate"]["mean_accuracy"].get<double>(), r.mean_accuracy);  // %.17g is lossless
}

TEST(Report, RoundTableColumnsAndNa) {
    auto r = small_report();
    r.rounds[1].folds.clear();
    r.rounds[1].error = "forced";
    const auto tsv = round_table_tsv(r);
    std::vector<std::string> lines;
    std::stringstream ss(tsv);
    for (std::string line; std::getline(ss, line);) lines.push_back(line);
    ASSERT_EQ(lines.size(), 4u);
    EXPECT_EQ(lines[0], "round\tattempts\tcompleted\taccuracy\terror_rate\tpositive_error_rate\tnegative_error_rate");
    EXPECT_NE(lines[2].find("\t0\tNA\tNA\tNA\tNA"), std::string::npos);
    for (const auto& l : lines) EXPECT_EQ(std::count(l.begin(), l.end(), '\t'), 6);
}

TEST(Report, DescribeMentionsKeySettings) {
    PipelineConfig cfg;
    cfg.kernel.steps = 8;
    const auto d = describe(cfg);
    EXPECT_NE(d.find("p=8"), std::string::npos) << d;
}
