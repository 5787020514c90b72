#include "pnet/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "pnet/io.hpp"
#include "pnet/rng.hpp"

namespace pnet {

namespace {

void require_unique(const std::vector<std::string>& ids, const char* what) {
    std::unordered_set<std::string> seen;
    seen.reserve(ids.size());
    for (const auto& id : ids) {
        if (!seen.insert(id).second) {
            throw DataError(std::string("duplicate ") + what + " id '" + id + "'");
        }
    }
}

std::string location(const std::filesystem::path& path, std::size_t line, std::size_t column) {
    return path.filename().string() + " line " + std::to_string(line) + ", column " +
           std::to_string(column);
}

ExpressionMatrix keep_rows(const ExpressionMatrix& m, const std::vector<std::size_t>& rows,
                           const char* filter) {
    if (rows.empty()) {
        throw DataError(std::string(filter) + " removed every feature (empty matrix)");
    }
    return m.select_rows(rows);
}

}  // namespace

void ExpressionMatrix::validate() const {
    if (static_cast<std::size_t>(values.rows()) != feature_ids.size() ||
        static_cast<std::size_t>(values.cols()) != sample_ids.size()) {
        throw DataError("expression matrix shape does not match its ids");
    }
    require_unique(feature_ids, "feature");
    require_unique(sample_ids, "sample");
    if (!values.allFinite()) {
        throw DataError("expression matrix contains non-finite values");
    }
}

ExpressionMatrix ExpressionMatrix::select_rows(std::span<const std::size_t> rows) const {
    ExpressionMatrix out;
    out.sample_ids = sample_ids;
    out.values.resize(static_cast<Eigen::Index>(rows.size()), values.cols());
    out.feature_ids.reserve(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        out.feature_ids.push_back(feature_ids.at(rows[r]));
        out.values.row(static_cast<Eigen::Index>(r)) = values.row(static_cast<Eigen::Index>(rows[r]));
    }
    return out;
}

ExpressionMatrix ExpressionMatrix::select_columns(std::span<const std::size_t> columns) const {
    ExpressionMatrix out;
    out.feature_ids = feature_ids;
    out.values.resize(values.rows(), static_cast<Eigen::Index>(columns.size()));
    out.sample_ids.reserve(columns.size());
    for (std::size_t c = 0; c < columns.size(); ++c) {
        out.sample_ids.push_back(sample_ids.at(columns[c]));
        out.values.col(static_cast<Eigen::Index>(c)) = values.col(static_cast<Eigen::Index>(columns[c]));
    }
    return out;
}

std::size_t PhenotypeLabels::positives() const {
    return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), true));
}

PhenotypeLabels PhenotypeLabels::aligned_to(const std::vector<std::string>& ids) const {
    std::unordered_map<std::string, bool> by_id;
    for (std::size_t i = 0; i < sample_ids.size(); ++i) {
        by_id.emplace(sample_ids[i], labels[i]);
    }
    PhenotypeLabels out;
    out.sample_ids = ids;
    out.labels.reserve(ids.size());
    for (const auto& id : ids) {
        auto it = by_id.find(id);
        if (it == by_id.end()) {
            throw DataError("no label for sample '" + id + "'");
        }
        out.labels.push_back(it->second);
    }
    return out;
}

std::unordered_map<std::string, std::string> ProbeGeneMap::lookup() const {
    std::unordered_map<std::string, std::string> out;
    out.reserve(entries.size());
    for (const auto& [probe, gene] : entries) {
        if (!out.emplace(probe, gene).second) {
            throw DataError("duplicate probe id '" + probe + "' in probe map");
        }
    }
    return out;
}

TableFormat table_format_from_path(const std::filesystem::path& path) {
    return path.extension() == ".csv" ? TableFormat::csv : TableFormat::tsv;
}

ExpressionMatrix load_expression(const std::filesystem::path& path, TableFormat format) {
    const char delim = format == TableFormat::csv ? ',' : '\t';
    const auto records = io::read_delimited(path, delim);
    if (records.size() < 2) {
        throw DataError(path.string() + ": expected a header row and at least one feature row");
    }
    const auto& header = records.front();
    const std::size_t body_width = records[1].fields.size();
    if (body_width < 2) {
        throw DataError(location(path, records[1].line, 1) + ": row has no expression values");
    }
    const std::size_t n = body_width - 1;
    std::size_t first_id = 0;
    if (header.fields.size() == body_width) {
        first_id = 1;  // corner label
    } else if (header.fields.size() != n) {
        throw DataError(location(path, header.line, 1) + ": header has " +
                        std::to_string(header.fields.size()) + " fields but rows have " +
                        std::to_string(body_width));
    }

    ExpressionMatrix m;
    m.sample_ids.assign(header.fields.begin() + static_cast<std::ptrdiff_t>(first_id),
                        header.fields.end());
    m.values.resize(static_cast<Eigen::Index>(records.size() - 1), static_cast<Eigen::Index>(n));
    m.feature_ids.reserve(records.size() - 1);
    for (std::size_t r = 1; r < records.size(); ++r) {
        const auto& rec = records[r];
        if (rec.fields.size() != body_width) {
            throw DataError(location(path, rec.line, rec.fields.size()) + ": ragged row with " +
                            std::to_string(rec.fields.size()) + " fields, expected " +
                            std::to_string(body_width));
        }
        m.feature_ids.push_back(rec.fields[0]);
        for (std::size_t c = 0; c < n; ++c) {
            m.values(static_cast<Eigen::Index>(r - 1), static_cast<Eigen::Index>(c)) =
                io::parse_double(rec.fields[c + 1], location(path, rec.line, c + 2));
        }
    }
    m.validate();
    return m;
}

void save_expression(const ExpressionMatrix& m, const std::filesystem::path& path,
                     TableFormat format) {
    const char delim = format == TableFormat::csv ? ',' : '\t';
    std::string out = "feature_id";
    for (const auto& id : m.sample_ids) {
        out += delim;
        out += id;
    }
    out += '\n';
    for (std::size_t r = 0; r < m.features(); ++r) {
        out += m.feature_ids[r];
        for (std::size_t c = 0; c < m.samples(); ++c) {
            out += delim;
            out += io::format_double(m.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)));
        }
        out += '\n';
    }
    io::write_text_atomic(path, out);
}

namespace {

bool parse_label(const std::string& text, bool& value) {
    if (text == "1" || text == "true" || text == "TRUE") {
        value = true;
        return true;
    }
    if (text == "0" || text == "false" || text == "FALSE") {
        value = false;
        return true;
    }
    return false;
}

}  // namespace

PhenotypeLabels load_labels(const std::filesystem::path& path) {
    const auto records = io::read_delimited(path, '\t');
    PhenotypeLabels out;
    for (std::size_t r = 0; r < records.size(); ++r) {
        const auto& rec = records[r];
        if (rec.fields.size() != 2) {
            throw DataError(location(path, rec.line, 1) + ": expected 2 fields (sample id, label)");
        }
        bool value = false;
        if (!parse_label(rec.fields[1], value)) {
            if (r == 0) {
                continue;  // header
            }
            throw DataError(location(path, rec.line, 2) + ": label must be 0 or 1, got '" +
                            rec.fields[1] + "'");
        }
        out.sample_ids.push_back(rec.fields[0]);
        out.labels.push_back(value);
    }
    require_unique(out.sample_ids, "sample");
    return out;
}

void save_labels(const PhenotypeLabels& labels, const std::filesystem::path& path) {
    std::string out = "sample_id\tlabel\n";
    for (std::size_t i = 0; i < labels.size(); ++i) {
        out += labels.sample_ids[i];
        out += labels.labels[i] ? "\t1\n" : "\t0\n";
    }
    io::write_text_atomic(path, out);
}

std::pair<std::vector<std::string>, std::vector<double>> load_survival(
    const std::filesystem::path& path) {
    const auto records = io::read_delimited(path, '\t');
    std::vector<std::string> ids;
    std::vector<double> values;
    for (std::size_t r = 0; r < records.size(); ++r) {
        const auto& rec = records[r];
        if (rec.fields.size() != 2) {
            throw DataError(location(path, rec.line, 1) + ": expected 2 fields (sample id, survival)");
        }
        if (r == 0) {
            try {
                (void)io::parse_double(rec.fields[1], "");
            } catch (const DataError&) {
                continue;  // header
            }
        }
        ids.push_back(rec.fields[0]);
        values.push_back(io::parse_double(rec.fields[1], location(path, rec.line, 2)));
    }
    require_unique(ids, "sample");
    return {std::move(ids), std::move(values)};
}

ProbeGeneMap load_probe_map(const std::filesystem::path& path) {
    const auto records = io::read_delimited(path, '\t');
    ProbeGeneMap map;
    for (const auto& rec : records) {
        if (rec.fields.size() != 2) {
            throw DataError(location(path, rec.line, 1) + ": expected 2 fields (probe id, gene id)");
        }
        map.entries.emplace_back(rec.fields[0], rec.fields[1]);
    }
    (void)map.lookup();  // rejects duplicate probes
    return map;
}

std::unordered_set<std::string> load_id_list(const std::filesystem::path& path) {
    std::unordered_set<std::string> ids;
    for (const auto& rec : io::read_delimited(path, '\t')) {
        if (!rec.fields.empty() && !rec.fields[0].empty()) {
            ids.insert(rec.fields[0]);
        }
    }
    return ids;
}

std::vector<double> row_means(const ExpressionMatrix& m) {
    std::vector<double> out(m.features());
    for (std::size_t r = 0; r < out.size(); ++r) {
        out[r] = m.values.row(static_cast<Eigen::Index>(r)).mean();
    }
    return out;
}

std::vector<double> row_sds(const ExpressionMatrix& m) {
    const auto n = static_cast<double>(m.samples());
    std::vector<double> out(m.features(), 0.0);
    if (m.samples() < 2) {
        return out;
    }
    for (std::size_t r = 0; r < out.size(); ++r) {
        const auto row = m.values.row(static_cast<Eigen::Index>(r));
        const double mean = row.mean();
        out[r] = std::sqrt((row.array() - mean).square().sum() / (n - 1.0));
    }
    return out;
}

ExpressionMatrix filter_by_mean(const ExpressionMatrix& m, double min_mean) {
    const auto means = row_means(m);
    std::vector<std::size_t> keep;
    for (std::size_t r = 0; r < means.size(); ++r) {
        if (means[r] >= min_mean) {
            keep.push_back(r);
        }
    }
    return keep_rows(m, keep, "mean filter");
}

ExpressionMatrix filter_by_sd(const ExpressionMatrix& m, double min_sd) {
    const auto sds = row_sds(m);
    std::vector<std::size_t> keep;
    for (std::size_t r = 0; r < sds.size(); ++r) {
        if (sds[r] >= min_sd) {
            keep.push_back(r);
        }
    }
    return keep_rows(m, keep, "sd filter");
}

CollapseResult collapse_probes(const ExpressionMatrix& m, const ProbeGeneMap& map) {
    const auto gene_of = map.lookup();
    const auto means = row_means(m);

    std::vector<std::string> gene_order;
    std::unordered_map<std::string, std::size_t> best;  // gene -> row
    std::size_t unmapped = 0;
    for (std::size_t r = 0; r < m.features(); ++r) {
        auto it = gene_of.find(m.feature_ids[r]);
        if (it == gene_of.end()) {
            ++unmapped;
            continue;
        }
        auto [slot, inserted] = best.emplace(it->second, r);
        if (inserted) {
            gene_order.push_back(it->second);
        } else if (means[r] > means[slot->second]) {
            slot->second = r;
        }
    }
    std::vector<std::size_t> rows;
    rows.reserve(gene_order.size());
    for (const auto& gene : gene_order) {
        rows.push_back(best.at(gene));
    }
    CollapseResult out{keep_rows(m, rows, "probe collapse"), unmapped};
    out.matrix.feature_ids = gene_order;
    return out;
}

ExpressionMatrix filter_by_gene_list(const ExpressionMatrix& m,
                                     const std::unordered_set<std::string>& ids) {
    if (ids.empty()) {
        throw ArgumentError("gene list is empty");
    }
    std::vector<std::size_t> keep;
    for (std::size_t r = 0; r < m.features(); ++r) {
        if (ids.contains(m.feature_ids[r])) {
            keep.push_back(r);
        }
    }
    return keep_rows(m, keep, "gene-list filter");
}

PhenotypeLabels derive_labels(const std::vector<std::string>& sample_ids,
                              std::span<const double> survival, double cutoff,
                              Diagnostics* diag) {
    if (sample_ids.size() != survival.size()) {
        throw ArgumentError("survival vector and sample ids differ in length");
    }
    if (!(cutoff > 0.0) || !std::isfinite(cutoff)) {
        throw ArgumentError("survival cutoff must be a positive finite number");
    }
    PhenotypeLabels out;
    out.sample_ids = sample_ids;
    out.labels.reserve(survival.size());
    for (const double s : survival) {
        if (!std::isfinite(s)) {
            throw DataError("non-finite survival time");
        }
        out.labels.push_back(s < cutoff);
    }
    if (!out.has_both_classes()) {
        warn(diag, "survival cutoff " + io::format_double(cutoff) +
                       " puts every sample in one class");
    }
    return out;
}

Cohort synth_cohort(std::size_t n_samples, std::size_t n_features, std::size_t n_informative,
                    double effect_size, std::uint64_t seed) {
    if (n_samples < 4 || n_features < 1 || n_informative > n_features) {
        throw ArgumentError("synth_cohort needs >= 4 samples, >= 1 feature and "
                            "n_informative <= n_features");
    }
    if (!std::isfinite(effect_size)) {
        throw ArgumentError("effect size must be finite");
    }
    Rng rng(derive_seed(seed, 0));
    std::uniform_real_distribution<double> baseline(4.0, 12.0);
    std::uniform_real_distribution<double> spread(0.4, 1.2);
    std::normal_distribution<double> noise(0.0, 1.0);

    Cohort c;
    auto& labels = c.labels;
    labels.labels.assign(n_samples, false);
    std::fill_n(labels.labels.begin(), n_samples / 2, true);
    std::shuffle(labels.labels.begin(), labels.labels.end(), rng);

    const int width_s = static_cast<int>(std::to_string(n_samples - 1).size());
    const int width_f = static_cast<int>(std::to_string(n_features - 1).size());
    auto pad = [](std::size_t v, int width) {
        auto s = std::to_string(v);
        return std::string(static_cast<std::size_t>(std::max(0, width - static_cast<int>(s.size()))), '0') + s;
    };
    for (std::size_t s = 0; s < n_samples; ++s) {
        labels.sample_ids.push_back("s" + pad(s, width_s));
    }
    c.matrix.sample_ids = labels.sample_ids;
    c.matrix.values.resize(static_cast<Eigen::Index>(n_features), static_cast<Eigen::Index>(n_samples));
    for (std::size_t f = 0; f < n_features; ++f) {
        c.matrix.feature_ids.push_back("f" + pad(f, width_f));
        const double mu = baseline(rng);
        const double sd = spread(rng);
        const double shift = f < n_informative ? effect_size * sd : 0.0;
        for (std::size_t s = 0; s < n_samples; ++s) {
            double v = mu + sd * noise(rng);
            if (labels.labels[s]) {
                v += shift;
            }
            c.matrix.values(static_cast<Eigen::Index>(f), static_cast<Eigen::Index>(s)) = v;
        }
    }
    return c;
}

}  // namespace pnet
