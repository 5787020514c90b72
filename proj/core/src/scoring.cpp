#include "pnet/scoring.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>

#include "pnet/io.hpp"

namespace pnet {

NodeSet::NodeSet(std::size_t universe, std::vector<std::size_t> members)
    : members_(std::move(members)), mask_(universe, 0) {
    std::sort(members_.begin(), members_.end());
    members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
    for (const auto i : members_) {
        if (i >= universe) {
            throw ArgumentError("node index " + std::to_string(i) + " outside 0.." +
                                std::to_string(universe));
        }
        mask_[i] = 1;
    }
}

NodeSet NodeSet::all(std::size_t universe) {
    std::vector<std::size_t> members(universe);
    std::iota(members.begin(), members.end(), std::size_t{0});
    return NodeSet(universe, std::move(members));
}

NodeSet NodeSet::from_mask(const std::vector<bool>& mask) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (mask[i]) members.push_back(i);
    }
    return NodeSet(mask.size(), std::move(members));
}

NodeSet NodeSet::without(std::size_t i) const {
    std::vector<std::size_t> m;
    m.reserve(members_.size());
    for (const auto j : members_) {
        if (j != i) m.push_back(j);
    }
    return NodeSet(universe(), std::move(m));
}

NodeSet NodeSet::intersect(const NodeSet& other) const {
    std::vector<std::size_t> m;
    for (const auto j : members_) {
        if (other.contains(j)) m.push_back(j);
    }
    return NodeSet(universe(), std::move(m));
}

NodeSet NodeSet::minus(const NodeSet& other) const {
    std::vector<std::size_t> m;
    for (const auto j : members_) {
        if (!other.contains(j)) m.push_back(j);
    }
    return NodeSet(universe(), std::move(m));
}

NodeSet NodeSet::complement() const {
    std::vector<std::size_t> m;
    for (std::size_t j = 0; j < universe(); ++j) {
        if (!contains(j)) m.push_back(j);
    }
    return NodeSet(universe(), std::move(m));
}

ScoreKind score_kind_from_string(const std::string& name) {
    if (name == "average" || name == "av") return ScoreKind::average;
    if (name == "nearest" || name == "nn") return ScoreKind::nearest;
    if (name == "knn") return ScoreKind::knn;
    if (name == "total" || name == "tot") return ScoreKind::total;
    if (name == "diff") return ScoreKind::diff;
    if (name == "dnorm") return ScoreKind::dnorm;
    throw ArgumentError("unknown score '" + name + "' (average, nearest, knn, total, diff, dnorm)");
}

std::string to_string(ScoreKind kind) {
    switch (kind) {
        case ScoreKind::average: return "average";
        case ScoreKind::nearest: return "nearest";
        case ScoreKind::knn: return "knn";
        case ScoreKind::total: return "total";
        case ScoreKind::diff: return "diff";
        case ScoreKind::dnorm: return "dnorm";
    }
    return "?";
}

void ScoreSpec::validate() const {
    if (kind == ScoreKind::knn && k < 1) {
        throw ArgumentError("knn score needs k >= 1");
    }
}

std::string ScoreSpec::describe() const {
    return kind == ScoreKind::knn ? "knn k=" + std::to_string(k) : to_string(kind);
}

namespace {

double sum_over(std::span<const double> row, const NodeSet& set) {
    double s = 0.0;
    for (const auto j : set.members()) s += row[j];
    return s;
}

}  // namespace

NodeScore score_node(std::span<const double> row, const NodeSet& positives, const NodeSet& negatives,
                     const ScoreSpec& spec) {
    if (positives.empty()) {
        throw DataError("scoring needs at least one positive node");
    }
    if (positives.universe() != row.size() || negatives.universe() != row.size()) {
        throw ArgumentError("node sets do not match the kernel row length");
    }
    const bool uses_negatives = spec.kind == ScoreKind::total || spec.kind == ScoreKind::diff ||
                                spec.kind == ScoreKind::dnorm;
    if (uses_negatives && negatives.empty()) {
        throw DataError(to_string(spec.kind) + " score needs at least one negative node");
    }

    switch (spec.kind) {
        case ScoreKind::average:
            return {sum_over(row, positives) / static_cast<double>(positives.size()), false};
        case ScoreKind::nearest: {
            double best = row[positives.members().front()];
            for (const auto j : positives.members()) best = std::max(best, row[j]);
            return {best, false};
        }
        case ScoreKind::knn: {
            std::vector<std::size_t> idx = positives.members();
            const std::size_t k = std::min(spec.k, idx.size());
            std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(),
                              [&](std::size_t a, std::size_t b) {
                                  if (row[a] != row[b]) return row[a] > row[b];
                                  return a < b;
                              });
            double s = 0.0;
            for (std::size_t i = 0; i < k; ++i) s += row[idx[i]];
            return {s, false};
        }
        case ScoreKind::total:
        case ScoreKind::diff:
        case ScoreKind::dnorm: {
            const double pos = sum_over(row, positives);
            const double neg = sum_over(row, negatives);
            if (spec.kind == ScoreKind::diff) {
                return {pos - neg, false};
            }
            const double denom = pos + neg;
            if (denom == 0.0) {
                return {0.0, true};
            }
            return {spec.kind == ScoreKind::total ? pos / denom : (pos - neg) / denom, false};
        }
    }
    return {};
}

double score_node(std::span<const double> row, const NodeSet& positives, const ScoreSpec& spec) {
    return score_node(row, positives, positives.complement(), spec).value;
}

ScoreVector score_all(const KernelMatrix& k, const NodeSet& positives, const NodeSet& negatives,
                      const ScoreSpec& spec, const NodeSet& targets) {
    spec.validate();
    const auto n = static_cast<std::size_t>(k.values.rows());
    if (targets.universe() != n) {
        throw ArgumentError("target set does not match the kernel size");
    }
    ScoreVector out;
    out.sample_ids.reserve(targets.size());
    out.scores.reserve(targets.size());
    for (const auto i : targets.members()) {
        // K is symmetric and column-major: column i is row i, contiguous.
        const std::span<const double> row(k.values.col(static_cast<Eigen::Index>(i)).data(), n);
        const auto s = score_node(row, positives, negatives, spec);
        out.sample_ids.push_back(k.sample_ids[i]);
        out.scores.push_back(s.value);
        out.zero_denominators += s.zero_denominator ? 1 : 0;
    }
    return out;
}

ScoreVector score_all(const KernelMatrix& k, const NodeSet& positives, const ScoreSpec& spec,
                      const NodeSet& targets) {
    return score_all(k, positives, positives.complement(), spec, targets);
}

std::vector<std::string> rank_samples(const ScoreVector& s) {
    std::vector<std::size_t> order(s.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (s.scores[a] != s.scores[b]) return s.scores[a] > s.scores[b];
        return s.sample_ids[a] < s.sample_ids[b];
    });
    std::vector<std::string> ids;
    ids.reserve(order.size());
    for (const auto i : order) ids.push_back(s.sample_ids[i]);
    return ids;
}

void save_scores(const ScoreVector& s, const std::filesystem::path& path) {
    const auto ranked = rank_samples(s);
    std::unordered_map<std::string, std::size_t> rank;
    for (std::size_t r = 0; r < ranked.size(); ++r) rank.emplace(ranked[r], r + 1);
    std::string out = "sample_id\tscore\trank\n";
    for (std::size_t i = 0; i < s.size(); ++i) {
        out += s.sample_ids[i] + '\t' + io::format_double(s.scores[i]) + '\t' +
               std::to_string(rank.at(s.sample_ids[i])) + '\n';
    }
    io::write_text_atomic(path, out);
}

ScoreVector load_scores(const std::filesystem::path& path) {
    ScoreVector s;
    const auto records = io::read_delimited(path, '\t');
    for (std::size_t r = 0; r < records.size(); ++r) {
        const auto& rec = records[r];
        if (r == 0 && !rec.fields.empty() && rec.fields[0] == "sample_id") continue;
        if (rec.fields.size() < 2) {
            throw DataError(path.string() + " line " + std::to_string(rec.line) +
                            ": expected sample_id and score");
        }
        s.sample_ids.push_back(rec.fields[0]);
        s.scores.push_back(io::parse_double(rec.fields[1], path.string() + " line " + std::to_string(rec.line)));
    }
    return s;
}

}  // namespace pnet
