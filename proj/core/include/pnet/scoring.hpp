#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "pnet/kernel.hpp"

namespace pnet {

/// A subset of the node indices {0, ..., universe - 1}.
class NodeSet {
public:
    NodeSet() = default;
    NodeSet(std::size_t universe, std::vector<std::size_t> members);

    static NodeSet all(std::size_t universe);
    static NodeSet from_mask(const std::vector<bool>& mask);

    std::size_t universe() const { return mask_.size(); }
    std::size_t size() const { return members_.size(); }
    bool empty() const { return members_.empty(); }
    bool contains(std::size_t i) const { return i < mask_.size() && mask_[i] != 0; }
    const std::vector<std::size_t>& members() const { return members_; }

    NodeSet without(std::size_t i) const;
    NodeSet intersect(const NodeSet& other) const;
    NodeSet minus(const NodeSet& other) const;
    NodeSet complement() const;

    friend bool operator==(const NodeSet&, const NodeSet&) = default;

private:
    std::vector<std::size_t> members_;  // ascending
    std::vector<char> mask_;
};

enum class ScoreKind { average, nearest, knn, total, diff, dnorm };

ScoreKind score_kind_from_string(const std::string& name);
std::string to_string(ScoreKind kind);

struct ScoreSpec {
    ScoreKind kind = ScoreKind::nearest;
    std::size_t k = 3;  // knn only

    void validate() const;
    std::string describe() const;
};

/// Result of a single score evaluation; `zero_denominator` marks total/dnorm
/// rows whose denominator vanished and were assigned 0.
struct NodeScore {
    double value = 0.0;
    bool zero_denominator = false;
};

/// Score of one node from its kernel row. `positives` and `negatives` are the
/// labelled sets of each class; other indices are ignored. The row is used
/// as given, diagonal included.
NodeScore score_node(std::span<const double> kernel_row, const NodeSet& positives,
                     const NodeSet& negatives, const ScoreSpec& spec);

/// Same with negatives = every index not in `positives`.
double score_node(std::span<const double> kernel_row, const NodeSet& positives,
                  const ScoreSpec& spec);

struct ScoreVector {
    std::vector<std::string> sample_ids;
    std::vector<double> scores;
    std::size_t zero_denominators = 0;

    std::size_t size() const { return scores.size(); }
};

/// Scores of `targets` (in ascending index order) from the rows of K.
ScoreVector score_all(const KernelMatrix& k, const NodeSet& positives, const NodeSet& negatives,
                      const ScoreSpec& spec, const NodeSet& targets);

ScoreVector score_all(const KernelMatrix& k, const NodeSet& positives, const ScoreSpec& spec,
                      const NodeSet& targets);

/// Descending score; ties by ascending sample id.
std::vector<std::string> rank_samples(const ScoreVector& s);

/// TSV: sample_id, score, rank (1 = highest).
void save_scores(const ScoreVector& s, const std::filesystem::path& path);
ScoreVector load_scores(const std::filesystem::path& path);

}  // namespace pnet
