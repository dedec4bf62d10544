#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "bsssom/dataset.hpp"
#include "bsssom/matrix.hpp"
#include "bsssom/node.hpp"
#include "bsssom/params.hpp"
#include "bsssom/som_map.hpp"
#include "bsssom/winner_search.hpp"

namespace bsssom {

enum class Phase { organization, convergence };

/// A slice of samples; `labels[i]` is the label visible to training for row i.
struct MiniBatch {
    Matrix samples;
    std::vector<Label> labels;

    std::size_t size() const { return samples.rows(); }
};

/// Samples won by one node, with their mean.
struct WinnerGroup {
    NodeId winner_id = 0;
    std::vector<std::size_t> sample_indices;  // rows of the (sub-)batch
    std::vector<double> x_bar;
    Label label;
};

/// A labeled winner's samples split by class, ascending class id.
struct ClassGroups {
    NodeId winner_id = 0;
    std::vector<WinnerGroup> by_class;

    std::size_t sample_count() const;
};

struct SplitBatch {
    MiniBatch unsupervised;
    MiniBatch supervised;
    std::vector<std::size_t> unsupervised_rows;  // positions in the original batch
    std::vector<std::size_t> supervised_rows;
};

struct UnsupervisedAssignment {
    std::vector<WinnerGroup> groups;  // ascending winner id
    std::vector<std::size_t> orphans;
};

struct SupervisedAssignment {
    std::vector<ClassGroups> case_a;  // undefined-class winner
    std::vector<WinnerGroup> case_b;  // all samples share the winner's class
    std::vector<ClassGroups> case_c;  // at least one foreign class
    std::vector<std::size_t> orphans;
};

struct CaseCResult {
    std::vector<NodeId> duplicates;
    std::vector<ClassId> skipped;  // classes dropped because the map was full
};

/// Partitions rows by label presence, preserving order.
SplitBatch split_batch(const MiniBatch& batch);

/// Mean of the given rows.
std::vector<double> mean_of_rows(const Matrix& samples, std::span<const std::size_t> rows);

/// Groups unlabeled samples by winner. In the organization phase, samples
/// whose best activation is below a_t are returned as orphans; in the
/// convergence phase every sample joins its winner. With an empty snapshot
/// all samples are orphans.
UnsupervisedAssignment assign_winners_unsupervised(const MiniBatch& batch,
                                                   const NodeSnapshot& snapshot,
                                                   const Params& params, Phase phase);

/// Same competition as the unsupervised path, with the accepted groups
/// classified into cases A, B and C by the winner's label. `node_labels`
/// holds the label of each snapshot node (same order as the snapshot).
SupervisedAssignment assign_winners_supervised(const MiniBatch& batch,
                                               const NodeSnapshot& snapshot,
                                               std::span<const Label> node_labels,
                                               const Params& params, Phase phase);

/// Moves the winner (e_b) and its neighbors (e_n) toward the group mean.
void update_with_neighbors(SomMap& map, const WinnerGroup& group);

/// Unlabeled winner: adopt the group's class, then move toward its mean.
void handle_case_a(SomMap& map, const WinnerGroup& group);

/// Same-class winner: the usual supervised update of winner and neighbors.
void handle_case_b(SomMap& map, const WinnerGroup& group);

/// Mixed-class winner: duplicate the winner once per foreign class and move
/// each duplicate toward its class mean. The winner itself only moves when
/// its own class is among the groups. `allow_duplication == false` skips the
/// duplicates entirely.
CaseCResult handle_case_c(SomMap& map, NodeId winner, std::span<const WinnerGroup> groups,
                          bool allow_duplication = true);

/// One mini-batch step against a snapshot taken at batch start.
void train_batch(SomMap& map, const MiniBatch& batch, Phase phase);

/// Gathers dataset rows into a mini-batch with training-visible labels.
MiniBatch make_batch(const Dataset& data, std::span<const std::size_t> rows);

/// Organization epochs, one convergence pass, then a final pruning pass.
SomMap fit(const Dataset& data, const Params& params);

}  // namespace bsssom
