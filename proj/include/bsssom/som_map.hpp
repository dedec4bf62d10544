#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "bsssom/node.hpp"
#include "bsssom/params.hpp"

namespace bsssom {

/// The evolving graph of prototypes.
///
/// Nodes are kept in ascending id order; ids are never reused. Edges are
/// undirected and only ever join label-compatible nodes whose relevance
/// vectors are closer than `minwd`. The node count never exceeds
/// `params().max_nodes`.
class SomMap {
public:
    using Edge = std::pair<NodeId, NodeId>;  // first < second

    SomMap(std::size_t dim, Params params);

    /// Rebuilds a map from serialized state. Throws InputError if the state
    /// violates a map invariant.
    static SomMap restore(std::size_t dim, Params params, std::vector<Node> nodes,
                          const std::vector<Edge>& edges, std::uint64_t competition_count,
                          NodeId next_id);

    std::size_t dim() const { return dim_; }
    const Params& params() const { return params_; }
    std::size_t size() const { return nodes_.size(); }
    bool empty() const { return nodes_.empty(); }
    bool at_capacity() const { return nodes_.size() >= params_.max_nodes; }

    const std::vector<Node>& nodes() const { return nodes_; }
    const Node* find(NodeId id) const;
    Node* find(NodeId id);
    const Node& node(NodeId id) const;
    Node& node(NodeId id);

    std::vector<Edge> edges() const;
    bool connected(NodeId a, NodeId b) const;
    std::vector<NodeId> neighbors(NodeId id) const;
    bool has_labeled_node() const;

    std::uint64_t competition_count() const { return competition_count_; }
    void add_competitions(std::uint64_t n) { competition_count_ += n; }
    NodeId next_id() const { return next_id_; }

    /// Inserts a fresh node at `x`. Returns nullopt when the map is full.
    std::optional<NodeId> insert_node(std::span<const double> x, Label label = std::nullopt);

    /// Copies c, delta, omega of `source` into a new node with `label` and zero wins.
    /// Returns nullopt when the map is full.
    std::optional<NodeId> duplicate_node(NodeId source, ClassId label);

    /// Recomputes every edge incident to `id`.
    void update_connections(NodeId id);

    /// Removes nodes with fewer than lp * age_wins wins.
    std::vector<NodeId> prune_losers();

    /// Same as prune_losers() with the threshold taken as lp * `competitions`.
    /// Survivors are reset to zero wins, as is the competition counter. The
    /// node with the most wins survives if every node falls below threshold.
    std::vector<NodeId> prune_losers(double competitions);

    /// Throws StateError if any map invariant is violated.
    void check_invariants() const;

    friend bool operator==(const SomMap&, const SomMap&) = default;

private:
    void connect(NodeId a, NodeId b);
    void disconnect(NodeId a, NodeId b);

    std::size_t dim_;
    Params params_;
    std::vector<Node> nodes_;
    std::set<Edge> adjacency_;  // both directions stored
    std::uint64_t competition_count_ = 0;
    NodeId next_id_ = 0;
};

}  // namespace bsssom
