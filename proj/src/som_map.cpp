#include "bsssom/som_map.hpp"

#include <algorithm>
#include <string>

#include "bsssom/errors.hpp"

namespace bsssom {

SomMap::SomMap(std::size_t dim, Params params) : dim_(dim), params_(std::move(params)) {
    if (dim_ == 0) throw InputError("map dimension must be positive");
}

SomMap SomMap::restore(std::size_t dim, Params params, std::vector<Node> nodes,
                       const std::vector<Edge>& edges, std::uint64_t competition_count,
                       NodeId next_id) {
    SomMap map(dim, std::move(params));
    std::sort(nodes.begin(), nodes.end(),
              [](const Node& a, const Node& b) { return a.id < b.id; });
    map.nodes_ = std::move(nodes);
    map.competition_count_ = competition_count;
    map.next_id_ = next_id;
    for (const auto& [a, b] : edges) {
        if (a == b || !map.find(a) || !map.find(b)) {
            throw InputError("edge " + std::to_string(a) + "-" + std::to_string(b) +
                             " references a missing node");
        }
        map.connect(a, b);
    }
    try {
        map.check_invariants();
    } catch (const StateError& e) {
        throw InputError(e.what());
    }
    return map;
}

const Node* SomMap::find(NodeId id) const {
    auto it = std::lower_bound(nodes_.begin(), nodes_.end(), id,
                               [](const Node& n, NodeId v) { return n.id < v; });
    return it != nodes_.end() && it->id == id ? &*it : nullptr;
}

Node* SomMap::find(NodeId id) {
    return const_cast<Node*>(std::as_const(*this).find(id));
}

const Node& SomMap::node(NodeId id) const {
    const Node* n = find(id);
    if (!n) throw StateError("no node with id " + std::to_string(id));
    return *n;
}

Node& SomMap::node(NodeId id) {
    return const_cast<Node&>(std::as_const(*this).node(id));
}

std::vector<SomMap::Edge> SomMap::edges() const {
    std::vector<Edge> out;
    for (const auto& e : adjacency_) {
        if (e.first < e.second) out.push_back(e);
    }
    return out;
}

bool SomMap::connected(NodeId a, NodeId b) const {
    return adjacency_.contains({a, b});
}

std::vector<NodeId> SomMap::neighbors(NodeId id) const {
    std::vector<NodeId> out;
    for (auto it = adjacency_.lower_bound({id, 0}); it != adjacency_.end() && it->first == id; ++it) {
        out.push_back(it->second);
    }
    return out;
}

bool SomMap::has_labeled_node() const {
    return std::any_of(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.label.has_value(); });
}

std::optional<NodeId> SomMap::insert_node(std::span<const double> x, Label label) {
    if (x.size() != dim_) {
        throw InputError("dimension mismatch: got " + std::to_string(x.size()) + ", expected " +
                         std::to_string(dim_));
    }
    if (at_capacity()) return std::nullopt;
    const NodeId id = next_id_++;
    nodes_.push_back(Node::at(id, x, label));
    update_connections(id);
    return id;
}

std::optional<NodeId> SomMap::duplicate_node(NodeId source, ClassId label) {
    if (at_capacity()) return std::nullopt;
    Node copy = node(source);
    copy.id = next_id_++;
    copy.wins = 0;
    copy.label = label;
    const NodeId id = copy.id;
    nodes_.push_back(std::move(copy));
    update_connections(id);
    return id;
}

void SomMap::connect(NodeId a, NodeId b) {
    adjacency_.insert({a, b});
    adjacency_.insert({b, a});
}

void SomMap::disconnect(NodeId a, NodeId b) {
    adjacency_.erase({a, b});
    adjacency_.erase({b, a});
}

void SomMap::update_connections(NodeId id) {
    const Node& self = node(id);
    for (const Node& other : nodes_) {
        if (other.id == id) continue;
        const bool link = labels_compatible(self.label, other.label) &&
                          relevance_distance(self.omega, other.omega) < params_.minwd;
        if (link) connect(id, other.id);
        else disconnect(id, other.id);
    }
}

std::vector<NodeId> SomMap::prune_losers() {
    return prune_losers(static_cast<double>(params_.age_wins));
}

std::vector<NodeId> SomMap::prune_losers(double competitions) {
    const double threshold = params_.lp * competitions;
    std::vector<NodeId> removed;
    if (!nodes_.empty()) {
        const bool any_survivor = std::any_of(nodes_.begin(), nodes_.end(), [&](const Node& n) {
            return static_cast<double>(n.wins) >= threshold;
        });
        NodeId keep = nodes_.front().id;
        if (!any_survivor) {
            // max_element returns the first maximum, i.e. the lowest id.
            keep = std::max_element(nodes_.begin(), nodes_.end(), [](const Node& a, const Node& b) {
                       return a.wins < b.wins;
                   })->id;
        }
        for (const Node& n : nodes_) {
            const bool survives =
                any_survivor ? static_cast<double>(n.wins) >= threshold : n.id == keep;
            if (!survives) removed.push_back(n.id);
        }
    }

    for (NodeId id : removed) {
        for (NodeId other : neighbors(id)) disconnect(id, other);
    }
    std::erase_if(nodes_, [&](const Node& n) {
        return std::binary_search(removed.begin(), removed.end(), n.id);
    });
    for (Node& n : nodes_) n.wins = 0;
    competition_count_ = 0;
    for (const Node& n : nodes_) update_connections(n.id);
    return removed;
}

void SomMap::check_invariants() const {
    if (nodes_.size() > params_.max_nodes) {
        throw StateError("node count " + std::to_string(nodes_.size()) + " exceeds max_nodes " +
                         std::to_string(params_.max_nodes));
    }
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const Node& n = nodes_[i];
        if (i > 0 && nodes_[i - 1].id >= n.id) throw StateError("node ids not strictly ascending");
        if (n.id >= next_id_) throw StateError("node id at or beyond next_id");
        if (n.c.size() != dim_ || n.delta.size() != dim_ || n.omega.size() != dim_) {
            throw StateError("node " + std::to_string(n.id) + " has wrong dimension");
        }
        for (std::size_t k = 0; k < dim_; ++k) {
            if (!(n.omega[k] > 0.0 && n.omega[k] <= 1.0)) {
                throw StateError("node " + std::to_string(n.id) + " relevance outside (0, 1]");
            }
            if (!(n.delta[k] >= 0.0)) {
                throw StateError("node " + std::to_string(n.id) + " has negative distance vector");
            }
        }
    }
    for (const auto& [a, b] : adjacency_) {
        const Node* na = find(a);
        const Node* nb = find(b);
        if (!na || !nb) throw StateError("edge endpoint missing");
        if (!adjacency_.contains({b, a})) throw StateError("edge not symmetric");
        if (!labels_compatible(na->label, nb->label)) {
            throw StateError("edge " + std::to_string(a) + "-" + std::to_string(b) +
                             " joins different classes");
        }
    }
}

}  // namespace bsssom
