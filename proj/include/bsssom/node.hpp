#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace bsssom {

using NodeId = std::uint64_t;
using ClassId = std::int32_t;
using Label = std::optional<ClassId>;

/// One prototype of the map.
struct Node {
    NodeId id = 0;
    std::vector<double> c;      // center
    std::vector<double> delta;  // moving average of |x - c| per dimension
    std::vector<double> omega;  // relevance, each in (0, 1]
    std::uint64_t wins = 0;
    Label label;

    std::size_t dim() const { return c.size(); }

    /// Fresh node at `x`: zero dispersion, full relevance.
    static Node at(NodeId id, std::span<const double> x, Label label = std::nullopt);

    friend bool operator==(const Node&, const Node&) = default;
};

// Per-node kernels. All are pure and throw InputError on a dimension mismatch.

/// sqrt(sum_i omega_i * (x_i - c_i)^2)
double weighted_distance(std::span<const double> x, const Node& node);

/// 1 / (1 + D_omega(x, c) / (sum(omega) + eps)); in (0, 1].
double activation(std::span<const double> x, const Node& node, double eps);

/// Logistic relevance from a distance vector, rescaled so that max == 1.
/// A degenerate (constant) distance vector yields all ones.
std::vector<double> recompute_relevance(std::span<const double> delta, double s);

/// Moves `node` toward `x_bar` with learning rate `lr`.
/// delta is averaged against the pre-update center, then c moves, then omega is recomputed.
void update_node(Node& node, std::span<const double> x_bar, double lr, double beta, double s);

/// Euclidean distance between relevance vectors divided by sqrt(d); in [0, 1].
double relevance_distance(std::span<const double> a, std::span<const double> b);

/// Labels are compatible when equal or when at least one is undefined.
inline bool labels_compatible(const Label& a, const Label& b) {
    return !a || !b || *a == *b;
}

}  // namespace bsssom
