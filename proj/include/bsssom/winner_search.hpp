#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "bsssom/matrix.hpp"
#include "bsssom/node.hpp"

namespace bsssom {

class SomMap;

namespace kernel {

// Shared by Node::activation and the snapshot search so both produce
// bit-identical activations.
inline double weighted_sq_distance(const double* x, const double* c, const double* omega,
                                   std::size_t d) {
    double acc = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        const double diff = x[i] - c[i];
        acc += omega[i] * diff * diff;
    }
    return acc;
}

inline double activation_from(double sq_distance, double omega_sum, double eps) {
    return 1.0 / (1.0 + std::sqrt(sq_distance) / (omega_sum + eps));
}

inline double sum(const double* v, std::size_t d) {
    double acc = 0.0;
    for (std::size_t i = 0; i < d; ++i) acc += v[i];
    return acc;
}

}  // namespace kernel

/// Immutable, contiguous copy of the node centers and relevances a batch competes against.
struct NodeSnapshot {
    std::size_t dim = 0;
    std::vector<NodeId> ids;
    std::vector<double> centers;  // ids.size() x dim
    std::vector<double> omegas;   // ids.size() x dim
    std::vector<double> omega_sums;

    static NodeSnapshot of(const SomMap& map);
    std::size_t size() const { return ids.size(); }
};

struct Winner {
    static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

    std::size_t index = npos;  // position in the snapshot
    NodeId id = 0;
    double activation = 0.0;

    bool found() const { return index != npos; }
};

/// Most activated node for every row of `samples`; ties go to the lowest id.
/// Rows are searched in parallel (OpenMP); the result does not depend on the thread count.
std::vector<Winner> find_winners(const NodeSnapshot& snapshot, const Matrix& samples, double eps);

/// Single-threaded reference for find_winners.
std::vector<Winner> find_winners_serial(const NodeSnapshot& snapshot, const Matrix& samples,
                                        double eps);

/// Winner of a single sample.
Winner find_winner(const NodeSnapshot& snapshot, std::span<const double> x, double eps);

}  // namespace bsssom
