#include "bsssom/winner_search.hpp"

#include <string>

#include "bsssom/errors.hpp"
#include "bsssom/som_map.hpp"

namespace bsssom {

NodeSnapshot NodeSnapshot::of(const SomMap& map) {
    NodeSnapshot snap;
    snap.dim = map.dim();
    const std::size_t n = map.size();
    snap.ids.reserve(n);
    snap.centers.reserve(n * snap.dim);
    snap.omegas.reserve(n * snap.dim);
    snap.omega_sums.reserve(n);
    for (const Node& node : map.nodes()) {
        snap.ids.push_back(node.id);
        snap.centers.insert(snap.centers.end(), node.c.begin(), node.c.end());
        snap.omegas.insert(snap.omegas.end(), node.omega.begin(), node.omega.end());
        snap.omega_sums.push_back(kernel::sum(node.omega.data(), snap.dim));
    }
    return snap;
}

namespace {

inline Winner best_of(const NodeSnapshot& snap, const double* x, double eps) {
    Winner best;
    const std::size_t d = snap.dim;
    const double* c = snap.centers.data();
    const double* w = snap.omegas.data();
    for (std::size_t j = 0; j < snap.ids.size(); ++j, c += d, w += d) {
        const double act =
            kernel::activation_from(kernel::weighted_sq_distance(x, c, w, d), snap.omega_sums[j], eps);
        if (!best.found() || act > best.activation) {
            best.index = j;
            best.id = snap.ids[j];
            best.activation = act;
        }
    }
    return best;
}

void require_dim(const NodeSnapshot& snap, std::size_t cols) {
    if (cols != snap.dim) {
        throw InputError("dimension mismatch: samples have " + std::to_string(cols) +
                         " columns, map has " + std::to_string(snap.dim));
    }
}

}  // namespace

Winner find_winner(const NodeSnapshot& snapshot, std::span<const double> x, double eps) {
    require_dim(snapshot, x.size());
    return best_of(snapshot, x.data(), eps);
}

std::vector<Winner> find_winners(const NodeSnapshot& snapshot, const Matrix& samples, double eps) {
    require_dim(snapshot, samples.cols());
    const auto rows = static_cast<std::ptrdiff_t>(samples.rows());
    std::vector<Winner> out(samples.rows());
    const double* base = samples.data().data();
    const std::size_t d = samples.cols();
#pragma omp parallel for schedule(static) if (rows * static_cast<std::ptrdiff_t>(snapshot.size()) > 4096)
    for (std::ptrdiff_t i = 0; i < rows; ++i) {
        out[i] = best_of(snapshot, base + i * d, eps);
    }
    return out;
}

std::vector<Winner> find_winners_serial(const NodeSnapshot& snapshot, const Matrix& samples,
                                        double eps) {
    require_dim(snapshot, samples.cols());
    std::vector<Winner> out;
    out.reserve(samples.rows());
    for (std::size_t i = 0; i < samples.rows(); ++i) {
        out.push_back(best_of(snapshot, samples.row(i).data(), eps));
    }
    return out;
}

}  // namespace bsssom
