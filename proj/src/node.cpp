#include "bsssom/node.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "bsssom/errors.hpp"
#include "bsssom/winner_search.hpp"

namespace bsssom {

namespace {

void require_dim(std::size_t got, std::size_t want) {
    if (got != want) {
        throw InputError("dimension mismatch: got " + std::to_string(got) + ", expected " +
                         std::to_string(want));
    }
}

}  // namespace

Node Node::at(NodeId id, std::span<const double> x, Label label) {
    Node node;
    node.id = id;
    node.c.assign(x.begin(), x.end());
    node.delta.assign(x.size(), 0.0);
    node.omega.assign(x.size(), 1.0);
    node.label = label;
    return node;
}

double weighted_distance(std::span<const double> x, const Node& node) {
    require_dim(x.size(), node.dim());
    return std::sqrt(
        kernel::weighted_sq_distance(x.data(), node.c.data(), node.omega.data(), x.size()));
}

double activation(std::span<const double> x, const Node& node, double eps) {
    require_dim(x.size(), node.dim());
    const double sq =
        kernel::weighted_sq_distance(x.data(), node.c.data(), node.omega.data(), x.size());
    return kernel::activation_from(sq, kernel::sum(node.omega.data(), node.dim()), eps);
}

std::vector<double> recompute_relevance(std::span<const double> delta, double s) {
    if (!(s > 0.0)) throw ParameterError("relevance smoothness s must be positive");
    const std::size_t d = delta.size();
    std::vector<double> omega(d, 1.0);
    if (d == 0) return omega;

    const auto [lo, hi] = std::minmax_element(delta.begin(), delta.end());
    const double spread = *hi - *lo;
    if (!(spread > 0.0)) return omega;

    const double mean = std::accumulate(delta.begin(), delta.end(), 0.0) / static_cast<double>(d);
    const double scale = s * spread;
    double top = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        omega[i] = 1.0 / (1.0 + std::exp((delta[i] - mean) / scale));
        top = std::max(top, omega[i]);
    }
    // The smallest delta sits at or below the mean, so top >= 0.5.
    constexpr double floor = std::numeric_limits<double>::min();
    for (double& w : omega) w = std::max(w / top, floor);
    return omega;
}

void update_node(Node& node, std::span<const double> x_bar, double lr, double beta, double s) {
    if (!(lr > 0.0 && lr <= 1.0)) throw ParameterError("learning rate must lie in (0, 1]");
    require_dim(x_bar.size(), node.dim());
    const double rate = lr * beta;
    for (std::size_t i = 0; i < node.dim(); ++i) {
        node.delta[i] = (1.0 - rate) * node.delta[i] + rate * std::abs(x_bar[i] - node.c[i]);
    }
    for (std::size_t i = 0; i < node.dim(); ++i) {
        node.c[i] += lr * (x_bar[i] - node.c[i]);
    }
    node.omega = recompute_relevance(node.delta, s);
}

double relevance_distance(std::span<const double> a, std::span<const double> b) {
    require_dim(b.size(), a.size());
    if (a.empty()) return 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double diff = a[i] - b[i];
        acc += diff * diff;
    }
    return std::sqrt(acc / static_cast<double>(a.size()));
}

}  // namespace bsssom
