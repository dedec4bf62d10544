#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "bsssom/dataset.hpp"
#include "bsssom/matrix.hpp"
#include "bsssom/node.hpp"
#include "bsssom/som_map.hpp"

namespace bsssom {

struct Prediction {
    NodeId node_id = 0;
    std::uint64_t cluster = 0;
    Label label;  // present iff the map has at least one labeled node

    friend bool operator==(const Prediction&, const Prediction&) = default;
};

/// Winner by activation (no threshold). An unlabeled winner borrows the label
/// of the labeled node nearest to `x` under that node's own relevance.
Prediction predict(const SomMap& map, std::span<const double> x);

/// predict() for every row, in parallel.
std::vector<Prediction> predict_all(const SomMap& map, const Matrix& samples);

/// Majority-label purity: each cluster votes for its most common true class
/// (ties to the lowest class id) and the score is the fraction of samples
/// matching their cluster's vote. Higher is better.
double clustering_error(std::span<const std::uint64_t> clusters, std::span<const ClassId> truth);

/// Fraction of exact matches. Throws StateError if any prediction is unlabeled.
double accuracy(std::span<const Label> predicted, std::span<const ClassId> truth);

struct Evaluation {
    double ce = 0.0;
    std::optional<double> accuracy;  // only when the map carries labels
    std::size_t node_count = 0;
};

/// CE and, when possible, accuracy of `map` over every labeled row of `data`.
/// Throws InputError if the dataset has no labels.
Evaluation evaluate(const SomMap& map, const Dataset& data);

}  // namespace bsssom
