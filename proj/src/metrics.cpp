#include "bsssom/metrics.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <string>

#include "bsssom/errors.hpp"
#include "bsssom/winner_search.hpp"

namespace bsssom {

namespace {

Prediction resolve(const SomMap& map, std::span<const double> x, const Winner& w) {
    Prediction p;
    p.node_id = w.id;
    p.cluster = w.id;
    const Node& winner = map.node(w.id);
    if (winner.label) {
        p.label = winner.label;
        return p;
    }
    double best = std::numeric_limits<double>::infinity();
    for (const Node& n : map.nodes()) {
        if (!n.label) continue;
        const double dist = weighted_distance(x, n);
        if (dist < best) {
            best = dist;
            p.label = n.label;
        }
    }
    return p;
}

}  // namespace

Prediction predict(const SomMap& map, std::span<const double> x) {
    if (map.empty()) throw StateError("cannot predict with an empty map");
    const auto snap = NodeSnapshot::of(map);
    return resolve(map, x, find_winner(snap, x, map.params().eps));
}

std::vector<Prediction> predict_all(const SomMap& map, const Matrix& samples) {
    if (map.empty()) throw StateError("cannot predict with an empty map");
    const auto snap = NodeSnapshot::of(map);
    const auto winners = find_winners(snap, samples, map.params().eps);
    std::vector<Prediction> out(samples.rows());
    const auto rows = static_cast<std::ptrdiff_t>(samples.rows());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < rows; ++i) {
        out[i] = resolve(map, samples.row(i), winners[i]);
    }
    return out;
}

double clustering_error(std::span<const std::uint64_t> clusters, std::span<const ClassId> truth) {
    if (clusters.size() != truth.size()) {
        throw InputError("clustering_error: " + std::to_string(clusters.size()) +
                         " cluster ids vs " + std::to_string(truth.size()) + " labels");
    }
    if (clusters.empty()) throw InputError("clustering_error: no samples");
    std::map<std::uint64_t, std::map<ClassId, std::size_t>> counts;
    for (std::size_t i = 0; i < clusters.size(); ++i) ++counts[clusters[i]][truth[i]];
    std::size_t matched = 0;
    for (const auto& [cluster, per_class] : counts) {
        std::size_t top = 0;
        for (const auto& [cls, n] : per_class) top = std::max(top, n);
        matched += top;
    }
    return static_cast<double>(matched) / static_cast<double>(clusters.size());
}

double accuracy(std::span<const Label> predicted, std::span<const ClassId> truth) {
    if (predicted.size() != truth.size()) {
        throw InputError("accuracy: " + std::to_string(predicted.size()) + " predictions vs " +
                         std::to_string(truth.size()) + " labels");
    }
    if (predicted.empty()) throw InputError("accuracy: no samples");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        if (!predicted[i]) throw StateError("accuracy: prediction " + std::to_string(i) + " has no label");
        if (*predicted[i] == truth[i]) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(predicted.size());
}

Evaluation evaluate(const SomMap& map, const Dataset& data) {
    Matrix rows;
    std::vector<ClassId> truth;
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (!data.labels[i]) continue;
        rows.append_row(data.features.row(i));
        truth.push_back(*data.labels[i]);
    }
    if (truth.empty()) throw InputError("dataset has no labels to evaluate against");

    const auto preds = predict_all(map, rows);
    std::vector<std::uint64_t> clusters;
    std::vector<Label> labels;
    clusters.reserve(preds.size());
    labels.reserve(preds.size());
    for (const auto& p : preds) {
        clusters.push_back(p.cluster);
        labels.push_back(p.label);
    }

    Evaluation ev;
    ev.ce = clustering_error(clusters, truth);
    if (map.has_labeled_node()) ev.accuracy = accuracy(labels, truth);
    ev.node_count = map.size();
    return ev;
}

}  // namespace bsssom
