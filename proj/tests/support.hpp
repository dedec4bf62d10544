#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "bsssom/dataio.hpp"
#include "bsssom/dataset.hpp"
#include "bsssom/node.hpp"
#include "bsssom/som_map.hpp"

namespace testing {

inline std::vector<double> random_vector(std::mt19937_64& rng, std::size_t d, double lo = 0.0,
                                         double hi = 1.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> v(d);
    for (double& x : v) x = u(rng);
    return v;
}

inline bsssom::Node make_node(bsssom::NodeId id, std::vector<double> c, std::vector<double> omega,
                              bsssom::Label label = std::nullopt) {
    bsssom::Node n;
    n.id = id;
    n.delta.assign(c.size(), 0.0);
    n.c = std::move(c);
    n.omega = std::move(omega);
    n.label = label;
    return n;
}

/// Gaussian blobs, `per_class` rows each, features clipped to [0, 1] and then
/// min-max normalized. Each class may own several sub-blobs.
struct BlobSpec {
    std::size_t classes = 3;
    std::size_t dim = 2;
    std::size_t per_class = 100;
    std::size_t modes_per_class = 1;
    double stddev = 0.03;
    std::uint64_t seed = 1;
    std::vector<std::vector<double>> centers;  // one per class; random when empty
};

inline bsssom::Dataset make_blobs(const BlobSpec& spec) {
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> noise(0.0, spec.stddev);
    std::uniform_real_distribution<double> place(0.15, 0.85);
    std::vector<std::vector<std::vector<double>>> centers(spec.classes);
    for (std::size_t k = 0; k < spec.centers.size() && k < spec.classes; ++k) {
        centers[k].push_back(spec.centers[k]);
    }
    for (auto& modes : centers) {
        if (!modes.empty()) continue;
        for (std::size_t m = 0; m < spec.modes_per_class; ++m) {
            std::vector<double> c(spec.dim);
            for (double& v : c) v = place(rng);
            modes.push_back(std::move(c));
        }
    }
    bsssom::Dataset data;
    std::vector<double> x(spec.dim);
    for (std::size_t k = 0; k < spec.classes; ++k) {
        for (std::size_t i = 0; i < spec.per_class; ++i) {
            const auto& c = centers[k][i % centers[k].size()];
            for (std::size_t j = 0; j < spec.dim; ++j) x[j] = std::clamp(c[j] + noise(rng), 0.0, 1.0);
            data.features.append_row(x);
            data.labels.push_back(static_cast<bsssom::ClassId>(k));
        }
    }
    bsssom::normalize_columns(data.features);
    data.mask.assign(data.size(), true);
    for (std::size_t k = 0; k < spec.classes; ++k) data.class_names.push_back(std::to_string(k));
    return data;
}

}  // namespace testing
