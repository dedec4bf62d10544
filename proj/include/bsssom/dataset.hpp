#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "bsssom/matrix.hpp"
#include "bsssom/node.hpp"

namespace bsssom {

/// Normalized feature matrix with optional labels and a supervision mask.
///
/// `labels[i]` is the true class (absent when the file had none); `mask[i]`
/// says whether that label is visible to training. Evaluation always reads
/// `labels`.
struct Dataset {
    Matrix features;
    std::vector<Label> labels;
    std::vector<bool> mask;
    std::vector<std::string> class_names;  // index == ClassId
    std::vector<std::string> feature_names;

    std::size_t size() const { return features.rows(); }
    std::size_t dim() const { return features.cols(); }
    std::size_t class_count() const { return class_names.size(); }
    bool has_labels() const;
    std::size_t masked_count() const;

    /// Label as seen by training: the true label where masked in, absent otherwise.
    Label training_label(std::size_t row) const {
        return mask[row] ? labels[row] : Label{};
    }

    /// Throws InputError if shapes disagree or a feature lies outside [0, 1].
    void check() const;
};

}  // namespace bsssom
