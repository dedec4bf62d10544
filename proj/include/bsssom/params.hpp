#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace bsssom {

/// Hyperparameters of a Batch SS-SOM run.
///
/// The first ten fields are the model hyperparameters; the remaining ones are
/// engine settings. `age_wins` is an absolute competition count (the search
/// module converts its multiple-of-S form before constructing a Params).
struct Params {
    double a_t = 0.95;        // activation threshold for node insertion
    double lp = 0.005;        // lowest fraction of competitions a node must win
    double beta = 0.1;        // relevance (distance-vector) rate
    std::uint64_t age_wins = 1000;
    double e_b = 0.05;        // winner learning rate
    double e_w = 0.01;        // wrong-winner rate (repulsion, off unless `repulsion`)
    double e_n = 0.005;       // neighbor learning rate
    double s = 0.05;          // relevance smoothness
    double minwd = 0.1;       // connection threshold on relevance distance
    std::uint32_t epochs = 10;

    std::size_t batch_size = 32;
    std::size_t max_nodes = 100;
    std::uint64_t seed = 0;
    double eps = 1e-8;

    // Move a case-C winner away from foreign-class means by e_w.
    bool repulsion = false;
    // Allow case-C duplication during the convergence pass.
    bool duplicate_in_convergence = true;

    /// Throws ParameterError naming the first field outside its domain.
    void validate() const;

    /// Sets one field from its textual name and value ("e_b", "0.1").
    void set(std::string_view key, std::string_view value);

    /// Every field as (name, text) pairs, in declaration order. Doubles use the
    /// shortest round-trip representation, so set() restores them exactly.
    std::vector<std::pair<std::string, std::string>> entries() const;

    friend bool operator==(const Params&, const Params&) = default;
};

/// Shortest text that parses back to exactly `value`.
std::string to_text(double value);

/// Default node cap for a dataset of `sample_count` rows: 10% of S, at least one.
std::size_t default_max_nodes(std::size_t sample_count);

}  // namespace bsssom
