#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bsssom/dataset.hpp"
#include "bsssom/params.hpp"
#include "bsssom/som_map.hpp"

namespace bsssom {

struct Range {
    double min = 0.0;
    double max = 0.0;
};

/// Sampling ranges. e_w and e_n are fractions of e_b; age_wins is a multiple
/// of the dataset size.
struct ParamRanges {
    Range a_t{0.90, 0.999};
    Range lp{0.001, 0.01};
    Range beta{0.001, 0.5};
    Range age_wins{1.0, 100.0};
    Range e_b{0.001, 0.2};
    Range e_w{0.01, 1.0};
    Range e_n{0.002, 1.0};
    Range s{0.01, 0.1};
    Range minwd{0.0, 0.5};
    Range epochs{1.0, 100.0};

    void validate() const;
};

/// Latin hypercube sample of `n` parameter sets for a dataset of `sample_count` rows.
/// Each range is cut into n equal-width strata; every stratum of every
/// parameter is hit exactly once. Engine settings (batch size, node cap, eps,
/// flags) are copied from `base`; each set gets its own derived seed.
std::vector<Params> lhs_sample(const ParamRanges& ranges, std::size_t n, std::size_t sample_count,
                               std::uint64_t seed, const Params& base = {});

enum class Metric { ce, accuracy };

Metric parse_metric(const std::string& name);
std::string to_string(Metric metric);

struct RunResult {
    std::size_t run_index = 0;
    Params params;
    std::optional<double> score;  // absent when the run failed
    std::optional<double> ce;
    std::optional<double> accuracy;
    std::size_t node_count = 0;
    std::string error;
};

struct SearchOutcome {
    std::vector<RunResult> ranked;  // score desc, then run index asc; failures last
    std::optional<SomMap> best_map;
};

struct SearchOptions {
    std::size_t n = 10;
    std::uint64_t seed = 0;
    Metric metric = Metric::ce;
    ParamRanges ranges;
    Params base;  // batch size and other engine settings
    bool keep_best_map = true;
};

/// Trains one map per sampled parameter set and ranks the runs. Runs execute
/// in parallel; a failing run is recorded, never fatal.
SearchOutcome run_search(const Dataset& data, const SearchOptions& options);

/// Derived seed for run `index` of a sweep seeded with `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace bsssom
