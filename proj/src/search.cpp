#include "bsssom/search.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

#include "bsssom/errors.hpp"
#include "bsssom/metrics.hpp"
#include "bsssom/training.hpp"

namespace bsssom {

void ParamRanges::validate() const {
    const std::array<std::pair<const char*, Range>, 10> all{{{"a_t", a_t},
                                                             {"lp", lp},
                                                             {"beta", beta},
                                                             {"age_wins", age_wins},
                                                             {"e_b", e_b},
                                                             {"e_w", e_w},
                                                             {"e_n", e_n},
                                                             {"s", s},
                                                             {"minwd", minwd},
                                                             {"epochs", epochs}}};
    for (const auto& [name, r] : all) {
        if (!(r.min <= r.max)) throw ParameterError(std::string("range for ") + name + " has min > max");
    }
    if (e_w.max > 1.0 || e_n.max > 1.0) {
        throw ParameterError("e_w and e_n fractions of e_b must not exceed 1");
    }
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    // splitmix64 finalizer
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::vector<Params> lhs_sample(const ParamRanges& ranges, std::size_t n, std::size_t sample_count,
                               std::uint64_t seed, const Params& base) {
    if (n == 0) throw ParameterError("lhs_sample: n must be at least 1");
    ranges.validate();

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto stratified = [&](const Range& r) {
        std::vector<double> v(n);
        const double width = (r.max - r.min) / static_cast<double>(n);
        for (std::size_t k = 0; k < n; ++k) {
            v[k] = std::min(r.min + (static_cast<double>(k) + unit(rng)) * width, r.max);
        }
        std::shuffle(v.begin(), v.end(), rng);
        return v;
    };

    const auto a_t = stratified(ranges.a_t);
    const auto lp = stratified(ranges.lp);
    const auto beta = stratified(ranges.beta);
    const auto age = stratified(ranges.age_wins);
    const auto e_b = stratified(ranges.e_b);
    const auto e_w = stratified(ranges.e_w);
    const auto e_n = stratified(ranges.e_n);
    const auto s = stratified(ranges.s);
    const auto minwd = stratified(ranges.minwd);
    const auto epochs = stratified(ranges.epochs);

    std::vector<Params> out(n, base);
    for (std::size_t i = 0; i < n; ++i) {
        Params& p = out[i];
        p.a_t = a_t[i];
        p.lp = lp[i];
        p.beta = beta[i];
        p.age_wins = static_cast<std::uint64_t>(
            std::max(1LL, std::llround(age[i] * static_cast<double>(sample_count))));
        p.e_b = e_b[i];
        p.e_w = e_w[i] * e_b[i];
        p.e_n = e_n[i] * e_b[i];
        p.s = s[i];
        p.minwd = minwd[i];
        p.epochs = static_cast<std::uint32_t>(std::max(1LL, std::llround(epochs[i])));
        p.seed = derive_seed(seed, i);
    }
    return out;
}

Metric parse_metric(const std::string& name) {
    if (name == "ce") return Metric::ce;
    if (name == "accuracy" || name == "acc") return Metric::accuracy;
    throw ParameterError("unknown metric '" + name + "' (expected ce or accuracy)");
}

std::string to_string(Metric metric) {
    return metric == Metric::ce ? "ce" : "accuracy";
}

namespace {

// Strict weak order: scored runs first, by score desc then index asc.
bool ranks_before(const RunResult& a, const RunResult& b) {
    if (a.score.has_value() != b.score.has_value()) return a.score.has_value();
    if (a.score && *a.score != *b.score) return *a.score > *b.score;
    return a.run_index < b.run_index;
}

}  // namespace

SearchOutcome run_search(const Dataset& data, const SearchOptions& options) {
    if (data.size() == 0) throw InputError("cannot search on an empty dataset");
    if (!data.has_labels()) throw InputError("search needs labels to score runs");
    const auto sets = lhs_sample(options.ranges, options.n, data.size(), options.seed, options.base);

    std::vector<RunResult> results(sets.size());
    std::optional<SomMap> best_map;
    std::optional<RunResult> best_key;

    const auto runs = static_cast<std::ptrdiff_t>(sets.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < runs; ++i) {
        RunResult r;
        r.run_index = static_cast<std::size_t>(i);
        r.params = sets[i];
        std::optional<SomMap> map;
        try {
            map.emplace(fit(data, r.params));
            const Evaluation ev = evaluate(*map, data);
            r.ce = ev.ce;
            r.accuracy = ev.accuracy;
            r.node_count = ev.node_count;
            if (options.metric == Metric::ce) {
                r.score = ev.ce;
            } else if (ev.accuracy) {
                r.score = ev.accuracy;
            } else {
                r.error = "map has no labeled nodes; accuracy undefined";
            }
        } catch (const std::exception& e) {
            r.error = e.what();
        }
        if (options.keep_best_map && r.score) {
#pragma omp critical(bsssom_best_map)
            {
                if (!best_key || ranks_before(r, *best_key)) {
                    best_key = r;
                    best_map = std::move(map);
                }
            }
        }
        results[i] = std::move(r);
    }

    std::sort(results.begin(), results.end(), ranks_before);
    return {std::move(results), std::move(best_map)};
}

}  // namespace bsssom
