#include "bsssom/params.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string>

#include "bsssom/errors.hpp"

namespace bsssom {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw ParameterError(std::string("invalid parameter: ") + what);
}

double parse_double(std::string_view key, std::string_view text) {
    double value = 0.0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end) {
        throw ParameterError("parameter " + std::string(key) + ": not a number: '" +
                             std::string(text) + "'");
    }
    return value;
}

std::uint64_t parse_unsigned(std::string_view key, std::string_view text) {
    std::uint64_t value = 0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end) {
        throw ParameterError("parameter " + std::string(key) + ": not a non-negative integer: '" +
                             std::string(text) + "'");
    }
    return value;
}

bool parse_bool(std::string_view key, std::string_view text) {
    if (text == "1" || text == "true") return true;
    if (text == "0" || text == "false") return false;
    throw ParameterError("parameter " + std::string(key) + ": not a boolean: '" +
                         std::string(text) + "'");
}

}  // namespace

void Params::validate() const {
    require(a_t > 0.0 && a_t < 1.0, "a_t must lie in (0, 1)");
    require(lp > 0.0 && lp < 1.0, "lp must lie in (0, 1)");
    require(beta > 0.0 && beta < 1.0, "beta must lie in (0, 1)");
    require(age_wins > 0, "age_wins must be positive");
    require(e_b > 0.0 && e_b < 1.0, "e_b must lie in (0, 1)");
    require(e_w > 0.0 && e_w <= e_b, "e_w must lie in (0, e_b]");
    require(e_n > 0.0 && e_n <= e_b, "e_n must lie in (0, e_b]");
    require(s > 0.0 && std::isfinite(s), "s must be positive");
    require(minwd >= 0.0 && minwd < 1.0, "minwd must lie in [0, 1)");
    require(epochs > 0, "epochs must be positive");
    require(batch_size > 0, "batch_size must be positive");
    require(max_nodes > 0, "max_nodes must be positive");
    require(eps > 0.0, "eps must be positive");
}

void Params::set(std::string_view key, std::string_view value) {
    if (key == "a_t") a_t = parse_double(key, value);
    else if (key == "lp") lp = parse_double(key, value);
    else if (key == "beta") beta = parse_double(key, value);
    else if (key == "age_wins") age_wins = parse_unsigned(key, value);
    else if (key == "e_b") e_b = parse_double(key, value);
    else if (key == "e_w") e_w = parse_double(key, value);
    else if (key == "e_n") e_n = parse_double(key, value);
    else if (key == "s") s = parse_double(key, value);
    else if (key == "minwd") minwd = parse_double(key, value);
    else if (key == "epochs") epochs = static_cast<std::uint32_t>(parse_unsigned(key, value));
    else if (key == "batch_size") batch_size = parse_unsigned(key, value);
    else if (key == "max_nodes") max_nodes = parse_unsigned(key, value);
    else if (key == "seed") seed = parse_unsigned(key, value);
    else if (key == "eps") eps = parse_double(key, value);
    else if (key == "repulsion") repulsion = parse_bool(key, value);
    else if (key == "duplicate_in_convergence") duplicate_in_convergence = parse_bool(key, value);
    else throw ParameterError("unknown parameter '" + std::string(key) + "'");
}

std::string to_text(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

std::vector<std::pair<std::string, std::string>> Params::entries() const {
    return {{"a_t", to_text(a_t)},
            {"lp", to_text(lp)},
            {"beta", to_text(beta)},
            {"age_wins", std::to_string(age_wins)},
            {"e_b", to_text(e_b)},
            {"e_w", to_text(e_w)},
            {"e_n", to_text(e_n)},
            {"s", to_text(s)},
            {"minwd", to_text(minwd)},
            {"epochs", std::to_string(epochs)},
            {"batch_size", std::to_string(batch_size)},
            {"max_nodes", std::to_string(max_nodes)},
            {"seed", std::to_string(seed)},
            {"eps", to_text(eps)},
            {"repulsion", repulsion ? "true" : "false"},
            {"duplicate_in_convergence", duplicate_in_convergence ? "true" : "false"}};
}

std::size_t default_max_nodes(std::size_t sample_count) {
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(0.10 * sample_count)));
}

}  // namespace bsssom
