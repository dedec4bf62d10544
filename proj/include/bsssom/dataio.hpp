#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "bsssom/dataset.hpp"
#include "bsssom/som_map.hpp"

namespace bsssom {

enum class FileFormat { csv, arff };

/// Guesses the format from the extension (".arff" → ARFF, anything else CSV).
FileFormat format_from_path(const std::filesystem::path& path);
FileFormat parse_format(const std::string& name);

/// Which column carries the class. Empty means: CSV → no labels, ARFF → the
/// last nominal attribute. Otherwise a column name or a zero-based index
/// (negative counts from the end, so "-1" is the last column).
struct LabelColumn {
    std::string spec;

    bool none() const { return spec.empty(); }
};

/// Loads and min-max normalizes a dataset. All rows start masked in where a
/// label exists. Throws InputError with row/column context.
Dataset load(const std::filesystem::path& path, FileFormat format, const LabelColumn& label);

Dataset load_csv(std::istream& in, const LabelColumn& label);
Dataset load_arff(std::istream& in, const LabelColumn& label);

/// Per-column min-max scaling into [0, 1]; constant columns become 0.
void normalize_columns(Matrix& features);

/// Masks in round(rate * S) labeled rows chosen uniformly at random, without
/// class stratification. Throws ParameterError for a rate outside [0, 1].
Dataset apply_mask(Dataset data, double rate, std::uint64_t seed);

/// 64-bit FNV-1a over the file contents.
std::uint64_t file_fingerprint(const std::filesystem::path& path);

inline constexpr int kMapFormatVersion = 1;

void save_map(const SomMap& map, std::ostream& out);
void save_map(const SomMap& map, const std::filesystem::path& path);
SomMap load_map(std::istream& in);
SomMap load_map(const std::filesystem::path& path);

}  // namespace bsssom
