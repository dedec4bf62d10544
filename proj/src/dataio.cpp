#include "bsssom/dataio.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <iterator>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <string_view>

#include "bsssom/errors.hpp"

namespace bsssom {

bool Dataset::has_labels() const {
    return std::any_of(labels.begin(), labels.end(), [](const Label& l) { return l.has_value(); });
}

std::size_t Dataset::masked_count() const {
    return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), true));
}

void Dataset::check() const {
    if (labels.size() != size() || mask.size() != size()) {
        throw InputError("dataset: labels/mask length does not match the feature rows");
    }
    for (double v : features.data()) {
        if (!(v >= 0.0 && v <= 1.0)) throw InputError("dataset: feature outside [0, 1]; normalize first");
    }
    for (std::size_t i = 0; i < size(); ++i) {
        if (mask[i] && !labels[i]) throw InputError("dataset: row " + std::to_string(i) + " masked in without a label");
    }
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::string unquote(std::string_view s) {
    s = trim(s);
    if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) {
        s = s.substr(1, s.size() - 2);
    }
    return std::string(s);
}

std::vector<std::string> split_fields(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = line.find(',', start);
        out.push_back(unquote(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::optional<double> parse_number(std::string_view s) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (s.empty() || ec != std::errc() || ptr != end) return std::nullopt;
    return v;
}

bool is_missing(std::string_view s) {
    s = trim(s);
    return s.empty() || s == "?";
}

std::string lower(std::string_view s) {
    std::string out(s);
    for (char& ch : out) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return out;
}

// Resolves a label column spec against `width` columns and optional names.
std::optional<std::size_t> resolve_label(const LabelColumn& label, std::size_t width,
                                         const std::vector<std::string>& names) {
    if (label.none()) return std::nullopt;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == label.spec) return i;
    }
    long long index = 0;
    const auto* end = label.spec.data() + label.spec.size();
    auto [ptr, ec] = std::from_chars(label.spec.data(), end, index);
    if (ec == std::errc() && ptr == end) {
        const long long resolved = index < 0 ? static_cast<long long>(width) + index : index;
        if (resolved >= 0 && resolved < static_cast<long long>(width)) {
            return static_cast<std::size_t>(resolved);
        }
    }
    throw InputError("label column '" + label.spec + "' not found among " + std::to_string(width) +
                     " columns");
}

// Dense class ids for raw label strings: numeric order when every label is a
// number, lexicographic otherwise.
std::vector<std::string> order_classes(const std::vector<std::optional<std::string>>& raw) {
    std::vector<std::string> unique;
    for (const auto& r : raw) {
        if (r) unique.push_back(*r);
    }
    std::sort(unique.begin(), unique.end());
    unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
    const bool numeric =
        std::all_of(unique.begin(), unique.end(), [](const std::string& s) { return parse_number(s).has_value(); });
    if (numeric) {
        std::stable_sort(unique.begin(), unique.end(), [](const std::string& a, const std::string& b) {
            return *parse_number(a) < *parse_number(b);
        });
    }
    return unique;
}

Dataset assemble(Matrix features, const std::vector<std::optional<std::string>>& raw_labels,
                 std::vector<std::string> class_names, std::vector<std::string> feature_names) {
    Dataset data;
    std::map<std::string, ClassId> ids;
    for (std::size_t i = 0; i < class_names.size(); ++i) ids[class_names[i]] = static_cast<ClassId>(i);
    data.labels.reserve(raw_labels.size());
    for (std::size_t r = 0; r < raw_labels.size(); ++r) {
        if (!raw_labels[r]) {
            data.labels.push_back(std::nullopt);
            continue;
        }
        auto it = ids.find(*raw_labels[r]);
        if (it == ids.end()) {
            throw InputError("row " + std::to_string(r + 1) + ": label '" + *raw_labels[r] +
                             "' is not a declared class value");
        }
        data.labels.push_back(it->second);
    }
    if (raw_labels.empty()) data.labels.assign(features.rows(), std::nullopt);
    normalize_columns(features);
    data.features = std::move(features);
    data.mask.resize(data.labels.size());
    for (std::size_t i = 0; i < data.labels.size(); ++i) data.mask[i] = data.labels[i].has_value();
    data.class_names = std::move(class_names);
    data.feature_names = std::move(feature_names);
    return data;
}

}  // namespace

FileFormat format_from_path(const std::filesystem::path& path) {
    return lower(path.extension().string()) == ".arff" ? FileFormat::arff : FileFormat::csv;
}

FileFormat parse_format(const std::string& name) {
    const auto n = lower(name);
    if (n == "csv") return FileFormat::csv;
    if (n == "arff") return FileFormat::arff;
    throw ParameterError("unknown format '" + name + "' (expected csv or arff)");
}

void normalize_columns(Matrix& features) {
    for (std::size_t j = 0; j < features.cols(); ++j) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (std::size_t i = 0; i < features.rows(); ++i) {
            lo = std::min(lo, features(i, j));
            hi = std::max(hi, features(i, j));
        }
        const double range = hi - lo;
        for (std::size_t i = 0; i < features.rows(); ++i) {
            features(i, j) = range > 0.0 ? (features(i, j) - lo) / range : 0.0;
        }
    }
}

Dataset load_csv(std::istream& in, const LabelColumn& label) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> line_numbers;
    std::string line;
    for (std::size_t n = 1; std::getline(in, line); ++n) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        rows.push_back(split_fields(line));
        line_numbers.push_back(n);
    }
    if (rows.empty()) throw InputError("csv: no rows");
    const std::size_t width = rows.front().size();

    // A header is a first row with any non-numeric cell outside the label column.
    std::vector<std::string> names;
    {
        const auto& first = rows.front();
        std::optional<std::size_t> by_index;
        try {
            by_index = resolve_label(label, width, {});
        } catch (const InputError&) {
            // A name-based spec requires a header.
        }
        bool header = !label.none() && !by_index;
        for (std::size_t j = 0; j < first.size() && !header; ++j) {
            if (by_index && j == *by_index) continue;
            if (!parse_number(first[j])) header = true;
        }
        if (header) {
            names = first;
            rows.erase(rows.begin());
            line_numbers.erase(line_numbers.begin());
        }
    }
    const auto label_col = resolve_label(label, width, names);

    Matrix features(rows.size(), label_col ? width - 1 : width);
    std::vector<std::optional<std::string>> raw;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto& fields = rows[r];
        if (fields.size() != width) {
            throw InputError("csv line " + std::to_string(line_numbers[r]) + ": expected " +
                             std::to_string(width) + " fields, got " + std::to_string(fields.size()));
        }
        std::size_t k = 0;
        for (std::size_t j = 0; j < width; ++j) {
            if (label_col && j == *label_col) {
                raw.push_back(is_missing(fields[j]) ? std::nullopt : std::optional<std::string>(fields[j]));
                continue;
            }
            const auto v = parse_number(fields[j]);
            if (!v) {
                throw InputError("csv line " + std::to_string(line_numbers[r]) + ", column " +
                                 std::to_string(j + 1) + ": non-numeric feature '" + fields[j] + "'");
            }
            features(r, k++) = *v;
        }
    }
    if (rows.empty()) throw InputError("csv: header but no data rows");

    std::vector<std::string> feature_names;
    for (std::size_t j = 0; j < names.size(); ++j) {
        if (!label_col || j != *label_col) feature_names.push_back(names[j]);
    }
    auto classes = label_col ? order_classes(raw) : std::vector<std::string>{};
    return assemble(std::move(features), raw, std::move(classes), std::move(feature_names));
}

Dataset load_arff(std::istream& in, const LabelColumn& label) {
    struct Attribute {
        std::string name;
        bool nominal = false;
        std::vector<std::string> values;
    };
    std::vector<Attribute> attrs;
    std::string line;
    std::size_t line_no = 0;
    bool in_data = false;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> line_numbers;

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto t = trim(line);
        if (t.empty() || t.front() == '%') continue;
        if (in_data) {
            if (t.front() == '{') throw InputError("arff line " + std::to_string(line_no) + ": sparse rows are not supported");
            rows.push_back(split_fields(t));
            line_numbers.push_back(line_no);
            continue;
        }
        const auto head = lower(t.substr(0, t.find_first_of(" \t")));
        if (head == "@relation") continue;
        if (head == "@data") {
            in_data = true;
            continue;
        }
        if (head != "@attribute") {
            throw InputError("arff line " + std::to_string(line_no) + ": unexpected '" + std::string(t) + "'");
        }
        auto rest = trim(t.substr(head.size()));
        Attribute a;
        if (!rest.empty() && (rest.front() == '\'' || rest.front() == '"')) {
            const auto close = rest.find(rest.front(), 1);
            if (close == std::string_view::npos) throw InputError("arff line " + std::to_string(line_no) + ": unterminated name");
            a.name = std::string(rest.substr(1, close - 1));
            rest = trim(rest.substr(close + 1));
        } else {
            const auto sp = rest.find_first_of(" \t");
            if (sp == std::string_view::npos) throw InputError("arff line " + std::to_string(line_no) + ": attribute without type");
            a.name = std::string(rest.substr(0, sp));
            rest = trim(rest.substr(sp));
        }
        if (!rest.empty() && rest.front() == '{') {
            const auto close = rest.rfind('}');
            if (close == std::string_view::npos) throw InputError("arff line " + std::to_string(line_no) + ": unterminated nominal set");
            a.nominal = true;
            a.values = split_fields(rest.substr(1, close - 1));
        } else {
            const auto type = lower(rest);
            if (type != "numeric" && type != "real" && type != "integer") {
                throw InputError("arff line " + std::to_string(line_no) + ": unsupported attribute type '" +
                                 std::string(rest) + "'");
            }
        }
        attrs.push_back(std::move(a));
    }
    if (attrs.empty()) throw InputError("arff: no attributes");
    if (rows.empty()) throw InputError("arff: no data rows");

    std::vector<std::string> names;
    for (const auto& a : attrs) names.push_back(a.name);
    std::optional<std::size_t> label_col;
    if (label.none()) {
        for (std::size_t j = attrs.size(); j-- > 0;) {
            if (attrs[j].nominal) {
                label_col = j;
                break;
            }
        }
    } else {
        label_col = resolve_label(label, attrs.size(), names);
    }
    for (std::size_t j = 0; j < attrs.size(); ++j) {
        if (attrs[j].nominal && (!label_col || j != *label_col)) {
            throw InputError("arff attribute '" + attrs[j].name + "': nominal features are not supported");
        }
    }

    const std::size_t width = attrs.size();
    Matrix features(rows.size(), label_col ? width - 1 : width);
    std::vector<std::optional<std::string>> raw;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != width) {
            throw InputError("arff line " + std::to_string(line_numbers[r]) + ": expected " +
                             std::to_string(width) + " values, got " + std::to_string(rows[r].size()));
        }
        std::size_t k = 0;
        for (std::size_t j = 0; j < width; ++j) {
            const auto& cell = rows[r][j];
            if (label_col && j == *label_col) {
                raw.push_back(is_missing(cell) ? std::nullopt : std::optional<std::string>(cell));
                continue;
            }
            const auto v = parse_number(cell);
            if (!v) {
                throw InputError("arff line " + std::to_string(line_numbers[r]) + ", attribute '" +
                                 attrs[j].name + "': non-numeric value '" + cell + "'");
            }
            features(r, k++) = *v;
        }
    }

    std::vector<std::string> classes;
    std::vector<std::string> feature_names;
    for (std::size_t j = 0; j < width; ++j) {
        if (label_col && j == *label_col) continue;
        feature_names.push_back(attrs[j].name);
    }
    if (label_col) {
        classes = attrs[*label_col].nominal ? attrs[*label_col].values : order_classes(raw);
    }
    return assemble(std::move(features), raw, std::move(classes), std::move(feature_names));
}

Dataset load(const std::filesystem::path& path, FileFormat format, const LabelColumn& label) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path.string() + "'");
    try {
        return format == FileFormat::arff ? load_arff(in, label) : load_csv(in, label);
    } catch (const InputError& e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

Dataset apply_mask(Dataset data, double rate, std::uint64_t seed) {
    if (!(rate >= 0.0 && rate <= 1.0)) {
        throw ParameterError("supervision rate must lie in [0, 1], got " + to_text(rate));
    }
    std::vector<std::size_t> labeled;
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (data.labels[i]) labeled.push_back(i);
    }
    const auto wanted = static_cast<std::size_t>(std::llround(rate * static_cast<double>(data.size())));
    const std::size_t k = std::min(wanted, labeled.size());
    std::mt19937_64 rng(seed);
    std::shuffle(labeled.begin(), labeled.end(), rng);
    data.mask.assign(data.size(), false);
    for (std::size_t i = 0; i < k; ++i) data.mask[labeled[i]] = true;
    return data;
}

std::uint64_t file_fingerprint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path.string() + "'");
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char buf[1 << 14];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ULL;
        }
    }
    return h;
}

// ---------------------------------------------------------------------------
// Map files. See docs/map_format.md.

namespace {

constexpr std::string_view kMagic = "bsssom-map";

void write_vector(std::ostream& out, std::string_view tag, const std::vector<double>& v) {
    out << tag;
    for (double x : v) out << ' ' << to_text(x);
    out << '\n';
}

class MapReader {
public:
    explicit MapReader(std::istream& in) : in_(in) {}

    std::vector<std::string> next(std::string_view expected_tag) {
        std::string line;
        while (std::getline(in_, line)) {
            ++line_;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (trim(line).empty()) continue;
            std::istringstream ss(line);
            std::vector<std::string> tokens{std::istream_iterator<std::string>(ss), {}};
            if (tokens.front() != expected_tag) fail("expected '" + std::string(expected_tag) + "', got '" + tokens.front() + "'");
            return tokens;
        }
        fail("unexpected end of file, expected '" + std::string(expected_tag) + "'");
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw InputError("map file line " + std::to_string(line_) + ": " + what);
    }

    template <class T>
    T number(const std::string& token) const {
        T v{};
        const auto* end = token.data() + token.size();
        auto [ptr, ec] = std::from_chars(token.data(), end, v);
        if (ec != std::errc() || ptr != end) fail("bad number '" + token + "'");
        return v;
    }

    std::vector<double> doubles(std::string_view tag, std::size_t count) {
        const auto t = next(tag);
        if (t.size() != count + 1) fail("expected " + std::to_string(count) + " values after '" + std::string(tag) + "'");
        std::vector<double> out;
        out.reserve(count);
        for (std::size_t i = 1; i < t.size(); ++i) out.push_back(number<double>(t[i]));
        return out;
    }

private:
    std::istream& in_;
    std::size_t line_ = 0;
};

}  // namespace

void save_map(const SomMap& map, std::ostream& out) {
    out << kMagic << ' ' << kMapFormatVersion << '\n';
    out << "dim " << map.dim() << '\n';
    const auto entries = map.params().entries();
    out << "params " << entries.size() << '\n';
    for (const auto& [k, v] : entries) out << "param " << k << ' ' << v << '\n';
    out << "competition_count " << map.competition_count() << '\n';
    out << "next_id " << map.next_id() << '\n';
    out << "nodes " << map.size() << '\n';
    for (const Node& n : map.nodes()) {
        out << "node " << n.id << ' ' << n.wins << ' ';
        if (n.label) out << *n.label;
        else out << '-';
        out << '\n';
        write_vector(out, "c", n.c);
        write_vector(out, "delta", n.delta);
        write_vector(out, "omega", n.omega);
    }
    const auto edges = map.edges();
    out << "edges " << edges.size() << '\n';
    for (const auto& [a, b] : edges) out << "edge " << a << ' ' << b << '\n';
    out << "end\n";
}

void save_map(const SomMap& map, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write '" + path.string() + "'");
    save_map(map, out);
    if (!out) throw InputError("write failed for '" + path.string() + "'");
}

SomMap load_map(std::istream& in) {
    MapReader r(in);
    const auto magic = r.next(kMagic);
    if (magic.size() != 2) r.fail("malformed header");
    if (r.number<int>(magic[1]) != kMapFormatVersion) {
        throw VersionError("map file version " + magic[1] + " is not supported (expected " +
                           std::to_string(kMapFormatVersion) + ")");
    }
    const auto dim = r.number<std::size_t>(r.next("dim").at(1));
    const auto param_count = r.number<std::size_t>(r.next("params").at(1));
    Params params;
    for (std::size_t i = 0; i < param_count; ++i) {
        const auto t = r.next("param");
        if (t.size() != 3) r.fail("malformed param line");
        try {
            params.set(t[1], t[2]);
        } catch (const ParameterError& e) {
            r.fail(e.what());
        }
    }
    const auto competitions = r.number<std::uint64_t>(r.next("competition_count").at(1));
    const auto next_id = r.number<NodeId>(r.next("next_id").at(1));
    const auto node_count = r.number<std::size_t>(r.next("nodes").at(1));
    std::vector<Node> nodes;
    nodes.reserve(node_count);
    for (std::size_t i = 0; i < node_count; ++i) {
        const auto t = r.next("node");
        if (t.size() != 4) r.fail("malformed node line");
        Node n;
        n.id = r.number<NodeId>(t[1]);
        n.wins = r.number<std::uint64_t>(t[2]);
        if (t[3] != "-") n.label = r.number<ClassId>(t[3]);
        n.c = r.doubles("c", dim);
        n.delta = r.doubles("delta", dim);
        n.omega = r.doubles("omega", dim);
        nodes.push_back(std::move(n));
    }
    const auto edge_count = r.number<std::size_t>(r.next("edges").at(1));
    std::vector<SomMap::Edge> edges;
    for (std::size_t i = 0; i < edge_count; ++i) {
        const auto t = r.next("edge");
        if (t.size() != 3) r.fail("malformed edge line");
        edges.emplace_back(r.number<NodeId>(t[1]), r.number<NodeId>(t[2]));
    }
    r.next("end");
    if (dim == 0) r.fail("dimension must be positive");
    return SomMap::restore(dim, params, std::move(nodes), edges, competitions, next_id);
}

SomMap load_map(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path.string() + "'");
    try {
        return load_map(in);
    } catch (const VersionError&) {
        throw;
    } catch (const InputError& e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

}  // namespace bsssom
