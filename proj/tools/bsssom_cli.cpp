// Command-line driver: train, search, eval and sweep-rates.
//
// Exit codes: 0 success, 2 usage/parameter error, 3 data error, 4 internal error.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <omp.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "bsssom/dataio.hpp"
#include "bsssom/errors.hpp"
#include "bsssom/metrics.hpp"
#include "bsssom/search.hpp"
#include "bsssom/training.hpp"

using json = nlohmann::ordered_json;
using namespace bsssom;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitInternal = 4;

// Seed stream for the supervision mask, kept apart from the training seeds.
constexpr std::uint64_t kMaskStream = 0x6d61736bULL;

struct DataOptions {
    std::string path;
    std::string format;
    std::string label_col = "-1";
    double rate = 0.0;
};

void add_data_options(CLI::App* cmd, DataOptions& o, bool with_rate = true) {
    cmd->add_option("--data", o.path, "CSV or ARFF dataset")->required()->check(CLI::ExistingFile);
    cmd->add_option("--format", o.format, "csv or arff (default: from extension)");
    cmd->add_option("--label-col", o.label_col,
                    "label column name or index, negative from the end; empty for none")
        ->default_val("-1");
    if (with_rate) {
        cmd->add_option("--rate", o.rate, "fraction of labels visible to training")
            ->default_val(0.0)
            ->check(CLI::Range(0.0, 1.0));
    }
}

Dataset load_data(const DataOptions& o) {
    const auto format = o.format.empty() ? format_from_path(o.path) : parse_format(o.format);
    return load(o.path, format, LabelColumn{o.label_col});
}

std::string hex64(std::uint64_t v) {
    std::ostringstream ss;
    ss << std::hex << std::setw(16) << std::setfill('0') << v;
    return ss.str();
}

json dataset_json(const DataOptions& o, const Dataset& d) {
    return {{"path", o.path},
            {"fingerprint", hex64(file_fingerprint(o.path))},
            {"rows", d.size()},
            {"dim", d.dim()},
            {"classes", d.class_count()},
            {"labeled_for_training", d.masked_count()}};
}

json params_json(const Params& p) {
    json out = json::object();
    for (const auto& [k, v] : p.entries()) {
        if (v == "true" || v == "false") out[k] = v == "true";
        else out[k] = json::parse(v);
    }
    return out;
}

void apply_params_json(Params& p, const json& j) {
    if (!j.is_object()) throw ParameterError("params file must hold a JSON object");
    for (const auto& [k, v] : j.items()) {
        p.set(k, v.is_string() ? v.get<std::string>() : v.dump());
    }
}

void apply_overrides(Params& p, const std::vector<std::string>& overrides) {
    for (const auto& kv : overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ParameterError("--param expects key=value, got '" + kv + "'");
        p.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
}

// Output sink: a file, or stdout for "-".
class Sink {
public:
    explicit Sink(const std::string& path) {
        if (path.empty() || path == "-") {
            out_ = &std::cout;
        } else {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) throw InputError("cannot write '" + path + "'");
            out_ = file_.get();
        }
    }
    std::ostream& get() { return *out_; }

private:
    std::unique_ptr<std::ofstream> file_;
    std::ostream* out_ = nullptr;
};

json metrics_json(const Evaluation& ev) {
    json m = {{"ce", ev.ce}};
    if (ev.accuracy) m["accuracy"] = *ev.accuracy;
    return m;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fixed(double v, int digits = 4) {
    std::ostringstream ss;
    ss << std::fixed << std::setprecision(digits) << v;
    return ss.str();
}

std::string opt_fixed(const std::optional<double>& v) {
    return v ? fixed(*v) : "-";
}

// ---------------------------------------------------------------------------

struct TrainOptions {
    DataOptions data;
    std::string params_file;
    std::vector<std::string> overrides;
    std::uint64_t seed = 0;
    std::string out_map;
    std::string report = "-";
};

int cmd_train(const TrainOptions& o) {
    const auto t0 = std::chrono::steady_clock::now();
    Dataset data = load_data(o.data);
    data = apply_mask(std::move(data), o.data.rate, derive_seed(o.seed, kMaskStream));

    Params p;
    p.max_nodes = default_max_nodes(data.size());
    if (!o.params_file.empty()) {
        std::ifstream in(o.params_file);
        if (!in) throw InputError("cannot open '" + o.params_file + "'");
        json j;
        try {
            j = json::parse(in);
        } catch (const json::exception& e) {
            throw InputError(o.params_file + ": " + e.what());
        }
        apply_params_json(p, j);
    }
    apply_overrides(p, o.overrides);
    p.seed = o.seed;
    p.validate();

    const SomMap map = fit(data, p);
    if (!o.out_map.empty()) save_map(map, std::filesystem::path(o.out_map));

    json report = {{"record", "run"}, {"command", "train"}, {"seed", o.seed}};
    report["params"] = params_json(p);
    report["dataset"] = dataset_json(o.data, data);
    report["supervision_rate"] = o.data.rate;
    report["node_count"] = map.size();
    if (data.has_labels()) report["metrics"] = metrics_json(evaluate(map, data));
    report["wall_time_s"] = seconds_since(t0);
    Sink sink(o.report);
    sink.get() << report.dump() << '\n';
    return 0;
}

// ---------------------------------------------------------------------------

struct SearchCliOptions {
    DataOptions data;
    std::size_t n = 10;
    std::uint64_t seed = 0;
    std::string metric = "ce";
    std::string report = "-";
    std::string best_params;
    std::string out_map;
    std::vector<std::string> overrides;
    bool csv = false;
};

Params search_base(const Dataset& data, const std::vector<std::string>& overrides) {
    Params base;
    base.batch_size = 32;
    base.max_nodes = default_max_nodes(data.size());
    apply_overrides(base, overrides);
    return base;
}

json run_json(const RunResult& r, std::size_t rank) {
    json j = {{"record", "run"}, {"rank", rank}, {"run_index", r.run_index}, {"seed", r.params.seed}};
    j["params"] = params_json(r.params);
    if (r.score) j["score"] = *r.score;
    else j["score"] = nullptr;
    if (r.ce) j["ce"] = *r.ce;
    if (r.accuracy) j["accuracy"] = *r.accuracy;
    j["node_count"] = r.node_count;
    if (!r.error.empty()) j["error"] = r.error;
    return j;
}

class Table {
public:
    explicit Table(std::vector<std::string> header) { rows_.push_back(std::move(header)); }
    void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }

    void print(std::ostream& out, bool csv) const {
        if (csv) {
            for (const auto& row : rows_) {
                for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
                out << '\n';
            }
            return;
        }
        std::vector<std::size_t> width(rows_.front().size(), 0);
        for (const auto& row : rows_) {
            for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
        }
        for (const auto& row : rows_) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                out << (i ? "  " : "") << std::setw(static_cast<int>(width[i])) << row[i];
            }
            out << '\n';
        }
    }

private:
    std::vector<std::vector<std::string>> rows_;
};

void emit_table(const Table& t, const std::string& path, bool csv) {
    if (path.empty()) {
        t.print(std::cerr, csv);
        return;
    }
    Sink sink(path);
    t.print(sink.get(), csv);
}

int cmd_search(const SearchCliOptions& o) {
    const auto t0 = std::chrono::steady_clock::now();
    Dataset data = load_data(o.data);
    data = apply_mask(std::move(data), o.data.rate, derive_seed(o.seed, kMaskStream));

    SearchOptions so;
    so.n = o.n;
    so.seed = o.seed;
    so.metric = parse_metric(o.metric);
    so.base = search_base(data, o.overrides);
    so.base.validate();
    const auto outcome = run_search(data, so);

    Sink sink(o.report);
    Table table({"rank", "run", "score", "ce", "accuracy", "nodes", "a_t", "e_b", "epochs"});
    for (std::size_t rank = 0; rank < outcome.ranked.size(); ++rank) {
        const auto& r = outcome.ranked[rank];
        sink.get() << run_json(r, rank + 1).dump() << '\n';
        table.add({std::to_string(rank + 1), std::to_string(r.run_index), opt_fixed(r.score),
                   opt_fixed(r.ce), opt_fixed(r.accuracy), std::to_string(r.node_count),
                   fixed(r.params.a_t), fixed(r.params.e_b), std::to_string(r.params.epochs)});
    }
    json summary = {{"record", "summary"}, {"command", "search"}, {"seed", o.seed},
                    {"n", o.n}, {"metric", o.metric}, {"supervision_rate", o.data.rate}};
    summary["dataset"] = dataset_json(o.data, data);
    if (!outcome.ranked.empty() && outcome.ranked.front().score) {
        summary["best_run_index"] = outcome.ranked.front().run_index;
        summary["best_score"] = *outcome.ranked.front().score;
    }
    summary["wall_time_s"] = seconds_since(t0);
    sink.get() << summary.dump() << '\n';
    emit_table(table, "", o.csv);

    if (!outcome.ranked.empty() && outcome.ranked.front().score) {
        if (!o.best_params.empty()) {
            std::ofstream out(o.best_params);
            if (!out) throw InputError("cannot write '" + o.best_params + "'");
            out << params_json(outcome.ranked.front().params).dump(2) << '\n';
        }
        if (!o.out_map.empty() && outcome.best_map) save_map(*outcome.best_map, std::filesystem::path(o.out_map));
    } else {
        std::cerr << "search: no run produced a score\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------

struct EvalOptions {
    DataOptions data;
    std::string map;
    std::string report = "-";
};

int cmd_eval(const EvalOptions& o) {
    const auto t0 = std::chrono::steady_clock::now();
    const Dataset data = load_data(o.data);
    const SomMap map = load_map(std::filesystem::path(o.map));
    if (map.dim() != data.dim()) {
        throw InputError("map has dimension " + std::to_string(map.dim()) + " but data has " +
                         std::to_string(data.dim()));
    }
    json report = {{"record", "run"}, {"command", "eval"}, {"seed", map.params().seed}};
    report["params"] = params_json(map.params());
    report["dataset"] = dataset_json(o.data, data);
    report["map"] = o.map;
    report["node_count"] = map.size();
    if (data.has_labels()) report["metrics"] = metrics_json(evaluate(map, data));
    report["wall_time_s"] = seconds_since(t0);
    Sink sink(o.report);
    sink.get() << report.dump() << '\n';
    return 0;
}

// ---------------------------------------------------------------------------

struct SweepOptions {
    DataOptions data;
    std::string rates = "0.01,0.05,0.10,0.25,0.50,0.75,1.0";
    std::size_t n = 10;
    std::uint64_t seed = 0;
    std::string report = "-";
    std::string table;
    std::vector<std::string> overrides;
    bool csv = false;
};

std::vector<double> parse_rates(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            throw ParameterError("bad rate '" + item + "'");
        }
        if (used != item.size()) throw ParameterError("bad rate '" + item + "'");
        if (!(v >= 0.0 && v <= 1.0)) throw ParameterError("rate " + item + " outside [0, 1]");
        out.push_back(v);
    }
    if (out.empty()) throw ParameterError("--rates is empty");
    return out;
}

int cmd_sweep_rates(const SweepOptions& o) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto rates = parse_rates(o.rates);
    const Dataset full = load_data(o.data);
    Sink sink(o.report);
    Table table({"rate", "labeled", "best_accuracy", "ce_of_best", "nodes"});
    for (double rate : rates) {
        const Dataset data = apply_mask(full, rate, derive_seed(o.seed, kMaskStream));
        SearchOptions so;
        so.n = o.n;
        so.seed = o.seed;
        so.metric = Metric::accuracy;
        so.base = search_base(data, o.overrides);
        so.base.validate();
        so.keep_best_map = false;
        const auto outcome = run_search(data, so);
        const RunResult& best = outcome.ranked.front();

        json j = {{"record", "rate"}, {"command", "sweep-rates"}, {"seed", o.seed},
                  {"supervision_rate", rate}, {"labeled_for_training", data.masked_count()},
                  {"n", o.n}};
        j["best_accuracy"] = best.score ? json(*best.score) : json(nullptr);
        j["ce_of_best"] = best.ce ? json(*best.ce) : json(nullptr);
        j["node_count"] = best.node_count;
        j["params"] = params_json(best.params);
        sink.get() << j.dump() << '\n';
        table.add({fixed(rate, 2), std::to_string(data.masked_count()), opt_fixed(best.score),
                   opt_fixed(best.ce), std::to_string(best.node_count)});
    }
    json summary = {{"record", "summary"}, {"command", "sweep-rates"}, {"seed", o.seed},
                    {"rates", rates}, {"n", o.n}};
    summary["dataset"] = dataset_json(o.data, full);
    summary["wall_time_s"] = seconds_since(t0);
    sink.get() << summary.dump() << '\n';
    emit_table(table, o.table, o.csv);
    return 0;
}

void configure_threads() {
    if (const char* env = std::getenv("BSSSOM_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) omp_set_num_threads(n);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Batch semi-supervised self-organizing map"};
    app.require_subcommand(1);

    TrainOptions train;
    auto* t = app.add_subcommand("train", "train one map and report CE/accuracy");
    add_data_options(t, train.data);
    t->add_option("--params-file", train.params_file, "JSON object of parameters");
    t->add_option("--param", train.overrides, "key=value override (repeatable)");
    t->add_option("--seed", train.seed, "RNG seed")->default_val(0);
    t->add_option("--out-map", train.out_map, "write the trained map here");
    t->add_option("--report", train.report, "JSON-lines report ('-' = stdout)");

    SearchCliOptions search;
    auto* s = app.add_subcommand("search", "Latin hypercube parameter search");
    add_data_options(s, search.data);
    s->add_option("--n", search.n, "number of sampled parameter sets")->default_val(10)->check(CLI::PositiveNumber);
    s->add_option("--seed", search.seed, "RNG seed")->default_val(0);
    s->add_option("--metric", search.metric, "ce or accuracy")->default_val("ce");
    s->add_option("--report", search.report, "JSON-lines report ('-' = stdout)");
    s->add_option("--best-params", search.best_params, "write the best parameters as JSON");
    s->add_option("--out-map", search.out_map, "write the best map here");
    s->add_option("--param", search.overrides, "engine override, e.g. batch_size=32 (repeatable)");
    s->add_flag("--csv", search.csv, "print the summary table as CSV");

    EvalOptions eval;
    auto* e = app.add_subcommand("eval", "evaluate a saved map");
    add_data_options(e, eval.data, false);
    e->add_option("--map", eval.map, "map file")->required()->check(CLI::ExistingFile);
    e->add_option("--report", eval.report, "JSON-lines report ('-' = stdout)");

    SweepOptions sweep;
    auto* w = app.add_subcommand("sweep-rates", "best accuracy per supervision rate");
    add_data_options(w, sweep.data, false);
    w->add_option("--rates", sweep.rates, "comma-separated rates in [0, 1]");
    w->add_option("--n", sweep.n, "parameter sets per rate")->default_val(10)->check(CLI::PositiveNumber);
    w->add_option("--seed", sweep.seed, "RNG seed")->default_val(0);
    w->add_option("--report", sweep.report, "JSON-lines report ('-' = stdout)");
    w->add_option("--table", sweep.table, "write the summary table here (default stderr)");
    w->add_option("--param", sweep.overrides, "engine override (repeatable)");
    w->add_flag("--csv", sweep.csv, "write the summary table as CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& ex) {
        return app.exit(ex);
    } catch (const CLI::ParseError& ex) {
        app.exit(ex);
        return kExitUsage;
    }

    configure_threads();
    try {
        if (t->parsed()) return cmd_train(train);
        if (s->parsed()) return cmd_search(search);
        if (e->parsed()) return cmd_eval(eval);
        if (w->parsed()) return cmd_sweep_rates(sweep);
    } catch (const ParameterError& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return kExitUsage;
    } catch (const InputError& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return kExitData;
    } catch (const std::exception& ex) {
        std::cerr << "internal error: " << ex.what() << '\n';
        return kExitInternal;
    }
    return kExitInternal;
}
