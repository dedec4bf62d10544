#include "bsssom/training.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <variant>

#include "bsssom/errors.hpp"

namespace bsssom {

std::size_t ClassGroups::sample_count() const {
    std::size_t n = 0;
    for (const auto& g : by_class) n += g.sample_indices.size();
    return n;
}

SplitBatch split_batch(const MiniBatch& batch) {
    SplitBatch out;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        if (batch.labels[i]) {
            out.supervised.samples.append_row(batch.samples.row(i));
            out.supervised.labels.push_back(batch.labels[i]);
            out.supervised_rows.push_back(i);
        } else {
            out.unsupervised.samples.append_row(batch.samples.row(i));
            out.unsupervised.labels.push_back(std::nullopt);
            out.unsupervised_rows.push_back(i);
        }
    }
    return out;
}

std::vector<double> mean_of_rows(const Matrix& samples, std::span<const std::size_t> rows) {
    std::vector<double> mean(samples.cols(), 0.0);
    for (std::size_t r : rows) {
        const auto x = samples.row(r);
        for (std::size_t k = 0; k < mean.size(); ++k) mean[k] += x[k];
    }
    const auto n = static_cast<double>(rows.size());
    for (double& m : mean) m /= n;
    return mean;
}

namespace {

// Snapshot index -> accepted sample rows, plus rejected rows.
struct Competition {
    std::vector<std::vector<std::size_t>> won;
    std::vector<std::size_t> orphans;
};

Competition compete(const MiniBatch& batch, const NodeSnapshot& snapshot, const Params& params,
                    Phase phase) {
    Competition out;
    out.won.resize(snapshot.size());
    if (batch.size() == 0) return out;
    const auto winners = find_winners(snapshot, batch.samples, params.eps);
    for (std::size_t i = 0; i < winners.size(); ++i) {
        const Winner& w = winners[i];
        if (!w.found() || (phase == Phase::organization && w.activation < params.a_t)) {
            out.orphans.push_back(i);
        } else {
            out.won[w.index].push_back(i);
        }
    }
    return out;
}

WinnerGroup make_group(const MiniBatch& batch, NodeId winner, std::vector<std::size_t> rows,
                       Label label) {
    WinnerGroup g;
    g.winner_id = winner;
    g.x_bar = mean_of_rows(batch.samples, rows);
    g.sample_indices = std::move(rows);
    g.label = label;
    return g;
}

void add_wins(SomMap& map, NodeId id, std::size_t n) {
    map.node(id).wins += n;
}

}  // namespace

UnsupervisedAssignment assign_winners_unsupervised(const MiniBatch& batch,
                                                   const NodeSnapshot& snapshot,
                                                   const Params& params, Phase phase) {
    auto comp = compete(batch, snapshot, params, phase);
    UnsupervisedAssignment out;
    out.orphans = std::move(comp.orphans);
    for (std::size_t j = 0; j < comp.won.size(); ++j) {
        if (comp.won[j].empty()) continue;
        out.groups.push_back(make_group(batch, snapshot.ids[j], std::move(comp.won[j]), std::nullopt));
    }
    return out;
}

SupervisedAssignment assign_winners_supervised(const MiniBatch& batch,
                                               const NodeSnapshot& snapshot,
                                               std::span<const Label> node_labels,
                                               const Params& params, Phase phase) {
    if (node_labels.size() != snapshot.size()) {
        throw InputError("node label count does not match the snapshot");
    }
    for (std::size_t i = 0; i < batch.size(); ++i) {
        if (!batch.labels[i]) {
            throw InputError("supervised batch row " + std::to_string(i) + " has no label");
        }
    }
    auto comp = compete(batch, snapshot, params, phase);
    SupervisedAssignment out;
    out.orphans = std::move(comp.orphans);
    for (std::size_t j = 0; j < comp.won.size(); ++j) {
        if (comp.won[j].empty()) continue;
        const NodeId winner = snapshot.ids[j];

        std::map<ClassId, std::vector<std::size_t>> by_class;
        for (std::size_t r : comp.won[j]) by_class[*batch.labels[r]].push_back(r);

        const Label& own = node_labels[j];
        if (own && by_class.size() == 1 && by_class.begin()->first == *own) {
            out.case_b.push_back(make_group(batch, winner, std::move(comp.won[j]), own));
            continue;
        }
        ClassGroups groups;
        groups.winner_id = winner;
        for (auto& [cls, rows] : by_class) {
            groups.by_class.push_back(make_group(batch, winner, std::move(rows), cls));
        }
        (own ? out.case_c : out.case_a).push_back(std::move(groups));
    }
    return out;
}

void update_with_neighbors(SomMap& map, const WinnerGroup& group) {
    const Params& p = map.params();
    const auto neighbors = map.neighbors(group.winner_id);
    update_node(map.node(group.winner_id), group.x_bar, p.e_b, p.beta, p.s);
    for (NodeId n : neighbors) update_node(map.node(n), group.x_bar, p.e_n, p.beta, p.s);
    map.update_connections(group.winner_id);
}

void handle_case_a(SomMap& map, const WinnerGroup& group) {
    const Params& p = map.params();
    Node& winner = map.node(group.winner_id);
    winner.label = group.label;
    update_node(winner, group.x_bar, p.e_b, p.beta, p.s);
    map.update_connections(group.winner_id);
}

void handle_case_b(SomMap& map, const WinnerGroup& group) {
    update_with_neighbors(map, group);
}

CaseCResult handle_case_c(SomMap& map, NodeId winner, std::span<const WinnerGroup> groups,
                          bool allow_duplication) {
    const Params& p = map.params();
    const Label own = map.node(winner).label;
    CaseCResult result;

    // All duplicates are cut from the pre-update winner.
    std::vector<std::pair<NodeId, const WinnerGroup*>> created;
    const WinnerGroup* own_group = nullptr;
    for (const WinnerGroup& g : groups) {
        if (g.label == own) {
            own_group = &g;
            continue;
        }
        if (!allow_duplication) continue;
        if (auto id = map.duplicate_node(winner, *g.label)) {
            created.emplace_back(*id, &g);
            result.duplicates.push_back(*id);
        } else {
            result.skipped.push_back(*g.label);
        }
    }
    for (const auto& [id, g] : created) {
        update_node(map.node(id), g->x_bar, p.e_b, p.beta, p.s);
        map.update_connections(id);
    }
    if (own_group) update_with_neighbors(map, *own_group);

    if (p.repulsion) {
        Node& w = map.node(winner);
        for (const WinnerGroup& g : groups) {
            if (g.label == own) continue;
            for (std::size_t k = 0; k < w.dim(); ++k) {
                w.c[k] = std::clamp(w.c[k] - p.e_w * (g.x_bar[k] - w.c[k]), 0.0, 1.0);
            }
        }
        map.update_connections(winner);
    }
    return result;
}

void train_batch(SomMap& map, const MiniBatch& batch, Phase phase) {
    if (batch.samples.cols() != map.dim() && batch.size() > 0) {
        throw InputError("batch has " + std::to_string(batch.samples.cols()) +
                         " columns, map expects " + std::to_string(map.dim()));
    }
    if (batch.labels.size() != batch.size()) throw InputError("batch label count mismatch");
    const Params& p = map.params();

    const SplitBatch split = split_batch(batch);
    const NodeSnapshot snapshot = NodeSnapshot::of(map);
    std::vector<Label> node_labels;
    node_labels.reserve(map.size());
    for (const Node& n : map.nodes()) node_labels.push_back(n.label);

    const auto sup = assign_winners_supervised(split.supervised, snapshot, node_labels, p, phase);
    const auto uns = assign_winners_unsupervised(split.unsupervised, snapshot, p, phase);

    map.add_competitions(batch.size());

    // Supervised groups, ascending winner id across the three cases.
    using Job = std::variant<const ClassGroups*, const WinnerGroup*>;
    std::vector<std::pair<NodeId, Job>> jobs;
    for (const auto& g : sup.case_a) jobs.emplace_back(g.winner_id, &g);
    for (const auto& g : sup.case_b) jobs.emplace_back(g.winner_id, &g);
    for (const auto& g : sup.case_c) jobs.emplace_back(g.winner_id, &g);
    std::sort(jobs.begin(), jobs.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    for (const auto& [id, job] : jobs) {
        if (const auto* cb = std::get_if<const WinnerGroup*>(&job)) {
            add_wins(map, id, (*cb)->sample_indices.size());
            handle_case_b(map, **cb);
            continue;
        }
        const ClassGroups& groups = *std::get<const ClassGroups*>(job);
        add_wins(map, id, groups.sample_count());
        if (!map.node(id).label) {
            // Only the lowest class id is used for an unlabeled winner.
            handle_case_a(map, groups.by_class.front());
        } else {
            const bool dup = phase == Phase::organization || p.duplicate_in_convergence;
            handle_case_c(map, id, groups.by_class, dup);
        }
    }

    for (const WinnerGroup& g : uns.groups) {
        add_wins(map, g.winner_id, g.sample_indices.size());
        update_with_neighbors(map, g);
    }

    if (phase == Phase::organization) {
        std::vector<std::size_t> orphans;
        for (std::size_t i : sup.orphans) orphans.push_back(split.supervised_rows[i]);
        for (std::size_t i : uns.orphans) orphans.push_back(split.unsupervised_rows[i]);
        std::sort(orphans.begin(), orphans.end());
        for (std::size_t row : orphans) {
            if (!map.insert_node(batch.samples.row(row), batch.labels[row])) break;
        }
    }

    if (map.competition_count() >= p.age_wins) map.prune_losers();
}

MiniBatch make_batch(const Dataset& data, std::span<const std::size_t> rows) {
    MiniBatch batch;
    batch.samples = Matrix(rows.size(), data.dim());
    batch.labels.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto src = data.features.row(rows[i]);
        std::copy(src.begin(), src.end(), batch.samples.row(i).begin());
        batch.labels.push_back(data.training_label(rows[i]));
    }
    return batch;
}

SomMap fit(const Dataset& data, const Params& params) {
    params.validate();
    if (data.size() == 0) throw InputError("cannot train on an empty dataset");
    data.check();

    SomMap map(data.dim(), params);
    std::mt19937_64 rng(params.seed);
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    auto pass = [&](Phase phase) {
        std::shuffle(order.begin(), order.end(), rng);
        const std::span<const std::size_t> all(order);
        for (std::size_t start = 0; start < all.size(); start += params.batch_size) {
            const auto rows = all.subspan(start, std::min(params.batch_size, all.size() - start));
            train_batch(map, make_batch(data, rows), phase);
        }
    };

    for (std::uint32_t e = 0; e < params.epochs; ++e) pass(Phase::organization);
    pass(Phase::convergence);
    if (map.competition_count() > 0) {
        map.prune_losers(static_cast<double>(map.competition_count()));
    }
    return map;
}

}  // namespace bsssom
