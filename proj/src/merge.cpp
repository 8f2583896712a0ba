#include "argrecon/merge.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "argrecon/error.hpp"

namespace argrecon {

using nlohmann::json;

std::string_view to_string(DependencyReason reason) {
    switch (reason) {
    case DependencyReason::intra_recipe: return "intra_recipe";
    case DependencyReason::produces_consumes: return "produces_consumes";
    case DependencyReason::consume_before_delete: return "consume_before_delete";
    }
    return "intra_recipe";
}

DependencyReason dependency_reason_from_string(std::string_view text) {
    for (auto reason : {DependencyReason::intra_recipe, DependencyReason::produces_consumes,
                        DependencyReason::consume_before_delete}) {
        if (to_string(reason) == text) {
            return reason;
        }
    }
    throw Error(ErrorCode::parse_error, "unknown dependency reason `" + std::string(text) + "`");
}

namespace {

template <class T>
bool intersects(const std::set<T>& a, const std::set<T>& b) {
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (*ia < *ib) {
            ++ia;
        } else if (*ib < *ia) {
            ++ib;
        } else {
            return true;
        }
    }
    return false;
}

std::set<std::string> united(const std::set<std::string>& a, const std::set<std::string>& b) {
    std::set<std::string> result = a;
    result.insert(b.begin(), b.end());
    return result;
}

// Columns `fp` reads without deleting them itself.
std::set<std::string> kept_reads(const Footprint& fp) {
    std::set<std::string> result;
    std::set_difference(fp.columns_read.begin(), fp.columns_read.end(), fp.columns_deleted.begin(),
                        fp.columns_deleted.end(), std::inserter(result, result.end()));
    return result;
}

// Every node Kahn's algorithm could not place keeps an unplaced
// predecessor, so walking predecessors must close a cycle.
std::vector<ArgumentId> find_cycle(std::size_t start, const std::vector<std::vector<std::size_t>>& prev,
                                   const std::vector<bool>& placed,
                                   const std::vector<AttributedStep>& steps) {
    std::map<std::size_t, std::size_t> seen_at;
    std::vector<std::size_t> path;
    std::size_t current = start;
    while (!seen_at.contains(current)) {
        seen_at[current] = path.size();
        path.push_back(current);
        current = *std::find_if(prev[current].begin(), prev[current].end(),
                                [&](std::size_t p) { return !placed[p]; });
    }
    std::vector<ArgumentId> cycle;
    for (std::size_t i = path.size(); i-- > seen_at[current];) {
        cycle.push_back(steps[path[i]].label);
    }
    return cycle;
}

} // namespace

std::vector<DependencyEdge> dependency_edges(const std::vector<AttributedStep>& accepted,
                                             const DependencyRules& rules) {
    std::vector<Footprint> prints;
    prints.reserve(accepted.size());
    for (const auto& step : accepted) {
        prints.push_back(footprint(step.operation));
    }
    std::set<DependencyEdge> edges;
    for (std::size_t i = 0; i < accepted.size(); ++i) {
        for (std::size_t j = 0; j < accepted.size(); ++j) {
            if (i == j) {
                continue;
            }
            const auto& x = accepted[i];
            const auto& y = accepted[j];
            if (x.curator == y.curator) {
                if (rules.intra_recipe && x.position < y.position) {
                    edges.insert({x.label, y.label, DependencyReason::intra_recipe});
                }
                continue;
            }
            if (x.operation == y.operation) {
                continue;
            }
            const bool produces =
                intersects(prints[i].columns_written, united(prints[j].columns_read, prints[j].columns_deleted));
            if (rules.produces_consumes && produces) {
                edges.insert({x.label, y.label, DependencyReason::produces_consumes});
            }
            if (rules.consume_before_delete && !produces &&
                intersects(prints[i].columns_deleted, kept_reads(prints[j]))) {
                edges.insert({y.label, x.label, DependencyReason::consume_before_delete});
            }
        }
    }
    return {edges.begin(), edges.end()};
}

MergedRecipe merge(const std::vector<Recipe>& recipes, const AttackGraph& graph,
                   const Labeling& labeling, const DependencyRules& rules) {
    if (labeling.size() != graph.size()) {
        throw Error(ErrorCode::invalid_argument, "labeling does not match the attack graph");
    }
    if (auto undecided = names_with(graph, labeling, Label::undec); !undecided.empty()) {
        std::string message = "unresolved conflicts:";
        for (const auto& name : undecided) {
            message += " " + name;
        }
        throw Error(ErrorCode::unresolved_conflicts, message, undecided);
    }

    std::vector<AttributedStep> accepted;
    std::size_t known = 0;
    for (const auto& recipe : recipes) {
        for (const auto& step : recipe.steps) {
            auto arg = graph.find(step.label);
            if (!arg) {
                throw Error(ErrorCode::invalid_argument,
                            "step `" + step.label + "` is not an argument of the attack graph", {step.label});
            }
            ++known;
            if (labeling[*arg] == Label::in) {
                accepted.push_back({step.label, step.operation, recipe.curator, step.position});
            }
        }
    }
    if (known != graph.size()) {
        throw Error(ErrorCode::invalid_argument, "attack graph has arguments that are not recipe steps");
    }

    MergedRecipe merged;
    merged.dependencies = dependency_edges(accepted, rules);

    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < accepted.size(); ++i) {
        index.emplace(accepted[i].label, i);
    }
    std::vector<std::vector<std::size_t>> next(accepted.size());
    std::vector<std::vector<std::size_t>> prev(accepted.size());
    std::vector<std::size_t> in_degree(accepted.size(), 0);
    std::set<std::pair<std::size_t, std::size_t>> arcs;
    for (const auto& edge : merged.dependencies) {
        arcs.emplace(index.at(edge.before), index.at(edge.after));
    }
    for (auto [from, to] : arcs) {
        next[from].push_back(to);
        prev[to].push_back(from);
        ++in_degree[to];
    }

    auto key = [&](std::size_t i) {
        return std::tie(accepted[i].position, accepted[i].curator, accepted[i].label);
    };
    auto before = [&](std::size_t a, std::size_t b) { return key(a) < key(b); };
    std::set<std::size_t, decltype(before)> ready(before);
    for (std::size_t i = 0; i < accepted.size(); ++i) {
        if (in_degree[i] == 0) {
            ready.insert(i);
        }
    }
    std::vector<bool> placed(accepted.size(), false);
    while (!ready.empty()) {
        std::size_t current = *ready.begin();
        ready.erase(ready.begin());
        placed[current] = true;
        merged.steps.push_back(accepted[current]);
        for (std::size_t to : next[current]) {
            if (--in_degree[to] == 0) {
                ready.insert(to);
            }
        }
    }
    if (merged.steps.size() != accepted.size()) {
        auto first = static_cast<std::size_t>(std::find(placed.begin(), placed.end(), false) - placed.begin());
        auto cycle = find_cycle(first, prev, placed, accepted);
        std::string message = "dependency cycle:";
        for (const auto& label : cycle) {
            message += " " + label + " ->";
        }
        message += " " + cycle.front();
        throw Error(ErrorCode::dependency_cycle, message, cycle);
    }
    return merged;
}

OrderCheck validate_order(const MergedRecipe& merged) {
    OrderCheck check;
    std::unordered_map<std::string, std::size_t> at;
    for (std::size_t i = 0; i < merged.steps.size(); ++i) {
        at.emplace(merged.steps[i].label, i);
    }
    std::set<ArgumentId> missing;
    for (const auto& edge : merged.dependencies) {
        auto before = at.find(edge.before);
        auto after = at.find(edge.after);
        if (before == at.end() || after == at.end()) {
            if (before == at.end()) missing.insert(edge.before);
            if (after == at.end()) missing.insert(edge.after);
            continue;
        }
        if (before->second >= after->second) {
            check.violated.push_back(edge);
        }
    }
    check.missing.assign(missing.begin(), missing.end());
    check.valid = check.violated.empty() && check.missing.empty();
    return check;
}

namespace {

std::string merged_curator(const MergedRecipe& merged) {
    std::vector<std::string> curators;
    for (const auto& step : merged.steps) {
        if (std::find(curators.begin(), curators.end(), step.curator) == curators.end()) {
            curators.push_back(step.curator);
        }
    }
    std::string name;
    for (const auto& curator : curators) {
        name += (name.empty() ? "" : "+") + curator;
    }
    return name.empty() ? "merged" : name;
}

} // namespace

json merged_to_json(const MergedRecipe& merged) {
    json steps = json::array();
    for (const auto& step : merged.steps) {
        steps.push_back({{"label", step.label},
                         {"op", to_string(kind(step.operation))},
                         {"args", operation_args(step.operation)},
                         {"curator", step.curator},
                         {"source_label", step.label},
                         {"source_position", step.position}});
    }
    json dependencies = json::array();
    for (const auto& edge : merged.dependencies) {
        dependencies.push_back(
            {{"before", edge.before}, {"after", edge.after}, {"reason", to_string(edge.reason)}});
    }
    return {{"curator", merged_curator(merged)},
            {"steps", std::move(steps)},
            {"dependencies", std::move(dependencies)}};
}

std::string serialize_merged(const MergedRecipe& merged) {
    return merged_to_json(merged).dump(2) + "\n";
}

MergedRecipe merged_from_json(const json& value) {
    Recipe recipe = recipe_from_json(value);
    MergedRecipe merged;
    const json& steps = value.at("steps");
    for (std::size_t i = 0; i < recipe.steps.size(); ++i) {
        const json& step = steps[i];
        AttributedStep attributed{recipe.steps[i].label, recipe.steps[i].operation, recipe.curator,
                                  recipe.steps[i].position};
        if (step.contains("source_label") && step["source_label"].is_string()) {
            attributed.label = step["source_label"].get<std::string>();
        }
        if (step.contains("curator") && step["curator"].is_string()) {
            attributed.curator = step["curator"].get<std::string>();
        }
        if (step.contains("source_position") && step["source_position"].is_number_unsigned()) {
            attributed.position = step["source_position"].get<std::size_t>();
        }
        merged.steps.push_back(std::move(attributed));
    }
    if (value.contains("dependencies")) {
        try {
            for (const json& edge : value.at("dependencies")) {
                merged.dependencies.push_back(
                    {edge.at("before").get<std::string>(), edge.at("after").get<std::string>(),
                     dependency_reason_from_string(edge.at("reason").get<std::string>())});
            }
        } catch (const json::exception& e) {
            throw Error(ErrorCode::parse_error, std::string("malformed dependency edge: ") + e.what());
        }
    } else {
        merged.dependencies = dependency_edges(merged.steps);
    }
    return merged;
}

Recipe as_recipe(const MergedRecipe& merged) {
    Recipe recipe{merged_curator(merged), {}};
    for (std::size_t i = 0; i < merged.steps.size(); ++i) {
        recipe.steps.push_back({merged.steps[i].label, merged.steps[i].operation, i + 1});
    }
    return recipe;
}

} // namespace argrecon
