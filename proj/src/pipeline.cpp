#include "argrecon/pipeline.hpp"

#include <algorithm>
#include <array>

#include <nlohmann/json.hpp>

#include "argrecon/af_io.hpp"
#include "argrecon/error.hpp"

namespace argrecon {

using nlohmann::json;

Analysis analyze(std::vector<Recipe> recipes, const PipelineConfig& config) {
    Analysis analysis;
    analysis.conflicts = detect_conflicts(recipes, config.matrix);
    analysis.recipes = std::move(recipes);
    analysis.grounded = grounded_labeling(analysis.conflicts.graph);
    analysis.stable = enumerate_stable(analysis.conflicts.graph, config.stable_cap);
    return analysis;
}

MergedRecipe merge_stable(const Analysis& analysis, std::size_t index, const PipelineConfig& config) {
    const auto& labelings = analysis.stable.labelings;
    if (index >= labelings.size()) {
        throw Error(ErrorCode::invalid_argument,
                    "stable labeling index " + std::to_string(index) + " out of range (" +
                        std::to_string(labelings.size()) + " available)",
                    {std::to_string(index)});
    }
    return merge(analysis.recipes, analysis.conflicts.graph, labelings[index], config.rules);
}

std::optional<std::size_t> find_stable(const Analysis& analysis, std::vector<ArgumentId> accepted) {
    std::sort(accepted.begin(), accepted.end());
    const auto& labelings = analysis.stable.labelings;
    for (std::size_t i = 0; i < labelings.size(); ++i) {
        if (names_with(analysis.conflicts.graph, labelings[i], Label::in) == accepted) {
            return i;
        }
    }
    return std::nullopt;
}

std::map<ArgumentId, std::string> curator_shapes(const Analysis& analysis) {
    static constexpr std::array<const char*, 5> shapes = {"ellipse", "box", "diamond", "hexagon",
                                                          "octagon"};
    std::map<ArgumentId, std::string> result;
    for (std::size_t r = 0; r < analysis.recipes.size(); ++r) {
        for (const auto& step : analysis.recipes[r].steps) {
            result[step.label] = shapes[r % shapes.size()];
        }
    }
    return result;
}

std::string analysis_dot(const Analysis& analysis, const Labeling& labeling) {
    DotOptions options;
    options.labeling = labeling;
    options.order_edges = analysis.conflicts.order_edges;
    options.shapes = curator_shapes(analysis);
    return to_dot(analysis.conflicts.graph, options);
}

json graph_json(const Analysis& analysis) {
    const auto& graph = analysis.conflicts.graph;
    json attacks = json::array();
    for (auto [from, to] : graph.edges()) {
        attacks.push_back({graph.name(from), graph.name(to)});
    }
    json result = conflict_metadata(analysis.conflicts);
    result["attacks"] = std::move(attacks);
    result["grounded"] = labeling_to_json(graph, analysis.grounded);
    return result;
}

json stable_entry_json(const Analysis& analysis, std::size_t index) {
    const auto& graph = analysis.conflicts.graph;
    const auto& labeling = analysis.stable.labelings.at(index);
    return {{"index", index},
            {"in", names_with(graph, labeling, Label::in)},
            {"out", names_with(graph, labeling, Label::out)},
            {"labeling", labeling_to_json(graph, labeling)}};
}

json extensions_json(const Analysis& analysis) {
    json stable = json::array();
    for (std::size_t i = 0; i < analysis.stable.labelings.size(); ++i) {
        stable.push_back(stable_entry_json(analysis, i));
    }
    return {{"grounded", labeling_to_json(analysis.conflicts.graph, analysis.grounded)},
            {"stable_count", analysis.stable.labelings.size()},
            {"exact", !analysis.stable.truncated},
            {"stable", std::move(stable)}};
}

json stable_page_json(const Analysis& analysis, std::size_t page, std::size_t page_size) {
    if (page_size == 0) {
        throw Error(ErrorCode::invalid_argument, "page size must be positive");
    }
    const std::size_t total = analysis.stable.labelings.size();
    json entries = json::array();
    for (std::size_t i = page * page_size; i < std::min(total, (page + 1) * page_size); ++i) {
        entries.push_back(stable_entry_json(analysis, i));
    }
    return {{"page", page},
            {"page_size", page_size},
            {"pages", (total + page_size - 1) / page_size},
            {"total", total},
            {"exact", !analysis.stable.truncated},
            {"labelings", std::move(entries)}};
}

} // namespace argrecon
