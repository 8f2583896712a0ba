#ifndef ARGRECON_PIPELINE_HPP
#define ARGRECON_PIPELINE_HPP

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "argrecon/af.hpp"
#include "argrecon/conflict.hpp"
#include "argrecon/dataset.hpp"
#include "argrecon/merge.hpp"
#include "argrecon/recipe.hpp"

namespace argrecon {

inline constexpr std::size_t default_stable_cap = 10000;

// Knobs shared by the CLI and the HTTP service.
struct PipelineConfig {
    std::size_t stable_cap = default_stable_cap;
    DependencyRules rules;
    ConflictMatrix matrix = ConflictMatrix::standard();
};

// Everything derived from a set of recipes: the attack graph, its grounded
// labeling and the (capped) stable labelings in canonical order.
struct Analysis {
    std::vector<Recipe> recipes;
    ConflictGraph conflicts;
    Labeling grounded;
    StableEnumeration stable;
};

Analysis analyze(std::vector<Recipe> recipes, const PipelineConfig& config = {});

// Merges with the stable labeling at `index`; invalid_argument when the
// index is out of range.
MergedRecipe merge_stable(const Analysis& analysis, std::size_t index,
                          const PipelineConfig& config = {});

// Index of the stable labeling whose IN set is exactly `accepted`.
std::optional<std::size_t> find_stable(const Analysis& analysis, std::vector<ArgumentId> accepted);

// Node shapes per curator: first recipe ovals, second boxes, then others.
std::map<ArgumentId, std::string> curator_shapes(const Analysis& analysis);

std::string analysis_dot(const Analysis& analysis, const Labeling& labeling);

nlohmann::json graph_json(const Analysis& analysis);
nlohmann::json stable_entry_json(const Analysis& analysis, std::size_t index);
nlohmann::json extensions_json(const Analysis& analysis);
nlohmann::json stable_page_json(const Analysis& analysis, std::size_t page, std::size_t page_size);

} // namespace argrecon

#endif
