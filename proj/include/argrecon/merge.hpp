#ifndef ARGRECON_MERGE_HPP
#define ARGRECON_MERGE_HPP

#include <compare>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "argrecon/af.hpp"
#include "argrecon/recipe.hpp"

namespace argrecon {

enum class DependencyReason { intra_recipe, produces_consumes, consume_before_delete };

std::string_view to_string(DependencyReason reason);
DependencyReason dependency_reason_from_string(std::string_view text);

struct DependencyEdge {
    ArgumentId before;
    ArgumentId after;
    DependencyReason reason;
    friend auto operator<=>(const DependencyEdge&, const DependencyEdge&) = default;
};

struct AttributedStep {
    ArgumentId label;
    Operation operation;
    std::string curator;
    std::size_t position = 0; // 1-based position in the curator's recipe
    friend bool operator==(const AttributedStep&, const AttributedStep&) = default;
};

// Which ordering rules contribute edges.
struct DependencyRules {
    bool intra_recipe = true;
    bool produces_consumes = true;
    bool consume_before_delete = true;
};

// Ordering constraints among accepted steps, sorted and without duplicates.
//  - intra_recipe: a curator's own steps keep their relative order
//  - produces_consumes: a step writing a column another curator's step
//    reads or deletes runs first
//  - consume_before_delete: a reader of a column runs before another
//    curator's step that deletes it
// Identical operations authored by different curators are interchangeable
// and get no cross edges between them.
std::vector<DependencyEdge> dependency_edges(const std::vector<AttributedStep>& accepted,
                                             const DependencyRules& rules = {});

struct MergedRecipe {
    std::vector<AttributedStep> steps;
    std::vector<DependencyEdge> dependencies;
    friend bool operator==(const MergedRecipe&, const MergedRecipe&) = default;
};

// Orders the IN arguments of a two-valued labeling. `graph` is the attack
// graph the labeling was computed on; its argument names are step labels.
// Ties are broken by original position, then curator, then label.
MergedRecipe merge(const std::vector<Recipe>& recipes, const AttackGraph& graph,
                   const Labeling& labeling, const DependencyRules& rules = {});

struct OrderCheck {
    bool valid = true;
    std::vector<DependencyEdge> violated;
    std::vector<ArgumentId> missing; // edge endpoints absent from the steps
};

OrderCheck validate_order(const MergedRecipe& merged);

// Same layout as a recipe file, with "curator" and "source_label" on each
// step and the dependency edges alongside.
nlohmann::json merged_to_json(const MergedRecipe& merged);
std::string serialize_merged(const MergedRecipe& merged);
MergedRecipe merged_from_json(const nlohmann::json& value);

// The merged steps as a plain recipe, e.g. for execution.
Recipe as_recipe(const MergedRecipe& merged);

} // namespace argrecon

#endif
