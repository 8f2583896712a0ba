#ifndef ARGRECON_CONFLICT_HPP
#define ARGRECON_CONFLICT_HPP

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "argrecon/af.hpp"
#include "argrecon/af_io.hpp"
#include "argrecon/recipe.hpp"

namespace argrecon {

enum class ConflictKind { mutual, a_attacks_b, b_attacks_a, none };

std::string_view to_string(ConflictKind kind);
ConflictKind conflict_kind_from_string(std::string_view text);
ConflictKind mirror(ConflictKind kind);

// What two operations must share for a rule to fire.
enum class Scope {
    same_row,          // cell_edit/del_row row ids
    same_column,       // the columns each operation acts on
    same_cell,         // identical (row, column)
    column_in_sources, // the non-join operand's column is a join_col source
};

std::string_view to_string(Scope scope);
Scope scope_from_string(std::string_view text);

// One cell of the conflict matrix. `distinct_payload` additionally requires
// the operations to differ in value / function / new name.
struct ConflictRule {
    OpKind a;
    OpKind b;
    Scope scope;
    bool distinct_payload = false;
    ConflictKind result = ConflictKind::none;
};

// Conflict policy between operations of different curators. Pairs without a
// rule never conflict; identical operations never conflict.
class ConflictMatrix {
public:
    ConflictMatrix() = default;
    explicit ConflictMatrix(std::vector<ConflictRule> rules);

    // The default policy: deletions beat edits, transforms beat splits,
    // renames beat everything downstream of their source column.
    static const ConflictMatrix& standard();

    ConflictKind evaluate(const Operation& a, const Operation& b) const;

    const std::vector<ConflictRule>& rules() const noexcept { return rules_; }

    nlohmann::json to_json() const;
    static ConflictMatrix from_json(const nlohmann::json& value);

private:
    const ConflictRule* lookup(OpKind a, OpKind b) const;

    std::vector<ConflictRule> rules_;
};

inline ConflictKind pairwise_conflict(const Operation& a, const Operation& b) {
    return ConflictMatrix::standard().evaluate(a, b);
}

struct StepInfo {
    std::string curator;
    std::size_t position = 0;
    Operation operation;
};

struct ConflictGraph {
    AttackGraph graph;
    std::vector<OrderEdge> order_edges;  // consecutive steps of each recipe
    std::vector<StepInfo> steps;         // indexed like the graph's arguments
};

// Arguments are the step labels in recipe order; attacks come from every
// cross-curator pair of steps.
ConflictGraph detect_conflicts(const std::vector<Recipe>& recipes,
                               const ConflictMatrix& matrix = ConflictMatrix::standard());

// Sidecar for the APX output: order edges and per-step metadata.
nlohmann::json conflict_metadata(const ConflictGraph& conflicts);

} // namespace argrecon

#endif
