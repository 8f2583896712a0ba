#ifndef ARGRECON_RECIPE_HPP
#define ARGRECON_RECIPE_HPP

#include <compare>
#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "argrecon/af.hpp"

namespace argrecon {

// Stable row identifier, assigned 1..n at load and never renumbered.
struct RowId {
    std::uint64_t value = 0;
    friend auto operator<=>(const RowId&, const RowId&) = default;
};

std::string to_string(RowId row);

struct CellEdit {
    RowId row;
    std::string column;
    std::string value;
    friend bool operator==(const CellEdit&, const CellEdit&) = default;
};

struct DeleteRow {
    RowId row;
    friend bool operator==(const DeleteRow&, const DeleteRow&) = default;
};

struct DeleteColumn {
    std::string column;
    friend bool operator==(const DeleteColumn&, const DeleteColumn&) = default;
};

struct SplitColumn {
    std::string column;
    std::string separator;
    friend bool operator==(const SplitColumn&, const SplitColumn&) = default;
};

struct Transform {
    std::string column;
    std::string expression; // value.trim() or value.toNumber()
    friend bool operator==(const Transform&, const Transform&) = default;
};

struct JoinColumns {
    std::vector<std::string> sources;
    std::string separator;
    std::string new_column;
    friend bool operator==(const JoinColumns&, const JoinColumns&) = default;
};

struct RenameColumn {
    std::string column;
    std::string new_name;
    friend bool operator==(const RenameColumn&, const RenameColumn&) = default;
};

using Operation =
    std::variant<CellEdit, DeleteRow, DeleteColumn, SplitColumn, Transform, JoinColumns, RenameColumn>;

// Same order as the Operation alternatives.
enum class OpKind { cell_edit, del_row, del_col, split_col, transform, join_col, rename };

inline constexpr std::size_t op_kind_count = 7;

OpKind kind(const Operation& op);
std::string_view to_string(OpKind kind);
OpKind op_kind_from_string(std::string_view text); // throws parse_error

// Human-readable form, e.g. rename("Book Title", "Book-Title").
std::string describe(const Operation& op);

// Throws invalid_argument when parameters break the per-kind contract.
void validate(const Operation& op);

// Only these two GREL expressions are supported.
inline constexpr std::string_view grel_trim = "value.trim()";
inline constexpr std::string_view grel_to_number = "value.toNumber()";

nlohmann::json operation_args(const Operation& op);
Operation operation_from_json(std::string_view kind_name, const nlohmann::json& args);

struct RecipeStep {
    ArgumentId label;
    Operation operation;
    std::size_t position = 0; // 1-based
    friend bool operator==(const RecipeStep&, const RecipeStep&) = default;
};

struct Recipe {
    std::string curator;
    std::vector<RecipeStep> steps;
    friend bool operator==(const Recipe&, const Recipe&) = default;
};

// Label used for an unlabeled step at 1-based `position`: A..Z, AA, AB, ...
std::string auto_label(std::size_t position);

Recipe parse_recipe(std::string_view text);
Recipe recipe_from_json(const nlohmann::json& value);
nlohmann::json recipe_to_json(const Recipe& recipe);
std::string serialize_recipe(const Recipe& recipe);

using CellRef = std::pair<RowId, std::string>;

// Names, rows and cells an operation touches. Names are plain strings:
// "Author 1" is just a column name, with no lineage back to "Author".
struct Footprint {
    std::set<std::string> columns_read;
    std::set<std::string> columns_written;
    std::set<std::string> columns_deleted;
    std::set<RowId> rows_deleted;
    std::set<CellRef> cells_edited;
    friend bool operator==(const Footprint&, const Footprint&) = default;
};

Footprint footprint(const Operation& op);

} // namespace argrecon

#endif
