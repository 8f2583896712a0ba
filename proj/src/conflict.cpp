#include "argrecon/conflict.hpp"

#include <algorithm>
#include <set>

#include <nlohmann/json.hpp>

#include "argrecon/error.hpp"

namespace argrecon {

using nlohmann::json;

std::string_view to_string(ConflictKind kind) {
    switch (kind) {
    case ConflictKind::mutual: return "mutual";
    case ConflictKind::a_attacks_b: return "a_attacks_b";
    case ConflictKind::b_attacks_a: return "b_attacks_a";
    case ConflictKind::none: return "none";
    }
    return "none";
}

ConflictKind conflict_kind_from_string(std::string_view text) {
    for (auto kind : {ConflictKind::mutual, ConflictKind::a_attacks_b, ConflictKind::b_attacks_a,
                      ConflictKind::none}) {
        if (to_string(kind) == text) {
            return kind;
        }
    }
    throw Error(ErrorCode::parse_error, "unknown conflict kind `" + std::string(text) + "`");
}

ConflictKind mirror(ConflictKind kind) {
    switch (kind) {
    case ConflictKind::a_attacks_b: return ConflictKind::b_attacks_a;
    case ConflictKind::b_attacks_a: return ConflictKind::a_attacks_b;
    default: return kind;
    }
}

std::string_view to_string(Scope scope) {
    switch (scope) {
    case Scope::same_row: return "same_row";
    case Scope::same_column: return "same_column";
    case Scope::same_cell: return "same_cell";
    case Scope::column_in_sources: return "column_in_sources";
    }
    return "same_column";
}

Scope scope_from_string(std::string_view text) {
    for (auto scope : {Scope::same_row, Scope::same_column, Scope::same_cell, Scope::column_in_sources}) {
        if (to_string(scope) == text) {
            return scope;
        }
    }
    throw Error(ErrorCode::parse_error, "unknown conflict scope `" + std::string(text) + "`");
}

namespace {

// Column an operation acts on; join_col and del_row have none.
const std::string* subject_column(const Operation& op) {
    return std::visit(
        [](const auto& o) -> const std::string* {
            using T = std::decay_t<decltype(o)>;
            if constexpr (std::is_same_v<T, DeleteRow> || std::is_same_v<T, JoinColumns>) {
                return nullptr;
            } else {
                return &o.column;
            }
        },
        op);
}

std::optional<RowId> subject_row(const Operation& op) {
    if (auto edit = std::get_if<CellEdit>(&op)) return edit->row;
    if (auto del = std::get_if<DeleteRow>(&op)) return del->row;
    return std::nullopt;
}

// The parameters that say *what* an operation does, as opposed to where.
json payload(const Operation& op) {
    return std::visit(
        [](const auto& o) -> json {
            using T = std::decay_t<decltype(o)>;
            if constexpr (std::is_same_v<T, CellEdit>) return o.value;
            else if constexpr (std::is_same_v<T, SplitColumn>) return o.separator;
            else if constexpr (std::is_same_v<T, Transform>) return o.expression;
            else if constexpr (std::is_same_v<T, JoinColumns>) return json::array({o.separator, o.new_column});
            else if constexpr (std::is_same_v<T, RenameColumn>) return o.new_name;
            else return nullptr;
        },
        op);
}

bool column_in_join(const Operation& other, const Operation& maybe_join) {
    auto join = std::get_if<JoinColumns>(&maybe_join);
    auto column = subject_column(other);
    return join && column &&
           std::find(join->sources.begin(), join->sources.end(), *column) != join->sources.end();
}

bool in_scope(Scope scope, const Operation& a, const Operation& b) {
    switch (scope) {
    case Scope::same_row: {
        auto ra = subject_row(a);
        auto rb = subject_row(b);
        return ra && rb && *ra == *rb;
    }
    case Scope::same_column: {
        auto ca = subject_column(a);
        auto cb = subject_column(b);
        return ca && cb && *ca == *cb;
    }
    case Scope::same_cell:
        return in_scope(Scope::same_row, a, b) && in_scope(Scope::same_column, a, b);
    case Scope::column_in_sources:
        return column_in_join(a, b) || column_in_join(b, a);
    }
    return false;
}

ConflictRule rule(OpKind a, OpKind b, Scope scope, ConflictKind result, bool distinct = false) {
    return ConflictRule{a, b, scope, distinct, result};
}

} // namespace

ConflictMatrix::ConflictMatrix(std::vector<ConflictRule> rules) : rules_(std::move(rules)) {
    std::set<std::pair<OpKind, OpKind>> seen;
    for (const auto& r : rules_) {
        auto key = std::minmax(r.a, r.b);
        if (!seen.insert(key).second) {
            throw Error(ErrorCode::invalid_argument,
                        "conflict matrix has two rules for " + std::string(to_string(r.a)) + "/" +
                            std::string(to_string(r.b)));
        }
        if (r.a == r.b && (r.result == ConflictKind::a_attacks_b || r.result == ConflictKind::b_attacks_a)) {
            throw Error(ErrorCode::invalid_argument,
                        "rule for " + std::string(to_string(r.a)) + "/" + std::string(to_string(r.a)) +
                            " must be symmetric");
        }
    }
}

const ConflictMatrix& ConflictMatrix::standard() {
    using K = OpKind;
    using C = ConflictKind;
    static const ConflictMatrix matrix({
        rule(K::cell_edit, K::cell_edit, Scope::same_cell, C::mutual, true),
        rule(K::del_row, K::cell_edit, Scope::same_row, C::a_attacks_b),
        rule(K::del_col, K::cell_edit, Scope::same_column, C::a_attacks_b),
        rule(K::split_col, K::cell_edit, Scope::same_column, C::b_attacks_a),
        rule(K::split_col, K::del_col, Scope::same_column, C::b_attacks_a),
        rule(K::transform, K::cell_edit, Scope::same_column, C::mutual),
        rule(K::transform, K::del_col, Scope::same_column, C::b_attacks_a),
        rule(K::transform, K::split_col, Scope::same_column, C::a_attacks_b),
        rule(K::transform, K::transform, Scope::same_column, C::mutual, true),
        rule(K::join_col, K::cell_edit, Scope::column_in_sources, C::b_attacks_a),
        rule(K::join_col, K::del_col, Scope::column_in_sources, C::b_attacks_a),
        rule(K::join_col, K::transform, Scope::column_in_sources, C::b_attacks_a),
        rule(K::rename, K::cell_edit, Scope::same_column, C::a_attacks_b),
        rule(K::rename, K::del_col, Scope::same_column, C::mutual),
        rule(K::rename, K::split_col, Scope::same_column, C::a_attacks_b),
        rule(K::rename, K::transform, Scope::same_column, C::a_attacks_b),
        rule(K::rename, K::join_col, Scope::column_in_sources, C::a_attacks_b),
        rule(K::rename, K::rename, Scope::same_column, C::mutual, true),
    });
    return matrix;
}

const ConflictRule* ConflictMatrix::lookup(OpKind a, OpKind b) const {
    for (const auto& r : rules_) {
        if (r.a == a && r.b == b) {
            return &r;
        }
    }
    return nullptr;
}

ConflictKind ConflictMatrix::evaluate(const Operation& a, const Operation& b) const {
    if (a == b) {
        return ConflictKind::none;
    }
    const Operation* first = &a;
    const Operation* second = &b;
    bool flipped = false;
    const ConflictRule* r = lookup(kind(a), kind(b));
    if (!r) {
        r = lookup(kind(b), kind(a));
        std::swap(first, second);
        flipped = true;
    }
    if (!r || !in_scope(r->scope, *first, *second)) {
        return ConflictKind::none;
    }
    if (r->distinct_payload && payload(*first) == payload(*second)) {
        return ConflictKind::none;
    }
    return flipped ? mirror(r->result) : r->result;
}

json ConflictMatrix::to_json() const {
    json rules = json::array();
    for (const auto& r : rules_) {
        rules.push_back({{"a", to_string(r.a)},
                         {"b", to_string(r.b)},
                         {"scope", to_string(r.scope)},
                         {"distinct_payload", r.distinct_payload},
                         {"result", to_string(r.result)}});
    }
    return rules;
}

ConflictMatrix ConflictMatrix::from_json(const json& value) {
    if (!value.is_array()) {
        throw Error(ErrorCode::parse_error, "conflict matrix must be a JSON array of rules");
    }
    std::vector<ConflictRule> rules;
    for (const auto& entry : value) {
        try {
            rules.push_back({op_kind_from_string(entry.at("a").get<std::string>()),
                             op_kind_from_string(entry.at("b").get<std::string>()),
                             scope_from_string(entry.at("scope").get<std::string>()),
                             entry.value("distinct_payload", false),
                             conflict_kind_from_string(entry.at("result").get<std::string>())});
        } catch (const json::exception& e) {
            throw Error(ErrorCode::parse_error, std::string("malformed conflict rule: ") + e.what());
        }
    }
    return ConflictMatrix(std::move(rules));
}

ConflictGraph detect_conflicts(const std::vector<Recipe>& recipes, const ConflictMatrix& matrix) {
    if (recipes.size() < 2) {
        throw Error(ErrorCode::invalid_argument, "conflict detection needs at least two recipes");
    }
    ConflictGraph result;
    std::set<std::string> curators;
    for (const auto& recipe : recipes) {
        if (!curators.insert(recipe.curator).second) {
            throw Error(ErrorCode::invalid_argument, "duplicate curator `" + recipe.curator + "`",
                        {recipe.curator});
        }
        for (const auto& step : recipe.steps) {
            if (result.graph.find(step.label)) {
                throw Error(ErrorCode::invalid_argument, "duplicate step label `" + step.label + "`",
                            {step.label});
            }
            result.graph.add_argument(step.label);
            result.steps.push_back({recipe.curator, step.position, step.operation});
        }
        for (std::size_t i = 1; i < recipe.steps.size(); ++i) {
            result.order_edges.emplace_back(recipe.steps[i - 1].label, recipe.steps[i].label);
        }
    }
    for (std::size_t r = 0; r < recipes.size(); ++r) {
        for (std::size_t s = r + 1; s < recipes.size(); ++s) {
            for (const auto& a : recipes[r].steps) {
                for (const auto& b : recipes[s].steps) {
                    switch (matrix.evaluate(a.operation, b.operation)) {
                    case ConflictKind::mutual:
                        result.graph.add_attack(a.label, b.label);
                        result.graph.add_attack(b.label, a.label);
                        break;
                    case ConflictKind::a_attacks_b:
                        result.graph.add_attack(a.label, b.label);
                        break;
                    case ConflictKind::b_attacks_a:
                        result.graph.add_attack(b.label, a.label);
                        break;
                    case ConflictKind::none:
                        break;
                    }
                }
            }
        }
    }
    return result;
}

json conflict_metadata(const ConflictGraph& conflicts) {
    json steps = json::array();
    for (ArgIndex arg = 0; arg < conflicts.graph.size(); ++arg) {
        const auto& info = conflicts.steps[arg];
        steps.push_back({{"label", conflicts.graph.name(arg)},
                         {"curator", info.curator},
                         {"position", info.position},
                         {"op", to_string(kind(info.operation))},
                         {"args", operation_args(info.operation)},
                         {"description", describe(info.operation)}});
    }
    json order = json::array();
    for (const auto& [before, after] : conflicts.order_edges) {
        order.push_back({before, after});
    }
    return {{"steps", std::move(steps)}, {"order_edges", std::move(order)}};
}

} // namespace argrecon
