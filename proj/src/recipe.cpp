#include "argrecon/recipe.hpp"

#include <algorithm>
#include <array>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "argrecon/error.hpp"

namespace argrecon {

using nlohmann::json;

std::string to_string(RowId row) {
    return std::to_string(row.value);
}

namespace {

constexpr std::array<std::string_view, op_kind_count> kind_names = {
    "cell_edit", "del_row", "del_col", "split_col", "transform", "join_col", "rename"};

[[noreturn]] void invalid(const std::string& message) {
    throw Error(ErrorCode::invalid_argument, message);
}

std::string quote(std::string_view text) {
    return json(text).dump();
}

std::string string_arg(const json& args, std::size_t index, std::string_view kind_name) {
    const json& value = args.at(index);
    if (!value.is_string()) {
        throw Error(ErrorCode::parse_error, std::string(kind_name) + ": argument " +
                                                std::to_string(index + 1) + " must be a string");
    }
    return value.get<std::string>();
}

RowId row_arg(const json& args, std::size_t index, std::string_view kind_name) {
    const json& value = args.at(index);
    if (!value.is_number_integer() || value.get<std::int64_t>() < 1) {
        throw Error(ErrorCode::parse_error, std::string(kind_name) + ": argument " +
                                                std::to_string(index + 1) +
                                                " must be a positive integer row id");
    }
    return RowId{value.get<std::uint64_t>()};
}

} // namespace

OpKind kind(const Operation& op) {
    return static_cast<OpKind>(op.index());
}

std::string_view to_string(OpKind kind) {
    return kind_names.at(static_cast<std::size_t>(kind));
}

OpKind op_kind_from_string(std::string_view text) {
    for (std::size_t i = 0; i < kind_names.size(); ++i) {
        if (kind_names[i] == text) {
            return static_cast<OpKind>(i);
        }
    }
    throw Error(ErrorCode::parse_error, "unknown operation kind `" + std::string(text) + "`",
                {std::string(text)});
}

std::string describe(const Operation& op) {
    std::string args;
    const json values = operation_args(op);
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) {
            args += ", ";
        }
        if (values[i].is_array()) {
            // join_col lists its sources inline, as the recipes print them
            for (std::size_t j = 0; j < values[i].size(); ++j) {
                args += (j ? ", " : "") + quote(values[i][j].get<std::string>());
            }
        } else {
            args += values[i].dump();
        }
    }
    return std::string(to_string(kind(op))) + "(" + args + ")";
}

void validate(const Operation& op) {
    std::visit(
        [](const auto& o) {
            using T = std::decay_t<decltype(o)>;
            if constexpr (std::is_same_v<T, CellEdit>) {
                if (o.row.value == 0) invalid("cell_edit: row id must be positive");
                if (o.column.empty()) invalid("cell_edit: column name must not be empty");
            } else if constexpr (std::is_same_v<T, DeleteRow>) {
                if (o.row.value == 0) invalid("del_row: row id must be positive");
            } else if constexpr (std::is_same_v<T, DeleteColumn>) {
                if (o.column.empty()) invalid("del_col: column name must not be empty");
            } else if constexpr (std::is_same_v<T, SplitColumn>) {
                if (o.column.empty()) invalid("split_col: column name must not be empty");
                if (o.separator.empty()) invalid("split_col: separator must not be empty");
            } else if constexpr (std::is_same_v<T, Transform>) {
                if (o.column.empty()) invalid("transform: column name must not be empty");
                if (o.expression != grel_trim && o.expression != grel_to_number) {
                    invalid("transform: unsupported expression `" + o.expression + "`");
                }
            } else if constexpr (std::is_same_v<T, JoinColumns>) {
                if (o.sources.size() < 2) invalid("join_col: needs at least two source columns");
                if (o.new_column.empty()) invalid("join_col: new column name must not be empty");
                if (std::find(o.sources.begin(), o.sources.end(), o.new_column) != o.sources.end()) {
                    invalid("join_col: new column `" + o.new_column + "` is one of its sources");
                }
            } else if constexpr (std::is_same_v<T, RenameColumn>) {
                if (o.column.empty() || o.new_name.empty()) {
                    invalid("rename: column names must not be empty");
                }
                if (o.column == o.new_name) {
                    invalid("rename: `" + o.column + "` renamed to itself");
                }
            }
        },
        op);
}

json operation_args(const Operation& op) {
    return std::visit(
        [](const auto& o) -> json {
            using T = std::decay_t<decltype(o)>;
            if constexpr (std::is_same_v<T, CellEdit>) {
                return json::array({o.row.value, o.column, o.value});
            } else if constexpr (std::is_same_v<T, DeleteRow>) {
                return json::array({o.row.value});
            } else if constexpr (std::is_same_v<T, DeleteColumn>) {
                return json::array({o.column});
            } else if constexpr (std::is_same_v<T, SplitColumn>) {
                return json::array({o.column, o.separator});
            } else if constexpr (std::is_same_v<T, Transform>) {
                return json::array({o.column, o.expression});
            } else if constexpr (std::is_same_v<T, JoinColumns>) {
                return json::array({json(o.sources), o.separator, o.new_column});
            } else {
                return json::array({o.column, o.new_name});
            }
        },
        op);
}

Operation operation_from_json(std::string_view kind_name, const json& args) {
    const OpKind op_kind = op_kind_from_string(kind_name);
    static constexpr std::array<std::size_t, op_kind_count> arity = {3, 1, 1, 2, 2, 3, 2};
    const std::size_t expected = arity[static_cast<std::size_t>(op_kind)];
    if (!args.is_array() || args.size() != expected) {
        throw Error(ErrorCode::parse_error, std::string(kind_name) + ": expected " +
                                                std::to_string(expected) + " arguments");
    }
    Operation op;
    switch (op_kind) {
    case OpKind::cell_edit:
        op = CellEdit{row_arg(args, 0, kind_name), string_arg(args, 1, kind_name),
                      string_arg(args, 2, kind_name)};
        break;
    case OpKind::del_row:
        op = DeleteRow{row_arg(args, 0, kind_name)};
        break;
    case OpKind::del_col:
        op = DeleteColumn{string_arg(args, 0, kind_name)};
        break;
    case OpKind::split_col:
        op = SplitColumn{string_arg(args, 0, kind_name), string_arg(args, 1, kind_name)};
        break;
    case OpKind::transform:
        op = Transform{string_arg(args, 0, kind_name), string_arg(args, 1, kind_name)};
        break;
    case OpKind::join_col: {
        const json& sources = args[0];
        if (!sources.is_array()) {
            throw Error(ErrorCode::parse_error, "join_col: argument 1 must be an array of column names");
        }
        JoinColumns join;
        for (std::size_t i = 0; i < sources.size(); ++i) {
            join.sources.push_back(string_arg(sources, i, kind_name));
        }
        join.separator = string_arg(args, 1, kind_name);
        join.new_column = string_arg(args, 2, kind_name);
        op = std::move(join);
        break;
    }
    case OpKind::rename:
        op = RenameColumn{string_arg(args, 0, kind_name), string_arg(args, 1, kind_name)};
        break;
    }
    validate(op);
    return op;
}

std::string auto_label(std::size_t position) {
    std::string label;
    for (std::size_t n = position; n > 0; n = (n - 1) / 26) {
        label.insert(label.begin(), static_cast<char>('A' + (n - 1) % 26));
    }
    return label;
}

Recipe recipe_from_json(const json& value) {
    if (!value.is_object()) {
        throw Error(ErrorCode::parse_error, "recipe must be a JSON object");
    }
    Recipe recipe;
    if (!value.contains("curator") || !value["curator"].is_string() ||
        value["curator"].get<std::string>().empty()) {
        throw Error(ErrorCode::parse_error, "recipe needs a non-empty \"curator\" string");
    }
    recipe.curator = value["curator"].get<std::string>();
    if (!value.contains("steps") || !value["steps"].is_array()) {
        throw Error(ErrorCode::parse_error, "recipe needs a \"steps\" array");
    }
    std::unordered_set<std::string> labels;
    std::size_t position = 0;
    for (const json& step : value["steps"]) {
        ++position;
        if (!step.is_object() || !step.contains("op") || !step["op"].is_string()) {
            throw Error(ErrorCode::parse_error,
                        "step " + std::to_string(position) + ": needs an \"op\" string");
        }
        std::string label = auto_label(position);
        if (step.contains("label")) {
            if (!step["label"].is_string() || step["label"].get<std::string>().empty()) {
                throw Error(ErrorCode::parse_error,
                            "step " + std::to_string(position) + ": label must be a non-empty string");
            }
            label = step["label"].get<std::string>();
        }
        if (!labels.insert(label).second) {
            throw Error(ErrorCode::parse_error, "duplicate step label `" + label + "`", {label});
        }
        const json args = step.contains("args") ? step["args"] : json::array();
        try {
            recipe.steps.push_back(
                {label, operation_from_json(step["op"].get<std::string>(), args), position});
        } catch (const Error& e) {
            throw Error(e.code(), "step " + label + ": " + e.what(), {label});
        }
    }
    return recipe;
}

Recipe parse_recipe(std::string_view text) {
    json value;
    try {
        value = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::parse_error, std::string("invalid recipe JSON: ") + e.what());
    }
    return recipe_from_json(value);
}

json recipe_to_json(const Recipe& recipe) {
    json steps = json::array();
    for (const auto& step : recipe.steps) {
        steps.push_back({{"label", step.label},
                         {"op", to_string(kind(step.operation))},
                         {"args", operation_args(step.operation)}});
    }
    return {{"curator", recipe.curator}, {"steps", std::move(steps)}};
}

std::string serialize_recipe(const Recipe& recipe) {
    return recipe_to_json(recipe).dump(2) + "\n";
}

Footprint footprint(const Operation& op) {
    Footprint fp;
    std::visit(
        [&fp](const auto& o) {
            using T = std::decay_t<decltype(o)>;
            if constexpr (std::is_same_v<T, CellEdit>) {
                fp.cells_edited.insert({o.row, o.column});
                fp.columns_written.insert(o.column);
            } else if constexpr (std::is_same_v<T, DeleteRow>) {
                fp.rows_deleted.insert(o.row);
            } else if constexpr (std::is_same_v<T, DeleteColumn>) {
                fp.columns_read.insert(o.column);
                fp.columns_deleted.insert(o.column);
            } else if constexpr (std::is_same_v<T, SplitColumn>) {
                fp.columns_read.insert(o.column);
                fp.columns_written.insert(o.column + " 1");
                fp.columns_written.insert(o.column + " 2");
            } else if constexpr (std::is_same_v<T, Transform>) {
                fp.columns_read.insert(o.column);
                fp.columns_written.insert(o.column);
            } else if constexpr (std::is_same_v<T, JoinColumns>) {
                fp.columns_read.insert(o.sources.begin(), o.sources.end());
                fp.columns_written.insert(o.new_column);
            } else if constexpr (std::is_same_v<T, RenameColumn>) {
                fp.columns_read.insert(o.column);
                fp.columns_written.insert(o.new_name);
                fp.columns_deleted.insert(o.column);
            }
        },
        op);
    return fp;
}

} // namespace argrecon
