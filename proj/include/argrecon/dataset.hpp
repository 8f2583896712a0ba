#ifndef ARGRECON_DATASET_HPP
#define ARGRECON_DATASET_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "argrecon/merge.hpp"
#include "argrecon/recipe.hpp"

namespace argrecon {

// A table cell: empty, text (whitespace is significant) or a number.
// Numbers only come out of value.toNumber().
class Cell {
public:
    Cell() = default;
    static Cell text(std::string value);
    static Cell number(std::int64_t value) { return Cell(Storage(value)); }
    static Cell number(int value) { return number(static_cast<std::int64_t>(value)); }
    static Cell number(double value) { return Cell(Storage(value)); }

    bool is_empty() const noexcept { return std::holds_alternative<std::monostate>(value_); }
    bool is_text() const noexcept { return std::holds_alternative<std::string>(value_); }
    bool is_number() const noexcept { return !is_empty() && !is_text(); }

    const std::string& as_text() const { return std::get<std::string>(value_); }
    std::optional<double> as_number() const;

    // Text as is, numbers in plain decimal without exponent, empty as "".
    std::string render() const;

    friend bool operator==(const Cell&, const Cell&) = default;

private:
    using Storage = std::variant<std::monostate, std::string, std::int64_t, double>;
    explicit Cell(Storage value) : value_(std::move(value)) {}

    Storage value_;
};

struct Row {
    RowId id;
    std::vector<Cell> cells; // aligned with Dataset::columns
    friend bool operator==(const Row&, const Row&) = default;
};

class Dataset {
public:
    Dataset() = default;
    // Throws on duplicate column names or rows of the wrong width.
    Dataset(std::vector<std::string> columns, std::vector<Row> rows);

    const std::vector<std::string>& columns() const noexcept { return columns_; }
    const std::vector<Row>& rows() const noexcept { return rows_; }

    std::optional<std::size_t> column_index(std::string_view name) const;
    std::optional<std::size_t> row_index(RowId id) const;
    // Throws not_found for unknown rows or columns.
    const Cell& at(RowId row, std::string_view column) const;

    friend bool operator==(const Dataset&, const Dataset&) = default;

private:
    std::vector<std::string> columns_;
    std::vector<Row> rows_;
};

// RFC 4180 CSV with a mandatory header row. Fields are kept byte-exact;
// empty fields load as empty cells and row ids are assigned 1..n.
Dataset load_csv(std::string_view text);
// Quotes fields containing commas, quotes, line breaks or edge whitespace.
std::string save_csv(const Dataset& dataset);

// {"columns": [...], "rows": [{"id": 1, "cells": [...]}]}; empty cells are null.
nlohmann::json dataset_to_json(const Dataset& dataset);

// Applies one operation, returning a new dataset. Warnings (e.g. values
// that do not convert to numbers) are appended to `warnings`.
Dataset apply_op(const Dataset& dataset, const Operation& op, std::vector<std::string>& warnings);
Dataset apply_op(const Dataset& dataset, const Operation& op);

struct StepOutcome {
    ArgumentId label;
    std::vector<std::string> warnings;
};

struct StepFailure {
    ArgumentId label;
    std::size_t index = 0; // 0-based step index
    std::string message;
};

struct Execution {
    Dataset dataset;                    // final state, or the state before the failing step
    std::vector<StepOutcome> log;       // one entry per completed step
    std::optional<StepFailure> failure;

    bool ok() const noexcept { return !failure.has_value(); }
};

Execution apply_recipe(const Dataset& dataset, const Recipe& recipe);
Execution apply_recipe(const Dataset& dataset, const MergedRecipe& merged);

nlohmann::json execution_log_to_json(const Execution& execution);

} // namespace argrecon

#endif
