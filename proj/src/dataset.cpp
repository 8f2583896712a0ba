#include "argrecon/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <regex>
#include <set>

#include <nlohmann/json.hpp>

#include "argrecon/error.hpp"

namespace argrecon {

using nlohmann::json;

// ---------------------------------------------------------------- cells

Cell Cell::text(std::string value) {
    if (value.empty()) {
        return Cell();
    }
    return Cell(Storage(std::move(value)));
}

std::optional<double> Cell::as_number() const {
    if (auto i = std::get_if<std::int64_t>(&value_)) return static_cast<double>(*i);
    if (auto d = std::get_if<double>(&value_)) return *d;
    return std::nullopt;
}

std::string Cell::render() const {
    if (auto s = std::get_if<std::string>(&value_)) {
        return *s;
    }
    if (auto i = std::get_if<std::int64_t>(&value_)) {
        return std::to_string(*i);
    }
    if (auto d = std::get_if<double>(&value_)) {
        char buffer[512];
        auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, *d, std::chars_format::fixed);
        if (ec != std::errc()) {
            return std::to_string(*d);
        }
        return std::string(buffer, end);
    }
    return {};
}

// ---------------------------------------------------------------- dataset

Dataset::Dataset(std::vector<std::string> columns, std::vector<Row> rows)
    : columns_(std::move(columns)), rows_(std::move(rows)) {
    std::set<std::string_view> names;
    for (const auto& column : columns_) {
        if (!names.insert(column).second) {
            throw Error(ErrorCode::invalid_argument, "duplicate column `" + column + "`", {column});
        }
    }
    std::set<RowId> ids;
    for (const auto& row : rows_) {
        if (row.cells.size() != columns_.size()) {
            throw Error(ErrorCode::invalid_argument,
                        "row " + to_string(row.id) + " has " + std::to_string(row.cells.size()) +
                            " cells, expected " + std::to_string(columns_.size()));
        }
        if (!ids.insert(row.id).second) {
            throw Error(ErrorCode::invalid_argument, "duplicate row id " + to_string(row.id));
        }
    }
}

std::optional<std::size_t> Dataset::column_index(std::string_view name) const {
    auto it = std::find(columns_.begin(), columns_.end(), name);
    if (it == columns_.end()) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(it - columns_.begin());
}

std::optional<std::size_t> Dataset::row_index(RowId id) const {
    auto it = std::find_if(rows_.begin(), rows_.end(), [id](const Row& r) { return r.id == id; });
    if (it == rows_.end()) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(it - rows_.begin());
}

const Cell& Dataset::at(RowId row, std::string_view column) const {
    auto r = row_index(row);
    auto c = column_index(column);
    if (!r) throw Error(ErrorCode::not_found, "no row " + to_string(row), {to_string(row)});
    if (!c) throw Error(ErrorCode::not_found, "no column `" + std::string(column) + "`", {std::string(column)});
    return rows_[*r].cells[*c];
}

// ---------------------------------------------------------------- csv

namespace {

std::vector<std::vector<std::string>> parse_records(std::string_view text) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool quoted = false;      // inside a quoted field
    bool was_quoted = false;  // current field started with a quote
    bool at_field_start = true;
    std::size_t line = 1;

    auto end_field = [&] {
        record.push_back(std::move(field));
        field.clear();
        was_quoted = false;
        at_field_start = true;
    };
    auto end_record = [&] {
        end_field();
        records.push_back(std::move(record));
        record.clear();
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                if (c == '\n') ++line;
                field += c;
            }
            continue;
        }
        switch (c) {
        case '"':
            if (!at_field_start) {
                throw Error(ErrorCode::parse_error,
                            "line " + std::to_string(line) + ": stray quote inside unquoted field");
            }
            quoted = true;
            was_quoted = true;
            at_field_start = false;
            break;
        case ',':
            end_field();
            break;
        case '\r':
            if (i + 1 < text.size() && text[i + 1] == '\n') {
                break; // CRLF: the '\n' ends the record
            }
            [[fallthrough]];
        case '\n':
            end_record();
            ++line;
            break;
        default:
            if (was_quoted) {
                throw Error(ErrorCode::parse_error,
                            "line " + std::to_string(line) + ": text after closing quote");
            }
            field += c;
            at_field_start = false;
        }
    }
    if (quoted) {
        throw Error(ErrorCode::parse_error, "unterminated quoted field");
    }
    // a final line without a trailing newline
    if (!at_field_start || !record.empty() || was_quoted) {
        end_record();
    }
    return records;
}

bool needs_quotes(std::string_view field) {
    if (field.find_first_of(",\"\r\n") != std::string_view::npos) {
        return true;
    }
    auto space = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
    return !field.empty() && (space(field.front()) || space(field.back()));
}

void write_field(std::string& out, std::string_view field) {
    if (!needs_quotes(field)) {
        out += field;
        return;
    }
    out += '"';
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
}

} // namespace

Dataset load_csv(std::string_view text) {
    auto records = parse_records(text);
    if (records.empty()) {
        throw Error(ErrorCode::parse_error, "CSV has no header row");
    }
    std::vector<std::string> columns = std::move(records.front());
    std::set<std::string> names;
    for (const auto& column : columns) {
        if (!names.insert(column).second) {
            throw Error(ErrorCode::parse_error, "duplicate header `" + column + "`", {column});
        }
    }
    std::vector<Row> rows;
    for (std::size_t r = 1; r < records.size(); ++r) {
        if (records[r].size() != columns.size()) {
            throw Error(ErrorCode::parse_error, "record " + std::to_string(r + 1) + " has " +
                                                    std::to_string(records[r].size()) + " fields, expected " +
                                                    std::to_string(columns.size()));
        }
        Row row{RowId{r}, {}};
        for (auto& field : records[r]) {
            row.cells.push_back(Cell::text(std::move(field)));
        }
        rows.push_back(std::move(row));
    }
    return Dataset(std::move(columns), std::move(rows));
}

std::string save_csv(const Dataset& dataset) {
    std::string out;
    auto write_record = [&out](const auto& fields, auto render) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) out += ',';
            write_field(out, render(fields[i]));
        }
        out += '\n';
    };
    write_record(dataset.columns(), [](const std::string& s) { return s; });
    for (const auto& row : dataset.rows()) {
        write_record(row.cells, [](const Cell& c) { return c.render(); });
    }
    return out;
}

json dataset_to_json(const Dataset& dataset) {
    json rows = json::array();
    for (const auto& row : dataset.rows()) {
        json cells = json::array();
        for (const auto& cell : row.cells) {
            if (cell.is_empty()) {
                cells.push_back(nullptr);
            } else if (cell.is_text()) {
                cells.push_back(cell.as_text());
            } else {
                // keep integers integral in JSON
                double value = *cell.as_number();
                if (std::trunc(value) == value && std::abs(value) < 9.0e15) {
                    cells.push_back(static_cast<std::int64_t>(value));
                } else {
                    cells.push_back(value);
                }
            }
        }
        rows.push_back({{"id", row.id.value}, {"cells", std::move(cells)}});
    }
    return {{"columns", dataset.columns()}, {"rows", std::move(rows)}};
}

// ---------------------------------------------------------------- operations

namespace {

constexpr std::string_view whitespace = " \t\n\r\f\v";

std::string trim(std::string_view text) {
    auto first = text.find_first_not_of(whitespace);
    if (first == std::string_view::npos) {
        return {};
    }
    auto last = text.find_last_not_of(whitespace);
    return std::string(text.substr(first, last - first + 1));
}

std::optional<Cell> parse_number(std::string_view text) {
    static const std::regex integer(R"([+-]?[0-9]+)");
    static const std::regex decimal(R"([+-]?([0-9]+\.?[0-9]*|\.[0-9]+)([eE][+-]?[0-9]+)?)");
    const std::string s(text);
    std::string_view digits = text;
    if (!digits.empty() && digits.front() == '+') {
        digits.remove_prefix(1);
    }
    if (std::regex_match(s, integer)) {
        std::int64_t value = 0;
        auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
        if (ec == std::errc() && end == digits.data() + digits.size()) {
            return Cell::number(value);
        }
        // out of int64 range: fall through to floating point
    }
    if (std::regex_match(s, decimal)) {
        double value = 0;
        auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
        if (ec == std::errc() && end == digits.data() + digits.size() && std::isfinite(value)) {
            return Cell::number(value);
        }
    }
    return std::nullopt;
}

std::size_t require_column(const Dataset& data, std::string_view column, std::string_view op) {
    if (auto index = data.column_index(column)) {
        return *index;
    }
    throw Error(ErrorCode::not_found, std::string(op) + ": no column `" + std::string(column) + "`",
                {std::string(column)});
}

std::size_t require_row(const Dataset& data, RowId row, std::string_view op) {
    if (auto index = data.row_index(row)) {
        return *index;
    }
    throw Error(ErrorCode::not_found, std::string(op) + ": no row " + to_string(row), {to_string(row)});
}

void require_free(const Dataset& data, std::string_view column, std::string_view op) {
    if (data.column_index(column)) {
        throw Error(ErrorCode::invalid_argument,
                    std::string(op) + ": column `" + std::string(column) + "` already exists",
                    {std::string(column)});
    }
}

std::vector<std::string> split_parts(std::string_view text, std::string_view separator) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (;;) {
        auto hit = text.find(separator, start);
        if (hit == std::string_view::npos) {
            parts.push_back(trim(text.substr(start)));
            return parts;
        }
        parts.push_back(trim(text.substr(start, hit - start)));
        start = hit + separator.size();
    }
}

class Applier {
public:
    Applier(const Dataset& data, std::vector<std::string>& warnings)
        : columns_(data.columns()), rows_(data.rows()), source_(data), warnings_(warnings) {}

    Dataset operator()(const CellEdit& op) {
        auto c = require_column(source_, op.column, "cell_edit");
        auto r = require_row(source_, op.row, "cell_edit");
        rows_[r].cells[c] = Cell::text(op.value);
        return finish();
    }

    Dataset operator()(const DeleteRow& op) {
        auto r = require_row(source_, op.row, "del_row");
        rows_.erase(rows_.begin() + static_cast<std::ptrdiff_t>(r));
        return finish();
    }

    Dataset operator()(const DeleteColumn& op) {
        auto c = require_column(source_, op.column, "del_col");
        erase_column(c);
        return finish();
    }

    Dataset operator()(const SplitColumn& op) {
        if (op.separator.empty()) {
            throw Error(ErrorCode::invalid_argument, "split_col: separator must not be empty");
        }
        auto c = require_column(source_, op.column, "split_col");
        std::vector<std::vector<std::string>> parts;
        std::size_t width = 1;
        for (const auto& row : rows_) {
            const Cell& cell = row.cells[c];
            parts.push_back(cell.is_empty() ? std::vector<std::string>{}
                                            : split_parts(cell.render(), op.separator));
            width = std::max(width, parts.back().size());
        }
        for (std::size_t k = 1; k <= width; ++k) {
            std::string name = op.column + " " + std::to_string(k);
            require_free(source_, name, "split_col");
            columns_.push_back(std::move(name));
        }
        for (std::size_t r = 0; r < rows_.size(); ++r) {
            for (std::size_t k = 0; k < width; ++k) {
                rows_[r].cells.push_back(k < parts[r].size() ? Cell::text(parts[r][k]) : Cell());
            }
        }
        return finish();
    }

    Dataset operator()(const Transform& op) {
        auto c = require_column(source_, op.column, "transform");
        const bool to_number = op.expression == grel_to_number;
        if (!to_number && op.expression != grel_trim) {
            throw Error(ErrorCode::invalid_argument,
                        "transform: unsupported expression `" + op.expression + "`");
        }
        for (auto& row : rows_) {
            Cell& cell = row.cells[c];
            if (!cell.is_text()) {
                continue;
            }
            std::string trimmed = trim(cell.as_text());
            if (!to_number) {
                cell = Cell::text(std::move(trimmed));
            } else if (auto number = parse_number(trimmed)) {
                cell = *number;
            } else {
                warnings_.push_back("row " + to_string(row.id) + ": cannot convert \"" +
                                    cell.as_text() + "\" to a number");
            }
        }
        return finish();
    }

    Dataset operator()(const JoinColumns& op) {
        std::vector<std::size_t> sources;
        for (const auto& column : op.sources) {
            sources.push_back(require_column(source_, column, "join_col"));
        }
        require_free(source_, op.new_column, "join_col");
        columns_.push_back(op.new_column);
        for (auto& row : rows_) {
            std::string joined;
            for (std::size_t i = 0; i < sources.size(); ++i) {
                if (i) joined += op.separator;
                joined += row.cells[sources[i]].render();
            }
            row.cells.push_back(Cell::text(std::move(joined)));
        }
        return finish();
    }

    Dataset operator()(const RenameColumn& op) {
        auto c = require_column(source_, op.column, "rename");
        require_free(source_, op.new_name, "rename");
        columns_[c] = op.new_name;
        return finish();
    }

private:
    void erase_column(std::size_t c) {
        columns_.erase(columns_.begin() + static_cast<std::ptrdiff_t>(c));
        for (auto& row : rows_) {
            row.cells.erase(row.cells.begin() + static_cast<std::ptrdiff_t>(c));
        }
    }

    Dataset finish() { return Dataset(std::move(columns_), std::move(rows_)); }

    std::vector<std::string> columns_;
    std::vector<Row> rows_;
    const Dataset& source_;
    std::vector<std::string>& warnings_;
};

struct LabeledOp {
    const ArgumentId* label;
    const Operation* op;
};

Execution run(const Dataset& dataset, const std::vector<LabeledOp>& steps) {
    Execution execution{dataset, {}, std::nullopt};
    for (std::size_t i = 0; i < steps.size(); ++i) {
        StepOutcome outcome{*steps[i].label, {}};
        try {
            execution.dataset = apply_op(execution.dataset, *steps[i].op, outcome.warnings);
        } catch (const Error& e) {
            execution.failure = StepFailure{*steps[i].label, i, e.what()};
            return execution;
        }
        execution.log.push_back(std::move(outcome));
    }
    return execution;
}

} // namespace

Dataset apply_op(const Dataset& dataset, const Operation& op, std::vector<std::string>& warnings) {
    Applier applier(dataset, warnings);
    return std::visit(applier, op);
}

Dataset apply_op(const Dataset& dataset, const Operation& op) {
    std::vector<std::string> ignored;
    return apply_op(dataset, op, ignored);
}

Execution apply_recipe(const Dataset& dataset, const Recipe& recipe) {
    std::vector<LabeledOp> steps;
    for (const auto& step : recipe.steps) {
        steps.push_back({&step.label, &step.operation});
    }
    return run(dataset, steps);
}

Execution apply_recipe(const Dataset& dataset, const MergedRecipe& merged) {
    std::vector<LabeledOp> steps;
    for (const auto& step : merged.steps) {
        steps.push_back({&step.label, &step.operation});
    }
    return run(dataset, steps);
}

json execution_log_to_json(const Execution& execution) {
    json steps = json::array();
    for (const auto& outcome : execution.log) {
        steps.push_back({{"label", outcome.label}, {"warnings", outcome.warnings}});
    }
    json result = {{"steps", std::move(steps)}};
    if (execution.failure) {
        result["failure"] = {{"label", execution.failure->label},
                             {"index", execution.failure->index},
                             {"message", execution.failure->message}};
    }
    return result;
}

} // namespace argrecon
