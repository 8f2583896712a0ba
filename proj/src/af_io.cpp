#include "argrecon/af_io.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "argrecon/error.hpp"

namespace argrecon {

namespace {

class ApxParser {
public:
    explicit ApxParser(std::string_view text) : text_(text) {}

    AttackGraph parse() {
        AttackGraph graph;
        for (;;) {
            skip_blank();
            if (pos_ >= text_.size()) {
                break;
            }
            std::size_t statement_line = line_;
            std::string keyword = read_keyword();
            expect('(');
            if (keyword == "arg") {
                std::string id = read_id();
                expect(')');
                expect('.');
                graph.add_argument(id);
            } else if (keyword == "att") {
                std::string attacker = read_id();
                expect(',');
                std::string target = read_id();
                expect(')');
                expect('.');
                for (const auto& id : {attacker, target}) {
                    if (!graph.find(id)) {
                        throw Error(ErrorCode::parse_error,
                                    "line " + std::to_string(statement_line) +
                                        ": undeclared argument `" + id + "`",
                                    {id});
                    }
                }
                graph.add_attack(attacker, target);
            } else {
                fail("unknown statement `" + keyword + "`");
            }
        }
        return graph;
    }

private:
    [[noreturn]] void fail(const std::string& message) const {
        throw Error(ErrorCode::parse_error, "line " + std::to_string(line_) + ": " + message);
    }

    void skip_blank() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == '%') {
                while (pos_ < text_.size() && text_[pos_] != '\n') {
                    ++pos_;
                }
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                if (c == '\n') {
                    ++line_;
                }
                ++pos_;
            } else {
                break;
            }
        }
    }

    std::string read_keyword() {
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
        if (start == pos_) {
            fail(std::string("unexpected character `") + text_[pos_] + "`");
        }
        return std::string(text_.substr(start, pos_ - start));
    }

    std::string read_id() {
        skip_blank();
        std::size_t start = pos_;
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == '(' || c == ')' || c == ',' || c == '%' ||
                std::isspace(static_cast<unsigned char>(c))) {
                break;
            }
            ++pos_;
        }
        if (start == pos_) {
            fail("expected argument id");
        }
        std::string id(text_.substr(start, pos_ - start));
        skip_blank();
        return id;
    }

    void expect(char c) {
        skip_blank();
        if (pos_ >= text_.size() || text_[pos_] != c) {
            fail(std::string("expected `") + c + "`");
        }
        ++pos_;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
};

std::string quoted(std::string_view id) {
    std::string result = "\"";
    for (char c : id) {
        if (c == '"' || c == '\\') {
            result += '\\';
        }
        result += c;
    }
    result += '"';
    return result;
}

std::string_view fill_for(Label label) {
    switch (label) {
    case Label::in: return dot_fill_in;
    case Label::out: return dot_fill_out;
    case Label::undec: return dot_fill_undec;
    }
    return dot_fill_undec;
}

} // namespace

AttackGraph parse_apx(std::string_view text) {
    return ApxParser(text).parse();
}

std::string write_apx(const AttackGraph& graph) {
    std::ostringstream out;
    for (const auto& name : graph.names()) {
        out << "arg(" << name << ").\n";
    }
    for (auto [from, to] : graph.edges()) {
        out << "att(" << graph.name(from) << "," << graph.name(to) << ").\n";
    }
    return out.str();
}

std::string to_dot(const AttackGraph& graph, const DotOptions& options) {
    if (options.labeling && options.labeling->size() != graph.size()) {
        throw Error(ErrorCode::invalid_argument, "labeling does not match graph");
    }
    std::ostringstream out;
    out << "digraph AF {\n";
    for (ArgIndex arg = 0; arg < graph.size(); ++arg) {
        const auto& name = graph.name(arg);
        std::vector<std::string> attributes;
        if (auto shape = options.shapes.find(name); shape != options.shapes.end()) {
            attributes.push_back("shape=" + shape->second);
        }
        if (options.labeling) {
            attributes.push_back("style=filled");
            attributes.push_back("fillcolor=\"" + std::string(fill_for((*options.labeling)[arg])) + "\"");
        }
        out << "  " << quoted(name);
        if (!attributes.empty()) {
            out << " [";
            for (std::size_t i = 0; i < attributes.size(); ++i) {
                out << (i ? ", " : "") << attributes[i];
            }
            out << "]";
        }
        out << ";\n";
    }
    for (auto [from, to] : graph.edges()) {
        out << "  " << quoted(graph.name(from)) << " -> " << quoted(graph.name(to)) << ";\n";
    }
    auto order = options.order_edges;
    std::sort(order.begin(), order.end());
    order.erase(std::unique(order.begin(), order.end()), order.end());
    for (const auto& [before, after] : order) {
        out << "  " << quoted(before) << " -> " << quoted(after)
            << " [style=dashed];\n";
    }
    out << "}\n";
    return out.str();
}

} // namespace argrecon
