#ifndef ARGRECON_AF_IO_HPP
#define ARGRECON_AF_IO_HPP

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "argrecon/af.hpp"

namespace argrecon {

// APX: `arg(a).` and `att(a,b).` statements, any number per line, with `%`
// line comments. Attacks must reference declared arguments.
AttackGraph parse_apx(std::string_view text);
std::string write_apx(const AttackGraph& graph);

using OrderEdge = std::pair<ArgumentId, ArgumentId>;

inline constexpr std::string_view dot_fill_in = "#9BDFFB";
inline constexpr std::string_view dot_fill_out = "#FFC380";
inline constexpr std::string_view dot_fill_undec = "#F0CC00";

struct DotOptions {
    std::optional<Labeling> labeling;
    std::vector<OrderEdge> order_edges; // drawn dashed
    std::map<ArgumentId, std::string> shapes; // optional per-node shape
};

// Graphviz digraph; attack edges solid, order edges dashed, nodes filled by
// label when a labeling is given. Byte-deterministic.
std::string to_dot(const AttackGraph& graph, const DotOptions& options = {});

} // namespace argrecon

#endif
