// Running-example fixtures shared by the test binaries.
#ifndef ARGRECON_TESTS_FIXTURES_HPP
#define ARGRECON_TESTS_FIXTURES_HPP

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "argrecon/af.hpp"
#include "argrecon/af_io.hpp"
#include "argrecon/dataset.hpp"
#include "argrecon/recipe.hpp"

#ifndef ARGRECON_DATA_DIR
#error "ARGRECON_DATA_DIR must point at data/running_example"
#endif

namespace argrecon::fixtures {

inline std::string path(const std::string& name) {
    return std::string(ARGRECON_DATA_DIR) + "/" + name;
}

inline std::string read(const std::string& name) {
    std::ifstream in(path(name), std::ios::binary);
    if (!in) {
        throw std::runtime_error("missing fixture " + name);
    }
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
}

// The fifteen attacks listed for the running example, transcribed by hand.
inline AttackGraph attack_graph() {
    return parse_apx(read("attack_graph.apx"));
}

inline Recipe alice() { return parse_recipe(read("alice.json")); }
inline Recipe bob() { return parse_recipe(read("bob.json")); }
inline Dataset books() { return load_csv(read("books.csv")); }

inline const std::vector<std::string>& chosen_accepted() {
    static const std::vector<std::string> accepted = {"E", "H", "J", "M", "O", "P", "Q", "S"};
    return accepted;
}

// The chosen stable labeling: IN = {E,H,J,M,O,P,Q,S}, everything else OUT.
inline Labeling chosen_labeling(const AttackGraph& graph) {
    Labeling labeling(graph.size(), Label::out);
    for (const auto& id : chosen_accepted()) {
        labeling[graph.index_of(id)] = Label::in;
    }
    return labeling;
}

// Step order of the expected merged recipe.
inline const std::vector<std::string>& expected_merge_order() {
    static const std::vector<std::string> order = {"E", "M", "H", "O", "P", "J", "Q", "S"};
    return order;
}

} // namespace argrecon::fixtures

#endif
