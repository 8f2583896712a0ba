#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include <nlohmann/json.hpp>

#include "argrecon/conflict.hpp"
#include "argrecon/error.hpp"
#include "fixtures.hpp"

using namespace argrecon;

namespace {

std::set<std::pair<std::string, std::string>> named_edges(const AttackGraph& graph) {
    std::set<std::pair<std::string, std::string>> result;
    for (auto [from, to] : graph.edges()) {
        result.emplace(graph.name(from), graph.name(to));
    }
    return result;
}

const std::set<std::pair<std::string, std::string>> running_example_attacks = {
    {"E", "L"}, {"L", "E"}, {"F", "O"}, {"O", "F"}, {"J", "R"}, {"R", "J"}, {"G", "M"}, {"M", "G"},
    {"Q", "K"}, {"H", "N"}, {"N", "I"}, {"O", "I"}, {"F", "P"}, {"M", "K"}, {"G", "S"}};

} // namespace

TEST_CASE("pairwise conflicts from the running example") {
    CHECK(pairwise_conflict(RenameColumn{"Book Title", "Book-Title"}, RenameColumn{"Book Title", "Book_Title"}) ==
          ConflictKind::mutual);
    CHECK(pairwise_conflict(DeleteRow{RowId{4}}, CellEdit{RowId{4}, "Author", "Shannon, C.E."}) ==
          ConflictKind::a_attacks_b);
    CHECK(pairwise_conflict(DeleteRow{RowId{3}}, DeleteRow{RowId{3}}) == ConflictKind::none);
    CHECK(pairwise_conflict(Transform{"Date", "value.toNumber()"},
                            JoinColumns{{"Last Name", "Date"}, ", ", "Citation"}) == ConflictKind::a_attacks_b);
}

TEST_CASE("matrix cells") {
    const RowId r3{3}, r4{4};
    SUBCASE("cell edits") {
        CHECK(pairwise_conflict(CellEdit{r3, "c", "x"}, CellEdit{r3, "c", "y"}) == ConflictKind::mutual);
        CHECK(pairwise_conflict(CellEdit{r3, "c", "x"}, CellEdit{r3, "c", "x"}) == ConflictKind::none);
        CHECK(pairwise_conflict(CellEdit{r3, "c", "x"}, CellEdit{r4, "c", "y"}) == ConflictKind::none);
        CHECK(pairwise_conflict(CellEdit{r3, "c", "x"}, CellEdit{r3, "d", "y"}) == ConflictKind::none);
    }
    SUBCASE("deletions beat edits") {
        CHECK(pairwise_conflict(DeleteRow{r3}, CellEdit{r4, "c", "x"}) == ConflictKind::none);
        CHECK(pairwise_conflict(DeleteColumn{"c"}, CellEdit{r4, "c", "x"}) == ConflictKind::a_attacks_b);
        CHECK(pairwise_conflict(CellEdit{r4, "c", "x"}, DeleteColumn{"c"}) == ConflictKind::b_attacks_a);
        CHECK(pairwise_conflict(DeleteColumn{"c"}, DeleteColumn{"d"}) == ConflictKind::none);
    }
    SUBCASE("splits") {
        CHECK(pairwise_conflict(CellEdit{r3, "c", "x"}, SplitColumn{"c", ","}) == ConflictKind::a_attacks_b);
        CHECK(pairwise_conflict(DeleteColumn{"c"}, SplitColumn{"c", ","}) == ConflictKind::a_attacks_b);
        CHECK(pairwise_conflict(Transform{"c", "value.trim()"}, SplitColumn{"c", ","}) == ConflictKind::a_attacks_b);
        CHECK(pairwise_conflict(SplitColumn{"c", ","}, SplitColumn{"c", ";"}) == ConflictKind::none);
        CHECK(pairwise_conflict(SplitColumn{"c", ","}, JoinColumns{{"c", "d"}, ",", "e"}) == ConflictKind::none);
        CHECK(pairwise_conflict(DeleteRow{r3}, SplitColumn{"c", ","}) == ConflictKind::none);
    }
    SUBCASE("transforms") {
        CHECK(pairwise_conflict(Transform{"c", "value.trim()"}, CellEdit{r3, "c", "x"}) == ConflictKind::mutual);
        CHECK(pairwise_conflict(DeleteColumn{"c"}, Transform{"c", "value.trim()"}) == ConflictKind::a_attacks_b);
        CHECK(pairwise_conflict(Transform{"c", "value.trim()"}, Transform{"c", "value.toNumber()"}) ==
              ConflictKind::mutual);
        CHECK(pairwise_conflict(Transform{"c", "value.trim()"}, Transform{"c", "value.trim()"}) == ConflictKind::none);
        CHECK(pairwise_conflict(Transform{"c", "value.trim()"}, Transform{"d", "value.toNumber()"}) ==
              ConflictKind::none);
    }
    SUBCASE("joins") {
        JoinColumns join{{"a", "b"}, ",", "j"};
        CHECK(pairwise_conflict(CellEdit{r3, "a", "x"}, join) == ConflictKind::a_attacks_b);
        CHECK(pairwise_conflict(CellEdit{r3, "z", "x"}, join) == ConflictKind::none);
        CHECK(pairwise_conflict(DeleteColumn{"b"}, join) == ConflictKind::a_attacks_b);
        CHECK(pairwise_conflict(Transform{"b", "value.trim()"}, join) == ConflictKind::a_attacks_b);
        CHECK(pairwise_conflict(join, JoinColumns{{"a", "b"}, ";", "k"}) == ConflictKind::none);
    }
    SUBCASE("renames") {
        CHECK(pairwise_conflict(RenameColumn{"c", "n"}, CellEdit{r3, "c", "x"}) == ConflictKind::a_attacks_b);
        CHECK(pairwise_conflict(RenameColumn{"c", "n"}, DeleteColumn{"c"}) == ConflictKind::mutual);
        CHECK(pairwise_conflict(RenameColumn{"c", "n"}, SplitColumn{"c", ","}) == ConflictKind::a_attacks_b);
        CHECK(pairwise_conflict(RenameColumn{"c", "n"}, Transform{"c", "value.trim()"}) == ConflictKind::a_attacks_b);
        CHECK(pairwise_conflict(RenameColumn{"c", "n"}, JoinColumns{{"c", "d"}, ",", "e"}) == ConflictKind::a_attacks_b);
        CHECK(pairwise_conflict(RenameColumn{"c", "n"}, RenameColumn{"c", "m"}) == ConflictKind::mutual);
        CHECK(pairwise_conflict(RenameColumn{"c", "n"}, RenameColumn{"d", "m"}) == ConflictKind::none);
        // a derived name is just a name: renaming "Author 1" leaves the split of "Author" alone
        CHECK(pairwise_conflict(RenameColumn{"Author 1", "Last Name"}, SplitColumn{"Author", ","}) ==
              ConflictKind::none);
        CHECK(pairwise_conflict(RenameColumn{"c", "n"}, DeleteRow{r3}) == ConflictKind::none);
    }
}

namespace {

Operation random_operation(std::mt19937_64& rng) {
    const std::vector<std::string> columns = {"a", "b", "c"};
    auto column = [&] { return columns[std::uniform_int_distribution<std::size_t>(0, 2)(rng)]; };
    RowId row{std::uniform_int_distribution<std::uint64_t>(1, 3)(rng)};
    switch (std::uniform_int_distribution<int>(0, 6)(rng)) {
    case 0: return CellEdit{row, column(), std::uniform_int_distribution<int>(0, 1)(rng) ? "x" : "y"};
    case 1: return DeleteRow{row};
    case 2: return DeleteColumn{column()};
    case 3: return SplitColumn{column(), ","};
    case 4: return Transform{column(), std::uniform_int_distribution<int>(0, 1)(rng) ? "value.trim()" : "value.toNumber()"};
    case 5: return JoinColumns{{column(), column() + "2"}, ",", "j"};
    default: {
        auto from = column();
        return RenameColumn{from, from + (std::uniform_int_distribution<int>(0, 1)(rng) ? "_x" : "_y")};
    }
    }
}

bool overlaps(const Operation& a, const Operation& b) {
    auto fa = footprint(a);
    auto fb = footprint(b);
    auto columns = [](const Footprint& f) {
        std::set<std::string> all = f.columns_read;
        all.insert(f.columns_written.begin(), f.columns_written.end());
        all.insert(f.columns_deleted.begin(), f.columns_deleted.end());
        return all;
    };
    auto rows = [](const Footprint& f) {
        std::set<RowId> all = f.rows_deleted;
        for (const auto& cell : f.cells_edited) all.insert(cell.first);
        return all;
    };
    auto ca = columns(fa), cb = columns(fb);
    auto ra = rows(fa), rb = rows(fb);
    return std::any_of(ca.begin(), ca.end(), [&](const auto& c) { return cb.contains(c); }) ||
           std::any_of(ra.begin(), ra.end(), [&](const auto& r) { return rb.contains(r); });
}

} // namespace

TEST_CASE("pairwise conflicts mirror and stay within shared footprints") {
    std::mt19937_64 rng(11);
    for (int round = 0; round < 2000; ++round) {
        auto a = random_operation(rng);
        auto b = random_operation(rng);
        auto ab = pairwise_conflict(a, b);
        CHECK(pairwise_conflict(b, a) == mirror(ab));
        if (ab != ConflictKind::none) {
            CHECK(overlaps(a, b));
        }
    }
}

TEST_CASE("detect_conflicts on the running example") {
    auto conflicts = detect_conflicts({fixtures::alice(), fixtures::bob()});
    const auto& graph = conflicts.graph;
    CHECK(graph.size() == 15);
    CHECK(named_edges(graph) == running_example_attacks);
    CHECK(graph.attack_count() == 15);
    CHECK(conflicts.order_edges.size() == 13);
    CHECK(conflicts.order_edges.front() == OrderEdge{"E", "F"});
    CHECK(conflicts.order_edges.back() == OrderEdge{"R", "S"});
    // no attack between two steps of the same curator
    for (auto [from, to] : graph.edges()) {
        CHECK(conflicts.steps[from].curator != conflicts.steps[to].curator);
    }
}

TEST_CASE("detect_conflicts edge cases") {
    Recipe one{"Alice", {{"A1", DeleteRow{RowId{2}}, 1}}};
    Recipe two{"Bob", {{"B1", DeleteRow{RowId{2}}, 1}}};
    SUBCASE("identical one-step recipes do not conflict") {
        auto conflicts = detect_conflicts({one, two});
        CHECK(conflicts.graph.attack_count() == 0);
        CHECK(conflicts.order_edges.empty());
    }
    SUBCASE("a single recipe is rejected") {
        CHECK_THROWS_AS(detect_conflicts({one}), Error);
    }
    SUBCASE("labels must be unique across recipes") {
        two.steps[0].label = "A1";
        CHECK_THROWS_AS(detect_conflicts({one, two}), Error);
    }
    SUBCASE("curators must differ") {
        two.curator = "Alice";
        CHECK_THROWS_AS(detect_conflicts({one, two}), Error);
    }
}

TEST_CASE("conflict matrix as data") {
    SUBCASE("JSON round trip keeps behaviour") {
        auto matrix = ConflictMatrix::from_json(ConflictMatrix::standard().to_json());
        auto conflicts = detect_conflicts({fixtures::alice(), fixtures::bob()}, matrix);
        CHECK(named_edges(conflicts.graph) == running_example_attacks);
    }
    SUBCASE("an alternative policy changes the graph") {
        auto rules = ConflictMatrix::standard().to_json();
        for (auto& rule : rules) {
            if (rule["a"] == "transform" && rule["b"] == "split_col") {
                rule["result"] = "none"; // order instead of reject
            }
        }
        auto matrix = ConflictMatrix::from_json(rules);
        CHECK(matrix.evaluate(Transform{"c", "value.trim()"}, SplitColumn{"c", ","}) == ConflictKind::none);
        CHECK(matrix.evaluate(RenameColumn{"c", "d"}, SplitColumn{"c", ","}) == ConflictKind::a_attacks_b);
    }
    SUBCASE("malformed matrices") {
        CHECK_THROWS_AS(ConflictMatrix::from_json(nlohmann::json::object()), Error);
        CHECK_THROWS_AS(ConflictMatrix::from_json(nlohmann::json::parse(R"([{"a": "rename"}])")), Error);
        CHECK_THROWS_AS(ConflictMatrix::from_json(nlohmann::json::parse(
                            R"([{"a": "rename", "b": "del_col", "scope": "same_column", "result": "mutual"},
                                {"a": "del_col", "b": "rename", "scope": "same_column", "result": "mutual"}])")),
                        Error);
        CHECK_THROWS_AS(ConflictMatrix::from_json(nlohmann::json::parse(
                            R"([{"a": "rename", "b": "rename", "scope": "same_column", "result": "a_attacks_b"}])")),
                        Error);
    }
}

TEST_CASE("conflict metadata sidecar") {
    auto conflicts = detect_conflicts({fixtures::alice(), fixtures::bob()});
    auto meta = conflict_metadata(conflicts);
    CHECK(meta["steps"].size() == 15);
    CHECK(meta["steps"][0]["label"] == "E");
    CHECK(meta["steps"][0]["curator"] == "Alice");
    CHECK(meta["steps"][0]["description"] == R"(rename("Book Title", "Book-Title"))");
    CHECK(meta["order_edges"].size() == 13);
}
