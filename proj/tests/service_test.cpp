#include <doctest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "argrecon/cli.hpp"
#include "argrecon/http_api.hpp"
#include "argrecon/pipeline.hpp"
#include "argrecon/session.hpp"
#include "fixtures.hpp"

using namespace argrecon;
using nlohmann::json;

namespace {

// A server on a free local port, stopped on destruction.
class TestServer {
public:
    explicit TestServer(std::shared_ptr<SessionStore> store = std::make_shared<SessionStore>())
        : store_(std::move(store)), server_(store_) {
        port_ = server_.bind("127.0.0.1", 0);
        thread_ = std::thread([this] { server_.listen(); });
        server_.wait_until_ready();
    }
    ~TestServer() {
        server_.stop();
        thread_.join();
    }
    httplib::Client client() const { return httplib::Client("127.0.0.1", port_); }
    SessionStore& store() { return *store_; }

private:
    std::shared_ptr<SessionStore> store_;
    HttpServer server_;
    int port_ = 0;
    std::thread thread_;
};

json upload(bool with_csv = true) {
    json body = {{"recipes", {json::parse(fixtures::read("alice.json")), json::parse(fixtures::read("bob.json"))}}};
    if (with_csv) body["csv"] = fixtures::read("books.csv");
    return body;
}

std::string create(httplib::Client& client, const json& body) {
    auto res = client.Post("/sessions", body.dump(), "application/json");
    REQUIRE(res);
    REQUIRE(res->status == 201);
    return json::parse(res->body)["id"].get<std::string>();
}

std::size_t chosen_index() {
    auto analysis = analyze({fixtures::alice(), fixtures::bob()});
    return find_stable(analysis, fixtures::chosen_accepted()).value();
}

struct CliRun {
    int code;
    std::string out;
    std::string err;
};

CliRun cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::filesystem::path scratch_dir() {
    std::random_device seed;
    auto dir = std::filesystem::temp_directory_path() / ("argrecon-test-" + std::to_string(seed()));
    std::filesystem::create_directories(dir);
    return dir;
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
}

} // namespace

TEST_CASE("HTTP: running example end to end") {
    TestServer server;
    auto client = server.client();
    auto id = create(client, upload());

    auto graph = client.Get("/sessions/" + id + "/graph");
    REQUIRE(graph);
    CHECK(graph->status == 200);
    auto body = json::parse(graph->body);
    CHECK(body["attacks"].size() == 15);
    CHECK(body["order_edges"].size() == 13);
    CHECK(body["grounded"]["H"] == "in");
    CHECK(body["grounded"]["K"] == "out");

    auto stable = client.Get("/sessions/" + id + "/stable");
    REQUIRE(stable);
    auto page = json::parse(stable->body);
    CHECK(page["total"] == 16);
    CHECK(page["pages"] == 16);
    CHECK(page["labelings"].size() == 1);
    auto wide = json::parse(client.Get("/sessions/" + id + "/stable?page=1&page_size=5")->body);
    CHECK(wide["labelings"][0]["index"] == 5);
    CHECK(wide["pages"] == 4);

    auto before = client.Get("/sessions/" + id + "/result");
    REQUIRE(before);
    CHECK(before->status == 409);

    auto select = client.Post("/sessions/" + id + "/select", json{{"index", chosen_index()}}.dump(), "application/json");
    REQUIRE(select);
    CHECK(select->status == 200);
    auto merged = json::parse(select->body);
    REQUIRE(merged["steps"].size() == 8);
    CHECK(merged["steps"][1]["label"] == "M");

    auto csv = client.Get("/sessions/" + id + "/result?format=csv");
    REQUIRE(csv);
    CHECK(csv->status == 200);
    CHECK(csv->get_header_value("Content-Type") == "text/csv");
    CHECK(csv->body == fixtures::read("merged_result.csv"));

    auto result = json::parse(client.Get("/sessions/" + id + "/result")->body);
    CHECK(result["table"]["rows"].size() == 3);
    CHECK(result["csv"] == fixtures::read("merged_result.csv"));
    CHECK(result["log"]["steps"].size() == 8);

    auto dot = client.Get("/sessions/" + id + "/dot");
    REQUIRE(dot);
    CHECK(dot->body.rfind("digraph AF {", 0) == 0);
    CHECK(dot->body.find("#F0CC00") == std::string::npos); // a stable labeling leaves nothing undecided
}

TEST_CASE("HTTP: errors") {
    TestServer server;
    auto client = server.client();
    auto id = create(client, upload(false));

    SUBCASE("unknown session") {
        CHECK(client.Get("/sessions/nope/graph")->status == 404);
        CHECK(client.Post("/sessions/nope/select", R"({"index": 0})", "application/json")->status == 404);
        auto res = client.Get("/sessions/nope/dot");
        CHECK(json::parse(res->body)["error"]["code"] == "not_found");
    }
    SUBCASE("out-of-range and malformed selections") {
        CHECK(client.Post("/sessions/" + id + "/select", R"({"index": 16})", "application/json")->status == 422);
        CHECK(client.Post("/sessions/" + id + "/select", R"({"index": -1})", "application/json")->status == 422);
        CHECK(client.Post("/sessions/" + id + "/select", R"({"idx": 1})", "application/json")->status == 422);
        CHECK(client.Post("/sessions/" + id + "/select", "not json", "application/json")->status == 422);
    }
    SUBCASE("malformed uploads create nothing") {
        auto before = server.store().size();
        CHECK(client.Post("/sessions", "{", "application/json")->status == 422);
        CHECK(client.Post("/sessions", R"({"recipes": [{"curator": "A"}]})", "application/json")->status == 422);
        auto bad_csv = upload(false);
        bad_csv["csv"] = "a,b\n1,2,3\n";
        CHECK(client.Post("/sessions", bad_csv.dump(), "application/json")->status == 422);
        CHECK(server.store().size() == before);
    }
    SUBCASE("bad paging") {
        CHECK(client.Get("/sessions/" + id + "/stable?page=x")->status == 422);
        CHECK(client.Get("/sessions/" + id + "/stable?page_size=0")->status == 422);
        auto past = json::parse(client.Get("/sessions/" + id + "/stable?page=99")->body);
        CHECK(past["labelings"].empty());
    }
    SUBCASE("a session without a dataset still merges but cannot produce a result") {
        CHECK(client.Post("/sessions/" + id + "/select", R"({"index": 0})", "application/json")->status == 200);
        auto res = client.Get("/sessions/" + id + "/result");
        CHECK(res->status == 409);
        CHECK(json::parse(res->body)["error"]["code"] == "invalid_state");
    }
    SUBCASE("a selection whose steps cannot be ordered is a conflict") {
        json cyclic = {{"recipes",
                        {{{"curator", "A"}, {"steps", {{{"label", "x"}, {"op", "rename"}, {"args", {"a", "b"}}}}}},
                         {{"curator", "B"}, {"steps", {{{"label", "y"}, {"op", "rename"}, {"args", {"b", "a"}}}}}}}}};
        auto other = create(client, cyclic);
        auto res = client.Post("/sessions/" + other + "/select", R"({"index": 0})", "application/json");
        CHECK(res->status == 409);
        CHECK(json::parse(res->body)["error"]["code"] == "dependency_cycle");
    }
}

TEST_CASE("HTTP: concurrent reads while selecting") {
    TestServer server;
    auto setup = server.client();
    auto id = create(setup, upload());
    std::atomic<int> failures = 0;
    std::vector<std::thread> workers;
    for (int t = 0; t < 4; ++t) {
        workers.emplace_back([&, t] {
            auto client = server.client();
            for (int i = 0; i < 10; ++i) {
                auto res = (t % 2 == 0)
                               ? client.Get("/sessions/" + id + "/graph")
                               : client.Post("/sessions/" + id + "/select", json{{"index", (t + i) % 16}}.dump(),
                                             "application/json");
                if (!res || (res->status != 200 && res->status != 409)) ++failures;
            }
        });
    }
    for (auto& worker : workers) worker.join();
    CHECK(failures == 0);
}

TEST_CASE("sessions survive a restart through snapshots") {
    auto dir = scratch_dir();
    std::string id;
    {
        SessionStore store({}, dir);
        SessionUpload input{{fixtures::alice(), fixtures::bob()}, fixtures::read("books.csv")};
        auto session = store.create(input);
        session->select(chosen_index());
        store.persist(*session);
        id = session->id();
    }
    SessionStore reloaded({}, dir);
    auto session = reloaded.find(id);
    CHECK(session->selected() == chosen_index());
    CHECK(session->result().csv == fixtures::read("merged_result.csv"));
    std::filesystem::remove_all(dir);
}

TEST_CASE("CLI subcommands") {
    const auto alice = fixtures::path("alice.json");
    const auto bob = fixtures::path("bob.json");
    const auto books = fixtures::path("books.csv");
    auto dir = scratch_dir();

    SUBCASE("extensions --count") {
        auto run = cli({"extensions", alice, bob, "--count"});
        CHECK(run.code == 0);
        CHECK(run.out == "stable: 16\n");
    }
    SUBCASE("extensions --list and default JSON") {
        auto list = cli({"extensions", alice, bob, "--list"});
        CHECK(list.out.find(std::to_string(chosen_index()) + ": E H J M O P Q S\n") != std::string::npos);
        auto full = json::parse(cli({"extensions", alice, bob}).out);
        CHECK(full["stable_count"] == 16);
        CHECK(full["exact"] == true);
    }
    SUBCASE("a cap turns the count into a lower bound") {
        CHECK(cli({"--cap", "3", "extensions", alice, bob, "--count"}).out == "stable: 3 (lower bound)\n");
    }
    SUBCASE("solve") {
        std::ofstream(dir / "one.apx") << "arg(a).\n";
        auto run = cli({"solve", (dir / "one.apx").string()});
        CHECK(run.code == 0);
        CHECK(json::parse(run.out) == json{{"a", "in"}});
        auto stable = cli({"solve", fixtures::path("attack_graph.apx"), "--semantics", "stable",
                           "--dot", (dir / "g.dot").string()});
        CHECK(json::parse(stable.out).size() == 16);
        CHECK(slurp(dir / "g.dot").find("#9BDFFB") != std::string::npos);
    }
    SUBCASE("conflicts writes APX that round-trips to the fixture graph") {
        auto run = cli({"conflicts", alice, bob, "--apx", (dir / "g.apx").string()});
        CHECK(run.code == 0);
        CHECK(json::parse(run.out)["attacks"].size() == 15);
        auto graph = parse_apx(slurp(dir / "g.apx"));
        CHECK(graph.attack_count() == 15);
    }
    SUBCASE("merge then apply equals pipeline") {
        auto index = std::to_string(chosen_index());
        CHECK(cli({"merge", alice, bob, "--stable", index, "-o", (dir / "m.json").string()}).code == 0);
        auto applied = cli({"apply", (dir / "m.json").string(), books});
        CHECK(applied.code == 0);
        auto piped = cli({"pipeline", alice, bob, books, "--stable", index});
        CHECK(piped.code == 0);
        CHECK(applied.out == piped.out);
        CHECK(piped.out == fixtures::read("merged_result.csv"));
        CHECK(json::parse(slurp(dir / "m.json"))["steps"] == json::parse(fixtures::read("merged_recipe.json"))["steps"]);
    }
    SUBCASE("apply a single curator's recipe") {
        CHECK(cli({"apply", alice, books}).out == fixtures::read("alice_result.csv"));
        CHECK(cli({"apply", bob, books}).out == fixtures::read("bob_result.csv"));
    }
    SUBCASE("config file") {
        std::ofstream(dir / "argrecon.toml") << "cap=2\n";
        auto run = cli({"--config", (dir / "argrecon.toml").string(), "extensions", alice, bob, "--count"});
        CHECK(run.out == "stable: 2 (lower bound)\n");
    }
    SUBCASE("errors are JSON on stderr with a nonzero exit") {
        auto missing = cli({"extensions", alice, (dir / "nope.json").string()});
        CHECK(missing.code != 0);
        CHECK(json::parse(missing.err)["error"]["code"] == "not_found");
        auto range = cli({"merge", alice, bob, "--stable", "16"});
        CHECK(range.code != 0);
        CHECK(json::parse(range.err)["error"]["code"] == "invalid_argument");
        auto usage = cli({"frobnicate"});
        CHECK(usage.code != 0);
        CHECK(json::parse(usage.err)["error"]["code"] == "usage");
        auto bad = cli({"solve", fixtures::path("alice.json")});
        CHECK(json::parse(bad.err)["error"]["code"] == "parse_error");
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("CLI and HTTP produce identical artifacts") {
    const auto alice = fixtures::path("alice.json");
    const auto bob = fixtures::path("bob.json");
    const auto books = fixtures::path("books.csv");
    const auto index = chosen_index();
    auto dir = scratch_dir();

    TestServer server;
    auto client = server.client();
    auto id = create(client, upload());

    auto conflicts = cli({"conflicts", alice, bob, "--dot", (dir / "g.dot").string()});
    CHECK(conflicts.out == client.Get("/sessions/" + id + "/graph")->body);
    CHECK(slurp(dir / "g.dot") == client.Get("/sessions/" + id + "/dot")->body);

    auto merged = cli({"merge", alice, bob, "--stable", std::to_string(index)});
    auto selected = client.Post("/sessions/" + id + "/select", json{{"index", index}}.dump(), "application/json");
    CHECK(merged.out == selected->body);

    auto piped = cli({"pipeline", alice, bob, books, "--stable", std::to_string(index)});
    CHECK(piped.out == client.Get("/sessions/" + id + "/result?format=csv")->body);

    auto page = json::parse(client.Get("/sessions/" + id + "/stable?page_size=100")->body);
    auto listed = json::parse(cli({"extensions", alice, bob}).out);
    CHECK(page["labelings"] == listed["stable"]);
    std::filesystem::remove_all(dir);
}
