#include "argrecon/cli.hpp"

#include <csignal>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "argrecon/af_io.hpp"
#include "argrecon/conflict.hpp"
#include "argrecon/dataset.hpp"
#include "argrecon/error.hpp"
#include "argrecon/http_api.hpp"
#include "argrecon/merge.hpp"
#include "argrecon/pipeline.hpp"
#include "argrecon/session.hpp"

namespace argrecon {

using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::not_found, "cannot read `" + path + "`", {path});
    }
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out || !(out << text)) {
        throw Error(ErrorCode::invalid_argument, "cannot write `" + path + "`", {path});
    }
}

// Writes to `path` when given, to `out` otherwise.
void emit(std::ostream& out, const std::string& path, const std::string& text) {
    if (path.empty()) {
        out << text;
    } else {
        write_file(path, text);
    }
}

std::vector<Recipe> load_recipes(const std::vector<std::string>& paths) {
    std::vector<Recipe> recipes;
    for (const auto& path : paths) {
        try {
            recipes.push_back(parse_recipe(read_file(path)));
        } catch (const Error& e) {
            if (e.code() != ErrorCode::parse_error) throw;
            throw Error(e.code(), path + ": " + e.what(), e.subjects());
        }
    }
    return recipes;
}

// Accepts both plain recipes and the merged-recipe format.
Execution run_recipe_file(const std::string& path, const Dataset& data) {
    auto value = json::parse(read_file(path), nullptr, false);
    if (value.is_discarded()) {
        throw Error(ErrorCode::parse_error, path + ": not valid JSON");
    }
    bool merged = value.is_object() && value.contains("steps") && value["steps"].is_array() &&
                  !value["steps"].empty() && value["steps"][0].contains("source_label");
    if (merged) {
        return apply_recipe(data, merged_from_json(value));
    }
    return apply_recipe(data, recipe_from_json(value));
}

std::string finished_csv(const Execution& run, std::ostream& err) {
    for (const auto& step : run.log) {
        for (const auto& warning : step.warnings) {
            err << "warning: step " << step.label << ": " << warning << "\n";
        }
    }
    if (!run.ok()) {
        throw Error(ErrorCode::execution_error, "step " + run.failure->label + ": " + run.failure->message,
                    {run.failure->label});
    }
    return save_csv(run.dataset);
}

std::string pretty(const json& value) {
    return value.dump(2) + "\n";
}

HttpServer* active_server = nullptr;

extern "C" void stop_active_server(int) {
    if (active_server != nullptr) {
        active_server->stop();
    }
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Reconcile data-cleaning recipes with argumentation semantics", "argrecon"};
    app.set_config("--config", "", "key=value config file");
    app.require_subcommand(1);

    std::size_t cap = default_stable_cap;
    std::string matrix_path;
    std::vector<std::string> disabled_rules;
    app.add_option("--cap", cap, "Stop enumerating stable labelings after this many")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    app.add_option("--matrix", matrix_path, "Conflict matrix override (JSON rule list)")->check(CLI::ExistingFile);
    app.add_option("--disable-rule", disabled_rules, "Turn off a dependency rule")
        ->check(CLI::IsMember({"intra_recipe", "produces_consumes", "consume_before_delete"}));

    // solve
    auto* solve = app.add_subcommand("solve", "Label an APX argumentation framework");
    std::string apx_path, semantics = "grounded", solve_dot;
    solve->add_option("graph", apx_path, "APX file")->required();
    solve->add_option("--semantics", semantics)->check(CLI::IsMember({"grounded", "stable"}))->capture_default_str();
    solve->add_option("--dot", solve_dot, "Write DOT of the grounded labeling");

    // conflicts
    auto* conflicts = app.add_subcommand("conflicts", "Build the attack graph between recipes");
    std::vector<std::string> recipe_paths;
    std::string apx_out, dot_out;
    conflicts->add_option("recipes", recipe_paths, "Recipe JSON files")->required()->expected(2, -1);
    conflicts->add_option("--apx", apx_out, "Write the graph as APX");
    conflicts->add_option("--dot", dot_out, "Write DOT of the grounded labeling");

    // extensions
    auto* extensions = app.add_subcommand("extensions", "Grounded and stable labelings of the attack graph");
    bool list = false, count = false;
    extensions->add_option("recipes", recipe_paths, "Recipe JSON files")->required()->expected(2, -1);
    auto* list_flag = extensions->add_flag("--list", list, "One line per stable labeling: index and IN set");
    extensions->add_flag("--count", count, "Print the number of stable labelings")->excludes(list_flag);

    // merge
    auto* merge_cmd = app.add_subcommand("merge", "Merge the steps accepted by a stable labeling");
    std::size_t stable_index = 0;
    std::string output;
    merge_cmd->add_option("recipes", recipe_paths, "Recipe JSON files")->required()->expected(2, -1);
    merge_cmd->add_option("--stable", stable_index, "0-based stable labeling index")->required();
    merge_cmd->add_option("-o,--output", output, "Write here instead of stdout");

    // apply
    auto* apply = app.add_subcommand("apply", "Run a recipe or merged recipe on a CSV file");
    std::string recipe_path, csv_path;
    apply->add_option("recipe", recipe_path, "Recipe JSON file")->required();
    apply->add_option("data", csv_path, "CSV file")->required();
    apply->add_option("-o,--output", output, "Write here instead of stdout");

    // pipeline
    auto* pipeline = app.add_subcommand("pipeline", "Detect, merge a stable labeling and apply to CSV");
    std::vector<std::string> pipeline_files;
    std::string merged_out;
    pipeline->add_option("files", pipeline_files, "Recipe JSON files followed by the CSV file")
        ->required()
        ->expected(3, -1);
    pipeline->add_option("--stable", stable_index, "0-based stable labeling index")->required();
    pipeline->add_option("-o,--output", output, "Write the CSV here instead of stdout");
    pipeline->add_option("--merged", merged_out, "Also write the merged recipe");

    // serve
    auto* serve = app.add_subcommand("serve", "Serve the HTTP API");
    std::string host = "127.0.0.1", ui_dir, snapshot_dir;
    int port = 8080;
    serve->add_option("--host", host)->capture_default_str();
    serve->add_option("--port", port)->capture_default_str()->check(CLI::Range(0, 65535));
    serve->add_option("--ui-dir", ui_dir, "Static files served under /")->check(CLI::ExistingDirectory);
    serve->add_option("--snapshot-dir", snapshot_dir, "Persist sessions as JSON files here");

    std::vector<const char*> argv{"argrecon"};
    for (const auto& arg : args) argv.push_back(arg.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << json{{"error", {{"code", "usage"}, {"message", e.what()}, {"subjects", json::array()}}}}.dump()
            << "\n";
        return 2;
    }

    try {
        PipelineConfig config;
        config.stable_cap = cap;
        if (!matrix_path.empty()) {
            auto value = json::parse(read_file(matrix_path), nullptr, false);
            if (value.is_discarded()) {
                throw Error(ErrorCode::parse_error, matrix_path + ": not valid JSON");
            }
            config.matrix = ConflictMatrix::from_json(value);
        }
        for (const auto& rule : disabled_rules) {
            switch (dependency_reason_from_string(rule)) {
            case DependencyReason::intra_recipe: config.rules.intra_recipe = false; break;
            case DependencyReason::produces_consumes: config.rules.produces_consumes = false; break;
            case DependencyReason::consume_before_delete: config.rules.consume_before_delete = false; break;
            }
        }

        if (*solve) {
            auto graph = parse_apx(read_file(apx_path));
            auto grounded = grounded_labeling(graph);
            if (semantics == "grounded") {
                out << pretty(labeling_to_json(graph, grounded));
            } else {
                auto stable = enumerate_stable(graph, cap);
                json labelings = json::array();
                for (const auto& labeling : stable.labelings) labelings.push_back(labeling_to_json(graph, labeling));
                out << pretty(labelings);
                if (stable.truncated) {
                    err << "warning: stopped at " << cap << " stable labelings\n";
                }
            }
            if (!solve_dot.empty()) {
                DotOptions options;
                options.labeling = grounded;
                write_file(solve_dot, to_dot(graph, options));
            }
        } else if (*conflicts) {
            auto analysis = analyze(load_recipes(recipe_paths), config);
            out << pretty(graph_json(analysis));
            if (!apx_out.empty()) write_file(apx_out, write_apx(analysis.conflicts.graph));
            if (!dot_out.empty()) write_file(dot_out, analysis_dot(analysis, analysis.grounded));
        } else if (*extensions) {
            auto analysis = analyze(load_recipes(recipe_paths), config);
            const auto& stable = analysis.stable;
            if (count) {
                out << "stable: " << stable.labelings.size() << (stable.truncated ? " (lower bound)" : "") << "\n";
            } else if (list) {
                for (std::size_t i = 0; i < stable.labelings.size(); ++i) {
                    out << i << ":";
                    for (const auto& name : names_with(analysis.conflicts.graph, stable.labelings[i], Label::in)) {
                        out << " " << name;
                    }
                    out << "\n";
                }
            } else {
                out << pretty(extensions_json(analysis));
            }
        } else if (*merge_cmd) {
            auto analysis = analyze(load_recipes(recipe_paths), config);
            emit(out, output, serialize_merged(merge_stable(analysis, stable_index, config)));
        } else if (*apply) {
            auto data = load_csv(read_file(csv_path));
            emit(out, output, finished_csv(run_recipe_file(recipe_path, data), err));
        } else if (*pipeline) {
            std::vector<std::string> recipes(pipeline_files.begin(), pipeline_files.end() - 1);
            auto data = load_csv(read_file(pipeline_files.back()));
            auto analysis = analyze(load_recipes(recipes), config);
            auto merged = merge_stable(analysis, stable_index, config);
            if (!merged_out.empty()) write_file(merged_out, serialize_merged(merged));
            emit(out, output, finished_csv(apply_recipe(data, merged), err));
        } else if (*serve) {
            HttpOptions options;
            if (!ui_dir.empty()) options.ui_dir = ui_dir;
            std::optional<std::filesystem::path> snapshots;
            if (!snapshot_dir.empty()) snapshots = snapshot_dir;
            HttpServer server(std::make_shared<SessionStore>(config, snapshots), options);
            int bound = server.bind(host, port);
            out << "listening on http://" << host << ":" << bound << std::endl;
            active_server = &server;
            std::signal(SIGINT, stop_active_server);
            std::signal(SIGTERM, stop_active_server);
            server.listen();
            active_server = nullptr;
        }
        return 0;
    } catch (const Error& e) {
        err << error_json(e).dump() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << json{{"error", {{"code", "internal"}, {"message", e.what()}, {"subjects", json::array()}}}}.dump()
            << "\n";
        return 1;
    }
}

} // namespace argrecon
