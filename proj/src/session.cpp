#include "argrecon/session.hpp"

#include <algorithm>
#include <fstream>
#include <mutex>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

namespace argrecon {

using nlohmann::json;

json error_json(const Error& error) {
    return {{"error",
             {{"code", to_string(error.code())}, {"message", error.what()}, {"subjects", error.subjects()}}}};
}

SessionUpload session_upload_from_json(const json& value) {
    if (!value.is_object()) {
        throw Error(ErrorCode::parse_error, "session upload must be a JSON object");
    }
    if (!value.contains("recipes") || !value["recipes"].is_array()) {
        throw Error(ErrorCode::parse_error, "session upload needs a \"recipes\" array");
    }
    SessionUpload upload;
    for (const auto& recipe : value["recipes"]) {
        upload.recipes.push_back(recipe_from_json(recipe));
    }
    if (value.contains("csv") && !value["csv"].is_null()) {
        if (!value["csv"].is_string()) {
            throw Error(ErrorCode::parse_error, "\"csv\" must be a string");
        }
        upload.csv = value["csv"].get<std::string>();
    }
    return upload;
}

Session::Session(std::string id, SessionUpload upload, const PipelineConfig& config)
    : id_(std::move(id)), config_(config), upload_(std::move(upload)) {
    if (upload_.csv) {
        dataset_ = load_csv(*upload_.csv);
    }
    analysis_ = analyze(upload_.recipes, config_);
}

json Session::graph() const {
    std::shared_lock lock(mutex_);
    return graph_json(analysis_);
}

json Session::stable_page(std::size_t page, std::size_t page_size) const {
    std::shared_lock lock(mutex_);
    return stable_page_json(analysis_, page, page_size);
}

std::string Session::dot() const {
    std::shared_lock lock(mutex_);
    const auto& labeling = selected_ ? analysis_.stable.labelings[*selected_] : analysis_.grounded;
    return analysis_dot(analysis_, labeling);
}

json Session::select(std::size_t index) {
    std::unique_lock lock(mutex_);
    auto merged = merge_stable(analysis_, index, config_);
    selected_ = index;
    merged_ = std::move(merged);
    return merged_to_json(*merged_);
}

std::optional<std::size_t> Session::selected() const {
    std::shared_lock lock(mutex_);
    return selected_;
}

SessionResult Session::result() const {
    std::shared_lock lock(mutex_);
    if (!dataset_) {
        throw Error(ErrorCode::invalid_state, "session has no dataset");
    }
    if (!merged_) {
        throw Error(ErrorCode::invalid_state, "no stable labeling selected");
    }
    auto run = apply_recipe(*dataset_, *merged_);
    if (!run.ok()) {
        throw Error(ErrorCode::execution_error, "step " + run.failure->label + ": " + run.failure->message,
                    {run.failure->label});
    }
    SessionResult result{run.dataset, save_csv(run.dataset), json::object()};
    result.body = {{"table", dataset_to_json(result.dataset)},
                   {"csv", result.csv},
                   {"log", execution_log_to_json(run)}};
    return result;
}

json Session::snapshot() const {
    std::shared_lock lock(mutex_);
    json recipes = json::array();
    for (const auto& recipe : upload_.recipes) {
        recipes.push_back(recipe_to_json(recipe));
    }
    return {{"id", id_},
            {"recipes", std::move(recipes)},
            {"csv", upload_.csv ? json(*upload_.csv) : json(nullptr)},
            {"selected", selected_ ? json(*selected_) : json(nullptr)}};
}

// ---------------------------------------------------------------- store

SessionStore::SessionStore(PipelineConfig config, std::optional<std::filesystem::path> snapshot_dir)
    : config_(std::move(config)), snapshot_dir_(std::move(snapshot_dir)) {
    if (!snapshot_dir_) {
        return;
    }
    std::filesystem::create_directories(*snapshot_dir_);
    for (const auto& entry : std::filesystem::directory_iterator(*snapshot_dir_)) {
        if (entry.path().extension() != ".json") {
            continue;
        }
        std::ifstream in(entry.path());
        auto value = json::parse(in, nullptr, false);
        if (value.is_discarded() || !value.contains("id") || !value["id"].is_string()) {
            continue; // not ours
        }
        try {
            auto session = std::make_shared<Session>(value["id"].get<std::string>(),
                                                     session_upload_from_json(value), config_);
            if (value.contains("selected") && value["selected"].is_number_unsigned()) {
                session->select(value["selected"].get<std::size_t>());
            }
            sessions_[session->id()] = std::move(session);
        } catch (const Error&) {
            // stale snapshot under a different config; skip it
        }
    }
}

std::string SessionStore::fresh_id() {
    thread_local std::mt19937_64 rng{std::random_device{}()};
    std::ostringstream id;
    id << std::hex;
    id.width(16);
    id.fill('0');
    id << rng();
    return id.str();
}

std::shared_ptr<Session> SessionStore::create(SessionUpload upload) {
    std::string id;
    {
        std::unique_lock lock(mutex_);
        do {
            id = fresh_id();
        } while (sessions_.contains(id));
        sessions_[id] = nullptr; // reserved; the analysis runs outside the lock
    }
    std::shared_ptr<Session> session;
    try {
        session = std::make_shared<Session>(id, std::move(upload), config_);
    } catch (...) {
        std::unique_lock lock(mutex_);
        sessions_.erase(id);
        throw;
    }
    {
        std::unique_lock lock(mutex_);
        sessions_[id] = session;
    }
    persist(*session);
    return session;
}

std::shared_ptr<Session> SessionStore::find(const std::string& id) const {
    std::shared_lock lock(mutex_);
    auto it = sessions_.find(id);
    if (it == sessions_.end() || !it->second) {
        throw Error(ErrorCode::not_found, "unknown session `" + id + "`", {id});
    }
    return it->second;
}

void SessionStore::persist(const Session& session) const {
    if (!snapshot_dir_) {
        return;
    }
    auto target = *snapshot_dir_ / (session.id() + ".json");
    auto temporary = target;
    temporary += ".tmp";
    {
        std::ofstream out(temporary, std::ios::binary | std::ios::trunc);
        out << session.snapshot().dump(2) << "\n";
    }
    std::filesystem::rename(temporary, target);
}

std::size_t SessionStore::size() const {
    std::shared_lock lock(mutex_);
    return std::count_if(sessions_.begin(), sessions_.end(), [](const auto& entry) { return entry.second != nullptr; });
}

} // namespace argrecon
