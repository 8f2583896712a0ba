// Session state shared by the HTTP API: uploaded recipes, optional dataset,
// the derived analysis and the curator's chosen stable labeling.
#ifndef ARGRECON_SESSION_HPP
#define ARGRECON_SESSION_HPP

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "argrecon/dataset.hpp"
#include "argrecon/error.hpp"
#include "argrecon/merge.hpp"
#include "argrecon/pipeline.hpp"

namespace argrecon {

// {"error": {"code", "message", "subjects"}}
nlohmann::json error_json(const Error& error);

// Everything a session is created from. Also the snapshot payload.
struct SessionUpload {
    std::vector<Recipe> recipes;
    std::optional<std::string> csv;
};

// {"recipes": [recipe...], "csv": "text"?}
SessionUpload session_upload_from_json(const nlohmann::json& value);

struct SessionResult {
    Dataset dataset;
    std::string csv;
    nlohmann::json body; // {"table", "csv", "log"}
};

class Session {
public:
    Session(std::string id, SessionUpload upload, const PipelineConfig& config);

    const std::string& id() const noexcept { return id_; }

    nlohmann::json graph() const;
    nlohmann::json stable_page(std::size_t page, std::size_t page_size) const;
    std::string dot() const; // selected labeling if any, grounded otherwise

    // Stores the selection and returns the merged recipe. A selection that
    // cannot be merged leaves the previous one in place.
    nlohmann::json select(std::size_t index);
    std::optional<std::size_t> selected() const;

    SessionResult result() const;

    nlohmann::json snapshot() const;

private:
    std::string id_;
    PipelineConfig config_;
    SessionUpload upload_;
    std::optional<Dataset> dataset_;
    Analysis analysis_;
    std::optional<std::size_t> selected_;
    std::optional<MergedRecipe> merged_;
    mutable std::shared_mutex mutex_;
};

// Owns sessions by id. With a snapshot directory every session is written to
// `<dir>/<id>.json` on creation and selection, and reloaded on construction.
class SessionStore {
public:
    explicit SessionStore(PipelineConfig config = {},
                          std::optional<std::filesystem::path> snapshot_dir = std::nullopt);

    std::shared_ptr<Session> create(SessionUpload upload);
    std::shared_ptr<Session> find(const std::string& id) const; // throws not_found
    void persist(const Session& session) const;
    std::size_t size() const;

private:
    std::string fresh_id();

    PipelineConfig config_;
    std::optional<std::filesystem::path> snapshot_dir_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;
    mutable std::shared_mutex mutex_;
};

} // namespace argrecon

#endif
