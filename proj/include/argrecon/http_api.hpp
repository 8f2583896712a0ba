// JSON-over-HTTP front end for SessionStore.
//
//   POST /sessions                      {"recipes": [...], "csv": "..."?} -> 201 {"id"}
//   GET  /sessions/{id}/graph           steps, order edges, attacks, grounded labeling
//   GET  /sessions/{id}/stable?page=&page_size=
//   POST /sessions/{id}/select          {"index": n} -> merged recipe
//   GET  /sessions/{id}/result[?format=csv]
//   GET  /sessions/{id}/dot
//
// Errors carry {"error": {...}}: 404 unknown session, 409 a selection that
// cannot be merged or a result without dataset/selection, 422 malformed input.
#ifndef ARGRECON_HTTP_API_HPP
#define ARGRECON_HTTP_API_HPP

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "argrecon/error.hpp"
#include "argrecon/session.hpp"

namespace argrecon {

int http_status(ErrorCode code);

struct HttpOptions {
    std::optional<std::filesystem::path> ui_dir; // served under "/"
    std::size_t default_page_size = 1;
};

class HttpServer {
public:
    explicit HttpServer(std::shared_ptr<SessionStore> store, HttpOptions options = {});
    ~HttpServer();
    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    // Port 0 picks a free port. Returns the bound port; throws on failure.
    int bind(const std::string& host, int port);
    // Serves until stop(); call after bind().
    void listen();
    void stop();
    void wait_until_ready() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace argrecon

#endif
