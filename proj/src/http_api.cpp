#include "argrecon/http_api.hpp"

#include <charconv>

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace argrecon {

using nlohmann::json;

int http_status(ErrorCode code) {
    switch (code) {
    case ErrorCode::not_found: return 404;
    case ErrorCode::unresolved_conflicts:
    case ErrorCode::dependency_cycle:
    case ErrorCode::invalid_state: return 409;
    case ErrorCode::parse_error:
    case ErrorCode::invalid_argument:
    case ErrorCode::execution_error: return 422;
    }
    return 500;
}

namespace {

constexpr const char* json_type = "application/json";

void send_json(httplib::Response& res, const json& body, int status = 200) {
    res.status = status;
    res.set_content(body.dump(2) + "\n", json_type);
}

void send_error(httplib::Response& res, const Error& error) {
    send_json(res, error_json(error), http_status(error.code()));
}

std::size_t size_param(const httplib::Request& req, const char* name, std::size_t fallback) {
    if (!req.has_param(name)) {
        return fallback;
    }
    auto text = req.get_param_value(name);
    std::size_t value = 0;
    auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || end != text.data() + text.size()) {
        throw Error(ErrorCode::invalid_argument, std::string("query parameter `") + name + "` must be a non-negative integer",
                    {name});
    }
    return value;
}

json parse_body(const httplib::Request& req) {
    auto body = json::parse(req.body, nullptr, false);
    if (body.is_discarded()) {
        throw Error(ErrorCode::parse_error, "request body is not valid JSON");
    }
    return body;
}

} // namespace

struct HttpServer::Impl {
    std::shared_ptr<SessionStore> store;
    HttpOptions options;
    httplib::Server server;

    // Runs a handler, mapping library errors onto status codes.
    template <typename Handler>
    auto guarded(Handler handler) {
        return [this, handler](const httplib::Request& req, httplib::Response& res) {
            try {
                handler(req, res);
            } catch (const Error& e) {
                send_error(res, e);
            } catch (const std::exception& e) {
                send_json(res, {{"error", {{"code", "internal"}, {"message", e.what()}, {"subjects", json::array()}}}},
                          500);
            }
        };
    }

    std::shared_ptr<Session> session(const httplib::Request& req) { return store->find(req.matches[1]); }

    void routes() {
        server.Post("/sessions", guarded([this](const httplib::Request& req, httplib::Response& res) {
                        auto session = store->create(session_upload_from_json(parse_body(req)));
                        send_json(res, {{"id", session->id()}}, 201);
                    }));
        server.Get(R"(/sessions/([^/]+)/graph)", guarded([this](const httplib::Request& req, httplib::Response& res) {
                       send_json(res, session(req)->graph());
                   }));
        server.Get(R"(/sessions/([^/]+)/stable)", guarded([this](const httplib::Request& req, httplib::Response& res) {
                       auto target = session(req);
                       auto page = size_param(req, "page", 0);
                       auto page_size = size_param(req, "page_size", options.default_page_size);
                       send_json(res, target->stable_page(page, page_size));
                   }));
        server.Post(R"(/sessions/([^/]+)/select)", guarded([this](const httplib::Request& req, httplib::Response& res) {
                        auto target = session(req);
                        auto body = parse_body(req);
                        if (!body.is_object() || !body.contains("index") || !body["index"].is_number_unsigned()) {
                            throw Error(ErrorCode::invalid_argument, "select needs a non-negative integer \"index\"");
                        }
                        auto merged = target->select(body["index"].get<std::size_t>());
                        store->persist(*target);
                        send_json(res, merged);
                    }));
        server.Get(R"(/sessions/([^/]+)/result)", guarded([this](const httplib::Request& req, httplib::Response& res) {
                       auto result = session(req)->result();
                       if (req.get_param_value("format") == "csv") {
                           res.set_header("Content-Disposition", "attachment; filename=\"result.csv\"");
                           res.set_content(result.csv, "text/csv");
                       } else {
                           send_json(res, result.body);
                       }
                   }));
        server.Get(R"(/sessions/([^/]+)/dot)", guarded([this](const httplib::Request& req, httplib::Response& res) {
                       res.set_content(session(req)->dot(), "text/vnd.graphviz");
                   }));
        if (options.ui_dir && !server.set_mount_point("/", options.ui_dir->string())) {
            throw Error(ErrorCode::not_found, "UI directory `" + options.ui_dir->string() + "` does not exist",
                        {options.ui_dir->string()});
        }
    }
};

HttpServer::HttpServer(std::shared_ptr<SessionStore> store, HttpOptions options)
    : impl_(std::make_unique<Impl>()) {
    impl_->store = std::move(store);
    impl_->options = std::move(options);
    impl_->routes();
}

HttpServer::~HttpServer() {
    stop();
}

int HttpServer::bind(const std::string& host, int port) {
    if (port == 0) {
        int bound = impl_->server.bind_to_any_port(host);
        if (bound < 0) {
            throw Error(ErrorCode::invalid_argument, "cannot bind " + host);
        }
        return bound;
    }
    if (!impl_->server.bind_to_port(host, port)) {
        throw Error(ErrorCode::invalid_argument, "cannot bind " + host + ":" + std::to_string(port));
    }
    return port;
}

void HttpServer::listen() {
    impl_->server.listen_after_bind();
}

void HttpServer::stop() {
    impl_->server.stop();
}

void HttpServer::wait_until_ready() const {
    impl_->server.wait_until_ready();
}

} // namespace argrecon
