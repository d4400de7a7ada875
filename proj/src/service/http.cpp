#include "commlab/service/http.hpp"

#include <cstdlib>
#include <fstream>

#include <httplib.h>

namespace commlab::service {

namespace fs = std::filesystem;

ServerConfig server_config_from_json(const json& j, const fs::path& base) {
    if (!j.is_object()) throw std::invalid_argument("config: expected a JSON object");
    ServerConfig c;
    for (const auto& [k, v] : j.items()) {
        if (k == "host") {
            if (!v.is_string()) throw std::invalid_argument("config: host must be a string");
            c.host = v.get<std::string>();
        } else if (k == "port") {
            if (!v.is_number_integer()) throw std::invalid_argument("config: port must be an integer");
            c.port = v.get<int>();
        } else if (k == "course") {
            if (!v.is_string()) throw std::invalid_argument("config: course must be a path");
            c.course = base / v.get<std::string>();
        } else if (k == "data_dir") {
            if (!v.is_string()) throw std::invalid_argument("config: data_dir must be a path");
            c.data_dir = base / v.get<std::string>();
        } else if (k == "max_source_bytes") {
            if (!v.is_number_unsigned() || v.get<std::uint64_t>() == 0)
                throw std::invalid_argument("config: max_source_bytes must be a positive integer");
            c.options.max_source_bytes = v.get<std::size_t>();
        } else if (k == "max_steps") {
            if (!v.is_number_unsigned() || v.get<std::uint64_t>() == 0)
                throw std::invalid_argument("config: max_steps must be a positive integer");
            c.options.max_steps = v.get<std::uint64_t>();
        } else if (k == "admin_token") {
            if (!v.is_string()) throw std::invalid_argument("config: admin_token must be a string");
            c.options.admin_token = v.get<std::string>();
        } else {
            throw std::invalid_argument("config: unknown field '" + k + "'");
        }
    }
    return c;
}

void apply_env_overrides(ServerConfig& cfg) {
    if (const char* p = std::getenv("COMMLAB_PORT"); p && *p) {
        char* end = nullptr;
        const long v = std::strtol(p, &end, 10);
        if (*end != '\0') throw std::invalid_argument(std::string("COMMLAB_PORT is not a number: ") + p);
        cfg.port = static_cast<int>(v);
    }
    if (const char* c = std::getenv("COMMLAB_COURSE"); c && *c) cfg.course = c;
}

ServerConfig load_server_config(const fs::path& file) {
    std::ifstream in(file);
    if (!in) throw std::invalid_argument("cannot open config file " + file.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument("config: invalid JSON: " + std::string(e.what()));
    }
    auto cfg = server_config_from_json(j, file.parent_path());
    apply_env_overrides(cfg);
    if (cfg.port < 0 || cfg.port > 65535) throw std::invalid_argument("config: port must be in 0..65535");
    cfg.options.data_dir = cfg.data_dir;
    return cfg;
}

namespace {

void send(httplib::Response& res, const Response& r) {
    res.status = r.status;
    res.set_content(to_text(r.body), "application/json");
}

std::string student_of(const httplib::Request& req) {
    if (req.has_param("student")) return req.get_param_value("student");
    return req.get_header_value("X-Student-Id");
}

// body fields win; the student header fills in a missing student id
std::optional<json> read_body(const httplib::Request& req, httplib::Response& res) {
    json body;
    try {
        body = json::parse(req.body);
    } catch (const json::parse_error&) {
        send(res, error_response(400, "request body is not valid JSON"));
        return std::nullopt;
    }
    if (body.is_object() && !body.contains("student") && req.has_header("X-Student-Id"))
        body["student"] = req.get_header_value("X-Student-Id");
    return body;
}

}  // namespace

void install_routes(httplib::Server& server, Service& svc) {
    server.set_payload_max_length(4 * svc.max_source_bytes() + 4096);

    server.Get("/api/v1/course", [&](const httplib::Request& req, httplib::Response& res) {
        send(res, svc.get_course(student_of(req)));
    });
    server.Get(R"(/api/v1/labs/([^/]+)/tasks/([^/]+))", [&](const httplib::Request& req, httplib::Response& res) {
        send(res, svc.get_task(req.matches[1], req.matches[2], student_of(req)));
    });
    server.Post("/api/v1/run", [&](const httplib::Request& req, httplib::Response& res) {
        if (auto body = read_body(req, res)) send(res, svc.post_run(*body));
    });
    server.Post("/api/v1/check", [&](const httplib::Request& req, httplib::Response& res) {
        if (auto body = read_body(req, res)) send(res, svc.post_check(*body));
    });
    server.Post(R"(/api/v1/quiz/([^/]+))", [&](const httplib::Request& req, httplib::Response& res) {
        if (auto body = read_body(req, res)) send(res, svc.post_quiz(req.matches[1], *body));
    });
    server.Get(R"(/api/v1/progress/([^/]+))", [&](const httplib::Request& req, httplib::Response& res) {
        send(res, svc.get_progress(req.matches[1]));
    });
    server.Post("/api/v1/admin/exam", [&](const httplib::Request& req, httplib::Response& res) {
        if (auto body = read_body(req, res)) send(res, svc.post_exam(*body, req.get_header_value("X-Admin-Token")));
    });
    server.Get("/api/v1/health", [](const httplib::Request&, httplib::Response& res) {
        res.set_content(R"({"status":"ok"})", "application/json");
    });
    server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
        if (!res.body.empty()) return;
        const char* what = res.status == 404 ? "not found" : res.status == 413 ? "request too large" : "request failed";
        res.set_content(to_text(json{{"error", what}}), "application/json");
    });
    server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        std::string what = "internal error";
        try {
            if (ep) std::rethrow_exception(ep);
        } catch (const std::exception& e) {
            what = e.what();
        } catch (...) {
        }
        res.status = 500;
        res.set_content(to_text(json{{"error", what}}), "application/json");
    });
}

HttpServer::HttpServer(Service& svc) : server_(std::make_unique<httplib::Server>()) { install_routes(*server_, svc); }

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
    if (port == 0) return server_->bind_to_any_port(host);
    return server_->bind_to_port(host, port) ? port : -1;
}

void HttpServer::listen() { server_->listen_after_bind(); }

void HttpServer::stop() {
    if (server_) server_->stop();
}

}  // namespace commlab::service
