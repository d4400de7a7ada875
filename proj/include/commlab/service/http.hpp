#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "commlab/service/service.hpp"

namespace httplib {
class Server;
}

namespace commlab::service {

struct ServerConfig {
    std::string host = "0.0.0.0";
    int port = 8080;
    std::filesystem::path course = "course";
    std::optional<std::filesystem::path> data_dir;
    ServiceOptions options;
};

/// Reads the JSON config file (paths relative to the file), then applies
/// COMMLAB_PORT and COMMLAB_COURSE. Throws std::invalid_argument on bad values.
ServerConfig load_server_config(const std::filesystem::path& file);
ServerConfig server_config_from_json(const json& j, const std::filesystem::path& base);
void apply_env_overrides(ServerConfig& cfg);

/// Routes every endpoint under /api/v1 to `svc`.
void install_routes(httplib::Server& server, Service& svc);

/// Owns an httplib server bound to a Service.
class HttpServer {
public:
    explicit HttpServer(Service& svc);
    ~HttpServer();
    /// Binds; port 0 picks a free port. Returns the bound port or -1.
    int bind(const std::string& host, int port);
    void listen();  // blocks until stop()
    void stop();

private:
    std::unique_ptr<httplib::Server> server_;
};

}  // namespace commlab::service
