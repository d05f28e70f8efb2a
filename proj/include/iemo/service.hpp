#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "iemo/session.hpp"

namespace iemo {

struct ServiceOptions {
    std::string host{"127.0.0.1"};
    int port{8080};  // 0 picks a free port
    std::filesystem::path root{"out"};
    std::optional<std::filesystem::path> static_dir;
};

/// JSON-over-HTTP front end for SessionManager:
///   POST/GET /v1/sessions, GET /v1/sessions/{id}, GET /v1/sessions/{id}/query,
///   POST /v1/sessions/{id}/judgment, GET /v1/sessions/{id}/population,
///   DELETE /v1/sessions/{id} (abort).
class SessionService {
public:
    explicit SessionService(ServiceOptions options);
    ~SessionService();

    /// Binds and returns the port actually bound.
    int bind();
    /// Serves on the calling thread until stop().
    void listen();
    /// Serves on a background thread.
    void start();
    void stop();

    SessionManager& manager();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace iemo
