#pragma once

#include "areacfd/service/engine.hpp"

#include <memory>
#include <string>

namespace areacfd::service {

/// JSON API over an Engine. Errors come back as
/// {"error": {"code": ..., "message": ...}} with status 404 for unknown
/// areas or missing profiles and 400 for other rejected requests.
class HttpService {
public:
    explicit HttpService(Engine& engine);
    ~HttpService();
    HttpService(const HttpService&) = delete;
    HttpService& operator=(const HttpService&) = delete;

    /// Blocks until stop().
    bool listen(const std::string& host, int port);

    /// Binds to a free port and returns it; serve with listen_after_bind().
    int bind_to_any_port(const std::string& host);
    bool listen_after_bind();

    void wait_until_ready() const;
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// HTTP status for an error code.
int http_status(const std::string& code);

}  // namespace areacfd::service
