#pragma once

#include <string>
#include <utility>
#include <vector>

namespace factprobe::http {

struct Result {
    bool ok = false;     // transport-level success
    int status = 0;      // HTTP status when ok
    std::string body;
    std::string error;   // transport error description when !ok
};

// POST `json_body` with content-type application/json. `url` must carry the
// scheme; https requires the TLS build (enabled when OpenSSL is present).
Result post_json(const std::string& url, const std::string& json_body,
                 const std::vector<std::pair<std::string, std::string>>& headers, int timeout_s);

} // namespace factprobe::http
