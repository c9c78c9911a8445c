#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "factprobe/http.hpp"

namespace factprobe::http {

namespace {

// Splits "scheme://host[:port]/path..." into origin and path.
bool split_url(const std::string& url, std::string& origin, std::string& path) {
    std::size_t scheme_end = url.find("://");
    if (scheme_end == std::string::npos) return false;
    std::size_t path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
        origin = url;
        path = "/";
    } else {
        origin = url.substr(0, path_start);
        path = url.substr(path_start);
    }
    return true;
}

} // namespace

Result post_json(const std::string& url, const std::string& json_body,
                 const std::vector<std::pair<std::string, std::string>>& headers, int timeout_s) {
    Result result;
    std::string origin;
    std::string path;
    if (!split_url(url, origin, path)) {
        result.error = "malformed url '" + url + "'";
        return result;
    }

    httplib::Client client(origin);
    client.set_connection_timeout(timeout_s, 0);
    client.set_read_timeout(timeout_s, 0);
    client.set_write_timeout(timeout_s, 0);

    httplib::Headers request_headers;
    for (const auto& [key, value] : headers) request_headers.emplace(key, value);

    httplib::Result response = client.Post(path, request_headers, json_body, "application/json");
    if (!response) {
        result.error = "request to '" + url + "' failed: " + httplib::to_string(response.error());
        return result;
    }
    result.ok = true;
    result.status = response->status;
    result.body = response->body;
    return result;
}

} // namespace factprobe::http
