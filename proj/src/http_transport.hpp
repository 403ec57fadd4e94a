#pragma once

#include <chrono>
#include <cstdlib>
#include <string>
#include <thread>
#include <utility>

#include <httplib.h>
#include <json.hpp>

#include "lexrag/embedding.hpp" // RetryPolicy
#include "lexrag/error.hpp"

namespace lexrag::detail {

struct HttpResponse {
    nlohmann::json body;
    int attempts = 1;
};

struct ParsedEndpoint {
    std::string base; // scheme://host:port
    std::string path;
};

inline ParsedEndpoint parse_endpoint(const std::string& endpoint) {
    const auto scheme_end = endpoint.find("://");
    if (scheme_end == std::string::npos)
        throw DataError("endpoint must be an http URL: " + endpoint);
    const auto path_start = endpoint.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {endpoint, "/"};
    return {endpoint.substr(0, path_start), endpoint.substr(path_start)};
}

/// POSTs a JSON body, retrying transport failures and 5xx responses with
/// exponential backoff. 2xx responses parse into JSON; anything else raises
/// ProviderError. The attempt count that produced the result rides along.
inline HttpResponse post_json(const std::string& endpoint, const std::string& auth_env,
                              int timeout_ms, const RetryPolicy& retry,
                              const nlohmann::json& payload) {
    const auto parsed = parse_endpoint(endpoint);
    const std::string body = payload.dump();

    httplib::Headers headers{{"Content-Type", "application/json"}};
    if (!auth_env.empty()) {
        if (const char* token = std::getenv(auth_env.c_str()); token && *token)
            headers.emplace("Authorization", std::string("Bearer ") + token);
    }

    const int max_attempts = retry.max_attempts < 1 ? 1 : retry.max_attempts;
    std::string last_error;
    for (int attempt = 1; attempt <= max_attempts; ++attempt) {
        httplib::Client client(parsed.base);
        client.set_connection_timeout(std::chrono::milliseconds(timeout_ms));
        client.set_read_timeout(std::chrono::milliseconds(timeout_ms));
        client.set_write_timeout(std::chrono::milliseconds(timeout_ms));

        auto res = client.Post(parsed.path, headers, body, "application/json");
        if (res && res->status >= 200 && res->status < 300) {
            try {
                return {nlohmann::json::parse(res->body), attempt};
            } catch (const nlohmann::json::exception& e) {
                throw ProviderError(endpoint + ": response is not valid JSON: " + e.what());
            }
        }
        if (res && res->status >= 400 && res->status < 500) {
            // Client errors are not retryable; surface the provider payload.
            throw ProviderError(endpoint + ": provider rejected the request (HTTP " +
                                std::to_string(res->status) + "): " + res->body);
        }
        last_error = res ? "HTTP " + std::to_string(res->status)
                         : "transport failure: " + httplib::to_string(res.error());
        if (attempt < max_attempts) {
            const auto delay = std::chrono::milliseconds(
                static_cast<long long>(retry.backoff_base_ms) * (1LL << (attempt - 1)));
            std::this_thread::sleep_for(delay);
        }
    }
    throw ProviderError(endpoint + ": giving up after " + std::to_string(max_attempts) +
                        " attempts (" + last_error + ")");
}

} // namespace lexrag::detail
