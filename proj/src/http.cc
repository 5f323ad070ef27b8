// Copyright 2026 The Ambig-ICL Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ambig/http.h"

#include <chrono>
#include <thread>

#include "ambig/error.h"
#include "httplib.h"

namespace ambig {

std::pair<std::string, std::string> split_url(const std::string& url) {
    constexpr std::string_view kScheme = "http://";
    if (url.rfind(kScheme, 0) != 0) {
        throw ConfigError("backend URL must start with http:// (got '" + url + "')");
    }
    const auto slash = url.find('/', kScheme.size());
    if (slash == kScheme.size()) {
        throw ConfigError("backend URL has no host: '" + url + "'");
    }
    if (slash == std::string::npos) {
        return {url, "/"};
    }
    return {url.substr(0, slash), url.substr(slash)};
}

nlohmann::json post_json(const HttpEndpoint& endpoint, const nlohmann::json& body) {
    const auto [base, path] = split_url(endpoint.url);
    const std::string payload = body.dump();
    std::string last_error;
    const int attempts = 1 + std::max(0, endpoint.retries);
    for (int attempt = 0; attempt < attempts; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(std::chrono::milliseconds(50 * attempt));
        }
        httplib::Client client(base);
        const auto timeout = std::chrono::milliseconds(endpoint.timeout_ms);
        client.set_connection_timeout(timeout);
        client.set_read_timeout(timeout);
        client.set_write_timeout(timeout);
        auto result = client.Post(path, payload, "application/json");
        if (!result) {
            last_error = httplib::to_string(result.error());
            continue;
        }
        if (result->status == 429 || result->status >= 500) {
            last_error = "HTTP " + std::to_string(result->status);
            continue;
        }
        if (result->status != 200) {
            throw BackendError(endpoint.url + " replied HTTP " + std::to_string(result->status), false);
        }
        try {
            return nlohmann::json::parse(result->body);
        } catch (const nlohmann::json::exception& e) {
            throw BackendError(endpoint.url + " sent a malformed reply: " + e.what(), false);
        }
    }
    throw BackendError(endpoint.url + " unreachable after " + std::to_string(attempts) +
                           " attempt(s): " + last_error,
                       true);
}

}  // namespace ambig
