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

#pragma once

#include <string>

#include "ambig/embedding.h"
#include "json.hpp"

namespace ambig {

/// Splits "http://host:port/path" into ("http://host:port", "/path").
/// Throws ConfigError for anything but a plain http URL.
std::pair<std::string, std::string> split_url(const std::string& url);

/// POSTs a JSON body and parses the JSON reply.
///
/// Transport failures, 429 and 5xx responses are retried `endpoint.retries`
/// times with linear backoff, then surface as a retryable BackendError.
/// Other non-200 statuses and unparsable bodies are non-retryable.
nlohmann::json post_json(const HttpEndpoint& endpoint, const nlohmann::json& body);

}  // namespace ambig
