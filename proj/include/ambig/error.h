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

#include <exception>
#include <stdexcept>
#include <string>

namespace ambig {

/// Broad failure category. Maps one-to-one onto the CLI exit codes.
enum class ErrorKind {
    kConfig = 1,
    kBackend = 2,
    kData = 3,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(ErrorKind::kConfig, what) {}
};

class DataError : public Error {
public:
    explicit DataError(const std::string& what) : Error(ErrorKind::kData, what) {}
};

/// Scoring or embedding backend failure. Transport failures are retryable;
/// malformed replies are not.
class BackendError : public Error {
public:
    BackendError(const std::string& what, bool retryable)
        : Error(ErrorKind::kBackend, what), retryable_(retryable) {}

    bool retryable() const noexcept { return retryable_; }

private:
    bool retryable_;
};

/// Throws the concrete error type for `kind`. Backend errors raised this way
/// are not retryable.
[[noreturn]] inline void throw_error(ErrorKind kind, const std::string& what, bool retryable = false) {
    switch (kind) {
        case ErrorKind::kConfig:
            throw ConfigError(what);
        case ErrorKind::kBackend:
            throw BackendError(what, retryable);
        case ErrorKind::kData:
            break;
    }
    throw DataError(what);
}

inline ErrorKind error_kind(const std::exception& e) {
    if (const auto* known = dynamic_cast<const Error*>(&e)) {
        return known->kind();
    }
    return ErrorKind::kData;
}

inline bool is_retryable(const std::exception& e) {
    const auto* backend = dynamic_cast<const BackendError*>(&e);
    return backend != nullptr && backend->retryable();
}

}  // namespace ambig
