#pragma once

#include <stdexcept>
#include <string>

namespace lexrag {

/// Bad or inconsistent input data: malformed files, duplicate ids, dimension
/// mismatches, unresolvable configuration. The CLI maps these to exit code 2.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// Remote provider failures: transport errors after retries are exhausted,
/// malformed or invalid provider payloads. The CLI maps these to exit code 3.
class ProviderError : public std::runtime_error {
public:
    explicit ProviderError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace lexrag
