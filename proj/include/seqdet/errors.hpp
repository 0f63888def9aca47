#pragma once

#include <stdexcept>
#include <string>

namespace seqdet {

/// Invalid configuration or construction input; CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// A computation declined to produce an answer (e.g. censoring too high,
/// too few effective trials); CLI exit code 3.
class RefusalError : public std::runtime_error {
public:
    explicit RefusalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace seqdet
