#pragma once

#include <stdexcept>
#include <string>

namespace spatcode {

// A value does not fit the configured modality layout: wrong block dimension,
// wrong number of cues or weights, or an index built over a different layout.
class SchemaError : public std::runtime_error {
public:
    explicit SchemaError(const std::string& what) : std::runtime_error(what) {}
};

// A persisted engine state cannot be read back: bad magic, unsupported
// version, truncated section, or a payload that fails its integrity checks.
class SnapshotError : public std::runtime_error {
public:
    explicit SnapshotError(const std::string& what) : std::runtime_error(what) {}
};

// An experiment configuration file was rejected at load time.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace spatcode
