#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace clir {

/// Caller violated an operation precondition.
struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Malformed JSON input; the message carries line and column.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A record is missing a mapped field or holds a value of the wrong shape.
struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Input and output records could not be paired by id.
struct JoinError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ChainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Raised by a remote or scripted backend for a single failed call.
struct BackendError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class TranslationError : public std::runtime_error {
public:
    TranslationError(std::size_t hop, const std::string& message)
        : std::runtime_error("translation failed at hop " + std::to_string(hop) + ": " + message),
          hop_(hop)
    {}

    std::size_t hop() const noexcept { return hop_; }

private:
    std::size_t hop_;
};

struct GenerationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace clir
