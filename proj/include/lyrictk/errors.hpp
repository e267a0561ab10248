#pragma once

#include <stdexcept>

namespace lyrictk {

// Backend unreachable or answered with a server-side failure. Retryable;
// the HTTP adapters retry these internally before letting them escape.
struct TransportError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The backend rejected the input itself (unreadable audio, bad request).
// Fatal for the item, never for the whole batch.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// No parseable JSON object could be found in a chat reply.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// JSON was present but violated the expected field contract.
struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Caller violated a documented precondition.
struct ContractError : std::logic_error {
    using std::logic_error::logic_error;
};

// Bad command-line flags or config file contents.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace lyrictk
