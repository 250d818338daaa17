#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace geolock {

// Base for everything thrown by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Tick arithmetic left the representable range.
struct RangeError : Error {
    using Error::Error;
};

// Scenario / parameter validation. Collects every violation, one per line,
// each prefixed with its field path.
struct ConfigError : Error {
    std::vector<std::string> violations;

    explicit ConfigError(std::string message)
        : Error(message), violations{std::move(message)} {}

    explicit ConfigError(std::vector<std::string> all)
        : Error(join(all)), violations(std::move(all)) {}

private:
    static std::string join(const std::vector<std::string>& v) {
        std::string out;
        for (const auto& s : v) {
            if (!out.empty()) out += '\n';
            out += s;
        }
        return out;
    }
};

// Key derivation, encryption, or decryption failure (includes the wrong-key
// padding check).
struct CryptoError : Error {
    using Error::Error;
};

// Malformed byte stream; offset is the position of the offending byte
// relative to the start of the stream handed to the decoder.
struct FramingError : Error {
    std::size_t offset;

    FramingError(std::string message, std::size_t at)
        : Error(message + " (offset " + std::to_string(at) + ")"), offset(at) {}
};

// Fewer arrivals than the 33 the key needs.
struct IncompleteTraceError : Error {
    std::size_t arrivals_seen;

    explicit IncompleteTraceError(std::size_t seen)
        : Error("incomplete key: " + std::to_string(seen) + " of 33 arrivals"),
          arrivals_seen(seen) {}
};

// A decoded slot fell outside [0,255]; byte_index identifies which key byte.
// Signals an off-region receiver or excessive noise.
struct SlotRangeError : Error {
    int byte_index;
    std::int64_t slot_value;

    SlotRangeError(int index, std::int64_t value)
        : Error("slot out of range at key byte " + std::to_string(index) +
                ": " + std::to_string(value)),
          byte_index(index),
          slot_value(value) {}
};

// Grid or probe request exceeds the documented resource ceiling.
struct ResourceError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

}  // namespace geolock
