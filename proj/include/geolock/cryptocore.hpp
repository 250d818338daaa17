#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "geolock/errors.hpp"

namespace geolock {

std::array<std::uint8_t, 32> sha256(std::span<const std::uint8_t> data);

// 32-byte AES key. Wipes its bytes on destruction; key bytes must never be
// logged except where a report explicitly asks for the recovered key.
class Key256 {
public:
    Key256() = default;
    explicit Key256(const std::array<std::uint8_t, 32>& bytes) : bytes_(bytes) {}
    ~Key256();

    Key256(const Key256&) = default;
    Key256& operator=(const Key256&) = default;

    const std::array<std::uint8_t, 32>& bytes() const { return bytes_; }
    std::string hex() const;

    friend bool operator==(const Key256& a, const Key256& b) { return a.bytes_ == b.bytes_; }

private:
    std::array<std::uint8_t, 32> bytes_{};
};

// SHA-256 of the password. Deterministic; empty passwords are rejected.
Key256 derive_key(std::span<const std::uint8_t> password);
Key256 derive_key(std::string_view password);

struct CipherPayload {
    std::array<std::uint8_t, 16> iv{};
    std::vector<std::uint8_t> ciphertext;  // multiple of 16, at least 16
    std::uint64_t plain_len = 0;
};

// AES-256-CBC with PKCS#7 padding.
CipherPayload encrypt(std::span<const std::uint8_t> plain, const Key256& key,
                      std::span<const std::uint8_t, 16> iv);

// Inverse of encrypt when the key matches. A wrong key surfaces as
// CryptoError from the padding check (or a plain-length mismatch).
std::vector<std::uint8_t> decrypt(const CipherPayload& payload, const Key256& key);

// Serialized layout, big-endian: "GLK1" | plain_len u64 | iv (16) | ciphertext.
std::vector<std::uint8_t> serialize(const CipherPayload& payload);
CipherPayload deserialize_payload(std::span<const std::uint8_t> bytes);

inline constexpr std::size_t kBlockBytes = 800;

using BlockSequence = std::vector<std::vector<std::uint8_t>>;

// Split into 800-byte blocks; only the final block may be shorter.
BlockSequence chunk_bytes(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> unchunk_bytes(const BlockSequence& blocks);

BlockSequence chunk(const CipherPayload& payload);
CipherPayload unchunk(const BlockSequence& blocks);

// Deterministic IV for the seedless encrypt CLI path: SHA-256(key || plain)
// truncated to 16 bytes.
std::array<std::uint8_t, 16> synthetic_iv(const Key256& key, std::span<const std::uint8_t> plain);

std::string to_hex(std::span<const std::uint8_t> bytes);

}  // namespace geolock
