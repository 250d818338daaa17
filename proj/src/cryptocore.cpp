#include "geolock/cryptocore.hpp"

#include <openssl/crypto.h>
#include <openssl/evp.h>

#include <cstring>
#include <memory>

namespace geolock {

namespace {

using CipherCtx = std::unique_ptr<EVP_CIPHER_CTX, decltype(&EVP_CIPHER_CTX_free)>;

CipherCtx make_cipher_ctx() {
    CipherCtx ctx(EVP_CIPHER_CTX_new(), EVP_CIPHER_CTX_free);
    if (!ctx) throw CryptoError("EVP_CIPHER_CTX_new failed");
    return ctx;
}

void put_u64_be(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int shift = 56; shift >= 0; shift -= 8)
        out.push_back(static_cast<std::uint8_t>(v >> shift));
}

std::uint64_t get_u64_be(const std::uint8_t* p) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = (v << 8) | p[i];
    return v;
}

constexpr std::array<std::uint8_t, 4> kPayloadMagic{'G', 'L', 'K', '1'};

}  // namespace

std::array<std::uint8_t, 32> sha256(std::span<const std::uint8_t> data) {
    std::array<std::uint8_t, 32> digest{};
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1 ||
        len != digest.size())
        throw CryptoError("SHA-256 digest failed");
    return digest;
}

Key256::~Key256() { OPENSSL_cleanse(bytes_.data(), bytes_.size()); }

std::string Key256::hex() const { return to_hex(bytes_); }

Key256 derive_key(std::span<const std::uint8_t> password) {
    if (password.empty()) throw ConfigError("password: must not be empty");
    return Key256{sha256(password)};
}

Key256 derive_key(std::string_view password) {
    return derive_key(std::span<const std::uint8_t>(
        reinterpret_cast<const std::uint8_t*>(password.data()), password.size()));
}

CipherPayload encrypt(std::span<const std::uint8_t> plain, const Key256& key,
                      std::span<const std::uint8_t, 16> iv) {
    auto ctx = make_cipher_ctx();
    if (EVP_EncryptInit_ex(ctx.get(), EVP_aes_256_cbc(), nullptr, key.bytes().data(),
                           iv.data()) != 1)
        throw CryptoError("AES-256-CBC encrypt init failed");

    CipherPayload out;
    std::copy(iv.begin(), iv.end(), out.iv.begin());
    out.plain_len = plain.size();
    out.ciphertext.resize(plain.size() + 16);

    int len1 = 0;
    if (!plain.empty() &&
        EVP_EncryptUpdate(ctx.get(), out.ciphertext.data(), &len1, plain.data(),
                          static_cast<int>(plain.size())) != 1)
        throw CryptoError("AES-256-CBC encrypt failed");
    int len2 = 0;
    if (EVP_EncryptFinal_ex(ctx.get(), out.ciphertext.data() + len1, &len2) != 1)
        throw CryptoError("AES-256-CBC encrypt finalization failed");
    out.ciphertext.resize(static_cast<std::size_t>(len1) + static_cast<std::size_t>(len2));
    return out;
}

std::vector<std::uint8_t> decrypt(const CipherPayload& payload, const Key256& key) {
    if (payload.ciphertext.size() < 16 || payload.ciphertext.size() % 16 != 0)
        throw CryptoError("ciphertext length must be a positive multiple of 16");

    auto ctx = make_cipher_ctx();
    if (EVP_DecryptInit_ex(ctx.get(), EVP_aes_256_cbc(), nullptr, key.bytes().data(),
                           payload.iv.data()) != 1)
        throw CryptoError("AES-256-CBC decrypt init failed");

    std::vector<std::uint8_t> plain(payload.ciphertext.size() + 16);
    int len1 = 0;
    if (EVP_DecryptUpdate(ctx.get(), plain.data(), &len1, payload.ciphertext.data(),
                          static_cast<int>(payload.ciphertext.size())) != 1)
        throw CryptoError("AES-256-CBC decrypt failed");
    int len2 = 0;
    if (EVP_DecryptFinal_ex(ctx.get(), plain.data() + len1, &len2) != 1)
        throw CryptoError("decryption failed: padding check rejected the key");
    plain.resize(static_cast<std::size_t>(len1) + static_cast<std::size_t>(len2));
    if (plain.size() != payload.plain_len)
        throw CryptoError("decryption failed: plaintext length mismatch");
    return plain;
}

std::vector<std::uint8_t> serialize(const CipherPayload& payload) {
    std::vector<std::uint8_t> out;
    out.reserve(4 + 8 + 16 + payload.ciphertext.size());
    out.insert(out.end(), kPayloadMagic.begin(), kPayloadMagic.end());
    put_u64_be(out, payload.plain_len);
    out.insert(out.end(), payload.iv.begin(), payload.iv.end());
    out.insert(out.end(), payload.ciphertext.begin(), payload.ciphertext.end());
    return out;
}

CipherPayload deserialize_payload(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 4 || !std::equal(kPayloadMagic.begin(), kPayloadMagic.end(), bytes.begin()))
        throw FramingError("bad payload magic, expected GLK1", 0);
    if (bytes.size() < 4 + 8 + 16 + 16)
        throw FramingError("truncated cipher payload", bytes.size());
    CipherPayload out;
    out.plain_len = get_u64_be(bytes.data() + 4);
    std::memcpy(out.iv.data(), bytes.data() + 12, 16);
    out.ciphertext.assign(bytes.begin() + 28, bytes.end());
    if (out.ciphertext.size() % 16 != 0)
        throw FramingError("ciphertext length not a multiple of 16", 28);
    if (out.plain_len > out.ciphertext.size())
        throw FramingError("plain_len exceeds ciphertext length", 4);
    return out;
}

BlockSequence chunk_bytes(std::span<const std::uint8_t> bytes) {
    BlockSequence blocks;
    for (std::size_t at = 0; at < bytes.size(); at += kBlockBytes) {
        std::size_t n = std::min(kBlockBytes, bytes.size() - at);
        blocks.emplace_back(bytes.begin() + at, bytes.begin() + at + n);
    }
    return blocks;
}

std::vector<std::uint8_t> unchunk_bytes(const BlockSequence& blocks) {
    std::vector<std::uint8_t> out;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        if (blocks[i].size() > kBlockBytes)
            throw FramingError("block " + std::to_string(i) + " exceeds 800 bytes",
                               i * kBlockBytes);
        if (i + 1 < blocks.size() && blocks[i].size() != kBlockBytes)
            throw FramingError("non-final block " + std::to_string(i) + " is short",
                               i * kBlockBytes);
        out.insert(out.end(), blocks[i].begin(), blocks[i].end());
    }
    return out;
}

BlockSequence chunk(const CipherPayload& payload) { return chunk_bytes(serialize(payload)); }

CipherPayload unchunk(const BlockSequence& blocks) {
    return deserialize_payload(unchunk_bytes(blocks));
}

std::array<std::uint8_t, 16> synthetic_iv(const Key256& key, std::span<const std::uint8_t> plain) {
    std::vector<std::uint8_t> buf(key.bytes().begin(), key.bytes().end());
    buf.insert(buf.end(), plain.begin(), plain.end());
    auto digest = sha256(buf);
    std::array<std::uint8_t, 16> iv{};
    std::copy_n(digest.begin(), 16, iv.begin());
    OPENSSL_cleanse(buf.data(), buf.size());
    return iv;
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (std::uint8_t b : bytes) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0xF]);
    }
    return out;
}

}  // namespace geolock
