#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "geolock/errors.hpp"

namespace geolock {

inline constexpr std::array<std::uint8_t, 4> kFrameMagic{'J', 'M', 'T', 'K'};
inline constexpr std::uint8_t kFrameVersion = 1;
inline constexpr std::uint16_t kMaxFramePayload = 800;

enum class FrameType : std::uint8_t { data = 0, end_of_transfer = 1 };

// Big-endian wire layout:
//   magic "JMTK" | version u8 | frame_type u8 | seq u16 | tx_timestamp u64
//   | payload_len u16 | payload
struct WireFrame {
    FrameType frame_type = FrameType::data;
    std::uint16_t seq = 0;
    std::uint64_t tx_timestamp = 0;
    std::vector<std::uint8_t> payload;

    friend bool operator==(const WireFrame&, const WireFrame&) = default;
};

inline constexpr std::size_t kFrameHeaderBytes = 4 + 1 + 1 + 2 + 8 + 2;

std::vector<std::uint8_t> encode_frame(const WireFrame& frame);
void encode_frame(const WireFrame& frame, std::vector<std::uint8_t>& out);

// Incremental decoder: feed bytes as they arrive, pop complete frames.
// Trailing bytes stay buffered for the next frame. Framing errors report
// the absolute offset of the offending byte in the full stream.
class FrameParser {
public:
    void feed(std::span<const std::uint8_t> bytes);
    std::optional<WireFrame> next();
    std::size_t buffered() const { return buffer_.size(); }

private:
    std::vector<std::uint8_t> buffer_;
    std::size_t stream_offset_ = 0;  // absolute offset of buffer_[0]
};

// One-shot decode of a single frame from the front of `bytes`; returns the
// frame and the number of bytes consumed.
std::pair<WireFrame, std::size_t> decode_frame(std::span<const std::uint8_t> bytes);

}  // namespace geolock
