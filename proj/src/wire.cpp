#include "geolock/wire.hpp"

#include <algorithm>

namespace geolock {

namespace {

void put_u16_be(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

void put_u64_be(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int shift = 56; shift >= 0; shift -= 8)
        out.push_back(static_cast<std::uint8_t>(v >> shift));
}

std::uint16_t get_u16_be(const std::uint8_t* p) {
    return static_cast<std::uint16_t>((p[0] << 8) | p[1]);
}

std::uint64_t get_u64_be(const std::uint8_t* p) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = (v << 8) | p[i];
    return v;
}

}  // namespace

void encode_frame(const WireFrame& frame, std::vector<std::uint8_t>& out) {
    if (frame.payload.size() > kMaxFramePayload)
        throw FramingError("frame payload exceeds 800 bytes", 0);
    out.reserve(out.size() + kFrameHeaderBytes + frame.payload.size());
    out.insert(out.end(), kFrameMagic.begin(), kFrameMagic.end());
    out.push_back(kFrameVersion);
    out.push_back(static_cast<std::uint8_t>(frame.frame_type));
    put_u16_be(out, frame.seq);
    put_u64_be(out, frame.tx_timestamp);
    put_u16_be(out, static_cast<std::uint16_t>(frame.payload.size()));
    out.insert(out.end(), frame.payload.begin(), frame.payload.end());
}

std::vector<std::uint8_t> encode_frame(const WireFrame& frame) {
    std::vector<std::uint8_t> out;
    encode_frame(frame, out);
    return out;
}

void FrameParser::feed(std::span<const std::uint8_t> bytes) {
    buffer_.insert(buffer_.end(), bytes.begin(), bytes.end());
}

std::optional<WireFrame> FrameParser::next() {
    if (buffer_.size() < kFrameHeaderBytes) return std::nullopt;
    const std::uint8_t* p = buffer_.data();

    if (!std::equal(kFrameMagic.begin(), kFrameMagic.end(), p))
        throw FramingError("bad frame magic", stream_offset_);
    if (p[4] != kFrameVersion)
        throw FramingError("unsupported frame version " + std::to_string(p[4]),
                           stream_offset_ + 4);
    if (p[5] > 1)
        throw FramingError("unknown frame type " + std::to_string(p[5]), stream_offset_ + 5);
    std::uint16_t payload_len = get_u16_be(p + 16);
    if (payload_len > kMaxFramePayload)
        throw FramingError("frame payload length " + std::to_string(payload_len) +
                               " exceeds 800 bytes",
                           stream_offset_ + 16);

    std::size_t need = kFrameHeaderBytes + payload_len;
    if (buffer_.size() < need) return std::nullopt;

    WireFrame frame;
    frame.frame_type = static_cast<FrameType>(p[5]);
    frame.seq = get_u16_be(p + 6);
    frame.tx_timestamp = get_u64_be(p + 8);
    frame.payload.assign(buffer_.begin() + kFrameHeaderBytes, buffer_.begin() + need);

    buffer_.erase(buffer_.begin(), buffer_.begin() + need);
    stream_offset_ += need;
    return frame;
}

std::pair<WireFrame, std::size_t> decode_frame(std::span<const std::uint8_t> bytes) {
    FrameParser parser;
    parser.feed(bytes);
    auto frame = parser.next();
    if (!frame) throw FramingError("truncated frame", bytes.size());
    return {std::move(*frame), bytes.size() - parser.buffered()};
}

}  // namespace geolock
