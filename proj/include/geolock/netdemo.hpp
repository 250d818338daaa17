#pragma once

#include <atomic>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "geolock/scenario.hpp"
#include "geolock/simchannel.hpp"
#include "geolock/wire.hpp"

namespace geolock {

// Every frame of one server->client session, in transmit order: 33
// key-bearing frames, extra slot-0 frames for remaining payload blocks,
// then one end-of-transfer frame. tx_timestamp carries the scheduled
// transmit time PLUS the simulated time-of-flight and noise for the
// client's claimed position -- in this TCP substitute the server plays
// both transmitter and channel, so the demo is a functional model of the
// protocol, not a secure channel.
std::vector<WireFrame> build_session_frames(const Scenario& scenario,
                                            std::span<const std::uint8_t> payload,
                                            const Point3& client_position,
                                            std::uint64_t session_index);

// The session's serialized wire bytes, exactly as sent.
std::vector<std::uint8_t> session_transcript(const Scenario& scenario,
                                             std::span<const std::uint8_t> payload,
                                             const Point3& client_position,
                                             std::uint64_t session_index);

// Client hello: one data frame, seq 0, whose 24-byte payload is the claimed
// position as three big-endian doubles.
WireFrame make_hello_frame(const Point3& position);
Point3 parse_hello_frame(const WireFrame& frame);

// Sequential one-client-at-a-time TCP server. Sessions are independent: a
// client disconnecting mid-write does not stop the server.
class Server {
public:
    Server(Scenario scenario, std::vector<std::uint8_t> payload, const std::string& host,
           std::uint16_t port);
    ~Server();

    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    std::uint16_t port() const { return port_; }

    // Serves until max_sessions completes (0 = until stop()).
    void run(int max_sessions = 0);
    void stop();

private:
    void serve_one(int fd, std::uint64_t session_index);

    Scenario scenario_;
    std::vector<std::uint8_t> payload_;
    int listen_fd_ = -1;
    std::uint16_t port_ = 0;
    std::atomic<bool> stopping_{false};
};

enum class ClientStatus { ok, incomplete_key, off_region, wrong_key, io_error };

struct ClientResult {
    ClientStatus status = ClientStatus::io_error;
    std::string detail;
    std::optional<Key256> key;          // decoded key when all 33 frames arrived in range
    std::vector<std::uint8_t> plaintext;
    std::size_t frames_received = 0;
};

// Slot width the receiver is configured with; the canonical 2 m region.
inline const TickDelta kDefaultSlotWidthTicks{426};

// Connects, claims `position`, collects frames until the end-of-transfer
// frame or `timeout_ms` of quiet, then decodes the first 33 timestamps into
// a key and decrypts the reassembled payload. A closed connection is
// treated as a quiet channel: the client still waits out the quiet window,
// as an RF receiver would. The slot width is receiver configuration, like
// the between-offset: both sides must agree on the region size out of band.
ClientResult run_client(const std::string& host, std::uint16_t port, const Point3& position,
                        SlotWidth slot_width = SlotWidth{kDefaultSlotWidthTicks},
                        int timeout_ms = 2000);

}  // namespace geolock
