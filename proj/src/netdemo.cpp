#include "geolock/netdemo.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <bit>
#include <chrono>
#include <cstring>
#include <iostream>
#include <map>
#include <thread>

#include "geolock/cryptocore.hpp"
#include "geolock/rng.hpp"

namespace geolock {

namespace {

constexpr std::string_view kClientNoiseId = "client";

void put_f64_be(std::vector<std::uint8_t>& out, double v) {
    std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
    for (int shift = 56; shift >= 0; shift -= 8)
        out.push_back(static_cast<std::uint8_t>(bits >> shift));
}

double get_f64_be(const std::uint8_t* p) {
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits = (bits << 8) | p[i];
    return std::bit_cast<double>(bits);
}

struct Fd {
    int fd = -1;
    Fd() = default;
    explicit Fd(int f) : fd(f) {}
    Fd(const Fd&) = delete;
    Fd& operator=(const Fd&) = delete;
    Fd(Fd&& other) noexcept : fd(other.fd) { other.fd = -1; }
    ~Fd() {
        if (fd >= 0) ::close(fd);
    }
};

sockaddr_in make_addr(const std::string& host, std::uint16_t port) {
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    std::string h = (host == "localhost" || host.empty()) ? "127.0.0.1" : host;
    if (inet_pton(AF_INET, h.c_str(), &addr.sin_addr) != 1)
        throw IoError("cannot parse host address: " + host);
    return addr;
}

bool send_all(int fd, std::span<const std::uint8_t> bytes) {
    std::size_t sent = 0;
    while (sent < bytes.size()) {
        ssize_t n = ::send(fd, bytes.data() + sent, bytes.size() - sent, MSG_NOSIGNAL);
        if (n <= 0) return false;
        sent += static_cast<std::size_t>(n);
    }
    return true;
}

}  // namespace

std::vector<WireFrame> build_session_frames(const Scenario& scenario,
                                            std::span<const std::uint8_t> payload,
                                            const Point3& client_position,
                                            std::uint64_t session_index) {
    if (!is_finite(client_position))
        throw ConfigError("client position must be finite");

    Key256 key = derive_key(scenario.password);
    CipherPayload encrypted =
        encrypt(payload, key, derive_iv(scenario.noise.seed, session_index));
    BlockSequence blocks = chunk(encrypted);

    std::size_t data_frames = std::max<std::size_t>(kKeyPackets, blocks.size());
    if (data_frames + 1 > 0xFFFF)
        throw ConfigError("payload needs " + std::to_string(data_frames) +
                          " frames; seq is 16-bit");

    // Sessions start one simulated second apart.
    NtTicks sim_now{static_cast<std::uint64_t>(kTicksPerSecond) * session_index};
    CadenceConfig cfg;
    SlotWidth slot = scenario.slot_width(cfg);
    auto anchors = scenario.schedule_anchors();
    KeySchedule schedule =
        schedule_key(key, anchors, scenario.region.center, initial_network_cadence(sim_now, cfg),
                     slot, cfg);

    std::vector<WireFrame> frames;
    frames.reserve(data_frames + 1);

    TickDelta walk{0};
    NtTicks tx_prev;
    TickDelta tof_prev{0};
    const auto& all_anchors = scenario.anchors;

    for (std::size_t n = 0; n < data_frames; ++n) {
        Anchor anchor;
        NtTicks tx;
        if (n < schedule.entries.size()) {
            anchor = schedule.entries[n].anchor;
            tx = schedule.entries[n].tx_time;
        } else {
            // Extra payload carriers: the transmission equation with slot 0,
            // continuing the round-robin. The key decoder ignores them.
            anchor = all_anchors[n % all_anchors.size()];
            TickDelta tof_cur = tof_ticks(anchor, scenario.region.center);
            tx = tx_prev + tof_prev + cfg.between_offset_ticks - tof_cur;
        }
        tof_prev = tof_ticks(anchor, scenario.region.center);
        tx_prev = tx;

        if (n > 0) walk = walk + scenario.noise.sample(kClientNoiseId, static_cast<std::uint32_t>(n));
        NtTicks rx = tx + tof_ticks(anchor, client_position) + walk;

        WireFrame frame;
        frame.frame_type = FrameType::data;
        frame.seq = static_cast<std::uint16_t>(n);
        frame.tx_timestamp = rx.value;
        if (n < blocks.size()) frame.payload = blocks[n];
        frames.push_back(std::move(frame));
    }

    WireFrame end;
    end.frame_type = FrameType::end_of_transfer;
    end.seq = static_cast<std::uint16_t>(data_frames);
    end.tx_timestamp = (tx_prev + cfg.between_offset_ticks).value;
    frames.push_back(std::move(end));
    return frames;
}

std::vector<std::uint8_t> session_transcript(const Scenario& scenario,
                                             std::span<const std::uint8_t> payload,
                                             const Point3& client_position,
                                             std::uint64_t session_index) {
    std::vector<std::uint8_t> out;
    for (const auto& frame : build_session_frames(scenario, payload, client_position, session_index))
        encode_frame(frame, out);
    return out;
}

WireFrame make_hello_frame(const Point3& position) {
    WireFrame hello;
    hello.frame_type = FrameType::data;
    hello.seq = 0;
    hello.tx_timestamp = 0;
    put_f64_be(hello.payload, position.x);
    put_f64_be(hello.payload, position.y);
    put_f64_be(hello.payload, position.z);
    return hello;
}

Point3 parse_hello_frame(const WireFrame& frame) {
    if (frame.payload.size() != 24)
        throw FramingError("hello frame payload must be 24 bytes", kFrameHeaderBytes);
    Point3 p{get_f64_be(frame.payload.data()), get_f64_be(frame.payload.data() + 8),
             get_f64_be(frame.payload.data() + 16)};
    if (!is_finite(p)) throw FramingError("hello frame position must be finite", kFrameHeaderBytes);
    return p;
}

Server::Server(Scenario scenario, std::vector<std::uint8_t> payload, const std::string& host,
               std::uint16_t port)
    : scenario_(std::move(scenario)), payload_(std::move(payload)) {
    listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listen_fd_ < 0) throw IoError("socket() failed");
    int one = 1;
    ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));

    sockaddr_in addr = make_addr(host, port);
    if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
        ::close(listen_fd_);
        listen_fd_ = -1;
        throw IoError("bind to " + host + ":" + std::to_string(port) + " failed: " +
                      std::strerror(errno));
    }
    if (::listen(listen_fd_, 4) != 0) {
        ::close(listen_fd_);
        listen_fd_ = -1;
        throw IoError("listen() failed");
    }
    sockaddr_in bound{};
    socklen_t len = sizeof(bound);
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&bound), &len);
    port_ = ntohs(bound.sin_port);
}

Server::~Server() {
    if (listen_fd_ >= 0) ::close(listen_fd_);
}

void Server::stop() { stopping_.store(true); }

void Server::run(int max_sessions) {
    std::uint64_t session_index = 0;
    int served = 0;
    while (!stopping_.load() && (max_sessions == 0 || served < max_sessions)) {
        pollfd pfd{listen_fd_, POLLIN, 0};
        int ready = ::poll(&pfd, 1, 100);
        if (ready < 0) {
            if (errno == EINTR) continue;
            throw IoError("poll() on listen socket failed");
        }
        if (ready == 0) continue;

        int client = ::accept(listen_fd_, nullptr, nullptr);
        if (client < 0) continue;
        try {
            serve_one(client, session_index);
        } catch (const std::exception& e) {
            // One failed session must not stop the server.
            std::cerr << "session " << session_index << " failed: " << e.what() << "\n";
        }
        ++session_index;
        ++served;
    }
}

void Server::serve_one(int fd, std::uint64_t session_index) {
    Fd guard(fd);
    FrameParser parser;
    std::uint8_t buf[512];
    std::optional<WireFrame> hello;
    while (!hello) {
        pollfd pfd{fd, POLLIN, 0};
        if (::poll(&pfd, 1, 5000) <= 0) throw IoError("timed out waiting for client hello");
        ssize_t n = ::recv(fd, buf, sizeof(buf), 0);
        if (n <= 0) throw IoError("client disconnected before hello");
        parser.feed(std::span<const std::uint8_t>(buf, static_cast<std::size_t>(n)));
        hello = parser.next();
    }
    Point3 position = parse_hello_frame(*hello);

    auto transcript = session_transcript(scenario_, payload_, position, session_index);
    if (!send_all(fd, transcript)) throw IoError("client disconnected mid-session");
    ::shutdown(fd, SHUT_WR);
}

ClientResult run_client(const std::string& host, std::uint16_t port, const Point3& position,
                        SlotWidth slot_width, int timeout_ms) {
    using clock = std::chrono::steady_clock;

    ClientResult result;
    Fd sock(::socket(AF_INET, SOCK_STREAM, 0));
    if (sock.fd < 0) {
        result.detail = "socket() failed";
        return result;
    }
    sockaddr_in addr;
    try {
        addr = make_addr(host, port);
    } catch (const IoError& e) {
        result.detail = e.what();
        return result;
    }
    if (::connect(sock.fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
        result.detail = "connect to " + host + ":" + std::to_string(port) + " failed";
        return result;
    }

    auto helloBytes = encode_frame(make_hello_frame(position));
    if (!send_all(sock.fd, helloBytes)) {
        result.detail = "failed to send hello";
        return result;
    }

    FrameParser parser;
    std::map<std::uint16_t, WireFrame> data_frames;
    IncrementalDecoder decoder(slot_width);
    bool end_seen = false;
    auto deadline = clock::now() + std::chrono::milliseconds(timeout_ms);

    std::uint8_t buf[16384];
    bool connection_open = true;
    try {
        while (!end_seen && connection_open) {
            auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
                deadline - clock::now());
            if (remaining.count() <= 0) break;
            pollfd pfd{sock.fd, POLLIN, 0};
            int ready = ::poll(&pfd, 1, static_cast<int>(remaining.count()));
            if (ready < 0) {
                if (errno == EINTR) continue;
                result.detail = "poll() failed";
                return result;
            }
            if (ready == 0) break;  // quiet window elapsed

            ssize_t n = ::recv(sock.fd, buf, sizeof(buf), 0);
            if (n <= 0) {
                connection_open = false;
                break;
            }
            parser.feed(std::span<const std::uint8_t>(buf, static_cast<std::size_t>(n)));
            while (auto frame = parser.next()) {
                deadline = clock::now() + std::chrono::milliseconds(timeout_ms);
                if (frame->frame_type == FrameType::end_of_transfer) {
                    end_seen = true;
                    break;
                }
                decoder.feed({frame->seq, NtTicks{frame->tx_timestamp}});
                data_frames[frame->seq] = std::move(*frame);
                ++result.frames_received;
            }
        }
    } catch (const FramingError& e) {
        result.detail = e.what();
        return result;
    }

    // A closed socket is not a termination signal in the protocol -- the
    // receiver stops listening only after the quiet window passes.
    if (!end_seen && !connection_open) std::this_thread::sleep_until(deadline);

    if (!decoder.ready()) {
        result.status = ClientStatus::incomplete_key;
        result.detail = "received " + std::to_string(data_frames.size()) +
                        " data frames; need the first 33";
        return result;
    }

    SlotDecode decoded = decoder.decode();
    if (!decoded.in_range()) {
        int bad = decoded.first_out_of_range();
        result.status = ClientStatus::off_region;
        result.detail = "slot out of range at key byte " + std::to_string(bad) +
                        ": receiver appears to be outside the authorized region";
        return result;
    }
    result.key = *decoded.key();

    // Reassemble the cipher payload from every data frame, in seq order.
    std::vector<std::uint8_t> serialized;
    for (const auto& [seq, frame] : data_frames)
        serialized.insert(serialized.end(), frame.payload.begin(), frame.payload.end());
    try {
        CipherPayload payload = deserialize_payload(serialized);
        result.plaintext = decrypt(payload, *result.key);
    } catch (const CryptoError& e) {
        result.status = ClientStatus::wrong_key;
        result.detail = e.what();
        return result;
    } catch (const FramingError& e) {
        result.status = ClientStatus::io_error;
        result.detail = e.what();
        return result;
    }
    result.status = ClientStatus::ok;
    return result;
}

}  // namespace geolock
