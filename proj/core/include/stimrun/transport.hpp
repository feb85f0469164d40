#pragma once

#include <chrono>
#include <memory>
#include <cstdint>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

namespace stimrun::net {

// Owning TCP socket descriptor.
class Socket {
public:
    Socket() = default;
    explicit Socket(int fd)
        : fd_(fd) {}
    Socket(Socket&& other) noexcept;
    Socket& operator=(Socket&& other) noexcept;
    Socket(const Socket&) = delete;
    Socket& operator=(const Socket&) = delete;
    ~Socket();

    bool valid() const { return fd_ >= 0; }
    int fd() const { return fd_; }

    /// Throws Error(ClientLost) when the peer is gone.
    void send_all(std::string_view bytes);
    /// Fills `out` completely; false on orderly close before the first byte.
    /// Throws Error(ClientLost) on a close mid-read or a socket error.
    bool recv_exact(char* out, std::size_t n);

    /// Unblocks pending reads and writes from another thread.
    void shutdown();
    void close();

private:
    int fd_ = -1;
};

struct Endpoint {
    std::string host = "127.0.0.1";
    std::uint16_t port = 0; // 0 = pick a free port

    /// "host:port" or ":port" or "port".
    static std::optional<Endpoint> parse(std::string_view text);
    std::string to_string() const;
};

class Listener {
public:
    /// Throws Error(Busy) if the address is in use, Error(Io) otherwise.
    explicit Listener(const Endpoint& endpoint);

    std::uint16_t port() const { return port_; }

    /// nullopt on timeout or after close().
    std::optional<Socket> accept(std::optional<std::chrono::milliseconds> timeout);
    void close();

private:
    Socket socket_;
    std::uint16_t port_ = 0;
};

/// Throws Error(Io) if the connection fails.
Socket connect_to(const Endpoint& endpoint);

// Message framing on top of a stream socket: 4-byte big-endian length
// prefixes, or WebSocket text frames for browser clients. A stream client
// opens with the 4-byte preamble "SRUN"; a browser opens with its HTTP
// upgrade request. The server tells the two apart from the first bytes.
class FrameChannel {
public:
    enum class Mode { LengthPrefixed, WebSocket };

    static constexpr std::size_t max_frame = 64u << 20;
    static constexpr std::string_view stream_preamble = "SRUN";

    /// Server side: sniffs the first bytes and completes a WebSocket
    /// upgrade if the client sent an HTTP GET. Throws Error(Proto).
    static FrameChannel accept(Socket socket);

    /// Client side. In WebSocket mode performs the upgrade request.
    static FrameChannel connect(Socket socket, Mode mode, std::string_view host = "localhost");

    FrameChannel(FrameChannel&&) noexcept;
    FrameChannel& operator=(FrameChannel&&) noexcept;
    ~FrameChannel();

    Mode mode() const { return mode_; }

    /// Safe to call from several threads.
    void send(std::string_view payload);
    /// nullopt on orderly close. Throws Error(Proto) on a malformed frame.
    std::optional<std::string> receive();

    void shutdown() { socket_.shutdown(); }
    /// Reads block at most `timeout` (0 = forever), then throw Error(ClientLost).
    void set_receive_timeout(std::chrono::milliseconds timeout);

private:
    FrameChannel(Socket socket, Mode mode, bool is_client);

    std::optional<std::string> receive_websocket();
    void send_websocket(std::uint8_t opcode, std::string_view payload);
    bool read_exact(char* out, std::size_t n);

    Socket socket_;
    Mode mode_;
    bool is_client_;
    std::string pending_; // bytes read while sniffing
    std::unique_ptr<std::mutex> send_mutex_;
    std::uint32_t mask_state_ = 0x9E3779B9u;
};

/// Sec-WebSocket-Accept value for a client key.
std::string websocket_accept_key(std::string_view client_key);

} // namespace stimrun::net
