#include "stimrun/transport.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <sys/time.h>
#include <unistd.h>

#include <openssl/sha.h>

#include <cerrno>
#include <cstring>

#include "stimrun/error.hpp"
#include "stimrun/protocol.hpp"
#include "stimrun/text.hpp"

namespace stimrun::net {

Socket::Socket(Socket&& other) noexcept
    : fd_(other.fd_) {
    other.fd_ = -1;
}

Socket& Socket::operator=(Socket&& other) noexcept {
    if (this != &other) {
        close();
        fd_ = other.fd_;
        other.fd_ = -1;
    }
    return *this;
}

Socket::~Socket() {
    close();
}

void Socket::send_all(std::string_view bytes) {
    while (!bytes.empty()) {
        const auto n = ::send(fd_, bytes.data(), bytes.size(), MSG_NOSIGNAL);
        if (n < 0) {
            if (errno == EINTR) {
                continue;
            }
            throw Error(ErrorCode::ClientLost, std::string("send: ") + std::strerror(errno));
        }
        bytes.remove_prefix(static_cast<std::size_t>(n));
    }
}

bool Socket::recv_exact(char* out, std::size_t n) {
    std::size_t got = 0;
    while (got < n) {
        const auto r = ::recv(fd_, out + got, n - got, 0);
        if (r == 0) {
            if (got == 0) {
                return false;
            }
            throw Error(ErrorCode::ClientLost, "connection closed mid-frame");
        }
        if (r < 0) {
            if (errno == EINTR) {
                continue;
            }
            if (errno == EAGAIN || errno == EWOULDBLOCK) {
                throw Error(ErrorCode::ClientLost, "receive timed out");
            }
            throw Error(ErrorCode::ClientLost, std::string("recv: ") + std::strerror(errno));
        }
        got += static_cast<std::size_t>(r);
    }
    return true;
}

void Socket::shutdown() {
    if (fd_ >= 0) {
        ::shutdown(fd_, SHUT_RDWR);
    }
}

void Socket::close() {
    if (fd_ >= 0) {
        ::close(fd_);
        fd_ = -1;
    }
}

std::optional<Endpoint> Endpoint::parse(std::string_view text) {
    Endpoint ep;
    text = trim(text);
    const auto colon = text.rfind(':');
    std::string_view port_text = text;
    if (colon != std::string_view::npos) {
        if (colon > 0) {
            ep.host = std::string(text.substr(0, colon));
        }
        port_text = text.substr(colon + 1);
    }
    const auto port = parse_int(port_text);
    if (!port || *port < 0 || *port > 65535) {
        return std::nullopt;
    }
    ep.port = static_cast<std::uint16_t>(*port);
    return ep;
}

std::string Endpoint::to_string() const {
    return host + ":" + std::to_string(port);
}

namespace {

sockaddr_in resolve(const Endpoint& endpoint) {
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(endpoint.port);
    const std::string host = endpoint.host == "localhost" ? "127.0.0.1" : endpoint.host;
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
        throw Error(ErrorCode::Io, "not an IPv4 address: " + endpoint.host);
    }
    return addr;
}

} // namespace

Listener::Listener(const Endpoint& endpoint) {
    const auto addr = resolve(endpoint);
    socket_ = Socket(::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0));
    if (!socket_.valid()) {
        throw Error(ErrorCode::Io, std::string("socket: ") + std::strerror(errno));
    }
    if (::bind(socket_.fd(), reinterpret_cast<const sockaddr*>(&addr), sizeof addr) != 0) {
        const int err = errno;
        throw Error(err == EADDRINUSE ? ErrorCode::Busy : ErrorCode::Io,
            "bind " + endpoint.to_string() + ": " + std::strerror(err));
    }
    if (::listen(socket_.fd(), 4) != 0) {
        throw Error(ErrorCode::Io, std::string("listen: ") + std::strerror(errno));
    }
    sockaddr_in bound{};
    socklen_t len = sizeof bound;
    ::getsockname(socket_.fd(), reinterpret_cast<sockaddr*>(&bound), &len);
    port_ = ntohs(bound.sin_port);
}

std::optional<Socket> Listener::accept(std::optional<std::chrono::milliseconds> timeout) {
    if (!socket_.valid()) {
        return std::nullopt;
    }
    pollfd pfd{socket_.fd(), POLLIN, 0};
    const int wait_ms = timeout ? static_cast<int>(timeout->count()) : -1;
    int r = 0;
    do {
        r = ::poll(&pfd, 1, wait_ms);
    } while (r < 0 && errno == EINTR);
    if (r <= 0 || !(pfd.revents & POLLIN)) {
        return std::nullopt;
    }
    const int fd = ::accept4(socket_.fd(), nullptr, nullptr, SOCK_CLOEXEC);
    if (fd < 0) {
        return std::nullopt;
    }
    const int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    return Socket(fd);
}

void Listener::close() {
    socket_.shutdown();
    socket_.close();
}

Socket connect_to(const Endpoint& endpoint) {
    const auto addr = resolve(endpoint);
    Socket s(::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0));
    if (!s.valid() || ::connect(s.fd(), reinterpret_cast<const sockaddr*>(&addr), sizeof addr) != 0) {
        throw Error(ErrorCode::Io, "connect " + endpoint.to_string() + ": " + std::strerror(errno));
    }
    const int one = 1;
    ::setsockopt(s.fd(), IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    return s;
}

std::string websocket_accept_key(std::string_view client_key) {
    static constexpr std::string_view guid = "258EAFA5-E914-47DA-95CA-C5AB0DC85B11";
    const std::string joined = std::string(trim(client_key)) + std::string(guid);
    unsigned char digest[SHA_DIGEST_LENGTH];
    ::SHA1(reinterpret_cast<const unsigned char*>(joined.data()), joined.size(), digest);
    return wire::base64_encode(std::span<const std::uint8_t>(digest, SHA_DIGEST_LENGTH));
}

namespace {

constexpr std::uint8_t ws_text = 0x1;
constexpr std::uint8_t ws_binary = 0x2;
constexpr std::uint8_t ws_close = 0x8;
constexpr std::uint8_t ws_ping = 0x9;
constexpr std::uint8_t ws_pong = 0xA;

std::string header_value(std::string_view request, std::string_view name) {
    for (auto line : split_lines(request)) {
        const auto colon = line.find(':');
        if (colon != std::string_view::npos && iequals(trim(line.substr(0, colon)), name)) {
            return std::string(trim(line.substr(colon + 1)));
        }
    }
    return {};
}

} // namespace

FrameChannel::FrameChannel(Socket socket, Mode mode, bool is_client)
    : socket_(std::move(socket))
    , mode_(mode)
    , is_client_(is_client)
    , send_mutex_(std::make_unique<std::mutex>()) {
}

FrameChannel::FrameChannel(FrameChannel&&) noexcept = default;
FrameChannel& FrameChannel::operator=(FrameChannel&&) noexcept = default;
FrameChannel::~FrameChannel() = default;

bool FrameChannel::read_exact(char* out, std::size_t n) {
    std::size_t from_pending = std::min(n, pending_.size());
    if (from_pending > 0) {
        std::memcpy(out, pending_.data(), from_pending);
        pending_.erase(0, from_pending);
    }
    if (from_pending == n) {
        return true;
    }
    const bool ok = socket_.recv_exact(out + from_pending, n - from_pending);
    if (!ok && from_pending > 0) {
        throw Error(ErrorCode::ClientLost, "connection closed mid-frame");
    }
    return ok;
}

FrameChannel FrameChannel::accept(Socket socket) {
    FrameChannel ch(std::move(socket), Mode::LengthPrefixed, false);
    char head[4];
    if (!ch.socket_.recv_exact(head, 4)) {
        throw Error(ErrorCode::ClientLost, "client closed before sending anything");
    }
    if (std::memcmp(head, stream_preamble.data(), 4) == 0) {
        return ch;
    }
    if (std::memcmp(head, "GET ", 4) != 0) {
        throw Error(ErrorCode::Proto, "unknown connection preamble");
    }
    std::string request(head, 4);
    while (request.find("\r\n\r\n") == std::string::npos) {
        if (request.size() > 16 * 1024) {
            throw Error(ErrorCode::Proto, "HTTP upgrade request too large");
        }
        char c;
        if (!ch.socket_.recv_exact(&c, 1)) {
            throw Error(ErrorCode::ClientLost, "client closed during upgrade");
        }
        request.push_back(c);
    }
    const auto key = header_value(request, "Sec-WebSocket-Key");
    if (key.empty() || !iequals(header_value(request, "Upgrade"), "websocket")) {
        ch.socket_.send_all("HTTP/1.1 400 Bad Request\r\nContent-Length: 0\r\nConnection: close\r\n\r\n");
        throw Error(ErrorCode::Proto, "HTTP request is not a WebSocket upgrade");
    }
    ch.socket_.send_all("HTTP/1.1 101 Switching Protocols\r\nUpgrade: websocket\r\nConnection: Upgrade\r\n"
                        "Sec-WebSocket-Accept: "
        + websocket_accept_key(key) + "\r\n\r\n");
    ch.mode_ = Mode::WebSocket;
    return ch;
}

FrameChannel FrameChannel::connect(Socket socket, Mode mode, std::string_view host) {
    FrameChannel ch(std::move(socket), mode, true);
    if (mode == Mode::LengthPrefixed) {
        ch.socket_.send_all(stream_preamble);
        return ch;
    }
    static constexpr std::string_view key = "c3RpbXJ1bi10ZXN0LWtleQ==";
    ch.socket_.send_all("GET / HTTP/1.1\r\nHost: " + std::string(host)
        + "\r\nUpgrade: websocket\r\nConnection: Upgrade\r\nSec-WebSocket-Version: 13\r\nSec-WebSocket-Key: "
        + std::string(key) + "\r\n\r\n");
    std::string response;
    while (response.find("\r\n\r\n") == std::string::npos) {
        char c;
        if (!ch.socket_.recv_exact(&c, 1) || response.size() > 16 * 1024) {
            throw Error(ErrorCode::Proto, "bad WebSocket upgrade response");
        }
        response.push_back(c);
    }
    if (!response.starts_with("HTTP/1.1 101")
        || header_value(response, "Sec-WebSocket-Accept") != websocket_accept_key(key)) {
        throw Error(ErrorCode::Proto, "server refused the WebSocket upgrade");
    }
    return ch;
}

void FrameChannel::set_receive_timeout(std::chrono::milliseconds timeout) {
    timeval tv{};
    tv.tv_sec = static_cast<time_t>(timeout.count() / 1000);
    tv.tv_usec = static_cast<suseconds_t>((timeout.count() % 1000) * 1000);
    ::setsockopt(socket_.fd(), SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof tv);
}

void FrameChannel::send(std::string_view payload) {
    if (payload.size() > max_frame) {
        throw Error(ErrorCode::Proto, "frame too large");
    }
    std::lock_guard lock(*send_mutex_);
    if (mode_ == Mode::WebSocket) {
        send_websocket(ws_text, payload);
        return;
    }
    const auto n = static_cast<std::uint32_t>(payload.size());
    std::string frame;
    frame.reserve(4 + payload.size());
    frame.push_back(static_cast<char>(n >> 24));
    frame.push_back(static_cast<char>(n >> 16));
    frame.push_back(static_cast<char>(n >> 8));
    frame.push_back(static_cast<char>(n));
    frame.append(payload);
    socket_.send_all(frame);
}

void FrameChannel::send_websocket(std::uint8_t opcode, std::string_view payload) {
    std::string frame;
    frame.push_back(static_cast<char>(0x80 | opcode));
    const std::uint8_t mask_bit = is_client_ ? 0x80 : 0x00;
    const auto n = payload.size();
    if (n < 126) {
        frame.push_back(static_cast<char>(mask_bit | n));
    } else if (n <= 0xFFFF) {
        frame.push_back(static_cast<char>(mask_bit | 126));
        frame.push_back(static_cast<char>(n >> 8));
        frame.push_back(static_cast<char>(n));
    } else {
        frame.push_back(static_cast<char>(mask_bit | 127));
        for (int i = 7; i >= 0; --i) {
            frame.push_back(static_cast<char>(static_cast<std::uint64_t>(n) >> (8 * i)));
        }
    }
    if (!is_client_) {
        frame.append(payload);
    } else {
        mask_state_ ^= mask_state_ << 13;
        mask_state_ ^= mask_state_ >> 17;
        mask_state_ ^= mask_state_ << 5;
        char mask[4];
        for (int i = 0; i < 4; ++i) {
            mask[i] = static_cast<char>(mask_state_ >> (8 * i));
        }
        frame.append(mask, 4);
        for (std::size_t i = 0; i < n; ++i) {
            frame.push_back(static_cast<char>(payload[i] ^ mask[i % 4]));
        }
    }
    socket_.send_all(frame);
}

std::optional<std::string> FrameChannel::receive() {
    if (mode_ == Mode::WebSocket) {
        return receive_websocket();
    }
    char head[4];
    if (!read_exact(head, 4)) {
        return std::nullopt;
    }
    const std::uint32_t n = (static_cast<std::uint32_t>(static_cast<unsigned char>(head[0])) << 24)
        | (static_cast<std::uint32_t>(static_cast<unsigned char>(head[1])) << 16)
        | (static_cast<std::uint32_t>(static_cast<unsigned char>(head[2])) << 8)
        | static_cast<std::uint32_t>(static_cast<unsigned char>(head[3]));
    if (n > max_frame) {
        throw Error(ErrorCode::Proto, "frame length " + std::to_string(n) + " exceeds the limit");
    }
    std::string payload(n, '\0');
    if (n > 0 && !read_exact(payload.data(), n)) {
        throw Error(ErrorCode::ClientLost, "connection closed mid-frame");
    }
    return payload;
}

std::optional<std::string> FrameChannel::receive_websocket() {
    std::string message;
    while (true) {
        unsigned char head[2];
        if (!read_exact(reinterpret_cast<char*>(head), 2)) {
            return std::nullopt;
        }
        const bool fin = head[0] & 0x80;
        const std::uint8_t opcode = head[0] & 0x0F;
        const bool masked = head[1] & 0x80;
        std::uint64_t n = head[1] & 0x7F;
        if (n == 126) {
            unsigned char ext[2];
            read_exact(reinterpret_cast<char*>(ext), 2);
            n = (static_cast<std::uint64_t>(ext[0]) << 8) | ext[1];
        } else if (n == 127) {
            unsigned char ext[8];
            read_exact(reinterpret_cast<char*>(ext), 8);
            n = 0;
            for (auto b : ext) {
                n = (n << 8) | b;
            }
        }
        if (n > max_frame || message.size() + n > max_frame) {
            throw Error(ErrorCode::Proto, "WebSocket frame too large");
        }
        if (!is_client_ && !masked) {
            throw Error(ErrorCode::Proto, "client WebSocket frames must be masked");
        }
        char mask[4] = {0, 0, 0, 0};
        if (masked) {
            read_exact(mask, 4);
        }
        std::string payload(static_cast<std::size_t>(n), '\0');
        if (n > 0) {
            read_exact(payload.data(), payload.size());
        }
        if (masked) {
            for (std::size_t i = 0; i < payload.size(); ++i) {
                payload[i] = static_cast<char>(payload[i] ^ mask[i % 4]);
            }
        }
        switch (opcode) {
        case ws_close: {
            std::lock_guard lock(*send_mutex_);
            try {
                send_websocket(ws_close, {});
            } catch (const Error&) {
            }
            return std::nullopt;
        }
        case ws_ping: {
            std::lock_guard lock(*send_mutex_);
            send_websocket(ws_pong, payload);
            continue;
        }
        case ws_pong:
            continue;
        case 0x0:
        case ws_text:
        case ws_binary:
            message += payload;
            if (fin) {
                return message;
            }
            continue;
        default:
            throw Error(ErrorCode::Proto, "unknown WebSocket opcode " + std::to_string(opcode));
        }
    }
}

} // namespace stimrun::net
