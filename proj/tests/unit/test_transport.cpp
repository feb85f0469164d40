#include <gtest/gtest.h>

#include <thread>

#include "stimrun/error.hpp"
#include "stimrun/transport.hpp"

namespace stimrun::net {
namespace {

TEST(Endpoint, Parse) {
    auto e = Endpoint::parse("127.0.0.1:7341");
    ASSERT_TRUE(e);
    EXPECT_EQ(e->host, "127.0.0.1");
    EXPECT_EQ(e->port, 7341);
    e = Endpoint::parse(":9000");
    ASSERT_TRUE(e);
    EXPECT_EQ(e->host, "127.0.0.1");
    EXPECT_EQ(Endpoint::parse("9000")->port, 9000);
    EXPECT_FALSE(Endpoint::parse("host:"));
    EXPECT_FALSE(Endpoint::parse("host:99999"));
    EXPECT_FALSE(Endpoint::parse("host:x1"));
}

TEST(Transport, WebSocketAcceptKey) {
    EXPECT_EQ(websocket_accept_key("dGhlIHNhbXBsZSBub25jZQ=="), "s3pPLMBiTxaQ9kYGzzhZRbK+xOo=");
}

TEST(Transport, BusyPort) {
    Listener first(Endpoint{"127.0.0.1", 0});
    try {
        Listener second(Endpoint{"127.0.0.1", first.port()});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::Busy);
    }
}

TEST(Transport, AcceptTimesOut) {
    Listener l(Endpoint{"127.0.0.1", 0});
    EXPECT_FALSE(l.accept(std::chrono::milliseconds(20)));
}

void echo_roundtrip(FrameChannel::Mode mode) {
    Listener l(Endpoint{"127.0.0.1", 0});
    const auto port = l.port();
    const std::string big(200'000, 'x');
    std::thread client([&] {
        auto ch = FrameChannel::connect(connect_to(Endpoint{"127.0.0.1", port}), mode);
        ch.send("hello");
        ch.send("");
        ch.send(big);
        auto reply = ch.receive();
        ASSERT_TRUE(reply);
        EXPECT_EQ(*reply, "world");
    });
    auto socket = l.accept(std::chrono::seconds(5));
    ASSERT_TRUE(socket);
    auto server = FrameChannel::accept(std::move(*socket));
    EXPECT_EQ(server.mode(), mode);
    EXPECT_EQ(server.receive(), std::optional<std::string>("hello"));
    EXPECT_EQ(server.receive(), std::optional<std::string>(""));
    EXPECT_EQ(server.receive(), std::optional<std::string>(big));
    server.send("world");
    client.join();
    EXPECT_FALSE(server.receive());
}

TEST(Transport, LengthPrefixedFrames) {
    echo_roundtrip(FrameChannel::Mode::LengthPrefixed);
}

TEST(Transport, WebSocketFrames) {
    echo_roundtrip(FrameChannel::Mode::WebSocket);
}

TEST(Transport, UnknownPreambleRejected) {
    Listener l(Endpoint{"127.0.0.1", 0});
    const auto port = l.port();
    std::thread client([&] {
        auto s = connect_to(Endpoint{"127.0.0.1", port});
        s.send_all("HELO");
    });
    auto socket = l.accept(std::chrono::seconds(5));
    ASSERT_TRUE(socket);
    try {
        FrameChannel::accept(std::move(*socket));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::Proto);
    }
    client.join();
}

TEST(Transport, NonUpgradeHttpRequestRejected) {
    Listener l(Endpoint{"127.0.0.1", 0});
    const auto port = l.port();
    std::thread client([&] {
        auto s = connect_to(Endpoint{"127.0.0.1", port});
        s.send_all("GET / HTTP/1.1\r\nHost: x\r\n\r\n");
        char buf[12] = {};
        s.recv_exact(buf, sizeof buf);
        EXPECT_EQ(std::string(buf, 12), "HTTP/1.1 400");
    });
    auto socket = l.accept(std::chrono::seconds(5));
    ASSERT_TRUE(socket);
    EXPECT_THROW(FrameChannel::accept(std::move(*socket)), Error);
    client.join();
}

TEST(Transport, ConnectRefused) {
    std::uint16_t port = 0;
    {
        Listener l(Endpoint{"127.0.0.1", 0});
        port = l.port();
    }
    EXPECT_THROW(connect_to(Endpoint{"127.0.0.1", port}), Error);
}

} // namespace
} // namespace stimrun::net
