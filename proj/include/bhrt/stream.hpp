#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>

#include "bhrt/errors.hpp"

namespace bhrt {

/// Reliable ordered byte stream; the transport under the render protocol.
class ByteStream {
public:
    virtual ~ByteStream() = default;

    /// Reads up to `len` bytes; returns 0 on clean EOF.
    virtual std::size_t read_some(void* buf, std::size_t len) = 0;
    virtual void write_all(const void* buf, std::size_t len) = 0;

    /// Reads exactly `len` bytes; throws ProtocolError on early EOF.
    void read_exact(void* buf, std::size_t len);
};

/// Stream over a file descriptor (socket or pipe); owns and closes it.
class FdStream : public ByteStream {
public:
    explicit FdStream(int fd) : fd_(fd) {}
    ~FdStream() override;

    FdStream(const FdStream&) = delete;
    FdStream& operator=(const FdStream&) = delete;

    std::size_t read_some(void* buf, std::size_t len) override;
    void write_all(const void* buf, std::size_t len) override;

    int fd() const { return fd_; }

private:
    int fd_;
};

/// Listening TCP socket bound to host:port; port 0 picks a free port.
class TcpListener {
public:
    TcpListener(const std::string& host, std::uint16_t port);
    ~TcpListener();

    TcpListener(const TcpListener&) = delete;
    TcpListener& operator=(const TcpListener&) = delete;

    std::uint16_t port() const { return port_; }
    std::unique_ptr<FdStream> accept();

private:
    int fd_;
    std::uint16_t port_;
};

std::unique_ptr<FdStream> connect_tcp(const std::string& host, std::uint16_t port);

/// "host:port" -> (host, port). Throws UsageError.
std::pair<std::string, std::uint16_t> parse_endpoint(const std::string& endpoint);

}  // namespace bhrt
