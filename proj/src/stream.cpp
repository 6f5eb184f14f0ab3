#include "bhrt/stream.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

namespace bhrt {

namespace {

[[noreturn]] void throw_errno(const std::string& what) {
    throw IoError(what + ": " + std::strerror(errno));
}

}  // namespace

void ByteStream::read_exact(void* buf, std::size_t len) {
    auto* p = static_cast<std::uint8_t*>(buf);
    while (len > 0) {
        const std::size_t n = read_some(p, len);
        if (n == 0) throw ProtocolError("stream closed mid-message");
        p += n;
        len -= n;
    }
}

FdStream::~FdStream() {
    if (fd_ >= 0) ::close(fd_);
}

std::size_t FdStream::read_some(void* buf, std::size_t len) {
    for (;;) {
        const ssize_t n = ::read(fd_, buf, len);
        if (n >= 0) return static_cast<std::size_t>(n);
        if (errno != EINTR) throw_errno("read");
    }
}

void FdStream::write_all(const void* buf, std::size_t len) {
    const auto* p = static_cast<const std::uint8_t*>(buf);
    while (len > 0) {
        const ssize_t n = ::write(fd_, p, len);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw_errno("write");
        }
        p += n;
        len -= static_cast<std::size_t>(n);
    }
}

TcpListener::TcpListener(const std::string& host, std::uint16_t port) : fd_(-1), port_(0) {
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd_ < 0) throw_errno("socket");

    const int one = 1;
    ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);

    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
        ::close(fd_);
        throw UsageError("invalid listen address '" + host + "'");
    }
    if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
        const int e = errno;
        ::close(fd_);
        errno = e;
        throw_errno("bind " + host + ":" + std::to_string(port));
    }
    if (::listen(fd_, 16) != 0) {
        const int e = errno;
        ::close(fd_);
        errno = e;
        throw_errno("listen");
    }

    sockaddr_in bound{};
    socklen_t blen = sizeof bound;
    if (::getsockname(fd_, reinterpret_cast<sockaddr*>(&bound), &blen) != 0) {
        const int e = errno;
        ::close(fd_);
        errno = e;
        throw_errno("getsockname");
    }
    port_ = ntohs(bound.sin_port);
}

TcpListener::~TcpListener() {
    if (fd_ >= 0) ::close(fd_);
}

std::unique_ptr<FdStream> TcpListener::accept() {
    for (;;) {
        const int fd = ::accept(fd_, nullptr, nullptr);
        if (fd >= 0) return std::make_unique<FdStream>(fd);
        if (errno != EINTR) throw_errno("accept");
    }
}

std::unique_ptr<FdStream> connect_tcp(const std::string& host, std::uint16_t port) {
    const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) throw_errno("socket");

    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
        ::close(fd);
        throw UsageError("invalid connect address '" + host + "'");
    }
    if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
        const int e = errno;
        ::close(fd);
        errno = e;
        throw_errno("connect " + host + ":" + std::to_string(port));
    }
    return std::make_unique<FdStream>(fd);
}

std::pair<std::string, std::uint16_t> parse_endpoint(const std::string& endpoint) {
    const std::size_t colon = endpoint.rfind(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 >= endpoint.size())
        throw UsageError("invalid endpoint '" + endpoint + "', expected host:port");
    const std::string host = endpoint.substr(0, colon);
    const std::string port_str = endpoint.substr(colon + 1);
    char* end = nullptr;
    const unsigned long port = std::strtoul(port_str.c_str(), &end, 10);
    if (*end != '\0' || port > 65535)
        throw UsageError("invalid port in endpoint '" + endpoint + "'");
    return {host, static_cast<std::uint16_t>(port)};
}

}  // namespace bhrt
