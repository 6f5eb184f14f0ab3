#include "bhrt/protocol.hpp"

#include <cstring>

namespace bhrt {

namespace {

constexpr char kMagic[4] = {'B', 'H', 'R', 'T'};
constexpr std::size_t kHeaderSize = 10;

enum : std::uint8_t {
    kTypeHello = 1,
    kTypeJob = 2,
    kTypeRows = 3,
    kTypeDone = 4,
    kTypeError = 5,
};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

struct PayloadReader {
    std::span<const std::uint8_t> bytes;
    std::size_t pos = 0;

    std::uint32_t u32() {
        if (bytes.size() - pos < 4) throw LengthMismatch("payload truncated reading u32");
        const std::uint32_t v = (static_cast<std::uint32_t>(bytes[pos]) << 24) |
                                (static_cast<std::uint32_t>(bytes[pos + 1]) << 16) |
                                (static_cast<std::uint32_t>(bytes[pos + 2]) << 8) |
                                static_cast<std::uint32_t>(bytes[pos + 3]);
        pos += 4;
        return v;
    }

    std::uint8_t u8() {
        if (bytes.size() - pos < 1) throw LengthMismatch("payload truncated reading u8");
        return bytes[pos++];
    }

    std::span<const std::uint8_t> take(std::size_t n) {
        if (bytes.size() - pos < n) throw LengthMismatch("payload truncated reading blob");
        const auto s = bytes.subspan(pos, n);
        pos += n;
        return s;
    }

    std::span<const std::uint8_t> rest() { return take(bytes.size() - pos); }

    void expect_end() const {
        if (pos != bytes.size()) throw LengthMismatch("payload has trailing bytes");
    }
};

std::uint8_t type_of(const Message& msg) {
    switch (msg.index()) {
        case 0: return kTypeHello;
        case 1: return kTypeJob;
        case 2: return kTypeRows;
        case 3: return kTypeDone;
        default: return kTypeError;
    }
}

std::vector<std::uint8_t> encode_payload(const Message& msg) {
    std::vector<std::uint8_t> out;
    if (const auto* m = std::get_if<HelloMsg>(&msg)) {
        out.push_back(m->version);
    } else if (const auto* m = std::get_if<JobMsg>(&msg)) {
        put_u32(out, static_cast<std::uint32_t>(m->scene_text.size()));
        out.insert(out.end(), m->scene_text.begin(), m->scene_text.end());
        put_u32(out, static_cast<std::uint32_t>(m->background_ppm.size()));
        out.insert(out.end(), m->background_ppm.begin(), m->background_ppm.end());
        put_u32(out, static_cast<std::uint32_t>(m->band.worker_id));
        put_u32(out, static_cast<std::uint32_t>(m->band.row_start));
        put_u32(out, static_cast<std::uint32_t>(m->band.row_end));
    } else if (const auto* m = std::get_if<RowsMsg>(&msg)) {
        put_u32(out, m->row_start);
        put_u32(out, m->row_count);
        out.insert(out.end(), m->pixels.begin(), m->pixels.end());
    } else if (const auto* m = std::get_if<ErrorMsg>(&msg)) {
        put_u32(out, m->code);
        out.insert(out.end(), m->text.begin(), m->text.end());
    }
    // DONE: empty payload.
    return out;
}

Message decode_payload(std::uint8_t type, std::span<const std::uint8_t> payload) {
    PayloadReader r{payload};
    switch (type) {
        case kTypeHello: {
            HelloMsg m;
            m.version = r.u8();
            r.expect_end();
            return m;
        }
        case kTypeJob: {
            JobMsg m;
            const auto scene = r.take(r.u32());
            m.scene_text.assign(scene.begin(), scene.end());
            const auto ppm = r.take(r.u32());
            m.background_ppm.assign(ppm.begin(), ppm.end());
            m.band.worker_id = static_cast<int>(r.u32());
            m.band.row_start = static_cast<int>(r.u32());
            m.band.row_end = static_cast<int>(r.u32());
            r.expect_end();
            return m;
        }
        case kTypeRows: {
            RowsMsg m;
            m.row_start = r.u32();
            m.row_count = r.u32();
            const auto px = r.rest();
            m.pixels.assign(px.begin(), px.end());
            return m;
        }
        case kTypeDone:
            r.expect_end();
            return DoneMsg{};
        case kTypeError: {
            ErrorMsg m;
            m.code = r.u32();
            const auto text = r.rest();
            m.text.assign(text.begin(), text.end());
            return m;
        }
        default:
            throw UnknownMsgType("unknown message type " + std::to_string(type));
    }
}

}  // namespace

std::vector<std::uint8_t> encode_frame(const Message& msg) {
    const std::vector<std::uint8_t> payload = encode_payload(msg);
    std::vector<std::uint8_t> out;
    out.reserve(kHeaderSize + payload.size());
    out.insert(out.end(), kMagic, kMagic + 4);
    out.push_back(kProtocolVersion);
    out.push_back(type_of(msg));
    put_u32(out, static_cast<std::uint32_t>(payload.size()));
    out.insert(out.end(), payload.begin(), payload.end());
    return out;
}

Message decode_frame(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kHeaderSize) throw LengthMismatch("frame shorter than header");
    if (std::memcmp(bytes.data(), kMagic, 4) != 0)
        throw BadMagic("bad frame magic");
    if (bytes[4] != kProtocolVersion)
        throw BadVersion("unsupported protocol version " + std::to_string(bytes[4]));
    const std::uint8_t type = bytes[5];
    const std::uint32_t len = (static_cast<std::uint32_t>(bytes[6]) << 24) |
                              (static_cast<std::uint32_t>(bytes[7]) << 16) |
                              (static_cast<std::uint32_t>(bytes[8]) << 8) |
                              static_cast<std::uint32_t>(bytes[9]);
    if (bytes.size() - kHeaderSize != len)
        throw LengthMismatch("frame payload length " + std::to_string(bytes.size() - kHeaderSize) +
                             " does not match header " + std::to_string(len));
    return decode_payload(type, bytes.subspan(kHeaderSize));
}

void write_frame(ByteStream& stream, const Message& msg) {
    const std::vector<std::uint8_t> bytes = encode_frame(msg);
    stream.write_all(bytes.data(), bytes.size());
}

Message read_frame(ByteStream& stream) {
    std::uint8_t header[kHeaderSize];
    stream.read_exact(header, kHeaderSize);
    if (std::memcmp(header, kMagic, 4) != 0) throw BadMagic("bad frame magic");
    if (header[4] != kProtocolVersion)
        throw BadVersion("unsupported protocol version " + std::to_string(header[4]));
    const std::uint32_t len = (static_cast<std::uint32_t>(header[6]) << 24) |
                              (static_cast<std::uint32_t>(header[7]) << 16) |
                              (static_cast<std::uint32_t>(header[8]) << 8) |
                              static_cast<std::uint32_t>(header[9]);
    if (len > (1u << 30)) throw LengthMismatch("frame payload implausibly large");
    std::vector<std::uint8_t> payload(len);
    if (len > 0) stream.read_exact(payload.data(), len);
    return decode_payload(header[5], payload);
}

}  // namespace bhrt
