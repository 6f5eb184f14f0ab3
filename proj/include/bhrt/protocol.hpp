#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "bhrt/errors.hpp"
#include "bhrt/render.hpp"
#include "bhrt/stream.hpp"

namespace bhrt {

// Frame layout, all multi-byte integers big-endian:
//   magic "BHRT" (4) | version 0x01 (1) | msg_type (1) | payload_len (4) | payload
//
// msg_type: 1 HELLO, 2 JOB, 3 ROWS, 4 DONE, 5 ERROR.
//
// Payloads:
//   HELLO  version(1)
//   JOB    scene_len(4) scene_text  ppm_len(4) ppm_bytes
//          worker_id(4) row_start(4) row_end(4)
//   ROWS   row_start(4) row_count(4) pixel_bytes
//   DONE   empty
//   ERROR  code(4) text

struct BadMagic : ProtocolError {
    using ProtocolError::ProtocolError;
};
struct BadVersion : ProtocolError {
    using ProtocolError::ProtocolError;
};
struct UnknownMsgType : ProtocolError {
    using ProtocolError::ProtocolError;
};
struct LengthMismatch : ProtocolError {
    using ProtocolError::ProtocolError;
};

constexpr std::uint8_t kProtocolVersion = 1;

struct HelloMsg {
    std::uint8_t version = kProtocolVersion;
    bool operator==(const HelloMsg&) const = default;
};

struct JobMsg {
    std::string scene_text;                   // key=value, same format as --config
    std::vector<std::uint8_t> background_ppm; // P6 bytes, parsed by the worker
    BandAssignment band;
    bool operator==(const JobMsg&) const = default;
};

struct RowsMsg {
    std::uint32_t row_start = 0;
    std::uint32_t row_count = 0;
    std::vector<std::uint8_t> pixels;  // row_count * width * 3 bytes
    bool operator==(const RowsMsg&) const = default;
};

struct DoneMsg {
    bool operator==(const DoneMsg&) const = default;
};

struct ErrorMsg {
    std::uint32_t code = 0;
    std::string text;
    bool operator==(const ErrorMsg&) const = default;
};

using Message = std::variant<HelloMsg, JobMsg, RowsMsg, DoneMsg, ErrorMsg>;

std::vector<std::uint8_t> encode_frame(const Message& msg);

/// Decodes one complete frame; the buffer must contain exactly the frame.
Message decode_frame(std::span<const std::uint8_t> bytes);

void write_frame(ByteStream& stream, const Message& msg);

/// Reads one frame; throws ProtocolError on EOF mid-frame or malformed
/// data.
Message read_frame(ByteStream& stream);

}  // namespace bhrt
