#pragma once

#include <vector>

#include "bhrt/image.hpp"
#include "bhrt/protocol.hpp"
#include "bhrt/render.hpp"
#include "bhrt/stream.hpp"

namespace bhrt {

// Multi-process render mode. One static scanline band per worker, mirroring
// the distributed decomposition; the coordinator reassembles rows by
// row_start, so arrival order never matters.
//
// Sequence per worker stream:
//   worker -> HELLO, coordinator -> HELLO, coordinator -> JOB,
//   worker -> ROWS chunks (<= 64 rows each) then DONE.

/// Drives one render over connected worker streams and assembles the
/// image; byte-identical to render_image(scene, 1). Throws ProtocolError
/// on worker failure, EOF, or duplicate rows.
ImageBuffer run_coordinator(const SceneConfig& scene, const std::vector<ByteStream*>& workers);

/// Serves one JOB on an established stream, rendering with `threads`
/// local threads, then returns. Malformed input earns the coordinator an
/// ERROR frame before the exception propagates.
void run_worker(ByteStream& stream, int threads);

}  // namespace bhrt
