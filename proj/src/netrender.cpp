#include "bhrt/netrender.hpp"

#include <algorithm>
#include <exception>
#include <mutex>
#include <thread>

#include "bhrt/config.hpp"

namespace bhrt {

namespace {

constexpr std::uint32_t kErrProtocol = 1;
constexpr std::uint32_t kErrIo = 2;
constexpr std::uint32_t kErrNumerical = 3;

constexpr std::uint32_t kMaxRowsPerChunk = 64;

[[noreturn]] void fail_worker(std::size_t worker_id, const std::string& what) {
    throw ProtocolError("worker " + std::to_string(worker_id) + ": " + what);
}

}  // namespace

ImageBuffer run_coordinator(const SceneConfig& scene, const std::vector<ByteStream*>& workers) {
    validate_scene(scene);
    if (workers.empty()) throw std::invalid_argument("coordinator: need at least one worker");

    const int width = scene.camera.width;
    const int height = scene.camera.height;

    const std::string scene_text = serialize_scene(scene);
    const std::vector<std::uint8_t> background_ppm = save_ppm(*scene.background);
    const std::vector<BandAssignment> bands = make_bands(height, static_cast<int>(workers.size()));

    // Handshake and band assignment, in worker order.
    for (std::size_t i = 0; i < workers.size(); ++i) {
        const Message hello = read_frame(*workers[i]);
        const auto* h = std::get_if<HelloMsg>(&hello);
        if (h == nullptr) fail_worker(i, "expected HELLO");
        if (h->version != kProtocolVersion)
            fail_worker(i, "unsupported worker version " + std::to_string(h->version));
        write_frame(*workers[i], HelloMsg{});

        // Workers beyond the band count (height < workers) get an empty band.
        BandAssignment band{static_cast<int>(i), height, height};
        if (i < bands.size()) band = bands[i];
        write_frame(*workers[i], JobMsg{scene_text, background_ppm, band});
    }

    ImageBuffer image(width, height);
    std::vector<std::uint8_t> row_seen(static_cast<std::size_t>(height), 0);
    std::mutex image_mutex;
    std::exception_ptr first_error;
    std::mutex error_mutex;

    const auto service_worker = [&](std::size_t worker_id) {
        try {
            for (;;) {
                const Message msg = read_frame(*workers[worker_id]);
                if (std::holds_alternative<DoneMsg>(msg)) return;
                if (const auto* err = std::get_if<ErrorMsg>(&msg))
                    fail_worker(worker_id, "reported error " + std::to_string(err->code) + ": " +
                                               err->text);
                const auto* rows = std::get_if<RowsMsg>(&msg);
                if (rows == nullptr) fail_worker(worker_id, "unexpected message type");

                if (rows->row_count == 0) fail_worker(worker_id, "empty ROWS chunk");
                const std::uint64_t end =
                    static_cast<std::uint64_t>(rows->row_start) + rows->row_count;
                if (end > static_cast<std::uint64_t>(height))
                    fail_worker(worker_id, "ROWS outside image bounds");
                const std::size_t expect =
                    static_cast<std::size_t>(rows->row_count) * width * 3;
                if (rows->pixels.size() != expect)
                    fail_worker(worker_id, "ROWS pixel count " + std::to_string(rows->pixels.size()) +
                                               ", expected " + std::to_string(expect));

                std::lock_guard<std::mutex> lock(image_mutex);
                for (std::uint32_t r = 0; r < rows->row_count; ++r) {
                    const std::uint32_t y = rows->row_start + r;
                    if (row_seen[y]) fail_worker(worker_id, "duplicate row " + std::to_string(y));
                    row_seen[y] = 1;
                    std::copy_n(rows->pixels.data() + static_cast<std::size_t>(r) * width * 3,
                                static_cast<std::size_t>(width) * 3, image.pixel(0, static_cast<int>(y)));
                }
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
        }
    };

    std::vector<std::thread> readers;
    readers.reserve(workers.size());
    for (std::size_t i = 0; i < workers.size(); ++i) readers.emplace_back(service_worker, i);
    for (std::thread& t : readers) t.join();

    if (first_error) std::rethrow_exception(first_error);
    for (int y = 0; y < height; ++y)
        if (!row_seen[y])
            throw ProtocolError("render incomplete: row " + std::to_string(y) + " never arrived");
    return image;
}

void run_worker(ByteStream& stream, int threads) {
    const auto report = [&stream](std::uint32_t code, const std::string& text) {
        try {
            write_frame(stream, ErrorMsg{code, text});
        } catch (...) {
            // Coordinator already gone; the original error still propagates.
        }
    };

    try {
        write_frame(stream, HelloMsg{});
        const Message hello = read_frame(stream);
        const auto* h = std::get_if<HelloMsg>(&hello);
        if (h == nullptr) throw ProtocolError("expected HELLO from coordinator");
        if (h->version != kProtocolVersion)
            throw ProtocolError("unsupported coordinator version " + std::to_string(h->version));

        const Message job_msg = read_frame(stream);
        const auto* job = std::get_if<JobMsg>(&job_msg);
        if (job == nullptr) throw ProtocolError("expected JOB");

        const SceneConfig parsed = parse_scene(parse_kv(job->scene_text));
        const ImageBuffer background = load_ppm(job->background_ppm);
        SceneConfig scene = parsed;
        scene.background = &background;
        validate_scene(scene);

        const BandAssignment band = job->band;
        if (band.row_start < 0 || band.row_end > scene.camera.height ||
            band.row_start > band.row_end)
            throw ProtocolError("JOB band outside image bounds");

        const std::vector<std::uint8_t> pixels =
            render_rows(scene, band.row_start, band.row_end, threads);

        const std::size_t row_bytes = static_cast<std::size_t>(scene.camera.width) * 3;
        int row = band.row_start;
        while (row < band.row_end) {
            const std::uint32_t count =
                std::min<std::uint32_t>(kMaxRowsPerChunk, static_cast<std::uint32_t>(band.row_end - row));
            const std::size_t offset = static_cast<std::size_t>(row - band.row_start) * row_bytes;
            RowsMsg rows{static_cast<std::uint32_t>(row), count,
                         {pixels.begin() + static_cast<std::ptrdiff_t>(offset),
                          pixels.begin() + static_cast<std::ptrdiff_t>(offset + count * row_bytes)}};
            write_frame(stream, rows);
            row += static_cast<int>(count);
        }
        write_frame(stream, DoneMsg{});
    } catch (const ProtocolError& e) {
        report(kErrProtocol, e.what());
        throw;
    } catch (const NumericalError& e) {
        report(kErrNumerical, e.what());
        throw;
    } catch (const std::exception& e) {
        report(kErrIo, e.what());
        throw;
    }
}

}  // namespace bhrt
