#include "bhrt/render.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace bhrt {

void validate_scene(const SceneConfig& scene) {
    if (scene.background == nullptr) throw UsageError("scene: background image is required");
    if (scene.camera.width < 1 || scene.camera.height < 1)
        throw UsageError("scene: image dimensions must be >= 1");
    if (scene.samples.spp < 1) throw UsageError("scene: spp must be >= 1");
    if (scene.hole.mass < 0.0) throw UsageError("scene: mass must be >= 0");
    const double d = distance(scene.camera.position, scene.hole.center);
    if (d <= scene.hole.schwarzschild_radius())
        throw UsageError("scene: camera must be outside the event horizon");
}

std::array<std::uint8_t, 3> shade_pixel(const SceneConfig& scene, int px, int py) {
    double acc_r = 0.0, acc_g = 0.0, acc_b = 0.0;
    try {
        for (int s = 0; s < scene.samples.spp; ++s) {
            const Ray ray = generate_ray(scene.camera, px, py, s, scene.samples);
            const RayPolyline poly = trace(ray.origin, ray.dir, scene.hole, scene.trace);
            if (poly.outcome.kind == TraceOutcome::Kind::Escaped) {
                const Rgb c = sample_direction(*scene.background, poly.outcome.escape_direction);
                acc_r += c.r;
                acc_g += c.g;
                acc_b += c.b;
            }
            // Captured and stalled rays contribute black.
        }
    } catch (const StepSizeUnderflow& e) {
        throw RenderError(px, py, e.what());
    } catch (const NumericalError& e) {
        throw RenderError(px, py, e.what());
    }

    const double inv = 1.0 / scene.samples.spp;
    const auto quantize = [inv](double v) {
        // Half-away-from-zero, pinned so golden images are platform-stable.
        const double scaled = std::round(v * inv * 255.0);
        return static_cast<std::uint8_t>(std::clamp(scaled, 0.0, 255.0));
    };
    return {quantize(acc_r), quantize(acc_g), quantize(acc_b)};
}

std::vector<BandAssignment> make_bands(int height, int workers) {
    if (height < 1 || workers < 1)
        throw std::invalid_argument("make_bands: height and workers must be >= 1");
    const int n = std::min(height, workers);
    const int base = height / n;
    const int extra = height % n;
    std::vector<BandAssignment> bands;
    bands.reserve(static_cast<std::size_t>(n));
    int row = 0;
    for (int i = 0; i < n; ++i) {
        const int rows = base + (i < extra ? 1 : 0);
        bands.push_back({i, row, row + rows});
        row += rows;
    }
    return bands;
}

std::vector<std::uint8_t> render_rows(const SceneConfig& scene, int row_start, int row_end,
                                      int threads) {
    validate_scene(scene);
    if (threads < 1) throw std::invalid_argument("render: threads must be >= 1");
    if (row_start < 0 || row_end > scene.camera.height || row_start > row_end)
        throw std::invalid_argument("render: row range out of bounds");

    const int width = scene.camera.width;
    const int rows = row_end - row_start;
    std::vector<std::uint8_t> out(3 * static_cast<std::size_t>(rows) * width);
    if (rows == 0) return out;

    // Dynamic row queue; determinism comes from pixels being pure
    // functions of the scene, not from scheduling order.
    std::atomic<int> next{row_start};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    const auto worker = [&] {
        try {
            for (;;) {
                const int y = next.fetch_add(1);
                if (y >= row_end || failed.load()) return;
                std::uint8_t* row_out = out.data() + 3 * static_cast<std::size_t>(y - row_start) * width;
                for (int x = 0; x < width; ++x) {
                    const std::array<std::uint8_t, 3> c = shade_pixel(scene, x, y);
                    row_out[3 * x] = c[0];
                    row_out[3 * x + 1] = c[1];
                    row_out[3 * x + 2] = c[2];
                }
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
            failed.store(true);
        }
    };

    const int pool = std::min(threads, rows);
    if (pool == 1) {
        worker();
    } else {
        std::vector<std::thread> ts;
        ts.reserve(static_cast<std::size_t>(pool));
        for (int i = 0; i < pool; ++i) ts.emplace_back(worker);
        for (std::thread& t : ts) t.join();
    }

    if (first_error) std::rethrow_exception(first_error);
    return out;
}

std::vector<std::uint8_t> render_band(const SceneConfig& scene, const BandAssignment& band) {
    return render_rows(scene, band.row_start, band.row_end, 1);
}

ImageBuffer render_image(const SceneConfig& scene, int threads) {
    std::vector<std::uint8_t> pixels =
        render_rows(scene, 0, scene.camera.height, threads);
    return ImageBuffer(scene.camera.width, scene.camera.height, std::move(pixels));
}

}  // namespace bhrt
