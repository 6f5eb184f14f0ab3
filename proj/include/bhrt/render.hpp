#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "bhrt/camera.hpp"
#include "bhrt/errors.hpp"
#include "bhrt/geodesic.hpp"
#include "bhrt/image.hpp"

namespace bhrt {

/// Everything needed to shade one pixel. The background buffer is borrowed
/// and must outlive the scene; it stays immutable for the whole render.
struct SceneConfig {
    BlackHole hole;
    Camera camera;
    SampleSpec samples;
    TraceConfig trace;
    const ImageBuffer* background = nullptr;
};

/// Validates cross-field invariants (camera strictly outside the horizon,
/// background present). Throws UsageError.
void validate_scene(const SceneConfig& scene);

/// Contiguous scanline range [row_start, row_end) owned by one worker.
struct BandAssignment {
    int worker_id = 0;
    int row_start = 0;
    int row_end = 0;

    int rows() const { return row_end - row_start; }
    bool operator==(const BandAssignment&) const = default;
};

/// Trace failure with the pixel it happened at.
struct RenderError : NumericalError {
    int px;
    int py;

    RenderError(int x, int y, const std::string& what)
        : NumericalError("pixel (" + std::to_string(x) + ", " + std::to_string(y) + "): " + what),
          px(x),
          py(y) {}
};

/// Averages the pixel's spp traced samples: captured and stalled rays are
/// black, escaped rays fetch the background along their asymptotic
/// direction. The mean is rounded half-away-from-zero to 8 bits.
std::array<std::uint8_t, 3> shade_pixel(const SceneConfig& scene, int px, int py);

/// Splits `height` rows into at most `workers` contiguous bands: the first
/// height%n bands get the extra row. Disjoint exact cover of [0, height).
std::vector<BandAssignment> make_bands(int height, int workers);

/// Pixel bytes for rows [row_start, row_end), rendered with a dynamic row
/// queue over `threads` workers. Output depends only on the scene.
std::vector<std::uint8_t> render_rows(const SceneConfig& scene, int row_start, int row_end,
                                      int threads);

std::vector<std::uint8_t> render_band(const SceneConfig& scene, const BandAssignment& band);

/// Full-frame render; byte-identical for every thread count >= 1.
ImageBuffer render_image(const SceneConfig& scene, int threads);

}  // namespace bhrt
