#pragma once

#include <cstdint>

#include "bhrt/vec3.hpp"

namespace bhrt {

/// Pinhole camera. `vertical_fov` is in radians; the horizontal fov follows
/// from the aspect ratio. World-up is fixed at (0,1,0); orientations with
/// the view axis parallel to world-up are rejected.
struct Camera {
    Vec3 position;
    Vec3 look_at;
    double vertical_fov = 1.0;
    int width = 1;
    int height = 1;
};

struct CameraBasis {
    Vec3 forward;
    Vec3 right;
    Vec3 up;
};

/// Antialiasing sample layout. spp == 1 always samples the exact pixel
/// center; spp > 1 jitters with a stateless counter-based hash so sample
/// positions are independent of how the image is partitioned across
/// workers.
struct SampleSpec {
    int spp = 1;
    std::uint64_t seed = 0;
};

struct Ray {
    Vec3 origin;
    Vec3 dir;  // unit
};

/// Right-handed orthonormal basis; throws std::invalid_argument for a
/// degenerate orientation (look_at == position, or view axis parallel to
/// world-up within 1e-9).
CameraBasis camera_basis(const Camera& cam);

/// Direction through normalized image coordinates (u, v) in [0, 1]^2,
/// v = 0 at the TOP image row.
Vec3 ray_direction(const Camera& cam, const CameraBasis& basis, double u, double v);

/// Ray through pixel (px, py) for antialiasing sample `sample`.
Ray generate_ray(const Camera& cam, int px, int py, int sample, const SampleSpec& spec);

/// Stateless 64-bit mixer used for sample jitter.
std::uint64_t hash_counter(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c);

}  // namespace bhrt
