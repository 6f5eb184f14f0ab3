#include "bhrt/camera.hpp"

#include <cmath>
#include <stdexcept>

namespace bhrt {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Uniform in [0, 1) from the top 53 bits.
double to_unit(std::uint64_t h) { return static_cast<double>(h >> 11) * 0x1.0p-53; }

}  // namespace

std::uint64_t hash_counter(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ a);
    h = splitmix64(h ^ b);
    h = splitmix64(h ^ c);
    return h;
}

CameraBasis camera_basis(const Camera& cam) {
    const Vec3 axis = cam.look_at - cam.position;
    const double len = axis.norm();
    if (len == 0.0) throw std::invalid_argument("camera: look_at coincides with position");
    const Vec3 forward = axis / len;

    const Vec3 up_world{0.0, 1.0, 0.0};
    const Vec3 r = forward.cross(up_world);
    if (r.norm() < 1e-9)
        throw std::invalid_argument("camera: view axis is parallel to world-up (0,1,0)");
    const Vec3 right = r.normalized();
    const Vec3 up = right.cross(forward);
    return {forward, right, up};
}

Vec3 ray_direction(const Camera& cam, const CameraBasis& basis, double u, double v) {
    const double tan_half_y = std::tan(cam.vertical_fov / 2.0);
    const double aspect = static_cast<double>(cam.width) / cam.height;
    const double tan_half_x = tan_half_y * aspect;
    const Vec3 d = basis.forward + (2.0 * u - 1.0) * tan_half_x * basis.right +
                   (1.0 - 2.0 * v) * tan_half_y * basis.up;
    return d.normalized();
}

Ray generate_ray(const Camera& cam, int px, int py, int sample, const SampleSpec& spec) {
    double sx = 0.5;
    double sy = 0.5;
    if (spec.spp > 1) {
        sx = to_unit(hash_counter(spec.seed, static_cast<std::uint64_t>(px),
                                  static_cast<std::uint64_t>(py),
                                  2 * static_cast<std::uint64_t>(sample)));
        sy = to_unit(hash_counter(spec.seed, static_cast<std::uint64_t>(px),
                                  static_cast<std::uint64_t>(py),
                                  2 * static_cast<std::uint64_t>(sample) + 1));
    }
    const double u = (px + sx) / cam.width;
    const double v = (py + sy) / cam.height;
    return {cam.position, ray_direction(cam, camera_basis(cam), u, v)};
}

}  // namespace bhrt
