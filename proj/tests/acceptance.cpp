// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failures. Built on the public library API plus real worker processes for
// the distributed criterion.

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "bhrt/bench.hpp"
#include "bhrt/config.hpp"
#include "bhrt/netrender.hpp"
#include "bhrt/protocol.hpp"
#include "bhrt/render.hpp"

using namespace bhrt;

namespace {

constexpr double kPi = std::numbers::pi;

struct Failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& detail) {
    if (!ok) throw Failure(detail);
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

ImageBuffer gradient_background(int w = 64, int h = 32) {
    ImageBuffer img(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            img.set_pixel(x, y, static_cast<std::uint8_t>(30 + (x * 200) / w),
                          static_cast<std::uint8_t>(30 + (y * 200) / h),
                          static_cast<std::uint8_t>(40 + ((x + y) * 150) / (w + h)));
    return img;
}

// Ray with impact parameter b launched inward from (r0, 0, 0).
Ray impact_ray(double b, double r0) {
    const double alpha = std::asin(b / r0);
    return {{r0, 0.0, 0.0}, {-std::cos(alpha), std::sin(alpha), 0.0}};
}

bool images_within_one_bit(const ImageBuffer& a, const ImageBuffer& b) {
    if (a.width() != b.width() || a.height() != b.height()) return false;
    for (std::size_t i = 0; i < a.bytes().size(); ++i)
        if (std::abs(int(a.bytes()[i]) - int(b.bytes()[i])) > 1) return false;
    return true;
}

// ---------------------------------------------------------------------------
// 1. Flat-space identity
void criterion_flat_space() {
    const ImageBuffer bg = gradient_background();
    SceneConfig scene;
    scene.hole = {0.0, {}};
    scene.camera = {{0, 0, -10}, {0, 0, 0}, 60.0 * kPi / 180.0, 64, 64};
    scene.samples = {1, 1};
    scene.trace = {0.05, default_escape_radius(0.0, 10.0), 10, 1e-10, 1e-12};
    scene.background = &bg;

    const ImageBuffer rendered = render_image(scene, 2);

    ImageBuffer direct(64, 64);
    for (int py = 0; py < 64; ++py)
        for (int px = 0; px < 64; ++px) {
            const Ray ray = generate_ray(scene.camera, px, py, 0, scene.samples);
            const Rgb c = sample_direction(bg, ray.dir);
            direct.set_pixel(px, py, static_cast<std::uint8_t>(std::lround(c.r * 255.0)),
                             static_cast<std::uint8_t>(std::lround(c.g * 255.0)),
                             static_cast<std::uint8_t>(std::lround(c.b * 255.0)));
        }

    require(images_within_one_bit(rendered, direct),
            "traced M=0 render differs from direct projection by more than 1 bit");
}

// ---------------------------------------------------------------------------
// 2. Critical impact parameter by bisection
void criterion_critical_b() {
    const BlackHole hole{1.0, {}};
    TraceConfig cfg;
    cfg.epsilon = 0.05;
    cfg.escape_radius = 1e4;

    const auto captured = [&](double b) {
        const Ray ray = impact_ray(b, 1000.0);
        const auto kind = trace(ray.origin, ray.dir, hole, cfg).outcome.kind;
        require(kind != TraceOutcome::Kind::Stalled, "unexpected stall at b=" + fmt(b));
        return kind == TraceOutcome::Kind::Captured;
    };

    double lo = 5.0, hi = 5.4;
    require(captured(lo), "b=5.0 should be captured");
    require(!captured(hi), "b=5.4 should escape");
    while (hi - lo > 2e-4) {
        const double mid = 0.5 * (lo + hi);
        (captured(mid) ? lo : hi) = mid;
    }
    const double b_c = 0.5 * (lo + hi);
    const double expected = 3.0 * std::sqrt(3.0);
    require(std::abs(b_c - expected) <= 1e-3,
            "bisected b_c=" + fmt(b_c) + " vs 3*sqrt(3)=" + fmt(expected));
}

// ---------------------------------------------------------------------------
// 3. Weak-field deflection
void criterion_weak_deflection() {
    const BlackHole hole{1.0, {}};
    TraceConfig cfg;
    cfg.epsilon = 0.05;
    cfg.escape_radius = 1e6;
    const double angle = deflection_angle(1000.0, hole, cfg);
    require(std::abs(angle - 4e-3) <= 0.005 * 4e-3,
            "deflection(b=1000) = " + fmt(angle) + ", expected 0.004 within 0.5%");
}

// ---------------------------------------------------------------------------
// 4. First-integral conservation over 100 random escaping rays
void criterion_energy_conservation() {
    const BlackHole hole{1.0, {}};
    TraceConfig cfg;
    cfg.epsilon = 0.1;
    cfg.escape_radius = 200.0;

    std::mt19937_64 rng(20260810);
    std::uniform_real_distribution<double> b_dist(6.0, 100.0);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const Ray ray = impact_ray(b_dist(rng), 200.0);
        GeodesicState s = initial_conditions(ray.origin, ray.dir, hole);
        const double e0 = conserved_energy(s, hole.mass);
        double hint = 0.0;
        while (!(s.u <= 1.0 / cfg.escape_radius && s.du_dphi < 0.0)) {
            require(s.phi < 2.0 * kPi * cfg.max_windings, "ray failed to escape");
            s = integrate_window(s, step_dphi(s, cfg), hole.mass, cfg, &hint);
            worst = std::max(worst, std::abs(conserved_energy(s, hole.mass) - e0) / std::abs(e0));
        }
    }
    require(worst <= 1e-8, "max relative energy drift " + fmt(worst) + " > 1e-8");
}

// ---------------------------------------------------------------------------
// 5. Shadow size at d = 1000M
void criterion_shadow_size() {
    const ImageBuffer bg = gradient_background(32, 16);  // no black texels
    const double fov = 0.032;
    SceneConfig scene;
    scene.hole = {1.0, {}};
    scene.camera = {{0, 0, -1000}, {0, 0, 0}, fov, 64, 64};
    scene.samples = {1, 1};
    scene.trace = {2.0, 4000.0, 10, 1e-10, 1e-12};
    scene.background = &bg;

    const ImageBuffer img = render_image(scene, 2);
    int black = 0;
    for (int y = 0; y < 64; ++y)
        for (int x = 0; x < 64; ++x) {
            const std::uint8_t* p = img.pixel(x, y);
            if (p[0] == 0 && p[1] == 0 && p[2] == 0) ++black;
        }

    const double pixel_angle = 2.0 * std::tan(fov / 2.0) / 64.0;
    const double measured = std::sqrt(black / kPi) * pixel_angle;
    const double predicted = 3.0 * std::sqrt(3.0) * 1.0 / 1000.0;  // theta_c = 3*sqrt(3)*M/d
    require(std::abs(measured - predicted) / predicted <= 0.05,
            "shadow radius " + fmt(measured) + " rad vs theta_c " + fmt(predicted) + " (" +
                std::to_string(black) + " black px)");
}

// ---------------------------------------------------------------------------
// Shared scene for criteria 6 and 7.
SceneConfig determinism_scene(const ImageBuffer* bg) {
    SceneConfig scene;
    scene.hole = {1.0, {}};
    scene.camera = {{0, 0, -20}, {0, 0, 0}, 60.0 * kPi / 180.0, 64, 64};
    scene.samples = {4, 77};
    scene.trace = {0.1, 60.0, 10, 1e-10, 1e-12};
    scene.background = bg;
    return scene;
}

// 6. Parallel determinism
void criterion_parallel_determinism() {
    const ImageBuffer bg = gradient_background();
    const SceneConfig scene = determinism_scene(&bg);
    const std::vector<std::uint8_t> reference = save_ppm(render_image(scene, 1));
    for (const int threads : {2, 4, 8}) {
        const std::vector<std::uint8_t> got = save_ppm(render_image(scene, threads));
        require(got == reference,
                "render with " + std::to_string(threads) + " threads differs from 1 thread");
    }
}

// 7. Distributed equivalence with real worker processes
void criterion_distributed_equivalence() {
    const ImageBuffer bg = gradient_background();
    SceneConfig scene = determinism_scene(&bg);
    scene.samples = {2, 77};
    const std::vector<std::uint8_t> reference = save_ppm(render_image(scene, 1));

    for (const int nworkers : {1, 2, 3}) {
        TcpListener listener("127.0.0.1", 0);
        const std::string port = std::to_string(listener.port());

        std::vector<pid_t> children;
        for (int i = 0; i < nworkers; ++i) {
            const pid_t pid = fork();
            require(pid >= 0, "fork failed");
            if (pid == 0) {
                const std::string endpoint = "127.0.0.1:" + port;
                execl(BHRT_BINARY, "bhrt", "worker", "--connect", endpoint.c_str(), "--threads",
                      "2", static_cast<char*>(nullptr));
                _exit(127);
            }
            children.push_back(pid);
        }

        std::vector<std::unique_ptr<FdStream>> streams;
        std::vector<ByteStream*> workers;
        for (int i = 0; i < nworkers; ++i) {
            streams.push_back(listener.accept());
            workers.push_back(streams.back().get());
        }

        const ImageBuffer img = run_coordinator(scene, workers);
        for (const pid_t pid : children) {
            int status = 0;
            waitpid(pid, &status, 0);
            require(WIFEXITED(status) && WEXITSTATUS(status) == 0,
                    "worker process exited with failure");
        }
        require(save_ppm(img) == reference,
                "coordinator image with " + std::to_string(nworkers) + " workers differs");
    }
}

// ---------------------------------------------------------------------------
// 8. Strong-scaling property + CSV
void criterion_strong_scaling() {
    const ImageBuffer bg = gradient_background();
    SceneConfig scene;
    scene.hole = {1.0, {}};
    scene.camera = {{0, 0, -20}, {0, 0, 0}, 60.0 * kPi / 180.0, 512, 512};
    scene.samples = {2, 9};
    scene.trace = {0.5, 100.0, 10, 1e-10, 1e-12};
    scene.background = &bg;

    const auto records = run_strong_scaling(scene, {1, 2, 4}, 2);
    const auto parsed = parse_csv(emit_csv(records));
    require(parsed.size() == records.size() + 3, "CSV row count mismatch");

    const double t1 = mean_wall_seconds(parsed, 1);
    const double t2 = mean_wall_seconds(parsed, 2);
    const double t4 = mean_wall_seconds(parsed, 4);
    const unsigned cores = std::thread::hardware_concurrency();
    std::printf("      speedup curve: S(2)=%.2f S(4)=%.2f on %u cores\n", t1 / t2, t1 / t4, cores);

    if (cores >= 4) {
        require(t1 / t4 >= 2.5, "speedup on 4 threads = " + fmt(t1 / t4) + " < 2.5");
    } else {
        // The 4-thread clause is scoped to >=4-core hosts; on this host the
        // curve is still required to be sane.
        require(t1 / t4 > 1.2, "no measurable speedup on " + std::to_string(cores) + " cores: " +
                                   fmt(t1 / t4));
    }
}

// ---------------------------------------------------------------------------
// 9. Einstein-ring symmetry
void criterion_ring_symmetry() {
    // Background uniform in longitude about the camera axis (+z).
    const int bw = 256, bh = 128;
    ImageBuffer bg(bw, bh);
    for (int y = 0; y < bh; ++y)
        for (int x = 0; x < bw; ++x) {
            const double u = (x + 0.5) / bw;
            const double v = (y + 0.5) / bh;
            const double lon = 2.0 * kPi * u - kPi;
            const double dir_z = std::sin(v * kPi) * std::sin(lon);
            const double angle = std::acos(std::clamp(dir_z, -1.0, 1.0));
            bg.set_pixel(x, y, static_cast<std::uint8_t>(40 + 215 * std::exp(-angle * angle / 0.02)),
                         static_cast<std::uint8_t>(30 + angle / kPi * 120), 90);
        }

    SceneConfig scene;
    scene.hole = {1.0, {}};
    scene.camera = {{0, 0, -15}, {0, 0, 0}, 60.0 * kPi / 180.0, 64, 64};
    scene.samples = {1, 1};
    scene.trace = {0.1, 60.0, 10, 1e-10, 1e-12};
    scene.background = &bg;

    const ImageBuffer img = render_image(scene, 2);
    // 90-degree rotation about the image center maps (x, y) -> (63-y, x).
    for (int y = 0; y < 64; ++y)
        for (int x = 0; x < 64; ++x) {
            const std::uint8_t* a = img.pixel(x, y);
            const std::uint8_t* b = img.pixel(63 - y, x);
            for (int c = 0; c < 3; ++c)
                require(std::abs(int(a[c]) - int(b[c])) <= 1,
                        "pixel (" + std::to_string(x) + "," + std::to_string(y) +
                            ") breaks 90-degree symmetry");
        }
}

// ---------------------------------------------------------------------------
// 10. Codec round-trips
void criterion_codec_roundtrips() {
    std::mt19937_64 rng(1234);
    const auto blob = [&rng](std::size_t max_len) {
        std::vector<std::uint8_t> out(rng() % (max_len + 1));
        for (auto& b : out) b = static_cast<std::uint8_t>(rng());
        return out;
    };

    for (int i = 0; i < 1000; ++i) {
        Message msg;
        switch (rng() % 5) {
            case 0: msg = HelloMsg{kProtocolVersion}; break;
            case 1: {
                JobMsg m;
                const auto text = blob(80);
                m.scene_text.assign(text.begin(), text.end());
                m.background_ppm = blob(200);
                m.band = {static_cast<int>(rng() % 128), static_cast<int>(rng() % 4096),
                          static_cast<int>(rng() % 4096)};
                msg = m;
                break;
            }
            case 2: {
                RowsMsg m;
                m.row_start = static_cast<std::uint32_t>(rng() % 100000);
                m.row_count = static_cast<std::uint32_t>(rng() % 512);
                m.pixels = blob(400);
                msg = m;
                break;
            }
            case 3: msg = DoneMsg{}; break;
            default: {
                ErrorMsg m;
                m.code = static_cast<std::uint32_t>(rng());
                const auto text = blob(60);
                m.text.assign(text.begin(), text.end());
                msg = m;
                break;
            }
        }
        require(decode_frame(encode_frame(msg)) == msg, "frame round-trip mismatch");
    }

    for (int i = 0; i < 1000; ++i) {
        const int w = 1 + static_cast<int>(rng() % 24);
        const int h = 1 + static_cast<int>(rng() % 24);
        ImageBuffer img(w, h);
        for (auto& b : img.bytes()) b = static_cast<std::uint8_t>(rng());
        require(load_ppm(save_ppm(img)) == img, "PPM round-trip mismatch");
    }
}

struct Criterion {
    int id;
    const char* name;
    std::function<void()> run;
    double time_limit;  // seconds; 0 = none
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "flat-space identity", criterion_flat_space, 5.0},
        {2, "critical impact parameter", criterion_critical_b, 30.0},
        {3, "weak-field deflection", criterion_weak_deflection, 5.0},
        {4, "first-integral conservation", criterion_energy_conservation, 0.0},
        {5, "shadow size", criterion_shadow_size, 0.0},
        {6, "parallel determinism", criterion_parallel_determinism, 0.0},
        {7, "distributed equivalence", criterion_distributed_equivalence, 0.0},
        {8, "strong-scaling property", criterion_strong_scaling, 600.0},
        {9, "einstein-ring symmetry", criterion_ring_symmetry, 0.0},
        {10, "protocol and PPM codecs", criterion_codec_roundtrips, 0.0},
    };

    int failures = 0;
    for (const Criterion& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        std::string detail;
        try {
            c.run();
        } catch (const std::exception& e) {
            detail = e.what();
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (detail.empty() && c.time_limit > 0.0 && elapsed > c.time_limit)
            detail = "exceeded time limit of " + fmt(c.time_limit) + " s";
        if (detail.empty()) {
            std::printf("PASS %2d  %-28s (%.2f s)\n", c.id, c.name, elapsed);
        } else {
            std::printf("FAIL %2d  %-28s (%.2f s): %s\n", c.id, c.name, elapsed, detail.c_str());
            ++failures;
        }
        std::fflush(stdout);
    }
    if (failures == 0)
        std::printf("all %zu acceptance criteria passed\n", criteria.size());
    else
        std::printf("%d acceptance criteria FAILED\n", failures);
    return failures;
}
