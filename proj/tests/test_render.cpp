#include <doctest.h>

#include <cmath>
#include <random>

#include "bhrt/render.hpp"
#include "test_util.hpp"

using namespace bhrt;

TEST_CASE("make_bands splits rows as specified") {
    const auto bands = make_bands(10, 3);
    REQUIRE(bands.size() == 3);
    CHECK(bands[0] == BandAssignment{0, 0, 4});
    CHECK(bands[1] == BandAssignment{1, 4, 7});
    CHECK(bands[2] == BandAssignment{2, 7, 10});

    const auto one = make_bands(4, 1);
    REQUIRE(one.size() == 1);
    CHECK(one[0] == BandAssignment{0, 0, 4});

    const auto degenerate = make_bands(2, 5);
    REQUIRE(degenerate.size() == 2);
    CHECK(degenerate[0] == BandAssignment{0, 0, 1});
    CHECK(degenerate[1] == BandAssignment{1, 1, 2});
}

TEST_CASE("make_bands is a disjoint exact cover for any sizes") {
    std::mt19937_64 rng(4242);
    for (int i = 0; i < 300; ++i) {
        const int height = 1 + static_cast<int>(rng() % 10000);
        const int workers = 1 + static_cast<int>(rng() % 10000);
        const auto bands = make_bands(height, workers);
        REQUIRE(bands.size() == static_cast<std::size_t>(std::min(height, workers)));
        int expect_row = 0;
        int max_rows = 0, min_rows = height + 1;
        for (std::size_t k = 0; k < bands.size(); ++k) {
            CHECK(bands[k].worker_id == static_cast<int>(k));
            CHECK(bands[k].row_start == expect_row);  // contiguous, disjoint
            CHECK(bands[k].rows() >= 1);
            expect_row = bands[k].row_end;
            max_rows = std::max(max_rows, bands[k].rows());
            min_rows = std::min(min_rows, bands[k].rows());
        }
        CHECK(expect_row == height);  // exact cover
        CHECK(max_rows - min_rows <= 1);
    }
}

TEST_CASE("flat-space pixels equal the direct background projection") {
    const ImageBuffer bg = testutil::gradient_background();
    SceneConfig scene = testutil::small_scene(&bg, 8, 0.0);
    for (int py = 0; py < 8; ++py) {
        for (int px = 0; px < 8; ++px) {
            const auto shaded = shade_pixel(scene, px, py);
            const Ray ray = generate_ray(scene.camera, px, py, 0, scene.samples);
            const Rgb c = sample_direction(bg, ray.dir);
            const auto want_r = std::lround(c.r * 255.0);
            const auto want_g = std::lround(c.g * 255.0);
            const auto want_b = std::lround(c.b * 255.0);
            CHECK(std::abs(shaded[0] - want_r) <= 1);
            CHECK(std::abs(shaded[1] - want_g) <= 1);
            CHECK(std::abs(shaded[2] - want_b) <= 1);
        }
    }
}

TEST_CASE("a ray aimed dead-center at the hole shades black") {
    const ImageBuffer bg = testutil::uniform_background(200, 200, 200);
    SceneConfig scene = testutil::small_scene(&bg, 9);  // odd size: center pixel is radial
    const auto c = shade_pixel(scene, 4, 4);
    CHECK(c[0] == 0);
    CHECK(c[1] == 0);
    CHECK(c[2] == 0);
}

TEST_CASE("black-disk radius tracks the critical impact parameter") {
    const ImageBuffer bg = testutil::uniform_background(60, 120, 200);
    SceneConfig scene;
    scene.hole = {1.0, {}};
    scene.camera = {{0, 0, -1000}, {0, 0, 0}, 0.032, 32, 32};
    scene.samples = {1, 1};
    scene.trace = {2.0, 4000.0, 10, 1e-10, 1e-12};
    scene.background = &bg;

    const ImageBuffer img = render_image(scene, 2);
    int black = 0;
    for (int y = 0; y < 32; ++y)
        for (int x = 0; x < 32; ++x) {
            const std::uint8_t* p = img.pixel(x, y);
            if (p[0] == 0 && p[1] == 0 && p[2] == 0) ++black;
        }
    const double pitch = 2.0 * std::tan(0.016) / 32.0;
    const double measured = std::sqrt(black / std::numbers::pi) * pitch;
    const double predicted = 3.0 * std::sqrt(3.0) / 1000.0;
    CHECK(std::abs(measured - predicted) / predicted < 0.10);
}

TEST_CASE("render_band equals the matching slice of the full render") {
    const ImageBuffer bg = testutil::gradient_background();
    SceneConfig scene = testutil::small_scene(&bg, 4);
    const ImageBuffer full = render_image(scene, 1);

    const auto band0 = render_band(scene, {0, 0, 1});
    REQUIRE(band0.size() == 4 * 3);
    CHECK(std::equal(band0.begin(), band0.end(), full.bytes().begin()));

    // Concatenation of all bands reproduces the image.
    std::vector<std::uint8_t> assembled;
    for (const BandAssignment& band : make_bands(4, 3)) {
        const auto rows = render_band(scene, band);
        assembled.insert(assembled.end(), rows.begin(), rows.end());
    }
    CHECK(assembled == full.bytes());

    // Same band twice renders identical bytes.
    CHECK(render_band(scene, {0, 1, 3}) == render_band(scene, {0, 1, 3}));
}

TEST_CASE("render_image is byte-identical across thread counts") {
    const ImageBuffer bg = testutil::gradient_background();
    SceneConfig scene = testutil::small_scene(&bg, 16);
    scene.samples = {2, 99};
    const ImageBuffer base = render_image(scene, 1);
    for (const int threads : {2, 4, 8}) {
        const ImageBuffer img = render_image(scene, threads);
        CHECK(img == base);
    }
}

TEST_CASE("flat-space full render equals the projection render") {
    const ImageBuffer bg = testutil::gradient_background();
    SceneConfig scene = testutil::small_scene(&bg, 12, 0.0);
    const ImageBuffer rendered = render_image(scene, 2);
    for (int py = 0; py < 12; ++py)
        for (int px = 0; px < 12; ++px) {
            const Ray ray = generate_ray(scene.camera, px, py, 0, scene.samples);
            const Rgb c = sample_direction(bg, ray.dir);
            const std::uint8_t* got = rendered.pixel(px, py);
            CHECK(std::abs(got[0] - std::lround(c.r * 255.0)) <= 1);
            CHECK(std::abs(got[1] - std::lround(c.g * 255.0)) <= 1);
            CHECK(std::abs(got[2] - std::lround(c.b * 255.0)) <= 1);
        }
}

TEST_CASE("trace failures surface as RenderError with pixel coordinates") {
    const ImageBuffer bg = testutil::gradient_background();
    SceneConfig scene = testutil::small_scene(&bg, 4, 0.0);
    // Unreachable tolerance forces the adaptive step below the floor.
    scene.trace.rel_tol = 1e-300;
    scene.trace.abs_tol = 1e-300;
    try {
        shade_pixel(scene, 2, 3);
        FAIL("expected RenderError");
    } catch (const RenderError& e) {
        CHECK(e.px == 2);
        CHECK(e.py == 3);
        CHECK(std::string(e.what()).find("pixel (2, 3)") != std::string::npos);
    }
    CHECK_THROWS_AS(render_image(scene, 2), RenderError);
}

TEST_CASE("scene validation rejects a camera inside the horizon") {
    const ImageBuffer bg = testutil::gradient_background();
    SceneConfig scene = testutil::small_scene(&bg, 4);
    scene.camera.position = {0.0, 0.0, -1.5};
    CHECK_THROWS_AS(validate_scene(scene), UsageError);

    SceneConfig no_bg = testutil::small_scene(nullptr, 4);
    CHECK_THROWS_AS(validate_scene(no_bg), UsageError);
}

TEST_CASE("averaging uses half-away-from-zero 8-bit rounding") {
    // Two-texel background alternating 100/101 and spp high enough that the
    // mean lands between integers; check the rounded value is stable.
    const ImageBuffer bg = testutil::uniform_background(100, 100, 100);
    SceneConfig scene = testutil::small_scene(&bg, 3, 0.0);
    scene.samples = {4, 3};
    const auto c = shade_pixel(scene, 1, 1);
    CHECK(c[0] == 100);
    CHECK(c[1] == 100);
    CHECK(c[2] == 100);
}
