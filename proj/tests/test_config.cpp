#include <doctest.h>

#include <cstring>

#include "bhrt/config.hpp"
#include "test_util.hpp"

using namespace bhrt;

TEST_CASE("parse_kv handles comments, blanks, and whitespace") {
    const KvMap kv = parse_kv(
        "# leading comment\n"
        "mass = 1.5\n"
        "\n"
        "  center=0,0,0  \n"
        "# another\n"
        "mass=2.5\n");  // later key wins
    CHECK(kv.at("mass") == "2.5");
    CHECK(kv.at("center") == "0,0,0");
    CHECK(kv.size() == 2);
}

TEST_CASE("parse_kv rejects lines without '='") {
    CHECK_THROWS_AS(parse_kv("mass\n"), UsageError);
    CHECK_THROWS_AS(parse_kv("=5\n"), UsageError);
}

TEST_CASE("format_double round-trips exactly") {
    for (const double v : {0.1, 1.0 / 3.0, 0.1 + 0.2, 1e-300, 12345.678901234567, -0.0, 5e-324}) {
        const std::string s = format_double(v);
        const double back = parse_double(s, "test");
        CHECK(std::memcmp(&back, &v, sizeof v) == 0);
    }
}

TEST_CASE("parse_double and parse_int reject junk naming the key") {
    CHECK_THROWS_WITH_AS(parse_double("abc", "--epsilon"),
                         "invalid --epsilon: 'abc' is not a number", UsageError);
    CHECK_THROWS_AS(parse_double("1.5x", "--epsilon"), UsageError);
    CHECK_THROWS_AS(parse_int("1.5", "--width"), UsageError);
    CHECK_THROWS_AS(parse_vec3("1,2", "--center"), UsageError);
}

TEST_CASE("scene serialization round-trips bit-exactly") {
    SceneConfig scene;
    scene.hole.mass = 1.0 / 3.0;
    scene.hole.center = {0.1 + 0.2, -7.25, 1e-9};
    scene.camera.position = {0.0, 1.0, -20.5};
    scene.camera.look_at = {0.25, 0.0, 0.125};
    scene.camera.vertical_fov = 60.0 * 3.14159265358979323846 / 180.0;
    scene.camera.width = 640;
    scene.camera.height = 480;
    scene.samples.spp = 7;
    scene.samples.seed = 18446744073709551615ULL;  // max u64
    scene.trace.epsilon = 0.05;
    scene.trace.escape_radius = 12345.6789;
    scene.trace.max_windings = 12;
    scene.trace.rel_tol = 1e-10;
    scene.trace.abs_tol = 1e-12;

    const std::string text = serialize_scene(scene);
    const SceneConfig back = parse_scene(parse_kv(text));

    const auto same = [](double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; };
    CHECK(same(back.hole.mass, scene.hole.mass));
    CHECK(same(back.hole.center.x, scene.hole.center.x));
    CHECK(same(back.hole.center.y, scene.hole.center.y));
    CHECK(same(back.hole.center.z, scene.hole.center.z));
    CHECK(same(back.camera.position.z, scene.camera.position.z));
    CHECK(same(back.camera.vertical_fov, scene.camera.vertical_fov));
    CHECK(back.camera.width == scene.camera.width);
    CHECK(back.camera.height == scene.camera.height);
    CHECK(back.samples.spp == scene.samples.spp);
    CHECK(back.samples.seed == scene.samples.seed);
    CHECK(same(back.trace.epsilon, scene.trace.epsilon));
    CHECK(same(back.trace.escape_radius, scene.trace.escape_radius));
    CHECK(back.trace.max_windings == scene.trace.max_windings);
    CHECK(same(back.trace.rel_tol, scene.trace.rel_tol));
    CHECK(same(back.trace.abs_tol, scene.trace.abs_tol));
    CHECK(back.background == nullptr);

    // Serialization is stable: a second round trip emits identical text.
    SceneConfig again = back;
    CHECK(serialize_scene(again) == text);
}

TEST_CASE("parse_scene reports missing keys") {
    KvMap kv = parse_kv("mass=1\n");
    CHECK_THROWS_AS(parse_scene(kv), UsageError);
}
