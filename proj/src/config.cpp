#include "bhrt/config.hpp"

#include <charconv>
#include <cstdlib>
#include <sstream>

namespace bhrt {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

const std::string& require(const KvMap& kv, const std::string& key) {
    const auto it = kv.find(key);
    if (it == kv.end()) throw UsageError("scene config: missing key '" + key + "'");
    return it->second;
}

}  // namespace

KvMap parse_kv(std::string_view text) {
    KvMap out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = std::min(text.find('\n', pos), text.size());
        std::string_view line = trim(text.substr(pos, eol - pos));
        pos = eol + 1;
        if (line.empty() || line.front() == '#') continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos)
            throw UsageError("config: expected key=value, got '" + std::string(line) + "'");
        const std::string_view key = trim(line.substr(0, eq));
        const std::string_view value = trim(line.substr(eq + 1));
        if (key.empty()) throw UsageError("config: empty key in '" + std::string(line) + "'");
        out[std::string(key)] = std::string(value);
    }
    return out;
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string format_vec3(const Vec3& v) {
    return format_double(v.x) + "," + format_double(v.y) + "," + format_double(v.z);
}

double parse_double(const std::string& value, const std::string& key) {
    double out = 0.0;
    const char* begin = value.c_str();
    const char* end = begin + value.size();
    const auto res = std::from_chars(begin, end, out);
    if (res.ec != std::errc() || res.ptr != end)
        throw UsageError("invalid " + key + ": '" + value + "' is not a number");
    return out;
}

std::int64_t parse_int(const std::string& value, const std::string& key) {
    std::int64_t out = 0;
    const char* begin = value.c_str();
    const char* end = begin + value.size();
    const auto res = std::from_chars(begin, end, out);
    if (res.ec != std::errc() || res.ptr != end)
        throw UsageError("invalid " + key + ": '" + value + "' is not an integer");
    return out;
}

std::uint64_t parse_uint64(const std::string& value, const std::string& key) {
    std::uint64_t out = 0;
    const char* begin = value.c_str();
    const char* end = begin + value.size();
    const auto res = std::from_chars(begin, end, out);
    if (res.ec != std::errc() || res.ptr != end)
        throw UsageError("invalid " + key + ": '" + value + "' is not an unsigned integer");
    return out;
}

Vec3 parse_vec3(const std::string& value, const std::string& key) {
    const std::size_t c1 = value.find(',');
    const std::size_t c2 = c1 == std::string::npos ? std::string::npos : value.find(',', c1 + 1);
    if (c2 == std::string::npos)
        throw UsageError("invalid " + key + ": expected 'x,y,z', got '" + value + "'");
    return {parse_double(value.substr(0, c1), key),
            parse_double(value.substr(c1 + 1, c2 - c1 - 1), key),
            parse_double(value.substr(c2 + 1), key)};
}

std::string serialize_scene(const SceneConfig& scene) {
    std::ostringstream out;
    out << "mass=" << format_double(scene.hole.mass) << "\n";
    out << "center=" << format_vec3(scene.hole.center) << "\n";
    out << "cam-pos=" << format_vec3(scene.camera.position) << "\n";
    out << "look-at=" << format_vec3(scene.camera.look_at) << "\n";
    out << "fov-rad=" << format_double(scene.camera.vertical_fov) << "\n";
    out << "width=" << scene.camera.width << "\n";
    out << "height=" << scene.camera.height << "\n";
    out << "spp=" << scene.samples.spp << "\n";
    out << "seed=" << scene.samples.seed << "\n";
    out << "epsilon=" << format_double(scene.trace.epsilon) << "\n";
    out << "escape-radius=" << format_double(scene.trace.escape_radius) << "\n";
    out << "max-windings=" << scene.trace.max_windings << "\n";
    out << "rel-tol=" << format_double(scene.trace.rel_tol) << "\n";
    out << "abs-tol=" << format_double(scene.trace.abs_tol) << "\n";
    return out.str();
}

SceneConfig parse_scene(const KvMap& kv) {
    SceneConfig scene;
    scene.hole.mass = parse_double(require(kv, "mass"), "mass");
    scene.hole.center = parse_vec3(require(kv, "center"), "center");
    scene.camera.position = parse_vec3(require(kv, "cam-pos"), "cam-pos");
    scene.camera.look_at = parse_vec3(require(kv, "look-at"), "look-at");
    scene.camera.vertical_fov = parse_double(require(kv, "fov-rad"), "fov-rad");
    scene.camera.width = static_cast<int>(parse_int(require(kv, "width"), "width"));
    scene.camera.height = static_cast<int>(parse_int(require(kv, "height"), "height"));
    scene.samples.spp = static_cast<int>(parse_int(require(kv, "spp"), "spp"));
    scene.samples.seed = parse_uint64(require(kv, "seed"), "seed");
    scene.trace.epsilon = parse_double(require(kv, "epsilon"), "epsilon");
    scene.trace.escape_radius = parse_double(require(kv, "escape-radius"), "escape-radius");
    scene.trace.max_windings = static_cast<int>(parse_int(require(kv, "max-windings"), "max-windings"));
    scene.trace.rel_tol = parse_double(require(kv, "rel-tol"), "rel-tol");
    scene.trace.abs_tol = parse_double(require(kv, "abs-tol"), "abs-tol");
    return scene;
}

}  // namespace bhrt
