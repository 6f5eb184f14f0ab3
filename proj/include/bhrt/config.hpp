#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>

#include "bhrt/render.hpp"

namespace bhrt {

/// Flat key=value text: one pair per line, '#' comments, blank lines
/// ignored, later keys win. Used both for --config files and for the
/// scene payload inside JOB messages.
using KvMap = std::map<std::string, std::string>;

KvMap parse_kv(std::string_view text);

/// Shortest decimal that parses back to the identical double.
std::string format_double(double v);
std::string format_vec3(const Vec3& v);

double parse_double(const std::string& value, const std::string& key);
std::int64_t parse_int(const std::string& value, const std::string& key);
std::uint64_t parse_uint64(const std::string& value, const std::string& key);
Vec3 parse_vec3(const std::string& value, const std::string& key);

/// Scene fields (background excluded) as key=value text. All floating
/// point values round-trip bit-exactly through parse_scene.
std::string serialize_scene(const SceneConfig& scene);

/// Inverse of serialize_scene; the background pointer is left null.
/// Throws UsageError on missing or invalid keys.
SceneConfig parse_scene(const KvMap& kv);

}  // namespace bhrt
