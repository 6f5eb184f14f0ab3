#include "bhrt/image.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

namespace bhrt {

ImageBuffer::ImageBuffer(int width, int height) : width_(width), height_(height) {
    if (width < 1 || height < 1)
        throw std::invalid_argument("ImageBuffer: dimensions must be >= 1");
    data_.assign(3 * static_cast<std::size_t>(width) * height, 0);
}

ImageBuffer::ImageBuffer(int width, int height, std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), data_(std::move(pixels)) {
    if (width < 1 || height < 1)
        throw std::invalid_argument("ImageBuffer: dimensions must be >= 1");
    if (data_.size() != 3 * static_cast<std::size_t>(width) * height)
        throw std::invalid_argument("ImageBuffer: pixel count does not match dimensions");
}

void ImageBuffer::set_pixel(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    std::uint8_t* p = pixel(x, y);
    p[0] = r;
    p[1] = g;
    p[2] = b;
}

namespace {

// Header scanner: whitespace-separated tokens, '#' starts a comment that
// runs to end of line.
struct HeaderScanner {
    std::span<const std::uint8_t> bytes;
    std::size_t pos = 0;

    bool is_space(std::uint8_t c) const {
        return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' || c == '\f';
    }

    void skip_space_and_comments() {
        while (pos < bytes.size()) {
            if (is_space(bytes[pos])) {
                ++pos;
            } else if (bytes[pos] == '#') {
                while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
            } else {
                break;
            }
        }
    }

    std::string next_token() {
        skip_space_and_comments();
        std::string tok;
        while (pos < bytes.size() && !is_space(bytes[pos]) && bytes[pos] != '#')
            tok.push_back(static_cast<char>(bytes[pos++]));
        return tok;
    }
};

int parse_header_int(const std::string& tok, const char* what) {
    if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos)
        throw MalformedHeader(std::string("PPM: bad ") + what + " field '" + tok + "'");
    long v = std::strtol(tok.c_str(), nullptr, 10);
    if (v < 0 || v > 1 << 20)
        throw MalformedHeader(std::string("PPM: ") + what + " out of range: " + tok);
    return static_cast<int>(v);
}

}  // namespace

ImageBuffer load_ppm(std::span<const std::uint8_t> bytes) {
    HeaderScanner sc{bytes};
    const std::string magic = sc.next_token();
    if (magic != "P6")
        throw MalformedHeader("PPM: expected magic 'P6', got '" + magic + "'");

    const int width = parse_header_int(sc.next_token(), "width");
    const int height = parse_header_int(sc.next_token(), "height");
    if (width < 1 || height < 1)
        throw MalformedHeader("PPM: dimensions must be >= 1");

    const std::string maxval_tok = sc.next_token();
    const int maxval = parse_header_int(maxval_tok, "maxval");
    if (maxval != 255)
        throw UnsupportedMaxval("PPM: unsupported maxval " + maxval_tok + " (only 255)");

    // Exactly one whitespace byte separates the header from the pixel data.
    if (sc.pos >= bytes.size() || !sc.is_space(bytes[sc.pos]))
        throw MalformedHeader("PPM: missing whitespace after maxval");
    ++sc.pos;

    const std::size_t need = 3 * static_cast<std::size_t>(width) * height;
    if (bytes.size() - sc.pos < need)
        throw TruncatedPixelData("PPM: expected " + std::to_string(need) + " pixel bytes, got " +
                                 std::to_string(bytes.size() - sc.pos));

    std::vector<std::uint8_t> pixels(bytes.begin() + static_cast<std::ptrdiff_t>(sc.pos),
                                     bytes.begin() + static_cast<std::ptrdiff_t>(sc.pos + need));
    return ImageBuffer(width, height, std::move(pixels));
}

std::vector<std::uint8_t> save_ppm(const ImageBuffer& img) {
    char header[64];
    const int n = std::snprintf(header, sizeof header, "P6\n%d %d\n255\n", img.width(), img.height());
    std::vector<std::uint8_t> out(header, header + n);
    out.insert(out.end(), img.bytes().begin(), img.bytes().end());
    return out;
}

ImageBuffer load_ppm_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return load_ppm(bytes);
}

void save_ppm_file(const ImageBuffer& img, const std::string& path) {
    const std::vector<std::uint8_t> bytes = save_ppm(img);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed for '" + path + "'");
}

Rgb sample_direction(const ImageBuffer& img, const Vec3& dir) {
    constexpr double pi = std::numbers::pi;
    const double u_tex = (std::atan2(dir.z, dir.x) + pi) / (2.0 * pi);
    const double v_tex = (pi / 2.0 - std::asin(std::clamp(dir.y, -1.0, 1.0))) / pi;

    const int w = img.width();
    const int h = img.height();

    const double x = u_tex * w - 0.5;
    const double y = v_tex * h - 0.5;
    double fx = x - std::floor(x);
    double fy = y - std::floor(y);

    // Horizontal wrap, vertical clamp.
    const auto wrap = [w](int i) {
        i %= w;
        return i < 0 ? i + w : i;
    };
    const int x0 = wrap(static_cast<int>(std::floor(x)));
    const int x1 = wrap(static_cast<int>(std::floor(x)) + 1);
    const int y0 = std::clamp(static_cast<int>(std::floor(y)), 0, h - 1);
    const int y1 = std::clamp(static_cast<int>(std::floor(y)) + 1, 0, h - 1);

    const std::uint8_t* p00 = img.pixel(x0, y0);
    const std::uint8_t* p10 = img.pixel(x1, y0);
    const std::uint8_t* p01 = img.pixel(x0, y1);
    const std::uint8_t* p11 = img.pixel(x1, y1);

    const double w00 = (1.0 - fx) * (1.0 - fy);
    const double w10 = fx * (1.0 - fy);
    const double w01 = (1.0 - fx) * fy;
    const double w11 = fx * fy;

    Rgb out;
    out.r = (p00[0] * w00 + p10[0] * w10 + p01[0] * w01 + p11[0] * w11) / 255.0;
    out.g = (p00[1] * w00 + p10[1] * w10 + p01[1] * w01 + p11[1] * w11) / 255.0;
    out.b = (p00[2] * w00 + p10[2] * w10 + p01[2] * w01 + p11[2] * w11) / 255.0;
    return out;
}

}  // namespace bhrt
