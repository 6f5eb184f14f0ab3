#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bhrt/errors.hpp"
#include "bhrt/vec3.hpp"

namespace bhrt {

struct MalformedHeader : IoError {
    using IoError::IoError;
};
struct UnsupportedMaxval : IoError {
    using IoError::IoError;
};
struct TruncatedPixelData : IoError {
    using IoError::IoError;
};

/// Linear RGB with channels in [0, 1].
struct Rgb {
    double r = 0.0;
    double g = 0.0;
    double b = 0.0;
};

/// Row-major 8-bit RGB image; row 0 is the top of the image.
class ImageBuffer {
public:
    ImageBuffer(int width, int height);
    ImageBuffer(int width, int height, std::vector<std::uint8_t> pixels);

    int width() const { return width_; }
    int height() const { return height_; }

    const std::uint8_t* pixel(int x, int y) const {
        return data_.data() + 3 * (static_cast<std::size_t>(y) * width_ + x);
    }
    std::uint8_t* pixel(int x, int y) {
        return data_.data() + 3 * (static_cast<std::size_t>(y) * width_ + x);
    }

    void set_pixel(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b);

    const std::vector<std::uint8_t>& bytes() const { return data_; }
    std::vector<std::uint8_t>& bytes() { return data_; }

    bool operator==(const ImageBuffer& o) const = default;

private:
    int width_;
    int height_;
    std::vector<std::uint8_t> data_;
};

/// Parses a binary ("P6") PPM with maxval 255. `#` comments are allowed in
/// the header. Throws MalformedHeader, UnsupportedMaxval or
/// TruncatedPixelData.
ImageBuffer load_ppm(std::span<const std::uint8_t> bytes);

/// Emits "P6\n{w} {h}\n255\n" followed by the raw pixel bytes.
/// load_ppm(save_ppm(x)) == x bit-exactly.
std::vector<std::uint8_t> save_ppm(const ImageBuffer& img);

ImageBuffer load_ppm_file(const std::string& path);
void save_ppm_file(const ImageBuffer& img, const std::string& path);

/// Samples the image as an equirectangular environment map along a unit
/// direction: bilinear filtering with horizontal wrap and vertical clamp,
/// channels scaled linearly to [0, 1].
Rgb sample_direction(const ImageBuffer& img, const Vec3& dir);

}  // namespace bhrt
