#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace voidd {

/// Row-major intensity raster with 8- or 16-bit samples.
struct GrayImage {
    int width = 0;
    int height = 0;
    int bit_depth = 8;
    std::vector<std::uint16_t> pixels;

    GrayImage() = default;
    GrayImage(int w, int h, int depth = 8, std::uint16_t fill = 0);

    [[nodiscard]] std::size_t size() const noexcept { return pixels.size(); }
    [[nodiscard]] std::uint16_t max_value() const noexcept { return bit_depth == 8 ? 255 : 65535; }
    [[nodiscard]] std::uint16_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
    std::uint16_t& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }

    /// Throws invalid-argument on bad dimensions or out-of-range samples.
    void validate() const;

    friend bool operator==(const GrayImage&, const GrayImage&) = default;
};

struct BinaryMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bits;

    BinaryMask() = default;
    BinaryMask(int w, int h) : width(w), height(h), bits(static_cast<std::size_t>(w) * h, 0) {}

    [[nodiscard]] bool inside(int x, int y) const noexcept { return x >= 0 && y >= 0 && x < width && y < height; }
    [[nodiscard]] bool get(int x, int y) const noexcept { return inside(x, y) && bits[index(x, y)] != 0; }
    void set(int x, int y, bool v = true) { bits[index(x, y)] = v ? 1 : 0; }
    [[nodiscard]] std::size_t index(int x, int y) const noexcept { return static_cast<std::size_t>(y) * width + x; }
    [[nodiscard]] std::size_t count() const noexcept;

    friend bool operator==(const BinaryMask&, const BinaryMask&) = default;
};

/// Real-valued raster (filter responses, smoothed images).
struct RealImage {
    int width = 0;
    int height = 0;
    std::vector<double> values;

    RealImage() = default;
    RealImage(int w, int h, double fill = 0.0) : width(w), height(h), values(static_cast<std::size_t>(w) * h, fill) {}

    [[nodiscard]] double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
    double& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }
};

/// Separable Gaussian smoothing with mirrored borders; sigma <= 0 copies.
RealImage gaussian_smooth(const RealImage& img, double sigma);
RealImage to_real(const GrayImage& img);

/// Rounds and clamps into the given bit depth.
GrayImage to_gray(const RealImage& img, int bit_depth);

}  // namespace voidd
