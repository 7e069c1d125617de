#include "voidd/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "voidd/error.hpp"

namespace voidd {

GrayImage::GrayImage(int w, int h, int depth, std::uint16_t fill)
    : width(w), height(h), bit_depth(depth), pixels(static_cast<std::size_t>(std::max(w, 0)) * std::max(h, 0), fill) {}

void GrayImage::validate() const {
    if (width < 1 || height < 1) {
        throw_invalid_argument("image dimensions must be >= 1, got " + std::to_string(width) + "x" +
                               std::to_string(height));
    }
    if (bit_depth != 8 && bit_depth != 16) throw_invalid_argument("bit depth must be 8 or 16");
    if (pixels.size() != static_cast<std::size_t>(width) * height) {
        throw_invalid_argument("pixel buffer size does not match dimensions");
    }
    if (bit_depth == 8) {
        for (std::size_t i = 0; i < pixels.size(); ++i) {
            if (pixels[i] > 255) throw_invalid_argument("pixel " + std::to_string(i) + " exceeds 8-bit range");
        }
    }
}

std::size_t BinaryMask::count() const noexcept {
    return static_cast<std::size_t>(std::count_if(bits.begin(), bits.end(), [](std::uint8_t b) { return b != 0; }));
}

namespace {

std::vector<double> gaussian_kernel(double sigma) {
    const int radius = std::max(1, static_cast<int>(std::ceil(3.5 * sigma)));
    std::vector<double> k(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        k[i + radius] = std::exp(-0.5 * i * i / (sigma * sigma));
        sum += k[i + radius];
    }
    for (auto& v : k) v /= sum;
    return k;
}

inline int mirror(int i, int n) {
    if (n == 1) return 0;
    while (i < 0 || i >= n) {
        if (i < 0) i = -i - 1;
        if (i >= n) i = 2 * n - i - 1;
    }
    return i;
}

}  // namespace

RealImage gaussian_smooth(const RealImage& img, double sigma) {
    if (sigma <= 0.0) return img;
    const auto k = gaussian_kernel(sigma);
    const int r = static_cast<int>(k.size() / 2);
    RealImage tmp(img.width, img.height);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            double acc = 0.0;
            for (int i = -r; i <= r; ++i) acc += k[i + r] * img.at(mirror(x + i, img.width), y);
            tmp.at(x, y) = acc;
        }
    }
    RealImage out(img.width, img.height);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            double acc = 0.0;
            for (int i = -r; i <= r; ++i) acc += k[i + r] * tmp.at(x, mirror(y + i, img.height));
            out.at(x, y) = acc;
        }
    }
    return out;
}

RealImage to_real(const GrayImage& img) {
    RealImage out(img.width, img.height);
    std::transform(img.pixels.begin(), img.pixels.end(), out.values.begin(),
                   [](std::uint16_t v) { return static_cast<double>(v); });
    return out;
}

GrayImage to_gray(const RealImage& img, int bit_depth) {
    GrayImage out(img.width, img.height, bit_depth);
    const double hi = bit_depth == 8 ? 255.0 : 65535.0;
    std::transform(img.values.begin(), img.values.end(), out.pixels.begin(), [hi](double v) {
        return static_cast<std::uint16_t>(std::clamp(std::round(v), 0.0, hi));
    });
    return out;
}

}  // namespace voidd
