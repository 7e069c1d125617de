#pragma once

#include <filesystem>

#include "voidd/image.hpp"

namespace voidd {

struct PgmHeader {
    int width = 0;
    int height = 0;
    int maxval = 0;
    std::size_t data_offset = 0;
};

/// Binary PGM (P5), maxval 255 or 65535. 16-bit samples are big-endian.
/// Malformed input raises a format-error that carries the byte offset.
GrayImage read_pgm(const std::filesystem::path& path);
PgmHeader read_pgm_header(const std::filesystem::path& path);
void write_pgm(const GrayImage& img, const std::filesystem::path& path);

GrayImage decode_pgm(std::string_view bytes);
std::string encode_pgm(const GrayImage& img);

}  // namespace voidd
