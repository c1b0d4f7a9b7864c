#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "trinket/common/file_io.hpp"
#include "trinket/imgcore/gray_image.hpp"

namespace trinket::img {

// PNG (any bit depth / colour type, converted to luma) and binary PGM (P5).
// Errors surface as Error{BadImage} for malformed input, IoError for file access.

GrayImage decode_image(std::span<const std::uint8_t> bytes);
GrayImage read_image(const std::filesystem::path& path);

std::vector<std::uint8_t> encode_pgm(const GrayImage& img);
std::vector<std::uint8_t> encode_png(const GrayImage& img);
void write_pgm(const GrayImage& img, const std::filesystem::path& path);
void write_png(const GrayImage& img, const std::filesystem::path& path);


}  // namespace trinket::img
