#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "kgbox/grid.hpp"

namespace kgbox {

// KGTEN layout:
//   "KGTEN\n"
//   "dtype=f32 order=chw c=<C> h=<H> w=<W>\n"
//   C*H*W little-endian float32, channel-major then row-major. No trailing bytes.
std::string encode_tensor(const ChannelGrid& grid);
ChannelGrid decode_tensor(std::string_view bytes);

ChannelGrid read_tensor(const std::filesystem::path& path);
void write_tensor(const ChannelGrid& grid, const std::filesystem::path& path);

// Writes through a sibling temp file and renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);
std::string read_file(const std::filesystem::path& path);

}  // namespace kgbox
