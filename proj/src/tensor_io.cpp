#include "kgbox/tensor_io.hpp"

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <system_error>
#include <vector>

#include "kgbox/errors.hpp"

namespace kgbox {

namespace {

constexpr std::string_view kMagic = "KGTEN\n";

std::uint32_t to_little_endian(std::uint32_t v)
{
    if constexpr (std::endian::native == std::endian::big) {
        v = ((v & 0xFF000000u) >> 24) | ((v & 0x00FF0000u) >> 8) | ((v & 0x0000FF00u) << 8) |
            ((v & 0x000000FFu) << 24);
    }
    return v;
}

// Parses "<key>=<decimal>" and advances `text` past it and one trailing separator.
int parse_dimension(std::string_view& text, std::string_view key, char separator)
{
    if (text.substr(0, key.size()) != key || text.size() <= key.size() || text[key.size()] != '=') {
        throw FormatError("KGTEN header: expected '" + std::string(key) + "='");
    }
    text.remove_prefix(key.size() + 1);
    int value = 0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || end == text.data() || value < 1) {
        throw FormatError("KGTEN header: bad value for '" + std::string(key) + "'");
    }
    text.remove_prefix(static_cast<std::size_t>(end - text.data()));
    if (text.empty() || text.front() != separator) {
        throw FormatError("KGTEN header: malformed after '" + std::string(key) + "'");
    }
    text.remove_prefix(1);
    return value;
}

}  // namespace

std::string encode_tensor(const ChannelGrid& grid)
{
    std::string out(kMagic);
    out += "dtype=f32 order=chw c=" + std::to_string(grid.channels()) + " h=" + std::to_string(grid.height()) +
           " w=" + std::to_string(grid.width()) + "\n";
    const auto values = grid.data();
    const std::size_t header = out.size();
    out.resize(header + values.size() * 4);
    char* dst = out.data() + header;
    for (float v : values) {
        const std::uint32_t bits = to_little_endian(std::bit_cast<std::uint32_t>(v));
        std::memcpy(dst, &bits, 4);
        dst += 4;
    }
    return out;
}

ChannelGrid decode_tensor(std::string_view bytes)
{
    if (bytes.substr(0, kMagic.size()) != kMagic) {
        throw FormatError("KGTEN: bad magic");
    }
    bytes.remove_prefix(kMagic.size());

    constexpr std::string_view prefix = "dtype=f32 order=chw ";
    if (bytes.substr(0, prefix.size()) != prefix) {
        throw FormatError("KGTEN header: expected 'dtype=f32 order=chw'");
    }
    bytes.remove_prefix(prefix.size());
    const int c = parse_dimension(bytes, "c", ' ');
    const int h = parse_dimension(bytes, "h", ' ');
    const int w = parse_dimension(bytes, "w", '\n');

    const std::uint64_t count = static_cast<std::uint64_t>(c) * static_cast<std::uint64_t>(h) *
                                static_cast<std::uint64_t>(w);
    if (bytes.size() != count * 4) {
        throw TruncationError("KGTEN payload is " + std::to_string(bytes.size()) + " bytes, header declares " +
                              std::to_string(count * 4));
    }
    std::vector<float> data(count);
    const char* src = bytes.data();
    for (auto& v : data) {
        std::uint32_t bits = 0;
        std::memcpy(&bits, src, 4);
        v = std::bit_cast<float>(to_little_endian(bits));
        src += 4;
    }
    return ChannelGrid(c, GridShape{h, w}, std::move(data));
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "' for reading");
    }
    std::string contents((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) {
        throw IoError("read failed for '" + path.string() + "'");
    }
    return contents;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents)
{
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError("cannot open '" + tmp.string() + "' for writing");
        }
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!out) {
            throw IoError("write failed for '" + tmp.string() + "'");
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("cannot move temp file onto '" + path.string() + "'");
    }
}

ChannelGrid read_tensor(const std::filesystem::path& path)
{
    const std::string bytes = read_file(path);
    try {
        return decode_tensor(bytes);
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    } catch (const TruncationError& e) {
        throw TruncationError(path.string() + ": " + e.what());
    } catch (const ValidationError& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

void write_tensor(const ChannelGrid& grid, const std::filesystem::path& path)
{
    write_file_atomic(path, encode_tensor(grid));
}

}  // namespace kgbox
