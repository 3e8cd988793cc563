#pragma once

// Little-endian primitive encoding shared by the SWT1, MSK1, MOS1 and QNT1
// containers.

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "drain/errors.hpp"

namespace drain::detail {

template <typename T>
T byteswap_if_needed(T value) noexcept
{
    static_assert(std::is_trivially_copyable_v<T>);
    if constexpr (std::endian::native == std::endian::little || sizeof(T) == 1) {
        return value;
    } else {
        unsigned char bytes[sizeof(T)];
        std::memcpy(bytes, &value, sizeof(T));
        for (std::size_t i = 0; i < sizeof(T) / 2; ++i) {
            std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
        }
        std::memcpy(&value, bytes, sizeof(T));
        return value;
    }
}

class ByteWriter {
public:
    void magic(const char (&tag)[5]) { bytes_.insert(bytes_.end(), tag, tag + 4); }

    template <typename T>
    void put(T value)
    {
        value = byteswap_if_needed(value);
        const auto* p = reinterpret_cast<const unsigned char*>(&value);
        bytes_.insert(bytes_.end(), p, p + sizeof(T));
    }

    template <typename T>
    void put_all(std::span<const T> values)
    {
        if constexpr (std::endian::native == std::endian::little) {
            const auto* p = reinterpret_cast<const unsigned char*>(values.data());
            bytes_.insert(bytes_.end(), p, p + values.size_bytes());
        } else {
            for (const T& v : values) {
                put(v);
            }
        }
    }

    void raw(std::span<const unsigned char> data) { bytes_.insert(bytes_.end(), data.begin(), data.end()); }

    const std::vector<unsigned char>& bytes() const noexcept { return bytes_; }

    /// Writes to `path` via a sibling temporary and rename.
    void save(const std::filesystem::path& path) const
    {
        auto tmp = path;
        tmp += ".part";
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            if (!out) {
                throw FormatError(FormatErrorKind::Io, "cannot open " + tmp.string() + " for writing");
            }
            out.write(reinterpret_cast<const char*>(bytes_.data()), static_cast<std::streamsize>(bytes_.size()));
            if (!out) {
                throw FormatError(FormatErrorKind::Io, "write failed: " + tmp.string());
            }
        }
        std::filesystem::rename(tmp, path);
    }

private:
    std::vector<unsigned char> bytes_;
};

class ByteReader {
public:
    explicit ByteReader(std::vector<unsigned char> data, std::string origin)
        : data_(std::move(data)), origin_(std::move(origin))
    {
    }

    static ByteReader from_file(const std::filesystem::path& path)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in) {
            throw FormatError(FormatErrorKind::Io, "cannot open " + path.string());
        }
        std::vector<unsigned char> data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        return ByteReader(std::move(data), path.string());
    }

    void expect_magic(const char (&tag)[5])
    {
        need(4);
        if (std::memcmp(data_.data() + pos_, tag, 4) != 0) {
            throw FormatError(FormatErrorKind::BadMagic,
                              origin_ + ": expected magic " + std::string(tag, 4));
        }
        pos_ += 4;
    }

    template <typename T>
    T get()
    {
        need(sizeof(T));
        T value;
        std::memcpy(&value, data_.data() + pos_, sizeof(T));
        pos_ += sizeof(T);
        return byteswap_if_needed(value);
    }

    template <typename T>
    std::vector<T> get_all(std::size_t count)
    {
        if (count > remaining() / sizeof(T)) {
            throw FormatError(FormatErrorKind::Truncated, origin_ + ": payload shorter than declared dimensions");
        }
        std::vector<T> out(count);
        std::memcpy(out.data(), data_.data() + pos_, count * sizeof(T));
        pos_ += count * sizeof(T);
        if constexpr (std::endian::native != std::endian::little) {
            for (auto& v : out) {
                v = byteswap_if_needed(v);
            }
        }
        return out;
    }

    std::size_t remaining() const noexcept { return data_.size() - pos_; }

    void expect_end() const
    {
        if (remaining() != 0) {
            throw FormatError(FormatErrorKind::DimensionMismatch,
                              origin_ + ": " + std::to_string(remaining()) +
                                  " trailing bytes beyond declared dimensions");
        }
    }

    const std::string& origin() const noexcept { return origin_; }

private:
    void need(std::size_t n) const
    {
        if (n > remaining()) {
            throw FormatError(FormatErrorKind::Truncated, origin_ + ": unexpected end of data");
        }
    }

    std::vector<unsigned char> data_;
    std::string origin_;
    std::size_t pos_ = 0;
};

}  // namespace drain::detail
