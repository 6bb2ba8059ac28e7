#pragma once

// Flat named-matrix container.
//
//   "GFW1"
//   repeated until EOF:
//     u32  name length in bytes (little-endian)
//     u8[] UTF-8 name
//     u64  rows
//     u64  cols
//     f64[rows*cols] row-major, IEEE-754 binary64 little-endian
//
// Records are written in lexicographic name order.

#include <bit>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <string>

#include "glyphdraw/attention.hpp"
#include "glyphdraw/error.hpp"
#include "glyphdraw/linalg.hpp"

namespace glyphdraw {

using NamedMatrices = std::map<std::string, Matrix>;

namespace detail {

template <typename U>
void put_le(std::ostream& os, U v) {
    char buf[sizeof(U)];
    for (std::size_t i = 0; i < sizeof(U); ++i)
        buf[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
    os.write(buf, sizeof(U));
}

template <typename U>
bool get_le(std::istream& is, U& v) {
    unsigned char buf[sizeof(U)];
    if (!is.read(reinterpret_cast<char*>(buf), sizeof(U)))
        return false;
    v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i)
        v |= static_cast<U>(buf[i]) << (8 * i);
    return true;
}

}  // namespace detail

inline void write_weights(std::ostream& os, const NamedMatrices& weights) {
    os.write("GFW1", 4);
    for (const auto& [name, m] : weights) {
        detail::put_le<std::uint32_t>(os, static_cast<std::uint32_t>(name.size()));
        os.write(name.data(), static_cast<std::streamsize>(name.size()));
        detail::put_le<std::uint64_t>(os, m.rows());
        detail::put_le<std::uint64_t>(os, m.cols());
        for (double x : m.data())
            detail::put_le<std::uint64_t>(os, std::bit_cast<std::uint64_t>(x));
    }
}

inline NamedMatrices read_weights(std::istream& is) {
    char magic[4];
    if (!is.read(magic, 4) || std::string(magic, 4) != "GFW1")
        throw InputError("weights: bad magic, expected GFW1");
    NamedMatrices out;
    for (;;) {
        std::uint32_t name_len = 0;
        if (!detail::get_le(is, name_len)) {
            if (is.gcount() == 0)
                break;
            throw InputError("weights: truncated record header");
        }
        std::string name(name_len, '\0');
        std::uint64_t rows = 0, cols = 0;
        if (!is.read(name.data(), name_len) || !detail::get_le(is, rows) || !detail::get_le(is, cols))
            throw InputError("weights: truncated record '" + name + "'");
        if (cols != 0 && rows > (UINT64_MAX / 8) / cols)
            throw InputError("weights: record '" + name + "' too large");
        std::vector<double> data(rows * cols);
        for (double& x : data) {
            std::uint64_t bits = 0;
            if (!detail::get_le(is, bits))
                throw InputError("weights: truncated data for '" + name + "'");
            x = std::bit_cast<double>(bits);
        }
        if (!out.emplace(name, Matrix(rows, cols, std::move(data))).second)
            throw InputError("weights: duplicate record '" + name + "'");
    }
    return out;
}

inline void save_weights(const std::filesystem::path& path, const NamedMatrices& weights) {
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw InputError("cannot open for writing: " + path.string());
    write_weights(os, weights);
}

inline NamedMatrices load_weights(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw InputError("cannot open: " + path.string());
    return read_weights(is);
}

/// Names used for one block: "<prefix>w_q", "<prefix>w_k_ctrl", ...
inline void put_block(NamedMatrices& into, const std::string& prefix, const AttentionBlockState& b) {
    into[prefix + "w_q"] = b.w_q;
    into[prefix + "w_k"] = b.w_k;
    into[prefix + "w_v"] = b.w_v;
    into[prefix + "w_k_ctrl"] = b.w_k_ctrl;
    into[prefix + "w_v_ctrl"] = b.w_v_ctrl;
    into[prefix + "w_k_glyph"] = b.w_k_glyph;
    into[prefix + "w_v_glyph"] = b.w_v_glyph;
}

/// Rebuilds a block; key_dim is taken from w_q's width.
inline AttentionBlockState get_block(const NamedMatrices& from, const std::string& prefix) {
    auto get = [&](const char* n) -> const Matrix& {
        auto it = from.find(prefix + n);
        if (it == from.end())
            throw InputError("weights: missing '" + prefix + n + "'");
        return it->second;
    };
    AttentionBlockState b{get("w_q"),      get("w_k"),       get("w_v"),       get("w_k_ctrl"),
                          get("w_v_ctrl"), get("w_k_glyph"), get("w_v_glyph"), 0};
    b.key_dim = b.w_q.cols();
    b.validate();
    return b;
}

}  // namespace glyphdraw
