// Copyright 2026 The voxgauss Authors
// SPDX-License-Identifier: Apache-2.0

// Little-endian primitive I/O shared by the SVOL and GGM codecs.

#pragma once

#include <voxgauss/error.hpp>

#include <algorithm>
#include <bit>
#include <cstring>
#include <istream>
#include <ostream>
#include <type_traits>

namespace voxgauss::detail {

template <typename T>
void put_le(std::ostream& os, T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    char buf[sizeof(T)];
    std::memcpy(buf, &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
    os.write(buf, sizeof(T));
}

template <typename T>
T get_le(std::istream& is) {
    static_assert(std::is_trivially_copyable_v<T>);
    char buf[sizeof(T)];
    if (!is.read(buf, sizeof(T))) throw Error(ErrorCode::TruncatedStream, "unexpected end of stream");
    if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
    T value;
    std::memcpy(&value, buf, sizeof(T));
    return value;
}

inline void get_bytes(std::istream& is, char* dst, std::streamsize n) {
    if (!is.read(dst, n)) throw Error(ErrorCode::TruncatedStream, "unexpected end of stream");
}

} // namespace voxgauss::detail
