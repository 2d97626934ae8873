#pragma once

#include <filesystem>
#include <string>

#include "xfel/field.hpp"

namespace xfel {

// Binary layout: 16-byte magic, u32 n, f64 L, then n^3 (re, im) f64 pairs,
// all little-endian, x1 slowest.
void write_snapshot(const std::filesystem::path& path, const Field& f);
Field read_snapshot(const std::filesystem::path& path);

std::string encode_snapshot(const Field& f);
Field decode_snapshot(const std::string& bytes);

}  // namespace xfel
