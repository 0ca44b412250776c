#pragma once

#include "asq/fft.hpp"

#include <filesystem>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace asq {

/// FSQG snapshot: "FSQG", version byte 0x01, little-endian u32 N, then N*N
/// little-endian f64 physical values, row-major with rows along x2.
inline constexpr std::uint8_t snapshot_version = 0x01;

std::vector<std::uint8_t> encode_snapshot(const PhysicalGrid& grid);
PhysicalGrid decode_snapshot(const std::vector<std::uint8_t>& bytes);

void write_snapshot(const std::filesystem::path& path, const SpectralField& field);
SpectralField read_snapshot(const std::filesystem::path& path);

} // namespace asq
