#pragma once

#include "vccrecon/ktensor.hpp"

#include <filesystem>

namespace vcc {

/*
 * KSP1 files (all fields little-endian):
 *
 *   char[4]  magic "KSP1"
 *   u32      ndims (1..4)
 *   ndims x { u8 name tag (0=x, 1=y, 2=coil, 3=set), u64 extent }
 *   prod(extents) x { f32 real, f32 imag }, first dimension fastest
 *
 * x and y extents must be even. Failures raise IoError with a distinct IoErrc.
 */
KTensor read_ktensor(std::filesystem::path const &path);
void write_ktensor(std::filesystem::path const &path, KTensor const &t);

/// 8-bit binary PGM of |img|. Linear scaling maps `peak` (the image maximum when 0) to 255,
/// then multiplies by `gain` and clips.
void write_pgm(std::filesystem::path const &path, RealImage const &img, float gain = 1.f, float peak = 0.f);

} // namespace vcc
