#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "spikelab/field.hpp"

namespace spikelab {

// Flat binary layout: magic "SPKF", u32 version, u32 nx, u32 ny,
// f64 h, f64 origin_x, f64 origin_y, then nx*ny row-major f64 values.
void write_field_binary(const std::filesystem::path& path, const Field& f);

struct RawFieldData {
  Grid grid;
  std::vector<double> values;
};
RawFieldData read_field_binary(const std::filesystem::path& path);

// Reattach loaded values to a domain; grids must match exactly.
Field field_from_raw(const RawFieldData& raw, const DomainPtr& dom);

// 8-bit grayscale PGM with a linear scale [0, vmax]; returns vmax so callers
// can record the color scale.
double write_field_pgm(const std::filesystem::path& path, const Field& f);

// Fixed-format double for CSV/manifest output; stable across runs.
std::string format_double(double x);

}  // namespace spikelab
