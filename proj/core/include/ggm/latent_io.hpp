#pragma once

#include <filesystem>

#include "ggm/bench.hpp"

namespace ggm {

/// Latent file: a single-line JSON header
///   {"n":..., "roi_fraction":..., "seed":..., "dtype":"f32le", "mask":"u8"}
/// terminated by '\n', then n little-endian f32 values, then n mask bytes.
void write_latents(const std::filesystem::path& path, const bench::LatentSet& set);

/// Throws FormatError on a malformed header, dtype, or size.
bench::LatentSet read_latents(const std::filesystem::path& path);

}  // namespace ggm
