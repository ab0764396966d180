#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "latedit/latent.hpp"

namespace latedit {

// Fixed affine intensity mapping used by every 16-bit netpbm artifact:
// intensity lo..hi <-> sample 0..65535, rounding to nearest. Recorded in
// JSON sidecars so files remain self-describing.
struct IntensityMapping {
    double lo = -0.25;
    double hi = 1.25;

    std::uint16_t quantize(double v) const;
    double dequantize(std::uint16_t q) const { return lo + (hi - lo) * q / 65535.0; }
};

// 3-channel latents go to P6, single-channel to P5.
void write_netpbm16(const std::filesystem::path& path, const LatentImage& img,
                    const IntensityMapping& mapping = {});
LatentImage read_netpbm16(const std::filesystem::path& path,
                          const IntensityMapping& mapping = {});

// H*W map in [0, 1] as 16-bit P5.
void write_pgm16_map(const std::filesystem::path& path,
                     const std::vector<double>& map, int height, int width);

// Binary H*W map as P4 bitmap (1 = set pixel).
void write_pbm(const std::filesystem::path& path,
               const std::vector<std::uint8_t>& map, int height, int width);
std::vector<std::uint8_t> read_pbm(const std::filesystem::path& path, int& height,
                                   int& width);

// Tiles images (all same shape) into a rows x cols sheet with a 1-pixel
// separator, filling row-major; missing cells stay at the fill value.
LatentImage contact_sheet(const std::vector<LatentImage>& tiles, int rows,
                          int cols, double fill = 0.0);

}  // namespace latedit
