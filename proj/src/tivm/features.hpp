#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "tivm/tensor.hpp"

namespace tivm {

enum class ExtractorKind { Precomputed, GridPool, RandProj };

struct ExtractorSpec {
  ExtractorKind kind = ExtractorKind::Precomputed;
  std::size_t grid_height = 8;
  std::size_t grid_width = 8;
  std::size_t channels = 3;  // gridpool always emits 3
  std::uint64_t seed = 0;
};

void validate(const ExtractorSpec& spec);

struct GrayImage {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<std::uint8_t> pixels;  // row-major

  std::uint8_t at(std::size_t row, std::size_t col) const { return pixels[row * width + col]; }
};

struct SequenceDataset {
  std::vector<FeatureCube> frames;
  std::vector<std::uint8_t> labels;  // empty when no labels file was given
  std::vector<std::filesystem::path> sources;

  bool has_labels() const noexcept { return !labels.empty(); }
};

// .fcb: "FCUB", u32 version=1, u32 c, h, w, then c*h*w little-endian f32.
std::vector<std::uint8_t> encode_cube(const FeatureCube& cube);
FeatureCube decode_cube(std::span<const std::uint8_t> bytes);
void save_cube(const FeatureCube& cube, const std::filesystem::path& path);
FeatureCube load_cube(const std::filesystem::path& path);

// Binary PGM (P5), 8-bit.
GrayImage decode_pgm(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_pgm(const GrayImage& image);
GrayImage load_pgm(const std::filesystem::path& path);

// Three-channel grid summary of a grayscale image: per-cell mean intensity,
// mean |horizontal forward difference| and mean |vertical forward
// difference|, all divided by 255. Differences past the last column/row are
// zero. Cells split each axis as evenly as possible; the trailing
// (length mod grid) cells take one extra pixel.
FeatureCube extract_gridpool(const GrayImage& image, std::size_t grid_height, std::size_t grid_width);

// Deterministic unit-norm Gaussian cube keyed by (spec.seed, frame_id), of
// shape channels x grid_height x grid_width.
FeatureCube extract_randproj(std::uint64_t frame_id, const ExtractorSpec& spec);

// Parses "frame_index,interesting"; requires exactly one 0/1 label for each
// index in [0, frame_count).
std::vector<std::uint8_t> parse_labels_csv(std::string_view text, std::size_t frame_count);

// Frames from every .fcb (precomputed) or .pgm (gridpool) file in `dir`,
// ordered by file name.
SequenceDataset load_sequence(const std::filesystem::path& dir,
                              const std::optional<std::filesystem::path>& labels_csv,
                              const ExtractorSpec& spec);

// `count` randproj frames with ids 0..count-1.
SequenceDataset synthesize_sequence(const ExtractorSpec& spec, std::size_t count);

}  // namespace tivm
