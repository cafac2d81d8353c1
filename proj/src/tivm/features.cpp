#include "tivm/features.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <string>

#include "tivm/binary_io.hpp"
#include "tivm/csv.hpp"
#include "tivm/error.hpp"
#include "tivm/random.hpp"

namespace tivm {
namespace {

constexpr char kCubeMagic[] = "FCUB";
constexpr std::uint32_t kCubeVersion = 1;

struct Cell {
  std::size_t begin;
  std::size_t end;
};

Cell cell_bounds(std::size_t length, std::size_t cells, std::size_t k) {
  const std::size_t base = length / cells;
  const std::size_t widened = length % cells;
  const std::size_t first_wide = cells - widened;
  const std::size_t begin = k * base + (k > first_wide ? k - first_wide : 0);
  const std::size_t size = base + (k >= first_wide ? 1 : 0);
  return {begin, begin + size};
}

// Header tokenizer for PGM: whitespace-separated, '#' comments to end of line.
class PgmHeader {
 public:
  explicit PgmHeader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::string token() {
    skip_space();
    std::string out;
    while (pos_ < bytes_.size() && !std::isspace(bytes_[pos_]) && bytes_[pos_] != '#')
      out.push_back(static_cast<char>(bytes_[pos_++]));
    if (out.empty()) fail(ErrorCode::Format, "truncated PGM header");
    return out;
  }

  std::size_t number() {
    const std::string t = token();
    const long long v = parse_integer(t, "PGM header field");
    if (v <= 0) fail(ErrorCode::Format, "PGM header field must be positive");
    return static_cast<std::size_t>(v);
  }

  // Exactly one whitespace byte separates maxval from the raster.
  std::size_t raster_offset() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) fail(ErrorCode::Format, "malformed PGM header");
    return pos_ + 1;
  }

 private:
  void skip_space() {
    while (pos_ < bytes_.size()) {
      if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

void validate(const ExtractorSpec& spec) {
  if (spec.grid_height == 0 || spec.grid_width == 0)
    fail(ErrorCode::InvalidArgument, "extractor grid dimensions must be >= 1");
  if (spec.channels == 0) fail(ErrorCode::InvalidArgument, "extractor channel count must be >= 1");
}

std::vector<std::uint8_t> encode_cube(const FeatureCube& cube) {
  ByteWriter out;
  out.put_bytes(std::string_view(kCubeMagic, 4));
  out.put_u32(kCubeVersion);
  out.put_u32(static_cast<std::uint32_t>(cube.shape().channels));
  out.put_u32(static_cast<std::uint32_t>(cube.shape().height));
  out.put_u32(static_cast<std::uint32_t>(cube.shape().width));
  for (float v : cube.values()) out.put_f32(v);
  return out.bytes();
}

FeatureCube decode_cube(std::span<const std::uint8_t> bytes) {
  ByteReader in(bytes);
  if (in.take_bytes(4) != std::string_view(kCubeMagic, 4))
    fail(ErrorCode::Format, "not an FCUB cube file (bad magic)");
  if (const auto version = in.take_u32(); version != kCubeVersion)
    fail(ErrorCode::Format, "unsupported FCUB version " + std::to_string(version));
  Shape shape;
  shape.channels = in.take_u32();
  shape.height = in.take_u32();
  shape.width = in.take_u32();
  if (shape.size() == 0) fail(ErrorCode::Format, "FCUB header has a zero dimension");
  if (in.remaining() != shape.size() * 4)
    fail(ErrorCode::Format, "FCUB payload is " + std::to_string(in.remaining()) + " bytes, header implies " +
                                std::to_string(shape.size() * 4));
  std::vector<float> values(shape.size());
  for (float& v : values) v = in.take_f32();
  return FeatureCube(shape, std::move(values));
}

void save_cube(const FeatureCube& cube, const std::filesystem::path& path) {
  atomic_write_file(path, encode_cube(cube));
}

FeatureCube load_cube(const std::filesystem::path& path) {
  try {
    return decode_cube(read_file(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Io) throw;
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

GrayImage decode_pgm(std::span<const std::uint8_t> bytes) {
  PgmHeader header(bytes);
  if (header.token() != "P5") fail(ErrorCode::Format, "only binary PGM (P5) is supported");
  GrayImage image;
  image.width = header.number();
  image.height = header.number();
  const std::size_t maxval = header.number();
  if (maxval > 255) fail(ErrorCode::Format, "only 8-bit PGM (maxval <= 255) is supported");
  const std::size_t offset = header.raster_offset();
  const std::size_t expected = image.width * image.height;
  if (bytes.size() - std::min(bytes.size(), offset) < expected)
    fail(ErrorCode::Format, "PGM raster is truncated");
  image.pixels.assign(bytes.begin() + static_cast<std::ptrdiff_t>(offset),
                      bytes.begin() + static_cast<std::ptrdiff_t>(offset + expected));
  for (auto p : image.pixels)
    if (p > maxval) fail(ErrorCode::Format, "PGM pixel exceeds maxval");
  return image;
}

std::vector<std::uint8_t> encode_pgm(const GrayImage& image) {
  const std::string header =
      "P5\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), image.pixels.begin(), image.pixels.end());
  return out;
}

GrayImage load_pgm(const std::filesystem::path& path) {
  try {
    return decode_pgm(read_file(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Io) throw;
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

FeatureCube extract_gridpool(const GrayImage& image, std::size_t grid_height, std::size_t grid_width) {
  if (grid_height == 0 || grid_width == 0) fail(ErrorCode::InvalidArgument, "grid dimensions must be >= 1");
  if (image.height < grid_height || image.width < grid_width)
    fail(ErrorCode::ImageTooSmall, "image " + std::to_string(image.height) + "x" + std::to_string(image.width) +
                                       " is smaller than grid " + std::to_string(grid_height) + "x" +
                                       std::to_string(grid_width));
  const Shape shape{3, grid_height, grid_width};
  std::vector<float> values(shape.size());
  for (std::size_t gy = 0; gy < grid_height; ++gy) {
    const Cell rows = cell_bounds(image.height, grid_height, gy);
    for (std::size_t gx = 0; gx < grid_width; ++gx) {
      const Cell cols = cell_bounds(image.width, grid_width, gx);
      double intensity = 0.0, horizontal = 0.0, vertical = 0.0;
      for (std::size_t r = rows.begin; r < rows.end; ++r)
        for (std::size_t c = cols.begin; c < cols.end; ++c) {
          const int v = image.at(r, c);
          intensity += v;
          if (c + 1 < image.width) horizontal += std::abs(image.at(r, c + 1) - v);
          if (r + 1 < image.height) vertical += std::abs(image.at(r + 1, c) - v);
        }
      const double denom = 255.0 * static_cast<double>((rows.end - rows.begin) * (cols.end - cols.begin));
      const std::size_t cell = gy * grid_width + gx;
      values[cell] = static_cast<float>(intensity / denom);
      values[shape.plane() + cell] = static_cast<float>(horizontal / denom);
      values[2 * shape.plane() + cell] = static_cast<float>(vertical / denom);
    }
  }
  return FeatureCube(shape, std::move(values));
}

FeatureCube extract_randproj(std::uint64_t frame_id, const ExtractorSpec& spec) {
  validate(spec);
  const Shape shape{spec.channels, spec.grid_height, spec.grid_width};
  Rng rng(derive_seed(spec.seed, frame_id));
  std::vector<double> draws(shape.size());
  double norm = 0.0;
  while (norm < 1e-6) {
    for (double& v : draws) v = rng.normal();
    norm = 0.0;
    for (double v : draws) norm += v * v;
    norm = std::sqrt(norm);
  }
  std::vector<float> values(shape.size());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = static_cast<float>(draws[i] / norm);
  return FeatureCube(shape, std::move(values));
}

std::vector<std::uint8_t> parse_labels_csv(std::string_view text, std::size_t frame_count) {
  const CsvTable table = parse_csv(text);
  const std::size_t index_col = table.column("frame_index");
  const std::size_t label_col = table.column("interesting");
  if (table.rows.size() != frame_count)
    fail(ErrorCode::LabelMismatch, std::to_string(table.rows.size()) + " labels for " +
                                       std::to_string(frame_count) + " frames");
  std::vector<std::uint8_t> labels(frame_count, 0);
  std::vector<bool> seen(frame_count, false);
  for (const auto& row : table.rows) {
    const long long index = parse_integer(row[index_col], "frame_index");
    const long long label = parse_integer(row[label_col], "interesting");
    if (label != 0 && label != 1) fail(ErrorCode::Format, "labels must be 0 or 1");
    if (index < 0 || static_cast<std::size_t>(index) >= frame_count || seen[static_cast<std::size_t>(index)])
      fail(ErrorCode::LabelMismatch, "label row for frame " + std::to_string(index) +
                                         " is out of range or duplicated");
    seen[static_cast<std::size_t>(index)] = true;
    labels[static_cast<std::size_t>(index)] = static_cast<std::uint8_t>(label);
  }
  return labels;
}

SequenceDataset load_sequence(const std::filesystem::path& dir,
                              const std::optional<std::filesystem::path>& labels_csv,
                              const ExtractorSpec& spec) {
  validate(spec);
  if (spec.kind == ExtractorKind::RandProj)
    fail(ErrorCode::InvalidArgument, "randproj frames are synthesized, not loaded from a directory");
  const std::string wanted = spec.kind == ExtractorKind::GridPool ? ".pgm" : ".fcb";

  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) fail(ErrorCode::Io, dir.string() + " is not a directory");
  SequenceDataset data;
  for (const auto& entry : std::filesystem::directory_iterator(dir, ec))
    if (entry.is_regular_file() && entry.path().extension() == wanted) data.sources.push_back(entry.path());
  if (ec) fail(ErrorCode::Io, "cannot list " + dir.string());
  if (data.sources.empty()) fail(ErrorCode::Io, "no " + wanted + " frames in " + dir.string());
  std::sort(data.sources.begin(), data.sources.end(),
            [](const auto& a, const auto& b) { return a.filename().string() < b.filename().string(); });

  for (const auto& path : data.sources) {
    if (spec.kind == ExtractorKind::GridPool)
      data.frames.push_back(extract_gridpool(load_pgm(path), spec.grid_height, spec.grid_width));
    else
      data.frames.push_back(load_cube(path));
    if (data.frames.back().shape() != data.frames.front().shape())
      fail(ErrorCode::ShapeInconsistent, path.string() + " is " + to_string(data.frames.back().shape()) +
                                             ", first frame is " + to_string(data.frames.front().shape()));
  }
  if (labels_csv) data.labels = parse_labels_csv(read_text_file(*labels_csv), data.frames.size());
  return data;
}

SequenceDataset synthesize_sequence(const ExtractorSpec& spec, std::size_t count) {
  validate(spec);
  if (count == 0) fail(ErrorCode::EmptySequence, "cannot synthesize an empty sequence");
  SequenceDataset data;
  data.frames.reserve(count);
  for (std::size_t i = 0; i < count; ++i) data.frames.push_back(extract_randproj(i, spec));
  return data;
}

}  // namespace tivm
