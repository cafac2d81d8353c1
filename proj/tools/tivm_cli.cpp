// Command-line front end. Talks to the library only through tivm.h.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "tivm/tivm.h"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitData = 4;
constexpr int kExitFormat = 5;

const char* const kFormats = R"(Exit codes: 0 ok, 2 usage, 3 I/O, 4 shape/data, 5 format/alignment.

File formats (integers and floats little-endian):
  .fcb   cube      "FCUB" u32 version=1, u32 c h w, c*h*w f32 (channel-major, row-major)
  .tivm  bank      "TIVM" u32 version=1, u32 n c h w, u64 seed, f64 write_rate,
                   f64 read_rate, n*c*h*w f32
  .pgm   image     binary P5, maxval <= 255 (gridpool extractor)
  scores CSV       frame_index,interest,confidence   (frame_index 0-based)
  labels CSV       frame_index,interesting           (0/1, one row per frame)
  curve CSV        n,n_over_N,s  then a final row  auc,<value>
  short-term CSV   epoch,mean_confidence
  sparsity.csv     protocol,write_step,acc_f1,acc_f2
  capacity.csv     capacity,write_step,acc_f1,acc_f2
  invariance.csv   frame,mode,confidence
  decay.csv        frame,write_rate,interest)";

int exit_code(tivm_status status) {
  switch (status) {
    case TIVM_OK: return 0;
    case TIVM_E_INVALID_ARGUMENT:
    case TIVM_E_INVALID_CAPACITY:
    case TIVM_E_INVALID_RATE: return kExitUsage;
    case TIVM_E_IO: return kExitIo;
    case TIVM_E_SHAPE_MISMATCH:
    case TIVM_E_DEGENERATE_NORM:
    case TIVM_E_EMPTY_SEQUENCE:
    case TIVM_E_SHAPE_INCONSISTENT:
    case TIVM_E_IMAGE_TOO_SMALL: return kExitData;
    case TIVM_E_FORMAT:
    case TIVM_E_NON_FINITE_DATA:
    case TIVM_E_LABEL_MISMATCH:
    case TIVM_E_INDEX_OUT_OF_RANGE:
    case TIVM_E_LENGTH_MISMATCH: return kExitFormat;
    case TIVM_E_INTERNAL: break;
  }
  return 1;
}

struct Failure {
  int code;
};

void check(tivm_status status) {
  if (status == TIVM_OK) return;
  std::cerr << "tivm: " << tivm_status_name(status) << ": " << tivm_last_error() << "\n";
  throw Failure{exit_code(status)};
}

[[noreturn]] void usage(const std::string& message) {
  std::cerr << "tivm: " << message << "\n";
  throw Failure{kExitUsage};
}

template <typename T, void (*Free)(T*)>
struct Owned {
  T* ptr = nullptr;
  Owned() = default;
  Owned(const Owned&) = delete;
  Owned& operator=(const Owned&) = delete;
  ~Owned() { Free(ptr); }
  T** out() { return &ptr; }
  T* get() const { return ptr; }
};

using Bank = Owned<tivm_bank, tivm_bank_free>;
using Cube = Owned<tivm_cube, tivm_cube_free>;
using Sequence = Owned<tivm_sequence, tivm_sequence_free>;

struct Dims {
  std::size_t a = 0, b = 0, c = 0;
};

// "c,h,w" or "h,w" (count = 3 or 2); every entry must be >= 1.
Dims parse_dims(const std::string& text, std::size_t count, const char* flag) {
  std::vector<std::size_t> parts;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(item, &used);
      if (used != item.size() || v < 1) throw std::invalid_argument(item);
      parts.push_back(static_cast<std::size_t>(v));
    } catch (const std::exception&) {
      usage(std::string(flag) + " expects positive integers, got '" + text + "'");
    }
  }
  if (parts.size() != count)
    usage(std::string(flag) + " expects " + std::to_string(count) + " comma-separated values");
  Dims d;
  d.a = parts[0];
  d.b = parts[1];
  if (count == 3) d.c = parts[2];
  return d;
}

tivm_read_mode parse_mode(const std::string& mode) {
  if (mode == "WTI" || mode == "wti") return TIVM_READ_WTI;
  if (mode == "WOTI" || mode == "woti") return TIVM_READ_WOTI;
  usage("--mode must be WTI or WOTI");
}

struct SequenceFlags {
  std::string data;
  std::string labels;
  std::string extractor = "precomputed";
  std::string grid = "8,8";
  std::size_t frames = 0;
  std::uint64_t seed = 0;

  void attach(CLI::App* cmd, bool with_labels) {
    cmd->add_option("--data", data, "Directory of .fcb cubes or .pgm images");
    if (with_labels) cmd->add_option("--labels", labels, "Labels CSV for the frames in --data");
    cmd->add_option("--extractor", extractor, "precomputed | gridpool | randproj")
        ->check(CLI::IsMember({"precomputed", "gridpool", "randproj"}));
    cmd->add_option("--grid", grid, "Gridpool cell grid as h,w");
    cmd->add_option("--frames", frames, "Number of synthesized frames (randproj)");
    cmd->add_option("--frame-seed", seed, "Seed of synthesized frames (randproj)");
  }

  // Randproj frames take their shape from the bank they will be scored against.
  void load(Sequence& seq, const tivm_bank_info& bank) const {
    tivm_extractor spec{};
    spec.seed = seed;
    if (extractor == "randproj") {
      if (frames == 0) usage("--extractor randproj needs --frames >= 1");
      spec.kind = TIVM_EXTRACT_RANDPROJ;
      spec.channels = bank.channels;
      spec.grid_height = bank.height;
      spec.grid_width = bank.width;
      check(tivm_sequence_synthesize(&spec, frames, seq.out()));
      return;
    }
    if (data.empty()) usage("--data is required unless --extractor randproj");
    const Dims g = parse_dims(grid, 2, "--grid");
    spec.kind = extractor == "gridpool" ? TIVM_EXTRACT_GRIDPOOL : TIVM_EXTRACT_PRECOMPUTED;
    spec.grid_height = g.a;
    spec.grid_width = g.b;
    spec.channels = 3;
    check(tivm_sequence_load(data.c_str(), labels.empty() ? nullptr : labels.c_str(), &spec, seq.out()));
  }
};

tivm_bank_info bank_info(const Bank& bank) {
  tivm_bank_info info{};
  check(tivm_bank_info_get(bank.get(), &info));
  return info;
}

void print_bank(const tivm_bank_info& info) {
  std::printf("kind: bank\ncapacity: %zu\nshape: %zu,%zu,%zu\nseed: %llu\nwrite_rate: %.9g\nread_rate: %.9g\n",
              info.capacity, info.channels, info.height, info.width,
              static_cast<unsigned long long>(info.seed), info.write_rate, info.read_rate);
}

std::string file_magic(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "tivm: IoError: cannot open " << path << "\n";
    throw Failure{kExitIo};
  }
  char magic[4] = {};
  in.read(magic, 4);
  return std::string(magic, static_cast<std::size_t>(in.gcount()));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Translation-invariant visual memory: interest scoring of frame streams."};
  app.footer(kFormats);
  app.require_subcommand(1);

  // init
  std::size_t capacity = 100;
  std::string shape;
  std::uint64_t seed = 0;
  double write_rate = 5.0, read_rate = 5.0;
  std::string out;
  auto* init = app.add_subcommand("init", "Create a freshly initialised memory bank snapshot");
  init->add_option("--capacity", capacity, "Number of memory cubes")->capture_default_str();
  init->add_option("--shape", shape, "Cube shape c,h,w")->required();
  init->add_option("--seed", seed, "Initialisation seed")->capture_default_str();
  init->add_option("--write-rate", write_rate, "Writing rate gamma_w")->capture_default_str();
  init->add_option("--read-rate", read_rate, "Reading rate gamma_r")->capture_default_str();
  init->add_option("--out", out, "Output .tivm path")->required();

  // short-term
  std::string bank_path, report;
  std::size_t max_epochs = 10;
  double threshold = 0.95;
  SequenceFlags st_seq;
  auto* short_term = app.add_subcommand("short-term", "Adapt a bank to uninteresting frames");
  short_term->add_option("--bank", bank_path, "Input .tivm snapshot")->required();
  st_seq.attach(short_term, false);
  short_term->add_option("--max-epochs", max_epochs, "Epoch limit")->capture_default_str();
  short_term->add_option("--threshold", threshold, "Stop once mean epoch confidence reaches this")
      ->capture_default_str();
  short_term->add_option("--out", out, "Updated .tivm path (default: overwrite --bank)");
  short_term->add_option("--report", report, "Per-epoch confidence CSV");

  // online
  std::string mode = "WTI", save_bank;
  std::optional<double> online_write, online_read;
  SequenceFlags on_seq;
  auto* online = app.add_subcommand("online", "Score a frame stream, read before write");
  online->add_option("--bank", bank_path, "Input .tivm snapshot")->required();
  on_seq.attach(online, false);
  online->add_option("--mode", mode, "Read mode WTI | WOTI")->capture_default_str();
  online->add_option("--write-rate", online_write, "Writing rate (default: the bank's)");
  online->add_option("--read-rate", online_read, "Reading rate (default: the bank's)");
  online->add_option("--out", out, "Scores CSV path")->required();
  online->add_option("--save-bank", save_bank, "Write the post-run bank here");

  // eval
  std::string scores, labels;
  double delta = 2.0;
  auto* eval = app.add_subcommand("eval", "Online precision curve and AUC-OP of a scores CSV");
  eval->add_option("--scores", scores, "Scores CSV")->required();
  eval->add_option("--labels", labels, "Labels CSV")->required();
  eval->add_option("--delta", delta, "Rank relaxation delta >= 1")->capture_default_str();
  eval->add_option("--out", out, "Curve CSV path")->required();

  // ablate
  std::string experiment, protocol;
  std::optional<std::size_t> ab_capacity, ab_repeats;
  std::optional<double> ab_write, ab_read;
  std::optional<std::string> ab_shape, ab_mode;
  auto* ablate = app.add_subcommand("ablate", "Run one ablation experiment: sparsity | capacity | invariance | decay");
  ablate->add_option("experiment", experiment, "Experiment name")->required();
  ablate->add_option("--seed", seed, "Experiment seed")->capture_default_str();
  ablate->add_option("--capacity", ab_capacity, "Bank capacity (experiment default otherwise)");
  ablate->add_option("--shape", ab_shape, "Tensor shape c,h,w");
  ablate->add_option("--write-rate", ab_write, "Writing rate");
  ablate->add_option("--read-rate", ab_read, "Reading rate");
  ablate->add_option("--mode", ab_mode, "Read mode WTI | WOTI");
  ablate->add_option("--protocol", protocol, "Write protocol for the capacity sweep: tangent | baseline")
      ->check(CLI::IsMember({"tangent", "baseline"}));
  ablate->add_option("--repeats", ab_repeats, "Frames in the decay stream");
  ablate->add_option("--out", out, "Output CSV (default <experiment>.csv)");

  // inspect
  std::string path;
  auto* inspect = app.add_subcommand("inspect", "Print the header of a .tivm or .fcb file");
  inspect->add_option("path", path, "File to inspect")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (init->parsed()) {
      const Dims s = parse_dims(shape, 3, "--shape");
      Bank bank;
      check(tivm_bank_create(capacity, s.a, s.b, s.c, seed, write_rate, read_rate, bank.out()));
      check(tivm_bank_save(bank.get(), out.c_str()));
    } else if (short_term->parsed()) {
      Bank bank;
      check(tivm_bank_load(bank_path.c_str(), bank.out()));
      Sequence seq;
      st_seq.load(seq, bank_info(bank));
      std::vector<double> epochs(max_epochs);
      std::size_t run = 0;
      int converged = 0;
      check(tivm_short_term_train(bank.get(), seq.get(), max_epochs, threshold, &run, &converged, epochs.data(),
                                  report.empty() ? nullptr : report.c_str()));
      check(tivm_bank_save(bank.get(), out.empty() ? bank_path.c_str() : out.c_str()));
      std::printf("epochs: %zu\nconverged: %s\nmean_confidence: %.9g\n", run, converged ? "yes" : "no",
                  run ? epochs[run - 1] : 0.0);
    } else if (online->parsed()) {
      Bank bank;
      check(tivm_bank_load(bank_path.c_str(), bank.out()));
      const tivm_bank_info info = bank_info(bank);
      Sequence seq;
      on_seq.load(seq, info);
      const tivm_online_params params{online_read.value_or(info.read_rate), online_write.value_or(info.write_rate),
                                      parse_mode(mode)};
      check(tivm_online_run(bank.get(), seq.get(), &params, nullptr, nullptr, out.c_str()));
      if (!save_bank.empty()) check(tivm_bank_save(bank.get(), save_bank.c_str()));
    } else if (eval->parsed()) {
      double auc = 0.0;
      check(tivm_eval_files(scores.c_str(), labels.c_str(), delta, out.c_str(), &auc));
      std::printf("auc: %.9g\n", auc);
    } else if (ablate->parsed()) {
      tivm_experiment_config cfg{};
      check(tivm_experiment_config_default(experiment.c_str(), &cfg));
      cfg.seed = seed;
      if (ab_capacity) cfg.capacity = *ab_capacity;
      if (ab_shape) {
        const Dims s = parse_dims(*ab_shape, 3, "--shape");
        cfg.channels = s.a;
        cfg.height = s.b;
        cfg.width = s.c;
      }
      if (ab_write) cfg.write_rate = *ab_write;
      if (ab_read) cfg.read_rate = *ab_read;
      if (ab_mode) cfg.mode = parse_mode(*ab_mode);
      if (protocol == "baseline") cfg.protocol = TIVM_WRITE_BASELINE;
      if (ab_repeats) cfg.repeats = *ab_repeats;
      const std::string target = out.empty() ? experiment + ".csv" : out;
      check(tivm_run_experiment(experiment.c_str(), &cfg, target.c_str()));
    } else if (inspect->parsed()) {
      const std::string magic = file_magic(path);
      if (magic == "TIVM") {
        Bank bank;
        check(tivm_bank_load(path.c_str(), bank.out()));
        print_bank(bank_info(bank));
      } else if (magic == "FCUB") {
        Cube cube;
        check(tivm_cube_load(path.c_str(), cube.out()));
        std::size_t c = 0, h = 0, w = 0;
        check(tivm_cube_shape(cube.get(), &c, &h, &w));
        std::printf("kind: cube\nshape: %zu,%zu,%zu\n", c, h, w);
      } else {
        std::cerr << "tivm: FormatError: " << path << " is neither a TIVM bank nor an FCUB cube\n";
        return kExitFormat;
      }
    }
  } catch (const Failure& f) {
    return f.code;
  }
  return 0;
}
