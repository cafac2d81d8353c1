#include "tivm/tivm.h"

#include <algorithm>
#include <exception>
#include <memory>
#include <optional>
#include <string>
#include <utility>

#include "tivm/binary_io.hpp"
#include "tivm/error.hpp"
#include "tivm/experiments.hpp"
#include "tivm/features.hpp"
#include "tivm/memory.hpp"
#include "tivm/metrics.hpp"
#include "tivm/pipeline.hpp"

struct tivm_cube {
  tivm::FeatureCube cube;
};

struct tivm_bank {
  tivm::MemoryBank bank;
};

struct tivm_sequence {
  tivm::SequenceDataset data;
};

namespace {

thread_local std::string last_error;

tivm_status to_status(tivm::ErrorCode code) {
  using tivm::ErrorCode;
  switch (code) {
    case ErrorCode::InvalidArgument: return TIVM_E_INVALID_ARGUMENT;
    case ErrorCode::InvalidCapacity: return TIVM_E_INVALID_CAPACITY;
    case ErrorCode::InvalidRate: return TIVM_E_INVALID_RATE;
    case ErrorCode::ShapeMismatch: return TIVM_E_SHAPE_MISMATCH;
    case ErrorCode::DegenerateNorm: return TIVM_E_DEGENERATE_NORM;
    case ErrorCode::EmptySequence: return TIVM_E_EMPTY_SEQUENCE;
    case ErrorCode::Io: return TIVM_E_IO;
    case ErrorCode::Format: return TIVM_E_FORMAT;
    case ErrorCode::NonFiniteData: return TIVM_E_NON_FINITE_DATA;
    case ErrorCode::LabelMismatch: return TIVM_E_LABEL_MISMATCH;
    case ErrorCode::ShapeInconsistent: return TIVM_E_SHAPE_INCONSISTENT;
    case ErrorCode::ImageTooSmall: return TIVM_E_IMAGE_TOO_SMALL;
    case ErrorCode::IndexOutOfRange: return TIVM_E_INDEX_OUT_OF_RANGE;
    case ErrorCode::LengthMismatch: return TIVM_E_LENGTH_MISMATCH;
  }
  return TIVM_E_INTERNAL;
}

template <typename Body>
tivm_status guarded(Body&& body) {
  try {
    body();
    last_error.clear();
    return TIVM_OK;
  } catch (const tivm::Error& e) {
    last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return TIVM_E_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return TIVM_E_INTERNAL;
  } catch (...) {
    last_error = "unknown failure";
    return TIVM_E_INTERNAL;
  }
}

template <typename T>
void require(const T* p, const char* what) {
  if (p == nullptr) tivm::fail(tivm::ErrorCode::InvalidArgument, std::string(what) + " is NULL");
}

tivm::ReadMode to_mode(tivm_read_mode mode) {
  if (mode == TIVM_READ_WTI) return tivm::ReadMode::WTI;
  if (mode == TIVM_READ_WOTI) return tivm::ReadMode::WOTI;
  tivm::fail(tivm::ErrorCode::InvalidArgument, "unknown read mode");
}

tivm::WriteProtocol to_protocol(tivm_write_protocol protocol) {
  if (protocol == TIVM_WRITE_TANGENT) return tivm::WriteProtocol::Tangent;
  if (protocol == TIVM_WRITE_BASELINE) return tivm::WriteProtocol::Baseline;
  tivm::fail(tivm::ErrorCode::InvalidArgument, "unknown write protocol");
}

tivm::ExtractorSpec to_spec(const tivm_extractor* spec) {
  require(spec, "extractor");
  tivm::ExtractorSpec out;
  switch (spec->kind) {
    case TIVM_EXTRACT_PRECOMPUTED: out.kind = tivm::ExtractorKind::Precomputed; break;
    case TIVM_EXTRACT_GRIDPOOL: out.kind = tivm::ExtractorKind::GridPool; break;
    case TIVM_EXTRACT_RANDPROJ: out.kind = tivm::ExtractorKind::RandProj; break;
    default: tivm::fail(tivm::ErrorCode::InvalidArgument, "unknown extractor kind");
  }
  out.grid_height = spec->grid_height;
  out.grid_width = spec->grid_width;
  out.channels = spec->channels;
  out.seed = spec->seed;
  return out;
}

tivm::ExperimentKind to_experiment(const char* name) {
  require(name, "experiment name");
  const auto kind = tivm::parse_experiment(name);
  if (!kind) tivm::fail(tivm::ErrorCode::InvalidArgument, std::string("unknown experiment '") + name + "'");
  return *kind;
}

tivm_cube* wrap(tivm::FeatureCube cube) { return new tivm_cube{std::move(cube)}; }

}  // namespace

extern "C" {

const char* tivm_version(void) { return "1.0.0"; }

const char* tivm_status_name(tivm_status status) {
  switch (status) {
    case TIVM_OK: return "OK";
    case TIVM_E_INVALID_ARGUMENT: return "InvalidArgument";
    case TIVM_E_INVALID_CAPACITY: return "InvalidCapacity";
    case TIVM_E_INVALID_RATE: return "InvalidRate";
    case TIVM_E_SHAPE_MISMATCH: return "ShapeMismatch";
    case TIVM_E_DEGENERATE_NORM: return "DegenerateNorm";
    case TIVM_E_EMPTY_SEQUENCE: return "EmptySequence";
    case TIVM_E_IO: return "IoError";
    case TIVM_E_FORMAT: return "FormatError";
    case TIVM_E_NON_FINITE_DATA: return "NonFiniteData";
    case TIVM_E_LABEL_MISMATCH: return "LabelMismatch";
    case TIVM_E_SHAPE_INCONSISTENT: return "ShapeInconsistent";
    case TIVM_E_IMAGE_TOO_SMALL: return "ImageTooSmall";
    case TIVM_E_INDEX_OUT_OF_RANGE: return "IndexOutOfRange";
    case TIVM_E_LENGTH_MISMATCH: return "LengthMismatch";
    case TIVM_E_INTERNAL: return "Internal";
  }
  return "Unknown";
}

const char* tivm_last_error(void) { return last_error.c_str(); }

tivm_status tivm_cube_create(size_t channels, size_t height, size_t width, const float* values, tivm_cube** out) {
  return guarded([&] {
    require(values, "values");
    require(out, "out");
    const tivm::Shape shape{channels, height, width};
    if (channels == 0 || height == 0 || width == 0)
      tivm::fail(tivm::ErrorCode::InvalidArgument, "cube dimensions must be >= 1");
    *out = wrap(tivm::FeatureCube(shape, std::vector<float>(values, values + shape.size())));
  });
}

tivm_status tivm_cube_load(const char* path, tivm_cube** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = wrap(tivm::load_cube(path));
  });
}

tivm_status tivm_cube_save(const tivm_cube* cube, const char* path) {
  return guarded([&] {
    require(cube, "cube");
    require(path, "path");
    tivm::save_cube(cube->cube, path);
  });
}

void tivm_cube_free(tivm_cube* cube) { delete cube; }

tivm_status tivm_cube_shape(const tivm_cube* cube, size_t* channels, size_t* height, size_t* width) {
  return guarded([&] {
    require(cube, "cube");
    const auto& s = cube->cube.shape();
    if (channels) *channels = s.channels;
    if (height) *height = s.height;
    if (width) *width = s.width;
  });
}

const float* tivm_cube_data(const tivm_cube* cube) { return cube ? cube->cube.values().data() : nullptr; }

tivm_status tivm_cube_translate(const tivm_cube* cube, size_t dy, size_t dx, tivm_cube** out) {
  return guarded([&] {
    require(cube, "cube");
    require(out, "out");
    *out = wrap(tivm::circular_translate(cube->cube, {dy, dx}));
  });
}

tivm_status tivm_cube_randproj(const tivm_extractor* spec, uint64_t frame_id, tivm_cube** out) {
  return guarded([&] {
    require(out, "out");
    *out = wrap(tivm::extract_randproj(frame_id, to_spec(spec)));
  });
}

tivm_status tivm_cosine(const tivm_cube* a, const tivm_cube* b, double* out) {
  return guarded([&] {
    require(a, "a");
    require(b, "b");
    require(out, "out");
    *out = tivm::cosine_similarity(a->cube, b->cube);
  });
}

tivm_status tivm_xcorr(const tivm_cube* x, const tivm_cube* m, double* score, size_t* dy, size_t* dx) {
  return guarded([&] {
    require(x, "x");
    require(m, "m");
    const tivm::ShiftMatch match = tivm::xcorr_similarity(x->cube, m->cube);
    if (score) *score = match.score;
    if (dy) *dy = match.shift.dy;
    if (dx) *dx = match.shift.dx;
  });
}

tivm_status tivm_channel_confidence(const tivm_cube* a, const tivm_cube* b, double* out) {
  return guarded([&] {
    require(a, "a");
    require(b, "b");
    require(out, "out");
    *out = tivm::channel_confidence(a->cube, b->cube);
  });
}

tivm_status tivm_bank_create(size_t capacity, size_t channels, size_t height, size_t width, uint64_t seed,
                             double write_rate, double read_rate, tivm_bank** out) {
  return guarded([&] {
    require(out, "out");
    *out = new tivm_bank{
        tivm::MemoryBank::create(capacity, {channels, height, width}, seed, write_rate, read_rate)};
  });
}

tivm_status tivm_bank_load(const char* path, tivm_bank** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new tivm_bank{tivm::load_bank(path)};
  });
}

tivm_status tivm_bank_save(const tivm_bank* bank, const char* path) {
  return guarded([&] {
    require(bank, "bank");
    require(path, "path");
    tivm::save_bank(bank->bank, path);
  });
}

void tivm_bank_free(tivm_bank* bank) { delete bank; }

tivm_status tivm_bank_info_get(const tivm_bank* bank, tivm_bank_info* out) {
  return guarded([&] {
    require(bank, "bank");
    require(out, "out");
    const tivm::BankHeader h = bank->bank.header();
    *out = tivm_bank_info{h.capacity, h.shape.channels, h.shape.height, h.shape.width,
                          h.seed,     h.write_rate,     h.read_rate};
  });
}

tivm_status tivm_bank_set_rates(tivm_bank* bank, double write_rate, double read_rate) {
  return guarded([&] {
    require(bank, "bank");
    bank->bank.set_rates(write_rate, read_rate);
  });
}

tivm_status tivm_bank_cube(const tivm_bank* bank, size_t index, tivm_cube** out) {
  return guarded([&] {
    require(bank, "bank");
    require(out, "out");
    if (index >= bank->bank.capacity())
      tivm::fail(tivm::ErrorCode::IndexOutOfRange, "cube index " + std::to_string(index) + " out of range");
    *out = wrap(bank->bank.cube(index));
  });
}

tivm_status tivm_bank_write(tivm_bank* bank, const tivm_cube* x, tivm_write_protocol protocol, double rate) {
  return guarded([&] {
    require(bank, "bank");
    require(x, "x");
    const double r = rate > 0.0 ? rate : bank->bank.write_rate();
    tivm::write_with(bank->bank, x->cube, to_protocol(protocol), r);
  });
}

tivm_status tivm_bank_read(const tivm_bank* bank, const tivm_cube* x, tivm_read_mode mode, double rate,
                           double* confidence, tivm_cube** recall, double* weights) {
  return guarded([&] {
    require(bank, "bank");
    require(x, "x");
    const double r = rate > 0.0 ? rate : bank->bank.read_rate();
    tivm::ReadResult result = bank->bank.read(x->cube, to_mode(mode), r);
    if (confidence) *confidence = result.confidence;
    if (weights) std::copy(result.weights.values().begin(), result.weights.values().end(), weights);
    if (recall) *recall = wrap(std::move(result.recall));
  });
}

tivm_status tivm_sequence_load(const char* dir, const char* labels_csv, const tivm_extractor* spec,
                               tivm_sequence** out) {
  return guarded([&] {
    require(dir, "dir");
    require(out, "out");
    std::optional<std::filesystem::path> labels;
    if (labels_csv) labels = labels_csv;
    *out = new tivm_sequence{tivm::load_sequence(dir, labels, to_spec(spec))};
  });
}

tivm_status tivm_sequence_synthesize(const tivm_extractor* spec, size_t count, tivm_sequence** out) {
  return guarded([&] {
    require(out, "out");
    *out = new tivm_sequence{tivm::synthesize_sequence(to_spec(spec), count)};
  });
}

void tivm_sequence_free(tivm_sequence* seq) { delete seq; }

size_t tivm_sequence_length(const tivm_sequence* seq) { return seq ? seq->data.frames.size() : 0; }

tivm_status tivm_sequence_frame(const tivm_sequence* seq, size_t index, tivm_cube** out) {
  return guarded([&] {
    require(seq, "sequence");
    require(out, "out");
    if (index >= seq->data.frames.size())
      tivm::fail(tivm::ErrorCode::IndexOutOfRange, "frame index " + std::to_string(index) + " out of range");
    *out = wrap(seq->data.frames[index]);
  });
}

int tivm_sequence_has_labels(const tivm_sequence* seq) { return seq && seq->data.has_labels() ? 1 : 0; }

tivm_status tivm_sequence_labels(const tivm_sequence* seq, uint8_t* out) {
  return guarded([&] {
    require(seq, "sequence");
    require(out, "out");
    if (!seq->data.has_labels()) tivm::fail(tivm::ErrorCode::LabelMismatch, "sequence was loaded without labels");
    std::copy(seq->data.labels.begin(), seq->data.labels.end(), out);
  });
}

tivm_status tivm_short_term_train(tivm_bank* bank, const tivm_sequence* seq, size_t max_epochs, double threshold,
                                  size_t* epochs_run, int* converged, double* epoch_confidence,
                                  const char* report_csv) {
  return guarded([&] {
    require(bank, "bank");
    require(seq, "sequence");
    tivm::MemoryBank updated = bank->bank;
    const tivm::ShortTermReport report = tivm::short_term_train(updated, seq->data.frames, max_epochs, threshold);
    if (report_csv) tivm::atomic_write_file(report_csv, tivm::format_short_term_csv(report));
    bank->bank = std::move(updated);
    if (epochs_run) *epochs_run = report.epochs_run;
    if (converged) *converged = report.converged ? 1 : 0;
    if (epoch_confidence)
      std::copy(report.epoch_confidence.begin(), report.epoch_confidence.end(), epoch_confidence);
  });
}

tivm_status tivm_online_run(tivm_bank* bank, const tivm_sequence* seq, const tivm_online_params* params,
                            double* interest, double* confidence, const char* scores_csv) {
  return guarded([&] {
    require(bank, "bank");
    require(seq, "sequence");
    require(params, "params");
    const tivm::OnlineParams p{params->read_rate, params->write_rate, to_mode(params->mode)};
    tivm::MemoryBank updated = bank->bank;
    const auto scores = tivm::online_run(updated, seq->data.frames, p);
    if (scores_csv) tivm::atomic_write_file(scores_csv, tivm::format_scores_csv(scores));
    bank->bank = std::move(updated);
    for (std::size_t t = 0; t < scores.size(); ++t) {
      if (interest) interest[t] = scores[t].value;
      if (confidence) confidence[t] = scores[t].confidence;
    }
  });
}

tivm_status tivm_auc_op(const double* preds, const uint8_t* labels, size_t length, double delta, double* s,
                        double* auc) {
  return guarded([&] {
    require(preds, "preds");
    require(labels, "labels");
    const auto curve = tivm::auc_op({preds, length}, {labels, length}, delta);
    if (s) std::copy(curve.s_values.begin(), curve.s_values.end(), s);
    if (auc) *auc = curve.auc;
  });
}

tivm_status tivm_eval_files(const char* scores_csv, const char* labels_csv, double delta, const char* out_csv,
                            double* auc) {
  return guarded([&] {
    require(scores_csv, "scores_csv");
    require(labels_csv, "labels_csv");
    const std::vector<double> preds = tivm::parse_scores_csv(tivm::read_text_file(scores_csv));
    const std::vector<std::uint8_t> labels =
        tivm::parse_labels_csv(tivm::read_text_file(labels_csv), preds.size());
    const auto curve = tivm::auc_op(preds, labels, delta);
    if (out_csv) tivm::atomic_write_file(out_csv, tivm::format_curve_csv(curve));
    if (auc) *auc = curve.auc;
  });
}

tivm_status tivm_experiment_config_default(const char* name, tivm_experiment_config* out) {
  return guarded([&] {
    require(out, "out");
    const tivm::ExperimentConfig c = tivm::default_config(to_experiment(name));
    tivm_experiment_config r{};
    r.seed = c.seed;
    r.capacity = c.capacity;
    r.channels = c.shape.channels;
    r.height = c.shape.height;
    r.width = c.shape.width;
    r.writes_per_tensor = c.writes_per_tensor;
    r.write_rate = c.write_rate;
    r.read_rate = c.read_rate;
    r.protocol = c.protocol == tivm::WriteProtocol::Tangent ? TIVM_WRITE_TANGENT : TIVM_WRITE_BASELINE;
    r.mode = c.mode == tivm::ReadMode::WTI ? TIVM_READ_WTI : TIVM_READ_WOTI;
    r.repeats = c.repeats;
    r.rate_sweep_count = std::min<std::size_t>(c.rate_sweep.size(), TIVM_MAX_SWEEP);
    std::copy_n(c.rate_sweep.begin(), r.rate_sweep_count, r.rate_sweep);
    r.capacities_count = std::min<std::size_t>(c.capacities.size(), TIVM_MAX_SWEEP);
    std::copy_n(c.capacities.begin(), r.capacities_count, r.capacities);
    *out = r;
  });
}

tivm_status tivm_run_experiment(const char* name, const tivm_experiment_config* config, const char* out_csv) {
  return guarded([&] {
    require(config, "config");
    require(out_csv, "out_csv");
    const tivm::ExperimentKind kind = to_experiment(name);
    tivm::ExperimentConfig c = tivm::default_config(kind);
    c.seed = config->seed;
    c.capacity = config->capacity;
    c.shape = {config->channels, config->height, config->width};
    c.writes_per_tensor = config->writes_per_tensor;
    c.write_rate = config->write_rate;
    c.read_rate = config->read_rate;
    c.protocol = to_protocol(config->protocol);
    c.mode = to_mode(config->mode);
    c.repeats = config->repeats;
    if (config->rate_sweep_count > TIVM_MAX_SWEEP || config->capacities_count > TIVM_MAX_SWEEP)
      tivm::fail(tivm::ErrorCode::InvalidArgument, "sweep lists are limited to 16 entries");
    c.rate_sweep.assign(config->rate_sweep, config->rate_sweep + config->rate_sweep_count);
    c.capacities.assign(config->capacities, config->capacities + config->capacities_count);
    tivm::atomic_write_file(out_csv, tivm::run_experiment_csv(kind, c));
  });
}

}  // extern "C"
