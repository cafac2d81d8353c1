#ifndef TIVM_TIVM_H
#define TIVM_TIVM_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  ifdef TIVM_BUILDING_LIBRARY
#    define TIVM_API __declspec(dllexport)
#  else
#    define TIVM_API __declspec(dllimport)
#  endif
#else
#  define TIVM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Every function returns a status; on failure tivm_last_error() holds a
 * message for the calling thread and output parameters are left untouched. */
typedef enum tivm_status {
  TIVM_OK = 0,
  TIVM_E_INVALID_ARGUMENT = 1,
  TIVM_E_INVALID_CAPACITY = 2,
  TIVM_E_INVALID_RATE = 3,
  TIVM_E_SHAPE_MISMATCH = 4,
  TIVM_E_DEGENERATE_NORM = 5,
  TIVM_E_EMPTY_SEQUENCE = 6,
  TIVM_E_IO = 7,
  TIVM_E_FORMAT = 8,
  TIVM_E_NON_FINITE_DATA = 9,
  TIVM_E_LABEL_MISMATCH = 10,
  TIVM_E_SHAPE_INCONSISTENT = 11,
  TIVM_E_IMAGE_TOO_SMALL = 12,
  TIVM_E_INDEX_OUT_OF_RANGE = 13,
  TIVM_E_LENGTH_MISMATCH = 14,
  TIVM_E_INTERNAL = 15
} tivm_status;

typedef enum tivm_read_mode { TIVM_READ_WTI = 0, TIVM_READ_WOTI = 1 } tivm_read_mode;

typedef enum tivm_write_protocol { TIVM_WRITE_TANGENT = 0, TIVM_WRITE_BASELINE = 1 } tivm_write_protocol;

typedef enum tivm_extractor_kind {
  TIVM_EXTRACT_PRECOMPUTED = 0, /* directory of .fcb cubes */
  TIVM_EXTRACT_GRIDPOOL = 1,    /* directory of P5 .pgm images */
  TIVM_EXTRACT_RANDPROJ = 2     /* synthesized, see tivm_sequence_synthesize */
} tivm_extractor_kind;

typedef struct tivm_cube tivm_cube;
typedef struct tivm_bank tivm_bank;
typedef struct tivm_sequence tivm_sequence;

typedef struct tivm_bank_info {
  size_t capacity;
  size_t channels;
  size_t height;
  size_t width;
  uint64_t seed;
  double write_rate;
  double read_rate;
} tivm_bank_info;

typedef struct tivm_extractor {
  tivm_extractor_kind kind;
  size_t grid_height;
  size_t grid_width;
  size_t channels; /* randproj only; gridpool always yields 3 */
  uint64_t seed;
} tivm_extractor;

typedef struct tivm_online_params {
  double read_rate;
  double write_rate;
  tivm_read_mode mode;
} tivm_online_params;

#define TIVM_MAX_SWEEP 16

typedef struct tivm_experiment_config {
  uint64_t seed;
  size_t capacity;
  size_t channels;
  size_t height;
  size_t width;
  size_t writes_per_tensor;
  double write_rate;
  double read_rate;
  tivm_write_protocol protocol;
  tivm_read_mode mode;
  size_t repeats;
  size_t rate_sweep_count;
  double rate_sweep[TIVM_MAX_SWEEP];
  size_t capacities_count;
  size_t capacities[TIVM_MAX_SWEEP];
} tivm_experiment_config;

TIVM_API const char* tivm_version(void);
TIVM_API const char* tivm_status_name(tivm_status status);
TIVM_API const char* tivm_last_error(void);

/* Cubes: c x h x w floats, channel-major then row-major. */
TIVM_API tivm_status tivm_cube_create(size_t channels, size_t height, size_t width, const float* values,
                                      tivm_cube** out);
TIVM_API tivm_status tivm_cube_load(const char* path, tivm_cube** out);
TIVM_API tivm_status tivm_cube_save(const tivm_cube* cube, const char* path);
TIVM_API void tivm_cube_free(tivm_cube* cube);
TIVM_API tivm_status tivm_cube_shape(const tivm_cube* cube, size_t* channels, size_t* height, size_t* width);
/* Borrowed pointer, valid until the cube is freed. */
TIVM_API const float* tivm_cube_data(const tivm_cube* cube);
TIVM_API tivm_status tivm_cube_translate(const tivm_cube* cube, size_t dy, size_t dx, tivm_cube** out);
TIVM_API tivm_status tivm_cube_randproj(const tivm_extractor* spec, uint64_t frame_id, tivm_cube** out);

TIVM_API tivm_status tivm_cosine(const tivm_cube* a, const tivm_cube* b, double* out);
/* Best cosine over all circular shifts of m; (dy, dx) is the shift applied to m. */
TIVM_API tivm_status tivm_xcorr(const tivm_cube* x, const tivm_cube* m, double* score, size_t* dy, size_t* dx);
TIVM_API tivm_status tivm_channel_confidence(const tivm_cube* a, const tivm_cube* b, double* out);

/* Memory banks. */
TIVM_API tivm_status tivm_bank_create(size_t capacity, size_t channels, size_t height, size_t width, uint64_t seed,
                                      double write_rate, double read_rate, tivm_bank** out);
TIVM_API tivm_status tivm_bank_load(const char* path, tivm_bank** out);
TIVM_API tivm_status tivm_bank_save(const tivm_bank* bank, const char* path);
TIVM_API void tivm_bank_free(tivm_bank* bank);
TIVM_API tivm_status tivm_bank_info_get(const tivm_bank* bank, tivm_bank_info* out);
TIVM_API tivm_status tivm_bank_set_rates(tivm_bank* bank, double write_rate, double read_rate);
TIVM_API tivm_status tivm_bank_cube(const tivm_bank* bank, size_t index, tivm_cube** out);
/* rate <= 0 selects the bank's write rate. */
TIVM_API tivm_status tivm_bank_write(tivm_bank* bank, const tivm_cube* x, tivm_write_protocol protocol, double rate);
/* rate <= 0 selects the bank's read rate. recall and weights (capacity
 * entries) may be NULL. */
TIVM_API tivm_status tivm_bank_read(const tivm_bank* bank, const tivm_cube* x, tivm_read_mode mode, double rate,
                                    double* confidence, tivm_cube** recall, double* weights);

/* Frame sequences. labels_csv may be NULL. */
TIVM_API tivm_status tivm_sequence_load(const char* dir, const char* labels_csv, const tivm_extractor* spec,
                                        tivm_sequence** out);
TIVM_API tivm_status tivm_sequence_synthesize(const tivm_extractor* spec, size_t count, tivm_sequence** out);
TIVM_API void tivm_sequence_free(tivm_sequence* seq);
TIVM_API size_t tivm_sequence_length(const tivm_sequence* seq);
TIVM_API tivm_status tivm_sequence_frame(const tivm_sequence* seq, size_t index, tivm_cube** out);
TIVM_API int tivm_sequence_has_labels(const tivm_sequence* seq);
/* Copies tivm_sequence_length() labels into out. */
TIVM_API tivm_status tivm_sequence_labels(const tivm_sequence* seq, uint8_t* out);

/* Learning loops. Output buffers may be NULL; epoch_confidence needs
 * max_epochs entries, interest/confidence one per frame. CSV paths may be
 * NULL and are written atomically. */
TIVM_API tivm_status tivm_short_term_train(tivm_bank* bank, const tivm_sequence* seq, size_t max_epochs,
                                           double threshold, size_t* epochs_run, int* converged,
                                           double* epoch_confidence, const char* report_csv);
TIVM_API tivm_status tivm_online_run(tivm_bank* bank, const tivm_sequence* seq, const tivm_online_params* params,
                                     double* interest, double* confidence, const char* scores_csv);

/* Online precision curve. s (length entries) may be NULL. */
TIVM_API tivm_status tivm_auc_op(const double* preds, const uint8_t* labels, size_t length, double delta, double* s,
                                 double* auc);
/* Aligns a scores CSV with a labels CSV on frame_index, writes the curve
 * CSV to out_csv (may be NULL) and reports the AUC. */
TIVM_API tivm_status tivm_eval_files(const char* scores_csv, const char* labels_csv, double delta,
                                     const char* out_csv, double* auc);

/* Experiments: "sparsity", "capacity", "invariance", "decay". */
TIVM_API tivm_status tivm_experiment_config_default(const char* name, tivm_experiment_config* out);
TIVM_API tivm_status tivm_run_experiment(const char* name, const tivm_experiment_config* config,
                                         const char* out_csv);

#ifdef __cplusplus
}
#endif

#endif
