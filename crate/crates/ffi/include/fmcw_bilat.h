#ifndef FMCW_BILAT_H
#define FMCW_BILAT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define FMCW_TRACK_TENTATIVE 1

#define FMCW_TRACK_CONFIRMED 2

// Result of every fallible call.
typedef enum FmcwStatus {
  FMCW_STATUS_OK = 0,
  // A required pointer argument was null.
  FMCW_STATUS_NULL_ARGUMENT = 1,
  // A configuration value or argument is out of its valid range.
  FMCW_STATUS_INVALID_CONFIG = 2,
  // The two ranges do not intersect.
  FMCW_STATUS_INFEASIBLE = 3,
  // Malformed or inconsistent input data.
  FMCW_STATUS_DATA = 4,
  FMCW_STATUS_IO = 5,
  FMCW_STATUS_BUFFER_TOO_SMALL = 6,
  // A string argument is not valid UTF-8.
  FMCW_STATUS_INVALID_UTF8 = 7,
  // Internal error; the library caught a panic.
  FMCW_STATUS_INTERNAL = 8,
} FmcwStatus;

// Opaque pipeline configuration.
typedef struct FmcwConfig FmcwConfig;

// Opaque tracker state.
typedef struct FmcwTracker FmcwTracker;

// One pruned detection from a single radar.
typedef struct FmcwDetection {
  // 1 or 2.
  uint8_t radar;
  uint64_t frame_index;
  size_t bin;
  double refined_bin;
  double range_m;
  double intensity;
} FmcwDetection;

// A 2D point from one pair of detections.
typedef struct FmcwCandidate {
  uint64_t frame_index;
  double x_m;
  double y_m;
  double r1_m;
  double r2_m;
  double intensity;
} FmcwCandidate;

// A live track after a tracker step.
typedef struct FmcwTrack {
  uint64_t track_id;
  // `FMCW_TRACK_TENTATIVE` or `FMCW_TRACK_CONFIRMED`.
  uint8_t status;
  double x_m;
  double y_m;
  double vx_m_s;
  double vy_m_s;
} FmcwTrack;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or null after a
// success. Valid until the next library call on the same thread.
const char *fmcw_last_error(void);

// Library version as a static NUL-terminated string.
const char *fmcw_version(void);

// New configuration with every default. Never null.
struct FmcwConfig *fmcw_config_default(void);

// Loads a `key = value` configuration file into a new handle.
//
// # Safety
// `path` must be a NUL-terminated string and `out` valid for one write.
enum FmcwStatus fmcw_config_load(const char *path, struct FmcwConfig **out);

// # Safety
// `config` must be null or a handle from this library not yet freed.
void fmcw_config_free(struct FmcwConfig *config);

// # Safety
// `config` must be a live handle.
enum FmcwStatus fmcw_config_set_seed(struct FmcwConfig *config, uint64_t seed);

// Total complex noise power per sample used by the simulator.
//
// # Safety
// `config` must be a live handle.
enum FmcwStatus fmcw_config_set_noise_power(struct FmcwConfig *config, double noise_power);

// Number of complex samples per chirp, or 0 for a null handle.
//
// # Safety
// `config` must be null or a live handle.
size_t fmcw_config_samples_per_chirp(const struct FmcwConfig *config);

// Range bin width in meters, or NaN for a null handle.
//
// # Safety
// `config` must be null or a live handle.
double fmcw_range_resolution(const struct FmcwConfig *config);

// Largest range the sampled beat spectrum can represent, or NaN for a null handle.
//
// # Safety
// `config` must be null or a live handle.
double fmcw_max_range(const struct FmcwConfig *config);

// Intersects two range circles centred at (0, 0) and (d, 0), upper half plane.
//
// # Safety
// `x_m` and `y_m` must be valid for one write each.
enum FmcwStatus fmcw_bilaterate(double r1_m, double r2_m, double d_m, double *x_m, double *y_m);

// Runs the range FFT and CFAR detector on one chirp.
//
// `samples` holds `n_samples` complex values as interleaved re, im pairs
// (`2 * n_samples` doubles); `n_samples` must equal the configured
// samples per chirp.
//
// # Safety
// `samples` must be valid for `2 * n_samples` reads and `out` for `cap` writes.
enum FmcwStatus fmcw_detect(const struct FmcwConfig *config,
                            uint8_t radar,
                            uint64_t frame_index,
                            const double *samples,
                            size_t n_samples,
                            struct FmcwDetection *out,
                            size_t cap,
                            size_t *out_len);

// New tracker using the configuration's tracker parameters and frame period.
// Returns null for a null handle.
//
// # Safety
// `config` must be null or a live handle.
struct FmcwTracker *fmcw_tracker_new(const struct FmcwConfig *config);

// # Safety
// `tracker` must be null or a handle from this library not yet freed.
void fmcw_tracker_free(struct FmcwTracker *tracker);

// Advances the tracker by one frame and reports every live track.
//
// # Safety
// `candidates` must be valid for `n` reads and `out` for `cap` writes.
enum FmcwStatus fmcw_tracker_step(struct FmcwTracker *tracker,
                                  const struct FmcwCandidate *candidates,
                                  size_t n,
                                  struct FmcwTrack *out,
                                  size_t cap,
                                  size_t *out_len);

// Tracks reported by the most recent step, for retrying with a larger buffer.
//
// # Safety
// `out` must be valid for `cap` writes.
enum FmcwStatus fmcw_tracker_tracks(const struct FmcwTracker *tracker,
                                    struct FmcwTrack *out,
                                    size_t cap,
                                    size_t *out_len);

// Simulates `scene_path` and writes the same files as the CLI `pipeline`
// command into `out_dir`.
//
// # Safety
// `scene_path` and `out_dir` must be NUL-terminated strings.
enum FmcwStatus fmcw_pipeline_run(const struct FmcwConfig *config,
                                  const char *scene_path,
                                  const char *out_dir,
                                  bool include_tentative);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FMCW_BILAT_H */
