#ifndef D3_OFDM_H
#define D3_OFDM_H

#pragma once

/* Generated by cbindgen. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum D3Modulation {
  D3_MODULATION_BPSK = 0,
  D3_MODULATION_QPSK = 1,
  D3_MODULATION_QAM16 = 2,
  D3_MODULATION_QAM64 = 3,
} D3Modulation;

typedef enum D3Receiver {
  D3_RECEIVER_CONVENTIONAL = 0,
  D3_RECEIVER_D3 = 1,
} D3Receiver;

typedef enum D3SegmentMode {
  D3_SEGMENT_MODE_SINGLE = 0,
  D3_SEGMENT_MODE_DOUBLE = 1,
} D3SegmentMode;

/**
 * Result of every fallible call.
 */
typedef enum D3Status {
  D3_STATUS_OK = 0,
  D3_STATUS_NULL_POINTER = 1,
  D3_STATUS_INVALID_ARGUMENT = 2,
  D3_STATUS_LENGTH_MISMATCH = 3,
  D3_STATUS_BUFFER_TOO_SMALL = 4,
  D3_STATUS_CONFIG = 5,
  D3_STATUS_IO = 6,
  D3_STATUS_INTERNAL = 7,
} D3Status;

/**
 * Segment D³ detector for one OFDM symbol layout.
 */
typedef struct D3Detector D3Detector;

/**
 * Parsed and validated Monte Carlo experiment.
 */
typedef struct D3Experiment D3Experiment;

/**
 * Real additions, multiplications and divisions.
 */
typedef struct D3OpCounts {
  uint64_t additions;
  uint64_t multiplications;
  uint64_t divisions;
} D3OpCounts;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Length of the last error message in bytes, excluding the terminator;
 * 0 when the last call succeeded.
 */
uintptr_t d3_last_error_length(void);

/**
 * Copies the last error message, NUL-terminated and truncated to fit, into
 * `buf`. Returns the number of bytes written without the terminator.
 */
uintptr_t d3_last_error_message(char *buf, uintptr_t len);

/**
 * Library version as a static NUL-terminated string.
 */
const char *d3_version(void);

/**
 * Creates a detector for `n` subcarriers split into segments of length `k`.
 */
enum D3Status d3_detector_new(uintptr_t n,
                              uintptr_t k,
                              enum D3SegmentMode mode,
                              enum D3Modulation modulation,
                              struct D3Detector **out);

void d3_detector_free(struct D3Detector *det);

/**
 * Number of data subcarriers per symbol, i.e. the output length of
 * [`d3_detector_detect`]. Returns 0 for a null handle.
 */
uintptr_t d3_detector_data_count(const struct D3Detector *det);

/**
 * Decides one OFDM symbol. `rx` holds `n` frequency-domain samples as
 * interleaved (re, im) pairs; the pilots are assumed to be 1. The decided
 * constellation indices (bit labels) of the data cells are written to `out`
 * in subcarrier order.
 */
enum D3Status d3_detector_detect(const struct D3Detector *det,
                                 const double *rx,
                                 uintptr_t n,
                                 uint32_t *out,
                                 uintptr_t out_len);

/**
 * Real-operation counts of one receiver for `n` subcarriers with `n_p`
 * pilots and `m` bits per symbol under the constant-modulus model.
 */
enum D3Status d3_complexity(enum D3Receiver receiver,
                            uint64_t n,
                            uint64_t n_p,
                            uint64_t m,
                            struct D3OpCounts *out);

/**
 * Parses and validates a JSON experiment configuration.
 */
enum D3Status d3_experiment_from_json(const char *json, struct D3Experiment **out);

void d3_experiment_free(struct D3Experiment *exp);

/**
 * Runs the experiment on `workers` threads (0 = all cores) and returns the
 * results as CSV in `*csv_out`. Release the string with [`d3_string_free`].
 */
enum D3Status d3_experiment_run(const struct D3Experiment *exp, uintptr_t workers, char **csv_out);

/**
 * Frees a string returned by this library.
 */
void d3_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* D3_OFDM_H */
