/* C interface to the pmhll tracker. */

#ifndef PMHLL_H
#define PMHLL_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status of an FFI call.
 */
typedef enum PmhllStatus {
  PmhllStatus_Ok = 0,
  /**
   * A required pointer argument was null.
   */
  PmhllStatus_NullArg = 1,
  /**
   * The configuration failed validation.
   */
  PmhllStatus_InvalidConfig = 2,
  /**
   * A non-finite sample reached the engine.
   */
  PmhllStatus_NonFinite = 3,
} PmhllStatus;

/**
 * Opaque engine handle.
 */
typedef struct PmhllEngine PmhllEngine;

/**
 * Engine settings, mirroring the Rust configuration field for field.
 */
typedef struct PmhllConfig {
  /**
   * Sampling frequency, Hz.
   */
  double fs;
  /**
   * Initial oscillator frequency, Hz.
   */
  double fc0;
  double fc_min;
  double fc_max;
  /**
   * Assumed maximum harmonic number.
   */
  uint32_t np;
  double tau_si_mult;
  double tau_hnr_mult;
  double tau_hnr_post_mult;
  double tau_cs_mult;
  double adapt_periods;
} PmhllConfig;

/**
 * Per-sample result.
 */
typedef struct PmhllOutput {
  /**
   * Oscillator frequency after adaptation, Hz.
   */
  double fc_hz;
  /**
   * Smoothed harmonic-to-noise ratio, dB.
   */
  double hnr_db;
  /**
   * Smoothed control signal, radians per sample.
   */
  double cs;
  /**
   * 1 when the period phase wrapped on this sample.
   */
  uint8_t strobe;
  /**
   * 1 when `hnr_db` is above 0.
   */
  uint8_t locked;
} PmhllOutput;

/**
 * Default configuration for a sampling rate and starting frequency.
 */
struct PmhllConfig pmhll_config_default(double fs, double fc0);

/**
 * Create an engine. On success writes the handle to `out` and returns Ok.
 *
 * # Safety
 * `cfg` must point to a valid `PmhllConfig` and `out` to writable storage
 * for one pointer.
 */
enum PmhllStatus pmhll_engine_new(const struct PmhllConfig *cfg, struct PmhllEngine **out);

/**
 * Process one sample and write the result to `out`.
 *
 * # Safety
 * `engine` must be a live handle from `pmhll_engine_new`; `out` must point
 * to writable storage for one `PmhllOutput`.
 */
enum PmhllStatus pmhll_engine_tick(struct PmhllEngine *engine, double x, struct PmhllOutput *out);

/**
 * Process `n` samples. When `outs` is non-null it must hold `n` entries and
 * receives one result per sample. Stops at the first bad sample.
 *
 * # Safety
 * `engine` must be a live handle; `xs` must point to `n` readable samples;
 * `outs` is either null or points to `n` writable `PmhllOutput` entries.
 */
enum PmhllStatus pmhll_engine_process(struct PmhllEngine *engine,
                                      const double *xs,
                                      uintptr_t n,
                                      struct PmhllOutput *outs);

/**
 * Current oscillator frequency, or NaN for a null handle.
 *
 * # Safety
 * `engine` must be null or a live handle.
 */
double pmhll_engine_fc(const struct PmhllEngine *engine);

/**
 * Destroy a handle. Null is ignored.
 *
 * # Safety
 * `engine` must be null or a handle from `pmhll_engine_new`, not yet freed.
 */
void pmhll_engine_free(struct PmhllEngine *engine);

/**
 * Interval of input fundamentals captured at oscillator frequency `fc`
 * with `np` assumed harmonics.
 *
 * # Safety
 * `lo` and `hi` must point to writable doubles.
 */
enum PmhllStatus pmhll_catch_range(double fc, uint32_t np, double *lo, double *hi);

/**
 * Library version as a static C string.
 */
const char *pmhll_version(void);

#endif  /* PMHLL_H */
