#ifndef WHLAB_H
#define WHLAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum WhlabStatus {
  WHLAB_STATUS_OK = 0,
  WHLAB_STATUS_NULL_POINTER = 1,
  WHLAB_STATUS_INVALID_ARGUMENT = 2,
  WHLAB_STATUS_CONFIG = 3,
  WHLAB_STATUS_NUMERICAL = 4,
  WHLAB_STATUS_IO = 5,
  WHLAB_STATUS_PANIC = 6,
} WhlabStatus;

typedef enum WhlabModel {
  WHLAB_MODEL_SYK = 0,
  WHLAB_MODEL_PG_COMMUTING = 1,
} WhlabModel;

typedef enum WhlabInteraction {
  WHLAB_INTERACTION_V = 0,
  WHLAB_INTERACTION_VB = 1,
} WhlabInteraction;

/**
 * Sampled couplings of one instantiation.
 */
typedef struct WhlabCouplings WhlabCouplings;

/**
 * Teleportation protocol bound to one instantiation, temperature and interaction.
 */
typedef struct WhlabProtocol WhlabProtocol;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *whlab_version(void);

/**
 * Copy the calling thread's last error message into `buf` (NUL-terminated,
 * truncated to `len`). Returns the full message length in bytes, 0 if none.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
uintptr_t whlab_last_error(char *buf, uintptr_t len);

/**
 * Sample one instantiation.
 *
 * # Safety
 * `out` must be a valid pointer; on success it receives a handle to free
 * with [`whlab_couplings_free`].
 */
enum WhlabStatus whlab_couplings_sample(enum WhlabModel model,
                                        uintptr_t n,
                                        uintptr_t q,
                                        double scale,
                                        uint64_t seed,
                                        struct WhlabCouplings **out);

/**
 * Number of Majoranas per side.
 *
 * # Safety
 * `c` must be null or a live handle.
 */
uintptr_t whlab_couplings_n(const struct WhlabCouplings *c);

/**
 * # Safety
 * `c` must be null or a handle not yet freed.
 */
void whlab_couplings_free(struct WhlabCouplings *c);

/**
 * Prepare the protocol for one instantiation.
 *
 * # Safety
 * `c` must be a live couplings handle and `out` a valid pointer; on success
 * `*out` must later be released with [`whlab_protocol_free`].
 */
enum WhlabStatus whlab_protocol_new(const struct WhlabCouplings *c,
                                    double beta,
                                    enum WhlabInteraction interaction,
                                    struct WhlabProtocol **out);

/**
 * Renyi-2 `I(R:T)` in bits with a single interaction slice at `t = 0`.
 *
 * # Safety
 * `p` must be a live protocol handle and `out` a valid pointer.
 */
enum WhlabStatus whlab_protocol_mutual_information(const struct WhlabProtocol *p,
                                                   double t0,
                                                   double t1,
                                                   double mu,
                                                   double *out);

/**
 * # Safety
 * `p` must be null or a handle not yet freed.
 */
void whlab_protocol_free(struct WhlabProtocol *p);

/**
 * `2 log2(1 + sin^2 mu)`
 */
double whlab_warmup_mutual_information(double mu);

/**
 * Ground energy and gap of `H_L + H_R + mu V`.
 *
 * # Safety
 * `c` must be a live handle; `e0` and `gap` valid pointers.
 */
enum WhlabStatus whlab_eternal_gap(const struct WhlabCouplings *c,
                                   enum WhlabInteraction interaction,
                                   double mu,
                                   double *e0,
                                   double *gap);

/**
 * Run the experiment described by a TOML file. The artifact directory is
 * written to `dir_buf` (NUL-terminated, truncated to `dir_len`); pass null
 * to skip. `out_root` may be null to use the config's `output` or `out`.
 *
 * # Safety
 * `config_path` must be a NUL-terminated string; `out_root` null or one;
 * `dir_buf` null or `dir_len` writable bytes.
 */
enum WhlabStatus whlab_run_experiment(const char *config_path,
                                      const char *out_root,
                                      char *dir_buf,
                                      uintptr_t dir_len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WHLAB_H */
