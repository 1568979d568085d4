#ifndef LAZYGIBBS_H
#define LAZYGIBBS_H

/* Generated by cbindgen; do not edit. */

#include <stddef.h>
#include <stdint.h>

/*
 Result codes.
 */
typedef enum LgStatus {
  LG_STATUS_OK = 0,
  LG_STATUS_NULL_POINTER = 1,
  LG_STATUS_INVALID_ARGUMENT = 2,
  LG_STATUS_BUDGET_EXHAUSTED = 3,
  LG_STATUS_CAP_EXCEEDED = 4,
  LG_STATUS_INFEASIBLE = 5,
  LG_STATUS_BUFFER_TOO_SMALL = 6,
  LG_STATUS_INTERNAL = 7,
} LgStatus;

/*
 Lower-bound strategy selector.
 */
typedef enum LgStrategy {
  LG_STRATEGY_EXACT_MIN = 0,
  LG_STRATEGY_MONOTONE = 1,
  LG_STRATEGY_TRIVIAL = 2,
} LgStrategy;

/*
 Opaque sampler; keeps its memo tables between calls.
 */
typedef struct LgSampler LgSampler;

/*
 Opaque spin system.
 */
typedef struct LgSystem LgSystem;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the last failure on this thread, or NULL. Valid until the
 next failing call on the same thread.
 */
const char *lg_last_error(void);

/*
 Ferromagnetic Potts model with `q` spins at inverse temperature `beta`.
 */
enum LgStatus lg_system_potts(uint32_t q, double beta, struct LgSystem **out);

/*
 Ising model with coupling `beta` and field ratio `h`.
 */
enum LgStatus lg_system_ising(double beta, double h, struct LgSystem **out);

/*
 General system: `field` has `q` entries, `interaction` is row-major `q*q`.
 */
enum LgStatus lg_system_new(uint32_t q,
                            const double *field,
                            const double *interaction,
                            struct LgSystem **out);

/*
 Number of spins, or 0 for NULL.
 */
uint32_t lg_system_q(const struct LgSystem *system);

void lg_system_free(struct LgSystem *system);

/*
 Sampler for `system` (copied) with mesh spacing `mesh`.
 */
enum LgStatus lg_sampler_new(const struct LgSystem *system,
                             int64_t mesh,
                             enum LgStrategy strategy,
                             struct LgSampler **out);

void lg_sampler_free(struct LgSampler *sampler);

/*
 Perfect sample of the inclusive window `[x0,x1] x [y0,y1]`.

 Spins are written row-major (increasing `y`, then increasing `x`) into
 `spins`, which must hold `len` bytes. `calls`, if non-NULL, receives the
 number of lazy calls made.
 */
enum LgStatus lg_sampler_sample_window(struct LgSampler *sampler,
                                       int64_t x0,
                                       int64_t y0,
                                       int64_t x1,
                                       int64_t y1,
                                       uint64_t seed,
                                       uint64_t stream,
                                       uint64_t budget,
                                       uint8_t *spins,
                                       uintptr_t len,
                                       uint64_t *calls);

/*
 Lower bounds `p^1..p^q` at mesh vertex `(x, y)` with nothing else known.
 */
enum LgStatus lg_sampler_lower_bounds(struct LgSampler *sampler,
                                      int64_t x,
                                      int64_t y,
                                      double *out,
                                      uintptr_t len);

/*
 Centre-vertex TV distance between the two extreme constant boundaries on
 the `(2l-1)^2` box, for each of the `n` scales in `ells`.
 */
enum LgStatus lg_wsm_probe(const struct LgSystem *system,
                           const uint32_t *ells,
                           uintptr_t n,
                           double *tv);

/*
 Centre probability of spin 1 on the `(2*box_half+1)^2` box under the
 all-0 (`lo`) and all-1 (`hi`) boundaries. Two-spin attractive systems only.
 */
enum LgStatus lg_bracket_bounds(const struct LgSystem *system,
                                uint32_t box_half,
                                double *lo,
                                double *hi);

/*
 `ln(1 + sqrt(q))`.
 */
double lg_critical_beta(uint32_t q);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LAZYGIBBS_H */
