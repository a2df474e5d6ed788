#ifndef RELGODUNOV_H
#define RELGODUNOV_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum RgStatus {
  RG_STATUS_OK = 0,
  RG_STATUS_NULL_POINTER = 1,
  RG_STATUS_INVALID_ARGUMENT = 2,
  RG_STATUS_DOMAIN = 3,
  RG_STATUS_SUPERLUMINAL = 4,
  RG_STATUS_NON_CONVERGENCE = 5,
  RG_STATUS_NO_ROOT = 6,
  RG_STATUS_UNPHYSICAL = 7,
  RG_STATUS_UNSUPPORTED = 8,
  RG_STATUS_PANIC = 9,
} RgStatus;

// Barotropic equation of state together with its index function.
typedef struct RgBarotrope RgBarotrope;

// Ideal gas `e(n, sigma) = m + k n^(gamma - 1) exp(sigma / c_v)`.
typedef struct RgIdealGas RgIdealGas;

typedef struct RgShock {
  double p_minus;
  double p_plus;
  // Shock-frame speeds of the upstream and downstream states.
  double v_minus;
  double v_plus;
  // `[nu W v]` across the front.
  double production;
  // Largest relative jump residual.
  double residual;
  // 1 when Lax admissible.
  int32_t lax;
  // 1 when the front is linearly degenerate (stiff fluid).
  int32_t linearly_degenerate;
} RgShock;

typedef struct RgIdealShock {
  double p_minus;
  double p_plus;
  double n_plus;
  double sigma_plus;
  double v_plus;
  // `n W v (sigma_+ - sigma_-)`.
  double entropy_production;
  double residual;
} RgIdealShock;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or NULL. The pointer is
// valid until the next call into this library on the same thread.
const char *rg_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *rg_version(void);

// `rho = p / (gamma - 1)`, `1 < gamma <= 2`; the index is 1 at `p_ref`.
//
// # Safety
// `out_handle` must be null or writable.
enum RgStatus rg_barotrope_new_gamma_law(double gamma,
                                         double p_ref,
                                         struct RgBarotrope **out_handle);

// Barotrope of the isentropic fluid `e(n) = m + kappa n^(gamma - 1)`.
//
// # Safety
// `out_handle` must be null or writable.
enum RgStatus rg_barotrope_new_polytrope(double m,
                                         double kappa,
                                         double gamma,
                                         double p_ref,
                                         struct RgBarotrope **out_handle);

// Monotone table of `n` rows `(p[i], rho[i])`.
//
// # Safety
// `p` and `rho` must point to `n` readable doubles.
enum RgStatus rg_barotrope_new_tabulated(const double *p,
                                         const double *rho,
                                         size_t n,
                                         double p_ref,
                                         struct RgBarotrope **out_handle);

// # Safety
// `h` must come from an `rg_barotrope_new_*` call and not be freed twice.
void rg_barotrope_free(struct RgBarotrope *h);

// Energy density `rho_hat(p)`.
//
// # Safety
// `h` must be a live handle and `out_value` writable.
enum RgStatus rg_barotrope_rho(const struct RgBarotrope *h, double p, double *out_value);

// Sound speed at pressure `p`.
//
// # Safety
// `h` must be a live handle and `out_value` writable.
enum RgStatus rg_barotrope_sound_speed(const struct RgBarotrope *h, double p, double *out_value);

// Index `f(p)`.
//
// # Safety
// `h` must be a live handle and `out_value` writable.
enum RgStatus rg_index_f(const struct RgBarotrope *h, double p, double *out_value);

// `nu(p) = (rho + p) / f`.
//
// # Safety
// `h` must be a live handle and `out_value` writable.
enum RgStatus rg_index_nu(const struct RgBarotrope *h, double p, double *out_value);

// Pressure `pi(f)`, the inverse of the index.
//
// # Safety
// `h` must be a live handle and `out_value` writable.
enum RgStatus rg_index_pi(const struct RgBarotrope *h, double f, double *out_value);

// `|f'(p) (rho + p) - f| / f`.
//
// # Safety
// `h` must be a live handle and `out_value` writable.
enum RgStatus rg_index_ode_residual(const struct RgBarotrope *h, double p, double *out_value);

// Godunov covector `Upsilon_a = U_a / f(p)` for pressure `p` and 3-velocity `v`.
//
// # Safety
// `v` must point to 3 doubles and `out_upsilon` to 4 writable doubles.
enum RgStatus rg_to_godunov4(const struct RgBarotrope *h,
                             double p,
                             const double *v,
                             double *out_upsilon);

// Pressure and 3-velocity from a Godunov covector.
//
// # Safety
// `upsilon` must point to 4 doubles, `out_p` to 1 and `out_v` to 3 writable doubles.
enum RgStatus rg_from_godunov4(const struct RgBarotrope *h,
                               const double *upsilon,
                               double *out_p,
                               double *out_v);

// Flux tensor `T^{ab}` (row-major 4x4, contravariant) of a Godunov covector.
//
// # Safety
// `upsilon` must point to 4 doubles and `out_t` to 16 writable doubles.
enum RgStatus rg_flux4(const struct RgBarotrope *h, const double *upsilon, double *out_t);

// Additional conserved current `nu U^a` of a Godunov covector.
//
// # Safety
// `upsilon` must point to 4 doubles and `out_current` to 4 writable doubles.
enum RgStatus rg_extra_current4(const struct RgBarotrope *h,
                                const double *upsilon,
                                double *out_current);

// Shock joining upstream pressure `p_minus` to downstream `p_plus`.
//
// # Safety
// `h` must be a live handle and `out_shock` writable.
enum RgStatus rg_shock_barotropic(const struct RgBarotrope *h,
                                  double p_minus,
                                  double p_plus,
                                  struct RgShock *out_shock);

// # Safety
// `out_handle` must be null or writable.
enum RgStatus rg_ideal_gas_new(double m,
                               double k,
                               double c_v,
                               double gamma,
                               struct RgIdealGas **out_handle);

// # Safety
// `h` must come from [`rg_ideal_gas_new`] and not be freed twice.
void rg_ideal_gas_free(struct RgIdealGas *h);

// Generating function `X_hat(theta, psi_4)`, equal to the pressure.
//
// # Safety
// `h` must be a live handle and `out_value` writable.
enum RgStatus rg_ideal_gas_xhat(const struct RgIdealGas *h,
                                double theta,
                                double psi4,
                                double *out_value);

// Shock with upstream `(n_minus, sigma_minus)` entering at speed `v_minus`.
//
// # Safety
// `h` must be a live handle and `out_shock` writable.
enum RgStatus rg_ideal_gas_shock(const struct RgIdealGas *h,
                                 double n_minus,
                                 double sigma_minus,
                                 double v_minus,
                                 struct RgIdealShock *out_shock);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RELGODUNOV_H */
