//! The Lichnerowicz index `f(p) = exp ∫ dp / (rho_hat(p) + p)` of a barotropic
//! fluid, its inverse `pi = f^-1`, the conserved density `nu = (rho_hat + p) / f`
//! and the scalar generating function `X_hat(f) = ∫ pi(f) f^-3 df`.
//!
//! `f` is fixed only up to a positive factor; an [`IndexFunction`] pins it by
//! `f(p_ref) = scale`. The default is `scale = 1`; for isentropic fluids
//! [`IndexFunction::enthalpy_calibrated`] chooses the scale so that `f = h`.

use crate::eos::{BarotropicEos, IsentropicEos, ProductFormEos, Thermo};
use crate::error::{Error, Result};
use crate::numerics;

const QUAD_RTOL: f64 = 1e-13;
const QUAD_ATOL: f64 = 1e-15;
/// Spacing of cached samples in `ln p`.
const SAMPLE_STEP: f64 = 0.5;
/// Cached samples cover `p_ref * exp(±SAMPLE_SPAN)` when the interval is unbounded.
const SAMPLE_SPAN: f64 = 28.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndexMode {
    /// `f = scale (p / p_ref)^((gamma-1)/gamma)`; gamma-law only.
    ClosedForm,
    /// Adaptive Gauss-Kronrod in `ln p`.
    Quadrature,
}

#[derive(Debug, Clone)]
pub struct IndexFunction {
    eos: BarotropicEos,
    p_ref: f64,
    scale: f64,
    mode: IndexMode,
    /// `(ln p, ln(f / scale))`, ascending.
    samples: Vec<(f64, f64)>,
}

impl IndexFunction {
    /// Index normalised by `f(p_ref) = 1`; closed form when available.
    pub fn new(eos: BarotropicEos, p_ref: f64) -> Result<Self> {
        let mode = if eos.gamma().is_some() {
            IndexMode::ClosedForm
        } else {
            IndexMode::Quadrature
        };
        Self::with_mode(eos, p_ref, 1.0, mode)
    }

    pub fn with_mode(eos: BarotropicEos, p_ref: f64, scale: f64, mode: IndexMode) -> Result<Self> {
        eos.interval.check("p_ref", p_ref)?;
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::Config(format!("index scale {scale} must be positive")));
        }
        if mode == IndexMode::ClosedForm && eos.gamma().is_none() {
            return Err(Error::Unsupported(format!(
                "closed-form index needs a gamma-law barotrope, got {}",
                eos.label
            )));
        }
        let mut idx = Self {
            eos,
            p_ref,
            scale,
            mode,
            samples: Vec::new(),
        };
        if mode == IndexMode::Quadrature {
            idx.build_samples()?;
        }
        Ok(idx)
    }

    /// For an isentropic fluid: index on the induced barotrope scaled so that
    /// `f(p(n)) = h(n)`, anchored at `n_ref`.
    pub fn enthalpy_calibrated(eos: &IsentropicEos, n_ref: f64, mode: IndexMode) -> Result<Self> {
        let s = eos.props(n_ref)?;
        Self::with_mode(eos.barotrope(), s.p, s.h, mode)
    }

    pub fn eos(&self) -> &BarotropicEos {
        &self.eos
    }

    pub fn p_ref(&self) -> f64 {
        self.p_ref
    }

    /// `f(p_ref)`.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn mode(&self) -> IndexMode {
        self.mode
    }

    fn integrand(&self, s: f64) -> f64 {
        let q = s.exp();
        q / (self.eos.eval_unchecked(q).0 + q)
    }

    fn integrate_log(&self, from: f64, to: f64) -> Result<f64> {
        Ok(numerics::integrate(|s| self.integrand(s), from, to, QUAD_RTOL, QUAD_ATOL)?.value)
    }

    fn build_samples(&mut self) -> Result<()> {
        let center = self.p_ref.ln();
        let lo = if self.eos.interval.lo > 0.0 {
            self.eos.interval.lo.ln()
        } else {
            center - SAMPLE_SPAN
        }
        .max(center - SAMPLE_SPAN);
        let hi = self.eos.interval.hi.ln().min(center + SAMPLE_SPAN);
        let mut up = vec![(center, 0.0)];
        let mut s = center;
        let mut acc = 0.0;
        while s < hi {
            let next = (s + SAMPLE_STEP).min(hi);
            acc += self.integrate_log(s, next)?;
            up.push((next, acc));
            s = next;
        }
        let mut down = Vec::new();
        s = center;
        acc = 0.0;
        while s > lo {
            let next = (s - SAMPLE_STEP).max(lo);
            acc += self.integrate_log(s, next)?;
            down.push((next, acc));
            s = next;
        }
        down.reverse();
        down.extend(up);
        self.samples = down;
        Ok(())
    }

    /// Nearest cached sample to `ln p`.
    fn anchor(&self, lp: f64) -> (f64, f64) {
        let k = self.samples.partition_point(|&(s, _)| s < lp);
        let cands = [k.saturating_sub(1), k.min(self.samples.len() - 1)];
        cands
            .into_iter()
            .map(|i| self.samples[i])
            .min_by(|a, b| (a.0 - lp).abs().total_cmp(&(b.0 - lp).abs()))
            .expect("samples non-empty")
    }

    /// `ln(f(p) / scale)` without a domain check.
    fn log_ratio(&self, p: f64) -> Result<f64> {
        match self.mode {
            IndexMode::ClosedForm => {
                let g = self.eos.gamma().expect("checked at construction");
                Ok((g - 1.0) / g * (p / self.p_ref).ln())
            }
            IndexMode::Quadrature => {
                let lp = p.ln();
                let (s0, l0) = self.anchor(lp);
                Ok(l0 + self.integrate_log(s0, lp)?)
            }
        }
    }

    /// `f(p)`.
    pub fn index_f(&self, p: f64) -> Result<f64> {
        self.eos.interval.check("p", p)?;
        Ok(self.scale * self.log_ratio(p)?.exp())
    }

    /// `f'(p) = f / (rho_hat + p)`.
    pub fn f_prime(&self, p: f64) -> Result<f64> {
        let f = self.index_f(p)?;
        Ok(f / (self.eos.eval_unchecked(p).0 + p))
    }

    /// `nu(p) = (rho_hat(p) + p) / f(p) = 1 / f'(p)`.
    pub fn nu(&self, p: f64) -> Result<f64> {
        let f = self.index_f(p)?;
        let w = self.eos.eval_unchecked(p).0 + p;
        let nu = w / f;
        let fp = f / w;
        let achieved = (nu * fp - 1.0).abs();
        if achieved >= 1e-8 {
            return Err(Error::NonConvergence {
                what: "nu self-check",
                achieved,
            });
        }
        Ok(nu)
    }

    /// Range of `f` over the valid pressure interval.
    pub fn f_range(&self) -> (f64, f64) {
        let iv = self.eos.interval;
        let at = |p: f64| -> f64 {
            if p <= 0.0 {
                0.0
            } else if p.is_infinite() {
                f64::INFINITY
            } else {
                self.log_ratio(p).map(|l| self.scale * l.exp()).unwrap_or(f64::NAN)
            }
        };
        (at(iv.lo), at(iv.hi))
    }

    fn out_of_range(&self, fval: f64) -> Error {
        let (lo, hi) = self.f_range();
        Error::domain("f", fval, lo, hi)
    }

    /// `pi(f)`: the pressure whose index is `fval`.
    pub fn pi_of_f(&self, fval: f64) -> Result<f64> {
        if !(fval > 0.0 && fval.is_finite()) {
            return Err(self.out_of_range(fval));
        }
        let target = (fval / self.scale).ln();
        let p = match self.mode {
            IndexMode::ClosedForm => {
                let g = self.eos.gamma().expect("checked at construction");
                self.p_ref * (target * g / (g - 1.0)).exp()
            }
            IndexMode::Quadrature => self.invert_log_ratio(target)?,
        };
        if !self.eos.interval.contains(p) {
            return Err(self.out_of_range(fval));
        }
        Ok(p)
    }

    fn invert_log_ratio(&self, target: f64) -> Result<f64> {
        let first = self.samples[0];
        let last = *self.samples.last().expect("non-empty");
        let (mut a, mut b);
        if target < first.1 || target > last.1 {
            let iv = self.eos.interval;
            // extend geometrically beyond the cache when the interval allows it
            let (start, dir, bound) = if target < first.1 {
                (first, -1.0, if iv.lo > 0.0 { iv.lo.ln() } else { f64::NEG_INFINITY })
            } else {
                (last, 1.0, iv.hi.ln())
            };
            if start.0 == bound {
                return Err(self.out_of_range(self.scale * target.exp()));
            }
            let (mut s, mut l) = start;
            let mut step = SAMPLE_STEP;
            loop {
                let next = if dir > 0.0 { (s + step).min(bound) } else { (s - step).max(bound) };
                if !next.is_finite() {
                    return Err(self.out_of_range(self.scale * target.exp()));
                }
                let ln = l + self.integrate_log(s, next)?;
                if (dir > 0.0 && ln >= target) || (dir < 0.0 && ln <= target) {
                    a = s.min(next);
                    b = s.max(next);
                    break;
                }
                if next == bound {
                    return Err(self.out_of_range(self.scale * target.exp()));
                }
                s = next;
                l = ln;
                step *= 2.0;
            }
        } else {
            let k = self.samples.partition_point(|&(_, l)| l < target);
            let k = k.clamp(1, self.samples.len() - 1);
            a = self.samples[k - 1].0;
            b = self.samples[k].0;
        }
        if a == b {
            return Ok(a.exp());
        }
        // clamp closed table ends so the root finder stays inside
        a = a.max(self.eos.interval.lo.max(f64::MIN_POSITIVE).ln());
        b = b.min(self.eos.interval.hi.ln());
        let mut err = None;
        let s = numerics::brent(
            |s| match self.log_ratio(s.exp()) {
                Ok(l) => l - target,
                Err(e) => {
                    err = Some(e);
                    f64::NAN
                }
            },
            a,
            b,
            1e-15,
        );
        if let Some(e) = err {
            return Err(e);
        }
        Ok(s?.exp())
    }

    /// `pi'(f) = (rho_hat(pi) + pi) / f`.
    pub fn pi_prime(&self, fval: f64) -> Result<f64> {
        let p = self.pi_of_f(fval)?;
        Ok((self.eos.eval_unchecked(p).0 + p) / fval)
    }

    /// `X_hat(f) = ∫_{f(p_ref)}^{f} pi(g) g^-3 dg`, so `X_hat(f(p_ref)) = 0`.
    ///
    /// Integrated in `ln q` over pressures, where the integrand becomes
    /// `q^2 / (f(q)^2 (rho_hat(q) + q))`.
    pub fn xhat_of_f(&self, fval: f64) -> Result<f64> {
        let p = self.pi_of_f(fval)?;
        let mut err = None;
        let q = numerics::integrate(
            |s| {
                let q = s.exp();
                match self.log_ratio(q) {
                    Ok(l) => {
                        let f = self.scale * l.exp();
                        q * q / (f * f * (self.eos.eval_unchecked(q).0 + q))
                    }
                    Err(e) => {
                        err = Some(e);
                        f64::NAN
                    }
                }
            },
            self.p_ref.ln(),
            p.ln(),
            1e-12,
            1e-300,
        );
        if let Some(e) = err {
            return Err(e);
        }
        Ok(q?.value)
    }

    /// `X_hat'(f) = pi(f) / f^3`.
    pub fn xhat_prime(&self, fval: f64) -> Result<f64> {
        Ok(self.pi_of_f(fval)? / (fval * fval * fval))
    }

    /// `|f'(p) (rho_hat + p) - f| / f` with `f'` by central differences.
    pub fn ode_residual(&self, p: f64) -> Result<f64> {
        let f = self.index_f(p)?;
        let fp = rel_central_diff(|x| self.index_f(x), p)?;
        Ok((fp * (self.eos.eval_unchecked(p).0 + p) - f).abs() / f)
    }

    /// `|nu(p) f'(p) - 1|` with `f'` by central differences.
    pub fn nu_fprime_residual(&self, p: f64) -> Result<f64> {
        let fp = rel_central_diff(|x| self.index_f(x), p)?;
        Ok((self.nu(p)? * fp - 1.0).abs())
    }
}

/// Five-point central difference with step `eps^(1/5) |x|`, for strictly
/// positive arguments such as pressures.
pub fn rel_central_diff<F: FnMut(f64) -> Result<f64>>(mut f: F, x: f64) -> Result<f64> {
    let h = f64::EPSILON.powf(0.2) * x.abs();
    let (a, b, c, d) = (f(x + 2.0 * h)?, f(x + h)?, f(x - h)?, f(x - 2.0 * h)?);
    Ok((8.0 * (b - c) - (a - d)) / (12.0 * h))
}

/// `|c f(p(n)) - h(n)| / h(n)` with `c = h(n_ref) / f(p(n_ref))`.
pub fn enthalpy_index_residual(
    eos: &IsentropicEos,
    idx: &IndexFunction,
    n: f64,
    n_ref: f64,
) -> Result<f64> {
    let s_ref = eos.props(n_ref)?;
    let c = s_ref.h / idx.index_f(s_ref.p)?;
    let s = eos.props(n)?;
    Ok((c * idx.index_f(s.p)? - s.h).abs() / s.h)
}

/// Legendre duality between density and pressure, with `f = h`:
/// `max(|rho(n) + pi(h) - n h|, |pi'(h) - n|)`, `pi'` by central differences.
pub fn legendre_residual(eos: &IsentropicEos, idx: &IndexFunction, n: f64) -> Result<f64> {
    let s = eos.props(n)?;
    let dual = (s.rho + idx.pi_of_f(s.h)? - n * s.h).abs();
    let slope = rel_central_diff(|h| idx.pi_of_f(h), s.h)?;
    Ok(dual.max((slope - n).abs()))
}

/// `|nu(p(n)) - n| / n`.
pub fn nu_equals_n_residual(eos: &IsentropicEos, idx: &IndexFunction, n: f64) -> Result<f64> {
    let s = eos.props(n)?;
    Ok((idx.nu(s.p)? - n).abs() / n)
}

/// Grid summary for a product-form fluid `e = n^(gamma-1) r(sigma)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductFormReport {
    pub points: usize,
    /// Relative spread of `f / theta` over the grid.
    pub f_over_theta_spread: f64,
    /// Relative spread of `nu / (n sigma)` over the grid.
    pub nu_over_entropy_spread: f64,
    /// Worst `|sigma(n, p) - sigma|` when recovering entropy from pressure.
    pub sigma_recovery_error: f64,
}

impl ProductFormReport {
    /// Whether index and nu are (to 1e-10) constant multiples of temperature
    /// and entropy density.
    pub fn index_tracks_temperature(&self) -> bool {
        self.f_over_theta_spread < 1e-10 && self.nu_over_entropy_spread < 1e-10
    }
}

/// Compare `f` with `theta` and `nu` with `n sigma` over an `(n, sigma)` grid.
pub fn product_form_index_checks(
    eos: &ProductFormEos,
    ns: &[f64],
    sigmas: &[f64],
) -> Result<ProductFormReport> {
    let idx = IndexFunction::new(eos.reduce_to_barotropic()?, 1.0)?;
    let mut f_theta = Vec::new();
    let mut nu_ent = Vec::new();
    let mut sigma_err: f64 = 0.0;
    for &n in ns {
        for &sigma in sigmas {
            let s = eos.thermo_props(n, sigma)?;
            f_theta.push(idx.index_f(s.p)? / s.theta);
            nu_ent.push(idx.nu(s.p)? / (n * sigma));
            sigma_err = sigma_err.max((eos.sigma_from(n, s.p)? - sigma).abs());
        }
    }
    Ok(ProductFormReport {
        points: f_theta.len(),
        f_over_theta_spread: numerics::relative_spread(&f_theta),
        nu_over_entropy_spread: numerics::relative_spread(&nu_ent),
        sigma_recovery_error: sigma_err,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{lin_space, log_space};

    fn gamma_idx(gamma: f64, mode: IndexMode) -> IndexFunction {
        IndexFunction::with_mode(BarotropicEos::gamma_law(gamma).unwrap(), 1.0, 1.0, mode).unwrap()
    }

    #[test]
    fn index_examples() {
        for mode in [IndexMode::ClosedForm, IndexMode::Quadrature] {
            let g = gamma_idx(4.0 / 3.0, mode);
            assert!((g.index_f(16.0).unwrap() - 2.0).abs() < 1e-12);
            assert!((g.index_f(1.0).unwrap() - 1.0).abs() < 1e-15);
            let s = gamma_idx(2.0, mode);
            assert!((s.index_f(4.0).unwrap() - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn nu_examples() {
        for mode in [IndexMode::ClosedForm, IndexMode::Quadrature] {
            let g = gamma_idx(4.0 / 3.0, mode);
            assert!((g.nu(16.0).unwrap() - 32.0).abs() < 1e-10);
            assert!((g.nu(1.0).unwrap() - 4.0).abs() < 1e-13);
            assert!((gamma_idx(2.0, mode).nu(1.0).unwrap() - 2.0).abs() < 1e-13);
        }
    }

    #[test]
    fn pi_examples() {
        for mode in [IndexMode::ClosedForm, IndexMode::Quadrature] {
            let g = gamma_idx(4.0 / 3.0, mode);
            assert!((g.pi_of_f(2.0).unwrap() - 16.0).abs() < 1e-9);
            assert!((g.pi_of_f(1.0).unwrap() - 1.0).abs() < 1e-12);
            assert!((gamma_idx(2.0, mode).pi_of_f(3.0).unwrap() - 9.0).abs() < 1e-9);
        }
    }

    #[test]
    fn pi_out_of_range_is_domain_error() {
        let eos = BarotropicEos::gamma_law(4.0 / 3.0)
            .unwrap()
            .with_interval(0.5, 100.0)
            .unwrap();
        for mode in [IndexMode::ClosedForm, IndexMode::Quadrature] {
            let idx = IndexFunction::with_mode(eos.clone(), 1.0, 1.0, mode).unwrap();
            assert!(matches!(idx.pi_of_f(10.0), Err(Error::Domain { .. })));
            assert!(matches!(idx.pi_of_f(0.5), Err(Error::Domain { .. })));
            assert!(matches!(idx.pi_of_f(-1.0), Err(Error::Domain { .. })));
            assert!((idx.pi_of_f(3.0).unwrap() - 81.0).abs() < 1e-8);
        }
    }

    /// Composite Simpson on `pi(g) / g^3` with the closed-form inverse;
    /// independent of the ln-q substitution used by `xhat_of_f`.
    fn simpson_xhat(gamma: f64, f: f64) -> f64 {
        let delta = gamma / (gamma - 1.0);
        let n = 20_000;
        let h = (f - 1.0) / n as f64;
        let g = |x: f64| x.powf(delta) / (x * x * x);
        let mut sum = g(1.0) + g(f);
        for i in 1..n {
            let x = 1.0 + i as f64 * h;
            sum += if i % 2 == 1 { 4.0 } else { 2.0 } * g(x);
        }
        sum * h / 3.0
    }

    #[test]
    fn xhat_examples() {
        for mode in [IndexMode::ClosedForm, IndexMode::Quadrature] {
            let s = gamma_idx(2.0, mode);
            assert!((s.xhat_of_f(2.0).unwrap() - 2f64.ln()).abs() < 1e-11);
            let g = gamma_idx(4.0 / 3.0, mode);
            assert!((g.xhat_of_f(2.0).unwrap() - 1.5).abs() < 1e-10);
            assert_eq!(g.xhat_of_f(1.0).unwrap(), 0.0);
            let g = gamma_idx(1.5, mode);
            let oracle = simpson_xhat(1.5, 1.7);
            assert!((g.xhat_of_f(1.7).unwrap() - oracle).abs() < 1e-10 * oracle.abs());
        }
    }

    #[test]
    fn xhat_derivative_is_pi_over_f_cubed() {
        for mode in [IndexMode::ClosedForm, IndexMode::Quadrature] {
            let g = gamma_idx(5.0 / 3.0, mode);
            for f in [0.6, 1.3, 2.5] {
                let d = rel_central_diff(|x| g.xhat_of_f(x), f).unwrap();
                let exact = g.xhat_prime(f).unwrap();
                assert!((d - exact).abs() < 1e-7 * exact, "{d} vs {exact}");
            }
        }
    }

    #[test]
    fn closed_form_requires_gamma_law() {
        let b = IsentropicEos::polytrope(1.0, 1.0, 1.5).unwrap().barotrope();
        assert!(matches!(
            IndexFunction::with_mode(b, 1.0, 1.0, IndexMode::ClosedForm),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn quadrature_matches_closed_form() {
        for gamma in [4.0 / 3.0, 1.5, 2.0] {
            let c = gamma_idx(gamma, IndexMode::ClosedForm);
            let q = gamma_idx(gamma, IndexMode::Quadrature);
            for p in log_space(1e-3, 1e3, 41) {
                let (a, b) = (c.index_f(p).unwrap(), q.index_f(p).unwrap());
                assert!((a - b).abs() / a < 1e-8);
            }
        }
    }

    #[test]
    fn ode_and_inverse_identities() {
        let b = IsentropicEos::polytrope(1.0, 0.5, 1.4).unwrap().barotrope();
        let idx = IndexFunction::new(b, 1.0).unwrap();
        for p in log_space(1e-3, 1e3, 25) {
            assert!(idx.ode_residual(p).unwrap() < 1e-8);
            assert!(idx.nu_fprime_residual(p).unwrap() < 1e-8);
            let f = idx.index_f(p).unwrap();
            assert!((idx.pi_of_f(f).unwrap() - p).abs() / p < 1e-9);
        }
    }

    #[test]
    fn pi_extends_beyond_cached_samples() {
        let b = IsentropicEos::polytrope(0.5, 1.0, 1.5).unwrap().barotrope();
        let idx = IndexFunction::new(b, 1.0).unwrap();
        for p in [1e-15, 1e15] {
            let f = idx.index_f(p).unwrap();
            assert!((idx.pi_of_f(f).unwrap() - p).abs() / p < 1e-9);
        }
    }

    #[test]
    fn enthalpy_calibration() {
        for eos in [
            IsentropicEos::massless_gamma(4.0 / 3.0).unwrap(),
            IsentropicEos::stiff(),
            IsentropicEos::polytrope(1.0, 1.0, 5.0 / 3.0).unwrap(),
        ] {
            let plain = IndexFunction::new(eos.barotrope(), 0.37).unwrap();
            assert_eq!(enthalpy_index_residual(&eos, &plain, 1.0, 1.0).unwrap(), 0.0);
            for n in [0.2, 0.5, 2.0, 7.0] {
                assert!(enthalpy_index_residual(&eos, &plain, n, 1.0).unwrap() < 1e-9);
            }
        }
    }

    #[test]
    fn legendre_examples() {
        let stiff = IsentropicEos::stiff();
        let idx = IndexFunction::enthalpy_calibrated(&stiff, 1.0, IndexMode::ClosedForm).unwrap();
        assert!(legendre_residual(&stiff, &idx, 2.0).unwrap() < 1e-9);
        // pi(h) = h^2 / 2 for the stiff fluid
        assert!((idx.pi_of_f(2.0).unwrap() - 2.0).abs() < 1e-12);
        let g = IsentropicEos::massless_gamma(4.0 / 3.0).unwrap();
        let idx = IndexFunction::enthalpy_calibrated(&g, 1.0, IndexMode::ClosedForm).unwrap();
        assert!(legendre_residual(&g, &idx, 1.0).unwrap() < 1e-9);
        // pi(h) = h^delta / delta with gamma + delta = gamma delta, delta = 4
        for h in [0.5, 1.0, 1.7] {
            assert!((idx.pi_of_f(h).unwrap() - h.powi(4) / 4.0).abs() < 1e-12);
        }
    }

    #[test]
    fn nu_is_matter_density() {
        let stiff = IsentropicEos::stiff();
        let idx = IndexFunction::enthalpy_calibrated(&stiff, 1.0, IndexMode::ClosedForm).unwrap();
        for n in [0.5, 1.0, 2.0, 5.0] {
            assert!(nu_equals_n_residual(&stiff, &idx, n).unwrap() < 1e-9);
        }
        assert_eq!(nu_equals_n_residual(&stiff, &idx, 1.0).unwrap(), 0.0);
        let g = IsentropicEos::massless_gamma(4.0 / 3.0).unwrap();
        let idx = IndexFunction::enthalpy_calibrated(&g, 1.0, IndexMode::ClosedForm).unwrap();
        assert!(nu_equals_n_residual(&g, &idx, 1.0).unwrap() < 1e-9);
    }

    #[test]
    fn double_legendre_transform_recovers_density() {
        // rho(n) = n^gamma / gamma; pi = rho* and rho = pi*.
        let gamma = 4.0 / 3.0;
        let eos = IsentropicEos::massless_gamma(gamma).unwrap();
        let idx = IndexFunction::enthalpy_calibrated(&eos, 1.0, IndexMode::ClosedForm).unwrap();
        let rho = |n: f64| eos.props(n).unwrap().rho;
        let pi_num = |h: f64| numerics::legendre_conjugate(rho, h, 1e-6, 50.0);
        for h in [0.8, 1.0, 1.3] {
            let direct = idx.pi_of_f(h).unwrap();
            assert!((pi_num(h) - direct).abs() < 1e-7 * direct);
        }
        for n in [0.7, 1.0, 1.5] {
            let back = numerics::legendre_conjugate(pi_num, n, 1e-3, 3.0);
            assert!((back - rho(n)).abs() < 1e-7 * rho(n), "{back} vs {}", rho(n));
        }
    }

    #[test]
    fn lemma_on_product_form_fluids() {
        let ns = log_space(0.2, 5.0, 10);
        let sigmas = lin_space(0.2, 3.0, 10);
        let dg = ProductFormEos::double_gamma(4.0 / 3.0, 1.0).unwrap();
        let r = product_form_index_checks(&dg, &ns, &sigmas).unwrap();
        assert_eq!(r.points, 100);
        assert!(r.f_over_theta_spread < 1e-10);
        assert!(r.nu_over_entropy_spread < 1e-10);
        assert!(r.sigma_recovery_error < 1e-12);
        assert!(r.index_tracks_temperature());
        let mig = ProductFormEos::massless_ideal_gas(4.0 / 3.0, 1.0, 1.0).unwrap();
        let r = product_form_index_checks(&mig, &ns, &sigmas).unwrap();
        assert!(r.f_over_theta_spread > 0.1);
        assert!(r.nu_over_entropy_spread > 0.1);
        assert!(!r.index_tracks_temperature());
    }

    #[test]
    fn tabulated_index_tracks_source_barotrope() {
        let ps = log_space(1e-2, 1e2, 400);
        let b = IsentropicEos::polytrope(1.0, 1.0, 1.5).unwrap().barotrope();
        let rhos: Vec<f64> = ps.iter().map(|&p| b.eval_unchecked(p).0).collect();
        let t = BarotropicEos::tabulated(ps, rhos).unwrap();
        let it = IndexFunction::new(t, 1.0).unwrap();
        let ib = IndexFunction::new(b, 1.0).unwrap();
        for p in log_space(0.02, 50.0, 9) {
            let (a, c) = (it.index_f(p).unwrap(), ib.index_f(p).unwrap());
            assert!((a - c).abs() / c < 1e-6);
            assert!((it.pi_of_f(a).unwrap() - p).abs() / p < 1e-9);
        }
    }
}
