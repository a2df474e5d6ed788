//! Planar shocks: jump conditions, Lax admissibility and production rates.
//!
//! Shock-frame convention: flow runs along +x through a shock at rest,
//! upstream (`-`) on the left, downstream (`+`) on the right, `v > 0`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::eos::{BarotropicEos, IdealGasEos, Thermo};
use crate::error::{Error, Result};
use crate::index::IndexFunction;
use crate::numerics;
use crate::spacetime::{add_velocities, lorentz_factor};

/// Relative tolerance below which `[rho] == [p]` counts as linear degeneracy.
const DEGENERATE_TOL: f64 = 1e-12;

/// Acoustic characteristic speeds `(v -+ c_s) / (1 -+ v c_s)`.
pub fn char_speeds(eos: &BarotropicEos, p: f64, v: f64) -> Result<(f64, f64)> {
    if !(v.abs() < 1.0) {
        return Err(Error::Superluminal { speed: v.abs() });
    }
    let cs = eos.sound_speed(p)?;
    Ok((add_velocities(v, -cs), add_velocities(v, cs)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShockKind {
    /// Finite-speed discontinuity solving the jump conditions.
    Regular,
    /// `[rho] = [p]`: the front travels at light speed relative to both
    /// states; the shock-frame speeds are reported as 1.
    LinearlyDegenerate,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ShockSolution {
    pub kind: ShockKind,
    pub p_minus: f64,
    pub p_plus: f64,
    pub rho_minus: f64,
    pub rho_plus: f64,
    pub v_minus: f64,
    pub v_plus: f64,
    pub w_minus: f64,
    pub w_plus: f64,
    pub n_minus: Option<f64>,
    pub n_plus: Option<f64>,
    pub sigma_minus: Option<f64>,
    pub sigma_plus: Option<f64>,
    /// Relative jumps `[T^tx]`, `[T^xx]` and, for five fields, `[n W v]`.
    pub residuals: [f64; 3],
    /// Lab-frame shock speed, once [`ShockSolution::in_lab_frame`] is applied.
    pub lab_speed: Option<f64>,
    /// Lab-frame upstream and downstream velocities.
    pub lab_velocities: Option<(f64, f64)>,
}

impl ShockSolution {
    /// The same discontinuity read with upstream and downstream exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            kind: self.kind,
            p_minus: self.p_plus,
            p_plus: self.p_minus,
            rho_minus: self.rho_plus,
            rho_plus: self.rho_minus,
            v_minus: self.v_plus,
            v_plus: self.v_minus,
            w_minus: self.w_plus,
            w_plus: self.w_minus,
            n_minus: self.n_plus,
            n_plus: self.n_minus,
            sigma_minus: self.sigma_plus,
            sigma_plus: self.sigma_minus,
            residuals: self.residuals,
            lab_speed: None,
            lab_velocities: None,
        }
    }

    /// Lab frame in which the upstream state moves with velocity `u_minus`.
    ///
    /// For the linearly degenerate case the front moves at `-1` into the
    /// upstream state and only `u_minus = 0` is supported.
    pub fn in_lab_frame(mut self, u_minus: f64) -> Result<Self> {
        if !(u_minus.abs() < 1.0) {
            return Err(Error::Superluminal { speed: u_minus.abs() });
        }
        match self.kind {
            ShockKind::Regular => {
                let s = add_velocities(u_minus, -self.v_minus);
                self.lab_speed = Some(s);
                self.lab_velocities = Some((u_minus, add_velocities(self.v_plus, s)));
            }
            ShockKind::LinearlyDegenerate => {
                if u_minus != 0.0 {
                    return Err(Error::Unsupported(
                        "light-speed front with a moving upstream state".into(),
                    ));
                }
                self.lab_speed = Some(-1.0);
                self.lab_velocities = Some((0.0, degenerate_downstream_velocity(self.p_minus, self.p_plus)));
            }
        }
        Ok(self)
    }
}

/// Downstream lab velocity behind a light-speed front moving at `-1` into
/// fluid at rest: `E + S = p (1+u)/(1-u)` is continuous across it.
fn degenerate_downstream_velocity(p_minus: f64, p_plus: f64) -> f64 {
    let r = p_minus / p_plus;
    (r - 1.0) / (r + 1.0)
}

fn barotropic_residuals(w_m: f64, w_p: f64, v_m: f64, v_p: f64, p_m: f64, p_p: f64) -> [f64; 3] {
    let (g2m, g2p) = (1.0 / (1.0 - v_m * v_m), 1.0 / (1.0 - v_p * v_p));
    let em = w_m * g2m * v_m;
    let ep = w_p * g2p * v_p;
    let mm = em * v_m + p_m;
    let mp = ep * v_p + p_p;
    [
        (em - ep).abs() / em.abs().max(ep.abs()),
        (mm - mp).abs() / mm.abs().max(mp.abs()),
        0.0,
    ]
}

/// Shock-frame speeds connecting `p_minus` upstream to `p_plus` downstream.
///
/// The upstream speed is found by a bracketed root search with the
/// downstream speed eliminated through the momentum flux. Both compressive
/// (`p_plus > p_minus`) and expansive solutions are returned.
pub fn rh_solve_barotropic(eos: &BarotropicEos, p_minus: f64, p_plus: f64) -> Result<ShockSolution> {
    eos.interval.check("p_minus", p_minus)?;
    eos.interval.check("p_plus", p_plus)?;
    if p_minus == p_plus {
        return Err(Error::Degenerate(format!("p_minus = p_plus = {p_minus}")));
    }
    if p_plus < p_minus {
        return Ok(rh_solve_compressive(eos, p_plus, p_minus)?.swapped());
    }
    rh_solve_compressive(eos, p_minus, p_plus)
}

fn rh_solve_compressive(eos: &BarotropicEos, p_m: f64, p_p: f64) -> Result<ShockSolution> {
    let rho_m = eos.rho_hat(p_m)?;
    let rho_p = eos.rho_hat(p_p)?;
    let dp = p_p - p_m;
    let drho = rho_p - rho_m;
    let (w_m, w_p) = (rho_m + p_m, rho_p + p_p);
    if (drho - dp).abs() <= DEGENERATE_TOL * dp {
        return Ok(ShockSolution {
            kind: ShockKind::LinearlyDegenerate,
            p_minus: p_m,
            p_plus: p_p,
            rho_minus: rho_m,
            rho_plus: rho_p,
            v_minus: 1.0,
            v_plus: 1.0,
            w_minus: f64::INFINITY,
            w_plus: f64::INFINITY,
            n_minus: None,
            n_plus: None,
            sigma_minus: None,
            sigma_plus: None,
            residuals: [0.0; 3],
            lab_speed: None,
            lab_velocities: None,
        });
    }
    // energy flux a(v) = w_m W^2 v; momentum balance gives v_plus = v - dp / a
    let v_plus_of = |v: f64| v - dp * (1.0 - v * v) / (w_m * v);
    let resid = |v: f64| {
        let a = w_m * v / (1.0 - v * v);
        let x = v_plus_of(v);
        (w_p * x / (1.0 - x * x) - a) / a
    };
    let v_lo = (dp / (w_m + dp)).sqrt();
    let mut v_hi = 0.5 * (1.0 + v_lo);
    let mut k = 0;
    while !(resid(v_hi) > 0.0) {
        v_hi = 0.5 * (1.0 + v_hi);
        k += 1;
        if k > 60 || v_hi >= 1.0 {
            return Err(Error::NoRoot(format!(
                "no shock connects p = {p_m} to p = {p_p} ([rho] = {drho}, [p] = {dp})"
            )));
        }
    }
    let v_m = numerics::brent(resid, v_lo, v_hi, 0.0)?;
    let v_p = v_plus_of(v_m);
    if !(v_p > 0.0 && v_p < 1.0) {
        return Err(Error::NoRoot(format!("downstream speed {v_p} outside (0, 1)")));
    }
    Ok(ShockSolution {
        kind: ShockKind::Regular,
        p_minus: p_m,
        p_plus: p_p,
        rho_minus: rho_m,
        rho_plus: rho_p,
        v_minus: v_m,
        v_plus: v_p,
        w_minus: lorentz_factor(v_m),
        w_plus: lorentz_factor(v_p),
        n_minus: None,
        n_plus: None,
        sigma_minus: None,
        sigma_plus: None,
        residuals: barotropic_residuals(w_m, w_p, v_m, v_p, p_m, p_p),
        lab_speed: None,
        lab_velocities: None,
    })
}

/// Closed-form shock-frame speeds of a barotropic shock,
/// `v_-^2 = [p](rho_+ + p_-) / ([rho](rho_- + p_+))` and
/// `v_+^2 = [p](rho_- + p_+) / ([rho](rho_+ + p_-))`.
pub fn taub_speeds(rho_m: f64, p_m: f64, rho_p: f64, p_p: f64) -> (f64, f64) {
    let dp = p_p - p_m;
    let drho = rho_p - rho_m;
    (
        (dp * (rho_p + p_m) / (drho * (rho_m + p_p))).sqrt(),
        (dp * (rho_m + p_p) / (drho * (rho_p + p_m))).sqrt(),
    )
}

/// Lax inequalities for the right-moving acoustic family:
/// `v_- > c_s(p_-)` and `v_+ < c_s(p_+)`.
pub fn lax_admissible(eos: &BarotropicEos, sol: &ShockSolution) -> bool {
    if sol.kind == ShockKind::LinearlyDegenerate {
        return false;
    }
    match (eos.sound_speed(sol.p_minus), eos.sound_speed(sol.p_plus)) {
        (Ok(cm), Ok(cp)) => sol.v_minus > cm && sol.v_plus < cp,
        _ => false,
    }
}

/// Net outflow of the nu-current through the shock per unit area,
/// `nu_+ W_+ v_+ - nu_- W_- v_-`.
///
/// For a light-speed front the flux is taken through the front moving at
/// `-1` into upstream fluid at rest: `nu_+ W_+ (1 + u_+) - nu_-`.
pub fn nu_production(idx: &IndexFunction, sol: &ShockSolution) -> Result<f64> {
    let nu_m = idx.nu(sol.p_minus)?;
    let nu_p = idx.nu(sol.p_plus)?;
    match sol.kind {
        ShockKind::Regular => Ok(nu_p * sol.w_plus * sol.v_plus - nu_m * sol.w_minus * sol.v_minus),
        ShockKind::LinearlyDegenerate => {
            let u = degenerate_downstream_velocity(sol.p_minus, sol.p_plus);
            Ok(nu_p * lorentz_factor(u) * (1.0 + u) - nu_m)
        }
    }
}

/// Least-squares slope of `ln P` against `ln eps` for shocks `p_- -> p_- + eps`.
pub fn weak_shock_exponent(idx: &IndexFunction, p_minus: f64, amplitudes: &[f64]) -> Result<f64> {
    if amplitudes.len() < 2 {
        return Err(Error::Precondition("need at least two amplitudes".into()));
    }
    let eos = idx.eos();
    let (lo, hi) = amplitudes
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(l, h), &a| (l.min(a), h.max(a)));
    if !(lo > 0.0) || hi / lo < 100.0 * (1.0 - 1e-9) {
        return Err(Error::Precondition(format!(
            "amplitudes must be positive and span two decades, got [{lo}, {hi}]"
        )));
    }
    let mut xs = Vec::with_capacity(amplitudes.len());
    let mut ys = Vec::with_capacity(amplitudes.len());
    for &eps in amplitudes {
        let sol = rh_solve_barotropic(eos, p_minus, p_minus + eps)?;
        if !lax_admissible(eos, &sol) {
            return Err(Error::Precondition(format!(
                "amplitude {eps} gives a non-admissible shock"
            )));
        }
        let prod = nu_production(idx, &sol)?;
        if !(prod > 1e-12) {
            return Err(Error::Degenerate(format!(
                "production {prod:e} at amplitude {eps} is not positive; slope undefined"
            )));
        }
        xs.push(eps.ln());
        ys.push(prod.ln());
    }
    Ok(numerics::ls_slope(&xs, &ys))
}

/// Relative distance from the sound speed below which an ideal-gas shock is
/// treated as a sonic (zero-strength) wave.
pub const SONIC_TOL: f64 = 1e-6;

/// Shock through an ideal gas with upstream state `(n_-, sigma_-)` entering
/// at shock-frame speed `v_-`.
///
/// With the particle, energy and momentum fluxes fixed by the upstream state,
/// a trial `v_+` determines `n_+`, `rho_+` and `p_+`; the equation of state
/// `p = (gamma - 1)(rho - m n)` then selects `v_+`. The trivial root
/// `v_+ = v_-` is divided out before bracketing.
pub fn rh_solve_ideal(eos: &IdealGasEos, n_minus: f64, sigma_minus: f64, v_minus: f64) -> Result<ShockSolution> {
    if !(v_minus > 0.0 && v_minus < 1.0) {
        return Err(Error::domain("v_minus", v_minus, 0.0, 1.0));
    }
    let up = eos.thermo_props(n_minus, sigma_minus)?;
    let cs = eos.sound_speed2(&up).sqrt();
    let g = eos.gamma;
    let w_m = up.rho + up.p;
    let (l_m, w2_m) = (lorentz_factor(v_minus), 1.0 / (1.0 - v_minus * v_minus));
    let j = n_minus * l_m * v_minus;
    let fe = w_m * w2_m * v_minus;
    let fm = fe * v_minus + up.p;

    let zero_strength = |residual| ShockSolution {
        kind: ShockKind::Regular,
        p_minus: up.p,
        p_plus: up.p,
        rho_minus: up.rho,
        rho_plus: up.rho,
        v_minus,
        v_plus: v_minus,
        w_minus: l_m,
        w_plus: l_m,
        n_minus: Some(n_minus),
        n_plus: Some(n_minus),
        sigma_minus: Some(sigma_minus),
        sigma_plus: Some(sigma_minus),
        residuals: residual,
        lab_speed: None,
        lab_velocities: None,
    };
    if v_minus < cs * (1.0 - 1e-12) {
        return Err(Error::SubsonicUpstream { v: v_minus, cs });
    }
    // Within SONIC_TOL of the sound speed the deflated residual is dominated
    // by rounding; the entropy jump there is O(delta^3), below resolution.
    let delta = v_minus - cs;
    if delta <= SONIC_TOL * cs {
        return Ok(zero_strength([0.0; 3]));
    }

    let downstream = |v: f64| {
        let w2 = 1.0 / (1.0 - v * v);
        let p = fm - fe * v;
        let n = j * (1.0 - v * v).sqrt() / v;
        let rho = fe / (w2 * v) - p;
        (p, n, rho)
    };
    let deflated = |v: f64| {
        let (p, n, rho) = downstream(v);
        (p - (g - 1.0) * (rho - eos.m * n)) / ((v_minus - v) * fm)
    };
    // the physical root lies about 2 delta below v_-; walk down from 0.1 delta,
    // geometrically, so that weak and strong shocks are both bracketed
    let samples = 600;
    let (g0, g1) = (0.1 * delta, v_minus * (1.0 - 1e-9));
    let mut hi = None;
    let mut prev = (v_minus, f64::NAN);
    for k in 0..samples {
        let gap = g0 * (g1 / g0).powf(k as f64 / (samples - 1) as f64);
        let v = v_minus - gap;
        let d = deflated(v);
        if k > 0 && d.is_finite() && prev.1.is_finite() && prev.1.signum() != d.signum() {
            hi = Some((v, prev.0));
            break;
        }
        prev = (v, d);
    }
    let (a, b) = hi.ok_or_else(|| {
        Error::NoRoot(format!("no downstream state for n = {n_minus}, sigma = {sigma_minus}, v = {v_minus}"))
    })?;
    let v_p = numerics::brent(deflated, a, b, 0.0)?;
    let (p_p, n_p, _) = downstream(v_p);
    if !(p_p > 0.0 && n_p > 0.0) {
        return Err(Error::NoRoot(format!("downstream state p = {p_p}, n = {n_p} unphysical")));
    }
    // jump relative to upstream, to keep weak-shock entropy jumps above rounding
    let sigma_p = sigma_minus + eos.c_v * ((p_p / up.p) * (n_minus / n_p).powf(g)).ln();
    let dn = eos.thermo_props(n_p, sigma_p)?;
    let l_p = lorentz_factor(v_p);
    let mut res = barotropic_residuals(w_m, dn.rho + dn.p, v_minus, v_p, up.p, dn.p);
    res[2] = (j - n_p * l_p * v_p).abs() / j;
    Ok(ShockSolution {
        kind: ShockKind::Regular,
        p_minus: up.p,
        p_plus: dn.p,
        rho_minus: up.rho,
        rho_plus: dn.rho,
        v_minus,
        v_plus: v_p,
        w_minus: l_m,
        w_plus: l_p,
        n_minus: Some(n_minus),
        n_plus: Some(n_p),
        sigma_minus: Some(sigma_minus),
        sigma_plus: Some(sigma_p),
        residuals: res,
        lab_speed: None,
        lab_velocities: None,
    })
}

/// Entropy flux jump `n W v (sigma_+ - sigma_-)` of a five-field solution.
pub fn entropy_production(sol: &ShockSolution) -> Option<f64> {
    let (n, s_m, s_p) = (sol.n_minus?, sol.sigma_minus?, sol.sigma_plus?);
    Some(n * sol.w_minus * sol.v_minus * (s_p - s_m))
}

/// One line of a shock scan.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ShockRow {
    pub gamma: Option<f64>,
    pub p_minus: f64,
    pub p_plus: f64,
    pub v_minus: f64,
    pub v_plus: f64,
    pub lax: bool,
    pub gnl_min: f64,
    pub production: f64,
    pub kind: ShockKind,
}

impl ShockRow {
    pub const HEADER: &'static str = "gamma,p_minus,p_plus,v_minus,v_plus,lax,gnl_min,production,kind";
}

/// Solve, classify and measure one barotropic shock.
pub fn analyse(idx: &IndexFunction, p_minus: f64, p_plus: f64) -> Result<ShockRow> {
    let eos = idx.eos();
    let sol = rh_solve_barotropic(eos, p_minus, p_plus)?;
    Ok(ShockRow {
        gamma: eos.gamma(),
        p_minus,
        p_plus,
        v_minus: sol.v_minus,
        v_plus: sol.v_plus,
        lax: lax_admissible(eos, &sol),
        gnl_min: eos.gnl_min(sol.rho_minus, sol.rho_plus)?,
        production: nu_production(idx, &sol)?,
        kind: sol.kind,
    })
}

/// Outcome of [`production_sweep`].
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ProductionSweep {
    pub admissible: usize,
    pub inadmissible: usize,
    /// Admissible shocks with positive GNL scan but `production <= 0`.
    pub counterexamples: Vec<(f64, f64, f64)>,
    /// Inadmissible (expansive) samples with `production >= 0`.
    pub inadmissible_nonnegative: usize,
    pub min_admissible_production: f64,
    pub max_residual: f64,
    /// Largest `|P(a->b) + P(b->a)|`.
    pub antisymmetry_error: f64,
}

/// Random gamma-law shocks until `target` Lax-admissible ones are seen.
///
/// `gamma` is uniform in `(1, 2)`, `p_-` log-uniform in `[1e-2, 1e2]` and
/// the pressure ratio log-uniform in `[1e-3, 1e2]` with random orientation.
pub fn production_sweep(seed: u64, target: usize) -> Result<ProductionSweep> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = ProductionSweep {
        admissible: 0,
        inadmissible: 0,
        counterexamples: Vec::new(),
        inadmissible_nonnegative: 0,
        min_admissible_production: f64::INFINITY,
        max_residual: 0.0,
        antisymmetry_error: 0.0,
    };
    while out.admissible < target {
        let gamma = loop {
            let g: f64 = rng.random_range(1.0..2.0);
            if g > 1.0 + 1e-6 && g < 2.0 - 1e-6 {
                break g;
            }
        };
        let idx = IndexFunction::new(BarotropicEos::gamma_law(gamma)?, 1.0)?;
        let p_a = rng.random_range(-2.0f64..2.0).mul_add(std::f64::consts::LN_10, 0.0).exp();
        let ratio = 1.0 + rng.random_range(-3.0f64..2.0).mul_add(std::f64::consts::LN_10, 0.0).exp();
        let (p_m, p_p) = if rng.random::<bool>() { (p_a, p_a * ratio) } else { (p_a * ratio, p_a) };
        let eos = idx.eos();
        let sol = rh_solve_barotropic(eos, p_m, p_p)?;
        let prod = nu_production(&idx, &sol)?;
        let back = nu_production(&idx, &rh_solve_barotropic(eos, p_p, p_m)?)?;
        out.antisymmetry_error = out.antisymmetry_error.max((prod + back).abs());
        out.max_residual = out.max_residual.max(sol.residuals[0]).max(sol.residuals[1]);
        if lax_admissible(eos, &sol) && eos.gnl_min(sol.rho_minus, sol.rho_plus)? > 0.0 {
            out.admissible += 1;
            out.min_admissible_production = out.min_admissible_production.min(prod);
            if !(prod > 0.0) {
                out.counterexamples.push((gamma, p_m, p_p));
            }
        } else {
            out.inadmissible += 1;
            if prod >= 0.0 {
                out.inadmissible_nonnegative += 1;
            }
        }
    }
    Ok(out)
}
