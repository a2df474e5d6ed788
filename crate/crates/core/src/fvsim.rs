//! One-dimensional finite-volume solver for the barotropic energy-momentum
//! system `d_t E + d_x S = 0`, `d_t S + d_x (S v + p) = 0`.
//!
//! Only `(E, S) = (T^tt, T^tx)` are evolved. The nu-current is monitored, not
//! imposed, so its production at shocks comes out of the scheme itself.

use crate::eos::BarotropicEos;
use crate::error::{Error, Result};
use crate::index::IndexFunction;
use crate::numerics;
use crate::shock::{self, char_speeds};
use crate::spacetime::{add_velocities, lorentz_factor};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Periodic,
    Outflow,
}

/// `E = (rho + p) W^2 - p`, `S = (rho + p) W^2 v`.
pub fn prim_to_cons(eos: &BarotropicEos, p: f64, v: f64) -> Result<(f64, f64)> {
    if !(v.abs() < 1.0) {
        return Err(Error::Superluminal { speed: v.abs() });
    }
    let w = eos.rho_hat(p)? + p;
    let w2 = 1.0 / ((1.0 - v) * (1.0 + v));
    Ok((w * w2 - p, w * w2 * v))
}

/// Inverse of [`prim_to_cons`]: root of
/// `(rho_hat(p) + p) (E + p)^2 / ((E + p)^2 - S^2) - p - E` on `[p_min, E]`.
pub fn cons_to_prim(eos: &BarotropicEos, e: f64, s: f64) -> Result<(f64, f64)> {
    let bad = || Error::UnphysicalState { e, s, cell: None };
    if !(e > 0.0 && e.is_finite() && s.is_finite()) || !(s.abs() < e) {
        return Err(bad());
    }
    let resid = |p: f64| {
        let a = e + p;
        let w2 = a * a / ((a - s) * (a + s));
        (eos.eval_unchecked(p).0 + p) * w2 - p - e
    };
    let lo = eos.interval.lo.max(0.0);
    let hi = if eos.interval.hi.is_finite() { eos.interval.hi.min(e) } else { e };
    let p = numerics::brent(resid, lo, hi, 0.0).map_err(|_| bad())?;
    if !(p > eos.interval.lo || (eos.interval.closed && p == eos.interval.lo)) || !(p > 0.0) {
        return Err(bad());
    }
    let v = s / (e + p);
    if !(v.abs() < 1.0) {
        return Err(bad());
    }
    Ok((p, v))
}

/// Physical flux `(S, S v + p)`.
fn phys_flux(s: f64, p: f64, v: f64) -> (f64, f64) {
    (s, s * v + p)
}

/// Conserved variables on a uniform grid.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ConservedState1D {
    pub e: Vec<f64>,
    pub s: Vec<f64>,
    pub dx: f64,
    pub boundary: Boundary,
}

impl ConservedState1D {
    pub fn len(&self) -> usize {
        self.e.len()
    }

    pub fn is_empty(&self) -> bool {
        self.e.is_empty()
    }

    /// `(sum E dx, sum S dx)` in index order.
    pub fn totals(&self) -> (f64, f64) {
        let mut te = 0.0;
        let mut ts = 0.0;
        for i in 0..self.len() {
            te += self.e[i] * self.dx;
            ts += self.s[i] * self.dx;
        }
        (te, ts)
    }

    pub fn primitives(&self, eos: &BarotropicEos) -> Result<(Vec<f64>, Vec<f64>)> {
        let mut p = Vec::with_capacity(self.len());
        let mut v = Vec::with_capacity(self.len());
        for i in 0..self.len() {
            let (pi, vi) = cons_to_prim(eos, self.e[i], self.s[i]).map_err(|e| e.in_cell(i))?;
            p.push(pi);
            v.push(vi);
        }
        Ok((p, v))
    }
}

/// `sum nu(p_i) W_i dx`.
pub fn nu_total(state: &ConservedState1D, idx: &IndexFunction) -> Result<f64> {
    let (p, v) = state.primitives(idx.eos())?;
    let mut total = 0.0;
    for i in 0..state.len() {
        total += idx.nu(p[i])? * lorentz_factor(v[i]) * state.dx;
    }
    Ok(total)
}

/// Interface fluxes for one stage.
struct Fluxes {
    fe: Vec<f64>,
    fs: Vec<f64>,
    max_speed: f64,
}

fn minmod(a: f64, b: f64) -> f64 {
    if a * b <= 0.0 {
        0.0
    } else if a.abs() < b.abs() {
        a
    } else {
        b
    }
}

/// Primitive face states `(left of i+1/2, right of i-1/2)` per cell.
fn faces(p: &[f64], v: &[f64], boundary: Boundary, second_order: bool) -> (Vec<(f64, f64)>, Vec<(f64, f64)>) {
    let n = p.len();
    let at = |k: isize, q: &[f64]| -> f64 {
        let j = match boundary {
            Boundary::Periodic => k.rem_euclid(n as isize) as usize,
            Boundary::Outflow => k.clamp(0, n as isize - 1) as usize,
        };
        q[j]
    };
    let mut plus = Vec::with_capacity(n);
    let mut minus = Vec::with_capacity(n);
    for i in 0..n {
        let k = i as isize;
        if second_order {
            let dp = minmod(at(k, p) - at(k - 1, p), at(k + 1, p) - at(k, p));
            let dv = minmod(at(k, v) - at(k - 1, v), at(k + 1, v) - at(k, v));
            let (pr, vr) = (p[i] + 0.5 * dp, v[i] + 0.5 * dv);
            let (pl, vl) = (p[i] - 0.5 * dp, v[i] - 0.5 * dv);
            if pr > 0.0 && pl > 0.0 && vr.abs() < 1.0 && vl.abs() < 1.0 {
                plus.push((pr, vr));
                minus.push((pl, vl));
                continue;
            }
        }
        plus.push((p[i], v[i]));
        minus.push((p[i], v[i]));
    }
    (plus, minus)
}

fn hll(eos: &BarotropicEos, left: (f64, f64), right: (f64, f64)) -> Result<(f64, f64, f64)> {
    let (pl, vl) = left;
    let (pr, vr) = right;
    let (el, sl) = prim_to_cons(eos, pl, vl)?;
    let (er, sr) = prim_to_cons(eos, pr, vr)?;
    let (lm_l, lp_l) = char_speeds(eos, pl, vl)?;
    let (lm_r, lp_r) = char_speeds(eos, pr, vr)?;
    let a = lm_l.min(lm_r);
    let b = lp_l.max(lp_r);
    let (fel, fsl) = phys_flux(sl, pl, vl);
    let (fer, fsr) = phys_flux(sr, pr, vr);
    let speed = a.abs().max(b.abs());
    if a >= 0.0 {
        return Ok((fel, fsl, speed));
    }
    if b <= 0.0 {
        return Ok((fer, fsr, speed));
    }
    let d = b - a;
    Ok((
        (b * fel - a * fer + a * b * (er - el)) / d,
        (b * fsl - a * fsr + a * b * (sr - sl)) / d,
        speed,
    ))
}

fn fluxes(eos: &BarotropicEos, st: &ConservedState1D, second_order: bool) -> Result<Fluxes> {
    let (p, v) = st.primitives(eos)?;
    let (plus, minus) = faces(&p, &v, st.boundary, second_order);
    let n = st.len();
    let mut fe = vec![0.0; n + 1];
    let mut fs = vec![0.0; n + 1];
    let mut max_speed: f64 = 0.0;
    // interface k sits between cells k-1 and k
    for k in 0..=n {
        let (left, right) = match st.boundary {
            Boundary::Periodic => (plus[(k + n - 1) % n], minus[k % n]),
            Boundary::Outflow => {
                if k == 0 {
                    (minus[0], minus[0])
                } else if k == n {
                    (plus[n - 1], plus[n - 1])
                } else {
                    (plus[k - 1], minus[k])
                }
            }
        };
        let (a, b, s) = hll(eos, left, right).map_err(|e| e.in_cell(k.min(n - 1)))?;
        fe[k] = a;
        fs[k] = b;
        max_speed = max_speed.max(s);
    }
    Ok(Fluxes { fe, fs, max_speed })
}

fn apply(st: &ConservedState1D, fl: &Fluxes, dt: f64) -> ConservedState1D {
    let r = dt / st.dx;
    let mut out = st.clone();
    for i in 0..st.len() {
        out.e[i] = st.e[i] - r * (fl.fe[i + 1] - fl.fe[i]);
        out.s[i] = st.s[i] - r * (fl.fs[i + 1] - fl.fs[i]);
    }
    out
}

/// One forward-Euler HLL update with `dt = cfl dx / max |lambda|`.
pub fn hll_step(state: &ConservedState1D, eos: &BarotropicEos, cfl: f64) -> Result<(ConservedState1D, f64)> {
    let fl = fluxes(eos, state, false)?;
    let dt = cfl * state.dx / fl.max_speed;
    Ok((apply(state, &fl, dt), dt))
}

// ---------------------------------------------------------------------------
// Runs
// ---------------------------------------------------------------------------

/// Named initial condition on `[0, length)`.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
#[serde(tag = "profile", rename_all = "kebab-case")]
pub enum Profile {
    Uniform { p: f64, v: f64 },
    /// `p = p0 (1 + amp sin(2 pi x / L))`, `v = v0 + v_amp sin(2 pi x / L)`.
    SoundWave { p0: f64, amp: f64, v0: f64, v_amp: f64 },
    /// Riemann data with the interface at `x0`.
    ShockTube { p_left: f64, v_left: f64, p_right: f64, v_right: f64, x0: f64 },
    /// A single right-moving shock into fluid at rest, built from the jump
    /// conditions: pressure `p_plus` behind, `p_minus` ahead.
    RhShock { p_minus: f64, p_plus: f64, x0: f64 },
}

impl Profile {
    /// Whether the initial data are already discontinuous.
    pub fn discontinuous(&self) -> bool {
        matches!(self, Profile::ShockTube { .. } | Profile::RhShock { .. })
    }

    /// `(p, v)` at cell centres.
    pub fn sample(&self, eos: &BarotropicEos, n: usize, length: f64) -> Result<Vec<(f64, f64)>> {
        let dx = length / n as f64;
        let xs = (0..n).map(|i| (i as f64 + 0.5) * dx);
        match *self {
            Profile::Uniform { p, v } => Ok(vec![(p, v); n]),
            Profile::SoundWave { p0, amp, v0, v_amp } => Ok(xs
                .map(|x| {
                    let w = (std::f64::consts::TAU * x / length).sin();
                    (p0 * (1.0 + amp * w), v0 + v_amp * w)
                })
                .collect()),
            Profile::ShockTube {
                p_left,
                v_left,
                p_right,
                v_right,
                x0,
            } => Ok(xs
                .map(|x| if x < x0 { (p_left, v_left) } else { (p_right, v_right) })
                .collect()),
            Profile::RhShock { p_minus, p_plus, x0 } => {
                let (behind, _) = rh_shock_states(eos, p_minus, p_plus)?;
                Ok(xs
                    .map(|x| if x < x0 { (p_plus, behind) } else { (p_minus, 0.0) })
                    .collect())
            }
        }
    }
}

/// Velocity behind and speed of a shock moving right into fluid at rest
/// with pressure `p_minus`, raising it to `p_plus`.
pub fn rh_shock_states(eos: &BarotropicEos, p_minus: f64, p_plus: f64) -> Result<(f64, f64)> {
    if !(p_plus > p_minus) {
        return Err(Error::Config(format!(
            "rh-shock needs p_plus > p_minus, got {p_plus} <= {p_minus}"
        )));
    }
    let sol = shock::rh_solve_barotropic(eos, p_minus, p_plus)?;
    if sol.kind == shock::ShockKind::LinearlyDegenerate {
        let (_, u) = sol.in_lab_frame(0.0)?.lab_velocities.expect("set by in_lab_frame");
        return Ok((-u, 1.0));
    }
    // mirror of the shock-frame picture: the shock runs towards +x
    Ok((add_velocities(sol.v_minus, -sol.v_plus), sol.v_minus))
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct SimConfig {
    pub eos: BarotropicEos,
    /// Reference pressure of the index, `f(p_ref) = 1`.
    pub p_ref: f64,
    pub profile: Profile,
    pub n: usize,
    pub length: f64,
    pub cfl: f64,
    pub t_end: f64,
    /// Number of evenly spaced snapshots after the initial one.
    pub snapshots: usize,
    pub boundary: Boundary,
    pub second_order: bool,
    /// Start of the monotonicity check; `None` detects shock formation.
    pub t_shock: Option<f64>,
}

impl SimConfig {
    pub fn new(eos: BarotropicEos, profile: Profile, n: usize, t_end: f64) -> Self {
        Self {
            eos,
            p_ref: 1.0,
            profile,
            n,
            length: 1.0,
            cfl: 0.4,
            t_end,
            snapshots: 4,
            boundary: Boundary::Outflow,
            second_order: false,
            t_shock: None,
        }
    }

    /// Named presets: `smooth`, `steepening`, `shock-tube`, `rh-shock`, `stiff-shock`.
    pub fn preset(name: &str) -> Result<Self> {
        let g43 = BarotropicEos::gamma_law(4.0 / 3.0)?;
        Ok(match name {
            "smooth" => {
                let mut c = Self::new(g43, Profile::SoundWave { p0: 1.0, amp: 0.01, v0: 0.0, v_amp: 0.0 }, 400, 1.0);
                c.boundary = Boundary::Periodic;
                c
            }
            "steepening" => {
                let mut c = Self::new(g43, Profile::SoundWave { p0: 1.0, amp: 0.5, v0: 0.0, v_amp: 0.25 }, 400, 1.5);
                c.boundary = Boundary::Periodic;
                c
            }
            "shock-tube" => Self::new(
                g43,
                Profile::ShockTube { p_left: 10.0, v_left: 0.0, p_right: 1.0, v_right: 0.0, x0: 0.5 },
                400,
                0.3,
            ),
            "rh-shock" => Self::new(g43, Profile::RhShock { p_minus: 1.0, p_plus: 5.0, x0: 0.2 }, 400, 0.5),
            "stiff-shock" => {
                let mut c = Self::new(
                    BarotropicEos::stiff(),
                    Profile::ShockTube { p_left: 2.0, v_left: 0.0, p_right: 1.0, v_right: 0.0, x0: 0.5 },
                    400,
                    0.3,
                );
                // unit Courant number: the stiff scheme is then an exact shift
                c.cfl = 1.0;
                c
            }
            other => return Err(Error::Config(format!("unknown preset {other:?}"))),
        })
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(Error::Config(format!("cfl = {} outside (0, 1]", self.cfl)));
        }
        if self.n < 16 {
            return Err(Error::Config(format!("n = {} below 16", self.n)));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::Config(format!("t_end = {} must be positive", self.t_end)));
        }
        if !(self.length > 0.0 && self.length.is_finite()) {
            return Err(Error::Config(format!("length = {} must be positive", self.length)));
        }
        Ok(())
    }

    pub fn dx(&self) -> f64 {
        self.length / self.n as f64
    }

    pub fn initial_state(&self) -> Result<ConservedState1D> {
        let prim = self.profile.sample(&self.eos, self.n, self.length)?;
        let mut e = Vec::with_capacity(self.n);
        let mut s = Vec::with_capacity(self.n);
        for (i, &(p, v)) in prim.iter().enumerate() {
            let (a, b) = prim_to_cons(&self.eos, p, v).map_err(|e| match e {
                Error::Domain { .. } | Error::Superluminal { .. } => Error::Config(format!("initial cell {i}: {e}")),
                other => other,
            })?;
            e.push(a);
            s.push(b);
        }
        Ok(ConservedState1D {
            e,
            s,
            dx: self.dx(),
            boundary: self.boundary,
        })
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct Snapshot {
    pub t: f64,
    pub x: Vec<f64>,
    pub p: Vec<f64>,
    pub v: Vec<f64>,
    pub e: Vec<f64>,
    pub s: Vec<f64>,
    pub nu: Vec<f64>,
}

/// Per-step diagnostics. `*_out` accumulate the net flux leaving through the
/// boundaries, so `E_tot + E_out` is the conserved combination.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct DiagRow {
    pub step: usize,
    pub t: f64,
    pub e_tot: f64,
    pub s_tot: f64,
    pub nu_tot: f64,
    pub e_out: f64,
    pub s_out: f64,
    pub nu_out: f64,
    pub max_dvdx: f64,
}

impl DiagRow {
    /// `N_nu` corrected for boundary outflow.
    pub fn nu_balance(&self) -> f64 {
        self.nu_tot + self.nu_out
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct SimOutput {
    pub snapshots: Vec<Snapshot>,
    pub diagnostics: Vec<DiagRow>,
    /// Time the monotonicity check starts from.
    pub shock_time: Option<f64>,
    pub max_signal_speed: f64,
    pub final_state: ConservedState1D,
}

fn snapshot(st: &ConservedState1D, idx: &IndexFunction, t: f64) -> Result<Snapshot> {
    let (p, v) = st.primitives(idx.eos())?;
    let nu = p.iter().map(|&q| idx.nu(q)).collect::<Result<Vec<_>>>()?;
    Ok(Snapshot {
        t,
        x: (0..st.len()).map(|i| (i as f64 + 0.5) * st.dx).collect(),
        p,
        v,
        e: st.e.clone(),
        s: st.s.clone(),
        nu,
    })
}

fn max_dvdx(v: &[f64], dx: f64, boundary: Boundary) -> f64 {
    let n = v.len();
    let mut m: f64 = 0.0;
    for i in 0..n {
        let j = match boundary {
            Boundary::Periodic => (i + 1) % n,
            Boundary::Outflow if i + 1 < n => i + 1,
            Boundary::Outflow => continue,
        };
        m = m.max((v[j] - v[i]).abs() / dx);
    }
    m
}

/// Net outflow `(right - left)` of `(E, S, nu)` per unit time through the
/// boundaries; zero for periodic grids.
fn boundary_outflow(fl: &Fluxes, idx: &IndexFunction, p: &[f64], v: &[f64], boundary: Boundary) -> Result<[f64; 3]> {
    if boundary == Boundary::Periodic {
        return Ok([0.0; 3]);
    }
    let n = p.len();
    let nu_flux = |i: usize| -> Result<f64> { Ok(idx.nu(p[i])? * lorentz_factor(v[i]) * v[i]) };
    Ok([
        fl.fe[n] - fl.fe[0],
        fl.fs[n] - fl.fs[0],
        nu_flux(n - 1)? - nu_flux(0)?,
    ])
}

/// Evolve `cfg` to `t_end`.
pub fn run(cfg: &SimConfig) -> Result<SimOutput> {
    cfg.validate()?;
    let idx = IndexFunction::new(cfg.eos.clone(), cfg.p_ref)?;
    let eos = &cfg.eos;
    let mut st = cfg.initial_state()?;
    let dx = st.dx;

    let diag = |st: &ConservedState1D, step: usize, t: f64, out: [f64; 3]| -> Result<DiagRow> {
        let (te, ts) = st.totals();
        let (_, v) = st.primitives(eos)?;
        Ok(DiagRow {
            step,
            t,
            e_tot: te,
            s_tot: ts,
            nu_tot: nu_total(st, &idx)?,
            e_out: out[0],
            s_out: out[1],
            nu_out: out[2],
            max_dvdx: max_dvdx(&v, dx, st.boundary),
        })
    };

    let mut t = 0.0;
    let mut step = 0;
    let mut out = [0.0; 3];
    let mut rows = vec![diag(&st, 0, 0.0, out)?];
    let mut snaps = vec![snapshot(&st, &idx, 0.0)?];
    let snap_times: Vec<f64> = (1..=cfg.snapshots)
        .map(|k| cfg.t_end * k as f64 / cfg.snapshots as f64)
        .collect();
    let mut next_snap = 0;
    let grad0 = rows[0].max_dvdx;
    let mut shock_time = if cfg.profile.discontinuous() { Some(0.0) } else { cfg.t_shock };
    let mut max_signal: f64 = 0.0;

    while cfg.t_end - t > 1e-12 * dx {
        let (p0, v0) = st.primitives(eos)?;
        let f0 = fluxes(eos, &st, cfg.second_order)?;
        max_signal = max_signal.max(f0.max_speed);
        let mut dt = cfg.cfl * dx / f0.max_speed;
        if t + dt > cfg.t_end {
            dt = cfg.t_end - t;
        }
        let o0 = boundary_outflow(&f0, &idx, &p0, &v0, st.boundary)?;
        let (next, flow) = if cfg.second_order {
            let s1 = apply(&st, &f0, dt);
            let (p1, v1) = s1.primitives(eos)?;
            let f1 = fluxes(eos, &s1, true)?;
            max_signal = max_signal.max(f1.max_speed);
            let o1 = boundary_outflow(&f1, &idx, &p1, &v1, st.boundary)?;
            let avg = Fluxes {
                fe: f0.fe.iter().zip(&f1.fe).map(|(a, b)| 0.5 * (a + b)).collect(),
                fs: f0.fs.iter().zip(&f1.fs).map(|(a, b)| 0.5 * (a + b)).collect(),
                max_speed: f0.max_speed.max(f1.max_speed),
            };
            (apply(&st, &avg, dt), [0.5 * (o0[0] + o1[0]), 0.5 * (o0[1] + o1[1]), 0.5 * (o0[2] + o1[2])])
        } else {
            (apply(&st, &f0, dt), o0)
        };
        st = next;
        t += dt;
        step += 1;
        for k in 0..3 {
            out[k] += dt * flow[k];
        }
        let row = diag(&st, step, t, out)?;
        if shock_time.is_none() && grad0 > 0.0 && row.max_dvdx > 10.0 * grad0 {
            shock_time = Some(t);
        }
        rows.push(row);
        while next_snap < snap_times.len() && t >= snap_times[next_snap] - 1e-12 * dx {
            snaps.push(snapshot(&st, &idx, t)?);
            next_snap += 1;
        }
    }
    Ok(SimOutput {
        snapshots: snaps,
        diagnostics: rows,
        shock_time,
        max_signal_speed: max_signal,
        final_state: st,
    })
}

/// Summary of the nu balance of a run.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct NuVerdict {
    pub kind: NuBehaviour,
    /// `(N(end) - N(0)) / N(0)` with boundary outflow added back.
    pub relative_change: f64,
    /// Most negative per-step relative change after the shock time.
    pub worst_step: f64,
    /// Largest `|E_tot + E_out - E_0| / E_0` and the same for `S` (scaled by `E_0`).
    pub e_drift: f64,
    pub s_drift: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NuBehaviour {
    Conserved,
    Producing,
    Degenerate,
    Decreasing,
}

impl std::fmt::Display for NuVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.kind {
            NuBehaviour::Conserved => write!(f, "conserved (drift {:.3e})", self.relative_change),
            NuBehaviour::Producing => write!(f, "producing (dN_nu/N_nu = {:.3e} > 0)", self.relative_change),
            NuBehaviour::Degenerate => write!(f, "degenerate (flat, drift {:.3e})", self.relative_change),
            NuBehaviour::Decreasing => write!(
                f,
                "decreasing (worst step {:.3e}, total {:.3e})",
                self.worst_step, self.relative_change
            ),
        }
    }
}

/// Tolerance on the per-step relative decrease of `N_nu`.
pub const NU_STEP_TOL: f64 = 1e-12;
/// `|dN_nu / N_nu|` below which a run counts as flat.
pub const NU_FLAT_TOL: f64 = 1e-10;

pub fn nu_verdict(out: &SimOutput) -> NuVerdict {
    let rows = &out.diagnostics;
    let n0 = rows[0].nu_balance();
    let e0 = rows[0].e_tot;
    let s0 = rows[0].s_tot;
    let last = rows.last().expect("initial row");
    let rel = (last.nu_balance() - n0) / n0;
    let start = out.shock_time.unwrap_or(f64::INFINITY);
    let mut worst: f64 = 0.0;
    for w in rows.windows(2) {
        if w[0].t >= start {
            worst = worst.min((w[1].nu_balance() - w[0].nu_balance()) / n0);
        }
    }
    let e_drift = rows
        .iter()
        .fold(0.0f64, |m, r| m.max((r.e_tot + r.e_out - e0).abs() / e0.abs()));
    let s_drift = rows
        .iter()
        .fold(0.0f64, |m, r| m.max((r.s_tot + r.s_out - s0).abs() / e0.abs()));
    let kind = if rel.abs() <= NU_FLAT_TOL {
        NuBehaviour::Degenerate
    } else if worst < -NU_STEP_TOL || rel < 0.0 {
        NuBehaviour::Decreasing
    } else if out.shock_time.is_some() {
        NuBehaviour::Producing
    } else {
        NuBehaviour::Conserved
    };
    NuVerdict {
        kind,
        relative_change: rel,
        worst_step: worst,
        e_drift,
        s_drift,
    }
}

/// Position of the first crossing of `level` by `p`, scanning left to right,
/// linearly interpolated between cell centres.
pub fn front_position(snap: &Snapshot, level: f64) -> Option<f64> {
    for i in 0..snap.p.len().saturating_sub(1) {
        let (a, b) = (snap.p[i] - level, snap.p[i + 1] - level);
        if a == 0.0 {
            return Some(snap.x[i]);
        }
        if a.signum() != b.signum() {
            return Some(snap.x[i] + (snap.x[i + 1] - snap.x[i]) * a / (a - b));
        }
    }
    None
}

/// Observed order `log2(e(N)/e(2N))` of the L1 self-convergence error,
/// comparing runs at `n`, `2n` and `4n` cells (pressure field at `t_end`).
pub fn self_convergence(cfg: &SimConfig, n: usize) -> Result<f64> {
    let field = |m: usize| -> Result<Vec<f64>> {
        let mut c = cfg.clone();
        c.n = m;
        c.snapshots = 1;
        let o = run(&c)?;
        Ok(o.snapshots.last().expect("final snapshot").p.clone())
    };
    let (a, b, c) = (field(n)?, field(2 * n)?, field(4 * n)?);
    let coarsen = |fine: &[f64]| -> Vec<f64> { fine.chunks(2).map(|w| 0.5 * (w[0] + w[1])).collect() };
    let l1 = |x: &[f64], y: &[f64]| -> f64 { x.iter().zip(y).map(|(p, q)| (p - q).abs()).sum::<f64>() / x.len() as f64 };
    let e1 = l1(&a, &coarsen(&b));
    let e2 = l1(&b, &coarsen(&c));
    Ok((e1 / e2).log2())
}
