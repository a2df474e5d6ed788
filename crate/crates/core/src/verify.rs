//! Reusable verification suites. Each suite returns named [`Check`]s with the
//! measured value, the tolerance and the verdict.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::eos::{BarotropicEos, IdealGasEos, IsentropicEos, ProductFormEos, Thermo};
use crate::error::Error;
use crate::godunov::{self, Definiteness};
use crate::index::{self, IndexFunction, IndexMode};
use crate::numerics::{lin_space, log_space};
use crate::shock;
use crate::spacetime::{sample_timelike, FourVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Bound {
    /// Passes when `value < tolerance`.
    Below,
    /// Passes when `value > tolerance`.
    Above,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub bound: Bound,
    pub pass: bool,
    /// Sample count, seeds or the error that aborted the check.
    pub note: String,
}

impl Check {
    pub fn below(name: impl Into<String>, value: f64, tolerance: f64, note: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance,
            bound: Bound::Below,
            pass: value < tolerance,
            note: note.into(),
        }
    }

    pub fn above(name: impl Into<String>, value: f64, tolerance: f64, note: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance,
            bound: Bound::Above,
            pass: value > tolerance,
            note: note.into(),
        }
    }

    pub fn error(name: impl Into<String>, err: &Error) -> Self {
        Self {
            name: name.into(),
            value: f64::NAN,
            tolerance: f64::NAN,
            bound: Bound::Below,
            pass: false,
            note: format!("{}: {err}", err.kind()),
        }
    }
}

/// Largest value of a fallible residual over `points`, or the first error.
fn worst<T, F>(points: impl IntoIterator<Item = T>, mut f: F) -> Result<f64, Error>
where
    F: FnMut(T) -> Result<f64, Error>,
{
    let mut m: f64 = 0.0;
    for x in points {
        let r = f(x)?;
        if r.is_nan() {
            return Err(Error::InvalidState("residual is NaN".into()));
        }
        m = m.max(r);
    }
    Ok(m)
}

fn below_or_error(name: &str, r: Result<f64, Error>, tol: f64, note: impl Into<String>) -> Check {
    match r {
        Ok(v) => Check::below(name, v, tol, note),
        Err(e) => Check::error(name, &e),
    }
}

// ---------------------------------------------------------------------------
// Equation of state and index
// ---------------------------------------------------------------------------

pub fn causality(eos: &BarotropicEos, p_lo: f64, p_hi: f64, points: usize) -> Check {
    let grid = log_space(p_lo, p_hi, points);
    let rep = eos.causality_scan(&grid);
    let worst_p = rep.violations.first().copied();
    let min_d: f64 = grid.iter().map(|&p| eos.eval_unchecked(p).1).fold(f64::INFINITY, f64::min);
    let mut c = Check::above("causality: min rho_hat'(p) >= 1", min_d, 1.0 - 1e-12, format!("{points} points"));
    if let Some(p) = worst_p {
        c.note = format!("{} violations, first at p = {p}", rep.violations.len());
    }
    c
}

/// ODE residual, `nu f' = 1`, `pi(f(p)) = p` and, for gamma-law barotropes,
/// quadrature against closed form.
pub fn index_suite(eos: &BarotropicEos, p_ref: f64, p_lo: f64, p_hi: f64, points: usize) -> Vec<Check> {
    let grid = log_space(p_lo, p_hi, points);
    let note = format!("{points} log-spaced p in [{p_lo}, {p_hi}]");
    let idx = match IndexFunction::new(eos.clone(), p_ref) {
        Ok(i) => i,
        Err(e) => return vec![Check::error("index construction", &e)],
    };
    let mut out = vec![
        below_or_error("index ODE residual", worst(grid.iter().copied(), |p| idx.ode_residual(p)), 1e-8, &note),
        below_or_error("nu f' = 1", worst(grid.iter().copied(), |p| idx.nu_fprime_residual(p)), 1e-8, &note),
        below_or_error(
            "pi(f(p)) = p",
            worst(grid.iter().copied(), |p| Ok((idx.pi_of_f(idx.index_f(p)?)? - p).abs() / p)),
            1e-9,
            &note,
        ),
    ];
    if eos.gamma().is_some() {
        let r = IndexFunction::with_mode(eos.clone(), p_ref, 1.0, IndexMode::Quadrature).and_then(|q| {
            worst(grid.iter().copied(), |p| {
                let a = idx.index_f(p)?;
                Ok((q.index_f(p)? - a).abs() / a)
            })
        });
        out.push(below_or_error("quadrature index = closed form", r, 1e-8, &note));
    }
    out
}

/// Enthalpy calibration, Legendre duality and `nu(p(n)) = n` over a
/// log-spaced density grid.
pub fn isentropic_suite(iso: &IsentropicEos, n_lo: f64, n_hi: f64, points: usize) -> Vec<Check> {
    let grid = log_space(n_lo, n_hi, points);
    let note = format!("{}; {points} n in [{n_lo}, {n_hi}]", iso.label);
    let idx = match IndexFunction::enthalpy_calibrated(iso, 1.0, IndexMode::Quadrature) {
        Ok(i) => i,
        Err(e) => return vec![Check::error("index construction", &e)],
    };
    let raw = IndexFunction::new(iso.barotrope(), 1.0);
    let enthalpy = raw.and_then(|raw| worst(grid.iter().copied(), |n| index::enthalpy_index_residual(iso, &raw, n, 1.0)));
    vec![
        below_or_error("f(p(n)) = h(n)", enthalpy, 1e-9, &note),
        below_or_error(
            "Legendre duality rho + pi(h) = n h, pi'(h) = n",
            worst(grid.iter().copied(), |n| index::legendre_residual(iso, &idx, n)),
            1e-9,
            &note,
        ),
        below_or_error(
            "nu(p(n)) = n",
            worst(grid.iter().copied(), |n| index::nu_equals_n_residual(iso, &idx, n)),
            1e-9,
            &note,
        ),
    ]
}

/// Double-gamma gas: index tracks temperature; massless ideal gas: it does not.
pub fn product_form_suite(gamma: f64, k: f64, c_v: f64) -> Vec<Check> {
    let ns = lin_space(0.2, 5.0, 10);
    let sigmas_pos = lin_space(0.3, 3.0, 10);
    let sigmas = lin_space(-1.5, 1.5, 10);
    let note = format!("gamma = {gamma}, 10x10 (n, sigma) grid");
    let mut out = Vec::new();
    match ProductFormEos::double_gamma(gamma, k).and_then(|e| index::product_form_index_checks(&e, &ns, &sigmas_pos)) {
        Ok(r) => {
            out.push(Check::below("double-gamma: spread of f/theta", r.f_over_theta_spread, 1e-10, &note));
            out.push(Check::below("double-gamma: spread of nu/(n sigma)", r.nu_over_entropy_spread, 1e-10, &note));
        }
        Err(e) => out.push(Check::error("double-gamma", &e)),
    }
    match ProductFormEos::massless_ideal_gas(gamma, k, c_v).and_then(|e| index::product_form_index_checks(&e, &ns, &sigmas)) {
        Ok(r) => {
            out.push(Check::above("massless ideal gas: spread of f/theta", r.f_over_theta_spread, 0.1, &note));
            out.push(Check::above("massless ideal gas: spread of nu/(n sigma)", r.nu_over_entropy_spread, 0.1, &note));
        }
        Err(e) => out.push(Check::error("massless ideal gas", &e)),
    }
    out
}

// ---------------------------------------------------------------------------
// Symmetrizers
// ---------------------------------------------------------------------------

/// Summary of a symmetrizer sweep over states x covectors.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct SymmetrizerSweep {
    pub evaluated: usize,
    pub max_asymmetry: f64,
    pub asymmetry_failures: usize,
    pub indefinite: usize,
    /// Signs seen for future- and past-directed covectors.
    pub future_signs: Vec<i32>,
    pub past_signs: Vec<i32>,
    pub errors: usize,
    pub first_error: Option<String>,
}

impl SymmetrizerSweep {
    fn new() -> Self {
        Self {
            evaluated: 0,
            max_asymmetry: 0.0,
            asymmetry_failures: 0,
            indefinite: 0,
            future_signs: Vec::new(),
            past_signs: Vec::new(),
            errors: 0,
            first_error: None,
        }
    }

    fn record(&mut self, r: Result<godunov::Symmetrizer, Error>) {
        match r {
            Ok(m) => {
                self.evaluated += 1;
                self.max_asymmetry = self.max_asymmetry.max(m.asymmetry);
                if !(m.asymmetry < 1e-5) {
                    self.asymmetry_failures += 1;
                }
                if m.definiteness == Definiteness::Indefinite {
                    self.indefinite += 1;
                } else {
                    let signs = if m.future_directed() { &mut self.future_signs } else { &mut self.past_signs };
                    let s = m.definiteness.sign();
                    if !signs.contains(&s) {
                        signs.push(s);
                    }
                }
            }
            Err(e) => {
                self.errors += 1;
                if self.first_error.is_none() {
                    self.first_error = Some(e.to_string());
                }
            }
        }
    }

    /// Each orientation saw exactly one sign.
    pub fn orientation_consistent(&self) -> bool {
        self.future_signs.len() <= 1 && self.past_signs.len() <= 1
    }

    pub fn checks(&self, label: &str, seed: u64) -> Vec<Check> {
        let note = format!(
            "{} symmetrizers, seed {seed}; future sign {:?}, past sign {:?}{}",
            self.evaluated,
            self.future_signs,
            self.past_signs,
            self.first_error.as_ref().map(|e| format!("; error: {e}")).unwrap_or_default()
        );
        vec![
            Check::below(format!("{label}: max |M - M^T| / |M|"), self.max_asymmetry, 1e-5, &note),
            Check::below(
                format!("{label}: symmetry or evaluation failures"),
                (self.asymmetry_failures + self.errors) as f64,
                0.5,
                &note,
            ),
            Check::below(format!("{label}: indefinite symmetrizers"), self.indefinite as f64, 0.5, &note),
            Check::below(
                format!("{label}: sign changes within a time orientation"),
                (self.future_signs.len().saturating_sub(1) + self.past_signs.len().saturating_sub(1)) as f64,
                0.5,
                &note,
            ),
        ]
    }
}

fn covectors(seed: u64, count: usize) -> Vec<FourVector> {
    (0..count as u64).map(|k| sample_timelike(seed.wrapping_mul(1_000_003).wrapping_add(k))).collect()
}

pub fn symmetrizer4_sweep(
    idx: &IndexFunction,
    p_range: (f64, f64),
    states: usize,
    covs: usize,
    seed: u64,
) -> SymmetrizerSweep {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ts = covectors(seed, covs);
    let mut sweep = SymmetrizerSweep::new();
    for _ in 0..states {
        match godunov::random_state4(&mut rng, idx, p_range, 0.9) {
            Ok(s) => {
                for t in &ts {
                    sweep.record(godunov::symmetrizer4(idx, &s, t));
                }
            }
            Err(e) => sweep.record(Err(e)),
        }
    }
    sweep
}

pub fn symmetrizer5_sweep(eos: &IdealGasEos, states: usize, covs: usize, seed: u64) -> SymmetrizerSweep {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ts = covectors(seed, covs);
    let mut sweep = SymmetrizerSweep::new();
    for _ in 0..states {
        match godunov::random_state5(&mut rng, eos, (0.1, 10.0), (-1.0, 1.0), 0.9) {
            Ok(s) => {
                for t in &ts {
                    sweep.record(godunov::symmetrizer5(eos, &s, t));
                }
            }
            Err(e) => sweep.record(Err(e)),
        }
    }
    sweep
}

/// Flux and current identities of the four-field system on random states.
pub fn four_field_identities(idx: &IndexFunction, p_range: (f64, f64), states: usize, seed: u64) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sts: Result<Vec<_>, Error> = (0..states)
        .map(|_| godunov::random_state4(&mut rng, idx, p_range, 0.9))
        .collect();
    let sts = match sts {
        Ok(s) => s,
        Err(e) => return vec![Check::error("random four-field states", &e)],
    };
    let note = format!("{states} random states, seed {seed}");
    vec![
        below_or_error(
            "flux4 = (rho+p) U U + p g",
            worst(sts.iter(), |s| godunov::flux4_tensor_residual(idx, s)),
            1e-10,
            &note,
        ),
        below_or_error(
            "flux4 = d potential4 / d Upsilon",
            worst(sts.iter(), |s| godunov::flux4_fd_residual(idx, s)),
            1e-6,
            &note,
        ),
        below_or_error(
            "potential4 = d X / d Upsilon",
            worst(sts.iter(), |s| godunov::potential4_fd_residual(idx, s)),
            1e-6,
            &note,
        ),
        below_or_error(
            "potential4 parallel to Upsilon",
            worst(sts.iter(), |s| godunov::potential4_isotropy_residual(idx, s)),
            1e-12,
            &note,
        ),
        below_or_error(
            "X - T Upsilon = nu U",
            worst(sts.iter(), |s| godunov::extra_current4_residual(idx, s)),
            1e-9,
            &note,
        ),
        below_or_error(
            "Godunov round trip",
            worst(sts.iter(), |s| {
                let (p, u) = godunov::from_godunov4(idx, s)?;
                let back = godunov::to_godunov4(idx, p, &u)?;
                Ok((0..4).fold(0.0f64, |m, i| m.max((back.upsilon.c[i] - s.upsilon.c[i]).abs()))
                    / s.upsilon.c.iter().fold(0.0f64, |m, x| m.max(x.abs())))
            }),
            1e-11,
            &note,
        ),
    ]
}

/// Generating function, fluxes and entropy current of the ideal gas.
pub fn ideal_gas_identities(eos: &IdealGasEos, states: usize, seed: u64) -> Vec<Check> {
    let ns = log_space(0.1, 10.0, 20);
    let sigmas = lin_space(-2.0, 2.0, 20);
    let grid: Vec<(f64, f64)> = ns.iter().flat_map(|&n| sigmas.iter().map(move |&s| (n, s))).collect();
    let gnote = format!("{}; 20x20 (n, sigma) grid", eos.label());
    let mut out = vec![
        below_or_error(
            "X_hat(theta, psi_4) = p",
            worst(grid.iter().copied(), |(n, s)| {
                let st = eos.thermo_props(n, s)?;
                Ok((godunov::xhat_ideal(eos, st.theta, st.mu / st.theta)? - st.p).abs() / st.p)
            }),
            1e-10,
            &gnote,
        ),
        below_or_error(
            "X_hat: both closed forms agree",
            worst(grid.iter().copied(), |(n, s)| {
                let st = eos.thermo_props(n, s)?;
                let psi = st.mu / st.theta;
                let a = godunov::xhat_ideal(eos, st.theta, psi)?;
                Ok((godunov::xhat_ideal_expanded(eos, st.theta, psi)? - a).abs() / a)
            }),
            1e-12,
            &gnote,
        ),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sts: Result<Vec<_>, Error> = (0..states)
        .map(|_| godunov::random_state5(&mut rng, eos, (0.1, 10.0), (-1.0, 1.0), 0.9))
        .collect();
    let sts = match sts {
        Ok(s) => s,
        Err(e) => {
            out.push(Check::error("random five-field states", &e));
            return out;
        }
    };
    let note = format!("{states} random states, seed {seed}");
    let res: Result<Vec<(f64, f64, f64)>, Error> = sts.iter().map(|s| godunov::fluxes5_residuals(eos, s)).collect();
    match res {
        Ok(r) => {
            let m = |k: usize| {
                r.iter()
                    .map(|t| [t.0, t.1, t.2][k])
                    .fold(0.0f64, f64::max)
            };
            out.push(Check::below("fluxes5 T = (rho+p) U U + p g", m(0), 1e-10, &note));
            out.push(Check::below("fluxes5 N = n U", m(1), 1e-10, &note));
            out.push(Check::below("fluxes5 partials = FD of X_hat", m(2), 1e-6, &note));
        }
        Err(e) => out.push(Check::error("fluxes5", &e)),
    }
    out.push(below_or_error(
        "X - T psi - N psi_4 = n sigma U",
        worst(sts.iter(), |s| godunov::entropy_current_residual(eos, s)),
        1e-9,
        &note,
    ));
    out.push(below_or_error(
        "Godunov5 round trip",
        worst(sts.iter(), |s| {
            let (n, sigma, u) = godunov::from_godunov5(eos, s)?;
            let back = godunov::to_godunov5(eos, n, sigma, &u)?;
            let d = (0..4).fold((back.psi4 - s.psi4).abs() / s.psi4.abs().max(1.0), |m, i| {
                m.max((back.psi.c[i] - s.psi.c[i]).abs() / s.psi.c[0].abs())
            });
            Ok(d)
        }),
        1e-11,
        &note,
    ));
    out.push(below_or_error(
        "symmetrizer5 block = second differences of X T",
        worst(sts.iter().take(10), |s| {
            let m = godunov::symmetrizer5(eos, s, &FourVector::co([-1.0, 0.0, 0.0, 0.0]))?;
            godunov::symmetrizer5_block_residual(eos, s, &m)
        }),
        1e-5,
        format!("{} states, T = (-1, 0, 0, 0)", sts.len().min(10)),
    ));
    out
}

// ---------------------------------------------------------------------------
// Shocks
// ---------------------------------------------------------------------------

/// Production sign, orientation antisymmetry and jump residuals on random
/// shocks of the given barotrope; linear degeneracy for the stiff fluid.
///
/// Both pressures are log-uniform on `p_range`.
pub fn shock_suite(idx: &IndexFunction, p_range: (f64, f64), count: usize, seed: u64) -> Vec<Check> {
    use rand::Rng;
    let eos = idx.eos();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min_prod = f64::INFINITY;
    let mut max_abs_prod: f64 = 0.0;
    let mut max_res: f64 = 0.0;
    let mut anti: f64 = 0.0;
    let mut counter = 0usize;
    let mut lax = 0usize;
    let mut degenerate = 0usize;
    for _ in 0..count {
        let (lo, hi) = (p_range.0.ln(), p_range.1.ln());
        let a = rng.random_range(lo..hi).exp();
        let b = rng.random_range(lo..hi).exp();
        if a == b {
            continue;
        }
        let r = (|| -> Result<(), Error> {
            let s = shock::rh_solve_barotropic(eos, a, b)?;
            let p = shock::nu_production(idx, &s)?;
            let q = shock::nu_production(idx, &shock::rh_solve_barotropic(eos, b, a)?)?;
            anti = anti.max((p + q).abs() / idx.nu(a)?.max(idx.nu(b)?));
            max_abs_prod = max_abs_prod.max(p.abs());
            if s.kind == shock::ShockKind::LinearlyDegenerate {
                degenerate += 1;
                return Ok(());
            }
            max_res = max_res.max(s.residuals[0]).max(s.residuals[1]);
            if shock::lax_admissible(eos, &s) && eos.gnl_min(s.rho_minus, s.rho_plus)? > 0.0 {
                lax += 1;
                min_prod = min_prod.min(p);
                if !(p > 0.0) {
                    counter += 1;
                }
            }
            Ok(())
        })();
        if let Err(e) = r {
            return vec![Check::error("shock sweep", &e)];
        }
    }
    let note = format!("{count} random shocks, seed {seed}: {lax} admissible, {degenerate} linearly degenerate");
    let mut out = vec![
        Check::below("shock jump residuals", max_res, 1e-10, &note),
        Check::below("production antisymmetry |P(a->b) + P(b->a)| / nu", anti, 1e-12, &note),
    ];
    if degenerate > 0 && lax == 0 {
        out.push(Check::below("linearly degenerate |production|", max_abs_prod, 1e-12, &note));
    } else {
        out.push(Check::below("admissible shocks with production <= 0", counter as f64, 0.5, &note));
    }
    out
}

/// Lines `PASS|FAIL name value bound tolerance (note)`.
pub fn format_checks(checks: &[Check]) -> String {
    let mut s = String::new();
    for c in checks {
        let op = match c.bound {
            Bound::Below => "<",
            Bound::Above => ">",
        };
        s.push_str(&format!(
            "{} {}: {:.3e} {op} {:.1e} ({})\n",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.value,
            c.tolerance,
            c.note
        ));
    }
    s
}
