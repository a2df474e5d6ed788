//! Equations of state: barotropic closures `rho = rho_hat(p)`, isentropic
//! closures `e = e(n)`, product-form fluids `e = n^(gamma-1) r(sigma)` and the
//! ideal gas `e = m + k n^(gamma-1) exp(sigma / c_v)`.
//!
//! Every record is immutable after construction and carries an explicit
//! validity interval; evaluating outside it is a hard [`Error::Domain`].

use std::path::Path;

use crate::error::{Error, Result};
use crate::numerics;

/// Open (or, for tables, closed) interval of admissible arguments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub closed: bool,
}

impl Interval {
    pub const POSITIVE: Interval = Interval {
        lo: 0.0,
        hi: f64::INFINITY,
        closed: false,
    };
    pub const REAL: Interval = Interval {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
        closed: false,
    };

    pub fn open(lo: f64, hi: f64) -> Self {
        Self {
            lo,
            hi,
            closed: false,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        if self.closed {
            self.lo <= x && x <= self.hi
        } else {
            self.lo < x && x < self.hi
        }
    }

    pub fn check(&self, quantity: &'static str, x: f64) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::domain(quantity, x, self.lo, self.hi))
        }
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma > 1.0 && gamma <= 2.0 {
        Ok(())
    } else {
        Err(Error::Config(format!("gamma = {gamma} outside (1, 2]")))
    }
}

fn check_positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} = {x} must be positive")))
    }
}

// ---------------------------------------------------------------------------
// Monotone cubic table
// ---------------------------------------------------------------------------

/// Shape-preserving piecewise cubic Hermite interpolant (Fritsch-Butland
/// slopes), used for tabulated barotropes.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneCubic {
    xs: Vec<f64>,
    ys: Vec<f64>,
    slopes: Vec<f64>,
}

impl MonotoneCubic {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() || xs.len() < 2 {
            return Err(Error::Config(
                "table needs at least two (x, y) rows of equal length".into(),
            ));
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Config("table abscissae must be strictly increasing".into()));
        }
        if ys.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Config("table values must be strictly increasing".into()));
        }
        let n = xs.len();
        let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<f64> = (0..n - 1).map(|i| (ys[i + 1] - ys[i]) / h[i]).collect();
        let mut slopes = vec![0.0; n];
        if n == 2 {
            slopes[0] = delta[0];
            slopes[1] = delta[0];
        } else {
            for k in 1..n - 1 {
                let (d0, d1) = (delta[k - 1], delta[k]);
                if d0 * d1 <= 0.0 {
                    slopes[k] = 0.0;
                } else {
                    let w1 = 2.0 * h[k] + h[k - 1];
                    let w2 = h[k] + 2.0 * h[k - 1];
                    slopes[k] = (w1 + w2) / (w1 / d0 + w2 / d1);
                }
            }
            slopes[0] = end_slope(h[0], h[1], delta[0], delta[1]);
            slopes[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
        }
        Ok(Self { xs, ys, slopes })
    }

    pub fn x_range(&self) -> (f64, f64) {
        (self.xs[0], *self.xs.last().expect("non-empty"))
    }

    pub fn y_range(&self) -> (f64, f64) {
        (self.ys[0], *self.ys.last().expect("non-empty"))
    }

    fn segment(&self, x: f64) -> usize {
        let n = self.xs.len();
        match self.xs.partition_point(|&xi| xi <= x) {
            0 => 0,
            k if k >= n => n - 2,
            k => k - 1,
        }
    }

    /// Value and first two derivatives at `x`.
    pub fn eval(&self, x: f64) -> (f64, f64, f64) {
        let k = self.segment(x);
        let h = self.xs[k + 1] - self.xs[k];
        let t = (x - self.xs[k]) / h;
        let (y0, y1) = (self.ys[k], self.ys[k + 1]);
        let (m0, m1) = (self.slopes[k] * h, self.slopes[k + 1] * h);
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        let y = h00 * y0 + h10 * m0 + h01 * y1 + h11 * m1;
        let dy = ((6.0 * t2 - 6.0 * t) * y0
            + (3.0 * t2 - 4.0 * t + 1.0) * m0
            + (-6.0 * t2 + 6.0 * t) * y1
            + (3.0 * t2 - 2.0 * t) * m1)
            / h;
        let d2y = ((12.0 * t - 6.0) * y0
            + (6.0 * t - 4.0) * m0
            + (-12.0 * t + 6.0) * y1
            + (6.0 * t - 2.0) * m1)
            / (h * h);
        (y, dy, d2y)
    }
}

fn end_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if d.signum() != d0.signum() {
        0.0
    } else if d0.signum() != d1.signum() && d.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        d
    }
}

// ---------------------------------------------------------------------------
// Barotropic
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub enum BaroModel {
    /// `rho_hat(p) = p / (gamma - 1)`.
    GammaLaw { gamma: f64 },
    /// Barotrope induced by `e(n) = m + kappa n^(gamma-1)`:
    /// `rho_hat(p) = m (p / (kappa (gamma-1)))^(1/gamma) + p / (gamma - 1)`.
    Polytrope { m: f64, kappa: f64, gamma: f64 },
    /// Monotone cubic through `(p, rho)` rows.
    Tabulated(MonotoneCubic),
}

/// `rho = rho_hat(p)` together with its valid pressure interval.
#[derive(Debug, Clone, PartialEq)]
pub struct BarotropicEos {
    pub model: BaroModel,
    pub interval: Interval,
    pub label: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaroProps {
    pub rho: f64,
    pub drho: f64,
    /// Squared sound speed `1 / rho_hat'(p)`.
    pub cs2: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CausalityReport {
    /// Grid pressures with `rho_hat'(p) < 1`.
    pub violations: Vec<f64>,
    /// Grid pressures with `rho_hat'(p) == 1` (to 1e-12), the causal limit.
    pub marginal: Vec<f64>,
}

impl CausalityReport {
    pub fn is_causal(&self) -> bool {
        self.violations.is_empty()
    }
}

impl serde::Serialize for BarotropicEos {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.label)
    }
}

impl BarotropicEos {
    /// Causal gamma-law barotrope, `1 < gamma <= 2`.
    pub fn gamma_law(gamma: f64) -> Result<Self> {
        check_gamma(gamma)?;
        Ok(Self::gamma_law_unchecked(gamma))
    }

    /// Gamma-law with any `gamma > 1`; acausal instances are representable so
    /// that [`BarotropicEos::causality_scan`] can flag them.
    pub fn gamma_law_unchecked(gamma: f64) -> Self {
        let label = if gamma == 2.0 {
            "stiff".to_string()
        } else {
            format!("gamma-law({gamma})")
        };
        Self {
            model: BaroModel::GammaLaw { gamma },
            interval: Interval::POSITIVE,
            label,
        }
    }

    /// `p = rho`.
    pub fn stiff() -> Self {
        Self::gamma_law_unchecked(2.0)
    }

    pub fn polytrope(m: f64, kappa: f64, gamma: f64) -> Result<Self> {
        check_gamma(gamma)?;
        check_positive("kappa", kappa)?;
        if !(m >= 0.0) {
            return Err(Error::Config(format!("m = {m} must be >= 0")));
        }
        if m == 0.0 {
            return Self::gamma_law(gamma);
        }
        Ok(Self {
            model: BaroModel::Polytrope { m, kappa, gamma },
            interval: Interval::POSITIVE,
            label: format!("polytrope(m={m},kappa={kappa},gamma={gamma})"),
        })
    }

    pub fn tabulated(ps: Vec<f64>, rhos: Vec<f64>) -> Result<Self> {
        if ps.first().is_some_and(|&p| p <= 0.0) || rhos.first().is_some_and(|&r| r <= 0.0) {
            return Err(Error::Config("tabulated p and rho must be positive".into()));
        }
        let table = MonotoneCubic::new(ps, rhos)?;
        let (lo, hi) = table.x_range();
        Ok(Self {
            model: BaroModel::Tabulated(table),
            interval: Interval {
                lo,
                hi,
                closed: true,
            },
            label: "tabulated".into(),
        })
    }

    /// Two-column CSV `p, rho`; blank lines, `#` comments and a non-numeric
    /// header row are skipped.
    pub fn from_csv(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let (mut ps, mut rhos) = (Vec::new(), Vec::new());
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split(',').map(str::trim).collect();
            if cols.len() < 2 {
                return Err(Error::Config(format!(
                    "{}:{}: expected two columns",
                    path.display(),
                    lineno + 1
                )));
            }
            match (cols[0].parse::<f64>(), cols[1].parse::<f64>()) {
                (Ok(p), Ok(r)) => {
                    ps.push(p);
                    rhos.push(r);
                }
                _ if ps.is_empty() => continue,
                _ => {
                    return Err(Error::Config(format!(
                        "{}:{}: unparsable row",
                        path.display(),
                        lineno + 1
                    )))
                }
            }
        }
        let mut eos = Self::tabulated(ps, rhos)?;
        eos.label = format!("tabulated({})", path.display());
        Ok(eos)
    }

    /// Restrict the valid pressure interval.
    pub fn with_interval(mut self, lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) || lo < self.interval.lo || hi > self.interval.hi {
            return Err(Error::Config(format!(
                "pressure interval ({lo}, {hi}) not inside ({}, {})",
                self.interval.lo, self.interval.hi
            )));
        }
        self.interval = Interval {
            lo,
            hi,
            closed: self.interval.closed,
        };
        Ok(self)
    }

    /// Adiabatic index for gamma-law barotropes.
    pub fn gamma(&self) -> Option<f64> {
        match self.model {
            BaroModel::GammaLaw { gamma } => Some(gamma),
            _ => None,
        }
    }

    pub fn is_stiff(&self) -> bool {
        self.gamma() == Some(2.0)
    }

    /// `(rho_hat, rho_hat', rho_hat'')` without a domain check.
    pub fn eval_unchecked(&self, p: f64) -> (f64, f64, f64) {
        match &self.model {
            BaroModel::GammaLaw { gamma } => (p / (gamma - 1.0), 1.0 / (gamma - 1.0), 0.0),
            BaroModel::Polytrope { m, kappa, gamma } => {
                let base = p / (kappa * (gamma - 1.0));
                let a = 1.0 / gamma;
                let rest = base.powf(a);
                let scale = kappa * (gamma - 1.0);
                (
                    m * rest + p / (gamma - 1.0),
                    m * a * rest / base / scale + 1.0 / (gamma - 1.0),
                    m * a * (a - 1.0) * rest / (base * base) / (scale * scale),
                )
            }
            BaroModel::Tabulated(t) => t.eval(p),
        }
    }

    pub fn rho_hat(&self, p: f64) -> Result<f64> {
        self.interval.check("p", p)?;
        Ok(self.eval_unchecked(p).0)
    }

    pub fn props(&self, p: f64) -> Result<BaroProps> {
        self.interval.check("p", p)?;
        let (rho, drho, _) = self.eval_unchecked(p);
        Ok(BaroProps {
            rho,
            drho,
            cs2: 1.0 / drho,
        })
    }

    pub fn sound_speed(&self, p: f64) -> Result<f64> {
        Ok(self.props(p)?.cs2.sqrt())
    }

    /// Inverse barotrope `p_hat(rho)`: closed form for gamma-law, otherwise a
    /// bracketed root find in `ln p` to relative tolerance 1e-12.
    pub fn p_hat(&self, rho: f64) -> Result<f64> {
        if !(rho > 0.0) {
            return Err(Error::domain("rho", rho, 0.0, f64::INFINITY));
        }
        if let BaroModel::GammaLaw { gamma } = self.model {
            let p = (gamma - 1.0) * rho;
            self.interval.check("p", p)?;
            return Ok(p);
        }
        let (mut lo, mut hi) = match &self.model {
            BaroModel::Tabulated(t) => {
                let (ylo, yhi) = t.y_range();
                if rho < ylo || rho > yhi {
                    return Err(Error::domain("rho", rho, ylo, yhi));
                }
                t.x_range()
            }
            _ => {
                let g = rho.min(1.0).max(1e-300);
                (g, g)
            }
        };
        let rho_of = |p: f64| self.eval_unchecked(p).0;
        let mut guard = 0;
        while rho_of(lo) > rho && guard < 4000 {
            lo *= 0.5;
            guard += 1;
        }
        while rho_of(hi) < rho && guard < 4000 {
            hi *= 2.0;
            guard += 1;
        }
        let lp = numerics::brent(|lp| rho_of(lp.exp()) - rho, lo.ln(), hi.ln(), 1e-13)
            .map_err(|_| Error::domain("rho", rho, 0.0, f64::INFINITY))?;
        let p = lp.exp();
        self.interval.check("p", p)?;
        Ok(p)
    }

    /// Left-hand side of the genuine-nonlinearity condition
    /// `(rho + p_hat) p_hat'' + 2 (1 - p_hat') p_hat'`; positive means the
    /// acoustic family is genuinely nonlinear at `rho`.
    pub fn gnl_value(&self, rho: f64) -> Result<f64> {
        let p = self.p_hat(rho)?;
        let (_, d1, d2) = self.eval_unchecked(p);
        let dp = 1.0 / d1;
        let d2p = -d2 / (d1 * d1 * d1);
        Ok((rho + p) * d2p + 2.0 * (1.0 - dp) * dp)
    }

    /// Minimum of [`gnl_value`](Self::gnl_value) over a 51-point scan of
    /// `[min(a, b), max(a, b)]` in energy density.
    pub fn gnl_min(&self, rho_a: f64, rho_b: f64) -> Result<f64> {
        numerics::lin_space(rho_a.min(rho_b), rho_a.max(rho_b), 51)
            .into_iter()
            .map(|r| self.gnl_value(r))
            .try_fold(f64::INFINITY, |acc, g| g.map(|g| acc.min(g)))
    }

    /// Flag grid points where `rho_hat'(p) < 1` (acausal sound).
    pub fn causality_scan(&self, grid: &[f64]) -> CausalityReport {
        let mut report = CausalityReport::default();
        for &p in grid {
            let d1 = self.eval_unchecked(p).1;
            if (d1 - 1.0).abs() <= 1e-12 {
                report.marginal.push(p);
            } else if d1 < 1.0 {
                report.violations.push(p);
            }
        }
        report
    }
}

// ---------------------------------------------------------------------------
// Isentropic
// ---------------------------------------------------------------------------

/// `e(n) = m + kappa n^(gamma-1)`.
///
/// Covers the massless gamma-law (`m = 0, kappa = 1/gamma`), the stiff fluid
/// (`gamma = 2`) and massive polytropes.
#[derive(Debug, Clone, PartialEq)]
pub struct IsentropicEos {
    pub m: f64,
    pub kappa: f64,
    pub gamma: f64,
    pub interval: Interval,
    pub label: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsenState {
    pub n: f64,
    pub e: f64,
    pub rho: f64,
    pub p: f64,
    pub h: f64,
}

impl IsentropicEos {
    pub fn polytrope(m: f64, kappa: f64, gamma: f64) -> Result<Self> {
        check_gamma(gamma)?;
        check_positive("kappa", kappa)?;
        if !(m >= 0.0) {
            return Err(Error::Config(format!("m = {m} must be >= 0")));
        }
        Ok(Self {
            m,
            kappa,
            gamma,
            interval: Interval::POSITIVE,
            label: format!("isentropic(m={m},kappa={kappa},gamma={gamma})"),
        })
    }

    /// `e(n) = n^(gamma-1) / gamma`.
    pub fn massless_gamma(gamma: f64) -> Result<Self> {
        let mut eos = Self::polytrope(0.0, 1.0 / gamma, gamma)?;
        eos.label = format!("massless-gamma({gamma})");
        Ok(eos)
    }

    /// `e(n) = n / 2`, i.e. `rho = p = n^2 / 2`.
    pub fn stiff() -> Self {
        let mut eos = Self::massless_gamma(2.0).expect("gamma = 2 is valid");
        eos.label = "stiff".into();
        eos
    }

    pub fn e(&self, n: f64) -> f64 {
        self.m + self.kappa * n.powf(self.gamma - 1.0)
    }

    pub fn de(&self, n: f64) -> f64 {
        self.kappa * (self.gamma - 1.0) * n.powf(self.gamma - 2.0)
    }

    pub fn d2e(&self, n: f64) -> f64 {
        self.kappa * (self.gamma - 1.0) * (self.gamma - 2.0) * n.powf(self.gamma - 3.0)
    }

    pub fn props(&self, n: f64) -> Result<IsenState> {
        if !(n > 0.0) {
            return Err(Error::domain("n", n, 0.0, f64::INFINITY));
        }
        self.interval.check("n", n)?;
        let e = self.e(n);
        let rho = n * e;
        let p = n * n * self.de(n);
        Ok(IsenState {
            n,
            e,
            rho,
            p,
            h: (rho + p) / n,
        })
    }

    /// Matter density at pressure `p` (inverse of `p(n)`).
    pub fn density_at(&self, p: f64) -> Result<f64> {
        if !(p > 0.0) {
            return Err(Error::domain("p", p, 0.0, f64::INFINITY));
        }
        Ok((p / (self.kappa * (self.gamma - 1.0))).powf(1.0 / self.gamma))
    }

    /// The induced barotrope `rho_hat(p) = rho(n(p))`.
    pub fn barotrope(&self) -> BarotropicEos {
        let mut b = if self.m == 0.0 {
            BarotropicEos::gamma_law_unchecked(self.gamma)
        } else {
            BarotropicEos {
                model: BaroModel::Polytrope {
                    m: self.m,
                    kappa: self.kappa,
                    gamma: self.gamma,
                },
                interval: Interval::POSITIVE,
                label: String::new(),
            }
        };
        let p_of = |n: f64| {
            if n == 0.0 || n.is_infinite() {
                n
            } else {
                n * n * self.de(n)
            }
        };
        b.interval = Interval::open(p_of(self.interval.lo), p_of(self.interval.hi));
        b.label = self.label.clone();
        b
    }
}

// ---------------------------------------------------------------------------
// Two-parameter fluids
// ---------------------------------------------------------------------------

/// Thermodynamic state of a fluid `e = e(n, sigma)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermoState {
    pub n: f64,
    pub sigma: f64,
    pub e: f64,
    pub rho: f64,
    pub p: f64,
    pub theta: f64,
    pub mu: f64,
    pub h: f64,
}

impl ThermoState {
    fn assemble(n: f64, sigma: f64, e: f64, e_n: f64, theta: f64) -> Result<Self> {
        if !(theta > 0.0) {
            return Err(Error::DegenerateTemperature { theta });
        }
        let rho = n * e;
        let p = n * n * e_n;
        let h = (rho + p) / n;
        Ok(Self {
            n,
            sigma,
            e,
            rho,
            p,
            theta,
            mu: h - theta * sigma,
            h,
        })
    }
}

/// Anything that maps `(n, sigma)` to a full thermodynamic state.
pub trait Thermo {
    fn thermo_props(&self, n: f64, sigma: f64) -> Result<ThermoState>;
}

/// Entropy factor `r(sigma)` of a product-form fluid.
#[derive(Debug, Clone, Copy)]
pub enum RFlavor {
    /// `r = k exp(sigma / c_v)`: massless ideal gas.
    Exp { k: f64, c_v: f64 },
    /// `r = k sigma^gamma`: double gamma-law gas.
    Power { k: f64 },
    /// User-supplied `r` and `r'` on `(sigma_lo, sigma_hi)`.
    Custom {
        r: fn(f64) -> f64,
        dr: fn(f64) -> f64,
        sigma_lo: f64,
        sigma_hi: f64,
    },
}

/// `e(n, sigma) = n^(gamma-1) r(sigma)`.
#[derive(Debug, Clone)]
pub struct ProductFormEos {
    pub gamma: f64,
    pub flavor: RFlavor,
    pub label: String,
}

impl ProductFormEos {
    pub fn new(gamma: f64, flavor: RFlavor) -> Result<Self> {
        check_gamma(gamma)?;
        let label = match flavor {
            RFlavor::Exp { k, c_v } => {
                check_positive("k", k)?;
                check_positive("c_v", c_v)?;
                format!("massless-ideal-gas(gamma={gamma},k={k},c_v={c_v})")
            }
            RFlavor::Power { k } => {
                check_positive("k", k)?;
                format!("double-gamma(gamma={gamma},k={k})")
            }
            RFlavor::Custom { .. } => format!("product-form(gamma={gamma})"),
        };
        Ok(Self {
            gamma,
            flavor,
            label,
        })
    }

    pub fn massless_ideal_gas(gamma: f64, k: f64, c_v: f64) -> Result<Self> {
        Self::new(gamma, RFlavor::Exp { k, c_v })
    }

    pub fn double_gamma(gamma: f64, k: f64) -> Result<Self> {
        Self::new(gamma, RFlavor::Power { k })
    }

    pub fn sigma_interval(&self) -> Interval {
        match self.flavor {
            RFlavor::Exp { .. } => Interval::REAL,
            RFlavor::Power { .. } => Interval::POSITIVE,
            RFlavor::Custom {
                sigma_lo, sigma_hi, ..
            } => Interval::open(sigma_lo, sigma_hi),
        }
    }

    pub fn r(&self, sigma: f64) -> f64 {
        match self.flavor {
            RFlavor::Exp { k, c_v } => k * (sigma / c_v).exp(),
            RFlavor::Power { k } => k * sigma.powf(self.gamma),
            RFlavor::Custom { r, .. } => r(sigma),
        }
    }

    pub fn dr(&self, sigma: f64) -> f64 {
        match self.flavor {
            RFlavor::Exp { k, c_v } => k * (sigma / c_v).exp() / c_v,
            RFlavor::Power { k } => k * self.gamma * sigma.powf(self.gamma - 1.0),
            RFlavor::Custom { dr, .. } => dr(sigma),
        }
    }

    /// Product-form fluids are barotropic with `p = (gamma - 1) rho`.
    pub fn reduce_to_barotropic(&self) -> Result<BarotropicEos> {
        BarotropicEos::gamma_law(self.gamma)
    }

    /// Entropy recovered from `(n, p)` by inverting `r`.
    pub fn sigma_from(&self, n: f64, p: f64) -> Result<f64> {
        let r = p / ((self.gamma - 1.0) * n.powf(self.gamma));
        if !(r > 0.0) {
            return Err(Error::domain("r", r, 0.0, f64::INFINITY));
        }
        match self.flavor {
            RFlavor::Exp { k, c_v } => Ok(c_v * (r / k).ln()),
            RFlavor::Power { k } => Ok((r / k).powf(1.0 / self.gamma)),
            RFlavor::Custom {
                r: rf,
                sigma_lo,
                sigma_hi,
                ..
            } => {
                let lo = if sigma_lo.is_finite() { sigma_lo } else { -1e3 };
                let hi = if sigma_hi.is_finite() { sigma_hi } else { 1e3 };
                numerics::brent(|s| rf(s) - r, lo, hi, 1e-14)
            }
        }
    }
}

impl Thermo for ProductFormEos {
    fn thermo_props(&self, n: f64, sigma: f64) -> Result<ThermoState> {
        if !(n > 0.0) {
            return Err(Error::domain("n", n, 0.0, f64::INFINITY));
        }
        self.sigma_interval().check("sigma", sigma)?;
        let g = self.gamma;
        let r = self.r(sigma);
        let e = n.powf(g - 1.0) * r;
        let e_n = (g - 1.0) * n.powf(g - 2.0) * r;
        let theta = n.powf(g - 1.0) * self.dr(sigma);
        ThermoState::assemble(n, sigma, e, e_n, theta)
    }
}

/// `e(n, sigma) = m + k n^(gamma-1) exp(sigma / c_v)`, `1 < gamma <= 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdealGasEos {
    pub m: f64,
    pub k: f64,
    pub c_v: f64,
    pub gamma: f64,
}

impl IdealGasEos {
    pub fn new(m: f64, k: f64, c_v: f64, gamma: f64) -> Result<Self> {
        check_gamma(gamma)?;
        check_positive("k", k)?;
        check_positive("c_v", c_v)?;
        if !(m >= 0.0) {
            return Err(Error::Config(format!("m = {m} must be >= 0")));
        }
        Ok(Self { m, k, c_v, gamma })
    }

    pub fn label(&self) -> String {
        format!(
            "ideal-gas(m={},k={},c_v={},gamma={})",
            self.m, self.k, self.c_v, self.gamma
        )
    }

    /// The massless case as a product-form fluid.
    pub fn as_product_form(&self) -> Result<ProductFormEos> {
        if self.m != 0.0 {
            return Err(Error::Unsupported(format!(
                "ideal gas with m = {} is not of product form",
                self.m
            )));
        }
        ProductFormEos::massless_ideal_gas(self.gamma, self.k, self.c_v)
    }

    pub fn reduce_to_barotropic(&self) -> Result<BarotropicEos> {
        self.as_product_form()?.reduce_to_barotropic()
    }

    /// Squared sound speed at fixed entropy, `gamma p / (rho + p)`.
    pub fn sound_speed2(&self, state: &ThermoState) -> f64 {
        self.gamma * state.p / (state.rho + state.p)
    }

    /// `(n, sigma)` from temperature and `psi_4 = mu / theta`, closed form.
    pub fn n_sigma_from(&self, theta: f64, psi4: f64) -> Result<(f64, f64)> {
        if !(theta > 0.0) {
            return Err(Error::DegenerateTemperature { theta });
        }
        let sigma = self.m / theta + self.gamma * self.c_v - psi4;
        let n = (self.c_v * theta * (-sigma / self.c_v).exp() / self.k).powf(1.0 / (self.gamma - 1.0));
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::domain("n", n, 0.0, f64::INFINITY));
        }
        Ok((n, sigma))
    }
}

impl Thermo for IdealGasEos {
    fn thermo_props(&self, n: f64, sigma: f64) -> Result<ThermoState> {
        if !(n > 0.0) {
            return Err(Error::domain("n", n, 0.0, f64::INFINITY));
        }
        if !sigma.is_finite() {
            return Err(Error::domain("sigma", sigma, f64::NEG_INFINITY, f64::INFINITY));
        }
        let g = self.gamma;
        let x = self.k * (sigma / self.c_v).exp();
        let e = self.m + x * n.powf(g - 1.0);
        let e_n = (g - 1.0) * x * n.powf(g - 2.0);
        let theta = x * n.powf(g - 1.0) / self.c_v;
        ThermoState::assemble(n, sigma, e, e_n, theta)
    }
}
