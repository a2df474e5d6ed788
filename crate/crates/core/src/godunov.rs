//! Godunov variables, 4-potentials and symmetrizers.
//!
//! Four-field barotropic system: `Upsilon_a = U_a / f`, potential
//! `X^b = pi(f) Upsilon^b`, flux `T^{ab} = dX^b / dUpsilon_a`.
//!
//! Five-field ideal gas: `psi_a = U_a / theta`, `psi_4 = mu / theta`, scalar
//! generating function `X_hat(theta, psi_4)`, potential `X^b = X_hat psi^b`.
//!
//! All Godunov variables are stored with lower indices.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;

use crate::eos::{IdealGasEos, Thermo};
use crate::error::{Error, Result};
use crate::index::IndexFunction;
use crate::spacetime::{self, FourVector, METRIC};

pub type Mat4 = [[f64; 4]; 4];

const UNITARITY_TOL: f64 = 1e-10;

fn check_unit(u: &FourVector) -> Result<()> {
    let r = (u.norm2() + 1.0).abs();
    if r > UNITARITY_TOL {
        return Err(Error::Precondition(format!(
            "4-velocity not normalised: |U.U + 1| = {r:e}"
        )));
    }
    Ok(())
}

/// `(-v.v)^(-1/2)` for a timelike covector.
fn inv_sqrt_norm(v: &FourVector, what: &str) -> Result<f64> {
    let n2 = v.norm2();
    if !(n2 < 0.0) || !n2.is_finite() {
        return Err(Error::InvalidState(format!("{what} is not timelike (norm {n2})")));
    }
    Ok(1.0 / (-n2).sqrt())
}

fn max_abs(c: &[f64]) -> f64 {
    c.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

fn outer_plus_metric(a: f64, v: &[f64; 4], b: f64) -> Mat4 {
    let mut t = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            t[i][j] = a * v[i] * v[j];
        }
        t[i][i] += b * METRIC[i];
    }
    t
}

fn mat_rel_diff(a: &Mat4, b: &Mat4) -> f64 {
    let mut num: f64 = 0.0;
    let mut den: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            num = num.max((a[i][j] - b[i][j]).abs());
            den = den.max(b[i][j].abs());
        }
    }
    num / den
}

fn vec_rel_diff(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    let num = (0..4).fold(0.0f64, |m, i| m.max((a[i] - b[i]).abs()));
    num / max_abs(b)
}

/// `T^{ab} = (rho + p) U^a U^b + p g^{ab}` for a contravariant `U`.
pub fn perfect_fluid_tensor(rho: f64, p: f64, u: &FourVector) -> Mat4 {
    outer_plus_metric(rho + p, &u.raise().c, p)
}

// ---------------------------------------------------------------------------
// Four-field system
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GodunovState4 {
    pub upsilon: FourVector,
}

impl GodunovState4 {
    pub fn new(c: [f64; 4]) -> Self {
        Self {
            upsilon: FourVector::co(c),
        }
    }

    /// `f = (-Upsilon.Upsilon)^(-1/2)`.
    pub fn index(&self) -> Result<f64> {
        inv_sqrt_norm(&self.upsilon, "Upsilon")
    }
}

/// `Upsilon_a = U_a / f(p)`.
pub fn to_godunov4(idx: &IndexFunction, p: f64, u: &FourVector) -> Result<GodunovState4> {
    check_unit(u)?;
    let f = idx.index_f(p)?;
    Ok(GodunovState4 {
        upsilon: u.lower().scale(1.0 / f),
    })
}

/// Pressure and contravariant 4-velocity of a Godunov state.
pub fn from_godunov4(idx: &IndexFunction, s: &GodunovState4) -> Result<(f64, FourVector)> {
    let f = s.index()?;
    let p = idx.pi_of_f(f)?;
    Ok((p, s.upsilon.scale(f).raise()))
}

/// `X^b = pi(f) Upsilon^b`.
pub fn potential4(idx: &IndexFunction, s: &GodunovState4) -> Result<FourVector> {
    let f = s.index()?;
    Ok(s.upsilon.raise().scale(idx.pi_of_f(f)?))
}

/// Scalar potential `X(Upsilon) = X_hat(f(Upsilon))`.
pub fn scalar_potential4(idx: &IndexFunction, s: &GodunovState4) -> Result<f64> {
    idx.xhat_of_f(s.index()?)
}

/// `max_b |X^b - dX/dUpsilon_b| / |X|` with the gradient of the scalar
/// potential taken by central differences.
pub fn potential4_fd_residual(idx: &IndexFunction, s: &GodunovState4) -> Result<f64> {
    let x = potential4(idx, s)?;
    let h = f64::EPSILON.cbrt() * max_abs(&s.upsilon.c);
    let mut grad = [0.0; 4];
    for (b, g) in grad.iter_mut().enumerate() {
        let (mut up, mut dn) = (*s, *s);
        up.upsilon.c[b] += h;
        dn.upsilon.c[b] -= h;
        let hh = up.upsilon.c[b] - dn.upsilon.c[b];
        *g = (scalar_potential4(idx, &up)? - scalar_potential4(idx, &dn)?) / hh;
    }
    Ok(vec_rel_diff(&grad, &x.c))
}

/// `T^{ab} = f^3 pi'(f) Upsilon^a Upsilon^b + pi(f) g^{ab}`.
pub fn flux4(idx: &IndexFunction, s: &GodunovState4) -> Result<Mat4> {
    let f = s.index()?;
    let pi = idx.pi_of_f(f)?;
    let fpi = f * idx.pi_prime(f)?;
    let up = s.upsilon.raise();
    Ok(outer_plus_metric(fpi * f * f, &up.c, pi))
}

/// Relative distance of [`flux4`] from `(rho + p) U U + p g`.
pub fn flux4_tensor_residual(idx: &IndexFunction, s: &GodunovState4) -> Result<f64> {
    let (p, u) = from_godunov4(idx, s)?;
    let rho = idx.eos().rho_hat(p)?;
    Ok(mat_rel_diff(&flux4(idx, s)?, &perfect_fluid_tensor(rho, p, &u)))
}

/// Relative distance of [`flux4`] from central differences
/// `dX^b / dUpsilon_a` of [`potential4`].
pub fn flux4_fd_residual(idx: &IndexFunction, s: &GodunovState4) -> Result<f64> {
    let t = flux4(idx, s)?;
    let h = f64::EPSILON.cbrt() * max_abs(&s.upsilon.c);
    let mut fd = [[0.0; 4]; 4];
    for a in 0..4 {
        let (mut up, mut dn) = (*s, *s);
        up.upsilon.c[a] += h;
        dn.upsilon.c[a] -= h;
        let hh = up.upsilon.c[a] - dn.upsilon.c[a];
        let xp = potential4(idx, &up)?;
        let xm = potential4(idx, &dn)?;
        for b in 0..4 {
            fd[a][b] = (xp.c[b] - xm.c[b]) / hh;
        }
    }
    Ok(mat_rel_diff(&fd, &t))
}

/// Largest relative component of `X^b` orthogonal to `Upsilon^b`.
pub fn potential4_isotropy_residual(idx: &IndexFunction, s: &GodunovState4) -> Result<f64> {
    let x = potential4(idx, s)?;
    let up = s.upsilon.raise();
    let k = (0..4)
        .max_by(|&i, &j| up.c[i].abs().total_cmp(&up.c[j].abs()))
        .expect("four components");
    let ratio = x.c[k] / up.c[k];
    let resid = (0..4).fold(0.0f64, |m, i| m.max((x.c[i] - ratio * up.c[i]).abs()));
    Ok(resid / max_abs(&x.c))
}

/// `X^b - T^{ab} Upsilon_a`.
pub fn extra_current4(idx: &IndexFunction, s: &GodunovState4) -> Result<FourVector> {
    let x = potential4(idx, s)?;
    let t = flux4(idx, s)?;
    let mut c = x.c;
    for (b, cb) in c.iter_mut().enumerate() {
        for a in 0..4 {
            *cb -= t[a][b] * s.upsilon.c[a];
        }
    }
    Ok(FourVector::contra(c))
}

/// Relative distance of [`extra_current4`] from `nu(p) U^b`.
pub fn extra_current4_residual(idx: &IndexFunction, s: &GodunovState4) -> Result<f64> {
    let (p, u) = from_godunov4(idx, s)?;
    let expect = u.scale(idx.nu(p)?);
    Ok(vec_rel_diff(&extra_current4(idx, s)?.c, &expect.c))
}

/// Random Godunov state with `ln p` uniform on `p_range` and speed below `vmax`.
pub fn random_state4<R: Rng>(
    rng: &mut R,
    idx: &IndexFunction,
    p_range: (f64, f64),
    vmax: f64,
) -> Result<GodunovState4> {
    let p = rng.random_range(p_range.0.ln()..=p_range.1.ln()).exp();
    let u = spacetime::four_velocity(spacetime::random_velocity(rng, vmax))?;
    to_godunov4(idx, p, &u)
}

// ---------------------------------------------------------------------------
// Symmetrizers
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Definiteness {
    Positive,
    Negative,
    Indefinite,
}

impl Definiteness {
    pub fn sign(self) -> i32 {
        match self {
            Definiteness::Positive => 1,
            Definiteness::Negative => -1,
            Definiteness::Indefinite => 0,
        }
    }
}

/// `M_ag = d(F^{ab} T_b) / dpsi_g` for a timelike covector `T`.
#[derive(Debug, Clone)]
pub struct Symmetrizer {
    pub matrix: DMatrix<f64>,
    pub t: FourVector,
    /// `|M - M^T|_F / |M|_F`.
    pub asymmetry: f64,
    /// Eigenvalues of `(M + M^T) / 2`, ascending.
    pub eigenvalues: Vec<f64>,
    pub definiteness: Definiteness,
    pub min_abs_eigenvalue: f64,
}

impl Symmetrizer {
    fn from_matrix(matrix: DMatrix<f64>, t: FourVector) -> Self {
        let norm = matrix.norm();
        let asymmetry = (&matrix - matrix.transpose()).norm() / norm;
        let sym = (&matrix + matrix.transpose()) * 0.5;
        let mut eigenvalues: Vec<f64> = SymmetricEigen::new(sym).eigenvalues.iter().copied().collect();
        eigenvalues.sort_by(f64::total_cmp);
        let definiteness = if eigenvalues.iter().all(|&e| e > 0.0) {
            Definiteness::Positive
        } else if eigenvalues.iter().all(|&e| e < 0.0) {
            Definiteness::Negative
        } else {
            Definiteness::Indefinite
        };
        let min_abs_eigenvalue = eigenvalues.iter().fold(f64::INFINITY, |m, e| m.min(e.abs()));
        Self {
            matrix,
            t,
            asymmetry,
            eigenvalues,
            definiteness,
            min_abs_eigenvalue,
        }
    }

    /// Whether `t` is future directed (`T^0 > 0`).
    pub fn future_directed(&self) -> bool {
        self.t.raise().c[0] > 0.0
    }
}

fn check_timelike_t(t: &FourVector) -> Result<FourVector> {
    let t = t.lower();
    if !(t.norm2() < 0.0) {
        return Err(Error::Precondition(format!(
            "contraction covector is not timelike (norm {})",
            t.norm2()
        )));
    }
    Ok(t)
}

fn contract(m: &Mat4, t: &FourVector) -> [f64; 4] {
    let mut out = [0.0; 4];
    for (a, o) in out.iter_mut().enumerate() {
        *o = (0..4).map(|b| m[a][b] * t.c[b]).sum();
    }
    out
}

/// Four-field symmetrizer by central differences of the analytic flux.
pub fn symmetrizer4(idx: &IndexFunction, s: &GodunovState4, t: &FourVector) -> Result<Symmetrizer> {
    let t = check_timelike_t(t)?;
    s.index()?;
    let h = f64::EPSILON.cbrt() * max_abs(&s.upsilon.c);
    let mut m = DMatrix::zeros(4, 4);
    for g in 0..4 {
        let (mut up, mut dn) = (*s, *s);
        up.upsilon.c[g] += h;
        dn.upsilon.c[g] -= h;
        let hh = up.upsilon.c[g] - dn.upsilon.c[g];
        let fp = contract(&flux4(idx, &up)?, &t);
        let fm = contract(&flux4(idx, &dn)?, &t);
        for a in 0..4 {
            m[(a, g)] = (fp[a] - fm[a]) / hh;
        }
    }
    Ok(Symmetrizer::from_matrix(m, t))
}

// ---------------------------------------------------------------------------
// Five-field ideal gas
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GodunovState5 {
    pub psi: FourVector,
    pub psi4: f64,
}

impl GodunovState5 {
    pub fn new(psi: [f64; 4], psi4: f64) -> Self {
        Self {
            psi: FourVector::co(psi),
            psi4,
        }
    }

    /// `theta = (-psi.psi)^(-1/2)`.
    pub fn theta(&self) -> Result<f64> {
        inv_sqrt_norm(&self.psi, "psi")
    }

    fn component(&self, a: usize) -> f64 {
        if a < 4 {
            self.psi.c[a]
        } else {
            self.psi4
        }
    }

    fn shifted(&self, a: usize, h: f64) -> Self {
        let mut s = *self;
        if a < 4 {
            s.psi.c[a] += h;
        } else {
            s.psi4 += h;
        }
        s
    }

    fn step(&self, a: usize) -> f64 {
        if a < 4 {
            f64::EPSILON.cbrt() * max_abs(&self.psi.c)
        } else {
            f64::EPSILON.cbrt() * self.psi4.abs().max(1.0)
        }
    }
}

/// `psi_a = U_a / theta`, `psi_4 = mu / theta`.
pub fn to_godunov5(eos: &IdealGasEos, n: f64, sigma: f64, u: &FourVector) -> Result<GodunovState5> {
    check_unit(u)?;
    let st = eos.thermo_props(n, sigma)?;
    Ok(GodunovState5 {
        psi: u.lower().scale(1.0 / st.theta),
        psi4: st.mu / st.theta,
    })
}

/// `(n, sigma, U^a)` of a five-field state, in closed form.
pub fn from_godunov5(eos: &IdealGasEos, s: &GodunovState5) -> Result<(f64, f64, FourVector)> {
    let theta = s.theta()?;
    let (n, sigma) = eos.n_sigma_from(theta, s.psi4)?;
    Ok((n, sigma, s.psi.scale(theta).raise()))
}

fn check_theta(theta: f64) -> Result<()> {
    if !(theta > 0.0) {
        return Err(Error::domain("theta", theta, 0.0, f64::INFINITY));
    }
    Ok(())
}

/// `X_hat(theta, psi) = k~ theta^(gamma/(gamma-1)) exp((psi - m/theta - gamma c_v) / (c_v (gamma-1)))`
/// with `k~ = (gamma-1) c_v (c_v/k)^(1/(gamma-1))`. Equals the pressure.
pub fn xhat_ideal(eos: &IdealGasEos, theta: f64, psi4: f64) -> Result<f64> {
    check_theta(theta)?;
    let g = eos.gamma;
    let c = eos.c_v;
    let kt = (g - 1.0) * c * (c / eos.k).powf(1.0 / (g - 1.0));
    let arg = (psi4 - eos.m / theta - g * c) / (c * (g - 1.0));
    Ok(kt * theta.powf(g / (g - 1.0)) * arg.exp())
}

/// The same function in its unsimplified form
/// `(gamma-1) c_v theta (k/(c_v theta))^(1/(1-gamma)) exp(m/(theta c_v (1-gamma))) exp((gamma c_v - psi)/(c_v (1-gamma)))`.
pub fn xhat_ideal_expanded(eos: &IdealGasEos, theta: f64, psi4: f64) -> Result<f64> {
    check_theta(theta)?;
    let g = eos.gamma;
    let c = eos.c_v;
    let a = 1.0 / (c * (1.0 - g));
    Ok((g - 1.0) * c * theta
        * (eos.k / (c * theta)).powf(1.0 / (1.0 - g))
        * (a * eos.m / theta).exp()
        * (a * (g * c - psi4)).exp())
}

/// `(dX_hat/dtheta, dX_hat/dpsi)` in closed form.
pub fn xhat_ideal_partials(eos: &IdealGasEos, theta: f64, psi4: f64) -> Result<(f64, f64)> {
    let x = xhat_ideal(eos, theta, psi4)?;
    let g = eos.gamma;
    let c = eos.c_v;
    let d_psi = x / (c * (g - 1.0));
    let d_theta = x * (g / (g - 1.0) + eos.m / (theta * c * (g - 1.0))) / theta;
    Ok((d_theta, d_psi))
}

/// `T^{ab} = theta^3 X_hat_theta psi^a psi^b + X_hat g^{ab}`, `N^b = X_hat_psi psi^b`.
pub fn fluxes5(eos: &IdealGasEos, s: &GodunovState5) -> Result<(Mat4, FourVector)> {
    let theta = s.theta()?;
    let x = xhat_ideal(eos, theta, s.psi4)?;
    let (xt, xp) = xhat_ideal_partials(eos, theta, s.psi4)?;
    let up = s.psi.raise();
    let t = outer_plus_metric(theta.powi(3) * xt, &up.c, x);
    Ok((t, up.scale(xp)))
}

/// `X^b = X_hat psi^b`.
pub fn potential5(eos: &IdealGasEos, s: &GodunovState5) -> Result<FourVector> {
    let theta = s.theta()?;
    Ok(s.psi.raise().scale(xhat_ideal(eos, theta, s.psi4)?))
}

/// Residuals of [`fluxes5`]: `(tensor, current, fd)` where the first two
/// compare with `(rho+p) U U + p g` and `n U`, and the last with central
/// differences of `X_hat` in `theta` and `psi`.
pub fn fluxes5_residuals(eos: &IdealGasEos, s: &GodunovState5) -> Result<(f64, f64, f64)> {
    let (n, sigma, u) = from_godunov5(eos, s)?;
    let st = eos.thermo_props(n, sigma)?;
    let (t, nv) = fluxes5(eos, s)?;
    let tensor = mat_rel_diff(&t, &perfect_fluid_tensor(st.rho, st.p, &u));
    let current = vec_rel_diff(&nv.c, &u.scale(n).c);

    let theta = s.theta()?;
    let (xt, xp) = xhat_ideal_partials(eos, theta, s.psi4)?;
    let ht = f64::EPSILON.cbrt() * theta;
    let hp = f64::EPSILON.cbrt() * s.psi4.abs().max(1.0);
    let fd_t = (xhat_ideal(eos, theta + ht, s.psi4)? - xhat_ideal(eos, theta - ht, s.psi4)?)
        / ((theta + ht) - (theta - ht));
    let fd_p = (xhat_ideal(eos, theta, s.psi4 + hp)? - xhat_ideal(eos, theta, s.psi4 - hp)?)
        / ((s.psi4 + hp) - (s.psi4 - hp));
    let fd = ((fd_t - xt).abs() / xt.abs()).max((fd_p - xp).abs() / xp.abs());
    Ok((tensor, current, fd))
}

/// `X^b - T^{ab} psi_a - N^b psi_4`; equals the entropy current `n sigma U^b`.
pub fn entropy_current5(eos: &IdealGasEos, s: &GodunovState5) -> Result<FourVector> {
    let x = potential5(eos, s)?;
    let (t, nv) = fluxes5(eos, s)?;
    let mut c = x.c;
    for (b, cb) in c.iter_mut().enumerate() {
        for a in 0..4 {
            *cb -= t[a][b] * s.psi.c[a];
        }
        *cb -= nv.c[b] * s.psi4;
    }
    Ok(FourVector::contra(c))
}

/// `max_b |J^b - n sigma U^b|` relative to `(rho + p) |U| / theta`, the
/// size of the terms that cancel in [`entropy_current5`].
pub fn entropy_current_residual(eos: &IdealGasEos, s: &GodunovState5) -> Result<f64> {
    let (n, sigma, u) = from_godunov5(eos, s)?;
    let st = eos.thermo_props(n, sigma)?;
    let j = entropy_current5(eos, s)?;
    let expect = u.scale(n * sigma);
    let diff = (0..4).fold(0.0f64, |m, i| m.max((j.c[i] - expect.c[i]).abs()));
    Ok(diff / ((st.rho + st.p) / st.theta * max_abs(&u.c)))
}

/// Five-field symmetrizer `M_ag = d(F^{ab} T_b)/dpsi_g` with `F^{4b} = N^b`,
/// by central differences of the analytic fluxes.
pub fn symmetrizer5(eos: &IdealGasEos, s: &GodunovState5, t: &FourVector) -> Result<Symmetrizer> {
    let t = check_timelike_t(t)?;
    s.theta()?;
    let row = |st: &GodunovState5| -> Result<[f64; 5]> {
        let (tt, nv) = fluxes5(eos, st)?;
        let c = contract(&tt, &t);
        let nt: f64 = (0..4).map(|b| nv.c[b] * t.c[b]).sum();
        Ok([c[0], c[1], c[2], c[3], nt])
    };
    let mut m = DMatrix::zeros(5, 5);
    for g in 0..5 {
        let h = s.step(g);
        let up = s.shifted(g, h);
        let dn = s.shifted(g, -h);
        let hh = up.component(g) - dn.component(g);
        let fp = row(&up)?;
        let fm = row(&dn)?;
        for a in 0..5 {
            m[(a, g)] = (fp[a] - fm[a]) / hh;
        }
    }
    Ok(Symmetrizer::from_matrix(m, t))
}

/// Relative Frobenius distance between the `psi_a psi_g` (a, g < 4) block of
/// `sym` and second differences of the scalar `X_hat psi^b T_b`.
pub fn symmetrizer5_block_residual(eos: &IdealGasEos, s: &GodunovState5, sym: &Symmetrizer) -> Result<f64> {
    let t = sym.t;
    let phi = |st: &GodunovState5| -> Result<f64> {
        let x = potential5(eos, st)?;
        Ok((0..4).map(|b| x.c[b] * t.c[b]).sum())
    };
    let h = f64::EPSILON.powf(0.25) * max_abs(&s.psi.c);
    let mut num = 0.0;
    let mut den = 0.0;
    for a in 0..4 {
        for g in 0..4 {
            let d2 = if a == g {
                let f0 = phi(s)?;
                (phi(&s.shifted(a, h))? - 2.0 * f0 + phi(&s.shifted(a, -h))?) / (h * h)
            } else {
                let pp = phi(&s.shifted(a, h).shifted(g, h))?;
                let pm = phi(&s.shifted(a, h).shifted(g, -h))?;
                let mp = phi(&s.shifted(a, -h).shifted(g, h))?;
                let mm = phi(&s.shifted(a, -h).shifted(g, -h))?;
                (pp - pm - mp + mm) / (4.0 * h * h)
            };
            let mag = sym.matrix[(a, g)];
            num += (d2 - mag).powi(2);
            den += mag * mag;
        }
    }
    Ok((num / den).sqrt())
}

/// Random ideal-gas state with `ln n` uniform on `n_range`, `sigma` uniform on
/// `sigma_range` and speed below `vmax`.
pub fn random_state5<R: Rng>(
    rng: &mut R,
    eos: &IdealGasEos,
    n_range: (f64, f64),
    sigma_range: (f64, f64),
    vmax: f64,
) -> Result<GodunovState5> {
    let n = rng.random_range(n_range.0.ln()..=n_range.1.ln()).exp();
    let sigma = rng.random_range(sigma_range.0..=sigma_range.1);
    let u = spacetime::four_velocity(spacetime::random_velocity(rng, vmax))?;
    to_godunov5(eos, n, sigma, &u)
}

// ---------------------------------------------------------------------------
// Conservation of the additional currents on sampled fields
// ---------------------------------------------------------------------------

/// A current `(J^t, J^x)` sampled on a uniform 1+1 grid, `values[time][space]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurrentField {
    pub dt: f64,
    pub dx: f64,
    pub values: Vec<Vec<[f64; 2]>>,
}

fn d4(v: [f64; 5], h: f64) -> f64 {
    (v[0] - 8.0 * v[1] + 8.0 * v[3] - v[4]) / (12.0 * h)
}

/// Largest `|d_t J^t + d_x J^x|` at interior points, fourth-order central
/// stencils in both directions.
pub fn divergence_residual(field: &CurrentField) -> Result<f64> {
    let nt = field.values.len();
    let nx = field.values.first().map_or(0, Vec::len);
    if nt < 5 || nx < 5 || field.values.iter().any(|r| r.len() != nx) {
        return Err(Error::Precondition(format!(
            "current field needs a rectangular grid with at least 5 points per axis, got {nt}x{nx}"
        )));
    }
    let v = &field.values;
    let mut worst: f64 = 0.0;
    for j in 2..nt - 2 {
        for i in 2..nx - 2 {
            let dt = d4([v[j - 2][i][0], v[j - 1][i][0], v[j][i][0], v[j + 1][i][0], v[j + 2][i][0]], field.dt);
            let dx = d4([v[j][i - 2][1], v[j][i - 1][1], v[j][i][1], v[j][i + 1][1], v[j][i + 2][1]], field.dx);
            worst = worst.max((dt + dx).abs());
        }
    }
    Ok(worst)
}

/// Divergence of the nu-current `X^b - T^{ab} Upsilon_a` over a field of
/// four-field states, `states[time][space]` with motion along x.
pub fn smooth_conservation_residual4(
    idx: &IndexFunction,
    states: &[Vec<GodunovState4>],
    dt: f64,
    dx: f64,
) -> Result<f64> {
    let values = states
        .iter()
        .map(|row| {
            row.iter()
                .map(|s| extra_current4(idx, s).map(|j| [j.c[0], j.c[1]]))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    divergence_residual(&CurrentField { dt, dx, values })
}

/// Divergence of the entropy current over a field of five-field states.
pub fn smooth_conservation_residual5(
    eos: &IdealGasEos,
    states: &[Vec<GodunovState5>],
    dt: f64,
    dx: f64,
) -> Result<f64> {
    let values = states
        .iter()
        .map(|row| {
            row.iter()
                .map(|s| entropy_current5(eos, s).map(|j| [j.c[0], j.c[1]]))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    divergence_residual(&CurrentField { dt, dx, values })
}

/// Exact smooth stiff-fluid flow in 1+1 dimensions: `E + S` and `E - S`
/// travel undistorted at `+1` and `-1`. Returns `(p, v)` at `(t, x)` for
/// profiles `a(x - t) = E + S` and `b(x + t) = E - S`.
pub fn stiff_simple_wave<A: Fn(f64) -> f64, B: Fn(f64) -> f64>(a: A, b: B, t: f64, x: f64) -> (f64, f64) {
    let ep = a(x - t);
    let em = b(x + t);
    // E + S = p (1+v)/(1-v), E - S = p (1-v)/(1+v)
    let p = (ep * em).sqrt();
    let q = (ep / em).sqrt();
    (p, (q - 1.0) / (q + 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eos::{BarotropicEos, IsentropicEos};
    use crate::index::IndexMode;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn stiff_h() -> IndexFunction {
        IndexFunction::enthalpy_calibrated(&IsentropicEos::stiff(), 1.0, IndexMode::ClosedForm).unwrap()
    }

    fn g43() -> IndexFunction {
        IndexFunction::new(BarotropicEos::gamma_law(4.0 / 3.0).unwrap(), 1.0).unwrap()
    }

    fn rest() -> FourVector {
        FourVector::contra([1.0, 0.0, 0.0, 0.0])
    }

    fn ig() -> IdealGasEos {
        IdealGasEos::new(1.0, 1.0, 1.0, 5.0 / 3.0).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn to_godunov4_examples() {
        let s = to_godunov4(&stiff_h(), 2.0, &rest()).unwrap();
        assert!(close(s.upsilon.c[0], -0.5, 1e-14));
        assert_eq!(&s.upsilon.c[1..], &[0.0; 3]);
        let s = to_godunov4(&g43(), 16.0, &rest()).unwrap();
        assert!(close(s.upsilon.c[0], -0.5, 1e-14));
        assert!(close(s.index().unwrap(), 2.0, 1e-12));
    }

    #[test]
    fn from_godunov4_examples() {
        let (p, u) = from_godunov4(&stiff_h(), &GodunovState4::new([-0.5, 0.0, 0.0, 0.0])).unwrap();
        assert!(close(p, 2.0, 1e-13));
        assert!(close(u.c[0], 1.0, 1e-15));
        let e = from_godunov4(&stiff_h(), &GodunovState4::new([0.0, 1.0, 0.0, 0.0])).unwrap_err();
        assert_eq!(e.kind(), "invalid-state");
    }

    #[test]
    fn potential4_examples() {
        let x = potential4(&stiff_h(), &GodunovState4::new([-0.5, 0.0, 0.0, 0.0])).unwrap();
        assert!(close(x.c[0], 1.0, 1e-13));
        assert_eq!(x.variance, crate::spacetime::Variance::Contravariant);
        // at p_ref with f = 1 the potential is p_ref Upsilon^b
        let idx = IndexFunction::new(BarotropicEos::gamma_law(1.5).unwrap(), 3.0).unwrap();
        let u = crate::spacetime::four_velocity([0.3, -0.2, 0.1]).unwrap();
        let s = to_godunov4(&idx, 3.0, &u).unwrap();
        let x = potential4(&idx, &s).unwrap();
        let up = s.upsilon.raise();
        for b in 0..4 {
            assert!(close(x.c[b], 3.0 * up.c[b], 1e-13));
        }
    }

    #[test]
    fn flux4_examples() {
        let t = flux4(&stiff_h(), &GodunovState4::new([-0.5, 0.0, 0.0, 0.0])).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { 2.0 } else { 0.0 };
                assert!((t[i][j] - want).abs() < 1e-12, "{i}{j} {}", t[i][j]);
            }
        }
        let s = to_godunov4(&g43(), 1.0, &rest()).unwrap();
        let t = flux4(&g43(), &s).unwrap();
        let diag = [3.0, 1.0, 1.0, 1.0];
        for i in 0..4 {
            assert!(close(t[i][i], diag[i], 1e-13));
        }
    }

    #[test]
    fn extra_current4_examples() {
        let j = extra_current4(&stiff_h(), &GodunovState4::new([-0.5, 0.0, 0.0, 0.0])).unwrap();
        assert!(close(j.c[0], 2.0, 1e-12) && j.c[1].abs() < 1e-12);
        let s = to_godunov4(&g43(), 16.0, &rest()).unwrap();
        assert!(close(extra_current4(&g43(), &s).unwrap().c[0], 32.0, 1e-12));
        let u = crate::spacetime::four_velocity_x(0.6).unwrap();
        let s = to_godunov4(&stiff_h(), 2.0, &u).unwrap();
        let j = extra_current4(&stiff_h(), &s).unwrap();
        assert!(close(j.c[0], 2.5, 1e-12) && close(j.c[1], 1.5, 1e-12));
    }

    #[test]
    fn symmetrizer4_rest_stiff_is_definite() {
        let s = GodunovState4::new([-0.5, 0.0, 0.0, 0.0]);
        let m = symmetrizer4(&stiff_h(), &s, &FourVector::co([-1.0, 0.0, 0.0, 0.0])).unwrap();
        assert!(m.asymmetry < 1e-8);
        assert_ne!(m.definiteness, Definiteness::Indefinite, "{:?}", m.eigenvalues);
        // independent oracle: eigenvalues of the hand-assembled matrix
        // T^{a0}(-1) differentiated: M = -d T^{a0}/dUpsilon_g
        let e = SymmetricEigen::new((&m.matrix + m.matrix.transpose()) * 0.5).eigenvalues;
        assert!(e.iter().all(|x| x.signum() == e[0].signum()));
    }

    #[test]
    fn symmetrizer_rejects_spacelike() {
        let s = GodunovState4::new([-0.5, 0.0, 0.0, 0.0]);
        let e = symmetrizer4(&stiff_h(), &s, &FourVector::co([0.0, 1.0, 0.0, 0.0])).unwrap_err();
        assert_eq!(e.kind(), "precondition");
        let s5 = to_godunov5(&ig(), 1.0, 0.0, &rest()).unwrap();
        assert!(symmetrizer5(&ig(), &s5, &FourVector::co([0.1, 1.0, 0.0, 0.0])).is_err());
    }

    #[test]
    fn symmetrizer_sign_flips_with_orientation() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let idx = g43();
        let mut signs = std::collections::BTreeMap::new();
        for seed in 0..40 {
            let s = random_state4(&mut rng, &idx, (1e-2, 1e2), 0.9).unwrap();
            let t = crate::spacetime::sample_timelike(seed);
            let m = symmetrizer4(&idx, &s, &t).unwrap();
            assert!(m.asymmetry < 1e-5, "{}", m.asymmetry);
            assert_ne!(m.definiteness, Definiteness::Indefinite);
            let prev = signs.insert(m.future_directed(), m.definiteness);
            if let Some(p) = prev {
                assert_eq!(p, m.definiteness);
            }
        }
        assert_eq!(signs.len(), 2);
        assert_ne!(signs[&true], signs[&false]);
    }

    #[test]
    fn four_field_identities_on_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for idx in [stiff_h(), g43()] {
            for _ in 0..20 {
                let s = random_state4(&mut rng, &idx, (1e-2, 1e2), 0.9).unwrap();
                assert!(flux4_tensor_residual(&idx, &s).unwrap() < 1e-10);
                assert!(flux4_fd_residual(&idx, &s).unwrap() < 1e-6);
                assert!(potential4_fd_residual(&idx, &s).unwrap() < 1e-6);
                assert!(potential4_isotropy_residual(&idx, &s).unwrap() < 1e-12);
                assert!(extra_current4_residual(&idx, &s).unwrap() < 1e-9);
            }
        }
    }

    #[test]
    fn quadrature_index_drives_the_same_identities() {
        let eos = BarotropicEos::polytrope(1.0, 1.0, 5.0 / 3.0).unwrap();
        let idx = IndexFunction::new(eos, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..5 {
            let s = random_state4(&mut rng, &idx, (0.1, 10.0), 0.8).unwrap();
            assert!(flux4_tensor_residual(&idx, &s).unwrap() < 1e-10);
            assert!(flux4_fd_residual(&idx, &s).unwrap() < 1e-6);
            assert!(extra_current4_residual(&idx, &s).unwrap() < 1e-9);
            let t = crate::spacetime::sample_timelike(9);
            assert_ne!(symmetrizer4(&idx, &s, &t).unwrap().definiteness, Definiteness::Indefinite);
        }
    }

    #[test]
    fn to_godunov5_examples() {
        let s = to_godunov5(&ig(), 1.0, 0.0, &rest()).unwrap();
        assert!(close(s.psi.c[0], -1.0, 1e-15));
        assert!(close(s.psi4, 8.0 / 3.0, 1e-14));
        assert!(close(s.theta().unwrap(), 1.0, 1e-14));
        let massless = IdealGasEos::new(0.0, 2.0, 1.5, 1.4).unwrap();
        let s = to_godunov5(&massless, 0.7, 0.3, &rest()).unwrap();
        assert!(close(s.psi4, 1.4 * 1.5 - 0.3, 1e-13));
    }

    #[test]
    fn from_godunov5_examples() {
        let (n, sigma, u) = from_godunov5(&ig(), &GodunovState5::new([-1.0, 0.0, 0.0, 0.0], 8.0 / 3.0)).unwrap();
        assert!(close(n, 1.0, 1e-13) && sigma.abs() < 1e-13 && close(u.c[0], 1.0, 1e-15));
        let e = from_godunov5(&ig(), &GodunovState5::new([0.0, 1.0, 0.0, 0.0], 1.0)).unwrap_err();
        assert_eq!(e.kind(), "invalid-state");
    }

    #[test]
    fn xhat_ideal_examples() {
        assert!(close(xhat_ideal(&ig(), 1.0, 8.0 / 3.0).unwrap(), 2.0 / 3.0, 1e-14));
        assert!(xhat_ideal(&ig(), 0.0, 1.0).is_err());
        for theta in [0.1, 0.5, 1.0, 3.0, 10.0] {
            for psi in [-2.0, 0.0, 1.0, 4.0] {
                let a = xhat_ideal(&ig(), theta, psi).unwrap();
                let b = xhat_ideal_expanded(&ig(), theta, psi).unwrap();
                assert!((a - b).abs() <= 1e-12 * a, "{theta} {psi}");
            }
        }
    }

    #[test]
    fn fluxes5_rest_example() {
        let s = to_godunov5(&ig(), 1.0, 0.0, &rest()).unwrap();
        let (t, nv) = fluxes5(&ig(), &s).unwrap();
        let diag = [2.0, 2.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0];
        for i in 0..4 {
            assert!(close(t[i][i], diag[i], 1e-13));
        }
        assert!(close(nv.c[0], 1.0, 1e-13));
        let (xt, xp) = xhat_ideal_partials(&ig(), 1.0, s.psi4).unwrap();
        assert!(close(xt, 8.0 / 3.0, 1e-13));
        assert!(close(xp, 1.0, 1e-13));
    }

    #[test]
    fn entropy_current_examples() {
        let j = entropy_current5(&ig(), &to_godunov5(&ig(), 1.0, 0.0, &rest()).unwrap()).unwrap();
        assert!(max_abs(&j.c) < 1e-13);
        let j = entropy_current5(&ig(), &to_godunov5(&ig(), 1.0, 1.0, &rest()).unwrap()).unwrap();
        assert!(close(j.c[0], 1.0, 1e-12) && j.c[1].abs() < 1e-12);
        let u = crate::spacetime::four_velocity_x(0.6).unwrap();
        let s = to_godunov5(&ig(), 1.0, 1.0, &u).unwrap();
        let j = entropy_current5(&ig(), &s).unwrap();
        assert!(close(j.c[0], 1.25, 1e-12) && close(j.c[1], 0.75, 1e-12));
    }

    #[test]
    fn symmetrizer5_rest_and_block() {
        let s = to_godunov5(&ig(), 1.0, 0.0, &rest()).unwrap();
        let m = symmetrizer5(&ig(), &s, &FourVector::co([-1.0, 0.0, 0.0, 0.0])).unwrap();
        assert!(m.asymmetry < 1e-5);
        assert_ne!(m.definiteness, Definiteness::Indefinite, "{:?}", m.eigenvalues);
        assert!(symmetrizer5_block_residual(&ig(), &s, &m).unwrap() < 1e-5);
    }

    #[test]
    fn five_field_random_sweep() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for seed in 0..50 {
            let s = random_state5(&mut rng, &ig(), (0.1, 10.0), (-1.0, 1.0), 0.9).unwrap();
            let t = crate::spacetime::sample_timelike(seed);
            let m = symmetrizer5(&ig(), &s, &t).unwrap();
            assert!(m.asymmetry < 1e-5);
            assert_ne!(m.definiteness, Definiteness::Indefinite, "{:?}", m.eigenvalues);
            let (a, b, c) = fluxes5_residuals(&ig(), &s).unwrap();
            assert!(a < 1e-10 && b < 1e-10 && c < 1e-6, "{a} {b} {c}");
            assert!(entropy_current_residual(&ig(), &s).unwrap() < 1e-9);
        }
    }

    #[test]
    fn divergence_needs_five_points() {
        let f = CurrentField {
            dt: 1.0,
            dx: 1.0,
            values: vec![vec![[0.0; 2]; 4]; 10],
        };
        assert_eq!(divergence_residual(&f).unwrap_err().kind(), "precondition");
    }

    fn stiff_field(idx: &IndexFunction, n: usize, shock: bool) -> (Vec<Vec<GodunovState4>>, f64) {
        let dx = 1.0 / n as f64;
        let a = |y: f64| 3.0 + 0.5 * (std::f64::consts::TAU * y).sin();
        let b = |y: f64| 2.0 + 0.3 * (std::f64::consts::TAU * y).cos();
        let states = (0..n)
            .map(|j| {
                (0..n)
                    .map(|i| {
                        let t = j as f64 * dx * 0.5;
                        let x = i as f64 * dx;
                        let (p, v) = if shock {
                            if x < 0.5 + 0.3 * t { (2.0, 0.2) } else { (1.0, 0.0) }
                        } else {
                            stiff_simple_wave(a, b, t, x)
                        };
                        to_godunov4(idx, p, &crate::spacetime::four_velocity_x(v).unwrap()).unwrap()
                    })
                    .collect()
            })
            .collect();
        (states, dx)
    }

    #[test]
    fn smooth_field_residual_converges_at_stencil_order() {
        let idx = stiff_h();
        let (s1, dx1) = stiff_field(&idx, 20, false);
        let (s2, dx2) = stiff_field(&idx, 40, false);
        let r1 = smooth_conservation_residual4(&idx, &s1, 0.5 * dx1, dx1).unwrap();
        let r2 = smooth_conservation_residual4(&idx, &s2, 0.5 * dx2, dx2).unwrap();
        let order = (r1 / r2).log2();
        assert!((order - 4.0).abs() < 0.3, "{r1} {r2} {order}");
    }

    #[test]
    fn constant_field_residual_vanishes() {
        let idx = g43();
        let u = crate::spacetime::four_velocity_x(0.3).unwrap();
        let s = to_godunov4(&idx, 2.0, &u).unwrap();
        let r = smooth_conservation_residual4(&idx, &vec![vec![s; 8]; 8], 0.1, 0.1).unwrap();
        assert!(r < 1e-13);
        let s5 = to_godunov5(&ig(), 1.0, 0.5, &u).unwrap();
        let r = smooth_conservation_residual5(&ig(), &vec![vec![s5; 8]; 8], 0.1, 0.1).unwrap();
        assert!(r < 1e-13);
    }

    #[test]
    fn shock_field_residual_does_not_converge() {
        let idx = g43();
        let (s1, dx1) = stiff_field(&idx, 20, true);
        let (s2, dx2) = stiff_field(&idx, 40, true);
        let r1 = smooth_conservation_residual4(&idx, &s1, 0.5 * dx1, dx1).unwrap();
        let r2 = smooth_conservation_residual4(&idx, &s2, 0.5 * dx2, dx2).unwrap();
        assert!(r2 >= r1, "{r1} {r2}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn godunov4_round_trip(lp in -4.0f64..4.0, vx in -0.5f64..0.5, vy in -0.5f64..0.5, vz in -0.5f64..0.5) {
            let idx = g43();
            let p = lp.exp();
            let u = crate::spacetime::four_velocity([vx, vy, vz]).unwrap();
            let s = to_godunov4(&idx, p, &u).unwrap();
            let (p2, u2) = from_godunov4(&idx, &s).unwrap();
            prop_assert!((p2 - p).abs() <= 1e-11 * p);
            for i in 0..4 {
                prop_assert!((u2.c[i] - u.c[i]).abs() <= 1e-11 * u.c[0]);
            }
            prop_assert!((u2.norm2() + 1.0).abs() < 1e-12);
        }

        #[test]
        fn godunov5_round_trip(ln in -2.0f64..2.0, sigma in -2.0f64..2.0, vx in -0.5f64..0.5, vy in -0.5f64..0.5) {
            let eos = ig();
            let n = ln.exp();
            let u = crate::spacetime::four_velocity([vx, vy, 0.0]).unwrap();
            let s = to_godunov5(&eos, n, sigma, &u).unwrap();
            let (n2, s2, u2) = from_godunov5(&eos, &s).unwrap();
            prop_assert!((n2 - n).abs() <= 1e-11 * n);
            prop_assert!((s2 - sigma).abs() <= 1e-11 * sigma.abs().max(1.0));
            for i in 0..4 {
                prop_assert!((u2.c[i] - u.c[i]).abs() <= 1e-11 * u.c[0]);
            }
            prop_assert!((s.theta().unwrap() - eos.thermo_props(n, sigma).unwrap().theta).abs() < 1e-12 * s.theta().unwrap());
        }

        #[test]
        fn generating_function_is_pressure(ln in -2.3f64..2.3, sigma in -2.0f64..2.0) {
            let eos = ig();
            let st = eos.thermo_props(ln.exp(), sigma).unwrap();
            let x = xhat_ideal(&eos, st.theta, st.mu / st.theta).unwrap();
            prop_assert!((x - st.p).abs() <= 1e-10 * st.p);
        }
    }
}
