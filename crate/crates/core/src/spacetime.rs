//! Minkowski 4-vectors with signature (-,+,+,+) and c = 1.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Diagonal of the metric, `g = g^-1 = diag(-1, 1, 1, 1)`.
pub const METRIC: [f64; 4] = [-1.0, 1.0, 1.0, 1.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variance {
    Contravariant,
    Covariant,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourVector {
    pub c: [f64; 4],
    pub variance: Variance,
}

impl FourVector {
    pub fn contra(c: [f64; 4]) -> Self {
        Self {
            c,
            variance: Variance::Contravariant,
        }
    }

    pub fn co(c: [f64; 4]) -> Self {
        Self {
            c,
            variance: Variance::Covariant,
        }
    }

    fn flip_time(self, variance: Variance) -> Self {
        let [t, x, y, z] = self.c;
        Self {
            c: [-t, x, y, z],
            variance,
        }
    }

    /// Index raised with `g^{ab}`; a contravariant input is returned as is.
    pub fn raise(self) -> Self {
        match self.variance {
            Variance::Covariant => self.flip_time(Variance::Contravariant),
            Variance::Contravariant => self,
        }
    }

    /// Index lowered with `g_{ab}`; a covariant input is returned as is.
    pub fn lower(self) -> Self {
        match self.variance {
            Variance::Contravariant => self.flip_time(Variance::Covariant),
            Variance::Covariant => self,
        }
    }

    pub fn scale(self, a: f64) -> Self {
        Self {
            c: self.c.map(|x| a * x),
            variance: self.variance,
        }
    }

    /// `self · self`.
    pub fn norm2(&self) -> f64 {
        dot(self, self)
    }

    pub fn is_timelike(&self) -> bool {
        self.norm2() < 0.0
    }
}

/// Metric contraction of two vectors of any variance.
///
/// Matching variances pick up the metric; mixed variances contract directly.
pub fn dot(a: &FourVector, b: &FourVector) -> f64 {
    if a.variance == b.variance {
        (0..4).map(|i| METRIC[i] * a.c[i] * b.c[i]).sum()
    } else {
        (0..4).map(|i| a.c[i] * b.c[i]).sum()
    }
}

pub fn lorentz_factor(speed: f64) -> f64 {
    1.0 / ((1.0 - speed) * (1.0 + speed)).sqrt()
}

/// Contravariant 4-velocity `(W, W v)` of a 3-velocity.
pub fn four_velocity(v: [f64; 3]) -> Result<FourVector> {
    let v2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    let speed = v2.sqrt();
    if !(speed < 1.0) {
        return Err(Error::Superluminal { speed });
    }
    let w = 1.0 / (1.0 - v2).sqrt();
    Ok(FourVector::contra([w, w * v[0], w * v[1], w * v[2]]))
}

/// 4-velocity of a flow along x.
pub fn four_velocity_x(v: f64) -> Result<FourVector> {
    four_velocity([v, 0.0, 0.0])
}

/// Relativistic addition of collinear velocities.
pub fn add_velocities(u: f64, v: f64) -> f64 {
    (u + v) / (1.0 + u * v)
}

/// Deterministic pseudo-random timelike covector.
///
/// `|T_0|` is drawn from `[0.5, 2]`, the spatial part has a uniformly random
/// direction and magnitude below `0.9 |T_0|`; the time orientation follows
/// one bit of the stream so both orientations appear across seeds.
pub fn sample_timelike(seed: u64) -> FourVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_7143_11ce_0001);
    let t0: f64 = rng.random_range(0.5..2.0);
    let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
    let dir = random_unit(&mut rng);
    let mag = t0 * rng.random_range(0.0..0.9);
    FourVector::co([sign * t0, mag * dir[0], mag * dir[1], mag * dir[2]])
}

/// Uniform direction on the unit sphere.
pub fn random_unit<R: Rng>(rng: &mut R) -> [f64; 3] {
    let z: f64 = rng.random_range(-1.0..1.0);
    let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let r = (1.0 - z * z).sqrt();
    [r * phi.cos(), r * phi.sin(), z]
}

/// Random 3-velocity with speed below `vmax`.
pub fn random_velocity<R: Rng>(rng: &mut R, vmax: f64) -> [f64; 3] {
    let d = random_unit(rng);
    let s = vmax * rng.random::<f64>();
    [s * d[0], s * d[1], s * d[2]]
}
