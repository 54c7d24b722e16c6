//! Quaternion algebra needed by the color filters: Hamilton product,
//! conjugation, norm, and rotation by the sandwich product `R v R*`.

use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// `w + x·i + y·j + z·k`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quaternion {
    pub const ZERO: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Quaternion = Quaternion::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Quaternion = Quaternion::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Quaternion = Quaternion::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 1.0);

    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Quaternion { w, x, y, z }
    }

    /// Pure quaternion `x·i + y·j + z·k`.
    pub const fn pure(x: f64, y: f64, z: f64) -> Self {
        Quaternion { w: 0.0, x, y, z }
    }

    pub const fn real(w: f64) -> Self {
        Quaternion::new(w, 0.0, 0.0, 0.0)
    }

    pub fn is_pure(&self) -> bool {
        self.w == 0.0
    }

    /// Hamilton product `self · rhs`.
    #[inline]
    pub fn hamilton(self, rhs: Quaternion) -> Quaternion {
        let (a, b) = (self, rhs);
        Quaternion {
            w: a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            x: a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            y: a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            z: a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
        }
    }

    #[inline]
    pub fn conj(self) -> Quaternion {
        Quaternion::new(self.w, -self.x, -self.y, -self.z)
    }

    #[inline]
    pub fn norm(self) -> f64 {
        (self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    /// Norm of the vector (i, j, k) part.
    #[inline]
    pub fn vector_norm(self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    #[inline]
    pub fn scale(self, s: f64) -> Quaternion {
        Quaternion::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }
}

impl Mul for Quaternion {
    type Output = Quaternion;

    #[inline]
    fn mul(self, rhs: Quaternion) -> Quaternion {
        self.hamilton(rhs)
    }
}

impl Add for Quaternion {
    type Output = Quaternion;

    #[inline]
    fn add(self, r: Quaternion) -> Quaternion {
        Quaternion::new(self.w + r.w, self.x + r.x, self.y + r.y, self.z + r.z)
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;

    #[inline]
    fn sub(self, r: Quaternion) -> Quaternion {
        Quaternion::new(self.w - r.w, self.x - r.x, self.y - r.y, self.z - r.z)
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;

    #[inline]
    fn neg(self) -> Quaternion {
        Quaternion::new(-self.w, -self.x, -self.y, -self.z)
    }
}

pub fn qmul(a: Quaternion, b: Quaternion) -> Quaternion {
    a.hamilton(b)
}

pub fn qconj(q: Quaternion) -> Quaternion {
    q.conj()
}

pub fn qnorm(q: Quaternion) -> f64 {
    q.norm()
}

/// Unit quaternion `R = exp(axis · angle) = cos(angle) + axis · sin(angle)`.
///
/// Sandwiching a pure quaternion as `R v R*` rotates it by `2 · angle` about
/// `axis`; with `angle = π/2` that is a half turn.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RotationOperator {
    r: Quaternion,
    axis: Quaternion,
    angle: f64,
}

/// Unit axis along the gray diagonal, `(i + j + k)/√3`.
pub fn gray_axis() -> Quaternion {
    let c = 1.0 / 3f64.sqrt();
    Quaternion::pure(c, c, c)
}

impl RotationOperator {
    pub fn new(axis: Quaternion, angle: f64) -> Result<Self> {
        if axis.w != 0.0 {
            return Err(Error::invalid("rotation axis must be a pure quaternion"));
        }
        if (axis.norm() - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(format!(
                "rotation axis must have unit norm, got {}",
                axis.norm()
            )));
        }
        if !angle.is_finite() {
            return Err(Error::invalid("rotation angle must be finite"));
        }
        let (s, c) = angle.sin_cos();
        let r = Quaternion::new(c, axis.x * s, axis.y * s, axis.z * s);
        Ok(RotationOperator { r, axis, angle })
    }

    /// The operator the color filters use: gray axis, angle π/2.
    pub fn gray_half_turn() -> Self {
        RotationOperator::new(gray_axis(), std::f64::consts::FRAC_PI_2)
            .expect("gray axis is a pure unit quaternion")
    }

    pub fn identity() -> Self {
        RotationOperator {
            r: Quaternion::ONE,
            axis: Quaternion::I,
            angle: 0.0,
        }
    }

    pub fn quaternion(&self) -> Quaternion {
        self.r
    }

    pub fn axis(&self) -> Quaternion {
        self.axis
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    /// `R v R*` for a pure `v`.
    pub fn rotate(&self, v: Quaternion) -> Result<Quaternion> {
        if !v.is_pure() {
            return Err(Error::invalid("sandwich rotation needs a pure quaternion"));
        }
        Ok(self.r.hamilton(v).hamilton(self.r.conj()))
    }
}

pub fn rotation_operator(axis: Quaternion, angle: f64) -> Result<RotationOperator> {
    RotationOperator::new(axis, angle)
}

pub fn sandwich_rotate(r: &RotationOperator, v: Quaternion) -> Result<Quaternion> {
    r.rotate(v)
}
