//! Closed-form conformal-analysis primitives on the unit disk and the upper
//! half-plane: the Möbius chart between them, Green's function, Poisson
//! kernels, harmonic extensions of boundary measures and the conformal
//! radius. Everything here is an exact formula evaluated in `f64`; the only
//! numerics is the quadrature inside [`harmonic_extension`].

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::measure::BoundaryMeasure;
use crate::quad;

pub const PI: f64 = std::f64::consts::PI;
pub const FRAC_PI_2: f64 = std::f64::consts::FRAC_PI_2;

/// Lower end of the left-arc angle interval, the point `i`.
pub const LEFT_ARC_LO: f64 = FRAC_PI_2;
/// Upper end of the left-arc angle interval, the point `-i`.
pub const LEFT_ARC_HI: f64 = 3.0 * FRAC_PI_2;

/// Boundary-circle tolerance used when validating `BoundaryPoint`.
pub const CIRCLE_TOL: f64 = 1e-12;

/// A point of the unit circle, stored by its angle.
///
/// Two angle charts are used throughout the crate:
/// * the *point chart* `(-3π/2, π/2]`, in which the tip angle of a growing
///   curve lives (`-i` is `-π/2`, `i` is `π/2`);
/// * the *measure chart* `[π/2, 5π/2)`, in which the closed left arc is the
///   single interval `[π/2, 3π/2]` and densities are written.
///
/// Both describe the same point `e^{iθ}`; conversion is a `2π` shift.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryPoint {
    angle: f64,
}

impl BoundaryPoint {
    /// Build from an arbitrary angle, normalizing into `(-3π/2, π/2]`.
    pub fn from_angle(theta: f64) -> Self {
        let mut a = theta.rem_euclid(2.0 * PI); // [0, 2π)
        if a > FRAC_PI_2 {
            a -= 2.0 * PI; // (-3π/2, π/2]
        }
        BoundaryPoint { angle: a }
    }

    /// Build from an angle in the measure chart `[π/2, 5π/2)`.
    pub fn from_measure_angle(theta: f64) -> Self {
        Self::from_angle(theta)
    }

    /// Angle in the point chart `(-3π/2, π/2]`.
    pub fn angle(&self) -> f64 {
        self.angle
    }

    /// Angle in the measure chart `[π/2, 5π/2)`.
    pub fn measure_angle(&self) -> f64 {
        if self.angle < FRAC_PI_2 {
            self.angle + 2.0 * PI
        } else {
            self.angle
        }
    }

    /// The complex point `e^{iθ}` on the unit circle.
    pub fn point(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.angle)
    }

    /// True when the point lies on the closed left arc.
    pub fn on_left_arc(&self) -> bool {
        let m = self.measure_angle();
        (LEFT_ARC_LO..=LEFT_ARC_HI).contains(&m)
    }

    pub fn minus_i() -> Self {
        BoundaryPoint { angle: -FRAC_PI_2 }
    }

    pub fn i() -> Self {
        BoundaryPoint { angle: FRAC_PI_2 }
    }

    /// Validate that a complex point sits on the unit circle and convert.
    pub fn from_point(z: Complex64) -> Result<Self> {
        if (z.norm() - 1.0).abs() > CIRCLE_TOL {
            return Err(Error::OutsideDisk(z.norm()));
        }
        Ok(Self::from_angle(z.arg()))
    }
}

fn require_open_disk(z: Complex64) -> Result<()> {
    let r = z.norm();
    if r >= 1.0 {
        Err(Error::OutsideDisk(r))
    } else {
        Ok(())
    }
}

/// Image of a disk point under the chart to the upper half-plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum HalfPlanePoint {
    Finite(Complex64),
    /// The image of `i`, the target endpoint of every chordal curve here.
    Infinity,
}

impl HalfPlanePoint {
    pub fn finite(self) -> Option<Complex64> {
        match self {
            HalfPlanePoint::Finite(w) => Some(w),
            HalfPlanePoint::Infinity => None,
        }
    }
}

/// The Möbius map `ψ0(z) = -i (z + i) / (z - i)` from the disk to the upper
/// half-plane, sending `0 → i`, `-i → 0` and `i → ∞`.
pub fn psi0(z: Complex64) -> HalfPlanePoint {
    let i = Complex64::i();
    let den = z - i;
    if den.norm() < 1e-15 {
        return HalfPlanePoint::Infinity;
    }
    HalfPlanePoint::Finite(-i * (z + i) / den)
}

/// Inverse chart `ψ0^{-1}(w) = (1 + i w) / (w + i)` from the half-plane back
/// to the disk.
pub fn psi0_inv(w: Complex64) -> Complex64 {
    let i = Complex64::i();
    (Complex64::new(1.0, 0.0) + i * w) / (w + i)
}

/// Derivative `ψ0'(z) = -2 / (z - i)^2`.
pub fn psi0_deriv(z: Complex64) -> Complex64 {
    let d = z - Complex64::i();
    Complex64::new(-2.0, 0.0) / (d * d)
}

/// Derivative of the inverse chart.
pub fn psi0_inv_deriv(w: Complex64) -> Complex64 {
    let d = w + Complex64::i();
    (Complex64::i() * d - (Complex64::new(1.0, 0.0) + Complex64::i() * w)) / (d * d)
}

/// Poisson kernel `H(z, x) = (1/2π) (1 - |z|^2) / |x - z|^2` for `z` in the
/// open disk and `x` on the circle.
pub fn poisson_kernel(z: Complex64, x: BoundaryPoint) -> Result<f64> {
    require_open_disk(z)?;
    let num = 1.0 - z.norm_sqr();
    let den = (x.point() - z).norm_sqr();
    Ok(num / (2.0 * PI * den))
}

/// Green's function `G(z, w) = (1/2π) log |(1 - z̄ w)/(z - w)|` with
/// Dirichlet zero boundary values.
pub fn green_function(z: Complex64, w: Complex64) -> Result<f64> {
    require_open_disk(z)?;
    require_open_disk(w)?;
    if (z - w).norm() < 1e-300 {
        return Err(Error::CoincidentPoints);
    }
    let num = Complex64::new(1.0, 0.0) - z.conj() * w;
    Ok((num.norm() / (z - w).norm()).ln() / (2.0 * PI))
}

/// Boundary Poisson kernel `H(x, y) = 1 / (π |y - x|^2)` between distinct
/// circle points.
pub fn boundary_poisson(x: BoundaryPoint, y: BoundaryPoint) -> Result<f64> {
    let d = (y.point() - x.point()).norm_sqr();
    if d < 1e-300 {
        return Err(Error::CoincidentPoints);
    }
    Ok(1.0 / (PI * d))
}

/// Conformal radius of the disk seen from `z`: `CR(z, D) = 1 - |z|^2`.
pub fn conformal_radius_disk(z: Complex64) -> Result<f64> {
    require_open_disk(z)?;
    Ok(1.0 - z.norm_sqr())
}

/// Harmonic extension of a boundary measure, `f(z) = ∫ H(z, x) dν(x)`:
/// exact atom sum plus adaptive quadrature of the Poisson kernel against
/// each density piece.
pub fn harmonic_extension(nu: &BoundaryMeasure, z: Complex64) -> Result<f64> {
    require_open_disk(z)?;
    let mut total = 0.0;
    for atom in nu.atoms() {
        let x = BoundaryPoint::from_measure_angle(atom.theta);
        total += atom.mass * poisson_kernel(z, x)?;
    }
    let scale = nu.total_mass().max(1.0);
    for piece in nu.pieces() {
        let f = |theta: f64| {
            let x = BoundaryPoint::from_measure_angle(theta);
            let h = (1.0 - z.norm_sqr()) / (2.0 * PI * (x.point() - z).norm_sqr());
            piece.eval(theta) * h
        };
        total += quad::adaptive(&f, piece.theta_lo, piece.theta_hi, 1e-12 * scale);
    }
    Ok(total)
}

/// Möbius automorphism of the disk `z ↦ e^{iφ} (z - a)/(1 - ā z)`.
#[derive(Clone, Copy, Debug)]
pub struct DiskAutomorphism {
    pub a: Complex64,
    pub phase: f64,
}

impl DiskAutomorphism {
    pub fn new(a: Complex64, phase: f64) -> Result<Self> {
        require_open_disk(a)?;
        Ok(DiskAutomorphism { a, phase })
    }

    pub fn apply(&self, z: Complex64) -> Complex64 {
        Complex64::from_polar(1.0, self.phase) * (z - self.a)
            / (Complex64::new(1.0, 0.0) - self.a.conj() * z)
    }
}
