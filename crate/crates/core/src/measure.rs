//! Finite non-negative boundary measures on the unit circle: a list of atoms
//! plus a piecewise-polynomial density in the angle variable. The measures
//! driving excursion processes are supported on the closed left arc
//! `[π/2, 3π/2]`; harmonic extension accepts support anywhere on the circle.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{LEFT_ARC_HI, LEFT_ARC_LO, PI};
use crate::quad;

/// A point mass on the circle, angle in the measure chart `[π/2, 5π/2)`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
pub struct Atom {
    pub theta: f64,
    pub mass: f64,
}

/// One polynomial density piece: on `[theta_lo, theta_hi]` the density is
/// `Σ_j coeffs[j] (θ - theta_lo)^j`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct PolyPiece {
    pub theta_lo: f64,
    pub theta_hi: f64,
    pub coeffs: Vec<f64>,
}

impl PolyPiece {
    pub fn eval(&self, theta: f64) -> f64 {
        let t = theta - self.theta_lo;
        let mut acc = 0.0;
        for &c in self.coeffs.iter().rev() {
            acc = acc * t + c;
        }
        acc
    }

    pub fn mass(&self) -> f64 {
        let w = self.theta_hi - self.theta_lo;
        self.coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| c * w.powi(j as i32 + 1) / (j as f64 + 1.0))
            .sum()
    }

    /// Mass of the sub-interval `[lo, hi] ∩ [theta_lo, theta_hi]`.
    pub fn mass_between(&self, lo: f64, hi: f64) -> f64 {
        let a = lo.max(self.theta_lo);
        let b = hi.min(self.theta_hi);
        if b <= a {
            return 0.0;
        }
        let prim = |t: f64| -> f64 {
            let u = t - self.theta_lo;
            self.coeffs
                .iter()
                .enumerate()
                .map(|(j, c)| c * u.powi(j as i32 + 1) / (j as f64 + 1.0))
                .sum()
        };
        prim(b) - prim(a)
    }
}

/// Finite non-negative Radon measure on the circle, atoms plus density.
#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
pub struct BoundaryMeasure {
    #[serde(default)]
    pub atoms: Vec<Atom>,
    #[serde(default)]
    pub pieces: Vec<PolyPiece>,
}

impl BoundaryMeasure {
    pub fn zero() -> Self {
        BoundaryMeasure::default()
    }

    /// Constant density `a` on the closed left arc.
    pub fn constant_on_left_arc(a: f64) -> Self {
        BoundaryMeasure {
            atoms: vec![],
            pieces: vec![PolyPiece {
                theta_lo: LEFT_ARC_LO,
                theta_hi: LEFT_ARC_HI,
                coeffs: vec![a],
            }],
        }
    }

    /// The arc-length measure of the full circle.
    pub fn full_circle_arc_length() -> Self {
        BoundaryMeasure {
            atoms: vec![],
            pieces: vec![PolyPiece {
                theta_lo: LEFT_ARC_LO,
                theta_hi: LEFT_ARC_LO + 2.0 * PI,
                coeffs: vec![1.0],
            }],
        }
    }

    pub fn dirac(theta: f64, mass: f64) -> Self {
        BoundaryMeasure {
            atoms: vec![Atom { theta, mass }],
            pieces: vec![],
        }
    }

    /// Validate the structural invariants: positive atom masses at distinct
    /// angles, ordered non-overlapping pieces, non-negative density.
    pub fn validate(&self) -> Result<()> {
        for a in &self.atoms {
            if !a.mass.is_finite() || a.mass <= 0.0 {
                return Err(Error::InvalidMeasure(format!(
                    "atom at {} has non-positive mass {}",
                    a.theta, a.mass
                )));
            }
            if !(LEFT_ARC_LO..LEFT_ARC_LO + 2.0 * PI).contains(&a.theta) {
                return Err(Error::InvalidMeasure(format!(
                    "atom angle {} outside the measure chart [π/2, 5π/2)",
                    a.theta
                )));
            }
        }
        for (i, a) in self.atoms.iter().enumerate() {
            for b in self.atoms.iter().skip(i + 1) {
                if (a.theta - b.theta).abs() < 1e-12 {
                    return Err(Error::InvalidMeasure(format!(
                        "duplicate atoms at angle {}",
                        a.theta
                    )));
                }
            }
        }
        for p in &self.pieces {
            if !(p.theta_lo < p.theta_hi) {
                return Err(Error::InvalidMeasure(format!(
                    "piece [{}, {}] is empty or reversed",
                    p.theta_lo, p.theta_hi
                )));
            }
            if p.theta_lo < LEFT_ARC_LO - 1e-12 || p.theta_hi > LEFT_ARC_LO + 2.0 * PI + 1e-12 {
                return Err(Error::InvalidMeasure(format!(
                    "piece [{}, {}] outside the measure chart [π/2, 5π/2]",
                    p.theta_lo, p.theta_hi
                )));
            }
            // Non-negativity checked on a fine grid; densities here are low
            // degree, so 64 probes per piece is plenty.
            for k in 0..=64 {
                let t = p.theta_lo + (p.theta_hi - p.theta_lo) * k as f64 / 64.0;
                if p.eval(t) < -1e-10 {
                    return Err(Error::InvalidMeasure(format!(
                        "density negative ({}) at θ = {}",
                        p.eval(t),
                        t
                    )));
                }
            }
        }
        let mut sorted: Vec<(f64, f64)> = self.pieces.iter().map(|p| (p.theta_lo, p.theta_hi)).collect();
        sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        for w in sorted.windows(2) {
            if w[1].0 < w[0].1 - 1e-12 {
                return Err(Error::InvalidMeasure(format!(
                    "overlapping pieces near θ = {}",
                    w[1].0
                )));
            }
        }
        Ok(())
    }

    /// Require the full support to sit inside the closed left arc.
    pub fn validate_left_supported(&self) -> Result<()> {
        self.validate()?;
        if !self.is_left_supported() {
            return Err(Error::InvalidMeasure(
                "measure has support outside the closed left arc".into(),
            ));
        }
        Ok(())
    }

    pub fn is_left_supported(&self) -> bool {
        self.atoms
            .iter()
            .all(|a| (LEFT_ARC_LO..=LEFT_ARC_HI).contains(&a.theta))
            && self
                .pieces
                .iter()
                .all(|p| p.theta_lo >= LEFT_ARC_LO - 1e-12 && p.theta_hi <= LEFT_ARC_HI + 1e-12)
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn pieces(&self) -> &[PolyPiece] {
        &self.pieces
    }

    pub fn is_zero(&self) -> bool {
        self.total_mass() == 0.0
    }

    pub fn total_mass(&self) -> f64 {
        let atoms: f64 = self.atoms.iter().map(|a| a.mass).sum();
        let dens: f64 = self.pieces.iter().map(|p| p.mass()).sum();
        atoms + dens
    }

    /// Mass of the angular interval `[lo, hi]` (measure chart, inclusive of
    /// atoms at the endpoints).
    pub fn mass_between(&self, lo: f64, hi: f64) -> f64 {
        let atoms: f64 = self
            .atoms
            .iter()
            .filter(|a| a.theta >= lo && a.theta <= hi)
            .map(|a| a.mass)
            .sum();
        let dens: f64 = self.pieces.iter().map(|p| p.mass_between(lo, hi)).sum();
        atoms + dens
    }

    /// Density value at an angle (atoms excluded).
    pub fn density_at(&self, theta: f64) -> f64 {
        self.pieces
            .iter()
            .filter(|p| theta >= p.theta_lo && theta <= p.theta_hi)
            .map(|p| p.eval(theta))
            .sum()
    }

    /// Integral `∫ w(θ) dν(θ)` of a pointwise weight against the measure:
    /// exact atom sum plus adaptive quadrature per density piece.
    pub fn integrate<F: Fn(f64) -> f64>(&self, w: &F, tol: f64) -> f64 {
        let mut total: f64 = self.atoms.iter().map(|a| a.mass * w(a.theta)).sum();
        for p in self.pieces.iter() {
            let f = |t: f64| p.eval(t) * w(t);
            total += quad::adaptive(&f, p.theta_lo, p.theta_hi, tol);
        }
        total
    }

    /// Same as [`integrate`](Self::integrate) restricted to `[lo, hi]`.
    pub fn integrate_between<F: Fn(f64) -> f64>(&self, w: &F, lo: f64, hi: f64, tol: f64) -> f64 {
        let mut total: f64 = self
            .atoms
            .iter()
            .filter(|a| a.theta >= lo && a.theta <= hi)
            .map(|a| a.mass * w(a.theta))
            .sum();
        for p in self.pieces.iter() {
            let a = lo.max(p.theta_lo);
            let b = hi.min(p.theta_hi);
            if b <= a {
                continue;
            }
            let f = |t: f64| p.eval(t) * w(t);
            total += quad::adaptive(&f, a, b, tol);
        }
        total
    }

    /// Sum of two measures.
    pub fn plus(&self, other: &BoundaryMeasure) -> BoundaryMeasure {
        let mut atoms = self.atoms.clone();
        for b in &other.atoms {
            if let Some(a) = atoms.iter_mut().find(|a| (a.theta - b.theta).abs() < 1e-12) {
                a.mass += b.mass;
            } else {
                atoms.push(*b);
            }
        }
        let mut pieces = self.pieces.clone();
        pieces.extend(other.pieces.iter().cloned());
        BoundaryMeasure { atoms, pieces }
    }

    /// Scale every atom and density by `c >= 0`.
    pub fn scaled(&self, c: f64) -> BoundaryMeasure {
        BoundaryMeasure {
            atoms: self
                .atoms
                .iter()
                .map(|a| Atom {
                    theta: a.theta,
                    mass: a.mass * c,
                })
                .collect(),
            pieces: self
                .pieces
                .iter()
                .map(|p| PolyPiece {
                    theta_lo: p.theta_lo,
                    theta_hi: p.theta_hi,
                    coeffs: p.coeffs.iter().map(|x| x * c).collect(),
                })
                .collect(),
        }
    }

    /// Check pointwise domination `self <= other`: every atom of `self` is
    /// dominated and the density is dominated on a fine probe grid.
    pub fn dominated_by(&self, other: &BoundaryMeasure, probes: usize) -> bool {
        for a in &self.atoms {
            let cap: f64 = other
                .atoms
                .iter()
                .filter(|b| (b.theta - a.theta).abs() < 1e-12)
                .map(|b| b.mass)
                .sum();
            if a.mass > cap + 1e-12 {
                return false;
            }
        }
        for k in 0..=probes {
            let t = LEFT_ARC_LO + 2.0 * PI * k as f64 / probes as f64;
            if self.density_at(t) > other.density_at(t) + 1e-10 {
                return false;
            }
        }
        true
    }

    /// Parse the JSON wire format
    /// `{atoms:[{theta,mass}], pieces:[{theta_lo,theta_hi,coeffs:[...]}]}`,
    /// angles in radians; the parsed measure is validated.
    pub fn from_json(s: &str) -> Result<Self> {
        let m: BoundaryMeasure = serde_json::from_str(s)?;
        m.validate()?;
        Ok(m)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("measure serialization cannot fail")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{harmonic_extension, poisson_kernel, BoundaryPoint};
    use num_complex::Complex64;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    #[test]
    fn masses_of_constant_and_dirac() {
        let m = BoundaryMeasure::constant_on_left_arc(2.0);
        assert!((m.total_mass() - 2.0 * PI).abs() < 1e-12);
        assert!(m.is_left_supported());
        let d = BoundaryMeasure::dirac(PI, 0.7);
        assert!((d.total_mass() - 0.7).abs() < 1e-15);
        assert!((m.plus(&d).total_mass() - 2.0 * PI - 0.7).abs() < 1e-12);
    }

    #[test]
    fn validation_rejects_bad_measures() {
        let neg = BoundaryMeasure {
            atoms: vec![],
            pieces: vec![PolyPiece {
                theta_lo: 2.0,
                theta_hi: 3.0,
                coeffs: vec![-1.0],
            }],
        };
        assert!(neg.validate().is_err());
        let dup = BoundaryMeasure {
            atoms: vec![Atom { theta: 3.0, mass: 1.0 }, Atom { theta: 3.0, mass: 2.0 }],
            pieces: vec![],
        };
        assert!(dup.validate().is_err());
        let right = BoundaryMeasure::dirac(0.1 + 3.0 * PI / 2.0 + 0.2, 1.0);
        assert!(right.validate().is_ok());
        assert!(right.validate_left_supported().is_err());
    }

    #[test]
    fn json_round_trip_and_position_in_errors() {
        let m = BoundaryMeasure {
            atoms: vec![Atom { theta: PI, mass: 2.0 }],
            pieces: vec![PolyPiece {
                theta_lo: LEFT_ARC_LO,
                theta_hi: LEFT_ARC_HI,
                coeffs: vec![0.5, 0.1],
            }],
        };
        let back = BoundaryMeasure::from_json(&m.to_json()).unwrap();
        assert_eq!(m, back);
        let err = BoundaryMeasure::from_json("{\"atoms\": [{\"theta\": }]}").unwrap_err();
        let msg = format!("{err}");
        assert!(msg.contains("line") && msg.contains("column"), "{msg}");
    }

    #[test]
    fn harmonic_extension_of_arc_length_is_one() {
        // ν = σ on the full circle: the Poisson kernel integrates to 1.
        let sigma = BoundaryMeasure::full_circle_arc_length();
        let mut rng = StdRng::seed_from_u64(5);
        for _ in 0..100 {
            let z = Complex64::from_polar(rng.gen_range(0.0..0.95), rng.gen_range(0.0..6.28));
            let v = harmonic_extension(&sigma, z).unwrap();
            assert!((v - 1.0).abs() < 1e-8, "normalization failed: {v}");
        }
    }

    #[test]
    fn harmonic_extension_of_dirac_is_the_kernel() {
        let x = BoundaryPoint::from_measure_angle(1.9);
        let nu = BoundaryMeasure::dirac(1.9, 1.0);
        let z = Complex64::new(0.2, -0.5);
        let v = harmonic_extension(&nu, z).unwrap();
        assert!((v - poisson_kernel(z, x).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn mean_value_property_of_extension() {
        // The average over the circle |z| = 0.5 equals the value at 0.
        let nu = BoundaryMeasure {
            atoms: vec![Atom { theta: 2.4, mass: 0.3 }],
            pieces: vec![PolyPiece {
                theta_lo: LEFT_ARC_LO,
                theta_hi: LEFT_ARC_HI,
                coeffs: vec![0.4, 0.2, 0.05],
            }],
        };
        let at0 = harmonic_extension(&nu, Complex64::new(0.0, 0.0)).unwrap();
        let n = 4096;
        let mut avg = 0.0;
        for k in 0..n {
            let z = Complex64::from_polar(0.5, 2.0 * PI * k as f64 / n as f64);
            avg += harmonic_extension(&nu, z).unwrap();
        }
        avg /= n as f64;
        assert!((avg - at0).abs() < 1e-6, "mean value violated: {avg} vs {at0}");
    }

    #[test]
    fn extension_is_linear_and_monotone() {
        let nu1 = BoundaryMeasure::constant_on_left_arc(0.5);
        let nu2 = BoundaryMeasure {
            atoms: vec![Atom { theta: 2.0, mass: 0.2 }],
            pieces: vec![PolyPiece {
                theta_lo: LEFT_ARC_LO,
                theta_hi: LEFT_ARC_HI,
                coeffs: vec![0.7, 0.1],
            }],
        };
        assert!(nu1.dominated_by(&nu1.plus(&nu2), 512));
        let mut rng = StdRng::seed_from_u64(9);
        for _ in 0..20 {
            let z = Complex64::from_polar(rng.gen_range(0.0..0.9), rng.gen_range(0.0..6.28));
            let a = harmonic_extension(&nu1, z).unwrap();
            let b = harmonic_extension(&nu2, z).unwrap();
            let s = harmonic_extension(&nu1.plus(&nu2), z).unwrap();
            assert!((s - a - b).abs() < 1e-9);
            assert!(s >= a - 1e-12 && s >= b - 1e-12, "monotonicity");
        }
    }

    #[test]
    fn interval_masses_agree_with_quadrature() {
        let m = BoundaryMeasure {
            atoms: vec![Atom { theta: 2.0, mass: 1.0 }],
            pieces: vec![PolyPiece {
                theta_lo: LEFT_ARC_LO,
                theta_hi: LEFT_ARC_HI,
                coeffs: vec![0.0, 1.0], // density θ - π/2
            }],
        };
        let w = LEFT_ARC_HI - LEFT_ARC_LO;
        assert!((m.total_mass() - (1.0 + w * w / 2.0)).abs() < 1e-12);
        let got = m.mass_between(1.9, 2.1);
        let dens = |t: f64| t - LEFT_ARC_LO;
        let expect = 1.0 + quad::adaptive(&dens, 1.9, 2.1, 1e-13);
        assert!((got - expect).abs() < 1e-12);
    }
}
