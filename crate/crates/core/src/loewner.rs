//! Loewner machinery in the upper half-plane: forward evolution of a
//! driving function through vertical-slit maps, driving-function extraction
//! from a curve by tilted-slit unzipping, half-plane capacity, a
//! walk-on-spheres boundary-mass oracle and the SLE(ρ) integrator with
//! reflecting force points.
//!
//! Time is the half-plane-capacity clock: `hcap(K_t) = 2t` throughout.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::kernel::{psi0, HalfPlanePoint};

/// A driving function sampled on a capacity-time grid, with optional
/// force-point trajectories.
#[derive(Clone, Debug, PartialEq)]
pub struct DrivingFunction {
    /// strictly increasing from 0; units of half-plane capacity over two
    pub times: Vec<f64>,
    pub xi: Vec<f64>,
    pub force_tracks: Vec<ForceTrack>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ForceTrack {
    /// initial force point location
    pub x0: f64,
    pub values: Vec<f64>,
}

impl DrivingFunction {
    pub fn constant_zero(t_max: f64, dt: f64) -> Self {
        let n = (t_max / dt).round() as usize;
        DrivingFunction {
            times: (0..=n).map(|k| k as f64 * dt).collect(),
            xi: vec![0.0; n + 1],
            force_tracks: vec![],
        }
    }

    pub fn duration(&self) -> f64 {
        *self.times.last().unwrap_or(&0.0)
    }

    /// Linear interpolation of the driver.
    pub fn at(&self, t: f64) -> f64 {
        if self.times.is_empty() {
            return 0.0;
        }
        match self
            .times
            .binary_search_by(|x| x.partial_cmp(&t).unwrap())
        {
            Ok(i) => self.xi[i],
            Err(0) => self.xi[0],
            Err(i) if i >= self.times.len() => *self.xi.last().unwrap(),
            Err(i) => {
                let (t0, t1) = (self.times[i - 1], self.times[i]);
                let lam = (t - t0) / (t1 - t0);
                self.xi[i - 1] * (1.0 - lam) + self.xi[i] * lam
            }
        }
    }

    /// Largest step-to-step increment ratio against the diffusive scale, a
    /// continuity diagnostic (`|Δξ| ≤ C √Δt`).
    pub fn diffusive_ratio(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for k in 1..self.xi.len() {
            let dt = self.times[k] - self.times[k - 1];
            if dt > 0.0 {
                worst = worst.max((self.xi[k] - self.xi[k - 1]).abs() / dt.sqrt());
            }
        }
        worst
    }
}

/// A curve in the closed upper half-plane starting at the origin.
#[derive(Clone, Debug)]
pub struct HalfPlaneTrace {
    pub points: Vec<Complex64>,
}

impl HalfPlaneTrace {
    pub fn new(points: Vec<Complex64>) -> Self {
        HalfPlaneTrace { points }
    }

    /// Map a disk curve through the chart `ψ0`, stopping before the target
    /// endpoint `i` (whose image is infinity).
    pub fn from_disk_curve(points: &[Complex64]) -> Self {
        let mut out = Vec::with_capacity(points.len());
        for p in points {
            match psi0(*p) {
                HalfPlanePoint::Finite(w) => out.push(Complex64::new(w.re, w.im.max(0.0))),
                HalfPlanePoint::Infinity => break,
            }
        }
        if let Some(first) = out.first_mut() {
            // the chart sends -i exactly to 0; snap launch noise
            if first.norm() < 1e-9 {
                *first = Complex64::new(0.0, 0.0);
            }
        }
        HalfPlaneTrace { points: out }
    }
}

/// Apply the inverse vertical-slit map growing a slit of capacity `2 dt` at
/// `xi`: `z ↦ ξ + sqrt((z-ξ)² - 4 dt)` on the branch asymptotic to the
/// identity.
#[inline]
pub fn slit_grow(z: Complex64, xi: f64, dt: f64) -> Complex64 {
    let w = z - xi;
    if w.norm_sqr() < 1e-280 {
        return Complex64::new(xi, 2.0 * dt.sqrt());
    }
    let mut s = w * (Complex64::new(1.0, 0.0) - 4.0 * dt / (w * w)).sqrt();
    if s.im < 0.0 {
        s = -s;
    }
    Complex64::new(xi + s.re, s.im)
}

/// Apply the vertical-slit removal map `z ↦ ξ + sqrt((z-ξ)² + 4 dt)`.
#[inline]
pub fn slit_zip(z: Complex64, xi: f64, dt: f64) -> Complex64 {
    let w = z - xi;
    if w.norm_sqr() < 1e-280 {
        // base of the slit: the two prime ends go to ±2√dt; callers that
        // care about sides never pass the exact base
        return Complex64::new(xi + 2.0 * dt.sqrt(), 0.0);
    }
    let mut s = w * (Complex64::new(1.0, 0.0) + 4.0 * dt / (w * w)).sqrt();
    if s.im < 0.0 && w.im >= 0.0 {
        s = -s;
    }
    Complex64::new(xi + s.re, s.im)
}

/// Real-line version of [`slit_zip`] preserving the side of the base.
#[inline]
pub fn slit_zip_real(x: f64, xi: f64, dt: f64) -> f64 {
    let w = x - xi;
    let mag = (w * w + 4.0 * dt).sqrt();
    if w >= 0.0 {
        xi + mag
    } else {
        xi - mag
    }
}

/// Forward Loewner evolution: the trace of the chain driven by `xi`,
/// computed at each driver sample through the composition of slit maps.
/// Each step grows the straight slit matching the driver increment and the
/// capacity `2 dt`; a zero increment gives exactly the vertical slit.
pub fn forward_loewner(driver: &DrivingFunction, dt: f64) -> HalfPlaneTrace {
    assert!(dt > 0.0);
    let t_max = driver.duration();
    let n = (t_max / dt).round().max(1.0) as usize;
    let xi: Vec<f64> = (0..=n).map(|k| driver.at(k as f64 * dt)).collect();
    // slit parameters per step: shift δ_j and capacity time dt fix the
    // tilt through d = sqrt(δ² + 16 dt), α = (1 - δ/d)/2
    let slits: Vec<TiltedSlit> = (1..=n)
        .map(|j| {
            let delta = xi[j] - xi[j - 1];
            let d = (delta * delta + 16.0 * dt).sqrt();
            let alpha = 0.5 * (1.0 - delta / d);
            TiltedSlit {
                alpha,
                d,
                shift: delta,
                dt,
            }
        })
        .collect();
    let mut points = Vec::with_capacity(n + 1);
    points.push(Complex64::new(xi[0], 0.0));
    for k in 1..=n {
        // tip of slit k pulled back through slits k-1 .. 1; the step-j
        // removal map is w' = f_j^{-1}(w - ξ_{j-1}) + ξ_j, so the pullback
        // is w = f_j(w' - ξ_j) + ξ_{j-1}
        let mut z = slits[k - 1].forward(Complex64::new(0.0, 0.0)) + xi[k - 1];
        for j in (1..k).rev() {
            z = slits[j - 1].forward(z - xi[j]) + xi[j - 1];
        }
        points.push(Complex64::new(z.re, z.im.max(0.0)));
    }
    HalfPlaneTrace { points }
}

/// Tilted-slit elementary map `f(z) = (z + d(1-α))^{1-α} (z - dα)^α`,
/// sending the half-plane onto the half-plane minus a straight slit from
/// the origin at angle `πα` — the building block of the extraction.
#[derive(Clone, Copy, Debug)]
pub struct TiltedSlit {
    pub alpha: f64,
    pub d: f64,
    /// driver shift produced by this slit
    pub shift: f64,
    /// capacity-time increment
    pub dt: f64,
}

impl TiltedSlit {
    /// The slit whose tip is at `tip` (relative to the base point).
    pub fn from_tip(tip: Complex64) -> Self {
        let alpha = (tip.arg() / crate::kernel::PI).clamp(1e-6, 1.0 - 1e-6);
        let d = tip.norm() / (alpha.powf(alpha) * (1.0 - alpha).powf(1.0 - alpha));
        TiltedSlit {
            alpha,
            d,
            shift: d * (1.0 - 2.0 * alpha),
            dt: d * d * alpha * (1.0 - alpha) / 4.0,
        }
    }

    /// Forward map (grows the slit), relative coordinates.
    pub fn forward(&self, z: Complex64) -> Complex64 {
        let a = self.d * (1.0 - self.alpha);
        let b = self.d * self.alpha;
        ((z + a).ln() * (1.0 - self.alpha) + (z - b).ln() * self.alpha).exp()
    }

    /// Inverse map (removes the slit) by damped Newton iteration on the
    /// logarithmic equation; `hint` seeds the iteration.
    pub fn invert(&self, u: Complex64, hint: Complex64) -> Option<Complex64> {
        let a = self.d * (1.0 - self.alpha);
        let b = self.d * self.alpha;
        if u.norm() < 1e-300 {
            // u = 0 is the doubly-covered slit root; no usable preimage
            return None;
        }
        let target = u.ln();
        let f = |z: Complex64| (z + a).ln() * (1.0 - self.alpha) + (z - b).ln() * self.alpha;
        let fp = |z: Complex64| {
            Complex64::new(1.0 - self.alpha, 0.0) / (z + a) + Complex64::new(self.alpha, 0.0) / (z - b)
        };
        let clamp_h = |z: Complex64| Complex64::new(z.re, z.im.max(1e-14));
        let mut z = clamp_h(hint);
        let mut resid = (f(z) - target).norm();
        for _ in 0..80 {
            if resid < 1e-13 {
                break;
            }
            let step = (f(z) - target) / fp(z);
            let mut lam = 1.0;
            let mut improved = false;
            for _ in 0..30 {
                let cand = clamp_h(z - step * lam);
                let r = (f(cand) - target).norm();
                if r < resid {
                    z = cand;
                    resid = r;
                    improved = true;
                    break;
                }
                lam *= 0.5;
            }
            if !improved {
                break;
            }
        }
        if resid < 1e-9 {
            Some(z)
        } else {
            None
        }
    }
}

/// One recorded extraction step: driver value and capacity increment, plus
/// the slit map needed to replay the transformation.
#[derive(Clone, Debug)]
struct UnzipStep {
    base: f64,
    slit: TiltedSlit,
}

/// The unzipped representation of a trace: the driving function plus the
/// slit composition, which also evaluates `g_t` and `g_t'` at points.
pub struct Unzipped {
    pub driver: DrivingFunction,
    steps: Vec<UnzipStep>,
}

impl Unzipped {
    /// Total half-plane capacity of the unzipped hull.
    pub fn hcap(&self) -> f64 {
        2.0 * self.driver.duration()
    }

    /// Image of a point under the hull map `g_T` (composition of all
    /// steps); `None` when the point is swallowed.
    pub fn map_point(&self, z: Complex64) -> Option<Complex64> {
        let mut w = z;
        for st in &self.steps {
            let rel = w - st.base;
            if rel.norm() < 1e-13 {
                return None;
            }
            let removed = st.slit.invert(rel, rel - Complex64::new(st.slit.shift, 0.0))?;
            w = removed + st.base + st.slit.shift;
        }
        Some(w)
    }

    /// Image and complex derivative of the hull map `g_T` at a point, by
    /// the chain rule through the slit composition.
    pub fn map_point_with_deriv(&self, z: Complex64) -> Option<(Complex64, Complex64)> {
        let mut w = z;
        let mut deriv = Complex64::new(1.0, 0.0);
        for st in &self.steps {
            let rel = w - st.base;
            if rel.norm() < 1e-13 {
                return None;
            }
            let removed = st.slit.invert(rel, rel - Complex64::new(st.slit.shift, 0.0))?;
            // (f⁻¹)'(u) = 1 / f'(f⁻¹(u))
            let a = st.slit.d * (1.0 - st.slit.alpha);
            let b = st.slit.d * st.slit.alpha;
            let fp = st.slit.forward(removed)
                * (Complex64::new(1.0 - st.slit.alpha, 0.0) / (removed + a)
                    + Complex64::new(st.slit.alpha, 0.0) / (removed - b));
            if fp.norm() < 1e-300 {
                return None;
            }
            deriv /= fp;
            w = removed + st.base + st.slit.shift;
        }
        Some((w, deriv))
    }

    /// Image of a real boundary prime end. When the point sits exactly at a
    /// slit base, `side` picks the prime end (`-1` left, `+1` right); away
    /// from bases real points map monotonically outward.
    pub fn map_real(&self, x: f64, side: f64) -> Option<f64> {
        let mut w = x;
        for st in &self.steps {
            let rel = w - st.base;
            let a = st.slit.d * (1.0 - st.slit.alpha);
            let b = st.slit.d * st.slit.alpha;
            if rel.abs() < 1e-13 {
                w = if side < 0.0 { -a } else { b } + st.base + st.slit.shift;
                continue;
            }
            let relc = Complex64::new(rel, 0.0);
            let removed = st
                .slit
                .invert(relc, relc - Complex64::new(st.slit.shift, 0.0))?;
            w = removed.re + st.base + st.slit.shift;
        }
        Some(w)
    }
}

/// Extract the driving function of a half-plane trace by tilted-slit
/// unzipping. The output grid is the capacity time accumulated by the
/// slits, so `hcap = 2t` holds exactly along the result.
pub fn extract_driver(trace: &HalfPlaneTrace) -> Result<Unzipped> {
    let pts = &trace.points;
    if pts.len() < 2 {
        return Ok(Unzipped {
            driver: DrivingFunction {
                times: vec![0.0],
                xi: vec![pts.first().map(|p| p.re).unwrap_or(0.0)],
                force_tracks: vec![],
            },
            steps: vec![],
        });
    }
    let mut work: Vec<Complex64> = pts.to_vec();
    let mut xi = vec![work[0].re];
    let mut times = vec![0.0];
    let mut steps: Vec<UnzipStep> = Vec::new();
    let mut t = 0.0;
    let mut base = work[0].re;
    // the flattened image of the hull so far is a real interval around the
    // driver; points landing inside it with no height sit in the hull
    let mut hull_l = base;
    let mut hull_r = base;
    let scale = pts
        .iter()
        .map(|p| p.norm())
        .fold(0.0f64, f64::max)
        .max(1e-9);
    for k in 1..pts.len() {
        let zk = work[k];
        let rel = zk - base;
        if rel.im < -1e-9 * scale {
            return Err(Error::HullViolation { index: k });
        }
        if rel.im < 1e-7 * scale && zk.re > hull_l + 1e-9 * scale && zk.re < hull_r - 1e-9 * scale {
            return Err(Error::HullViolation { index: k });
        }
        let rel = Complex64::new(rel.re, rel.im.max(1e-12 * scale));
        if rel.norm() < 1e-12 * scale {
            // repeated point: zero-capacity step
            xi.push(base);
            times.push(t);
            continue;
        }
        let slit = TiltedSlit::from_tip(rel);
        // transform the remaining points through the slit removal
        let mut hint = rel - slit.shift;
        for (j, w) in work.iter_mut().enumerate().skip(k + 1) {
            let r = *w - base;
            let inv = match slit.invert(r, hint) {
                Some(v) => v,
                None => return Err(Error::HullViolation { index: j }),
            };
            hint = inv;
            *w = inv + base + slit.shift;
        }
        // transform the hull interval and absorb the new slit footprint
        let a = slit.d * (1.0 - slit.alpha);
        let b = slit.d * slit.alpha;
        let map_edge = |x: f64, fallback: f64| -> f64 {
            let r = Complex64::new(x - base, 0.0);
            if r.norm() < 1e-13 {
                return fallback;
            }
            match slit.invert(r, r - Complex64::new(slit.shift, 0.0)) {
                Some(v) => v.re + base + slit.shift,
                None => fallback,
            }
        };
        let new_base = base + slit.shift;
        hull_l = map_edge(hull_l, new_base - a).min(new_base - a);
        hull_r = map_edge(hull_r, new_base + b).max(new_base + b);
        steps.push(UnzipStep { base, slit });
        base = new_base;
        t += slit.dt;
        xi.push(base);
        times.push(t);
    }
    Ok(Unzipped {
        driver: DrivingFunction {
            times,
            xi,
            force_tracks: vec![],
        },
        steps,
    })
}

/// Half-plane capacity of the hull of a trace, from the unzipping
/// composition's expansion at infinity.
pub fn hcap(trace: &HalfPlaneTrace) -> Result<f64> {
    if trace.points.len() < 2 {
        return Ok(0.0);
    }
    Ok(extract_driver(trace)?.hcap())
}

/// Resample a polyline to `m` points by arc length.
pub fn resample_by_arclength(points: &[Complex64], m: usize) -> Vec<Complex64> {
    if points.len() < 2 || m < 2 {
        return points.to_vec();
    }
    let mut cum = vec![0.0];
    for w in points.windows(2) {
        cum.push(cum.last().unwrap() + (w[1] - w[0]).norm());
    }
    let total = *cum.last().unwrap();
    if total == 0.0 {
        return vec![points[0]; m];
    }
    let mut out = Vec::with_capacity(m);
    let mut j = 0usize;
    for k in 0..m {
        let target = total * k as f64 / (m - 1) as f64;
        while j + 1 < cum.len() - 1 && cum[j + 1] < target {
            j += 1;
        }
        let seg = cum[j + 1] - cum[j];
        let lam = if seg > 0.0 { (target - cum[j]) / seg } else { 0.0 };
        out.push(points[j] * (1.0 - lam) + points[j + 1] * lam);
    }
    out
}

/// Walk-on-spheres estimate of the renormalized boundary mass
/// `h_t(x) = lim_y πy P^{iy}(exit on the right side of the curve or (0,x))`.
pub struct RightMassEstimate {
    pub value: f64,
    pub std_error: f64,
    pub launch_height: f64,
}

pub fn mc_right_mass<R: Rng>(
    trace: &HalfPlaneTrace,
    x: f64,
    walks: usize,
    rng: &mut R,
) -> RightMassEstimate {
    let pts = &trace.points;
    let reach = pts.iter().map(|p| p.norm()).fold(0.0f64, f64::max).max(x);
    let launch = 12.0 * reach.max(1.0);
    let shell = 1e-5 * reach.max(1.0);
    let seg_dist = |z: Complex64| -> (f64, usize) {
        let mut best = f64::MAX;
        let mut arg = 0usize;
        for (i, w) in pts.windows(2).enumerate() {
            let (a, b) = (w[0], w[1]);
            let ab = b - a;
            let len2 = ab.norm_sqr().max(1e-300);
            let t = (((z - a).re * ab.re + (z - a).im * ab.im) / len2).clamp(0.0, 1.0);
            let d = (z - (a + ab * t)).norm();
            if d < best {
                best = d;
                arg = i;
            }
        }
        (best, arg)
    };
    let mut hits = 0usize;
    for _ in 0..walks {
        let mut z = Complex64::new(0.0, launch);
        let mut success = false;
        for _ in 0..100_000 {
            let (dc, seg) = seg_dist(z);
            let d = dc.min(z.im);
            if d <= shell {
                if dc <= z.im {
                    // stopped at the curve: which side? sign of the cross
                    // product with the local direction
                    let a = pts[seg];
                    let b = pts[seg + 1];
                    let dirv = b - a;
                    let cr = dirv.re * (z - a).im - dirv.im * (z - a).re;
                    // the curve runs upward from 0; its right side has
                    // negative cross product
                    success = cr < 0.0;
                } else {
                    success = z.re > 0.0 && z.re < x;
                }
                break;
            }
            let ang = rng.gen_range(0.0..2.0 * crate::kernel::PI);
            z += Complex64::from_polar(d * (1.0 - 1e-12), ang);
            if z.norm() > 40.0 * launch {
                break;
            }
        }
        if success {
            hits += 1;
        }
    }
    let p = hits as f64 / walks as f64;
    RightMassEstimate {
        value: crate::kernel::PI * launch * p,
        std_error: crate::kernel::PI * launch * (p * (1.0 - p) / walks as f64).sqrt(),
        launch_height: launch,
    }
}

/// Finite force-point specification of an SLE(ρ) drift.
#[derive(Clone, Debug)]
pub struct ForceSpec {
    /// (location ≤ 0, weight); a location of `-0.0` means the left prime
    /// end of the origin
    pub points: Vec<(f64, f64)>,
}

impl ForceSpec {
    pub fn empty() -> Self {
        ForceSpec { points: vec![] }
    }
}

/// State handed to drift callbacks during SDE integration.
pub struct SdeState {
    pub t: f64,
    pub xi: f64,
    pub v: Vec<f64>,
}

/// Outcome marker of the SDE integrator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SdeOutcome {
    Completed,
    /// drift integral diverged over a full step
    Stalled,
}

pub struct SdeRun {
    pub driver: DrivingFunction,
    /// accumulated drift integral on the driver grid
    pub drift_integral: Vec<f64>,
    /// per-step flag: the tip was away from all force points (no collision
    /// capping applied)
    pub away: Vec<bool>,
    pub outcome: SdeOutcome,
}

/// Euler–Maruyama for `dξ = √κ dB + Z dt`, `dV = 2 dt / (V - ξ)`, with
/// instantaneous-reflection handling: inside the collision window
/// `|ξ - V| < √(κ dt)` the drift summand is capped and the step is excised
/// from the drift integral.
pub fn simulate_sle_rho<R: Rng>(
    kappa: f64,
    spec: &ForceSpec,
    t_max: f64,
    dt: f64,
    rng: &mut R,
) -> Result<SdeRun> {
    let window = (kappa * dt).sqrt();
    let points = spec.points.clone();
    let drift = move |state: &SdeState, capped: &mut bool| -> f64 {
        let mut z = 0.0;
        for (j, &(_, rho)) in points.iter().enumerate() {
            let gap = state.xi - state.v[j];
            if gap.abs() < window {
                // collision window: cap the summand at the diffusive scale,
                // sign preserved; the step is excised from the integral
                *capped = true;
                z += rho / (window * if gap >= 0.0 { 1.0 } else { -1.0 });
            } else {
                z += rho / gap;
            }
        }
        z
    };
    simulate_sle_with_drift(kappa, spec, drift, t_max, dt, rng)
}

/// Generic integrator with a caller-supplied drift; the boolean out-flag
/// marks steps where the drift had to be capped (collision window).
pub fn simulate_sle_with_drift<R: Rng, F>(
    kappa: f64,
    spec: &ForceSpec,
    mut drift: F,
    t_max: f64,
    dt: f64,
    rng: &mut R,
) -> Result<SdeRun>
where
    F: FnMut(&SdeState, &mut bool) -> f64,
{
    let n = (t_max / dt).round().max(1.0) as usize;
    let normal = Normal::new(0.0, 1.0).unwrap();
    let sq = kappa.sqrt();
    let mut xi = vec![0.0f64];
    let mut v: Vec<f64> = spec.points.iter().map(|&(x, _)| x.min(-0.0)).collect();
    let mut tracks: Vec<Vec<f64>> = v.iter().map(|&x| vec![x]).collect();
    let mut drift_integral = vec![0.0f64];
    let mut away = vec![true];
    let window = (kappa * dt).sqrt();
    let stall_cap = 50.0 * sq / dt.sqrt();
    let mut outcome = SdeOutcome::Completed;
    for k in 1..=n {
        let state = SdeState {
            t: (k - 1) as f64 * dt,
            xi: *xi.last().unwrap(),
            v: v.clone(),
        };
        let mut capped = false;
        let mut z = drift(&state, &mut capped);
        if !z.is_finite() || z.abs() > stall_cap {
            if z.is_finite() {
                z = z.signum() * stall_cap;
            } else {
                outcome = SdeOutcome::Stalled;
                break;
            }
        }
        let noise = sq * dt.sqrt() * normal.sample(rng);
        let dz = if capped { 0.0 } else { z * dt };
        let new_xi = state.xi + noise + dz;
        // force points move by the Loewner flow and reflect off the driver
        for (j, vj) in v.iter_mut().enumerate() {
            let gap = *vj - state.xi;
            let denom = if gap.abs() < 1e-3 * window {
                -1e-3 * window
            } else {
                gap
            };
            *vj += 2.0 * dt / denom;
            if *vj > new_xi {
                *vj = new_xi;
            }
            tracks[j].push(*vj);
        }
        drift_integral.push(drift_integral.last().unwrap() + dz);
        away.push(!capped);
        xi.push(new_xi);
    }
    let times: Vec<f64> = (0..xi.len()).map(|k| k as f64 * dt).collect();
    let force_tracks = spec
        .points
        .iter()
        .zip(tracks)
        .map(|(&(x0, _), values)| ForceTrack { x0, values })
        .collect();
    Ok(SdeRun {
        driver: DrivingFunction {
            times,
            xi,
            force_tracks,
        },
        drift_integral,
        away,
        outcome,
    })
}
