//! Brownian boundary-to-boundary excursions in the unit disk, the Poisson
//! point process driven by a boundary measure, the assignment metric
//! `d_curves` between finite path sets, and the Markovian slice
//! decomposition at the inner region boundary.
//!
//! Excursions are sampled in the upper half-plane, where an excursion from
//! `0` to `∞` is an independent pair (real part: Brownian motion; imaginary
//! part: Bessel(3) from zero), and carried to the disk by a Möbius chart
//! pinning the two endpoints. Recorded times are the half-plane clock of
//! the sampled skeleton; the clock step adapts so the disk-side resolution
//! stays near `sqrt(step)` along the whole path.

mod coupling;
mod hungarian;

pub use coupling::{couple_processes, CoupledFamily, CoupledMember, InnerKernel};
pub use hungarian::min_cost_assignment;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Normal, Poisson};

use crate::error::{Error, Result};
use crate::kernel::{boundary_poisson, BoundaryPoint, LEFT_ARC_HI, LEFT_ARC_LO, PI};
use crate::measure::BoundaryMeasure;

/// A time-stamped planar polyline.
#[derive(Clone, Debug, PartialEq)]
pub struct TimedPath {
    pub points: Vec<Complex64>,
    pub times: Vec<f64>,
}

impl TimedPath {
    pub fn duration(&self) -> f64 {
        *self.times.last().unwrap_or(&0.0)
    }

    /// Position at normalized time `s ∈ [0,1]` by linear interpolation.
    pub fn at_normalized(&self, s: f64) -> Complex64 {
        let t = s.clamp(0.0, 1.0) * self.duration();
        self.at_time(t)
    }

    pub fn at_time(&self, t: f64) -> Complex64 {
        let n = self.points.len();
        if n == 1 {
            return self.points[0];
        }
        let idx = match self
            .times
            .binary_search_by(|x| x.partial_cmp(&t).unwrap())
        {
            Ok(i) => return self.points[i],
            Err(i) => i,
        };
        if idx == 0 {
            return self.points[0];
        }
        if idx >= n {
            return self.points[n - 1];
        }
        let (t0, t1) = (self.times[idx - 1], self.times[idx]);
        let lam = if t1 > t0 { (t - t0) / (t1 - t0) } else { 0.0 };
        self.points[idx - 1] * (1.0 - lam) + self.points[idx] * lam
    }

    /// Exact diameter of the sampled points (convex hull + rotating calipers).
    pub fn diameter(&self) -> f64 {
        polyline_diameter(&self.points)
    }
}

/// A Brownian excursion from boundary to boundary.
#[derive(Clone, Debug)]
pub struct Excursion {
    pub path: TimedPath,
    pub start: BoundaryPoint,
    pub end: BoundaryPoint,
}

impl Excursion {
    pub fn duration(&self) -> f64 {
        self.path.duration()
    }

    pub fn diameter(&self) -> f64 {
        self.path.diameter()
    }
}

/// A finite sample of the excursion point process above the diameter cutoff.
#[derive(Clone, Debug)]
pub struct ExcursionSet {
    pub excursions: Vec<Excursion>,
    pub nu: BoundaryMeasure,
    pub eps_exc: f64,
}

impl ExcursionSet {
    pub fn paths(&self) -> Vec<&TimedPath> {
        self.excursions.iter().map(|e| &e.path).collect()
    }

    pub fn len(&self) -> usize {
        self.excursions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.excursions.is_empty()
    }
}

/// Möbius chart from the upper half-plane onto the disk pinning an ordered
/// endpoint pair: `phi(0) = x`, `phi(∞) = y`, with unit derivative scale at
/// the launch point.
#[derive(Clone, Copy, Debug)]
pub struct ExcursionChart {
    x: Complex64,
    y: Complex64,
    alpha: Complex64,
}

impl ExcursionChart {
    pub fn new(x: BoundaryPoint, y: BoundaryPoint) -> Result<Self> {
        let (px, py) = (x.point(), y.point());
        if (px - py).norm() < 1e-14 {
            return Err(Error::CoincidentPoints);
        }
        // Third boundary point, midpoint of the complementary arc, used to
        // rotate the image line onto the real axis.
        let mid = 0.5 * (x.angle() + y.angle()) + PI;
        let b0 = Complex64::from_polar(1.0, mid);
        let c = |z: Complex64| (z - px) / (z - py);
        let mut alpha = 1.0 / c(b0);
        // Orient the interior into the upper half-plane.
        if (alpha * c(Complex64::new(0.0, 0.0))).im < 0.0 {
            alpha = -alpha;
        }
        // Normalize the derivative scale at the launch endpoint.
        alpha *= (px - py).norm() / alpha.norm();
        Ok(ExcursionChart { x: px, y: py, alpha })
    }

    /// Map a half-plane point into the disk.
    pub fn phi(&self, w: Complex64) -> Complex64 {
        (self.y * w - self.alpha * self.x) / (w - self.alpha)
    }

    pub fn phi_deriv(&self, w: Complex64) -> Complex64 {
        let d = w - self.alpha;
        self.alpha * (self.x - self.y) / (d * d)
    }
}

/// Sample a Brownian excursion between distinct boundary points.
///
/// `step` is the base half-plane clock increment; the disk-side sampling
/// resolution is `sqrt(step)`.
pub fn sample_excursion<R: Rng>(
    x: BoundaryPoint,
    y: BoundaryPoint,
    step: f64,
    rng: &mut R,
) -> Result<Excursion> {
    assert!(step > 0.0, "step must be positive");
    let chart = ExcursionChart::new(x, y)?;
    let delta = step.sqrt();
    let max_points = 50_000_000usize;

    let mut points = vec![chart.x];
    let mut times = vec![0.0];
    let mut re = 0.0f64; // driftless horizontal part
    let mut v = [0.0f64; 3]; // 3d Brownian motion; |v| is the Bessel(3) part
    let mut t = 0.0f64;
    let normal = Normal::new(0.0, 1.0).unwrap();

    loop {
        let w = Complex64::new(re, (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt());
        let scale = chart.phi_deriv(w).norm().max(1e-300);
        let dt = step / (scale * scale);
        let sd = dt.sqrt();
        re += sd * normal.sample(rng);
        for vi in v.iter_mut() {
            *vi += sd * normal.sample(rng);
        }
        t += dt;
        let w = Complex64::new(re, (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt());
        let z = chart.phi(w);
        let done = (z - chart.y).norm() <= delta || points.len() >= max_points;
        if done {
            points.push(chart.y);
            times.push(t);
            break;
        }
        points.push(z);
        times.push(t);
    }

    Ok(Excursion {
        path: TimedPath { points, times },
        start: x,
        end: y,
    })
}

/// Sample an approximate Brownian bubble at `x` above diameter `eps_exc`:
/// an excursion between the `±δ`-shifted endpoints, resampled until its
/// diameter exceeds the cutoff.
pub fn sample_bubble<R: Rng>(
    x: BoundaryPoint,
    eps_exc: f64,
    delta_shift: f64,
    step: f64,
    max_attempts: usize,
    rng: &mut R,
) -> Result<Excursion> {
    let a = BoundaryPoint::from_angle(x.angle() - delta_shift);
    let b = BoundaryPoint::from_angle(x.angle() + delta_shift);
    for _ in 0..max_attempts {
        let (s, e) = if rng.gen::<bool>() { (a, b) } else { (b, a) };
        let exc = sample_excursion(s, e, step, rng)?;
        if exc.diameter() > eps_exc {
            return Ok(exc);
        }
    }
    Err(Error::BubbleRejection {
        eps_exc,
        attempts: max_attempts,
    })
}

/// Empirical estimate of the bubble intensity above `eps_exc` at `x`: the
/// boundary-kernel mass of the shifted pair times the acceptance rate. The
/// raw acceptance rate vanishes like `δ^2`; this scaled quantity is the
/// limit object and stabilizes as `δ` shrinks.
pub fn bubble_mass_estimate<R: Rng>(
    x: BoundaryPoint,
    eps_exc: f64,
    delta_shift: f64,
    step: f64,
    trials: usize,
    rng: &mut R,
) -> Result<f64> {
    let a = BoundaryPoint::from_angle(x.angle() - delta_shift);
    let b = BoundaryPoint::from_angle(x.angle() + delta_shift);
    let mut hits = 0usize;
    for _ in 0..trials {
        let exc = sample_excursion(a, b, step, rng)?;
        if exc.diameter() > eps_exc {
            hits += 1;
        }
    }
    Ok(boundary_poisson(a, b)? * hits as f64 / trials as f64)
}

/// Endpoint-pair sampler for the excursion process: the boundary measure is
/// discretized into angle bins (atoms kept exact), pair weights are the
/// boundary Poisson kernel mass, and the same-bin diagonal of the density
/// part is excluded (its retained mass above any fixed cutoff is negligible
/// at this bin width).
pub struct PairSampler {
    /// bin centers (measure chart); atoms appended after density bins
    centers: Vec<f64>,
    /// bin half-widths; zero for atom bins
    half_widths: Vec<f64>,
    /// bin masses
    masses: Vec<f64>,
    /// number of density bins (atoms follow)
    n_density: usize,
    /// marginal cumulative weights over ordered bin pairs
    marginal_cdf: Vec<f64>,
    /// total pair intensity (unordered pairs, distinct bins) plus
    /// same-atom bubble intensities
    pub total_pairs: f64,
    /// bubble intensity per atom index (into `centers[n_density..]`)
    bubble_intensity: Vec<f64>,
}

pub const PAIR_BINS: usize = 4096;

impl PairSampler {
    /// Build the sampler; `bubble_mass[i]` is the estimated
    /// `μ_{x,x}(diam > ε)` of the `i`-th atom of `nu`, so the same-atom
    /// Poisson intensity is `massᵢ² · bubble_mass[i] / 2`.
    pub fn new(nu: &BoundaryMeasure, bubble_mass: &[f64]) -> Result<Self> {
        nu.validate_left_supported()?;
        let n = PAIR_BINS;
        let lo = LEFT_ARC_LO;
        let hi = LEFT_ARC_HI;
        let w = (hi - lo) / n as f64;
        let mut centers = Vec::with_capacity(n + nu.atoms().len());
        let mut half_widths = Vec::with_capacity(n + nu.atoms().len());
        let mut masses = Vec::with_capacity(n + nu.atoms().len());
        for k in 0..n {
            let a = lo + k as f64 * w;
            let b = a + w;
            centers.push(0.5 * (a + b));
            half_widths.push(0.5 * w);
            // density-only mass of the bin
            let dens: f64 = nu.pieces().iter().map(|p| p.mass_between(a, b)).sum();
            masses.push(dens.max(0.0));
        }
        let n_density = n;
        let mut bubble_intensity = Vec::new();
        for (k, atom) in nu.atoms().iter().enumerate() {
            centers.push(atom.theta);
            half_widths.push(0.0);
            masses.push(atom.mass);
            let est = bubble_mass.get(k).copied().unwrap_or(0.0);
            bubble_intensity.push(0.5 * atom.mass * atom.mass * est.max(0.0));
        }

        let m = centers.len();
        let mut marginal = vec![0.0; m];
        let mut total = 0.0;
        for i in 0..m {
            if masses[i] == 0.0 {
                continue;
            }
            let mut row = 0.0;
            for j in 0..m {
                if j == i || masses[j] == 0.0 {
                    continue;
                }
                row += pair_weight(&centers, &masses, i, j);
            }
            marginal[i] = row;
            total += row;
        }
        total *= 0.5; // each unordered pair counted from both sides
        let mut marginal_cdf = vec![0.0; m];
        let mut acc = 0.0;
        for i in 0..m {
            acc += marginal[i];
            marginal_cdf[i] = acc;
        }
        let bubbles: f64 = bubble_intensity.iter().sum();
        Ok(PairSampler {
            centers,
            half_widths,
            masses,
            n_density,
            marginal_cdf,
            total_pairs: total + bubbles,
            bubble_intensity,
        })
    }

    /// Expected number of process draws (before diameter thinning), i.e. the
    /// total discretized pair intensity including bubbles.
    pub fn mean_count(&self) -> f64 {
        self.total_pairs
    }

    /// Draw one endpoint pair. Returns `None` for a same-atom bubble draw,
    /// identified by its atom boundary point.
    fn sample_pair<R: Rng>(&self, rng: &mut R) -> PairDraw {
        let bubble_total: f64 = self.bubble_intensity.iter().sum();
        let pick: f64 = rng.gen_range(0.0..self.total_pairs.max(1e-300));
        if pick < bubble_total {
            let mut acc = 0.0;
            for (k, b) in self.bubble_intensity.iter().enumerate() {
                acc += b;
                if pick < acc {
                    let theta = self.centers[self.n_density + k];
                    return PairDraw::Bubble(BoundaryPoint::from_measure_angle(theta));
                }
            }
        }
        // marginal bin
        let u: f64 = rng.gen_range(0.0..*self.marginal_cdf.last().unwrap());
        let i = match self
            .marginal_cdf
            .binary_search_by(|x| x.partial_cmp(&u).unwrap())
        {
            Ok(k) => k + 1,
            Err(k) => k,
        }
        .min(self.centers.len() - 1);
        // conditional row
        let m = self.centers.len();
        let mut row = Vec::with_capacity(m);
        let mut acc = 0.0;
        for j in 0..m {
            let w = if j == i || self.masses[j] == 0.0 {
                0.0
            } else {
                pair_weight(&self.centers, &self.masses, i, j)
            };
            acc += w;
            row.push(acc);
        }
        let u2: f64 = rng.gen_range(0.0..acc);
        let j = match row.binary_search_by(|x| x.partial_cmp(&u2).unwrap()) {
            Ok(k) => k + 1,
            Err(k) => k,
        }
        .min(m - 1);
        let ti = self.jitter(i, rng);
        let tj = self.jitter(j, rng);
        // orientation coin: excursion measures are reversible
        if rng.gen::<bool>() {
            PairDraw::Pair(
                BoundaryPoint::from_measure_angle(ti),
                BoundaryPoint::from_measure_angle(tj),
            )
        } else {
            PairDraw::Pair(
                BoundaryPoint::from_measure_angle(tj),
                BoundaryPoint::from_measure_angle(ti),
            )
        }
    }

    fn jitter<R: Rng>(&self, i: usize, rng: &mut R) -> f64 {
        if self.half_widths[i] == 0.0 {
            self.centers[i]
        } else {
            rng.gen_range(self.centers[i] - self.half_widths[i]..self.centers[i] + self.half_widths[i])
        }
    }
}

enum PairDraw {
    Pair(BoundaryPoint, BoundaryPoint),
    Bubble(BoundaryPoint),
}

fn pair_weight(centers: &[f64], masses: &[f64], i: usize, j: usize) -> f64 {
    let xi = BoundaryPoint::from_measure_angle(centers[i]).point();
    let xj = BoundaryPoint::from_measure_angle(centers[j]).point();
    masses[i] * masses[j] / (PI * (xi - xj).norm_sqr())
}

/// Parameters of the excursion process sampler.
#[derive(Clone, Copy, Debug)]
pub struct ProcessParams {
    /// diameter cutoff for retained excursions
    pub eps_exc: f64,
    /// half-plane clock step of the path sampler
    pub step: f64,
    /// endpoint shift of the bubble approximation
    pub bubble_delta: f64,
    /// rejection budget per bubble
    pub bubble_attempts: usize,
    /// trials used to estimate each atom's bubble intensity
    pub bubble_trials: usize,
}

impl Default for ProcessParams {
    fn default() -> Self {
        ProcessParams {
            eps_exc: 0.1,
            step: 4e-4,
            bubble_delta: 1e-3,
            bubble_attempts: 20_000_000,
            bubble_trials: 4000,
        }
    }
}

/// Sample the excursion point process `Ξ_{ν}` retained above the diameter
/// cutoff. The number of draws is Poisson with the discretized pair
/// intensity; every drawn path is kept iff its diameter exceeds
/// `params.eps_exc`.
pub fn sample_process<R: Rng>(
    nu: &BoundaryMeasure,
    params: &ProcessParams,
    rng: &mut R,
) -> Result<ExcursionSet> {
    if nu.is_zero() {
        return Ok(ExcursionSet {
            excursions: vec![],
            nu: nu.clone(),
            eps_exc: params.eps_exc,
        });
    }
    let estimates = estimate_bubble_masses(nu, params, rng)?;
    let sampler = PairSampler::new(nu, &estimates)?;
    sample_process_with(&sampler, nu, params, rng)
}

/// Monte Carlo estimates of `μ_{x,x}(diam > ε)` for every atom of `nu`.
pub fn estimate_bubble_masses<R: Rng>(
    nu: &BoundaryMeasure,
    params: &ProcessParams,
    rng: &mut R,
) -> Result<Vec<f64>> {
    nu.atoms()
        .iter()
        .map(|a| {
            bubble_mass_estimate(
                BoundaryPoint::from_measure_angle(a.theta),
                params.eps_exc,
                params.bubble_delta,
                params.step,
                params.bubble_trials,
                rng,
            )
        })
        .collect()
}

/// Same as [`sample_process`] with a prebuilt [`PairSampler`], so batch
/// experiments amortize the discretization.
pub fn sample_process_with<R: Rng>(
    sampler: &PairSampler,
    nu: &BoundaryMeasure,
    params: &ProcessParams,
    rng: &mut R,
) -> Result<ExcursionSet> {
    let mut excursions = Vec::new();
    if sampler.total_pairs > 0.0 {
        let n = Poisson::new(sampler.total_pairs).unwrap().sample(rng) as usize;
        for _ in 0..n {
            match sampler.sample_pair(rng) {
                PairDraw::Pair(x, y) => {
                    let exc = sample_excursion(x, y, params.step, rng)?;
                    if retained(&exc, params.eps_exc) {
                        excursions.push(exc);
                    }
                }
                PairDraw::Bubble(x) => {
                    // intensity already restricted to diameter > eps_exc
                    match sample_bubble(
                        x,
                        params.eps_exc,
                        params.bubble_delta,
                        params.step,
                        params.bubble_attempts,
                        rng,
                    ) {
                        Ok(exc) => excursions.push(exc),
                        Err(e @ Error::BubbleRejection { .. }) => return Err(e),
                        Err(e) => return Err(e),
                    }
                }
            }
        }
    }
    Ok(ExcursionSet {
        excursions,
        nu: nu.clone(),
        eps_exc: params.eps_exc,
    })
}

pub(crate) fn retained(exc: &Excursion, eps: f64) -> bool {
    // cheap bounding-box bounds first, exact hull diameter in the margin
    let (mut xmin, mut xmax, mut ymin, mut ymax) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for p in &exc.path.points {
        xmin = xmin.min(p.re);
        xmax = xmax.max(p.re);
        ymin = ymin.min(p.im);
        ymax = ymax.max(p.im);
    }
    let w = xmax - xmin;
    let h = ymax - ymin;
    if w.max(h) > eps {
        return true;
    }
    if (w * w + h * h).sqrt() <= eps {
        return false;
    }
    exc.diameter() > eps
}

/// Distance from a disk point to the closed left arc.
pub fn dist_to_left_arc(z: Complex64) -> f64 {
    let m = BoundaryPoint::from_angle(z.arg()).measure_angle();
    if (LEFT_ARC_LO..=LEFT_ARC_HI).contains(&m) {
        (1.0 - z.norm()).abs()
    } else {
        let di = (z - Complex64::i()).norm();
        let dmi = (z + Complex64::i()).norm();
        di.min(dmi)
    }
}

/// The three-piece Markovian decomposition of a path at the inner region
/// `D_ε = {dist(·, A_L) > ε}`.
#[derive(Clone, Debug)]
pub struct SliceTriple {
    pub first: TimedPath,
    pub middle: TimedPath,
    pub last: TimedPath,
    /// first entry point into the inner region
    pub entry: Complex64,
    /// last exit point from the inner region
    pub exit: Complex64,
}

impl SliceTriple {
    /// Reassemble the original point list exactly (shared junction points
    /// appear once).
    pub fn concatenate(&self) -> Vec<Complex64> {
        let mut pts = self.first.points.clone();
        pts.extend_from_slice(&self.middle.points[1..]);
        pts.extend_from_slice(&self.last.points[1..]);
        pts
    }
}

/// Split an excursion at its first and last visit to `D_ε`.
pub fn markov_slices(exc: &Excursion, eps: f64) -> Result<SliceTriple> {
    let pts = &exc.path.points;
    let times = &exc.path.times;
    let mut kf = None;
    let mut kl = None;
    for (k, p) in pts.iter().enumerate() {
        if dist_to_left_arc(*p) > eps {
            if kf.is_none() {
                kf = Some(k);
            }
            kl = Some(k);
        }
    }
    let (kf, kl) = match (kf, kl) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::NoSlice),
    };
    let kf = kf.max(1).min(pts.len() - 1);
    let kl = kl.max(kf).min(pts.len() - 1);
    let sub = |a: usize, b: usize| -> TimedPath {
        let t0 = times[a];
        TimedPath {
            points: pts[a..=b].to_vec(),
            times: times[a..=b].iter().map(|t| t - t0).collect(),
        }
    };
    Ok(SliceTriple {
        first: sub(0, kf),
        middle: sub(kf, kl),
        last: sub(kl, pts.len() - 1),
        entry: pts[kf],
        exit: pts[kl],
    })
}

/// The assignment metric between finite sets of timed paths: infinity when
/// cardinalities differ, otherwise the minimum over bijections of the
/// summed duration gap plus time-rescaled sup distance, solved exactly.
pub fn d_curves(s1: &[&TimedPath], s2: &[&TimedPath]) -> f64 {
    if s1.len() != s2.len() {
        return f64::INFINITY;
    }
    let n = s1.len();
    if n == 0 {
        return 0.0;
    }
    let mut cost = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            cost[i * n + j] = pair_cost(s1[i], s2[j]);
        }
    }
    let (_, total) = min_cost_assignment(&cost, n);
    total
}

/// `|T_γ - T_σ| + sup_s |γ(s T_γ) - σ(s T_σ)|`; the sup over normalized
/// time of the difference of two polylines is attained on the merged set of
/// their normalized breakpoints.
pub fn pair_cost(a: &TimedPath, b: &TimedPath) -> f64 {
    let (ta, tb) = (a.duration(), b.duration());
    let mut sup: f64 = 0.0;
    let eval = |s: f64| (a.at_normalized(s) - b.at_normalized(s)).norm();
    for t in &a.times {
        let s = if ta > 0.0 { t / ta } else { 0.0 };
        sup = sup.max(eval(s));
    }
    for t in &b.times {
        let s = if tb > 0.0 { t / tb } else { 0.0 };
        sup = sup.max(eval(s));
    }
    (ta - tb).abs() + sup
}

/// Exact diameter of a point cloud: Andrew monotone-chain hull followed by
/// rotating calipers.
pub fn polyline_diameter(points: &[Complex64]) -> f64 {
    if points.len() < 2 {
        return 0.0;
    }
    let mut pts: Vec<(f64, f64)> = points.iter().map(|p| (p.re, p.im)).collect();
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    if pts.len() == 1 {
        return 0.0;
    }
    let cross = |o: (f64, f64), a: (f64, f64), b: (f64, f64)| {
        (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
    };
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(2 * pts.len());
    for &p in &pts {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower_len = hull.len() + 1;
    for &p in pts.iter().rev() {
        while hull.len() >= lower_len && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0
        {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    let h = hull.len();
    if h == 1 {
        return 0.0;
    }
    let d2 = |a: (f64, f64), b: (f64, f64)| {
        let dx = a.0 - b.0;
        let dy = a.1 - b.1;
        dx * dx + dy * dy
    };
    if h == 2 {
        return d2(hull[0], hull[1]).sqrt();
    }
    // rotating calipers
    let mut best = 0.0f64;
    let mut j = 1;
    for i in 0..h {
        let ni = (i + 1) % h;
        loop {
            let nj = (j + 1) % h;
            let edge = (hull[ni].0 - hull[i].0, hull[ni].1 - hull[i].1);
            let da = (hull[nj].0 - hull[j].0, hull[nj].1 - hull[j].1);
            // advance while the antipodal point keeps moving away
            if edge.0 * da.1 - edge.1 * da.0 > 0.0 {
                j = nj;
            } else {
                break;
            }
        }
        best = best.max(d2(hull[i], hull[j]));
        best = best.max(d2(hull[ni], hull[j]));
    }
    best.sqrt()
}

#[cfg(test)]
mod tests;
