//! Level-line verification layer: the harmonic boundary data seen from a
//! point along a growing curve, conformal-radius time, the measure drift of
//! the driving function, the dyadic piecewise-constant approximation of a
//! boundary measure, and the martingale statistics connecting them.
//!
//! The curve state is tracked in half-plane coordinates by integrating the
//! Loewner flow `dg = 2dt/(g - ξ)` (and its derivative flow) on a fixed
//! quadrature mesh of the boundary measure, so boundary data, conformal
//! radius and drift all come from the same state with no Monte Carlo noise.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::kernel::{
    conformal_radius_disk, psi0, psi0_deriv, psi0_inv, psi0_inv_deriv, BoundaryPoint,
    HalfPlanePoint, LEFT_ARC_HI, LEFT_ARC_LO, PI,
};
use crate::loewner::{DrivingFunction, Unzipped};
use crate::measure::{BoundaryMeasure, PolyPiece};
use crate::quad;

/// The height gap constant of level lines, `λ = sqrt(π/8)`; fixed.
pub fn lambda() -> f64 {
    (PI / 8.0).sqrt()
}

/// Fixed quadrature plan of a boundary measure: nodes on the left arc with
/// weights combining Gauss–Legendre panels against the density and exact
/// atoms.
#[derive(Clone, Debug)]
pub struct MeasureQuad {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl MeasureQuad {
    pub fn new(nu: &BoundaryMeasure, panels_per_piece: usize) -> Self {
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for p in nu.pieces() {
            for k in 0..panels_per_piece {
                let a = p.theta_lo + (p.theta_hi - p.theta_lo) * k as f64 / panels_per_piece as f64;
                let b = p.theta_lo
                    + (p.theta_hi - p.theta_lo) * (k + 1) as f64 / panels_per_piece as f64;
                for (x, w) in quad::gl16_nodes(a, b) {
                    nodes.push(x);
                    weights.push(w * p.eval(x));
                }
            }
        }
        for a in nu.atoms() {
            nodes.push(a.theta);
            weights.push(a.mass);
        }
        MeasureQuad { nodes, weights }
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Flow state of a chordal curve from `-i`, tracked in half-plane
/// coordinates on the measure's quadrature mesh, optional tracker angles
/// (force points), and interior observation points. The driver history is
/// kept so the boundary map can be replayed exactly at any angle.
pub struct FlowState {
    pub t: f64,
    pub xi: f64,
    /// image of the left prime end of the launch point
    pub v0_minus: f64,
    /// the measure driving the construction
    nu: BoundaryMeasure,
    /// per-step (driver value used, dt) pairs
    history: Vec<(f64, f64)>,
    /// quadrature nodes of the measure
    node_theta: Vec<f64>,
    node_weight: Vec<f64>,
    node_g: Vec<f64>,
    node_gp: Vec<f64>,
    node_alive: Vec<bool>,
    /// additional tracked boundary angles (images behave like force points)
    tracker_g: Vec<f64>,
    /// interior observation points
    int_z: Vec<Complex64>,
    int_w: Vec<Complex64>,
    int_wp: Vec<Complex64>,
    int_alive: Vec<bool>,
}

impl FlowState {
    pub fn new(nu: &BoundaryMeasure, quadr: &MeasureQuad, trackers: &[f64], interior: &[Complex64]) -> Self {
        let node_g: Vec<f64> = quadr
            .nodes
            .iter()
            .map(|&th| half_plane_coord(th))
            .collect();
        let tracker_g: Vec<f64> = trackers.iter().map(|&th| half_plane_coord(th)).collect();
        let int_w: Vec<Complex64> = interior
            .iter()
            .map(|z| psi0(*z).finite().expect("interior point"))
            .collect();
        FlowState {
            t: 0.0,
            xi: 0.0,
            v0_minus: 0.0,
            nu: nu.clone(),
            history: Vec::new(),
            node_theta: quadr.nodes.clone(),
            node_weight: quadr.weights.clone(),
            node_gp: vec![1.0; node_g.len()],
            node_alive: vec![true; node_g.len()],
            node_g,
            tracker_g,
            int_z: interior.to_vec(),
            int_w,
            int_wp: vec![Complex64::new(1.0, 0.0); interior.len()],
            int_alive: vec![true; interior.len()],
        }
    }

    /// Replay the exact slit-map history at a boundary angle. Left-arc
    /// points ride as left prime ends of the growing hull, so the replay is
    /// total; `None` only for the chart pole at `i`.
    pub fn replay_boundary(&self, theta: f64) -> Option<(f64, f64)> {
        let mut g = half_plane_coord(theta);
        if !g.is_finite() {
            return None;
        }
        let mut gp = 1.0;
        for &(xi_used, dt) in &self.history {
            let gap = g - xi_used;
            let root = (gap * gap + 4.0 * dt).sqrt();
            gp *= -gap / root;
            g = xi_used - root;
        }
        Some((g, gp))
    }

    /// Disk-side boundary image `f_t(e^{iθ})` and derivative along the
    /// replayed flow; `θ = π/2` (the target `i`) is pinned exactly.
    fn f_at(&self, theta: f64) -> Option<(Complex64, Complex64)> {
        if (theta - LEFT_ARC_LO).abs() < 1e-14 {
            return Some((Complex64::i(), Complex64::new(1.0, 0.0)));
        }
        let (g, gp) = self.replay_boundary(theta)?;
        let x = BoundaryPoint::from_measure_angle(theta).point();
        let gc = Complex64::new(g, 0.0);
        let fx = psi0_inv(gc);
        let fpx = psi0_inv_deriv(gc) * gp * psi0_deriv(x);
        Some((fx, fpx))
    }

    /// The swallow frontier: the largest angle of the left arc still
    /// attached to the surviving component (bisected against the replay).
    pub fn frontier_angle(&self) -> f64 {
        if self.history.is_empty() {
            return LEFT_ARC_HI;
        }
        if self.replay_boundary(LEFT_ARC_HI - 1e-12).is_some() {
            return LEFT_ARC_HI;
        }
        let mut alive = LEFT_ARC_LO + 1e-12;
        let mut dead = LEFT_ARC_HI - 1e-12;
        for _ in 0..60 {
            let mid = 0.5 * (alive + dead);
            if self.replay_boundary(mid).is_some() {
                alive = mid;
            } else {
                dead = mid;
            }
        }
        alive
    }

    /// One step of the Loewner flow: the driver is frozen at its current
    /// value over the step, so every tracked quantity moves by the exact
    /// vertical-slit map `z ↦ ξ + sqrt((z-ξ)² + 4dt)` (left branch on the
    /// left of the driver, with its exact derivative); then the driver
    /// jumps to `xi_new`. Boundary points overtaken by the driver are
    /// marked swallowed.
    pub fn advance(&mut self, xi_new: f64, dt: f64) {
        let xi = self.xi;
        let left_step = |g: f64| -> (f64, f64) {
            let gap = g - xi;
            let root = (gap * gap + 4.0 * dt).sqrt();
            // image and derivative of the slit map at a real point left of
            // the base: e(g) = ξ - root, e'(g) = |gap| / root
            (xi - root, -gap / root)
        };
        for k in 0..self.node_g.len() {
            let (g2, dfac) = left_step(self.node_g[k]);
            self.node_g[k] = g2;
            self.node_gp[k] *= dfac;
        }
        for vk in self.tracker_g.iter_mut() {
            let (g2, _) = left_step(*vk);
            *vk = g2;
        }
        {
            // the hull-base left edge moves by the same left map; the next
            // driver position is irrelevant to it
            let (g2, _) = left_step(self.v0_minus);
            self.v0_minus = g2;
        }
        for k in 0..self.int_w.len() {
            if !self.int_alive[k] {
                continue;
            }
            let w = self.int_w[k];
            let gap = w - xi;
            if gap.norm_sqr() < 16.0 * dt {
                self.int_alive[k] = false;
                continue;
            }
            let root = (gap * gap + 4.0 * dt).sqrt();
            let root = if (root / gap).re < 0.0 { -root } else { root };
            self.int_w[k] = xi + root;
            self.int_wp[k] *= gap / root;
            if self.int_w[k].im <= 0.0 {
                self.int_alive[k] = false;
            }
        }
        self.history.push((xi, dt));
        self.t += dt;
        self.xi = xi_new;
    }

    pub fn tracker_values(&self) -> &[f64] {
        &self.tracker_g
    }

    /// The boundary data `ν_t(z)` seen from tracked interior point `idx`:
    /// the measure integrated against the slit-domain Poisson kernel plus
    /// `2λ` times the harmonic measure of the curve's left side.
    pub fn boundary_data(&self, idx: usize) -> Result<f64> {
        if !self.int_alive[idx] {
            return Err(Error::Swallowed { last_valid: self.t });
        }
        let w = self.int_w[idx];
        let mut acc = 0.0;
        for k in 0..self.node_g.len() {
            if !self.node_alive[k] {
                continue;
            }
            let x = BoundaryPoint::from_measure_angle(self.node_theta[k]).point();
            let dpsi = psi0_deriv(x).norm();
            let h = w.im / ((w - self.node_g[k]).norm_sqr() * PI);
            acc += self.node_weight[k] * dpsi * self.node_gp[k] * h;
        }
        // harmonic measure of [v0_minus, ξ] from w in H
        let hm = harmonic_measure_interval(w, self.v0_minus, self.xi);
        Ok(acc + 2.0 * lambda() * hm)
    }

    /// Conformal-radius time `log CR(z, D) - log CR(z, D \ η[0,t])` of the
    /// tracked interior point.
    pub fn cr_time(&self, idx: usize) -> Result<f64> {
        if !self.int_alive[idx] {
            return Err(Error::Swallowed { last_valid: self.t });
        }
        let z = self.int_z[idx];
        let w = self.int_w[idx];
        let fz = psi0_inv(w);
        let fprime = psi0_inv_deriv(w) * self.int_wp[idx] * psi0_deriv(z);
        let cr_image = conformal_radius_disk(fz)?;
        let cr_base = conformal_radius_disk(z)?;
        // CR(z, D_t) = CR(f(z), D) / |f'(z)|
        Ok((cr_base * fprime.norm() / cr_image).ln())
    }

    /// The measure drift `Z_t` in disk coordinates: the tip factor against
    /// the image of the launch prime end, plus the integral of
    /// `x f'(x) / (e^{iU} - f(x))²` against the measure over the surviving
    /// arc. Since `x f' dθ = -i dQ` for `Q = 1/(e^{iU} - f)`, each density
    /// piece is integrated by parts: exact boundary terms (the boundary map
    /// replayed through the slit history; the swallow frontier contributes
    /// the launch prime end) and an adaptive remainder against the density
    /// derivative. Piecewise-constant measures are therefore evaluated in
    /// closed form up to the map replay itself.
    pub fn drift_z(&self, guard: f64) -> Result<f64> {
        let e_iu = psi0_inv(Complex64::new(self.xi, 0.0));
        let i = Complex64::i();
        let f_launch = psi0_inv(Complex64::new(self.v0_minus, 0.0));
        let denom0 = e_iu - f_launch;
        if denom0.norm() < guard {
            return Err(Error::TipOnBoundary);
        }
        let first = (e_iu - i) * (f_launch - i) / denom0;

        let frontier = self.frontier_angle();
        let q_at = |theta: f64| -> Result<Complex64> {
            let (fx, _) = self.f_at(theta).ok_or(Error::TipOnBoundary)?;
            let denom = e_iu - fx;
            if denom.norm() < guard {
                return Err(Error::TipOnBoundary);
            }
            Ok(Complex64::new(1.0, 0.0) / denom)
        };
        let q_frontier = Complex64::new(1.0, 0.0) / denom0;

        let mut integral = Complex64::new(0.0, 0.0);
        for p in self.nu.pieces() {
            let lo = p.theta_lo;
            let hi = p.theta_hi.min(frontier);
            if hi <= lo {
                continue;
            }
            let q_lo = q_at(lo)?;
            let q_hi = if p.theta_hi <= frontier {
                q_at(hi)?
            } else {
                q_frontier
            };
            // ∫ ρ dQ · (-i) = -i (ρ(hi)Q(hi) - ρ(lo)Q(lo) - ∫ ρ' Q dθ)
            let boundary = p.eval(hi) * q_hi - p.eval(lo) * q_lo;
            let remainder = if p.coeffs.len() <= 1 {
                Complex64::new(0.0, 0.0)
            } else {
                let dr = |theta: f64| -> f64 {
                    // density derivative of the local polynomial
                    let t = theta - p.theta_lo;
                    p.coeffs
                        .iter()
                        .enumerate()
                        .skip(1)
                        .map(|(j, c)| j as f64 * c * t.powi(j as i32 - 1))
                        .sum()
                };
                let re_part = quad::adaptive(
                    &|th: f64| dr(th) * q_at(th).map(|q| q.re).unwrap_or(0.0),
                    lo,
                    hi,
                    1e-10,
                );
                let im_part = quad::adaptive(
                    &|th: f64| dr(th) * q_at(th).map(|q| q.im).unwrap_or(0.0),
                    lo,
                    hi,
                    1e-10,
                );
                Complex64::new(re_part, im_part)
            };
            integral += -i * (boundary - remainder);
        }
        for atom in self.nu.atoms() {
            if atom.theta >= frontier {
                continue;
            }
            let (fx, fpx) = match self.f_at(atom.theta) {
                Some(v) => v,
                None => continue,
            };
            let denom = e_iu - fx;
            if denom.norm() < guard {
                return Err(Error::TipOnBoundary);
            }
            let x = BoundaryPoint::from_measure_angle(atom.theta).point();
            integral += atom.mass * x * fpx / (denom * denom);
        }
        let pref = -i * (e_iu - i) * (e_iu - i) / (2.0 * lambda());
        let z = first + pref * integral;
        Ok(z.re)
    }
}

/// `ψ0` image of a left-arc angle (a real coordinate ≤ 0).
pub fn half_plane_coord(theta_measure: f64) -> f64 {
    let p = BoundaryPoint::from_measure_angle(theta_measure).point();
    match psi0(p) {
        HalfPlanePoint::Finite(w) => w.re,
        HalfPlanePoint::Infinity => f64::NEG_INFINITY,
    }
}

/// Harmonic measure of the real interval `[a, b]` seen from `w` in the
/// upper half-plane.
pub fn harmonic_measure_interval(w: Complex64, a: f64, b: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    (((w.re - a) / w.im).atan() - ((w.re - b) / w.im).atan()) / PI
}

/// The dyadic piecewise-constant approximation of a left-arc measure: the
/// cell adjacent to `-i` is replaced by constant `2λ`, every other cell
/// carries its average density; the force-point parameters come out of the
/// cell averages.
pub struct RhoParams {
    /// cell boundary angles θ_0 = 3π/2 > θ_1 > ... > θ_{n+1} = π/2
    pub cell_bounds: Vec<f64>,
    /// cumulative weights (cell averages over λ, minus 2)
    pub rho_bars: Vec<f64>,
    /// increments ρ_k = ρ̄_k - ρ̄_{k-1}
    pub rhos: Vec<f64>,
    /// force-point angles θ_1..θ_n (measure chart)
    pub force_angles: Vec<f64>,
    /// their half-plane coordinates
    pub force_x: Vec<f64>,
}

pub fn approximate_measure(nu: &BoundaryMeasure, n: usize) -> (BoundaryMeasure, RhoParams) {
    assert!(n >= 1);
    let lam = lambda();
    // θ_k = π/2 + (n+1-k)π/(n+1), k = 0..n+1, decreasing in k
    let bounds: Vec<f64> = (0..=n + 1)
        .map(|k| LEFT_ARC_LO + (n + 1 - k) as f64 * PI / (n + 1) as f64)
        .collect();
    let mut pieces = Vec::with_capacity(n + 1);
    let mut rho_bars = vec![0.0]; // ρ̄_0 = 0 for the 2λ cell
    for k in 0..=n {
        let (hi, lo) = (bounds[k], bounds[k + 1]); // cell (θ_{k+1}, θ_k]
        let sigma = hi - lo;
        let value = if k == 0 {
            2.0 * lam
        } else {
            nu.mass_between(lo + 1e-15, hi) / sigma
        };
        pieces.push(PolyPiece {
            theta_lo: lo,
            theta_hi: hi,
            coeffs: vec![value],
        });
        if k >= 1 {
            rho_bars.push(value / lam - 2.0);
        }
    }
    let rhos: Vec<f64> = (1..=n).map(|k| rho_bars[k] - rho_bars[k - 1]).collect();
    let force_angles: Vec<f64> = (1..=n).map(|k| bounds[k]).collect();
    let force_x: Vec<f64> = force_angles.iter().map(|&t| half_plane_coord(t)).collect();
    (
        BoundaryMeasure {
            atoms: vec![],
            pieces,
        },
        RhoParams {
            cell_bounds: bounds,
            rho_bars,
            rhos,
            force_angles,
            force_x,
        },
    )
}

/// Wasserstein-1 distance of the normalized measures through their CDFs on
/// the left arc.
pub fn w1_normalized(a: &BoundaryMeasure, b: &BoundaryMeasure, bins: usize) -> f64 {
    let (ma, mb) = (a.total_mass(), b.total_mass());
    if ma == 0.0 || mb == 0.0 {
        return if ma == mb { 0.0 } else { f64::INFINITY };
    }
    let mut acc = 0.0;
    let h = (LEFT_ARC_HI - LEFT_ARC_LO) / bins as f64;
    for k in 0..bins {
        let t = LEFT_ARC_LO + (k as f64 + 0.5) * h;
        let fa = a.mass_between(LEFT_ARC_LO, t) / ma;
        let fb = b.mass_between(LEFT_ARC_LO, t) / mb;
        acc += (fa - fb).abs() * h;
    }
    acc
}

/// One simulated level-line path with its observables recorded per step.
pub struct LevelLineRun {
    pub driver: DrivingFunction,
    /// drift values per step (None when the guard refused)
    pub drift: Vec<Option<f64>>,
    /// accumulated drift integral
    pub drift_integral: Vec<f64>,
    /// per-step away-from-boundary flag
    pub away: Vec<bool>,
    /// per interior point: boundary data ν_t(z) along the path
    pub nu_tracks: Vec<Vec<f64>>,
    /// per interior point: conformal-radius time along the path
    pub cr_tracks: Vec<Vec<f64>>,
}

/// Integrate `dξ = 2 dB + Z_t dt` with the measure drift while tracking the
/// flow mesh and the observation points.
pub fn run_level_line_sde<R: Rng>(
    nu: &BoundaryMeasure,
    interior: &[Complex64],
    t_max: f64,
    dt: f64,
    panels_per_piece: usize,
    guard: f64,
    rng: &mut R,
) -> Result<LevelLineRun> {
    let quadr = MeasureQuad::new(nu, panels_per_piece);
    let mut state = FlowState::new(nu, &quadr, &[], interior);
    let normal = Normal::new(0.0, 1.0).unwrap();
    let n = (t_max / dt).round().max(1.0) as usize;
    let mut driver_xi = vec![0.0];
    let mut times = vec![0.0];
    let mut drift = vec![None];
    let mut drift_integral = vec![0.0];
    let mut away = vec![false];
    let mut nu_tracks: Vec<Vec<f64>> = interior
        .iter()
        .enumerate()
        .map(|(i, _)| vec![state.boundary_data(i).unwrap_or(f64::NAN)])
        .collect();
    let mut cr_tracks: Vec<Vec<f64>> = (0..interior.len())
        .map(|i| vec![state.cr_time(i).unwrap_or(f64::NAN)])
        .collect();

    for _ in 1..=n {
        let z = state.drift_z(guard);
        let (dz, zval, ok) = match z {
            Ok(v) if v.is_finite() => (v * dt, Some(v), true),
            _ => (0.0, None, false),
        };
        let new_xi = state.xi + 2.0 * dt.sqrt() * normal.sample(rng) + dz;
        state.advance(new_xi, dt);
        times.push(state.t);
        driver_xi.push(new_xi);
        drift.push(zval);
        drift_integral.push(drift_integral.last().unwrap() + dz);
        away.push(ok);
        for i in 0..interior.len() {
            nu_tracks[i].push(state.boundary_data(i).unwrap_or(f64::NAN));
            cr_tracks[i].push(state.cr_time(i).unwrap_or(f64::NAN));
        }
    }
    Ok(LevelLineRun {
        driver: DrivingFunction {
            times,
            xi: driver_xi,
            force_tracks: vec![],
        },
        drift,
        drift_integral,
        away,
        nu_tracks,
        cr_tracks,
    })
}

/// Statistics of a martingale test over an ensemble of tracks.
#[derive(Clone, Debug, serde::Serialize)]
pub struct MartingaleReport {
    pub n_paths: usize,
    /// mean of the end-to-end increments
    pub drift_mean: f64,
    /// standard error of the mean increment
    pub drift_se: f64,
    /// quadratic variation over clock increments, averaged over paths
    pub qv_ratio: f64,
}

/// Test a family of processes `values[i]` against their clocks `clocks[i]`:
/// the increment mean should vanish and the quadratic variation should
/// match the clock.
pub fn martingale_test(values: &[Vec<f64>], clocks: &[Vec<f64>]) -> MartingaleReport {
    let n = values.len();
    let mut increments = Vec::with_capacity(n);
    let mut qv_ratios = Vec::with_capacity(n);
    for (vals, clk) in values.iter().zip(clocks.iter()) {
        let finite: Vec<(f64, f64)> = vals
            .iter()
            .zip(clk.iter())
            .filter(|(v, c)| v.is_finite() && c.is_finite())
            .map(|(v, c)| (*v, *c))
            .collect();
        if finite.len() < 2 {
            continue;
        }
        increments.push(finite.last().unwrap().0 - finite[0].0);
        let mut qv = 0.0;
        let mut dclock = 0.0;
        for w in finite.windows(2) {
            qv += (w[1].0 - w[0].0).powi(2);
            dclock += w[1].1 - w[0].1;
        }
        if dclock > 0.0 {
            qv_ratios.push(qv / dclock);
        }
    }
    let m = increments.len().max(1);
    let mean = increments.iter().sum::<f64>() / m as f64;
    let var = increments
        .iter()
        .map(|x| (x - mean).powi(2))
        .sum::<f64>()
        / (m as f64 - 1.0).max(1.0);
    MartingaleReport {
        n_paths: increments.len(),
        drift_mean: mean,
        drift_se: (var / m as f64).sqrt(),
        qv_ratio: qv_ratios.iter().sum::<f64>() / qv_ratios.len().max(1) as f64,
    }
}

/// Conformal-radius time of a point along an unzipped curve (zipper-map
/// composition route).
pub fn cr_time_of_unzipped(unz: &Unzipped, z: Complex64) -> Result<f64> {
    let w0 = psi0(z)
        .finite()
        .ok_or(Error::Swallowed { last_valid: 0.0 })?;
    let (w, wp) = unz
        .map_point_with_deriv(w0)
        .ok_or(Error::Swallowed { last_valid: 0.0 })?;
    let fz = psi0_inv(w);
    let fprime = psi0_inv_deriv(w) * wp * psi0_deriv(z);
    Ok((conformal_radius_disk(z)? * fprime.norm() / conformal_radius_disk(fz)?).ln())
}

/// Exit records of walk-on-spheres runs from a point in the slit disk; the
/// boundary-data functional is applied afterwards, so two measures can be
/// evaluated on identical walks (exact linearity of the measure part).
pub struct WosExits {
    /// exit angle on the circle (measure chart), when the walk ended there
    pub circle_exits: Vec<f64>,
    pub curve_left: usize,
    pub curve_right: usize,
    pub total: usize,
}

impl WosExits {
    /// `∫ H dν` estimate: density part from circle exits, atoms through an
    /// angular window of half-width `window`.
    pub fn apply_measure(&self, nu: &BoundaryMeasure, window: f64) -> f64 {
        let mut acc = 0.0;
        for &theta in &self.circle_exits {
            acc += nu.density_at(theta);
        }
        let mut atom_acc = 0.0;
        for a in nu.atoms() {
            let hits = self
                .circle_exits
                .iter()
                .filter(|t| (**t - a.theta).abs() < window)
                .count();
            atom_acc += a.mass * hits as f64 / window / 2.0;
        }
        (acc + atom_acc) / self.total as f64
    }

    pub fn left_fraction(&self) -> f64 {
        self.curve_left as f64 / self.total as f64
    }
}

/// Walk-on-spheres exits from `z` in the disk slit by a curve polyline,
/// with side labeling against the local curve direction.
pub fn wos_exits<R: Rng>(
    curve: &[Complex64],
    z: Complex64,
    walks: usize,
    rng: &mut R,
) -> WosExits {
    let shell = 1e-5;
    let seg_info = |p: Complex64| -> (f64, usize, f64) {
        let mut best = f64::MAX;
        let mut arg = 0usize;
        let mut tpar = 0.0;
        for (i, w) in curve.windows(2).enumerate() {
            let (a, b) = (w[0], w[1]);
            let ab = b - a;
            let len2 = ab.norm_sqr().max(1e-300);
            let t = (((p - a).re * ab.re + (p - a).im * ab.im) / len2).clamp(0.0, 1.0);
            let d = (p - (a + ab * t)).norm();
            if d < best {
                best = d;
                arg = i;
                tpar = t;
            }
        }
        (best, arg, tpar)
    };
    let mut out = WosExits {
        circle_exits: Vec::new(),
        curve_left: 0,
        curve_right: 0,
        total: walks,
    };
    for _ in 0..walks {
        let mut p = z;
        for _ in 0..200_000 {
            let dcirc = 1.0 - p.norm();
            let (dcurve, seg, _) = if curve.len() >= 2 {
                seg_info(p)
            } else {
                (f64::MAX, 0, 0.0)
            };
            let d = dcirc.min(dcurve);
            if d <= shell {
                if dcurve < dcirc {
                    let a = curve[seg];
                    let b = curve[seg + 1];
                    let dirv = b - a;
                    let cr = dirv.re * (p - a).im - dirv.im * (p - a).re;
                    if cr > 0.0 {
                        out.curve_left += 1;
                    } else {
                        out.curve_right += 1;
                    }
                } else {
                    out.circle_exits
                        .push(BoundaryPoint::from_angle(p.arg()).measure_angle());
                }
                break;
            }
            let ang = rng.gen_range(0.0..2.0 * PI);
            p += Complex64::from_polar(d * (1.0 - 1e-12), ang);
        }
    }
    out
}

/// Boundary data `ν_t(z)` by walk-on-spheres: measure part plus `2λ` times
/// the left-side mass.
pub fn boundary_data_wos<R: Rng>(
    nu: &BoundaryMeasure,
    curve: &[Complex64],
    z: Complex64,
    walks: usize,
    rng: &mut R,
) -> Result<f64> {
    if curve.iter().any(|p| (p - z).norm() < 1e-9) {
        return Err(Error::CoincidentPoints);
    }
    let exits = wos_exits(curve, z, walks, rng);
    Ok(exits.apply_measure(nu, 0.05) + 2.0 * lambda() * exits.left_fraction())
}

/// Finite force spec equivalent to the dyadic approximation's drift.
pub fn sle4_force_spec(params: &RhoParams) -> crate::loewner::ForceSpec {
    crate::loewner::ForceSpec {
        points: params
            .force_x
            .iter()
            .zip(params.rhos.iter())
            .map(|(&x, &r)| (x, r))
            .collect(),
    }
}

/// Constant `a` on the left arc, as a measure.
pub fn constant_measure(a: f64) -> BoundaryMeasure {
    BoundaryMeasure::constant_on_left_arc(a)
}
