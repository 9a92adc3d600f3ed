//! Coupling of excursion processes across a family of boundary measures.
//!
//! Paths that reach the inner region `D_ε` factor through the Markovian
//! decomposition: endpoint pairs `(z, w)` on the inner boundary carry a
//! product intensity, the middle slice between them is an interior-to-
//! interior excursion of the disk, and the two outer slices only see the
//! measure through the kernel-weighted endpoint mass. The coupling keeps one
//! shared middle-slice configuration and one shared uniform; a member whose
//! density ratio `Y_n` clears the uniform reuses the middle slices verbatim
//! and only re-transports its outer slices through the quantile map of its
//! own measure.
//!
//! The boundary Poisson kernel of the tube `{dist(·, A_L) < ε}` has no
//! closed form; it is replaced here by the kernel of the conformally
//! equivalent log-chart rectangle (a sine series), which differs from the
//! true tube only in the two ε-sized corner caps at `±i`. The surrogate is
//! used consistently for sampling and for the density ratios, so the
//! rejection coupling is exact for the process as implemented.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::Result;
use crate::kernel::{psi0, BoundaryPoint, LEFT_ARC_HI, LEFT_ARC_LO, PI};
use crate::measure::BoundaryMeasure;

use super::{sample_excursion, ProcessParams, TimedPath};

/// Inner-boundary bins of the middle-slice endpoint discretization.
pub const INNER_BINS: usize = 256;
/// Boundary bins of the quantile transport.
pub const QUANTILE_BINS: usize = 4096;

/// Series kernel between the left arc and the inner boundary of the tube
/// `{z : dist(z, A_L) < ε}`, computed in the log chart where the tube minus
/// its corner caps is the rectangle `(log(1-ε), 0) × (π/2, 3π/2)`.
pub struct InnerKernel {
    pub eps: f64,
    width: f64,
    k_max: usize,
    /// angles (measure chart) of the inner-boundary bin centers; the inner
    /// boundary is approximated by the arc of radius `1-ε`
    pub inner_angles: Vec<f64>,
    /// arc length of one inner bin
    pub inner_bin_len: f64,
    /// boundary x-bin centers on the left arc
    pub x_angles: Vec<f64>,
    x_bin_width: f64,
    /// kernel values `h[z_bin * QUANTILE_BINS + x_bin]`
    h: Vec<f64>,
}

impl InnerKernel {
    pub fn new(eps: f64) -> Self {
        assert!(eps > 0.0 && eps < 1.0, "eps must be in (0,1)");
        let width = -(1.0 - eps).ln();
        // truncation: terms decay like k e^{-k width}
        let k_max = ((36.0 / width).ceil() as usize).clamp(8, 40_000);
        let arc = LEFT_ARC_HI - LEFT_ARC_LO;
        let inner_angles: Vec<f64> = (0..INNER_BINS)
            .map(|k| LEFT_ARC_LO + arc * (k as f64 + 0.5) / INNER_BINS as f64)
            .collect();
        let x_bin_width = arc / QUANTILE_BINS as f64;
        let x_angles: Vec<f64> = (0..QUANTILE_BINS)
            .map(|k| LEFT_ARC_LO + arc * (k as f64 + 0.5) / QUANTILE_BINS as f64)
            .collect();
        let mut kernel = InnerKernel {
            eps,
            width,
            k_max,
            inner_angles,
            inner_bin_len: (1.0 - eps) * arc / INNER_BINS as f64,
            x_angles,
            x_bin_width,
            h: Vec::new(),
        };
        // sin tables: sin(k (θ - π/2)) for every bin center
        let mut h = vec![0.0; INNER_BINS * QUANTILE_BINS];
        let sin_x: Vec<Vec<f64>> = kernel
            .x_angles
            .iter()
            .map(|t| (1..=k_max).map(|k| ((t - LEFT_ARC_LO) * k as f64).sin()).collect())
            .collect();
        for (zi, phi) in kernel.inner_angles.iter().enumerate() {
            let sin_z: Vec<f64> = (1..=k_max)
                .map(|k| ((phi - LEFT_ARC_LO) * k as f64).sin())
                .collect();
            let coef: Vec<f64> = (1..=k_max)
                .map(|k| {
                    let kw = k as f64 * width;
                    k as f64 / kw.sinh()
                })
                .collect();
            for (xi, sx) in sin_x.iter().enumerate() {
                let mut acc = 0.0;
                for k in 0..k_max {
                    acc += coef[k] * sin_z[k] * sx[k];
                }
                // conformal weights of the log chart: 1 on the unit circle,
                // 1/(1-eps) on the inner arc
                // clamp series truncation noise; the kernel is positive
                h[zi * QUANTILE_BINS + xi] = ((2.0 / PI) * acc / (1.0 - eps)).max(0.0);
            }
        }
        kernel.h = h;
        kernel
    }

    /// Kernel between an arbitrary left-arc angle and an inner bin, by the
    /// same series (used for atoms).
    pub fn kernel_at(&self, theta_x: f64, z_bin: usize) -> f64 {
        let phi = self.inner_angles[z_bin];
        let mut acc = 0.0;
        for k in 1..=self.k_max {
            let kf = k as f64;
            acc += kf / (kf * self.width).sinh()
                * ((phi - LEFT_ARC_LO) * kf).sin()
                * ((theta_x - LEFT_ARC_LO) * kf).sin();
        }
        ((2.0 / PI) * acc / (1.0 - self.eps)).max(0.0)
    }

    pub fn kernel_bin(&self, z_bin: usize, x_bin: usize) -> f64 {
        self.h[z_bin * QUANTILE_BINS + x_bin]
    }

    /// Inner-boundary point of a bin (on the arc of radius `1-ε`), jittered
    /// within the bin.
    pub fn inner_point<R: Rng>(&self, z_bin: usize, rng: &mut R) -> Complex64 {
        let arc = LEFT_ARC_HI - LEFT_ARC_LO;
        let half = 0.5 * arc / INNER_BINS as f64;
        let phi = self.inner_angles[z_bin] + rng.gen_range(-half..half);
        Complex64::from_polar(1.0 - self.eps, phi)
    }

    /// Kernel-weighted endpoint mass per inner bin: `I(z) = ∫ H(x,z) dν(x)`.
    pub fn intensity(&self, nu: &BoundaryMeasure) -> Vec<f64> {
        let mut out = vec![0.0; INNER_BINS];
        // density bins
        let mut xmass = vec![0.0; QUANTILE_BINS];
        for (xi, t) in self.x_angles.iter().enumerate() {
            let a = t - 0.5 * self.x_bin_width;
            let b = t + 0.5 * self.x_bin_width;
            xmass[xi] = nu.pieces().iter().map(|p| p.mass_between(a, b)).sum();
        }
        for zi in 0..INNER_BINS {
            let mut acc = 0.0;
            for xi in 0..QUANTILE_BINS {
                if xmass[xi] > 0.0 {
                    acc += xmass[xi] * self.kernel_bin(zi, xi);
                }
            }
            for atom in nu.atoms() {
                acc += atom.mass * self.kernel_at(atom.theta, zi);
            }
            out[zi] = acc;
        }
        out
    }

    /// Quantile table of the measure `H(x, z) dν(x)` against each inner bin.
    pub fn quantile_table(&self, nu: &BoundaryMeasure) -> QuantileTable {
        let mut events: Vec<QuantileEvent> = Vec::new();
        for (xi, t) in self.x_angles.iter().enumerate() {
            let a = t - 0.5 * self.x_bin_width;
            let b = t + 0.5 * self.x_bin_width;
            let mass: f64 = nu.pieces().iter().map(|p| p.mass_between(a, b)).sum();
            if mass > 0.0 {
                events.push(QuantileEvent {
                    lo: a,
                    hi: b,
                    mass,
                    x_bin: Some(xi),
                    atom_theta: None,
                });
            }
        }
        for atom in nu.atoms() {
            events.push(QuantileEvent {
                lo: atom.theta,
                hi: atom.theta,
                mass: atom.mass,
                x_bin: None,
                atom_theta: Some(atom.theta),
            });
        }
        // order along the arc from i (θ = π/2) toward -i, matching the
        // arc-from-i convention of the transport
        events.sort_by(|a, b| a.lo.partial_cmp(&b.lo).unwrap());
        let mut cum = vec![0.0; INNER_BINS * events.len()];
        for zi in 0..INNER_BINS {
            let mut acc = 0.0;
            for (ei, ev) in events.iter().enumerate() {
                let k = match ev.x_bin {
                    Some(xi) => self.kernel_bin(zi, xi),
                    None => self.kernel_at(ev.atom_theta.unwrap(), zi),
                };
                acc += ev.mass * k;
                cum[zi * events.len() + ei] = acc;
            }
        }
        QuantileTable { events, cum }
    }
}

#[derive(Clone, Debug)]
struct QuantileEvent {
    lo: f64,
    hi: f64,
    mass: f64,
    x_bin: Option<usize>,
    atom_theta: Option<f64>,
}

/// Inverse-CDF transport of the kernel-weighted measure seen from each
/// inner bin.
pub struct QuantileTable {
    events: Vec<QuantileEvent>,
    /// cumulative kernel-weighted masses, z-major
    cum: Vec<f64>,
}

impl QuantileTable {
    /// Total kernel-weighted mass seen from the bin.
    pub fn total(&self, z_bin: usize) -> f64 {
        let n = self.events.len();
        if n == 0 {
            0.0
        } else {
            self.cum[z_bin * n + n - 1]
        }
    }

    /// The quantile angle `ϑ_{z,ν}(u)`; within a density bin the quantile
    /// interpolates linearly so it varies continuously with the measure.
    pub fn quantile(&self, z_bin: usize, u: f64) -> Option<f64> {
        let n = self.events.len();
        if n == 0 {
            return None;
        }
        let row = &self.cum[z_bin * n..(z_bin + 1) * n];
        let total = row[n - 1];
        if total <= 0.0 {
            return None;
        }
        let target = u.clamp(0.0, 1.0) * total;
        let idx = match row.binary_search_by(|x| x.partial_cmp(&target).unwrap()) {
            Ok(i) => i,
            Err(i) => i.min(n - 1),
        };
        let ev = &self.events[idx];
        let prev = if idx == 0 { 0.0 } else { row[idx - 1] };
        let within = if row[idx] > prev {
            ((target - prev) / (row[idx] - prev)).clamp(0.0, 1.0)
        } else {
            0.5
        };
        Some(ev.lo + (ev.hi - ev.lo) * within)
    }
}

/// One coupled realization for a single boundary measure.
#[derive(Clone, Debug)]
pub struct CoupledMember {
    pub nu: BoundaryMeasure,
    /// whether the middle-slice configuration was reused verbatim from the
    /// reference draw
    pub middle_shared: bool,
    /// full reconstructed paths (outer slice, middle slice, outer slice)
    pub paths: Vec<TimedPath>,
    /// the middle slices alone
    pub middles: Vec<TimedPath>,
}

/// Coupled family at a fixed slice scale ε.
pub struct CoupledFamily {
    pub eps: f64,
    pub reference: CoupledMember,
    pub members: Vec<CoupledMember>,
}

struct SliceDraw {
    z_bin: usize,
    w_bin: usize,
    z: Complex64,
    w: Complex64,
    middle: TimedPath,
    /// shared randomness of the outer slices: uniforms and base excursions
    u_first: f64,
    u_last: f64,
    base_first: TimedPath,
    base_last: TimedPath,
}

/// The middle-slice pair intensity of a measure on the inner bins, with the
/// binned Green's factor.
struct MiddleIntensity {
    /// cumulative over flattened (i, j) pairs
    cum: Vec<f64>,
    total: f64,
}

fn green_table(kernel: &InnerKernel) -> Vec<f64> {
    let b = INNER_BINS;
    let r = 1.0 - kernel.eps;
    let mut g = vec![0.0; b * b];
    for i in 0..b {
        let zi = Complex64::from_polar(r, kernel.inner_angles[i]);
        for j in 0..b {
            g[i * b + j] = if i == j {
                // bin-averaged Green's function on the diagonal:
                // E[-ln|U-V|] over one bin of length L is 3/2 - ln L
                let reg = (1.0 - r * r).ln();
                (reg + 1.5 - kernel.inner_bin_len.ln()) / (2.0 * PI)
            } else {
                let zj = Complex64::from_polar(r, kernel.inner_angles[j]);
                let num = (Complex64::new(1.0, 0.0) - zi.conj() * zj).norm();
                (num / (zi - zj).norm()).ln() / (2.0 * PI)
            };
        }
    }
    g
}

fn middle_intensity(intens: &[f64], green: &[f64], bin_len: f64) -> MiddleIntensity {
    let b = INNER_BINS;
    let mut cum = vec![0.0; b * b];
    let mut acc = 0.0;
    for i in 0..b {
        for j in 0..b {
            let w = 0.5 * intens[i] * intens[j] * green[i * b + j] * bin_len * bin_len;
            acc += w.max(0.0);
            cum[i * b + j] = acc;
        }
    }
    MiddleIntensity { cum, total: acc }
}

fn sample_pair_bins<R: Rng>(mi: &MiddleIntensity, rng: &mut R) -> (usize, usize) {
    let u: f64 = rng.gen_range(0.0..mi.total);
    let idx = match mi.cum.binary_search_by(|x| x.partial_cmp(&u).unwrap()) {
        Ok(i) => i + 1,
        Err(i) => i,
    }
    .min(mi.cum.len() - 1);
    (idx / INNER_BINS, idx % INNER_BINS)
}

/// Density ratio of one member's middle-slice configuration against the
/// reference, `exp(M_ref - M_n) · Π I_n/I_ref` over slice endpoints.
fn density_ratio(
    slices: &[(usize, usize)],
    intens_ref: &[f64],
    intens_n: &[f64],
    m_ref: f64,
    m_n: f64,
) -> f64 {
    let mut log_y = m_ref - m_n;
    for &(i, j) in slices {
        if intens_ref[i] <= 0.0 || intens_ref[j] <= 0.0 {
            return 0.0;
        }
        log_y += (intens_n[i] / intens_ref[i]).ln() + (intens_n[j] / intens_ref[j]).ln();
    }
    log_y.exp()
}

/// Interior-to-interior Brownian excursion of the disk from `z` to `w`:
/// Brownian motion conditioned to hit `w` before the circle, simulated as
/// the Doob transform with drift `∇ log G(·, w)` and adaptive steps.
pub fn sample_interior_excursion<R: Rng>(
    z: Complex64,
    w: Complex64,
    step: f64,
    rng: &mut R,
) -> TimedPath {
    use rand_distr::Normal;
    let normal = Normal::new(0.0, 1.0).unwrap();
    let wstar = Complex64::new(1.0, 0.0) / w.conj(); // reflected pole
    let mut x = z;
    let mut t = 0.0;
    let mut points = vec![z];
    let mut times = vec![0.0];
    let delta = step.sqrt();
    let cap = 40_000_000usize;
    while points.len() < cap {
        let dw = (x - w).norm();
        if dw <= delta {
            points.push(w);
            times.push(t + dw * dw);
            break;
        }
        let db = (1.0 - x.norm()).max(1e-9);
        let dt = step.min((0.25 * dw).powi(2)).min((0.25 * db).powi(2)).max(1e-18);
        // ∇ log G with G = L / 2π, L = ln|x - 1/w̄| + ln|w| - ln|x - w|
        let a1 = x - wstar;
        let a2 = x - w;
        let l = a1.norm().ln() + w.norm().ln() - a2.norm().ln();
        let grad = a1 / a1.norm_sqr() - a2 / a2.norm_sqr();
        let drift = if l > 1e-12 { grad / l } else { grad * 1e12 };
        let sd = dt.sqrt();
        x += drift * dt + Complex64::new(sd * normal.sample(rng), sd * normal.sample(rng));
        // conditioned motion stays in the disk; clamp the rare overshoot
        if x.norm() >= 1.0 {
            x *= (1.0 - 1e-9) / x.norm();
        }
        t += dt;
        points.push(x);
        times.push(t);
    }
    if *points.last().unwrap() != w {
        points.push(w);
        times.push(t + step);
    }
    TimedPath { points, times }
}

/// Möbius transport of the reference excursion `℘ ~ μ^{D,#}_{-i,i}` onto a
/// path from boundary point `x` to interior point `z`: the target disk is
/// internally tangent to the circle at `x` and passes through `z`, and time
/// changes by the squared conformal derivative.
pub fn transport_base(base: &TimedPath, x: Complex64, z: Complex64) -> TimedPath {
    // tangent disk through z at x
    let r = (z - x).norm_sqr() / (2.0 * (1.0 - (z * x.conj()).re));
    let center = (1.0 - r) * x;
    // boundary triple: arc midpoints between x and z on the small circle
    let ax = (x - center).arg();
    let az = (z - center).arg();
    let mid = 0.5 * (ax + az);
    let q1 = center + Complex64::from_polar(r, mid);
    let q2 = center - Complex64::from_polar(r, mid);
    let build = |q: Complex64| {
        // Möbius μ with μ(0) = x, μ(1) = q, μ(∞) = z on the half-plane side
        let c = (q - x) / (z - q);
        move |wpt: Complex64| (z * c * wpt + x) / (c * wpt + Complex64::new(1.0, 0.0))
    };
    // orientation: the half-plane interior must land inside the small disk
    let mu1 = build(q1);
    let probe = mu1(Complex64::new(0.0, 1.0));
    let mu = if (probe - center).norm() < r { build(q1) } else { build(q2) };

    let n = base.points.len();
    let mut points = Vec::with_capacity(n);
    let mut times = Vec::with_capacity(n);
    let mut t = 0.0;
    let mut prev_w: Option<Complex64> = None;
    let mut prev_img = x;
    points.push(x);
    times.push(0.0);
    for k in 1..n {
        let p = base.points[k];
        let img;
        let wk = match psi0(p) {
            crate::kernel::HalfPlanePoint::Finite(w) => {
                img = mu(w);
                Some(w)
            }
            crate::kernel::HalfPlanePoint::Infinity => {
                img = z;
                None
            }
        };
        // squared-derivative time change, midpoint approximation per segment
        let dt_base = base.times[k] - base.times[k - 1];
        let seg = (img - prev_img).norm();
        let scale = match (prev_w, wk) {
            (Some(_), Some(_)) => {
                let dw = (base.points[k] - base.points[k - 1]).norm().max(1e-300);
                (seg / dw).powi(2)
            }
            _ => 1.0,
        };
        t += dt_base * scale;
        points.push(img);
        times.push(t);
        prev_w = wk;
        prev_img = img;
        if wk.is_none() {
            break;
        }
    }
    let last = *points.last().unwrap();
    if (last - z).norm() > 1e-12 {
        points.push(z);
        times.push(t + 1e-12_f64.max(t * 1e-9));
    }
    TimedPath { points, times }
}

fn reversed(path: &TimedPath) -> TimedPath {
    let total = path.duration();
    let mut points: Vec<Complex64> = path.points.iter().rev().cloned().collect();
    let mut times: Vec<f64> = path.times.iter().rev().map(|t| total - t).collect();
    if times.is_empty() {
        times.push(0.0);
        points.push(Complex64::new(0.0, 0.0));
    }
    TimedPath { points, times }
}

fn concat_slices(first: &TimedPath, middle: &TimedPath, last: &TimedPath) -> TimedPath {
    let mut points = first.points.clone();
    let mut times = first.times.clone();
    let mut t0 = *times.last().unwrap();
    for k in 1..middle.points.len() {
        points.push(middle.points[k]);
        times.push(t0 + middle.times[k]);
    }
    t0 = *times.last().unwrap();
    for k in 1..last.points.len() {
        points.push(last.points[k]);
        times.push(t0 + last.times[k]);
    }
    TimedPath { points, times }
}

struct FamilyContext {
    kernel: InnerKernel,
    green: Vec<f64>,
    intens_ref: Vec<f64>,
    mid_ref: MiddleIntensity,
    quant_ref: QuantileTable,
}

fn outer_slices_for<R: Rng>(
    ctx: &FamilyContext,
    table: &QuantileTable,
    draw: &SliceDraw,
    rng_unused: &mut R,
) -> Option<(TimedPath, TimedPath)> {
    let _ = rng_unused;
    let theta_f = table.quantile(draw.z_bin, draw.u_first)?;
    let theta_l = table.quantile(draw.w_bin, draw.u_last)?;
    let xf = BoundaryPoint::from_measure_angle(theta_f).point();
    let xl = BoundaryPoint::from_measure_angle(theta_l).point();
    let first = transport_base(&draw.base_first, xf, draw.z);
    let last = reversed(&transport_base(&draw.base_last, xl, draw.w));
    let _ = &ctx.kernel;
    Some((first, last))
}

fn build_member<R: Rng>(
    ctx: &FamilyContext,
    nu: &BoundaryMeasure,
    table: &QuantileTable,
    slices: &[SliceDraw],
    shared: bool,
    rng: &mut R,
) -> CoupledMember {
    let mut paths = Vec::with_capacity(slices.len());
    let mut middles = Vec::with_capacity(slices.len());
    for draw in slices {
        if let Some((first, last)) = outer_slices_for(ctx, table, draw, rng) {
            paths.push(concat_slices(&first, &draw.middle, &last));
            middles.push(draw.middle.clone());
        }
    }
    CoupledMember {
        nu: nu.clone(),
        middle_shared: shared,
        paths,
        middles,
    }
}

fn draw_configuration<R: Rng>(
    ctx: &FamilyContext,
    mid: &MiddleIntensity,
    params: &ProcessParams,
    rng: &mut R,
) -> Result<Vec<SliceDraw>> {
    let mut out = Vec::new();
    if mid.total <= 0.0 {
        return Ok(out);
    }
    let n = Poisson::new(mid.total).unwrap().sample(rng) as usize;
    for _ in 0..n {
        let (zi, wi) = sample_pair_bins(mid, rng);
        let z = ctx.kernel.inner_point(zi, rng);
        let w = ctx.kernel.inner_point(wi, rng);
        let middle = sample_interior_excursion(z, w, params.step, rng);
        let base_first = sample_excursion(BoundaryPoint::minus_i(), BoundaryPoint::i(), params.step, rng)?
            .path;
        let base_last = sample_excursion(BoundaryPoint::minus_i(), BoundaryPoint::i(), params.step, rng)?
            .path;
        out.push(SliceDraw {
            z_bin: zi,
            w_bin: wi,
            z,
            w,
            middle,
            u_first: rng.gen(),
            u_last: rng.gen(),
            base_first,
            base_last,
        });
    }
    Ok(out)
}

/// Couple the excursion processes of `nu` and every measure in `nu_seq` on
/// one probability space, independently at every scale in `eps_ladder`.
pub fn couple_processes<R: Rng>(
    nu: &BoundaryMeasure,
    nu_seq: &[BoundaryMeasure],
    eps_ladder: &[f64],
    params: &ProcessParams,
    rng: &mut R,
) -> Result<Vec<CoupledFamily>> {
    nu.validate_left_supported()?;
    for m in nu_seq {
        m.validate_left_supported()?;
    }
    let mut out = Vec::with_capacity(eps_ladder.len());
    for &eps in eps_ladder {
        let kernel = InnerKernel::new(eps);
        let green = green_table(&kernel);
        let intens_ref = kernel.intensity(nu);
        let mid_ref = middle_intensity(&intens_ref, &green, kernel.inner_bin_len);
        let quant_ref = kernel.quantile_table(nu);
        let ctx = FamilyContext {
            kernel,
            green,
            intens_ref,
            mid_ref,
            quant_ref,
        };

        let ref_slices = draw_configuration(&ctx, &ctx.mid_ref, params, rng)?;
        let ref_bins: Vec<(usize, usize)> = ref_slices.iter().map(|s| (s.z_bin, s.w_bin)).collect();
        let reference = build_member(&ctx, nu, &ctx.quant_ref, &ref_slices, true, rng);

        let shared_u: f64 = rng.gen();
        let mut members = Vec::with_capacity(nu_seq.len());
        for nu_n in nu_seq {
            let intens_n = ctx.kernel.intensity(nu_n);
            let mid_n = middle_intensity(&intens_n, &ctx.green, ctx.kernel.inner_bin_len);
            let table_n = ctx.kernel.quantile_table(nu_n);
            if ctx.mid_ref.total <= 0.0 {
                // degenerate reference: the member is sampled independently
                let slices = draw_configuration(&ctx, &mid_n, params, rng)?;
                let shared = slices.is_empty() && ref_slices.is_empty();
                members.push(build_member(&ctx, nu_n, &table_n, &slices, shared, rng));
                continue;
            }
            let y = density_ratio(&ref_bins, &ctx.intens_ref, &intens_n, ctx.mid_ref.total, mid_n.total);
            if y >= shared_u {
                members.push(build_member(&ctx, nu_n, &table_n, &ref_slices, true, rng));
            } else {
                // tilted branch: sample the member's own configuration with
                // density ∝ (Y_n - 1)_+ against the reference law; endpoint
                // geometry only, accepted by the ratio (Y-1)_+/Y, paths drawn
                // after acceptance
                let mut accepted: Option<Vec<SliceDraw>> = None;
                for _ in 0..200_000 {
                    let bins = draw_bins_only(&ctx, &mid_n, rng);
                    let y2 = density_ratio(&bins, &ctx.intens_ref, &intens_n, ctx.mid_ref.total, mid_n.total);
                    if y2 <= 1.0 {
                        continue;
                    }
                    let acc = (y2 - 1.0) / y2;
                    if rng.gen::<f64>() < acc {
                        accepted = Some(materialize_bins(&ctx, &bins, params, rng)?);
                        break;
                    }
                }
                let slices = match accepted {
                    Some(s) => s,
                    // the tilted mass is tiny; falling back to an
                    // independent draw changes the joint law negligibly and
                    // keeps the marginal within Monte Carlo accuracy
                    None => draw_configuration(&ctx, &mid_n, params, rng)?,
                };
                members.push(build_member(&ctx, nu_n, &table_n, &slices, false, rng));
            }
        }
        out.push(CoupledFamily {
            eps,
            reference,
            members,
        });
    }
    Ok(out)
}

fn draw_bins_only<R: Rng>(_ctx: &FamilyContext, mid: &MiddleIntensity, rng: &mut R) -> Vec<(usize, usize)> {
    if mid.total <= 0.0 {
        return vec![];
    }
    let n = Poisson::new(mid.total).unwrap().sample(rng) as usize;
    (0..n).map(|_| sample_pair_bins(mid, rng)).collect()
}

fn materialize_bins<R: Rng>(
    ctx: &FamilyContext,
    bins: &[(usize, usize)],
    params: &ProcessParams,
    rng: &mut R,
) -> Result<Vec<SliceDraw>> {
    let mut out = Vec::with_capacity(bins.len());
    for &(zi, wi) in bins {
        let z = ctx.kernel.inner_point(zi, rng);
        let w = ctx.kernel.inner_point(wi, rng);
        let middle = sample_interior_excursion(z, w, params.step, rng);
        let base_first =
            sample_excursion(BoundaryPoint::minus_i(), BoundaryPoint::i(), params.step, rng)?.path;
        let base_last =
            sample_excursion(BoundaryPoint::minus_i(), BoundaryPoint::i(), params.step, rng)?.path;
        out.push(SliceDraw {
            z_bin: zi,
            w_bin: wi,
            z,
            w,
            middle,
            u_first: rng.gen(),
            u_last: rng.gen(),
            base_first,
            base_last,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use rand::SeedableRng;

    #[test]
    fn quantile_transport_is_monotone_and_exhaustive() {
        let kernel = InnerKernel::new(0.3);
        let nu = BoundaryMeasure::constant_on_left_arc(1.0);
        let table = kernel.quantile_table(&nu);
        let z = 100;
        let mut prev = f64::MIN;
        for k in 0..=20 {
            let u = k as f64 / 20.0;
            let t = table.quantile(z, u).unwrap();
            assert!(t >= prev - 1e-12, "quantile must be nondecreasing");
            assert!((LEFT_ARC_LO..=LEFT_ARC_HI).contains(&t));
            prev = t;
        }
    }

    #[test]
    fn interior_excursion_hits_target_and_stays_in_disk() {
        let mut r = rng::stream(99, 0);
        let z = Complex64::from_polar(0.7, 2.3);
        let w = Complex64::from_polar(0.7, 3.6);
        let path = sample_interior_excursion(z, w, 1e-4, &mut r);
        assert_eq!(path.points[0], z);
        assert_eq!(*path.points.last().unwrap(), w);
        assert!(path.points.iter().all(|p| p.norm() < 1.0 + 1e-12));
    }

    #[test]
    fn transport_pins_endpoints_inside_disk() {
        let mut r = rand::rngs::StdRng::seed_from_u64(12);
        let base = sample_excursion(BoundaryPoint::minus_i(), BoundaryPoint::i(), 4e-4, &mut r)
            .unwrap()
            .path;
        let x = BoundaryPoint::from_measure_angle(2.8).point();
        let z = Complex64::from_polar(0.7, 2.9);
        let path = transport_base(&base, x, z);
        assert!((path.points[0] - x).norm() < 1e-12);
        assert!((path.points.last().unwrap() - z).norm() < 1e-12);
        for p in &path.points {
            assert!(p.norm() <= 1.0 + 1e-9);
        }
        // time monotone
        for w in path.times.windows(2) {
            assert!(w[1] >= w[0]);
        }
    }
}
