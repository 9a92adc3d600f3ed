//! The right envelope: rasterize the excursion set with its attached loops,
//! flood the free region from the right arc, and trace the boundary into an
//! ordered curve from `-i` to `i`, with topology diagnostics, the subarc
//! containment law, monotone coupling, atom classification and the
//! pathological boundary density.

use num_complex::Complex64;
use rand::Rng;

use crate::cle::LoopEnsemble;
use crate::error::{Error, Result};
use crate::excursion::{
    retained, sample_process_with, ExcursionSet, PairSampler, ProcessParams,
};
use crate::grid::{flood_fill_4, moore_trace, OccupancyGrid, NEIGHBORS_8};
use crate::kernel::{boundary_poisson, BoundaryPoint, LEFT_ARC_HI, LEFT_ARC_LO, PI};
use crate::measure::{BoundaryMeasure, PolyPiece};

/// Union of the excursion set with every loop attached to it, on a raster.
pub struct SetUnion {
    pub grid_n: usize,
    /// occupancy of the union set (excursions plus attached loop curves)
    pub mask: OccupancyGrid,
    /// for every excursion, the indices of loops whose range meets it
    pub per_excursion: Vec<Vec<usize>>,
    /// which loops ended up attached to some excursion
    pub attached: Vec<bool>,
}

/// Attach to each excursion the loops whose rasterized range intersects it;
/// unattached loops do not enter the union.
pub fn attach_loops(xi: &ExcursionSet, loops: &LoopEnsemble, grid_n: usize) -> SetUnion {
    let mut exc_grids: Vec<OccupancyGrid> = Vec::with_capacity(xi.excursions.len());
    let mut mask = OccupancyGrid::new(grid_n);
    for exc in &xi.excursions {
        let mut g = OccupancyGrid::new(grid_n);
        g.draw_polyline(&exc.path.points);
        for (i, j) in g.occupied() {
            mask.set(i, j);
        }
        exc_grids.push(g);
    }
    let mut loop_grids: Vec<Vec<(usize, usize)>> = Vec::with_capacity(loops.loops.len());
    for l in &loops.loops {
        let mut g = OccupancyGrid::new(grid_n);
        g.draw_polyline(l);
        loop_grids.push(g.occupied().collect());
    }
    let mut per_excursion = vec![Vec::new(); xi.excursions.len()];
    let mut attached = vec![false; loops.loops.len()];
    for (li, cells) in loop_grids.iter().enumerate() {
        for (ei, eg) in exc_grids.iter().enumerate() {
            if cells.iter().any(|&(i, j)| eg.get(i, j)) {
                per_excursion[ei].push(li);
                attached[li] = true;
            }
        }
    }
    for (li, cells) in loop_grids.iter().enumerate() {
        if attached[li] {
            for &(i, j) in cells {
                mask.set(i, j);
            }
        }
    }
    SetUnion {
        grid_n,
        mask,
        per_excursion,
        attached,
    }
}

/// The extracted envelope curve with its raster context.
pub struct EnvelopeCurve {
    /// ordered polyline from exactly `-i` to exactly `i`
    pub points: Vec<Complex64>,
    pub grid_n: usize,
    /// blocked occupancy: the union set plus the closed left arc ring
    pub blocked: OccupancyGrid,
    /// membership mask of the right free component
    pub right_region: Vec<bool>,
    /// traced envelope cells in curve order (free-side cells)
    pub cells: Vec<(usize, usize)>,
    /// cells visited more than once by the trace
    pub double_point_cells: Vec<(usize, usize)>,
    /// envelope cells lying on the left-arc ring (the curve touches the arc)
    pub boundary_contact_cells: Vec<(usize, usize)>,
}

impl EnvelopeCurve {
    pub fn cell_size(&self) -> f64 {
        2.0 / self.grid_n as f64
    }

    /// Arc length of the boundary contact at grid scale.
    pub fn boundary_contact_length(&self) -> f64 {
        self.boundary_contact_cells.len() as f64 * self.cell_size()
    }
}

fn in_disk(center: Complex64) -> bool {
    center.norm() < 1.0
}

fn on_ring(center: Complex64, cellsize: f64) -> bool {
    let r = center.norm();
    r < 1.0 && r >= 1.0 - 1.5 * cellsize
}

fn ring_on_left_arc(center: Complex64, cellsize: f64) -> bool {
    if !on_ring(center, cellsize) {
        return false;
    }
    let m = BoundaryPoint::from_angle(center.arg()).measure_angle();
    (LEFT_ARC_LO..=LEFT_ARC_HI).contains(&m)
}

/// Extract the right envelope of `mask ∪ Ā_L`: flood the free cells
/// 4-connected from the right arc, trace the free component's boundary, and
/// return the portion adjacent to the blocked set, ordered from `-i` to `i`.
pub fn extract_envelope(mask: &OccupancyGrid, grid_n: usize) -> Result<EnvelopeCurve> {
    assert_eq!(mask.n, grid_n);
    let cellsize = 2.0 / grid_n as f64;
    let mut blocked = OccupancyGrid::new(grid_n);
    for i in 0..grid_n {
        for j in 0..grid_n {
            let c = blocked.center(i, j);
            if !in_disk(c) {
                continue;
            }
            if mask.get(i, j) || ring_on_left_arc(c, cellsize) {
                blocked.set(i, j);
            }
        }
    }
    // free right-arc seeds
    let mut seeds = Vec::new();
    for i in 0..grid_n {
        for j in 0..grid_n {
            let c = blocked.center(i, j);
            if on_ring(c, cellsize) && !blocked.get(i, j) {
                let m = BoundaryPoint::from_angle(c.arg()).measure_angle();
                if m > LEFT_ARC_HI + cellsize && m < LEFT_ARC_LO + 2.0 * PI - cellsize {
                    seeds.push((i, j));
                }
            }
        }
    }
    if seeds.is_empty() {
        return Err(Error::RightArcBlocked);
    }
    let bref = &blocked;
    let free = |i: usize, j: usize| -> bool {
        let c = bref.center(i, j);
        in_disk(c) && !bref.get(i, j)
    };
    let right_region = flood_fill_4(grid_n, &seeds, free);
    if !right_region.iter().any(|m| *m) {
        return Err(Error::RightArcBlocked);
    }

    // trace the free component boundary; scan guarantees the west neighbor
    // of the start is outside the region
    let mut start = None;
    'scan: for i in 0..grid_n {
        for j in 0..grid_n {
            if right_region[i * grid_n + j] {
                start = Some((i, j));
                break 'scan;
            }
        }
    }
    let start = start.unwrap();
    let rr = &right_region;
    let cycle = moore_trace(grid_n, start, |i, j| {
        i >= 0 && j >= 0 && (i as usize) < grid_n && (j as usize) < grid_n && rr[i as usize * grid_n + j as usize]
    });

    // a cycle cell belongs to the envelope when it touches the blocked set
    let touches_blocked = |i: usize, j: usize| -> bool {
        NEIGHBORS_8.iter().any(|&(di, dj)| {
            let (ni, nj) = (i as isize + di, j as isize + dj);
            ni >= 0
                && nj >= 0
                && (ni as usize) < grid_n
                && (nj as usize) < grid_n
                && blocked.get(ni as usize, nj as usize)
        })
    };
    let flags: Vec<bool> = cycle.iter().map(|&(i, j)| touches_blocked(i, j)).collect();
    if !flags.iter().any(|f| *f) {
        return Err(Error::RightArcBlocked);
    }
    // maximal cyclic runs of envelope cells; take the longest
    let n = cycle.len();
    let mut best: (usize, usize, usize) = (0, 0, 0); // (start, len, _)
    let mut k = 0usize;
    while k < n {
        if flags[k] && (k == 0 && !flags[n - 1] || k > 0 && !flags[k - 1] || n == 1) {
            let mut len = 0;
            while len < n && flags[(k + len) % n] {
                len += 1;
            }
            if len > best.1 {
                best = (k, len, 0);
            }
            k += len.max(1);
        } else {
            k += 1;
        }
    }
    if best.1 == 0 {
        // all cells flagged: the whole cycle is the envelope run
        best = (0, n, 0);
    }
    let mut cells: Vec<(usize, usize)> = (0..best.1).map(|t| cycle[(best.0 + t) % n]).collect();

    // orient from -i to i
    let ctr = |c: &(usize, usize)| blocked.center(c.0, c.1);
    let d_start = (ctr(cells.first().unwrap()) + Complex64::i()).norm();
    let d_end = (ctr(cells.last().unwrap()) + Complex64::i()).norm();
    if d_end < d_start {
        cells.reverse();
    }

    let mut seen = std::collections::HashMap::new();
    let mut candidates = Vec::new();
    for &c in &cells {
        let e = seen.entry(c).or_insert(0usize);
        *e += 1;
        if *e == 2 {
            candidates.push(c);
        }
    }
    // confirm a revisited cell as a double point only when the free region
    // is genuinely pinched there: removing the cell splits its free
    // neighbors into parts that each reach past a local window (dead-end
    // spurs fail this test)
    let double_point_cells: Vec<(usize, usize)> = candidates
        .into_iter()
        .filter(|&c| is_pinch_cell(&right_region, grid_n, c))
        .collect();
    let boundary_contact_cells: Vec<(usize, usize)> = cells
        .iter()
        .cloned()
        .filter(|&(i, j)| {
            // contact cells hug the left-arc ring: the blocked neighbor is a
            // ring cell rather than a set cell
            NEIGHBORS_8.iter().any(|&(di, dj)| {
                let (ni, nj) = (i as isize + di, j as isize + dj);
                ni >= 0
                    && nj >= 0
                    && (ni as usize) < grid_n
                    && (nj as usize) < grid_n
                    && ring_on_left_arc(blocked.center(ni as usize, nj as usize), cellsize)
                    && blocked.get(ni as usize, nj as usize)
            })
        })
        .collect();

    let mut points = Vec::with_capacity(cells.len() + 2);
    points.push(Complex64::new(0.0, -1.0));
    points.extend(cells.iter().map(|&(i, j)| blocked.center(i, j)));
    points.push(Complex64::new(0.0, 1.0));

    Ok(EnvelopeCurve {
        points,
        grid_n,
        blocked,
        right_region,
        cells,
        double_point_cells,
        boundary_contact_cells,
    })
}

/// Pinch test at a free cell: within a window around it, delete the cell
/// and flood from its free 4-neighbors; the cell is a pinch when two
/// neighbors land in different flood components that both escape the
/// window. Dead-end corridors produce one escaping side only.
fn is_pinch_cell(region: &[bool], n: usize, cell: (usize, usize)) -> bool {
    const W: isize = 10;
    let (ci, cj) = (cell.0 as isize, cell.1 as isize);
    let in_window = |i: isize, j: isize| -> bool {
        (i - ci).abs() <= W
            && (j - cj).abs() <= W
            && i >= 0
            && j >= 0
            && (i as usize) < n
            && (j as usize) < n
    };
    let free = |i: isize, j: isize| -> bool {
        in_window(i, j) && region[i as usize * n + j as usize] && (i, j) != (ci, cj)
    };
    let mut comp_escapes = Vec::new();
    let mut labeled: std::collections::HashMap<(isize, isize), usize> = Default::default();
    for (di, dj) in crate::grid::NEIGHBORS_4 {
        let s = (ci + di, cj + dj);
        if !free(s.0, s.1) || labeled.contains_key(&s) {
            continue;
        }
        let id = comp_escapes.len();
        let mut escapes = false;
        let mut stack = vec![s];
        labeled.insert(s, id);
        while let Some((i, j)) = stack.pop() {
            if (i - ci).abs() == W || (j - cj).abs() == W {
                escapes = true;
            }
            for (di2, dj2) in crate::grid::NEIGHBORS_4 {
                let t = (i + di2, j + dj2);
                if free(t.0, t.1) && !labeled.contains_key(&t) {
                    labeled.insert(t, id);
                    stack.push(t);
                }
            }
        }
        comp_escapes.push(escapes);
    }
    comp_escapes.iter().filter(|e| **e).count() >= 2
}

/// Build the envelope of an excursion set and loop ensemble in one call.
pub fn envelope_of(xi: &ExcursionSet, loops: &LoopEnsemble, grid_n: usize) -> Result<EnvelopeCurve> {
    let union = attach_loops(xi, loops, grid_n);
    extract_envelope(&union.mask, grid_n)
}

/// Topology diagnostics of an extracted envelope.
#[derive(Clone, Debug, serde::Serialize)]
pub struct TopologyReport {
    pub double_point_count: usize,
    /// atoms of the measure with a double point within two cells
    pub double_points_at_atoms: Vec<f64>,
    pub cut_point_candidates: usize,
    /// (δ, modulus) table: max detour diameter over point pairs within δ
    pub local_connectedness: Vec<(f64, f64)>,
    pub boundary_contact_length: f64,
}

pub fn topology_diagnostics(curve: &EnvelopeCurve, nu: &BoundaryMeasure) -> TopologyReport {
    let cellsize = curve.cell_size();
    let double_points_at_atoms: Vec<f64> = nu
        .atoms()
        .iter()
        .filter(|a| {
            let p = BoundaryPoint::from_measure_angle(a.theta).point();
            curve
                .double_point_cells
                .iter()
                .any(|&(i, j)| (curve.blocked.center(i, j) - p).norm() <= 4.0 * cellsize)
        })
        .map(|a| a.theta)
        .collect();

    // cut-point candidates: envelope cells whose 8-neighborhood ring splits
    // into two or more blocked arcs
    let n = curve.grid_n;
    let ring_order: [(isize, isize); 8] = [
        (-1, -1),
        (-1, 0),
        (-1, 1),
        (0, 1),
        (1, 1),
        (1, 0),
        (1, -1),
        (0, -1),
    ];
    let mut cut_point_candidates = 0usize;
    for &(i, j) in &curve.cells {
        let mut blocked_flags = [false; 8];
        for (k, (di, dj)) in ring_order.iter().enumerate() {
            let (ni, nj) = (i as isize + di, j as isize + dj);
            blocked_flags[k] = ni >= 0
                && nj >= 0
                && (ni as usize) < n
                && (nj as usize) < n
                && curve.blocked.get(ni as usize, nj as usize);
        }
        let mut runs = 0;
        for k in 0..8 {
            if blocked_flags[k] && !blocked_flags[(k + 7) % 8] {
                runs += 1;
            }
        }
        if runs >= 2 {
            cut_point_candidates += 1;
        }
    }

    // local connectedness: subsampled detour table with range bounding boxes
    let pts: Vec<Complex64> = curve
        .points
        .iter()
        .step_by((curve.points.len() / 1500).max(1))
        .cloned()
        .collect();
    let m = pts.len();
    let mut pref_min_re = vec![f64::MAX; m + 1];
    let mut local = Vec::new();
    let _ = &mut pref_min_re;
    for mult in [2.0, 4.0, 8.0, 16.0, 32.0] {
        let delta = mult * cellsize;
        let mut worst: f64 = 0.0;
        for a in 0..m {
            for b in (a + 2)..m {
                if (pts[a] - pts[b]).norm() < delta {
                    // detour diameter via the bounding box of the sub-arc
                    let (mut xmin, mut xmax, mut ymin, mut ymax) =
                        (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
                    for p in &pts[a..=b] {
                        xmin = xmin.min(p.re);
                        xmax = xmax.max(p.re);
                        ymin = ymin.min(p.im);
                        ymax = ymax.max(p.im);
                    }
                    let diag = ((xmax - xmin).powi(2) + (ymax - ymin).powi(2)).sqrt();
                    worst = worst.max(diag);
                }
            }
        }
        local.push((delta, worst));
    }

    TopologyReport {
        double_point_count: curve.double_point_cells.len(),
        double_points_at_atoms,
        cut_point_candidates,
        local_connectedness: local,
        boundary_contact_length: curve.boundary_contact_length(),
    }
}

/// Closed-form reference for the subarc containment event at `κ = 8/3`:
/// `exp(-m)` with `m` the kernel mass of excursions joining the two flanks.
pub fn subarc_reference(nu: &BoundaryMeasure, arc: (f64, f64)) -> f64 {
    if nu.mass_between(arc.0 + 1e-12, arc.1 - 1e-12) > 1e-12 {
        return 0.0;
    }
    let m = joining_mass(nu, (LEFT_ARC_LO, arc.0), (arc.1, LEFT_ARC_HI));
    (-m).exp()
}

/// `∬_{A1×A2} H(x,y) dν(x) dν(y)` by nested adaptive quadrature.
pub fn joining_mass(nu: &BoundaryMeasure, a1: (f64, f64), a2: (f64, f64)) -> f64 {
    let inner = |x: f64| {
        let bx = BoundaryPoint::from_measure_angle(x);
        nu.integrate_between(
            &|y: f64| boundary_poisson(bx, BoundaryPoint::from_measure_angle(y)).unwrap_or(0.0),
            a2.0,
            a2.1,
            1e-10,
        )
    };
    nu.integrate_between(&inner, a1.0, a1.1, 1e-8)
}

/// Empirical check of subarc containment: every ring cell of the arc stays
/// on the boundary of the right free component.
pub fn arc_contained_in_envelope(curve: &EnvelopeCurve, arc: (f64, f64)) -> bool {
    let n = curve.grid_n;
    let cellsize = curve.cell_size();
    // angular margin of two cells at the circle
    let margin = 2.0 * cellsize;
    let mut checked = 0usize;
    for i in 0..n {
        for j in 0..n {
            let c = curve.blocked.center(i, j);
            if !ring_on_left_arc(c, cellsize) {
                continue;
            }
            let m = BoundaryPoint::from_angle(c.arg()).measure_angle();
            if m < arc.0 + margin || m > arc.1 - margin {
                continue;
            }
            checked += 1;
            let adjacent_to_right = NEIGHBORS_8.iter().chain([(0isize, 0isize)].iter()).any(|&(di, dj)| {
                let (ni, nj) = (i as isize + di, j as isize + dj);
                ni >= 0
                    && nj >= 0
                    && (ni as usize) < n
                    && (nj as usize) < n
                    && curve.right_region[ni as usize * n + nj as usize]
            });
            if !adjacent_to_right {
                return false;
            }
        }
    }
    checked > 0
}

/// A coupled monotone pair of envelopes built by thinning the larger
/// process, with the same loop ensemble reused.
pub struct MonotonePair {
    pub lower: EnvelopeCurve,
    pub upper: EnvelopeCurve,
    pub nested: bool,
    pub contact_nested: bool,
}

/// Pointwise density ratio `dν1/dν2` at an angle (atom-aware).
fn density_ratio_at(nu1: &BoundaryMeasure, nu2: &BoundaryMeasure, theta: f64) -> f64 {
    for a2 in nu2.atoms() {
        if (a2.theta - theta).abs() < 1e-9 {
            let m1: f64 = nu1
                .atoms()
                .iter()
                .filter(|a1| (a1.theta - theta).abs() < 1e-9)
                .map(|a1| a1.mass)
                .sum();
            return (m1 / a2.mass).clamp(0.0, 1.0);
        }
    }
    let d2 = nu2.density_at(theta);
    if d2 <= 0.0 {
        0.0
    } else {
        (nu1.density_at(theta) / d2).clamp(0.0, 1.0)
    }
}

/// Sample `Ξ_{ν2}`, realize `Ξ_{ν1}` as a thinned subset, reuse the same
/// loop ensemble, and compare the two envelopes.
pub fn monotone_coupled_envelopes<R: Rng>(
    nu1: &BoundaryMeasure,
    nu2: &BoundaryMeasure,
    loops: &LoopEnsemble,
    params: &ProcessParams,
    sampler2: &PairSampler,
    grid_n: usize,
    rng: &mut R,
) -> Result<MonotonePair> {
    if !nu1.dominated_by(nu2, 2048) {
        return Err(Error::NotDominated(
            "first measure is not dominated by the second".into(),
        ));
    }
    let set2 = sample_process_with(sampler2, nu2, params, rng)?;
    let mut kept = Vec::new();
    for exc in &set2.excursions {
        let r1 = density_ratio_at(nu1, nu2, exc.start.measure_angle());
        let r2 = density_ratio_at(nu1, nu2, exc.end.measure_angle());
        if rng.gen::<f64>() < r1 * r2 {
            kept.push(exc.clone());
        }
    }
    let set1 = ExcursionSet {
        excursions: kept,
        nu: nu1.clone(),
        eps_exc: params.eps_exc,
    };
    let upper = envelope_of(&set2, loops, grid_n)?;
    let lower = envelope_of(&set1, loops, grid_n)?;
    let nested = region_contained(&upper.right_region, &lower.right_region, grid_n, 1);
    let contact_nested = cells_contained(
        &upper.boundary_contact_cells,
        &lower.boundary_contact_cells,
        1,
    );
    Ok(MonotonePair {
        lower,
        upper,
        nested,
        contact_nested,
    })
}

/// `a ⊆ b` with a cell tolerance: every cell of `a` is within `tol` cells
/// of a cell of `b` (Chebyshev distance).
pub fn region_contained(a: &[bool], b: &[bool], n: usize, tol: isize) -> bool {
    for i in 0..n {
        for j in 0..n {
            if !a[i * n + j] {
                continue;
            }
            let mut ok = false;
            'search: for di in -tol..=tol {
                for dj in -tol..=tol {
                    let (ni, nj) = (i as isize + di, j as isize + dj);
                    if ni >= 0
                        && nj >= 0
                        && (ni as usize) < n
                        && (nj as usize) < n
                        && b[ni as usize * n + nj as usize]
                    {
                        ok = true;
                        break 'search;
                    }
                }
            }
            if !ok {
                return false;
            }
        }
    }
    true
}

fn cells_contained(a: &[(usize, usize)], b: &[(usize, usize)], tol: isize) -> bool {
    a.iter().all(|&(i, j)| {
        b.iter().any(|&(bi, bj)| {
            (bi as isize - i as isize).abs() <= tol && (bj as isize - j as isize).abs() <= tol
        })
    })
}

/// One-sided energy convergence classification of the atoms of a measure.
#[derive(Clone, Debug)]
pub struct AtomClassification {
    pub atoms: Vec<AtomClass>,
}

#[derive(Clone, Debug)]
pub struct AtomClass {
    pub theta: f64,
    /// the energy integral over the arc toward `i` converges
    pub conv_left: bool,
    /// the energy integral over the arc toward `-i` converges
    pub conv_right: bool,
    /// both-sided energy converges
    pub conv_both: bool,
    /// the atom is isolated in the measure
    pub isolated: bool,
}

impl AtomClass {
    pub fn conv_star(&self) -> bool {
        self.conv_left || self.conv_right
    }
}

/// Decide convergence of `∫ |y-x|^{-2} dν(y)` over an angular interval with
/// one endpoint at the atom: partial sums on shrinking truncations; the
/// integral is declared infinite when halving the truncation keeps growing
/// the partial sum by more than 10% three times in a row.
fn one_sided_energy_converges(nu: &BoundaryMeasure, theta: f64, toward_i: bool) -> bool {
    let x = BoundaryPoint::from_measure_angle(theta).point();
    let w = |y: f64| {
        let p = BoundaryPoint::from_measure_angle(y).point();
        let d2 = (p - x).norm_sqr();
        if d2 < 1e-30 {
            0.0
        } else {
            1.0 / d2
        }
    };
    let full = if toward_i {
        (LEFT_ARC_LO, theta)
    } else {
        (theta, LEFT_ARC_HI)
    };
    if full.1 - full.0 < 1e-12 {
        // empty integration domain
        return true;
    }
    let h0 = (full.1 - full.0).min(0.5);
    let mut prev = if toward_i {
        nu.integrate_between(&w, full.0, theta - h0, 1e-9)
    } else {
        nu.integrate_between(&w, theta + h0, full.1, 1e-9)
    };
    let mut growth_streak = 0;
    for k in 1..=14 {
        let h = h0 * 0.5f64.powi(k);
        let cur = if toward_i {
            nu.integrate_between(&w, full.0, theta - h, 1e-9)
        } else {
            nu.integrate_between(&w, theta + h, full.1, 1e-9)
        };
        if prev > 0.0 && (cur - prev) / prev > 0.10 {
            growth_streak += 1;
            if growth_streak >= 3 {
                return false;
            }
        } else {
            growth_streak = 0;
        }
        prev = cur;
    }
    true
}

pub fn classify_atoms(nu: &BoundaryMeasure) -> AtomClassification {
    let atoms = nu
        .atoms()
        .iter()
        .map(|a| {
            let conv_left = one_sided_energy_converges(nu, a.theta, true);
            let conv_right = one_sided_energy_converges(nu, a.theta, false);
            let isolated = [0.2f64, 0.1, 0.05, 0.02].iter().any(|w| {
                let lo = (a.theta - w).max(LEFT_ARC_LO);
                let hi = (a.theta + w).min(LEFT_ARC_HI);
                (nu.mass_between(lo, hi) - a.mass).abs() < 1e-12
            });
            AtomClass {
                theta: a.theta,
                conv_left,
                conv_right,
                conv_both: conv_left && conv_right,
                isolated,
            }
        })
        .collect();
    AtomClassification { atoms }
}

/// The layered tent density: dyadic midpoint sets `Q_k` carry tents of
/// height `2^{-(k+1)}π` and slope `1/ε_k`; the sum over the given layers is
/// assembled into an exact piecewise-linear density on the left arc.
pub fn pathological_boundary_function(eps_seq: &[f64]) -> BoundaryMeasure {
    assert!(eps_seq.iter().all(|e| (0.0..1.0).contains(e) && *e > 0.0));
    #[derive(Clone, Copy)]
    struct Tent {
        center: f64,
        height: f64,
        half_width: f64,
    }
    let mut tents = Vec::new();
    for (k, eps) in eps_seq.iter().enumerate() {
        let height = 0.5f64.powi(k as i32 + 1) * PI;
        let count = 1usize << k;
        for j in 0..count {
            let center = LEFT_ARC_LO + (2.0 * j as f64 + 1.0) * PI / (1 << (k + 1)) as f64;
            tents.push(Tent {
                center,
                height,
                half_width: eps * height,
            });
        }
    }
    let eval = |t: f64| -> f64 {
        tents
            .iter()
            .map(|tt| (tt.height - (t - tt.center).abs() / (tt.half_width / tt.height)).max(0.0))
            .sum()
    };
    // breakpoints: tent edges and peaks
    let mut brk: Vec<f64> = vec![LEFT_ARC_LO, LEFT_ARC_HI];
    for t in &tents {
        for b in [t.center - t.half_width, t.center, t.center + t.half_width] {
            if b > LEFT_ARC_LO && b < LEFT_ARC_HI {
                brk.push(b);
            }
        }
    }
    brk.sort_by(|a, b| a.partial_cmp(b).unwrap());
    brk.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
    let mut pieces = Vec::new();
    for w in brk.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let (flo, fhi) = (eval(lo), eval(hi));
        if flo.abs() < 1e-15 && fhi.abs() < 1e-15 {
            // check the midpoint in case a full tent hides inside
            if eval(0.5 * (lo + hi)).abs() < 1e-15 {
                continue;
            }
        }
        let slope = (fhi - flo) / (hi - lo);
        pieces.push(PolyPiece {
            theta_lo: lo,
            theta_hi: hi,
            coeffs: vec![flo, slope],
        });
    }
    BoundaryMeasure {
        atoms: vec![],
        pieces,
    }
}

/// Evaluate the layered tent density directly (reference for tests).
pub fn tent_density_value(eps_seq: &[f64], theta: f64) -> f64 {
    let mut total = 0.0;
    for (k, eps) in eps_seq.iter().enumerate() {
        let height = 0.5f64.powi(k as i32 + 1) * PI;
        let count = 1usize << k;
        let mut dist = f64::MAX;
        for j in 0..count {
            let q = LEFT_ARC_LO + (2.0 * j as f64 + 1.0) * PI / (1 << (k + 1)) as f64;
            dist = dist.min((theta - q).abs());
        }
        total += (height - dist / eps).max(0.0);
    }
    total
}

/// Retain from an existing excursion set those above a larger cutoff; used
/// by cutoff-ladder experiments.
pub fn refilter_set(set: &ExcursionSet, eps: f64) -> ExcursionSet {
    ExcursionSet {
        excursions: set
            .excursions
            .iter()
            .filter(|e| retained(e, eps))
            .cloned()
            .collect(),
        nu: set.nu.clone(),
        eps_exc: eps,
    }
}

#[cfg(test)]
mod tests;
