//! Loop-soup CLE sampler: Poissonized Brownian bridges rooted on a spatial
//! grid stand in for the Brownian loop soup, clusters are found on an
//! occupancy raster, and the outermost boundary of each cluster becomes a
//! CLE loop. Clusters touching the circle are discarded (the loops of the
//! ensemble stay in the open disk), as are loops below the diameter cutoff.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Normal, Poisson};

use crate::error::{Error, Result};
use crate::grid::{components_8, moore_trace, OccupancyGrid};

/// Loop-soup intensity matching `CLE_κ` for `κ ∈ (8/3, 4]`; the endpoint
/// `κ = 8/3` gives zero (no loops). Standard correspondence constant from
/// the loop-soup literature.
pub fn intensity_c(kappa: f64) -> Result<f64> {
    if !(8.0 / 3.0..=4.0).contains(&kappa) {
        return Err(Error::Parse(format!(
            "kappa {kappa} outside the loop-soup CLE range (8/3, 4]"
        )));
    }
    Ok((3.0 * kappa - 8.0) * (6.0 - kappa) / (2.0 * kappa))
}

/// A raw soup loop: a closed polyline (first point equals last).
#[derive(Clone, Debug)]
pub struct RawLoop {
    pub points: Vec<Complex64>,
    pub duration: f64,
}

/// The CLE sample: outer boundaries of loop-soup clusters.
#[derive(Clone, Debug)]
pub struct LoopEnsemble {
    /// closed polylines, first point = last point
    pub loops: Vec<Vec<Complex64>>,
    /// cells occupied by each cluster, on the clustering grid
    pub cluster_cells: Vec<Vec<(usize, usize)>>,
    pub kappa: f64,
    pub c: f64,
    pub eps_cle: f64,
    pub grid_n: usize,
}

impl LoopEnsemble {
    pub fn empty(kappa: f64) -> Self {
        LoopEnsemble {
            loops: vec![],
            cluster_cells: vec![],
            kappa,
            c: 0.0,
            eps_cle: 0.0,
            grid_n: 0,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.loops.is_empty()
    }
}

/// Parameters of the soup discretization.
#[derive(Clone, Copy, Debug)]
pub struct SoupParams {
    /// root grid resolution (cells per side over [-1,1])
    pub root_grid: usize,
    /// smallest bridge duration class
    pub t_min: f64,
    /// largest bridge duration class
    pub t_max: f64,
    /// Brownian clock step of bridge sampling
    pub step: f64,
    /// drop raw loops of diameter below this
    pub eps_loop: f64,
}

impl Default for SoupParams {
    fn default() -> Self {
        SoupParams {
            root_grid: 64,
            t_min: 1e-3,
            t_max: 4.0,
            step: 1e-4,
            eps_loop: 4.0 / 1024.0,
        }
    }
}

/// Sample the discretized Brownian loop soup at intensity `c`: per root
/// cell and dyadic duration class, a Poisson number of Brownian bridges
/// rooted in the cell; bridges exiting the disk or below the diameter
/// cutoff are dropped.
pub fn sample_loop_soup<R: Rng>(c: f64, params: &SoupParams, rng: &mut R) -> Vec<RawLoop> {
    let mut out = Vec::new();
    if c <= 0.0 {
        return out;
    }
    let m = params.root_grid;
    let cell = 2.0 / m as f64;
    let area = cell * cell;
    // dyadic duration classes [t, 2t); the loop measure weights each class
    // by ∫ dt / (2π t²) = (1/2π)(1/t - 1/2t) = 1/(4π t)
    let mut t = params.t_min;
    while t < params.t_max {
        let weight = c * area / (4.0 * crate::kernel::PI * t);
        for gi in 0..m {
            for gj in 0..m {
                let cx = -1.0 + (gj as f64 + 0.5) * cell;
                let cy = -1.0 + (gi as f64 + 0.5) * cell;
                // skip cells fully outside the disk
                if (cx * cx + cy * cy).sqrt() > 1.0 + cell {
                    continue;
                }
                let n = Poisson::new(weight.max(1e-12)).unwrap().sample(rng) as usize;
                for _ in 0..n {
                    let root = Complex64::new(
                        cx + rng.gen_range(-0.5..0.5) * cell,
                        cy + rng.gen_range(-0.5..0.5) * cell,
                    );
                    // duration uniform within the class in 1/t law is close
                    // to uniform at this class width; uniform suffices here
                    let dur = rng.gen_range(t..2.0 * t);
                    if let Some(l) = sample_bridge(root, dur, params.step, rng) {
                        if crate::excursion::polyline_diameter(&l.points) > params.eps_loop {
                            out.push(l);
                        }
                    }
                }
            }
        }
        t *= 2.0;
    }
    out
}

/// Brownian bridge of the prescribed duration rooted at `root`; `None` when
/// the bridge leaves the open disk.
fn sample_bridge<R: Rng>(root: Complex64, duration: f64, step: f64, rng: &mut R) -> Option<RawLoop> {
    if root.norm() >= 1.0 {
        return None;
    }
    let normal = Normal::new(0.0, 1.0).unwrap();
    let n = ((duration / step).ceil() as usize).clamp(8, 400_000);
    let dt = duration / n as f64;
    let mut pts = Vec::with_capacity(n + 1);
    pts.push(root);
    let mut cur = root;
    for k in 1..n {
        // exact Brownian bridge transition toward the pinned endpoint
        let remain = duration - (k - 1) as f64 * dt;
        let mean = cur + (root - cur) * (dt / remain);
        let sd = (dt * (remain - dt) / remain).max(0.0).sqrt();
        cur = Complex64::new(
            mean.re + sd * normal.sample(rng),
            mean.im + sd * normal.sample(rng),
        );
        if cur.norm() >= 1.0 {
            return None;
        }
        pts.push(cur);
    }
    pts.push(root);
    Some(RawLoop {
        points: pts,
        duration,
    })
}

/// Group raw loops into clusters on an `n × n` occupancy raster, trace the
/// outermost boundary of each cluster, and keep those staying inside the
/// disk with diameter above `eps_cle`.
pub fn clusters_outer_boundaries(
    raw: &[RawLoop],
    grid_n: usize,
    kappa: f64,
    c: f64,
    eps_cle: f64,
) -> LoopEnsemble {
    let mut grid = OccupancyGrid::new(grid_n);
    let mut loop_cells: Vec<Vec<(usize, usize)>> = Vec::with_capacity(raw.len());
    for l in raw {
        let mut g = OccupancyGrid::new(grid_n);
        g.draw_polyline(&l.points);
        let cells: Vec<(usize, usize)> = g.occupied().collect();
        for &(i, j) in &cells {
            grid.set(i, j);
        }
        loop_cells.push(cells);
    }
    let (labels, ncomp) = components_8(&grid);
    if ncomp == 0 {
        return LoopEnsemble {
            loops: vec![],
            cluster_cells: vec![],
            kappa,
            c,
            eps_cle,
            grid_n,
        };
    }
    // collect cells per component and detect circle contact
    let mut comp_cells: Vec<Vec<(usize, usize)>> = vec![vec![]; ncomp];
    let mut touches_boundary = vec![false; ncomp];
    let cellsize = grid.cell_size();
    for (i, j) in grid.occupied() {
        let id = labels[i * grid_n + j] as usize;
        comp_cells[id].push((i, j));
        if grid.center(i, j).norm() >= 1.0 - 1.5 * cellsize {
            touches_boundary[id] = true;
        }
    }
    let mut loops = Vec::new();
    let mut cluster_cells = Vec::new();
    for id in 0..ncomp {
        if touches_boundary[id] || comp_cells[id].is_empty() {
            continue;
        }
        // start the trace at the leftmost cell of the bottom row of the
        // component, whose west neighbor is guaranteed outside
        let start = *comp_cells[id]
            .iter()
            .min_by_key(|&&(i, j)| (i, j))
            .unwrap();
        let cycle = moore_trace(grid_n, start, |i, j| {
            i >= 0
                && j >= 0
                && (i as usize) < grid_n
                && (j as usize) < grid_n
                && grid.get(i as usize, j as usize)
                && labels[i as usize * grid_n + j as usize] as usize == id
        });
        let mut poly: Vec<Complex64> = cycle.iter().map(|&(i, j)| grid.center(i, j)).collect();
        if poly.len() < 3 {
            continue;
        }
        poly.push(poly[0]);
        if crate::excursion::polyline_diameter(&poly) > eps_cle {
            loops.push(poly);
            cluster_cells.push(comp_cells[id].clone());
        }
    }
    LoopEnsemble {
        loops,
        cluster_cells,
        kappa,
        c,
        eps_cle,
        grid_n,
    }
}

/// Convenience wrapper: soup, clustering and boundary extraction.
pub fn sample_cle<R: Rng>(
    kappa: f64,
    grid_n: usize,
    eps_cle: f64,
    soup: &SoupParams,
    rng: &mut R,
) -> Result<LoopEnsemble> {
    let c = intensity_c(kappa)?;
    if c == 0.0 {
        return Ok(LoopEnsemble::empty(kappa));
    }
    let raw = sample_loop_soup(c, soup, rng);
    Ok(clusters_outer_boundaries(&raw, grid_n, kappa, c, eps_cle))
}
