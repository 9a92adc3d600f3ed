//! Raster machinery shared by the loop-soup clustering and the envelope
//! extraction: an occupancy grid over `[-1,1]²`, supercover segment
//! rasterization, union-find components, flood fill and Moore-neighbor
//! contour tracing. Occupied sets use 8-connectivity and free regions
//! 4-connectivity, the dual pairing that keeps traced contours tight.

use num_complex::Complex64;

/// Square occupancy grid over the plane box `[-1, 1]²`.
#[derive(Clone)]
pub struct OccupancyGrid {
    pub n: usize,
    cells: Vec<bool>,
}

impl OccupancyGrid {
    pub fn new(n: usize) -> Self {
        OccupancyGrid {
            n,
            cells: vec![false; n * n],
        }
    }

    pub fn cell_size(&self) -> f64 {
        2.0 / self.n as f64
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        i * self.n + j
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.cells[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize) {
        self.cells[i * self.n + j] = true;
    }

    pub fn any(&self) -> bool {
        self.cells.iter().any(|c| *c)
    }

    pub fn count(&self) -> usize {
        self.cells.iter().filter(|c| **c).count()
    }

    /// Cell containing a plane point, if inside the box.
    pub fn locate(&self, p: Complex64) -> Option<(usize, usize)> {
        let s = self.cell_size();
        let j = ((p.re + 1.0) / s).floor() as isize;
        let i = ((p.im + 1.0) / s).floor() as isize;
        if i < 0 || j < 0 || i >= self.n as isize || j >= self.n as isize {
            None
        } else {
            Some((i as usize, j as usize))
        }
    }

    /// Center of cell `(i, j)`; rows index the imaginary axis.
    pub fn center(&self, i: usize, j: usize) -> Complex64 {
        let s = self.cell_size();
        Complex64::new(-1.0 + (j as f64 + 0.5) * s, -1.0 + (i as f64 + 0.5) * s)
    }

    /// Mark every cell whose interior the segment crosses (supercover
    /// traversal), clipping silently at the box.
    pub fn draw_segment(&mut self, a: Complex64, b: Complex64) {
        let s = self.cell_size();
        let to_grid = |p: Complex64| ((p.re + 1.0) / s, (p.im + 1.0) / s);
        let (x0, y0) = to_grid(a);
        let (x1, y1) = to_grid(b);
        let mut xi = x0.floor() as isize;
        let mut yi = y0.floor() as isize;
        let xe = x1.floor() as isize;
        let ye = y1.floor() as isize;
        let dx = x1 - x0;
        let dy = y1 - y0;
        let step_x: isize = if dx > 0.0 { 1 } else { -1 };
        let step_y: isize = if dy > 0.0 { 1 } else { -1 };
        let inv_dx = if dx != 0.0 { (1.0 / dx).abs() } else { f64::INFINITY };
        let inv_dy = if dy != 0.0 { (1.0 / dy).abs() } else { f64::INFINITY };
        let mut t_max_x = if dx != 0.0 {
            let next = if step_x > 0 { xi as f64 + 1.0 } else { xi as f64 };
            ((next - x0) / dx).abs()
        } else {
            f64::INFINITY
        };
        let mut t_max_y = if dy != 0.0 {
            let next = if step_y > 0 { yi as f64 + 1.0 } else { yi as f64 };
            ((next - y0) / dy).abs()
        } else {
            f64::INFINITY
        };
        let nn = self.n as isize;
        let mut guard = 0usize;
        loop {
            if xi >= 0 && yi >= 0 && xi < nn && yi < nn {
                self.cells[yi as usize * self.n + xi as usize] = true;
            }
            if (xi == xe && yi == ye) || guard > 4 * self.n {
                break;
            }
            guard += 1;
            if t_max_x < t_max_y {
                t_max_x += inv_dx;
                xi += step_x;
            } else {
                t_max_y += inv_dy;
                yi += step_y;
            }
        }
    }

    pub fn draw_polyline(&mut self, points: &[Complex64]) {
        for w in points.windows(2) {
            self.draw_segment(w[0], w[1]);
        }
    }

    /// Indices of occupied cells.
    pub fn occupied(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.n;
        self.cells
            .iter()
            .enumerate()
            .filter(|(_, c)| **c)
            .map(move |(k, _)| (k / n, k % n))
    }
}

/// Plain union-find over cell indices.
pub struct DisjointSets {
    parent: Vec<u32>,
    rank: Vec<u8>,
}

impl DisjointSets {
    pub fn new(n: usize) -> Self {
        DisjointSets {
            parent: (0..n as u32).collect(),
            rank: vec![0; n],
        }
    }

    pub fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] as usize != root {
            root = self.parent[root] as usize;
        }
        let mut cur = x;
        while self.parent[cur] as usize != root {
            let next = self.parent[cur] as usize;
            self.parent[cur] = root as u32;
            cur = next;
        }
        root
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb as u32,
            std::cmp::Ordering::Greater => self.parent[rb] = ra as u32,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra as u32;
                self.rank[ra] += 1;
            }
        }
    }
}

pub const NEIGHBORS_8: [(isize, isize); 8] = [
    (-1, -1),
    (-1, 0),
    (-1, 1),
    (0, -1),
    (0, 1),
    (1, -1),
    (1, 0),
    (1, 1),
];

pub const NEIGHBORS_4: [(isize, isize); 4] = [(-1, 0), (0, -1), (0, 1), (1, 0)];

/// Label 8-connected components of the occupied cells; returns a map from
/// cell index to component id and the number of components.
pub fn components_8(grid: &OccupancyGrid) -> (Vec<u32>, usize) {
    let n = grid.n;
    let mut ds = DisjointSets::new(n * n);
    for (i, j) in grid.occupied() {
        for (di, dj) in NEIGHBORS_8 {
            let (ni, nj) = (i as isize + di, j as isize + dj);
            if ni >= 0 && nj >= 0 && (ni as usize) < n && (nj as usize) < n && grid.get(ni as usize, nj as usize)
            {
                ds.union(i * n + j, ni as usize * n + nj as usize);
            }
        }
    }
    let mut labels = vec![u32::MAX; n * n];
    let mut next = 0u32;
    let mut remap = std::collections::HashMap::new();
    for (i, j) in grid.occupied() {
        let root = ds.find(i * n + j);
        let id = *remap.entry(root).or_insert_with(|| {
            let id = next;
            next += 1;
            id
        });
        labels[i * n + j] = id;
    }
    (labels, next as usize)
}

/// 4-connected flood fill over cells where `free` holds, from the seeds.
/// Returns the membership mask of the filled region.
pub fn flood_fill_4<F: Fn(usize, usize) -> bool>(
    n: usize,
    seeds: &[(usize, usize)],
    free: F,
) -> Vec<bool> {
    let mut member = vec![false; n * n];
    let mut stack = Vec::with_capacity(n);
    for &(i, j) in seeds {
        if i < n && j < n && free(i, j) && !member[i * n + j] {
            member[i * n + j] = true;
            stack.push((i, j));
        }
    }
    while let Some((i, j)) = stack.pop() {
        for (di, dj) in NEIGHBORS_4 {
            let (ni, nj) = (i as isize + di, j as isize + dj);
            if ni < 0 || nj < 0 || ni >= n as isize || nj >= n as isize {
                continue;
            }
            let (ni, nj) = (ni as usize, nj as usize);
            if !member[ni * n + nj] && free(ni, nj) {
                member[ni * n + nj] = true;
                stack.push((ni, nj));
            }
        }
    }
    member
}

/// Moore-neighbor contour trace of the region where `inside` holds,
/// starting from a boundary cell of the region whose west neighbor is
/// outside. Returns the closed cycle of boundary cells in traversal order
/// (Jacob's stopping criterion).
pub fn moore_trace<F: Fn(isize, isize) -> bool>(
    n: usize,
    start: (usize, usize),
    inside: F,
) -> Vec<(usize, usize)> {
    // Moore neighborhood in clockwise order (screen coordinates with rows
    // growing downward are irrelevant here; only cyclic consistency matters)
    const ORDER: [(isize, isize); 8] = [
        (0, -1),  // W
        (-1, -1), // SW (row -1)
        (-1, 0),  // S
        (-1, 1),  // SE
        (0, 1),   // E
        (1, 1),   // NE
        (1, 0),   // N
        (1, -1),  // NW
    ];
    let dir_of = |from: (isize, isize), to: (isize, isize)| -> usize {
        let d = (to.0 - from.0, to.1 - from.1);
        ORDER.iter().position(|&o| o == d).expect("neighbor offset")
    };
    let inside_b = |p: (isize, isize)| -> bool {
        p.0 >= 0 && p.1 >= 0 && p.0 < n as isize && p.1 < n as isize && inside(p.0, p.1)
    };
    let s = (start.0 as isize, start.1 as isize);
    debug_assert!(inside_b(s));
    let mut cycle = vec![start];
    let mut cur = s;
    // backtrack = the outside cell we "came from"; start scanning there
    let mut backtrack = (s.0, s.1 - 1);
    let mut first: Option<((isize, isize), (isize, isize))> = None; // (cell, entered-from)
    let cap = 8 * n * n;
    loop {
        let start_dir = dir_of(cur, backtrack);
        let mut next = None;
        let mut prev_scanned = backtrack;
        for k in 1..=8 {
            let dir = (start_dir + k) % 8;
            let cand = (cur.0 + ORDER[dir].0, cur.1 + ORDER[dir].1);
            if inside_b(cand) {
                next = Some((cand, prev_scanned));
                break;
            }
            prev_scanned = cand;
        }
        let (next, came_from) = match next {
            Some(x) => x,
            None => return cycle, // isolated cell
        };
        match first {
            None => first = Some((next, came_from)),
            Some((fc, ff)) => {
                if next == fc && came_from == ff && cycle.len() > 1 {
                    break;
                }
            }
        }
        cycle.push((next.0 as usize, next.1 as usize));
        if cycle.len() > cap {
            break;
        }
        backtrack = came_from;
        cur = next;
    }
    // drop the duplicated re-entry of the start cell
    if cycle.len() > 1 && cycle.last() == cycle.first() {
        cycle.pop();
    }
    cycle
}

/// Winding-number point-in-polygon test for a closed polyline.
pub fn point_in_polygon(p: Complex64, poly: &[Complex64]) -> bool {
    let mut winding = 0i32;
    let n = poly.len();
    for k in 0..n {
        let a = poly[k];
        let b = poly[(k + 1) % n];
        if a.im <= p.im {
            if b.im > p.im && cross(a, b, p) > 0.0 {
                winding += 1;
            }
        } else if b.im <= p.im && cross(a, b, p) < 0.0 {
            winding -= 1;
        }
    }
    winding != 0
}

fn cross(o: Complex64, a: Complex64, b: Complex64) -> f64 {
    (a.re - o.re) * (b.im - o.im) - (a.im - o.im) * (b.re - o.re)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn segment_rasterization_is_connected_and_hits_endpoints() {
        let mut g = OccupancyGrid::new(64);
        let a = c(-0.8, -0.3);
        let b = c(0.6, 0.7);
        g.draw_segment(a, b);
        let ca = g.locate(a).unwrap();
        let cb = g.locate(b).unwrap();
        assert!(g.get(ca.0, ca.1));
        assert!(g.get(cb.0, cb.1));
        let (labels, ncomp) = components_8(&g);
        assert_eq!(ncomp, 1, "segment must be one component");
        assert!(labels[ca.0 * 64 + ca.1] == labels[cb.0 * 64 + cb.1]);
    }

    #[test]
    fn components_split_disjoint_blobs() {
        let mut g = OccupancyGrid::new(32);
        g.draw_segment(c(-0.9, -0.9), c(-0.5, -0.5));
        g.draw_segment(c(0.5, 0.5), c(0.9, 0.9));
        let (_, ncomp) = components_8(&g);
        assert_eq!(ncomp, 2);
    }

    #[test]
    fn flood_fill_respects_walls() {
        // vertical wall splits the box
        let n = 32;
        let mut wall = OccupancyGrid::new(n);
        wall.draw_segment(c(0.0, -1.0), c(0.0, 1.0));
        let member = flood_fill_4(n, &[(1, 1)], |i, j| !wall.get(i, j));
        assert!(member[1 * n + 1]);
        // a cell on the far right must be unreachable
        let far = wall.locate(c(0.9, 0.0)).unwrap();
        assert!(!member[far.0 * n + far.1]);
    }

    #[test]
    fn moore_trace_walks_a_square_boundary() {
        let n = 16;
        let inside = |i: isize, j: isize| (4..=9).contains(&i) && (4..=9).contains(&j);
        let cycle = moore_trace(n, (4, 4), |i, j| inside(i, j));
        // the boundary of a 6x6 block has 20 cells
        let mut uniq: Vec<(usize, usize)> = cycle.clone();
        uniq.sort();
        uniq.dedup();
        assert_eq!(uniq.len(), 20, "cycle {cycle:?}");
        for (i, j) in uniq {
            assert!(inside(i as isize, j as isize));
            let edge = i == 4 || i == 9 || j == 4 || j == 9;
            assert!(edge);
        }
    }

    #[test]
    fn winding_test_basic() {
        let square = vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 1.0), c(0.0, 1.0)];
        assert!(point_in_polygon(c(0.5, 0.5), &square));
        assert!(!point_in_polygon(c(1.5, 0.5), &square));
    }
}
