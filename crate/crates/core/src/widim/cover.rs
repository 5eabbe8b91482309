//! Closed grid-aligned box covers of the cube `[0, 1]^N` and their order.
//!
//! Box endpoints lie on the grid `k / G`. Two closed grid boxes intersect
//! exactly when they share a point of the half-step lattice `k / (2G)`, and
//! a family of boxes covers the cube exactly when every open grid cell lies
//! in one of them, so both the covering test and the multiplicity are exact
//! computations on that lattice.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default number of box-grid steps per cube-grid step.
pub const DEFAULT_REFINEMENT: u32 = 2;
/// Default cap on search nodes.
pub const DEFAULT_NODE_GUARD: u64 = 1_000_000;

/// The cube `[0, 1]^N` with grid points `k / m` on each axis and the sup
/// metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridCube {
    pub dim: usize,
    pub m: u32,
}

impl GridCube {
    pub fn new(dim: usize, m: u32) -> Result<Self> {
        if dim == 0 || m == 0 {
            return Err(Error::InvalidInput("cube needs N >= 1 and m >= 1".into()));
        }
        Ok(Self { dim, m })
    }
}

/// Product of closed intervals `[lo_d / G, hi_d / G]`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GridBox {
    pub lo: Vec<u32>,
    pub hi: Vec<u32>,
}

impl GridBox {
    /// Largest side length in grid units.
    pub fn max_side(&self) -> u32 {
        self.lo.iter().zip(&self.hi).map(|(a, b)| b - a).max().unwrap_or(0)
    }
}

/// A finite family of grid boxes in `[0, 1]^N` with denominator `G`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridBoxCover {
    pub dim: usize,
    pub denominator: u32,
    pub boxes: Vec<GridBox>,
}

impl GridBoxCover {
    pub fn new(dim: usize, denominator: u32, boxes: Vec<GridBox>) -> Result<Self> {
        if dim == 0 || denominator == 0 {
            return Err(Error::InvalidInput("cover needs N >= 1 and G >= 1".into()));
        }
        for b in &boxes {
            if b.lo.len() != dim || b.hi.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: b.lo.len().min(b.hi.len()),
                });
            }
            if b.lo.iter().zip(&b.hi).any(|(a, c)| a > c || *c > denominator) {
                return Err(Error::InvalidInput(format!("box {b:?} is empty or leaves the cube")));
            }
        }
        Ok(Self {
            dim,
            denominator,
            boxes,
        })
    }

    /// Builds a cover from real intervals, each endpoint a multiple of
    /// `1 / denominator`.
    pub fn from_intervals(dim: usize, denominator: u32, boxes: &[Vec<(f64, f64)>]) -> Result<Self> {
        let snap = |x: f64| -> Result<u32> {
            let k = (x * denominator as f64).round();
            if (k - x * denominator as f64).abs() > 1e-9 || k < 0.0 {
                return Err(Error::InvalidInput(format!("{x} is not on the grid 1/{denominator}")));
            }
            Ok(k as u32)
        };
        let boxes = boxes
            .iter()
            .map(|b| {
                Ok(GridBox {
                    lo: b.iter().map(|p| snap(p.0)).collect::<Result<_>>()?,
                    hi: b.iter().map(|p| snap(p.1)).collect::<Result<_>>()?,
                })
            })
            .collect::<Result<_>>()?;
        Self::new(dim, denominator, boxes)
    }

    /// Largest box diameter in the sup metric.
    pub fn mesh(&self) -> f64 {
        self.boxes.iter().map(|b| b.max_side()).max().unwrap_or(0) as f64 / self.denominator as f64
    }

    /// Boxes as real intervals.
    pub fn intervals(&self) -> Vec<Vec<(f64, f64)>> {
        let g = self.denominator as f64;
        self.boxes
            .iter()
            .map(|b| b.lo.iter().zip(&b.hi).map(|(&a, &c)| (a as f64 / g, c as f64 / g)).collect())
            .collect()
    }
}

/// Points of the half-step lattice, as coordinates in units of `1 / (2G)`.
struct HalfLattice {
    dim: usize,
    side: usize,
}

impl HalfLattice {
    fn new(dim: usize, g: u32) -> Result<Self> {
        let side = 2 * g as usize + 1;
        let total = (side as f64).powi(dim as i32);
        if total > 5e7 {
            return Err(Error::InvalidInput(format!(
                "refinement lattice of {total} points is too large"
            )));
        }
        Ok(Self { dim, side })
    }

    fn len(&self) -> usize {
        self.side.pow(self.dim as u32)
    }

    fn coords(&self, mut idx: usize) -> Vec<u32> {
        let mut c = vec![0; self.dim];
        for d in (0..self.dim).rev() {
            c[d] = (idx % self.side) as u32;
            idx /= self.side;
        }
        c
    }

    /// Indices of the half-lattice points inside the closed box.
    fn points_in(&self, b: &GridBox, out: &mut Vec<usize>) {
        out.clear();
        out.push(0);
        for d in 0..self.dim {
            let (lo, hi) = (2 * b.lo[d] as usize, 2 * b.hi[d] as usize);
            let prev = std::mem::take(out);
            for base in prev {
                for x in lo..=hi {
                    out.push(base * self.side + x);
                }
            }
        }
    }
}

fn multiplicities(cover: &GridBoxCover, lattice: &HalfLattice) -> Vec<u32> {
    let mut mult = vec![0u32; lattice.len()];
    let mut buf = Vec::new();
    for b in &cover.boxes {
        lattice.points_in(b, &mut buf);
        for &i in &buf {
            mult[i] += 1;
        }
    }
    mult
}

/// Largest number of boxes sharing a point, minus one.
///
/// A point not covered is reported in units of `1 / (2G)`.
pub fn cover_order(cover: &GridBoxCover) -> Result<u32> {
    let lattice = HalfLattice::new(cover.dim, cover.denominator)?;
    let mult = multiplicities(cover, &lattice);
    if let Some(i) = mult.iter().position(|&m| m == 0) {
        return Err(Error::Uncovered(lattice.coords(i)));
    }
    Ok(mult.iter().copied().max().unwrap_or(0) - 1)
}

/// Minimum order over covers by non-degenerate closed grid boxes of side at
/// most `eps`, with a witness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinOrderResult {
    pub order: u32,
    pub cover: GridBoxCover,
    pub nodes: u64,
    pub epsilon: f64,
}

/// [`min_order_box_cover_with`] on the half-step box grid and the default
/// node guard.
pub fn min_order_box_cover(cube: &GridCube, eps: f64) -> Result<MinOrderResult> {
    min_order_box_cover_with(cube, eps, DEFAULT_REFINEMENT, DEFAULT_NODE_GUARD)
}

/// Exact minimum of the cover order over covers of `[0, 1]^N` by closed
/// boxes with endpoints on `k / (refinement m)` and side at most `eps`.
///
/// For each order bound `K = 0, 1, ...` a depth-first search tries to cover
/// the first uncovered cell (in lexicographic order) by every admissible box
/// containing it, never letting a half-lattice point lie in more than `K + 1`
/// boxes. The first feasible bound is the minimum. The search is sequential
/// and its branch order is fixed, so the witness is deterministic.
pub fn min_order_box_cover_with(
    cube: &GridCube,
    eps: f64,
    refinement: u32,
    node_guard: u64,
) -> Result<MinOrderResult> {
    if !(eps > 0.0) {
        return Err(Error::InvalidInput(format!("mesh bound {eps} must be positive")));
    }
    if refinement == 0 {
        return Err(Error::InvalidInput("refinement must be at least 1".into()));
    }
    let dim = cube.dim;
    let g = cube.m * refinement;
    if eps >= 1.0 {
        let cover = GridBoxCover::new(
            dim,
            g,
            vec![GridBox {
                lo: vec![0; dim],
                hi: vec![g; dim],
            }],
        )?;
        return Ok(MinOrderResult {
            order: 0,
            cover,
            nodes: 1,
            epsilon: eps,
        });
    }
    let max_side = (eps * g as f64 + 1e-9).floor() as u32;
    if max_side == 0 {
        return Err(Error::InvalidInput(format!(
            "no grid box of positive side fits the mesh bound {eps} on the grid 1/{g}"
        )));
    }
    let lattice = HalfLattice::new(dim, g)?;
    let mut search = Search {
        dim,
        g,
        max_side,
        lattice: &lattice,
        mult: vec![0; lattice.len()],
        covered: vec![0; (g as usize).pow(dim as u32)],
        chosen: Vec::new(),
        nodes: 0,
        guard: node_guard,
        cap: 0,
        buf: Vec::new(),
    };
    let mut nodes = 0;
    for order in 0..(1u32 << dim) {
        search.cap = order + 1;
        search.nodes = 0;
        let found = search.run()?;
        nodes += search.nodes;
        if found {
            let cover = GridBoxCover::new(dim, g, search.chosen.clone())?;
            return Ok(MinOrderResult {
                order,
                cover,
                nodes,
                epsilon: eps,
            });
        }
    }
    unreachable!("the cover by grid cells has order 2^N - 1")
}

struct Search<'a> {
    dim: usize,
    g: u32,
    max_side: u32,
    lattice: &'a HalfLattice,
    mult: Vec<u32>,
    /// Number of chosen boxes containing each cell (cells indexed
    /// row-major by their lower corner).
    covered: Vec<u32>,
    chosen: Vec<GridBox>,
    nodes: u64,
    guard: u64,
    cap: u32,
    buf: Vec<usize>,
}

impl Search<'_> {
    fn run(&mut self) -> Result<bool> {
        self.mult.iter_mut().for_each(|m| *m = 0);
        self.covered.iter_mut().for_each(|c| *c = 0);
        self.chosen.clear();
        self.dfs(0)
    }

    fn cell_coords(&self, mut idx: usize) -> Vec<u32> {
        let g = self.g as usize;
        let mut c = vec![0; self.dim];
        for d in (0..self.dim).rev() {
            c[d] = (idx % g) as u32;
            idx /= g;
        }
        c
    }

    /// Boxes containing the cell with lower corner `cell`: larger boxes
    /// first, then boxes starting further along each axis.
    fn candidates(&self, cell: &[u32]) -> Vec<GridBox> {
        let mut per_axis: Vec<Vec<(u32, u32)>> = Vec::with_capacity(self.dim);
        for &c in cell {
            let mut iv = Vec::new();
            for len in (1..=self.max_side).rev() {
                for lo in (c + 1).saturating_sub(len)..=c {
                    let hi = lo + len;
                    if hi <= self.g && lo <= c && c < hi {
                        iv.push((lo, hi));
                    }
                }
            }
            // larger first, then the one starting at the cell
            iv.sort_by(|a, b| (b.1 - b.0).cmp(&(a.1 - a.0)).then(b.0.cmp(&a.0)));
            per_axis.push(iv);
        }
        let mut out = vec![GridBox {
            lo: Vec::new(),
            hi: Vec::new(),
        }];
        for iv in &per_axis {
            let prev = std::mem::take(&mut out);
            for b in prev {
                for &(lo, hi) in iv {
                    let mut nb = b.clone();
                    nb.lo.push(lo);
                    nb.hi.push(hi);
                    out.push(nb);
                }
            }
        }
        out
    }

    fn cells_of(&self, b: &GridBox) -> Vec<usize> {
        let g = self.g as usize;
        let mut out = vec![0usize];
        for d in 0..self.dim {
            let prev = std::mem::take(&mut out);
            for base in prev {
                for x in b.lo[d]..b.hi[d] {
                    out.push(base * g + x as usize);
                }
            }
        }
        out
    }

    fn dfs(&mut self, start: usize) -> Result<bool> {
        self.nodes += 1;
        if self.nodes > self.guard {
            return Err(Error::SearchGuardExceeded { limit: self.guard });
        }
        let Some(first) = (start..self.covered.len()).find(|&i| self.covered[i] == 0) else {
            return Ok(true);
        };
        let cell = self.cell_coords(first);
        for b in self.candidates(&cell) {
            let mut pts = std::mem::take(&mut self.buf);
            self.lattice.points_in(&b, &mut pts);
            let fits = pts.iter().all(|&i| self.mult[i] < self.cap);
            if fits {
                pts.iter().for_each(|&i| self.mult[i] += 1);
                let cells = self.cells_of(&b);
                cells.iter().for_each(|&c| self.covered[c] += 1);
                self.chosen.push(b);
                let saved = pts.clone();
                self.buf = pts;
                if self.dfs(first + 1)? {
                    return Ok(true);
                }
                self.chosen.pop();
                saved.iter().for_each(|&i| self.mult[i] -= 1);
                cells.iter().for_each(|&c| self.covered[c] -= 1);
            } else {
                self.buf = pts;
            }
        }
        Ok(false)
    }
}
