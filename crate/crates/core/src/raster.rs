//! Sampled nearest/furthest two-site Voronoi diagrams.
//!
//! A diagram is the argmin (nearest) or argmax (furthest) of the pair
//! distance surfaces, evaluated at the center of every grid cell. Rows are
//! evaluated in parallel; each cell depends only on its own sample point, so
//! the result does not depend on the number of workers.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distances::{eval_unchecked, DistanceKind, DistanceSpec, SitePair};
use crate::error::{GeomError, Result};
use crate::geom::Point2;
use crate::neighbors::delaunay;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    Nearest,
    Furthest,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Nearest => "nearest",
            Mode::Furthest => "furthest",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = GeomError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nearest" => Ok(Mode::Nearest),
            "furthest" => Ok(Mode::Furthest),
            other => Err(GeomError::InvalidParameter(format!("unknown mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BBox {
    pub xmin: f64,
    pub ymin: f64,
    pub xmax: f64,
    pub ymax: f64,
}

impl BBox {
    pub fn new(xmin: f64, ymin: f64, xmax: f64, ymax: f64) -> Result<Self> {
        let b = BBox { xmin, ymin, xmax, ymax };
        if !(xmin < xmax && ymin < ymax) || ![xmin, ymin, xmax, ymax].iter().all(|v| v.is_finite()) {
            return Err(GeomError::InvalidParameter(format!("invalid bounding box {b:?}")));
        }
        Ok(b)
    }

    /// Bounding box of the sites, inflated by `margin` of its extent on every
    /// side. A zero extent along one axis borrows the other axis' extent.
    pub fn around(sites: &[Point2], margin: f64) -> Result<Self> {
        if sites.is_empty() {
            return Err(GeomError::DegenerateInput("no sites".into()));
        }
        let (mut xmin, mut ymin) = (f64::INFINITY, f64::INFINITY);
        let (mut xmax, mut ymax) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in sites {
            xmin = xmin.min(p.x);
            xmax = xmax.max(p.x);
            ymin = ymin.min(p.y);
            ymax = ymax.max(p.y);
        }
        let (mut w, mut h) = (xmax - xmin, ymax - ymin);
        if w <= 0.0 && h <= 0.0 {
            w = 1.0;
            h = 1.0;
        } else if w <= 0.0 {
            w = h;
        } else if h <= 0.0 {
            h = w;
        }
        let (cx, cy) = (0.5 * (xmin + xmax), 0.5 * (ymin + ymax));
        let (hw, hh) = (0.5 * w + margin * w, 0.5 * h + margin * h);
        BBox::new(cx - hw, cy - hh, cx + hw, cy + hh)
    }

    pub fn contains(&self, p: Point2) -> bool {
        p.x >= self.xmin && p.x <= self.xmax && p.y >= self.ymin && p.y <= self.ymax
    }
}

/// Sampling grid over a bounding box. Row 0 is the bottom row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub bbox: BBox,
    pub width: usize,
    pub height: usize,
    /// Sample cell centers (half-cell offset) and nudge any sample landing
    /// exactly on a site. Without it, cells are sampled at their lower-left
    /// corner.
    pub jitter: bool,
}

/// Default inflation of the site bounding box per side.
pub const DEFAULT_MARGIN: f64 = 0.25;
pub const DEFAULT_GRID: usize = 512;

impl GridSpec {
    pub fn new(bbox: BBox, width: usize, height: usize) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(GeomError::InvalidParameter("grid dimensions must be positive".into()));
        }
        Ok(GridSpec { bbox, width, height, jitter: true })
    }

    /// `width x height` grid over the site box inflated by 25% per side.
    pub fn around_sites(sites: &[Point2], width: usize, height: usize) -> Result<Self> {
        GridSpec::new(BBox::around(sites, DEFAULT_MARGIN)?, width, height)
    }

    pub fn dx(&self) -> f64 {
        (self.bbox.xmax - self.bbox.xmin) / self.width as f64
    }

    pub fn dy(&self) -> f64 {
        (self.bbox.ymax - self.bbox.ymin) / self.height as f64
    }

    pub fn cell_diagonal(&self) -> f64 {
        self.dx().hypot(self.dy())
    }

    pub fn cells(&self) -> usize {
        self.width * self.height
    }

    /// Sample point of cell `(row, col)`, before any site nudge.
    pub fn sample(&self, row: usize, col: usize) -> Point2 {
        let off = if self.jitter { 0.5 } else { 0.0 };
        Point2::new(self.bbox.xmin + (col as f64 + off) * self.dx(), self.bbox.ymin + (row as f64 + off) * self.dy())
    }

    /// Sample point actually evaluated for a cell.
    pub fn sample_avoiding(&self, row: usize, col: usize, sites: &[Point2]) -> Point2 {
        let v = self.sample(row, col);
        if self.jitter && sites.contains(&v) {
            Point2::new(v.x + 1e-6 * self.dx(), v.y + 1e-6 * self.dy())
        } else {
            v
        }
    }

    /// Cell containing `p`, if inside the box.
    pub fn cell_of(&self, p: Point2) -> Option<(usize, usize)> {
        if !self.bbox.contains(p) {
            return None;
        }
        let col = (((p.x - self.bbox.xmin) / self.dx()) as usize).min(self.width - 1);
        let row = (((p.y - self.bbox.ymin) / self.dy()) as usize).min(self.height - 1);
        Some((row, col))
    }
}

/// Marks cells where every candidate is undefined.
pub const UNDEFINED: u32 = u32::MAX;

/// Relative tolerance under which two pair values count as tied.
pub const TIE_REL_TOL: f64 = 1e-12;

pub fn is_tie(a: f64, b: f64) -> bool {
    if a.is_infinite() || b.is_infinite() {
        return a == b;
    }
    (a - b).abs() <= TIE_REL_TOL * a.abs().max(b.abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CellLabel {
    /// Index into the diagram's candidates.
    Owner(u32),
    /// Several candidates agree within tolerance; carries the
    /// lexicographically smallest of them.
    Tie(u32),
    Undefined,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RasterDiagram {
    pub grid: GridSpec,
    pub mode: Mode,
    pub spec: DistanceSpec,
    pub candidates: Vec<SitePair>,
    /// Row-major winning candidate index (tie-break winner on ties), or
    /// [`UNDEFINED`].
    pub owner: Vec<u32>,
    pub tie: Vec<bool>,
}

impl RasterDiagram {
    pub fn width(&self) -> usize {
        self.grid.width
    }

    pub fn height(&self) -> usize {
        self.grid.height
    }

    pub fn label(&self, row: usize, col: usize) -> CellLabel {
        self.label_at(row * self.grid.width + col)
    }

    pub fn label_at(&self, idx: usize) -> CellLabel {
        match self.owner[idx] {
            UNDEFINED => CellLabel::Undefined,
            o if self.tie[idx] => CellLabel::Tie(o),
            o => CellLabel::Owner(o),
        }
    }

    /// Pair shown for a cell: the owner or the tie-break winner.
    pub fn pair_at(&self, row: usize, col: usize) -> Option<SitePair> {
        match self.owner[row * self.grid.width + col] {
            UNDEFINED => None,
            o => Some(self.candidates[o as usize]),
        }
    }

    /// Pairs owning at least one cell outright (tie cells excluded).
    pub fn non_empty_pairs(&self) -> BTreeSet<SitePair> {
        let mut seen = vec![false; self.candidates.len()];
        for (idx, &o) in self.owner.iter().enumerate() {
            if o != UNDEFINED && !self.tie[idx] {
                seen[o as usize] = true;
            }
        }
        seen.iter().enumerate().filter(|(_, &s)| s).map(|(k, _)| self.candidates[k]).collect()
    }

    /// Per-cell owning pairs, for comparing diagrams built from different
    /// candidate lists.
    pub fn pair_grid(&self) -> Vec<Option<SitePair>> {
        self.owner.iter().map(|&o| (o != UNDEFINED).then(|| self.candidates[o as usize])).collect()
    }

    /// Number of cells whose pair or tie flag differs from `other`.
    pub fn mismatched_cells(&self, other: &RasterDiagram) -> usize {
        assert_eq!(self.owner.len(), other.owner.len(), "rasters of different size");
        self.pair_grid()
            .iter()
            .zip(other.pair_grid())
            .zip(self.tie.iter().zip(&other.tie))
            .filter(|((a, b), (ta, tb))| **a != *b || ta != tb)
            .count()
    }

    /// Raw bytes of the labeling, used to compare rasters bit for bit.
    pub fn label_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.owner.len() * 5);
        for (o, t) in self.owner.iter().zip(&self.tie) {
            out.extend_from_slice(&o.to_le_bytes());
            out.push(*t as u8);
        }
        out
    }
}

/// Whether the Delaunay-edge restriction is known to leave the diagram
/// unchanged for this distance and mode.
pub fn pruning_applies(spec: DistanceSpec, mode: Mode) -> bool {
    mode == Mode::Nearest
        && match spec.kind {
            DistanceKind::ContainingRadius => true,
            DistanceKind::ParamPerimeter => spec.c >= 0.0,
            _ => false,
        }
}

/// Pairs that can own a region: Delaunay edges where pruning is sound,
/// otherwise every pair. Falls back to every pair when the sites admit no
/// triangulation (fewer than three, or all collinear).
pub fn candidate_pairs(sites: &[Point2], spec: DistanceSpec, mode: Mode) -> Vec<SitePair> {
    if pruning_applies(spec, mode) && sites.len() >= 3 {
        if let Ok(tri) = delaunay(sites) {
            return tri.edges.into_iter().collect();
        }
    }
    SitePair::all(sites.len())
}

/// Diagram over the default candidate set of [`candidate_pairs`].
pub fn compute_raster(sites: &[Point2], spec: DistanceSpec, mode: Mode, grid: GridSpec) -> Result<RasterDiagram> {
    if sites.len() < 2 {
        return Err(GeomError::DegenerateInput(format!("need at least 2 sites, got {}", sites.len())));
    }
    let candidates = candidate_pairs(sites, spec, mode);
    compute_raster_with_candidates(sites, spec, mode, grid, candidates)
}

pub fn compute_raster_with_candidates(
    sites: &[Point2],
    spec: DistanceSpec,
    mode: Mode,
    grid: GridSpec,
    candidates: Vec<SitePair>,
) -> Result<RasterDiagram> {
    spec.validate()?;
    if candidates.is_empty() {
        return Err(GeomError::EmptyCandidates);
    }
    if let Some(bad) = candidates.iter().find(|c| c.j >= sites.len()) {
        return Err(GeomError::InvalidParameter(format!("candidate {bad} out of range")));
    }
    if let Some(bad) = candidates.iter().find(|c| sites[c.i] == sites[c.j]) {
        return Err(GeomError::DegenerateInput(format!("candidate {bad} joins coincident sites")));
    }
    let kernel = Kernel::new(sites, spec, mode, &candidates);
    let width = grid.width;
    let mut owner = vec![UNDEFINED; grid.cells()];
    let mut tie = vec![false; grid.cells()];
    owner.par_chunks_mut(width).zip(tie.par_chunks_mut(width)).enumerate().for_each(|(row, (owner_row, tie_row))| {
        let mut scratch = Scratch::new(sites.len(), candidates.len());
        for col in 0..width {
            let v = grid.sample_avoiding(row, col, sites);
            let (o, t) = kernel.cell(v, &mut scratch);
            owner_row[col] = o;
            tie_row[col] = t;
        }
    });
    Ok(RasterDiagram { grid, mode, spec, candidates, owner, tie })
}

/// Run `f` on a dedicated pool of `threads` workers.
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build().expect("failed to build thread pool").install(f)
}

struct Scratch {
    dist: Vec<f64>,
    values: Vec<(u32, f64)>,
    last: u32,
}

impl Scratch {
    fn new(n: usize, m: usize) -> Self {
        Scratch { dist: vec![0.0; n], values: Vec::with_capacity(m), last: 0 }
    }
}

struct Kernel<'a> {
    sites: &'a [Point2],
    spec: DistanceSpec,
    mode: Mode,
    candidates: &'a [SitePair],
    lengths: Vec<f64>,
}

impl<'a> Kernel<'a> {
    fn new(sites: &'a [Point2], spec: DistanceSpec, mode: Mode, candidates: &'a [SitePair]) -> Self {
        let lengths = candidates.iter().map(|c| sites[c.i].dist(sites[c.j])).collect();
        Kernel { sites, spec, mode, candidates, lengths }
    }

    fn eval(&self, k: usize, v: Point2) -> Option<f64> {
        let c = self.candidates[k];
        eval_unchecked(self.spec, v, self.sites[c.i], self.sites[c.j])
    }

    /// Winning candidate and tie flag for one sample point.
    fn cell(&self, v: Point2, scratch: &mut Scratch) -> (u32, bool) {
        scratch.values.clear();
        match (self.spec.kind, self.mode) {
            (DistanceKind::ParamPerimeter, _) => {
                for (d, s) in scratch.dist.iter_mut().zip(self.sites) {
                    *d = v.dist(*s);
                }
                let c = self.spec.c;
                for (k, pair) in self.candidates.iter().enumerate() {
                    // same operations, in the same order, as `eval_unchecked`
                    let value = (scratch.dist[pair.i] + scratch.dist[pair.j] + c * self.lengths[k]).max(0.0);
                    scratch.values.push((k as u32, value));
                }
            }
            (DistanceKind::ContainingRadius, Mode::Nearest) => {
                // half the longest side bounds the enclosing radius from below,
                // which lets most pairs be skipped without changing the result
                for (d, s) in scratch.dist.iter_mut().zip(self.sites) {
                    *d = v.dist(*s);
                }
                let first = (scratch.last as usize).min(self.candidates.len() - 1);
                let mut best = self.eval(first, v).unwrap_or(f64::INFINITY);
                let cutoff = |best: f64| best * (1.0 + 1e-9);
                for (k, pair) in self.candidates.iter().enumerate() {
                    let bound = 0.5 * self.lengths[k].max(scratch.dist[pair.i]).max(scratch.dist[pair.j]);
                    if bound > cutoff(best) {
                        continue;
                    }
                    if let Some(value) = self.eval(k, v) {
                        best = best.min(value);
                        scratch.values.push((k as u32, value));
                    }
                }
            }
            _ => {
                for k in 0..self.candidates.len() {
                    if let Some(value) = self.eval(k, v) {
                        scratch.values.push((k as u32, value));
                    }
                }
            }
        }
        let Some(best) = scratch.values.iter().map(|&(_, x)| x).reduce(|a, b| match self.mode {
            Mode::Nearest => a.min(b),
            Mode::Furthest => a.max(b),
        }) else {
            return (UNDEFINED, false);
        };
        let mut winner: Option<u32> = None;
        let mut tied = 0usize;
        for &(k, x) in &scratch.values {
            if is_tie(x, best) {
                tied += 1;
                if winner.is_none_or(|w| self.candidates[k as usize] < self.candidates[w as usize]) {
                    winner = Some(k);
                }
            }
        }
        let winner = winner.expect("the optimum ties with itself");
        scratch.last = winner;
        (winner, tied > 1)
    }
}

/// Per-pair region measurements.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairStats {
    pub i: usize,
    pub j: usize,
    pub cells: usize,
    pub components: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RegionStats {
    pub non_empty_pairs: usize,
    pub tie_cells: usize,
    pub undefined_cells: usize,
    /// 2x2 windows showing at least three distinct labels.
    pub raster_vertices: usize,
    /// Pairs owning at least one cell, in lexicographic order.
    pub per_pair: Vec<PairStats>,
}

/// Cell counts and 4-connected component counts per pair. Tie and undefined
/// cells count as their own labels.
pub fn region_stats(raster: &RasterDiagram) -> RegionStats {
    let (w, h) = (raster.width(), raster.height());
    let m = raster.candidates.len();
    let mut cells = vec![0usize; m];
    let mut components = vec![0usize; m];
    let mut tie_cells = 0;
    let mut undefined_cells = 0;
    let mut visited = vec![false; w * h];
    let mut stack = Vec::new();
    for idx in 0..w * h {
        let label = raster.label_at(idx);
        let k = match label {
            CellLabel::Owner(k) => k as usize,
            CellLabel::Tie(_) => {
                tie_cells += 1;
                continue;
            }
            CellLabel::Undefined => {
                undefined_cells += 1;
                continue;
            }
        };
        cells[k] += 1;
        if visited[idx] {
            continue;
        }
        components[k] += 1;
        visited[idx] = true;
        stack.push(idx);
        while let Some(cur) = stack.pop() {
            let (r, c) = (cur / w, cur % w);
            let mut push = |n: usize| {
                if !visited[n] && raster.label_at(n) == label {
                    visited[n] = true;
                    stack.push(n);
                }
            };
            if r > 0 {
                push(cur - w);
            }
            if r + 1 < h {
                push(cur + w);
            }
            if c > 0 {
                push(cur - 1);
            }
            if c + 1 < w {
                push(cur + 1);
            }
        }
    }

    let mut raster_vertices = 0;
    for r in 0..h.saturating_sub(1) {
        for c in 0..w.saturating_sub(1) {
            let window =
                [raster.label(r, c), raster.label(r, c + 1), raster.label(r + 1, c), raster.label(r + 1, c + 1)];
            let mut distinct: Vec<CellLabel> = Vec::with_capacity(4);
            for l in window {
                if !distinct.contains(&l) {
                    distinct.push(l);
                }
            }
            if distinct.len() >= 3 {
                raster_vertices += 1;
            }
        }
    }

    let mut order: Vec<usize> = (0..m).filter(|&k| cells[k] > 0).collect();
    order.sort_by_key(|&k| raster.candidates[k]);
    let per_pair: Vec<PairStats> = order
        .into_iter()
        .map(|k| PairStats {
            i: raster.candidates[k].i,
            j: raster.candidates[k].j,
            cells: cells[k],
            components: components[k],
        })
        .collect();
    RegionStats { non_empty_pairs: per_pair.len(), tie_cells, undefined_cells, raster_vertices, per_pair }
}
