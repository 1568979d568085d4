//! Integer-lattice geometry: the `L`-mesh, the square frame assigned to a
//! mesh vertex, the cell around an off-mesh vertex, and graph boundaries.
//!
//! Vertices are ordered row-major (by `y`, then `x`). Every ordered
//! collection produced here follows that order unless stated otherwise.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};

/// A vertex of the square lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Vertex {
    pub x: i64,
    pub y: i64,
}

impl Vertex {
    pub const fn new(x: i64, y: i64) -> Self {
        Vertex { x, y }
    }

    pub fn offset(self, dx: i64, dy: i64) -> Self {
        Vertex::new(self.x + dx, self.y + dy)
    }

    /// The four lattice neighbours: east, west, north, south.
    pub fn neighbors(self) -> [Vertex; 4] {
        [self.offset(1, 0), self.offset(-1, 0), self.offset(0, 1), self.offset(0, -1)]
    }

    pub fn chebyshev(self, other: Vertex) -> i64 {
        (self.x - other.x).abs().max((self.y - other.y).abs())
    }

    pub fn manhattan(self, other: Vertex) -> i64 {
        (self.x - other.x).abs() + (self.y - other.y).abs()
    }
}

impl Ord for Vertex {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.y, self.x).cmp(&(other.y, other.x))
    }
}

impl PartialOrd for Vertex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Inclusive axis-aligned rectangle `[x0, x1] × [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rect {
    pub x0: i64,
    pub y0: i64,
    pub x1: i64,
    pub y1: i64,
}

impl Rect {
    pub fn new(x0: i64, y0: i64, x1: i64, y1: i64) -> Self {
        Rect { x0, y0, x1, y1 }
    }

    pub fn is_empty(&self) -> bool {
        self.x1 < self.x0 || self.y1 < self.y0
    }

    pub fn width(&self) -> usize {
        if self.is_empty() {
            0
        } else {
            (self.x1 - self.x0 + 1) as usize
        }
    }

    pub fn height(&self) -> usize {
        if self.is_empty() {
            0
        } else {
            (self.y1 - self.y0 + 1) as usize
        }
    }

    pub fn len(&self) -> usize {
        self.width() * self.height()
    }

    pub fn contains(&self, v: Vertex) -> bool {
        v.x >= self.x0 && v.x <= self.x1 && v.y >= self.y0 && v.y <= self.y1
    }

    pub fn expand(&self, by: i64) -> Rect {
        Rect::new(self.x0 - by, self.y0 - by, self.x1 + by, self.y1 + by)
    }

    /// Row-major iterator over the rectangle.
    pub fn iter(&self) -> impl Iterator<Item = Vertex> + '_ {
        let (x0, x1) = (self.x0, self.x1);
        (self.y0..=self.y1).flat_map(move |y| (x0..=x1).map(move |x| Vertex::new(x, y)))
    }

    /// Smallest rectangle containing every vertex, or `None` when empty.
    pub fn bounding<I: IntoIterator<Item = Vertex>>(vertices: I) -> Option<Rect> {
        let mut it = vertices.into_iter();
        let first = it.next()?;
        let mut r = Rect::new(first.x, first.y, first.x, first.y);
        for v in it {
            r.x0 = r.x0.min(v.x);
            r.x1 = r.x1.max(v.x);
            r.y0 = r.y0.min(v.y);
            r.y1 = r.y1.max(v.y);
        }
        Some(r)
    }
}

/// A finite set of lattice vertices. Rectangles are stored by their corners.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Region {
    Rect(Rect),
    Set(BTreeSet<Vertex>),
}

impl Region {
    pub fn empty() -> Self {
        Region::Set(BTreeSet::new())
    }

    pub fn contains(&self, v: Vertex) -> bool {
        match self {
            Region::Rect(r) => r.contains(v),
            Region::Set(s) => s.contains(&v),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Region::Rect(r) => r.len(),
            Region::Set(s) => s.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Row-major list of the region's vertices.
    pub fn vertices(&self) -> Vec<Vertex> {
        match self {
            Region::Rect(r) => r.iter().collect(),
            Region::Set(s) => s.iter().copied().collect(),
        }
    }

    pub fn to_set(&self) -> BTreeSet<Vertex> {
        match self {
            Region::Rect(r) => r.iter().collect(),
            Region::Set(s) => s.clone(),
        }
    }
}

impl FromIterator<Vertex> for Region {
    fn from_iter<I: IntoIterator<Item = Vertex>>(iter: I) -> Self {
        Region::Set(iter.into_iter().collect())
    }
}

fn check_mesh_param(l: i64) -> Result<()> {
    if l < 1 {
        return Err(Error::InvalidArgument(format!("mesh parameter must be >= 1, got {l}")));
    }
    Ok(())
}

/// True iff `v` lies on the `L`-mesh, i.e. one of its coordinates is a multiple of `L`.
pub fn on_mesh(v: Vertex, l: i64) -> bool {
    debug_assert!(l >= 1);
    v.x.rem_euclid(l) == 0 || v.y.rem_euclid(l) == 0
}

/// The boundary of the open `2L × 2L` square assigned to a mesh vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub anchor: Vertex,
    pub half_side: i64,
    /// Clockwise (with `y` pointing up) starting from `anchor + (1, 0)`.
    pub vertices: Vec<Vertex>,
}

impl Frame {
    /// Frame of the open square `anchor + (0, 2L)²`.
    pub fn at(anchor: Vertex, half_side: i64) -> Frame {
        let n = 2 * half_side;
        Frame { anchor, half_side, vertices: square_ring(anchor, n) }
    }

    /// The closed square `anchor + [0, 2L]²`.
    pub fn closed_square(&self) -> Rect {
        let n = 2 * self.half_side;
        Rect::new(self.anchor.x, self.anchor.y, self.anchor.x + n, self.anchor.y + n)
    }

    /// The open square `anchor + (0, 2L)²`.
    pub fn interior(&self) -> Rect {
        self.closed_square().expand(-1)
    }

    pub fn contains(&self, v: Vertex) -> bool {
        let sq = self.closed_square();
        if !sq.contains(v) {
            return false;
        }
        let on_x = v.x == sq.x0 || v.x == sq.x1;
        let on_y = v.y == sq.y0 || v.y == sq.y1;
        on_x ^ on_y
    }
}

/// Graph boundary of the open square `anchor + (0, n)²`, clockwise from `anchor + (1, 0)`.
fn square_ring(anchor: Vertex, n: i64) -> Vec<Vertex> {
    if n < 2 {
        return Vec::new();
    }
    let mut out = Vec::with_capacity(4 * (n as usize - 1));
    out.push(anchor.offset(1, 0));
    for b in 1..n {
        out.push(anchor.offset(0, b));
    }
    for a in 1..n {
        out.push(anchor.offset(a, n));
    }
    for b in (1..n).rev() {
        out.push(anchor.offset(n, b));
    }
    for a in (2..n).rev() {
        out.push(anchor.offset(a, 0));
    }
    out
}

/// The frame of an on-mesh vertex: the anchor `v_c` has both coordinates
/// divisible by `L` and `v_c + L/2 <= v < v_c + 3L/2` coordinatewise.
pub fn frame_of(v: Vertex, l: i64) -> Result<Frame> {
    check_mesh_param(l)?;
    if !on_mesh(v, l) {
        return Err(Error::OffMesh(v, l));
    }
    Ok(Frame::at(frame_anchor(v, l), l))
}

pub(crate) fn frame_anchor(v: Vertex, l: i64) -> Vertex {
    // k + L/2 <= i < k + 3L/2  <=>  2k ∈ (2i - 3L, 2i - L]
    let k = |i: i64| (2 * i - l).div_euclid(2 * l) * l;
    Vertex::new(k(v.x), k(v.y))
}

/// `∂W`: vertices outside `W` with a lattice neighbour in `W`.
pub fn graph_boundary(region: &Region) -> Region {
    let mut out = BTreeSet::new();
    for v in region.vertices() {
        for u in v.neighbors() {
            if !region.contains(u) {
                out.insert(u);
            }
        }
    }
    Region::Set(out)
}

/// Union of the graph boundaries of the four open `L`-subsquares of the
/// `2L`-square anchored at `anchor`.
pub fn bisected_boundary(anchor: Vertex, l: i64) -> Result<Region> {
    check_mesh_param(l)?;
    let mut out = BTreeSet::new();
    for (dx, dy) in [(0, 0), (l, 0), (0, l), (l, l)] {
        let corner = anchor.offset(dx, dy);
        out.extend(square_ring(corner, l));
    }
    Ok(Region::Set(out))
}

/// The `L`-cell containing an off-mesh vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cell {
    pub anchor: Vertex,
    pub interior: Rect,
    /// Row-major graph boundary of the interior; every vertex lies on the mesh.
    pub frame: Vec<Vertex>,
}

pub fn cell_of(v: Vertex, l: i64) -> Result<Cell> {
    check_mesh_param(l)?;
    if on_mesh(v, l) {
        return Err(Error::OnMesh(v, l));
    }
    let anchor = Vertex::new(v.x.div_euclid(l) * l, v.y.div_euclid(l) * l);
    Ok(cell_at(anchor, l))
}

pub(crate) fn cell_at(anchor: Vertex, l: i64) -> Cell {
    let interior = Rect::new(anchor.x + 1, anchor.y + 1, anchor.x + l - 1, anchor.y + l - 1);
    let mut frame = square_ring(anchor, l);
    frame.sort();
    Cell { anchor, interior, frame }
}
