//! Lattice geometry, gate schedules and standard regions.
//!
//! Sites are indexed row-major, `x + L·y`. In 2D, sublattice 0 is the set of
//! sites with `x + y` even.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    #[default]
    Periodic,
    Open,
}

/// Gate direction relative to the control site. `Up` is `+y`, `Right` is `+x`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    Up,
    Right,
    Down,
    Left,
}

impl Direction {
    /// Clock index order.
    pub const CLOCK: [Direction; 4] = [Direction::Up, Direction::Right, Direction::Down, Direction::Left];

    fn offset(self) -> (isize, isize) {
        match self {
            Direction::Up => (0, 1),
            Direction::Right => (1, 0),
            Direction::Down => (0, -1),
            Direction::Left => (-1, 0),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Gate {
    pub control: usize,
    pub partner: usize,
    pub direction: Direction,
}

pub type GateLayer = Vec<Gate>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Lattice {
    dim: usize,
    l: usize,
    boundary: Boundary,
}

impl Lattice {
    pub fn new(dim: usize, l: usize, boundary: Boundary) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::Geometry(format!("dimension must be 1 or 2, got {dim}")));
        }
        if l < 2 {
            return Err(Error::Geometry(format!("linear size must be at least 2, got {l}")));
        }
        Ok(Lattice { dim, l, boundary })
    }

    pub fn ring(l: usize) -> Result<Self> {
        Self::new(1, l, Boundary::Periodic)
    }

    pub fn torus(l: usize) -> Result<Self> {
        Self::new(2, l, Boundary::Periodic)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn size(&self) -> usize {
        self.l
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    /// `L^dim`.
    pub fn sites(&self) -> usize {
        self.l.pow(self.dim as u32)
    }

    pub fn index(&self, x: usize, y: usize) -> usize {
        x + self.l * y
    }

    pub fn coords(&self, site: usize) -> (usize, usize) {
        (site % self.l, site / self.l)
    }

    /// Neighbour of `site` one step in `dir`, or `None` across an open edge.
    /// In 1D only `Left` and `Right` exist.
    pub fn neighbor(&self, site: usize, dir: Direction) -> Option<usize> {
        let (dx, dy) = dir.offset();
        if self.dim == 1 && dy != 0 {
            return None;
        }
        let (x, y) = self.coords(site);
        let l = self.l as isize;
        let step = |c: usize, d: isize| -> Option<usize> {
            let n = c as isize + d;
            if (0..l).contains(&n) {
                Some(n as usize)
            } else if self.boundary == Boundary::Periodic {
                Some(n.rem_euclid(l) as usize)
            } else {
                None
            }
        };
        Some(self.index(step(x, dx)?, step(y, dy)?))
    }

    /// Nearest-neighbour bonds in raster order: for each site, its `+x` bond
    /// then its `+y` bond. Duplicate bonds on a periodic `L = 2` axis are
    /// listed once.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.dim * self.sites());
        let dirs: &[Direction] = if self.dim == 1 {
            &[Direction::Right]
        } else {
            &[Direction::Right, Direction::Up]
        };
        for site in 0..self.sites() {
            let (x, y) = self.coords(site);
            for &dir in dirs {
                let wraps = match dir {
                    Direction::Right => x + 1 == self.l,
                    _ => y + 1 == self.l,
                };
                if wraps && self.l == 2 {
                    continue;
                }
                if let Some(n) = self.neighbor(site, dir) {
                    out.push((site, n));
                }
            }
        }
        out
    }

    fn require_even(&self) -> Result<()> {
        if self.l % 2 == 0 {
            Ok(())
        } else {
            Err(Error::Geometry(format!("gate schedules need even L, got {}", self.l)))
        }
    }

    /// Gate layer for time step `n` on this lattice.
    pub fn schedule(&self, n: usize) -> Result<GateLayer> {
        if self.dim == 1 {
            schedule_1d(self, n)
        } else {
            schedule_2d(self, n)
        }
    }

    /// Sites with `x < L/2`.
    pub fn half(&self) -> Vec<usize> {
        (0..self.sites()).filter(|&s| self.coords(s).0 < self.l / 2).collect()
    }

    pub fn all_sites(&self) -> Vec<usize> {
        (0..self.sites()).collect()
    }
}

/// Sublattice `n mod 2` supplies the controls; clock `⌊n/2⌋ mod 4` picks the
/// direction from [`Direction::CLOCK`]. Period 8.
pub fn schedule_2d(lat: &Lattice, n: usize) -> Result<GateLayer> {
    if lat.dim != 2 {
        return Err(Error::Geometry("schedule_2d needs a 2D lattice".into()));
    }
    lat.require_even()?;
    let sub = n % 2;
    let dir = Direction::CLOCK[(n / 2) % 4];
    let mut layer = Vec::with_capacity(lat.sites() / 2);
    for site in 0..lat.sites() {
        let (x, y) = lat.coords(site);
        if (x + y) % 2 != sub {
            continue;
        }
        if let Some(partner) = lat.neighbor(site, dir) {
            layer.push(Gate {
                control: site,
                partner,
                direction: dir,
            });
        }
    }
    Ok(layer)
}

/// Brick wall: `(0,1),(2,3),…` on even steps, `(1,2),…,(L−1,0)` on odd
/// steps. The wrapping pair is dropped with open boundaries.
pub fn schedule_1d(lat: &Lattice, n: usize) -> Result<GateLayer> {
    if lat.dim != 1 {
        return Err(Error::Geometry("schedule_1d needs a 1D lattice".into()));
    }
    lat.require_even()?;
    Ok((n % 2..lat.l)
        .step_by(2)
        .filter_map(|c| {
            lat.neighbor(c, Direction::Right).map(|partner| Gate {
                control: c,
                partner,
                direction: Direction::Right,
            })
        })
        .collect())
}

/// Four contiguous slabs of width `L/4` along `x`, in cyclic order.
pub fn quarter_partition(lat: &Lattice) -> Result<[Vec<usize>; 4]> {
    if lat.l % 4 != 0 {
        return Err(Error::Geometry(format!("quarter partition needs L divisible by 4, got {}", lat.l)));
    }
    let w = lat.l / 4;
    let mut parts: [Vec<usize>; 4] = Default::default();
    for site in 0..lat.sites() {
        parts[lat.coords(site).0 / w].push(site);
    }
    Ok(parts)
}
