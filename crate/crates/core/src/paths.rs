//! Brute-force enumeration of non-intersecting path families.
//!
//! This is the ground truth the other routes are checked against. It walks
//! column by column, depth first, keeping only columns that are strictly
//! increasing and inside the allowed heights. Intended for small inputs.

use num_traits::{One, Zero};

use crate::error::Result;
use crate::exact::Rational;
use crate::lattice::{check_endpoints, OccupationVector};
use crate::weights::{WeightConfig, WeightSystem};

/// `N` trajectories `y_j(0..=t)`, one per walker, lowest walker first.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct PathFamily {
    trajectories: Vec<Vec<i64>>,
}

impl PathFamily {
    pub fn trajectories(&self) -> &[Vec<i64>] {
        &self.trajectories
    }

    pub fn walkers(&self) -> usize {
        self.trajectories.len()
    }

    pub fn steps(&self) -> usize {
        self.trajectories.first().map_or(0, |t| t.len() - 1)
    }

    /// Heights occupied in column `m`.
    pub fn column(&self, m: usize) -> Vec<i64> {
        self.trajectories.iter().map(|t| t[m]).collect()
    }

    fn from_columns(columns: &[Vec<i64>]) -> Self {
        let n = columns.first().map_or(0, Vec::len);
        PathFamily {
            trajectories: (0..n)
                .map(|j| columns.iter().map(|c| c[j]).collect())
                .collect(),
        }
    }
}

/// Where walkers may go and what each step costs.
trait Lattice {
    fn ceiling(&self) -> Option<i64>;
    fn edge(&self, y: i64, y2: i64) -> Rational;
    fn initial(&self, y: i64) -> Rational;
}

impl Lattice for WeightSystem {
    fn ceiling(&self) -> Option<i64> {
        Some(self.geometry().width())
    }
    fn edge(&self, y: i64, y2: i64) -> Rational {
        WeightSystem::edge(self, y, y2)
    }
    fn initial(&self, y: i64) -> Rational {
        WeightSystem::initial(self, y)
    }
}

struct HalfPlane<'a>(&'a WeightConfig);

impl Lattice for HalfPlane<'_> {
    fn ceiling(&self) -> Option<i64> {
        None
    }
    fn edge(&self, y: i64, y2: i64) -> Rational {
        self.0.half_plane_edge(y, y2)
    }
    fn initial(&self, y: i64) -> Rational {
        self.0.half_plane_initial(y)
    }
}

struct Search<'a, G: Lattice, F: FnMut(&[Vec<i64>], &Rational)> {
    lattice: &'a G,
    target: &'a [i64],
    steps: usize,
    prune_zero: bool,
    columns: Vec<Vec<i64>>,
    visit: F,
}

impl<G: Lattice, F: FnMut(&[Vec<i64>], &Rational)> Search<'_, G, F> {
    fn descend(&mut self, weight: &Rational) {
        let m = self.columns.len() - 1;
        if m == self.steps {
            if self.columns[m] == self.target {
                (self.visit)(&self.columns, weight);
            }
            return;
        }
        let remaining = (self.steps - m - 1) as i64;
        let current = self.columns[m].clone();
        let n = current.len();
        // moves enumerated as binary counters, walker 0 most significant, down before up
        for mask in 0..(1u32 << n) {
            let next: Vec<i64> = (0..n)
                .map(|j| {
                    let up = mask >> (n - 1 - j) & 1 == 1;
                    current[j] + if up { 1 } else { -1 }
                })
                .collect();
            if !self.admissible(&next, remaining) {
                continue;
            }
            let w = current
                .iter()
                .zip(&next)
                .fold(weight.clone(), |acc, (&a, &b)| {
                    acc * self.lattice.edge(a, b)
                });
            if self.prune_zero && w.is_zero() {
                continue;
            }
            self.columns.push(next);
            self.descend(&w);
            self.columns.pop();
        }
    }

    fn admissible(&self, col: &[i64], remaining: i64) -> bool {
        let ceiling = self.lattice.ceiling();
        col.windows(2).all(|w| w[0] < w[1])
            && col
                .iter()
                .all(|&y| y >= 0 && ceiling.is_none_or(|c| y <= c))
            && col
                .iter()
                .zip(self.target)
                .all(|(&y, &f)| (y - f).abs() <= remaining)
    }
}

fn search<G: Lattice>(
    lattice: &G,
    yi: &OccupationVector,
    yf: &OccupationVector,
    t: u32,
    prune_zero: bool,
    mut visit: impl FnMut(&[Vec<i64>], &Rational),
) {
    let start = yi
        .heights()
        .iter()
        .fold(Rational::one(), |acc, &y| acc * lattice.initial(y));
    let t = t as usize;
    let reachable = yi
        .heights()
        .iter()
        .zip(yf.heights())
        .all(|(a, b)| (a - b).unsigned_abs() as usize <= t);
    if !reachable {
        return;
    }
    let mut s = Search {
        lattice,
        target: yf.heights(),
        steps: t,
        prune_zero,
        columns: vec![yi.heights().to_vec()],
        visit: &mut visit,
    };
    s.descend(&start);
}

fn check(ws: &WeightSystem, yi: &OccupationVector, yf: &OccupationVector, t: u32) -> Result<()> {
    check_endpoints(yi, yf, t)?;
    let g = ws.geometry();
    g.check_occupation(yi)?;
    g.check_occupation(yf)
}

/// Every path family from `yi` to `yf` in `t` steps, in lexicographic order
/// of the trajectory tuples. Families of zero weight are still listed.
pub fn enumerate_families(
    ws: &WeightSystem,
    yi: &OccupationVector,
    yf: &OccupationVector,
    t: u32,
) -> Result<Vec<PathFamily>> {
    check(ws, yi, yf, t)?;
    let mut out = Vec::new();
    search(ws, yi, yf, t, false, |cols, _| {
        out.push(PathFamily::from_columns(cols))
    });
    out.sort();
    Ok(out)
}

/// Generating function as the explicit sum over all families:
/// `V(yi) * prod w` summed over every admissible family.
pub fn brute_force_z(
    ws: &WeightSystem,
    yi: &OccupationVector,
    yf: &OccupationVector,
    t: u32,
) -> Result<Rational> {
    check(ws, yi, yf, t)?;
    let mut total = Rational::zero();
    search(ws, yi, yf, t, true, |_, w| total += w);
    Ok(total)
}

/// Same sum with only the wall at `y = 0`.
pub fn half_plane_brute_force_z(
    cfg: &WeightConfig,
    yi: &OccupationVector,
    yf: &OccupationVector,
    t: u32,
) -> Result<Rational> {
    check_endpoints(yi, yf, t)?;
    let mut total = Rational::zero();
    search(&HalfPlane(cfg), yi, yf, t, true, |_, w| total += w);
    Ok(total)
}
