//! Exact sparse transfer matrices.
//!
//! The one-step matrices move every walker by one column: `eo` takes even
//! occupations to odd ones and `oe` the reverse. N-walk matrices are the
//! ordered-tuple blocks of the N-fold direct product, so an entry is the
//! product of the walkers' single-step weights. Two-step matrices `ee` and
//! `oo` are products of the two one-step matrices.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::error::Result;
use crate::exact::{to_f64, Rational};
use crate::lattice::{check_endpoints, OccupationVector, Parity, StripGeometry};
use crate::weights::WeightSystem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Step {
    /// Even rows, odd columns.
    EvenToOdd,
    /// Odd rows, even columns.
    OddToEven,
}

impl Step {
    pub fn from_parity(p: Parity) -> Step {
        match p {
            Parity::Even => Step::EvenToOdd,
            Parity::Odd => Step::OddToEven,
        }
    }

    pub fn source(self) -> Parity {
        match self {
            Step::EvenToOdd => Parity::Even,
            Step::OddToEven => Parity::Odd,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MatrixKind {
    EvenToOdd,
    OddToEven,
    EvenEven,
    OddOdd,
}

impl fmt::Display for MatrixKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MatrixKind::EvenToOdd => "eo",
            MatrixKind::OddToEven => "oe",
            MatrixKind::EvenEven => "ee",
            MatrixKind::OddOdd => "oo",
        })
    }
}

/// Square sparse matrix indexed by occupation vectors in lexicographic order.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferMatrix {
    kind: MatrixKind,
    rows: Vec<OccupationVector>,
    cols: Vec<OccupationVector>,
    /// Per row, `(column, value)` sorted by column; zeros are not stored.
    entries: Vec<Vec<(usize, Rational)>>,
}

impl TransferMatrix {
    pub fn kind(&self) -> MatrixKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn row_labels(&self) -> &[OccupationVector] {
        &self.rows
    }

    pub fn col_labels(&self) -> &[OccupationVector] {
        &self.cols
    }

    pub fn nnz(&self) -> usize {
        self.entries.iter().map(Vec::len).sum()
    }

    pub fn row(&self, r: usize) -> &[(usize, Rational)] {
        &self.entries[r]
    }

    pub fn get(&self, r: usize, c: usize) -> Rational {
        self.entries[r]
            .binary_search_by_key(&c, |(j, _)| *j)
            .map(|i| self.entries[r][i].1.clone())
            .unwrap_or_else(|_| Rational::zero())
    }

    pub fn to_dense(&self) -> Vec<Vec<Rational>> {
        (0..self.dim())
            .map(|r| (0..self.dim()).map(|c| self.get(r, c)).collect())
            .collect()
    }

    pub fn to_dense_f64(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        let mut out = vec![vec![0.0; n]; n];
        for (r, row) in self.entries.iter().enumerate() {
            for (c, v) in row {
                out[r][*c] = to_f64(v);
            }
        }
        out
    }

    /// Row vector times matrix, `x T`.
    pub fn left_apply(&self, x: &[Rational]) -> Vec<Rational> {
        assert_eq!(x.len(), self.dim());
        let mut out = vec![Rational::zero(); self.dim()];
        for (xi, row) in x.iter().zip(&self.entries) {
            if xi.is_zero() {
                continue;
            }
            for (c, v) in row {
                out[*c] += xi * v;
            }
        }
        out
    }

    /// Matrix product `self * rhs`; `rhs` rows must be `self`'s columns.
    pub fn product(&self, rhs: &TransferMatrix, kind: MatrixKind) -> TransferMatrix {
        assert_eq!(self.cols, rhs.rows, "inner index sets differ");
        let entries = self
            .entries
            .iter()
            .map(|row| {
                let mut acc: BTreeMap<usize, Rational> = BTreeMap::new();
                for (k, a) in row {
                    for (c, b) in &rhs.entries[*k] {
                        *acc.entry(*c).or_insert_with(Rational::zero) += a * b;
                    }
                }
                acc.into_iter().filter(|(_, v)| !v.is_zero()).collect()
            })
            .collect();
        TransferMatrix {
            kind,
            rows: self.rows.clone(),
            cols: rhs.cols.clone(),
            entries,
        }
    }
}

/// One-step matrix for a single walker.
pub fn build_one_step(ws: &WeightSystem, step: Step) -> TransferMatrix {
    build_n_step(ws, 1, step).expect("one walker always fits")
}

/// N-walk one-step matrix: entry `(y, y')` is `prod_a w(y_a, y'_a)` over
/// ordered tuples. Crossing moves never appear since each walker moves by
/// exactly one.
pub fn build_n_step(ws: &WeightSystem, n: usize, step: Step) -> Result<TransferMatrix> {
    let geom = ws.geometry();
    let from = step.source();
    let rows = geom.occupations(from, n)?;
    let cols = geom.occupations(from.flip(), n)?;
    let entries = rows
        .iter()
        .map(|y| {
            let mut row: Vec<(usize, Rational)> = Vec::new();
            for mask in 0..(1u32 << n) {
                let next: Vec<i64> = y
                    .heights()
                    .iter()
                    .enumerate()
                    .map(|(a, &h)| if mask >> a & 1 == 1 { h + 1 } else { h - 1 })
                    .collect();
                let Some(c) = lookup(&geom, &next) else {
                    continue;
                };
                let w = y
                    .heights()
                    .iter()
                    .zip(&next)
                    .fold(Rational::one(), |acc, (&a, &b)| acc * ws.edge(a, b));
                if !w.is_zero() {
                    row.push((c, w));
                }
            }
            row.sort_by_key(|(c, _)| *c);
            row
        })
        .collect();
    let kind = match step {
        Step::EvenToOdd => MatrixKind::EvenToOdd,
        Step::OddToEven => MatrixKind::OddToEven,
    };
    Ok(TransferMatrix {
        kind,
        rows,
        cols,
        entries,
    })
}

fn lookup(geom: &StripGeometry, heights: &[i64]) -> Option<usize> {
    let v = OccupationVector::new(heights.to_vec()).ok()?;
    geom.occupation_index(&v).ok()
}

/// `ee = eo * oe`, `oo = oe * eo`.
pub fn build_two_step(ws: &WeightSystem, n: usize, parity: Parity) -> Result<TransferMatrix> {
    let eo = build_n_step(ws, n, Step::EvenToOdd)?;
    let oe = build_n_step(ws, n, Step::OddToEven)?;
    Ok(match parity {
        Parity::Even => eo.product(&oe, MatrixKind::EvenEven),
        Parity::Odd => oe.product(&eo, MatrixKind::OddOdd),
    })
}

/// The one-step pair for a fixed walker count, reused across queries.
#[derive(Debug, Clone)]
pub struct TransferSystem {
    ws: WeightSystem,
    walkers: usize,
    eo: TransferMatrix,
    oe: TransferMatrix,
}

impl TransferSystem {
    pub fn new(ws: &WeightSystem, walkers: usize) -> Result<Self> {
        Ok(TransferSystem {
            ws: ws.clone(),
            walkers,
            eo: build_n_step(ws, walkers, Step::EvenToOdd)?,
            oe: build_n_step(ws, walkers, Step::OddToEven)?,
        })
    }

    pub fn walkers(&self) -> usize {
        self.walkers
    }

    pub fn weights(&self) -> &WeightSystem {
        &self.ws
    }

    pub fn one_step(&self, step: Step) -> &TransferMatrix {
        match step {
            Step::EvenToOdd => &self.eo,
            Step::OddToEven => &self.oe,
        }
    }

    pub fn two_step(&self, parity: Parity) -> TransferMatrix {
        match parity {
            Parity::Even => self.eo.product(&self.oe, MatrixKind::EvenEven),
            Parity::Odd => self.oe.product(&self.eo, MatrixKind::OddOdd),
        }
    }

    fn start_vector(&self, yi: &OccupationVector) -> Result<Vec<Rational>> {
        let geom = self.ws.geometry();
        let idx = geom.occupation_index(yi)?;
        let mut x = vec![Rational::zero(); self.eo.dim()];
        x[idx] = self.ws.initial_product(yi);
        Ok(x)
    }

    fn check_start(&self, yi: &OccupationVector) -> Result<()> {
        if yi.len() != self.walkers {
            return Err(crate::error::Error::EndpointLength {
                start: yi.len(),
                end: self.walkers,
            });
        }
        self.ws.geometry().check_occupation(yi)
    }

    /// `Z_t(yi -> y)` for every `y` of the reachable parity, by the one-step
    /// recurrence. Entries follow the lexicographic occupation order.
    pub fn row(&self, yi: &OccupationVector, t: u32) -> Result<Vec<Rational>> {
        self.check_start(yi)?;
        let mut x = self.start_vector(yi)?;
        let mut parity = yi.parity();
        for _ in 0..t {
            x = self.one_step(Step::from_parity(parity)).left_apply(&x);
            parity = parity.flip();
        }
        Ok(x)
    }

    /// Same row computed with `t/2` two-step products and one trailing
    /// single step for odd `t`.
    pub fn row_two_step(&self, yi: &OccupationVector, t: u32) -> Result<Vec<Rational>> {
        self.check_start(yi)?;
        let p = yi.parity();
        let square = self.two_step(p);
        let mut x = self.start_vector(yi)?;
        for _ in 0..t / 2 {
            x = square.left_apply(&x);
        }
        if t % 2 == 1 {
            x = self.one_step(Step::from_parity(p)).left_apply(&x);
        }
        Ok(x)
    }

    pub fn z(&self, yi: &OccupationVector, yf: &OccupationVector, t: u32) -> Result<Rational> {
        check_endpoints(yi, yf, t)?;
        let idx = self.ws.geometry().occupation_index(yf)?;
        Ok(self.row(yi, t)?.swap_remove(idx))
    }

    pub fn z_two_step(
        &self,
        yi: &OccupationVector,
        yf: &OccupationVector,
        t: u32,
    ) -> Result<Rational> {
        check_endpoints(yi, yf, t)?;
        let idx = self.ws.geometry().occupation_index(yf)?;
        Ok(self.row_two_step(yi, t)?.swap_remove(idx))
    }
}

/// Generating function by the per-step transfer recurrence.
pub fn transfer_z(
    ws: &WeightSystem,
    yi: &OccupationVector,
    yf: &OccupationVector,
    t: u32,
) -> Result<Rational> {
    check_endpoints(yi, yf, t)?;
    TransferSystem::new(ws, yi.len())?.z(yi, yf, t)
}
