//! Determinants of single-walk generating functions, and the one-wall limit.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exact::{determinant, format_rational, Rational};
use crate::lattice::{check_endpoints, OccupationVector, Parity, StripGeometry};
use crate::transfer::TransferSystem;
use crate::weights::{WeightConfig, WeightSystem};

/// `N x N` matrix with entry `(a, b) = Z_t(yi_a -> yf_b)` for one walker.
#[derive(Debug, Clone, PartialEq)]
pub struct GvMatrix {
    entries: Vec<Vec<Rational>>,
}

impl GvMatrix {
    pub fn build(
        ws: &WeightSystem,
        yi: &OccupationVector,
        yf: &OccupationVector,
        t: u32,
    ) -> Result<Self> {
        check_endpoints(yi, yf, t)?;
        let geom = ws.geometry();
        geom.check_occupation(yi)?;
        geom.check_occupation(yf)?;
        let single = TransferSystem::new(ws, 1)?;
        let entries = yi
            .heights()
            .iter()
            .map(|&a| {
                let start = OccupationVector::new(vec![a])?;
                let row = single.row(&start, t)?;
                yf.heights()
                    .iter()
                    .map(|&b| Ok(row[(b / 2) as usize].clone()))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(GvMatrix { entries })
    }

    pub fn entries(&self) -> &[Vec<Rational>] {
        &self.entries
    }

    pub fn determinant(&self) -> Rational {
        determinant(&self.entries)
    }
}

/// Single-walk generating function, including the `v(yi)` factor.
/// Returns zero, not an error, when the parities cannot connect.
pub fn single_walk_z(ws: &WeightSystem, yi: i64, yf: i64, t: u32) -> Result<Rational> {
    let geom = ws.geometry();
    for y in [yi, yf] {
        if !geom.contains(y) {
            return Err(Error::InvalidOccupation {
                heights: vec![y],
                reason: format!("height outside strip 0..={}", geom.width()),
            });
        }
    }
    if Parity::of(yi).after(t) != Parity::of(yf) {
        return Ok(Rational::zero());
    }
    let start = OccupationVector::new(vec![yi])?;
    let row = TransferSystem::new(ws, 1)?.row(&start, t)?;
    Ok(row[(yf / 2) as usize].clone())
}

/// N-walk generating function as the determinant of single-walk ones.
pub fn gv_z(
    ws: &WeightSystem,
    yi: &OccupationVector,
    yf: &OccupationVector,
    t: u32,
) -> Result<Rational> {
    Ok(GvMatrix::build(ws, yi, yf, t)?.determinant())
}

/// Smallest odd width at which the top wall is out of reach of the highest
/// walker: `L > (t - |yi_N - yf_N|)/2 + max(yi_N, yf_N)`.
pub fn one_wall_threshold(yi: &OccupationVector, yf: &OccupationVector, t: u32) -> i64 {
    let a = *yi.heights().last().expect("non-empty occupation");
    let b = *yf.heights().last().expect("non-empty occupation");
    let slack = (t as i64 - (a - b).abs()).max(0) / 2;
    let bound = slack + a.max(b);
    let l = bound + 1;
    if l % 2 == 0 {
        l + 1
    } else {
        l
    }
}

/// Generating function with only the wall at `y = 0`.
///
/// Evaluated in the strip at [`one_wall_threshold`] and confirmed unchanged
/// two units wider.
pub fn one_wall_z(
    cfg: &WeightConfig,
    yi: &OccupationVector,
    yf: &OccupationVector,
    t: u32,
) -> Result<Rational> {
    check_endpoints(yi, yf, t)?;
    let width = one_wall_threshold(yi, yf, t);
    let at = |w: i64| -> Result<Rational> {
        let ws = cfg.restrict(StripGeometry::new(w)?);
        gv_z(&ws, yi, yf, t)
    };
    let first = at(width)?;
    let second = at(width + 2)?;
    if first != second {
        return Err(Error::Stabilization {
            width,
            first: format_rational(&first),
            next_width: width + 2,
            second: format_rational(&second),
        });
    }
    Ok(first)
}
