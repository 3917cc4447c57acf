//! One-walk cyclic eigensystem and the spectral form of the generating function.
//!
//! The one-step matrices `A = T1^eo` and `B = T1^oe` are not square
//! eigenproblems on their own, but the two-step matrix `A B` is. Its
//! eigenvalues are `lambda^2`; each right vector `r_e` gets an odd partner
//! `r_o = B r_e / lambda`, so that `A r_o = lambda r_e` and
//! `B r_e = lambda r_o`. Left vectors are the rows of the inverse of the
//! right-vector matrix, stored already conjugated ("dual rows"), so that
//! `dual_p(k) . r_p(k') = delta(k, k')` holds directly.
//!
//! All of this is floating point; exactness stops at the boundary of this
//! module.

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::Zero;

use crate::bethe::{BetheIndex, Side};
use crate::error::{Error, Result};
use crate::exact::to_f64;
use crate::lattice::{check_endpoints, OccupationVector, Parity, StripGeometry};
use crate::transfer::{build_one_step, Step, TransferMatrix};
use crate::weights::WeightSystem;

pub type Complex = Complex64;
pub type CMatrix = DMatrix<Complex>;

/// Default residual tolerance, relative to the relevant matrix 1-norm.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Relative gap below which two-step eigenvalues are treated as one cluster.
const CLUSTER_GAP: f64 = 1e-8;

/// Defect and conditioning tests never use a tolerance below this, so an
/// unattainably small `eps` fails the residual checks instead of being read
/// as a missing eigenbasis.
const STRUCTURAL_FLOOR: f64 = 1e-12;

pub(crate) fn complex_matrix(m: &TransferMatrix) -> CMatrix {
    let dense = m.to_dense_f64();
    let n = m.dim();
    CMatrix::from_fn(n, n, |r, c| Complex::new(dense[r][c], 0.0))
}

/// Maximum absolute column sum.
pub(crate) fn norm_one(m: &CMatrix) -> f64 {
    (0..m.ncols())
        .map(|c| m.column(c).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub(crate) fn norm_inf_vec<'a>(v: impl IntoIterator<Item = &'a Complex>) -> f64 {
    v.into_iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Max-entry distance of `m` from the identity.
pub(crate) fn identity_defect(m: &CMatrix) -> f64 {
    let mut worst: f64 = 0.0;
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            let target = if r == c { 1.0 } else { 0.0 };
            worst = worst.max((m[(r, c)] - Complex::new(target, 0.0)).norm());
        }
    }
    worst
}

fn condition_number(m: &CMatrix) -> f64 {
    let s = m.clone().svd(false, false).singular_values;
    let max = s.iter().copied().fold(0.0, f64::max);
    let min = s.iter().copied().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Square root of a two-step eigenvalue with argument in `[0, pi)`.
fn root_with_convention(mu: Complex) -> Complex {
    let r = mu.sqrt();
    if r.im < 0.0 || (r.im == 0.0 && r.re < 0.0) {
        -r
    } else {
        r
    }
}

/// Residuals of the one-walk relations, all relative to the matrix 1-norm
/// where a matrix is involved.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct OneWalkResiduals {
    pub cyclic_right: f64,
    pub cyclic_left: f64,
    pub biorthonormality: f64,
    pub completeness: f64,
}

impl OneWalkResiduals {
    pub fn max(&self) -> f64 {
        self.cyclic_right
            .max(self.cyclic_left)
            .max(self.biorthonormality)
            .max(self.completeness)
    }
}

/// Eigen-pairs of the one-walk problem, indexed by `k` in `0..(L+1)/2`.
#[derive(Debug, Clone)]
pub struct OneWalkEigenSystem {
    geom: StripGeometry,
    /// `T1^eo` and `T1^oe` in floating point.
    eo: CMatrix,
    oe: CMatrix,
    lambdas: Vec<Complex>,
    /// Columns are right vectors over the even / odd heights.
    right_even: CMatrix,
    right_odd: CMatrix,
    /// Rows are conjugated left vectors; the inverse of the right matrices.
    dual_even: CMatrix,
    dual_odd: CMatrix,
    residuals: OneWalkResiduals,
}

impl OneWalkEigenSystem {
    /// Diagonalises the two-step matrix and builds the cyclic pairs.
    ///
    /// Fails with [`Error::DegenerateSpectrum`] if some `lambda = 0` and
    /// with [`Error::Completeness`] when no full, well-conditioned
    /// eigenbasis exists; in both cases the weight system lies outside the
    /// class this construction covers.
    pub fn solve(ws: &WeightSystem, eps: f64) -> Result<Self> {
        assert!(eps > 0.0, "tolerance must be positive");
        let structural = eps.max(STRUCTURAL_FLOOR);
        let geom = ws.geometry();
        let m = geom.class_size();
        let eo = complex_matrix(&build_one_step(ws, Step::EvenToOdd));
        let oe = complex_matrix(&build_one_step(ws, Step::OddToEven));
        let square = &eo * &oe;
        let scale = norm_one(&square).max(f64::MIN_POSITIVE);

        let real_square = square.map(|z| z.re);
        let mut mus: Vec<Complex> = real_square.complex_eigenvalues().iter().copied().collect();
        for mu in &mut mus {
            // conjugate pairs come back with rounding noise on real eigenvalues
            if mu.im.abs() <= 1e-12 * scale.max(mu.norm()) {
                mu.im = 0.0;
            }
        }
        if let Some(mu) = mus.iter().find(|mu| mu.norm() <= 1e-13 * scale) {
            return Err(Error::DegenerateSpectrum(mu.norm()));
        }
        mus.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));

        // group numerically equal eigenvalues and take a null-space basis per group
        let mut pairs: Vec<(Complex, Vec<Complex>)> = Vec::with_capacity(m);
        let mut i = 0;
        while i < mus.len() {
            let mut j = i + 1;
            while j < mus.len() && (mus[j] - mus[i]).norm() <= CLUSTER_GAP * scale {
                j += 1;
            }
            let size = j - i;
            let centre = mus[i..j].iter().sum::<Complex>() / size as f64;
            let shifted = &square - CMatrix::identity(m, m) * centre;
            let svd = shifted.svd(false, true);
            let v_t = svd.v_t.expect("requested right singular vectors");
            for s in 0..size {
                let row = m - 1 - s;
                let vec: Vec<Complex> = (0..m).map(|c| v_t[(row, c)].conj()).collect();
                let mu = if size == 1 { mus[i] } else { centre };
                pairs.push((mu, normalise(vec)));
            }
            i = j;
        }

        let mut lambdas = Vec::with_capacity(m);
        let mut right_even = CMatrix::zeros(m, m);
        for (k, (mu, vec)) in pairs.iter().enumerate() {
            let v = nalgebra::DVector::from_column_slice(vec);
            let defect = (&square * &v - &v * *mu)
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max);
            if defect > structural * scale {
                return Err(Error::Completeness(format!(
                    "two-step eigenvalue {mu} has eigen-residual {defect:e}; the matrix looks defective"
                )));
            }
            lambdas.push(root_with_convention(*mu));
            right_even.set_column(k, &v);
        }

        let right_odd = {
            let mut r = &oe * &right_even;
            for (k, lambda) in lambdas.iter().enumerate() {
                let col = r.column(k) / *lambda;
                r.set_column(k, &col);
            }
            r
        };

        let limit = 1.0 / structural;
        for (name, r) in [("even", &right_even), ("odd", &right_odd)] {
            let cond = condition_number(r);
            if !cond.is_finite() || cond > limit {
                return Err(Error::Completeness(format!(
                    "{name} right-vector matrix has condition number {cond:e} above {limit:e}"
                )));
            }
        }
        let invert = |r: &CMatrix| {
            r.clone()
                .try_inverse()
                .ok_or_else(|| Error::Completeness("right-vector matrix is singular".into()))
        };
        let dual_even = invert(&right_even)?;
        let dual_odd = invert(&right_odd)?;

        let mut sys = OneWalkEigenSystem {
            geom,
            eo,
            oe,
            lambdas,
            right_even,
            right_odd,
            dual_even,
            dual_odd,
            residuals: OneWalkResiduals::default(),
        };
        sys.residuals = sys.measure();
        let checks = [
            ("one-walk cyclic (right)", sys.residuals.cyclic_right),
            ("one-walk cyclic (left)", sys.residuals.cyclic_left),
            ("one-walk biorthonormality", sys.residuals.biorthonormality),
            ("one-walk completeness", sys.residuals.completeness),
        ];
        for (relation, residual) in checks {
            if residual > eps {
                return Err(Error::Verification {
                    relation: relation.into(),
                    index: "K_1".into(),
                    residual,
                    tolerance: eps,
                });
            }
        }
        Ok(sys)
    }

    fn measure(&self) -> OneWalkResiduals {
        let lam = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(self.lambdas.clone()));
        let rel = |res: CMatrix, mat: &CMatrix, vecs: &CMatrix| {
            let denom = (norm_one(mat) * norm_inf_vec(vecs.iter())).max(1.0);
            norm_inf_vec(res.iter()) / denom
        };
        let cyclic_right = rel(
            &self.eo * &self.right_odd - &self.right_even * &lam,
            &self.eo,
            &self.right_odd,
        )
        .max(rel(
            &self.oe * &self.right_even - &self.right_odd * &lam,
            &self.oe,
            &self.right_even,
        ));
        let cyclic_left = rel(
            &self.dual_odd * &self.oe - &lam * &self.dual_even,
            &self.oe,
            &self.dual_odd,
        )
        .max(rel(
            &self.dual_even * &self.eo - &lam * &self.dual_odd,
            &self.eo,
            &self.dual_even,
        ));
        let biorthonormality = identity_defect(&(&self.dual_even * &self.right_even))
            .max(identity_defect(&(&self.dual_odd * &self.right_odd)));
        let completeness = identity_defect(&(&self.right_even * &self.dual_even))
            .max(identity_defect(&(&self.right_odd * &self.dual_odd)));
        OneWalkResiduals {
            cyclic_right,
            cyclic_left,
            biorthonormality,
            completeness,
        }
    }

    pub fn geometry(&self) -> StripGeometry {
        self.geom
    }

    /// `|K_1| = (L+1)/2`.
    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    pub fn lambdas(&self) -> &[Complex] {
        &self.lambdas
    }

    pub fn residuals(&self) -> OneWalkResiduals {
        self.residuals
    }

    /// `T1^eo` or `T1^oe` in floating point.
    pub fn one_step(&self, step: Step) -> &CMatrix {
        match step {
            Step::EvenToOdd => &self.eo,
            Step::OddToEven => &self.oe,
        }
    }

    /// Right vector `r_p(k)` as components over the heights of parity `p`.
    pub fn right(&self, p: Parity, k: usize) -> Vec<Complex> {
        self.right_matrix(p).column(k).iter().copied().collect()
    }

    /// Left vector `l_p(k)`; its conjugate is the dual row.
    pub fn left(&self, p: Parity, k: usize) -> Vec<Complex> {
        self.dual_matrix(p)
            .row(k)
            .iter()
            .map(|z| z.conj())
            .collect()
    }

    pub(crate) fn right_matrix(&self, p: Parity) -> &CMatrix {
        match p {
            Parity::Even => &self.right_even,
            Parity::Odd => &self.right_odd,
        }
    }

    pub(crate) fn dual_matrix(&self, p: Parity) -> &CMatrix {
        match p {
            Parity::Even => &self.dual_even,
            Parity::Odd => &self.dual_odd,
        }
    }

    /// One-walk component for `side` at height `y`: `r_p(k)(y)` on the
    /// right, `conj(l_p(k)(y))` on the left.
    pub(crate) fn component(&self, side: Side, k: usize, y: i64) -> Complex {
        let p = Parity::of(y);
        let i = (y / 2) as usize;
        match side {
            Side::Right => self.right_matrix(p)[(i, k)],
            Side::Left => self.dual_matrix(p)[(k, i)],
        }
    }

    /// `Z_t(yi -> yf)` as `V(yi) sum_k Phi^R(yi) Lambda_k^t conj(Phi^L(yf))`.
    pub fn spectral_z(
        &self,
        ws: &WeightSystem,
        yi: &OccupationVector,
        yf: &OccupationVector,
        t: u32,
    ) -> Result<Complex> {
        check_endpoints(yi, yf, t)?;
        self.geom.check_occupation(yi)?;
        self.geom.check_occupation(yf)?;
        let n = yi.len();
        let v = Complex::new(to_f64(&ws.initial_product(yi)), 0.0);
        let mut total = Complex::zero();
        for idx in BetheIndex::all(self.len(), n) {
            let right = crate::bethe::component(self, &idx, Side::Right, yi.heights());
            let left = crate::bethe::component(self, &idx, Side::Left, yf.heights());
            total += right * idx.eigenvalue(self).powu(t) * left;
        }
        Ok(v * total)
    }
}

/// Unit 2-norm with the largest component real and positive.
fn normalise(mut v: Vec<Complex>) -> Vec<Complex> {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let pivot = v
        .iter()
        .copied()
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .unwrap_or(Complex::new(1.0, 0.0));
    let phase = pivot.conj() / pivot.norm();
    for z in &mut v {
        *z = *z * phase / norm;
    }
    v
}
