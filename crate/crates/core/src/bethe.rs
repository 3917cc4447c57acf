//! N-walk eigenvectors as antisymmetrised products of one-walk vectors.
//!
//! For an increasing index tuple `k = (k_1 < ... < k_N)` the component at an
//! occupation `y` is the `N x N` determinant `det[psi_{k_b}(y_a)]` and the
//! eigenvalue is `Lambda_k = prod lambda_{k_a}`.

use std::fmt;

use nalgebra::DVector;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::permutations;
use crate::lattice::{binomial, Parity};
use crate::spectral::{
    complex_matrix, identity_defect, norm_inf_vec, norm_one, CMatrix, Complex, OneWalkEigenSystem,
};
use crate::transfer::{build_n_step, Step};
use crate::weights::WeightSystem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// Strictly increasing tuple of one-walk indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct BetheIndex(Vec<usize>);

impl BetheIndex {
    pub fn new(ks: Vec<usize>, one_walk_size: usize) -> Result<Self> {
        let ok = !ks.is_empty()
            && ks.windows(2).all(|w| w[0] < w[1])
            && ks.iter().all(|&k| k < one_walk_size);
        if !ok {
            return Err(Error::InvalidOccupation {
                heights: ks.iter().map(|&k| k as i64).collect(),
                reason: format!("not a strictly increasing index tuple below {one_walk_size}"),
            });
        }
        Ok(BetheIndex(ks))
    }

    pub fn ks(&self) -> &[usize] {
        &self.0
    }

    /// All of `K_N` in lexicographic order; `C(size, n)` entries.
    pub fn all(size: usize, n: usize) -> Vec<BetheIndex> {
        if n == 0 || n > size {
            return Vec::new();
        }
        let mut out = Vec::with_capacity(binomial(size, n) as usize);
        let mut idx: Vec<usize> = (0..n).collect();
        loop {
            out.push(BetheIndex(idx.clone()));
            let Some(pos) = (0..n).rev().find(|&i| idx[i] < size - n + i) else {
                break;
            };
            idx[pos] += 1;
            for j in pos + 1..n {
                idx[j] = idx[j - 1] + 1;
            }
        }
        out
    }

    /// `Lambda_k`.
    pub fn eigenvalue(&self, sys: &OneWalkEigenSystem) -> Complex {
        self.0
            .iter()
            .fold(Complex::one(), |acc, &k| acc * sys.lambdas()[k])
    }
}

impl fmt::Display for BetheIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Determinant by partially pivoted elimination.
pub fn complex_determinant(m: &CMatrix) -> Complex {
    if m.nrows() == 0 {
        return Complex::one();
    }
    m.clone().lu().determinant()
}

/// `sum_sigma sign(sigma) prod_a entry(a, sigma(a))`.
pub fn permutation_sum(n: usize, entry: impl Fn(usize, usize) -> Complex) -> Complex {
    permutations(n)
        .into_iter()
        .map(|(perm, sign)| {
            let term = perm
                .iter()
                .enumerate()
                .fold(Complex::one(), |acc, (a, &b)| acc * entry(a, b));
            term * sign as f64
        })
        .sum()
}

/// Bethe component at heights `y` (any parity mix is rejected upstream).
/// On the left side this is the conjugated component `conj(Phi^L_k(y))`.
pub(crate) fn component(
    sys: &OneWalkEigenSystem,
    idx: &BetheIndex,
    side: Side,
    y: &[i64],
) -> Complex {
    let n = y.len();
    let m = CMatrix::from_fn(n, n, |a, b| sys.component(side, idx.ks()[b], y[a]));
    complex_determinant(&m)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BetheVector {
    pub index: BetheIndex,
    pub side: Side,
    pub parity: Parity,
    /// Components over the occupations of `parity`, lexicographic order.
    pub components: Vec<Complex>,
    pub lambda: Complex,
}

/// Builds `Phi^side_{p,k}` over all of `U_p`.
pub fn build_bethe_vector(
    sys: &OneWalkEigenSystem,
    idx: &BetheIndex,
    side: Side,
    parity: Parity,
) -> Result<BetheVector> {
    let n = idx.ks().len();
    let occupations = sys.geometry().occupations(parity, n)?;
    let components = occupations
        .iter()
        .map(|y| {
            let c = component(sys, idx, side, y.heights());
            match side {
                Side::Right => c,
                Side::Left => c.conj(),
            }
        })
        .collect();
    Ok(BetheVector {
        index: idx.clone(),
        side,
        parity,
        components,
        lambda: idx.eigenvalue(sys),
    })
}

/// Worst residual seen for one relation, and where.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelationResidual {
    pub relation: &'static str,
    pub max_residual: f64,
    pub worst_index: String,
}

/// Outcome of checking every N-walk relation over `K_N`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BetheReport {
    pub walkers: usize,
    /// `|K_N|`, which must equal `|U_p| = C((L+1)/2, N)`.
    pub index_count: usize,
    pub dimension: usize,
    pub relations: Vec<RelationResidual>,
}

impl BetheReport {
    pub fn max_residual(&self) -> f64 {
        self.relations
            .iter()
            .map(|r| r.max_residual)
            .fold(0.0, f64::max)
    }

    pub fn check(&self, eps: f64) -> Result<()> {
        if self.index_count != self.dimension {
            return Err(Error::Verification {
                relation: "index count".into(),
                index: format!("|K_N| = {}, dimension {}", self.index_count, self.dimension),
                residual: f64::INFINITY,
                tolerance: eps,
            });
        }
        match self
            .relations
            .iter()
            .find(|r| r.max_residual.is_nan() || r.max_residual > eps)
        {
            Some(r) => Err(Error::Verification {
                relation: r.relation.to_string(),
                index: r.worst_index.clone(),
                residual: r.max_residual,
                tolerance: eps,
            }),
            None => Ok(()),
        }
    }
}

struct Tracker {
    relation: &'static str,
    worst: f64,
    at: String,
}

impl Tracker {
    fn new(relation: &'static str) -> Self {
        Tracker {
            relation,
            worst: 0.0,
            at: String::new(),
        }
    }

    fn see(&mut self, value: f64, at: impl FnOnce() -> String) {
        // a NaN residual sticks, so it can never pass a check
        if self.worst.is_nan() {
            return;
        }
        if value.is_nan() || value > self.worst || self.at.is_empty() {
            self.worst = value;
            self.at = at();
        }
    }

    fn finish(self) -> RelationResidual {
        RelationResidual {
            relation: self.relation,
            max_residual: self.worst,
            worst_index: self.at,
        }
    }
}

/// Residuals of the N-walk cyclic, two-step, biorthonormality and
/// completeness relations for every `k` in `K_N`.
pub fn bethe_residuals(
    sys: &OneWalkEigenSystem,
    ws: &WeightSystem,
    n: usize,
) -> Result<BetheReport> {
    let geom = sys.geometry();
    geom.check_walkers(n)?;
    let eo = complex_matrix(&build_n_step(ws, n, Step::EvenToOdd)?);
    let oe = complex_matrix(&build_n_step(ws, n, Step::OddToEven)?);
    let ee = &eo * &oe;
    let oo = &oe * &eo;
    let indices = BetheIndex::all(sys.len(), n);
    let dim = eo.nrows();

    let columns = |side: Side, p: Parity| -> Result<CMatrix> {
        let vecs = indices
            .iter()
            .map(|k| build_bethe_vector(sys, k, side, p).map(|v| v.components))
            .collect::<Result<Vec<_>>>()?;
        // right vectors as columns, dual (conjugated left) vectors as rows
        Ok(match side {
            Side::Right => CMatrix::from_fn(dim, indices.len(), |y, k| vecs[k][y]),
            Side::Left => CMatrix::from_fn(indices.len(), dim, |k, y| vecs[k][y].conj()),
        })
    };
    let right_e = columns(Side::Right, Parity::Even)?;
    let right_o = columns(Side::Right, Parity::Odd)?;
    let dual_e = columns(Side::Left, Parity::Even)?;
    let dual_o = columns(Side::Left, Parity::Odd)?;

    let rel = |res: DVector<Complex>, mat: &CMatrix, x: &DVector<Complex>| {
        norm_inf_vec(res.iter()) / (norm_one(mat) * norm_inf_vec(x.iter())).max(1.0)
    };

    let mut right_one = Tracker::new("right cyclic (one-step)");
    let mut left_one = Tracker::new("left cyclic (one-step)");
    let mut right_two = Tracker::new("right eigen (two-step)");
    let mut left_two = Tracker::new("left eigen (two-step)");
    for (j, idx) in indices.iter().enumerate() {
        let lam = idx.eigenvalue(sys);
        let lam2 = lam * lam;
        let re: DVector<Complex> = right_e.column(j).into();
        let ro: DVector<Complex> = right_o.column(j).into();
        let de: DVector<Complex> = dual_e.row(j).transpose();
        let dor: DVector<Complex> = dual_o.row(j).transpose();
        let at = || idx.to_string();

        right_one.see(rel(&oe * &re - &ro * lam, &oe, &re), at);
        right_one.see(rel(&eo * &ro - &re * lam, &eo, &ro), at);
        left_one.see(rel(oe.transpose() * &dor - &de * lam, &oe, &dor), at);
        left_one.see(rel(eo.transpose() * &de - &dor * lam, &eo, &de), at);
        right_two.see(rel(&ee * &re - &re * lam2, &ee, &re), at);
        right_two.see(rel(&oo * &ro - &ro * lam2, &oo, &ro), at);
        left_two.see(rel(ee.transpose() * &de - &de * lam2, &ee, &de), at);
        left_two.see(rel(oo.transpose() * &dor - &dor * lam2, &oo, &dor), at);
    }

    let mut ortho = Tracker::new("biorthonormality");
    let mut complete = Tracker::new("completeness");
    for (name, right, dual) in [("even", &right_e, &dual_e), ("odd", &right_o, &dual_o)] {
        ortho.see(identity_defect(&(dual * right)), || name.to_string());
        complete.see(identity_defect(&(right * dual)), || name.to_string());
    }

    Ok(BetheReport {
        walkers: n,
        index_count: indices.len(),
        dimension: dim,
        relations: vec![
            right_one.finish(),
            left_one.finish(),
            right_two.finish(),
            left_two.finish(),
            ortho.finish(),
            complete.finish(),
        ],
    })
}

/// [`bethe_residuals`] followed by a check that every residual is within `eps`.
pub fn verify_cyclic_n(
    sys: &OneWalkEigenSystem,
    ws: &WeightSystem,
    n: usize,
    eps: f64,
) -> Result<BetheReport> {
    let report = bethe_residuals(sys, ws, n)?;
    report.check(eps)?;
    Ok(report)
}

/// `Phi_k(y)` for arbitrary one-walk functions, by the permutation sum.
/// Test and cross-check helper; [`build_bethe_vector`] uses elimination.
pub fn antisymmetrised(ks: &[usize], ys: &[i64], f: impl Fn(usize, i64) -> Complex) -> Complex {
    permutation_sum(ks.len(), |a, b| f(ks[b], ys[a]))
}

/// Zero-safe relative error `|a - b| / max(1, |b|)`.
pub fn relative_error(a: Complex, b: Complex) -> f64 {
    let d = (a - b).norm();
    if b.is_zero() {
        d
    } else {
        d / b.norm().max(1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::StripGeometry;
    use crate::spectral::DEFAULT_TOLERANCE;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn uniform(w: i64) -> WeightSystem {
        WeightSystem::uniform(StripGeometry::new(w).unwrap())
    }

    #[test]
    fn index_sets() {
        assert_eq!(BetheIndex::all(5, 3).len(), 10);
        assert_eq!(BetheIndex::all(3, 3), vec![BetheIndex(vec![0, 1, 2])]);
        assert!(BetheIndex::all(2, 3).is_empty());
        assert!(BetheIndex::new(vec![1, 1], 3).is_err());
        assert!(BetheIndex::new(vec![2, 1], 3).is_err());
        assert!(BetheIndex::new(vec![0, 3], 3).is_err());
        assert!(BetheIndex::new(vec![0, 2], 3).is_ok());
    }

    #[test]
    fn single_walker_vector_is_one_walk_vector() {
        let sys = OneWalkEigenSystem::solve(&uniform(7), DEFAULT_TOLERANCE).unwrap();
        for k in 0..sys.len() {
            let idx = BetheIndex::new(vec![k], sys.len()).unwrap();
            for p in [Parity::Even, Parity::Odd] {
                let r = build_bethe_vector(&sys, &idx, Side::Right, p).unwrap();
                assert_eq!(r.components, sys.right(p, k));
                let l = build_bethe_vector(&sys, &idx, Side::Left, p).unwrap();
                assert_eq!(l.components, sys.left(p, k));
                assert_eq!(r.lambda, sys.lambdas()[k]);
            }
        }
    }

    #[test]
    fn two_walker_component_is_a_2x2_determinant() {
        let sys = OneWalkEigenSystem::solve(&uniform(3), DEFAULT_TOLERANCE).unwrap();
        let idx = BetheIndex::new(vec![0, 1], 2).unwrap();
        let v = build_bethe_vector(&sys, &idx, Side::Right, Parity::Odd).unwrap();
        let r0 = sys.right(Parity::Odd, 0);
        let r1 = sys.right(Parity::Odd, 1);
        // heights (1,3) sit at positions 0 and 1
        let expected = r0[0] * r1[1] - r1[0] * r0[1];
        assert_eq!(v.components.len(), 1);
        assert!((v.components[0] - expected).norm() < 1e-14);
        let lam = sys.lambdas()[0] * sys.lambdas()[1];
        assert!((v.lambda - lam).norm() < 1e-15);
    }

    #[test]
    fn elimination_matches_permutation_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let ws = WeightSystem::random(StripGeometry::new(9).unwrap(), &mut rng);
        let sys = OneWalkEigenSystem::solve(&ws, DEFAULT_TOLERANCE).unwrap();
        for n in 1..=4 {
            for idx in BetheIndex::all(sys.len(), n) {
                for y in sys.geometry().occupations(Parity::Even, n).unwrap() {
                    for side in [Side::Left, Side::Right] {
                        let fast = component(&sys, &idx, side, y.heights());
                        let slow = antisymmetrised(idx.ks(), y.heights(), |k, h| {
                            sys.component(side, k, h)
                        });
                        assert!((fast - slow).norm() < 1e-12, "{idx} {y}");
                    }
                }
            }
        }
    }

    #[test]
    fn repeated_heights_vanish() {
        let sys = OneWalkEigenSystem::solve(&uniform(7), DEFAULT_TOLERANCE).unwrap();
        let idx = BetheIndex::new(vec![0, 2], 4).unwrap();
        let c = component(&sys, &idx, Side::Right, &[3, 3]);
        assert!(c.norm() < 1e-14);
        // repeated one-walk index via the permutation sum
        let c = antisymmetrised(&[1, 1], &[1, 3], |k, h| sys.component(Side::Right, k, h));
        assert!(c.norm() < 1e-14);
    }

    #[test]
    fn uniform_l5_two_walkers() {
        let ws = uniform(5);
        let sys = OneWalkEigenSystem::solve(&ws, DEFAULT_TOLERANCE).unwrap();
        let report = verify_cyclic_n(&sys, &ws, 2, 1e-9).unwrap();
        assert_eq!(report.index_count, 3);
        assert_eq!(report.dimension, 3);
        assert!(report.max_residual() < 1e-9, "{report:?}");
    }

    #[test]
    fn fully_packed_is_one_by_one() {
        let ws = uniform(5);
        let sys = OneWalkEigenSystem::solve(&ws, DEFAULT_TOLERANCE).unwrap();
        let report = verify_cyclic_n(&sys, &ws, 3, 1e-9).unwrap();
        assert_eq!(report.index_count, 1);
        assert_eq!(report.dimension, 1);
    }

    #[test]
    fn report_flags_failures() {
        let report = BetheReport {
            walkers: 2,
            index_count: 3,
            dimension: 3,
            relations: vec![RelationResidual {
                relation: "completeness",
                max_residual: 1e-3,
                worst_index: "even".into(),
            }],
        };
        match report.check(1e-9) {
            Err(Error::Verification {
                relation, index, ..
            }) => {
                assert_eq!(relation, "completeness");
                assert_eq!(index, "even");
            }
            other => panic!("{other:?}"),
        }
        let nan = BetheReport {
            relations: vec![RelationResidual {
                relation: "x",
                max_residual: f64::NAN,
                worst_index: String::new(),
            }],
            ..report
        };
        assert!(nan.check(1e-9).is_err());
    }

    #[test]
    fn permutation_sum_is_a_determinant() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for n in 1..=4 {
            let m = CMatrix::from_fn(n, n, |_, _| Complex::new(rng.gen(), rng.gen()));
            let a = permutation_sum(n, |r, c| m[(r, c)]);
            assert!((a - complex_determinant(&m)).norm() < 1e-12);
        }
    }
}
