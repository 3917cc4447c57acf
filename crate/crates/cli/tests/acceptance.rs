//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::Instant;

use num_complex::Complex64 as Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use vicious_core::bethe::{
    antisymmetrised, bethe_residuals, permutation_sum, relative_error, BetheIndex,
};
use vicious_core::exact::{int, to_f64, Rational};
use vicious_core::gv::{gv_z, one_wall_threshold};
use vicious_core::paths::{brute_force_z, half_plane_brute_force_z};
use vicious_core::spectral::OneWalkEigenSystem;
use vicious_core::transfer::TransferSystem;
use vicious_core::{Error, OccupationVector, Parity, StripGeometry, WeightConfig, WeightSystem};

const TOL: f64 = 1e-9;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn random_system(width: i64, n: usize, i: u64) -> WeightSystem {
    let seed = (width as u64) * 1_000 + (n as u64) * 100 + i;
    WeightSystem::random(
        StripGeometry::new(width).unwrap(),
        &mut ChaCha8Rng::seed_from_u64(seed),
    )
}

fn starts(geom: StripGeometry, n: usize) -> Vec<OccupationVector> {
    [Parity::Even, Parity::Odd]
        .into_iter()
        .flat_map(|p| geom.occupations(p, n).unwrap())
        .collect()
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn grid() -> Vec<(i64, usize)> {
    let mut out = Vec::new();
    for width in [3i64, 5, 7] {
        for n in 1..=3usize {
            if n <= ((width + 1) / 2) as usize {
                out.push((width, n));
            }
        }
    }
    out
}

fn three_way_equality() -> Outcome {
    let mut checked = 0usize;
    for (width, n) in grid() {
        for i in 0..10 {
            let ws = random_system(width, n, i);
            let geom = ws.geometry();
            let transfer = TransferSystem::new(&ws, n).unwrap();
            for t in 0..=8u32 {
                for yi in starts(geom, n) {
                    let row = transfer.row(&yi, t).unwrap();
                    let ends = geom.occupations(yi.parity().after(t), n).unwrap();
                    for (yf, tm) in ends.iter().zip(&row) {
                        let brute = brute_force_z(&ws, &yi, yf, t).unwrap();
                        let det = gv_z(&ws, &yi, yf, t).unwrap();
                        if &brute != tm || tm != &det {
                            return Err(format!(
                                "L={width} N={n} system {i} t={t} {yi}->{yf}: \
                                 brute {brute}, transfer {tm}, gv {det}"
                            ));
                        }
                        checked += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{checked} endpoint pairs exactly equal"))
}

fn spectral_agreement() -> Outcome {
    let mut checked = 0usize;
    let mut excluded = Vec::new();
    let mut worst: f64 = 0.0;
    for (width, n) in grid() {
        for i in 0..10 {
            let ws = random_system(width, n, i);
            let geom = ws.geometry();
            let sys = match OneWalkEigenSystem::solve(&ws, TOL) {
                Ok(s) => s,
                Err(e @ (Error::Completeness(_) | Error::DegenerateSpectrum(_))) => {
                    excluded.push(format!("L={width} N={n} system {i}: {e}"));
                    continue;
                }
                Err(e) => return Err(e.to_string()),
            };
            let transfer = TransferSystem::new(&ws, n).unwrap();
            for t in 0..=8u32 {
                for yi in starts(geom, n) {
                    let row = transfer.row(&yi, t).unwrap();
                    let ends = geom.occupations(yi.parity().after(t), n).unwrap();
                    for (yf, exact) in ends.iter().zip(&row) {
                        let z = sys.spectral_z(&ws, &yi, yf, t).unwrap();
                        let err = relative_error(z, Complex::new(to_f64(exact), 0.0));
                        worst = worst.max(err);
                        if err > TOL || z.im.abs() > TOL {
                            return Err(format!(
                                "L={width} N={n} system {i} t={t} {yi}->{yf}: spectral {z}, exact {exact}"
                            ));
                        }
                        checked += 1;
                    }
                }
            }
        }
    }
    let mut detail = format!("{checked} values, worst relative error {worst:.2e}");
    if excluded.is_empty() {
        detail.push_str(", no system excluded");
    } else {
        detail.push_str(&format!(", excluded: {}", excluded.join("; ")));
    }
    Ok(detail)
}

fn bethe_structure() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut runs = 0;
    for width in [5i64, 7, 9] {
        let geom = StripGeometry::new(width).unwrap();
        for n in [2usize, 3] {
            let systems = std::iter::once(WeightSystem::uniform(geom))
                .chain((0..3).map(|i| random_system(width, n, 50 + i)));
            for ws in systems {
                let sys = OneWalkEigenSystem::solve(&ws, TOL).map_err(|e| e.to_string())?;
                let report = bethe_residuals(&sys, &ws, n).map_err(|e| e.to_string())?;
                let expected = binomial(geom.class_size(), n);
                if report.index_count != expected || report.dimension != expected {
                    return Err(format!(
                        "L={width} N={n}: |K_N| = {}, dimension {}, expected {expected}",
                        report.index_count, report.dimension
                    ));
                }
                report
                    .check(TOL)
                    .map_err(|e| format!("L={width} N={n}: {e}"))?;
                worst = worst.max(report.max_residual());
                runs += 1;
            }
        }
    }
    Ok(format!("{runs} systems, worst residual {worst:.2e}"))
}

fn random_table(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Vec<Vec<Complex>> {
    (0..rows)
        .map(|_| {
            (0..cols)
                .map(|_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect()
        })
        .collect()
}

fn permutation_sums() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut worst: f64 = 0.0;
    let mut compare = |lhs: Complex, rhs: Complex, what: &str| -> Result<(), String> {
        let err = (lhs - rhs).norm() / rhs.norm().max(1.0);
        worst = worst.max(err);
        if err > TOL {
            Err(format!("{what}: {lhs} vs {rhs}"))
        } else {
            Ok(())
        }
    };
    for width in [5i64, 7] {
        let geom = StripGeometry::new(width).unwrap();
        let m = geom.class_size();
        let heights = geom.heights(Parity::Odd);
        for n in [2usize, 3] {
            let phi = random_table(&mut rng, m, m);
            let psi = random_table(&mut rng, m, m);
            let f = random_table(&mut rng, 1, m).remove(0);
            let at = |table: &Vec<Vec<Complex>>, k: usize, y: i64| table[k][(y / 2) as usize];
            let ks = BetheIndex::all(m, n);
            let ys = geom.occupations(Parity::Odd, n).unwrap();
            for y in &ys {
                for y2 in &ys {
                    let lhs: Complex = ks
                        .iter()
                        .map(|k| {
                            let fk: Complex = k.ks().iter().map(|&i| f[i]).product();
                            fk * antisymmetrised(k.ks(), y.heights(), |i, h| at(&phi, i, h))
                                * antisymmetrised(k.ks(), y2.heights(), |i, h| at(&psi, i, h))
                        })
                        .sum();
                    let rhs = permutation_sum(n, |a, b| {
                        (0..m)
                            .map(|k| {
                                f[k] * at(&phi, k, y.heights()[a]) * at(&psi, k, y2.heights()[b])
                            })
                            .sum()
                    });
                    compare(lhs, rhs, &format!("k-sum L={width} N={n} {y} {y2}"))?;
                }
            }
            for k in &ks {
                for k2 in &ks {
                    let lhs: Complex = ys
                        .iter()
                        .map(|y| {
                            antisymmetrised(k.ks(), y.heights(), |i, h| at(&phi, i, h))
                                * antisymmetrised(k2.ks(), y.heights(), |i, h| at(&psi, i, h))
                        })
                        .sum();
                    let rhs = permutation_sum(n, |a, b| {
                        heights
                            .iter()
                            .map(|&h| at(&phi, k.ks()[a], h) * at(&psi, k2.ks()[b], h))
                            .sum()
                    });
                    compare(lhs, rhs, &format!("y-sum L={width} N={n}"))?;
                }
            }
        }
    }
    Ok(format!("worst relative difference {worst:.2e}"))
}

/// Occupations of parity `p` with every height at most 5.
fn low_occupations(p: Parity, n: usize) -> Vec<OccupationVector> {
    StripGeometry::new(5).unwrap().occupations(p, n).unwrap()
}

fn one_wall_limit() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut configs = vec![("uniform".to_string(), WeightConfig::default())];
    for i in 0..2 {
        let mut cfg = WeightConfig::default();
        for y in 0..4 {
            cfg.up.insert(
                y,
                vicious_core::exact::ratio(rng.gen_range(1..=9), rng.gen_range(1..=4)),
            );
            cfg.down.insert(
                y + 1,
                vicious_core::exact::ratio(rng.gen_range(1..=9), rng.gen_range(1..=4)),
            );
            cfg.initial.insert(
                y,
                vicious_core::exact::ratio(rng.gen_range(1..=9), rng.gen_range(1..=4)),
            );
        }
        configs.push((format!("random {i}"), cfg));
    }
    let mut checked = 0usize;
    for (name, cfg) in &configs {
        for n in 1..=3usize {
            for p in [Parity::Even, Parity::Odd] {
                for t in 0..=8u32 {
                    for yi in low_occupations(p, n) {
                        for yf in low_occupations(p.after(t), n) {
                            let l0 = one_wall_threshold(&yi, &yf, t);
                            let at = |w: i64| {
                                gv_z(&cfg.restrict(StripGeometry::new(w).unwrap()), &yi, &yf, t)
                                    .unwrap()
                            };
                            let z = at(l0);
                            if at(l0 + 2) != z || at(l0 + 4) != z {
                                return Err(format!(
                                    "{name} {yi}->{yf} t={t}: varies above L={l0}"
                                ));
                            }
                            if name == "uniform" {
                                let brute = half_plane_brute_force_z(cfg, &yi, &yf, t).unwrap();
                                if brute != z {
                                    return Err(format!(
                                        "{yi}->{yf} t={t}: determinant {z}, half-plane count {brute}"
                                    ));
                                }
                            }
                            checked += 1;
                        }
                    }
                }
            }
        }
    }
    Ok(format!(
        "{checked} endpoint pairs stable at threshold, +2, +4"
    ))
}

fn central_binomial() -> Outcome {
    let mut checked = 0;
    for t in [2u32, 4, 6, 8] {
        let half = (t / 2) as i64;
        let expected = int(binomial(t as usize, t as usize / 2) as i64);
        for width in [t as i64 + 1, t as i64 + 3, t as i64 + 5] {
            let ws = WeightSystem::uniform(StripGeometry::new(width).unwrap());
            // both walls out of reach
            for y in half..=width - half {
                let v = OccupationVector::new(vec![y]).unwrap();
                let values: [Rational; 3] = [
                    brute_force_z(&ws, &v, &v, t).unwrap(),
                    TransferSystem::new(&ws, 1).unwrap().z(&v, &v, t).unwrap(),
                    gv_z(&ws, &v, &v, t).unwrap(),
                ];
                if values.iter().any(|x| *x != expected) {
                    return Err(format!(
                        "L={width} y={y} t={t}: {values:?}, expected {expected}"
                    ));
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} cases equal C(t, t/2)"))
}

fn cli_determinism() -> Outcome {
    let runs: [&[&str]; 3] = [
        &["verify", "--L", "3", "--N", "2", "--t", "2", "--uniform"],
        &["verify", "--L", "7", "--N", "3", "--t", "5", "--seed", "11"],
        &[
            "verify", "--L", "5", "--N", "2", "--t", "4", "--seed", "3", "--format", "csv",
        ],
    ];
    for args in runs {
        let once = || {
            Command::new(env!("CARGO_BIN_EXE_vicious"))
                .args(args)
                .output()
                .expect("binary runs")
        };
        let (a, b) = (once(), once());
        if a.status.code() != Some(0) {
            return Err(format!(
                "{args:?} exited {:?}: {}",
                a.status.code(),
                String::from_utf8_lossy(&a.stdout)
            ));
        }
        if a.stdout != b.stdout || a.status != b.status {
            return Err(format!("{args:?}: outputs differ"));
        }
    }
    Ok(format!(
        "{} invocations byte-identical across two runs",
        runs.len()
    ))
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("three-way exact equality", three_way_equality),
        ("spectral agreement", spectral_agreement),
        ("Bethe structure", bethe_structure),
        ("permutation-sum identities", permutation_sums),
        ("one-wall limit", one_wall_limit),
        ("counting sanity", central_binomial),
        ("CLI determinism", cli_determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let outcome =
            catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".to_string()));
        let secs = started.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {} {name}: {detail} ({secs:.1}s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {} {name}: {detail} ({secs:.1}s)", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
    println!("all {} criteria passed", criteria.len());
}
