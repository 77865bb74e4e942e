//! Acceptance criteria, one line of output each. Runs without the libtest
//! harness so the lines are always printed.

mod common;

use std::collections::{BTreeMap, HashMap, HashSet};
use std::panic::{self, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use common::*;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use plucker::equations::render_latex_row;
use plucker::pvectors::{
    is_simple, random_pvector, random_simple, residual, wedge, PVector, SimplicityTest,
    SystemChoice, Tolerance,
};
use plucker::structure::{self, decomposition_identity, pair_combine, pair_families};
use plucker::{
    dedupe, gen_plucker, gen_plucker_like, GrassmannParams, IndexStyle, Label, MultiIndex, QuadPoly,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const REDUCED_ROWS: &str = include_str!("data/plucker_reduced_rows.tex");
const LIKE_ROWS: &str = include_str!("data/plucker_like_rows.tex");

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn params(n: u32, p: u32) -> GrassmannParams {
    GrassmannParams::new(n, p).unwrap()
}

fn label(s: &str) -> Label {
    Label::parse(s).unwrap()
}

/// `(n, p)` with `4 <= n <= 9`, `2 <= p <= n-2`.
fn grid() -> Vec<(u32, u32)> {
    (4..=9u32)
        .flat_map(|n| (2..=n - 2).map(move |p| (n, p)))
        .collect()
}

fn timed(limit: Option<Duration>, body: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let detail = body()?;
    let elapsed = start.elapsed();
    if let Some(limit) = limit {
        ensure!(elapsed < limit, "took {elapsed:.2?}, limit {limit:?}");
    }
    Ok(format!("{detail}; {elapsed:.2?}"))
}

fn ac1_counts() -> Outcome {
    timed(Some(Duration::from_secs(1)), || {
        let plucker = gen_plucker(params(6, 3)).map_err(|e| e.to_string())?;
        let like = gen_plucker_like(params(6, 3)).map_err(|e| e.to_string())?;
        let reduced = dedupe(&plucker).reduced;
        let expected = (
            binomial(6, 2) * binomial(6, 4),
            binomial(6, 1) * binomial(6, 5),
        );
        ensure!(expected == (225, 36), "oracle counts {expected:?}");
        ensure!(plucker.len() == 225, "Plücker {}", plucker.len());
        ensure!(like.len() == 36, "Plücker-like {}", like.len());
        ensure!(reduced.len() == 45, "reduced {}", reduced.len());
        Ok("225 / 36 / 45".into())
    })
}

fn ac2_golden() -> Outcome {
    let like = gen_plucker_like(params(6, 3)).unwrap().canonical();
    for (pos, (eq, expected)) in like.iter().zip(LIKE_ROWS.lines()).enumerate() {
        let ours = render_latex_row(pos + 1, eq, true, IndexStyle::Compact);
        ensure!(ours == expected, "row {}: {ours}", pos + 1);
    }
    ensure!(like.len() == LIKE_ROWS.lines().count(), "row count");

    let plucker = gen_plucker(params(6, 3)).unwrap().canonical();
    let row7 = plucker.row(7).unwrap();
    let mut expected = Poly::new();
    add(&mut expected, 1, vec![1, 2, 3], vec![1, 4, 5]);
    add(&mut expected, -1, vec![1, 2, 4], vec![1, 3, 5]);
    add(&mut expected, 1, vec![1, 2, 5], vec![1, 3, 4]);
    ensure!(
        row7.label() == &label("12,1345"),
        "row 7 is {}",
        row7.label()
    );
    ensure!(
        from_library(row7.terms()) == oracle_canonical(&expected),
        "row 7 terms"
    );
    ensure!(
        oracle_canonical(&oracle_raw(&[1, 2], &[1, 3, 4, 5], 1)) == oracle_canonical(&expected),
        "oracle row 7"
    );
    let row19 = plucker.row(19).unwrap();
    ensure!(
        row19.label() == &label("13,1245"),
        "row 19 is {}",
        row19.label()
    );
    ensure!(row7.terms() == row19.terms(), "rows 7 and 19 differ");
    Ok("36 rows byte-exact; #7 = #19".into())
}

fn ac3_ratio() -> Outcome {
    for (n, p) in grid() {
        let big = gen_plucker(params(n, p)).unwrap().len() as i64;
        let small = gen_plucker_like(params(n, p)).unwrap().len() as i64;
        let (n, p) = (n as i64, p as i64);
        let observed = BigRational::new(big.into(), small.into());
        let formula = BigRational::new(
            BigInt::from((p + 2) * (n - p + 2)),
            BigInt::from((p - 1) * (n - p - 1)),
        );
        ensure!(
            observed == formula,
            "(n,p) = ({n},{p}): {observed} vs {formula}"
        );
    }
    Ok(format!("{} grid points", grid().len()))
}

fn ac4_decomposition() -> Outcome {
    timed(Some(Duration::from_secs(30)), || {
        let mut labels = 0;
        for (n, p) in [(4, 2), (5, 2), (5, 3), (6, 3), (7, 3), (7, 4), (8, 4)] {
            let gp = params(n, p);
            for eq in gen_plucker_like(gp).unwrap().iter() {
                let l = eq.label();
                ensure!(
                    decomposition_identity(gp, l).unwrap(),
                    "library identity fails at {l}"
                );

                let (j, k) = (l.j.as_slice(), l.k.as_slice());
                let sym = union(&minus(j, k), &minus(k, j));
                let mut lhs = Poly::new();
                for i in minus(k, j) {
                    let inversions = sym.iter().filter(|&&x| x > i).count();
                    let sign = if inversions % 2 == 0 { 1 } else { -1 };
                    add_poly(
                        &mut lhs,
                        &oracle_raw(&union(j, &[i]), &minus(k, &[i]), 1),
                        sign,
                    );
                }
                let mut rhs = Poly::new();
                add_poly(&mut rhs, &oracle_raw(j, k, 2), 2);
                ensure!(lhs == rhs, "oracle identity fails at {l}");
                ensure!(
                    from_library_poly(&eq.collect()) == oracle_raw(j, k, 2),
                    "library raw form differs from oracle at {l}"
                );
                labels += 1;
            }
        }

        let plucker = gen_plucker(params(6, 3)).unwrap().canonical();
        let mut sum = QuadPoly::zero();
        for (row, sign) in [(15, 1), (29, 1), (57, 1), (43, -1), (71, -1)] {
            sum.add_scaled(&plucker.row(row).unwrap().collect(), sign);
        }
        let six = gen_plucker_like(params(6, 3))
            .unwrap()
            .canonical()
            .row(6)
            .unwrap()
            .clone();
        ensure!(six.label() == &label("1,23456"), "row 6 is {}", six.label());
        ensure!(
            sum == six.collect().scaled(2),
            "+15 +29 +57 -43 -71 is not 2·#6"
        );
        ensure!(
            sum.normalized().terms().collect::<Vec<_>>() == six.terms(),
            "canonical sum differs from #6"
        );
        Ok(format!("{labels} labels; +#15 +#29 +#57 -#43 -#71 = 2·#6"))
    })
}

fn ac5_census() -> Outcome {
    timed(Some(Duration::from_secs(120)), || {
        for (n, p) in grid() {
            let gp = params(n, p);
            let report = structure::census(gp).unwrap();
            ensure!(report.holds(), "library census fails at ({n},{p})");

            let like = gen_plucker_like(gp).unwrap().canonical();
            let mut seen = HashSet::new();
            let mut by_q: BTreeMap<usize, (u128, HashSet<usize>)> = BTreeMap::new();
            let mut ten_term_supports: HashMap<Vec<(Set, Set)>, u128> = HashMap::new();
            for eq in like.iter() {
                ensure!(
                    !eq.terms().is_empty(),
                    "trivial {} at ({n},{p})",
                    eq.label()
                );
                ensure!(
                    seen.insert(eq.terms().to_vec()),
                    "repeat {} at ({n},{p})",
                    eq.label()
                );
                let q = inter(eq.label().j.as_slice(), eq.label().k.as_slice()).len();
                let slot = by_q.entry(q).or_default();
                slot.0 += 1;
                slot.1.insert(eq.terms().len());
                if q + 3 == p as usize {
                    let support = from_library(eq.terms())
                        .into_iter()
                        .map(|(_, a, b)| (a, b))
                        .collect();
                    *ten_term_supports.entry(support).or_default() += 1;
                }
            }

            let (ni, pi) = (n as i64, p as i64);
            let mut expected: BTreeMap<usize, (u128, usize)> = BTreeMap::new();
            expected.insert(
                p as usize - 2,
                (multinomial(ni, &[4, pi - 2, ni - pi - 2]), 3),
            );
            if p >= 3 && p + 3 <= n {
                expected.insert(
                    p as usize - 3,
                    (multinomial(ni, &[1, 5, pi - 3, ni - pi - 3]), 10),
                );
            }
            for q in 0.max(2 * pi - ni)..=pi - 4 {
                let free = (pi + 2 - q) as u64;
                let count = multinomial(ni, &[q, pi - 2 - q, pi + 2 - q, ni + q - 2 * pi]);
                let terms = binomial(free, 2) as usize;
                ensure!(terms >= 15, "C({free},2) < 15");
                expected.insert(q as usize, (count, terms));
            }
            let observed: BTreeMap<usize, (u128, usize)> = by_q
                .iter()
                .map(|(&q, (count, lens))| {
                    let len = if lens.len() == 1 {
                        *lens.iter().next().unwrap()
                    } else {
                        0
                    };
                    (q, (*count, len))
                })
                .collect();
            ensure!(
                observed == expected,
                "({n},{p}): {observed:?} vs {expected:?}"
            );

            let families = multinomial(ni, &[6, pi - 3, ni - pi - 3]);
            ensure!(
                ten_term_supports.len() as u128 == families
                    && ten_term_supports.values().all(|&c| c == 6),
                "({n},{p}): {} ten-term groups, expected {families} of six",
                ten_term_supports.len()
            );
            ensure!(
                like.len() as u128
                    == binomial(n as u64, p as u64 - 2) * binomial(n as u64, p as u64 + 2),
                "total at ({n},{p})"
            );
        }
        Ok(format!("{} grid points", grid().len()))
    })
}

fn ac6_pairs() -> Outcome {
    let gp = params(6, 3);
    let families = pair_families(gp);
    ensure!(families.len() == 1, "{} families", families.len());
    let family = &families[0];
    let mut outputs = HashSet::new();
    for i in 1..=6usize {
        for i2 in i + 1..=6 {
            let combined = pair_combine(gp, family, i, i2).unwrap();

            // E_i has j = l_i, k = l∖l_i with l = 123456.
            let ei = oracle_raw(&[i as u32], &minus(&range(6), &[i as u32]), 2);
            let ej = oracle_raw(&[i2 as u32], &minus(&range(6), &[i2 as u32]), 2);
            let mut sum = ei.clone();
            add_poly(&mut sum, &ej, if (i + i2) % 2 == 0 { 1 } else { -1 });
            let pair = vec![i as u32, i2 as u32];
            let target = oracle_canonical(&oracle_raw(&pair, &minus(&range(6), &pair), 1));
            ensure!(oracle_canonical(&sum) == target, "oracle ({i},{i2})");
            ensure!(
                from_library(combined.terms()) == target,
                "library ({i},{i2})"
            );
            ensure!(target.len() == 4, "({i},{i2}) has {} terms", target.len());
            outputs.insert(target);
        }
    }
    ensure!(outputs.len() == 15, "{} distinct outputs", outputs.len());

    let like = gen_plucker_like(gp).unwrap().canonical();
    let mut sum = like.row(6).unwrap().collect();
    sum.add_scaled(&like.row(11).unwrap().collect(), 1);
    let body: Vec<_> = sum.normalized().terms().collect();
    let row12 = REDUCED_ROWS.lines().nth(11).unwrap();
    let reduced = dedupe(&gen_plucker(gp).unwrap()).reduced;
    let twelve = reduced
        .iter()
        .find(|e| render_latex_row(12, e, false, IndexStyle::Compact) == row12)
        .ok_or("reduced row 12 not among reduced equations")?;
    ensure!(body == twelve.terms(), "#6 + #11 is not reduced row 12");
    Ok("15 distinct 4-term outputs; #6 + #11 = reduced row 12".into())
}

fn ac7_multiplicity() -> Outcome {
    let gp = params(6, 3);
    let plucker = gen_plucker(gp).unwrap().canonical();
    let like = gen_plucker_like(gp).unwrap().canonical();
    let mut in_plucker: HashMap<Vec<_>, usize> = HashMap::new();
    for eq in plucker.iter() {
        *in_plucker.entry(from_library(eq.terms())).or_default() += 1;
    }
    let mut in_like: HashMap<Vec<_>, usize> = HashMap::new();
    for eq in like.iter() {
        *in_like.entry(from_library(eq.terms())).or_default() += 1;
    }
    let three: Vec<_> = in_like.keys().filter(|t| t.len() == 3).cloned().collect();
    ensure!(three.len() == 30, "{} three-term equations", three.len());
    for terms in &three {
        ensure!(
            in_plucker.get(terms) == Some(&4),
            "multiplicity {:?}",
            in_plucker.get(terms)
        );
        ensure!(in_like[terms] == 1, "repeated in Plücker-like");
    }
    Ok("30 equations, 4 times each vs once".into())
}

fn random_rational(rng: &mut ChaCha8Rng) -> BigRational {
    BigRational::new(rng.gen_range(-7..=7).into(), rng.gen_range(1..=5).into())
}

fn ac8_simplicity() -> Outcome {
    let tol = Tolerance::default();
    let mut vectors = 0;
    let mut nonsimple = 0;
    for n in 2..=8u32 {
        for p in 1..n {
            let gp = params(n, p);
            let tests = [
                SimplicityTest::new(gp, SystemChoice::Plucker),
                SimplicityTest::new(gp, SystemChoice::PluckerLike),
            ];
            let systems: Vec<_> = tests.iter().filter_map(|t| t.system()).collect();
            for seed in 0..100u64 {
                let h = random_simple(gp, seed);
                for system in &systems {
                    let r = residual(system, &h, tol).unwrap();
                    ensure!(
                        r.violations.is_empty(),
                        "({n},{p}) seed {seed}: {:?}",
                        r.violations[0].label
                    );
                }
                let g = random_pvector(gp, seed);
                let verdicts: Vec<bool> = tests
                    .iter()
                    .map(|t| t.is_simple(&g, tol).unwrap())
                    .collect();
                ensure!(
                    verdicts[0] == verdicts[1],
                    "verdicts differ at ({n},{p}) seed {seed}"
                );
                nonsimple += usize::from(!verdicts[0]);
                vectors += 1;
            }

            // Simple vectors built from test-side minors, checked against both
            // the library wedge and the oracle equations.
            let mut rng = ChaCha8Rng::seed_from_u64(1000 + 10 * n as u64 + p as u64);
            for _ in 0..3 {
                let rows: Vec<Vec<BigRational>> = (0..p)
                    .map(|_| (0..n).map(|_| random_rational(&mut rng)).collect())
                    .collect();
                let minors = oracle_minors(&rows, n);
                let h = wedge(&rows).unwrap();
                let mut expected = PVector::zero(gp);
                for (idx, v) in &minors {
                    expected
                        .set(MultiIndex::new(idx.clone()).unwrap(), v.clone())
                        .unwrap();
                }
                ensure!(h == expected, "wedge differs from minors at ({n},{p})");
                for m in 1..=p.min(n - p).min(2) as usize {
                    for j in combinations(&range(n), p as usize - m) {
                        for k in combinations(&range(n), p as usize + m) {
                            let value = evaluate(&oracle_raw(&j, &k, m), &minors);
                            ensure!(value.is_zero(), "oracle equation nonzero at ({n},{p})");
                        }
                    }
                }
            }
        }
    }

    let mut h = PVector::<BigRational>::zero(params(6, 3));
    h.set("123".parse().unwrap(), BigRational::from_integer(1.into()))
        .unwrap();
    h.set("456".parse().unwrap(), BigRational::from_integer(1.into()))
        .unwrap();
    for choice in [SystemChoice::Plucker, SystemChoice::PluckerLike] {
        ensure!(
            !is_simple(&h, choice, tol).unwrap(),
            "v123 + v456 simple under {choice:?}"
        );
        let test = SimplicityTest::new(params(6, 3), choice);
        let r = residual(test.system().unwrap(), &h, tol).unwrap();
        ensure!(
            !r.violations.is_empty(),
            "no violations listed under {choice:?}"
        );
    }
    Ok(format!("{vectors} simple + {vectors} random vectors ({nonsimple} non-simple); v123 + v456 rejected"))
}

fn ac9_codimension() -> Outcome {
    let delta = params(6, 3).grassmann_codimension();
    let oracle = binomial(6, 3) as i64 - 1 - 3 * 3;
    ensure!(delta == BigInt::from(oracle) && oracle == 10, "Δ = {delta}");
    Ok("Δ(6,3) = 10".into())
}

fn ac10_determinism() -> Outcome {
    let configs: [&[&str]; 6] = [
        &["--n", "6", "--p", "3", "--m", "1"],
        &["--n", "6", "--p", "3", "--m", "2", "--format", "latex"],
        &[
            "--n", "8", "--p", "4", "--m", "1", "--dedupe", "--format", "csv",
        ],
        &["--n", "9", "--p", "4", "--m", "2", "--format", "json"],
        &["--n", "9", "--p", "5", "--m", "1", "--raw"],
        &["--n", "8", "--p", "4", "--m", "3", "--experimental"],
    ];
    for config in configs {
        let run = |jobs: &str| {
            Command::new(env!("CARGO_BIN_EXE_plucker"))
                .arg("generate")
                .args(config)
                .args(["--jobs", jobs])
                .output()
                .unwrap()
        };
        let (one, eight) = (run("1"), run("8"));
        ensure!(
            one.status.success() && eight.status.success(),
            "{config:?} failed"
        );
        ensure!(!one.stdout.is_empty(), "{config:?} printed nothing");
        ensure!(one.stdout == eight.stdout, "{config:?} differs");
    }
    Ok(format!("{} configurations", configs.len()))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("AC1 counts at (6,3)", ac1_counts),
        ("AC2 golden tables", ac2_golden),
        ("AC3 ratio identity", ac3_ratio),
        ("AC4 decomposition identity", ac4_decomposition),
        ("AC5 census", ac5_census),
        ("AC6 pair combinations", ac6_pairs),
        ("AC7 3-term multiplicity", ac7_multiplicity),
        ("AC8 simplicity oracle", ac8_simplicity),
        ("AC9 codimension", ac9_codimension),
        ("AC10 determinism across --jobs", ac10_determinism),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (name, check) in criteria {
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("[PASS] {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("[FAIL] {name}: {why}");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
