//! Acceptance suite: one PASS/FAIL line per criterion.

#[path = "../../core/tests/support/mod.rs"]
mod support;

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use support::{random_metric, random_signed, two_point, vertex_oracle, IndexMetric};
use walkbench::{execute, ExperimentConfig, RunOutput, Table};
use walkbench_core::actions::{equivariance_check_kappa, DyadicLine};
use walkbench_core::dual_norm::{contraction_check, deficiency, flat_norm, Backend, FlatNormOptions, WordMetric};
use walkbench_core::groups::{
    check_relations, kappa, kappa_inv, FreeGroup, FreeWord, Group, LatticeGroup, LatticePoint, Letter, ThompsonGroup,
    Variant, Word,
};
use walkbench_core::harmonic::{harmonic_transfer_check, transfer_on_group};
use walkbench_core::kv::{integer_schedule, kv_build, KvOptions, LatticeBoxOracle};
use walkbench_core::measures::{convolve, translate, FinMeasure, SignedFinMeasure};
use walkbench_core::weight::{parse_rational, rat, Rational};
use walkbench_core::Dyadic;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn within(start: Instant, limit: Duration) -> Result<String, String> {
    let t = start.elapsed();
    ensure!(t <= limit, "took {:.2}s, limit {}s", t.as_secs_f64(), limit.as_secs());
    Ok(format!("{:.2}s", t.as_secs_f64()))
}

fn config(v: Value) -> ExperimentConfig {
    serde_json::from_value(v).expect("valid config")
}

fn table<'a>(out: &'a RunOutput, name: &str) -> &'a Table {
    out.tables.iter().find(|t| t.name == name).unwrap_or_else(|| panic!("no table {name}"))
}

fn column(t: &Table, name: &str) -> usize {
    t.header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name} in {}", t.name))
}

fn q(s: &str) -> Rational {
    parse_rational(s).unwrap_or_else(|| panic!("not a rational: {s:?}"))
}

fn random_word<R: Rng>(rng: &mut R, gens: usize, max_len: usize) -> Word {
    let len = rng.gen_range(0..=max_len);
    Word::new((0..len).map(|_| Letter { gen: rng.gen_range(0..gens), inverse: rng.gen() }).collect())
}

fn random_measure<G: Group, R: Rng>(
    rng: &mut R,
    group: &G,
    atoms: usize,
    max_len: usize,
) -> FinMeasure<G::Elem, Rational> {
    let gens = group.generators().len();
    let pts: Vec<_> = (0..atoms).map(|_| group.word_eval(&random_word(rng, gens, max_len)).unwrap()).collect();
    let ws: Vec<i64> = (0..atoms).map(|_| rng.gen_range(1..=5)).collect();
    let total: i64 = ws.iter().sum();
    FinMeasure::from_atoms(pts.into_iter().zip(ws.into_iter().map(|w| rat(w, total)))).unwrap()
}

fn random_signed_on<G: Group, R: Rng>(
    rng: &mut R,
    group: &G,
    atoms: usize,
    max_len: usize,
) -> SignedFinMeasure<G::Elem, Rational> {
    let gens = group.generators().len();
    SignedFinMeasure::from_atoms((0..atoms).map(|_| {
        let p = group.word_eval(&random_word(rng, gens, max_len)).unwrap();
        (p, rat(rng.gen_range(-5..=5), rng.gen_range(1..=4)))
    }))
}

fn unit_dyadic<R: Rng>(rng: &mut R) -> Dyadic {
    let exp = rng.gen_range(1..=12u32);
    Dyadic::frac(rng.gen_range(1..(1i64 << exp)), exp)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let pairs = [(0, 2), (0, 3), (1, 3)];
    let mut reports = Vec::new();
    for v in [Variant::Unit, Variant::Line] {
        let r = check_relations(v, &pairs);
        ensure!(r.commutators_hold(), "{v:?}: {:?}", r.commutators);
        let mut report = Vec::new();
        for g in &r.gamma {
            ensure!(
                g.equals_gamma_n != g.equals_gamma_n_plus_1,
                "{v:?} (m,n)=({},{}) matches both or neither",
                g.m,
                g.n
            );
            report.push(format!("({},{})->{}", g.m, g.n, if g.equals_gamma_n { "gamma_n" } else { "gamma_n+1" }));
        }
        reports.push(report);
    }
    ensure!(reports[0] == reports[1], "variants disagree: {reports:?}");
    let t = within(start, Duration::from_secs(1))?;
    Ok(format!(
        "both commutators are the identity in both variants; gamma_m^-1 gamma_n gamma_m: {}; {t}",
        reports[0].join(" ")
    ))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let d = |s: &str| s.parse::<Dyadic>().unwrap();
    ensure!(kappa(&d("1/2")).unwrap() == d("0"), "kappa(1/2)");
    ensure!(kappa(&d("3/4")).unwrap() == d("1"), "kappa(3/4)");
    ensure!(kappa(&d("1/4")).unwrap() == d("-1"), "kappa(1/4)");
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..200 {
        let x = unit_dyadic(&mut rng);
        ensure!(kappa_inv(&kappa(&x).unwrap()) == x, "round trip at {x}");
    }
    for _ in 0..100 {
        let w = random_word(&mut rng, 2, 6);
        let x = unit_dyadic(&mut rng);
        ensure!(equivariance_check_kappa(&w, &x).unwrap(), "equivariance fails for {w:?} at {x}");
    }
    let t = within(start, Duration::from_secs(5))?;
    Ok(format!("3 values, 200 round trips, 100 equivariance pairs; {t}"))
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let simplex = FlatNormOptions { simplex_limit: 48, force: Some(Backend::Simplex) };
    for i in 0..100 {
        let n = rng.gen_range(1..=5);
        let d = random_metric(&mut rng, n);
        let c = random_signed(&mut rng, n);
        let m = SignedFinMeasure::from_atoms(c.iter().cloned().enumerate());
        let want = vertex_oracle(&c, &d);
        let got = flat_norm(&m, &IndexMetric(d), &simplex).value;
        ensure!(got == want, "instance {i}: simplex {got} vs oracle {want}");
    }
    for (num, den) in [(1, 3), (1, 1), (3, 2), (2, 1), (9, 4)] {
        let dxy = rat(num, den);
        let d = vec![vec![rat(0, 1), dxy.clone()], vec![dxy.clone(), rat(0, 1)]];
        let c = rat(2, 3);
        let m = SignedFinMeasure::from_atoms([(0usize, c.clone()), (1, -c.clone())]);
        let got = flat_norm(&m, &IndexMetric(d), &simplex).value;
        ensure!(got == two_point(&c, &dxy), "two-point at d={dxy}: {got}");
    }
    let t = within(start, Duration::from_secs(60))?;
    Ok(format!("100 instances equal the vertex oracle, two-point formula reproduced; {t}"))
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let opts = FlatNormOptions::default();
    let zg = LatticeGroup::new(1);
    let dz = WordMetric::standard(zg.clone());
    for i in 0..50 {
        let m = random_signed_on(&mut rng, &zg, 5, 5);
        let nu = random_measure(&mut rng, &zg, 4, 4);
        let r = contraction_check(&zg, &m, &nu, &dz, &opts);
        ensure!(r.holds, "Z instance {i}: {} > {}", r.convolved, r.original);
    }
    let f2 = FreeGroup::new(2);
    let df = WordMetric::standard(f2.clone());
    for i in 0..50 {
        let m = random_signed_on(&mut rng, &f2, 4, 3);
        let nu = random_measure(&mut rng, &f2, 3, 2);
        let r = contraction_check(&f2, &m, &nu, &df, &opts);
        ensure!(r.holds, "F2 instance {i}: {} > {}", r.convolved, r.original);
    }
    let t = within(start, Duration::from_secs(60))?;
    Ok(format!("50 + 50 instances; {t}"))
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let f2 = FreeGroup::new(2);
    for i in 0..50 {
        let mu = random_measure(&mut rng, &f2, 3, 2);
        let nu = random_measure(&mut rng, &f2, 3, 2);
        let salt: i64 = rng.gen_range(1..100);
        let f =
            move |w: &FreeWord| rat(w.letters().iter().map(|&l| l as i64 * 7 + salt).sum::<i64>().rem_euclid(11), 3);
        let g = f2.word_eval(&random_word(&mut rng, 2, 3)).unwrap();
        let x = f2.word_eval(&random_word(&mut rng, 2, 3)).unwrap();
        let inner = |y: &FreeWord| transfer_on_group(&f2, &nu, &f, y);
        ensure!(
            transfer_on_group(&f2, &convolve(&f2, &mu, &nu, 1), &f, &x) == transfer_on_group(&f2, &mu, &inner, &x),
            "composition fails on instance {i}"
        );
        let shifted = |y: &FreeWord| f(&f2.mul(&g, y));
        ensure!(
            transfer_on_group(&f2, &mu, &shifted, &x) == transfer_on_group(&f2, &mu, &f, &f2.mul(&g, &x)),
            "left translation fails on instance {i}"
        );
        ensure!(
            transfer_on_group(&f2, &translate(&f2, &g, &mu), &f, &x)
                == transfer_on_group(&f2, &mu, &f, &f2.mul(&x, &g)),
            "measure translation fails on instance {i}"
        );
    }
    let t = within(start, Duration::from_secs(30))?;
    Ok(format!("composition and both translation identities on 50 instances; {t}"))
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let line = ThompsonGroup::new(Variant::Line);
    let act = DyadicLine::new(line.clone());
    let mut rows = 0;
    for i in 0..50 {
        let mu = random_measure(&mut rng, &line, 3, 2);
        let x = Dyadic::frac(rng.gen_range(-16..16), rng.gen_range(0..3));
        let a: i64 = rng.gen_range(1..9);
        let f = move |p: &Dyadic| {
            let r = p.to_rational();
            Rational::new((r.numer() * a + r.denom()) % 13, r.denom().clone() + 1)
        };
        let h = line.word_eval(&random_word(&mut rng, 2, 3)).unwrap();
        let res = harmonic_transfer_check(&act, &mu, &f, &x, &[h]).map_err(|e| e.to_string())?;
        ensure!(res.iter().all(|r| r.equal), "instance {i}: {:?}", res);
        rows += res.len();
    }
    let t = within(start, Duration::from_secs(30))?;
    Ok(format!("{rows} residual pairs agree; {t}"))
}

/// Least `n` with `(tau_0 + .. + tau_{m-1})^n < 1/m`, by counting up.
fn least_nm(taus: &[Rational], m: usize) -> u64 {
    let prefix: Rational = taus[..m].iter().sum();
    let bound = rat(1, m as i64);
    let mut p = Rational::one();
    for n in 1.. {
        p *= &prefix;
        if p < bound {
            return n;
        }
    }
    unreachable!()
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let out = execute(&config(json!({"diagnostic": "kv-verify"})), 4).map_err(|e| e.to_string())?;
    let levels = table(&out, "kv-levels");
    let nm = column(levels, "n_m");
    let got: Vec<&str> = levels.rows.iter().map(|r| r[nm].as_str()).collect();
    ensure!(got == ["", "1", "3"], "n_m column {got:?}");
    let taus = [rat(1, 2), rat(1, 4), rat(1, 8)];
    ensure!(least_nm(&taus, 1) == 1 && least_nm(&taus, 2) == 3, "minimal n_m disagree");

    let claims = table(&out, "kv-claims");
    let (kind, value, bound, slack, holds) = (
        column(claims, "claim"),
        column(claims, "value"),
        column(claims, "bound"),
        column(claims, "slack"),
        column(claims, "holds"),
    );
    ensure!(claims.rows.iter().all(|r| r[holds] == "true"), "a claim row fails");
    let mut c2 = 0;
    for r in claims.rows.iter().filter(|r| r[kind] == "claim-2") {
        let m: i64 = r[column(claims, "m")].parse().unwrap();
        ensure!(q(&r[bound]) == rat(4, m), "claim-2 bound at m={m} is {}", r[bound]);
        ensure!(q(&r[value]) < q(&r[bound]) + q(&r[slack]), "claim-2 value {} at m={m}", r[value]);
        c2 += 1;
    }
    ensure!(c2 == 4, "expected 4 claim-2 rows (g in S_0 for m=1, S_1 for m=2), got {c2}");

    let profile = table(&out, "kv-profile");
    let pv: Vec<Rational> = profile.rows.iter().map(|r| q(&r[column(profile, "value")])).collect();
    ensure!(pv.len() == 20, "profile has {} rows", pv.len());
    ensure!(pv.windows(2).all(|w| w[1] <= w[0]), "profile increases somewhere");

    // Independent re-check of conditions (i) and (ii) on the core result.
    let zg = LatticeGroup::new(1);
    let d = WordMetric::standard(zg.clone());
    let r = kv_build(
        &zg,
        &integer_schedule::<Rational>(2),
        &LatticeBoxOracle,
        &d,
        &KvOptions { workers: 4, ..Default::default() },
    )
    .map_err(|e| e.to_string())?;
    let int = |p: &LatticePoint| p.0[0];
    for m in 1..=2usize {
        let lvl = &r.levels[m];
        let prev: Vec<i64> = r.levels[m - 1].alpha.iter().map(|(p, _)| int(p)).collect();
        let mut req: BTreeSet<i64> = (-(m as i64)..=m as i64).collect();
        let mut sums: BTreeSet<i64> = [0].into();
        for _ in 0..lvl.n_m.unwrap() {
            sums = sums.iter().flat_map(|s| prev.iter().map(move |p| s + p)).collect();
        }
        req.extend(sums);
        let spt: BTreeSet<i64> = lvl.alpha.iter().map(|(p, _)| int(p)).collect();
        ensure!(req.is_subset(&spt), "condition (ii) fails at m={m}");
        let eps = rat(1, 2 * m as i64);
        for g in &req {
            let v = deficiency(&zg, &lvl.alpha, &LatticeGroup::int(*g), &d, &FlatNormOptions::default()).value;
            ensure!(v < eps, "condition (i) fails at m={m}, g={g}: {v}");
        }
        let cli_max = q(&levels.rows[m][column(levels, "max_deficiency")]);
        ensure!(cli_max == lvl.max_deficiency, "max deficiency differs at m={m}");
    }
    let t = within(start, Duration::from_secs(600))?;
    Ok(format!("n1=1, n2=3 minimal, conditions re-verified, 4 claim-2 bounds, profile non-increasing for n=1..20; {t}"))
}

/// `4^n w P^n (w valley_w)` on `[-10, 10]`, exact via integer iteration.
fn valley_oscillations(w: i64, n_max: usize) -> Vec<Rational> {
    let reach = 10 + n_max as i64;
    let mut f: Vec<BigInt> = (-reach..=reach).map(|x| BigInt::from((x.abs() - w).min(w))).collect();
    let mut out = Vec::new();
    let mut scale = BigInt::from(w);
    for n in 0..=n_max {
        let off = n;
        let mid = &f[(reach as usize - 10 - off)..=(reach as usize + 10 - off)];
        let (lo, hi) = (mid.iter().min().unwrap(), mid.iter().max().unwrap());
        out.push(Rational::new(hi - lo, scale.clone()));
        f = f.windows(3).map(|t| &t[0] + &t[1] * 2 + &t[2]).collect();
        scale *= 4;
    }
    out
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let out = execute(&config(json!({"diagnostic": "liouville-scan", "n_max": 1000})), 1).map_err(|e| e.to_string())?;
    ensure!(out.summary["truncated"] == json!(false), "scan fell back to sampling");
    let osc = table(&out, "liouville-oscillation");
    let (func, val) = (column(osc, "function"), column(osc, "oscillation"));
    let mut last = Vec::new();
    for w in [1, 2, 5, 10] {
        let label = format!("valley-{w}");
        let series: Vec<Rational> = osc.rows.iter().filter(|r| r[func] == label).map(|r| q(&r[val])).collect();
        ensure!(series.len() == 1001, "{label}: {} rows", series.len());
        ensure!(series == valley_oscillations(w, 1000), "{label}: differs from the integer iteration");
        ensure!(series.windows(2).all(|p| p[1] <= p[0]), "{label}: not monotone");
        ensure!(series[1000] < rat(1, 5), "{label}: {} at n=1000", series[1000]);
        last.push(format!("{label} {:.4}", walkbench_core::weight::Weight::to_f64(&series[1000])));
    }
    let t = within(start, Duration::from_secs(300))?;
    Ok(format!("monotone and below 0.2 at n=1000 ({}); {t}", last.join(", ")))
}

/// Lower bound `E f(aX) - E f(X)` for `f` = +1 on words starting with `a`,
/// -1 on words starting with `A`, 0 otherwise. Left multiplication by a
/// generator moves `f` by at most 1, so `f` is admissible for `d(x, y) = |x y^-1|`.
fn f2_deficiency_lower_bound(n: usize) -> Rational {
    let gens: [i8; 4] = [1, -1, 2, -2];
    let f = |w: &[i8]| match w.first() {
        Some(&1) => 1i64,
        Some(&-1) => -1,
        _ => 0,
    };
    let push = |w: &mut Vec<i8>, s: i8| {
        if w.last() == Some(&-s) {
            w.pop();
        } else {
            w.push(s);
        }
    };
    let mut total = 0i64;
    let mut stack: Vec<(Vec<i8>, usize)> = vec![(Vec::new(), 0)];
    while let Some((w, k)) = stack.pop() {
        if k == n {
            let mut aw = vec![1i8];
            for &s in &w {
                push(&mut aw, s);
            }
            total += f(&aw) - f(&w);
            continue;
        }
        for s in gens {
            let mut next = w.clone();
            push(&mut next, s);
            stack.push((next, k + 1));
        }
    }
    rat(total, 4i64.pow(n as u32))
}

/// `P^n 1[first letter = a]` on the radius-2 ball via the (first letter, length) chain.
fn first_letter_oscillations(n_max: usize) -> Vec<Rational> {
    let len = n_max + 4;
    let q4 = rat(1, 4);
    let q34 = rat(3, 4);
    // v[c][l]: c = 0 for `a`, 1 for the other letters; l >= 1. e is tracked apart.
    let mut v: Vec<Vec<Rational>> = vec![vec![Rational::one(); len], vec![Rational::zero(); len]];
    let mut e = Rational::zero();
    let mut out = Vec::new();
    for _ in 0..=n_max {
        let vals = [e.clone(), v[0][1].clone(), v[0][2].clone(), v[1][1].clone(), v[1][2].clone()];
        out.push(vals.iter().max().unwrap() - vals.iter().min().unwrap());
        let ne = &q4 * (&v[0][1] + &v[1][1] * rat(3, 1));
        let mut nv = v.clone();
        for c in 0..2 {
            for l in 1..len - 1 {
                let down = if l == 1 { e.clone() } else { v[c][l - 1].clone() };
                nv[c][l] = &q4 * down + &q34 * &v[c][l + 1];
            }
        }
        v = nv;
        e = ne;
    }
    out
}

fn criterion_9() -> Outcome {
    let start = Instant::now();
    let cfg = config(json!({
        "diagnostic": "deficiency-profile",
        "group": "free-group(2)",
        "measure": {"kind": "uniform-generators"},
        "elements": ["a"],
        "n_max": 8,
    }));
    let out = execute(&cfg, 4).map_err(|e| e.to_string())?;
    let prof = table(&out, "deficiency-profile");
    let vals: Vec<Rational> = prof.rows.iter().map(|r| q(&r[column(prof, "value")])).collect();
    ensure!(vals.len() == 8, "{} profile rows", vals.len());
    let floor = &vals[0] / rat(2, 1);
    ensure!(vals.iter().all(|v| *v >= floor), "deficiency drops below half: {vals:?}");
    for (i, v) in vals.iter().enumerate() {
        let lb = f2_deficiency_lower_bound(i + 1);
        ensure!(*v >= lb, "n={}: {v} below the test-function bound {lb}", i + 1);
    }
    ensure!(vals.iter().all(|v| *v == Rational::one()), "frozen value 1 changed: {vals:?}");

    let scan_cfg = config(json!({
        "diagnostic": "liouville-scan",
        "group": "free-group(2)",
        "measure": {"kind": "uniform-generators"},
        "n_max": 20,
    }));
    let out = execute(&scan_cfg, 1).map_err(|e| e.to_string())?;
    let osc = table(&out, "liouville-oscillation");
    let series: Vec<Rational> = osc.rows.iter().map(|r| q(&r[column(osc, "oscillation")])).collect();
    ensure!(series == first_letter_oscillations(20), "oscillations differ from the chain oracle");
    let min = series.iter().min().unwrap().clone();
    ensure!(min > rat(66, 100), "floor {min} not above 0.66");
    let t = within(start, Duration::from_secs(600))?;
    Ok(format!(
        "deficiency of a is 1 for n=1..8; first-letter oscillation floor {:.4} > 0.66 for n<=20; {t}",
        walkbench_core::weight::Weight::to_f64(&min)
    ))
}

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_walkbench")
}

fn scratch(name: &str) -> PathBuf {
    let p = Path::new(env!("CARGO_TARGET_TMPDIR")).join("acceptance").join(name);
    let _ = std::fs::remove_dir_all(&p);
    std::fs::create_dir_all(&p).unwrap();
    p
}

fn walkbench(args: &[&str]) -> Result<(), String> {
    let out = Command::new(bin()).args(args).output().map_err(|e| e.to_string())?;
    ensure!(
        out.status.code() == Some(0),
        "walkbench {args:?} exited {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    Ok(())
}

fn read_dir(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.is_file())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect()
}

fn same_dirs(a: &Path, b: &Path) -> Result<usize, String> {
    let (x, y) = (read_dir(a), read_dir(b));
    ensure!(x.keys().eq(y.keys()), "{} and {} hold different files", a.display(), b.display());
    for (k, v) in &x {
        ensure!(y[k] == *v, "{k} differs between {} and {}", a.display(), b.display());
    }
    Ok(x.len())
}

fn criterion_10() -> Outcome {
    let start = Instant::now();
    let root = scratch("c10");
    let mut notes = Vec::new();
    for n in [1, 2] {
        let cfg = root.join(format!("subsets-{n}.json"));
        let text = json!({
            "diagnostic": "liouville-scan",
            "group": "thompson-line",
            "action": {"space": "dyadic-line", "power": {"kind": "subsets", "n": n}},
            "measure": {"kind": "uniform-generators"},
            "n_max": 24,
            "trials": 2000,
            "seed": 10,
        });
        std::fs::write(&cfg, text.to_string()).unwrap();
        let [a, b, c] = ["a", "b", "replay"].map(|s| root.join(format!("{n}-{s}")));
        let cfg_s = cfg.to_str().unwrap();
        walkbench(&["run", cfg_s, "--quiet", "--out", a.to_str().unwrap()])?;
        walkbench(&["run", cfg_s, "--quiet", "--out", b.to_str().unwrap()])?;
        let manifest = a.join("manifest.json");
        walkbench(&["run", manifest.to_str().unwrap(), "--quiet", "--out", c.to_str().unwrap()])?;
        let files = same_dirs(&a, &b)?;
        same_dirs(&a, &c)?;
        let osc = std::fs::read_to_string(a.join("liouville-oscillation.csv")).unwrap();
        let mc = osc.lines().filter(|l| l.contains("monte-carlo")).count();
        notes.push(format!("n={n}: {files} files, {mc} sampled rows"));
    }
    let t = within(start, Duration::from_secs(600))?;
    Ok(format!("deterministic and replayed byte-identically ({}); {t}", notes.join(", ")))
}

fn criterion_11() -> Outcome {
    let start = Instant::now();
    let root = scratch("c11");
    let runs: Vec<(&str, Vec<&str>)> = vec![
        ("profile", vec!["--diagnostic", "deficiency-profile", "--n-max", "10"]),
        (
            "profile-f2",
            vec![
                "--diagnostic",
                "deficiency-profile",
                "--group",
                "free-group(2)",
                "--set",
                "measure.kind=uniform-generators",
                "--n-max",
                "5",
            ],
        ),
        ("scan", vec!["--diagnostic", "liouville-scan", "--n-max", "200"]),
        ("pi", vec!["--diagnostic", "pi-iterate", "--n-max", "12"]),
        ("poisson", vec!["--diagnostic", "poisson-product", "--n-max", "12"]),
        ("kv", vec!["--diagnostic", "kv-verify"]),
        ("relations", vec!["--diagnostic", "relations-check", "--group", "thompson-unit"]),
        (
            "probe",
            vec![
                "--diagnostic",
                "transitivity-probe",
                "--group",
                "thompson-line",
                "--set",
                "action.space=dyadic-line",
                "--set",
                "probe.from=1/4",
                "--set",
                "probe.to=3/8",
            ],
        ),
    ];
    let mut files = 0;
    for (name, args) in &runs {
        let dirs = ["w1", "w1-again", "w4"].map(|s| root.join(format!("{name}-{s}")));
        for (dir, workers) in dirs.iter().zip(["1", "1", "4"]) {
            let mut full = vec!["run", "--quiet", "--workers", workers, "--out", dir.to_str().unwrap()];
            full.extend(args.iter().copied());
            walkbench(&full)?;
        }
        files += same_dirs(&dirs[0], &dirs[1])?;
        same_dirs(&dirs[0], &dirs[2])?;
    }
    let t = within(start, Duration::from_secs(600))?;
    Ok(format!("{} diagnostics, {files} artifacts identical across reruns and workers 1/4; {t}", runs.len()))
}

fn main() {
    let criteria: [(u32, fn() -> Outcome); 11] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
        (11, criterion_11),
    ];
    let only: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (n, run) in criteria {
        if !only.is_empty() && !only.contains(&n) {
            continue;
        }
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        match result {
            Ok(detail) => println!("criterion {n}: PASS {detail}"),
            Err(why) => {
                failed += 1;
                println!("criterion {n}: FAIL {why}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
