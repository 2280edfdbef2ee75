//! The seven diagnostics.

use serde_json::{json, Value};
use walkbench_core::actions::{transitivity_probe, Action, ProbeOutcome};
use walkbench_core::dual_norm::{deficiency_profile_capped, DeficiencyProfile, FlatNormOptions};
use walkbench_core::groups::Group;
use walkbench_core::groups::{
    check_relations, CyclicGroup, FreeGroup, GroupKind, LatticeGroup, ThompsonGroup, Variant,
};
use walkbench_core::harmonic::{
    free_first_letter_profile, iterate_pi_capped, liouville_scan, oscillation, LiouvilleScan, PiReport, PointFn,
    ScanOptions, ScanRow, ScanValues,
};
use walkbench_core::kv::{
    geometric_taus, kv_build, verify_claims, ClaimOptions, FiniteGroupOracle, FolnerOracle, KvError, KvOptions,
    KvResult, KvSchedule, UserOracle,
};
use walkbench_core::measures::{FinMeasure, MeasureError};
use walkbench_core::{Rational, Weight};

use crate::config::{Diagnostic, ExperimentConfig, MeasureKind, Mode, OracleKind, SpaceKind};
use crate::dispatch::{
    ball, basic_measure, build_functions, first_letter_of, free_word, function_specs, group_metric, group_space,
    parse_elem, parse_exact, parse_weight, read_measure_file, sample_points, test_elements, with_space, CliGroup,
    Space, SpaceVisitor,
};
use crate::error::CliError;
use crate::output::{RunOutput, Table};

/// Runs the configured diagnostic. Artifacts are returned, not written.
pub fn execute(cfg: &ExperimentConfig, workers: usize) -> Result<RunOutput, CliError> {
    cfg.validate()?;
    match cfg.mode {
        Mode::Exact => execute_in::<Rational>(cfg, workers.max(1)),
        Mode::Float => execute_in::<f64>(cfg, workers.max(1)),
    }
}

fn execute_in<W: Weight>(cfg: &ExperimentConfig, workers: usize) -> Result<RunOutput, CliError> {
    if cfg.diagnostic == Diagnostic::RelationsCheck {
        return relations_check(cfg);
    }
    let ctx = Ctx { cfg, workers };
    match cfg.group_kind()? {
        GroupKind::IntegerLattice(d) => run_group::<_, W>(&ctx, &LatticeGroup::new(d)),
        GroupKind::FreeGroup(r) => run_group::<_, W>(&ctx, &FreeGroup::new(r)),
        GroupKind::ThompsonUnit => run_group::<_, W>(&ctx, &ThompsonGroup::new(Variant::Unit)),
        GroupKind::ThompsonLine => run_group::<_, W>(&ctx, &ThompsonGroup::new(Variant::Line)),
        GroupKind::Cyclic(n) => run_group::<_, W>(&ctx, &CyclicGroup::new(n)),
    }
}

#[derive(Clone, Copy)]
struct Ctx<'a> {
    cfg: &'a ExperimentConfig,
    workers: usize,
}

impl Ctx<'_> {
    fn flat(&self) -> FlatNormOptions {
        FlatNormOptions { simplex_limit: self.cfg.caps.simplex_limit, force: None }
    }

    fn kv_opts(&self) -> KvOptions {
        KvOptions { product_cap: self.cfg.caps.product, flat: self.flat(), workers: self.workers }
    }

    fn mode(&self) -> String {
        match self.cfg.mode {
            Mode::Exact => "exact".into(),
            Mode::Float => "float".into(),
        }
    }
}

fn run_group<G: CliGroup, W: Weight>(ctx: &Ctx, group: &G) -> Result<RunOutput, CliError> {
    match ctx.cfg.diagnostic {
        Diagnostic::DeficiencyProfile => deficiency_profile_run::<G, W>(ctx, group),
        Diagnostic::LiouvilleScan => with_space(group, ctx.cfg, ScanVisitor::<W> { ctx: *ctx, _w: Default::default() }),
        Diagnostic::PiIterate | Diagnostic::PoissonProduct => pi_run::<G, W>(ctx, group),
        Diagnostic::KvVerify => kv_run::<G, W>(ctx, group),
        Diagnostic::TransitivityProbe => with_space(group, ctx.cfg, ProbeVisitor { ctx: *ctx }),
        Diagnostic::RelationsCheck => relations_check(ctx.cfg),
    }
}

fn measure_err(e: MeasureError) -> CliError {
    match e {
        MeasureError::SupportCap { .. } => CliError::Cap(e.to_string()),
        e => CliError::config(e.to_string()),
    }
}

fn kv_err(e: KvError) -> CliError {
    if e.is_cap() {
        CliError::Cap(e.to_string())
    } else {
        CliError::config(format!("kv: {e}"))
    }
}

/// The step measure, building the KV mixture when asked to.
fn step_measure<G: CliGroup, W: Weight>(ctx: &Ctx, group: &G) -> Result<FinMeasure<G::Elem, W>, CliError> {
    if ctx.cfg.measure.kind == MeasureKind::Kv {
        return Ok(build_kv::<G, W>(ctx, group)?.mu);
    }
    basic_measure(group, ctx.cfg)
}

fn status(ok: bool, good: &str, bad: &str) -> String {
    if ok { good } else { bad }.to_string()
}

fn deficiency_profile_run<G: CliGroup, W: Weight>(ctx: &Ctx, group: &G) -> Result<RunOutput, CliError> {
    let cfg = ctx.cfg;
    let mu = step_measure::<G, W>(ctx, group)?;
    let es = test_elements(group, &cfg.elements, "elements")?;
    let d = group_metric(group, &cfg.metric)?;
    let prune = parse_weight::<W>("prune", &cfg.prune)?;
    let profile =
        deficiency_profile_capped(group, &mu, &es, cfg.n_max, &*d, prune, &ctx.flat(), cfg.caps.support, ctx.workers)
            .map_err(measure_err)?;
    let table = profile_table("deficiency-profile", &profile, &ctx.mode());
    let monotone = profile.monotone.iter().all(|&b| b);
    let truncated = profile.rows.iter().any(|r| !r.pruning_deficiency.is_zero());
    let elements: Vec<Value> = profile
        .elements
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let s = profile.series(i);
            json!({
                "element": e,
                "non_increasing": profile.monotone[i],
                "first": s.first().map(|v| v.format()),
                "last": s.last().map(|v| v.format()),
            })
        })
        .collect();
    let summary = json!({
        "diagnostic": cfg.diagnostic.as_str(),
        "group": cfg.group,
        "mode": ctx.mode(),
        "metric": profile.metric_kind,
        "pseudometric": profile.pseudometric,
        "support_size": mu.len(),
        "n_max": cfg.n_max,
        "elements": elements,
        "truncated": truncated,
        "status": status(monotone, "verified bound", "counter-evidence"),
    });
    Ok(RunOutput { tables: vec![table], texts: Vec::new(), summary, violation: !monotone })
}

fn profile_table<W: Weight>(name: &str, p: &DeficiencyProfile<W>, mode: &str) -> Table {
    let mut t =
        Table::new(name, &["n", "element", "value", "decimal", "pruning_deficiency", "metric", "backend", "mode"]);
    for r in &p.rows {
        t.push(vec![
            r.n.to_string(),
            p.elements[r.g].clone(),
            r.value.format(),
            format!("{:.6}", r.value.to_f64()),
            r.pruning_deficiency.format(),
            p.metric_kind.clone(),
            r.backend.as_str().to_string(),
            mode.to_string(),
        ]);
    }
    t
}

struct ScanVisitor<'a, W> {
    ctx: Ctx<'a>,
    _w: std::marker::PhantomData<W>,
}

impl<W: Weight> SpaceVisitor for ScanVisitor<'_, W> {
    type Out = RunOutput;

    fn visit<A: Action>(self, space: Space<A>) -> Result<RunOutput, CliError>
    where
        A::G: CliGroup,
    {
        let ctx = self.ctx;
        let cfg = ctx.cfg;
        let group = space.action.group();
        let mu = step_measure::<A::G, W>(&ctx, group)?;
        let specs = function_specs(group, cfg);
        let sample = sample_points(&space, &cfg.sample, "sample")?;
        let threshold = parse_exact("threshold", &cfg.threshold)?;
        let letters: Vec<Option<i8>> = specs.iter().map(first_letter_of).collect();
        let radial = group.free().filter(|_| {
            cfg.action.space == SpaceKind::RightRegular
                && cfg.measure.kind == MeasureKind::UniformGenerators
                && letters.iter().all(Option::is_some)
        });
        let scan: LiouvilleScan<W> = match radial {
            Some(free) => {
                let words = sample.iter().map(|p| free_word(&free, &p.to_string())).collect::<Result<Vec<_>, _>>()?;
                radial_scan(&free, &letters, &words, cfg.n_max)
            }
            None => {
                let fns = build_functions::<A, W>(&space, &specs)?;
                let refs: Vec<PointFn<A::Point, W>> = fns.iter().map(|f| &**f).collect();
                let opts = ScanOptions {
                    n_max: cfg.n_max,
                    domain_cap: cfg.caps.domain,
                    trials: cfg.trials,
                    seed: cfg.seed,
                    workers: ctx.workers,
                };
                liouville_scan(&space.action, &mu, &refs, &sample, &opts)
                    .map_err(|e| CliError::config(format!("liouville-scan: {e}")))?
            }
        };
        let mode = ctx.mode();
        let seed = cfg.seed.to_string();
        let labels: Vec<String> = specs.iter().map(|s| s.label()).collect();
        let mut values = Table::new(
            "liouville-scan",
            &["n", "function", "point", "value", "stderr", "pruning_deficiency", "method", "seed", "mode"],
        );
        let mut osc =
            Table::new("liouville-oscillation", &["n", "function", "oscillation", "decimal", "method", "seed", "mode"]);
        for r in &scan.rows {
            let method = r.method().as_str().to_string();
            match &r.values {
                ScanValues::Exact(vs) => {
                    for (p, v) in scan.sample.iter().zip(vs) {
                        values.push(vec![
                            r.n.to_string(),
                            labels[r.function].clone(),
                            p.clone(),
                            v.format(),
                            String::new(),
                            W::zero().format(),
                            method.clone(),
                            seed.clone(),
                            mode.clone(),
                        ]);
                    }
                }
                ScanValues::Estimated(es) => {
                    for (p, e) in scan.sample.iter().zip(es) {
                        values.push(vec![
                            r.n.to_string(),
                            labels[r.function].clone(),
                            p.clone(),
                            format!("{:?}", e.mean),
                            format!("{:?}", e.stderr),
                            format!("{:?}", e.bias_bound),
                            method.clone(),
                            seed.clone(),
                            mode.clone(),
                        ]);
                    }
                }
            }
            let o = match &r.oscillation {
                Some(w) => w.format(),
                None => format!("{:?}", r.oscillation_f64),
            };
            osc.push(vec![
                r.n.to_string(),
                labels[r.function].clone(),
                o,
                format!("{:.6}", r.oscillation_f64),
                method,
                seed.clone(),
                mode.clone(),
            ]);
        }
        let truncated = scan.exact_depth < cfg.n_max;
        let thr = W::from_rational(&threshold).to_f64();
        let functions: Vec<Value> = (0..scan.functions)
            .map(|fi| {
                let last = scan.rows.iter().filter(|r| r.function == fi).last();
                let last_f = last.map(|r| r.oscillation_f64);
                let below = last_f.is_some_and(|o| o < thr);
                json!({
                    "function": labels[fi],
                    "final_oscillation": last.map(|r| r.oscillation.as_ref().map_or_else(|| format!("{:?}", r.oscillation_f64), |w| w.format())),
                    "final_oscillation_decimal": last_f,
                    "exact_non_increasing": scan.exact_monotone(fi),
                    "status": status(below, "evidence", "counter-evidence"),
                })
            })
            .collect();
        let summary = json!({
            "diagnostic": cfg.diagnostic.as_str(),
            "group": cfg.group,
            "action": space.action.kind(),
            "mode": mode,
            "n_max": cfg.n_max,
            "exact_depth": scan.exact_depth,
            "threshold": cfg.threshold,
            "sample_size": scan.sample.len(),
            "seed": cfg.seed,
            "trials": if truncated { Some(cfg.trials) } else { None },
            "truncated": truncated,
            "functions": functions,
        });
        Ok(RunOutput { tables: vec![values, osc], texts: Vec::new(), summary, violation: false })
    }
}

/// Exact first-letter scan on a free group through the radial recursion.
fn radial_scan<W: Weight>(
    free: &FreeGroup,
    letters: &[Option<i8>],
    sample: &[walkbench_core::groups::FreeWord],
    n_max: u64,
) -> LiouvilleScan<W> {
    let mut rows = Vec::new();
    for (fi, l) in letters.iter().enumerate() {
        let table = free_first_letter_profile(free, l.expect("checked letters"), sample, n_max);
        for (n, vals) in table.into_iter().enumerate() {
            let vals: Vec<W> = vals.iter().map(W::from_rational).collect();
            let o = oscillation(&vals);
            rows.push(ScanRow {
                n: n as u64,
                function: fi,
                oscillation_f64: o.to_f64(),
                oscillation: Some(o),
                values: ScanValues::Exact(vals),
            });
        }
    }
    LiouvilleScan {
        sample: sample.iter().map(|w| w.to_string()).collect(),
        rows,
        exact_depth: n_max,
        functions: letters.len(),
    }
}

fn pi_run<G: CliGroup, W: Weight>(ctx: &Ctx, group: &G) -> Result<RunOutput, CliError> {
    let cfg = ctx.cfg;
    let mu = step_measure::<G, W>(ctx, group)?;
    let space = group_space(walkbench_core::actions::SelfAction::new(group.clone()), group, cfg)?;
    let specs = function_specs(group, cfg);
    let product = cfg.diagnostic == Diagnostic::PoissonProduct;
    let need = if product { 2 } else { 1 };
    if specs.len() < need {
        return Err(CliError::config(format!("{} needs {need} functions", cfg.diagnostic)));
    }
    let fns = build_functions::<_, W>(&space, &specs[..need])?;
    let points = sample_points(&space, &cfg.sample, "sample")?;
    let tol = parse_weight::<W>("tol", &cfg.tol)?;
    let prune = parse_weight::<W>("prune", &cfg.prune)?;
    let report: PiReport<W> = if product {
        let (f1, f2) = (&fns[0], &fns[1]);
        let prod = |g: &G::Elem| f1(g) * f2(g);
        iterate_pi_capped(group, &mu, &prod, &points, cfg.n_max, tol, prune, cfg.caps.support, ctx.workers)
    } else {
        iterate_pi_capped(group, &mu, &*fns[0], &points, cfg.n_max, tol, prune, cfg.caps.support, ctx.workers)
    }
    .map_err(measure_err)?;
    let mode = ctx.mode();
    let name = cfg.diagnostic.as_str();
    let mut t = Table::new(name, &["n", "point", "value", "pruning_deficiency", "seed", "mode"]);
    for r in &report.rows {
        t.push(vec![
            r.n.to_string(),
            report.points[r.point].clone(),
            r.value.format(),
            r.pruning_deficiency.format(),
            cfg.seed.to_string(),
            mode.clone(),
        ]);
    }
    let all = report.converged_at.iter().all(Option::is_some);
    let labels: Vec<String> = specs[..need].iter().map(|s| s.label()).collect();
    let points: Vec<Value> = report
        .points
        .iter()
        .enumerate()
        .map(|(i, p)| json!({"point": p, "settled_at": report.converged_at[i], "last": report.last(i).map(|v| v.format())}))
        .collect();
    let summary = json!({
        "diagnostic": name,
        "group": cfg.group,
        "mode": mode,
        "functions": labels,
        "n_max": cfg.n_max,
        "tol": cfg.tol,
        "points": points,
        "status": status(all, "evidence", "truncated"),
    });
    Ok(RunOutput { tables: vec![t], texts: Vec::new(), summary, violation: false })
}

fn build_kv<G: CliGroup, W: Weight>(ctx: &Ctx, group: &G) -> Result<KvResult<G::Elem, W>, CliError> {
    let cfg = ctx.cfg;
    let kv = &cfg.kv;
    let taus: Vec<W> = if kv.taus.is_empty() {
        geometric_taus(kv.depth)
    } else {
        kv.taus.iter().enumerate().map(|(i, s)| parse_weight(&format!("kv.taus[{i}]"), s)).collect::<Result<_, _>>()?
    };
    let depth = taus.len() - 1;
    let chain: Vec<Vec<G::Elem>> = if kv.chain.is_empty() {
        (0..=depth as u64).map(|m| ball(group, m)).collect()
    } else {
        kv.chain
            .iter()
            .enumerate()
            .map(|(m, set)| set.iter().map(|s| parse_elem(group, &format!("kv.chain[{m}]"), s)).collect())
            .collect::<Result<_, _>>()?
    };
    let schedule = KvSchedule { taus, chain, eps_factor: kv.eps_factor };
    let oracle: Box<dyn FolnerOracle<G, W>> = match kv.oracle {
        OracleKind::Auto => match group.box_oracle::<W>() {
            Some(o) => o,
            None if group.elements().is_some() => Box::new(FiniteGroupOracle),
            None => return Err(CliError::config(format!("kv: no oracle for {}; use kv.oracle = user", cfg.group))),
        },
        OracleKind::LatticeBox => group
            .box_oracle::<W>()
            .ok_or_else(|| CliError::config("kv.oracle: lattice-box needs an integer lattice"))?,
        OracleKind::FiniteUniform => Box::new(FiniteGroupOracle),
        OracleKind::User => {
            if kv.user_levels.len() <= depth {
                return Err(CliError::config(format!("kv.user_levels: need {} measure files", depth + 1)));
            }
            let levels =
                kv.user_levels.iter().map(|p| read_measure_file::<G, W>(group, p)).collect::<Result<Vec<_>, _>>()?;
            Box::new(UserOracle { levels })
        }
    };
    let d = group_metric(group, &cfg.metric)?;
    kv_build(group, &schedule, &*oracle, &*d, &ctx.kv_opts()).map_err(kv_err)
}

fn kv_run<G: CliGroup, W: Weight>(ctx: &Ctx, group: &G) -> Result<RunOutput, CliError> {
    let cfg = ctx.cfg;
    let result = build_kv::<G, W>(ctx, group)?;
    let d = group_metric(group, &cfg.metric)?;
    let pe = test_elements(group, &cfg.kv.profile_elements, "kv.profile_elements")?;
    let copts = ClaimOptions { levels: cfg.kv.levels.clone(), profile_n: cfg.kv.profile_n, tuple_cap: cfg.caps.tuple };
    let report = verify_claims(group, &result, &pe, &*d, &copts, &ctx.kv_opts()).map_err(kv_err)?;
    let mode = ctx.mode();
    let b = |x: bool| x.to_string();

    let mut levels = Table::new(
        "kv-levels",
        &[
            "m",
            "tau",
            "n_m",
            "eps",
            "requirement_size",
            "support_size",
            "max_deficiency",
            "condition_i",
            "condition_ii",
            "backends",
            "mode",
        ],
    );
    for l in &result.levels {
        let mut backends: Vec<&str> = l.backends.iter().map(|b| b.as_str()).collect();
        backends.sort();
        backends.dedup();
        levels.push(vec![
            l.m.to_string(),
            l.tau.format(),
            l.n_m.map(|n| n.to_string()).unwrap_or_default(),
            l.eps.format(),
            l.requirement.len().to_string(),
            l.alpha.len().to_string(),
            l.max_deficiency.format(),
            b(l.condition_i),
            b(l.condition_ii),
            backends.join(" "),
            mode.clone(),
        ]);
    }
    let mut claims =
        Table::new("kv-claims", &["claim", "m", "detail", "g", "value", "bound", "slack", "holds", "mode"]);
    for c in &report.conditions {
        claims.push(vec![
            "conditions".into(),
            c.m.to_string(),
            format!("requirement_size={}", c.requirement_size),
            String::new(),
            c.max_deficiency.format(),
            String::new(),
            String::new(),
            b(c.condition_i && c.condition_ii),
            mode.clone(),
        ]);
    }
    for r in &report.claim1 {
        let k: Vec<String> = r.k.iter().map(|k| k.to_string()).collect();
        claims.push(vec![
            "claim-1".into(),
            r.m.to_string(),
            format!("k={}", k.join(" ")),
            r.g.clone(),
            r.value.format(),
            r.bound.format(),
            String::new(),
            b(r.holds),
            mode.clone(),
        ]);
    }
    for r in &report.claim2 {
        claims.push(vec![
            "claim-2".into(),
            r.m.to_string(),
            format!("n_m={}", r.n_m),
            r.g.clone(),
            r.value.format(),
            r.bound.format(),
            r.slack.format(),
            b(r.holds),
            mode.clone(),
        ]);
    }
    let profile = profile_table("kv-profile", &report.claim3, &mode);
    let carrier = group.descriptor().kind.to_string();
    let texts = vec![("kv-mu.txt".to_string(), result.mu.to_text(&carrier))];
    let all = report.all_hold();
    let level_summary: Vec<Value> = result
        .levels
        .iter()
        .map(|l| {
            json!({
                "m": l.m,
                "tau": l.tau.format(),
                "n_m": l.n_m,
                "support_size": l.alpha.len(),
                "max_deficiency": l.max_deficiency.format(),
            })
        })
        .collect();
    let summary = json!({
        "diagnostic": cfg.diagnostic.as_str(),
        "group": cfg.group,
        "mode": mode,
        "oracle": result.oracle,
        "tail": result.tail.format(),
        "levels": level_summary,
        "support_covers_chain": result.covers_chain(),
        "conditions": status(report.conditions_hold(), "verified bound", "counter-evidence"),
        "claim_1": status(report.claim1_holds(), "verified bound", "counter-evidence"),
        "claim_1_truncated_levels": report.claim1_skipped,
        "claim_2": status(report.claim2_holds(), "verified bound", "counter-evidence"),
        "claim_3": status(report.claim3_holds(), "verified bound", "counter-evidence"),
        "claim_3_form": report.claim3_form,
        "truncated": !report.claim1_skipped.is_empty(),
        "status": status(all, "verified bound", "counter-evidence"),
    });
    Ok(RunOutput { tables: vec![levels, claims, profile], texts, summary, violation: !all })
}

fn relations_check(cfg: &ExperimentConfig) -> Result<RunOutput, CliError> {
    let variant = match cfg.group_kind()? {
        GroupKind::ThompsonUnit => Variant::Unit,
        GroupKind::ThompsonLine => Variant::Line,
        _ => return Err(CliError::config("relations-check needs thompson-unit or thompson-line")),
    };
    let report = check_relations(variant, &cfg.gamma_pairs);
    let mut t = Table::new(
        "relations-check",
        &["kind", "relation", "holds", "equals_gamma_n", "equals_gamma_n_plus_1", "value"],
    );
    for r in &report.commutators {
        t.push(vec![
            "commutator".into(),
            r.name.clone(),
            r.holds.to_string(),
            String::new(),
            String::new(),
            r.value.clone(),
        ]);
    }
    for g in &report.gamma {
        t.push(vec![
            "gamma".into(),
            format!("gamma_{m}^-1 gamma_{n} gamma_{m}", m = g.m, n = g.n),
            (g.equals_gamma_n || g.equals_gamma_n_plus_1).to_string(),
            g.equals_gamma_n.to_string(),
            g.equals_gamma_n_plus_1.to_string(),
            String::new(),
        ]);
    }
    let ok = report.commutators_hold();
    let gamma: Vec<Value> = report
        .gamma
        .iter()
        .map(|g| {
            let which = match (g.equals_gamma_n, g.equals_gamma_n_plus_1) {
                (true, _) => format!("gamma_{}", g.n),
                (false, true) => format!("gamma_{}", g.n + 1),
                _ => "neither".into(),
            };
            json!({"m": g.m, "n": g.n, "equals": which})
        })
        .collect();
    let summary = json!({
        "diagnostic": cfg.diagnostic.as_str(),
        "group": cfg.group,
        "commutators": status(ok, "verified bound", "counter-evidence"),
        "gamma": gamma,
        "status": status(ok, "verified bound", "counter-evidence"),
    });
    Ok(RunOutput { tables: vec![t], texts: Vec::new(), summary, violation: !ok })
}

struct ProbeVisitor<'a> {
    ctx: Ctx<'a>,
}

impl SpaceVisitor for ProbeVisitor<'_> {
    type Out = RunOutput;

    fn visit<A: Action>(self, space: Space<A>) -> Result<RunOutput, CliError>
    where
        A::G: CliGroup,
    {
        let cfg = self.ctx.cfg;
        let parse = |field: &str, s: &Option<String>| {
            let s = s.as_deref().ok_or_else(|| CliError::config(format!("{field} is required")))?;
            space.action.parse_point(s).map_err(|e| CliError::config(format!("{field}: {e}")))
        };
        let a = parse("probe.from", &cfg.probe.from)?;
        let b = parse("probe.to", &cfg.probe.to)?;
        let outcome = transitivity_probe(&space.action, &a, &b, cfg.probe.max_depth, cfg.probe.max_nodes)
            .map_err(|e| CliError::config(format!("transitivity-probe: {e}")))?;
        let group = space.action.group();
        let names = group.generator_names();
        let mut t = Table::new(
            "transitivity-probe",
            &["from", "to", "outcome", "word", "length", "explored", "depth", "truncated"],
        );
        let (st, row) = match &outcome {
            ProbeOutcome::Found(w) => {
                let g = group.word_eval(w).map_err(|e| CliError::config(e.to_string()))?;
                let image = space.action.act(&g, &a).map_err(|e| CliError::config(e.to_string()))?;
                if image != b {
                    return Err(CliError::Io("probe witness does not map the source to the target".into()));
                }
                (
                    "evidence",
                    vec![
                        a.to_string(),
                        b.to_string(),
                        "found".into(),
                        w.render(&names),
                        w.len().to_string(),
                        String::new(),
                        String::new(),
                        "false".into(),
                    ],
                )
            }
            ProbeOutcome::NotFound { explored, depth, truncated } => (
                if *truncated { "truncated" } else { "counter-evidence" },
                vec![
                    a.to_string(),
                    b.to_string(),
                    "not-found".into(),
                    String::new(),
                    String::new(),
                    explored.to_string(),
                    depth.to_string(),
                    truncated.to_string(),
                ],
            ),
        };
        t.push(row);
        let summary = json!({
            "diagnostic": cfg.diagnostic.as_str(),
            "group": cfg.group,
            "action": space.action.kind(),
            "from": a.to_string(),
            "to": b.to_string(),
            "max_depth": cfg.probe.max_depth,
            "max_nodes": cfg.probe.max_nodes,
            "status": st,
        });
        Ok(RunOutput { tables: vec![t], texts: Vec::new(), summary, violation: false })
    }
}
