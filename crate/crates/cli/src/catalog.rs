//! Registered groups, actions, metrics, oracles and diagnostics.

use std::fmt::Write as _;

use walkbench_core::groups::{f_generators, Group, GroupKind, ThompsonGroup, Variant};

use crate::config::{Diagnostic, ExperimentConfig};
use crate::error::CliError;

pub struct Entry {
    pub name: &'static str,
    pub summary: &'static str,
}

pub const GROUPS: &[Entry] = &[
    Entry {
        name: "integer-lattice(d)",
        summary: "Z^d, d = 1..8, generators the unit vectors; `z` is integer-lattice(1)",
    },
    Entry {
        name: "free-group(r)",
        summary: "free group on a, b, ... (r = 1..4); upper case letters are inverses; `f2` is free-group(2)",
    },
    Entry { name: "thompson-unit", summary: "Thompson's group F as PL maps of [0,1], generators sigma, tau" },
    Entry { name: "thompson-line", summary: "Thompson's group F as PL maps of the line, generators sigma, tau" },
    Entry { name: "cyclic(n)", summary: "Z/nZ with generator 1" },
];

pub const ACTIONS: &[Entry] = &[
    Entry { name: "self", summary: "g . x = g x" },
    Entry { name: "right-regular", summary: "g . x = x g^-1 (default)" },
    Entry { name: "dyadic-line", summary: "F on the dyadic rationals of the line" },
    Entry { name: "dyadic-interval", summary: "F on the dyadic rationals of (0,1)" },
    Entry { name: "tuple", summary: "power: F on n-tuples of dyadic points" },
    Entry { name: "subsets", summary: "power: F on n-element subsets of dyadic points" },
];

pub const METRICS: &[Entry] = &[
    Entry { name: "word", summary: "word metric for the standard or configured generators" },
    Entry { name: "displacement", summary: "right-invariant displacement pseudometric on F" },
    Entry { name: "discrete", summary: "d(x, y) = 1 for x != y" },
    Entry { name: "capped-abs", summary: "min(1, |x - y|) on dyadic points (sup over coordinates for powers)" },
];

pub const ORACLES: &[Entry] = &[
    Entry { name: "lattice-box", summary: "uniform measure on a centred box of side ceil(4 max|g|_1 / eps)" },
    Entry { name: "finite-uniform", summary: "Haar measure of a finite group" },
    Entry { name: "user", summary: "one measure file per level, requirement set mixed in" },
];

pub const MEASURES: &[Entry] = &[
    Entry { name: "lazy", summary: "laziness at e, the rest uniform on the symmetric generators" },
    Entry { name: "uniform-generators", summary: "uniform on the symmetric generators" },
    Entry { name: "uniform-group", summary: "uniform on a finite group" },
    Entry { name: "atoms", summary: "explicit [point, weight] pairs" },
    Entry { name: "file", summary: "measure text file, one `point weight` per line" },
    Entry { name: "kv", summary: "the truncated recursive mixture built from the kv knobs" },
];

pub fn diagnostic_summary(d: Diagnostic) -> &'static str {
    match d {
        Diagnostic::DeficiencyProfile => "p_d(g mu^n - mu^n) for n = 1..n_max and each test element",
        Diagnostic::LiouvilleScan => "oscillation of P_mu^n f over a sample; exact, then Monte Carlo",
        Diagnostic::PiIterate => "Phi_{mu^n} f at sample points with a settling check",
        Diagnostic::PoissonProduct => "Phi_{mu^n} of the product of two functions",
        Diagnostic::KvVerify => "recursive almost-invariant mixture with conditions and claims re-checked",
        Diagnostic::RelationsCheck => "defining commutators of F and gamma conjugations",
        Diagnostic::TransitivityProbe => "BFS for a word moving one point to another",
    }
}

/// Knobs read by a diagnostic, with their defaults.
pub fn diagnostic_knobs(d: Diagnostic) -> Vec<(&'static str, String)> {
    let c = ExperimentConfig::default();
    let common = |v: &mut Vec<(&'static str, String)>| {
        v.push(("group", c.group.clone()));
        v.push(("mode", "exact".into()));
        v.push(("measure.kind", "lazy".into()));
        v.push(("measure.laziness", c.measure.laziness.clone()));
    };
    let mut v = Vec::new();
    match d {
        Diagnostic::DeficiencyProfile => {
            common(&mut v);
            v.push(("metric.kind", "auto".into()));
            v.push(("elements", "generators".into()));
            v.push(("n_max", c.n_max.to_string()));
            v.push(("prune", c.prune.clone()));
            v.push(("caps.support", c.caps.support.to_string()));
            v.push(("caps.simplex_limit", c.caps.simplex_limit.to_string()));
        }
        Diagnostic::LiouvilleScan => {
            common(&mut v);
            v.push(("action.space", "right-regular".into()));
            v.push(("action.power", "none".into()));
            v.push(("action.metric", "capped-abs".into()));
            v.push(("sample", "space default".into()));
            v.push(("functions", "valley family or first-letter".into()));
            v.push(("n_max", c.n_max.to_string()));
            v.push(("threshold", c.threshold.clone()));
            v.push(("caps.domain", c.caps.domain.to_string()));
            v.push(("trials", c.trials.to_string()));
            v.push(("seed", c.seed.to_string()));
        }
        Diagnostic::PiIterate | Diagnostic::PoissonProduct => {
            common(&mut v);
            v.push(("functions", "valley family or first-letter".into()));
            v.push(("sample", "-10..10 on Z, else ball of radius 2".into()));
            v.push(("n_max", c.n_max.to_string()));
            v.push(("tol", c.tol.clone()));
            v.push(("prune", c.prune.clone()));
            v.push(("caps.support", c.caps.support.to_string()));
        }
        Diagnostic::KvVerify => {
            v.push(("group", c.group.clone()));
            v.push(("mode", "exact".into()));
            v.push(("kv.depth", c.kv.depth.to_string()));
            v.push(("kv.taus", "2^-(m+1)".into()));
            v.push(("kv.chain", "balls of radius m".into()));
            v.push(("kv.eps_factor", c.kv.eps_factor.to_string()));
            v.push(("kv.oracle", "auto".into()));
            v.push(("kv.levels", format!("{:?}", c.kv.levels)));
            v.push(("kv.profile_n", c.kv.profile_n.to_string()));
            v.push(("kv.profile_elements", "generators".into()));
            v.push(("caps.product", c.caps.product.to_string()));
            v.push(("caps.tuple", c.caps.tuple.to_string()));
        }
        Diagnostic::RelationsCheck => {
            v.push(("group", "thompson-unit or thompson-line".into()));
            v.push(("gamma_pairs", format!("{:?}", c.gamma_pairs)));
        }
        Diagnostic::TransitivityProbe => {
            v.push(("group", "any".into()));
            v.push(("action.space", "right-regular".into()));
            v.push(("probe.from", "required".into()));
            v.push(("probe.to", "required".into()));
            v.push(("probe.max_depth", c.probe.max_depth.to_string()));
            v.push(("probe.max_nodes", c.probe.max_nodes.to_string()));
        }
    }
    v
}

fn section(out: &mut String, title: &str, entries: &[Entry]) {
    let _ = writeln!(out, "{title}:");
    for e in entries {
        let _ = writeln!(out, "  {:<20} {}", e.name, e.summary);
    }
}

pub const CATEGORIES: &[&str] = &["groups", "actions", "metrics", "measures", "oracles", "diagnostics"];

pub fn list(category: Option<&str>) -> Result<String, CliError> {
    let mut out = String::new();
    let want = |c: &str| category.is_none_or(|x| x == c);
    if let Some(c) = category {
        if !CATEGORIES.contains(&c) {
            return Err(CliError::config(format!("unknown category {c:?}; valid: {}", CATEGORIES.join(", "))));
        }
    }
    if want("groups") {
        section(&mut out, "groups", GROUPS);
    }
    if want("actions") {
        section(&mut out, "actions", ACTIONS);
    }
    if want("metrics") {
        section(&mut out, "metrics", METRICS);
    }
    if want("measures") {
        section(&mut out, "measures", MEASURES);
    }
    if want("oracles") {
        section(&mut out, "oracles", ORACLES);
    }
    if want("diagnostics") {
        let _ = writeln!(out, "diagnostics:");
        for d in Diagnostic::ALL {
            let _ = writeln!(out, "  {:<20} {}", d.as_str(), diagnostic_summary(d));
            let knobs: Vec<String> = diagnostic_knobs(d).into_iter().map(|(k, v)| format!("{k}={v}")).collect();
            let _ = writeln!(out, "  {:<20} defaults: {}", "", knobs.join(", "));
        }
    }
    Ok(out)
}

fn thompson_table(variant: Variant) -> String {
    let mut out = String::new();
    let (s, t) = f_generators(variant);
    let domain = match variant {
        Variant::Unit => "[0,1]",
        Variant::Line => "the line",
    };
    let _ = writeln!(out, "thompson-{}: F acting on {domain}", variant.name());
    for (name, g) in [("sigma", &s), ("tau", &t)] {
        let _ = writeln!(out, "{name} = {g}");
        let _ = writeln!(out, "  {:<12} {:<12} {:<8} offset", "from", "to", "slope");
        let n = g.pieces().len();
        for (i, p) in g.pieces().iter().enumerate() {
            let from = match i {
                0 if variant == Variant::Unit => "0".to_string(),
                0 => "-inf".to_string(),
                _ => g.breakpoints()[i - 1].to_string(),
            };
            let to = match i {
                _ if i + 1 < n => g.breakpoints()[i].to_string(),
                _ if variant == Variant::Unit => "1".to_string(),
                _ => "+inf".to_string(),
            };
            let _ = writeln!(out, "  {:<12} {:<12} {:<8} {}", from, to, format!("2^{}", p.slope_exp), p.offset);
        }
    }
    out
}

fn all_names() -> Vec<String> {
    let mut v: Vec<String> = vec!["integer-lattice(d)".into(), "z".into(), "free-group(r)".into(), "f2".into()];
    v.extend(["thompson-unit", "thompson-line", "cyclic(n)"].map(String::from));
    v.extend(ACTIONS.iter().chain(METRICS).chain(MEASURES).chain(ORACLES).map(|e| e.name.to_string()));
    v.extend(Diagnostic::ALL.iter().map(|d| d.as_str().to_string()));
    v
}

pub fn describe(name: &str) -> Result<String, CliError> {
    if let Some(d) = Diagnostic::ALL.iter().find(|d| d.as_str() == name) {
        let mut out = format!("{}: {}\nknobs:\n", d.as_str(), diagnostic_summary(*d));
        for (k, v) in diagnostic_knobs(*d) {
            let _ = writeln!(out, "  {k} = {v}");
        }
        return Ok(out);
    }
    for (kind, entries) in [("action", ACTIONS), ("metric", METRICS), ("measure", MEASURES), ("oracle", ORACLES)] {
        if let Some(e) = entries.iter().find(|e| e.name == name) {
            return Ok(format!("{} ({kind}): {}\n", e.name, e.summary));
        }
    }
    if let Ok(kind) = name.parse::<GroupKind>() {
        return Ok(match kind {
            GroupKind::ThompsonUnit => thompson_table(Variant::Unit),
            GroupKind::ThompsonLine => thompson_table(Variant::Line),
            k => generic_group(k),
        });
    }
    match name {
        "integer-lattice(d)" => return describe("integer-lattice(1)"),
        "free-group(r)" => return describe("free-group(2)"),
        "cyclic(n)" => return describe("cyclic(6)"),
        _ => {}
    }
    Err(CliError::config(format!("unknown name {name:?}; valid names: {}", all_names().join(", "))))
}

fn generic_group(kind: GroupKind) -> String {
    use walkbench_core::groups::{CyclicGroup, FreeGroup, LatticeGroup};
    let (names, gens): (Vec<String>, Vec<String>) = match kind {
        GroupKind::IntegerLattice(d) => {
            let g = LatticeGroup::new(d);
            (g.generator_names(), g.generators().iter().map(|x| x.to_string()).collect())
        }
        GroupKind::FreeGroup(r) => {
            let g = FreeGroup::new(r);
            (g.generator_names(), g.generators().iter().map(|x| x.to_string()).collect())
        }
        GroupKind::Cyclic(n) => {
            let g = CyclicGroup::new(n);
            (g.generator_names(), g.generators().iter().map(|x| x.to_string()).collect())
        }
        GroupKind::ThompsonUnit | GroupKind::ThompsonLine => {
            let g = ThompsonGroup::new(Variant::Line);
            (g.generator_names(), g.generators().iter().map(|x| x.to_string()).collect())
        }
    };
    let mut out = format!("{kind}\n");
    for (n, g) in names.iter().zip(gens) {
        let _ = writeln!(out, "  {n} = {g}");
    }
    out
}
