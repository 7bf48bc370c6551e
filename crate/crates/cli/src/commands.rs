use std::f64::consts::PI;
use std::fmt::Write as _;

use bloch_core::catalog;
use bloch_core::hyperbolic::hyperbolic_distance;
use bloch_core::kernels::{is_hyperbolic_weight, ConditionReport};
use bloch_core::seminorms::{EstimateWitness, SampleStrategy};
use bloch_core::{
    bloch_seminorm, check_admissible, dw_quotient_seminorm, geodesic_distance, lipschitz_seminorm,
    verify_equality, AdmissibilityOptions, DistanceProvider, Domain, Error, GeodesicOptions, Kernel, Point,
    Sampler, SeminormEstimate, Weight,
};
use serde_json::{json, Value};

use crate::args::{AdmissibleArgs, DistanceArgs, DistanceChoice, SamplingArgs, SeminormArgs, SeminormKind, VerifyArgs, WeightArgs};
use crate::output::{coord_cells, coord_columns, fmt_num, fmt_point, Table};

pub const EXIT_FAIL_VERDICT: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Numerical(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Numerical(_) => EXIT_NUMERICAL,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Numerical(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

pub type CmdResult = Result<Outcome, Failure>;

/// Everything a subcommand produces; the caller picks one rendering.
pub struct Outcome {
    pub json: Value,
    pub table: Table,
    pub human: String,
    pub exit_code: u8,
    pub diagnostics: Vec<String>,
}

pub struct Context {
    pub seed: u64,
    pub precision: u8,
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn parse_point(text: &str, flag: &str) -> Result<Point, Failure> {
    text.parse::<Point>()
        .map_err(|e| usage(format!("--{flag} {text:?}: {e}")))
}

fn parse_list(text: &str) -> Result<Vec<f64>, Failure> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| usage(format!("bad number {t:?} in {text:?}")))
        })
        .collect()
}

/// `ball` or `box:L1,...,Lm:U1,...,Um`.
pub fn parse_domain(text: &str, dim: usize) -> Result<Domain, Failure> {
    let t = text.trim();
    if t == "ball" {
        return Ok(Domain::unit_ball(dim)?);
    }
    if let Some(rest) = t.strip_prefix("box:") {
        let (lo, hi) = rest
            .split_once(':')
            .ok_or_else(|| usage(format!("box domain needs lower and upper corners: {t:?}")))?;
        let d = Domain::open_box(parse_list(lo)?, parse_list(hi)?)?;
        if d.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: d.dim(),
            }
            .into());
        }
        return Ok(d);
    }
    Err(usage(format!("unknown domain {t:?}; expected ball or box:L:U")))
}

fn domain_dim(text: &str, fallback: usize) -> usize {
    text.trim()
        .strip_prefix("box:")
        .and_then(|r| r.split_once(':'))
        .map_or(fallback, |(lo, _)| lo.split(',').count())
}

fn build_weight(args: &WeightArgs, dim: usize) -> Result<Weight, Failure> {
    let domain = parse_domain(&args.domain, dim)?;
    Weight::from_spec(&args.weight, domain).map_err(|e| match e {
        e if e.is_numerical() => Failure::Numerical(format!("weight {:?}: {e}", args.weight)),
        e => usage(format!("weight {:?}: {e}", args.weight)),
    })
}

fn provider(choice: DistanceChoice, w: &Weight, seed: u64) -> Result<DistanceProvider, Failure> {
    let geodesic = || DistanceProvider::Geodesic {
        weight: w.clone(),
        options: GeodesicOptions {
            seed,
            ..GeodesicOptions::default()
        },
    };
    match choice {
        DistanceChoice::Auto if is_hyperbolic_weight(w) => Ok(DistanceProvider::Hyperbolic),
        DistanceChoice::Auto | DistanceChoice::Geodesic => Ok(geodesic()),
        DistanceChoice::ClosedForm if is_hyperbolic_weight(w) => Ok(DistanceProvider::Hyperbolic),
        DistanceChoice::ClosedForm => Err(usage(
            "the closed-form distance needs the hyperbolic weight on the unit ball",
        )),
    }
}

fn build_kernel(name: &str, scale: f64, w: &Weight, dist: &DistanceProvider) -> Result<Kernel, Failure> {
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(usage("--scale must be positive"));
    }
    let k = Kernel::by_name(name, w, dist.clone())?;
    Ok(if scale == 1.0 { k } else { k.scaled(scale) })
}

fn build_sampler(s: &SamplingArgs, seed: u64) -> Result<Sampler, Failure> {
    if !(s.margin >= 0.0 && s.margin < 1.0) {
        return Err(usage("--margin must lie in [0, 1)"));
    }
    let base = match (s.grid, s.points) {
        (_, Some(n)) => Sampler::low_discrepancy(n, seed),
        (Some(r), None) => Sampler::grid(r),
        (None, None) => Sampler::grid(100),
    };
    Ok(base.margin(s.margin).pairs(s.pairs).pair_seed(seed))
}

fn sampler_json(s: &Sampler) -> Value {
    let strategy = match &s.strategy {
        SampleStrategy::Grid { resolution } => json!({"grid": resolution}),
        SampleStrategy::LowDiscrepancy { count, seed } => json!({"low_discrepancy": count, "seed": seed}),
    };
    json!({
        "strategy": strategy,
        "boundary_margin": s.boundary_margin,
        "pair_budget": s.pair_budget,
        "diagonal_separations": s.diagonal_separations,
    })
}

pub fn distance(a: &DistanceArgs, ctx: &Context) -> CmdResult {
    let from = parse_point(&a.from, "from")?;
    let to = parse_point(&a.to, "to")?;
    if from.dim() != to.dim() {
        return Err(Error::DimensionMismatch {
            expected: from.dim(),
            found: to.dim(),
        }
        .into());
    }
    let w = build_weight(&a.weight, from.dim())?;
    let p = ctx.precision;
    let (value, converged, iterations, path, method) = if a.exact {
        if !is_hyperbolic_weight(&w) {
            return Err(usage("--exact needs the hyperbolic weight on the unit ball"));
        }
        let v = hyperbolic_distance(&from, &to)?;
        (v, true, 0, vec![from.clone(), to.clone()], "closed-form")
    } else {
        let opts = GeodesicOptions {
            control_points: a.control_points,
            max_iterations: a.max_iterations,
            seed: ctx.seed,
            ..GeodesicOptions::default()
        };
        opts.validate()?;
        let r = geodesic_distance(&w, &from, &to, &opts)?;
        (r.value, r.converged, r.iterations, r.path.into_points(), "geodesic")
    };
    let path_coords: Vec<Vec<f64>> = path.iter().map(|q| q.coords().to_vec()).collect();
    let json = json!({
        "value": value,
        "converged": converged,
        "iterations": iterations,
        "path": path_coords,
        "method": method,
        "weight": w.to_string(),
    });
    let mut table = Table::new(
        ["value", "converged", "iterations", "index"]
            .into_iter()
            .map(String::from)
            .chain(coord_columns("x", from.dim())),
    );
    for (i, q) in path_coords.iter().enumerate() {
        let mut row = vec![fmt_num(value, p), converged.to_string(), iterations.to_string(), i.to_string()];
        row.extend(coord_cells(q, p));
        table.push(row);
    }
    let mut human = format!(
        "d_w({}, {}) = {} ({method}, weight {w})\n",
        fmt_point(from.coords(), p),
        fmt_point(to.coords(), p),
        fmt_num(value, p)
    );
    if method == "geodesic" {
        let _ = writeln!(
            human,
            "{} control points, {} iterations, {}",
            path_coords.len(),
            iterations,
            if converged { "converged" } else { "not converged" }
        );
    }
    let mut diagnostics = Vec::new();
    let exit_code = if converged {
        0
    } else {
        diagnostics.push(format!(
            "geodesic solver stopped after {iterations} iterations without meeting its tolerances"
        ));
        EXIT_NUMERICAL
    };
    Ok(Outcome {
        json,
        table,
        human,
        exit_code,
        diagnostics,
    })
}

fn estimate_row(kind: &str, e: &SeminormEstimate, m: usize, p: u8) -> Vec<String> {
    let mut row = vec![
        kind.to_string(),
        fmt_num(e.value, p),
        e.samples_used.to_string(),
        e.skipped.to_string(),
    ];
    let (z, x) = match &e.witness {
        EstimateWitness::Point(z) => (z.clone(), vec![String::new(); m]),
        EstimateWitness::Pair(z, x) => (z.clone(), coord_cells(x, p)),
    };
    row.extend(coord_cells(&z, p));
    row.extend(x);
    row
}

fn estimate_table(m: usize) -> Table {
    Table::new(
        ["quantity", "value", "samples_used", "skipped"]
            .into_iter()
            .map(String::from)
            .chain(coord_columns("z", m))
            .chain(coord_columns("e", m)),
    )
}

fn witness_text(e: &SeminormEstimate, p: u8) -> String {
    match &e.witness {
        EstimateWitness::Point(z) => format!("at {}", fmt_point(z, p)),
        EstimateWitness::Pair(z, x) => format!("at {} / {}", fmt_point(z, p), fmt_point(x, p)),
    }
}

pub fn seminorm(a: &SeminormArgs, ctx: &Context) -> CmdResult {
    let map = catalog::from_spec(&a.map, a.dim)?;
    let m = map.dim_in();
    let w = build_weight(&a.weight, m)?;
    let s = build_sampler(&a.sampling, ctx.seed)?;
    let dist = provider(a.distance, &w, ctx.seed)?;
    let kinds: &[SeminormKind] = match a.kind {
        SeminormKind::All => &[SeminormKind::Bloch, SeminormKind::Lipschitz, SeminormKind::DwQuotient],
        SeminormKind::Bloch => &[SeminormKind::Bloch],
        SeminormKind::Lipschitz => &[SeminormKind::Lipschitz],
        SeminormKind::DwQuotient => &[SeminormKind::DwQuotient],
    };
    let p = ctx.precision;
    let mut estimates = serde_json::Map::new();
    let mut table = estimate_table(m);
    let mut human = format!("map {} with weight {w}, sampler {}\n", map.label(), s.describe());
    let mut diagnostics = Vec::new();
    for kind in kinds {
        let (name, est) = match kind {
            SeminormKind::Bloch => ("bloch", bloch_seminorm(&map, &w, &s)?),
            SeminormKind::Lipschitz => {
                let k = build_kernel(&a.kernel, 1.0, &w, &dist)?;
                ("lipschitz", lipschitz_seminorm(&map, &k, &s)?)
            }
            SeminormKind::DwQuotient => {
                if !matches!(dist, DistanceProvider::Hyperbolic) && !matches!(w.domain(), Domain::UnitBall { .. }) {
                    diagnostics.push("d_w quotient sampled over the weight's domain".into());
                }
                ("dw_quotient", dw_quotient_seminorm(&map, &dist, &s)?)
            }
            SeminormKind::All => unreachable!(),
        };
        if est.outside_hypotheses {
            diagnostics.push(format!("{name}: map is not known to be continuously differentiable"));
        }
        let _ = writeln!(
            human,
            "{name:<12} {} {} ({} samples, {} skipped)",
            fmt_num(est.value, p),
            witness_text(&est, p),
            est.samples_used,
            est.skipped
        );
        table.push(estimate_row(name, &est, m, p));
        estimates.insert(name.to_string(), serde_json::to_value(&est).expect("serializable"));
    }
    let json = json!({
        "map": map.label(),
        "weight": w.to_string(),
        "kernel": if kinds.contains(&SeminormKind::Lipschitz) { Value::from(a.kernel.clone()) } else { Value::Null },
        "distance": dist.describe(),
        "sampler": sampler_json(&s),
        "estimates": estimates,
    });
    Ok(Outcome {
        json,
        table,
        human,
        exit_code: 0,
        diagnostics,
    })
}

pub fn check_admissible_cmd(a: &AdmissibleArgs, ctx: &Context) -> CmdResult {
    let dim = domain_dim(&a.weight.domain, a.dim);
    let w = build_weight(&a.weight, dim)?;
    let dist = provider(a.distance, &w, ctx.seed)?;
    let k = build_kernel(&a.kernel, a.scale, &w, &dist)?;
    let opts = AdmissibilityOptions {
        sample_pairs: a.pairs,
        liminf_radii: parse_list(&a.radii)?,
        w3_centers: a.centers,
        exact_tolerance: a.exact_tolerance,
        limit_tolerance: a.limit_tolerance,
        seed: ctx.seed,
        ..AdmissibilityOptions::default()
    };
    let r = check_admissible(&k, &w, &dist, &opts)?;
    let verdict = r.verdict();
    let p = ctx.precision;
    let mut json = serde_json::to_value(&r).expect("serializable");
    json["verdict"] = json!(verdict);
    json["weight"] = json!(w.to_string());

    let mut table = Table::new(
        ["condition", "verdict"]
            .into_iter()
            .map(String::from)
            .chain(coord_columns("z", dim))
            .chain(coord_columns("e", dim))
            .chain(["measured".to_string(), "bound".to_string()]),
    );
    let conditions: [(&str, &ConditionReport); 4] = [("W1", &r.w1), ("W2", &r.w2), ("W3", &r.w3), ("W4", &r.w4)];
    let mut human = format!(
        "kernel {} with weight {w}, {} distances, {} samples ({} skipped)\n",
        r.kernel, r.distance, r.samples_used, r.skipped
    );
    for (name, c) in conditions {
        let _ = writeln!(
            human,
            "{name} {} ({} checked, {} violations)",
            c.verdict, c.checked, c.violation_count
        );
        for v in &c.violations {
            let mut row = vec![name.to_string(), c.verdict.to_string()];
            row.extend(coord_cells(&v.z, p));
            row.extend(coord_cells(&v.e, p));
            row.push(fmt_num(v.measured, p));
            row.push(fmt_num(v.bound, p));
            table.push(row);
        }
        if let Some(v) = c.violations.first() {
            let _ = writeln!(
                human,
                "   e.g. {} / {}: {} against {}",
                fmt_point(&v.z, p),
                fmt_point(&v.e, p),
                fmt_num(v.measured, p),
                fmt_num(v.bound, p)
            );
        }
    }
    let _ = writeln!(human, "verdict {verdict}");
    Ok(Outcome {
        json,
        table,
        human,
        exit_code: if verdict.passed() { 0 } else { EXIT_FAIL_VERDICT },
        diagnostics: Vec::new(),
    })
}

pub fn verify(a: &VerifyArgs, ctx: &Context) -> CmdResult {
    let map = catalog::from_spec(&a.map, a.dim)?;
    let m = map.dim_in();
    let w = build_weight(&a.weight, m)?;
    let dist = provider(a.distance, &w, ctx.seed)?;
    let k = build_kernel(&a.kernel, a.scale, &w, &dist)?;
    let s = build_sampler(&a.sampling, ctx.seed)?;
    let r = verify_equality(&map, &w, &k, &s, a.tol)?;
    let p = ctx.precision;
    let mut json = serde_json::to_value(&r).expect("serializable");
    json["weight"] = json!(w.to_string());
    json["sampler"] = sampler_json(&s);

    let mut table = estimate_table(m);
    table.header.push("verdict".into());
    for (name, est) in [("bloch", &r.bloch), ("lipschitz", &r.lipschitz)] {
        let mut row = estimate_row(name, est, m, p);
        row.push(r.verdict.to_string());
        table.push(row);
    }
    let mut human = format!("map {} with weight {w}, kernel {}\n", r.map, r.kernel);
    let _ = writeln!(human, "B = {} {}", fmt_num(r.bloch.value, p), witness_text(&r.bloch, p));
    let _ = writeln!(human, "L = {} {}", fmt_num(r.lipschitz.value, p), witness_text(&r.lipschitz, p));
    let _ = writeln!(
        human,
        "|B - L| = {} (tolerance {})",
        fmt_num(r.difference, p),
        fmt_num(r.tolerance * r.bloch.value.max(1.0), p)
    );
    let _ = writeln!(
        human,
        "pairs above B(1+tol): {}; near-diagonal maximum {} B(1-tol)",
        r.upper.violations,
        if r.diagonal.passed { "reaches" } else { "stays below" }
    );
    let _ = writeln!(human, "verdict {}", r.verdict);
    Ok(Outcome {
        json,
        table,
        human,
        exit_code: if r.verdict.passed() { 0 } else { EXIT_FAIL_VERDICT },
        diagnostics: Vec::new(),
    })
}

struct Entry {
    name: &'static str,
    specifier: &'static str,
    formula: &'static str,
    bloch: f64,
}

const ENTRIES: [Entry; 5] = [
    Entry {
        name: "identity",
        specifier: "identity[:m]",
        formula: "x",
        bloch: 1.0,
    },
    Entry {
        name: "poly",
        specifier: "poly:0,0,1",
        formula: "sum c_k z^k",
        bloch: 0.769_800_358_919_501_2,
    },
    Entry {
        name: "mobius",
        specifier: "mobius:0.5,0",
        formula: "T_a(x)",
        bloch: 1.0,
    },
    Entry {
        name: "atanh",
        specifier: "atanh",
        formula: "log((1+z)/(1-z))/2",
        bloch: 1.0,
    },
    Entry {
        name: "colonna",
        specifier: "colonna",
        formula: "(2/pi) Arg((1+z)/(1-z))",
        bloch: 4.0 / PI,
    },
];

pub fn list_catalog(ctx: &Context) -> CmdResult {
    let p = ctx.precision;
    let mut maps = Vec::new();
    let mut table = Table::new(["name", "specifier", "dim_in", "dim_out", "formula", "bloch_hyperbolic"]);
    let mut human = String::new();
    for e in &ENTRIES {
        let map = catalog::from_spec(e.specifier.trim_end_matches("[:m]"), 2)?;
        maps.push(json!({
            "name": e.name,
            "specifier": e.specifier,
            "dim_in": map.dim_in(),
            "dim_out": map.dim_out(),
            "formula": e.formula,
            "bloch_hyperbolic": e.bloch,
        }));
        table.push(vec![
            e.name.into(),
            e.specifier.into(),
            map.dim_in().to_string(),
            map.dim_out().to_string(),
            e.formula.into(),
            fmt_num(e.bloch, p),
        ]);
        let _ = writeln!(
            human,
            "{:<14} {:<26} R^{} -> R^{}  B = {}",
            e.name,
            e.specifier,
            map.dim_in(),
            map.dim_out(),
            fmt_num(e.bloch, p)
        );
    }
    Ok(Outcome {
        json: json!({ "maps": maps }),
        table,
        human,
        exit_code: 0,
        diagnostics: Vec::new(),
    })
}
