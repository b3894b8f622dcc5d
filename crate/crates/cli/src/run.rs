//! The subcommands, each turning a config into output records.

use std::collections::BTreeMap;

use metric_sheaf::logic::random::RandomConditions;
use metric_sheaf::logic::{parse_condition_with, Comparator, Condition};
use metric_sheaf::projective::{orthogonality_condition, phi_dim2, phi_dim_greater, phi_norm};
use metric_sheaf::sheaf::{
    force_local, force_point, gmt_crosscheck, Agreement, MetricSheaf, Resolution, Section, SectionBinding, Status,
    Verdict,
};
use metric_sheaf::wavepacket::{oracle_delta, propagator_row, QuadratureSpec};
use num_complex::Complex;

use crate::config::{err, Block, Config, ConfigError};
use crate::output::Record;
use crate::scenario::{self, AnySheaf, Location};
use crate::with_sheaf;

#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub depth: Option<usize>,
}

/// Records plus whether the run should exit with failure.
pub struct Outcome {
    pub columns: &'static [&'static str],
    pub records: Vec<Record>,
    pub failed: bool,
}

pub const FORCE_COLUMNS: &[&str] =
    &["index", "condition", "location", "status", "margin", "certificate", "sections", "expected", "error"];

pub const PROPAGATOR_COLUMNS: &[&str] =
    &["x1", "x0", "t", "tau", "re_k", "im_k", "abs_k", "arg_k", "re_exact", "im_exact", "rel_err", "error"];

pub const GMT_COLUMNS: &[&str] = &["index", "condition", "generic", "forcing", "forced_at", "agreement", "error"];

pub const DELTA_COLUMNS: &[&str] = &["tau", "integral", "g0", "error", "ratio", "quad_error", "tail_bound"];

fn status_of(s: &str, line: usize) -> Result<Status, ConfigError> {
    match s.to_ascii_lowercase().as_str() {
        "forced" => Ok(Status::Forced),
        "refuted" => Ok(Status::Refuted),
        "unknown" => Ok(Status::Unknown),
        other => err(line, format!("unknown status `{other}` (forced, refuted, unknown)")),
    }
}

/// A condition block after parsing; `Err` keeps the parse message for the
/// error record.
struct CondSpec {
    text: String,
    cond: Result<(Condition<f64>, SectionBinding<f64>), String>,
    location: Location,
    expect: Option<Status>,
}

type Bound = (Condition<f64>, SectionBinding<f64>);

fn builtin(sheaf: &AnySheaf, b: &Block) -> Result<(String, Result<Bound, String>), ConfigError> {
    let e = b.require("builtin")?;
    let words: Vec<&str> = e.value.split_whitespace().collect();
    let num = |w: &str| w.parse::<f64>().or_else(|x| err(e.line, format!("`{w}`: {x}")));
    let sentence = |f, eps: f64| Ok((Condition::new(f, Comparator::Lt, eps), SectionBinding::new()));
    let out = match words[..] {
        ["orthogonality", n, eps] => {
            let AnySheaf::Lattice(l) = sheaf else {
                return err(e.line, "orthogonality needs a lattice sheaf");
            };
            let n: usize = n.parse().or_else(|x| err(e.line, format!("`{n}`: {x}")))?;
            orthogonality_condition(l, n, num(eps)?).map_err(|x| x.to_string())
        }
        ["dim2", eps] => sentence(phi_dim2(), num(eps)?),
        ["dim_greater", k, eps] => {
            let k: usize = k.parse().or_else(|x| err(e.line, format!("`{k}`: {x}")))?;
            sentence(phi_dim_greater(k), num(eps)?)
        }
        ["norm", eps] => sentence(phi_norm(), num(eps)?),
        _ => return err(e.line, "builtin is `orthogonality N EPS`, `dim2 EPS`, `dim_greater K EPS` or `norm EPS`"),
    };
    Ok((e.value.clone(), out))
}

fn bind_free(cond: &Condition<f64>, sections: &BTreeMap<String, Section<f64>>) -> SectionBinding<f64> {
    cond.formula.free_variables().into_iter().filter_map(|v| sections.get(&v).map(|s| (v, s.clone()))).collect()
}

fn conditions(
    sheaf: &AnySheaf,
    cfg: &Config,
    sections: &BTreeMap<String, Section<f64>>,
    ov: &Overrides,
) -> Result<Vec<CondSpec>, ConfigError> {
    let sig = with_sheaf!(sheaf, s => s.signature().clone());
    let mut out = Vec::new();
    for b in cfg.blocks("condition") {
        let (text, cond) = if let Some(e) = b.entry("text") {
            let parsed = parse_condition_with::<f64>(&e.value, &sig)
                .map(|c| {
                    let binding = bind_free(&c, sections);
                    (c, binding)
                })
                .map_err(|x| x.to_string());
            (e.value.clone(), parsed)
        } else {
            builtin(sheaf, b)?
        };
        let location = scenario::location(sheaf, b.require("at")?, ov.depth)?;
        let expect = b.entry("expect").map(|e| status_of(&e.value, e.line)).transpose()?;
        out.push(CondSpec { text, cond, location, expect });
    }
    Ok(out)
}

fn section_list(binding: &SectionBinding<f64>) -> String {
    binding.iter().map(|(k, s)| format!("{k}={s}")).collect::<Vec<_>>().join("; ")
}

fn verdict_record(i: usize, spec: &CondSpec, loc: &str, v: Result<Verdict<f64>, String>, binding: &str) -> Record {
    let r = Record::new().with("index", i).with("condition", spec.text.clone()).with("location", loc.to_string());
    let r = match v {
        Ok(v) => r
            .with("status", v.status.to_string())
            .num("margin", Some(v.margin))
            .with("certificate", v.certificate.summary())
            .with("sections", binding.to_string()),
        Err(e) => r.with("status", "ERROR").with("error", e),
    };
    match spec.expect {
        Some(s) => r.with("expected", s.to_string()),
        None => r,
    }
}

fn force_all<S: MetricSheaf<f64>>(sheaf: &S, specs: &[CondSpec], res: &Resolution<f64>) -> Outcome {
    let mut records = Vec::new();
    let mut failed = false;
    for (i, spec) in specs.iter().enumerate() {
        let (cond, binding) = match &spec.cond {
            Ok(c) => c,
            Err(e) => {
                records.push(verdict_record(i, spec, "-", Err(e.clone()), ""));
                continue;
            }
        };
        let names = section_list(binding);
        let mut push = |loc: &str, v: Result<Verdict<f64>, String>| {
            if spec.expect == Some(Status::Forced) && matches!(&v, Ok(v) if v.is_refuted()) {
                failed = true;
            }
            records.push(verdict_record(i, spec, loc, v, &names));
        };
        match &spec.location {
            Location::Points(ps) => {
                for (label, x) in ps {
                    push(label, force_point(sheaf, x, cond, binding, res).map_err(|e| e.to_string()));
                }
            }
            Location::Open(label, u) => {
                push(label, force_local(sheaf, u, cond, binding, res).map_err(|e| e.to_string()))
            }
            Location::Chain(label, chain) => {
                for (k, u) in chain.sets.iter().enumerate() {
                    push(
                        &format!("{label} [{k}]"),
                        force_local(sheaf, u, cond, binding, res).map_err(|e| e.to_string()),
                    );
                }
            }
        }
    }
    Outcome { columns: FORCE_COLUMNS, records, failed }
}

pub fn force(cfg: &Config, dir: &std::path::Path, ov: &Overrides) -> Result<Outcome, ConfigError> {
    let sheaf = scenario::build_sheaf(cfg, dir)?;
    let sections = scenario::sections(&sheaf, cfg)?;
    let specs = conditions(&sheaf, cfg, &sections, ov)?;
    let res = scenario::resolution(cfg, ov.tol)?;
    Ok(with_sheaf!(&sheaf, s => force_all(s, &specs, &res)))
}

pub fn propagator(cfg: &Config) -> Result<Outcome, ConfigError> {
    let b = cfg.require("propagator")?;
    let c = scenario::constants(b)?;
    let list = |k: &str| -> Result<Vec<f64>, ConfigError> { b.require(k)?.list() };
    let (x1s, x0s, ts, taus) = (list("x1")?, list("x0")?, list("t")?, list("tau")?);
    let mut records = Vec::new();
    for &x1 in &x1s {
        for &x0 in &x0s {
            for &t in &ts {
                for &tau in &taus {
                    let r =
                        Record::new().num("x1", Some(x1)).num("x0", Some(x0)).num("t", Some(t)).num("tau", Some(tau));
                    records.push(match propagator_row(x1, x0, t, tau, c) {
                        Ok(row) => r
                            .num("re_k", Some(row.k.re))
                            .num("im_k", Some(row.k.im))
                            .num("abs_k", Some(row.k.norm()))
                            .num("arg_k", Some(row.k.arg()))
                            .num("re_exact", row.exact.map(|z| z.re))
                            .num("im_exact", row.exact.map(|z| z.im))
                            .num("rel_err", row.rel_err),
                        Err(e) => r.with("error", e.to_string()),
                    });
                }
            }
        }
    }
    Ok(Outcome { columns: PROPAGATOR_COLUMNS, records, failed: false })
}

pub fn gmt(cfg: &Config, dir: &std::path::Path, ov: &Overrides) -> Result<Outcome, ConfigError> {
    let sheaf = scenario::build_sheaf(cfg, dir)?;
    let sections = scenario::sections(&sheaf, cfg)?;
    let b = cfg.require("gmt")?;
    let spec = b.require("chain")?;
    let words: Vec<&str> = spec.value.split_whitespace().collect();
    let chain = scenario::chain(&sheaf, &words, spec.line, ov.depth)?;
    let res = scenario::resolution(cfg, ov.tol)?;

    let mut conds: Vec<(String, Result<Condition<f64>, String>)> = Vec::new();
    let sig = with_sheaf!(&sheaf, s => s.signature().clone());
    for c in cfg.blocks("condition") {
        let e = c.require("text")?;
        conds.push((e.value.clone(), parse_condition_with::<f64>(&e.value, &sig).map_err(|x| x.to_string())));
    }
    let n: usize = b.parse_or("random", 0)?;
    if n > 0 {
        let free: Vec<String> = match b.list::<String>("free")? {
            Some(f) => f,
            None => sections.keys().cloned().collect(),
        };
        if let Some(v) = free.iter().find(|v| !sections.contains_key(*v)) {
            return err(b.line, format!("free variable `{v}` has no [section {v}]"));
        }
        let seed = ov.seed.unwrap_or(b.parse_or("seed", 0)?);
        let mut gen = RandomConditions::new(sig, free, seed);
        gen.max_depth = b.parse_or("depth", 3)?;
        for _ in 0..n {
            let c = gen.condition::<f64>();
            conds.push((c.to_string(), Ok(c)));
        }
    }

    let mut records = Vec::new();
    let mut counts = [0usize; 3];
    for (i, (text, cond)) in conds.iter().enumerate() {
        let r = Record::new().with("index", i).with("condition", text.clone());
        let report = cond.as_ref().map_err(|e| e.clone()).and_then(|c| {
            let binding = bind_free(c, &sections);
            with_sheaf!(&sheaf, s => gmt_crosscheck(s, &chain, c, &binding, &res)).map_err(|e| e.to_string())
        });
        records.push(match report {
            Ok(g) => {
                let (k, name) = match g.agreement {
                    Agreement::Agree => (0, "agree"),
                    Agreement::Disagree => (1, "disagree"),
                    Agreement::Inconclusive => (2, "inconclusive"),
                };
                counts[k] += 1;
                r.with("generic", g.generic.to_string())
                    .with("forcing", g.forcing.to_string())
                    .with("forced_at", g.forced_at.map(|k| k.to_string()).unwrap_or_default())
                    .with("agreement", name)
            }
            Err(e) => r.with("agreement", "error").with("error", e),
        });
    }
    records.push(
        Record::new()
            .with("index", "total")
            .with("agreement", format!("agree={} disagree={} inconclusive={}", counts[0], counts[1], counts[2])),
    );
    Ok(Outcome { columns: GMT_COLUMNS, records, failed: counts[1] > 0 })
}

type TestFn = fn(f64) -> Complex<f64>;

/// Test functions for the delta approximation, with their sup norms.
fn test_function(name: &str, line: usize) -> Result<(TestFn, f64), ConfigError> {
    fn gauss_cos(x: f64) -> Complex<f64> {
        Complex::new((-x * x).exp() * x.cos(), 0.0)
    }
    fn gauss(x: f64) -> Complex<f64> {
        Complex::new((-x * x).exp(), 0.0)
    }
    fn cos(x: f64) -> Complex<f64> {
        Complex::new(x.cos(), 0.0)
    }
    match name {
        "gauss_cos" => Ok((gauss_cos, 1.0)),
        "gauss" => Ok((gauss, 1.0)),
        "cos" => Ok((cos, 1.0)),
        other => err(line, format!("unknown test function `{other}` (gauss_cos, gauss, cos)")),
    }
}

pub fn delta(cfg: &Config) -> Result<Outcome, ConfigError> {
    let b = cfg.require("delta")?;
    let c = scenario::constants(b)?;
    let taus: Vec<f64> = b.require("tau")?.list()?;
    let (g, sup) = match b.entry("g") {
        Some(e) => test_function(&e.value, e.line)?,
        None => test_function("gauss_cos", b.line)?,
    };
    let spec = QuadratureSpec::default();
    let mut records = Vec::new();
    let mut prev: Option<f64> = None;
    for &tau in &taus {
        let r = Record::new().num("tau", Some(tau));
        records.push(match oracle_delta(tau, g, sup, c, &spec) {
            Ok(q) => {
                let g0 = g(0.0);
                let error = (q.value - g0).norm();
                let ratio = prev.map(|p| p / error);
                prev = Some(error);
                r.num("integral", Some(q.value.re))
                    .num("g0", Some(g0.re))
                    .num("error", Some(error))
                    .num("ratio", ratio)
                    .num("quad_error", Some(q.error))
                    .num("tail_bound", Some(q.tail_bound))
            }
            Err(e) => {
                prev = None;
                r.with("error", e.to_string())
            }
        });
    }
    Ok(Outcome { columns: DELTA_COLUMNS, records, failed: false })
}
