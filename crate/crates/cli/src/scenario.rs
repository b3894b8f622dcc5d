//! Sheaves, sections, locations and resolutions built from config blocks.

use std::collections::BTreeMap;
use std::path::Path;

use metric_sheaf::projective::{read_matrix, LatticeSheaf, OperatorContext, ParametricSheaf};
use metric_sheaf::sheaf::base::index_set;
use metric_sheaf::sheaf::torus::TorusSheaf;
use metric_sheaf::sheaf::{BasePoint, BaseSpace, FilterChain, OpenSet, Resolution, Section};
use metric_sheaf::wavepacket::{PacketSheaf, PhysicalConstants, Poly};
use num_complex::Complex;

use crate::config::{err, Block, Config, ConfigError, Entry};

pub enum AnySheaf {
    Torus(TorusSheaf<f64>),
    Lattice(LatticeSheaf<f64>),
    Parametric(ParametricSheaf<f64>),
    Packet(PacketSheaf<f64>),
}

/// Runs `$body` with `$s` bound to the concrete sheaf.
#[macro_export]
macro_rules! with_sheaf {
    ($sheaf:expr, $s:ident => $body:expr) => {
        match $sheaf {
            $crate::scenario::AnySheaf::Torus($s) => $body,
            $crate::scenario::AnySheaf::Lattice($s) => $body,
            $crate::scenario::AnySheaf::Parametric($s) => $body,
            $crate::scenario::AnySheaf::Packet($s) => $body,
        }
    };
}

impl AnySheaf {
    pub fn base(&self) -> BaseSpace<f64> {
        use metric_sheaf::sheaf::MetricSheaf;
        with_sheaf!(self, s => s.base().clone())
    }

    pub fn kind(&self) -> &'static str {
        match self {
            AnySheaf::Torus(_) => "torus",
            AnySheaf::Lattice(_) => "lattice",
            AnySheaf::Parametric(_) => "parametric",
            AnySheaf::Packet(_) => "packet",
        }
    }
}

pub fn constants(block: &Block) -> Result<PhysicalConstants<f64>, ConfigError> {
    let hbar = block.parse_or("hbar", 1.0)?;
    let mass = block.parse_or("mass", 1.0)?;
    PhysicalConstants::new(hbar, mass).or_else(|e| err(block.line, e.to_string()))
}

pub fn build_sheaf(cfg: &Config, dir: &Path) -> Result<AnySheaf, ConfigError> {
    let b = cfg.require("sheaf")?;
    let kind = b.require("kind")?;
    Ok(match kind.value.as_str() {
        "torus" => AnySheaf::Torus(TorusSheaf::new(
            b.parse_or("winding", 1)?,
            b.parse_or("amplitude", 0.3)?,
            b.parse_or("samples", 48)?,
        )),
        "lattice" => {
            let (l, line) = if let Some(e) = b.entry("matrix") {
                let m = read_matrix(&dir.join(&e.value)).or_else(|x| err(e.line, x.to_string()))?;
                (OperatorContext::new(m).and_then(LatticeSheaf::new), e.line)
            } else {
                let e = b.require("eigenvalues")?;
                (LatticeSheaf::diagonal(&e.list::<f64>()?), e.line)
            };
            AnySheaf::Lattice(l.or_else(|x| err(line, x.to_string()))?)
        }
        "parametric" => AnySheaf::Parametric(ParametricSheaf::example(b.parse_or("dim", 2)?)),
        "packet" => AnySheaf::Packet(PacketSheaf::new(constants(b)?)),
        other => return err(kind.line, format!("unknown sheaf `{other}` (torus, lattice, parametric, packet)")),
    })
}

fn complex_list(e: &Entry) -> Result<Vec<Complex<f64>>, ConfigError> {
    let xs = e.list::<f64>()?;
    if xs.is_empty() || xs.len() % 2 != 0 {
        return err(e.line, format!("`{}` takes `re im` pairs", e.key));
    }
    Ok(xs.chunks(2).map(|p| Complex::new(p[0], p[1])).collect())
}

fn index(e: &Entry, bound: usize) -> Result<usize, ConfigError> {
    let i: usize = e.parse()?;
    if i >= bound {
        return err(e.line, format!("index {i} out of range (size {bound})"));
    }
    Ok(i)
}

fn section(sheaf: &AnySheaf, b: &Block) -> Result<Section<f64>, ConfigError> {
    let whole = sheaf.base().whole();
    let first = b.entries.iter().find(|e| e.key != "domain");
    let Some(e) = first else {
        return err(b.line, "section block needs a definition");
    };
    let line = e.line;
    let wrap = |r: Result<Section<f64>, String>| r.or_else(|m| err(line, m));
    let s = match (sheaf, e.key.as_str()) {
        (AnySheaf::Torus(t), "curve") => t.curve(e.parse()?),
        (AnySheaf::Lattice(l), "eigen") => l.sigma_eigen(index(e, l.size())?),
        (AnySheaf::Lattice(l), "level") => l.mu_eigen(index(e, l.size())?),
        (AnySheaf::Lattice(l), "sigma") => wrap(l.sigma(&complex_list(e)?).map_err(|x| x.to_string()))?,
        (AnySheaf::Lattice(l), "mu") => wrap(l.mu(&complex_list(e)?).map_err(|x| x.to_string()))?,
        (AnySheaf::Parametric(p), "eigen") => p.sigma_eigen(index(e, p.dim())?),
        (AnySheaf::Parametric(p), "level") => p.mu_eigen(index(e, p.dim())?),
        (AnySheaf::Parametric(p), "sigma") => p.sigma(&complex_list(e)?),
        (AnySheaf::Parametric(p), "mu") => p.mu(&complex_list(e)?),
        (AnySheaf::Packet(p), "gaussian") => p.gaussian_u(e.parse()?),
        (AnySheaf::Packet(p), "evolved") => match e.list::<f64>()?[..] {
            [x0, t] => p.evolved_u(x0, t),
            _ => return err(line, "`evolved` takes x0 and t"),
        },
        (AnySheaf::Packet(p), key @ ("u" | "v")) => {
            let xs = e.list::<f64>()?;
            if xs.len() < 6 || xs.len() % 2 != 0 {
                return err(line, format!("`{key}` takes x0 p0 t_re t_im and `re im` coefficient pairs"));
            }
            let q = Poly::new(xs[4..].chunks(2).map(|c| Complex::new(c[0], c[1])).collect());
            let t = Complex::new(xs[2], xs[3]);
            if key == "u" {
                p.sigma_u(&q, xs[0], xs[1], t)
            } else {
                p.sigma_v(&q, xs[0], xs[1], t)
            }
        }
        (_, "family") => Section::family(&e.value, b.list("params")?.unwrap_or_default(), whole.clone()),
        (s, key) => return err(line, format!("`{key}` does not define a section of the {} sheaf", s.kind())),
    };
    Ok(match b.entry("domain") {
        Some(d) => s.restrict(&open_set(sheaf, d)?),
        None => s,
    })
}

pub fn sections(sheaf: &AnySheaf, cfg: &Config) -> Result<BTreeMap<String, Section<f64>>, ConfigError> {
    let mut out = BTreeMap::new();
    for b in cfg.blocks("section") {
        let Some(name) = &b.name else {
            return err(b.line, "section block needs a name: [section NAME]");
        };
        if out.insert(name.clone(), section(sheaf, b)?).is_some() {
            return err(b.line, format!("section `{name}` defined twice"));
        }
    }
    Ok(out)
}

fn subset(tok: &str, line: usize) -> Result<u64, ConfigError> {
    let inner = tok.trim_start_matches('{').trim_end_matches('}');
    let idx = inner
        .split(',')
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<usize>().or_else(|e| err(line, format!("subset item `{s}`: {e}"))))
        .collect::<Result<Vec<_>, _>>()?;
    if idx.iter().any(|i| *i >= 64) {
        return err(line, "subset indices must be below 64");
    }
    Ok(index_set(idx))
}

pub fn point(sheaf: &AnySheaf, tok: &str, line: usize) -> Result<BasePoint<f64>, ConfigError> {
    let num = || tok.parse::<f64>().or_else(|e| err(line, format!("point `{tok}`: {e}")));
    Ok(match sheaf.base() {
        BaseSpace::Circle => BasePoint::angle(num()?),
        BaseSpace::FiniteSubsetLattice { .. } => BasePoint::Subset(subset(tok, line)?),
        _ => BasePoint::Real(num()?),
    })
}

fn open_words(sheaf: &AnySheaf, words: &[&str], line: usize) -> Result<OpenSet<f64>, ConfigError> {
    let nums = |ws: &[&str]| -> Result<Vec<f64>, ConfigError> {
        ws.iter().map(|w| w.parse::<f64>().or_else(|e| err(line, format!("`{w}`: {e}")))).collect()
    };
    match words {
        ["whole"] => Ok(sheaf.base().whole()),
        ["interval", rest @ ..] => match nums(rest)?[..] {
            [lo, hi] => Ok(OpenSet::interval(lo, hi)),
            _ => err(line, "interval takes lo hi"),
        },
        ["arc", rest @ ..] => match nums(rest)?[..] {
            [s, l] => Ok(OpenSet::arc(s, l)),
            _ => err(line, "arc takes start and length"),
        },
        ["cone", root] => match sheaf.base() {
            BaseSpace::FiniteSubsetLattice { size } => Ok(OpenSet::cone(subset(root, line)?, size)),
            _ => err(line, "cones need a lattice base"),
        },
        _ => err(line, format!("unknown open set `{}` (whole, interval, arc, cone)", words.join(" "))),
    }
}

pub fn open_set(sheaf: &AnySheaf, e: &Entry) -> Result<OpenSet<f64>, ConfigError> {
    let words: Vec<&str> = e.value.split_whitespace().collect();
    open_words(sheaf, &words, e.line)
}

pub fn chain(
    sheaf: &AnySheaf,
    words: &[&str],
    line: usize,
    depth: Option<usize>,
) -> Result<FilterChain<f64>, ConfigError> {
    let nums = |ws: &[&str]| -> Result<Vec<f64>, ConfigError> {
        ws.iter().map(|w| w.parse::<f64>().or_else(|e| err(line, format!("`{w}`: {e}")))).collect()
    };
    let depth_of = |d: f64| -> Result<usize, ConfigError> {
        let d = depth.unwrap_or(d as usize);
        if d == 0 {
            return err(line, "chain depth must be positive");
        }
        Ok(d)
    };
    match words {
        ["shrink", d] => Ok(FilterChain::shrink_to_zero(depth_of(nums(&[d])?[0])?)),
        ["grow", d] => Ok(FilterChain::grow_to_infinity(depth_of(nums(&[d])?[0])?)),
        ["arcs", rest @ ..] => match nums(rest)?[..] {
            [theta, h0, d] => Ok(FilterChain::arcs_around(theta, h0, depth_of(d)?)),
            _ => err(line, "arcs takes theta h0 depth"),
        },
        ["cones", d] => match sheaf.base() {
            BaseSpace::FiniteSubsetLattice { size } => Ok(FilterChain::cones(size, depth_of(nums(&[d])?[0])?)),
            _ => err(line, "cones need a lattice base"),
        },
        _ => err(line, format!("unknown chain `{}` (shrink, grow, arcs, cones)", words.join(" "))),
    }
}

#[derive(Debug, Clone)]
pub enum Location {
    Points(Vec<(String, BasePoint<f64>)>),
    Open(String, OpenSet<f64>),
    Chain(String, FilterChain<f64>),
}

pub fn location(sheaf: &AnySheaf, e: &Entry, depth: Option<usize>) -> Result<Location, ConfigError> {
    let words: Vec<&str> = e.value.split_whitespace().collect();
    match words.split_first() {
        Some((&"point", rest)) if !rest.is_empty() => Ok(Location::Points(
            rest.iter().map(|w| Ok((format!("point {w}"), point(sheaf, w, e.line)?))).collect::<Result<_, _>>()?,
        )),
        Some((&"open", rest)) => Ok(Location::Open(e.value.clone(), open_words(sheaf, rest, e.line)?)),
        Some((&"chain", rest)) => Ok(Location::Chain(e.value.clone(), chain(sheaf, rest, e.line, depth)?)),
        _ => err(e.line, "location is `point X..`, `open SET` or `chain SPEC`"),
    }
}

pub fn resolution(cfg: &Config, tol: Option<f64>) -> Result<Resolution<f64>, ConfigError> {
    let mut r = Resolution::default();
    if let Some(b) = cfg.block("resolution") {
        r.tol = b.parse_or("tol", r.tol)?;
        r.grid = b.parse_or("grid", r.grid)?;
        r.max_refinement = b.parse_or("max_refinement", r.max_refinement)?;
        r.cover_depth = b.parse_or("cover_depth", r.cover_depth)?;
        r.threshold_grid = b.parse_or("threshold_grid", r.threshold_grid)?;
        r.gap = b.parse_or("gap", r.gap)?;
    }
    if let Some(t) = tol {
        r.tol = t;
    }
    Ok(r)
}
