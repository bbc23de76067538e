//! Text formats: number formatting, the Gram-point cache, flat key=value
//! configuration files, divisor tables and resonator dumps.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use crate::divisor::DivisorTable;
use crate::grampoints::{enumerate, Angle, GramPoint};
use crate::resonator::{Resonator, ResonatorConfig};
use crate::{Error, Result, EVALUATOR_VERSION};

/// Shortest decimal representation that reads back to the same `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

/// `x` with 17 significant digits in positional notation when reasonable.
pub fn fmt_sig17(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return fmt_f64(x);
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..=16).contains(&exp) {
        let decimals = (16 - exp).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.16e}")
    }
}

fn parse_f64(line: usize, field: &str) -> Result<f64> {
    let v: f64 = field.trim().parse().map_err(|_| Error::parse(line, format!("not a number: {field:?}")))?;
    if !v.is_finite() {
        return Err(Error::parse(line, format!("non-finite value {field:?}")));
    }
    Ok(v)
}

fn parse_int<T: std::str::FromStr>(line: usize, field: &str) -> Result<T> {
    field.trim().parse().map_err(|_| Error::parse(line, format!("not an integer: {field:?}")))
}

/// Splits `# key=value` header lines from the data lines that follow.
fn split_header(text: &str) -> (BTreeMap<String, (usize, String)>, Vec<(usize, &str)>) {
    let mut header = BTreeMap::new();
    let mut body = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            if let Some((k, v)) = rest.split_once('=') {
                header.insert(k.trim().to_string(), (i + 1, v.trim().to_string()));
            }
            continue;
        }
        body.push((i + 1, line));
    }
    (header, body)
}

fn header_value<'a>(header: &'a BTreeMap<String, (usize, String)>, key: &str) -> Result<(usize, &'a str)> {
    header.get(key).map(|(l, v)| (*l, v.as_str())).ok_or_else(|| Error::parse(0, format!("missing header field {key}")))
}

fn expect_columns(body: &[(usize, &str)], columns: &str) -> Result<()> {
    match body.first() {
        Some((_, first)) if *first == columns => Ok(()),
        Some((l, other)) => Err(Error::parse(*l, format!("expected column header {columns:?}, found {other:?}"))),
        None => Err(Error::parse(0, format!("missing column header {columns:?}"))),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GramCache {
    pub version: String,
    pub rs_order: u32,
    pub phi: Angle,
    pub t_max: f64,
    pub points: Vec<GramPoint>,
}

impl GramCache {
    pub fn encode(&self) -> String {
        let mut out = String::new();
        out.push_str("# zeta-gram gram-point cache\n");
        out.push_str(&format!("# version={}\n", self.version));
        out.push_str(&format!("# rs_order={}\n", self.rs_order));
        out.push_str(&format!("# phi={}\n", fmt_f64(self.phi.value())));
        out.push_str(&format!("# t_max={}\n", fmt_f64(self.t_max)));
        out.push_str("n,t\n");
        for p in &self.points {
            out.push_str(&format!("{},{}\n", p.n, fmt_sig17(p.t)));
        }
        out
    }

    /// Parses a cache file. Indices must be consecutive and abscissas
    /// strictly increasing, positive and not above `t_max`.
    pub fn decode(text: &str) -> Result<Self> {
        let (header, body) = split_header(text);
        let version = header_value(&header, "version")?.1.to_string();
        let (l, v) = header_value(&header, "rs_order")?;
        let rs_order = parse_int(l, v)?;
        let (l, v) = header_value(&header, "phi")?;
        let phi = Angle::new(parse_f64(l, v)?).map_err(|e| Error::parse(l, e.to_string()))?;
        let (l, v) = header_value(&header, "t_max")?;
        let t_max = parse_f64(l, v)?;
        expect_columns(&body, "n,t")?;
        let mut points: Vec<GramPoint> = Vec::with_capacity(body.len().saturating_sub(1));
        for &(l, line) in &body[1..] {
            let (n, t) = line.split_once(',').ok_or_else(|| Error::parse(l, "expected two fields"))?;
            let n: i64 = parse_int(l, n)?;
            let t = parse_f64(l, t)?;
            if t <= 0.0 || t > t_max {
                return Err(Error::parse(l, format!("abscissa {t} outside (0, t_max]")));
            }
            if let Some(prev) = points.last() {
                if prev.n.checked_add(1) != Some(n) || t <= prev.t {
                    return Err(Error::parse(l, "points must have consecutive indices and increasing t"));
                }
            }
            points.push(GramPoint { n, phi, t });
        }
        Ok(Self { version, rs_order, phi, t_max, points })
    }
}

/// Cache file path for `(φ rounded to 1e-12, t_max)`.
pub fn gram_cache_path(dir: &Path, phi: Angle, t_max: f64) -> PathBuf {
    let key = (phi.value() * 1e12).round() as i64;
    dir.join(format!("gram_phi{key}e-12_t{}.csv", fmt_f64(t_max)))
}

/// Gram points up to `t_max`, read from `dir` when a matching cache exists
/// and written there otherwise. A cache whose header does not match the
/// running evaluator is ignored and replaced.
pub fn load_or_enumerate(dir: Option<&Path>, phi: Angle, t_max: f64, rs_order: u32) -> Result<Vec<GramPoint>> {
    let Some(dir) = dir else {
        return enumerate(phi, t_max);
    };
    let path = gram_cache_path(dir, phi, t_max);
    if let Ok(text) = fs::read_to_string(&path) {
        match GramCache::decode(&text) {
            Ok(c) if c.version == EVALUATOR_VERSION && c.rs_order == rs_order && c.phi == phi && c.t_max == t_max => {
                log::debug!("using cached gram points from {}", path.display());
                return Ok(c.points);
            }
            Ok(_) => log::info!("stale gram cache {} ignored", path.display()),
            Err(e) => log::warn!("unreadable gram cache {}: {e}", path.display()),
        }
    }
    let points = enumerate(phi, t_max)?;
    let cache = GramCache { version: EVALUATOR_VERSION.to_string(), rs_order, phi, t_max, points };
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_atomic(&path, &cache.encode())?;
    Ok(cache.points)
}

/// Writes through a temporary sibling and renames it into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    fs::write(&tmp, contents).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

/// Parses a flat `key = value` file. `#` starts a comment line; keys may not
/// repeat.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| Error::parse(i + 1, "expected key=value"))?;
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() || !k.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.' || c == '-') {
            return Err(Error::parse(i + 1, format!("invalid key {k:?}")));
        }
        if out.insert(k.to_string(), v.to_string()).is_some() {
            return Err(Error::parse(i + 1, format!("duplicate key {k:?}")));
        }
    }
    Ok(out)
}

pub fn encode_divisor_table(table: &DivisorTable) -> String {
    let mut out = format!("# kappa={}\n# limit={}\nn,d\n", fmt_f64(table.kappa), table.limit);
    for n in 1..=table.limit {
        out.push_str(&format!("{n},{}\n", fmt_f64(table.values[n])));
    }
    out
}

/// Parses a divisor table dump: rows `n = 1..=limit` in order, `d(1) = 1`,
/// every entry finite and non-negative.
pub fn decode_divisor_table(text: &str) -> Result<DivisorTable> {
    let (header, body) = split_header(text);
    let (l, v) = header_value(&header, "kappa")?;
    let kappa = parse_f64(l, v)?;
    if kappa <= 0.0 {
        return Err(Error::parse(l, "kappa must be positive"));
    }
    let (l, v) = header_value(&header, "limit")?;
    let limit: usize = parse_int(l, v)?;
    expect_columns(&body, "n,d")?;
    if body.len() - 1 != limit {
        return Err(Error::parse(l, format!("limit {limit} but {} rows", body.len() - 1)));
    }
    let mut values = vec![0.0; limit + 1];
    for (i, &(l, line)) in body[1..].iter().enumerate() {
        let (n, d) = line.split_once(',').ok_or_else(|| Error::parse(l, "expected two fields"))?;
        let n: usize = parse_int(l, n)?;
        if n != i + 1 {
            return Err(Error::parse(l, format!("expected n = {}, found {n}", i + 1)));
        }
        let d = parse_f64(l, d)?;
        if d < 0.0 {
            return Err(Error::parse(l, "negative divisor value"));
        }
        values[n] = d;
    }
    if limit >= 1 && values[1] != 1.0 {
        return Err(Error::parse(0, "d(1) must equal 1"));
    }
    Ok(DivisorTable { kappa, limit, values })
}

pub fn encode_resonator(res: &Resonator) -> String {
    let mut out = String::new();
    if let Some(cfg) = res.config {
        out.push_str(&format!("# X={}\n", fmt_f64(cfg.x)));
    }
    out.push_str("n,f\n");
    for &(n, f) in &res.support {
        out.push_str(&format!("{n},{}\n", fmt_f64(f)));
    }
    out
}

/// Parses a resonator dump produced by [`encode_resonator`].
pub fn decode_resonator(text: &str) -> Result<Resonator> {
    let (header, body) = split_header(text);
    let config = match header.get("X") {
        Some((l, v)) => Some(ResonatorConfig::new(parse_f64(*l, v)?).map_err(|e| Error::parse(*l, e.to_string()))?),
        None => None,
    };
    expect_columns(&body, "n,f")?;
    let mut support = Vec::with_capacity(body.len() - 1);
    for &(l, line) in &body[1..] {
        let (n, f) = line.split_once(',').ok_or_else(|| Error::parse(l, "expected two fields"))?;
        let n: u64 = parse_int(l, n)?;
        if n == 0 || n > 1 << 40 {
            return Err(Error::parse(l, format!("index {n} out of range")));
        }
        support.push((n, parse_f64(l, f)?));
    }
    Resonator::from_support(config, support)
}
