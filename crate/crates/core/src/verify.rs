//! The verification driver behind `zeta-gram verify`: run configuration,
//! criteria suites and report bundles.

use std::collections::BTreeMap;
use std::f64::consts::E;
use std::path::PathBuf;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::divisor::{divisor_partial_sum, p2_polynomial, p3_identity_defect, p3_polynomial, ratio_sum_exponent};
use crate::grampoints::Angle;
use crate::io::{fmt_f64, fmt_sig17, load_or_enumerate, parse_config};
use crate::moments::{
    compute_s1, compute_s2, cubed_main_term, max_scan, moment_cubed, signed_odd_moment, theorem1_pipeline, CriticalSet,
    DirichletPolynomial, MomentReport, RationalExponent,
};
use crate::resonator::{build_resonator, certify_lower_bound, resonator_ratio, Resonator, DEFAULT_EPSILON};
use crate::special::EvalConfig;
use crate::{Error, Result, EVALUATOR_VERSION};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::Config(format!("format must be csv or json, got {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Prop1,
    Thm2,
    Thm1,
    Cor1,
    Cor2,
    Divisor,
    All,
}

impl Suite {
    pub fn as_str(self) -> &'static str {
        match self {
            Suite::Prop1 => "prop1",
            Suite::Thm2 => "thm2",
            Suite::Thm1 => "thm1",
            Suite::Cor1 => "cor1",
            Suite::Cor2 => "cor2",
            Suite::Divisor => "divisor",
            Suite::All => "all",
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "prop1" => Suite::Prop1,
            "thm2" => Suite::Thm2,
            "thm1" => Suite::Thm1,
            "cor1" => Suite::Cor1,
            "cor2" => Suite::Cor2,
            "divisor" => Suite::Divisor,
            "all" => Suite::All,
            _ => return Err(Error::Config(format!("unknown suite {s:?}"))),
        })
    }
}

/// Tolerances applied by the suites; each can be overridden from a config
/// file as `tol.<name> = value`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Third moment at `T ≥ 10⁵`.
    pub thm2: f64,
    /// Third moment below `10⁵`.
    pub thm2_low: f64,
    /// Vanishing-direction bound as a fraction of the `φ = 0` main term.
    pub vanishing: f64,
    /// `S₂` with `X = 1`.
    pub s2_unit: f64,
    /// Other `S₁`, `S₂` configurations.
    pub prop1: f64,
    /// `Σ_{n≤10⁶} d₃(n)` against `x P₂(ln x)`.
    pub divisor: f64,
    /// Band around `λμ` for the ratio-sum exponent.
    pub regression: f64,
    /// Agreement of the two signed-moment routes.
    pub signed_routes: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            thm2: 0.05,
            thm2_low: 0.10,
            vanishing: 0.01,
            s2_unit: 0.02,
            prop1: 0.05,
            divisor: 0.005,
            regression: 0.3,
            signed_routes: 1e-6,
        }
    }
}

pub const DEFAULT_EXPONENTS: [(u32, u32); 3] = [(1, 1), (3, 2), (2, 1)];

/// Parses `p/q` pairs separated by commas, e.g. `1/1,3/2`.
pub fn parse_exponents(v: &str) -> Result<Vec<(u32, u32)>> {
    v.split(',')
        .map(|item| {
            let (p, q) = item.trim().split_once('/').unwrap_or((item.trim(), "1"));
            let pair = (parse_value("exponent", p)?, parse_value("exponent", q)?);
            RationalExponent::new(pair.0, pair.1)?;
            Ok(pair)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub phi: f64,
    pub t_max: f64,
    pub threads: usize,
    pub cache_dir: Option<PathBuf>,
    pub format: Format,
    pub rs_correction_order: u32,
    pub tolerances: Tolerances,
    /// Exponents `k = p/q` run by the `thm1` suite, as `(p, q)`.
    pub exponents: Vec<(u32, u32)>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            phi: 0.0,
            t_max: 1e4,
            threads: std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
            cache_dir: None,
            format: Format::Csv,
            rs_correction_order: EvalConfig::default().rs_correction_order,
            tolerances: Tolerances::default(),
            exponents: DEFAULT_EXPONENTS.to_vec(),
        }
    }
}

fn parse_value<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| Error::Config(format!("invalid value {v:?} for {key}")))
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        Angle::new(self.phi).map_err(|_| Error::Config(format!("phi must be in [0, pi), got {}", self.phi)))?;
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            return Err(Error::Config(format!("t_max must be positive, got {}", self.t_max)));
        }
        for &(p, q) in &self.exponents {
            RationalExponent::new(p, q)?;
        }
        if self.threads < 1 {
            return Err(Error::Config("threads must be at least 1".into()));
        }
        self.eval_config().validate()
    }

    pub fn angle(&self) -> Result<Angle> {
        Angle::new(self.phi)
    }

    pub fn eval_config(&self) -> EvalConfig {
        EvalConfig { rs_correction_order: self.rs_correction_order, ..EvalConfig::default() }
    }

    /// Applies `key = value` pairs from a configuration file.
    pub fn apply_map(&mut self, map: &BTreeMap<String, String>) -> Result<()> {
        for (k, v) in map {
            match k.as_str() {
                "phi" => self.phi = parse_value(k, v)?,
                "t_max" => self.t_max = parse_value(k, v)?,
                "threads" => self.threads = parse_value(k, v)?,
                "cache_dir" => self.cache_dir = Some(PathBuf::from(v)),
                "format" => self.format = v.parse()?,
                "rs_correction_order" => self.rs_correction_order = parse_value(k, v)?,
                "exponents" => self.exponents = parse_exponents(v)?,
                "tol.thm2" => self.tolerances.thm2 = parse_value(k, v)?,
                "tol.thm2_low" => self.tolerances.thm2_low = parse_value(k, v)?,
                "tol.vanishing" => self.tolerances.vanishing = parse_value(k, v)?,
                "tol.s2_unit" => self.tolerances.s2_unit = parse_value(k, v)?,
                "tol.prop1" => self.tolerances.prop1 = parse_value(k, v)?,
                "tol.divisor" => self.tolerances.divisor = parse_value(k, v)?,
                "tol.regression" => self.tolerances.regression = parse_value(k, v)?,
                "tol.signed_routes" => self.tolerances.signed_routes = parse_value(k, v)?,
                _ => return Err(Error::Config(format!("unknown configuration key {k:?}"))),
            }
        }
        Ok(())
    }

    pub fn from_config_text(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        cfg.apply_map(&parse_config(text)?)?;
        Ok(cfg)
    }

    /// The settings that influence numeric results, one `key=value` per
    /// line. Thread count, cache location and output format are left out.
    pub fn canonical(&self) -> String {
        let t = &self.tolerances;
        let mut lines = vec![
            format!("phi={}", fmt_f64(self.phi)),
            format!("t_max={}", fmt_f64(self.t_max)),
            format!("rs_correction_order={}", self.rs_correction_order),
            format!(
                "exponents={}",
                self.exponents.iter().map(|(p, q)| format!("{p}/{q}")).collect::<Vec<_>>().join(",")
            ),
        ];
        for (k, v) in [
            ("thm2", t.thm2),
            ("thm2_low", t.thm2_low),
            ("vanishing", t.vanishing),
            ("s2_unit", t.s2_unit),
            ("prop1", t.prop1),
            ("divisor", t.divisor),
            ("regression", t.regression),
            ("signed_routes", t.signed_routes),
        ] {
            lines.push(format!("tol.{k}={}", fmt_f64(v)));
        }
        lines.join("\n")
    }

    pub fn hash(&self) -> String {
        Sha256::digest(self.canonical().as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: String,
    pub passed: bool,
    /// `false` for comparator rows that are reported but never fail a run.
    pub asserted: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub version: String,
    pub config_hash: String,
    pub suite: Suite,
    pub phi: f64,
    pub t_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportBundle {
    pub metadata: Metadata,
    pub reports: Vec<MomentReport>,
    pub criteria: Vec<CriterionResult>,
}

impl ReportBundle {
    pub fn all_passed(&self) -> bool {
        self.criteria.iter().all(|c| c.passed || !c.asserted)
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => serde_json::to_string_pretty(self)
                .map(|s| s + "\n")
                .map_err(|e| Error::Consistency(format!("report serialization: {e}"))),
            Format::Csv => Ok(self.to_csv()),
        }
    }

    fn to_csv(&self) -> String {
        let m = &self.metadata;
        let mut out = format!(
            "# version={}\n# config_hash={}\n# suite={}\n# phi={}\n# t_max={}\n",
            m.version,
            m.config_hash,
            m.suite.as_str(),
            fmt_f64(m.phi),
            fmt_f64(m.t_max)
        );
        out.push_str(
            "kind,phi,t_max,parameter,computed_re,computed_im,predicted_re,predicted_im,abs_error,rel_error,n_points\n",
        );
        for r in &self.reports {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{}\n",
                r.kind.as_str(),
                fmt_f64(r.phi.value()),
                fmt_f64(r.t_max),
                fmt_f64(r.parameter),
                fmt_f64(r.computed.re),
                fmt_f64(r.computed.im),
                fmt_f64(r.predicted.re),
                fmt_f64(r.predicted.im),
                fmt_f64(r.abs_error),
                fmt_f64(r.rel_error),
                r.n_points
            ));
        }
        out.push_str("\ncriterion,passed,asserted,detail\n");
        for c in &self.criteria {
            out.push_str(&format!("{},{},{},\"{}\"\n", c.id, c.passed, c.asserted, c.detail.replace('"', "'")));
        }
        out
    }
}

struct Runner<'a> {
    cfg: &'a RunConfig,
    eval: EvalConfig,
    sets: BTreeMap<u64, CriticalSet>,
    reports: Vec<MomentReport>,
    criteria: Vec<CriterionResult>,
}

impl<'a> Runner<'a> {
    fn set(&mut self, phi: Angle) -> Result<&CriticalSet> {
        let key = phi.value().to_bits();
        if !self.sets.contains_key(&key) {
            let points =
                load_or_enumerate(self.cfg.cache_dir.as_deref(), phi, self.cfg.t_max, self.eval.rs_correction_order)?;
            let set = CriticalSet::from_points(phi, self.cfg.t_max, points, &self.eval)?;
            self.sets.insert(key, set);
        }
        Ok(&self.sets[&key])
    }

    fn check(&mut self, id: &str, passed: bool, detail: String) {
        log::info!("{} {id}: {detail}", if passed { "PASS" } else { "FAIL" });
        self.criteria.push(CriterionResult { id: id.into(), passed, asserted: true, detail });
    }

    fn note(&mut self, id: &str, detail: String) {
        self.criteria.push(CriterionResult { id: id.into(), passed: true, asserted: false, detail });
    }

    fn prop1(&mut self) -> Result<()> {
        let phi = self.cfg.angle()?;
        let tol = self.cfg.tolerances;
        let set = self.set(phi)?.clone();
        let one = DirichletPolynomial::one();
        let two = DirichletPolynomial::from_real(&[1.0, 1.0])?;

        let r = compute_s2(&set, &one)?;
        self.check("prop1.s2_unit", r.rel_error <= tol.s2_unit, format!("rel_error={}", fmt_f64(r.rel_error)));
        self.reports.push(r);
        let r = compute_s2(&set, &two)?;
        self.check("prop1.s2_pair", r.rel_error <= tol.prop1, format!("rel_error={}", fmt_f64(r.rel_error)));
        self.reports.push(r);

        let reference = 2.0 * set.main_scale();
        for (id, x) in [("prop1.s1_unit", &one), ("prop1.s1_pair", &two)] {
            let r = compute_s1(&set, x, &one)?;
            if r.predicted.norm() <= 1e-9 * reference {
                let frac = r.computed.norm() / reference;
                self.check(
                    id,
                    frac <= tol.prop1,
                    format!("vanishing prediction; |computed|/main(phi=0)={}", fmt_f64(frac)),
                );
            } else {
                self.check(id, r.rel_error <= tol.prop1, format!("rel_error={}", fmt_f64(r.rel_error)));
            }
            self.reports.push(r);
        }
        Ok(())
    }

    fn thm2(&mut self) -> Result<()> {
        let phi = self.cfg.angle()?;
        let tol = self.cfg.tolerances;
        let set = self.set(phi)?.clone();
        let r = moment_cubed(&set)?;
        let reference = cubed_main_term(Angle::ZERO, set.t_mid)?.norm();
        if r.predicted.norm() <= 1e-9 * reference {
            let frac = r.computed.norm() / reference;
            self.check("thm2.vanishing", frac <= tol.vanishing, format!("|computed|/main(phi=0)={}", fmt_f64(frac)));
        } else {
            let bound = if set.t_max >= 1e5 { tol.thm2 } else { tol.thm2_low };
            self.check(
                "thm2.main_term",
                r.rel_error <= bound,
                format!("rel_error={} bound={}", fmt_f64(r.rel_error), fmt_f64(bound)),
            );
        }
        self.reports.push(r);
        Ok(())
    }

    fn thm1(&mut self) -> Result<()> {
        let phi = self.cfg.angle()?;
        let set = self.set(phi)?.clone();
        for (p, q) in self.cfg.exponents.clone() {
            let rep = theorem1_pipeline(&set, RationalExponent::new(p, q)?)?;
            let id = format!("thm1.k{p}_{q}");
            self.check(
                &format!("{id}.holder"),
                rep.holder_holds,
                format!(
                    "ln_moment={} ln_lower_bound={}",
                    fmt_f64(rep.moment.computed.re.ln()),
                    fmt_f64(rep.ln_lower_bound)
                ),
            );
            self.check(
                &format!("{id}.sigma"),
                rep.sigma2 >= rep.sigma1,
                format!("sigma1={} sigma2={}", fmt_f64(rep.sigma1), fmt_f64(rep.sigma2)),
            );
            self.check(
                &format!("{id}.convolution"),
                rep.convolution_defect == 0.0,
                format!("defect={}", fmt_f64(rep.convolution_defect)),
            );
            self.reports.extend([rep.s1, rep.s2, rep.moment]);
        }
        Ok(())
    }

    fn cor1(&mut self) -> Result<()> {
        let phi = self.cfg.angle()?;
        let tol = self.cfg.tolerances;
        let eval = self.eval;
        let set = self.set(phi)?.clone();
        let m = signed_odd_moment(&set, 0, &eval)?;
        self.check(
            "cor1.classes_nonempty",
            m.n_plus > 0 && m.n_minus > 0,
            format!("n_plus={} n_minus={}", m.n_plus, m.n_minus),
        );
        for ell in [0, 1] {
            let m = signed_odd_moment(&set, ell, &eval)?;
            let d = m.route_disagreement();
            self.check(&format!("cor1.routes_l{ell}"), d <= tol.signed_routes, format!("disagreement={}", fmt_f64(d)));
        }
        let full = max_scan(&set);
        if set.t_max > 1e3 {
            let early = max_scan(&set.truncate(1e3));
            let grew = |a: Option<f64>, b: Option<f64>| matches!((a, b), (Some(a), Some(b)) if a > b);
            self.check(
                "cor1.maxima_grow",
                grew(full.max_plus, early.max_plus) && grew(full.max_minus, early.max_minus),
                format!(
                    "plus {} -> {}, minus {} -> {}",
                    opt(early.max_plus),
                    opt(full.max_plus),
                    opt(early.max_minus),
                    opt(full.max_minus)
                ),
            );
        }
        let lt = set.t_mid.ln();
        for (name, e) in [("5/4", 1.25), ("3/2", 1.5)] {
            self.note(
                &format!("cor1.ratio_{}", name.replace('/', "_")),
                format!(
                    "max_plus/(log T)^{name}={} max_minus/(log T)^{name}={}",
                    opt(full.max_plus.map(|v| v / lt.powf(e))),
                    opt(full.max_minus.map(|v| v / lt.powf(e)))
                ),
            );
        }
        Ok(())
    }

    fn cor2(&mut self) -> Result<()> {
        let phi = self.cfg.angle()?;
        let mut ratios = Vec::new();
        for x in [1e3, 1e4, 1e5, 1e6] {
            let res = build_resonator(x)?;
            let r = resonator_ratio(&res)?;
            self.check(
                &format!("cor2.denominator_X{}", fmt_f64(x)),
                r.denominator < E,
                format!("sum_f2={}", fmt_f64(r.denominator)),
            );
            ratios.push(r.ratio);
        }
        self.check(
            "cor2.ratio_increasing",
            ratios.windows(2).all(|w| w[1] > w[0]),
            format!("ratios={}", ratios.iter().map(|r| fmt_f64(*r)).collect::<Vec<_>>().join(";")),
        );
        let set = self.set(phi)?.clone();
        for (id, res) in
            [("cor2.certificate_unit", Resonator::degenerate()), ("cor2.certificate_X1e4", build_resonator(1e4)?)]
        {
            let c = certify_lower_bound(&set, &res, DEFAULT_EPSILON)?;
            self.check(
                id,
                c.holds,
                format!(
                    "bound={} scanned_max={} precondition_ok={} vanishing_direction={}",
                    fmt_f64(c.bound),
                    fmt_f64(c.scanned_max),
                    c.precondition_ok,
                    c.vanishing_direction
                ),
            );
            self.reports.extend([c.s1, c.s2]);
        }
        Ok(())
    }

    fn divisor(&mut self) -> Result<()> {
        let tol = self.cfg.tolerances;
        let s = divisor_partial_sum(3, 1e6)?;
        let rel = s.rel_error().unwrap_or(f64::INFINITY);
        self.check("divisor.d3_sum", rel <= tol.divisor, format!("sum={} rel_error={}", fmt_f64(s.sum), fmt_f64(rel)));
        let xs = [1e4, 1e5, 1e6, 1e7];
        for (l, m) in [(1.0, 1.0), (2.0, 1.0), (0.5, 0.5)] {
            let slope = ratio_sum_exponent(l, m, &xs)?;
            let target: f64 = l * m;
            self.check(
                &format!("divisor.exponent_{}_{}", fmt_f64(l), fmt_f64(m)),
                (slope - target).abs() <= tol.regression,
                format!("slope={} target={}", fmt_f64(slope), fmt_f64(target)),
            );
        }
        let (p2, p3) = (p2_polynomial()?, p3_polynomial()?);
        let defect = p3_identity_defect(&p2, &p3);
        self.check(
            "divisor.p3_identity",
            defect <= 4.0 * f64::EPSILON && p3.coefficients[0] == -p3.coefficients[1],
            format!("defect={}", fmt_f64(defect)),
        );
        Ok(())
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

/// Runs a suite. Criterion failures are recorded in the bundle; only
/// invalid input or evaluation errors produce `Err`.
pub fn run_suite(cfg: &RunConfig, suite: Suite) -> Result<ReportBundle> {
    cfg.validate()?;
    let mut runner =
        Runner { cfg, eval: cfg.eval_config(), sets: BTreeMap::new(), reports: Vec::new(), criteria: Vec::new() };
    let selected: &[Suite] = match suite {
        Suite::All => &[Suite::Prop1, Suite::Thm2, Suite::Thm1, Suite::Cor1, Suite::Cor2, Suite::Divisor],
        _ => std::slice::from_ref(&suite),
    };
    for s in selected {
        match s {
            Suite::Prop1 => runner.prop1()?,
            Suite::Thm2 => runner.thm2()?,
            Suite::Thm1 => runner.thm1()?,
            Suite::Cor1 => runner.cor1()?,
            Suite::Cor2 => runner.cor2()?,
            Suite::Divisor => runner.divisor()?,
            Suite::All => unreachable!(),
        }
    }
    Ok(ReportBundle {
        metadata: Metadata {
            version: EVALUATOR_VERSION.to_string(),
            config_hash: cfg.hash(),
            suite,
            phi: cfg.phi,
            t_max: cfg.t_max,
        },
        reports: runner.reports,
        criteria: runner.criteria,
    })
}

/// Classified points for `cmd points`.
pub fn critical_set(cfg: &RunConfig) -> Result<CriticalSet> {
    cfg.validate()?;
    let eval = cfg.eval_config();
    let phi = cfg.angle()?;
    let points = load_or_enumerate(cfg.cache_dir.as_deref(), phi, cfg.t_max, eval.rs_correction_order)?;
    CriticalSet::from_points(phi, cfg.t_max, points, &eval)
}

/// CSV with header `n,phi,t,zeta_re,zeta_im,z,sign`, ordered by `n`.
pub fn points_csv(set: &CriticalSet) -> String {
    let mut out = String::from("n,phi,t,zeta_re,zeta_im,z,sign\n");
    for p in &set.points {
        let zeta = p.zeta();
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            p.point.n,
            fmt_f64(p.point.phi.value()),
            fmt_sig17(p.point.t),
            fmt_f64(zeta.re),
            fmt_f64(zeta.im),
            fmt_f64(p.z()),
            p.sign.as_char()
        ));
    }
    out
}

#[derive(Debug, Clone, Serialize)]
struct PointRow {
    n: i64,
    phi: f64,
    t: f64,
    zeta_re: f64,
    zeta_im: f64,
    z: f64,
    sign: String,
}

pub fn points_json(set: &CriticalSet, cfg: &RunConfig) -> Result<String> {
    let rows: Vec<PointRow> = set
        .points
        .iter()
        .map(|p| {
            let zeta: Complex64 = p.zeta();
            PointRow {
                n: p.point.n,
                phi: p.point.phi.value(),
                t: p.point.t,
                zeta_re: zeta.re,
                zeta_im: zeta.im,
                z: p.z(),
                sign: p.sign.as_char().to_string(),
            }
        })
        .collect();
    let doc = serde_json::json!({
        "metadata": { "version": EVALUATOR_VERSION, "config_hash": cfg.hash() },
        "points": rows,
    });
    serde_json::to_string_pretty(&doc).map(|s| s + "\n").map_err(|e| Error::Consistency(e.to_string()))
}

/// One checkpoint of the running-maximum table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaxscanRow {
    pub t: f64,
    pub max_plus: Option<f64>,
    pub argmax_plus: Option<f64>,
    pub max_minus: Option<f64>,
    pub argmax_minus: Option<f64>,
    /// `(log T)^{5/4}`.
    pub log_5_4: f64,
    /// `(log T)^{3/2}`.
    pub log_3_2: f64,
}

impl MaxscanRow {
    pub fn ratio(v: Option<f64>, scale: f64) -> Option<f64> {
        v.map(|v| v / scale)
    }
}

/// Running maxima at `10^{k/2}` for `k ≥ 4` up to `t_max`, and at `t_max`.
pub fn maxscan_table(cfg: &RunConfig) -> Result<Vec<MaxscanRow>> {
    let set = critical_set(cfg)?;
    let mut checkpoints: Vec<f64> = (4..).map(|k| 10f64.powf(k as f64 / 2.0)).take_while(|&t| t < cfg.t_max).collect();
    checkpoints.push(cfg.t_max);
    Ok(checkpoints
        .into_iter()
        .map(|t| {
            let m = max_scan(&set.truncate(t));
            let lt = t.ln();
            MaxscanRow {
                t,
                max_plus: m.max_plus,
                argmax_plus: m.argmax_plus,
                max_minus: m.max_minus,
                argmax_minus: m.argmax_minus,
                log_5_4: lt.powf(1.25),
                log_3_2: lt.powf(1.5),
            }
        })
        .collect())
}

pub fn render_maxscan(rows: &[MaxscanRow], format: Format) -> Result<String> {
    match format {
        Format::Json => {
            serde_json::to_string_pretty(rows).map(|s| s + "\n").map_err(|e| Error::Consistency(e.to_string()))
        }
        Format::Csv => {
            let mut out = String::from(
                "T,max_plus,argmax_plus,max_minus,argmax_minus,log_T_5_4,log_T_3_2,plus_over_5_4,minus_over_5_4,plus_over_3_2,minus_over_3_2\n",
            );
            for r in rows {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{},{},{}\n",
                    fmt_f64(r.t),
                    opt(r.max_plus),
                    opt(r.argmax_plus),
                    opt(r.max_minus),
                    opt(r.argmax_minus),
                    fmt_f64(r.log_5_4),
                    fmt_f64(r.log_3_2),
                    opt(MaxscanRow::ratio(r.max_plus, r.log_5_4)),
                    opt(MaxscanRow::ratio(r.max_minus, r.log_5_4)),
                    opt(MaxscanRow::ratio(r.max_plus, r.log_3_2)),
                    opt(MaxscanRow::ratio(r.max_minus, r.log_3_2)),
                ));
            }
            Ok(out)
        }
    }
}

/// `Σf²` and the ratio for the resonator of length `x`, and its support dump.
pub fn resonate(x: f64) -> Result<(Resonator, crate::resonator::ResonatorRatio)> {
    let res = build_resonator(x)?;
    let ratio = resonator_ratio(&res)?;
    Ok((res, ratio))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn config_hash_ignores_threads_and_format() {
        let a = RunConfig { threads: 1, ..RunConfig::default() };
        let b = RunConfig { threads: 8, format: Format::Json, cache_dir: Some("/tmp/x".into()), ..a.clone() };
        assert_eq!(a.hash(), b.hash());
        let c = RunConfig { phi: 0.5, ..a.clone() };
        assert_ne!(a.hash(), c.hash());
        assert_eq!(a.hash().len(), 64);
    }

    #[test]
    fn config_file_overrides() {
        let cfg = RunConfig::from_config_text("phi=1.0\nt_max=2e3\ntol.thm2=0.07\nformat=json\n").unwrap();
        assert_eq!((cfg.phi, cfg.t_max, cfg.tolerances.thm2, cfg.format), (1.0, 2e3, 0.07, Format::Json));
        assert!(RunConfig::from_config_text("nope=1").is_err());
        let cfg = RunConfig::from_config_text("exponents=3/2, 2").unwrap();
        assert_eq!(cfg.exponents, vec![(3, 2), (2, 1)]);
        assert!(RunConfig::from_config_text("exponents=0/1").is_err());
        assert!(RunConfig::from_config_text("phi=abc").is_err());
        let bad = RunConfig { phi: 3.2, ..RunConfig::default() };
        assert!(bad.validate().unwrap_err().to_string().contains("phi must be in [0, pi)"));
    }

    #[test]
    fn points_csv_shape() {
        let cfg = RunConfig { t_max: 50.0, ..RunConfig::default() };
        let set = critical_set(&cfg).unwrap();
        let csv = points_csv(&set);
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], "n,phi,t,zeta_re,zeta_im,z,sign");
        assert_eq!(lines.len(), 10);
        assert!(lines[1].starts_with("0,0.0,17.845599540410863,"), "{}", lines[1]);
    }

    #[test]
    fn thm2_vanishing_branch() {
        let cfg = RunConfig { phi: PI / 2.0, t_max: 2e3, ..RunConfig::default() };
        let b = run_suite(&cfg, Suite::Thm2).unwrap();
        assert_eq!(b.criteria[0].id, "thm2.vanishing");
    }

    #[test]
    fn maxscan_columns() {
        let cfg = RunConfig { t_max: 3e3, ..RunConfig::default() };
        let rows = maxscan_table(&cfg).unwrap();
        assert_eq!(rows.len(), 4);
        let csv = render_maxscan(&rows, Format::Csv).unwrap();
        assert!(csv.lines().next().unwrap().contains("plus_over_5_4"));
        let tiny = RunConfig { t_max: 12.0, ..RunConfig::default() };
        let rows = maxscan_table(&tiny).unwrap();
        assert!(render_maxscan(&rows, Format::Csv).unwrap().lines().nth(1).unwrap().starts_with("12.0,,,,"));
    }
}
