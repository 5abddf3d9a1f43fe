//! Run configuration: a flat `key = value` text format.
//!
//! Grammar, one item per line:
//!
//! ```text
//! # comment (also allowed after a value)
//! key = value
//! [section]          # later keys are read as section.key
//! section.key = value
//! ```
//!
//! Values are numbers, words, comma-separated number lists (optionally in
//! brackets) or `true`/`false`. Every key may appear once. Unknown keys,
//! bad values and violated constraints are reported with the key name and
//! the line number.
//!
//! | key | default | meaning |
//! |-----|---------|---------|
//! | `experiment` | required | `simulate`, `converge`, `asymptote` or `verify` |
//! | `T` | required | horizon; `0` allowed for `simulate` |
//! | `dt` | required except for `converge` | time step |
//! | `dt_list` | required for `converge` | strictly decreasing steps |
//! | `p_list` | `1, 2` | norm exponents for `asymptote` |
//! | `output` | `.` | output directory, overridden by `--out` |
//! | `record_every` | final step only | snapshot stride for `simulate` |
//! | `snapshots` | `20` | log-spaced sample times for `asymptote` |
//! | `scheme` | `split` | `split` or `reference` for `simulate` |
//! | `compare_reference` | `false` | `converge` also reports split vs reference |
//! | `grid.x_min`, `grid.x_max` | `-50`, `50` | domain |
//! | `grid.dx` or `grid.n_cells` | `dx = 0.1` | resolution |
//! | `params.gamma`, `params.c_nu` | `100`, `0.02` | physical constants |
//! | `initial.kind` | `gaussian` | `gaussian`, `box`, `double_box` or `samples` |
//! | `initial.center`, `initial.width` | `0`, `1` | placement |
//! | `initial.amplitude` | `1` | Gaussian peak |
//! | `initial.height` | `1` | box height |
//! | `initial.file` | | two-column `x u` samples, relative to the config file |
//! | `cn.literal_denominator` | `false` | mixed term over `dx` instead of `2 dx` |
//! | `reference.balance` | `mass` | `mass` or `unit` weight of `u_j` in the reference solver |

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use abers_core::{
    cfl_max_dt, GridSpec, InitialData, MixedTerm, NonlocalBalance, PhysicalParams, ProfileSpec,
    SchemeOptions, SplitSchedule, DEFAULT_C_NU, DEFAULT_DX, DEFAULT_GAMMA,
};

const KEYS: &[&str] = &[
    "experiment",
    "T",
    "dt",
    "dt_list",
    "p_list",
    "output",
    "record_every",
    "snapshots",
    "scheme",
    "compare_reference",
    "grid.x_min",
    "grid.x_max",
    "grid.dx",
    "grid.n_cells",
    "params.gamma",
    "params.c_nu",
    "initial.kind",
    "initial.center",
    "initial.width",
    "initial.amplitude",
    "initial.height",
    "initial.file",
    "cn.literal_denominator",
    "reference.balance",
];

/// Initial data must vanish outside this central fraction of the domain.
pub const INNER_FRACTION: f64 = 0.8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Simulate,
    Converge,
    Asymptote,
    Verify,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Simulate => "simulate",
            Experiment::Converge => "converge",
            Experiment::Asymptote => "asymptote",
            Experiment::Verify => "verify",
        }
    }
}

impl FromStr for Experiment {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "simulate" => Ok(Experiment::Simulate),
            "converge" => Ok(Experiment::Converge),
            "asymptote" => Ok(Experiment::Asymptote),
            "verify" => Ok(Experiment::Verify),
            _ => Err("expected simulate, converge, asymptote or verify".into()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeChoice {
    Split,
    Reference,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub grid: GridSpec,
    pub params: PhysicalParams,
    pub initial: InitialData,
    pub horizon: f64,
    pub dt: Option<f64>,
    pub dt_list: Vec<f64>,
    pub p_list: Vec<f64>,
    pub output: Option<PathBuf>,
    pub record_every: Option<usize>,
    pub snapshots: usize,
    pub scheme: SchemeChoice,
    pub compare_reference: bool,
    pub options: SchemeOptions,
}

impl RunConfig {
    /// The time step for single-run experiments.
    pub fn dt(&self) -> f64 {
        self.dt.expect("validated config has dt")
    }

    /// Every resolved setting in a fixed order, with floats in round-trip
    /// form. Two configs are the same run iff their canonical forms agree.
    pub fn canonical(&self) -> String {
        let mut s = String::new();
        let mut put = |k: &str, v: String| {
            s.push_str(k);
            s.push('=');
            s.push_str(&v);
            s.push('\n');
        };
        put("experiment", self.experiment.name().into());
        put("T", format!("{:?}", self.horizon));
        put("dt", format!("{:?}", self.dt));
        put("dt_list", format!("{:?}", self.dt_list));
        put("p_list", format!("{:?}", self.p_list));
        put("record_every", format!("{:?}", self.record_every));
        put("snapshots", self.snapshots.to_string());
        put("scheme", format!("{:?}", self.scheme));
        put("compare_reference", self.compare_reference.to_string());
        put(
            "grid",
            format!(
                "{:?},{:?},{}",
                self.grid.x_min(),
                self.grid.x_max(),
                self.grid.n_cells()
            ),
        );
        put(
            "params",
            format!("{:?},{:?}", self.params.gamma(), self.params.c_nu()),
        );
        put("initial", format!("{:?}", self.initial));
        put("options", format!("{:?}", self.options));
        s
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: key `{key}` already set on line {first}")]
    Duplicate {
        line: usize,
        key: String,
        first: usize,
    },
    #[error("missing required key `{key}`")]
    Missing { key: String },
    #[error("{}key `{key}`: {msg}", at(*line))]
    Invalid {
        key: String,
        line: Option<usize>,
        msg: String,
    },
    #[error("cannot read {}: {source}", path.display())]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
}

fn at(line: Option<usize>) -> String {
    line.map(|l| format!("line {l}: ")).unwrap_or_default()
}

impl ConfigError {
    /// The key the error refers to, if any.
    pub fn key(&self) -> Option<&str> {
        match self {
            ConfigError::UnknownKey { key, .. }
            | ConfigError::Duplicate { key, .. }
            | ConfigError::Missing { key }
            | ConfigError::Invalid { key, .. } => Some(key),
            _ => None,
        }
    }

    pub fn line(&self) -> Option<usize> {
        match self {
            ConfigError::Syntax { line, .. }
            | ConfigError::UnknownKey { line, .. }
            | ConfigError::Duplicate { line, .. } => Some(*line),
            ConfigError::Invalid { line, .. } => *line,
            _ => None,
        }
    }
}

type Result<T> = std::result::Result<T, ConfigError>;

#[derive(Debug, Clone, Default)]
pub struct ParseOptions {
    /// Relative sample files are resolved against this directory.
    pub base_dir: PathBuf,
    /// Used when the document has no `experiment` key; must agree with it
    /// otherwise.
    pub experiment: Option<Experiment>,
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    parse_config_with(text, &ParseOptions::default())
}

pub fn load_config(path: &Path, experiment: Option<Experiment>) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    parse_config_with(
        &text,
        &ParseOptions {
            base_dir,
            experiment,
        },
    )
}

struct Entry {
    value: String,
    line: usize,
}

struct Doc {
    entries: BTreeMap<String, Entry>,
}

fn tokenize(text: &str) -> Result<Doc> {
    let mut entries: BTreeMap<String, Entry> = BTreeMap::new();
    let mut section = String::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix('[') {
            let name = rest.strip_suffix(']').ok_or_else(|| ConfigError::Syntax {
                line,
                msg: "unterminated section header".into(),
            })?;
            let name = name.trim();
            if !is_ident(name) {
                return Err(ConfigError::Syntax {
                    line,
                    msg: format!("bad section name {name:?}"),
                });
            }
            section = name.to_string();
            continue;
        }
        let (k, v) = content.split_once('=').ok_or_else(|| ConfigError::Syntax {
            line,
            msg: format!("expected `key = value`, got {content:?}"),
        })?;
        let k = k.trim();
        if k.is_empty() || !k.split('.').all(is_ident) {
            return Err(ConfigError::Syntax {
                line,
                msg: format!("bad key {k:?}"),
            });
        }
        let key = if section.is_empty() {
            k.to_string()
        } else {
            format!("{section}.{k}")
        };
        if !KEYS.contains(&key.as_str()) {
            return Err(ConfigError::UnknownKey { line, key });
        }
        if let Some(prev) = entries.get(&key) {
            return Err(ConfigError::Duplicate {
                line,
                key,
                first: prev.line,
            });
        }
        entries.insert(
            key,
            Entry {
                value: v.trim().to_string(),
                line,
            },
        );
    }
    Ok(Doc { entries })
}

fn is_ident(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Doc {
    fn line(&self, key: &str) -> Option<usize> {
        self.entries.get(key).map(|e| e.line)
    }

    fn invalid(&self, key: &str, msg: impl Into<String>) -> ConfigError {
        ConfigError::Invalid {
            key: key.to_string(),
            line: self.line(key),
            msg: msg.into(),
        }
    }

    fn has(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|e| e.value.as_str())
    }

    fn parsed<T: FromStr>(&self, key: &str, what: &str) -> Result<Option<T>> {
        self.raw(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|_| self.invalid(key, format!("expected {what}, got {v:?}")))
            })
            .transpose()
    }

    fn float(&self, key: &str) -> Result<Option<f64>> {
        match self.parsed::<f64>(key, "a number")? {
            Some(v) if !v.is_finite() => Err(self.invalid(key, "must be finite")),
            v => Ok(v),
        }
    }

    fn positive(&self, key: &str) -> Result<Option<f64>> {
        match self.float(key)? {
            Some(v) if v <= 0.0 => Err(self.invalid(key, format!("must be positive, got {v}"))),
            v => Ok(v),
        }
    }

    fn count(&self, key: &str) -> Result<Option<usize>> {
        self.parsed::<usize>(key, "a non-negative integer")
    }

    fn flag(&self, key: &str) -> Result<Option<bool>> {
        self.parsed::<bool>(key, "true or false")
    }

    fn list(&self, key: &str) -> Result<Option<Vec<f64>>> {
        let Some(v) = self.raw(key) else {
            return Ok(None);
        };
        let inner = v
            .strip_prefix('[')
            .and_then(|s| s.strip_suffix(']'))
            .unwrap_or(v);
        let items = inner
            .split(',')
            .map(|t| {
                let t = t.trim();
                t.parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| self.invalid(key, format!("bad list entry {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Some(items))
    }

    fn require<T>(&self, key: &str, v: Option<T>) -> Result<T> {
        v.ok_or_else(|| ConfigError::Missing { key: key.into() })
    }

    fn forbid_unless(&self, keys: &[&str], allowed: bool, why: &str) -> Result<()> {
        for key in keys {
            if !allowed && self.has(key) {
                return Err(self.invalid(key, format!("not used {why}")));
            }
        }
        Ok(())
    }
}

pub fn parse_config_with(text: &str, opts: &ParseOptions) -> Result<RunConfig> {
    let doc = tokenize(text)?;

    let experiment = match (doc.raw("experiment"), opts.experiment) {
        (Some(v), cli) => {
            let e = v
                .parse::<Experiment>()
                .map_err(|m| doc.invalid("experiment", m))?;
            if let Some(c) = cli.filter(|c| *c != e) {
                return Err(doc.invalid(
                    "experiment",
                    format!("document says {} but {} was requested", e.name(), c.name()),
                ));
            }
            e
        }
        (None, Some(c)) => c,
        (None, None) => {
            return Err(ConfigError::Missing {
                key: "experiment".into(),
            })
        }
    };

    let grid = parse_grid(&doc)?;
    let params = PhysicalParams::exponential(
        doc.positive("params.gamma")?.unwrap_or(DEFAULT_GAMMA),
        match doc.float("params.c_nu")? {
            Some(c) if c < 0.0 => return Err(doc.invalid("params.c_nu", "must be non-negative")),
            c => c.unwrap_or(DEFAULT_C_NU),
        },
    )
    .map_err(|e| doc.invalid("params", e.to_string()))?;
    let initial = parse_initial(&doc, &opts.base_dir)?;

    let (lo, hi) = initial.support();
    let margin = 0.5 * (1.0 - INNER_FRACTION) * grid.length();
    if lo < grid.x_min() + margin || hi > grid.x_max() - margin {
        return Err(doc.invalid(
            "initial.kind",
            format!(
                "data supported on [{lo}, {hi}] must lie within the inner {}% [{}, {}] of the domain",
                INNER_FRACTION * 100.0,
                grid.x_min() + margin,
                grid.x_max() - margin
            ),
        ));
    }
    let u0 = initial
        .sample(grid)
        .map_err(|e| doc.invalid("initial.kind", e.to_string()))?;

    let is = |e: Experiment| experiment == e;
    let horizon = doc.require("T", doc.float("T")?)?;
    // a zero horizon only makes sense for simulate: the initial snapshot
    if horizon < 0.0 || (horizon == 0.0 && !is(Experiment::Simulate)) {
        return Err(doc.invalid("T", format!("must be positive, got {horizon}")));
    }

    doc.forbid_unless(
        &["dt_list", "compare_reference"],
        is(Experiment::Converge),
        "outside converge",
    )?;
    doc.forbid_unless(
        &["dt"],
        !is(Experiment::Converge),
        "by converge; use dt_list",
    )?;
    doc.forbid_unless(
        &["record_every", "scheme"],
        is(Experiment::Simulate),
        "outside simulate",
    )?;
    doc.forbid_unless(
        &["p_list", "snapshots"],
        is(Experiment::Asymptote),
        "outside asymptote",
    )?;

    let (dt, dt_list) = if is(Experiment::Converge) {
        let list = doc.require("dt_list", doc.list("dt_list")?)?;
        if list.len() < 2 {
            return Err(doc.invalid("dt_list", "needs at least two steps"));
        }
        if list.iter().any(|&d| d <= 0.0) {
            return Err(doc.invalid("dt_list", "steps must be positive"));
        }
        if list.windows(2).any(|w| w[1] >= w[0]) {
            return Err(doc.invalid("dt_list", "must be strictly decreasing"));
        }
        (None, list)
    } else {
        (Some(doc.require("dt", doc.positive("dt")?)?), Vec::new())
    };

    let steps: Vec<(&str, f64)> = match dt {
        Some(d) => vec![("dt", d)],
        None => dt_list.iter().map(|&d| ("dt_list", d)).collect(),
    };
    let max_dt = cfl_max_dt(&params, &grid, u0.max_abs());
    for &(key, d) in &steps {
        SplitSchedule::to_horizon(horizon, d).map_err(|e| doc.invalid(key, e.to_string()))?;
        if d > max_dt {
            return Err(doc.invalid(
                key,
                format!(
                    "step {d} exceeds the stability limit {max_dt:.6} for max|u0| = {}",
                    u0.max_abs()
                ),
            ));
        }
    }
    // dt_list[0] is the largest; the study also runs dt/2, always admissible

    let scheme = match doc.raw("scheme") {
        None | Some("split") => SchemeChoice::Split,
        Some("reference") => SchemeChoice::Reference,
        Some(v) => {
            return Err(doc.invalid("scheme", format!("expected split or reference, got {v:?}")))
        }
    };
    let compare_reference = doc.flag("compare_reference")?.unwrap_or(false);
    let uses_reference =
        scheme == SchemeChoice::Reference || compare_reference || is(Experiment::Verify);
    if uses_reference {
        for &(key, d) in &steps {
            if params.c_nu() * d > 1.0 {
                return Err(doc.invalid(key, "reference solver needs c_nu * dt <= 1"));
            }
        }
    }

    let options = SchemeOptions {
        mixed_term: if doc.flag("cn.literal_denominator")?.unwrap_or(false) {
            MixedTerm::Literal
        } else {
            MixedTerm::Centered
        },
        balance: match doc.raw("reference.balance") {
            None | Some("mass") => NonlocalBalance::DiscreteKernelMass,
            Some("unit") => NonlocalBalance::Unit,
            Some(v) => {
                return Err(doc.invalid(
                    "reference.balance",
                    format!("expected mass or unit, got {v:?}"),
                ))
            }
        },
    };

    let p_list = doc.list("p_list")?.unwrap_or_else(|| vec![1.0, 2.0]);
    if p_list.is_empty() || p_list.iter().any(|&p| p < 1.0) {
        return Err(doc.invalid("p_list", "exponents must be at least 1"));
    }
    let record_every = match doc.count("record_every")? {
        Some(0) => return Err(doc.invalid("record_every", "must be at least 1")),
        r => r,
    };
    let snapshots = match doc.count("snapshots")? {
        Some(n) if n < 2 => return Err(doc.invalid("snapshots", "need at least 2")),
        n => n.unwrap_or(20),
    };
    if is(Experiment::Asymptote) {
        ProfileSpec::for_params(&params, u0.mass())
            .map_err(|e| doc.invalid("initial.kind", e.to_string()))?;
    }

    Ok(RunConfig {
        experiment,
        grid,
        params,
        initial,
        horizon,
        dt,
        dt_list,
        p_list,
        output: doc.raw("output").map(PathBuf::from),
        record_every,
        snapshots,
        scheme,
        compare_reference,
        options,
    })
}

fn parse_grid(doc: &Doc) -> Result<GridSpec> {
    let x_min = doc.float("grid.x_min")?.unwrap_or(-50.0);
    let x_max = doc.float("grid.x_max")?.unwrap_or(50.0);
    if x_max <= x_min {
        return Err(doc.invalid("grid.x_max", format!("must exceed grid.x_min = {x_min}")));
    }
    let grid = match (doc.positive("grid.dx")?, doc.count("grid.n_cells")?) {
        (Some(_), Some(_)) => {
            return Err(doc.invalid("grid.n_cells", "give either grid.dx or grid.n_cells"))
        }
        (None, Some(n)) => GridSpec::new(x_min, x_max, n)
            .map_err(|e| doc.invalid("grid.n_cells", e.to_string()))?,
        (dx, None) => GridSpec::with_spacing(x_min, x_max, dx.unwrap_or(DEFAULT_DX))
            .map_err(|e| doc.invalid("grid.dx", e.to_string()))?,
    };
    Ok(grid)
}

fn parse_initial(doc: &Doc, base: &Path) -> Result<InitialData> {
    let kind = doc.raw("initial.kind").unwrap_or("gaussian");
    let center = doc.float("initial.center")?.unwrap_or(0.0);
    let width = || -> Result<f64> {
        match doc.float("initial.width")? {
            Some(w) if w <= 0.0 => {
                Err(doc.invalid("initial.width", format!("must be positive, got {w}")))
            }
            w => Ok(w.unwrap_or(1.0)),
        }
    };
    let only = |keys: &[&str], kinds: &str| -> Result<()> {
        for k in keys {
            if doc.has(k) {
                return Err(doc.invalid(k, format!("only used with initial.kind = {kinds}")));
            }
        }
        Ok(())
    };
    let data = match kind {
        "gaussian" => {
            only(
                &["initial.height", "initial.file"],
                "box, double_box or samples",
            )?;
            InitialData::Gaussian {
                center,
                width: width()?,
                amplitude: doc.float("initial.amplitude")?.unwrap_or(1.0),
            }
        }
        "box" | "double_box" => {
            only(
                &["initial.amplitude", "initial.file"],
                "gaussian or samples",
            )?;
            let (width, height) = (width()?, doc.float("initial.height")?.unwrap_or(1.0));
            if kind == "box" {
                InitialData::Box {
                    center,
                    width,
                    height,
                }
            } else {
                InitialData::DoubleBox {
                    center,
                    width,
                    height,
                }
            }
        }
        "samples" => {
            only(
                &[
                    "initial.center",
                    "initial.width",
                    "initial.amplitude",
                    "initial.height",
                ],
                "gaussian, box or double_box",
            )?;
            let file = doc.require("initial.file", doc.raw("initial.file"))?;
            read_samples(&base.join(file)).map_err(|msg| doc.invalid("initial.file", msg))?
        }
        other => {
            return Err(doc.invalid(
                "initial.kind",
                format!("expected gaussian, box, double_box or samples, got {other:?}"),
            ))
        }
    };
    data.validate()
        .map_err(|e| doc.invalid("initial.kind", e.to_string()))?;
    Ok(data)
}

fn read_samples(path: &Path) -> std::result::Result<InitialData, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let mut points = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let nums: Vec<f64> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| format!("{}:{}: expected two numbers", path.display(), i + 1))?;
        match nums[..] {
            [x, u] => points.push((x, u)),
            _ => {
                return Err(format!(
                    "{}:{}: expected two numbers",
                    path.display(),
                    i + 1
                ))
            }
        }
    }
    Ok(InitialData::Samples(points))
}

impl fmt::Display for SchemeChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SchemeChoice::Split => "split",
            SchemeChoice::Reference => "reference",
        })
    }
}
