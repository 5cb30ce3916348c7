//! Run configuration files.
//!
//! Flat UTF-8 text, one `key = value` per line, `#` starts a comment.
//! Nesting uses dotted keys (`grid.nx = 64`, `params.gamma = -2.0`).
//! Power-series terms are written `g.term.2.1 = 1.0`, the coefficient of
//! `u^2 (u*)^1`; complex values may be given as `1.5-0.5i`. The full key
//! list is in the README.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_complex::Complex64;

use crate::diagnostics::DEFAULT_LEAK_THRESHOLD;
use crate::ds2::DS2Params;
use crate::error::{Error, Result};
use crate::general::{
    GeneralSystemSpec, Polynomial, PowerSeries, SecondOrderOperator, DEFAULT_MAX_DEGREE,
};
use crate::snapshot::read_snapshot_expecting;
use crate::spectral::{FieldN, GridN, SobolevExponent, AXIS_NAMES};
use crate::stepper::PicardConfig;

/// Which subcommand the configuration is being used for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Run,
    EstimateT,
    Sweep,
    Validate,
}

#[derive(Debug, Clone, PartialEq)]
pub enum System {
    Ds2(DS2Params),
    General(GeneralSystemSpec),
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialCondition {
    /// `A exp(-sum ((x_i - c_i) / s_i)^2)`
    Gaussian {
        amplitude: Complex64,
        widths: Vec<f64>,
        center: Vec<f64>,
    },
    /// `A exp(i k . x)` at signed mode numbers.
    PlaneWave {
        amplitude: Complex64,
        modes: Vec<isize>,
    },
    /// `A exp(-((|x| - r0) / w)^2)`
    Ring {
        amplitude: Complex64,
        radius: f64,
        width: f64,
    },
    Snapshot(PathBuf),
}

impl InitialCondition {
    /// Coefficients of the initial field on `grid`.
    pub fn build(&self, grid: &GridN) -> Result<FieldN> {
        let points = grid.points();
        let n = grid.dim();
        let values: Vec<Complex64> = match self {
            InitialCondition::Gaussian {
                amplitude,
                widths,
                center,
            } => points
                .iter()
                .map(|x| {
                    let r2: f64 = (0..n)
                        .map(|i| ((x[i] - center[i]) / widths[i]).powi(2))
                        .sum();
                    amplitude * (-r2).exp()
                })
                .collect(),
            InitialCondition::PlaneWave { amplitude, modes } => {
                let mut coeffs = vec![Complex64::new(0.0, 0.0); grid.len()];
                coeffs[grid.mode_index(modes)] = *amplitude;
                return FieldN::new(grid.clone(), coeffs);
            }
            InitialCondition::Ring {
                amplitude,
                radius,
                width,
            } => points
                .iter()
                .map(|x| {
                    let r = (0..n).map(|i| x[i] * x[i]).sum::<f64>().sqrt();
                    amplitude * (-((r - radius) / width).powi(2)).exp()
                })
                .collect(),
            InitialCondition::Snapshot(path) => {
                if n != 2 {
                    return Err(Error::config("init", "snapshots hold 2-D fields only"));
                }
                let shape = (grid.shape()[0], grid.shape()[1]);
                let (field, _) = read_snapshot_expecting(path, shape)?;
                if field.grid().to_nd() != *grid {
                    return Err(Error::config(
                        "init",
                        "snapshot period lengths differ from grid.lx/grid.ly",
                    ));
                }
                return Ok(field.into());
            }
        };
        FieldN::from_physical(grid.clone(), &values)
    }

    fn describe(&self) -> String {
        let join = |v: &[f64]| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(", ")
        };
        match self {
            InitialCondition::Gaussian {
                amplitude,
                widths,
                center,
            } => format!(
                "gaussian({}, {}, {})",
                fmt_complex(*amplitude),
                join(widths),
                join(center)
            ),
            InitialCondition::PlaneWave { amplitude, modes } => format!(
                "plane_wave({}, {})",
                fmt_complex(*amplitude),
                modes
                    .iter()
                    .map(|m| m.to_string())
                    .collect::<Vec<_>>()
                    .join(", ")
            ),
            InitialCondition::Ring {
                amplitude,
                radius,
                width,
            } => format!("ring({}, {radius}, {width})", fmt_complex(*amplitude)),
            InitialCondition::Snapshot(p) => format!("snapshot({})", p.display()),
        }
    }
}

/// A validated configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub mode: Mode,
    pub grid: GridN,
    pub system: System,
    pub init: InitialCondition,
    pub dt: f64,
    pub t_end: f64,
    pub picard: PicardConfig,
    pub output_dir: PathBuf,
    /// Steps between snapshots; 0 disables periodic snapshots.
    pub snapshot_every: usize,
    pub images: bool,
    pub t_max: f64,
    pub leak_threshold: f64,
    /// `(key, values)` overrides expanded by `sweep`.
    pub sweep: Vec<(String, Vec<String>)>,
    pub jobs: usize,
    /// Raw entries without sweep keys, used to derive sweep members.
    base: BTreeMap<String, String>,
    normalized: BTreeMap<String, String>,
}

/// Parse `key = value` lines. Keys must be unique.
pub fn parse_entries(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::config(
                format!("line {}", lineno + 1),
                format!("expected `key = value`, got `{line}`"),
            )
        })?;
        let key = key.trim();
        if key.is_empty() {
            return Err(Error::config(format!("line {}", lineno + 1), "empty key"));
        }
        if map
            .insert(key.to_string(), value.trim().to_string())
            .is_some()
        {
            return Err(Error::config(key, "duplicate key"));
        }
    }
    Ok(map)
}

/// Parse `re`, `re+imi`, `re-imi` or `imi`.
pub fn parse_complex(s: &str) -> Option<Complex64> {
    let s = s.trim();
    if let Ok(re) = s.parse::<f64>() {
        return Some(Complex64::new(re, 0.0));
    }
    let body = s.strip_suffix('i')?;
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let imag = |t: &str| -> Option<f64> {
        match t {
            "" | "+" => Some(1.0),
            "-" => Some(-1.0),
            _ => t.parse().ok(),
        }
    };
    match split {
        Some(i) => Some(Complex64::new(
            body[..i].trim().parse().ok()?,
            imag(body[i..].trim())?,
        )),
        None => Some(Complex64::new(0.0, imag(body)?)),
    }
}

fn fmt_complex(c: Complex64) -> String {
    if c.im == 0.0 {
        format!("{}", c.re)
    } else if c.im < 0.0 {
        format!("{}{}i", c.re, c.im)
    } else {
        format!("{}+{}i", c.re, c.im)
    }
}

/// Tracks which keys were read and their effective values.
struct Reader<'a> {
    entries: &'a BTreeMap<String, String>,
    used: BTreeSet<String>,
    effective: BTreeMap<String, String>,
}

impl<'a> Reader<'a> {
    fn new(entries: &'a BTreeMap<String, String>) -> Self {
        Reader {
            entries,
            used: BTreeSet::new(),
            effective: BTreeMap::new(),
        }
    }

    fn raw(&mut self, key: &str) -> Option<&'a str> {
        let v = self.entries.get(key)?;
        self.used.insert(key.to_string());
        Some(v.as_str())
    }

    fn parsed<T>(&mut self, key: &str, default: Option<T>) -> Result<T>
    where
        T: FromStr + Display,
    {
        let value = match self.raw(key) {
            Some(s) => s
                .parse::<T>()
                .map_err(|_| Error::config(key, format!("cannot parse `{s}`")))?,
            None => default.ok_or_else(|| Error::config(key, "required key is missing"))?,
        };
        self.effective.insert(key.to_string(), value.to_string());
        Ok(value)
    }

    fn complex(&mut self, key: &str) -> Result<Complex64> {
        let s = self.raw(key).expect("caller checked presence");
        let c = parse_complex(s)
            .ok_or_else(|| Error::config(key, format!("cannot parse complex value `{s}`")))?;
        self.effective.insert(key.to_string(), fmt_complex(c));
        Ok(c)
    }

    /// Keys under `prefix.` in sorted order.
    fn keys_with_prefix(&self, prefix: &str) -> Vec<String> {
        let dotted = format!("{prefix}.");
        self.entries
            .keys()
            .filter(|k| k.starts_with(&dotted))
            .cloned()
            .collect()
    }

    fn finish(self) -> Result<BTreeMap<String, String>> {
        if let Some(k) = self.entries.keys().find(|k| !self.used.contains(*k)) {
            return Err(Error::config(k.as_str(), "unknown key"));
        }
        Ok(self.effective)
    }
}

fn parse_exponents(key: &str, rest: &str) -> Result<Vec<u32>> {
    rest.split('.')
        .map(|e| {
            e.parse::<u32>()
                .map_err(|_| Error::config(key, format!("bad exponent `{e}`")))
        })
        .collect()
}

fn read_series(r: &mut Reader, prefix: &str) -> Result<PowerSeries> {
    let mut terms = Vec::new();
    for key in r.keys_with_prefix(&format!("{prefix}.term")) {
        let rest = &key[prefix.len() + ".term.".len()..];
        let exps = parse_exponents(&key, rest)?;
        if exps.len() != 2 {
            return Err(Error::config(
                key.as_str(),
                "series terms need two exponents: .term.<a>.<b>",
            ));
        }
        terms.push(((exps[0], exps[1]), r.complex(&key)?));
    }
    Ok(PowerSeries::new(terms))
}

fn axis_index(key: &str, name: char, n: usize) -> Result<usize> {
    AXIS_NAMES[..n]
        .iter()
        .position(|a| a.starts_with(name))
        .ok_or_else(|| Error::config(key, format!("axis `{name}` not available for n = {n}")))
}

fn parse_call(key: &str, s: &str) -> Result<(String, Vec<String>)> {
    let open = s
        .find('(')
        .ok_or_else(|| Error::config(key, format!("expected `name(args)`, got `{s}`")))?;
    let inner = s[open + 1..]
        .strip_suffix(')')
        .ok_or_else(|| Error::config(key, "missing closing parenthesis"))?;
    let args = if inner.trim().is_empty() {
        Vec::new()
    } else {
        inner.split(',').map(|a| a.trim().to_string()).collect()
    };
    Ok((s[..open].trim().to_string(), args))
}

fn parse_initial(key: &str, s: &str, n: usize, base_dir: &Path) -> Result<InitialCondition> {
    let (name, args) = parse_call(key, s)?;
    let real = |a: &str| -> Result<f64> {
        a.parse::<f64>()
            .map_err(|_| Error::config(key, format!("cannot parse `{a}` as a number")))
    };
    let amplitude = |args: &[String]| -> Result<Complex64> {
        let a = args
            .first()
            .ok_or_else(|| Error::config(key, "missing amplitude"))?;
        parse_complex(a).ok_or_else(|| Error::config(key, format!("bad amplitude `{a}`")))
    };
    let arity = |want: usize| -> Result<()> {
        if args.len() == want {
            Ok(())
        } else {
            Err(Error::config(
                key,
                format!(
                    "{name} takes {want} arguments in {n} dimensions, got {}",
                    args.len()
                ),
            ))
        }
    };
    match name.as_str() {
        "gaussian" => {
            arity(1 + 2 * n)?;
            let widths = args[1..=n]
                .iter()
                .map(|a| real(a))
                .collect::<Result<Vec<_>>>()?;
            let center = args[n + 1..]
                .iter()
                .map(|a| real(a))
                .collect::<Result<Vec<_>>>()?;
            if widths.iter().any(|w| !(*w > 0.0)) {
                return Err(Error::config(key, "gaussian widths must be positive"));
            }
            Ok(InitialCondition::Gaussian {
                amplitude: amplitude(&args)?,
                widths,
                center,
            })
        }
        "plane_wave" => {
            arity(1 + n)?;
            let modes = args[1..]
                .iter()
                .map(|a| {
                    a.parse::<isize>()
                        .map_err(|_| Error::config(key, format!("mode `{a}` is not an integer")))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(InitialCondition::PlaneWave {
                amplitude: amplitude(&args)?,
                modes,
            })
        }
        "ring" => {
            arity(3)?;
            let width = real(&args[2])?;
            if !(width > 0.0) {
                return Err(Error::config(key, "ring width must be positive"));
            }
            Ok(InitialCondition::Ring {
                amplitude: amplitude(&args)?,
                radius: real(&args[1])?,
                width,
            })
        }
        "snapshot" => {
            arity(1)?;
            let p = PathBuf::from(&args[0]);
            Ok(InitialCondition::Snapshot(if p.is_absolute() {
                p
            } else {
                base_dir.join(p)
            }))
        }
        other => Err(Error::config(
            key,
            format!("unknown initial condition `{other}` (gaussian, plane_wave, ring, snapshot)"),
        )),
    }
}

impl RunConfig {
    pub fn from_str(text: &str, mode: Mode, base_dir: &Path) -> Result<Self> {
        let entries = parse_entries(text)?;
        Self::from_entries(entries, mode, base_dir)
    }

    pub fn from_file(path: impl AsRef<Path>, mode: Mode) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_str(&text, mode, base)
    }

    pub fn from_entries(
        entries: BTreeMap<String, String>,
        mode: Mode,
        base_dir: &Path,
    ) -> Result<Self> {
        let mut sweep = Vec::new();
        let mut base = BTreeMap::new();
        let mut jobs_raw = None;
        for (k, v) in entries {
            if k == "sweep.jobs" {
                jobs_raw = Some(v);
            } else if let Some(target) = k.strip_prefix("sweep.") {
                let values: Vec<String> = v
                    .split(';')
                    .map(|s| s.trim().to_string())
                    .filter(|s| !s.is_empty())
                    .collect();
                if values.is_empty() {
                    return Err(Error::config(k.as_str(), "no sweep values"));
                }
                sweep.push((target.to_string(), values));
            } else {
                base.insert(k, v);
            }
        }
        let jobs = match jobs_raw {
            Some(v) => v.parse::<usize>().ok().filter(|j| *j > 0).ok_or_else(|| {
                Error::config(
                    "sweep.jobs",
                    format!("expected a positive integer, got `{v}`"),
                )
            })?,
            None => 1,
        };

        let mut r = Reader::new(&base);
        let system_name: String = r.parsed("system", Some("ds2".to_string()))?;
        let n = match system_name.as_str() {
            "ds2" => 2,
            "general" => r.parsed("general.n", Some(2usize))?,
            other => {
                return Err(Error::config(
                    "system",
                    format!("expected `ds2` or `general`, got `{other}`"),
                ))
            }
        };
        if !(1..=3).contains(&n) {
            return Err(Error::config(
                "general.n",
                format!("must be 1, 2 or 3, got {n}"),
            ));
        }

        let mut shape = Vec::new();
        let mut lengths = Vec::new();
        for axis in 0..n {
            let name = AXIS_NAMES[axis];
            let (nk, lk) = (format!("grid.n{name}"), format!("grid.l{name}"));
            let size: usize = if axis == 0 {
                r.parsed(&nk, None)?
            } else {
                r.parsed(&nk, Some(shape[0]))?
            };
            let length: f64 = if axis == 0 {
                r.parsed(&lk, Some(2.0 * PI))?
            } else {
                r.parsed(&lk, Some(lengths[0]))?
            };
            shape.push(size);
            lengths.push(length);
        }
        let grid = GridN::new(shape, lengths)?;

        let p_default = if system_name == "ds2" {
            1.5
        } else {
            n as f64 / 2.0 + 0.5
        };
        let p = SobolevExponent::new(r.parsed("params.p", Some(p_default))?)?;

        let system = if system_name == "ds2" {
            let gamma = r.parsed("params.gamma", Some(0.0))?;
            let lambda = r.parsed("params.lambda", Some(0.0))?;
            let mu = r.parsed("params.mu", Some(0.0))?;
            let dealias = r.parsed("params.dealias", Some(false))?;
            System::Ds2(DS2Params::new(gamma, lambda, mu, p.value())?.with_dealias(dealias))
        } else {
            let max_degree = r.parsed("general.max_degree", Some(DEFAULT_MAX_DEGREE))?;
            let mut omega_terms = Vec::new();
            for key in r.keys_with_prefix("omega.term") {
                let exps = parse_exponents(&key, &key["omega.term.".len()..])?;
                if exps.len() != n {
                    return Err(Error::config(
                        key.as_str(),
                        format!("need {n} exponents for an n = {n} polynomial"),
                    ));
                }
                let c = r.complex(&key)?;
                if c.im != 0.0 {
                    return Err(Error::config(
                        key.as_str(),
                        "dispersion coefficients must be real",
                    ));
                }
                omega_terms.push((exps, c.re));
            }
            let mut p_op = SecondOrderOperator::default();
            let op_keys = r.keys_with_prefix("p_op");
            if op_keys.is_empty() {
                p_op = SecondOrderOperator::laplacian(n);
            }
            for key in op_keys {
                let rest = &key["p_op.".len()..];
                let value: f64 = r.parsed(&key, None)?;
                let chars: Vec<char> = rest.chars().collect();
                match chars.as_slice() {
                    ['c'] => p_op.c = value,
                    ['b', '.', i] => p_op.b[axis_index(&key, *i, n)?] = value,
                    ['a', '.', i, j] => {
                        p_op.a[axis_index(&key, *i, n)?][axis_index(&key, *j, n)?] = value
                    }
                    _ => {
                        return Err(Error::config(
                            key.as_str(),
                            "expected p_op.a.<ij>, p_op.b.<i> or p_op.c",
                        ))
                    }
                }
            }
            let g = read_series(&mut r, "g")?;
            let mut f_bar = Vec::new();
            let mut h_bar = Vec::new();
            for name in &AXIS_NAMES[..n] {
                f_bar.push(read_series(&mut r, &format!("f_bar.{name}"))?);
                h_bar.push(read_series(&mut r, &format!("h_bar.{name}"))?);
            }
            let spec = GeneralSystemSpec {
                n,
                omega: Polynomial::new(omega_terms),
                p_op,
                g,
                f_bar,
                h_bar,
                p,
                max_degree,
            };
            spec.validate()?;
            // lattice checks (ellipticity) happen here so `validate` catches them
            crate::general::GeneralModel::new(spec.clone(), grid.clone())?;
            System::General(spec)
        };

        let init_raw = r
            .raw("init")
            .ok_or_else(|| Error::config("init", "required key is missing"))?;
        let init = parse_initial("init", init_raw, n, base_dir)?;
        r.effective.insert("init".into(), init.describe());

        let dt = r.parsed("time.dt", Some(0.005))?;
        let t_end = r.parsed("time.t_end", Some(0.1))?;
        for (key, v) in [("time.dt", dt), ("time.t_end", t_end)] {
            if !(v > 0.0 && f64::is_finite(v)) {
                return Err(Error::config(key, format!("must be positive, got {v}")));
            }
        }
        let defaults = PicardConfig::default();
        let picard = PicardConfig {
            quad_nodes: r.parsed("picard.quad_nodes", Some(defaults.quad_nodes))?,
            tol: r.parsed("picard.tol", Some(defaults.tol))?,
            theta: r.parsed("picard.theta", Some(defaults.theta))?,
            max_iters: r.parsed("picard.max_iters", Some(defaults.max_iters))?,
            p,
        };
        picard.validate()?;

        let output_dir: String = r.parsed("output.dir", Some("out".to_string()))?;
        let output_dir = {
            let p = PathBuf::from(output_dir);
            if p.is_absolute() {
                p
            } else {
                base_dir.join(p)
            }
        };
        let snapshot_every = r.parsed("output.snapshot_every", Some(0usize))?;
        let images = r.parsed("output.images", Some(false))?;
        if n != 2 && (snapshot_every > 0 || images) {
            return Err(Error::config(
                "output.snapshot_every",
                "snapshots and images need a 2-D grid",
            ));
        }
        let t_max = r.parsed("estimate.t_max", Some(1.0))?;
        if !(t_max > 0.0 && f64::is_finite(t_max)) {
            return Err(Error::config("estimate.t_max", "must be positive"));
        }
        let leak_threshold =
            r.parsed("diagnostics.leak_threshold", Some(DEFAULT_LEAK_THRESHOLD))?;

        let mut normalized = r.finish()?;
        for (k, values) in &sweep {
            normalized.insert(format!("sweep.{k}"), values.join("; "));
        }
        if !sweep.is_empty() {
            normalized.insert("sweep.jobs".into(), jobs.to_string());
        }
        if mode == Mode::Sweep && sweep.is_empty() {
            return Err(Error::config("sweep", "no `sweep.<key>` entries"));
        }

        Ok(RunConfig {
            mode,
            grid,
            system,
            init,
            dt,
            t_end,
            picard,
            output_dir,
            snapshot_every,
            images,
            t_max,
            leak_threshold,
            sweep,
            jobs,
            base,
            normalized,
        })
    }

    /// Canonical `key = value` text with defaults filled in, sorted by key.
    pub fn normalized(&self) -> String {
        self.normalized
            .iter()
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }

    /// Sobolev exponent for norms and contraction checks.
    pub fn p(&self) -> SobolevExponent {
        self.picard.p
    }

    pub fn initial_field(&self) -> Result<FieldN> {
        self.init.build(&self.grid)
    }

    /// Expand the sweep into one configuration per override combination,
    /// each writing to `output_dir/run_NNN`. Returns `(overrides, config)`.
    pub fn sweep_members(
        &self,
        base_dir: &Path,
    ) -> Result<Vec<(Vec<(String, String)>, RunConfig)>> {
        let mut combos: Vec<Vec<(String, String)>> = vec![Vec::new()];
        for (key, values) in &self.sweep {
            let mut next = Vec::with_capacity(combos.len() * values.len());
            for combo in &combos {
                for v in values {
                    let mut c = combo.clone();
                    c.push((key.clone(), v.clone()));
                    next.push(c);
                }
            }
            combos = next;
        }
        combos
            .into_iter()
            .enumerate()
            .map(|(idx, overrides)| {
                let mut entries = self.base.clone();
                for (k, v) in &overrides {
                    entries.insert(k.clone(), v.clone());
                }
                let dir = self.output_dir.join(format!("run_{idx:03}"));
                entries.insert("output.dir".into(), dir.display().to_string());
                let cfg = RunConfig::from_entries(entries, Mode::Run, base_dir)?;
                Ok((overrides, cfg))
            })
            .collect()
    }
}
