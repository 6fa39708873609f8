//! Sweep specifications, point evaluation and CSV emission.

use std::fmt::Write as _;
use std::str::FromStr;

use photon_dimer::lindblad::{steady_correlation, DriveSettings, FockBasis};
use photon_dimer::model::{two_excitation_eigensystem, validate};
use photon_dimer::observables::{
    bound_weight, excitation_amplitudes, g2_coherent, g2_transmitted, scattering_probabilities,
    BoundWeightBox, Diagnostics, DkMode, OutputState,
};
use photon_dimer::single_photon::scatter1;
use photon_dimer::two_photon::s_bound;
use photon_dimer::wavepackets::{
    initial_g2, overlap_m2, CoherentInput, PulseProfile, Shape, TwoPhotonInput,
};
use photon_dimer::{DimerError, DimerParams, RawParams};
use rayon::prelude::*;

use crate::config::{parse_f64, Config, ConfigError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Observable {
    Scan1,
    Smap,
    Initg2,
    Probs,
    G2,
    Sbar,
    Loss,
    Lindblad,
    Excite,
}

impl Observable {
    pub const ALL: [Observable; 9] = [
        Observable::Scan1,
        Observable::Smap,
        Observable::Initg2,
        Observable::Probs,
        Observable::G2,
        Observable::Sbar,
        Observable::Loss,
        Observable::Lindblad,
        Observable::Excite,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Observable::Scan1 => "scan1",
            Observable::Smap => "smap",
            Observable::Initg2 => "initg2",
            Observable::Probs => "probs",
            Observable::G2 => "g2",
            Observable::Sbar => "sbar",
            Observable::Loss => "loss",
            Observable::Lindblad => "lindblad",
            Observable::Excite => "excite",
        }
    }

    fn columns(self) -> &'static [&'static str] {
        match self {
            Observable::Scan1 => &["re_r", "im_r", "re_t", "im_t", "abs_t2", "abs_r2", "flux"],
            Observable::Smap => &["dp", "abs_srr2"],
            Observable::Initg2 => &["m2", "g2_initial"],
            Observable::Probs => &["p_ll", "p_lr", "p_rr", "flux", "rel_error"],
            Observable::Loss => &["p_ll", "p_lr", "p_rr", "flux", "g2_rr", "rel_error"],
            Observable::G2 => &["g2_rr", "rel_error"],
            Observable::Sbar => &["sbar_rr", "rel_error"],
            Observable::Lindblad => &["n2_occupation", "g2_ss", "residual"],
            Observable::Excite => &["e11", "e12", "e22"],
        }
    }

    fn uses_pulse(self) -> bool {
        matches!(
            self,
            Observable::Initg2 | Observable::Probs | Observable::G2 | Observable::Loss
        )
    }

    fn uses_dk(self) -> bool {
        matches!(
            self,
            Observable::Initg2
                | Observable::Probs
                | Observable::G2
                | Observable::Loss
                | Observable::Excite
                | Observable::Smap
        )
    }
}

impl FromStr for Observable {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Observable::ALL
            .into_iter()
            .find(|o| o.name() == s)
            .ok_or_else(|| format!("unknown observable {s:?}"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepVar {
    Delta,
    U,
    Dk,
    Gamma,
}

impl SweepVar {
    fn column(self) -> &'static str {
        match self {
            SweepVar::Delta => "delta",
            SweepVar::U => "u",
            SweepVar::Dk => "dk",
            SweepVar::Gamma => "gamma_bath",
        }
    }
}

impl FromStr for SweepVar {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "delta" => Ok(SweepVar::Delta),
            "u" => Ok(SweepVar::U),
            "dk" => Ok(SweepVar::Dk),
            "gamma" | "gamma_bath" => Ok(SweepVar::Gamma),
            _ => Err(format!("expected delta, u, dk or gamma, found {s:?}")),
        }
    }
}

/// Total detuning: a number or one of the level energies of the current
/// parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DeltaSpec {
    Value(f64),
    Eps2Zero,
    Eps2Minus,
    Eps2Plus,
    /// Twice the lower single-excitation energy.
    Eps1MinusPair,
    /// Twice the upper single-excitation energy.
    Eps1PlusPair,
}

impl DeltaSpec {
    pub fn resolve(self, params: &DimerParams) -> f64 {
        let eig = || two_excitation_eigensystem(params);
        match self {
            DeltaSpec::Value(v) => v,
            DeltaSpec::Eps2Zero => eig().eps2_zero,
            DeltaSpec::Eps2Minus => eig().eps2_minus,
            DeltaSpec::Eps2Plus => eig().eps2_plus,
            DeltaSpec::Eps1MinusPair => 2.0 * eig().eps1_minus,
            DeltaSpec::Eps1PlusPair => 2.0 * eig().eps1_plus,
        }
    }
}

impl FromStr for DeltaSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "eps2_zero" => Ok(DeltaSpec::Eps2Zero),
            "eps2_minus" => Ok(DeltaSpec::Eps2Minus),
            "eps2_plus" => Ok(DeltaSpec::Eps2Plus),
            "2eps1_minus" => Ok(DeltaSpec::Eps1MinusPair),
            "2eps1_plus" => Ok(DeltaSpec::Eps1PlusPair),
            _ => parse_f64(s).map(DeltaSpec::Value).map_err(|_| {
                format!(
                    "expected a number or one of eps2_zero, eps2_minus, eps2_plus, 2eps1_minus, 2eps1_plus, found {s:?}"
                )
            }),
        }
    }
}

fn parse_dk_mode(s: &str) -> Result<DkMode, String> {
    match s {
        "resonant" => Ok(DkMode::Resonant),
        "zero" => Ok(DkMode::Zero),
        _ => parse_f64(s)
            .map(DkMode::Fixed)
            .map_err(|_| format!("expected resonant, zero or a number, found {s:?}")),
    }
}

fn parse_shape(s: &str) -> Result<Shape, String> {
    Shape::from_str(s).map_err(|e| e.to_string())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InputKind {
    Fock,
    Coherent,
}

impl InputKind {
    fn name(self) -> &'static str {
        match self {
            InputKind::Fock => "fock",
            InputKind::Coherent => "coherent",
        }
    }
}

fn parse_input(s: &str) -> Result<InputKind, String> {
    match s {
        "fock" => Ok(InputKind::Fock),
        "coherent" => Ok(InputKind::Coherent),
        _ => Err(format!("expected fock or coherent, found {s:?}")),
    }
}

/// Equally spaced (or log-spaced) sample points.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub n: usize,
    pub log: bool,
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        let last = (self.n - 1) as f64;
        (0..self.n)
            .map(|i| {
                if i == 0 {
                    return self.min;
                }
                if i + 1 == self.n {
                    return self.max;
                }
                let t = i as f64 / last;
                if self.log {
                    (self.min.ln() + t * (self.max.ln() - self.min.ln())).exp()
                } else {
                    self.min + t * (self.max - self.min)
                }
            })
            .collect()
    }
}

/// One curve of a sweep: a choice of every list-valued key.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Series {
    pub u: Option<f64>,
    pub vsq: Option<f64>,
    pub gamma_bath: f64,
    pub shape: Shape,
    pub input: InputKind,
    pub delta: DeltaSpec,
    pub dk_mode: DkMode,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LindbladSettings {
    pub omega: f64,
    /// Site damping; the coupling `vsq` of the series when absent.
    pub gamma: Option<f64>,
    pub n_max: usize,
}

/// Fully resolved sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub observable: Observable,
    pub sweep: SweepVar,
    pub grid: Grid,
    pub base: RawParams,
    pub series: Vec<Series>,
    pub sigma: f64,
    pub nbar: f64,
    pub z1: f64,
    pub z2: f64,
    /// Half-width of the (dk, dp) box for `sbar` and `smap`.
    pub box_half: f64,
    pub lindblad: LindbladSettings,
}

fn single<T: Copy>(
    cfg: &Config,
    key: &str,
    items: Option<Vec<T>>,
    default: T,
) -> Result<T, ConfigError> {
    match items {
        None => Ok(default),
        Some(v) if v.len() == 1 => Ok(v[0]),
        Some(_) => Err(cfg.error(key, "expected a single value")),
    }
}

fn list_or<T: Copy>(items: Option<Vec<T>>, default: T) -> Vec<T> {
    items.unwrap_or_else(|| vec![default])
}

fn positive(cfg: &Config, key: &str, x: f64) -> Result<f64, ConfigError> {
    if x > 0.0 {
        Ok(x)
    } else {
        Err(cfg.error(key, "must be positive"))
    }
}

impl SweepSpec {
    /// Builds the sweep for `observable` from a configuration. An
    /// `observable` key in the configuration must agree with the subcommand.
    pub fn from_config(observable: Observable, cfg: &Config) -> Result<Self, ConfigError> {
        if let Some(name) = cfg.raw("observable") {
            let o: Observable = name
                .parse()
                .map_err(|e: String| cfg.error("observable", e))?;
            if o != observable {
                return Err(cfg.error(
                    "observable",
                    format!(
                        "configuration is for `{}`, not `{}`",
                        o.name(),
                        observable.name()
                    ),
                ));
            }
        }

        let sweep = match observable {
            Observable::Scan1 | Observable::Smap => SweepVar::Delta,
            Observable::Initg2 if !cfg.contains("sweep") => SweepVar::Dk,
            _ => single(
                cfg,
                "sweep",
                cfg.parse_with("sweep", |s| s.parse())?,
                SweepVar::Delta,
            )?,
        };
        if sweep == SweepVar::Dk && cfg.contains("dk_mode") {
            return Err(cfg.error("dk_mode", "cannot be combined with a dk sweep"));
        }
        if matches!(observable, Observable::Sbar | Observable::Lindblad) && sweep == SweepVar::Dk {
            return Err(cfg.error(
                "sweep",
                format!("`{}` does not depend on dk", observable.name()),
            ));
        }

        let j = cfg.f64_or("j", 1.0)?;
        let omega1 = cfg.f64_or("omega1", 0.0)?;
        let omega2 = cfg.f64_or("omega2", omega1)?;
        let u1 = cfg.f64_or("u1", 0.0)?;
        let u2 = cfg.f64_or("u2", u1)?;
        let v1 = cfg.f64_or("v1", 0.2)?;
        let v2 = cfg.f64_or("v2", v1)?;
        if cfg.contains("u") && (cfg.contains("u1") || cfg.contains("u2")) {
            return Err(cfg.error("u", "cannot be combined with u1/u2"));
        }
        if cfg.contains("vsq") && (cfg.contains("v1") || cfg.contains("v2")) {
            return Err(cfg.error("vsq", "cannot be combined with v1/v2"));
        }
        let base = RawParams {
            omega1,
            omega2,
            u1,
            u2,
            j_hop: j,
            v1,
            v2,
            gamma_bath: 0.0,
        };
        validate(&base).map_err(|e| cfg.error("j", e.to_string()))?;

        let u_default = if cfg.contains("u1") || cfg.contains("u2") {
            None
        } else {
            Some(0.0)
        };
        let us: Vec<Option<f64>> = match cfg.f64_list("u")? {
            Some(v) => v.into_iter().map(Some).collect(),
            None => vec![u_default],
        };
        let vsq_default = if cfg.contains("v1") || cfg.contains("v2") {
            None
        } else {
            Some(0.04)
        };
        let vsqs: Vec<Option<f64>> = match cfg.f64_list("vsq")? {
            Some(v) => v
                .into_iter()
                .map(|x| positive(cfg, "vsq", x).map(Some))
                .collect::<Result<_, _>>()?,
            None => vec![vsq_default],
        };
        let gammas = list_or(cfg.f64_list("gamma_bath")?, 0.0);
        if gammas.iter().any(|&g| g < 0.0) {
            return Err(cfg.error("gamma_bath", "must be non-negative"));
        }
        let shapes = list_or(cfg.parse_with("shape", parse_shape)?, Shape::Gaussian);
        let inputs = list_or(cfg.parse_with("input", parse_input)?, InputKind::Fock);
        let deltas = list_or(
            cfg.parse_with("delta", |s| s.parse())?,
            DeltaSpec::Value(0.0),
        );
        let dk_default = match observable {
            Observable::Initg2 | Observable::Smap => DkMode::Zero,
            _ => DkMode::Resonant,
        };
        let dk_modes = list_or(cfg.parse_with("dk_mode", parse_dk_mode)?, dk_default);

        for (key, swept) in [
            ("u", SweepVar::U),
            ("gamma_bath", SweepVar::Gamma),
            ("delta", SweepVar::Delta),
        ] {
            if sweep == swept && observable != Observable::Smap && cfg.contains(key) {
                return Err(cfg.error(key, "is the sweep variable; set min/max instead"));
            }
        }
        if inputs.contains(&InputKind::Coherent) && observable != Observable::G2 {
            return Err(cfg.error("input", "coherent input is only available for g2"));
        }

        let mut series = Vec::new();
        for &u in &us {
            for &vsq in &vsqs {
                for &gamma_bath in &gammas {
                    for &shape in &shapes {
                        for &input in &inputs {
                            for &delta in &deltas {
                                for &dk_mode in &dk_modes {
                                    series.push(Series {
                                        u,
                                        vsq,
                                        gamma_bath,
                                        shape,
                                        input,
                                        delta,
                                        dk_mode,
                                    });
                                }
                            }
                        }
                    }
                }
            }
        }

        let sigma = positive(cfg, "sigma", cfg.f64_or("sigma", 0.005)?)?;
        let grid = match observable {
            Observable::Scan1 => Grid {
                min: cfg.f64_or("emin", -10.0)?,
                max: cfg.f64_or("emax", 10.0)?,
                n: cfg.usize_or("n", 2001)?,
                log: false,
            },
            Observable::Smap => {
                let half = positive(cfg, "box", cfg.f64_or("box", 4.0)?)?;
                Grid {
                    min: -half,
                    max: half,
                    n: cfg.usize_or("n", 101)?,
                    log: false,
                }
            }
            _ => {
                let (min, max, n, log) = match sweep {
                    SweepVar::Delta => (-4.0, 12.0, 241, false),
                    SweepVar::U => (0.1, 50.0, 61, true),
                    SweepVar::Dk if observable == Observable::Initg2 => (
                        cfg.f64_or("dk_min", 0.0)?,
                        cfg.f64_or("dk_max", 20.0 * sigma)?,
                        50,
                        false,
                    ),
                    SweepVar::Dk => (-4.0, 4.0, 161, false),
                    SweepVar::Gamma => (0.0, 0.04, 5, false),
                };
                let log = match cfg.raw("scale") {
                    None => log,
                    Some("linear") => false,
                    Some("log") => true,
                    Some(other) => {
                        return Err(
                            cfg.error("scale", format!("expected linear or log, found {other:?}"))
                        )
                    }
                };
                Grid {
                    min: cfg.f64_or("min", min)?,
                    max: cfg.f64_or("max", max)?,
                    n: cfg.usize_or("n", n)?,
                    log,
                }
            }
        };
        let range_key = match observable {
            Observable::Scan1 => "emax",
            Observable::Smap => "box",
            _ => "max",
        };
        if grid.n < 2 {
            return Err(cfg.error("n", "must be at least 2"));
        }
        if !(grid.min < grid.max) {
            return Err(cfg.error(range_key, "range must satisfy min < max"));
        }
        if grid.log && grid.min <= 0.0 {
            return Err(cfg.error("min", "log grids need a positive lower bound"));
        }
        if sweep == SweepVar::Gamma && grid.min < 0.0 {
            return Err(cfg.error("min", "gamma_bath must be non-negative"));
        }

        let nbar = cfg.f64_or("nbar", 0.001)?;
        if !(nbar > 0.0 && nbar <= 0.01) {
            return Err(cfg.error("nbar", "must lie in (0, 0.01]"));
        }
        let lindblad = LindbladSettings {
            omega: positive(cfg, "omega", cfg.f64_or("omega", 2e-4)?)?,
            gamma: match cfg.f64_list("gamma")? {
                None => None,
                Some(v) if v.len() == 1 => Some(positive(cfg, "gamma", v[0])?),
                Some(_) => return Err(cfg.error("gamma", "expected a single value")),
            },
            n_max: cfg.usize_or("nmax", 4)?,
        };
        if lindblad.n_max < 2 {
            return Err(cfg.error("nmax", "must be at least 2"));
        }

        Ok(SweepSpec {
            observable,
            sweep,
            grid,
            base,
            series,
            sigma,
            nbar,
            z1: cfg.f64_or("z1", 0.0)?,
            z2: cfg.f64_or("z2", 0.0)?,
            box_half: positive(cfg, "box", cfg.f64_or("box", 8.0)?)?,
            lindblad,
        })
    }

    fn raw_params(&self, s: &Series, x: f64) -> RawParams {
        let mut raw = self.base;
        if let Some(u) = s.u {
            raw.u1 = u;
            raw.u2 = u;
        }
        if let Some(v) = s.vsq {
            raw.v1 = v.sqrt();
            raw.v2 = raw.v1;
        }
        raw.gamma_bath = s.gamma_bath;
        match self.sweep {
            SweepVar::U => {
                raw.u1 = x;
                raw.u2 = x;
            }
            SweepVar::Gamma => raw.gamma_bath = x,
            _ => {}
        }
        raw
    }

    fn symmetric(&self) -> bool {
        self.series.iter().all(|s| {
            let r = self.raw_params(s, self.grid.min);
            r.u1 == r.u2 && r.v1 == r.v2
        })
    }

    /// Number of output rows.
    pub fn len(&self) -> usize {
        let per = match self.observable {
            Observable::Smap => self.grid.n * self.grid.n,
            _ => self.grid.n,
        };
        per * self.series.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Cell {
    Num(f64),
    Text(&'static str),
    Empty,
}

/// Shortest round-trip decimal, switching to exponent form outside
/// `[1e-4, 1e6)`.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    let a = x.abs();
    if x == 0.0 {
        "0".into()
    } else if (1e-4..1e6).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// One evaluated row with the status of its evaluation.
#[derive(Clone, Debug, PartialEq)]
pub struct RowStatus {
    pub warning: Option<String>,
    pub flagged: bool,
}

/// Result of a sweep: CSV text plus per-row status.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<String>,
    pub status: Vec<RowStatus>,
}

impl Table {
    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for r in &self.rows {
            out.push_str(r);
            out.push('\n');
        }
        out
    }

    pub fn warnings(&self) -> impl Iterator<Item = (usize, &str)> {
        self.status
            .iter()
            .enumerate()
            .filter_map(|(i, s)| s.warning.as_deref().map(|w| (i, w)))
    }

    /// True when every point evaluated without warnings or flags.
    pub fn clean(&self) -> bool {
        self.status
            .iter()
            .all(|s| s.warning.is_none() && !s.flagged)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("invalid parameters at row {row}: {source}")]
    Params { row: usize, source: DimerError },
    #[error("thread pool: {0}")]
    Pool(String),
}

struct Point {
    series: usize,
    x: f64,
    y: f64,
}

struct Evaluated {
    cells: Vec<Cell>,
    status: RowStatus,
}

fn context_columns(spec: &SweepSpec) -> Vec<&'static str> {
    let o = spec.observable;
    // single photons have an energy, not a pair detuning
    let mut cols = if o == Observable::Scan1 {
        vec![]
    } else {
        vec!["delta"]
    };
    if o.uses_dk() {
        cols.push("dk");
    }
    if spec.symmetric() {
        cols.extend(["u", "vsq"]);
    } else {
        cols.extend(["u1", "u2", "v1", "v2"]);
    }
    cols.push("gamma_bath");
    if o.uses_pulse() {
        cols.extend(["shape", "sigma"]);
    }
    if o == Observable::G2 {
        cols.push("input");
    }
    if o == Observable::Lindblad {
        cols.extend(["omega", "gamma", "nmax"]);
    }
    cols
}

fn leading_column(spec: &SweepSpec) -> &'static str {
    match spec.observable {
        Observable::Scan1 => "E",
        Observable::Smap => "dk",
        _ => spec.sweep.column(),
    }
}

pub fn header(spec: &SweepSpec) -> Vec<String> {
    let lead = leading_column(spec);
    let mut h = vec![lead.to_string()];
    h.extend(spec.observable.columns().iter().map(|s| s.to_string()));
    h.extend(
        context_columns(spec)
            .into_iter()
            .filter(|c| *c != lead)
            .map(String::from),
    );
    h
}

fn point_error(e: DimerError, cells: &mut Vec<Cell>, n: usize) -> RowStatus {
    cells.extend(std::iter::repeat_n(Cell::Empty, n));
    RowStatus {
        warning: Some(e.to_string()),
        flagged: false,
    }
}

fn evaluate(spec: &SweepSpec, p: &Point) -> Result<Evaluated, DimerError> {
    let s = &spec.series[p.series];
    let raw = spec.raw_params(s, p.x);
    let params = validate(&raw)?;
    let o = spec.observable;

    let delta = match (o, spec.sweep) {
        (Observable::Scan1 | Observable::Smap, _) => s.delta.resolve(&params),
        (_, SweepVar::Delta) => p.x,
        _ => s.delta.resolve(&params),
    };
    let dk = match (o, spec.sweep) {
        (Observable::Smap, _) => p.x,
        (_, SweepVar::Dk) => p.x,
        _ if o == Observable::G2 && s.input == InputKind::Coherent => 0.0,
        _ => s.dk_mode.resolve(&params, delta),
    };
    let lead = match o {
        Observable::Scan1 | Observable::Smap => p.x,
        _ => match spec.sweep {
            SweepVar::Delta => delta,
            SweepVar::U => p.x,
            SweepVar::Dk => dk,
            SweepVar::Gamma => p.x,
        },
    };

    let ncols = o.columns().len();
    let mut cells = vec![Cell::Num(lead)];
    let mut status = RowStatus {
        warning: None,
        flagged: false,
    };
    let flag = |d: &Diagnostics, status: &mut RowStatus| status.flagged |= d.flagged();

    let result: Result<(), DimerError> = (|| {
        match o {
            Observable::Scan1 => {
                let c = scatter1(&params, p.x);
                cells.extend(
                    [
                        c.r.re,
                        c.r.im,
                        c.t.re,
                        c.t.im,
                        c.t.norm_sqr(),
                        c.r.norm_sqr(),
                        c.flux(),
                    ]
                    .map(Cell::Num),
                );
            }
            Observable::Smap => {
                let (k1, k2) = (0.5 * (delta + p.x), 0.5 * (delta - p.x));
                let (p1, p2) = (0.5 * (delta + p.y), 0.5 * (delta - p.y));
                let (_, rr, _) = s_bound(&params, k1, k2, p1, p2)?;
                cells.extend([Cell::Num(p.y), Cell::Num(rr.norm_sqr())]);
            }
            Observable::Initg2 => {
                let input = TwoPhotonInput::at_detuning(s.shape, delta, dk, spec.sigma)?;
                cells.extend([
                    Cell::Num(overlap_m2(&input)),
                    Cell::Num(initial_g2(&input, spec.z1, spec.z2)),
                ]);
            }
            Observable::Probs => {
                let input = TwoPhotonInput::at_detuning(s.shape, delta, dk, spec.sigma)?;
                let pr = scattering_probabilities(&params, &input)?;
                flag(&pr.diagnostics, &mut status);
                cells.extend(
                    [
                        pr.p_ll,
                        pr.p_lr,
                        pr.p_rr,
                        pr.flux_total,
                        pr.diagnostics.rel_error,
                    ]
                    .map(Cell::Num),
                );
            }
            Observable::Loss => {
                let input = TwoPhotonInput::at_detuning(s.shape, delta, dk, spec.sigma)?;
                let state = OutputState::new(&params, &input)?;
                let pr = state.probabilities();
                flag(&pr.diagnostics, &mut status);
                cells.extend([pr.p_ll, pr.p_lr, pr.p_rr, pr.flux_total].map(Cell::Num));
                match state.g2_transmitted(spec.z1, spec.z2) {
                    Ok(c) => {
                        flag(&c.diagnostics, &mut status);
                        let err = pr.diagnostics.rel_error.max(c.diagnostics.rel_error);
                        cells.extend([Cell::Num(c.value), Cell::Num(err)]);
                    }
                    Err(e @ (DimerError::NoFlux(_) | DimerError::NoSignal(_))) => {
                        status.warning = Some(e.to_string());
                        cells.extend([Cell::Empty, Cell::Num(pr.diagnostics.rel_error)]);
                    }
                    Err(e) => return Err(e),
                }
            }
            Observable::G2 => {
                let c = match s.input {
                    InputKind::Fock => {
                        let input = TwoPhotonInput::at_detuning(s.shape, delta, dk, spec.sigma)?;
                        g2_transmitted(&params, &input, spec.z1, spec.z2)?
                    }
                    InputKind::Coherent => {
                        let profile = PulseProfile::new(s.shape, 0.5 * delta, spec.sigma)?;
                        let coh = CoherentInput::new(spec.nbar, profile)?;
                        g2_coherent(&params, &coh, spec.z1, spec.z2)?
                    }
                };
                flag(&c.diagnostics, &mut status);
                cells.extend([Cell::Num(c.value), Cell::Num(c.diagnostics.rel_error)]);
            }
            Observable::Sbar => {
                let bx = BoundWeightBox {
                    dk_max: spec.box_half,
                    dp_max: spec.box_half,
                };
                let (w, d) = bound_weight(&params, delta, &bx)?;
                flag(&d, &mut status);
                cells.extend([Cell::Num(w), Cell::Num(d.rel_error)]);
            }
            Observable::Excite => {
                let (a, b, c) = excitation_amplitudes(&params, delta, dk)?;
                cells.extend([a, b, c].map(Cell::Num));
            }
            Observable::Lindblad => {
                let drive = DriveSettings {
                    delta,
                    omega: spec.lindblad.omega,
                    gamma: lindblad_gamma(spec, s, &raw),
                };
                let basis = FockBasis::new(spec.lindblad.n_max);
                let c = steady_correlation(&params, &drive, &basis)?;
                cells.extend([c.n2, c.g2, c.residual].map(Cell::Num));
            }
        }
        Ok(())
    })();
    if let Err(e) = result {
        if matches!(e, DimerError::Domain { .. }) {
            return Err(e);
        }
        cells.truncate(1);
        status = point_error(e, &mut cells, ncols);
    }

    let lead_name = leading_column(spec);
    for col in context_columns(spec) {
        if col == lead_name {
            continue;
        }
        cells.push(match col {
            "delta" => Cell::Num(delta),
            "dk" => Cell::Num(dk),
            "u" | "u1" => Cell::Num(raw.u1),
            "u2" => Cell::Num(raw.u2),
            "vsq" => Cell::Num(s.vsq.unwrap_or(raw.v1 * raw.v1)),
            "v1" => Cell::Num(raw.v1),
            "v2" => Cell::Num(raw.v2),
            "gamma_bath" => Cell::Num(raw.gamma_bath),
            "shape" => Cell::Text(s.shape.name()),
            "sigma" => Cell::Num(spec.sigma),
            "input" => Cell::Text(s.input.name()),
            "omega" => Cell::Num(spec.lindblad.omega),
            "gamma" => Cell::Num(lindblad_gamma(spec, s, &raw)),
            "nmax" => Cell::Num(spec.lindblad.n_max as f64),
            _ => unreachable!("unknown context column {col}"),
        });
    }
    Ok(Evaluated { cells, status })
}

fn lindblad_gamma(spec: &SweepSpec, s: &Series, raw: &RawParams) -> f64 {
    spec.lindblad.gamma.or(s.vsq).unwrap_or(raw.v1 * raw.v1)
}

fn points(spec: &SweepSpec) -> Vec<Point> {
    let xs = spec.grid.points();
    let mut out = Vec::with_capacity(spec.len());
    for series in 0..spec.series.len() {
        for &x in &xs {
            if spec.observable == Observable::Smap {
                for &y in &xs {
                    out.push(Point { series, x, y });
                }
            } else {
                out.push(Point { series, x, y: 0.0 });
            }
        }
    }
    out
}

fn render(cells: &[Cell]) -> String {
    let mut line = String::new();
    for (i, c) in cells.iter().enumerate() {
        if i > 0 {
            line.push(',');
        }
        match c {
            Cell::Num(x) => line.push_str(&format_number(*x)),
            Cell::Text(t) => {
                let _ = write!(line, "{t}");
            }
            Cell::Empty => {}
        }
    }
    line
}

/// Evaluates every point of `spec`, in parallel on up to `threads` workers
/// (all cores when `None`). Rows come back in grid order.
pub fn run(spec: &SweepSpec, threads: Option<usize>) -> Result<Table, RunError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| RunError::Pool(e.to_string()))?;
    let pts = points(spec);
    let results: Vec<Result<Evaluated, DimerError>> =
        pool.install(|| pts.par_iter().map(|p| evaluate(spec, p)).collect());
    let mut rows = Vec::with_capacity(results.len());
    let mut status = Vec::with_capacity(results.len());
    for (row, r) in results.into_iter().enumerate() {
        let ev = r.map_err(|source| RunError::Params {
            row: row + 1,
            source,
        })?;
        rows.push(render(&ev.cells));
        status.push(ev.status);
    }
    Ok(Table {
        header: header(spec),
        rows,
        status,
    })
}
