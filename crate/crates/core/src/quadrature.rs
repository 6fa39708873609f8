//! Adaptive Gauss-Kronrod (10/21 point) quadrature for vector-valued complex
//! integrands on finite, semi-infinite and infinite intervals with interior
//! breakpoints.
//!
//! The final partition can be exported as a fixed [`Rule`] so that several
//! integrands sharing the same structure (for example, every output momentum
//! of one wavepacket) reuse one set of nodes.

use num_complex::Complex64;

use crate::error::{DimerError, Result};

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Gauss weights for the odd-indexed Kronrod nodes.
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Tolerances and limits for [`integrate`].
#[derive(Clone, Copy, Debug)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_segments: usize,
    /// Length scale of the algebraic map used on infinite tails.
    pub tail_scale: f64,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_segments: 4000,
            tail_scale: 1.0,
        }
    }
}

/// Outcome of an adaptive integration.
#[derive(Clone, Debug)]
pub struct QuadResult {
    pub value: Vec<Complex64>,
    /// Estimated absolute error (max over components, summed over segments).
    pub error: f64,
    pub evals: usize,
    pub converged: bool,
    rule: Rule,
}

impl QuadResult {
    /// Kronrod nodes and weights of the final partition.
    pub fn rule(&self) -> &Rule {
        &self.rule
    }

    pub fn into_rule(self) -> Rule {
        self.rule
    }

    /// Converts a non-converged result into an error.
    pub fn require_converged(self, what: &str) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(DimerError::Quadrature(format!(
                "{what}: error estimate {:e} after {} evaluations",
                self.error, self.evals
            )))
        }
    }
}

/// Fixed quadrature nodes and weights on the real line.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn sum<F: FnMut(f64) -> Complex64>(&self, mut f: F) -> Complex64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    pub fn sum_real<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// Keeps only the nodes accepted by `keep`.
    pub fn filter<F: FnMut(f64) -> bool>(&self, mut keep: F) -> Rule {
        let mut out = Rule::default();
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            if keep(x) {
                out.nodes.push(x);
                out.weights.push(w);
            }
        }
        out
    }

    /// Gauss-Kronrod 21-point rule repeated on `n` equal panels of `[a, b]`.
    pub fn panels(a: f64, b: f64, n: usize) -> Rule {
        let mut out = Rule::default();
        let h = (b - a) / n as f64;
        for i in 0..n {
            let lo = a + h * i as f64;
            append_panel(&mut out, &Map::Finite, lo, lo + h);
        }
        out
    }
}

#[derive(Clone, Copy, Debug)]
enum Map {
    Finite,
    /// `x = origin + scale * t / (1 - t)`, `t` in `[0, 1)`.
    Upper {
        origin: f64,
        scale: f64,
    },
    /// `x = origin - scale * t / (1 - t)`.
    Lower {
        origin: f64,
        scale: f64,
    },
}

impl Map {
    fn apply(&self, t: f64) -> (f64, f64) {
        match *self {
            Map::Finite => (t, 1.0),
            Map::Upper { origin, scale } => {
                let d = 1.0 - t;
                (origin + scale * t / d, scale / (d * d))
            }
            Map::Lower { origin, scale } => {
                let d = 1.0 - t;
                (origin - scale * t / d, scale / (d * d))
            }
        }
    }
}

fn append_panel(rule: &mut Rule, map: &Map, a: f64, b: f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    for i in 0..21 {
        let (node, w) = if i < 10 {
            (c - h * XGK[i], WGK[i])
        } else if i == 10 {
            (c, WGK[10])
        } else {
            (c + h * XGK[20 - i], WGK[20 - i])
        };
        let (x, jac) = map.apply(node);
        if !(x.is_finite() && jac.is_finite()) {
            continue;
        }
        rule.nodes.push(x);
        rule.weights.push(h * w * jac);
    }
}

struct Segment {
    map: Map,
    a: f64,
    b: f64,
    value: Vec<Complex64>,
    error: f64,
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut e = err;
    if res_asc != 0.0 && e != 0.0 {
        e = res_asc * (200.0 * e / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        e = e.max(50.0 * f64::EPSILON * res_abs);
    }
    e
}

fn gk21<F>(f: &mut F, dim: usize, map: &Map, a: f64, b: f64, buf: &mut [Complex64]) -> Segment
where
    F: FnMut(f64, &mut [Complex64]),
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut kron = vec![Complex64::new(0.0, 0.0); dim];
    let mut gauss = vec![Complex64::new(0.0, 0.0); dim];
    let mut abs = vec![0.0; dim];
    let mut samples = Vec::with_capacity(21);

    let mut eval = |t: f64, buf: &mut [Complex64]| -> Vec<Complex64> {
        let (x, jac) = map.apply(t);
        buf.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        if !(x.is_finite() && jac.is_finite()) {
            // Node rounded onto the mapped endpoint at infinity.
            return vec![Complex64::new(0.0, 0.0); buf.len()];
        }
        f(x, buf);
        buf.iter().map(|v| v * jac).collect()
    };

    let center = eval(c, buf);
    for d in 0..dim {
        kron[d] += WGK[10] * center[d];
        abs[d] += WGK[10] * center[d].norm();
    }
    for i in 0..10 {
        let lo = eval(c - h * XGK[i], buf);
        let hi = eval(c + h * XGK[i], buf);
        for d in 0..dim {
            kron[d] += WGK[i] * (lo[d] + hi[d]);
            abs[d] += WGK[i] * (lo[d].norm() + hi[d].norm());
            if i % 2 == 1 {
                gauss[d] += WG[i / 2] * (lo[d] + hi[d]);
            }
        }
        samples.push((i, lo, hi));
    }

    let mut error: f64 = 0.0;
    for d in 0..dim {
        let mean = kron[d] * 0.5;
        let mut asc = WGK[10] * (center[d] - mean).norm();
        for (i, lo, hi) in &samples {
            asc += WGK[*i] * ((lo[d] - mean).norm() + (hi[d] - mean).norm());
        }
        let raw = ((kron[d] - gauss[d]) * h).norm();
        error = error.max(rescale_error(raw, abs[d] * h.abs(), asc * h.abs()));
    }
    Segment {
        map: *map,
        a,
        b,
        value: kron.into_iter().map(|v| v * h).collect(),
        error,
    }
}

/// Integrates a `dim`-component integrand over `[lo, hi]` (either end may be
/// infinite), splitting first at the sorted interior `breakpoints`.
///
/// The integrand writes its values into the provided zeroed buffer.
pub fn integrate<F>(
    mut f: F,
    dim: usize,
    lo: f64,
    hi: f64,
    breakpoints: &[f64],
    opts: &QuadOptions,
) -> QuadResult
where
    F: FnMut(f64, &mut [Complex64]),
{
    let mut cuts: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|&x| x > lo && x < hi && x.is_finite())
        .collect();
    cuts.sort_by(|a, b| a.total_cmp(b));
    cuts.dedup();
    if lo.is_infinite() && hi.is_infinite() && cuts.is_empty() {
        cuts.push(0.0);
    }

    let mut pieces: Vec<(Map, f64, f64)> = Vec::new();
    let mut edges = vec![lo];
    edges.extend(&cuts);
    edges.push(hi);
    for w in edges.windows(2) {
        let (a, b) = (w[0], w[1]);
        if a == b {
            continue;
        }
        let s = opts.tail_scale;
        match (a.is_infinite(), b.is_infinite()) {
            (false, false) => pieces.push((Map::Finite, a, b)),
            (false, true) => pieces.push((
                Map::Upper {
                    origin: a,
                    scale: s,
                },
                0.0,
                1.0,
            )),
            (true, false) => pieces.push((
                Map::Lower {
                    origin: b,
                    scale: s,
                },
                0.0,
                1.0,
            )),
            (true, true) => unreachable!("infinite interval without a cut"),
        }
    }

    let mut buf = vec![Complex64::new(0.0, 0.0); dim];
    let mut segs: Vec<Segment> = pieces
        .iter()
        .map(|(m, a, b)| gk21(&mut f, dim, m, *a, *b, &mut buf))
        .collect();
    let mut evals = 21 * segs.len();

    let totals = |segs: &[Segment]| {
        let mut v = vec![Complex64::new(0.0, 0.0); dim];
        let mut e = 0.0;
        for s in segs {
            for d in 0..dim {
                v[d] += s.value[d];
            }
            e += s.error;
        }
        (v, e)
    };

    let mut converged = false;
    loop {
        let (value, error) = totals(&segs);
        let scale = value.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if error <= opts.abs_tol.max(opts.rel_tol * scale) {
            converged = true;
            break;
        }
        if segs.len() >= opts.max_segments {
            break;
        }
        let worst = segs
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i)
            .unwrap_or(0);
        let s = segs.swap_remove(worst);
        let mid = 0.5 * (s.a + s.b);
        if !(mid > s.a && mid < s.b) {
            // Interval can no longer be split in floating point.
            segs.push(s);
            break;
        }
        segs.push(gk21(&mut f, dim, &s.map, s.a, mid, &mut buf));
        segs.push(gk21(&mut f, dim, &s.map, mid, s.b, &mut buf));
        evals += 42;
    }

    segs.sort_by(|x, y| {
        let kx = x.map.apply(0.5 * (x.a + x.b)).0;
        let ky = y.map.apply(0.5 * (y.a + y.b)).0;
        kx.total_cmp(&ky)
    });
    let mut rule = Rule::default();
    for s in &segs {
        append_panel(&mut rule, &s.map, s.a, s.b);
    }
    let (value, error) = totals(&segs);
    QuadResult {
        value,
        error,
        evals,
        converged,
        rule,
    }
}

/// Scalar complex convenience wrapper around [`integrate`].
pub fn integrate_complex<F>(
    mut f: F,
    lo: f64,
    hi: f64,
    breakpoints: &[f64],
    opts: &QuadOptions,
) -> QuadResult
where
    F: FnMut(f64) -> Complex64,
{
    integrate(|x, out| out[0] = f(x), 1, lo, hi, breakpoints, opts)
}

/// Scalar real convenience wrapper; returns `(value, error, converged)`.
pub fn integrate_real<F>(
    mut f: F,
    lo: f64,
    hi: f64,
    breakpoints: &[f64],
    opts: &QuadOptions,
) -> (f64, f64, bool)
where
    F: FnMut(f64) -> f64,
{
    let r = integrate(
        |x, out| out[0] = Complex64::new(f(x), 0.0),
        1,
        lo,
        hi,
        breakpoints,
        opts,
    );
    (r.value[0].re, r.error, r.converged)
}
