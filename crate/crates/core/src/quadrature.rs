//! Quadrature building blocks: fixed Gauss rules (nodes from `gauss-quad`,
//! cached per degree), globally adaptive Gauss–Kronrod 10/21 for complex
//! integrands, and Wynn's epsilon algorithm for oscillatory tails.

use std::collections::{BinaryHeap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use gauss_quad::{GaussJacobi, GaussLegendre};
use num_complex::Complex64;

/// Node/weight pairs on [−1, 1].
pub type Rule = Arc<[(f64, f64)]>;

fn legendre_cache() -> &'static Mutex<HashMap<usize, Rule>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Rule>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn jacobi_cache() -> &'static Mutex<HashMap<(usize, u64, u64), Rule>> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, u64, u64), Rule>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// n-point Gauss–Legendre rule.
pub fn legendre(n: usize) -> Rule {
    let n = n.max(1);
    let mut cache = legendre_cache().lock().expect("rule cache poisoned");
    cache
        .entry(n)
        .or_insert_with(|| {
            let rule = GaussLegendre::new(n.try_into().expect("n >= 1"));
            rule.as_node_weight_pairs().to_vec().into()
        })
        .clone()
}

/// Gauss–Jacobi rule for the weight (1−x)^alpha (1+x)^beta on [−1, 1].
///
/// Degrees are rounded up to even: the upstream Golub–Welsch routine pins the
/// middle node of odd rules to 0, which is only right for alpha = beta.
pub fn jacobi(n: usize, alpha: f64, beta: f64) -> Rule {
    let n = (n.max(2) + 1) & !1;
    if alpha == 0.0 && beta == 0.0 {
        return legendre(n);
    }
    let key = (n, alpha.to_bits(), beta.to_bits());
    let mut cache = jacobi_cache().lock().expect("rule cache poisoned");
    cache
        .entry(key)
        .or_insert_with(|| {
            let rule = GaussJacobi::new(
                n.try_into().expect("n >= 2"),
                alpha.try_into().expect("alpha > -1"),
                beta.try_into().expect("beta > -1"),
            );
            let mut pairs = rule.as_node_weight_pairs().to_vec();
            pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
            pairs.into()
        })
        .clone()
}

/// ∫_a^b f with a fixed rule mapped linearly from [−1, 1].
pub fn apply_rule<F>(rule: &Rule, a: f64, b: f64, mut f: F) -> Complex64
where
    F: FnMut(f64) -> Complex64,
{
    let h = 0.5 * (b - a);
    let c = 0.5 * (b + a);
    let mut s = Complex64::new(0.0, 0.0);
    for &(x, w) in rule.iter() {
        s += f(c + h * x) * w;
    }
    s * h
}

/// ∫_0^L u^{p} g(u) du with a Jacobi rule absorbing the endpoint power.
pub fn apply_left_power<F>(n: usize, p: f64, len: f64, mut g: F) -> Complex64
where
    F: FnMut(f64) -> Complex64,
{
    // u = L(1+x)/2, u^p = (L/2)^p (1+x)^p
    let rule = jacobi(n, 0.0, p);
    let h = 0.5 * len;
    let scale = h.powf(p + 1.0);
    let mut s = Complex64::new(0.0, 0.0);
    for &(x, w) in rule.iter() {
        s += g(h * (1.0 + x)) * w;
    }
    s * scale
}

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689,
    0.973_906_528_517_171_720_077_964_012_084,
    0.930_157_491_355_708_226_001_207_180_060,
    0.865_063_366_688_984_510_732_096_688_423,
    0.780_817_726_586_416_897_063_717_578_345,
    0.679_409_568_299_024_406_234_327_365_115,
    0.562_757_134_668_604_683_339_000_099_273,
    0.433_395_394_129_247_190_799_265_943_166,
    0.294_392_862_701_460_198_131_126_603_104,
    0.148_874_338_981_631_210_884_826_001_130,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062,
    0.032_558_162_307_964_727_478_818_972_459,
    0.054_755_896_574_351_996_031_381_300_245,
    0.075_039_674_810_919_952_767_043_140_916,
    0.093_125_454_583_697_605_535_065_465_083,
    0.109_387_158_802_297_641_899_210_590_326,
    0.123_491_976_262_065_851_077_208_980_259,
    0.134_709_217_311_473_325_928_054_001_772,
    0.142_775_938_577_060_080_797_094_273_139,
    0.147_739_104_901_338_491_374_841_515_972,
    0.149_445_554_002_916_905_664_936_468_390,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893,
    0.149_451_349_150_580_593_145_776_339_658,
    0.219_086_362_515_982_043_995_534_934_228,
    0.269_266_719_309_996_355_091_226_921_569,
    0.295_524_224_714_752_870_173_892_994_651,
];

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: Complex64,
    pub err: f64,
    pub converged: bool,
}

struct Piece {
    a: f64,
    b: f64,
    value: Complex64,
    err: f64,
    resabs: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&other.err)
    }
}

fn gk21<F>(f: &mut F, a: f64, b: f64) -> (Complex64, f64, f64)
where
    F: FnMut(f64) -> Complex64,
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut resk = fc * WGK[10];
    let mut resg = Complex64::new(0.0, 0.0);
    let mut resabs = fc.norm() * WGK[10];
    let mut vals = [(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)); 10];
    for j in 0..10 {
        let dx = h * XGK[j];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        vals[j] = (f1, f2);
        resk += (f1 + f2) * WGK[j];
        resabs += (f1.norm() + f2.norm()) * WGK[j];
        if j % 2 == 1 {
            resg += (f1 + f2) * WG[j / 2];
        }
    }
    let mean = resk * 0.5;
    let mut resasc = WGK[10] * (fc - mean).norm();
    for j in 0..10 {
        resasc += WGK[j] * ((vals[j].0 - mean).norm() + (vals[j].1 - mean).norm());
    }
    let resk = resk * h;
    let resabs = resabs * h.abs();
    let resasc = resasc * h.abs();
    let mut err = ((resk - resg * h).norm()).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (1.0f64).min((200.0 * err / resasc).powf(1.5));
    }
    (resk, err, resabs)
}

/// Globally adaptive Gauss–Kronrod integration of a complex integrand.
pub fn adaptive<F>(mut f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64, max_pieces: usize) -> QuadResult
where
    F: FnMut(f64) -> Complex64,
{
    if a == b {
        return QuadResult { value: Complex64::new(0.0, 0.0), err: 0.0, converged: true };
    }
    let (v, e, ra) = gk21(&mut f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Piece { a, b, value: v, err: e, resabs: ra });
    let mut total = v;
    let mut total_err = e;
    let mut total_abs = ra;
    let mut count = 1;
    loop {
        // rounding floor: no rule resolves below ~ε ∫|f|
        let floor = 50.0 * f64::EPSILON * total_abs;
        let target = abs_tol.max(rel_tol * total.norm()).max(floor);
        if total_err <= target {
            return QuadResult { value: total, err: total_err.max(floor), converged: true };
        }
        if count >= max_pieces {
            return QuadResult { value: total, err: total_err.max(floor), converged: false };
        }
        let worst = heap.pop().expect("heap is never empty here");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a.min(worst.b) || mid >= worst.a.max(worst.b) {
            heap.push(worst);
            return QuadResult { value: total, err: total_err.max(floor), converged: false };
        }
        let (v1, e1, r1) = gk21(&mut f, worst.a, mid);
        let (v2, e2, r2) = gk21(&mut f, mid, worst.b);
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.err;
        total_abs += r1 + r2 - worst.resabs;
        heap.push(Piece { a: worst.a, b: mid, value: v1, err: e1, resabs: r1 });
        heap.push(Piece { a: mid, b: worst.b, value: v2, err: e2, resabs: r2 });
        count += 1;
        if count % 64 == 0 {
            // refresh the running sums against drift
            total = heap.iter().map(|p| p.value).sum();
            total_err = heap.iter().map(|p| p.err).sum();
            total_abs = heap.iter().map(|p| p.resabs).sum();
        }
    }
}

/// Real-valued convenience wrapper around [`adaptive`].
pub fn adaptive_real<F>(mut f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64, max_pieces: usize) -> (f64, f64, bool)
where
    F: FnMut(f64) -> f64,
{
    let r = adaptive(|x| Complex64::new(f(x), 0.0), a, b, abs_tol, rel_tol, max_pieces);
    (r.value.re, r.err, r.converged)
}

/// Wynn's epsilon algorithm on a real sequence of partial sums.  Returns the
/// extrapolated limit and the difference between the last two estimates.
pub fn wynn_epsilon(s: &[f64]) -> (f64, f64) {
    let n = s.len();
    if n < 3 {
        let last = *s.last().unwrap_or(&0.0);
        let prev = if n >= 2 { s[n - 2] } else { 0.0 };
        return (last, (last - prev).abs());
    }
    // e[k] holds column k of the table for the current anti-diagonal
    let mut prev_col: Vec<f64> = vec![0.0; n + 1];
    let mut col: Vec<f64> = s.to_vec();
    let mut estimates: Vec<f64> = Vec::new();
    let mut k = 0;
    while col.len() > 1 {
        let mut next = Vec::with_capacity(col.len() - 1);
        for i in 0..col.len() - 1 {
            let d = col[i + 1] - col[i];
            let base = if k == 0 { 0.0 } else { prev_col[i + 1] };
            if d == 0.0 || !d.is_finite() {
                next.push(f64::INFINITY);
            } else {
                next.push(base + 1.0 / d);
            }
        }
        prev_col = col;
        col = next;
        k += 1;
        if k % 2 == 0 {
            if let Some(&v) = col.last() {
                if v.is_finite() {
                    estimates.push(v);
                }
            }
        }
    }
    match estimates.len() {
        0 => (s[n - 1], (s[n - 1] - s[n - 2]).abs()),
        1 => (estimates[0], (estimates[0] - s[n - 1]).abs()),
        m => {
            let best = estimates[m - 1];
            (best, (best - estimates[m - 2]).abs())
        }
    }
}

/// Wynn acceleration applied to real and imaginary parts separately.
pub fn wynn_epsilon_complex(s: &[Complex64]) -> (Complex64, f64) {
    let re: Vec<f64> = s.iter().map(|z| z.re).collect();
    let im: Vec<f64> = s.iter().map(|z| z.im).collect();
    let (r, er) = wynn_epsilon(&re);
    let (i, ei) = wynn_epsilon(&im);
    (Complex64::new(r, i), er.hypot(ei))
}
