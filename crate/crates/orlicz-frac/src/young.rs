//! Young functions G(t) = \int_0^t g, their growth indices, and the
//! complementary (conjugate) transform.
//!
//! A Young function here is strictly increasing and convex with g = G'
//! absolutely continuous, g(0) = 0, g > 0 on (0, inf), g nondecreasing and
//! unbounded, and growth indices 1 < p- <= p+ < inf bounding t g'(t)/g(t) + 1.
//! g extends to negative arguments as an odd function, G as an even one.
//! Every constructed function is normalized so that G(1) = 1 by rescaling the
//! argument, which leaves the indices unchanged.

use crate::error::{Error, Result};
use crate::quad::{self, log_grid_per_decade};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;

/// Validation grid used by the constructor: log-spaced over [1e-6, 1e6].
const VALIDATION_PER_DECADE: usize = 32;

/// Relative root tolerance for monotone bisections.
pub const ROOT_TOL: f64 = 1e-12;
const MAX_ROOT_ITERS: usize = 200;

/// The families of Young functions the crate constructs directly.
#[derive(Clone)]
pub enum YoungFamily {
    /// G(t) = t^p, p > 1.
    Power { p: f64 },
    /// g(t) = t^{p-1} (|log t| + 1) up to argument normalization; the
    /// logarithmically perturbed power family. Requires p > (3 + sqrt 5)/2.
    PowerLog { p: f64 },
    /// g(t) = t^{p-1} below the breakpoint and continues as a q-power above
    /// it, continuously. p, q > 1.
    PiecewisePower { p: f64, q: f64, breakpoint: f64 },
    /// g supplied as a callable; G is tabulated by quadrature on a log grid
    /// and the indices are estimated by sampling t g'(t)/g(t).
    UserDefined {
        name: String,
        g: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    },
}

impl fmt::Debug for YoungFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            YoungFamily::Power { p } => write!(f, "Power(p={p})"),
            YoungFamily::PowerLog { p } => write!(f, "PowerLog(p={p})"),
            YoungFamily::PiecewisePower { p, q, breakpoint } => {
                write!(f, "PiecewisePower(p={p}, q={q}, breakpoint={breakpoint})")
            }
            YoungFamily::UserDefined { name, .. } => write!(f, "UserDefined({name})"),
        }
    }
}

/// JSON-facing spec for a Young function, e.g. `{"family": "power", "p": 3.0}`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum YoungSpec {
    Power { p: f64 },
    PowerLog { p: f64 },
    PiecewisePower {
        p: f64,
        q: f64,
        #[serde(default = "default_breakpoint")]
        breakpoint: f64,
    },
}

fn default_breakpoint() -> f64 {
    1.0
}

impl YoungSpec {
    pub fn build(&self) -> Result<YoungFunction> {
        let family = match *self {
            YoungSpec::Power { p } => YoungFamily::Power { p },
            YoungSpec::PowerLog { p } => YoungFamily::PowerLog { p },
            YoungSpec::PiecewisePower { p, q, breakpoint } => {
                YoungFamily::PiecewisePower { p, q, breakpoint }
            }
        };
        make_young(family)
    }
}

/// Tabulated cumulative integral of a user-supplied g.
struct UserTable {
    ts: Vec<f64>,
    big_g: Vec<f64>,
    /// Local power exponent of G at the bottom of the table.
    head_exponent: f64,
}

/// An immutable, validated Young function with growth indices.
#[derive(Clone)]
pub struct YoungFunction {
    family: YoungFamily,
    /// Argument normalization: eval(t) = raw(scale * t) so that G(1) = 1.
    scale: f64,
    p_minus: f64,
    p_plus: f64,
    table: Option<Arc<UserTable>>,
}

impl fmt::Debug for YoungFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "YoungFunction({:?}, p-={}, p+={}, scale={})",
            self.family, self.p_minus, self.p_plus, self.scale
        )
    }
}

/// Maximizer data of the complementary transform at one point.
///
/// `value` = sup_t { a t - G(t) } attained at `t_star` where g(t*) = a.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ComplementaryValue {
    pub input: f64,
    pub t_star: f64,
    pub value: f64,
}

impl YoungFunction {
    /// G(t); even in t.
    pub fn eval(&self, t: f64) -> f64 {
        let t = t.abs() * self.scale;
        self.raw_big(t)
    }

    /// g(t) = G'(t); odd in t.
    pub fn deriv(&self, t: f64) -> f64 {
        let s = t.signum();
        s * self.scale * self.raw_small(t.abs() * self.scale)
    }

    /// g'(t); even in t.
    pub fn second_deriv(&self, t: f64) -> f64 {
        let t = t.abs() * self.scale;
        self.scale * self.scale * self.raw_small_prime(t)
    }

    pub fn p_minus(&self) -> f64 {
        self.p_minus
    }

    pub fn p_plus(&self) -> f64 {
        self.p_plus
    }

    pub fn family(&self) -> &YoungFamily {
        &self.family
    }

    /// t g(t)/G(t), the index bounded by [p-, p+].
    pub fn index_gg(&self, t: f64) -> f64 {
        let t = t.abs();
        t * self.deriv(t) / self.eval(t)
    }

    /// 1 + t g'(t)/g(t), the index whose bounds define p-, p+.
    pub fn index_h1(&self, t: f64) -> f64 {
        let t = t.abs();
        1.0 + t * self.second_deriv(t) / self.deriv(t)
    }

    /// min/max { t^{p-}, t^{p+} }: the sandwich envelopes of Lemma
    /// "modulars vs norms".
    pub fn xi_minus(&self, t: f64) -> f64 {
        t.powf(self.p_minus).min(t.powf(self.p_plus))
    }

    pub fn xi_plus(&self, t: f64) -> f64 {
        t.powf(self.p_minus).max(t.powf(self.p_plus))
    }

    fn raw_big(&self, t: f64) -> f64 {
        match &self.family {
            YoungFamily::Power { p } => t.powf(*p),
            YoungFamily::PowerLog { p } => {
                let p = *p;
                if t == 0.0 {
                    0.0
                } else if t <= 1.0 {
                    (t.powf(p) / p) * (1.0 + 1.0 / p - t.ln())
                } else {
                    (t.powf(p) / p) * (1.0 - 1.0 / p + t.ln()) + 2.0 / (p * p)
                }
            }
            YoungFamily::PiecewisePower { p, q, breakpoint } => {
                let (p, q, b) = (*p, *q, *breakpoint);
                if t <= b {
                    t.powf(p) / p
                } else {
                    b.powf(p) / p + b.powf(p - q) * (t.powf(q) - b.powf(q)) / q
                }
            }
            YoungFamily::UserDefined { .. } => {
                let tab = self.table.as_ref().expect("user table built at construction");
                tab.lookup(t, |x| self.raw_small(x))
            }
        }
    }

    fn raw_small(&self, t: f64) -> f64 {
        match &self.family {
            YoungFamily::Power { p } => p * t.powf(p - 1.0),
            YoungFamily::PowerLog { p } => {
                if t == 0.0 {
                    0.0
                } else {
                    t.powf(p - 1.0) * (t.ln().abs() + 1.0)
                }
            }
            YoungFamily::PiecewisePower { p, q, breakpoint } => {
                let (p, q, b) = (*p, *q, *breakpoint);
                if t <= b {
                    t.powf(p - 1.0)
                } else {
                    b.powf(p - q) * t.powf(q - 1.0)
                }
            }
            YoungFamily::UserDefined { g, .. } => g(t),
        }
    }

    fn raw_small_prime(&self, t: f64) -> f64 {
        match &self.family {
            YoungFamily::Power { p } => {
                if t == 0.0 {
                    0.0
                } else {
                    p * (p - 1.0) * t.powf(p - 2.0)
                }
            }
            YoungFamily::PowerLog { p } => {
                let p = *p;
                if t == 0.0 {
                    0.0
                } else if t <= 1.0 {
                    t.powf(p - 2.0) * ((p - 1.0) * (1.0 - t.ln()) - 1.0)
                } else {
                    t.powf(p - 2.0) * ((p - 1.0) * (1.0 + t.ln()) + 1.0)
                }
            }
            YoungFamily::PiecewisePower { p, q, breakpoint } => {
                let (p, q, b) = (*p, *q, *breakpoint);
                if t <= b {
                    (p - 1.0) * t.powf(p - 2.0)
                } else {
                    b.powf(p - q) * (q - 1.0) * t.powf(q - 2.0)
                }
            }
            YoungFamily::UserDefined { g, .. } => {
                // Central differences; user input supplies only g.
                let h = t.abs().max(1e-12) * 1e-6;
                (g(t + h) - g((t - h).max(0.0))) / (t + h - (t - h).max(0.0))
            }
        }
    }

    /// Complementary function value: solves g(t*) = a by monotone bisection
    /// on a geometrically grown bracket and returns a t* - G(t*). Exact
    /// supremum up to root tolerance because G is convex.
    pub fn complementary(&self, a: f64) -> Result<ComplementaryValue> {
        assert!(a >= 0.0, "complementary expects a >= 0");
        if a == 0.0 {
            return Ok(ComplementaryValue { input: 0.0, t_star: 0.0, value: 0.0 });
        }
        let mut lo = 1.0_f64;
        let mut hi = 1.0_f64;
        let mut doublings = 0;
        while self.deriv(hi) < a {
            hi *= 2.0;
            doublings += 1;
            if doublings > 2200 {
                return Err(Error::Bracket { what: "complementary maximizer (upper)", doublings });
            }
        }
        while self.deriv(lo) > a {
            lo *= 0.5;
            doublings += 1;
            if doublings > 2200 {
                return Err(Error::Bracket { what: "complementary maximizer (lower)", doublings });
            }
        }
        let mut t = 0.5 * (lo + hi);
        for _ in 0..MAX_ROOT_ITERS {
            t = 0.5 * (lo + hi);
            if self.deriv(t) < a {
                lo = t;
            } else {
                hi = t;
            }
            if (hi - lo) <= ROOT_TOL * hi {
                break;
            }
        }
        Ok(ComplementaryValue { input: a, t_star: t, value: a * t - self.eval(t) })
    }

    /// Inverse of the complementary function: the a >= 0 with
    /// complementary(a).value = v, by bisection on the monotone map.
    pub fn complementary_inverse(&self, v: f64) -> Result<f64> {
        assert!(v >= 0.0, "complementary_inverse expects v >= 0");
        if v == 0.0 {
            return Ok(0.0);
        }
        let mut hi = 1.0_f64;
        let mut doublings = 0;
        while self.complementary(hi)?.value < v {
            hi *= 2.0;
            doublings += 1;
            if doublings > 2200 {
                return Err(Error::Bracket { what: "complementary inverse (upper)", doublings });
            }
        }
        let mut lo = 0.0;
        let mut a = 0.5 * hi;
        for _ in 0..MAX_ROOT_ITERS {
            a = 0.5 * (lo + hi);
            if self.complementary(a)?.value < v {
                lo = a;
            } else {
                hi = a;
            }
            if (hi - lo) <= ROOT_TOL * hi {
                break;
            }
        }
        Ok(a)
    }
}

impl UserTable {
    fn lookup(&self, t: f64, small: impl Fn(f64) -> f64) -> f64 {
        if t == 0.0 {
            return 0.0;
        }
        let ts = &self.ts;
        if t <= ts[0] {
            // Local power extrapolation below the table.
            return self.big_g[0] * (t / ts[0]).powf(self.head_exponent);
        }
        let idx = match ts.binary_search_by(|probe| probe.total_cmp(&t)) {
            Ok(i) => return self.big_g[i],
            Err(i) => i - 1,
        };
        if idx + 1 >= ts.len() {
            // Extrapolate above the table with the local exponent.
            let n = ts.len() - 1;
            let expo = ts[n] * small(ts[n]) / self.big_g[n];
            return self.big_g[n] * (t / ts[n]).powf(expo);
        }
        let mut f = |x: f64| small(x);
        self.big_g[idx] + quad::gl_panel(&mut f, ts[idx], t, 8)
    }
}

/// Estimate growth indices by dense sampling of 1 + t g'(t)/g(t) on a log
/// grid, padded outward so the result brackets the analytic index range.
pub fn estimate_indices(index_h1: impl Fn(f64) -> f64, lo: f64, hi: f64, per_decade: usize) -> (f64, f64) {
    let grid = log_grid_per_decade(lo, hi, per_decade);
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for &t in &grid {
        let v = index_h1(t);
        if v.is_finite() {
            min = min.min(v);
            max = max.max(v);
        }
    }
    let pad = (0.05 * (max - min)).max(1e-3);
    (min - pad, max + pad)
}

/// Construct and validate a Young function, normalizing so G(1) = 1.
pub fn make_young(family: YoungFamily) -> Result<YoungFunction> {
    let (p_minus, p_plus) = match &family {
        YoungFamily::Power { p } => {
            if *p <= 1.0 {
                return Err(Error::Validation { t: 0.0, reason: format!("Power requires p > 1, got {p}") });
            }
            (*p, *p)
        }
        YoungFamily::PowerLog { p } => {
            let threshold = (3.0 + 5.0_f64.sqrt()) / 2.0;
            if *p <= threshold {
                return Err(Error::Validation {
                    t: 0.0,
                    reason: format!("PowerLog requires p > (3+sqrt5)/2 ~= {threshold:.6}, got {p}"),
                });
            }
            (*p - 1.0, *p + 1.0)
        }
        YoungFamily::PiecewisePower { p, q, breakpoint } => {
            if *p <= 1.0 || *q <= 1.0 {
                return Err(Error::Validation { t: 0.0, reason: format!("PiecewisePower requires p, q > 1, got {p}, {q}") });
            }
            if *breakpoint <= 0.0 {
                return Err(Error::Validation { t: 0.0, reason: "breakpoint must be positive".into() });
            }
            (p.min(*q), p.max(*q))
        }
        YoungFamily::UserDefined { .. } => (f64::NAN, f64::NAN), // estimated below
    };

    let mut yf = YoungFunction { family, scale: 1.0, p_minus, p_plus, table: None };

    if let YoungFamily::UserDefined { g, .. } = &yf.family {
        let g = g.clone();
        let ts = log_grid_per_decade(1e-9, 1e9, 32);
        let mut big_g = Vec::with_capacity(ts.len());
        // Head: integrate [0, ts[0]] assuming the local power behaviour of g.
        let h = ts[0] * 1e-6;
        let slope0 = ts[0] * (g(ts[0] + h) - g(ts[0] - h)) / (2.0 * h) / g(ts[0]);
        let head_exponent = 1.0 + slope0;
        let mut acc = ts[0] * g(ts[0]) / head_exponent;
        big_g.push(acc);
        for w in ts.windows(2) {
            let mut f = |x: f64| g(x);
            acc += quad::gl_panel(&mut f, w[0], w[1], 8);
            big_g.push(acc);
        }
        yf.table = Some(Arc::new(UserTable { ts, big_g, head_exponent }));
        let (lo, hi) = estimate_indices(|t| yf.index_h1(t), 1e-6, 1e6, 64);
        yf.p_minus = lo;
        yf.p_plus = hi;
        if !(yf.p_minus > 1.0) {
            return Err(Error::Validation {
                t: 0.0,
                reason: format!("estimated p- = {lo} is not > 1; g does not satisfy the growth condition"),
            });
        }
    }

    // Normalize G(1) = 1 by rescaling the argument (invariant under indices).
    let raw_at = |yf: &YoungFunction, t: f64| yf.raw_big(t);
    if (raw_at(&yf, 1.0) - 1.0).abs() > 1e-14 {
        let mut lo = 1.0_f64;
        let mut hi = 1.0_f64;
        let mut guard = 0;
        while raw_at(&yf, hi) < 1.0 {
            hi *= 2.0;
            guard += 1;
            if guard > 400 {
                return Err(Error::Bracket { what: "normalization scale (upper)", doublings: guard });
            }
        }
        while raw_at(&yf, lo) > 1.0 {
            lo *= 0.5;
            guard += 1;
            if guard > 400 {
                return Err(Error::Bracket { what: "normalization scale (lower)", doublings: guard });
            }
        }
        for _ in 0..MAX_ROOT_ITERS {
            let mid = 0.5 * (lo + hi);
            if raw_at(&yf, mid) < 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= ROOT_TOL * hi {
                break;
            }
        }
        yf.scale = 0.5 * (lo + hi);
    }

    validate(&yf)?;
    Ok(yf)
}

/// Constructor-time invariant checks on a log-spaced sample grid.
fn validate(yf: &YoungFunction) -> Result<()> {
    let grid = log_grid_per_decade(1e-6, 1e6, VALIDATION_PER_DECADE);

    if yf.deriv(0.0) != 0.0 {
        return Err(Error::Validation { t: 0.0, reason: format!("g(0) = {} != 0", yf.deriv(0.0)) });
    }
    let mut prev_g = 0.0;
    let mut prev_big = 0.0;
    for &t in &grid {
        let g = yf.deriv(t);
        let big = yf.eval(t);
        if !(g.is_finite() && big.is_finite()) {
            return Err(Error::Validation { t, reason: "non-finite g or G".into() });
        }
        if g <= 0.0 {
            return Err(Error::Validation { t, reason: format!("g(t) = {g} not strictly positive") });
        }
        if g < prev_g * (1.0 - 1e-12) {
            return Err(Error::Validation { t, reason: "g not nondecreasing".into() });
        }
        if big <= prev_big * (1.0 + 1e-15) && t > grid[0] {
            return Err(Error::Validation { t, reason: "G not strictly increasing".into() });
        }
        // (H1): p- - 1 <= t g'(t)/g(t) <= p+ - 1, with float slack.
        let h1 = yf.index_h1(t) - 1.0;
        let slack = 1e-9 * (1.0 + yf.p_plus);
        if h1 < yf.p_minus - 1.0 - slack || h1 > yf.p_plus - 1.0 + slack {
            return Err(Error::Validation {
                t,
                reason: format!("index t g'/g = {h1} outside [{}, {}]", yf.p_minus - 1.0, yf.p_plus - 1.0),
            });
        }
        prev_g = g;
        prev_big = big;
    }
    // g -> infinity, checked loosely on the top of the grid.
    if yf.deriv(1e6) < 10.0 * yf.deriv(1.0).min(1.0) {
        return Err(Error::Validation { t: 1e6, reason: "g does not grow at the top of the grid".into() });
    }
    // Odd extension exactness.
    let t = 0.37;
    if yf.deriv(-t) != -yf.deriv(t) {
        return Err(Error::Validation { t: -t, reason: "odd extension not exact".into() });
    }
    Ok(())
}
