//! Functions on the line given by a closed-form generator or grid values,
//! with an explicit tail model beyond a core radius.
//!
//! Every integral in the crate consumes a [`SampledFunction`]: the core
//! part is evaluated directly (closure or piecewise-linear interpolation)
//! and the improper tails come from one of three analytic families, so that
//! integrals to infinity never need user quadrature.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::fmt;
use std::sync::Arc;

/// Behaviour of |u(y)| for |y| beyond the core radius L.
///
/// `Decay { c, alpha }` means |u(y)| = c |y|^{-alpha}; negative alpha
/// expresses polynomial growth. The sign of the tail continues the sign of
/// the core boundary value on that side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum TailModel {
    Zero,
    Constant { c: f64 },
    Decay { c: f64, alpha: f64 },
}

impl TailModel {
    pub fn magnitude(&self, y_abs: f64) -> f64 {
        match *self {
            TailModel::Zero => 0.0,
            TailModel::Constant { c } => c.abs(),
            TailModel::Decay { c, alpha } => c.abs() * y_abs.powf(-alpha),
        }
    }

    /// Whether |u| stays bounded as |y| -> infinity.
    pub fn is_bounded(&self) -> bool {
        match *self {
            TailModel::Zero | TailModel::Constant { .. } => true,
            TailModel::Decay { alpha, .. } => alpha >= 0.0,
        }
    }

    pub fn sup_magnitude(&self, core_radius: f64) -> f64 {
        match *self {
            TailModel::Zero => 0.0,
            TailModel::Constant { c } => c.abs(),
            TailModel::Decay { c, alpha } => {
                if alpha >= 0.0 {
                    c.abs() * core_radius.powf(-alpha)
                } else {
                    f64::INFINITY
                }
            }
        }
    }
}

#[derive(Clone)]
enum Core {
    Closure(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
    Grid { values: Vec<f64> },
}

/// A function on the line: core on [-L, L], tail model outside.
#[derive(Clone)]
pub struct SampledFunction {
    name: String,
    core: Core,
    core_radius: f64,
    tail: TailModel,
    lipschitz_hint: Option<f64>,
    sign_left: f64,
    sign_right: f64,
    /// Interior x-locations where the function is not smooth (kinks or
    /// jumps); quadrature panels split there.
    breakpoints: Vec<f64>,
}

impl fmt::Debug for SampledFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SampledFunction({}, L={}, tail={:?})", self.name, self.core_radius, self.tail)
    }
}

impl SampledFunction {
    pub fn from_fn(
        name: impl Into<String>,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        core_radius: f64,
        tail: TailModel,
    ) -> Result<Self> {
        let sf = SampledFunction {
            name: name.into(),
            core: Core::Closure(Arc::new(f)),
            core_radius,
            tail,
            lipschitz_hint: None,
            sign_left: 1.0,
            sign_right: 1.0,
            breakpoints: Vec::new(),
        };
        sf.finish()
    }

    /// Grid values on uniform nodes over [-L, L], piecewise linear in between.
    pub fn from_grid(core_radius: f64, values: Vec<f64>, tail: TailModel) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::Schema("grid needs at least 2 values".into()));
        }
        let sf = SampledFunction {
            name: "grid".into(),
            core: Core::Grid { values },
            core_radius,
            tail,
            lipschitz_hint: None,
            sign_left: 1.0,
            sign_right: 1.0,
            breakpoints: Vec::new(),
        };
        sf.finish()
    }

    pub fn with_breakpoints(mut self, breakpoints: Vec<f64>) -> Self {
        self.breakpoints = breakpoints;
        self
    }

    /// Interior non-smooth locations plus the core boundary.
    pub fn panel_breakpoints(&self) -> Vec<f64> {
        let mut v = self.breakpoints.clone();
        v.push(-self.core_radius);
        v.push(self.core_radius);
        v
    }

    pub fn with_lipschitz_hint(mut self, hint: f64) -> Result<Self> {
        self.lipschitz_hint = Some(hint);
        if let Core::Grid { values } = &self.core {
            let h = 2.0 * self.core_radius / (values.len() - 1) as f64;
            for (i, w) in values.windows(2).enumerate() {
                if (w[1] - w[0]).abs() > hint * h * (1.0 + 1e-9) {
                    return Err(Error::Validation {
                        t: -self.core_radius + i as f64 * h,
                        reason: format!("grid difference {} exceeds Lipschitz hint {hint}", (w[1] - w[0]).abs() / h),
                    });
                }
            }
        }
        Ok(self)
    }

    fn finish(mut self) -> Result<Self> {
        let l = self.core_radius;
        if !(l > 0.0) {
            return Err(Error::Schema("core radius must be positive".into()));
        }
        let (ul, ur) = (self.core_eval(-l), self.core_eval(l));
        if !ul.is_finite() || !ur.is_finite() {
            return Err(Error::NonFinite { what: "core boundary value", x: l });
        }
        if let Core::Grid { values } = &self.core {
            let h = 2.0 * l / (values.len() - 1) as f64;
            if let Some((i, _)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
                return Err(Error::NonFinite { what: "grid value", x: -l + i as f64 * h });
            }
        }
        self.sign_left = if ul < 0.0 { -1.0 } else { 1.0 };
        self.sign_right = if ur < 0.0 { -1.0 } else { 1.0 };
        // Tail must continue the boundary magnitude within 10%.
        let mag = self.tail.magnitude(l);
        for bnd in [ul.abs(), ur.abs()] {
            let scale = bnd.max(mag);
            if scale > 1e-12 && (bnd - mag).abs() > 0.10 * scale * (1.0 + 1e-12) {
                return Err(Error::Validation {
                    t: l,
                    reason: format!("tail magnitude {mag} does not match boundary magnitude {bnd} within 10%"),
                });
            }
        }
        Ok(self)
    }

    fn core_eval(&self, y: f64) -> f64 {
        match &self.core {
            Core::Closure(f) => f(y),
            Core::Grid { values } => {
                let l = self.core_radius;
                let n = values.len() - 1;
                let t = (y + l) / (2.0 * l) * n as f64;
                let i = (t.floor() as usize).min(n - 1);
                let frac = t - i as f64;
                values[i] * (1.0 - frac) + values[i + 1] * frac
            }
        }
    }

    /// u(y), using the tail model beyond the core radius.
    pub fn eval(&self, y: f64) -> f64 {
        if y.abs() <= self.core_radius {
            self.core_eval(y)
        } else {
            let sign = if y < 0.0 { self.sign_left } else { self.sign_right };
            sign * self.tail.magnitude(y.abs())
        }
    }

    pub fn core_radius(&self) -> f64 {
        self.core_radius
    }

    pub fn tail(&self) -> TailModel {
        self.tail
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn lipschitz_hint(&self) -> Option<f64> {
        self.lipschitz_hint
    }

    pub fn is_bounded(&self) -> bool {
        self.tail.is_bounded()
    }

    /// Grid spacing when backed by a grid; None for closed forms.
    pub fn grid_step(&self) -> Option<f64> {
        match &self.core {
            Core::Grid { values } => Some(2.0 * self.core_radius / (values.len() - 1) as f64),
            Core::Closure(_) => None,
        }
    }

    pub fn grid_nodes(&self) -> Option<Vec<f64>> {
        match &self.core {
            Core::Grid { values } => {
                let n = values.len();
                let l = self.core_radius;
                Some((0..n).map(|i| -l + 2.0 * l * i as f64 / (n - 1) as f64).collect())
            }
            Core::Closure(_) => None,
        }
    }

    /// Central-difference gradient (one-sided limits average at grid kinks).
    pub fn numeric_gradient(&self, x: f64) -> f64 {
        let h = 1e-5 * (1.0 + x.abs());
        (self.eval(x + h) - self.eval(x - h)) / (2.0 * h)
    }

    /// Local Lipschitz scale |u(x+h)-u(x-h)|-based estimate near x.
    pub fn local_lipschitz(&self, x: f64, h: f64) -> f64 {
        if let Some(k) = self.lipschitz_hint {
            return k;
        }
        let a = (self.eval(x + h) - self.eval(x)).abs() / h;
        let b = (self.eval(x) - self.eval(x - h)).abs() / h;
        a.max(b)
    }

    /// (inf, sup) over a dense core sample plus the tail range.
    pub fn range(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let samples = match &self.core {
            Core::Grid { values } => values.clone(),
            Core::Closure(_) => {
                let n = 2048;
                (0..=n)
                    .map(|i| self.core_eval(-self.core_radius + 2.0 * self.core_radius * i as f64 / n as f64))
                    .collect()
            }
        };
        for v in samples {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        let tail_sup = self.tail.sup_magnitude(self.core_radius);
        match self.tail {
            TailModel::Zero => {
                lo = lo.min(0.0);
                hi = hi.max(0.0);
            }
            _ => {
                for sign in [self.sign_left, self.sign_right] {
                    lo = lo.min((sign * tail_sup).min(0.0));
                    hi = hi.max((sign * tail_sup).max(0.0));
                }
            }
        }
        (lo, hi)
    }

    pub fn oscillation(&self) -> f64 {
        let (lo, hi) = self.range();
        hi - lo
    }

    pub fn sup_norm(&self) -> f64 {
        let (lo, hi) = self.range();
        lo.abs().max(hi.abs())
    }
}

/// JSON-facing spec for a sampled function.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FunctionSpec {
    Grid {
        #[serde(rename = "L")]
        l: f64,
        values: Vec<f64>,
        tail: TailModel,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        lipschitz_hint: Option<f64>,
    },
    ClosedForm {
        name: String,
        #[serde(default)]
        params: serde_json::Map<String, Value>,
        #[serde(rename = "L", default, skip_serializing_if = "Option::is_none")]
        l: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tail: Option<TailModel>,
    },
}

impl FunctionSpec {
    pub fn build(&self) -> Result<SampledFunction> {
        match self {
            FunctionSpec::Grid { l, values, tail, lipschitz_hint } => {
                let sf = SampledFunction::from_grid(*l, values.clone(), *tail)?;
                match lipschitz_hint {
                    Some(k) => sf.with_lipschitz_hint(*k),
                    None => Ok(sf),
                }
            }
            FunctionSpec::ClosedForm { name, params, l, tail } => {
                build_generator(name, params, *l, *tail)
            }
        }
    }
}

fn param(params: &serde_json::Map<String, Value>, key: &str, default: f64) -> f64 {
    params.get(key).and_then(Value::as_f64).unwrap_or(default)
}

/// Registered closed-form generators, in stable alphabetical order.
pub fn generator_names() -> Vec<&'static str> {
    vec!["abs", "bump", "constant", "linear", "quadratic", "truncated_parabola_s"]
}

/// One-line parameter schema per generator, for `list-generators`.
pub fn generator_schema(name: &str) -> Option<&'static str> {
    match name {
        "abs" => Some("scale (default 1): u(x) = scale*|x|; default L=8, tail decay c=scale alpha=-1"),
        "bump" => Some("center (0), radius (1), height (1): smooth compactly supported bump; default L=center+radius, tail zero"),
        "constant" => Some("c (1): u = c; default L=1, tail constant c"),
        "linear" => Some("slope (1), intercept (0): u = slope*x + intercept; default L=8, tail decay c=|slope| alpha=-1"),
        "quadratic" => Some("a (1), b (0), c (0): u = a x^2 + b x + c; default L=8, tail decay c=|a| alpha=-2"),
        "truncated_parabola_s" => Some("s (0.5), scale (1): u = scale*(1-x^2)_+^s; default L=1, tail zero"),
        _ => None,
    }
}

pub fn build_generator(
    name: &str,
    params: &serde_json::Map<String, Value>,
    l: Option<f64>,
    tail: Option<TailModel>,
) -> Result<SampledFunction> {
    match name {
        "abs" => {
            let scale = param(params, "scale", 1.0);
            let l = l.unwrap_or(8.0);
            let tail = tail.unwrap_or(TailModel::Decay { c: scale.abs(), alpha: -1.0 });
            SampledFunction::from_fn("abs", move |x| scale * x.abs(), l, tail)
                .map(|sf| sf.with_breakpoints(vec![0.0]))
        }
        "bump" => {
            let center = param(params, "center", 0.0);
            let radius = param(params, "radius", 1.0);
            let height = param(params, "height", 1.0);
            let l = l.unwrap_or(center.abs() + radius);
            let tail = tail.unwrap_or(TailModel::Zero);
            SampledFunction::from_fn(
                "bump",
                move |x| {
                    let t = (x - center) / radius;
                    if t.abs() < 1.0 {
                        height * (1.0 - 1.0 / (1.0 - t * t)).exp()
                    } else {
                        0.0
                    }
                },
                l,
                tail,
            )
        }
        "constant" => {
            let c = param(params, "c", 1.0);
            let l = l.unwrap_or(1.0);
            let tail = tail.unwrap_or(TailModel::Constant { c });
            SampledFunction::from_fn("constant", move |_| c, l, tail)
        }
        "linear" => {
            let slope = param(params, "slope", 1.0);
            let intercept = param(params, "intercept", 0.0);
            let l = l.unwrap_or(8.0);
            let tail = tail.unwrap_or(if slope == 0.0 {
                TailModel::Constant { c: intercept }
            } else {
                TailModel::Decay { c: slope.abs(), alpha: -1.0 }
            });
            SampledFunction::from_fn("linear", move |x| slope * x + intercept, l, tail)
        }
        "quadratic" => {
            let a = param(params, "a", 1.0);
            let b = param(params, "b", 0.0);
            let c = param(params, "c", 0.0);
            let l = l.unwrap_or(8.0);
            let tail = tail.unwrap_or(TailModel::Decay { c: a.abs(), alpha: -2.0 });
            SampledFunction::from_fn("quadratic", move |x| a * x * x + b * x + c, l, tail)
        }
        "truncated_parabola_s" => {
            let s = param(params, "s", 0.5);
            let scale = param(params, "scale", 1.0);
            let l = l.unwrap_or(1.0);
            let tail = tail.unwrap_or(TailModel::Zero);
            SampledFunction::from_fn(
                "truncated_parabola_s",
                move |x| {
                    let w = 1.0 - x * x;
                    if w > 0.0 {
                        scale * w.powf(s)
                    } else {
                        0.0
                    }
                },
                l,
                tail,
            )
        }
        other => Err(Error::Schema(format!("unknown generator '{other}'"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn grid_interpolation_is_piecewise_linear() {
        let u = SampledFunction::from_grid(1.0, vec![0.0, 1.0, 0.0], TailModel::Zero).unwrap();
        assert_relative_eq!(u.eval(-0.5), 0.5);
        assert_relative_eq!(u.eval(0.25), 0.75);
        assert_eq!(u.eval(3.0), 0.0);
    }

    #[test]
    fn tail_continues_boundary_sign() {
        let u = SampledFunction::from_fn("linear", |x| x, 8.0, TailModel::Decay { c: 1.0, alpha: -1.0 }).unwrap();
        assert_relative_eq!(u.eval(20.0), 20.0);
        assert_relative_eq!(u.eval(-20.0), -20.0);
    }

    #[test]
    fn tail_mismatch_is_rejected() {
        let r = SampledFunction::from_fn("bad", |_| 5.0, 2.0, TailModel::Constant { c: 1.0 });
        assert!(r.is_err());
    }

    #[test]
    fn lipschitz_hint_checks_grid_differences() {
        let ok = SampledFunction::from_grid(1.0, vec![0.0, 1.0, 0.0], TailModel::Zero)
            .unwrap()
            .with_lipschitz_hint(1.0);
        assert!(ok.is_ok());
        let bad = SampledFunction::from_grid(1.0, vec![0.0, 1.0, 0.0], TailModel::Zero)
            .unwrap()
            .with_lipschitz_hint(0.5);
        assert!(bad.is_err());
    }

    #[test]
    fn registry_is_alphabetical_and_buildable() {
        let names = generator_names();
        let mut sorted = names.clone();
        sorted.sort();
        assert_eq!(names, sorted);
        for n in names {
            assert!(generator_schema(n).is_some());
            build_generator(n, &serde_json::Map::new(), None, None).unwrap();
        }
    }

    #[test]
    fn bump_vanishes_smoothly() {
        let u = build_generator("bump", &serde_json::Map::new(), None, None).unwrap();
        assert_relative_eq!(u.eval(0.0), 1.0, max_relative = 1e-12);
        assert_eq!(u.eval(1.0), 0.0);
        assert!(u.eval(0.999) < 1e-10);
    }

    #[test]
    fn oscillation_accounts_for_tails() {
        let u = SampledFunction::from_fn("linear", |x| x, 4.0, TailModel::Decay { c: 1.0, alpha: -1.0 }).unwrap();
        assert_eq!(u.oscillation(), f64::INFINITY);
        let b = build_generator("bump", &serde_json::Map::new(), None, None).unwrap();
        assert_relative_eq!(b.oscillation(), 1.0, max_relative = 1e-9);
    }
}
