//! Quadrature on `[0,1]`, on intervals and on `[0,1]^m`.
//!
//! The refined mode is adaptive bisection: a panel is accepted once the
//! panel rule agrees with the sum over its two halves. Panels whose nodes see
//! a value below `ln 1e-8` (a near-zero of the argument of a logarithm) or a
//! non-finite value are split further regardless of the agreement test.

use serde::{Deserialize, Serialize};

use super::sum::StableSum;
use crate::error::{GrlError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    CompositeMidpoint,
    GaussLegendre,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub scheme: Scheme,
    pub points_per_axis: usize,
    pub refine_near_singularity: bool,
}

impl QuadratureSpec {
    pub fn new(scheme: Scheme, points_per_axis: usize, refine_near_singularity: bool) -> Result<Self> {
        if points_per_axis < 2 {
            return Err(GrlError::invalid(format!(
                "points per axis must be at least 2, got {points_per_axis}"
            )));
        }
        Ok(QuadratureSpec {
            scheme,
            points_per_axis,
            refine_near_singularity,
        })
    }

    pub fn gauss(n: usize) -> Self {
        QuadratureSpec {
            scheme: Scheme::GaussLegendre,
            points_per_axis: n.max(2),
            refine_near_singularity: false,
        }
    }

    pub fn midpoint(n: usize) -> Self {
        QuadratureSpec {
            scheme: Scheme::CompositeMidpoint,
            points_per_axis: n.max(2),
            refine_near_singularity: false,
        }
    }

    pub fn refined(mut self) -> Self {
        self.refine_near_singularity = true;
        self
    }

    fn validate(&self) -> Result<()> {
        QuadratureSpec::new(self.scheme, self.points_per_axis, self.refine_near_singularity).map(|_| ())
    }
}

/// Nodes and weights of a rule on `[0,1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    /// `n`-point Gauss-Legendre, nodes by Newton iteration on `P_n`.
    pub fn gauss_legendre(n: usize) -> Rule {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            // map [-1,1] to [0,1], ascending order
            nodes[i] = 0.5 * (1.0 - x);
            weights[i] = 0.5 * w;
            nodes[n - 1 - i] = 0.5 * (1.0 + x);
            weights[n - 1 - i] = 0.5 * w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.5;
        }
        Rule { nodes, weights }
    }

    pub fn midpoint(n: usize) -> Rule {
        assert!(n >= 1);
        let h = 1.0 / n as f64;
        Rule {
            nodes: (0..n).map(|i| (i as f64 + 0.5) * h).collect(),
            weights: vec![h; n],
        }
    }

    pub fn for_spec(spec: &QuadratureSpec) -> Rule {
        match spec.scheme {
            Scheme::GaussLegendre => Rule::gauss_legendre(spec.points_per_axis),
            Scheme::CompositeMidpoint => Rule::midpoint(spec.points_per_axis),
        }
    }

    /// This rule repeated on `panels` equal sub-intervals of `[a,b]`.
    pub fn composite(&self, a: f64, b: f64, panels: usize) -> Rule {
        let h = (b - a) / panels as f64;
        let mut nodes = Vec::with_capacity(panels * self.nodes.len());
        let mut weights = Vec::with_capacity(panels * self.nodes.len());
        for k in 0..panels {
            let left = a + k as f64 * h;
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                nodes.push(left + h * x);
                weights.push(h * w);
            }
        }
        Rule { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Integrand values below this are treated as near-log-singular (`ln 1e-8`).
const SINGULAR_LOG: f64 = -18.420_680_743_952_367;
const INITIAL_PANELS: usize = 8;
const MAX_DEPTH: u32 = 40;
const FORCED_DEPTH: u32 = 20;
const ABS_TOL: f64 = 1e-13;
const EVAL_BUDGET: usize = 20_000_000;

/// Integral of `f` over `[0,1]`.
pub fn integrate_1d<F: Fn(f64) -> f64>(f: F, spec: &QuadratureSpec) -> Result<f64> {
    integrate_interval(f, 0.0, 1.0, spec)
}

/// Integral of `f` over `[a,b]`.
pub fn integrate_interval<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<f64> {
    spec.validate()?;
    if !(a.is_finite() && b.is_finite()) {
        return Err(GrlError::invalid("integration limits must be finite"));
    }
    let rule = Rule::for_spec(spec);
    if spec.refine_near_singularity {
        let panel_rule = match spec.scheme {
            Scheme::GaussLegendre => Rule::gauss_legendre(spec.points_per_axis.min(12)),
            Scheme::CompositeMidpoint => rule,
        };
        let mut ad = Adaptive {
            f: &f,
            rule: &panel_rule,
            evals: 0,
        };
        ad.run(a, b)
    } else {
        let mut acc = StableSum::new();
        let h = b - a;
        for (x, w) in rule.nodes.iter().zip(&rule.weights) {
            let t = a + h * x;
            let v = f(t);
            if v.is_nan() {
                return Err(GrlError::numerical_at(format!("integrand is NaN at node {t}"), vec![t]));
            }
            acc.add(h * w * v);
        }
        Ok(acc.value())
    }
}

struct Adaptive<'a, F> {
    f: &'a F,
    rule: &'a Rule,
    evals: usize,
}

struct Panel {
    value: f64,
    singular: bool,
    nan_at: Option<f64>,
}

impl<F: Fn(f64) -> f64> Adaptive<'_, F> {
    fn panel(&mut self, a: f64, b: f64) -> Result<Panel> {
        self.evals += self.rule.len();
        if self.evals > EVAL_BUDGET {
            return Err(GrlError::numerical_at(
                "adaptive quadrature exhausted its evaluation budget",
                vec![a, b],
            ));
        }
        let h = b - a;
        let mut acc = StableSum::new();
        let mut singular = false;
        let mut nan_at = None;
        for (x, w) in self.rule.nodes.iter().zip(&self.rule.weights) {
            let t = a + h * x;
            let v = (self.f)(t);
            if v.is_nan() {
                nan_at.get_or_insert(t);
                singular = true;
                continue;
            }
            if !v.is_finite() || v < SINGULAR_LOG {
                singular = true;
            }
            acc.add(h * w * v);
        }
        Ok(Panel {
            value: acc.value(),
            singular,
            nan_at,
        })
    }

    fn run(&mut self, a: f64, b: f64) -> Result<f64> {
        let h = (b - a) / INITIAL_PANELS as f64;
        let mut total = StableSum::new();
        for k in 0..INITIAL_PANELS {
            let lo = a + k as f64 * h;
            let hi = if k + 1 == INITIAL_PANELS { b } else { lo + h };
            let whole = self.panel(lo, hi)?;
            self.refine(lo, hi, whole, 0, &mut total)?;
        }
        Ok(total.value())
    }

    fn refine(&mut self, a: f64, b: f64, whole: Panel, depth: u32, total: &mut StableSum) -> Result<()> {
        let mid = 0.5 * (a + b);
        let left = self.panel(a, mid)?;
        let right = self.panel(mid, b)?;
        let halves = left.value + right.value;
        let any_singular = whole.singular || left.singular || right.singular;
        let finite = halves.is_finite() && whole.value.is_finite();
        let converged = finite && (halves - whole.value).abs() <= ABS_TOL.max(ABS_TOL * (b - a) * 8.0);
        let forced = any_singular && (depth < FORCED_DEPTH || !finite || left.nan_at.is_some() || right.nan_at.is_some());
        if converged && !forced {
            total.add(halves);
            return Ok(());
        }
        if depth >= MAX_DEPTH {
            if let Some(t) = left.nan_at.or(right.nan_at) {
                return Err(GrlError::numerical_at(
                    format!("integrand is NaN at {t} after maximal refinement"),
                    vec![t],
                ));
            }
            if finite {
                total.add(halves);
            }
            // a panel of width ~1e-13 carrying a -inf node is dropped
            return Ok(());
        }
        self.refine(a, mid, left, depth + 1, total)?;
        self.refine(mid, b, right, depth + 1, total)
    }
}

/// Integral over `[0,1]^m` by nested one-dimensional quadrature.
pub fn integrate_nd<F: Fn(&[f64]) -> f64>(f: F, m: usize, spec: &QuadratureSpec) -> Result<f64> {
    if m == 0 {
        return Ok(f(&[]));
    }
    nested(&f, &vec![0.0; m], 0, spec)
}

fn nested<F: Fn(&[f64]) -> f64>(f: &F, base: &[f64], axis: usize, spec: &QuadratureSpec) -> Result<f64> {
    let m = base.len();
    let inner = |x: f64| -> f64 {
        let mut p = base.to_vec();
        p[axis] = x;
        if axis + 1 == m {
            f(&p)
        } else {
            nested(f, &p, axis + 1, spec).unwrap_or(f64::NAN)
        }
    };
    integrate_1d(inner, spec)
}
