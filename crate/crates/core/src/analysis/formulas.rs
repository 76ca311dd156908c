//! Closed forms: LA on odd choice matching games, formula (E) for two
//! touched edges with `n` untouched ones, and the three-choice fixed point.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigUint;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{from_biguint_scaled, is_probability, q, qi, scaled_isqrt, to_decimal, to_f64, Q};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaClosedForm {
    pub m: usize,
    /// `per_round[ℓ-1]` is the probability of first coordinating in round ℓ.
    pub per_round: Vec<Q>,
    pub ect: Q,
}

/// `P_{ℓ,m} = 1/(m−2ℓ+2) · ∏_{k=0}^{ℓ−2} (m−2k−1)/(m−2k)` and
/// `E_m = Σ ℓ·P_{ℓ,m}` for odd `m`.
pub fn la_cm_closed_form(m: usize) -> Result<LaClosedForm> {
    if m % 2 == 0 {
        return Err(Error::EvenM(m));
    }
    let m_i = m as i64;
    let rounds = m.div_ceil(2);
    let mut per_round = Vec::with_capacity(rounds);
    let mut survive = qi(1);
    for l in 1..=rounds as i64 {
        if l >= 2 {
            let k = l - 2;
            survive *= q(m_i - 2 * k - 1, m_i - 2 * k);
        }
        per_round.push(&survive * q(1, m_i - 2 * l + 2));
    }
    let total = per_round.iter().fold(Q::zero(), |a, p| a + p);
    debug_assert_eq!(total, qi(1));
    let ect = per_round
        .iter()
        .enumerate()
        .fold(Q::zero(), |a, (i, p)| a + qi(i as i64 + 1) * p);
    Ok(LaClosedForm { m, per_round, ect })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormulaEParams {
    pub p: Q,
    pub n: usize,
    pub e1: Q,
    pub e2: Q,
}

/// Where the quadratic attains its minimum over `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Minimizers {
    Points(Vec<Q>),
    Interval(Q, Q),
}

impl Minimizers {
    pub fn contains(&self, p: &Q) -> bool {
        match self {
            Minimizers::Points(v) => v.contains(p),
            Minimizers::Interval(a, b) => a <= p && p <= b,
        }
    }
}

impl fmt::Display for Minimizers {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Minimizers::Points(v) => {
                let parts: Vec<String> = v.iter().map(|x| format!("{x}")).collect();
                write!(f, "{{{}}}", parts.join(","))
            }
            Minimizers::Interval(a, b) => write!(f, "[{a},{b}]"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormulaE {
    pub value: Q,
    /// Coefficients of `A p² + B p + C`.
    pub a: Q,
    pub b: Q,
    pub c: Q,
    pub minimizers: Minimizers,
    pub minimum: Q,
}

/// Evaluates
/// `p²(½ + ½(1+E₁)) + 2p(1−p)·2 + (1−p)²(1/n + ((n−1)/n)(1+E₂))`
/// and minimizes it over `p ∈ [0,1]` from its coefficients.
pub fn formula_e(params: &FormulaEParams) -> Result<FormulaE> {
    let FormulaEParams { p, n, e1, e2 } = params;
    if !is_probability(p) {
        return Err(Error::DomainError(format!("p = {p} is outside [0,1]")));
    }
    if *n == 0 {
        return Err(Error::DomainError("n must be at least 1".into()));
    }
    if *e1 < qi(1) || *e2 < qi(1) {
        return Err(Error::DomainError("E1 and E2 must be at least 1".into()));
    }
    let n_q = qi(*n as i64);
    let k = qi(1) + (&n_q - qi(1)) * e2 / &n_q;
    let a = e1 / qi(2) - qi(3) + &k;
    let b = qi(4) - qi(2) * &k;
    let c = k;
    let eval = |x: &Q| &a * x * x + &b * x + &c;
    let value = eval(p);
    let (zero, one) = (qi(0), qi(1));
    let minimizers = if a.is_positive() {
        let v = -&b / (qi(2) * &a);
        let v = if v < zero { zero.clone() } else if v > one { one.clone() } else { v };
        Minimizers::Points(vec![v])
    } else if a.is_negative() {
        let (f0, f1) = (eval(&zero), eval(&one));
        match f0.cmp(&f1) {
            core::cmp::Ordering::Less => Minimizers::Points(vec![zero.clone()]),
            core::cmp::Ordering::Greater => Minimizers::Points(vec![one.clone()]),
            core::cmp::Ordering::Equal => Minimizers::Points(vec![zero.clone(), one.clone()]),
        }
    } else if b.is_positive() {
        Minimizers::Points(vec![zero.clone()])
    } else if b.is_negative() {
        Minimizers::Points(vec![one.clone()])
    } else {
        Minimizers::Interval(zero.clone(), one.clone())
    };
    let minimum = match &minimizers {
        Minimizers::Points(v) => eval(&v[0]),
        Minimizers::Interval(lo, _) => eval(lo),
    };
    Ok(FormulaE { value, a, b, c, minimizers, minimum })
}

pub const DECIMAL_DIGITS: u32 = 50;
const GUARD_DIGITS: u32 = 60;

/// An algebraic constant carried by name with a high-precision shadow.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Algebraic {
    pub symbol: &'static str,
    /// Truncated to `GUARD_DIGITS` decimal places.
    pub approx: Q,
}

impl Algebraic {
    pub fn decimal(&self, digits: usize) -> String {
        to_decimal(&self.approx, digits)
    }

    pub fn to_f64(&self) -> f64 {
        to_f64(&self.approx)
    }
}

impl fmt::Display for Algebraic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ≈ {}", self.symbol, self.decimal(DECIMAL_DIGITS as usize))
    }
}

pub const FIXED_POINT_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct FixedPoint {
    pub e2: Algebraic,
    pub p2: Algebraic,
    pub e1: Algebraic,
    pub p1: Algebraic,
    /// Results of the damped iteration from each starting point.
    pub iterated: Vec<(f64, f64, f64)>,
}

/// The stationary values of the symmetric 3-choice analysis: `E₂` solves
/// `E₂ = g(p₂*, E₂)` and `E₁` solves `E₁ = f(p₁*, E₁, E₂)` at the optimal
/// mixing probabilities.
pub fn three_choice_fixed_point() -> Result<FixedPoint> {
    let d = GUARD_DIGITS;
    let scale = BigUint::from(10u32).pow(d);
    let scale_sq = &scale * &scale;
    let sqrt17 = scaled_isqrt(&BigUint::from(17u32), d);
    // E2 = (3 + √17)/4
    let e2 = from_biguint_scaled(&scale * 3u32 + &sqrt17, d) / qi(4);
    // E1 = (1 + √(4 + √17))/2, the inner sum brought to scale 10^(2d)
    let inner = &scale_sq * 4u32 + &sqrt17 * &scale;
    let e1 = from_biguint_scaled(&scale + inner.sqrt(), d) / qi(2);
    let p2 = qi(2) * &e2 / (qi(1) + qi(3) * &e2);
    let p1 = &e1 / (&e1 + &e2);
    let trunc = |x: Q| -> Q {
        let s = Q::from_integer(num_bigint::BigInt::from(10u32).pow(d));
        (x * &s).trunc() / s
    };

    let iterated = [1.0, 1.5, 3.0]
        .iter()
        .map(|&x0| iterate(x0))
        .collect::<Result<Vec<_>>>()?;
    Ok(FixedPoint {
        e2: Algebraic { symbol: "(3+√17)/4", approx: trunc(e2) },
        p2: Algebraic { symbol: "2E₂/(1+3E₂)", approx: trunc(p2) },
        e1: Algebraic { symbol: "(1+√(4+√17))/2", approx: trunc(e1) },
        p1: Algebraic { symbol: "E₁/(E₁+E₂)", approx: trunc(p1) },
        iterated,
    })
}

const MAX_STEPS: usize = 10_000;
const DAMPING: f64 = 0.5;

/// Damped iteration of `E ← g(p*(E), E)` and then `E₁ ← f(p*(E₁), E₁, E₂)`
/// started at `x0`; returns `(x0, E₂, E₁)`.
fn iterate(x0: f64) -> Result<(f64, f64, f64)> {
    let h2 = |e: f64| {
        let p = 2.0 * e / (1.0 + 3.0 * e);
        0.5 * (1.0 + 3.0 * e) * p * p - 2.0 * e * p + (1.0 + e)
    };
    let e2 = damped(x0, h2)?;
    let h1 = |e: f64| {
        let p = e / (e + e2);
        (e + e2) * p * p - 2.0 * e * p + (1.0 + e)
    };
    let e1 = damped(x0, h1)?;
    Ok((x0, e2, e1))
}

fn damped(mut x: f64, h: impl Fn(f64) -> f64) -> Result<f64> {
    for _ in 0..MAX_STEPS {
        let next = (1.0 - DAMPING) * x + DAMPING * h(x);
        if (next - x).abs() < FIXED_POINT_TOLERANCE * 1e-2 {
            return Ok(next);
        }
        x = next;
    }
    Err(Error::NoConvergence(MAX_STEPS))
}
