//! Repair-bandwidth lower bound for cooperative repair, in exact rationals.
//!
//! A file of `B` packets must fit through every staged cut of the
//! information flow graph. A cut of type `(ℓ_1, ..., ℓ_s)` (a composition
//! of `k` into parts in `1..=r`) bounds
//!
//! ```text
//! B <= d·k·β1 + r·k·β2 - β1·Σ_{i>j} ℓ_i·ℓ_j - β2·Σ ℓ_i²
//! ```
//!
//! Minimising `γ = d·β1 + (r-1)·β2` over all such constraints gives
//! `γ* = B(2d + r - 1) / (k(2d + r - k))` at
//! `(β1, β2) = (2B, B) / (k(2d + r - k))`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{param, Error, Result};

pub type Rational = BigRational;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Decimal rendering rounded half away from zero, e.g. `16/3` -> `"5.333"`.
pub fn decimal(value: &Rational, places: usize) -> String {
    let scale = BigInt::from(10u32).pow(places as u32);
    let scaled = value.abs() * Rational::from_integer(scale.clone());
    let rounded = (scaled + ratio(1, 2)).floor().to_integer();
    let (whole, frac) = rounded.div_rem(&scale);
    let sign = if value.is_negative() && !rounded.is_zero() { "-" } else { "" };
    if places == 0 {
        format!("{sign}{whole}")
    } else {
        format!("{sign}{whole}.{:0>width$}", frac.to_string(), width = places)
    }
}

/// `num/den`, or just `num` when integral.
pub fn show(value: &Rational) -> String {
    if value.is_integer() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SystemParams {
    /// File size in packets.
    pub b: u64,
    pub n: Option<usize>,
    pub k: usize,
    pub d: usize,
    pub r: usize,
}

impl SystemParams {
    pub fn new(b: u64, k: usize, d: usize, r: usize) -> Self {
        Self { b, n: None, k, d, r }
    }

    /// `B = k(2d + r - k)`, the smallest file size at which the optimal
    /// `(β1, β2)` is `(2, 1)`.
    pub fn unit(k: usize, d: usize, r: usize) -> Self {
        let b = (k * (2 * d + r).saturating_sub(k)) as u64;
        Self::new(b, k, d, r)
    }

    fn validate(&self) -> Result<()> {
        if self.k == 0 || self.r == 0 {
            return param(format!("need k >= 1 and r >= 1, got k = {}, r = {}", self.k, self.r));
        }
        if let Some(n) = self.n {
            if self.k > n {
                return param(format!("k = {} exceeds n = {n}", self.k));
            }
        }
        if self.d < self.k {
            return Err(Error::UnsupportedRegime(format!(
                "the bound needs d >= k, got d = {}, k = {}",
                self.d, self.k
            )));
        }
        Ok(())
    }

    fn file(&self) -> Rational {
        Rational::from_integer(BigInt::from(self.b))
    }

    /// `k(2d + r - k)`
    fn denominator(&self) -> Rational {
        int((self.k * (2 * self.d + self.r - self.k)) as i64)
    }
}

/// `γ = d·β1 + (r-1)·β2`
pub fn gamma(d: usize, r: usize, beta1: &Rational, beta2: &Rational) -> Rational {
    int(d as i64) * beta1 + int(r as i64 - 1) * beta2
}

pub fn mbcr_lower_bound(p: &SystemParams) -> Result<Rational> {
    p.validate()?;
    Ok(p.file() * int((2 * p.d + p.r - 1) as i64) / p.denominator())
}

/// The unique `(β1, β2)` at which the bound can be met (for k, r >= 2).
pub fn mbcr_point(p: &SystemParams) -> Result<(Rational, Rational)> {
    p.validate()?;
    let beta2 = p.file() / p.denominator();
    Ok((int(2) * &beta2, beta2))
}

/// Minimum per-node bandwidth for one-at-a-time repair, `2dB / (k(2d + 1 - k))`.
pub fn single_loss_bound(b: u64, k: usize, d: usize) -> Result<Rational> {
    mbcr_lower_bound(&SystemParams::new(b, k, d, 1))
}

/// An ordered composition of `k` with every part in `1..=r`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CutType {
    parts: Vec<usize>,
}

impl CutType {
    pub fn new(parts: Vec<usize>, r: usize) -> Result<Self> {
        if parts.is_empty() {
            return param("cut type needs at least one stage");
        }
        if let Some(bad) = parts.iter().find(|&&l| l == 0 || l > r) {
            return param(format!("cut type part {bad} outside 1..={r}"));
        }
        Ok(Self { parts })
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn k(&self) -> usize {
        self.parts.iter().sum()
    }

    pub fn stages(&self) -> usize {
        self.parts.len()
    }
}

impl fmt::Display for CutType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.parts.iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Every composition of `k` into parts in `1..=r`, lexicographic.
pub fn enumerate_cut_types(k: usize, r: usize) -> Vec<CutType> {
    fn rec(remaining: usize, r: usize, prefix: &mut Vec<usize>, out: &mut Vec<CutType>) {
        if remaining == 0 {
            out.push(CutType { parts: prefix.clone() });
            return;
        }
        for l in 1..=r.min(remaining) {
            prefix.push(l);
            rec(remaining - l, r, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if k > 0 && r > 0 {
        rec(k, r, &mut Vec::new(), &mut out);
    }
    out
}

/// Integer coefficients `(a, b)` of the constraint `B <= a·β1 + b·β2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CutCoefficients {
    pub beta1: i64,
    pub beta2: i64,
}

impl CutCoefficients {
    pub fn eval(&self, beta1: &Rational, beta2: &Rational) -> Rational {
        int(self.beta1) * beta1 + int(self.beta2) * beta2
    }
}

/// Closed form: `a = dk - Σ_{i>j} ℓ_i ℓ_j`, `b = rk - Σ ℓ_i²`.
pub fn cut_coefficients(t: &CutType, d: usize, r: usize) -> CutCoefficients {
    let k = t.k() as i64;
    let (d, r) = (d as i64, r as i64);
    let mut cross = 0i64;
    let mut prefix = 0i64;
    let mut squares = 0i64;
    for &l in &t.parts {
        let l = l as i64;
        cross += l * prefix;
        prefix += l;
        squares += l * l;
    }
    CutCoefficients {
        beta1: d * k - cross,
        beta2: r * k - squares,
    }
}

/// Stage-by-stage form: `Σ_ν ℓ_ν(d - Σ_{j<ν} ℓ_j)·β1 + ℓ_ν(r - ℓ_ν)·β2`.
pub fn staged_cut_coefficients(t: &CutType, d: usize, r: usize) -> CutCoefficients {
    let mut out = CutCoefficients { beta1: 0, beta2: 0 };
    let mut earlier = 0i64;
    for &l in &t.parts {
        let l = l as i64;
        out.beta1 += l * (d as i64 - earlier);
        out.beta2 += l * (r as i64 - l);
        earlier += l;
    }
    out
}

/// Upper bound on the file size imposed by a cut of type `t`.
pub fn file_size_bound(t: &CutType, d: usize, r: usize, beta1: &Rational, beta2: &Rational) -> Rational {
    cut_coefficients(t, d, r).eval(beta1, beta2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpecialCut {
    /// `(1, 1, ..., 1)`
    AllOnes,
    /// `(k)`, present when `k <= r`.
    SingleStage,
    /// `(r, ..., r, b)` with `a = ⌊k/r⌋` full stages and remainder `b`, when `k > r`.
    FullStages { full: usize, remainder: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecialConstraint {
    pub which: SpecialCut,
    pub cut_type: CutType,
    pub coefficients: CutCoefficients,
}

/// The two binding cuts used by the case analysis of the lower bound.
pub fn special_constraints(k: usize, d: usize, r: usize) -> Result<Vec<SpecialConstraint>> {
    SystemParams::new(0, k, d, r).validate()?;
    let mut out = Vec::with_capacity(2);
    let ones = CutType::new(vec![1; k], r)?;
    out.push(SpecialConstraint {
        which: SpecialCut::AllOnes,
        coefficients: cut_coefficients(&ones, d, r),
        cut_type: ones,
    });
    let (which, parts) = if k <= r {
        (SpecialCut::SingleStage, vec![k])
    } else {
        let (full, remainder) = (k / r, k % r);
        let mut parts = vec![r; full];
        if remainder > 0 {
            parts.push(remainder);
        }
        (SpecialCut::FullStages { full, remainder }, parts)
    };
    let t = CutType::new(parts, r)?;
    out.push(SpecialConstraint {
        which,
        coefficients: cut_coefficients(&t, d, r),
        cut_type: t,
    });
    Ok(out)
}

/// Shape of the set of optimal `(β1, β2)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OptimalFace {
    Vertex((Rational, Rational)),
    /// Every convex combination of the two endpoints is optimal.
    Segment((Rational, Rational), (Rational, Rational)),
    /// `(β1, β2 + s)` is optimal for every `s >= 0` (the objective ignores β2).
    Ray((Rational, Rational)),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpOptimum {
    pub beta1: Rational,
    pub beta2: Rational,
    pub gamma: Rational,
    pub face: OptimalFace,
    /// Distinct constraint rows the optimum was computed against.
    pub constraints: Vec<CutCoefficients>,
}

impl LpOptimum {
    pub fn is_unique(&self) -> bool {
        matches!(self.face, OptimalFace::Vertex(_))
    }

    /// Whether `point` is one of the optimal solutions.
    pub fn attains(&self, point: &(Rational, Rational)) -> bool {
        let (x, y) = point;
        match &self.face {
            OptimalFace::Vertex(v) => v == point,
            OptimalFace::Ray((x0, y0)) => x == x0 && y >= y0,
            OptimalFace::Segment((x0, y0), (x1, y1)) => {
                let cross = (x - x0) * (y1 - y0) - (y - y0) * (x1 - x0);
                let within = |v: &Rational, a: &Rational, b: &Rational| {
                    (a <= v && v <= b) || (b <= v && v <= a)
                };
                cross.is_zero() && within(x, x0, x1) && within(y, y0, y1)
            }
        }
    }
}

/// Minimises `d·β1 + (r-1)·β2` over `β1, β2 >= 0` subject to
/// `B <= file_size_bound(t)` for every cut type `t`.
///
/// The feasible region is an upward-closed polyhedron in the plane, so an
/// optimum sits at a vertex; every pairwise intersection of constraint lines
/// and axes is enumerated exactly.
pub fn optimal_tradeoff_lp(p: &SystemParams) -> Result<LpOptimum> {
    p.validate()?;
    let mut constraints: Vec<CutCoefficients> = enumerate_cut_types(p.k, p.r)
        .iter()
        .map(|t| cut_coefficients(t, p.d, p.r))
        .collect();
    constraints.sort();
    constraints.dedup();
    if constraints.iter().any(|c| c.beta1 <= 0 || c.beta2 < 0) {
        return Err(Error::Internal(format!("unexpected constraint signs {constraints:?}")));
    }

    let b = p.file();
    // (a1, a2, rhs): a1·β1 + a2·β2 = rhs
    let mut lines: Vec<(Rational, Rational, Rational)> = constraints
        .iter()
        .map(|c| (int(c.beta1), int(c.beta2), b.clone()))
        .collect();
    lines.push((int(1), int(0), int(0)));
    lines.push((int(0), int(1), int(0)));

    let feasible = |x: &Rational, y: &Rational| {
        !x.is_negative() && !y.is_negative() && constraints.iter().all(|c| c.eval(x, y) >= b)
    };
    let objective = |x: &Rational, y: &Rational| gamma(p.d, p.r, x, y);

    let mut vertices: Vec<(Rational, Rational)> = Vec::new();
    for (i, (a1, b1, c1)) in lines.iter().enumerate() {
        for (a2, b2, c2) in &lines[i + 1..] {
            let det = a1 * b2 - a2 * b1;
            if det.is_zero() {
                continue;
            }
            let x = (c1 * b2 - c2 * b1) / &det;
            let y = (a1 * c2 - a2 * c1) / &det;
            if feasible(&x, &y) && !vertices.contains(&(x.clone(), y.clone())) {
                vertices.push((x, y));
            }
        }
    }
    let best = vertices
        .iter()
        .map(|(x, y)| objective(x, y))
        .min()
        .ok_or_else(|| Error::Internal("LP has no feasible vertex".into()))?;
    let mut optimal: Vec<(Rational, Rational)> = vertices
        .into_iter()
        .filter(|(x, y)| objective(x, y) == best)
        .collect();
    // smallest β2 first, then smallest β1
    optimal.sort_by(|a, b| (&a.1, &a.0).cmp(&(&b.1, &b.0)));

    let first = optimal[0].clone();
    let face = if p.r == 1 {
        // β2 carries no cost and only loosens constraints
        OptimalFace::Ray(first.clone())
    } else if optimal.len() > 1 {
        OptimalFace::Segment(first.clone(), optimal.last().cloned().expect("nonempty"))
    } else {
        OptimalFace::Vertex(first.clone())
    };
    Ok(LpOptimum {
        beta1: first.0,
        beta2: first.1,
        gamma: best,
        face,
        constraints,
    })
}

/// Lossy conversion for display only.
pub fn approx(value: &Rational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

pub fn is_one(value: &Rational) -> bool {
    value.is_one()
}
