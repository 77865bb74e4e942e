//! p-vectors `H = Σ λ_i v_i` and their evaluation against equation systems.
//!
//! Coefficients are indexed by multi-indices over a fixed basis `v_1..v_n`.
//! No inner product is modelled: the equations are identities between basis
//! coefficients, so the basis only has to be fixed, not orthonormal.
//!
//! Exact rationals are the working scalar. Gaussian rationals cover complex
//! coefficients exactly, and `f64` is available for experiments with an
//! explicit [`Tolerance`].

use std::collections::BTreeMap;
use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::equations::{EquationSystem, Label, QuadraticEquation};
use crate::error::{Error, Result};
use crate::multiindex::{GrassmannParams, MultiIndex};

pub type Rational = BigRational;
pub type GaussianRational = Complex<BigRational>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Field {
    #[serde(rename = "Q")]
    Rational,
    #[serde(rename = "Q_i")]
    GaussianRational,
    #[serde(rename = "f64")]
    Float,
}

/// When a floating-point equation value counts as a violation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Tolerance {
    /// `|e(h)| > tol · max_t |c_t λ_a λ_b|`, scale-free since each equation is
    /// homogeneous of degree two.
    Relative(f64),
    /// `|e(h)| > tol`
    Absolute(f64),
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance::Relative(1e-9)
    }
}

pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Send
    + Sync
{
    const FIELD: Field;
    const EXACT: bool;

    fn from_ratio(num: i64, den: i64) -> Self;

    fn magnitude(&self) -> f64;

    /// Serialized real and imaginary parts.
    fn to_parts(&self) -> (String, Option<String>);

    fn from_parts(re: &str, im: Option<&str>) -> Result<Self>;

    fn from_i64(v: i64) -> Self {
        Self::from_ratio(v, 1)
    }

    /// Whether `value` is a violation. Exact scalars ignore the tolerance.
    fn is_violation(value: &Self, _scale: f64, _tol: Tolerance) -> bool {
        !value.is_zero()
    }
}

fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let parsed = match s.split_once('/') {
        Some((num, den)) => {
            let num: BigInt = num.trim().parse().map_err(|_| bad_scalar(s))?;
            let den: BigInt = den.trim().parse().map_err(|_| bad_scalar(s))?;
            if den.is_zero() {
                return Err(bad_scalar(s));
            }
            BigRational::new(num, den)
        }
        None => BigRational::from_integer(s.parse().map_err(|_| bad_scalar(s))?),
    };
    Ok(parsed)
}

fn bad_scalar(s: &str) -> Error {
    Error::Parse(format!("bad scalar `{s}`"))
}

fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

impl Scalar for BigRational {
    const FIELD: Field = Field::Rational;
    const EXACT: bool = true;

    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(num.into(), den.into())
    }

    fn magnitude(&self) -> f64 {
        rational_to_f64(self).abs()
    }

    fn to_parts(&self) -> (String, Option<String>) {
        (self.to_string(), None)
    }

    fn from_parts(re: &str, im: Option<&str>) -> Result<Self> {
        match im.map(parse_rational).transpose()? {
            Some(i) if !i.is_zero() => Err(Error::Parse(
                "field Q coefficient has a non-zero imaginary part".into(),
            )),
            _ => parse_rational(re),
        }
    }
}

impl Scalar for GaussianRational {
    const FIELD: Field = Field::GaussianRational;
    const EXACT: bool = true;

    fn from_ratio(num: i64, den: i64) -> Self {
        Complex::new(BigRational::from_ratio(num, den), BigRational::zero())
    }

    fn magnitude(&self) -> f64 {
        rational_to_f64(&self.re).hypot(rational_to_f64(&self.im))
    }

    fn to_parts(&self) -> (String, Option<String>) {
        (self.re.to_string(), Some(self.im.to_string()))
    }

    fn from_parts(re: &str, im: Option<&str>) -> Result<Self> {
        let im = im.map(parse_rational).transpose()?.unwrap_or_default();
        Ok(Complex::new(parse_rational(re)?, im))
    }
}

impl Scalar for f64 {
    const FIELD: Field = Field::Float;
    const EXACT: bool = false;

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn magnitude(&self) -> f64 {
        self.abs()
    }

    fn to_parts(&self) -> (String, Option<String>) {
        (self.to_string(), None)
    }

    fn from_parts(re: &str, im: Option<&str>) -> Result<Self> {
        if im.is_some_and(|s| s.trim().parse::<f64>() != Ok(0.0)) {
            return Err(Error::Parse(
                "field f64 coefficient has a non-zero imaginary part".into(),
            ));
        }
        match re.trim().parse::<f64>() {
            Ok(v) => Ok(v),
            Err(_) => parse_rational(re).map(|r| rational_to_f64(&r)),
        }
    }

    fn is_violation(value: &Self, scale: f64, tol: Tolerance) -> bool {
        match tol {
            Tolerance::Relative(t) => value.abs() > t * scale,
            Tolerance::Absolute(t) => value.abs() > t,
        }
    }
}

/// A p-vector stored sparsely; absent coefficients are zero.
#[derive(Clone, Debug, PartialEq)]
pub struct PVector<S> {
    params: GrassmannParams,
    coeffs: BTreeMap<MultiIndex, S>,
}

impl<S: Scalar> PVector<S> {
    pub fn zero(params: GrassmannParams) -> Self {
        PVector {
            params,
            coeffs: BTreeMap::new(),
        }
    }

    /// The basis p-vector `v_idx`.
    pub fn basis(params: GrassmannParams, idx: MultiIndex) -> Result<Self> {
        let mut h = Self::zero(params);
        h.set(idx, S::one())?;
        Ok(h)
    }

    pub fn params(&self) -> GrassmannParams {
        self.params
    }

    pub fn set(&mut self, idx: MultiIndex, value: S) -> Result<()> {
        if idx.len() != self.params.p as usize || idx.last_index().unwrap_or(0) > self.params.n {
            return Err(Error::invalid(format!(
                "{idx:?} is not a coordinate for (n,p) = {}",
                self.params
            )));
        }
        if value.is_zero() {
            self.coeffs.remove(&idx);
        } else {
            self.coeffs.insert(idx, value);
        }
        Ok(())
    }

    pub fn get(&self, idx: &MultiIndex) -> Option<&S> {
        self.coeffs.get(idx)
    }

    pub fn coefficient(&self, idx: &MultiIndex) -> S {
        self.coeffs.get(idx).cloned().unwrap_or_else(S::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MultiIndex, &S)> {
        self.coeffs.iter()
    }

    /// Number of non-zero coefficients.
    pub fn support_len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn scaled(&self, c: &S) -> Self {
        let mut out = Self::zero(self.params);
        for (idx, v) in &self.coeffs {
            let value = v.clone() * c.clone();
            if !value.is_zero() {
                out.coeffs.insert(idx.clone(), value);
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.params != other.params {
            return Err(mismatch(self.params, other.params));
        }
        let mut out = self.clone();
        for (idx, v) in &other.coeffs {
            let sum = out.coefficient(idx) + v.clone();
            out.set(idx.clone(), sum)?;
        }
        Ok(out)
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> PVector<T> {
        let mut out = PVector::zero(self.params);
        for (idx, v) in &self.coeffs {
            let value = f(v);
            if !value.is_zero() {
                out.coeffs.insert(idx.clone(), value);
            }
        }
        out
    }

    /// Largest coefficient magnitude.
    pub fn max_norm(&self) -> f64 {
        self.coeffs.values().map(S::magnitude).fold(0.0, f64::max)
    }

    /// Coefficients laid out by colexicographic rank.
    fn dense(&self) -> Vec<Option<&S>> {
        let size = num_integer::binomial(self.params.n as usize, self.params.p as usize);
        let mut out = vec![None; size];
        for (idx, v) in &self.coeffs {
            out[idx.colex_rank()] = Some(v);
        }
        out
    }
}

fn mismatch(eq: GrassmannParams, h: GrassmannParams) -> Error {
    Error::ParamMismatch(eq.n, eq.p, h.n, h.p)
}

/// Determinant by Gaussian elimination. Exact scalars pivot on the first
/// non-zero entry, floats on the largest one.
fn determinant<S: Scalar>(mut rows: Vec<Vec<S>>) -> S {
    let size = rows.len();
    let mut det = S::one();
    for col in 0..size {
        let candidates = (col..size).filter(|&r| !rows[r][col].is_zero());
        let pivot = if S::EXACT {
            candidates.min()
        } else {
            candidates.max_by(|&a, &b| {
                rows[a][col]
                    .magnitude()
                    .total_cmp(&rows[b][col].magnitude())
            })
        };
        let Some(pivot) = pivot else {
            return S::zero();
        };
        if pivot != col {
            rows.swap(pivot, col);
            det = -det;
        }
        let head = rows[col][col].clone();
        det = det * head.clone();
        let (top, below) = rows.split_at_mut(col + 1);
        let pivot_row = &top[col];
        for row in below {
            if row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone() / head.clone();
            for (x, y) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                *x = x.clone() - factor.clone() * y.clone();
            }
        }
    }
    det
}

/// `w_1 ∧ ... ∧ w_p` for coordinate vectors `w_t ∈ F^n`; the coefficient at
/// `i` is the minor on the columns `i`.
pub fn wedge<S: Scalar>(vectors: &[Vec<S>]) -> Result<PVector<S>> {
    let Some(first) = vectors.first() else {
        return Err(Error::invalid("wedge of no vectors"));
    };
    let n = first.len();
    if vectors.iter().any(|v| v.len() != n) {
        return Err(Error::invalid("wedge factors have different lengths"));
    }
    let params = GrassmannParams::new(n as u32, vectors.len() as u32)?;
    let mut h = PVector::zero(params);
    for idx in MultiIndex::all_of_size(params.n, params.p as usize) {
        let minor = vectors
            .iter()
            .map(|v| idx.iter().map(|i| v[(i - 1) as usize].clone()).collect())
            .collect();
        let det = determinant(minor);
        h.set(idx, det)?;
    }
    Ok(h)
}

/// `Σ_t c_t λ_{left_t} λ_{right_t}`
pub fn evaluate<S: Scalar>(eq: &QuadraticEquation, h: &PVector<S>) -> Result<S> {
    if eq.params() != h.params {
        return Err(mismatch(eq.params(), h.params));
    }
    let mut total = S::zero();
    for t in eq.terms() {
        let (Some(a), Some(b)) = (h.get(&t.left), h.get(&t.right)) else {
            continue;
        };
        total = total + S::from_i64(t.coefficient) * a.clone() * b.clone();
    }
    Ok(total)
}

/// Value and largest term magnitude (the latter only for inexact scalars).
fn evaluate_dense<S: Scalar>(eq: &QuadraticEquation, dense: &[Option<&S>]) -> (S, f64) {
    let mut total = S::zero();
    let mut scale = 0.0f64;
    for t in eq.terms() {
        let (Some(a), Some(b)) = (dense[t.left.colex_rank()], dense[t.right.colex_rank()]) else {
            continue;
        };
        let term = S::from_i64(t.coefficient) * a.clone() * b.clone();
        if !S::EXACT {
            scale = scale.max(term.magnitude());
        }
        total = total + term;
    }
    (total, scale)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Violation<S> {
    pub label: Label,
    pub value: S,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Residual<S> {
    /// Largest `|e(h)|` over the violated equations; zero when none are.
    pub max_violation: f64,
    /// Violated equations in system order.
    pub violations: Vec<Violation<S>>,
}

impl<S> Residual<S> {
    pub fn is_satisfied(&self) -> bool {
        self.violations.is_empty()
    }
}

fn check_system_params<S: Scalar>(system: &EquationSystem, h: &PVector<S>) -> Result<()> {
    if system.params() != h.params {
        return Err(mismatch(system.params(), h.params));
    }
    Ok(())
}

pub fn residual<S: Scalar>(
    system: &EquationSystem,
    h: &PVector<S>,
    tol: Tolerance,
) -> Result<Residual<S>> {
    check_system_params(system, h)?;
    let dense = h.dense();
    let violations: Vec<Violation<S>> = system
        .equations()
        .par_iter()
        .filter_map(|eq| {
            let (value, scale) = evaluate_dense(eq, &dense);
            S::is_violation(&value, scale, tol).then(|| Violation {
                label: eq.label().clone(),
                value,
            })
        })
        .collect();
    let max_violation = violations
        .iter()
        .map(|v| v.value.magnitude())
        .fold(0.0, f64::max);
    Ok(Residual {
        max_violation,
        violations,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum SystemChoice {
    Plucker,
    PluckerLike,
}

impl SystemChoice {
    pub fn half_width(self) -> u32 {
        match self {
            SystemChoice::Plucker => 1,
            SystemChoice::PluckerLike => 2,
        }
    }
}

/// A generated system kept around for repeated simplicity tests.
///
/// Outside the generator's range of `p` the system is empty and every
/// p-vector passes.
pub struct SimplicityTest {
    params: GrassmannParams,
    system: Option<EquationSystem>,
}

impl SimplicityTest {
    pub fn new(params: GrassmannParams, choice: SystemChoice) -> Self {
        let system = EquationSystem::generate(params, choice.half_width()).ok();
        SimplicityTest { params, system }
    }

    pub fn system(&self) -> Option<&EquationSystem> {
        self.system.as_ref()
    }

    pub fn is_simple<S: Scalar>(&self, h: &PVector<S>, tol: Tolerance) -> Result<bool> {
        if h.params != self.params {
            return Err(mismatch(self.params, h.params));
        }
        let Some(system) = &self.system else {
            return Ok(true);
        };
        let dense = h.dense();
        let violated = system.equations().par_iter().any(|eq| {
            let (value, scale) = evaluate_dense(eq, &dense);
            S::is_violation(&value, scale, tol)
        });
        Ok(!violated)
    }
}

/// Decides decomposability. The zero p-vector counts as simple.
pub fn is_simple<S: Scalar>(h: &PVector<S>, choice: SystemChoice, tol: Tolerance) -> Result<bool> {
    SimplicityTest::new(h.params, choice).is_simple(h, tol)
}

/// Bound on `|e(h + δ)|` for a simple `h` and noise `|δ_i| <= ε·‖h‖∞`, `ε <= 1`:
/// each of the `terms` unit-coefficient raw terms moves by at most
/// `(2ε + ε²)‖h‖∞² <= 3ε‖h‖∞²`, so `C = 3·terms`.
pub fn perturbation_bound(terms: usize, eps: f64, norm: f64) -> f64 {
    3.0 * terms as f64 * eps * norm * norm
}

fn small_rational(rng: &mut ChaCha8Rng) -> BigRational {
    let num: i64 = rng.gen_range(-9..=9);
    let den: i64 = rng.gen_range(1..=9);
    BigRational::from_ratio(num, den)
}

/// Independent small rationals (`|num| <= 9`, `1 <= den <= 9`) per coordinate.
/// Generically not simple.
pub fn random_pvector(params: GrassmannParams, seed: u64) -> PVector<BigRational> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut h = PVector::zero(params);
    for idx in MultiIndex::all_of_size(params.n, params.p as usize) {
        let v = small_rational(&mut rng);
        h.set(idx, v).expect("index fits params");
    }
    h
}

/// Wedge of `p` vectors with small random rational entries.
pub fn random_simple(params: GrassmannParams, seed: u64) -> PVector<BigRational> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vectors: Vec<Vec<BigRational>> = (0..params.p)
        .map(|_| (0..params.n).map(|_| small_rational(&mut rng)).collect())
        .collect();
    wedge(&vectors).expect("p vectors of length n")
}

#[derive(Serialize, Deserialize)]
struct CoeffJson {
    idx: MultiIndex,
    re: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    im: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct PVectorJson {
    n: u32,
    p: u32,
    field: Field,
    coeffs: Vec<CoeffJson>,
}

impl<S: Scalar> PVector<S> {
    fn to_json_value(&self) -> PVectorJson {
        PVectorJson {
            n: self.params.n,
            p: self.params.p,
            field: S::FIELD,
            coeffs: self
                .coeffs
                .iter()
                .map(|(idx, v)| {
                    let (re, im) = v.to_parts();
                    CoeffJson {
                        idx: idx.clone(),
                        re,
                        im,
                    }
                })
                .collect(),
        }
    }

    fn from_json_value(raw: PVectorJson) -> Result<Self> {
        if raw.field != S::FIELD {
            return Err(Error::Parse(format!(
                "expected field {:?}, found {:?}",
                S::FIELD,
                raw.field
            )));
        }
        let params = GrassmannParams::new(raw.n, raw.p)?;
        let mut h = PVector::zero(params);
        for c in raw.coeffs {
            if h.coeffs.contains_key(&c.idx) {
                return Err(Error::Parse(format!("coefficient {:?} given twice", c.idx)));
            }
            let value = S::from_parts(&c.re, c.im.as_deref())?;
            h.set(c.idx, value)
                .map_err(|e| Error::Parse(e.to_string()))?;
        }
        Ok(h)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&self.to_json_value())?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::from_json_value(serde_json::from_str(s)?)
    }
}

/// A p-vector over whichever field its JSON names.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyPVector {
    Rational(PVector<BigRational>),
    GaussianRational(PVector<GaussianRational>),
    Float(PVector<f64>),
}

impl AnyPVector {
    pub fn from_json(s: &str) -> Result<Self> {
        let raw: PVectorJson = serde_json::from_str(s)?;
        Ok(match raw.field {
            Field::Rational => AnyPVector::Rational(PVector::from_json_value(raw)?),
            Field::GaussianRational => AnyPVector::GaussianRational(PVector::from_json_value(raw)?),
            Field::Float => AnyPVector::Float(PVector::from_json_value(raw)?),
        })
    }

    pub fn to_json(&self) -> Result<String> {
        match self {
            AnyPVector::Rational(h) => h.to_json(),
            AnyPVector::GaussianRational(h) => h.to_json(),
            AnyPVector::Float(h) => h.to_json(),
        }
    }

    pub fn params(&self) -> GrassmannParams {
        match self {
            AnyPVector::Rational(h) => h.params(),
            AnyPVector::GaussianRational(h) => h.params(),
            AnyPVector::Float(h) => h.params(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            AnyPVector::Rational(h) => h.is_zero(),
            AnyPVector::GaussianRational(h) => h.is_zero(),
            AnyPVector::Float(h) => h.is_zero(),
        }
    }

    /// Violated labels with their values printed in the field's notation.
    pub fn violations(
        &self,
        system: &EquationSystem,
        tol: Tolerance,
    ) -> Result<Vec<(Label, String)>> {
        fn list<S: Scalar>(
            h: &PVector<S>,
            system: &EquationSystem,
            tol: Tolerance,
        ) -> Result<Vec<(Label, String)>> {
            Ok(residual(system, h, tol)?
                .violations
                .into_iter()
                .map(|v| {
                    let text = match v.value.to_parts() {
                        (re, None) => re,
                        (re, Some(im)) => format!("{re} + ({im})i"),
                    };
                    (v.label, text)
                })
                .collect())
        }
        match self {
            AnyPVector::Rational(h) => list(h, system, tol),
            AnyPVector::GaussianRational(h) => list(h, system, tol),
            AnyPVector::Float(h) => list(h, system, tol),
        }
    }
}
