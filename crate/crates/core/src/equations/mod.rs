//! Quadratic equation systems in the Plücker coordinates `λ_i`.
//!
//! Both the classical Plücker relations and the Plücker-like relations come
//! from one construction, parametrized by the half-width `m`: for every
//! `j ∈ I^n_{p-m}` and `k ∈ I^n_{p+m}`,
//!
//! ```text
//!   Σ_{ii ⊂ k∖j, |ii| = m}  (-1)^{<jΔk|ii>} λ_{j∪ii} λ_{k∖ii} = 0
//! ```
//!
//! `m = 1` is the classical system, `m = 2` the Plücker-like one. Other
//! values of `m` are generated on request but carry no equivalence claim.

mod render;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use indexmap::map::Entry;
use indexmap::IndexMap;
use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multiindex::{inversion_pairs, GrassmannParams, IndexStyle, MultiIndex};

pub use render::{render_equation_text, render_latex_row, render_system, Format};

/// The generating pair `(j, k)` of an equation.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Label {
    pub j: MultiIndex,
    pub k: MultiIndex,
}

impl Label {
    pub fn new(j: MultiIndex, k: MultiIndex) -> Self {
        Label { j, k }
    }

    /// Parses `12,1345` or `(12,1345)`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim().trim_start_matches('(').trim_end_matches(')');
        let (j, k) = s
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("label `{s}` is not of the form j,k")))?;
        Ok(Label::new(j.parse()?, k.parse()?))
    }

    pub fn render(&self, style: IndexStyle) -> String {
        format!("({},{})", self.j.render(style), self.k.render(style))
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.j, self.k)
    }
}

impl fmt::Debug for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Unordered product `λ_left · λ_right`, stored with `left <= right`.
pub type Monomial = (MultiIndex, MultiIndex);

fn monomial(a: MultiIndex, b: MultiIndex) -> Monomial {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QuadTerm {
    #[serde(rename = "c")]
    pub coefficient: i64,
    pub left: MultiIndex,
    pub right: MultiIndex,
}

impl QuadTerm {
    /// Builds a term, swapping the factors so that `left <= right`.
    pub fn new(coefficient: i64, a: MultiIndex, b: MultiIndex) -> Self {
        let (left, right) = monomial(a, b);
        QuadTerm {
            coefficient,
            left,
            right,
        }
    }

    pub fn monomial(&self) -> Monomial {
        (self.left.clone(), self.right.clone())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Form {
    Raw,
    Canonical,
}

/// A quadratic form with like terms collected and zero coefficients dropped.
///
/// This is the exact polynomial an equation's left-hand side represents, and
/// is what identity checks compare.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct QuadPoly(BTreeMap<Monomial, i64>);

impl QuadPoly {
    pub fn zero() -> Self {
        QuadPoly::default()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Adds `factor · λ_a λ_b`.
    pub fn add_term(&mut self, factor: i64, a: MultiIndex, b: MultiIndex) {
        if factor == 0 {
            return;
        }
        let key = monomial(a, b);
        let slot = self.0.entry(key.clone()).or_insert(0);
        *slot = slot
            .checked_add(factor)
            .expect("equation coefficient overflow");
        if *slot == 0 {
            self.0.remove(&key);
        }
    }

    /// `self += factor · other`
    pub fn add_scaled(&mut self, other: &QuadPoly, factor: i64) {
        for ((a, b), &c) in &other.0 {
            let c = c
                .checked_mul(factor)
                .expect("equation coefficient overflow");
            self.add_term(c, a.clone(), b.clone());
        }
    }

    pub fn scaled(&self, factor: i64) -> QuadPoly {
        let mut out = QuadPoly::zero();
        out.add_scaled(self, factor);
        out
    }

    pub fn coefficient(&self, a: &MultiIndex, b: &MultiIndex) -> i64 {
        let key = monomial(a.clone(), b.clone());
        self.0.get(&key).copied().unwrap_or(0)
    }

    /// Terms in lexicographic `(left, right)` order.
    pub fn terms(&self) -> impl Iterator<Item = QuadTerm> + '_ {
        self.0.iter().map(|((a, b), &c)| QuadTerm {
            coefficient: c,
            left: a.clone(),
            right: b.clone(),
        })
    }

    pub fn monomials(&self) -> BTreeSet<Monomial> {
        self.0.keys().cloned().collect()
    }

    /// Divides out the content and makes the leading coefficient positive.
    pub fn normalized(&self) -> QuadPoly {
        let content = self.0.values().fold(0i64, |g, c| g.gcd(c));
        if content == 0 {
            return QuadPoly::zero();
        }
        let leading = *self.0.values().next().unwrap();
        let divisor = if leading < 0 { -content } else { content };
        QuadPoly(
            self.0
                .iter()
                .map(|(k, &c)| (k.clone(), c / divisor))
                .collect(),
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadraticEquation {
    params: GrassmannParams,
    label: Label,
    terms: Vec<QuadTerm>,
    form: Form,
}

impl QuadraticEquation {
    /// Generates the raw equation for `label` at half-width `m`, one `±1` term
    /// per `m`-subset of `k∖j` in lexicographic order.
    pub fn generate(params: GrassmannParams, m: u32, label: Label) -> Result<Self> {
        check_half_width(params, m)?;
        let (p, m_us) = (params.p as usize, m as usize);
        if label.j.len() != p - m_us || label.k.len() != p + m_us {
            return Err(Error::invalid(format!(
                "label {label} needs |j| = {} and |k| = {}",
                p - m_us,
                p + m_us
            )));
        }
        if label.j.last_index().max(label.k.last_index()).unwrap_or(0) > params.n {
            return Err(Error::invalid(format!(
                "label {label} exceeds n = {}",
                params.n
            )));
        }
        Ok(Self::generate_unchecked(params, m as usize, label))
    }

    fn generate_unchecked(params: GrassmannParams, m: usize, label: Label) -> Self {
        let sym = label.j.symmetric_difference(&label.k);
        let free = label.k.difference(&label.j);
        let terms = free
            .subsets_of_size(m)
            .map(|moved| {
                let sign = if inversion_pairs(&sym, &moved).is_multiple_of(2) {
                    1
                } else {
                    -1
                };
                QuadTerm::new(sign, label.j.union(&moved), label.k.difference(&moved))
            })
            .collect();
        QuadraticEquation {
            params,
            label,
            terms,
            form: Form::Raw,
        }
    }

    /// Builds an equation from explicit terms. Terms must have `p` indices each.
    pub fn from_terms(
        params: GrassmannParams,
        label: Label,
        terms: Vec<QuadTerm>,
        form: Form,
    ) -> Result<Self> {
        for t in &terms {
            if t.coefficient == 0 {
                return Err(Error::invalid("zero coefficient in term"));
            }
            for idx in [&t.left, &t.right] {
                if idx.len() != params.p as usize || idx.last_index().unwrap_or(0) > params.n {
                    return Err(Error::invalid(format!(
                        "λ_{idx} is not a coordinate for (n,p) = {params}"
                    )));
                }
            }
        }
        let terms = terms
            .into_iter()
            .map(|t| QuadTerm::new(t.coefficient, t.left, t.right))
            .collect();
        let eq = QuadraticEquation {
            params,
            label,
            terms,
            form,
        };
        if form == Form::Canonical && eq.canonicalize().terms != eq.terms {
            return Err(Error::invalid(format!(
                "equation {} is marked canonical but is not",
                eq.label
            )));
        }
        Ok(eq)
    }

    pub fn params(&self) -> GrassmannParams {
        self.params
    }

    pub fn label(&self) -> &Label {
        &self.label
    }

    pub fn terms(&self) -> &[QuadTerm] {
        &self.terms
    }

    pub fn form(&self) -> Form {
        self.form
    }

    /// The collected polynomial of the left-hand side.
    pub fn collect(&self) -> QuadPoly {
        let mut poly = QuadPoly::zero();
        for t in &self.terms {
            poly.add_term(t.coefficient, t.left.clone(), t.right.clone());
        }
        poly
    }

    /// Collects like terms, drops zeros, divides by the coefficient gcd, sorts
    /// terms by `(left, right)` and makes the first coefficient positive.
    pub fn canonicalize(&self) -> QuadraticEquation {
        QuadraticEquation {
            params: self.params,
            label: self.label.clone(),
            terms: self.collect().normalized().terms().collect(),
            form: Form::Canonical,
        }
    }

    /// The canonical equation of an arbitrary collected polynomial.
    pub fn canonical_from_poly(params: GrassmannParams, label: Label, poly: &QuadPoly) -> Self {
        QuadraticEquation {
            params,
            label,
            terms: poly.normalized().terms().collect(),
            form: Form::Canonical,
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.collect().is_zero()
    }

    pub fn monomials(&self) -> BTreeSet<Monomial> {
        self.terms.iter().map(QuadTerm::monomial).collect()
    }
}

pub fn check_half_width(params: GrassmannParams, m: u32) -> Result<()> {
    let limit = params.p.min(params.n - params.p);
    if m < 1 || m > limit {
        return Err(Error::invalid(format!(
            "half-width m = {m} needs 1 <= m <= min(p, n-p) = {limit} for (n,p) = {params}"
        )));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquationSystem {
    params: GrassmannParams,
    m: u32,
    equations: Vec<QuadraticEquation>,
}

impl EquationSystem {
    /// Raw system for half-width `m`, ordered with `j` in the outer loop and `k`
    /// in the inner one. Runs on the current rayon pool; the order does not
    /// depend on the number of threads.
    pub fn generate(params: GrassmannParams, m: u32) -> Result<Self> {
        check_half_width(params, m)?;
        let (p, m_us) = (params.p as usize, m as usize);
        let js = MultiIndex::all_of_size(params.n, p - m_us);
        let ks = MultiIndex::all_of_size(params.n, p + m_us);
        let equations = js
            .par_iter()
            .flat_map_iter(|j| {
                ks.iter().map(move |k| {
                    QuadraticEquation::generate_unchecked(
                        params,
                        m_us,
                        Label::new(j.clone(), k.clone()),
                    )
                })
            })
            .collect();
        Ok(EquationSystem {
            params,
            m,
            equations,
        })
    }

    pub fn from_equations(
        params: GrassmannParams,
        m: u32,
        equations: Vec<QuadraticEquation>,
    ) -> Result<Self> {
        if let Some(eq) = equations.iter().find(|e| e.params != params) {
            return Err(Error::ParamMismatch(
                eq.params.n,
                eq.params.p,
                params.n,
                params.p,
            ));
        }
        Ok(EquationSystem {
            params,
            m,
            equations,
        })
    }

    pub fn params(&self) -> GrassmannParams {
        self.params
    }

    pub fn half_width(&self) -> u32 {
        self.m
    }

    /// Half-widths other than 1 and 2 have no equivalence guarantee.
    pub fn is_experimental(&self) -> bool {
        self.m >= 3
    }

    pub fn equations(&self) -> &[QuadraticEquation] {
        &self.equations
    }

    pub fn len(&self) -> usize {
        self.equations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.equations.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, QuadraticEquation> {
        self.equations.iter()
    }

    pub fn get(&self, label: &Label) -> Option<&QuadraticEquation> {
        self.equations.iter().find(|e| &e.label == label)
    }

    /// 1-based row, as in printed tables.
    pub fn row(&self, ordinal: usize) -> Option<&QuadraticEquation> {
        ordinal.checked_sub(1).and_then(|i| self.equations.get(i))
    }

    pub fn canonical(&self) -> EquationSystem {
        EquationSystem {
            params: self.params,
            m: self.m,
            equations: self
                .equations
                .par_iter()
                .map(|e| e.canonicalize())
                .collect(),
        }
    }
}

impl<'a> IntoIterator for &'a EquationSystem {
    type Item = &'a QuadraticEquation;
    type IntoIter = std::slice::Iter<'a, QuadraticEquation>;

    fn into_iter(self) -> Self::IntoIter {
        self.equations.iter()
    }
}

/// Classical Plücker relations, `1 <= p <= n-1`.
pub fn gen_plucker(params: GrassmannParams) -> Result<EquationSystem> {
    EquationSystem::generate(params, 1)
}

/// Plücker-like relations, `2 <= p <= n-2`.
pub fn gen_plucker_like(params: GrassmannParams) -> Result<EquationSystem> {
    EquationSystem::generate(params, 2)
}

pub fn gen_generalized(params: GrassmannParams, m: u32) -> Result<EquationSystem> {
    EquationSystem::generate(params, m)
}

/// A system with trivial equations removed and repeats merged.
#[derive(Clone, Debug)]
pub struct Deduplicated {
    /// Distinct non-trivial canonical equations, in order of first occurrence.
    /// Each keeps the label of its first occurrence.
    pub reduced: EquationSystem,
    /// Every label producing a given canonical equation, keyed by its terms.
    pub multiplicity: IndexMap<Vec<QuadTerm>, Vec<Label>>,
    /// Labels whose equation is `0 = 0`.
    pub trivial: Vec<Label>,
}

impl Deduplicated {
    pub fn sources(&self, eq: &QuadraticEquation) -> &[Label] {
        let key = eq.canonicalize().terms;
        self.multiplicity
            .get(&key)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }
}

pub fn dedupe(system: &EquationSystem) -> Deduplicated {
    let canonical = system.canonical();
    let mut multiplicity: IndexMap<Vec<QuadTerm>, Vec<Label>> = IndexMap::new();
    let mut reduced = Vec::new();
    let mut trivial = Vec::new();
    for eq in canonical.equations {
        if eq.terms.is_empty() {
            trivial.push(eq.label);
            continue;
        }
        match multiplicity.entry(eq.terms.clone()) {
            Entry::Occupied(mut seen) => seen.get_mut().push(eq.label),
            Entry::Vacant(slot) => {
                slot.insert(vec![eq.label.clone()]);
                reduced.push(eq);
            }
        }
    }
    Deduplicated {
        reduced: EquationSystem {
            params: system.params,
            m: system.m,
            equations: reduced,
        },
        multiplicity,
        trivial,
    }
}
