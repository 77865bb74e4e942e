//! Structural checks relating the Plücker-like system to the Plücker one.
//!
//! Write a Plücker-like label as `q = j∩k`, `j' = j∖k`, `k' = k∖j`. The
//! number `|q|` splits the system into three cases:
//!
//! * `|q| = p-2`: the equation collapses to a 3-term Plücker equation.
//! * `|q| = p-3`: 10-term equations, grouped in families of six that share
//!   their monomials; signed pairwise sums give 4-term Plücker equations.
//! * `|q| <= p-4`: equations with `C(p+2-|q|, 2)` terms.
//!
//! Every check here is carried out on exact integer polynomials, first on raw
//! generator output and then on canonical forms.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use num_bigint::BigUint;
use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize, Serializer};

use crate::equations::{
    dedupe, gen_plucker, gen_plucker_like, Label, Monomial, QuadPoly, QuadTerm, QuadraticEquation,
};
use crate::error::{Error, Result};
use crate::multiindex::{inversion_pairs, multinomial, GrassmannParams, MultiIndex};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Case {
    I,
    II,
    III,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QClass {
    pub q_size: usize,
    pub q: MultiIndex,
    pub j_prime: MultiIndex,
    pub k_prime: MultiIndex,
    /// `C(p+2-q, 2)`, the number of raw terms up to repetition.
    pub predicted_terms: u64,
    pub case: Case,
}

fn check_plucker_like_range(params: GrassmannParams) -> Result<()> {
    if params.p < 2 || params.p + 2 > params.n {
        return Err(Error::invalid(format!(
            "Plücker-like equations need 2 <= p <= n-2, got (n,p) = {params}"
        )));
    }
    Ok(())
}

fn check_plucker_like_label(params: GrassmannParams, label: &Label) -> Result<()> {
    let p = params.p as usize;
    if p < 2 || label.j.len() != p - 2 || label.k.len() != p + 2 {
        return Err(Error::invalid(format!(
            "{label} is not a Plücker-like label for (n,p) = {params}"
        )));
    }
    if label.j.last_index().max(label.k.last_index()).unwrap_or(0) > params.n {
        return Err(Error::invalid(format!("{label} exceeds n = {}", params.n)));
    }
    Ok(())
}

pub fn classify(params: GrassmannParams, label: &Label) -> Result<QClass> {
    check_plucker_like_label(params, label)?;
    let q = label.j.intersection(&label.k);
    let j_prime = label.j.difference(&label.k);
    let k_prime = label.k.difference(&label.j);
    let q_size = q.len();
    let p = params.p as usize;
    let case = if q_size == p - 2 {
        Case::I
    } else if q_size + 3 == p {
        Case::II
    } else {
        Case::III
    };
    let free = k_prime.len() as u64;
    Ok(QClass {
        q_size,
        q,
        j_prime,
        k_prime,
        predicted_terms: free * (free - 1) / 2,
        case,
    })
}

/// Multinomial with possibly negative parts; zero when any part is negative.
fn multinomial_or_zero(n: i64, parts: &[i64]) -> BigUint {
    if parts.iter().any(|&x| x < 0) {
        return BigUint::default();
    }
    let parts: Vec<u64> = parts.iter().map(|&x| x as u64).collect();
    multinomial(n as u64, &parts).expect("parts sum to n")
}

fn as_decimal<S: Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CaseCount {
    pub observed: u64,
    #[serde(serialize_with = "as_decimal")]
    pub predicted: BigUint,
    /// Canonical term count every equation of the case should have.
    pub terms_per_equation: u64,
    /// Whether every observed equation had exactly that many terms.
    pub term_counts_match: bool,
}

impl CaseCount {
    fn new(predicted: BigUint, terms_per_equation: u64) -> Self {
        CaseCount {
            observed: 0,
            predicted,
            terms_per_equation,
            term_counts_match: true,
        }
    }

    pub fn holds(&self) -> bool {
        BigUint::from(self.observed) == self.predicted && self.term_counts_match
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CensusReport {
    pub n: u32,
    pub p: u32,
    pub total: u64,
    #[serde(serialize_with = "as_decimal")]
    pub predicted_total: BigUint,
    pub case_i: CaseCount,
    pub case_ii: CaseCount,
    /// Groups of 10-term equations sharing one monomial set.
    pub families_observed: u64,
    #[serde(serialize_with = "as_decimal")]
    pub families_predicted: BigUint,
    /// Whether every such group has exactly six members.
    pub families_of_six: bool,
    /// Keyed by `|q|`.
    pub case_iii: BTreeMap<usize, CaseCount>,
    pub all_distinct: bool,
    pub all_nontrivial: bool,
    /// Labels that fell outside every predicted class.
    pub unclassified: Vec<Label>,
}

impl CensusReport {
    pub fn holds(&self) -> bool {
        let case_sum = self.case_i.observed
            + self.case_ii.observed
            + self.case_iii.values().map(|c| c.observed).sum::<u64>();
        self.case_i.holds()
            && self.case_ii.holds()
            && self.case_iii.values().all(CaseCount::holds)
            && BigUint::from(self.total) == self.predicted_total
            && case_sum == self.total
            && BigUint::from(self.families_observed) == self.families_predicted
            && self.families_of_six
            && self.all_distinct
            && self.all_nontrivial
            && self.unclassified.is_empty()
    }

    /// `|Plücker| / |Plücker-like| = (p+2)(n-p+2) / ((p-1)(n-p-1))`, reduced.
    pub fn ratio(&self) -> (u64, u64) {
        let (n, p) = (self.n as u64, self.p as u64);
        let num = (p + 2) * (n - p + 2);
        let den = (p - 1) * (n - p - 1);
        let g = num.gcd(&den);
        (num / g, den / g)
    }
}

/// Counts the Plücker-like system by case and compares with the multinomial
/// predictions.
pub fn census(params: GrassmannParams) -> Result<CensusReport> {
    check_plucker_like_range(params)?;
    let (n, p) = (params.n as i64, params.p as i64);
    let system = gen_plucker_like(params)?.canonical();

    let mut case_i = CaseCount::new(multinomial_or_zero(n, &[4, p - 2, n - p - 2]), 3);
    let mut case_ii = CaseCount::new(multinomial_or_zero(n, &[1, 5, p - 3, n - p - 3]), 10);
    let mut case_iii: BTreeMap<usize, CaseCount> = (0.max(2 * p - n)..=p - 4)
        .map(|q| {
            let free = (p + 2 - q) as u64;
            let predicted = multinomial_or_zero(n, &[q, p - 2 - q, p + 2 - q, n + q - 2 * p]);
            (q as usize, CaseCount::new(predicted, free * (free - 1) / 2))
        })
        .collect();

    let mut families: HashMap<BTreeSet<Monomial>, u64> = HashMap::new();
    let mut seen: HashSet<&[QuadTerm]> = HashSet::new();
    let mut all_distinct = true;
    let mut all_nontrivial = true;
    let mut unclassified = Vec::new();

    for eq in &system {
        all_nontrivial &= !eq.terms().is_empty();
        all_distinct &= seen.insert(eq.terms());
        let class = classify(params, eq.label())?;
        let slot = match class.case {
            Case::I => &mut case_i,
            Case::II => {
                *families.entry(eq.monomials()).or_default() += 1;
                &mut case_ii
            }
            Case::III => match case_iii.get_mut(&class.q_size) {
                Some(slot) => slot,
                None => {
                    unclassified.push(eq.label().clone());
                    continue;
                }
            },
        };
        slot.observed += 1;
        slot.term_counts_match &= eq.terms().len() as u64 == slot.terms_per_equation;
    }

    Ok(CensusReport {
        n: params.n,
        p: params.p,
        total: system.len() as u64,
        predicted_total: multinomial_or_zero(n, &[p - 2, n - p + 2])
            * multinomial_or_zero(n, &[p + 2, n - p - 2]),
        case_i,
        case_ii,
        families_observed: families.len() as u64,
        families_predicted: multinomial_or_zero(n, &[6, p - 3, n - p - 3]),
        families_of_six: families.values().all(|&c| c == 6),
        case_iii,
        all_distinct,
        all_nontrivial,
        unclassified,
    })
}

fn sign(exponent: usize) -> i64 {
    if exponent.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// The signed Plücker labels `(j∪i, k∖i)`, `i ∈ k∖j`, whose sum is twice the
/// Plücker-like equation `(j, k)`.
pub fn prop1_expand(params: GrassmannParams, label: &Label) -> Result<Vec<(i64, Label)>> {
    check_plucker_like_label(params, label)?;
    let sym = label.j.symmetric_difference(&label.k);
    let free = label.k.difference(&label.j);
    Ok(free
        .subsets_of_size(1)
        .map(|i| {
            let s = sign(inversion_pairs(&sym, &i));
            (s, Label::new(label.j.union(&i), label.k.difference(&i)))
        })
        .collect())
}

/// Checks `Σ_i ±P(j∪i, k∖i) = 2·PL(j, k)` on raw generator output.
pub fn decomposition_identity(params: GrassmannParams, label: &Label) -> Result<bool> {
    let mut lhs = QuadPoly::zero();
    for (s, plucker_label) in prop1_expand(params, label)? {
        let eq = QuadraticEquation::generate(params, 1, plucker_label)?;
        lhs.add_scaled(&eq.collect(), s);
    }
    let rhs = QuadraticEquation::generate(params, 2, label.clone())?
        .collect()
        .scaled(2);
    Ok(lhs == rhs)
}

/// Six 10-term Plücker-like equations sharing their monomials. Member `E_i`
/// (1-based, ascending `l_i`) has `j = q∪l_i` and `k = q∪(l∖l_i)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairFamily {
    pub q: MultiIndex,
    pub l: MultiIndex,
    pub members: Vec<Label>,
}

impl PairFamily {
    pub fn new(q: MultiIndex, l: MultiIndex) -> Result<Self> {
        if l.len() != 6 || !q.intersection(&l).is_empty() {
            return Err(Error::invalid(format!(
                "family needs six indices disjoint from q, got q = {q:?}, l = {l:?}"
            )));
        }
        let members = l
            .subsets_of_size(1)
            .map(|li| Label::new(q.union(&li), q.union(&l.difference(&li))))
            .collect();
        Ok(PairFamily { q, l, members })
    }

    /// `E_i`, 1-based.
    pub fn member(&self, i: usize) -> Option<&Label> {
        i.checked_sub(1).and_then(|t| self.members.get(t))
    }

    fn pick(&self, positions: &[usize]) -> MultiIndex {
        let mut indices: Vec<u32> = positions.iter().map(|&c| self.l.get(c).unwrap()).collect();
        indices.sort_unstable();
        MultiIndex::new(indices).expect("distinct positions")
    }

    /// `(q∪l_{ii'}, q∪(l∖l_{ii'}))`, the Plücker label a pair collapses to.
    pub fn target_label(&self, i: usize, i_prime: usize) -> Label {
        let pair = self.pick(&[i, i_prime]);
        Label::new(self.q.union(&pair), self.q.union(&self.l.difference(&pair)))
    }

    /// `Σ_{c ≠ i,i'} (-1)^c λ_{q∪l_{ii'c}} λ_{q∪l∖l_{ii'c}}`
    pub fn four_term_form(&self, i: usize, i_prime: usize) -> QuadPoly {
        let mut poly = QuadPoly::zero();
        for c in (1..=6).filter(|&c| c != i && c != i_prime) {
            let triple = self.pick(&[i, i_prime, c]);
            poly.add_term(
                sign(c),
                self.q.union(&triple),
                self.q.union(&self.l.difference(&triple)),
            );
        }
        poly
    }
}

pub fn pair_families(params: GrassmannParams) -> Vec<PairFamily> {
    let (n, p) = (params.n, params.p as usize);
    if p < 3 || params.p + 3 > n {
        return Vec::new();
    }
    let everything = MultiIndex::range(n);
    MultiIndex::all_of_size(n, p - 3)
        .into_iter()
        .flat_map(|q| {
            let rest = everything.difference(&q);
            rest.subsets_of_size(6)
                .map(|l| PairFamily::new(q.clone(), l).expect("disjoint by construction"))
                .collect::<Vec<_>>()
        })
        .collect()
}

fn check_pair(i: usize, i_prime: usize) -> Result<()> {
    if !(1..=6).contains(&i) || !(1..=6).contains(&i_prime) || i == i_prime {
        return Err(Error::invalid(format!(
            "pair indices must be distinct and in 1..=6, got ({i},{i_prime})"
        )));
    }
    Ok(())
}

/// `E_i + (-1)^{i+i'} E_{i'}` on raw forms.
pub fn pair_sum_raw(
    params: GrassmannParams,
    family: &PairFamily,
    i: usize,
    i_prime: usize,
) -> Result<QuadPoly> {
    check_pair(i, i_prime)?;
    let ei = QuadraticEquation::generate(params, 2, family.member(i).unwrap().clone())?;
    let ej = QuadraticEquation::generate(params, 2, family.member(i_prime).unwrap().clone())?;
    let mut sum = ei.collect();
    sum.add_scaled(&ej.collect(), sign(i + i_prime));
    Ok(sum)
}

/// Canonical form of `E_i + (-1)^{i+i'} E_{i'}`, labelled by the Plücker label
/// it should coincide with.
pub fn pair_combine(
    params: GrassmannParams,
    family: &PairFamily,
    i: usize,
    i_prime: usize,
) -> Result<QuadraticEquation> {
    let sum = pair_sum_raw(params, family, i, i_prime)?;
    Ok(QuadraticEquation::canonical_from_poly(
        params,
        family.target_label(i, i_prime),
        &sum,
    ))
}

/// Checks `E_i + (-1)^{i+i'} E_{i'} = 2(-1)^{i'} · Σ_{c≠i,i'} (-1)^c λλ` exactly.
pub fn pair_raw_identity(
    params: GrassmannParams,
    family: &PairFamily,
    i: usize,
    i_prime: usize,
) -> Result<bool> {
    let sum = pair_sum_raw(params, family, i, i_prime)?;
    Ok(sum == family.four_term_form(i, i_prime).scaled(2 * sign(i_prime)))
}

/// Positions `(i, i')` in the family whose indices sit in the same `λ` in
/// every term of `eq`; `None` unless exactly one such pair exists.
pub fn recover_pair(eq: &QuadraticEquation, family: &PairFamily) -> Option<(usize, usize)> {
    let mut found = None;
    for a in 1..=6 {
        for b in a + 1..=6 {
            let (x, y) = (family.l.get(a)?, family.l.get(b)?);
            let together = eq.terms().iter().all(|t| {
                (t.left.contains(x) && t.left.contains(y))
                    || (t.right.contains(x) && t.right.contains(y))
            });
            if together {
                if found.is_some() {
                    return None;
                }
                found = Some((a, b));
            }
        }
    }
    found
}

/// One named check of [`verify`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub checked: u64,
    pub passed: bool,
    pub first_failure: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verification {
    pub n: u32,
    pub p: u32,
    pub checks: Vec<CheckOutcome>,
}

impl Verification {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&CheckOutcome> {
        self.checks.iter().find(|c| !c.passed)
    }
}

fn outcome(name: &str, checked: u64, failure: Option<String>) -> CheckOutcome {
    CheckOutcome {
        name: name.to_string(),
        checked,
        passed: failure.is_none(),
        first_failure: failure,
    }
}

/// Runs every structural check at `(n, p)`.
pub fn verify(params: GrassmannParams) -> Result<Verification> {
    check_plucker_like_range(params)?;
    let like_raw = gen_plucker_like(params)?;
    let like = like_raw.canonical();
    let mut checks = Vec::new();

    let failures: Vec<Option<String>> = like_raw
        .equations()
        .par_iter()
        .map(|eq| match decomposition_identity(params, eq.label()) {
            Ok(true) => None,
            Ok(false) => Some(eq.label().to_string()),
            Err(e) => Some(format!("{}: {e}", eq.label())),
        })
        .collect();
    checks.push(outcome(
        "decomposition into Plücker equations",
        like_raw.len() as u64,
        failures.into_iter().flatten().next(),
    ));

    let report = census(params)?;
    let census_failure = (!report.holds()).then(|| {
        report
            .unclassified
            .first()
            .map(|l| l.to_string())
            .unwrap_or_else(|| format!("census mismatch at (n,p) = {params}"))
    });
    checks.push(outcome("census", report.total, census_failure));

    let plucker = dedupe(&gen_plucker(params)?);
    let mut like_counts: HashMap<&[QuadTerm], u64> = HashMap::new();
    for eq in &like {
        *like_counts.entry(eq.terms()).or_default() += 1;
    }
    let mut failure = None;
    let mut checked = 0;
    for eq in &like {
        if classify(params, eq.label())?.case != Case::I {
            continue;
        }
        checked += 1;
        let in_plucker = plucker.sources(eq).len();
        if in_plucker != 4 || like_counts[eq.terms()] != 1 {
            failure = Some(format!(
                "{}: {in_plucker} Plücker sources, {} Plücker-like",
                eq.label(),
                like_counts[eq.terms()]
            ));
            break;
        }
    }
    checks.push(outcome("3-term multiplicity", checked, failure));

    let families = pair_families(params);
    if !families.is_empty() {
        checks.push(check_families(&families, &like)?);
        checks.push(check_pair_sums(params, &families)?);
    }

    Ok(Verification {
        n: params.n,
        p: params.p,
        checks,
    })
}

fn check_families(
    families: &[PairFamily],
    like: &crate::equations::EquationSystem,
) -> Result<CheckOutcome> {
    let ten_term: BTreeSet<&Label> = like
        .iter()
        .filter(|e| e.terms().len() == 10)
        .map(|e| e.label())
        .collect();
    let mut covered = BTreeSet::new();
    for family in families {
        let members: Vec<&QuadraticEquation> = family
            .members
            .iter()
            .map(|l| like.get(l).expect("member is a generated label"))
            .collect();
        let shape_ok = members.iter().all(|e| e.terms().len() == 10)
            && members
                .iter()
                .all(|e| e.monomials() == members[0].monomials());
        let distinct: HashSet<&[QuadTerm]> = members.iter().map(|e| e.terms()).collect();
        if !shape_ok || distinct.len() < 2 {
            return Ok(outcome(
                "pair families",
                families.len() as u64,
                Some(format!("family q = {:?}, l = {:?}", family.q, family.l)),
            ));
        }
        for label in &family.members {
            if !covered.insert(label) {
                return Ok(outcome(
                    "pair families",
                    families.len() as u64,
                    Some(format!("{label} in two families")),
                ));
            }
        }
    }
    let failure = (covered != ten_term)
        .then(|| "families do not partition the 10-term equations".to_string());
    Ok(outcome("pair families", families.len() as u64, failure))
}

fn check_pair_sums(params: GrassmannParams, families: &[PairFamily]) -> Result<CheckOutcome> {
    let failures: Vec<Option<String>> = families
        .par_iter()
        .map(|family| -> Result<Option<String>> {
            let mut outputs = HashSet::new();
            for i in 1..=6 {
                for i_prime in i + 1..=6 {
                    let combined = pair_combine(params, family, i, i_prime)?;
                    let target =
                        QuadraticEquation::generate(params, 1, family.target_label(i, i_prime))?
                            .canonicalize();
                    let ok = combined.terms() == target.terms()
                        && combined.terms().len() == 4
                        && pair_raw_identity(params, family, i, i_prime)?
                        && recover_pair(&combined, family) == Some((i, i_prime));
                    if !ok {
                        return Ok(Some(format!(
                            "E_{i} ± E_{i_prime} of family l = {:?}",
                            family.l
                        )));
                    }
                    outputs.insert(combined.terms().to_vec());
                }
            }
            Ok((outputs.len() != 15).then(|| format!("family l = {:?} repeats", family.l)))
        })
        .collect::<Result<_>>()?;
    Ok(outcome(
        "pair combinations",
        15 * families.len() as u64,
        failures.into_iter().flatten().next(),
    ))
}

/// A combination of case (iii) equations whose sum is a Plücker equation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Collapse {
    pub members: Vec<Label>,
    pub coefficients: Vec<i64>,
    pub result: Vec<QuadTerm>,
    /// Plücker labels producing the same canonical equation.
    pub plucker_labels: Vec<Label>,
}

/// Output of [`case3_probe`]. Data only: nothing in it is asserted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub exploratory: bool,
    pub note: String,
    pub n: u32,
    pub p: u32,
    pub q_size: usize,
    pub equations: usize,
    pub coefficient_bound: i64,
    pub max_combination: usize,
    pub combinations_examined: u64,
    /// Fewest terms in any non-zero combination examined.
    pub min_terms_seen: Option<usize>,
    pub collapses: Vec<Collapse>,
}

impl ProbeReport {
    fn empty(params: GrassmannParams, q_size: usize, bound: i64, max_combination: usize) -> Self {
        ProbeReport {
            exploratory: true,
            note: "exploratory, no claim".to_string(),
            n: params.n,
            p: params.p,
            q_size,
            equations: 0,
            coefficient_bound: bound,
            max_combination,
            combinations_examined: 0,
            min_terms_seen: None,
            collapses: Vec::new(),
        }
    }
}

pub const PROBE_COEFFICIENT_BOUND: i64 = 2;

/// Searches combinations of two or three case (iii) equations at `|q| =
/// q_size`, with coefficients in `{-2..2}∖{0}`, for sums that reduce to a
/// Plücker equation. Only members sharing at least one monomial with an
/// earlier member are combined, since otherwise nothing cancels.
pub fn case3_probe(
    params: GrassmannParams,
    q_size: usize,
    max_combination: usize,
) -> Result<ProbeReport> {
    check_plucker_like_range(params)?;
    if !(2..=3).contains(&max_combination) {
        return Err(Error::invalid("probe combines two or three equations"));
    }
    let bound = PROBE_COEFFICIENT_BOUND;
    let mut report = ProbeReport::empty(params, q_size, bound, max_combination);
    let (n, p) = (params.n as usize, params.p as usize);
    if p < 4 || q_size + 4 > p || q_size + n < 2 * p {
        return Ok(report);
    }

    let members: Vec<(Label, QuadPoly)> = gen_plucker_like(params)?
        .iter()
        .filter(|e| e.label().j.intersection(&e.label().k).len() == q_size)
        .map(|e| (e.label().clone(), e.collect()))
        .collect();
    report.equations = members.len();

    let plucker = dedupe(&gen_plucker(params)?);
    let max_plucker_terms = plucker
        .reduced
        .iter()
        .map(|e| e.terms().len())
        .max()
        .unwrap_or(0);

    let supports: Vec<BTreeSet<Monomial>> = members.iter().map(|(_, p)| p.monomials()).collect();
    let overlaps = |a: usize, b: usize| !supports[a].is_disjoint(&supports[b]);
    let nonzero: Vec<i64> = (-bound..=bound).filter(|&c| c != 0).collect();
    let leading: Vec<i64> = (1..=bound).collect();

    let mut tuples: Vec<Vec<usize>> = Vec::new();
    for a in 0..members.len() {
        for b in a + 1..members.len() {
            if !overlaps(a, b) {
                continue;
            }
            tuples.push(vec![a, b]);
            if max_combination == 3 {
                for c in b + 1..members.len() {
                    if overlaps(a, c) || overlaps(b, c) {
                        tuples.push(vec![a, b, c]);
                    }
                }
            }
        }
    }

    struct Partial {
        examined: u64,
        min_terms: Option<usize>,
        collapses: Vec<Collapse>,
    }

    let partials: Vec<Partial> = tuples
        .par_iter()
        .map(|tuple| {
            let mut out = Partial {
                examined: 0,
                min_terms: None,
                collapses: Vec::new(),
            };
            let mut coefficient_sets: Vec<Vec<i64>> = leading.iter().map(|&c| vec![c]).collect();
            for _ in 1..tuple.len() {
                coefficient_sets = coefficient_sets
                    .into_iter()
                    .flat_map(|prefix| {
                        nonzero.iter().map(move |&c| {
                            let mut v = prefix.clone();
                            v.push(c);
                            v
                        })
                    })
                    .collect();
            }
            for coefficients in coefficient_sets {
                let content = coefficients.iter().fold(0i64, |g, c| g.gcd(c));
                if content != 1 {
                    continue;
                }
                out.examined += 1;
                let mut sum = QuadPoly::zero();
                for (&idx, &c) in tuple.iter().zip(&coefficients) {
                    sum.add_scaled(&members[idx].1, c);
                }
                if sum.is_zero() {
                    continue;
                }
                out.min_terms = Some(out.min_terms.map_or(sum.len(), |m| m.min(sum.len())));
                if sum.len() > max_plucker_terms {
                    continue;
                }
                let canonical: Vec<QuadTerm> = sum.normalized().terms().collect();
                if let Some(labels) = plucker.multiplicity.get(&canonical) {
                    out.collapses.push(Collapse {
                        members: tuple.iter().map(|&i| members[i].0.clone()).collect(),
                        coefficients,
                        result: canonical,
                        plucker_labels: labels.clone(),
                    });
                }
            }
            out
        })
        .collect();

    for part in partials {
        report.combinations_examined += part.examined;
        report.min_terms_seen = match (report.min_terms_seen, part.min_terms) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        report.collapses.extend(part.collapses);
    }
    Ok(report)
}
