//! Test-side reference implementations, written independently of the library
//! so that library results can be checked against them.

#![allow(dead_code)]

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use plucker::QuadTerm;

pub type Set = Vec<u32>;
/// Monomial `λ_a λ_b` with `a <= b`, mapped to its coefficient.
pub type Poly = BTreeMap<(Set, Set), i64>;

pub fn combinations(items: &[u32], k: usize) -> Vec<Set> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if items.len() < k {
        return Vec::new();
    }
    let mut out = Vec::new();
    for (pos, &first) in items.iter().enumerate() {
        for mut rest in combinations(&items[pos + 1..], k - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

pub fn range(n: u32) -> Set {
    (1..=n).collect()
}

fn sorted(mut v: Set) -> Set {
    v.sort_unstable();
    v.dedup();
    v
}

pub fn union(a: &[u32], b: &[u32]) -> Set {
    sorted(a.iter().chain(b).copied().collect())
}

pub fn minus(a: &[u32], b: &[u32]) -> Set {
    a.iter().copied().filter(|x| !b.contains(x)).collect()
}

pub fn inter(a: &[u32], b: &[u32]) -> Set {
    a.iter().copied().filter(|x| b.contains(x)).collect()
}

pub fn add(poly: &mut Poly, c: i64, a: Set, b: Set) {
    let key = if a <= b { (a, b) } else { (b, a) };
    let entry = poly.entry(key.clone()).or_insert(0);
    *entry += c;
    if *entry == 0 {
        poly.remove(&key);
    }
}

pub fn add_poly(acc: &mut Poly, other: &Poly, factor: i64) {
    for ((a, b), c) in other {
        add(acc, factor * c, a.clone(), b.clone());
    }
}

/// Raw equation for `(j, k)` following the defining sum term by term: the sign
/// of the term for `I` is the parity of pairs `l > i`, `l ∈ jΔk`, `i ∈ I`.
pub fn oracle_raw(j: &[u32], k: &[u32], m: usize) -> Poly {
    let sym = union(&minus(j, k), &minus(k, j));
    let mut poly = Poly::new();
    for i_set in combinations(&minus(k, j), m) {
        let inversions = sym
            .iter()
            .flat_map(|l| i_set.iter().map(move |i| (l, i)))
            .filter(|(l, i)| l > i)
            .count();
        let sign = if inversions % 2 == 0 { 1 } else { -1 };
        add(&mut poly, sign, union(j, &i_set), minus(k, &i_set));
    }
    poly
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Divide by the content and make the lexicographically first term positive.
pub fn oracle_canonical(poly: &Poly) -> Vec<(i64, Set, Set)> {
    let g = poly.values().fold(0, |g, &c| gcd(g, c));
    let sign = poly.values().next().map_or(1, |c| c.signum());
    poly.iter()
        .map(|((a, b), c)| (c / g * sign, a.clone(), b.clone()))
        .collect()
}

pub fn from_library(terms: &[QuadTerm]) -> Vec<(i64, Set, Set)> {
    terms
        .iter()
        .map(|t| {
            (
                t.coefficient,
                t.left.as_slice().to_vec(),
                t.right.as_slice().to_vec(),
            )
        })
        .collect()
}

pub fn from_library_poly(poly: &plucker::QuadPoly) -> Poly {
    let mut out = Poly::new();
    for t in poly.terms() {
        add(
            &mut out,
            t.coefficient,
            t.left.as_slice().to_vec(),
            t.right.as_slice().to_vec(),
        );
    }
    out
}

pub fn factorial(n: u64) -> u128 {
    (1..=n as u128).product()
}

pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        0
    } else {
        factorial(n) / (factorial(k) * factorial(n - k))
    }
}

/// `n! / Π parts!`, zero when a part is negative.
pub fn multinomial(n: i64, parts: &[i64]) -> u128 {
    if parts.iter().any(|&x| x < 0) {
        return 0;
    }
    assert_eq!(parts.iter().sum::<i64>(), n);
    parts
        .iter()
        .fold(factorial(n as u64), |acc, &x| acc / factorial(x as u64))
}

/// Leibniz expansion over all permutations.
pub fn leibniz(matrix: &[Vec<BigRational>]) -> BigRational {
    let size = matrix.len();
    let mut total = BigRational::zero();
    let mut perm: Vec<usize> = (0..size).collect();
    permute(&mut perm, 0, &mut |p| {
        let inversions = (0..size)
            .flat_map(|a| (a + 1..size).map(move |b| (a, b)))
            .filter(|&(a, b)| p[a] > p[b])
            .count();
        let mut product = BigRational::one();
        for (row, &col) in p.iter().enumerate() {
            product *= &matrix[row][col];
        }
        if inversions % 2 == 0 {
            total += product;
        } else {
            total -= product;
        }
    });
    total
}

fn permute(p: &mut Vec<usize>, at: usize, visit: &mut impl FnMut(&[usize])) {
    if at == p.len() {
        visit(p);
        return;
    }
    for swap in at..p.len() {
        p.swap(at, swap);
        permute(p, at + 1, visit);
        p.swap(at, swap);
    }
}

/// Plücker coordinates of the span of `vectors` (rows), via `p×p` minors.
pub fn oracle_minors(vectors: &[Vec<BigRational>], n: u32) -> BTreeMap<Set, BigRational> {
    let p = vectors.len();
    combinations(&range(n), p)
        .into_iter()
        .filter_map(|cols| {
            let sub: Vec<Vec<BigRational>> = vectors
                .iter()
                .map(|row| cols.iter().map(|&c| row[c as usize - 1].clone()).collect())
                .collect();
            let d = leibniz(&sub);
            (!d.is_zero()).then_some((cols, d))
        })
        .collect()
}

pub fn evaluate(poly: &Poly, coords: &BTreeMap<Set, BigRational>) -> BigRational {
    let zero = BigRational::zero();
    let mut total = BigRational::zero();
    for ((a, b), c) in poly {
        let x = coords.get(a).unwrap_or(&zero);
        let y = coords.get(b).unwrap_or(&zero);
        total += BigRational::from_integer(BigInt::from(*c)) * x * y;
    }
    total
}
