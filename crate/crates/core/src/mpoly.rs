//! Multivariate polynomials over GF(q), Hasse derivatives, order-m
//! evaluations and the two interpolation routines used by line recovery.
//!
//! Monomials are ordered graded-lexicographically everywhere: by total
//! degree first, then lexicographically with `x_1 > x_2 > … > x_s`. For
//! `s = 2` and weight below 2 this gives `1, x_1, x_2`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::gf::{Elem, Field};
use crate::linalg::{solve, Matrix, Solution};

/// Exponent vector `i` of the monomial `x^i`, with its cached weight.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial {
    exps: Vec<u32>,
    weight: u32,
}

impl Monomial {
    pub fn new(exps: Vec<u32>) -> Self {
        let weight = exps.iter().sum();
        Monomial { exps, weight }
    }

    pub fn constant(vars: usize) -> Self {
        Monomial::new(vec![0; vars])
    }

    pub fn exps(&self) -> &[u32] {
        &self.exps
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn vars(&self) -> usize {
        self.exps.len()
    }

    /// `x^i` evaluated at `point`.
    pub fn evaluate(&self, field: &Field, point: &[Elem]) -> Elem {
        self.exps.iter().zip(point).fold(Elem::ONE, |acc, (&e, &x)| field.mul(acc, field.pow(x, e as u64)))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.weight.cmp(&other.weight).then_with(|| other.exps.cmp(&self.exps))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn push_compositions(total: u32, vars: usize, prefix: &mut Vec<u32>, out: &mut Vec<Monomial>) {
    if vars == 0 {
        if total == 0 {
            out.push(Monomial::new(prefix.clone()));
        }
        return;
    }
    if vars == 1 {
        prefix.push(total);
        out.push(Monomial::new(prefix.clone()));
        prefix.pop();
        return;
    }
    for first in (0..=total).rev() {
        prefix.push(first);
        push_compositions(total - first, vars - 1, prefix, out);
        prefix.pop();
    }
}

/// Monomials of weight exactly `weight` in `vars` variables, graded-lex order.
pub fn homogeneous_monomials(vars: usize, weight: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    push_compositions(weight, vars, &mut Vec::new(), &mut out);
    out
}

/// Monomials of weight `< order`, graded-lex order; the index set of an
/// order-`order` evaluation.
pub fn monomials_below(vars: usize, order: u32) -> Vec<Monomial> {
    (0..order).flat_map(|w| homogeneous_monomials(vars, w)).collect()
}

/// Binomial coefficient as an exact integer; zero when `k > n` or `n < 0`.
pub fn binomial(n: i64, k: i64) -> u64 {
    if k < 0 || n < 0 || k > n {
        return 0;
    }
    let k = k.min(n - k) as u128;
    let mut acc: u128 = 1;
    for t in 0..k {
        acc = acc * (n as u128 - t) / (t + 1);
    }
    u64::try_from(acc).expect("binomial overflow")
}

/// `C(s+m-1, s)`: entries in an order-`m` evaluation of an `s`-variate polynomial.
pub fn count_monomials(s: usize, m: usize) -> u64 {
    binomial(s as i64 + m as i64 - 1, s as i64)
}

/// `C(d+s, s)`: monomials of total degree at most `d` in `s` variables.
pub fn count_degree(s: usize, d: usize) -> u64 {
    binomial(d as i64 + s as i64, s as i64)
}

/// `C(n, k) mod p` via Lucas' theorem, as a field element.
pub fn binomial_in_field(field: &Field, n: u32, k: u32) -> Elem {
    if k > n {
        return Elem::ZERO;
    }
    let p = field.characteristic();
    let (mut n, mut k) = (n, k);
    let mut acc = Elem::ONE;
    while k > 0 || n > 0 {
        let (nd, kd) = (n % p, k % p);
        if kd > nd {
            return Elem::ZERO;
        }
        let mut num = 1u64;
        let mut den = 1u64;
        for t in 0..kd as u64 {
            num = num * (nd as u64 - t) % p as u64;
            den = den * (t + 1) % p as u64;
        }
        let digit = field.div(field.from_int(num), field.from_int(den)).expect("k! is a unit below p");
        acc = field.mul(acc, digit);
        n /= p;
        k /= p;
    }
    acc
}

/// `s`-variate polynomial as a sparse exponent → coefficient map with no
/// zero coefficients stored.
#[derive(Clone)]
pub struct MultiPoly {
    field: Arc<Field>,
    vars: usize,
    terms: BTreeMap<Monomial, Elem>,
}

impl PartialEq for MultiPoly {
    fn eq(&self, other: &Self) -> bool {
        self.vars == other.vars && self.terms == other.terms && self.field == other.field
    }
}

impl Eq for MultiPoly {}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(m, c)| {
                let vars: Vec<String> = m
                    .exps()
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(j, &e)| if e == 1 { format!("x{}", j + 1) } else { format!("x{}^{e}", j + 1) })
                    .collect();
                match (c.value(), vars.is_empty()) {
                    (_, true) => c.to_string(),
                    (1, false) => vars.join("*"),
                    (_, false) => format!("{c}*{}", vars.join("*")),
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl MultiPoly {
    pub fn zero(field: &Arc<Field>, vars: usize) -> Self {
        MultiPoly { field: field.clone(), vars, terms: BTreeMap::new() }
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs, summing
    /// repeated monomials.
    pub fn from_terms<I>(field: &Arc<Field>, vars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, Elem)>,
    {
        let mut p = MultiPoly::zero(field, vars);
        for (exps, c) in terms {
            if exps.len() != vars {
                return Err(Error::DimensionMismatch { expected: vars, found: exps.len() });
            }
            p.add_term(Monomial::new(exps), c);
        }
        Ok(p)
    }

    /// Univariate polynomial from its coefficient list (constant term first).
    pub fn univariate(field: &Arc<Field>, coeffs: &[Elem]) -> Self {
        let mut p = MultiPoly::zero(field, 1);
        for (t, &c) in coeffs.iter().enumerate() {
            p.add_term(Monomial::new(vec![t as u32]), c);
        }
        p
    }

    /// Uniformly random polynomial of total degree at most `degree`.
    pub fn random<R: Rng + ?Sized>(field: &Arc<Field>, vars: usize, degree: u32, rng: &mut R) -> Self {
        let mut p = MultiPoly::zero(field, vars);
        for m in monomials_below(vars, degree + 1) {
            let c = Elem(rng.gen_range(0..field.order()));
            p.add_term(m, c);
        }
        p
    }

    /// Uniformly random homogeneous polynomial of degree `degree`.
    pub fn random_homogeneous<R: Rng + ?Sized>(field: &Arc<Field>, vars: usize, degree: u32, rng: &mut R) -> Self {
        let mut p = MultiPoly::zero(field, vars);
        for m in homogeneous_monomials(vars, degree) {
            let c = Elem(rng.gen_range(0..field.order()));
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: Elem) {
        if c.is_zero() {
            return;
        }
        let sum = match self.terms.get(&m) {
            Some(&old) => self.field.add(old, c),
            None => c,
        };
        if sum.is_zero() {
            self.terms.remove(&m);
        } else {
            self.terms.insert(m, sum);
        }
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::weight).max()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, Elem)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn coefficient(&self, exps: &[u32]) -> Elem {
        self.terms.get(&Monomial::new(exps.to_vec())).copied().unwrap_or(Elem::ZERO)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.terms.keys().map(Monomial::weight).collect::<BTreeSet<_>>().len() <= 1
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        if self.vars != other.vars {
            return Err(Error::DimensionMismatch { expected: self.vars, found: other.vars });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (m, &c) in &other.terms {
            out.add_term(m.clone(), c);
        }
        Ok(out)
    }

    pub fn scale(&self, a: Elem) -> Self {
        let mut out = MultiPoly::zero(&self.field, self.vars);
        for (m, &c) in &self.terms {
            out.add_term(m.clone(), self.field.mul(a, c));
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = MultiPoly::zero(&self.field, self.vars);
        for (ma, &ca) in &self.terms {
            for (mb, &cb) in &other.terms {
                let exps = ma.exps.iter().zip(&mb.exps).map(|(a, b)| a + b).collect();
                out.add_term(Monomial::new(exps), self.field.mul(ca, cb));
            }
        }
        Ok(out)
    }

    fn check_point(&self, point: &[Elem]) -> Result<()> {
        if point.len() != self.vars {
            return Err(Error::DimensionMismatch { expected: self.vars, found: point.len() });
        }
        Ok(())
    }

    /// `P(w)`.
    pub fn evaluate(&self, point: &[Elem]) -> Result<Elem> {
        self.check_point(point)?;
        let f = &*self.field;
        Ok(self.terms.iter().fold(Elem::ZERO, |acc, (m, &c)| f.add(acc, f.mul(c, m.evaluate(f, point)))))
    }

    /// The `i`-th Hasse derivative: the coefficient of `z^i` in `P(x + z)`.
    /// On a monomial, `(x^a)^(i) = Π_j C(a_j, i_j) x^(a - i)`.
    pub fn hasse_derivative(&self, i: &Monomial) -> Result<Self> {
        self.check_point(&vec![Elem::ZERO; i.vars()])?;
        let f = &*self.field;
        let mut out = MultiPoly::zero(&self.field, self.vars);
        for (m, &c) in &self.terms {
            if m.exps.iter().zip(&i.exps).any(|(a, b)| b > a) {
                continue;
            }
            let factor =
                m.exps.iter().zip(&i.exps).fold(Elem::ONE, |acc, (&a, &b)| f.mul(acc, binomial_in_field(f, a, b)));
            let exps = m.exps.iter().zip(&i.exps).map(|(a, b)| a - b).collect();
            out.add_term(Monomial::new(exps), f.mul(c, factor));
        }
        Ok(out)
    }

    /// `P^(i)(w)` without materializing the derivative.
    pub fn hasse_at(&self, i: &Monomial, point: &[Elem]) -> Result<Elem> {
        self.check_point(point)?;
        if i.vars() != self.vars {
            return Err(Error::DimensionMismatch { expected: self.vars, found: i.vars() });
        }
        let f = &*self.field;
        let mut acc = Elem::ZERO;
        for (m, &c) in &self.terms {
            let mut term = c;
            for ((&a, &b), &x) in m.exps.iter().zip(&i.exps).zip(point) {
                if b > a {
                    term = Elem::ZERO;
                    break;
                }
                term = f.mul(term, f.mul(binomial_in_field(f, a, b), f.pow(x, (a - b) as u64)));
            }
            acc = f.add(acc, term);
        }
        Ok(acc)
    }

    /// The order-`m` evaluation `P^(<m)(w)`.
    pub fn order_m_evaluation(&self, point: &[Elem], m: usize) -> Result<OrderedEvaluation> {
        if m == 0 {
            return Err(Error::Precondition("evaluation order must be at least 1".into()));
        }
        self.check_point(point)?;
        let entries =
            monomials_below(self.vars, m as u32).iter().map(|i| self.hasse_at(i, point)).collect::<Result<Vec<_>>>()?;
        Ok(OrderedEvaluation { vars: self.vars, order: m, entries })
    }

    /// Coefficients of a univariate polynomial, padded to `len`.
    pub fn univariate_coefficients(&self, len: usize) -> Result<Vec<Elem>> {
        if self.vars != 1 {
            return Err(Error::DimensionMismatch { expected: 1, found: self.vars });
        }
        let mut out = vec![Elem::ZERO; len];
        for (m, &c) in &self.terms {
            let t = m.exps[0] as usize;
            if t >= len {
                return Err(Error::Precondition(format!("degree {t} exceeds requested length {len}")));
            }
            out[t] = c;
        }
        Ok(out)
    }
}

/// `(P^(i)(w))` for all `i` with `wt(i) < m`, in graded-lex order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderedEvaluation {
    pub vars: usize,
    pub order: usize,
    pub entries: Vec<Elem>,
}

impl OrderedEvaluation {
    pub fn new(vars: usize, order: usize, entries: Vec<Elem>) -> Result<Self> {
        let expected = count_monomials(vars, order) as usize;
        if entries.len() != expected {
            return Err(Error::DimensionMismatch { expected, found: entries.len() });
        }
        Ok(OrderedEvaluation { vars, order, entries })
    }

    pub fn zero(vars: usize, order: usize) -> Self {
        OrderedEvaluation { vars, order, entries: vec![Elem::ZERO; count_monomials(vars, order) as usize] }
    }
}

/// Coefficients `c_0..=c_d` of the unique univariate polynomial of degree at
/// most `d` whose Hasse derivatives of order `< m` match every sample.
///
/// Each sample is `(λ, [p(λ), p^(1)(λ), …, p^(m-1)(λ)])`. All samples
/// enter the linear system, so a corrupted sample shows up as an
/// inconsistency rather than a silently wrong answer.
pub fn hermite_coefficients(field: &Field, samples: &[(Elem, &[Elem])], m: usize, d: usize) -> Result<Vec<Elem>> {
    let points: BTreeSet<Elem> = samples.iter().map(|(l, _)| *l).collect();
    if points.len() != samples.len() {
        return Err(Error::Precondition("interpolation points must be distinct".into()));
    }
    if m * samples.len() < d + 1 {
        return Err(Error::Precondition(format!("{} samples of order {m} cannot determine degree {d}", samples.len())));
    }
    let mut a = Matrix::zeros(m * samples.len(), d + 1);
    let mut b = Vec::with_capacity(m * samples.len());
    for (k, (lambda, ev)) in samples.iter().enumerate() {
        if ev.len() != m {
            return Err(Error::DimensionMismatch { expected: m, found: ev.len() });
        }
        for (j, &value) in ev.iter().enumerate() {
            let row = k * m + j;
            for t in j..=d {
                let coef = field.mul(binomial_in_field(field, t as u32, j as u32), field.pow(*lambda, (t - j) as u64));
                a.set(row, t, coef);
            }
            b.push(value);
        }
    }
    match solve(field, &a, &b)? {
        Solution::Inconsistent => {
            Err(Error::DecodeFailure("no polynomial of the degree bound fits the samples".into()))
        }
        Solution::Found { rank, .. } if rank < d + 1 => {
            Err(Error::Precondition("samples do not determine the polynomial".into()))
        }
        Solution::Found { x, .. } => Ok(x),
    }
}

/// Hermite interpolation from univariate order-`m` evaluations.
pub fn hermite_interpolate(field: &Arc<Field>, samples: &[(Elem, OrderedEvaluation)], d: usize) -> Result<MultiPoly> {
    let Some(m) = samples.first().map(|(_, ev)| ev.order) else {
        return Err(Error::Precondition("no samples".into()));
    };
    for (_, ev) in samples {
        if ev.vars != 1 || ev.order != m {
            return Err(Error::Precondition("samples must be univariate evaluations of one order".into()));
        }
    }
    let borrowed: Vec<(Elem, &[Elem])> = samples.iter().map(|(l, ev)| (*l, ev.entries.as_slice())).collect();
    let coeffs = hermite_coefficients(field, &borrowed, m, d)?;
    Ok(MultiPoly::univariate(field, &coeffs))
}

/// Recovers the unique homogeneous polynomial `Q` of degree `j` in `s`
/// variables from its values on a grid `A_1 × … × A_{s-1} × {1}`.
///
/// Works on the dehomogenization `Q(x_1, …, x_{s-1}, 1)`, which has total
/// degree at most `j` and is pinned down by the grid once every axis has at
/// least `j + 1` values; each recovered monomial of degree `t` is then
/// multiplied by `x_s^(j-t)`.
pub fn homogeneous_interpolate(
    field: &Arc<Field>,
    j: u32,
    samples: &[(Vec<Elem>, Elem)],
    s: usize,
) -> Result<MultiPoly> {
    if s == 0 {
        return Err(Error::Precondition("at least one variable is required".into()));
    }
    let mut axes: Vec<BTreeSet<Elem>> = vec![BTreeSet::new(); s - 1];
    let mut seen = BTreeSet::new();
    for (point, _) in samples {
        if point.len() != s {
            return Err(Error::DimensionMismatch { expected: s, found: point.len() });
        }
        if point[s - 1] != Elem::ONE {
            return Err(Error::Precondition("grid points must have last coordinate 1".into()));
        }
        for (axis, &x) in axes.iter_mut().zip(point) {
            axis.insert(x);
        }
        if !seen.insert(point.clone()) {
            return Err(Error::Precondition("repeated grid point".into()));
        }
    }
    let grid_size: usize = axes.iter().map(BTreeSet::len).product();
    if samples.is_empty() || grid_size != samples.len() {
        return Err(Error::Precondition("sample points do not form a full grid".into()));
    }
    if let Some(small) = axes.iter().position(|a| a.len() < j as usize + 1) {
        return Err(Error::Precondition(format!(
            "grid axis {} has {} values, degree {j} needs {}",
            small + 1,
            axes[small].len(),
            j + 1
        )));
    }
    let unknowns = monomials_below(s - 1, j + 1);
    let mut a = Matrix::zeros(samples.len(), unknowns.len());
    let mut b = Vec::with_capacity(samples.len());
    for (row, (point, value)) in samples.iter().enumerate() {
        for (col, mono) in unknowns.iter().enumerate() {
            a.set(row, col, mono.evaluate(field, &point[..s - 1]));
        }
        b.push(*value);
    }
    let x = match solve(field, &a, &b)? {
        Solution::Inconsistent => {
            return Err(Error::DecodeFailure(format!("no homogeneous polynomial of degree {j} fits the samples")))
        }
        Solution::Found { rank, .. } if rank < unknowns.len() => {
            return Err(Error::Precondition("grid does not determine the polynomial".into()))
        }
        Solution::Found { x, .. } => x,
    };
    let terms = unknowns.iter().zip(x).map(|(mono, c)| {
        let mut exps = mono.exps().to_vec();
        exps.push(j - mono.weight());
        (exps, c)
    });
    MultiPoly::from_terms(field, s, terms)
}
