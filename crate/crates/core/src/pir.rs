//! Line-based recovering sets for multiplicity codes, symbol recovery from
//! them, and two wrappers that change the alphabet or the availability of a
//! code: binary expansion and replication.

use std::collections::BTreeSet;
use std::sync::Arc;

use itertools::Itertools;
use num_rational::Ratio;

use crate::code::{AvailabilityCode, RestrictedWord, SymbolSource};
use crate::error::{Error, Result};
use crate::gf::{Elem, Field};
use crate::mpoly::{hermite_coefficients, homogeneous_interpolate, OrderedEvaluation};
use crate::multiplicity::MultiplicityCode;

/// Grids `A_1 × … × A_{s-1} × {1}` with `|A_i| = degree + 1`, pairwise
/// disjoint as point sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectionFamily {
    pub s: usize,
    pub q: u32,
    pub degree: usize,
    pub grids: Vec<Vec<Vec<Elem>>>,
}

impl DirectionFamily {
    pub fn len(&self) -> usize {
        self.grids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grids.is_empty()
    }
}

/// Splits the field into `⌊q/m⌋` consecutive blocks of `m` elements per axis;
/// grid `(b_1, …, b_{s-1})` is the product of the chosen blocks, with the
/// block tuples taken in lexicographic order.
pub fn build_direction_families(q: u32, m: usize, s: usize) -> Result<DirectionFamily> {
    if m == 0 || s == 0 {
        return Err(Error::Precondition("order and number of variables must be positive".into()));
    }
    let blocks = q as usize / m;
    if s > 1 && blocks == 0 {
        return Err(Error::Precondition(format!("GF({q}) has fewer than m = {m} elements")));
    }
    let grids = (0..s - 1)
        .map(|_| 0..blocks)
        .multi_cartesian_product()
        .map(|choice| {
            choice
                .iter()
                .map(|&b| (b * m..(b + 1) * m).map(|x| Elem(x as u32)))
                .multi_cartesian_product()
                .map(|mut v| {
                    v.push(Elem::ONE);
                    v
                })
                .collect::<Vec<_>>()
        })
        .collect::<Vec<_>>();
    // multi_cartesian_product of zero iterators yields nothing; s = 1 has the
    // single direction (1).
    let grids = if s == 1 { vec![vec![vec![Elem::ONE]]] } else { grids };
    Ok(DirectionFamily { s, q, degree: m - 1, grids })
}

/// One line `w0 + λv` of a plan and the nonzero `λ` it skips.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlanLine {
    pub direction: Vec<Elem>,
    pub drops: BTreeSet<Elem>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecoveryPlan {
    pub w0: Vec<Elem>,
    pub family_index: usize,
    pub lines: Vec<PlanLine>,
    /// Symbol indices read by the plan.
    pub coordinates: BTreeSet<usize>,
}

impl RecoveryPlan {
    pub fn new(code: &MultiplicityCode, w0: Vec<Elem>, family_index: usize, lines: Vec<PlanLine>) -> Result<Self> {
        let mut coordinates = BTreeSet::new();
        for line in &lines {
            for (lambda, idx) in line_points(code, &w0, &line.direction)? {
                if !line.drops.contains(&lambda) {
                    coordinates.insert(idx);
                }
            }
        }
        Ok(RecoveryPlan { w0, family_index, lines, coordinates })
    }

    /// Each line must keep enough samples to pin down a degree-`d` restriction.
    pub fn check(&self, code: &MultiplicityCode) -> Result<()> {
        let q = code.q() as usize;
        for line in &self.lines {
            let kept = q - 1 - line.drops.len();
            if code.m() * kept < code.d() + 1 {
                return Err(Error::Precondition(format!(
                    "line keeps {kept} points, order {} needs {} values for degree {}",
                    code.m(),
                    code.d() + 1,
                    code.d()
                )));
            }
        }
        Ok(())
    }
}

/// `(λ, index of w0 + λv)` for every nonzero `λ`.
pub fn line_points(code: &MultiplicityCode, w0: &[Elem], v: &[Elem]) -> Result<Vec<(Elem, usize)>> {
    let f = AvailabilityCode::field(code);
    f.elements()
        .skip(1)
        .map(|lambda| {
            let p: Vec<Elem> = w0.iter().zip(v).map(|(&a, &b)| f.add(a, f.mul(lambda, b))).collect();
            Ok((lambda, code.point_index(&p)?))
        })
        .collect()
}

fn check_pir_regime(code: &MultiplicityCode) -> Result<()> {
    let (m, d, q) = (code.m(), code.d(), code.q() as usize);
    if d >= m * (q - 1) {
        return Err(Error::Precondition(format!(
            "PIR recovery needs d < m(q-1), got d = {d}, m(q-1) = {}",
            m * (q - 1)
        )));
    }
    Ok(())
}

/// One plan per direction grid, all with empty drop sets.
pub fn pir_recovery_plans(code: &MultiplicityCode, w0: &[Elem]) -> Result<Vec<RecoveryPlan>> {
    check_pir_regime(code)?;
    code.point_index(w0)?;
    let family = build_direction_families(code.q(), code.m(), code.s())?;
    family
        .grids
        .into_iter()
        .enumerate()
        .map(|(idx, grid)| {
            let lines = grid.into_iter().map(|direction| PlanLine { direction, drops: BTreeSet::new() }).collect();
            RecoveryPlan::new(code, w0.to_vec(), idx, lines)
        })
        .collect()
}

/// The PIR plan of `w0` containing `set`, with every line point outside
/// `set` turned into a drop.
pub fn plan_for_set(code: &MultiplicityCode, w0: &[Elem], set: &[usize]) -> Result<RecoveryPlan> {
    let wanted: BTreeSet<usize> = set.iter().copied().collect();
    for plan in pir_recovery_plans(code, w0)? {
        if !wanted.is_subset(&plan.coordinates) {
            continue;
        }
        let mut lines = Vec::with_capacity(plan.lines.len());
        for line in plan.lines {
            let drops = line_points(code, w0, &line.direction)?
                .into_iter()
                .filter(|(_, idx)| !wanted.contains(idx))
                .map(|(l, _)| l)
                .collect();
            lines.push(PlanLine { direction: line.direction, drops });
        }
        let out = RecoveryPlan::new(code, w0.to_vec(), plan.family_index, lines)?;
        out.check(code)?;
        return Ok(out);
    }
    Err(Error::Precondition("set does not lie inside any recovery plan of the target".into()))
}

/// Recovers the symbol at `plan.w0` from the symbols the plan reads.
///
/// Each line gives, by Hermite interpolation, the coefficients `c_{v,j}` of
/// `λ ↦ P(w0 + λv)`. For fixed `j` these are the values on the grid of the
/// homogeneous polynomial `Σ_{wt(i)=j} P^(i)(w0) x^i`, whose coefficients are
/// the wanted derivatives.
pub fn recover_symbol<S: SymbolSource + ?Sized>(
    code: &MultiplicityCode,
    source: &S,
    plan: &RecoveryPlan,
) -> Result<OrderedEvaluation> {
    plan.check(code)?;
    let field = AvailabilityCode::field(code);
    let (m, d, s) = (code.m(), code.d(), code.s());
    let mut per_line = Vec::with_capacity(plan.lines.len());
    for line in &plan.lines {
        let samples = code.line_samples(source, &plan.w0, &line.direction, &line.drops)?;
        let borrowed: Vec<(Elem, &[Elem])> = samples.iter().map(|(l, ev)| (*l, ev.entries.as_slice())).collect();
        let coeffs = hermite_coefficients(field, &borrowed, m, d)?;
        per_line.push(coeffs);
    }
    let mut layers = Vec::with_capacity(m);
    for j in 0..m {
        let values: Vec<(Vec<Elem>, Elem)> = plan
            .lines
            .iter()
            .zip(&per_line)
            .map(|(line, c)| (line.direction.clone(), c.get(j).copied().unwrap_or(Elem::ZERO)))
            .collect();
        layers.push(homogeneous_interpolate(field, j as u32, &values, s)?);
    }
    let entries = code.derivatives().iter().map(|i| layers[i.weight() as usize].coefficient(i.exps())).collect();
    OrderedEvaluation::new(s, m, entries)
}

/// A code over `GF(2^e)` read as a binary code: each field entry becomes its
/// `e` polynomial-basis coefficients.
#[derive(Debug)]
pub struct BinaryExpansion<C> {
    inner: C,
    bits: usize,
    binary: Arc<Field>,
}

impl<C: AvailabilityCode> BinaryExpansion<C> {
    pub fn new(inner: C) -> Result<Self> {
        let f = inner.field();
        if f.characteristic() != 2 {
            return Err(Error::Unsupported(format!(
                "binary expansion needs characteristic 2, GF({}) has characteristic {}",
                f.order(),
                f.characteristic()
            )));
        }
        let bits = f.extension_degree() as usize;
        Ok(BinaryExpansion { inner, bits, binary: Field::of_order(2)? })
    }

    pub fn inner(&self) -> &C {
        &self.inner
    }

    pub fn bits_per_entry(&self) -> usize {
        self.bits
    }

    pub fn expand(&self, word: &[Elem]) -> Vec<Elem> {
        let f = self.inner.field();
        word.iter().flat_map(|&x| f.coefficients(x).into_iter().map(Elem)).collect()
    }

    pub fn collapse(&self, bits: &[Elem]) -> Result<Vec<Elem>> {
        if !bits.len().is_multiple_of(self.bits) {
            return Err(Error::DimensionMismatch { expected: self.bits, found: bits.len() % self.bits });
        }
        let f = self.inner.field();
        Ok(bits
            .chunks(self.bits)
            .map(|c| f.from_coefficients(&c.iter().map(|b| b.value()).collect::<Vec<_>>()))
            .collect())
    }
}

impl<C: AvailabilityCode> AvailabilityCode for BinaryExpansion<C> {
    fn field(&self) -> &Arc<Field> {
        &self.binary
    }

    fn dimension(&self) -> usize {
        self.bits * self.inner.dimension()
    }

    fn num_symbols(&self) -> usize {
        self.inner.num_symbols()
    }

    fn symbol_width(&self) -> usize {
        self.bits * self.inner.symbol_width()
    }

    fn encode(&self, message: &[Elem]) -> Result<Vec<Elem>> {
        if message.len() != self.dimension() {
            return Err(Error::DimensionMismatch { expected: self.dimension(), found: message.len() });
        }
        Ok(self.expand(&self.inner.encode(&self.collapse(message)?)?))
    }

    fn targets(&self) -> Vec<usize> {
        self.inner.targets()
    }

    fn availability(&self) -> usize {
        self.inner.availability()
    }

    fn pir_sets(&self, target: usize) -> Result<Vec<Vec<usize>>> {
        self.inner.pir_sets(target)
    }

    fn recover(&self, word: &RestrictedWord, target: usize, set: &[usize]) -> Result<Vec<Elem>> {
        let symbols = word.iter().map(|(i, bits)| Ok((i, self.collapse(bits)?))).collect::<Result<_>>()?;
        let inner_word = RestrictedWord::from_symbols(self.inner.symbol_width(), symbols)?;
        Ok(self.expand(&self.inner.recover(&inner_word, target, set)?))
    }

    fn plan_batch(&self, request: &[usize]) -> Result<Vec<Vec<usize>>> {
        self.inner.plan_batch(request)
    }

    fn describe(&self) -> String {
        format!("binary expansion ({} bits per entry) of {}", self.bits, self.inner.describe())
    }
}

/// `copies` verbatim copies of a codeword; copy `c` serves recovering sets
/// `c·k' .. (c+1)·k'`.
#[derive(Debug)]
pub struct Replicated<C> {
    inner: C,
    copies: usize,
}

impl<C: AvailabilityCode> Replicated<C> {
    pub fn new(inner: C, copies: usize) -> Result<Self> {
        if copies == 0 {
            return Err(Error::Precondition("at least one copy is required".into()));
        }
        Ok(Replicated { inner, copies })
    }

    pub fn inner(&self) -> &C {
        &self.inner
    }

    pub fn copies(&self) -> usize {
        self.copies
    }
}

impl<C: AvailabilityCode> AvailabilityCode for Replicated<C> {
    fn field(&self) -> &Arc<Field> {
        self.inner.field()
    }

    fn dimension(&self) -> usize {
        self.inner.dimension()
    }

    fn num_symbols(&self) -> usize {
        self.copies * self.inner.num_symbols()
    }

    fn symbol_width(&self) -> usize {
        self.inner.symbol_width()
    }

    fn encode(&self, message: &[Elem]) -> Result<Vec<Elem>> {
        Ok(self.inner.encode(message)?.repeat(self.copies))
    }

    fn targets(&self) -> Vec<usize> {
        self.inner.targets()
    }

    fn availability(&self) -> usize {
        self.copies * self.inner.availability()
    }

    fn pir_sets(&self, target: usize) -> Result<Vec<Vec<usize>>> {
        let base = self.inner.pir_sets(target)?;
        let n = self.inner.num_symbols();
        Ok((0..self.copies)
            .flat_map(|c| base.iter().map(move |set| set.iter().map(|&i| i + c * n).collect()))
            .collect())
    }

    fn recover(&self, word: &RestrictedWord, target: usize, set: &[usize]) -> Result<Vec<Elem>> {
        let n = self.inner.num_symbols();
        let copy = set.first().map_or(0, |&i| i / n);
        if set.iter().any(|&i| i / n != copy) {
            return Err(Error::Precondition("recovering set spans several copies".into()));
        }
        let symbols = set.iter().map(|&i| Ok((i - copy * n, word.symbol(i)?.to_vec()))).collect::<Result<_>>()?;
        let inner_word = RestrictedWord::from_symbols(self.inner.symbol_width(), symbols)?;
        let local: Vec<usize> = set.iter().map(|&i| i - copy * n).collect();
        self.inner.recover(&inner_word, target, &local)
    }

    fn describe(&self) -> String {
        format!("{} copies of {}", self.copies, self.inner.describe())
    }
}

impl<C: AvailabilityCode + ?Sized> AvailabilityCode for Box<C> {
    fn field(&self) -> &Arc<Field> {
        (**self).field()
    }
    fn dimension(&self) -> usize {
        (**self).dimension()
    }
    fn num_symbols(&self) -> usize {
        (**self).num_symbols()
    }
    fn symbol_width(&self) -> usize {
        (**self).symbol_width()
    }
    fn encode(&self, message: &[Elem]) -> Result<Vec<Elem>> {
        (**self).encode(message)
    }
    fn targets(&self) -> Vec<usize> {
        (**self).targets()
    }
    fn availability(&self) -> usize {
        (**self).availability()
    }
    fn pir_sets(&self, target: usize) -> Result<Vec<Vec<usize>>> {
        (**self).pir_sets(target)
    }
    fn recover(&self, word: &RestrictedWord, target: usize, set: &[usize]) -> Result<Vec<Elem>> {
        (**self).recover(word, target, set)
    }
    fn plan_batch(&self, request: &[usize]) -> Result<Vec<Vec<usize>>> {
        (**self).plan_batch(request)
    }
    fn describe(&self) -> String {
        (**self).describe()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    Qary,
    Binary,
}

/// Exponent `δ_s(ε)` of the redundancy from `s`-variate codes, or `None`
/// when `s` is not admissible (`s(1-ε) ≤ 1`).
pub fn pir_delta_s(epsilon: Ratio<i64>, s: i64, variant: Variant) -> Option<Ratio<i64>> {
    let one = Ratio::from_integer(1);
    if s < 2 || Ratio::from_integer(s) * (one - epsilon) <= one {
        return None;
    }
    let s_r = Ratio::from_integer(s);
    Some(match variant {
        Variant::Qary => one - one / s_r + epsilon / (s_r - one),
        Variant::Binary => one - (s_r * (one - epsilon) - one) / (Ratio::from_integer(2) * s_r * (s_r - one)),
    })
}

/// Largest `s` tried when minimising over `s`; enough for `ε ≤ 0.95`.
pub const S_SEARCH_LIMIT: i64 = 200;

/// `(s*, δ(ε))`: the minimum over admissible `s`, taking the largest
/// minimiser on ties. For `ε ≥ 1` replication gives `δ = ε` and no `s`.
pub fn pir_delta(epsilon: Ratio<i64>, variant: Variant) -> Result<(Option<i64>, Ratio<i64>)> {
    if epsilon < Ratio::from_integer(0) {
        return Err(Error::Parameter(format!("ε = {epsilon} is negative")));
    }
    if epsilon >= Ratio::from_integer(1) {
        return Ok((None, epsilon));
    }
    let mut best: Option<(i64, Ratio<i64>)> = None;
    for s in 2..=S_SEARCH_LIMIT {
        if let Some(delta) = pir_delta_s(epsilon, s, variant) {
            if best.is_none_or(|(_, b)| delta <= b) {
                best = Some((s, delta));
            }
        }
    }
    best.map(|(s, d)| (Some(s), d))
        .ok_or_else(|| Error::Parameter(format!("no admissible s up to {S_SEARCH_LIMIT} for ε = {epsilon}")))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PirCurveRow {
    pub epsilon: Ratio<i64>,
    /// `None` marks the minimum over `s` (or the replication line for `ε ≥ 1`).
    pub s: Option<i64>,
    pub delta: Ratio<i64>,
    pub s_star: Option<i64>,
}

/// Per-`s` curves for the listed `s` plus the minimum over all `s`.
pub fn pir_delta_curves(epsilons: &[Ratio<i64>], s_values: &[i64], variant: Variant) -> Result<Vec<PirCurveRow>> {
    let mut rows = Vec::new();
    for &eps in epsilons {
        let (s_star, best) = pir_delta(eps, variant)?;
        if eps < Ratio::from_integer(1) {
            for &s in s_values {
                if let Some(delta) = pir_delta_s(eps, s, variant) {
                    rows.push(PirCurveRow { epsilon: eps, s: Some(s), delta, s_star });
                }
            }
        }
        rows.push(PirCurveRow { epsilon: eps, s: None, delta: best, s_star });
    }
    Ok(rows)
}
