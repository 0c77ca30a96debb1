//! Multiplicity codes: order-`m` evaluations of `s`-variate polynomials of
//! degree at most `d` at every point of `F_q^s`.
//!
//! Points are indexed lexicographically, `index = Σ w_k q^(s-1-k)` with each
//! coordinate read as its field-element index. Symbol `w` spans base-field
//! positions `index*L .. (index+1)*L` where `L = C(s+m-1, s)`, in graded-lex
//! order of the derivative multi-indices.

use std::collections::BTreeSet;
use std::sync::{Arc, OnceLock};

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::code::{AvailabilityCode, RestrictedWord, SymbolSource};
use crate::error::{Error, Result};
use crate::gf::{Elem, Field, FieldSpec};
use crate::linalg::{invert, Matrix};
use crate::mpoly::{
    binomial_in_field, count_degree, count_monomials, monomials_below, Monomial, MultiPoly, OrderedEvaluation,
};
use crate::{batch_mult, pir};

/// Largest base-field length a multiplicity code may have.
pub const MAX_CODE_LENGTH: usize = 1 << 22;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultCodeParams {
    pub m: usize,
    pub d: usize,
    pub s: usize,
    pub field: FieldSpec,
}

impl MultCodeParams {
    pub fn new(m: usize, d: usize, s: usize, q: u32) -> Result<Self> {
        Ok(MultCodeParams { m, d, s, field: FieldSpec::with_order(q)? })
    }

    pub fn q(&self) -> u32 {
        self.field.order()
    }
}

/// Summary numbers of a multiplicity code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodeProfile {
    /// `q^s` symbols.
    pub num_symbols: u64,
    /// Base-field entries per symbol, `C(s+m-1, s)`.
    pub symbol_width: u64,
    pub base_length: u64,
    /// `C(d+s, s)` information entries over `F_q`.
    pub base_dimension: u64,
    /// Dimension counted in symbols; may be fractional.
    pub dimension: Ratio<i64>,
    pub k_pir: u64,
    pub rate: Ratio<i64>,
    pub distance_bound: Ratio<i64>,
    /// Alphabet size `q^L`, if it fits.
    pub alphabet_size: Option<u128>,
}

pub fn code_profile(params: &MultCodeParams) -> CodeProfile {
    let (m, d, s) = (params.m, params.d, params.s);
    let q = params.q() as u64;
    let num_symbols = q.pow(s as u32);
    let width = count_monomials(s, m);
    let base_dimension = count_degree(s, d);
    let k_pir = if s == 1 { 1 } else { (q / m as u64).pow(s as u32 - 1) };
    let mq = (m as u64 * q) as i64;
    CodeProfile {
        num_symbols,
        symbol_width: width,
        base_length: num_symbols * width,
        base_dimension,
        dimension: Ratio::new(base_dimension as i64, width as i64),
        k_pir,
        rate: Ratio::new(base_dimension as i64, (num_symbols * width) as i64),
        distance_bound: Ratio::new((mq - d as i64) * num_symbols as i64, mq),
        alphabet_size: (q as u128).checked_pow(width as u32),
    }
}

/// Flat codeword: `num_symbols` blocks of `width` entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultCodeword {
    width: usize,
    data: Vec<Elem>,
}

impl MultCodeword {
    pub fn from_flat(width: usize, data: Vec<Elem>) -> Result<Self> {
        if width == 0 || !data.len().is_multiple_of(width) {
            return Err(Error::DimensionMismatch { expected: width, found: data.len() });
        }
        Ok(MultCodeword { width, data })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn num_symbols(&self) -> usize {
        self.data.len() / self.width
    }

    pub fn as_slice(&self) -> &[Elem] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<Elem> {
        self.data
    }

    pub fn restrict<I: IntoIterator<Item = usize>>(&self, allowed: I) -> Result<RestrictedWord> {
        RestrictedWord::new(&self.data, self.width, allowed)
    }
}

impl SymbolSource for MultCodeword {
    fn symbol(&self, index: usize) -> Result<&[Elem]> {
        self.data.get(index * self.width..(index + 1) * self.width).ok_or(Error::MissingCoordinate(index))
    }
}

/// Systematic encoder built from the base-field generator matrix.
#[derive(Clone, Debug)]
pub struct SystematicView {
    /// Base-field positions carrying the message, in increasing order.
    pub info_positions: Vec<usize>,
    /// Rows indexed by the basis monomials of degree `≤ d`.
    generator: Matrix,
    /// Inverse of the generator restricted to `info_positions`.
    inverse: Matrix,
}

impl SystematicView {
    pub fn generator(&self) -> &Matrix {
        &self.generator
    }
}

#[derive(Debug)]
pub struct MultiplicityCode {
    params: MultCodeParams,
    field: Arc<Field>,
    derivatives: Vec<Monomial>,
    basis: Vec<Monomial>,
    systematic: OnceLock<SystematicView>,
}

impl MultiplicityCode {
    pub fn new(params: MultCodeParams) -> Result<Self> {
        let field = Arc::new(Field::new(params.field.clone())?);
        Self::with_field(params.m, params.d, params.s, field)
    }

    pub fn with_field(m: usize, d: usize, s: usize, field: Arc<Field>) -> Result<Self> {
        if m == 0 || s == 0 {
            return Err(Error::Precondition("order and number of variables must be positive".into()));
        }
        let params = MultCodeParams { m, d, s, field: field.spec().clone() };
        let profile = code_profile(&params);
        if profile.base_length > MAX_CODE_LENGTH as u64 || profile.base_dimension > MAX_CODE_LENGTH as u64 {
            return Err(Error::Capacity(format!(
                "code length {} exceeds the supported maximum {MAX_CODE_LENGTH}",
                profile.base_length
            )));
        }
        Ok(MultiplicityCode {
            params,
            field,
            derivatives: monomials_below(s, m as u32),
            basis: monomials_below(s, d as u32 + 1),
            systematic: OnceLock::new(),
        })
    }

    pub fn params(&self) -> &MultCodeParams {
        &self.params
    }

    pub fn m(&self) -> usize {
        self.params.m
    }

    pub fn d(&self) -> usize {
        self.params.d
    }

    pub fn s(&self) -> usize {
        self.params.s
    }

    pub fn q(&self) -> u32 {
        self.field.order()
    }

    pub fn profile(&self) -> CodeProfile {
        code_profile(&self.params)
    }

    /// Derivative multi-indices of one symbol, in graded-lex order.
    pub fn derivatives(&self) -> &[Monomial] {
        &self.derivatives
    }

    /// Monomials spanning the message space.
    pub fn basis(&self) -> &[Monomial] {
        &self.basis
    }

    pub fn width(&self) -> usize {
        self.derivatives.len()
    }

    pub fn point_count(&self) -> usize {
        (self.q() as usize).pow(self.s() as u32)
    }

    pub fn point(&self, index: usize) -> Vec<Elem> {
        let q = self.q() as usize;
        let mut out = vec![Elem::ZERO; self.s()];
        let mut rest = index;
        for slot in out.iter_mut().rev() {
            *slot = Elem((rest % q) as u32);
            rest /= q;
        }
        out
    }

    pub fn point_index(&self, point: &[Elem]) -> Result<usize> {
        if point.len() != self.s() {
            return Err(Error::DimensionMismatch { expected: self.s(), found: point.len() });
        }
        let q = self.q();
        point.iter().try_fold(0usize, |acc, &x| {
            if x.value() >= q {
                Err(Error::InvalidField(format!("{} is not an element of GF({q})", x.value())))
            } else {
                Ok(acc * q as usize + x.value() as usize)
            }
        })
    }

    pub fn encode_poly(&self, poly: &MultiPoly) -> Result<MultCodeword> {
        if poly.vars() != self.s() {
            return Err(Error::DimensionMismatch { expected: self.s(), found: poly.vars() });
        }
        if **poly.field() != *self.field {
            return Err(Error::FieldMismatch);
        }
        if let Some(deg) = poly.degree() {
            if deg as usize > self.d() {
                return Err(Error::Precondition(format!("degree {deg} exceeds the bound {}", self.d())));
            }
        }
        let mut data = Vec::with_capacity(self.point_count() * self.width());
        for idx in 0..self.point_count() {
            let w = self.point(idx);
            for i in &self.derivatives {
                data.push(poly.hasse_at(i, &w)?);
            }
        }
        Ok(MultCodeword { width: self.width(), data })
    }

    /// Hasse derivative `(x^b)^(i)` at `w`.
    fn monomial_hasse(&self, b: &Monomial, i: &Monomial, w: &[Elem]) -> Elem {
        let f = &self.field;
        let mut acc = Elem::ONE;
        for ((&bk, &ik), &x) in b.exps().iter().zip(i.exps()).zip(w) {
            if ik > bk {
                return Elem::ZERO;
            }
            acc = f.mul(acc, f.mul(binomial_in_field(f, bk, ik), f.pow(x, (bk - ik) as u64)));
        }
        acc
    }

    pub fn systematic_view(&self) -> Result<&SystematicView> {
        if let Some(v) = self.systematic.get() {
            return Ok(v);
        }
        let n = self.basis.len();
        let len = self.point_count() * self.width();
        let mut g = Matrix::zeros(n, len);
        for idx in 0..self.point_count() {
            let w = self.point(idx);
            for (e, i) in self.derivatives.iter().enumerate() {
                for (r, b) in self.basis.iter().enumerate() {
                    g.set(r, idx * self.width() + e, self.monomial_hasse(b, i, &w));
                }
            }
        }
        let pivots = g.clone().rref(&self.field);
        if pivots.len() < n {
            return Err(Error::Precondition(format!(
                "degree {} is too large for GF({}): the evaluation map is not injective",
                self.d(),
                self.q()
            )));
        }
        let inverse = invert(&self.field, &g.select_columns(&pivots))?;
        let view = SystematicView { info_positions: pivots, generator: g, inverse };
        Ok(self.systematic.get_or_init(|| view))
    }

    /// Polynomial whose codeword carries `info` at the info positions.
    pub fn info_to_poly(&self, info: &[Elem]) -> Result<MultiPoly> {
        let coeffs = self.info_to_coefficients(info)?;
        MultiPoly::from_terms(&self.field, self.s(), self.basis.iter().zip(coeffs).map(|(b, c)| (b.exps().to_vec(), c)))
    }

    fn info_to_coefficients(&self, info: &[Elem]) -> Result<Vec<Elem>> {
        let view = self.systematic_view()?;
        let n = self.basis.len();
        if info.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: info.len() });
        }
        let f = &self.field;
        Ok((0..n)
            .map(|c| (0..n).fold(Elem::ZERO, |acc, r| f.add(acc, f.mul(info[r], view.inverse.get(r, c)))))
            .collect())
    }

    pub fn systematic_encode(&self, info: &[Elem]) -> Result<MultCodeword> {
        let coeffs = self.info_to_coefficients(info)?;
        let view = self.systematic_view()?;
        let f = &self.field;
        let g = &view.generator;
        let mut data = vec![Elem::ZERO; g.cols()];
        for (r, &a) in coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (slot, &x) in data.iter_mut().zip(g.row(r)) {
                *slot = f.add(*slot, f.mul(a, x));
            }
        }
        Ok(MultCodeword { width: self.width(), data })
    }

    pub fn extract_info(&self, word: &MultCodeword) -> Result<Vec<Elem>> {
        let view = self.systematic_view()?;
        view.info_positions
            .iter()
            .map(|&p| word.data.get(p).copied().ok_or(Error::MissingCoordinate(p / self.width())))
            .collect()
    }

    /// Order-`m` univariate samples of `λ ↦ P(w0 + λv)` read off the
    /// symbols on the line, skipping `λ = 0` and `drops`.
    pub fn line_samples<S: SymbolSource + ?Sized>(
        &self,
        source: &S,
        w0: &[Elem],
        v: &[Elem],
        drops: &BTreeSet<Elem>,
    ) -> Result<Vec<(Elem, OrderedEvaluation)>> {
        if v.len() != self.s() || w0.len() != self.s() {
            return Err(Error::DimensionMismatch { expected: self.s(), found: v.len().min(w0.len()) });
        }
        if v.iter().all(|x| x.is_zero()) {
            return Err(Error::Precondition("line direction must be nonzero".into()));
        }
        let f = &self.field;
        let m = self.m();
        // For each univariate order j, the (entry, v^i) pairs with wt(i) = j.
        let weights: Vec<Vec<(usize, Elem)>> = (0..m)
            .map(|j| {
                self.derivatives
                    .iter()
                    .enumerate()
                    .filter(|(_, i)| i.weight() as usize == j)
                    .map(|(e, i)| (e, i.evaluate(f, v)))
                    .collect()
            })
            .collect();
        let mut out = Vec::new();
        for lambda in f.elements().skip(1) {
            if drops.contains(&lambda) {
                continue;
            }
            let point: Vec<Elem> = w0.iter().zip(v).map(|(&a, &b)| f.add(a, f.mul(lambda, b))).collect();
            let sym = source.symbol(self.point_index(&point)?)?;
            let entries = weights
                .iter()
                .map(|terms| terms.iter().fold(Elem::ZERO, |acc, &(e, c)| f.add(acc, f.mul(sym[e], c))))
                .collect();
            out.push((lambda, OrderedEvaluation::new(1, m, entries)?));
        }
        Ok(out)
    }
}

impl AvailabilityCode for MultiplicityCode {
    fn field(&self) -> &Arc<Field> {
        &self.field
    }

    fn dimension(&self) -> usize {
        self.basis.len()
    }

    fn num_symbols(&self) -> usize {
        self.point_count()
    }

    fn symbol_width(&self) -> usize {
        self.width()
    }

    fn encode(&self, message: &[Elem]) -> Result<Vec<Elem>> {
        Ok(self.systematic_encode(message)?.into_vec())
    }

    fn targets(&self) -> Vec<usize> {
        (0..self.point_count()).collect()
    }

    fn availability(&self) -> usize {
        self.profile().k_pir as usize
    }

    fn pir_sets(&self, target: usize) -> Result<Vec<Vec<usize>>> {
        let plans = pir::pir_recovery_plans(self, &self.point(target))?;
        Ok(plans.into_iter().map(|p| p.coordinates.into_iter().collect()).collect())
    }

    fn recover(&self, word: &RestrictedWord, target: usize, set: &[usize]) -> Result<Vec<Elem>> {
        let plan = pir::plan_for_set(self, &self.point(target), set)?;
        Ok(pir::recover_symbol(self, word, &plan)?.entries)
    }

    fn plan_batch(&self, request: &[usize]) -> Result<Vec<Vec<usize>>> {
        let bp = batch_mult::validate_batch_params(self.params(), request.len())?;
        let points = request.iter().map(|&i| self.point(i)).collect::<Vec<_>>();
        let plan = batch_mult::plan_batch(self, &bp, &points)?;
        // Plans come back in sorted-request order; hand them out per entry.
        let mut order: Vec<usize> = (0..request.len()).collect();
        order.sort_by_key(|&j| request[j]);
        let mut out = vec![Vec::new(); request.len()];
        for (slot, p) in order.into_iter().zip(plan.plans) {
            out[slot] = p.coordinates.into_iter().collect();
        }
        Ok(out)
    }

    fn describe(&self) -> String {
        format!("multiplicity code C(m={}, d={}, s={}, q={})", self.m(), self.d(), self.s(), self.q())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn code(m: usize, d: usize, s: usize, q: u32) -> MultiplicityCode {
        MultiplicityCode::new(MultCodeParams::new(m, d, s, q).unwrap()).unwrap()
    }

    fn ev(v: &[u32]) -> Vec<Elem> {
        v.iter().map(|&x| Elem(x)).collect()
    }

    #[test]
    fn reed_solomon_case() {
        let c = code(1, 1, 1, 3);
        let f = AvailabilityCode::field(&c).clone();
        let p = MultiPoly::univariate(&f, &ev(&[1, 1]));
        assert_eq!(c.encode_poly(&p).unwrap().as_slice(), ev(&[1, 2, 0]).as_slice());
        assert_eq!(c.systematic_view().unwrap().info_positions, vec![0, 1]);
        assert_eq!(c.systematic_encode(&ev(&[1, 2])).unwrap().as_slice(), ev(&[1, 2, 0]).as_slice());
        let zero = c.encode_poly(&MultiPoly::zero(&f, 1)).unwrap();
        assert!(zero.as_slice().iter().all(|x| x.is_zero()));
    }

    #[test]
    fn order_two_symbol() {
        let c = code(2, 2, 1, 5);
        let f = AvailabilityCode::field(&c).clone();
        let p = MultiPoly::univariate(&f, &ev(&[1, 0, 1]));
        let word = c.encode_poly(&p).unwrap();
        assert_eq!(word.symbol(1).unwrap(), ev(&[2, 2]).as_slice());
        let too_big = MultiPoly::univariate(&f, &ev(&[0, 0, 0, 1]));
        assert!(matches!(c.encode_poly(&too_big), Err(Error::Precondition(_))));
    }

    #[test]
    fn point_indexing() {
        let c = code(2, 2, 2, 7);
        for idx in 0..49 {
            assert_eq!(c.point_index(&c.point(idx)).unwrap(), idx);
        }
        assert_eq!(c.point(8), ev(&[1, 1]));
    }

    #[test]
    fn profile_numbers() {
        let p = code_profile(&MultCodeParams::new(2, 2, 2, 7).unwrap());
        assert_eq!(p.num_symbols, 49);
        assert_eq!(p.k_pir, 3);
        assert_eq!(p.distance_bound, Ratio::from_integer(42));
        assert_eq!(p.dimension, Ratio::from_integer(2));
        assert_eq!(p.base_dimension, 6);
        assert_eq!(p.base_length, 147);
        assert_eq!(p.alphabet_size, Some(343));
        let one = code_profile(&MultCodeParams::new(3, 1, 1, 2).unwrap());
        assert_eq!(one.k_pir, 1);
    }

    #[test]
    fn systematic_round_trip_and_linearity() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (m, d, s, q) in [(2, 2, 2, 7), (1, 2, 2, 4), (3, 3, 2, 7), (2, 3, 1, 8)] {
            let c = code(m, d, s, q);
            let f = AvailabilityCode::field(&c).clone();
            for _ in 0..10 {
                let p = MultiPoly::random(&f, s, d as u32, &mut rng);
                let q2 = MultiPoly::random(&f, s, d as u32, &mut rng);
                let word = c.encode_poly(&p).unwrap();
                let info = c.extract_info(&word).unwrap();
                assert_eq!(c.systematic_encode(&info).unwrap(), word);
                assert_eq!(c.info_to_poly(&info).unwrap(), p);
                let a = f.from_int(3);
                let sum = p.scale(a).add(&q2).unwrap();
                let lhs = c.encode_poly(&sum).unwrap();
                let w2 = c.encode_poly(&q2).unwrap();
                let rhs: Vec<Elem> =
                    word.as_slice().iter().zip(w2.as_slice()).map(|(&x, &y)| f.add(f.mul(a, x), y)).collect();
                assert_eq!(lhs.as_slice(), rhs.as_slice());
            }
            let zero = c.systematic_encode(&vec![Elem::ZERO; c.dimension()]).unwrap();
            assert!(zero.as_slice().iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn line_samples_match_substitution() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let c = code(2, 2, 2, 7);
        let f = AvailabilityCode::field(&c).clone();
        for _ in 0..20 {
            let p = MultiPoly::random(&f, 2, 2, &mut rng);
            let word = c.encode_poly(&p).unwrap();
            let w0 = ev(&[3, 5]);
            let v = ev(&[2, 1]);
            let samples = c.line_samples(&word, &w0, &v, &BTreeSet::new()).unwrap();
            assert_eq!(samples.len(), 6);
            let line = crate::mpoly::hermite_interpolate(&f, &samples, 2).unwrap();
            for lambda in f.elements() {
                let pt: Vec<Elem> = w0.iter().zip(&v).map(|(&a, &b)| f.add(a, f.mul(lambda, b))).collect();
                assert_eq!(line.evaluate(&[lambda]).unwrap(), p.evaluate(&pt).unwrap());
            }
        }
        // Order one: plain evaluations.
        let rs = code(1, 2, 2, 5);
        let f5 = AvailabilityCode::field(&rs).clone();
        let p = MultiPoly::random(&f5, 2, 2, &mut rng);
        let word = rs.encode_poly(&p).unwrap();
        let drops: BTreeSet<Elem> = [Elem(2)].into();
        let samples = rs.line_samples(&word, &ev(&[0, 0]), &ev(&[1, 1]), &drops).unwrap();
        assert_eq!(samples.len(), 3);
        for (l, s) in samples {
            assert_eq!(s.entries, vec![p.evaluate(&[l, l]).unwrap()]);
        }
    }

    #[test]
    fn restricted_reads_fail_outside_the_set() {
        let c = code(2, 2, 2, 7);
        let word = c.systematic_encode(&[Elem::ONE; 6]).unwrap();
        let r = word.restrict([1, 2]).unwrap();
        assert!(r.symbol(1).is_ok());
        assert_eq!(r.symbol(0), Err(Error::MissingCoordinate(0)));
        assert!(c.line_samples(&r, &ev(&[0, 0]), &ev(&[0, 1]), &BTreeSet::new()).is_err());
    }
}
