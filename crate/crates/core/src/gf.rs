//! Finite fields GF(q) for prime powers q up to 2^16.
//!
//! Elements are stored as a single integer `Σ c_i p^i` built from the
//! coefficient vector `(c_0, …, c_{e-1})` of their polynomial representative
//! modulo a monic irreducible of degree `e`. This integer is also the
//! enumeration order of the field, so zero is always element 0 and one is
//! element 1. Multiplication goes through discrete log tables built from a
//! primitive element found by search at construction time.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported field order.
pub const MAX_FIELD_ORDER: u32 = 1 << 16;

/// Degree bound for the brute-force irreducibility certificate.
const MAX_CERTIFIED_DEGREE: u32 = 16;

/// Trial-division primality test.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Least prime strictly greater than `bound`.
pub fn smallest_prime_above(bound: u64) -> u64 {
    let mut candidate = bound + 1;
    while !is_prime(candidate) {
        candidate += 1;
    }
    candidate
}

/// Descriptor of GF(p^e): characteristic, extension degree and the monic
/// irreducible modulus (coefficients low to high, length `e + 1`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldSpec {
    pub characteristic: u32,
    pub extension_degree: u32,
    pub modulus: Vec<u32>,
}

impl FieldSpec {
    /// The prime field GF(p), represented modulo the polynomial `x`.
    pub fn prime(p: u32) -> Result<Self> {
        let spec = FieldSpec { characteristic: p, extension_degree: 1, modulus: vec![0, 1] };
        spec.validate()?;
        Ok(spec)
    }

    /// GF(p^e) with the lexicographically smallest monic irreducible modulus.
    pub fn extension(p: u32, e: u32) -> Result<Self> {
        if e == 1 {
            return Self::prime(p);
        }
        check_prime(p)?;
        check_order(p, e)?;
        let candidates = (p as u64).pow(e);
        for low in 0..candidates {
            let mut modulus = digits(low as u32, p, e as usize);
            modulus.push(1);
            if is_irreducible(&modulus, p) {
                return Ok(FieldSpec { characteristic: p, extension_degree: e, modulus });
            }
        }
        Err(Error::InvalidField(format!("no irreducible polynomial of degree {e} over GF({p})")))
    }

    /// Field of order `q`, which must be a prime power.
    pub fn with_order(q: u32) -> Result<Self> {
        if q < 2 {
            return Err(Error::InvalidField(format!("field order {q} is not a prime power")));
        }
        let p = (2..=q).find(|d| q.is_multiple_of(*d)).unwrap();
        let mut rest = q;
        let mut e = 0;
        while rest.is_multiple_of(p) {
            rest /= p;
            e += 1;
        }
        if rest != 1 {
            return Err(Error::InvalidField(format!("field order {q} is not a prime power")));
        }
        Self::extension(p, e)
    }

    pub fn order(&self) -> u32 {
        self.characteristic.pow(self.extension_degree)
    }

    /// Checks primality of the characteristic and irreducibility of the modulus.
    pub fn validate(&self) -> Result<()> {
        check_prime(self.characteristic)?;
        if self.extension_degree == 0 {
            return Err(Error::InvalidField("extension degree must be positive".into()));
        }
        check_order(self.characteristic, self.extension_degree)?;
        let e = self.extension_degree as usize;
        if self.modulus.len() != e + 1 || self.modulus[e] != 1 {
            return Err(Error::InvalidField(format!("modulus must be monic of degree {e}")));
        }
        if self.modulus.iter().any(|&c| c >= self.characteristic) {
            return Err(Error::InvalidField("modulus coefficient out of range".into()));
        }
        if e == 1 {
            if self.modulus[0] != 0 {
                return Err(Error::InvalidField("prime field modulus must be x".into()));
            }
            return Ok(());
        }
        if self.extension_degree > MAX_CERTIFIED_DEGREE {
            return Err(Error::Capacity("modulus degree too large to certify".into()));
        }
        if !is_irreducible(&self.modulus, self.characteristic) {
            return Err(Error::InvalidField(format!("modulus {:?} is reducible", self.modulus)));
        }
        Ok(())
    }
}

fn check_prime(p: u32) -> Result<()> {
    if is_prime(p as u64) {
        Ok(())
    } else {
        Err(Error::InvalidField(format!("characteristic {p} is not prime")))
    }
}

fn check_order(p: u32, e: u32) -> Result<()> {
    match (p as u64).checked_pow(e) {
        Some(q) if q <= MAX_FIELD_ORDER as u64 => Ok(()),
        _ => Err(Error::Capacity(format!("field order {p}^{e} exceeds {MAX_FIELD_ORDER}"))),
    }
}

fn digits(mut value: u32, p: u32, len: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push(value % p);
        value /= p;
    }
    out
}

/// Remainder of `a` modulo monic `m` over GF(p); both low-to-high.
fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r: Vec<u32> = a.to_vec();
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = r.pop().unwrap();
        if lead == 0 {
            continue;
        }
        let shift = r.len() - dm;
        for (k, &mk) in m[..dm].iter().enumerate() {
            let sub = (lead as u64 * mk as u64 % p as u64) as u32;
            r[shift + k] = (r[shift + k] + p - sub) % p;
        }
    }
    r
}

/// Brute-force factor search: no monic factor of degree `1..=deg/2`.
fn is_irreducible(modulus: &[u32], p: u32) -> bool {
    let deg = modulus.len() - 1;
    for factor_deg in 1..=deg / 2 {
        let count = (p as u64).pow(factor_deg as u32);
        for low in 0..count {
            let mut factor = digits(low as u32, p, factor_deg);
            factor.push(1);
            if poly_rem(modulus, &factor, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

/// A field element as its enumeration index `Σ c_i p^i`.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Elem(pub u32);

impl Elem {
    pub const ZERO: Elem = Elem(0);
    pub const ONE: Elem = Elem(1);

    pub fn value(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Runtime field: arithmetic on [`Elem`] values.
#[derive(Debug)]
pub struct Field {
    spec: FieldSpec,
    order: u32,
    exp: Vec<u32>,
    log: Vec<u32>,
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
    }
}

impl Eq for Field {}

impl Field {
    pub fn new(spec: FieldSpec) -> Result<Self> {
        spec.validate()?;
        let order = spec.order();
        let mut field = Field { spec, order, exp: Vec::new(), log: Vec::new() };
        field.build_tables()?;
        Ok(field)
    }

    /// Shared handle to GF(q).
    pub fn of_order(q: u32) -> Result<Arc<Self>> {
        Ok(Arc::new(Self::new(FieldSpec::with_order(q)?)?))
    }

    fn build_tables(&mut self) -> Result<()> {
        let q = self.order;
        let n = (q - 1) as usize;
        let start = if q == 2 { 1 } else { 2 };
        for g in start..q {
            let mut exp = Vec::with_capacity(n);
            let mut x = 1u32;
            let mut primitive = true;
            for i in 0..n {
                if i > 0 && x == 1 {
                    primitive = false;
                    break;
                }
                exp.push(x);
                x = self.slow_mul(x, g);
            }
            if primitive && x == 1 {
                let mut log = vec![0u32; q as usize];
                for (i, &v) in exp.iter().enumerate() {
                    log[v as usize] = i as u32;
                }
                self.exp = exp;
                self.log = log;
                return Ok(());
            }
        }
        Err(Error::InvalidField("no primitive element found".into()))
    }

    fn slow_mul(&self, a: u32, b: u32) -> u32 {
        let p = self.spec.characteristic;
        let e = self.spec.extension_degree as usize;
        if e == 1 {
            return (a as u64 * b as u64 % p as u64) as u32;
        }
        let da = digits(a, p, e);
        let db = digits(b, p, e);
        let mut prod = vec![0u32; 2 * e - 1];
        for (i, &x) in da.iter().enumerate() {
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = ((prod[i + j] as u64 + x as u64 * y as u64) % p as u64) as u32;
            }
        }
        let rem = poly_rem(&prod, &self.spec.modulus, p);
        self.from_coefficients(&rem).0
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn characteristic(&self) -> u32 {
        self.spec.characteristic
    }

    pub fn extension_degree(&self) -> u32 {
        self.spec.extension_degree
    }

    pub fn zero(&self) -> Elem {
        Elem::ZERO
    }

    pub fn one(&self) -> Elem {
        Elem::ONE
    }

    /// Element with index `value`; `None` when out of range.
    pub fn elem(&self, value: u32) -> Option<Elem> {
        (value < self.order).then_some(Elem(value))
    }

    /// All elements in enumeration order: zero, one, then lexicographic on
    /// the coefficient index.
    pub fn elements(&self) -> impl Iterator<Item = Elem> + '_ {
        (0..self.order).map(Elem)
    }

    /// Image of an integer under the ring map Z → GF(q).
    pub fn from_int(&self, n: u64) -> Elem {
        Elem((n % self.spec.characteristic as u64) as u32)
    }

    pub fn coefficients(&self, a: Elem) -> Vec<u32> {
        digits(a.0, self.spec.characteristic, self.spec.extension_degree as usize)
    }

    pub fn from_coefficients(&self, coeffs: &[u32]) -> Elem {
        let p = self.spec.characteristic;
        let mut v = 0u32;
        for &c in coeffs.iter().rev() {
            v = v * p + c % p;
        }
        Elem(v)
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        let p = self.spec.characteristic;
        if self.spec.extension_degree == 1 {
            let s = a.0 + b.0;
            return Elem(if s >= p { s - p } else { s });
        }
        if p == 2 {
            return Elem(a.0 ^ b.0);
        }
        let (mut x, mut y, mut out, mut place) = (a.0, b.0, 0u32, 1u32);
        while x > 0 || y > 0 {
            out += ((x % p + y % p) % p) * place;
            x /= p;
            y /= p;
            place *= p;
        }
        Elem(out)
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        let p = self.spec.characteristic;
        if p == 2 {
            return a;
        }
        if self.spec.extension_degree == 1 {
            return Elem(if a.0 == 0 { 0 } else { p - a.0 });
        }
        let (mut x, mut out, mut place) = (a.0, 0u32, 1u32);
        while x > 0 {
            out += ((p - x % p) % p) * place;
            x /= p;
            place *= p;
        }
        Elem(out)
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a.0 == 0 || b.0 == 0 {
            return Elem::ZERO;
        }
        let n = self.order - 1;
        let l = self.log[a.0 as usize] + self.log[b.0 as usize];
        Elem(self.exp[(if l >= n { l - n } else { l }) as usize])
    }

    pub fn inv(&self, a: Elem) -> Result<Elem> {
        if a.0 == 0 {
            return Err(Error::DivisionByZero);
        }
        let n = self.order - 1;
        let l = self.log[a.0 as usize];
        Ok(Elem(self.exp[((n - l) % n) as usize]))
    }

    pub fn div(&self, a: Elem, b: Elem) -> Result<Elem> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: Elem, e: u64) -> Elem {
        if e == 0 {
            return Elem::ONE;
        }
        if a.0 == 0 {
            return Elem::ZERO;
        }
        let n = (self.order - 1) as u64;
        let l = self.log[a.0 as usize] as u64 * (e % n) % n;
        Elem(self.exp[l as usize])
    }

    /// Σ a_i b_i.
    pub fn dot(&self, a: &[Elem], b: &[Elem]) -> Elem {
        a.iter().zip(b).fold(Elem::ZERO, |acc, (&x, &y)| self.add(acc, self.mul(x, y)))
    }
}

/// Enumerates GF(q) in the fixed order documented on [`Field::elements`].
pub fn enumerate_field(field: &Field) -> Result<Vec<Elem>> {
    if field.order() > MAX_FIELD_ORDER {
        return Err(Error::Capacity(format!("field order {} exceeds {MAX_FIELD_ORDER}", field.order())));
    }
    Ok(field.elements().collect())
}

/// A field element bundled with its field, for checked mixed-field arithmetic.
#[derive(Clone, Debug)]
pub struct FieldElement {
    field: Arc<Field>,
    value: Elem,
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value && self.field == other.field
    }
}

impl Eq for FieldElement {}

impl FieldElement {
    pub fn new(field: &Arc<Field>, value: Elem) -> Result<Self> {
        if value.0 >= field.order() {
            return Err(Error::InvalidField(format!("{} is not an element of GF({})", value.0, field.order())));
        }
        Ok(FieldElement { field: field.clone(), value })
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn value(&self) -> Elem {
        self.value
    }

    pub fn coefficients(&self) -> Vec<u32> {
        self.field.coefficients(self.value)
    }

    fn same_field(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.field, &other.field) || self.field == other.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    fn with(&self, value: Elem) -> Self {
        FieldElement { field: self.field.clone(), value }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        Ok(self.with(self.field.add(self.value, other.value)))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        Ok(self.with(self.field.sub(self.value, other.value)))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        Ok(self.with(self.field.mul(self.value, other.value)))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        Ok(self.with(self.field.div(self.value, other.value)?))
    }

    pub fn inv(&self) -> Result<Self> {
        Ok(self.with(self.field.inv(self.value)?))
    }

    pub fn pow(&self, e: u64) -> Self {
        self.with(self.field.pow(self.value, e))
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.field.extension_degree() == 1 {
            return write!(f, "{}", self.value.0);
        }
        let terms: Vec<String> = self
            .coefficients()
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| match (i, c) {
                (0, c) => c.to_string(),
                (1, 1) => "x".to_string(),
                (1, c) => format!("{c}x"),
                (i, 1) => format!("x^{i}"),
                (i, c) => format!("{c}x^{i}"),
            })
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join("+"))
        }
    }
}
