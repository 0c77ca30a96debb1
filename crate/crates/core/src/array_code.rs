//! Binary array codes: an `r × p` data array protected by one parity bit per
//! diagonal for each slope in `S`, optionally followed by a global parity
//! bit.
//!
//! Flat layout: data cell `(i, j)` at `i·p + j`, parity `ρ_{ℓ,t}` at
//! `r·p + ℓ·p + t`, global parity last.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::code::{AvailabilityCode, RestrictedWord, SymbolSource};
use crate::error::{Error, Result};
use crate::gf::{is_prime, smallest_prime_above, Elem, Field};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrayCodeParams {
    pub r: usize,
    pub p: usize,
    #[serde(rename = "S")]
    pub slopes: Vec<usize>,
    #[serde(default)]
    pub global_parity: bool,
}

impl ArrayCodeParams {
    pub fn new(r: usize, p: usize, slopes: Vec<usize>, global_parity: bool) -> Result<Self> {
        let params = ArrayCodeParams { r, p, slopes, global_parity };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.r == 0 || self.p == 0 {
            return Err(Error::Parameter("r and p must be positive".into()));
        }
        if self.slopes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Parameter("slopes must be strictly increasing".into()));
        }
        if let Some(&s) = self.slopes.iter().find(|&&s| s >= self.p) {
            return Err(Error::Parameter(format!("slope {s} is not below p = {}", self.p)));
        }
        Ok(())
    }

    pub fn k(&self) -> usize {
        self.slopes.len()
    }

    pub fn dimension(&self) -> usize {
        self.r * self.p
    }

    pub fn redundancy(&self) -> usize {
        self.k() * self.p + usize::from(self.global_parity)
    }

    pub fn length(&self) -> usize {
        self.dimension() + self.redundancy()
    }

    pub fn data_index(&self, i: usize, j: usize) -> usize {
        i * self.p + j
    }

    pub fn parity_index(&self, l: usize, t: usize) -> usize {
        self.dimension() + l * self.p + t
    }

    pub fn global_index(&self) -> Option<usize> {
        self.global_parity.then(|| self.dimension() + self.k() * self.p)
    }

    /// Offset of the slope-`s` diagonal through `(i, j)`.
    pub fn offset_through(&self, s: usize, i: usize, j: usize) -> usize {
        (j + self.p - (i * s) % self.p) % self.p
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagonal {
    pub slope: usize,
    pub offset: usize,
    pub cells: Vec<(usize, usize)>,
}

/// `D_{s,t} = {(i, (t + i·s) mod p) : i < r}`.
pub fn diagonal(s: usize, t: usize, r: usize, p: usize) -> Result<Diagonal> {
    if s >= p || t >= p {
        return Err(Error::Parameter(format!("slope {s} and offset {t} must be below p = {p}")));
    }
    let cells = (0..r).map(|i| (i, (t + i * s) % p)).collect();
    Ok(Diagonal { slope: s, offset: t, cells })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArrayCodeword {
    pub data: Vec<Vec<u8>>,
    pub parities: Vec<Vec<u8>>,
    pub global: Option<u8>,
}

impl ArrayCodeword {
    pub fn to_flat(&self) -> Vec<Elem> {
        self.data.iter().chain(&self.parities).flatten().chain(self.global.iter()).map(|&b| Elem(b as u32)).collect()
    }
}

pub fn encode_array(params: &ArrayCodeParams, data: &[Vec<u8>]) -> Result<ArrayCodeword> {
    if data.len() != params.r {
        return Err(Error::DimensionMismatch { expected: params.r, found: data.len() });
    }
    if let Some(row) = data.iter().find(|row| row.len() != params.p) {
        return Err(Error::DimensionMismatch { expected: params.p, found: row.len() });
    }
    if data.iter().flatten().any(|&b| b > 1) {
        return Err(Error::Precondition("data entries must be bits".into()));
    }
    let mut parities = vec![vec![0u8; params.p]; params.k()];
    for (l, &s) in params.slopes.iter().enumerate() {
        for (i, row) in data.iter().enumerate() {
            for (j, &bit) in row.iter().enumerate() {
                parities[l][params.offset_through(s, i, j)] ^= bit;
            }
        }
    }
    let global = params.global_parity.then(|| data.iter().flatten().fold(0, |a, &b| a ^ b));
    Ok(ArrayCodeword { data: data.to_vec(), parities, global })
}

/// A triple of distinct slopes and weights with `x·s1 + y·s2 ≡ (x+y)·s3 (mod p)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ApWitness {
    pub s1: usize,
    pub s2: usize,
    pub s3: usize,
    pub x: usize,
    pub y: usize,
}

/// Searches for an `r`-weighted arithmetic progression in `slopes`: distinct
/// `s1, s2, s3` and `0 < x, y < r−1`, `x + y < r`.
pub fn has_weighted_ap(slopes: &[usize], r: usize, p: usize) -> Option<ApWitness> {
    let weights: Vec<(usize, usize)> = (1..r.saturating_sub(1))
        .flat_map(|x| (1..r.saturating_sub(1)).map(move |y| (x, y)))
        .filter(|&(x, y)| x + y < r)
        .collect();
    for &s1 in slopes {
        for &s2 in slopes {
            for &s3 in slopes {
                if s1 == s2 || s1 == s3 || s2 == s3 {
                    continue;
                }
                for &(x, y) in &weights {
                    if (x * s1 + y * s2) % p == ((x + y) * s3) % p {
                        return Some(ApWitness { s1, s2, s3, x, y });
                    }
                }
            }
        }
    }
    None
}

/// Scans `0, 1, 2, …` and keeps every candidate that leaves the set free of
/// `r`-weighted progressions, until `k` slopes are found.
pub fn greedy_slope_set(r: usize, p: usize, k: usize) -> Result<Vec<usize>> {
    if !is_prime(p as u64) {
        return Err(Error::Parameter(format!("p = {p} is not prime")));
    }
    let mut slopes = Vec::with_capacity(k);
    for c in 0..p {
        if slopes.len() == k {
            break;
        }
        slopes.push(c);
        if has_weighted_ap(&slopes, r, p).is_some() {
            slopes.pop();
        }
    }
    if slopes.len() < k {
        return Err(Error::SlopeSearchExhausted { achieved: slopes.len(), requested: k });
    }
    Ok(slopes)
}

/// `p` is the smallest prime above `2k²r²`, slopes come from the greedy search.
pub fn build_rk_batch(r: usize, k: usize) -> Result<ArrayCodeParams> {
    if r < 2 || k < 1 {
        return Err(Error::Parameter(format!("need r ≥ 2 and k ≥ 1, got r = {r}, k = {k}")));
    }
    let p = smallest_prime_above((2 * k * k * r * r) as u64) as usize;
    ArrayCodeParams::new(r, p, greedy_slope_set(r, p, k)?, false)
}

/// The `p × p` code with slopes `{0, …, 4}` and a global parity bit.
pub fn five_batch_code(p: usize) -> Result<ArrayCodeParams> {
    if p < 5 || !is_prime(p as u64) {
        return Err(Error::Parameter(format!("p = {p} must be a prime of at least 5")));
    }
    ArrayCodeParams::new(p, p, (0..5).collect(), true)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorollaryParams {
    pub params: ArrayCodeParams,
    pub dimension: usize,
    pub redundancy: usize,
}

/// Array parameters for dimension at least `n` and `k` requests: the least
/// `r` with `r³k² ≥ n`, i.e. `⌈n^(1/3) / k^(2/3)⌉`.
pub fn corollary_params(n: usize, k: usize) -> Result<CorollaryParams> {
    if k == 0 || k * k >= n {
        return Err(Error::Parameter(format!("need 1 ≤ k and k² < n, got n = {n}, k = {k}")));
    }
    let mut r = 1usize;
    while r.pow(3) * k * k < n {
        r += 1;
    }
    let params = build_rk_batch(r, k)?;
    Ok(CorollaryParams { dimension: params.dimension(), redundancy: params.redundancy(), params })
}

/// Bit set over code positions.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Mask(Vec<u64>);

impl Mask {
    fn new(len: usize, members: &[usize]) -> Self {
        let mut words = vec![0u64; len.div_ceil(64)];
        for &m in members {
            words[m / 64] |= 1 << (m % 64);
        }
        Mask(words)
    }

    fn meets(&self, other: &Mask) -> bool {
        self.0.iter().zip(&other.0).any(|(a, b)| a & b != 0)
    }

    fn union_with(&mut self, other: &Mask) {
        self.0.iter_mut().zip(&other.0).for_each(|(a, b)| *a |= b);
    }

    fn remove(&mut self, other: &Mask) {
        self.0.iter_mut().zip(&other.0).for_each(|(a, b)| *a &= !b);
    }
}

#[derive(Debug)]
pub struct ArrayCode {
    params: ArrayCodeParams,
    field: Arc<Field>,
    ap_free: bool,
}

impl ArrayCode {
    pub fn new(params: ArrayCodeParams) -> Result<Self> {
        params.validate()?;
        let ap_free = is_prime(params.p as u64)
            && params.r <= params.p
            && has_weighted_ap(&params.slopes, params.r, params.p).is_none();
        Ok(ArrayCode { params, field: Field::of_order(2)?, ap_free })
    }

    pub fn params(&self) -> &ArrayCodeParams {
        &self.params
    }

    fn cell(&self, bit: usize) -> Result<(usize, usize)> {
        if bit >= self.params.dimension() {
            return Err(Error::Parameter(format!("bit {bit} is outside the {} data bits", self.params.dimension())));
        }
        Ok((bit / self.params.p, bit % self.params.p))
    }

    /// Set `ℓ`: parity `ρ_{ℓ,t}` and the rest of the slope-`s_ℓ` diagonal
    /// through the cell.
    pub fn pir_sets_for_bit(&self, i: usize, j: usize) -> Result<Vec<Vec<usize>>> {
        let pr = &self.params;
        if i >= pr.r || j >= pr.p {
            return Err(Error::Parameter(format!("cell ({i}, {j}) is outside the {}×{} array", pr.r, pr.p)));
        }
        pr.slopes
            .iter()
            .enumerate()
            .map(|(l, &s)| {
                let t = pr.offset_through(s, i, j);
                let diag = diagonal(s, t, pr.r, pr.p)?;
                let mut set: Vec<usize> =
                    diag.cells.iter().filter(|&&c| c != (i, j)).map(|&(a, b)| pr.data_index(a, b)).collect();
                set.push(pr.parity_index(l, t));
                set.sort_unstable();
                Ok(set)
            })
            .collect()
    }

    /// Every set this code knows how to recover `bit` from, in the order
    /// the batch matcher tries them: the bit itself, the diagonal sets,
    /// row-pair sets (only when the slopes cover all of `Z_p`), then sets
    /// that use the global parity.
    pub fn candidate_sets(&self, bit: usize) -> Result<Vec<Vec<usize>>> {
        let (i, j) = self.cell(bit)?;
        let pr = &self.params;
        let mut out = vec![vec![bit]];
        out.extend(self.pir_sets_for_bit(i, j)?);
        if pr.k() == pr.p && pr.r <= pr.p && is_prime(pr.p as u64) {
            for j2 in (0..pr.p).filter(|&c| c != j) {
                let mut set = vec![pr.data_index(i, j2)];
                for (l, &s) in pr.slopes.iter().enumerate() {
                    set.push(pr.parity_index(l, pr.offset_through(s, i, j)));
                    set.push(pr.parity_index(l, pr.offset_through(s, i, j2)));
                }
                set.sort_unstable();
                out.push(set);
            }
        }
        if let Some(g) = pr.global_index() {
            for (l, &s) in pr.slopes.iter().enumerate() {
                let t = pr.offset_through(s, i, j);
                let mut set = vec![g];
                set.extend((0..pr.p).filter(|&u| u != t).map(|u| pr.parity_index(l, u)));
                let diag = diagonal(s, t, pr.r, pr.p)?;
                set.extend(diag.cells.iter().filter(|&&c| c != (i, j)).map(|&(a, b)| pr.data_index(a, b)));
                set.sort_unstable();
                out.push(set);
            }
        }
        Ok(out)
    }

    /// Greedy assignment over the diagonal sets: requests in sorted order,
    /// each taking its first set disjoint from everything chosen so far.
    fn greedy(&self, request: &[usize]) -> Result<Option<Vec<Vec<usize>>>> {
        let len = self.params.length();
        let mut used = Mask::new(len, &[]);
        let mut order: Vec<usize> = (0..request.len()).collect();
        order.sort_by_key(|&j| request[j]);
        let mut out = vec![Vec::new(); request.len()];
        for j in order {
            let (a, b) = self.cell(request[j])?;
            let pick = self
                .pir_sets_for_bit(a, b)?
                .into_iter()
                .map(|s| {
                    let m = Mask::new(len, &s);
                    (s, m)
                })
                .find(|(_, m)| !m.meets(&used));
            let Some((set, mask)) = pick else { return Ok(None) };
            used.union_with(&mask);
            out[j] = set;
        }
        Ok(Some(out))
    }

    /// Exhaustive backtracking over [`ArrayCode::candidate_sets`].
    pub fn match_request(&self, request: &[usize]) -> Result<Option<Vec<Vec<usize>>>> {
        let len = self.params.length();
        let mut order: Vec<usize> = (0..request.len()).collect();
        order.sort_by_key(|&j| request[j]);
        let mut candidates = Vec::with_capacity(order.len());
        for &j in &order {
            let sets = self.candidate_sets(request[j])?;
            candidates.push(sets.into_iter().map(|s| (Mask::new(len, &s), s)).collect::<Vec<_>>());
        }
        fn search(depth: usize, cands: &[Vec<(Mask, Vec<usize>)>], used: &mut Mask, picks: &mut Vec<usize>) -> bool {
            if depth == cands.len() {
                return true;
            }
            for (idx, (mask, _)) in cands[depth].iter().enumerate() {
                if mask.meets(used) {
                    continue;
                }
                used.union_with(mask);
                picks.push(idx);
                if search(depth + 1, cands, used, picks) {
                    return true;
                }
                picks.pop();
                used.remove(mask);
            }
            false
        }
        let mut used = Mask::new(len, &[]);
        let mut picks = Vec::new();
        if !search(0, &candidates, &mut used, &mut picks) {
            return Ok(None);
        }
        let mut out = vec![Vec::new(); request.len()];
        for ((&j, &pick), cands) in order.iter().zip(&picks).zip(&candidates) {
            out[j] = cands[pick].1.clone();
        }
        Ok(Some(out))
    }

    /// One recovering set per requested data bit, pairwise disjoint,
    /// returned in request order.
    pub fn plan_array_batch(&self, request: &[usize]) -> Result<Vec<Vec<usize>>> {
        if request.len() > self.params.k() {
            return Err(Error::Parameter(format!(
                "{} requests exceed the batch size k = {}",
                request.len(),
                self.params.k()
            )));
        }
        if !self.params.global_parity {
            if !self.ap_free {
                return Err(Error::Precondition(
                    "batch planning needs prime p, r ≤ p and a slope set without weighted progressions".into(),
                ));
            }
            return self
                .greedy(request)?
                .ok_or_else(|| Error::Certification(format!("greedy assignment failed for request {request:?}")));
        }
        if let Some(sets) = self.greedy(request)? {
            return Ok(sets);
        }
        self.match_request(request)?
            .ok_or_else(|| Error::Certification(format!("no disjoint recovering sets for request {request:?}")))
    }

    pub fn encode_bits(&self, message: &[Elem]) -> Result<ArrayCodeword> {
        let pr = &self.params;
        if message.len() != pr.dimension() {
            return Err(Error::DimensionMismatch { expected: pr.dimension(), found: message.len() });
        }
        let data: Vec<Vec<u8>> =
            message.chunks(pr.p).map(|row| row.iter().map(|b| b.value() as u8).collect()).collect();
        encode_array(pr, &data)
    }
}

impl AvailabilityCode for ArrayCode {
    fn field(&self) -> &Arc<Field> {
        &self.field
    }

    fn dimension(&self) -> usize {
        self.params.dimension()
    }

    fn num_symbols(&self) -> usize {
        self.params.length()
    }

    fn symbol_width(&self) -> usize {
        1
    }

    fn encode(&self, message: &[Elem]) -> Result<Vec<Elem>> {
        Ok(self.encode_bits(message)?.to_flat())
    }

    fn targets(&self) -> Vec<usize> {
        (0..self.params.dimension()).collect()
    }

    fn availability(&self) -> usize {
        self.params.k()
    }

    fn pir_sets(&self, target: usize) -> Result<Vec<Vec<usize>>> {
        let (i, j) = self.cell(target)?;
        self.pir_sets_for_bit(i, j)
    }

    /// XOR of the set, after checking it is one of the known sets for
    /// `target`.
    fn recover(&self, word: &RestrictedWord, target: usize, set: &[usize]) -> Result<Vec<Elem>> {
        let mut sorted = set.to_vec();
        sorted.sort_unstable();
        if !self.candidate_sets(target)?.contains(&sorted) {
            return Err(Error::Precondition(format!("{set:?} is not a recovering set of bit {target}")));
        }
        let mut bit = Elem::ZERO;
        for &c in &sorted {
            bit = self.field.add(bit, word.symbol(c)?[0]);
        }
        Ok(vec![bit])
    }

    fn plan_batch(&self, request: &[usize]) -> Result<Vec<Vec<usize>>> {
        self.plan_array_batch(request)
    }

    fn describe(&self) -> String {
        let pr = &self.params;
        format!(
            "array code r={} p={} S={:?}{}",
            pr.r,
            pr.p,
            pr.slopes,
            if pr.global_parity { " with global parity" } else { "" }
        )
    }
}

/// Pairwise intersection sizes of a family of sets; used by tests and reports.
pub fn max_overlap(sets: &[Vec<usize>]) -> usize {
    let as_sets: Vec<BTreeSet<usize>> = sets.iter().map(|s| s.iter().copied().collect()).collect();
    let mut worst = 0;
    for a in 0..as_sets.len() {
        for b in a + 1..as_sets.len() {
            worst = worst.max(as_sets[a].intersection(&as_sets[b]).count());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonals() {
        assert_eq!(diagonal(1, 0, 2, 3).unwrap().cells, vec![(0, 0), (1, 1)]);
        assert_eq!(diagonal(0, 2, 3, 5).unwrap().cells, vec![(0, 2), (1, 2), (2, 2)]);
        assert_eq!(diagonal(2, 4, 3, 5).unwrap().cells, vec![(0, 4), (1, 1), (2, 3)]);
        assert!(diagonal(5, 0, 3, 5).is_err());
    }

    #[test]
    fn diagonals_partition_and_meet_once() {
        for p in [2usize, 3, 5, 7, 11, 13] {
            for r in 1..=p {
                for s in 0..p {
                    let mut seen = BTreeSet::new();
                    for t in 0..p {
                        for c in diagonal(s, t, r, p).unwrap().cells {
                            assert!(seen.insert(c));
                        }
                    }
                    assert_eq!(seen.len(), r * p);
                }
                for s1 in 0..p {
                    for s2 in s1 + 1..p {
                        for t1 in 0..p {
                            let d1: BTreeSet<_> = diagonal(s1, t1, r, p).unwrap().cells.into_iter().collect();
                            for t2 in 0..p {
                                let d2 = diagonal(s2, t2, r, p).unwrap().cells;
                                assert!(d2.iter().filter(|c| d1.contains(c)).count() <= 1);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn encoding() {
        let pr = ArrayCodeParams::new(2, 3, vec![0, 1], false).unwrap();
        let w = encode_array(&pr, &[vec![1, 0, 0], vec![0, 1, 0]]).unwrap();
        assert_eq!(w.parities, vec![vec![1, 1, 0], vec![0, 0, 0]]);
        let zero = encode_array(&pr, &[vec![0; 3], vec![0; 3]]).unwrap();
        assert!(zero.parities.iter().flatten().all(|&b| b == 0));
        let five = five_batch_code(5).unwrap();
        let mut data = vec![vec![0u8; 5]; 5];
        assert_eq!(encode_array(&five, &data).unwrap().global, Some(0));
        data[0][0] = 1;
        let w = encode_array(&five, &data).unwrap();
        assert_eq!(w.parities.iter().flatten().filter(|&&b| b == 1).count(), 5);
        assert_eq!(w.global, Some(1));
        assert!(encode_array(&pr, &[vec![0; 3]]).is_err());
    }

    #[test]
    fn pir_sets() {
        let code = ArrayCode::new(ArrayCodeParams::new(5, 5, vec![0, 1, 2], false).unwrap()).unwrap();
        let sets = code.pir_sets_for_bit(0, 0).unwrap();
        assert_eq!(sets.len(), 3);
        assert!(sets.iter().all(|s| s.len() == 5));
        assert_eq!(max_overlap(&sets), 0);
        let col = ArrayCode::new(ArrayCodeParams::new(3, 5, vec![0], false).unwrap()).unwrap();
        assert_eq!(col.pir_sets_for_bit(1, 2).unwrap(), vec![vec![2, 12, 15 + 2]]);
    }

    #[test]
    fn weighted_progressions() {
        assert_eq!(has_weighted_ap(&[0, 1, 2], 3, 7), Some(ApWitness { s1: 0, s2: 2, s3: 1, x: 1, y: 1 }));
        assert_eq!(has_weighted_ap(&[3, 9], 6, 11), None);
        assert_eq!(has_weighted_ap(&[0, 1, 3], 3, 73), None);
        assert_eq!(has_weighted_ap(&[0, 1, 2, 3], 2, 5), None);
    }

    #[test]
    fn greedy_search() {
        assert_eq!(greedy_slope_set(3, 73, 3).unwrap(), vec![0, 1, 3]);
        assert_eq!(greedy_slope_set(7, 11, 2).unwrap(), vec![0, 1]);
        assert_eq!(greedy_slope_set(2, 7, 5).unwrap(), vec![0, 1, 2, 3, 4]);
        assert!(matches!(greedy_slope_set(3, 5, 5), Err(Error::SlopeSearchExhausted { requested: 5, .. })));
        assert!(greedy_slope_set(3, 6, 2).is_err());
    }

    #[test]
    fn rk_builder_and_corollary() {
        let pr = build_rk_batch(3, 2).unwrap();
        assert_eq!((pr.p, pr.dimension(), pr.redundancy()), (73, 219, 146));
        assert_eq!(build_rk_batch(3, 1).unwrap().p, 19);
        let c = corollary_params(1000, 2).unwrap();
        assert_eq!((c.params.r, c.params.p), (7, 397));
        assert!(c.dimension >= 1000);
        assert_eq!(c.redundancy, 2 * 397);
        assert_eq!(corollary_params(1000, 1).unwrap().params.r, 10);
        assert!(corollary_params(16, 4).is_err());
    }

    #[test]
    fn five_batch_candidates_recover() {
        let code = ArrayCode::new(five_batch_code(5).unwrap()).unwrap();
        assert_eq!(code.params().redundancy(), 26);
        let msg: Vec<Elem> = (0..25).map(|i| Elem(((i * 7 + 3) % 5 % 2) as u32)).collect();
        let word = code.encode(&msg).unwrap();
        for (bit, &value) in msg.iter().enumerate() {
            for set in code.candidate_sets(bit).unwrap() {
                let r = RestrictedWord::new(&word, 1, set.iter().copied()).unwrap();
                assert_eq!(code.recover(&r, bit, &set).unwrap(), vec![value], "bit {bit} set {set:?}");
            }
        }
        let sets = code.plan_array_batch(&[0, 0, 0, 1, 1]).unwrap();
        assert_eq!(max_overlap(&sets), 0);
    }

    #[test]
    fn greedy_batch_small() {
        let code = ArrayCode::new(build_rk_batch(3, 2).unwrap()).unwrap();
        let sets = code.plan_array_batch(&[5, 5]).unwrap();
        assert_eq!(max_overlap(&sets), 0);
        assert_ne!(sets[0], sets[1]);
        assert_eq!(code.plan_array_batch(&[7]).unwrap(), vec![code.pir_sets(7).unwrap()[0].clone()]);
        let bad = ArrayCode::new(ArrayCodeParams::new(3, 7, vec![0, 1, 2], false).unwrap()).unwrap();
        assert!(matches!(bad.plan_array_batch(&[0, 1]), Err(Error::Precondition(_))));
    }
}
