//! Certification that does not trust the constructions: recovering sets are
//! checked against the generator matrix of the black-box encoder.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::code::AvailabilityCode;
use crate::error::{Error, Result};
use crate::gf::{Elem, Field};
use crate::linalg::{solve, Matrix, Solution};
use crate::mpoly::binomial;
use std::sync::Arc;

/// Above this many requests `enumerate_requests` samples instead.
pub const EXHAUSTIVE_LIMIT: u64 = 1_000_000;

/// Largest message space `min_distance` will enumerate.
pub const DISTANCE_LIMIT: u64 = 20_000_000;

/// Largest message space the functional oracle will enumerate.
pub const ORACLE_LIMIT: u64 = 1_000_000;

#[derive(Clone, Debug)]
pub struct GeneratorMatrix {
    field: Arc<Field>,
    matrix: Matrix,
    symbol_width: usize,
    info_positions: Option<Vec<usize>>,
}

impl GeneratorMatrix {
    pub fn new(field: Arc<Field>, matrix: Matrix, symbol_width: usize) -> Result<Self> {
        if symbol_width == 0 || !matrix.cols().is_multiple_of(symbol_width) {
            return Err(Error::DimensionMismatch { expected: symbol_width, found: matrix.cols() });
        }
        let info_positions = find_identity(&matrix);
        Ok(GeneratorMatrix { field, matrix, symbol_width, info_positions })
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    /// Message length `n`.
    pub fn dimension(&self) -> usize {
        self.matrix.rows()
    }

    /// Code length `N` over the base field.
    pub fn length(&self) -> usize {
        self.matrix.cols()
    }

    pub fn symbol_width(&self) -> usize {
        self.symbol_width
    }

    pub fn num_symbols(&self) -> usize {
        self.length() / self.symbol_width
    }

    /// Columns that carry the message verbatim, if the code is systematic.
    pub fn info_positions(&self) -> Option<&[usize]> {
        self.info_positions.as_deref()
    }

    pub fn symbol_columns(&self, symbols: &[usize]) -> Vec<usize> {
        let w = self.symbol_width;
        symbols.iter().flat_map(|&s| s * w..(s + 1) * w).collect()
    }

    pub fn encode(&self, message: &[Elem]) -> Vec<Elem> {
        let f = &self.field;
        let mut out = vec![Elem::ZERO; self.length()];
        for (r, &a) in message.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (slot, &g) in out.iter_mut().zip(self.matrix.row(r)) {
                *slot = f.add(*slot, f.mul(a, g));
            }
        }
        out
    }

    fn check_columns(&self, cols: &[usize]) -> Result<()> {
        match cols.iter().find(|&&c| c >= self.length()) {
            Some(&c) => Err(Error::MissingCoordinate(c / self.symbol_width)),
            None => Ok(()),
        }
    }
}

fn find_identity(m: &Matrix) -> Option<Vec<usize>> {
    let mut out = Vec::with_capacity(m.rows());
    'rows: for r in 0..m.rows() {
        for c in 0..m.cols() {
            let col = m.column(c);
            if col.iter().enumerate().all(|(k, &x)| x == if k == r { Elem::ONE } else { Elem::ZERO }) {
                out.push(c);
                continue 'rows;
            }
        }
        return None;
    }
    Some(out)
}

/// Builds the generator row by row from unit messages and checks the
/// encoder is linear on random pairs and scalings.
pub fn extract_generator<E>(
    field: &Arc<Field>,
    dimension: usize,
    length: usize,
    symbol_width: usize,
    seed: u64,
    encoder: E,
) -> Result<GeneratorMatrix>
where
    E: Fn(&[Elem]) -> Result<Vec<Elem>>,
{
    let f = field.as_ref();
    let mut rows = Vec::with_capacity(dimension);
    for i in 0..dimension {
        let mut unit = vec![Elem::ZERO; dimension];
        unit[i] = Elem::ONE;
        let row = encoder(&unit)?;
        if row.len() != length {
            return Err(Error::DimensionMismatch { expected: length, found: row.len() });
        }
        rows.push(row);
    }
    let matrix = if dimension == 0 { Matrix::zeros(0, length) } else { Matrix::from_rows(rows)? };
    let g = GeneratorMatrix::new(field.clone(), matrix, symbol_width)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = f.order();
    let random = |rng: &mut ChaCha8Rng| (0..dimension).map(|_| Elem(rng.gen_range(0..q))).collect::<Vec<_>>();
    for trial in 0..50 {
        let a = random(&mut rng);
        let b = random(&mut rng);
        let sum: Vec<Elem> = a.iter().zip(&b).map(|(&x, &y)| f.add(x, y)).collect();
        let ea = encoder(&a)?;
        let eb = encoder(&b)?;
        let es = encoder(&sum)?;
        if ea.iter().zip(&eb).zip(&es).any(|((&x, &y), &z)| f.add(x, y) != z) {
            return Err(Error::Certification(format!("encoder is not additive (trial {trial})")));
        }
        let c = Elem(rng.gen_range(0..q));
        let scaled: Vec<Elem> = a.iter().map(|&x| f.mul(c, x)).collect();
        if encoder(&scaled)?.iter().zip(&ea).any(|(&z, &x)| f.mul(c, x) != z) {
            return Err(Error::Certification(format!("encoder is not homogeneous (trial {trial})")));
        }
        if g.encode(&a) != ea {
            return Err(Error::Certification(format!("encoder disagrees with its generator rows (trial {trial})")));
        }
    }
    Ok(g)
}

pub fn generator_of<C: AvailabilityCode + ?Sized>(code: &C, seed: u64) -> Result<GeneratorMatrix> {
    extract_generator(code.field(), code.dimension(), code.length(), code.symbol_width(), seed, |m| code.encode(m))
}

/// Echelon basis of a column span, for repeated membership tests.
struct Span<'a> {
    field: &'a Field,
    rows: Vec<Vec<Elem>>,
    pivots: Vec<usize>,
}

impl<'a> Span<'a> {
    fn of_columns(g: &'a GeneratorMatrix, cols: &[usize]) -> Self {
        let n = g.dimension();
        let mut m = Matrix::zeros(cols.len(), n);
        for (r, &c) in cols.iter().enumerate() {
            for k in 0..n {
                m.set(r, k, g.matrix.get(k, c));
            }
        }
        let pivots = m.rref(&g.field);
        let rows = (0..pivots.len()).map(|r| m.row(r).to_vec()).collect();
        Span { field: &g.field, rows, pivots }
    }

    fn contains(&self, v: &[Elem]) -> bool {
        let f = self.field;
        let mut v = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let a = v[p];
            if !a.is_zero() {
                for (x, &y) in v.iter_mut().zip(row) {
                    *x = f.sub(*x, f.mul(a, y));
                }
            }
        }
        v.iter().all(|x| x.is_zero())
    }
}

/// Coefficients `c` over the columns `coords` with `Σ c_k G[:, coords_k] = e_i`,
/// i.e. a linear rule reading `x_i` off the coordinates, if one exists.
pub fn is_recovering_set(g: &GeneratorMatrix, info: usize, coords: &[usize]) -> Result<Option<Vec<Elem>>> {
    if info >= g.dimension() {
        return Err(Error::Parameter(format!("information index {info} is outside 0..{}", g.dimension())));
    }
    g.check_columns(coords)?;
    if coords.is_empty() {
        return Ok(None);
    }
    let a = g.matrix.select_columns(coords);
    let mut e = vec![Elem::ZERO; g.dimension()];
    e[info] = Elem::ONE;
    Ok(match solve(&g.field, &a, &e)? {
        Solution::Inconsistent => None,
        Solution::Found { x, .. } => Some(x),
    })
}

/// Whether every entry of symbol `target` is a linear function of the
/// symbols in `set`.
pub fn recovers_symbol(g: &GeneratorMatrix, target: usize, set: &[usize]) -> Result<bool> {
    if target >= g.num_symbols() {
        return Err(Error::MissingCoordinate(target));
    }
    let cols = g.symbol_columns(set);
    g.check_columns(&cols)?;
    let span = Span::of_columns(g, &cols);
    Ok(g.symbol_columns(&[target]).into_iter().all(|c| span.contains(&g.matrix.column(c))))
}

fn message_space(g: &GeneratorMatrix, limit: u64) -> Result<u64> {
    let q = g.field.order() as u64;
    let n = u32::try_from(g.dimension()).unwrap_or(u32::MAX);
    match q.checked_pow(n) {
        Some(size) if size <= limit => Ok(size),
        _ => Err(Error::Capacity(format!("q^n = {q}^{n} exceeds the enumeration limit {limit}"))),
    }
}

fn message_at(q: u64, n: usize, mut index: u64) -> Vec<Elem> {
    let mut msg = vec![Elem::ZERO; n];
    for slot in msg.iter_mut() {
        *slot = Elem((index % q) as u32);
        index /= q;
    }
    msg
}

/// Brute force: is the codeword value at `target_cols` a function of the
/// values at `coords`, over all messages?
pub fn determined_by(g: &GeneratorMatrix, target_cols: &[usize], coords: &[usize]) -> Result<bool> {
    g.check_columns(target_cols)?;
    g.check_columns(coords)?;
    let size = message_space(g, ORACLE_LIMIT)?;
    let q = g.field.order() as u64;
    let mut seen: HashMap<Vec<Elem>, Vec<Elem>> = HashMap::new();
    for idx in 0..size {
        let word = g.encode(&message_at(q, g.dimension(), idx));
        let key: Vec<Elem> = coords.iter().map(|&c| word[c]).collect();
        let value: Vec<Elem> = target_cols.iter().map(|&c| word[c]).collect();
        if let Some(prev) = seen.insert(key, value.clone()) {
            if prev != value {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Brute force: is message entry `info` a function of the values at `coords`?
pub fn info_determined_by(g: &GeneratorMatrix, info: usize, coords: &[usize]) -> Result<bool> {
    g.check_columns(coords)?;
    let size = message_space(g, ORACLE_LIMIT)?;
    let q = g.field.order() as u64;
    let mut seen: HashMap<Vec<Elem>, Elem> = HashMap::new();
    for idx in 0..size {
        let msg = message_at(q, g.dimension(), idx);
        let word = g.encode(&msg);
        let key: Vec<Elem> = coords.iter().map(|&c| word[c]).collect();
        if let Some(prev) = seen.insert(key, msg[info]) {
            if prev != msg[info] {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Exact minimum symbol weight over all nonzero codewords.
pub fn min_distance(g: &GeneratorMatrix) -> Result<u64> {
    let size = message_space(g, DISTANCE_LIMIT)?;
    let n = g.dimension();
    if n == 0 {
        return Err(Error::Precondition("the zero code has no minimum distance".into()));
    }
    let f = g.field.as_ref();
    let q = f.order() as usize;
    let len = g.length();
    let w = g.symbol_width;
    // multiples[i][a] = a · row_i
    let multiples: Vec<Vec<Vec<Elem>>> = (0..n)
        .map(|i| f.elements().map(|a| g.matrix.row(i).iter().map(|&x| f.mul(a, x)).collect()).collect())
        .collect();
    let weight = |word: &[Elem]| word.chunks(w).filter(|s| s.iter().any(|x| !x.is_zero())).count() as u64;
    let inner = size / q as u64;
    let best = (0..q)
        .into_par_iter()
        .map(|top| {
            let mut digits = vec![0usize; n - 1];
            let mut word = multiples[n - 1][top].clone();
            let mut best = u64::MAX;
            for step in 0..inner {
                if step > 0 {
                    // Odometer increment on the low digits.
                    let mut pos = 0;
                    loop {
                        let old = digits[pos];
                        let new = (old + 1) % q;
                        for c in 0..len {
                            word[c] = f.add(f.sub(word[c], multiples[pos][old][c]), multiples[pos][new][c]);
                        }
                        digits[pos] = new;
                        if new != 0 {
                            break;
                        }
                        pos += 1;
                    }
                }
                if top != 0 || step != 0 {
                    best = best.min(weight(&word));
                }
            }
            best
        })
        .min()
        .unwrap_or(u64::MAX);
    Ok(best)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReportEntry {
    pub id: usize,
    pub request: Vec<usize>,
    pub set_sizes: Vec<usize>,
    pub status: Status,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub seed: Option<u64>,
    pub exhaustive: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub entries: Vec<ReportEntry>,
    pub seed: Option<u64>,
    pub exhaustive: bool,
}

impl Report {
    pub fn total(&self) -> usize {
        self.entries.len()
    }

    pub fn passed(&self) -> usize {
        self.entries.iter().filter(|e| e.status == Status::Pass).count()
    }

    pub fn failed(&self) -> usize {
        self.total() - self.passed()
    }

    pub fn all_passed(&self) -> bool {
        self.failed() == 0
    }

    pub fn failures(&self) -> impl Iterator<Item = &ReportEntry> {
        self.entries.iter().filter(|e| e.status == Status::Fail)
    }

    pub fn summary(&self) -> Summary {
        Summary {
            total: self.total(),
            passed: self.passed(),
            failed: self.failed(),
            seed: self.seed,
            exhaustive: self.exhaustive,
        }
    }

    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["request_id", "request", "set_sizes", "status", "detail"])?;
        for e in &self.entries {
            w.write_record([
                e.id.to_string(),
                e.request.iter().join(";"),
                e.set_sizes.iter().join(";"),
                e.status.to_string(),
                e.detail.clone(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Checks one request against its sets: `sets[j]` must recover `request[j]`
/// and the sets must be pairwise disjoint. Returns the failure reason.
fn check_sets(g: &GeneratorMatrix, request: &[usize], sets: &[Vec<usize>]) -> Result<(), String> {
    if sets.len() != request.len() {
        return Err(format!("{} sets for {} requests", sets.len(), request.len()));
    }
    let mut owner: HashMap<usize, usize> = HashMap::new();
    for (j, set) in sets.iter().enumerate() {
        let distinct: BTreeSet<usize> = set.iter().copied().collect();
        for c in distinct {
            if let Some(prev) = owner.insert(c, j) {
                return Err(format!("sets {prev} and {j} share symbol {c}"));
            }
        }
    }
    for (j, (&t, set)) in request.iter().zip(sets).enumerate() {
        match recovers_symbol(g, t, set) {
            Ok(true) => {}
            Ok(false) => return Err(format!("set {j} does not determine symbol {t}")),
            Err(e) => return Err(format!("set {j}: {e}")),
        }
    }
    Ok(())
}

fn entry(id: usize, request: Vec<usize>, sets: &[Vec<usize>], outcome: Result<(), String>) -> ReportEntry {
    let (status, detail) = match outcome {
        Ok(()) => (Status::Pass, String::new()),
        Err(d) => (Status::Fail, d),
    };
    ReportEntry { id, request, set_sizes: sets.iter().map(Vec::len).collect(), status, detail }
}

/// For each target: at least `k` claimed sets, each recovering the target,
/// pairwise disjoint.
pub fn certify_pir(g: &GeneratorMatrix, claims: &[(usize, Vec<Vec<usize>>)], k: usize) -> Report {
    let entries = claims
        .par_iter()
        .enumerate()
        .map(|(id, (target, sets))| {
            let outcome = if sets.len() < k {
                Err(format!("{} sets claimed, {k} required", sets.len()))
            } else {
                check_sets(g, &vec![*target; sets.len()], sets)
            };
            entry(id, vec![*target], sets, outcome)
        })
        .collect();
    Report { entries, seed: None, exhaustive: true }
}

/// Collects the code's own PIR sets for every target and certifies them.
pub fn certify_code_pir<C: AvailabilityCode + ?Sized>(code: &C, g: &GeneratorMatrix) -> Result<Report> {
    let claims = code.targets().into_par_iter().map(|t| Ok((t, code.pir_sets(t)?))).collect::<Result<Vec<_>>>()?;
    Ok(certify_pir(g, &claims, code.availability()))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Requests {
    pub requests: Vec<Vec<usize>>,
    pub seed: Option<u64>,
    pub exhaustive: bool,
}

/// Number of size-`k` multisets over `t` targets.
pub fn multiset_count(t: usize, k: usize) -> u64 {
    if t == 0 {
        return u64::from(k == 0);
    }
    binomial((t + k - 1) as i64, k as i64)
}

/// All sorted size-`k` multisets of `targets` when there are at most
/// `limit` of them; otherwise `samples` random sorted multisets.
pub fn enumerate_requests(targets: &[usize], k: usize, limit: u64, samples: usize, seed: u64) -> Requests {
    if multiset_count(targets.len(), k) <= limit {
        let requests =
            if k == 0 { vec![Vec::new()] } else { targets.iter().copied().combinations_with_replacement(k).collect() };
        return Requests { requests, seed: None, exhaustive: true };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let requests = (0..samples)
        .map(|_| {
            let mut r: Vec<usize> = (0..k).map(|_| targets[rng.gen_range(0..targets.len())]).collect();
            r.sort_unstable();
            r
        })
        .collect();
    Requests { requests, seed: Some(seed), exhaustive: false }
}

pub fn certify_batch<P>(g: &GeneratorMatrix, planner: P, requests: &Requests) -> Report
where
    P: Fn(&[usize]) -> Result<Vec<Vec<usize>>> + Sync,
{
    let entries = requests
        .requests
        .par_iter()
        .enumerate()
        .map(|(id, req)| match planner(req) {
            Ok(sets) => {
                let outcome = check_sets(g, req, &sets);
                entry(id, req.clone(), &sets, outcome)
            }
            Err(e) => entry(id, req.clone(), &[], Err(format!("planner: {e}"))),
        })
        .collect();
    Report { entries, seed: requests.seed, exhaustive: requests.exhaustive }
}
