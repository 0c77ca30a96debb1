//! Batch requests over multiplicity codes: every request gets its own
//! direction grid, and points where its lines meet another request's lines
//! are treated as erasures.

use std::collections::BTreeSet;

use num_rational::Ratio;

use crate::code::SymbolSource;
use crate::error::{Error, Result};
use crate::gf::Elem;
use crate::mpoly::OrderedEvaluation;
use crate::multiplicity::{MultCodeParams, MultiplicityCode};
use crate::pir::{build_direction_families, line_points, recover_symbol, PlanLine, RecoveryPlan, Variant};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BatchParams {
    pub code: MultCodeParams,
    pub k: usize,
}

impl BatchParams {
    /// Largest number of points a single line may lose, `k·m^(s-1)`.
    pub fn drop_budget(&self) -> usize {
        self.k * self.code.m.pow(self.code.s as u32 - 1)
    }
}

pub fn validate_batch_params(params: &MultCodeParams, k: usize) -> Result<BatchParams> {
    let (m, d, s) = (params.m as i64, params.d as i64, params.s as u32);
    let q = params.q() as i64;
    if m == 0 || s == 0 {
        return Err(Error::Parameter("order and number of variables must be positive".into()));
    }
    let k_i = k as i64;
    let families = if s == 1 { 1 } else { (q / m).pow(s - 1) };
    if k_i > families {
        return Err(Error::Parameter(format!("k ≤ ⌊q/m⌋^(s−1) fails: k = {k}, ⌊q/m⌋^(s−1) = {families}")));
    }
    let bound = m * (q - k_i * m.pow(s - 1) - 2);
    if k > 0 && d > bound {
        return Err(Error::Parameter(format!(
            "d ≤ m(q − k·m^(s−1) − 2) fails: d = {d}, m(q − k·m^(s−1) − 2) = {bound}"
        )));
    }
    Ok(BatchParams { code: params.clone(), k })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BatchPlan {
    /// Requested point indices, sorted.
    pub request: Vec<usize>,
    /// `plans[j]` serves `request[j]`.
    pub plans: Vec<RecoveryPlan>,
}

impl BatchPlan {
    pub fn max_drops(&self) -> usize {
        self.plans.iter().flat_map(|p| p.lines.iter().map(|l| l.drops.len())).max().unwrap_or(0)
    }

    pub fn is_disjoint(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.plans.iter().all(|p| p.coordinates.iter().all(|&c| seen.insert(c)))
    }
}

/// Assigns grid `j` to the `j`-th request in sorted order. A point of one of
/// its lines is dropped when it lies on any full line (centre included) of
/// another request.
pub fn plan_batch(code: &MultiplicityCode, params: &BatchParams, request: &[Vec<Elem>]) -> Result<BatchPlan> {
    if code.params() != &params.code {
        return Err(Error::Precondition("batch parameters belong to a different code".into()));
    }
    if request.len() != params.k {
        return Err(Error::DimensionMismatch { expected: params.k, found: request.len() });
    }
    let mut sorted = request.iter().map(|w| code.point_index(w)).collect::<Result<Vec<_>>>()?;
    sorted.sort_unstable();
    let family = build_direction_families(code.q(), code.m(), code.s())?;

    let mut lines_of = Vec::with_capacity(sorted.len());
    let mut full = Vec::with_capacity(sorted.len());
    for (j, &idx) in sorted.iter().enumerate() {
        let w = code.point(idx);
        let mut covered = BTreeSet::from([idx]);
        let mut lines = Vec::new();
        for v in &family.grids[j] {
            let pts = line_points(code, &w, v)?;
            covered.extend(pts.iter().map(|&(_, p)| p));
            lines.push((v.clone(), pts));
        }
        lines_of.push(lines);
        full.push(covered);
    }

    let budget = params.drop_budget();
    let mut plans = Vec::with_capacity(sorted.len());
    for (j, &idx) in sorted.iter().enumerate() {
        let foreign: BTreeSet<usize> =
            full.iter().enumerate().filter(|&(o, _)| o != j).flat_map(|(_, s)| s.iter().copied()).collect();
        let mut lines = Vec::new();
        for (v, pts) in &lines_of[j] {
            let drops: BTreeSet<Elem> = pts.iter().filter(|(_, p)| foreign.contains(p)).map(|&(l, _)| l).collect();
            if drops.len() > budget {
                return Err(Error::Certification(format!(
                    "line through point {idx} loses {} points, budget is {budget}",
                    drops.len()
                )));
            }
            lines.push(PlanLine { direction: v.clone(), drops });
        }
        let plan = RecoveryPlan::new(code, code.point(idx), j, lines)?;
        plan.check(code).map_err(|e| Error::Certification(format!("line too short after drops: {e}")))?;
        plans.push(plan);
    }
    Ok(BatchPlan { request: sorted, plans })
}

/// Recovers every requested symbol, in the plan's request order.
pub fn recover_batch<S: SymbolSource + ?Sized>(
    code: &MultiplicityCode,
    source: &S,
    plan: &BatchPlan,
) -> Result<Vec<OrderedEvaluation>> {
    plan.plans.iter().map(|p| recover_symbol(code, source, p)).collect()
}

/// Redundancy exponent of the batch construction.
///
/// For `ε ≥ 1/2` both variants give `1/2 + ε`.
pub fn batch_delta(epsilon: Ratio<i64>, variant: Variant) -> Result<Ratio<i64>> {
    let zero = Ratio::from_integer(0);
    if epsilon < zero {
        return Err(Error::Parameter(format!("ε = {epsilon} is negative")));
    }
    let half = Ratio::new(1, 2);
    if epsilon >= half {
        return Ok(half + epsilon);
    }
    Ok(match variant {
        Variant::Qary => Ratio::new(3, 4) + epsilon / 2,
        Variant::Binary => Ratio::new(5, 6) + epsilon / 3,
    })
}

pub fn batch_delta_curves(epsilons: &[Ratio<i64>], variant: Variant) -> Result<Vec<(Ratio<i64>, Ratio<i64>)>> {
    epsilons.iter().map(|&e| Ok((e, batch_delta(e, variant)?))).collect()
}
