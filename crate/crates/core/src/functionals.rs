//! Graph functionals with additivity structure and their limit harnesses.
//!
//! Values live in one of two normed realizations: real scalars with the
//! absolute value, or bounded right-continuous step functions with the
//! supremum norm. The harnesses verify almost-additivity against measured
//! star-distance estimates, estimate normalized limits along sequences,
//! check the subadditive axiom set on seeded samples, and include the
//! scalar subadditive-sequence baseline.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{Graph, GraphError, VertexLabeling};
use crate::metrics::{self, DeltaSConfig, DistanceEstimate, MetricsError};

#[derive(Debug, Error)]
pub enum FunctionalError {
    #[error("cannot combine scalar and step-function values")]
    KindMismatch,
    #[error("functional `{0}` is not scalar-valued")]
    NotScalar(String),
    #[error("functional must vanish on the empty graph, got norm {0}")]
    NonzeroAtEmpty(f64),
    #[error("evaluation failed on a graph with {n} vertices: {msg}")]
    Evaluation { n: usize, msg: String },
    #[error("sequence must contain at least {0} graphs")]
    SequenceTooShort(usize),
    #[error("independent-set count overflows the exact counter")]
    CountOverflow,
    #[error("graph too large for exact independent-set counting ({0} vertices)")]
    CountTooLarge(usize),
    #[error("unknown functional `{0}`")]
    UnknownFunctional(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

/// Bounded right-continuous step function on the line, zero near -inf.
/// `points[i] = (x_i, v_i)` means the function takes value `v_i` on
/// `[x_i, x_{i+1})`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepFn {
    points: Vec<(f64, f64)>,
}

impl StepFn {
    pub fn zero() -> Self {
        StepFn { points: Vec::new() }
    }

    /// Builds the cumulative function from (position, jump) pairs.
    pub fn from_jumps(jumps: &[(f64, f64)]) -> Self {
        let mut sorted = jumps.to_vec();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut points = Vec::with_capacity(sorted.len());
        let mut value = 0.0;
        for (x, jump) in sorted {
            value += jump;
            match points.last_mut() {
                Some((px, pv)) if *px == x => *pv = value,
                _ => points.push((x, value)),
            }
        }
        StepFn { points }
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self.points.partition_point(|(px, _)| *px <= x) {
            0 => 0.0,
            idx => self.points[idx - 1].1,
        }
    }

    pub fn sup_norm(&self) -> f64 {
        self.points.iter().map(|(_, v)| v.abs()).fold(0.0, f64::max)
    }

    pub fn scale(&self, factor: f64) -> StepFn {
        StepFn {
            points: self.points.iter().map(|&(x, v)| (x, factor * v)).collect(),
        }
    }

    pub fn add(&self, other: &StepFn) -> StepFn {
        let mut points = Vec::with_capacity(self.points.len() + other.points.len());
        let (mut i, mut j) = (0, 0);
        let (mut va, mut vb) = (0.0, 0.0);
        while i < self.points.len() || j < other.points.len() {
            let xa = self.points.get(i).map(|p| p.0).unwrap_or(f64::INFINITY);
            let xb = other.points.get(j).map(|p| p.0).unwrap_or(f64::INFINITY);
            let x = xa.min(xb);
            if xa == x {
                va = self.points[i].1;
                i += 1;
            }
            if xb == x {
                vb = other.points[j].1;
                j += 1;
            }
            points.push((x, va + vb));
        }
        StepFn { points }
    }

    pub fn sub(&self, other: &StepFn) -> StepFn {
        self.add(&other.scale(-1.0))
    }
}

/// A value in one of the two supported normed realizations.
#[derive(Debug, Clone, Serialize)]
pub enum Value {
    Scalar(f64),
    Step(StepFn),
}

impl Value {
    pub fn norm(&self) -> f64 {
        match self {
            Value::Scalar(x) => x.abs(),
            Value::Step(f) => f.sup_norm(),
        }
    }

    pub fn scale(&self, factor: f64) -> Value {
        match self {
            Value::Scalar(x) => Value::Scalar(factor * x),
            Value::Step(f) => Value::Step(f.scale(factor)),
        }
    }

    pub fn sub(&self, other: &Value) -> Result<Value, FunctionalError> {
        match (self, other) {
            (Value::Scalar(a), Value::Scalar(b)) => Ok(Value::Scalar(a - b)),
            (Value::Step(a), Value::Step(b)) => Ok(Value::Step(a.sub(b))),
            _ => Err(FunctionalError::KindMismatch),
        }
    }

    pub fn add(&self, other: &Value) -> Result<Value, FunctionalError> {
        match (self, other) {
            (Value::Scalar(a), Value::Scalar(b)) => Ok(Value::Scalar(a + b)),
            (Value::Step(a), Value::Step(b)) => Ok(Value::Step(a.add(b))),
            _ => Err(FunctionalError::KindMismatch),
        }
    }

    pub fn as_scalar(&self) -> Option<f64> {
        match self {
            Value::Scalar(x) => Some(*x),
            Value::Step(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FunctionalKind {
    AlmostAdditive,
    Subadditive,
    Unknown,
}

type EvalFn = dyn Fn(&Graph) -> Result<Value, FunctionalError> + Send + Sync;

/// A graph functional together with its declared constants: `D` for the
/// almost-additivity bound and `C` for per-vertex boundedness.
pub struct GraphFunctional {
    pub name: String,
    pub kind: FunctionalKind,
    pub additivity_const: Option<f64>,
    pub bound_const: Option<f64>,
    eval: Box<EvalFn>,
}

impl std::fmt::Debug for GraphFunctional {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GraphFunctional")
            .field("name", &self.name)
            .field("kind", &self.kind)
            .finish()
    }
}

impl GraphFunctional {
    pub fn new(
        name: impl Into<String>,
        kind: FunctionalKind,
        eval: impl Fn(&Graph) -> Result<Value, FunctionalError> + Send + Sync + 'static,
    ) -> Self {
        GraphFunctional {
            name: name.into(),
            kind,
            additivity_const: None,
            bound_const: None,
            eval: Box::new(eval),
        }
    }

    pub fn with_additivity_const(mut self, d: f64) -> Self {
        self.additivity_const = Some(d);
        self
    }

    pub fn with_bound_const(mut self, c: f64) -> Self {
        self.bound_const = Some(c);
        self
    }

    pub fn evaluate(&self, g: &Graph) -> Result<Value, FunctionalError> {
        (self.eval)(g)
    }

    /// Checks the `F(empty) = 0` contract.
    pub fn validate_empty(&self) -> Result<(), FunctionalError> {
        let v = self.evaluate(&Graph::empty(1))?;
        if v.norm() > 1e-12 {
            return Err(FunctionalError::NonzeroAtEmpty(v.norm()));
        }
        Ok(())
    }

    /// Vertex count, scaled into the scalar realization.
    pub fn vertex_count() -> Self {
        GraphFunctional::new("vcount", FunctionalKind::AlmostAdditive, |g| {
            Ok(Value::Scalar(g.vertex_count() as f64))
        })
        .with_additivity_const(0.0)
        .with_bound_const(1.0)
    }

    /// Edge count. Each differing star accounts for at most d/2 edges per
    /// vertex, so D = d/2 with the graph's degree bound d.
    pub fn edge_count(degree_bound: usize) -> Self {
        GraphFunctional::new("ecount", FunctionalKind::AlmostAdditive, |g| {
            Ok(Value::Scalar(g.edge_count() as f64))
        })
        .with_additivity_const(degree_bound as f64 / 2.0)
        .with_bound_const(degree_bound as f64 / 2.0)
    }

    /// Base-2 logarithm of the number of independent sets.
    pub fn log_independent_sets() -> Self {
        GraphFunctional::new("log-indep-sets", FunctionalKind::Subadditive, |g| {
            log2_independent_sets(g).map(Value::Scalar)
        })
        .with_bound_const(1.0)
    }

    /// Looks up a built-in scalar functional by CLI name.
    pub fn by_name(name: &str, degree_bound: usize) -> Result<Self, FunctionalError> {
        match name {
            "vcount" => Ok(Self::vertex_count()),
            "ecount" => Ok(Self::edge_count(degree_bound)),
            "log-indep-sets" => Ok(Self::log_independent_sets()),
            other => Err(FunctionalError::UnknownFunctional(other.into())),
        }
    }
}

// ---------------------------------------------------------------------------
// independent-set counting

/// Exact independent-set count via branching on a max-degree vertex with
/// component splitting. Limited to 128 vertices and exact u128 arithmetic.
pub fn count_independent_sets(g: &Graph) -> Result<u128, FunctionalError> {
    let n = g.vertex_count();
    if n > 128 {
        return Err(FunctionalError::CountTooLarge(n));
    }
    let masks: Vec<u128> = (0..n)
        .map(|v| {
            g.neighbors(v)
                .iter()
                .fold(0u128, |acc, &w| acc | (1u128 << w))
        })
        .collect();
    let full: u128 = if n == 128 {
        u128::MAX
    } else {
        (1u128 << n) - 1
    };

    fn count(masks: &[u128], mask: u128) -> Option<u128> {
        if mask == 0 {
            return Some(1);
        }
        // split into connected components and multiply
        let mut rest = mask;
        let mut result: u128 = 1;
        while rest != 0 {
            let start = rest.trailing_zeros() as usize;
            let mut comp = 1u128 << start;
            loop {
                let mut grown = comp;
                let mut bits = comp;
                while bits != 0 {
                    let v = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    grown |= masks[v] & mask;
                }
                if grown == comp {
                    break;
                }
                comp = grown;
            }
            rest &= !comp;
            result = result.checked_mul(count_component(masks, comp)?)?;
        }
        Some(result)
    }

    fn count_component(masks: &[u128], mask: u128) -> Option<u128> {
        // pick a max-degree vertex within the component
        let mut best_v = usize::MAX;
        let mut best_deg = 0usize;
        let mut bits = mask;
        while bits != 0 {
            let v = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let deg = (masks[v] & mask).count_ones() as usize;
            if best_v == usize::MAX || deg > best_deg {
                best_v = v;
                best_deg = deg;
            }
        }
        if best_deg == 0 {
            // edgeless: every subset is independent
            return 1u128.checked_shl(mask.count_ones());
        }
        let v_bit = 1u128 << best_v;
        let without = count(masks, mask & !v_bit)?;
        let with = count(masks, mask & !v_bit & !masks[best_v])?;
        without.checked_add(with)
    }

    count(&masks, full).ok_or(FunctionalError::CountOverflow)
}

/// Detects a path component (returns its length) given its vertex set.
fn component_shape(g: &Graph, comp: &[usize]) -> Option<(bool, usize)> {
    // (is_cycle, length) when the component is a path or cycle
    if comp.iter().any(|&v| g.degree(v) > 2) {
        return None;
    }
    let ends = comp.iter().filter(|&&v| g.degree(v) <= 1).count();
    match ends {
        0 => Some((true, comp.len())),
        1 | 2 => Some((false, comp.len())),
        _ => None,
    }
}

/// log2 of the number of independent sets of a path on `n` vertices,
/// computed by iterating the hard-pair transfer matrix in log space.
pub fn log2_independent_sets_path(n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    // state (excluded, included); counts start at vertex 1
    let (mut a, mut b) = (1.0f64, 1.0f64);
    let mut exponent = 0.0f64;
    for _ in 1..n {
        let na = a + b;
        let nb = a;
        a = na;
        b = nb;
        if a > 1e300 {
            let s = a;
            a /= s;
            b /= s;
            exponent += s.log2();
        }
    }
    exponent + (a + b).log2()
}

/// log2 of the number of independent sets of a cycle on `n >= 3` vertices:
/// the trace of the n-th transfer-matrix power, with scaling.
pub fn log2_independent_sets_cycle(n: usize) -> f64 {
    assert!(n >= 3);
    // power the matrix [[1,1],[1,0]] by squaring in log scale
    let mut result = [[1.0f64, 0.0], [0.0, 1.0]];
    let mut result_exp = 0.0f64;
    let mut base = [[1.0f64, 1.0], [1.0, 0.0]];
    let mut base_exp = 0.0f64;
    let mut e = n;
    let mul = |x: &[[f64; 2]; 2], y: &[[f64; 2]; 2]| {
        let mut out = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = x[i][0] * y[0][j] + x[i][1] * y[1][j];
            }
        }
        out
    };
    let rescale = |m: &mut [[f64; 2]; 2], exp: &mut f64| {
        let s = m.iter().flatten().fold(0.0f64, |acc, &v| acc.max(v.abs()));
        if s > 1e150 {
            for row in m.iter_mut() {
                for v in row.iter_mut() {
                    *v /= s;
                }
            }
            *exp += s.log2();
        }
    };
    while e > 0 {
        if e & 1 == 1 {
            result = mul(&result, &base);
            result_exp += base_exp;
            rescale(&mut result, &mut result_exp);
        }
        base = mul(&base, &base);
        base_exp *= 2.0;
        rescale(&mut base, &mut base_exp);
        e >>= 1;
    }
    result_exp + (result[0][0] + result[1][1]).log2()
}

/// log2 of the number of independent sets. Uses closed forms per path or
/// cycle component and the exact branching counter otherwise.
pub fn log2_independent_sets(g: &Graph) -> Result<f64, FunctionalError> {
    if g.is_empty() {
        return Ok(0.0);
    }
    let mut total = 0.0f64;
    let mut leftover: Vec<usize> = Vec::new();
    for comp in g.connected_components() {
        match component_shape(g, &comp) {
            Some((false, len)) => total += log2_independent_sets_path(len),
            Some((true, len)) => total += log2_independent_sets_cycle(len),
            None => leftover.extend_from_slice(&comp),
        }
    }
    if !leftover.is_empty() {
        let (sub, _) = g.induced_subgraph(&leftover)?;
        let count = count_independent_sets(&sub)?;
        total += (count as f64).log2();
    }
    Ok(total)
}

// ---------------------------------------------------------------------------
// almost-additivity

#[derive(Debug, Clone, Serialize)]
pub struct AlmostAdditivePair {
    pub index: usize,
    pub multiple: usize,
    pub p: usize,
    pub q: usize,
    pub lhs: f64,
    pub delta_s: DistanceEstimate,
    pub rhs: f64,
    pub pass: bool,
    /// `lhs / (delta_s * p |V(G)|)` when the distance estimate is positive.
    pub empirical_d: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AlmostAdditiveReport {
    pub functional: String,
    pub declared_d: Option<f64>,
    pub pairs: Vec<AlmostAdditivePair>,
    pub all_pass: bool,
    /// Smallest constant that would make every checked pair pass.
    pub empirical_min_d: f64,
}

/// Checks the almost-additivity bound `|| p F(G) - q F(H) || <=
/// D delta_S(pG, qH) p |V(G)|` on every supplied pair, for each multiple
/// `k (p0, q0)` of the minimal vertex-equalizing pair up to `multiple_cap`.
/// Star-distance upper bounds make the check conservative-valid.
pub fn verify_almost_additive(
    f: &GraphFunctional,
    pairs: &[(Graph, Graph)],
    multiple_cap: usize,
    cfg: &DeltaSConfig,
) -> Result<AlmostAdditiveReport, FunctionalError> {
    f.validate_empty()?;
    let declared_d = f.additivity_const;
    let mut out = Vec::new();
    let mut empirical_min_d = 0.0f64;
    let mut all_pass = true;
    for (index, (g, h)) in pairs.iter().enumerate() {
        if g.is_empty() || h.is_empty() {
            return Err(FunctionalError::Evaluation {
                n: 0,
                msg: "almost-additivity pairs must be nonempty".into(),
            });
        }
        let (ng, nh) = (g.vertex_count(), h.vertex_count());
        let gcd = num_integer::gcd(ng, nh);
        let (p0, q0) = (nh / gcd, ng / gcd);
        let fg = f.evaluate(g)?;
        let fh = f.evaluate(h)?;
        for k in 1..=multiple_cap.max(1) {
            let (p, q) = (k * p0, k * q0);
            let gp = g.disjoint_multiple(p)?;
            let hq = h.disjoint_multiple(q)?;
            let est = metrics::delta_s_auto(&gp, &hq, cfg)?;
            let lhs = fg.scale(p as f64).sub(&fh.scale(q as f64))?.norm();
            let normalizer = est.value * (p * ng) as f64;
            let rhs = declared_d.unwrap_or(f64::INFINITY) * normalizer;
            let pass = lhs <= rhs + 1e-9;
            let empirical_d = if normalizer > 1e-15 {
                Some(lhs / normalizer)
            } else if lhs <= 1e-9 {
                None
            } else {
                Some(f64::INFINITY)
            };
            if let Some(d) = empirical_d {
                empirical_min_d = empirical_min_d.max(d);
            }
            all_pass &= pass;
            out.push(AlmostAdditivePair {
                index,
                multiple: k,
                p,
                q,
                lhs,
                delta_s: est,
                rhs,
                pass,
                empirical_d,
            });
        }
    }
    Ok(AlmostAdditiveReport {
        functional: f.name.clone(),
        declared_d,
        pairs: out,
        all_pass,
        empirical_min_d,
    })
}

// ---------------------------------------------------------------------------
// normalized limits

#[derive(Debug, Serialize)]
pub struct NormalizedLimitReport {
    pub functional: String,
    /// Norm of each normalized value `F(G_i) / |V(G_i)|`.
    pub normalized_norms: Vec<f64>,
    /// `profile[m]` = max over sampled pairs `i, j >= m` of the normalized
    /// difference norm.
    pub profile: Vec<f64>,
    pub tolerance: f64,
    /// First index from which the tail profile stays below the tolerance.
    pub converged_at: Option<usize>,
    /// The last-term normalized value, as the limit estimate.
    pub estimate: Value,
}

pub fn normalized_limit(
    f: &GraphFunctional,
    seq: &[Graph],
    tolerance: f64,
) -> Result<NormalizedLimitReport, FunctionalError> {
    if seq.is_empty() {
        return Err(FunctionalError::SequenceTooShort(1));
    }
    let values: Vec<Value> = seq
        .par_iter()
        .map(|g| {
            let v = f.evaluate(g)?;
            Ok(v.scale(1.0 / g.vertex_count().max(1) as f64))
        })
        .collect::<Result<_, FunctionalError>>()?;
    let pairs = crate::stats::sample_pairs(seq.len());
    let mut diffs = Vec::with_capacity(pairs.len());
    for (i, j) in pairs {
        diffs.push((i, j, values[i].sub(&values[j])?.norm()));
    }
    let profile: Vec<f64> = (0..seq.len().saturating_sub(1))
        .map(|m| {
            diffs
                .iter()
                .filter(|(i, j, _)| *i >= m && *j >= m)
                .map(|(_, _, v)| *v)
                .fold(0.0, f64::max)
        })
        .collect();
    let converged_at = profile.iter().position(|&v| v <= tolerance);
    Ok(NormalizedLimitReport {
        functional: f.name.clone(),
        normalized_norms: values.iter().map(|v| v.norm()).collect(),
        profile,
        tolerance,
        converged_at,
        estimate: values.last().expect("nonempty").clone(),
    })
}

// ---------------------------------------------------------------------------
// subadditive axioms

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AxiomMode {
    /// Monotonicity and subadditivity checked on induced subgraphs.
    Induced,
    /// Additionally samples arbitrary (edge-deleted) subgraphs.
    Strict,
}

#[derive(Debug, Clone, Serialize)]
pub struct AxiomViolation {
    pub axiom: &'static str,
    pub sample: usize,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct AxiomReport {
    pub functional: String,
    pub mode: AxiomMode,
    pub samples: usize,
    pub checks: usize,
    pub violations: Vec<AxiomViolation>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks boundedness, monotonicity, subadditivity over vertex
/// bipartitions, exact additivity on edge-disjoint unions and
/// isomorphism invariance of a scalar functional on the given samples.
pub fn check_subadditive_axioms(
    f: &GraphFunctional,
    samples: &[Graph],
    seed: u64,
    mode: AxiomMode,
    trials_per_sample: usize,
) -> Result<AxiomReport, FunctionalError> {
    let eval = |g: &Graph| -> Result<f64, FunctionalError> {
        f.evaluate(g)?
            .as_scalar()
            .ok_or_else(|| FunctionalError::NotScalar(f.name.clone()))
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = Vec::new();
    let mut checks = 0usize;
    let tol = 1e-9;

    for (idx, g) in samples.iter().enumerate() {
        let n = g.vertex_count();
        if n == 0 {
            continue;
        }
        let hg = eval(g)?;

        // boundedness against the declared constant
        if let Some(c) = f.bound_const {
            checks += 1;
            if hg > c * n as f64 + tol {
                violations.push(AxiomViolation {
                    axiom: "boundedness",
                    sample: idx,
                    detail: format!("h = {hg} > C |V| = {}", c * n as f64),
                });
            }
        }

        for _ in 0..trials_per_sample {
            // random vertex subset
            let subset: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
            if !subset.is_empty() {
                let (induced, _) = g.induced_subgraph(&subset)?;
                let hs = eval(&induced)?;
                checks += 1;
                if hs > hg + tol {
                    violations.push(AxiomViolation {
                        axiom: "monotonicity",
                        sample: idx,
                        detail: format!("induced subgraph on {subset:?}: {hs} > {hg}"),
                    });
                }
                if mode == AxiomMode::Strict {
                    // drop a random subset of the induced edges as well
                    let kept: Vec<(usize, usize)> = induced
                        .edges()
                        .into_iter()
                        .filter(|_| rng.gen_bool(0.6))
                        .collect();
                    let sub = Graph::new(induced.vertex_count(), induced.degree_bound(), &kept)?;
                    let hsub = eval(&sub)?;
                    checks += 1;
                    if hsub > hg + tol {
                        violations.push(AxiomViolation {
                            axiom: "monotonicity-strict",
                            sample: idx,
                            detail: format!("{hsub} > {hg}"),
                        });
                    }
                }
            }

            // subadditivity over a random bipartition with induced parts
            let side: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
            let a: Vec<usize> = (0..n).filter(|&v| side[v]).collect();
            let b: Vec<usize> = (0..n).filter(|&v| !side[v]).collect();
            let ha = if a.is_empty() {
                0.0
            } else {
                eval(&g.induced_subgraph(&a)?.0)?
            };
            let hb = if b.is_empty() {
                0.0
            } else {
                eval(&g.induced_subgraph(&b)?.0)?
            };
            checks += 1;
            if hg > ha + hb + tol {
                violations.push(AxiomViolation {
                    axiom: "subadditivity",
                    sample: idx,
                    detail: format!("h = {hg} > {ha} + {hb} with parts {a:?} | {b:?}"),
                });
            }
            if mode == AxiomMode::Strict {
                // the extreme edge-deleted decomposition: edgeless parts
                let edgeless = |set: &[usize]| -> Result<f64, FunctionalError> {
                    if set.is_empty() {
                        return Ok(0.0);
                    }
                    let sub = Graph::new(set.len(), g.degree_bound(), &[])?;
                    eval(&sub)
                };
                let ha0 = edgeless(&a)?;
                let hb0 = edgeless(&b)?;
                checks += 1;
                if hg > ha0 + hb0 + tol {
                    violations.push(AxiomViolation {
                        axiom: "subadditivity-strict",
                        sample: idx,
                        detail: format!("h = {hg} > {ha0} + {hb0} on edgeless parts"),
                    });
                }
            }

            // pattern invariance under a seeded relabeling
            let sigma = VertexLabeling::seeded_shuffle(n, rng.gen());
            let relabeled = g.relabel(&sigma)?;
            let hr = eval(&relabeled)?;
            checks += 1;
            if (hr - hg).abs() > tol {
                violations.push(AxiomViolation {
                    axiom: "pattern-invariance",
                    sample: idx,
                    detail: format!("relabeling changed value: {hr} vs {hg}"),
                });
            }
        }

        // special additivity on a literal disjoint union with the next sample
        let other = &samples[(idx + 1) % samples.len()];
        if !other.is_empty() && g.degree_bound() == other.degree_bound() {
            let union_edges: Vec<(usize, usize)> = g
                .edges()
                .into_iter()
                .chain(other.edges().into_iter().map(|(u, v)| (u + n, v + n)))
                .collect();
            let union = Graph::new(n + other.vertex_count(), g.degree_bound(), &union_edges)?;
            let hu = eval(&union)?;
            let ho = eval(other)?;
            checks += 1;
            if (hu - hg - ho).abs() > tol {
                violations.push(AxiomViolation {
                    axiom: "special-additivity",
                    sample: idx,
                    detail: format!("h(G ⊔ H) = {hu}, h(G) + h(H) = {}", hg + ho),
                });
            }
        }
    }
    Ok(AxiomReport {
        functional: f.name.clone(),
        mode,
        samples: samples.len(),
        checks,
        violations,
    })
}

// ---------------------------------------------------------------------------
// subadditive limits and the scalar baseline

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum LimitValue {
    Finite(f64),
    MinusInfinity,
}

#[derive(Debug, Clone, Serialize)]
pub struct SubadditiveLimitReport {
    pub functional: String,
    pub normalized: Vec<f64>,
    /// `gap[m]` = sup minus inf of the normalized values over indices >= m.
    pub gap: Vec<f64>,
    pub lambda: LimitValue,
}

/// Estimates the normalized limit of a scalar functional along a sequence:
/// the lim inf over the tail, with the tail gap reported. Values falling
/// below `floor` without stabilizing are reported as minus infinity.
pub fn subadditive_limit(
    f: &GraphFunctional,
    seq: &[Graph],
    floor: f64,
) -> Result<SubadditiveLimitReport, FunctionalError> {
    if seq.is_empty() {
        return Err(FunctionalError::SequenceTooShort(1));
    }
    let normalized: Vec<f64> = seq
        .par_iter()
        .map(|g| {
            let v = f.evaluate(g)?;
            let x = v
                .as_scalar()
                .ok_or_else(|| FunctionalError::NotScalar(f.name.clone()))?;
            Ok(x / g.vertex_count().max(1) as f64)
        })
        .collect::<Result<_, FunctionalError>>()?;
    let gap: Vec<f64> = (0..normalized.len())
        .map(|m| {
            let tail = &normalized[m..];
            let hi = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let lo = tail.iter().copied().fold(f64::INFINITY, f64::min);
            hi - lo
        })
        .collect();
    let tail_start = normalized.len() / 2;
    let liminf = normalized[tail_start..]
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let decreasing = normalized.windows(2).all(|w| w[1] <= w[0] + 1e-12);
    let lambda = if liminf < floor && decreasing {
        LimitValue::MinusInfinity
    } else {
        LimitValue::Finite(liminf)
    };
    Ok(SubadditiveLimitReport {
        functional: f.name.clone(),
        normalized,
        gap,
        lambda,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct FeketeReport {
    /// `min_n a_n / n` over the supplied terms.
    pub inf_estimate: f64,
    /// `a_N / N` for the last supplied term.
    pub last_proxy: f64,
    /// Offset-cancelling estimate `(a_{2n} - a_n) / n` at the largest
    /// usable `n`; exact for sequences of the form `lambda n + c`.
    pub difference_estimate: Option<f64>,
    /// Subadditivity violations `(m, n, a_{m+n} - a_m - a_n)`, capped.
    pub violations: Vec<(usize, usize, f64)>,
    pub violations_truncated: bool,
}

/// Scalar subadditive-sequence baseline: checks `a_{m+n} <= a_m + a_n` on
/// all in-range pairs and reports limit estimates for `a_n / n`.
/// `a[0]` holds the term of index 1.
pub fn fekete_limit(a: &[f64]) -> FeketeReport {
    let n = a.len();
    let mut violations = Vec::new();
    let cap = 100;
    let mut truncated = false;
    for i in 1..=n {
        for j in i..=n {
            if i + j > n {
                break;
            }
            let excess = a[i + j - 1] - a[i - 1] - a[j - 1];
            if excess > 1e-12 {
                if violations.len() < cap {
                    violations.push((i, j, excess));
                } else {
                    truncated = true;
                }
            }
        }
    }
    let inf_estimate = a
        .iter()
        .enumerate()
        .map(|(i, &v)| v / (i + 1) as f64)
        .fold(f64::INFINITY, f64::min);
    let last_proxy = a.last().map(|&v| v / n as f64).unwrap_or(f64::NAN);
    let difference_estimate = if n >= 2 {
        let half = n / 2;
        Some((a[2 * half - 1] - a[half - 1]) / half as f64)
    } else {
        None
    };
    FeketeReport {
        inf_estimate,
        last_proxy,
        difference_estimate,
        violations,
        violations_truncated: truncated,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> Graph {
        let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
        Graph::new(n, 2, &edges).unwrap()
    }

    fn cycle(n: usize) -> Graph {
        let mut edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
        edges.push((0, n - 1));
        Graph::new(n, 2, &edges).unwrap()
    }

    fn fib(n: usize) -> u128 {
        let (mut a, mut b) = (0u128, 1u128);
        for _ in 0..n {
            let c = a + b;
            a = b;
            b = c;
        }
        a
    }

    #[test]
    fn step_fn_algebra() {
        let a = StepFn::from_jumps(&[(0.0, 1.0), (2.0, 1.0)]);
        let b = StepFn::from_jumps(&[(1.0, 1.0)]);
        assert_eq!(a.eval(-0.5), 0.0);
        assert_eq!(a.eval(0.0), 1.0);
        assert_eq!(a.eval(3.0), 2.0);
        let s = a.add(&b);
        assert_eq!(s.eval(0.5), 1.0);
        assert_eq!(s.eval(1.5), 2.0);
        assert_eq!(s.eval(2.5), 3.0);
        let d = a.sub(&a);
        assert_eq!(d.sup_norm(), 0.0);
        assert_eq!(a.scale(-2.0).sup_norm(), 4.0);
    }

    #[test]
    fn value_norm_axioms_on_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let jumps: Vec<(f64, f64)> = (0..6)
                .map(|_| (rng.gen_range(-3.0..3.0), rng.gen_range(-2.0..2.0)))
                .collect();
            let a = Value::Step(StepFn::from_jumps(&jumps));
            let jumps_b: Vec<(f64, f64)> = (0..4)
                .map(|_| (rng.gen_range(-3.0..3.0), rng.gen_range(-2.0..2.0)))
                .collect();
            let b = Value::Step(StepFn::from_jumps(&jumps_b));
            let lambda: f64 = rng.gen_range(-2.0..2.0);
            assert!(a.norm() >= 0.0);
            // triangle inequality and absolute homogeneity
            assert!(a.add(&b).unwrap().norm() <= a.norm() + b.norm() + 1e-12);
            assert!((a.scale(lambda).norm() - lambda.abs() * a.norm()).abs() < 1e-12);
            // the same on scalars
            let x = Value::Scalar(rng.gen_range(-5.0..5.0));
            let y = Value::Scalar(rng.gen_range(-5.0..5.0));
            assert!(x.add(&y).unwrap().norm() <= x.norm() + y.norm() + 1e-12);
            assert!((x.scale(lambda).norm() - lambda.abs() * x.norm()).abs() < 1e-12);
        }
        assert!(Value::Scalar(1.0)
            .add(&Value::Step(StepFn::zero()))
            .is_err());
    }

    #[test]
    fn independent_set_counts_small() {
        assert_eq!(count_independent_sets(&path(1)).unwrap(), 2);
        assert_eq!(count_independent_sets(&path(2)).unwrap(), 3);
        assert_eq!(count_independent_sets(&path(3)).unwrap(), 5);
        assert_eq!(count_independent_sets(&cycle(3)).unwrap(), 4);
        assert_eq!(count_independent_sets(&cycle(4)).unwrap(), 7);
        // disjoint pieces multiply
        let g = Graph::new(5, 2, &[(0, 1), (2, 3)]).unwrap();
        assert_eq!(count_independent_sets(&g).unwrap(), 3 * 3 * 2);
    }

    #[test]
    fn independent_sets_match_fibonacci_and_lucas() {
        for n in 1..=30 {
            assert_eq!(
                count_independent_sets(&path(n)).unwrap(),
                fib(n + 2),
                "path {n}"
            );
        }
        for n in 3..=20 {
            // Lucas numbers L_n = fib(n-1) + fib(n+1)
            let lucas = fib(n - 1) + fib(n + 1);
            assert_eq!(
                count_independent_sets(&cycle(n)).unwrap(),
                lucas,
                "cycle {n}"
            );
        }
    }

    #[test]
    fn transfer_matrix_matches_exact_counts() {
        for n in 1..=40 {
            let exact = (fib(n + 2) as f64).log2();
            let tm = log2_independent_sets_path(n);
            assert!((exact - tm).abs() < 1e-9, "path {n}: {exact} vs {tm}");
        }
        for n in 3..=40 {
            let lucas = (fib(n - 1) + fib(n + 1)) as f64;
            let tm = log2_independent_sets_cycle(n);
            assert!((lucas.log2() - tm).abs() < 1e-9, "cycle {n}");
        }
        // far beyond exact range: per-vertex entropy approaches log2(phi)
        let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
        let rate = log2_independent_sets_path(100_000) / 100_000.0;
        assert!((rate - phi.log2()).abs() < 1e-4);
    }

    #[test]
    fn almost_additive_vcount_and_ecount() {
        let cfg = DeltaSConfig::default();
        let pairs = vec![
            (path(4), path(6)),
            (path(5), cycle(5)),
            (cycle(3), path(6)),
            (Graph::new(4, 2, &[(0, 1)]).unwrap(), path(8)),
        ];
        let v = GraphFunctional::vertex_count();
        v.validate_empty().unwrap();
        let report = verify_almost_additive(&v, &pairs, 2, &cfg).unwrap();
        assert!(report.all_pass);
        assert!(report.pairs.iter().all(|p| p.lhs.abs() < 1e-9));

        let e = GraphFunctional::edge_count(2);
        let report = verify_almost_additive(&e, &pairs, 2, &cfg).unwrap();
        assert!(report.all_pass, "empirical D = {}", report.empirical_min_d);
        assert!(report.empirical_min_d <= 1.0 + 1e-9);
    }

    #[test]
    fn edge_count_additivity_exhaustive_small_pairs() {
        // every graph on exactly 4 vertices with max degree <= 3, paired
        // exhaustively: the edge count obeys the bound with D = d/2
        let mut graphs = Vec::new();
        let pairs: Vec<(usize, usize)> = (0..4)
            .flat_map(|u| ((u + 1)..4).map(move |v| (u, v)))
            .collect();
        for mask in 0u32..(1 << pairs.len()) {
            let edges: Vec<(usize, usize)> = pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &e)| e)
                .collect();
            if let Ok(g) = Graph::new(4, 3, &edges) {
                graphs.push(g);
            }
        }
        let f = GraphFunctional::edge_count(3);
        let cfg = DeltaSConfig::default();
        let all_pairs: Vec<(Graph, Graph)> = graphs
            .iter()
            .flat_map(|g| graphs.iter().map(move |h| (g.clone(), h.clone())))
            .collect();
        let report = verify_almost_additive(&f, &all_pairs, 1, &cfg).unwrap();
        assert!(report.all_pass, "empirical D = {}", report.empirical_min_d);
        assert!(report.empirical_min_d <= 1.5 + 1e-9);
    }

    #[test]
    fn normalized_limit_examples() {
        let v = GraphFunctional::vertex_count();
        let seq = vec![path(4), path(9), path(23)];
        let report = normalized_limit(&v, &seq, 1e-3).unwrap();
        assert!(report.profile.iter().all(|&x| x == 0.0));
        assert_eq!(report.estimate.as_scalar().unwrap(), 1.0);
        assert_eq!(report.converged_at, Some(0));

        let e = GraphFunctional::edge_count(2);
        let seq: Vec<Graph> = [10, 40, 160, 640].iter().map(|&n| path(n)).collect();
        let report = normalized_limit(&e, &seq, 1e-2).unwrap();
        // F / |V| = (n-1)/n climbs toward 1 at rate O(1/n)
        let last = *report.normalized_norms.last().unwrap();
        assert!((last - 639.0 / 640.0).abs() < 1e-12);
        assert!(report.converged_at.is_some());
    }

    #[test]
    fn axioms_pass_for_linear_functional() {
        let f = GraphFunctional::new("half-v", FunctionalKind::Subadditive, |g| {
            Ok(Value::Scalar(0.5 * g.vertex_count() as f64))
        })
        .with_bound_const(0.5);
        let samples = vec![path(6), cycle(5), Graph::new(4, 2, &[(0, 1)]).unwrap()];
        let report = check_subadditive_axioms(&f, &samples, 1, AxiomMode::Strict, 8).unwrap();
        assert!(report.passed(), "{:?}", report.violations);
    }

    #[test]
    fn axioms_catch_edge_count_subadditivity_failure() {
        // splitting a single edge into two singletons: 1 > 0 + 0
        let f = GraphFunctional::edge_count(2);
        let samples = vec![path(2)];
        let report = check_subadditive_axioms(&f, &samples, 5, AxiomMode::Induced, 40).unwrap();
        assert!(report.violations.iter().any(|v| v.axiom == "subadditivity"));
    }

    #[test]
    fn axioms_pass_for_log_indep_sets() {
        let f = GraphFunctional::log_independent_sets();
        let samples = vec![
            path(9),
            cycle(8),
            Graph::new(
                10,
                3,
                &[
                    (0, 1),
                    (1, 2),
                    (2, 3),
                    (3, 4),
                    (4, 5),
                    (5, 0),
                    (2, 6),
                    (6, 7),
                    (8, 9),
                ],
            )
            .unwrap(),
        ];
        let report = check_subadditive_axioms(&f, &samples, 7, AxiomMode::Induced, 10).unwrap();
        assert!(report.passed(), "{:?}", report.violations);
    }

    #[test]
    fn subadditive_limit_paths_and_cycles() {
        let f = GraphFunctional::log_independent_sets();
        let phi_log = ((1.0 + 5.0f64.sqrt()) / 2.0).log2();
        let paths: Vec<Graph> = [20, 50, 100, 200].iter().map(|&n| path(n)).collect();
        let report = subadditive_limit(&f, &paths, -1e6).unwrap();
        match report.lambda {
            LimitValue::Finite(l) => assert!((l - phi_log).abs() < 0.02),
            _ => panic!("expected finite limit"),
        }
        let cycles: Vec<Graph> = [20, 50, 100, 200].iter().map(|&n| cycle(n)).collect();
        let report_c = subadditive_limit(&f, &cycles, -1e6).unwrap();
        match report_c.lambda {
            LimitValue::Finite(l) => assert!((l - phi_log).abs() < 0.02),
            _ => panic!("expected finite limit"),
        }
    }

    #[test]
    fn subadditive_limit_detects_divergence() {
        let f = GraphFunctional::new("neg-v2", FunctionalKind::Unknown, |g| {
            Ok(Value::Scalar(
                -((g.vertex_count() * g.vertex_count()) as f64),
            ))
        });
        let seq: Vec<Graph> = [10, 100, 1000].iter().map(|&n| path(n)).collect();
        let report = subadditive_limit(&f, &seq, -100.0).unwrap();
        assert_eq!(report.lambda, LimitValue::MinusInfinity);
    }

    #[test]
    fn fekete_examples() {
        // a_n = n: limit 1, no violations
        let a: Vec<f64> = (1..=100).map(|n| n as f64).collect();
        let r = fekete_limit(&a);
        assert!(r.violations.is_empty());
        assert_eq!(r.inf_estimate, 1.0);
        assert_eq!(r.difference_estimate, Some(1.0));

        // a_n = ceil(n/2) + 3: true limit 1/2; the plain minimum keeps the
        // offset, the difference estimate cancels it exactly
        let a: Vec<f64> = (1..=1000)
            .map(|n: usize| (n.div_ceil(2) + 3) as f64)
            .collect();
        let r = fekete_limit(&a);
        assert!(r.violations.is_empty());
        assert_eq!(r.difference_estimate, Some(0.5));
        assert!(r.inf_estimate >= 0.5);

        // a_n = n^2: witness (1, 1)
        let a: Vec<f64> = (1..=50).map(|n| (n * n) as f64).collect();
        let r = fekete_limit(&a);
        assert_eq!(r.violations[0].0, 1);
        assert_eq!(r.violations[0].1, 1);
    }

    #[test]
    fn fekete_inf_estimate_decreases_with_more_terms() {
        // subadditive a_n = 2n + 7: true limit 2
        let a: Vec<f64> = (1..=600usize).map(|n| (2 * n + 7) as f64).collect();
        let mut prev = f64::INFINITY;
        for len in [10usize, 50, 200, 600] {
            let r = fekete_limit(&a[..len]);
            assert!(r.violations.is_empty());
            assert!(r.inf_estimate >= 2.0);
            assert!(r.inf_estimate <= prev + 1e-12);
            prev = r.inf_estimate;
        }
    }
}
