//! Pattern-invariant finite-range operators and their spectral
//! distribution functions.
//!
//! A kernel assigns coefficients to each radius-R rooted ball class; the
//! assembled matrix acts by those coefficients, so the operator is
//! determined by local patterns. Eigenvalue counting functions are
//! computed either from a full dense eigensolve or by inertia counts of
//! shifted banded LDL^T factorizations, and compared in supremum norm
//! against each other or closed-form reference curves.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::canon;
use crate::functionals::{FunctionalError, FunctionalKind, GraphFunctional, StepFn, Value};
use crate::graph::{Graph, GraphError, RootedGraph};
use crate::stats::{self, CanonicalBallKey, StatVector, StatsError};

pub type Mass = Ratio<u64>;

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("no kernel entry for ball class {0} (radius {1}, {2} vertices)")]
    MissingClass(String, usize, usize),
    #[error("kernel entry for class {key} has {got} values, class has {want} vertices")]
    ValueCount {
        key: String,
        got: usize,
        want: usize,
    },
    #[error("kernel values not constant on root-fixing orbits of class {0}")]
    OrbitViolation(String),
    #[error(
        "assembled matrix is asymmetric at ({0}, {1}): {2} vs {3}; kernel spec is inadmissible"
    )]
    Asymmetric(usize, usize, f64, f64),
    #[error("matrix of size {0} exceeds the dense-solve limit {1} and is not banded enough for inertia counting")]
    TooLarge(usize, usize),
    #[error("reordered bandwidth {0} exceeds the banded-factorization limit {1}")]
    BandwidthTooLarge(usize, usize),
    #[error(
        "stat vector carries no per-radius sweep data (deserialized vectors must be recomputed)"
    )]
    MissingSweepData,
    #[error("factorization breakdown persisted after {0} shift perturbations")]
    FactorizationBreakdown(usize),
    #[error("stats were computed to radius {0}, kernel needs {1}")]
    StatsRadius(usize, usize),
    #[error("unknown kernel `{0}`")]
    UnknownKernel(String),
    #[error("unknown reference curve `{0}`")]
    UnknownReference(String),
    #[error("sequence must contain at least {0} graphs")]
    SequenceTooShort(usize),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Stats(#[from] StatsError),
}

// ---------------------------------------------------------------------------
// kernels

/// Built-in kernel rules, applied to the canonical representative of each
/// radius-R class occurring in a graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BuiltinKernel {
    /// R = 1, coefficient 1 on root-adjacent vertices.
    Adjacency,
    /// Positive graph Laplacian D - A: degree on the root, -1 on neighbors.
    Laplacian,
    /// A - D: -degree on the root, +1 on neighbors.
    NegLaplacian,
    /// R = 0, all coefficients zero: the null kernel.
    Zero,
}

impl BuiltinKernel {
    pub fn range(self) -> usize {
        match self {
            BuiltinKernel::Zero => 0,
            _ => 1,
        }
    }

    fn values(self, rep: &RootedGraph) -> Vec<f64> {
        let n = rep.graph.vertex_count();
        let root = rep.root;
        let mut values = vec![0.0; n];
        match self {
            BuiltinKernel::Zero => {}
            BuiltinKernel::Adjacency => {
                for &w in rep.graph.neighbors(root) {
                    values[w] = 1.0;
                }
            }
            BuiltinKernel::Laplacian => {
                values[root] = rep.graph.degree(root) as f64;
                for &w in rep.graph.neighbors(root) {
                    values[w] = -1.0;
                }
            }
            BuiltinKernel::NegLaplacian => {
                values[root] = -(rep.graph.degree(root) as f64);
                for &w in rep.graph.neighbors(root) {
                    values[w] = 1.0;
                }
            }
        }
        values
    }
}

/// An explicit kernel table: one coefficient vector per radius-R class,
/// indexed by the canonical representative's vertex labels (root = 0).
#[derive(Debug, Clone)]
pub struct KernelSpec {
    range: usize,
    table: BTreeMap<CanonicalBallKey, Vec<f64>>,
}

impl KernelSpec {
    /// Validates well-definedness: coefficients must be constant on orbits
    /// of the root-fixing automorphism group of each class.
    pub fn new(
        range: usize,
        table: BTreeMap<CanonicalBallKey, Vec<f64>>,
    ) -> Result<Self, SpectralError> {
        for (key, values) in &table {
            let rep = key.representative();
            if values.len() != rep.graph.vertex_count() {
                return Err(SpectralError::ValueCount {
                    key: key.to_hex(),
                    got: values.len(),
                    want: rep.graph.vertex_count(),
                });
            }
            let orbits = canon::root_fixing_orbits(&rep.graph, rep.root);
            for (v, &o) in orbits.iter().enumerate() {
                if (values[v] - values[o]).abs() > 1e-12 {
                    return Err(SpectralError::OrbitViolation(key.to_hex()));
                }
            }
        }
        Ok(KernelSpec { range, table })
    }

    pub fn range(&self) -> usize {
        self.range
    }

    pub fn table(&self) -> &BTreeMap<CanonicalBallKey, Vec<f64>> {
        &self.table
    }
}

/// A kernel: either a built-in rule or an explicit class table.
#[derive(Debug, Clone)]
pub enum Kernel {
    Builtin(BuiltinKernel),
    Table(KernelSpec),
}

impl Kernel {
    pub fn range(&self) -> usize {
        match self {
            Kernel::Builtin(b) => b.range(),
            Kernel::Table(t) => t.range(),
        }
    }

    pub fn by_name(name: &str) -> Result<Kernel, SpectralError> {
        match name {
            "adjacency" => Ok(Kernel::Builtin(BuiltinKernel::Adjacency)),
            "laplacian" => Ok(Kernel::Builtin(BuiltinKernel::Laplacian)),
            "neg-laplacian" => Ok(Kernel::Builtin(BuiltinKernel::NegLaplacian)),
            "zero" => Ok(Kernel::Builtin(BuiltinKernel::Zero)),
            other => Err(SpectralError::UnknownKernel(other.into())),
        }
    }

    /// Coefficient vector for a class, in canonical vertex order.
    fn class_values(&self, key: &CanonicalBallKey) -> Result<Vec<f64>, SpectralError> {
        match self {
            Kernel::Builtin(rule) => Ok(rule.values(&key.representative())),
            Kernel::Table(spec) => spec.table.get(key).cloned().ok_or_else(|| {
                SpectralError::MissingClass(key.to_hex(), key.radius(), key.ball_size())
            }),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Kernel::Builtin(BuiltinKernel::Adjacency) => "adjacency".into(),
            Kernel::Builtin(BuiltinKernel::Laplacian) => "laplacian".into(),
            Kernel::Builtin(BuiltinKernel::NegLaplacian) => "neg-laplacian".into(),
            Kernel::Builtin(BuiltinKernel::Zero) => "zero".into(),
            Kernel::Table(_) => "table".into(),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum BallRefJson {
    Hex(String),
    Inline {
        n: usize,
        root: usize,
        edges: Vec<(usize, usize)>,
    },
}

#[derive(Debug, Serialize, Deserialize)]
struct KernelEntryJson {
    ball: BallRefJson,
    values: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct KernelSpecJson {
    #[serde(rename = "R")]
    range: usize,
    entries: Vec<KernelEntryJson>,
}

impl KernelSpec {
    /// Parses the JSON kernel format: `{R, entries: [{ball, values}]}`
    /// where `ball` is a hex canonical key or an inline rooted edge list.
    /// Inline values are given in the inline vertex order and reindexed
    /// through the canonical relabeling.
    pub fn from_json(text: &str) -> Result<Self, SpectralError> {
        let json: KernelSpecJson = serde_json::from_str(text)
            .map_err(|e| SpectralError::UnknownKernel(format!("kernel JSON parse error: {e}")))?;
        let mut table = BTreeMap::new();
        for entry in json.entries {
            match entry.ball {
                BallRefJson::Hex(hex) => {
                    let key = CanonicalBallKey::from_hex(&hex)?;
                    table.insert(key, entry.values);
                }
                BallRefJson::Inline { n, root, edges } => {
                    let graph = Graph::new(n, n.max(1), &edges)?;
                    let rooted = RootedGraph::from_graph(graph, root)?;
                    let (key, relabel) = stats::canonical_key_with_map(&rooted)?;
                    if entry.values.len() != n {
                        return Err(SpectralError::ValueCount {
                            key: key.to_hex(),
                            got: entry.values.len(),
                            want: n,
                        });
                    }
                    let mut values = vec![0.0; n];
                    for (v, &val) in entry.values.iter().enumerate() {
                        values[relabel[v]] = val;
                    }
                    table.insert(key, values);
                }
            }
        }
        KernelSpec::new(json.range, table)
    }

    pub fn to_json(&self) -> String {
        let entries: Vec<KernelEntryJson> = self
            .table
            .iter()
            .map(|(key, values)| KernelEntryJson {
                ball: BallRefJson::Hex(key.to_hex()),
                values: values.clone(),
            })
            .collect();
        serde_json::to_string_pretty(&KernelSpecJson {
            range: self.range,
            entries,
        })
        .expect("kernel spec serializes")
    }
}

// ---------------------------------------------------------------------------
// assembly

/// Sparse symmetric matrix in full row storage.
#[derive(Debug, Clone)]
pub struct SymMatrix {
    n: usize,
    rows: Vec<Vec<(usize, f64)>>,
}

impl SymMatrix {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.rows[i]
            .iter()
            .find(|(col, _)| *col == j)
            .map(|(_, v)| *v)
            .unwrap_or(0.0)
    }

    pub fn rows(&self) -> &[Vec<(usize, f64)>] {
        &self.rows
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, v) in row {
                m[(i, j)] = v;
            }
        }
        m
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// Row-sum bound on the spectral radius.
    pub fn row_sum_bound(&self) -> f64 {
        self.rows
            .iter()
            .map(|row| row.iter().map(|(_, v)| v.abs()).sum())
            .fold(0.0, f64::max)
    }
}

/// Assembles the operator of `kernel` on `g`: `M[x][y] = h_alpha(phi(y))`
/// where the R-ball of `x` realizes class `alpha` via `phi`. Symmetry is
/// validated to 1e-12; a violation signals an inadmissible kernel.
pub fn assemble(g: &Graph, kernel: &Kernel) -> Result<SymMatrix, SpectralError> {
    let r = kernel.range();
    let n = g.vertex_count();
    let mut value_cache: BTreeMap<CanonicalBallKey, Vec<f64>> = BTreeMap::new();
    let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for x in 0..n {
        let ball = g.ball(x, r)?;
        let (key, relabel) = stats::canonical_key_with_map(&ball)?;
        if !value_cache.contains_key(&key) {
            let values = kernel.class_values(&key)?;
            if values.len() != key.ball_size() {
                return Err(SpectralError::ValueCount {
                    key: key.to_hex(),
                    got: values.len(),
                    want: key.ball_size(),
                });
            }
            value_cache.insert(key.clone(), values);
        }
        let values = &value_cache[&key];
        for (local, &orig) in ball.back_map.iter().enumerate() {
            let coeff = values[relabel[local]];
            if coeff != 0.0 {
                rows[x].push((orig, coeff));
            }
        }
        rows[x].sort_unstable_by_key(|(col, _)| *col);
    }
    let m = SymMatrix { n, rows };
    for i in 0..n {
        for &(j, v) in &m.rows[i] {
            let vt = m.get(j, i);
            if (v - vt).abs() > 1e-12 {
                return Err(SpectralError::Asymmetric(i, j, v, vt));
            }
        }
    }
    Ok(m)
}

// ---------------------------------------------------------------------------
// spectral CDFs

/// Right-continuous normalized eigenvalue-counting function with finitely
/// many jumps: `N(lambda) = #{eigenvalues <= lambda} / n`.
#[derive(Debug, Clone, Serialize)]
pub struct SpectralCdf {
    /// Distinct eigenvalues with multiplicities, ascending.
    jumps: Vec<(f64, u64)>,
    n: u64,
}

impl SpectralCdf {
    pub fn from_eigenvalues(mut eigenvalues: Vec<f64>, cluster_tol: f64) -> Self {
        let n = eigenvalues.len() as u64;
        eigenvalues.sort_by(f64::total_cmp);
        let mut jumps: Vec<(f64, u64)> = Vec::new();
        for ev in eigenvalues {
            match jumps.last_mut() {
                Some((x, count)) if (ev - *x).abs() <= cluster_tol => *count += 1,
                _ => jumps.push((ev, 1)),
            }
        }
        SpectralCdf { jumps, n }
    }

    pub fn jumps(&self) -> &[(f64, u64)] {
        &self.jumps
    }

    pub fn normalization(&self) -> u64 {
        self.n
    }

    pub fn total_mass(&self) -> Mass {
        Ratio::new(self.jumps.iter().map(|(_, c)| *c).sum::<u64>(), self.n)
    }

    /// Whether the jump masses sum to exactly 1.
    pub fn is_normalized(&self) -> bool {
        self.jumps.iter().map(|(_, c)| *c).sum::<u64>() == self.n
    }

    /// `N(lambda)`, right-continuous.
    pub fn eval(&self, lambda: f64) -> f64 {
        let count: u64 = self
            .jumps
            .iter()
            .take_while(|(x, _)| *x <= lambda)
            .map(|(_, c)| *c)
            .sum();
        count as f64 / self.n as f64
    }

    /// Left limit `N(lambda-)`.
    pub fn eval_left(&self, lambda: f64) -> f64 {
        let count: u64 = self
            .jumps
            .iter()
            .take_while(|(x, _)| *x < lambda)
            .map(|(_, c)| *c)
            .sum();
        count as f64 / self.n as f64
    }

    /// Jump mass at `lambda` as an exact rational (multiplicity / n),
    /// matching eigenvalues within `tol`.
    pub fn atom_mass(&self, lambda: f64, tol: f64) -> Mass {
        let mult: u64 = self
            .jumps
            .iter()
            .filter(|(x, _)| (x - lambda).abs() <= tol)
            .map(|(_, c)| *c)
            .sum();
        Ratio::new(mult, self.n)
    }
}

/// Default matching tolerance for atom queries.
pub const ATOM_TOL: f64 = 1e-8;

/// Exact sup distance between two spectral CDFs, evaluated over the merged
/// jump set with both one-sided limits.
pub fn sup_distance(a: &SpectralCdf, b: &SpectralCdf) -> f64 {
    let mut points: Vec<f64> = a
        .jumps
        .iter()
        .chain(b.jumps.iter())
        .map(|(x, _)| *x)
        .collect();
    points.sort_by(f64::total_cmp);
    points.dedup();
    let mut sup = 0.0f64;
    for x in points {
        sup = sup.max((a.eval(x) - b.eval(x)).abs());
        sup = sup.max((a.eval_left(x) - b.eval_left(x)).abs());
    }
    sup
}

/// A continuous nondecreasing reference curve for IDS comparison.
pub struct ReferenceCurve {
    pub name: String,
    eval: Box<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl std::fmt::Debug for ReferenceCurve {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ReferenceCurve({})", self.name)
    }
}

impl ReferenceCurve {
    pub fn new(name: impl Into<String>, eval: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        ReferenceCurve {
            name: name.into(),
            eval: Box::new(eval),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.eval)(x)
    }

    /// IDS of the positive Laplacian on the line:
    /// `N(lambda) = arccos(1 - lambda/2) / pi` on `[0, 4]`.
    pub fn arccos_1d() -> Self {
        ReferenceCurve::new("arccos-1d", |x| {
            if x <= 0.0 {
                0.0
            } else if x >= 4.0 {
                1.0
            } else {
                (1.0 - x / 2.0).acos() / std::f64::consts::PI
            }
        })
    }

    /// Adjacency spectral law of large random d-regular graphs, as a
    /// numerically integrated density on a fixed grid.
    pub fn kesten_mckay(d: usize) -> Self {
        let d = d as f64;
        let edge = 2.0 * (d - 1.0).sqrt();
        let density = move |x: f64| -> f64 {
            if x.abs() >= edge {
                0.0
            } else {
                d * (4.0 * (d - 1.0) - x * x).sqrt()
                    / (2.0 * std::f64::consts::PI * (d * d - x * x))
            }
        };
        // cumulative table by Simpson on a dense grid
        let steps = 8192usize;
        let h = 2.0 * edge / steps as f64;
        let mut table = Vec::with_capacity(steps + 1);
        table.push(0.0f64);
        let mut acc = 0.0;
        for i in 0..steps {
            let a = -edge + i as f64 * h;
            acc += h / 6.0 * (density(a) + 4.0 * density(a + h / 2.0) + density(a + h));
            table.push(acc);
        }
        let total = *table.last().unwrap();
        ReferenceCurve::new(format!("kesten-mckay-{d}"), move |x| {
            if x <= -edge {
                0.0
            } else if x >= edge {
                1.0
            } else {
                let t = (x + edge) / h;
                let i = (t as usize).min(steps - 1);
                let frac = t - i as f64;
                (table[i] * (1.0 - frac) + table[i + 1] * frac) / total
            }
        })
    }

    pub fn by_name(name: &str) -> Result<Self, SpectralError> {
        if name == "arccos-1d" {
            return Ok(Self::arccos_1d());
        }
        if let Some(d) = name.strip_prefix("kesten-mckay:") {
            let d: usize = d
                .parse()
                .map_err(|_| SpectralError::UnknownReference(name.into()))?;
            if d >= 3 {
                return Ok(Self::kesten_mckay(d));
            }
        }
        Err(SpectralError::UnknownReference(name.into()))
    }
}

/// Exact sup distance between a step CDF and a continuous nondecreasing
/// curve: attained at a jump point from one side or the other.
pub fn sup_distance_to_curve(a: &SpectralCdf, curve: &ReferenceCurve) -> f64 {
    let mut sup = 0.0f64;
    for &(x, _) in &a.jumps {
        sup = sup.max((a.eval(x) - curve.eval(x)).abs());
        sup = sup.max((a.eval_left(x) - curve.eval(x)).abs());
    }
    sup
}

// ---------------------------------------------------------------------------
// eigenvalue counting

/// Configuration for the spectral solvers.
#[derive(Debug, Clone, Copy)]
pub struct SpectralConfig {
    /// Largest dimension sent to the dense eigensolver.
    pub dense_limit: usize,
    /// Largest (reordered) bandwidth accepted by the banded factorization.
    pub bandwidth_limit: usize,
    /// Absolute eigenvalue resolution of the bisection solver.
    pub bisect_tol: f64,
    /// Gap under which dense eigenvalues merge into one jump.
    pub cluster_tol: f64,
}

impl Default for SpectralConfig {
    fn default() -> Self {
        SpectralConfig {
            dense_limit: 4000,
            bandwidth_limit: 64,
            bisect_tol: 1e-10,
            cluster_tol: 1e-9,
        }
    }
}

/// Reverse Cuthill-McKee ordering of the nonzero pattern.
fn rcm_order(m: &SymMatrix) -> Vec<usize> {
    let n = m.dim();
    let degree = |v: usize| m.rows[v].len();
    let mut order: Vec<usize> = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    let mut starts: Vec<usize> = (0..n).collect();
    starts.sort_by_key(|&v| (degree(v), v));
    for &start in &starts {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut queue = std::collections::VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut nbrs: Vec<usize> = m.rows[v]
                .iter()
                .map(|(j, _)| *j)
                .filter(|&j| !seen[j] && j != v)
                .collect();
            nbrs.sort_by_key(|&j| (degree(j), j));
            for j in nbrs {
                seen[j] = true;
                queue.push_back(j);
            }
        }
    }
    order.reverse();
    order
}

/// Banded symmetric matrix (lower storage) supporting shifted inertia
/// counts via unpivoted LDL^T. Breakdown at a shift equal to an eigenvalue
/// is resolved by perturbing the shift.
pub struct InertiaCounter {
    n: usize,
    bandwidth: usize,
    /// `band[i][k]` = entry (i, i - bandwidth + k); diagonal at k = bandwidth.
    band: Vec<Vec<f64>>,
    scale: f64,
}

impl InertiaCounter {
    /// Builds the counter, reordering by reverse Cuthill-McKee first.
    pub fn new(m: &SymMatrix, cfg: &SpectralConfig) -> Result<Self, SpectralError> {
        let n = m.dim();
        let order = rcm_order(m);
        let mut pos = vec![0usize; n];
        for (i, &v) in order.iter().enumerate() {
            pos[v] = i;
        }
        let mut bandwidth = 0usize;
        for (i, row) in m.rows.iter().enumerate() {
            for &(j, _) in row {
                bandwidth = bandwidth.max(pos[i].abs_diff(pos[j]));
            }
        }
        if bandwidth > cfg.bandwidth_limit {
            return Err(SpectralError::BandwidthTooLarge(
                bandwidth,
                cfg.bandwidth_limit,
            ));
        }
        let mut band = vec![vec![0.0; bandwidth + 1]; n];
        for (i, row) in m.rows.iter().enumerate() {
            for &(j, v) in row {
                let (pi, pj) = (pos[i], pos[j]);
                if pj <= pi {
                    band[pi][bandwidth - (pi - pj)] = v;
                }
            }
        }
        Ok(InertiaCounter {
            n,
            bandwidth,
            band,
            scale: m.row_sum_bound().max(1.0),
        })
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    /// Number of eigenvalues `<= lambda`, counted as the negative inertia
    /// of `A - (lambda + eps) I` for a small positive eps.
    pub fn count_leq(&self, lambda: f64) -> Result<usize, SpectralError> {
        let base_shift = 1e-12 * self.scale;
        for attempt in 0..6 {
            let shift = lambda + base_shift + self.scale * 1e-9 * attempt as f64;
            if let Some(count) = self.try_count_lt(shift) {
                return Ok(count);
            }
        }
        Err(SpectralError::FactorizationBreakdown(6))
    }

    /// Negative pivots of the LDL^T factorization of `A - shift I`, or
    /// `None` on a (near-)zero pivot.
    fn try_count_lt(&self, shift: f64) -> Option<usize> {
        let w = self.bandwidth;
        let n = self.n;
        // rolling window of the last w rows of L and the diagonal D
        let mut d = vec![0.0f64; n];
        let mut l = vec![vec![0.0f64; w + 1]; n]; // l[i][k]: L(i, i-w+k)
        let mut negatives = 0usize;
        let tiny = 1e-300;
        for i in 0..n {
            // d_i = a_ii - shift - sum_k L(i,k)^2 d_k
            let mut dii = self.band[i][w] - shift;
            let lo = i.saturating_sub(w);
            for k in lo..i {
                let lik = l[i][w - (i - k)];
                dii -= lik * lik * d[k];
            }
            if dii.abs() < tiny {
                return None;
            }
            if dii < 0.0 {
                negatives += 1;
            }
            d[i] = dii;
            // fill column i of L for rows i+1 ..= i+w
            for row in (i + 1)..=(i + w).min(n - 1) {
                let mut v = if row - i <= w {
                    self.band[row][w - (row - i)]
                } else {
                    0.0
                };
                let lo2 = row.saturating_sub(w);
                for k in lo2..i {
                    let lrk = l[row][w - (row - k)];
                    let lik = l[i][w - (i - k)];
                    v -= lrk * lik * d[k];
                }
                l[row][w - (row - i)] = v / dii;
            }
        }
        Some(negatives)
    }

    /// All eigenvalues with multiplicities by bisection on inertia counts.
    pub fn full_spectrum(&self, cfg: &SpectralConfig) -> Result<Vec<(f64, u64)>, SpectralError> {
        let b = self.scale + 1.0;
        let total = self.count_leq(b)?;
        let below = self.count_leq(-b)?;
        debug_assert_eq!(below, 0);
        let tol = cfg.bisect_tol * self.scale.max(1.0);
        let mut out: Vec<(f64, u64)> = Vec::new();
        let mut stack = vec![(-b, b, 0usize, total)];
        while let Some((lo, hi, clo, chi)) = stack.pop() {
            if chi == clo {
                continue;
            }
            if hi - lo <= tol {
                out.push(((lo + hi) / 2.0, (chi - clo) as u64));
                continue;
            }
            let mid = 0.5 * (lo + hi);
            // breakdown perturbations can nudge the effective shift past a
            // bracket endpoint; clamping keeps the counts consistent
            let cmid = self.count_leq(mid)?.clamp(clo, chi);
            stack.push((lo, mid, clo, cmid));
            stack.push((mid, hi, cmid, chi));
        }
        out.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(out)
    }
}

/// Dense symmetric eigensolve, sorted ascending.
pub fn dense_eigenvalues(m: &SymMatrix) -> Vec<f64> {
    let dense = m.to_dense();
    let mut ev: Vec<f64> = dense
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Full spectral CDF of a symmetric matrix.
///
/// Banded (after reordering) matrices go through bisection on inertia
/// counts; everything else up to the dense limit through a dense solve.
/// Eigenvalues are validated against the row-sum spectral bound.
pub fn spectral_cdf(m: &SymMatrix, cfg: &SpectralConfig) -> Result<SpectralCdf, SpectralError> {
    let n = m.dim();
    if n == 0 {
        return Ok(SpectralCdf {
            jumps: Vec::new(),
            n: 0,
        });
    }
    let bound = m.row_sum_bound();
    if bound == 0.0 {
        // zero matrix: all mass at zero
        return Ok(SpectralCdf {
            jumps: vec![(0.0, n as u64)],
            n: n as u64,
        });
    }
    // bisection costs O(n w^2) per count over O(n log) counts, so it only
    // beats the dense O(n^3) solve at small bandwidth; above the dense
    // limit it is the only option
    let counter = InertiaCounter::new(m, cfg).ok();
    let use_bisection = counter
        .as_ref()
        .is_some_and(|c| c.bandwidth() <= 8 || n > cfg.dense_limit);
    let cdf = if use_bisection {
        let jumps = counter
            .expect("bisection requires a counter")
            .full_spectrum(cfg)?;
        SpectralCdf { jumps, n: n as u64 }
    } else {
        if n > cfg.dense_limit {
            return Err(SpectralError::TooLarge(n, cfg.dense_limit));
        }
        SpectralCdf::from_eigenvalues(dense_eigenvalues(m), cfg.cluster_tol)
    };
    debug_assert_eq!(cdf.total_mass(), Ratio::new(1, 1));
    for &(x, _) in &cdf.jumps {
        debug_assert!(
            x.abs() <= bound + 1e-6 * bound.max(1.0),
            "eigenvalue {x} outside row-sum bound {bound}"
        );
    }
    Ok(cdf)
}

// ---------------------------------------------------------------------------
// trace and functional wrappers

/// Class-side trace: sum over the radius-R sweep classes of
/// `p(G, alpha) * h_alpha(root)`. Requires stats computed to radius >= R
/// with sweep data present.
pub fn trace_functional(stats: &StatVector, kernel: &Kernel) -> Result<f64, SpectralError> {
    let r = kernel.range();
    if stats.r_max() < r {
        return Err(SpectralError::StatsRadius(stats.r_max(), r));
    }
    let sweep = stats.sweep(r).ok_or(SpectralError::MissingSweepData)?;
    let n = stats.vertex_count() as f64;
    let mut total = 0.0;
    for (key, &count) in sweep {
        let values = kernel.class_values(key)?;
        total += (count as f64 / n) * values[0];
    }
    Ok(total)
}

/// Matrix-side trace: the empirical diagonal average `(1/n) sum h(x, x)`.
pub fn diagonal_average(g: &Graph, kernel: &Kernel) -> Result<f64, SpectralError> {
    let m = assemble(g, kernel)?;
    Ok(m.trace() / g.vertex_count().max(1) as f64)
}

/// The unnormalized eigenvalue-counting functional `G -> n_H(.)` in the
/// step-function realization, for use with the almost-additivity harness.
pub fn eig_counting_functional(kernel: Kernel, cfg: SpectralConfig) -> GraphFunctional {
    let name = format!("eig-count:{}", kernel.name());
    GraphFunctional::new(name, FunctionalKind::AlmostAdditive, move |g| {
        if g.is_empty() {
            return Ok(Value::Step(StepFn::zero()));
        }
        let m = assemble(g, &kernel).map_err(|e| FunctionalError::Evaluation {
            n: g.vertex_count(),
            msg: e.to_string(),
        })?;
        let cdf = spectral_cdf(&m, &cfg).map_err(|e| FunctionalError::Evaluation {
            n: g.vertex_count(),
            msg: e.to_string(),
        })?;
        let jumps: Vec<(f64, f64)> = cdf.jumps().iter().map(|&(x, c)| (x, c as f64)).collect();
        Ok(Value::Step(StepFn::from_jumps(&jumps)))
    })
    .with_bound_const(1.0)
}

// ---------------------------------------------------------------------------
// the IDS experiment

#[derive(Debug, Serialize)]
pub struct IdsMember {
    pub vertex_count: usize,
    pub distinct_eigenvalues: usize,
    pub sup_to_reference: Option<f64>,
    /// Whether the kernel vanishes on every class this member realizes.
    pub null_on_member: bool,
}

#[derive(Debug, Serialize)]
pub struct IdsReport {
    pub kernel: String,
    pub members: Vec<IdsMember>,
    /// Pairwise sup-distance Cauchy profile over sampled pairs.
    pub pairwise_profile: Vec<f64>,
    /// Null-sequence flag relative to the tail member's statistics.
    pub null_sequence: bool,
    #[serde(skip)]
    pub cdfs: Vec<SpectralCdf>,
}

/// Runs the uniform-approximation experiment: per-member spectral CDFs,
/// the pairwise sup-distance profile, optional distances to a reference
/// curve, and the null-sequence diagnostic.
pub fn ids_experiment(
    seq: &[Graph],
    kernel: &Kernel,
    reference: Option<&ReferenceCurve>,
    cfg: &SpectralConfig,
) -> Result<IdsReport, SpectralError> {
    if seq.is_empty() {
        return Err(SpectralError::SequenceTooShort(1));
    }
    let cdfs: Vec<SpectralCdf> = seq
        .par_iter()
        .map(|g| spectral_cdf(&assemble(g, kernel)?, cfg))
        .collect::<Result<_, _>>()?;

    let null_flag = |g: &Graph| -> Result<bool, SpectralError> {
        let census = stats::class_census(g, kernel.range())?;
        let sweep = census
            .sweep(kernel.range())
            .ok_or(SpectralError::MissingSweepData)?;
        for key in sweep.keys() {
            let values = kernel.class_values(key)?;
            if values.iter().any(|v| v.abs() > 0.0) {
                return Ok(false);
            }
        }
        Ok(true)
    };

    let mut members = Vec::with_capacity(seq.len());
    for (g, cdf) in seq.iter().zip(&cdfs) {
        members.push(IdsMember {
            vertex_count: g.vertex_count(),
            distinct_eigenvalues: cdf.jumps().len(),
            sup_to_reference: reference.map(|r| sup_distance_to_curve(cdf, r)),
            null_on_member: null_flag(g)?,
        });
    }
    let pairs = stats::sample_pairs(seq.len());
    let dists: Vec<(usize, usize, f64)> = pairs
        .into_iter()
        .map(|(i, j)| (i, j, sup_distance(&cdfs[i], &cdfs[j])))
        .collect();
    let pairwise_profile: Vec<f64> = (0..seq.len().saturating_sub(1))
        .map(|m| {
            dists
                .iter()
                .filter(|(i, j, _)| *i >= m && *j >= m)
                .map(|(_, _, v)| *v)
                .fold(0.0, f64::max)
        })
        .collect();
    // null relative to tail statistics = null on the last member's classes
    let null_sequence = members.last().map(|m| m.null_on_member).unwrap_or(false);
    Ok(IdsReport {
        kernel: kernel.name(),
        members,
        pairwise_profile,
        null_sequence,
        cdfs,
    })
}
