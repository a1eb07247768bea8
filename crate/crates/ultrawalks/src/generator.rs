//! Rate matrices on `G_l`: the discretized convolution operator
//! `J * phi - phi` for a kernel profile, and the graph-walk variant built
//! from an adjacency matrix.
//!
//! Kernel case: off-diagonal entries are `p^-l J(|I-K|_p)` and therefore
//! constant on every valuation class; the diagonal carries the negative
//! row sum `tail_mass - 1`, which makes every row conserve probability.

use crate::error::{Error, Result};
use crate::kernel::KernelProfile;
use crate::padic::{GroupSpec, PadicValuation};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

/// How a generator was built; decides which structural checks apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratorSource {
    Kernel,
    Adjacency,
}

/// Symmetric `p^l x p^l` rate matrix with zero row sums and nonnegative
/// off-diagonal entries, rows/columns in ascending state order.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorMatrix {
    spec: GroupSpec,
    entries: DMatrix<f64>,
    source: GeneratorSource,
    /// Kernel case only: the off-diagonal rate per valuation class,
    /// `rate[m] = p^-l J(p^-m)`, plus the shared diagonal value.
    class_rates: Option<(Vec<f64>, f64)>,
}

impl GeneratorMatrix {
    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn source(&self) -> GeneratorSource {
        self.source
    }

    pub fn size(&self) -> usize {
        self.spec.size()
    }

    /// Off-diagonal rate per valuation class (kernel generators only).
    pub fn class_rates(&self) -> Option<&(Vec<f64>, f64)> {
        self.class_rates.as_ref()
    }
}

/// Builds the rate matrix of a kernel profile.
///
/// The diagonal is the exact negative of the shared off-diagonal row sum,
/// accumulated once in fixed valuation order, so it is bit-identical across
/// rows; it also agrees with `tail_mass - 1` to roundoff because the
/// profile carries unit mass.
pub fn build_generator(profile: &KernelProfile) -> GeneratorMatrix {
    let spec = *profile.spec();
    let n = spec.size();
    let p = spec.prime() as f64;
    let scale = p.powi(-(spec.level() as i32));

    let rates: Vec<f64> = (0..spec.level())
        .map(|m| scale * profile.level_value(m))
        .collect();
    let mut diagonal = 0.0;
    for m in 0..spec.level() {
        diagonal -= spec.sphere_count(m) as f64 * rates[m as usize];
    }

    let mut entries = DMatrix::zeros(n, n);
    for i in 0..n {
        for k in 0..n {
            entries[(i, k)] = match spec.valuation_of((n as u64 + i as u64 - k as u64) % n as u64)
            {
                PadicValuation::Finite(m) => rates[m as usize],
                PadicValuation::ZeroClass => diagonal,
            };
        }
    }

    GeneratorMatrix {
        spec,
        entries,
        source: GeneratorSource::Kernel,
        class_rates: Some((rates, diagonal)),
    }
}

/// A simple undirected graph on a vertex subset of `G_l`.
#[derive(Debug, Clone)]
pub struct AdjacencySpec {
    spec: GroupSpec,
    vertices: Vec<u64>,
    edges: Vec<(u64, u64)>,
}

impl AdjacencySpec {
    /// Validates vertices against the group and edges against the vertex
    /// set; loops and duplicate edges are rejected.
    pub fn new(spec: &GroupSpec, vertices: Vec<u64>, edges: Vec<(u64, u64)>) -> Result<Self> {
        let size = spec.size() as u64;
        let mut seen = std::collections::BTreeSet::new();
        for &v in &vertices {
            if v >= size {
                return Err(Error::InvalidAdjacency(format!(
                    "vertex {v} outside group of size {size}"
                )));
            }
            if !seen.insert(v) {
                return Err(Error::InvalidAdjacency(format!("duplicate vertex {v}")));
            }
        }
        let mut edge_set = std::collections::BTreeSet::new();
        for &(a, b) in &edges {
            if a == b {
                return Err(Error::InvalidAdjacency(format!("loop at vertex {a}")));
            }
            if !seen.contains(&a) || !seen.contains(&b) {
                return Err(Error::InvalidAdjacency(format!(
                    "edge ({a}, {b}) touches a vertex outside the vertex set"
                )));
            }
            if !edge_set.insert((a.min(b), a.max(b))) {
                return Err(Error::InvalidAdjacency(format!("duplicate edge ({a}, {b})")));
            }
        }
        Ok(Self {
            spec: *spec,
            vertices,
            edges,
        })
    }

    /// Accepts a dense 0/1 matrix over the full group, checking symmetry,
    /// zero diagonal, and support inside the vertex set.
    pub fn from_dense(spec: &GroupSpec, vertices: Vec<u64>, a: &DMatrix<f64>) -> Result<Self> {
        let n = spec.size();
        if a.nrows() != n || a.ncols() != n {
            return Err(Error::InvalidAdjacency(format!(
                "matrix is {}x{}, expected {n}x{n}",
                a.nrows(),
                a.ncols()
            )));
        }
        let inside: std::collections::BTreeSet<u64> = vertices.iter().copied().collect();
        let mut edges = Vec::new();
        for i in 0..n {
            if a[(i, i)] != 0.0 {
                return Err(Error::InvalidAdjacency(format!(
                    "nonzero diagonal at vertex {i}"
                )));
            }
            for k in (i + 1)..n {
                let v = a[(i, k)];
                if v != a[(k, i)] {
                    return Err(Error::InvalidAdjacency(format!(
                        "asymmetric entries at ({i}, {k})"
                    )));
                }
                if v == 0.0 {
                    continue;
                }
                if v != 1.0 {
                    return Err(Error::InvalidAdjacency(format!(
                        "entry {v} at ({i}, {k}) is not 0/1"
                    )));
                }
                if !inside.contains(&(i as u64)) || !inside.contains(&(k as u64)) {
                    return Err(Error::InvalidAdjacency(format!(
                        "edge ({i}, {k}) outside the vertex set"
                    )));
                }
                edges.push((i as u64, k as u64));
            }
        }
        Self::new(spec, vertices, edges)
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn vertices(&self) -> &[u64] {
        &self.vertices
    }

    pub fn edges(&self) -> &[(u64, u64)] {
        &self.edges
    }
}

/// Rate matrix of the graph walk: `p^-l A` off the diagonal, minus
/// `p^-l deg(K)` on it. Vertices outside the graph get zero rows.
pub fn build_adjacency_generator(adj: &AdjacencySpec) -> GeneratorMatrix {
    let spec = *adj.spec();
    let n = spec.size();
    let scale = (spec.prime() as f64).powi(-(spec.level() as i32));
    let mut entries = DMatrix::zeros(n, n);
    let mut degree = vec![0u64; n];
    for &(a, b) in adj.edges() {
        entries[(a as usize, b as usize)] = scale;
        entries[(b as usize, a as usize)] = scale;
        degree[a as usize] += 1;
        degree[b as usize] += 1;
    }
    for i in 0..n {
        entries[(i, i)] = -scale * degree[i] as f64;
    }
    GeneratorMatrix {
        spec,
        entries,
        source: GeneratorSource::Adjacency,
        class_rates: None,
    }
}

/// Outcome of the ultrametric-structure check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum UltrametricCheck {
    /// Adjacency generators carry no valuation structure.
    NotApplicable,
    Pass,
    /// Pairs whose entry disagrees with their valuation class.
    Violations(Vec<(u64, u64)>),
}

/// Structural audit of a generator.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ValidationReport {
    pub max_row_sum_deviation: f64,
    pub max_asymmetry: f64,
    pub min_off_diagonal: f64,
    /// Kernel case: |diagonal - (tail_mass - 1)| for the profile the caller
    /// supplies; filled by [`validate_generator_against`].
    pub diagonal_formula_deviation: Option<f64>,
    pub ultrametric: UltrametricCheck,
}

pub const ROW_SUM_TOL: f64 = 1e-12;

impl ValidationReport {
    pub fn pass(&self) -> bool {
        self.max_row_sum_deviation < ROW_SUM_TOL
            && self.max_asymmetry == 0.0
            && self.min_off_diagonal >= 0.0
            && !matches!(self.ultrametric, UltrametricCheck::Violations(_))
            && self.diagonal_formula_deviation.unwrap_or(0.0) < 1e-12
    }
}

/// Checks symmetry, row sums, off-diagonal signs, and (kernel case) that
/// every entry is determined by its valuation class.
pub fn validate_generator(g: &GeneratorMatrix) -> ValidationReport {
    let n = g.size();
    let m = g.entries();
    let spec = g.spec();

    let mut max_row = 0.0f64;
    let mut max_asym = 0.0f64;
    let mut min_off = f64::INFINITY;
    for i in 0..n {
        let mut row = 0.0;
        for k in 0..n {
            row += m[(i, k)];
            if i != k {
                min_off = min_off.min(m[(i, k)]);
                max_asym = max_asym.max((m[(i, k)] - m[(k, i)]).abs());
            }
        }
        max_row = max_row.max(row.abs());
    }
    if n == 1 {
        min_off = 0.0;
    }

    let ultrametric = match g.source() {
        GeneratorSource::Adjacency => UltrametricCheck::NotApplicable,
        GeneratorSource::Kernel => {
            // First row fixes the expected value per valuation class; the
            // construction makes matching entries bit-identical.
            let mut class_value = vec![None; spec.level() as usize];
            for k in 1..n {
                let v = spec.valuation_of(k as u64).exponent().unwrap() as usize;
                class_value[v].get_or_insert(m[(0, k)]);
            }
            let mut violations = Vec::new();
            for i in 0..n {
                for k in 0..n {
                    if i == k {
                        continue;
                    }
                    let v = spec
                        .valuation_of((n as u64 + i as u64 - k as u64) % n as u64)
                        .exponent()
                        .unwrap() as usize;
                    if Some(m[(i, k)]) != class_value[v] {
                        violations.push((i as u64, k as u64));
                    }
                }
            }
            if violations.is_empty() {
                UltrametricCheck::Pass
            } else {
                UltrametricCheck::Violations(violations)
            }
        }
    };

    ValidationReport {
        max_row_sum_deviation: max_row,
        max_asymmetry: max_asym,
        min_off_diagonal: min_off,
        diagonal_formula_deviation: None,
        ultrametric,
    }
}

/// [`validate_generator`] plus the diagonal cross-check against the
/// profile's `tail_mass - 1` form.
pub fn validate_generator_against(g: &GeneratorMatrix, profile: &KernelProfile) -> ValidationReport {
    let mut report = validate_generator(g);
    let diag = g.entries()[(0, 0)];
    report.diagonal_formula_deviation = Some((diag - (profile.tail_mass() - 1.0)).abs());
    report
}

/// On-disk adjacency description: `{p, l, vertices[], edges[[I, K], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AdjacencyFile {
    pub p: u32,
    pub l: u32,
    pub vertices: Vec<u64>,
    pub edges: Vec<(u64, u64)>,
}

impl AdjacencyFile {
    pub fn parse(json: &str) -> Result<Self> {
        serde_json::from_str(json).map_err(|e| Error::InvalidAdjacency(e.to_string()))
    }

    pub fn build(&self) -> Result<(GroupSpec, AdjacencySpec)> {
        let spec = GroupSpec::new(self.p, self.l)?;
        let adj = AdjacencySpec::new(&spec, self.vertices.clone(), self.edges.clone())?;
        Ok((spec, adj))
    }
}
