use std::fmt;
use std::fs::File;
use std::io::BufReader;
use std::time::Instant;

use rand::Rng;

use super::config::{ExperimentConfig, ExperimentKind, PSpec, Resolved};
use crate::audit::{audit, find_path_witness};
use crate::complex::{binomial, face_process, sample_complex, Complex};
use crate::criteria::{
    cohomology_hitting, garland_check, graph_connectivity_hitting, link_spectra, t_hitting,
    uniform_grid, verify_m2_exact,
};
use crate::error::Result;
use crate::graph::{components, erdos_renyi, induced_subgraph, Graph, GraphParams};
use crate::homology::betti_stripped_identity_with;
use crate::rng::{derive_seed, substream};
use crate::spectral::gap;
use crate::tail::soundness_grid;

/// Slack allowed between a measured gap and its certified bound.
pub const CERTIFICATE_SLACK: f64 = 1e-7;

/// Stripped Betti numbers are only computed when the cone-restricted
/// boundary has at most this many rows; the dense `F_p` basis costs
/// `rows²` words.
pub const BETTI_MAX_ROWS: usize = 2500;

/// One CSV cell.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Int(u64),
    Float(f64),
    Bool(bool),
    Missing,
}

impl Value {
    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            Value::Int(v) => Some(v as f64),
            Value::Float(v) => Some(v),
            Value::Bool(b) => Some(if b { 1.0 } else { 0.0 }),
            Value::Missing => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match *self {
            Value::Bool(b) => Some(b),
            _ => None,
        }
    }

    pub fn as_u64(&self) -> Option<u64> {
        match *self {
            Value::Int(v) => Some(v),
            _ => None,
        }
    }

    /// Equal up to `tol` on floats, exactly otherwise.
    pub fn approx_eq(&self, other: &Value, tol: f64) -> bool {
        match (self, other) {
            (Value::Float(a), Value::Float(b)) => a == b || (a - b).abs() <= tol,
            _ => self == other,
        }
    }
}

fn opt<T: Into<Value>>(v: Option<T>) -> Value {
    v.map_or(Value::Missing, Into::into)
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Float(v)
    }
}

impl From<usize> for Value {
    fn from(v: usize) -> Self {
        Value::Int(v as u64)
    }
}

impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Value::Bool(v)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(v) => write!(f, "{v}"),
            // Display prints the shortest string that parses back exactly.
            Value::Float(v) => write!(f, "{v}"),
            Value::Bool(v) => write!(f, "{v}"),
            Value::Missing => Ok(()),
        }
    }
}

/// One row of `records.csv`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub params: Resolved,
    /// Measured quantities in the order of [`columns`].
    pub values: Vec<Value>,
    pub wall_time_s: f64,
}

impl TrialRecord {
    pub fn get(&self, kind: ExperimentKind, column: &str) -> Option<&Value> {
        columns(kind)
            .iter()
            .position(|&c| c == column)
            .map(|i| &self.values[i])
    }

    /// Every cell, in header order.
    pub fn cells(&self) -> Vec<String> {
        let mut out = vec![
            self.trial.to_string(),
            self.seed.to_string(),
            self.params.n.to_string(),
            self.params.d.to_string(),
            self.params.p.to_string(),
            self.params.degree.to_string(),
        ];
        out.extend(self.values.iter().map(|v| v.to_string()));
        out.push(self.wall_time_s.to_string());
        out
    }

    /// Replay equality: everything but wall time, floats within `tol`.
    pub fn replays(&self, other: &TrialRecord, tol: f64) -> bool {
        self.trial == other.trial
            && self.seed == other.seed
            && self.params == other.params
            && self.values.len() == other.values.len()
            && self
                .values
                .iter()
                .zip(&other.values)
                .all(|(a, b)| a.approx_eq(b, tol))
    }
}

/// Columns shared by every kind, before the measured ones.
pub const COMMON_COLUMNS: [&str; 6] = ["trial", "seed", "n", "d", "p", "degree"];

/// Measured columns of each kind. The full header is
/// [`COMMON_COLUMNS`], these, then `wall_time_s`.
pub fn columns(kind: ExperimentKind) -> &'static [&'static str] {
    match kind {
        ExperimentKind::GraphGap => &[
            "giant_size",
            "isolated",
            "components",
            "gap",
            "lambda2",
            "lambda_max",
            "gap_sqrt_d",
        ],
        ExperimentKind::BelowThreshold => &[
            "giant_size",
            "gap",
            "lambda2",
            "lambda_max",
            "witness_m",
            "witness_found",
        ],
        ExperimentKind::ConnectivityGap => &["tau_c", "gap", "gap_sqrt_log_n"],
        ExperimentKind::LinkAudit => &[
            "faces",
            "isolated",
            "pure",
            "nonempty_links",
            "min_link_lambda2",
            "max_link_gap",
            "max_link_gap_sqrt_d",
            "garland_certified",
            "stripped_betti",
        ],
        ExperimentKind::PoissonBetti => &[
            "faces",
            "isolated",
            "betti",
            "stripped_betti",
            "defect",
            "betti_equals_isolated",
            "garland_certified",
        ],
        ExperimentKind::CohomologyHit => &["M1", "M2", "m1_equals_m2", "M2_exact_verified"],
        ExperimentKind::THit => &["total_faces", "M1", "M2T"],
        ExperimentKind::Certify => &[
            "M",
            "C1",
            "C2",
            "C3",
            "fuzz_size",
            "fuzz_independent",
            "fuzz_small",
            "fuzz_neighbor_ok",
            "certified_bound",
            "measured_gap",
            "certificate_holds",
        ],
        ExperimentKind::TailCheck => &["points", "violations", "passed"],
    }
}

pub fn header(kind: ExperimentKind) -> Vec<&'static str> {
    let mut h = COMMON_COLUMNS.to_vec();
    h.extend_from_slice(columns(kind));
    h.push("wall_time_s");
    h
}

/// Stream offset used to pick the trial that gets exact verification.
const VERIFY_STREAM: u64 = 0xE8AC;

/// The trial of a `cohomology-hit` batch whose `M2` is re-checked over `ℚ`.
pub fn verification_trial(config: &ExperimentConfig) -> usize {
    let seed = derive_seed(config.master_seed, u64::MAX);
    substream(seed, VERIFY_STREAM).gen_range(0..config.trials)
}

/// Runs trial `trial` of `config`; everything is determined by
/// `(config, trial)`.
pub fn run_trial(config: &ExperimentConfig, trial: usize) -> Result<TrialRecord> {
    let seed = derive_seed(config.master_seed, trial as u64);
    let start = Instant::now();
    let (params, values) = match config.kind {
        ExperimentKind::Certify => experiment_certify(config, seed)?,
        ExperimentKind::TailCheck => (
            Resolved {
                n: 0,
                d: 0,
                p: 0.0,
                degree: 0.0,
            },
            experiment_tail_check(),
        ),
        kind => {
            let r = config.resolve()?;
            let values = match kind {
                ExperimentKind::GraphGap => experiment_graph_gap(&r, seed)?,
                ExperimentKind::BelowThreshold => experiment_below_threshold(&r, seed)?,
                ExperimentKind::ConnectivityGap => experiment_connectivity_gap(&r, seed)?,
                ExperimentKind::LinkAudit => experiment_link_audit(&r, seed)?,
                ExperimentKind::PoissonBetti => experiment_poisson_betti(&r, seed)?,
                ExperimentKind::CohomologyHit => {
                    experiment_cohomology_hit(&r, seed, trial == verification_trial(config))?
                }
                ExperimentKind::THit => experiment_t_hit(&r, seed, config.grid_points)?,
                ExperimentKind::Certify | ExperimentKind::TailCheck => unreachable!(),
            };
            (r, values)
        }
    };
    debug_assert_eq!(values.len(), columns(config.kind).len());
    Ok(TrialRecord {
        trial,
        seed,
        params,
        values,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

/// `G(n, p)` and the gap of its giant component.
pub fn experiment_graph_gap(r: &Resolved, seed: u64) -> Result<Vec<Value>> {
    let g = erdos_renyi(GraphParams::new(r.n, r.p, seed))?;
    let comps = components(&g);
    let giant = comps.giant_members();
    let h = induced_subgraph(&g, &giant)?;
    let gr = if h.n() >= 2 { Some(gap(&h)?) } else { None };
    Ok(vec![
        giant.len().into(),
        g.isolated_count().into(),
        comps.count().into(),
        opt(gr.map(|x| x.lambda_abs)),
        opt(gr.map(|x| x.lambda2)),
        opt(gr.map(|x| x.lambda_max)),
        opt(gr.map(|x| x.lambda_abs * r.degree.sqrt())),
    ])
}

/// Below the threshold: gap of the giant and a path witness inside it with
/// endpoint degree floor `m = ⌊np/2⌋` (at least 1).
pub fn experiment_below_threshold(r: &Resolved, seed: u64) -> Result<Vec<Value>> {
    let g = erdos_renyi(GraphParams::new(r.n, r.p, seed))?;
    let giant = components(&g).giant_members();
    let h = induced_subgraph(&g, &giant)?;
    let m = witness_floor(r);
    let (gr, found) = if h.n() >= 2 {
        (Some(gap(&h)?), find_path_witness(&h, m)?.is_some())
    } else {
        (None, false)
    };
    Ok(vec![
        giant.len().into(),
        opt(gr.map(|x| x.lambda_abs)),
        opt(gr.map(|x| x.lambda2)),
        opt(gr.map(|x| x.lambda_max)),
        m.into(),
        found.into(),
    ])
}

/// `⌊np/2⌋`, raised to 1.
pub fn witness_floor(r: &Resolved) -> usize {
    ((r.n as f64 * r.p / 2.0).floor() as usize).max(1)
}

/// The graph process stopped when it connects.
pub fn experiment_connectivity_gap(r: &Resolved, seed: u64) -> Result<Vec<Value>> {
    let proc = face_process(r.n, 1, seed)?;
    let h = graph_connectivity_hitting(&proc)?;
    let ln = (r.n as f64).ln().sqrt();
    Ok(vec![
        opt(h.tau_c),
        opt(h.gap_at_tau_c),
        opt(h.gap_at_tau_c.map(|g| g * ln)),
    ])
}

fn stripped_betti_if_small(
    y: &Complex,
    seed: u64,
) -> Result<Option<crate::homology::StrippedBetti>> {
    if binomial(y.n() - 1, y.d()) as usize > BETTI_MAX_ROWS {
        return Ok(None);
    }
    Ok(Some(betti_stripped_identity_with(y, seed)?))
}

/// Link spectra of `Y_d(n, p)`. The stripped Betti number is computed only
/// for Garland-certified complexes within [`BETTI_MAX_ROWS`].
pub fn experiment_link_audit(r: &Resolved, seed: u64) -> Result<Vec<Value>> {
    let y = sample_complex(r.n, r.d, r.p, seed)?;
    let spectra = link_spectra(&y)?;
    let garland = garland_check(&y)?;
    let nonempty: Vec<_> = spectra.iter().filter(|s| !s.is_empty()).collect();
    let max_gap = nonempty.iter().map(|s| s.lambda_abs).reduce(f64::max);
    let stats = crate::complex::isolated_faces(&y);
    let betti = if garland.certified {
        stripped_betti_if_small(&y, seed)?.map(|b| b.stripped)
    } else {
        None
    };
    Ok(vec![
        y.face_count().into(),
        stats.isolated_count.into(),
        garland.pure.into(),
        nonempty.len().into(),
        opt(garland.min_link_lambda2),
        opt(max_gap),
        opt(max_gap.map(|g| g * r.degree.sqrt())),
        garland.certified.into(),
        opt(betti),
    ])
}

/// Isolated-face count against `b_{d−1}` at `p = (d ln n + c)/n`.
pub fn experiment_poisson_betti(r: &Resolved, seed: u64) -> Result<Vec<Value>> {
    let y = sample_complex(r.n, r.d, r.p, seed)?;
    let b = betti_stripped_identity_with(&y, seed)?;
    let garland = garland_check(&y)?;
    Ok(vec![
        y.face_count().into(),
        b.isolated.into(),
        b.full.into(),
        b.stripped.into(),
        b.defect.into(),
        (b.full == b.isolated).into(),
        garland.certified.into(),
    ])
}

/// `M1` and `M2` along one face process; `verify` re-checks `M2` over `ℚ`.
pub fn experiment_cohomology_hit(r: &Resolved, seed: u64, verify: bool) -> Result<Vec<Value>> {
    let proc = face_process(r.n, r.d, seed)?;
    let h = cohomology_hitting(&proc)?;
    let verified = match (verify, h.m2) {
        (true, Some(m2)) => Some(verify_m2_exact(&proc, m2)?),
        _ => None,
    };
    Ok(vec![
        opt(h.m1),
        opt(h.m2),
        (h.m1.is_some() && h.m1 == h.m2).into(),
        opt(verified),
    ])
}

/// `M1` and the (T) hitting time on an evenly spaced grid.
pub fn experiment_t_hit(r: &Resolved, seed: u64, grid_points: usize) -> Result<Vec<Value>> {
    let proc = face_process(r.n, 2, seed)?;
    let grid = dedup_grid(uniform_grid(proc.total(), grid_points));
    let h = t_hitting(&proc, &grid)?;
    Ok(vec![(proc.total() as usize).into(), opt(h.m1), opt(h.m2t)])
}

fn dedup_grid(mut grid: Vec<usize>) -> Vec<usize> {
    grid.retain(|&m| m > 0);
    grid.dedup();
    grid
}

/// Audits one graph: the imported edge list, or a fresh `G(n, p)`.
pub fn experiment_certify(config: &ExperimentConfig, seed: u64) -> Result<(Resolved, Vec<Value>)> {
    let (g, r) = match &config.import {
        Some(path) => {
            let g = Graph::read_edge_list(BufReader::new(File::open(path)?))?;
            let n = g.n();
            let degree = match config.p {
                PSpec::Literal { p } => crate::graph::expected_degree(n, p),
                _ => 2.0 * g.edge_count() as f64 / n.max(1) as f64,
            };
            let p = if n >= 2 { degree / (n - 1) as f64 } else { 0.0 };
            (g, Resolved { n, d: 1, p, degree })
        }
        None => {
            let r = config.resolve()?;
            (erdos_renyi(GraphParams::new(r.n, r.p, seed))?, r)
        }
    };
    let rep = audit(&g, r.degree, config.m)?;
    Ok((
        r,
        vec![
            rep.m.into(),
            rep.c1.into(),
            rep.c2.into(),
            rep.c3.into(),
            rep.fuzz_size.into(),
            rep.fuzz_independent.into(),
            rep.fuzz_small.into(),
            rep.fuzz_neighbor_ok.into(),
            opt(rep.certified_bound),
            opt(rep.measured_gap),
            opt(rep.certificate_holds(CERTIFICATE_SLACK)),
        ],
    ))
}

pub fn experiment_tail_check() -> Vec<Value> {
    let check = soundness_grid();
    vec![
        check.points.into(),
        check.violations.len().into(),
        check.passed().into(),
    ]
}

/// Whether a `certify` or `tail-check` record passes its check. A graph
/// without a certificate has nothing to violate.
pub fn record_passes(kind: ExperimentKind, record: &TrialRecord) -> bool {
    match kind {
        ExperimentKind::Certify => record
            .get(kind, "certificate_holds")
            .and_then(Value::as_bool)
            .unwrap_or(true),
        ExperimentKind::TailCheck => {
            record.get(kind, "passed").and_then(Value::as_bool) == Some(true)
        }
        _ => true,
    }
}
