use std::fmt;
use std::path::PathBuf;

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::graph::{expected_degree, log_scaled_p};

/// The experiments the harness can run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    GraphGap,
    BelowThreshold,
    ConnectivityGap,
    LinkAudit,
    PoissonBetti,
    CohomologyHit,
    THit,
    Certify,
    TailCheck,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 9] = [
        ExperimentKind::GraphGap,
        ExperimentKind::BelowThreshold,
        ExperimentKind::ConnectivityGap,
        ExperimentKind::LinkAudit,
        ExperimentKind::PoissonBetti,
        ExperimentKind::CohomologyHit,
        ExperimentKind::THit,
        ExperimentKind::Certify,
        ExperimentKind::TailCheck,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::GraphGap => "graph-gap",
            ExperimentKind::BelowThreshold => "below-threshold",
            ExperimentKind::ConnectivityGap => "connectivity-gap",
            ExperimentKind::LinkAudit => "link-audit",
            ExperimentKind::PoissonBetti => "poisson-betti",
            ExperimentKind::CohomologyHit => "cohomology-hit",
            ExperimentKind::THit => "t-hit",
            ExperimentKind::Certify => "certify",
            ExperimentKind::TailCheck => "tail-check",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }

    /// Graph experiments ignore `d` (the graph process has `d = 1`).
    pub fn is_graph(self) -> bool {
        matches!(
            self,
            ExperimentKind::GraphGap
                | ExperimentKind::BelowThreshold
                | ExperimentKind::ConnectivityGap
                | ExperimentKind::Certify
        )
    }

    /// Kinds whose runs pass or fail as a whole (exit code 2 on failure).
    pub fn is_check(self) -> bool {
        matches!(self, ExperimentKind::Certify | ExperimentKind::TailCheck)
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// How the edge or face probability is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum PSpec {
    /// A literal probability.
    Literal { p: f64 },
    /// `p = coefficient · ln n / n`.
    Coefficient { coefficient: f64 },
    /// `p = (d · ln n + c) / n`, the scaling of the isolated-face limit.
    Shift { c: f64 },
    /// Reference degree taken from the imported graph's mean degree
    /// (`certify` with `--import` only).
    MeanDegree,
}

impl PSpec {
    pub fn resolve(self, n: usize, d: usize) -> Result<f64> {
        let nf = n as f64;
        let p = match self {
            PSpec::Literal { p } => p,
            PSpec::Coefficient { coefficient } => {
                if !(coefficient > 0.0 && coefficient.is_finite()) {
                    return Err(invalid(
                        "coeff",
                        format!("must be positive and finite, got {coefficient}"),
                    ));
                }
                log_scaled_p(n, coefficient)
            }
            PSpec::Shift { c } => {
                if !c.is_finite() {
                    return Err(invalid("c", "must be finite"));
                }
                ((d as f64 * nf.ln() + c) / nf).clamp(0.0, 1.0)
            }
            PSpec::MeanDegree => {
                return Err(invalid("p", "the mean-degree form needs an imported graph"));
            }
        };
        if !(0.0..=1.0).contains(&p) {
            return Err(invalid("p", format!("{p} is outside [0, 1]")));
        }
        Ok(p)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub n: usize,
    pub d: usize,
    pub p: PSpec,
    pub trials: usize,
    pub master_seed: u64,
    /// Fuzz divisor.
    #[serde(rename = "M")]
    pub m: f64,
    /// Evenly spaced process checkpoints for `t-hit`.
    pub grid_points: usize,
    pub out: PathBuf,
    /// Edge list for `certify`; the graph is sampled when absent.
    pub import: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(kind: ExperimentKind, n: usize, out: impl Into<PathBuf>) -> Self {
        ExperimentConfig {
            kind,
            n,
            d: if kind.is_graph() { 1 } else { 2 },
            p: PSpec::Coefficient { coefficient: 1.5 },
            trials: 1,
            master_seed: 0,
            m: 20.0,
            grid_points: 20,
            out: out.into(),
            import: None,
        }
    }

    /// Checks every field, naming the first bad one.
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(invalid("trials", "must be at least 1"));
        }
        if !(self.m >= 1.0 && self.m.is_finite()) {
            return Err(invalid(
                "M",
                format!("must be finite and ≥ 1, got {}", self.m),
            ));
        }
        match self.kind {
            ExperimentKind::TailCheck => return Ok(()),
            ExperimentKind::Certify if self.import.is_some() => {
                return match self.p {
                    PSpec::MeanDegree => Ok(()),
                    PSpec::Literal { p } if p > 0.0 && p <= 1.0 => Ok(()),
                    PSpec::Literal { p } => Err(invalid(
                        "p",
                        format!("must lie in (0, 1] to set the reference degree, got {p}"),
                    )),
                    _ => Err(invalid(
                        "p",
                        "an imported graph takes a literal p or the mean degree",
                    )),
                };
            }
            _ if self.import.is_some() => {
                return Err(invalid(
                    "import",
                    format!("only certify reads an edge list, not {}", self.kind),
                ));
            }
            _ => {}
        }
        if self.kind.is_graph() {
            if self.n < 2 {
                return Err(invalid("n", "graph experiments need n ≥ 2"));
            }
        } else {
            if self.d < 2 {
                return Err(invalid("d", format!("{} needs d ≥ 2", self.kind)));
            }
            if self.kind == ExperimentKind::THit && self.d != 2 {
                return Err(invalid("d", "t-hit needs d = 2"));
            }
            if self.n < self.d + 1 {
                return Err(invalid(
                    "n",
                    format!("must be at least d + 1 = {}", self.d + 1),
                ));
            }
        }
        if self.kind == ExperimentKind::THit && self.grid_points == 0 {
            return Err(invalid("grid", "must be at least 1"));
        }
        self.p.resolve(self.n, self.effective_d())?;
        Ok(())
    }

    /// Dimension actually used: 1 for graph experiments.
    pub fn effective_d(&self) -> usize {
        if self.kind.is_graph() {
            1
        } else {
            self.d
        }
    }

    pub fn resolve(&self) -> Result<Resolved> {
        let p = self.p.resolve(self.n, self.effective_d())?;
        Ok(Resolved {
            n: self.n,
            d: self.effective_d(),
            p,
            degree: expected_degree(self.n, p),
        })
    }
}

/// Numeric parameters after resolving the probability formula.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Resolved {
    pub n: usize,
    pub d: usize,
    pub p: f64,
    /// `(n − 1) p`.
    pub degree: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kind_names_round_trip() {
        for k in ExperimentKind::ALL {
            assert_eq!(ExperimentKind::parse(k.name()), Some(k));
            assert_eq!(
                serde_json::to_string(&k).unwrap(),
                format!("\"{}\"", k.name())
            );
        }
        assert_eq!(ExperimentKind::parse("nope"), None);
    }

    #[test]
    fn resolves_probability_forms() {
        let n = 40;
        let ln = (40f64).ln();
        assert_eq!(PSpec::Literal { p: 0.3 }.resolve(n, 2).unwrap(), 0.3);
        assert!(
            (PSpec::Coefficient { coefficient: 2.0 }
                .resolve(n, 2)
                .unwrap()
                - 2.0 * ln / 40.0)
                .abs()
                < 1e-15
        );
        assert!((PSpec::Shift { c: 0.0 }.resolve(n, 2).unwrap() - 2.0 * ln / 40.0).abs() < 1e-15);
        assert!(PSpec::Literal { p: 1.5 }.resolve(n, 2).is_err());
        assert!(PSpec::Coefficient { coefficient: 0.0 }
            .resolve(n, 2)
            .is_err());
    }

    #[test]
    fn validation_names_fields() {
        let mut c = ExperimentConfig::new(ExperimentKind::GraphGap, 100, "/tmp/x");
        assert!(c.validate().is_ok());
        c.trials = 0;
        assert!(c.validate().unwrap_err().to_string().contains("trials"));
        c.trials = 1;
        c.m = 0.5;
        assert!(c.validate().unwrap_err().to_string().contains("M"));
        let mut c = ExperimentConfig::new(ExperimentKind::THit, 10, "/tmp/x");
        c.d = 3;
        assert!(c.validate().unwrap_err().to_string().contains("d"));
        let mut c = ExperimentConfig::new(ExperimentKind::PoissonBetti, 2, "/tmp/x");
        assert!(c.validate().unwrap_err().to_string().contains("n"));
        c.n = 10;
        c.p = PSpec::Literal { p: -0.1 };
        assert!(c.validate().unwrap_err().to_string().contains("p"));
    }
}
