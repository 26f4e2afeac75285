//! Named per-graph checks shared by `audit` and `sweep`, with the
//! tightened re-verification protocol.

use std::fmt;
use std::str::FromStr;

use energame_core::bounds::{path_ordering, BoundId, BoundReport, GraphAnalysis, Verdict, MAX_BOUNDS_N};
use energame_core::game::{
    audit_convexity, audit_superadditivity, check_core, shapley_exact, AuditOutcome, PayoffVector, MAX_CONVEXITY_N,
    MAX_SUPERADDITIVITY_N,
};
use energame_core::graph::{self, Graph};
use energame_core::spectral::EigConfig;
use energame_core::Tolerances;
use serde::{Serialize, Serializer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Check {
    Superadditivity,
    Convexity,
    VertexCore,
    ShapleyCore,
    TreeExtremal,
    Bound(BoundId),
}

/// How a failed check is to be read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckClass {
    /// Theorem-backed: a failure is a defect.
    Guaranteed,
    /// Conjecture-backed: a surviving failure is a finding.
    Evidence,
    /// Not claimed by any result; reported for information.
    Informational,
}

impl Check {
    /// Checks `sweep` accepts, in canonical order.
    pub fn sweep_checks() -> Vec<Check> {
        let mut out = vec![Check::Superadditivity, Check::VertexCore, Check::ShapleyCore, Check::TreeExtremal];
        out.extend(BoundId::ALL.map(Check::Bound));
        out
    }

    pub fn id(self) -> &'static str {
        match self {
            Check::Superadditivity => "superadditivity",
            Check::Convexity => "convexity",
            Check::VertexCore => "vertex-core",
            Check::ShapleyCore => "shapley-core",
            Check::TreeExtremal => "tree-extremal",
            Check::Bound(b) => b.as_str(),
        }
    }

    /// The p-energy game is convex at p = 2 (it is the degree game), and
    /// only there.
    pub fn class(self, p: Option<f64>) -> CheckClass {
        match self {
            Check::ShapleyCore | Check::TreeExtremal => CheckClass::Evidence,
            Check::Convexity if p != Some(2.0) => CheckClass::Informational,
            _ => CheckClass::Guaranteed,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Check {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let fixed = [
            Check::Superadditivity,
            Check::Convexity,
            Check::VertexCore,
            Check::ShapleyCore,
            Check::TreeExtremal,
        ];
        fixed
            .into_iter()
            .find(|c| c.id() == s)
            .or_else(|| BoundId::parse(s).map(Check::Bound))
            .ok_or_else(|| format!("unknown check {s:?}"))
    }
}

impl Serialize for Check {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.id())
    }
}

pub fn parse_checks(list: &str) -> Result<Vec<Check>, String> {
    let mut out: Vec<Check> = list.split(',').map(|s| s.trim().parse()).collect::<Result<_, _>>()?;
    out.sort();
    out.dedup();
    Ok(out)
}

/// One evaluated (or skipped) instance of a check on one graph.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Outcome {
    pub check: Check,
    pub class: CheckClass,
    pub p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    pub verdict: Verdict,
    /// Signed so that the check holds iff `slack >= -tol.core`; absent when
    /// skipped.
    pub slack: Option<f64>,
    pub witness: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strict: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reverification: Option<Reverification>,
}

/// The same check recomputed with tightened eigensolver settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Reverification {
    pub eig_rel_off_tol: f64,
    pub tight_slack: Option<f64>,
    pub threshold: f64,
    /// `tight_slack < -threshold`.
    pub survives: bool,
}

impl Outcome {
    fn skipped(check: Check, p: Option<f64>, why: &'static str) -> Self {
        Outcome {
            check,
            class: check.class(p),
            p,
            q: None,
            verdict: Verdict::Skipped(why),
            slack: None,
            witness: None,
            strict: None,
            reverification: None,
        }
    }

    fn evaluated(check: Check, p: Option<f64>, slack: f64, witness: Option<String>, tol: &Tolerances) -> Self {
        let verdict = if slack >= -tol.core { Verdict::Holds } else { Verdict::Fails };
        Outcome { check, class: check.class(p), p, q: None, verdict, slack: Some(slack), witness, strict: None, reverification: None }
    }

    fn from_bound(r: &BoundReport) -> Self {
        let check = Check::Bound(r.bound);
        Outcome {
            check,
            class: check.class(r.p),
            p: r.p,
            q: r.q,
            verdict: r.verdict,
            slack: r.slack,
            witness: r.witness.map(|w| w.to_string()),
            strict: r.strict,
            reverification: None,
        }
    }

    fn from_audit(check: Check, p: f64, a: &AuditOutcome, tol: &Tolerances) -> Self {
        let witness = a.witness.map(|(s, t)| format!("S={s} T={t}"));
        let slack = if a.pairs_checked == 0 { 0.0 } else { a.worst_slack };
        Outcome::evaluated(check, Some(p), slack, witness, tol)
    }

    pub fn failed(&self) -> bool {
        self.verdict == Verdict::Fails
    }

    /// Failed, and (when re-verified) the failure survived.
    pub fn confirmed_failure(&self) -> bool {
        self.failed() && self.reverification.is_none_or(|r| r.survives)
    }
}

fn core_outcome(
    check: Check,
    t: &energame_core::game::CoalitionTable,
    x: &PayoffVector,
    tol: &Tolerances,
) -> energame_core::Result<Outcome> {
    let c = check_core(t, x, tol)?;
    let gap = c.efficiency_gap.abs();
    let (slack, witness) = if gap > tol.core || !c.worst_slack.is_finite() {
        (-gap, Some("efficiency".to_string()))
    } else {
        (c.worst_slack, c.worst_coalition.map(|s| format!("S={s}")))
    };
    Ok(Outcome::evaluated(check, Some(t.p()), slack, witness, tol))
}

fn bound_reports(a: &GraphAnalysis<'_>, id: BoundId) -> energame_core::Result<Vec<BoundReport>> {
    Ok(match id {
        BoundId::SubgraphInequality => a.subgraph_inequality(),
        BoundId::EdgeCut => a.edge_cut(),
        BoundId::SchattenMonotonicity => a.schatten_monotonicity(),
        BoundId::NormalizedReversal => a.normalized_reversal(),
        BoundId::EdgeCountBound => a.edge_count_bound(),
        BoundId::BipartiteBound => a.bipartite().0,
        BoundId::BipartiteSplitting => a.bipartite().1,
        BoundId::VertexHolder => a.vertex_holder()?,
        BoundId::DegreeLowerBound => vec![a.degree_lower_bound()],
        BoundId::AdjacentPair => vec![a.adjacent_pair()],
        BoundId::PathOrdering => {
            let n = a.graph.n();
            if n >= 1 && *a.graph == graph::path(n)? {
                vec![path_ordering(n, &a.tol)?]
            } else {
                return Ok(Vec::new());
            }
        }
    })
}

/// Runs `checks` on `g` for every exponent in `p_grid`, with every
/// eigendecomposition under `cfg`. `TreeExtremal` is a whole-class check
/// and is ignored here; `PathOrdering` only applies to the labeled path
/// `0 - 1 - … - (n-1)` and yields nothing on other graphs.
pub fn evaluate(
    g: &Graph,
    p_grid: &[f64],
    checks: &[Check],
    tol: &Tolerances,
    cfg: EigConfig,
) -> energame_core::Result<Vec<Outcome>> {
    let n = g.n();
    if n > MAX_BOUNDS_N {
        return Err(energame_core::Error::TooLarge { what: "per-graph checks", n, max: MAX_BOUNDS_N });
    }
    let a = GraphAnalysis::with_config(g, p_grid, tol, cfg)?;
    let mut out = Vec::new();
    for &check in checks {
        match check {
            Check::TreeExtremal => {}
            Check::Superadditivity => {
                for t in &a.tables {
                    out.push(if n > MAX_SUPERADDITIVITY_N {
                        Outcome::skipped(check, Some(t.p()), "n above superadditivity cap (16)")
                    } else {
                        Outcome::from_audit(check, t.p(), &audit_superadditivity(t, tol)?, tol)
                    });
                }
            }
            Check::Convexity => {
                for t in &a.tables {
                    out.push(if n > MAX_CONVEXITY_N {
                        Outcome::skipped(check, Some(t.p()), "n above convexity cap (13)")
                    } else {
                        Outcome::from_audit(check, t.p(), &audit_convexity(t, tol)?, tol)
                    });
                }
            }
            Check::VertexCore => {
                for (t, prof) in a.tables.iter().zip(&a.profiles) {
                    out.push(core_outcome(check, t, &PayoffVector::from(prof), tol)?);
                }
            }
            Check::ShapleyCore => {
                for t in &a.tables {
                    out.push(core_outcome(check, t, &shapley_exact(t), tol)?);
                }
            }
            Check::Bound(id) => out.extend(bound_reports(&a, id)?.iter().map(Outcome::from_bound)),
        }
    }
    Ok(out)
}

/// Recomputes every failed outcome with [`EigConfig::TIGHT`] and attaches
/// the result. A failure survives only if the recomputed slack is below
/// `-tol.reverify`.
pub fn reverify(g: &Graph, p_grid: &[f64], outcomes: &mut [Outcome], tol: &Tolerances) -> energame_core::Result<()> {
    let failed: Vec<Check> = {
        let mut v: Vec<Check> = outcomes.iter().filter(|o| o.failed()).map(|o| o.check).collect();
        v.sort();
        v.dedup();
        v
    };
    if failed.is_empty() {
        return Ok(());
    }
    let tight = evaluate(g, p_grid, &failed, tol, EigConfig::TIGHT)?;
    for o in outcomes.iter_mut().filter(|o| o.failed()) {
        let tight_slack = tight
            .iter()
            .find(|t| t.check == o.check && t.p == o.p && t.q == o.q)
            .and_then(|t| t.slack);
        o.reverification = Some(Reverification {
            eig_rel_off_tol: EigConfig::TIGHT.rel_off_tol,
            tight_slack,
            threshold: tol.reverify,
            survives: tight_slack.is_some_and(|s| s < -tol.reverify),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use energame_core::graph::{cycle, path};

    const TOL: Tolerances = Tolerances::DEFAULT;

    #[test]
    fn ids_round_trip() {
        for c in Check::sweep_checks().into_iter().chain([Check::Convexity]) {
            assert_eq!(c.id().parse::<Check>(), Ok(c));
        }
        assert!("nope".parse::<Check>().is_err());
        assert_eq!(
            parse_checks("vertex-core, superadditivity,vertex-core").unwrap(),
            [Check::Superadditivity, Check::VertexCore]
        );
    }

    #[test]
    fn p3_convexity_fails_informationally() {
        let g = path(3).unwrap();
        let mut out = evaluate(&g, &[1.0, 2.0], &[Check::Convexity], &TOL, EigConfig::DEFAULT).unwrap();
        assert!(out[0].failed());
        assert_eq!(out[0].class, CheckClass::Informational);
        assert_eq!(out[0].witness.as_deref(), Some("S={0,1} T={1,2}"));
        assert!(!out[1].failed());
        assert_eq!(out[1].class, CheckClass::Guaranteed);
        reverify(&g, &[1.0, 2.0], &mut out, &TOL).unwrap();
        let r = out[0].reverification.unwrap();
        assert!(r.survives);
        assert!((r.tight_slack.unwrap() - (2.0 * 2f64.sqrt() - 4.0)).abs() < 1e-12);
    }

    #[test]
    fn path_ordering_only_on_paths() {
        let checks = [Check::Bound(BoundId::PathOrdering)];
        assert_eq!(evaluate(&path(6).unwrap(), &[1.0], &checks, &TOL, EigConfig::DEFAULT).unwrap().len(), 1);
        assert!(evaluate(&cycle(6).unwrap(), &[1.0], &checks, &TOL, EigConfig::DEFAULT).unwrap().is_empty());
    }

    #[test]
    fn every_guaranteed_check_holds_on_c4() {
        let all: Vec<Check> = Check::sweep_checks().into_iter().chain([Check::Convexity]).collect();
        let out = evaluate(&cycle(4).unwrap(), &[1.0, 1.5, 2.0, 3.0], &all, &TOL, EigConfig::DEFAULT).unwrap();
        for o in &out {
            assert!(!o.failed() || o.class == CheckClass::Informational, "{o:?}");
        }
    }
}
