//! `shapley`: the Shapley value of the p-energy game, exact or sampled.

use std::fmt::Write as _;
use std::str::FromStr;

use energame_core::game::{build_table, shapley_exact, shapley_monte_carlo, MAX_EXHAUSTIVE_N};
use energame_core::graph::Graph;
use serde::Serialize;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Exact,
    MonteCarlo,
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" => Ok(Mode::Exact),
            "mc" | "monte-carlo" => Ok(Mode::MonteCarlo),
            _ => Err(format!("unknown mode {s:?} (expected exact or mc)")),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ShapleyOptions {
    pub mode: Mode,
    pub p: f64,
    /// Monte Carlo orderings; 0 enumerates every ordering.
    pub samples: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShapleyVector {
    pub n: usize,
    pub p: f64,
    pub mode: Mode,
    pub values: Vec<f64>,
    /// Per-player standard errors (Monte Carlo only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub std_err: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Every ordering was enumerated (`samples = 0`).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exhaustive: Option<bool>,
}

pub fn run(g: &Graph, opts: &ShapleyOptions) -> Result<ShapleyVector, CliError> {
    if opts.mode == Mode::MonteCarlo && opts.samples == 0 && g.n() > MAX_EXHAUSTIVE_N {
        return Err(CliError::Usage(format!(
            "--samples 0 enumerates all n! orderings and is limited to n <= {MAX_EXHAUSTIVE_N} (n = {})",
            g.n()
        )));
    }
    let table = build_table(g, opts.p)?;
    let n = g.n();
    Ok(match opts.mode {
        Mode::Exact => ShapleyVector {
            n,
            p: opts.p,
            mode: Mode::Exact,
            values: shapley_exact(&table).0,
            std_err: None,
            samples: None,
            seed: None,
            exhaustive: None,
        },
        Mode::MonteCarlo => {
            let mc = shapley_monte_carlo(&table, opts.samples, opts.seed)?;
            ShapleyVector {
                n,
                p: opts.p,
                mode: Mode::MonteCarlo,
                values: mc.estimate.0,
                std_err: Some(mc.std_err),
                samples: Some(mc.samples),
                seed: Some(mc.seed),
                exhaustive: Some(mc.exhaustive),
            }
        }
    })
}

#[derive(Serialize)]
struct Row {
    player: usize,
    value: f64,
    std_err: String,
}

impl ShapleyVector {
    pub fn csv_rows(&self) -> Vec<impl Serialize> {
        self.values
            .iter()
            .enumerate()
            .map(|(player, &value)| Row {
                player,
                value,
                std_err: crate::doc::opt_num(self.std_err.as_ref().map(|s| s[player])),
            })
            .collect()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mode = match (self.mode, self.exhaustive) {
            (Mode::Exact, _) => "exact".to_string(),
            (Mode::MonteCarlo, Some(true)) => format!("all {} orderings", self.samples.unwrap_or(0)),
            (Mode::MonteCarlo, _) => format!(
                "monte carlo, {} samples, seed {}",
                self.samples.unwrap_or(0),
                self.seed.unwrap_or(0)
            ),
        };
        writeln!(out, "Shapley value, p = {} ({mode})", self.p).unwrap();
        for (i, v) in self.values.iter().enumerate() {
            match &self.std_err {
                Some(se) => writeln!(out, "  {i:>3}  {v:.10}  ± {:.3e}", se[i]).unwrap(),
                None => writeln!(out, "  {i:>3}  {v:.10}").unwrap(),
            }
        }
        out
    }
}
