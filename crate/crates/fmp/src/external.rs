//! Adapter for external SAT solvers speaking DIMACS and the competition
//! output format.

use std::io::Write as _;
use std::process::Command;

use fmp_core::cnf::{CnfFormula, Lit};
use fmp_core::encode::write_dimacs;
use fmp_core::fmp::SatBackend;
use fmp_core::sat::{Model, SatResult};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExternalError {
    #[error("empty solver command")]
    EmptyCommand,
    #[error("cannot write the CNF file: {0}")]
    Io(#[from] std::io::Error),
    #[error("cannot run `{command}`: {source}")]
    Spawn {
        command: String,
        source: std::io::Error,
    },
    #[error("unparseable solver output: {0}")]
    Unparseable(String),
    #[error("solver model violates clause {0}")]
    InvalidModel(usize),
}

/// A solver invoked as `<command> <cnf-file>`; the command is split on
/// whitespace.
#[derive(Debug, Clone)]
pub struct ExternalSolver {
    argv: Vec<String>,
}

impl ExternalSolver {
    pub fn new(command: &str) -> Result<Self, ExternalError> {
        let argv: Vec<String> = command.split_whitespace().map(str::to_owned).collect();
        if argv.is_empty() {
            return Err(ExternalError::EmptyCommand);
        }
        Ok(Self { argv })
    }

    pub fn command(&self) -> String {
        self.argv.join(" ")
    }

    pub fn solve(&self, cnf: &CnfFormula) -> Result<SatResult, ExternalError> {
        let mut file = tempfile::Builder::new().suffix(".cnf").tempfile()?;
        file.write_all(write_dimacs(cnf, None).as_bytes())?;
        file.flush()?;
        let output = Command::new(&self.argv[0])
            .args(&self.argv[1..])
            .arg(file.path())
            .output()
            .map_err(|source| ExternalError::Spawn {
                command: self.command(),
                source,
            })?;
        let stdout = String::from_utf8_lossy(&output.stdout);
        let result = parse_competition_output(&stdout, cnf.num_vars())?;
        if let SatResult::Sat(model) = &result {
            verify_model(cnf, model)?;
        }
        Ok(result)
    }
}

impl SatBackend for ExternalSolver {
    type Error = ExternalError;

    fn solve(&mut self, cnf: &CnfFormula) -> Result<SatResult, ExternalError> {
        ExternalSolver::solve(self, cnf)
    }
}

/// Reads `s` and `v` lines. Variables missing from the `v` lines are false.
pub fn parse_competition_output(text: &str, num_vars: u32) -> Result<SatResult, ExternalError> {
    let mut status = None;
    let mut values = vec![false; num_vars as usize];
    for line in text.lines() {
        let mut toks = line.split_whitespace();
        match toks.next() {
            Some("s") => {
                let verdict = toks.collect::<Vec<_>>().join(" ");
                status = Some(match verdict.as_str() {
                    "SATISFIABLE" => true,
                    "UNSATISFIABLE" => false,
                    other => return Err(ExternalError::Unparseable(format!("status `{other}`"))),
                });
            }
            Some("v") => {
                for t in toks {
                    let v: i32 = t
                        .parse()
                        .map_err(|_| ExternalError::Unparseable(format!("value `{t}`")))?;
                    let Some(lit) = Lit::from_dimacs(v) else { continue };
                    let slot = values
                        .get_mut(lit.var() as usize - 1)
                        .ok_or_else(|| ExternalError::Unparseable(format!("variable {} out of range", lit.var())))?;
                    *slot = lit.is_positive();
                }
            }
            _ => {}
        }
    }
    match status {
        Some(true) => Ok(SatResult::Sat(Model::new(values))),
        Some(false) => Ok(SatResult::Unsat),
        None => Err(ExternalError::Unparseable("no `s` line".into())),
    }
}

pub fn verify_model(cnf: &CnfFormula, model: &Model) -> Result<(), ExternalError> {
    match cnf
        .clauses()
        .iter()
        .position(|c| !c.iter().any(|&l| model.lit(l)))
    {
        Some(i) => Err(ExternalError::InvalidModel(i)),
        None => Ok(()),
    }
}
