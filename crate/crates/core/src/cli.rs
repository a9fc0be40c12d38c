//! The `mixability` command line.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::approx::{
    fixed_valueset_gamma_with, ptas_gamma_with, same_multiset_gamma_with, two_approx_gamma_d3,
    MultisetConfig, ValueSetConfig,
};
use crate::constructions::{
    additive_stress, adversarial_identity, consecutive_matrix, glue, glue_stacked,
    mixable_consecutive_construction, n3dm_instance, partition_instance, stress_multiplier,
    ConsecutiveSpec, DEFAULT_MAX_CONSTRUCTION_ROWS,
};
use crate::error::Error;
use crate::exact::{
    brute_force_beta_with, brute_force_gamma_with, dp_gamma_with, gamma_two_columns,
    two_value_gamma, zero_one_mixability, BruteForceConfig, DpConfig, ZeroOneOutcome,
};
use crate::io::{parse_instance, parse_marginals, write_instance, Parameters, ResultDocument};
use crate::matrix::{
    complement, format_rational, parse_rational, Matrix, MixResult, Objective, Rational, Status,
};
use crate::swapping::{randomized_beta_with, randomized_gamma_with, RestartConfig};
use crate::varbounds::{var_bounds, TailBound, TailRows, VarBoundsConfig, VarSolver};

const DEFAULT_RESTARTS: usize = 16;

#[derive(Debug, Parser)]
#[command(
    name = "mixability",
    version,
    about = "Row-sum extremes and complete mixability of integer matrices"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide complete mixability with an exact solver picked by shape.
    Check {
        path: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Minimum over rearrangements of the largest row sum.
    Gamma {
        path: PathBuf,
        #[arg(long, value_enum, default_value_t = SolverArg::Auto)]
        solver: SolverArg,
        #[command(flatten)]
        common: Common,
    },
    /// Maximum over rearrangements of the smallest row sum.
    Beta {
        path: PathBuf,
        #[arg(long, value_enum, default_value_t = SolverArg::Auto)]
        solver: SolverArg,
        #[command(flatten)]
        common: Common,
    },
    /// Write a generated instance.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
        #[arg(long, global = true)]
        output: Option<PathBuf>,
    },
    /// Bounds on a quantile of the sum from discretized marginals.
    VarBounds {
        path: PathBuf,
        #[arg(long)]
        alpha: String,
        /// Expected discretization count; checked against the file.
        #[arg(long = "N", alias = "n")]
        n: Option<usize>,
        #[arg(long, value_enum, default_value_t = VarSolverArg::Brute)]
        solver: VarSolverArg,
        #[arg(long, value_enum, default_value_t = TailArg::Overline)]
        upper_rows: TailArg,
        #[arg(long, value_enum, default_value_t = TailArg::Underline)]
        lower_rows: TailArg,
        #[command(flatten)]
        common: Common,
    },
    /// Recompute the row sums of a result document from its profile.
    Verify { instance: PathBuf, result: PathBuf },
}

#[derive(Debug, Args)]
struct Common {
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    epsilon: Option<String>,
    #[arg(long)]
    budget_steps: Option<usize>,
    #[arg(long)]
    budget_states: Option<u64>,
    #[arg(long)]
    output: Option<PathBuf>,
}

impl Common {
    fn parameters(&self) -> Parameters {
        Parameters {
            seed: self.seed,
            restarts: self.restarts,
            epsilon: self.epsilon.clone(),
            budget_steps: self.budget_steps,
            budget_states: self.budget_states,
        }
    }

    fn restart_config(&self) -> RestartConfig {
        let mut config = RestartConfig::new(
            self.restarts.unwrap_or(DEFAULT_RESTARTS),
            self.seed.unwrap_or(0),
        );
        config.swap.step_budget = self.budget_steps;
        config
    }

    fn brute(&self) -> BruteForceConfig {
        match self.budget_states {
            Some(n) => BruteForceConfig {
                max_profiles: n as u128,
            },
            None => BruteForceConfig::default(),
        }
    }

    fn dp(&self) -> DpConfig {
        let mut config = DpConfig::default();
        if let Some(n) = self.budget_states {
            config.max_states = usize::try_from(n).unwrap_or(usize::MAX);
        }
        config
    }

    fn valueset(&self) -> ValueSetConfig {
        let mut config = ValueSetConfig::default();
        if let Some(n) = self.budget_states {
            config.max_nodes = n;
        }
        config
    }

    fn multiset(&self) -> MultisetConfig {
        let mut config = MultisetConfig::default();
        if let Some(n) = self.budget_states {
            config.max_nodes = n;
        }
        config
    }

    fn epsilon(&self) -> Result<Rational, CliError> {
        match &self.epsilon {
            Some(s) => Ok(parse_rational(s)?),
            None => Ok(Rational::from_integer(1)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SolverArg {
    Brute,
    Dp,
    Swap,
    #[value(name = "2approx")]
    TwoApprox,
    Ptas,
    Multiset,
    Valueset,
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VarSolverArg {
    Brute,
    Dp,
    Swap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TailArg {
    Full,
    Underline,
    Overline,
}

impl From<TailArg> for TailRows {
    fn from(t: TailArg) -> Self {
        match t {
            TailArg::Full => TailRows::Full,
            TailArg::Underline => TailRows::Underline,
            TailArg::Overline => TailRows::Overline,
        }
    }
}

#[derive(Debug, Subcommand)]
enum GenKind {
    /// `(N, d)` consecutive integers matrix, identity order unless seeded.
    Consecutive {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// The `(d^k, d)` consecutive matrix arranged to constant row sums.
    MixableConsecutive {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        k: usize,
    },
    /// The `(N, 3)` consecutive matrix with sorted columns.
    AdversarialIdentity {
        #[arg(long)]
        n: usize,
    },
    /// Two rows: the values, then zeros.
    Partition {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        values: Vec<i128>,
    },
    /// Three sequences as columns.
    N3dm {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        first: Vec<i128>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        second: Vec<i128>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        third: Vec<i128>,
    },
    /// Combine two constant-row-sum instances.
    Glue {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        /// Column-aligned sums of all row pairs instead of the block layout.
        #[arg(long)]
        stacked: bool,
    },
    /// Append the column `(K', 2K', …, mK')` with `K' = max(2·d·a*, K) + 1`.
    AdditiveStress {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 0)]
        k: i128,
    },
}

#[derive(Debug)]
pub enum CliError {
    /// Bad input: exit code 1.
    Input(String),
    /// Budget refusal or failed verification: exit code 2.
    Refused(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Refused(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Input(s) | CliError::Refused(s) => s,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_budget() {
            CliError::Refused(e.to_string())
        } else {
            CliError::Input(e.to_string())
        }
    }
}

/// Exit code and captured output of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            };
        }
    };
    match execute(cli.command) {
        Ok((text, output)) => match output {
            Some(path) => match fs::write(&path, &text) {
                Ok(()) => Outcome {
                    code: 0,
                    stdout: String::new(),
                    stderr: String::new(),
                },
                Err(e) => Outcome {
                    code: 1,
                    stdout: String::new(),
                    stderr: format!("error: cannot write {}: {e}\n", path.display()),
                },
            },
            None => Outcome {
                code: 0,
                stdout: text,
                stderr: String::new(),
            },
        },
        Err(e) => Outcome {
            code: e.code(),
            stdout: String::new(),
            stderr: format!("error: {}\n", e.message()),
        },
    }
}

type Executed = Result<(String, Option<PathBuf>), CliError>;

fn execute(command: Command) -> Executed {
    match command {
        Command::Check { path, common } => {
            let a = read_instance(&path)?;
            let doc = timed(|| cmd_check(&a, &common))?;
            Ok((doc.to_json(), common.output))
        }
        Command::Gamma {
            path,
            solver,
            common,
        } => {
            let a = read_instance(&path)?;
            let doc = timed(|| cmd_gamma(&a, solver, &common))?;
            Ok((doc.to_json(), common.output))
        }
        Command::Beta {
            path,
            solver,
            common,
        } => {
            let a = read_instance(&path)?;
            let doc = timed(|| cmd_beta(&a, solver, &common))?;
            Ok((doc.to_json(), common.output))
        }
        Command::Gen { kind, output } => Ok((write_instance(&cmd_gen(kind)?), output)),
        Command::VarBounds {
            path,
            alpha,
            n,
            solver,
            upper_rows,
            lower_rows,
            common,
        } => {
            let doc = timed(|| {
                cmd_var_bounds(&path, &alpha, n, solver, upper_rows, lower_rows, &common)
            })?;
            Ok((doc.to_json(), common.output))
        }
        Command::Verify { instance, result } => {
            let (ok, report) = cmd_verify(&instance, &result)?;
            let text = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
            if ok {
                Ok((text, None))
            } else {
                Err(CliError::Refused(format!("verification failed\n{text}")))
            }
        }
    }
}

fn timed(f: impl FnOnce() -> Result<ResultDocument, CliError>) -> Result<ResultDocument, CliError> {
    let start = Instant::now();
    let mut doc = f()?;
    doc.timing.elapsed_us = u64::try_from(start.elapsed().as_micros()).unwrap_or(u64::MAX);
    Ok(doc)
}

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
}

fn read_instance(path: &Path) -> Result<Matrix, CliError> {
    Ok(parse_instance(&read_text(path)?)?)
}

/// Cheapest applicable exact solver: two values, two columns, the dynamic
/// program, then brute force. Refuses when every budget is exceeded.
fn auto_gamma(a: &Matrix, common: &Common) -> Result<(MixResult, &'static str), CliError> {
    if a.distinct_values().len() <= 2 {
        return Ok((two_value_gamma(a)?, "two_value"));
    }
    if a.cols() == 1 {
        return Ok((brute_force_gamma_with(a, &common.brute())?, "brute"));
    }
    if a.cols() == 2 {
        return Ok((gamma_two_columns(a)?, "two_columns"));
    }
    let dp_err = match dp_gamma_with(a, &common.dp()) {
        Ok(r) => return Ok((r, "dp")),
        Err(e) if e.is_budget() => e,
        Err(e) => return Err(e.into()),
    };
    match brute_force_gamma_with(a, &common.brute()) {
        Ok(r) => Ok((r, "brute")),
        Err(e) if e.is_budget() => Err(CliError::Refused(format!(
            "no exact solver fits the budget ({dp_err}; {e}); \
             raise --budget-states or use --solver swap for a heuristic bound"
        ))),
        Err(e) => Err(e.into()),
    }
}

fn solve_gamma(
    a: &Matrix,
    solver: SolverArg,
    common: &Common,
) -> Result<(MixResult, &'static str), CliError> {
    Ok(match solver {
        SolverArg::Auto => return auto_gamma(a, common),
        SolverArg::Brute => (brute_force_gamma_with(a, &common.brute())?, "brute"),
        SolverArg::Dp => (dp_gamma_with(a, &common.dp())?, "dp"),
        SolverArg::Swap => (
            randomized_gamma_with(a, &common.restart_config())?.0,
            "swap",
        ),
        SolverArg::TwoApprox => (two_approx_gamma_d3(a)?, "2approx"),
        SolverArg::Ptas => (
            ptas_gamma_with(a, common.epsilon()?, &common.valueset())?.result,
            "ptas",
        ),
        SolverArg::Multiset => (same_multiset_gamma_with(a, &common.multiset())?, "multiset"),
        SolverArg::Valueset => (
            fixed_valueset_gamma_with(a, &a.distinct_values(), &common.valueset())?,
            "valueset",
        ),
    })
}

fn cmd_gamma(a: &Matrix, solver: SolverArg, common: &Common) -> Result<ResultDocument, CliError> {
    let (result, name) = solve_gamma(a, solver, common)?;
    let mut doc = ResultDocument::from_result(a, &result, name, common.parameters());
    if solver == SolverArg::Ptas && a.min_entry() < 0 {
        doc.details = json!({ "note": "entries were shifted to a zero minimum; the ratio holds for the shifted instance" });
    }
    Ok(doc)
}

/// Beta through `β(A) = d·l − γ(l − A)`, except for the solvers with a
/// direct beta routine.
fn cmd_beta(a: &Matrix, solver: SolverArg, common: &Common) -> Result<ResultDocument, CliError> {
    let (result, name, note) = match solver {
        SolverArg::Brute => (brute_force_beta_with(a, &common.brute())?, "brute", None),
        SolverArg::Swap => (
            randomized_beta_with(a, &common.restart_config())?.0,
            "swap",
            None,
        ),
        _ => {
            let (flipped, _) = complement(a);
            let (g, name) = solve_gamma(&flipped, solver, common)?;
            let status = match g.status {
                Status::HeuristicUpperBound => Status::HeuristicLowerBound,
                other => other,
            };
            let note = matches!(status, Status::RatioBound(_))
                .then_some("the ratio bound applies to gamma of the complement l - A");
            (
                MixResult::from_profile(a, g.profile, Objective::Beta, status)?,
                name,
                note,
            )
        }
    };
    let mut doc = ResultDocument::from_result(a, &result, name, common.parameters());
    if let Some(note) = note {
        doc.details = json!({ "note": note });
    }
    Ok(doc)
}

fn cmd_check(a: &Matrix, common: &Common) -> Result<ResultDocument, CliError> {
    let binary = a.entries().iter().all(|&v| v == 0 || v == 1) && a.scale() == 1 && a.shift() == 0;
    let (gamma, name) = if binary {
        match zero_one_mixability(a)? {
            ZeroOneOutcome::Mixable { result, .. } => (result, "zero_one"),
            ZeroOneOutcome::NotMixable { .. } => (two_value_gamma(a)?, "zero_one"),
        }
    } else {
        auto_gamma(a, common)?
    };
    let m = a.rows() as i128;
    let mixable = gamma.value.checked_mul(m) == Some(a.total());
    let result = MixResult {
        objective: Objective::Mixability,
        ..gamma
    };
    let mut doc = ResultDocument::from_result(a, &result, name, common.parameters());
    let target = a.row_sum_to_original(a.total()) / m;
    doc.details = json!({ "mixable": mixable, "target": format_rational(&target) });
    Ok(doc)
}

fn cmd_gen(kind: GenKind) -> Result<Matrix, CliError> {
    Ok(match kind {
        GenKind::Consecutive { n, d, seed } => {
            let spec = match seed {
                Some(s) => ConsecutiveSpec::random(n, d, s),
                None => ConsecutiveSpec::identity(n, d),
            };
            consecutive_matrix(&spec)?
        }
        GenKind::MixableConsecutive { d, k } => {
            mixable_consecutive_construction(d, k, DEFAULT_MAX_CONSTRUCTION_ROWS)?.0
        }
        GenKind::AdversarialIdentity { n } => adversarial_identity(n)?,
        GenKind::Partition { values } => partition_instance(&values)?,
        GenKind::N3dm {
            first,
            second,
            third,
        } => n3dm_instance(&first, &second, &third)?,
        GenKind::Glue { a, b, stacked } => {
            let (a, b) = (read_instance(&a)?, read_instance(&b)?);
            if a.scale() != 1 || b.scale() != 1 {
                return Err(CliError::Input("glue needs integer instances".into()));
            }
            if stacked {
                glue_stacked(&a, &b)?
            } else {
                glue(&a, &b)?
            }
        }
        GenKind::AdditiveStress { input, k } => {
            let a = read_instance(&input)?;
            additive_stress(&a, stress_multiplier(&a, k))?
        }
    })
}

fn tail_json(side: &TailBound) -> serde_json::Value {
    let m = &side.matrix;
    json!({
        "rows": [side.rows.0, side.rows.1],
        "value": format_rational(&side.value),
        "status": side.status.to_string(),
        "profile": side.result.profile.perms(),
        "row_sums": side
            .result
            .row_sums
            .iter()
            .map(|&s| format_rational(&m.row_sum_to_original(s)))
            .collect::<Vec<_>>(),
    })
}

fn cmd_var_bounds(
    path: &Path,
    alpha: &str,
    n: Option<usize>,
    solver: VarSolverArg,
    upper_rows: TailArg,
    lower_rows: TailArg,
    common: &Common,
) -> Result<ResultDocument, CliError> {
    let marginals = parse_marginals(&read_text(path)?)?;
    let file_n = marginals[0].n();
    if let Some(n) = n {
        if n != file_n {
            return Err(CliError::Input(format!(
                "--N {n} does not match N = {file_n} in the file"
            )));
        }
    }
    let alpha = parse_rational(alpha)?;
    let solver = match solver {
        VarSolverArg::Brute => VarSolver::Brute,
        VarSolverArg::Dp => VarSolver::Dp,
        VarSolverArg::Swap => VarSolver::Swapping {
            restarts: common.restarts.unwrap_or(DEFAULT_RESTARTS),
            seed: common.seed.unwrap_or(0),
        },
    };
    let config = VarBoundsConfig {
        solver,
        upper_rows: upper_rows.into(),
        lower_rows: lower_rows.into(),
    };
    let report = var_bounds(&marginals, alpha, &config)?;
    let (lo, hi) = report.interval();
    let status = if report.lower.status == Status::Exact && report.upper.status == Status::Exact {
        "exact".to_string()
    } else {
        format!(
            "lower={} upper={}",
            report.lower.status, report.upper.status
        )
    };
    Ok(ResultDocument {
        objective: "var_bounds".into(),
        value: format!("[{}, {}]", format_rational(&lo), format_rational(&hi)),
        status,
        profile: Vec::new(),
        row_sums: Vec::new(),
        solver: solver.to_string(),
        parameters: common.parameters(),
        details: json!({
            "alpha": format_rational(&alpha),
            "N": file_n,
            "d": marginals.len(),
            "lower": tail_json(&report.lower),
            "upper": tail_json(&report.upper),
            "mapping": "upper = beta of rows with r/N >= alpha, lower = gamma of rows with r/N <= alpha",
        }),
        timing: Default::default(),
    })
}

/// Recomputes row sums from the instance and the claimed profile with plain
/// rational arithmetic.
fn cmd_verify(instance: &Path, result: &Path) -> Result<(bool, serde_json::Value), CliError> {
    let a = read_instance(instance)?;
    let doc = ResultDocument::from_json(&read_text(result)?)?;
    let (m, d) = (a.rows(), a.cols());
    let mut problems = Vec::new();
    if doc.profile.len() != d || doc.profile.iter().any(|p| p.len() != m) {
        return Err(CliError::Input(format!(
            "profile shape does not match the {m} x {d} instance"
        )));
    }
    let mut sums = vec![Rational::from_integer(0); m];
    for (j, perm) in doc.profile.iter().enumerate() {
        let mut hit = vec![false; m];
        for (k, &dest) in perm.iter().enumerate() {
            if dest >= m || hit[dest] {
                return Err(CliError::Input(format!(
                    "column {j} of the profile is not a permutation"
                )));
            }
            hit[dest] = true;
            sums[dest] += a.entry_to_original(a.get(k, j));
        }
    }
    let claimed: Vec<Rational> = doc
        .row_sums
        .iter()
        .map(|s| parse_rational(s))
        .collect::<Result<_, _>>()?;
    if claimed != sums {
        problems.push("row sums differ".to_string());
    }
    let recomputed = match doc.objective.as_str() {
        "beta" => sums.iter().min(),
        "gamma" | "mixability" => sums.iter().max(),
        other => {
            return Err(CliError::Input(format!(
                "cannot verify objective {other:?}"
            )))
        }
    }
    .copied()
    .expect("m >= 1");
    if parse_rational(&doc.value)? != recomputed {
        problems.push("value differs".to_string());
    }
    if doc.objective == "mixability" {
        let target = sums.iter().sum::<Rational>() / Rational::from_integer(m as i128);
        let claimed_mixable = doc.details.get("mixable").and_then(|v| v.as_bool());
        if claimed_mixable == Some(true) && recomputed != target {
            problems.push("claimed mixable but the profile does not mix".to_string());
        }
    }
    let ok = problems.is_empty();
    let report = json!({
        "ok": ok,
        "objective": doc.objective,
        "claimed_value": doc.value,
        "recomputed_value": format_rational(&recomputed),
        "recomputed_row_sums": sums.iter().map(format_rational).collect::<Vec<_>>(),
        "problems": problems,
    });
    Ok((ok, report))
}
