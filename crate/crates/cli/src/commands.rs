//! Check groups behind each subcommand and their text rendering.

use std::io::Write;

use spinc_core::checks::{identity_checks, kernel_checks, spectrum_checks, symbolic_checks, torus_checks};
use spinc_core::expansion::ExpansionReport;
use spinc_core::report::{CheckRecord, ReportDocument, Status};
use spinc_core::tensor::{RuleError, RuleSet};

use crate::config::RunConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    SymbolicB1,
    CheckIdentities,
    ModelSpectrum,
    ModelKernels,
    TorusGap,
    Report,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::SymbolicB1 => "symbolic-b1",
            Command::CheckIdentities => "check-identities",
            Command::ModelSpectrum => "model-spectrum",
            Command::ModelKernels => "model-kernels",
            Command::TorusGap => "torus-gap",
            Command::Report => "report",
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CommandError {
    #[error(transparent)]
    Rules(#[from] RuleError),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Group {
    Symbolic,
    Identities,
    Spectrum,
    Kernels,
    Torus,
}

const ALL_GROUPS: [Group; 5] = [Group::Symbolic, Group::Identities, Group::Spectrum, Group::Kernels, Group::Torus];

struct GroupResult {
    checks: Vec<CheckRecord>,
    ledger: Option<ExpansionReport>,
}

fn run_group(group: Group, cfg: &RunConfig, rules: &RuleSet) -> GroupResult {
    let plain = |checks| GroupResult { checks, ledger: None };
    match group {
        Group::Symbolic => {
            let (checks, ledger) = symbolic_checks(rules);
            GroupResult { checks, ledger }
        }
        Group::Identities => plain(identity_checks(rules, cfg.instances, cfg.seed)),
        Group::Spectrum => plain(spectrum_checks(&cfg.settings())),
        Group::Kernels => plain(kernel_checks(&cfg.settings())),
        Group::Torus => plain(torus_checks(&cfg.flux, cfg.grid)),
    }
}

/// Runs the groups of `command` (concurrently for `report`), prints a
/// summary to `out`, and returns the report in a fixed group order.
pub fn execute(command: Command, cfg: &RunConfig, out: &mut impl Write) -> Result<ReportDocument, CommandError> {
    let rules = match &cfg.rules {
        Some(path) => RuleSet::load(path)?,
        None => RuleSet::bundled(),
    };
    let groups: &[Group] = match command {
        Command::SymbolicB1 => &[Group::Symbolic],
        Command::CheckIdentities => &[Group::Identities],
        Command::ModelSpectrum => &[Group::Spectrum],
        Command::ModelKernels => &[Group::Kernels],
        Command::TorusGap => &[Group::Torus],
        Command::Report => &ALL_GROUPS,
    };
    let results: Vec<GroupResult> = std::thread::scope(|scope| {
        let rules = &rules;
        let handles: Vec<_> = groups.iter().map(|&g| scope.spawn(move || run_group(g, cfg, rules))).collect();
        handles.into_iter().map(|h| h.join().expect("check group panicked")).collect()
    });

    let mut checks = Vec::new();
    for result in results {
        if let Some(ledger) = &result.ledger {
            write_ledger(out, ledger)?;
        }
        checks.extend(result.checks);
    }
    for c in &checks {
        write_check(out, c)?;
    }
    if command == Command::TorusGap {
        write_torus_table(out, &checks)?;
    }
    let doc = ReportDocument::new(command.name(), cfg.echo(), &rules.hash(), checks);
    writeln!(out, "status: {}", doc.status)?;
    Ok(doc)
}

fn write_ledger(out: &mut impl Write, report: &ExpansionReport) -> std::io::Result<()> {
    writeln!(out, "== expansion ledger ==")?;
    for step in &report.steps {
        let mark = if step.matches { "ok" } else { "MISMATCH" };
        let axiom = if step.axiom { " (imported)" } else { "" };
        writeln!(out, "[{mark}] {}{axiom}", step.name)?;
        writeln!(out, "    computed: {}", step.value)?;
        if !step.matches {
            writeln!(out, "    expected: {}", step.expected)?;
        }
    }
    writeln!(out, "b0 = {}", report.b0)?;
    writeln!(out, "b1 = {}", report.b1)?;
    writeln!(out, "tr b1 = {}", report.trace_b1)?;
    Ok(())
}

fn write_check(out: &mut impl Write, c: &CheckRecord) -> std::io::Result<()> {
    write!(out, "{} {} [{}] actual {}", c.status, c.name, c.parameters, c.actual)?;
    if c.status != Status::Pass && !c.expected.is_empty() {
        write!(out, ", expected {}", c.expected)?;
    }
    if c.tolerance.is_empty() {
        writeln!(out)
    } else {
        writeln!(out, " (tolerance {})", c.tolerance)
    }
}

fn write_torus_table(out: &mut impl Write, checks: &[CheckRecord]) -> std::io::Result<()> {
    writeln!(out, "{:<8}{:<10}{:<22}status", "flux", "count", "gap")?;
    for gap in checks.iter().filter(|c| c.name == "torus-gap") {
        let count = checks
            .iter()
            .find(|c| c.name == "torus-cluster-count" && c.parameters == gap.parameters)
            .map_or("-", |c| c.actual.as_str());
        let flux = gap.parameters.split_whitespace().next().unwrap_or("").trim_start_matches("p=");
        let value = if gap.tolerance.is_empty() { "resolution error" } else { gap.actual.as_str() };
        writeln!(out, "{flux:<8}{count:<10}{value:<22}{}", gap.status)?;
    }
    Ok(())
}
