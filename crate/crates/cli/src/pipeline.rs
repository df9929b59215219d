//! Assemble → solve → filter → report pipelines behind the subcommands.

use itlab_core::checks::{all_passed, CheckResult};
use itlab_core::eig::{cluster_eigenvalues, filter_converged, solve_quadratic, EigenvalueRecord};
use itlab_core::oracle::{default_search_box, oracle_eigenvalues, DispersionDomain, DispersionProblem};
use itlab_core::parametrix::verify_parametrix;
use itlab_core::pencil::{assemble_disk_mode, assemble_interval_with, DiscretePencil};
use itlab_core::profile::ProfileKind;
use itlab_core::regions::{region_report, verify_regions, RegionCase, RegionReport, RegionScanConfig};
use itlab_core::symbols::{verify_symbols, Branch, SymbolScanConfig};
use itlab_core::RefractiveProfile;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{DomainSpec, LoadedConfig, MeshSpec, RunConfig};
use crate::results::{Provenance, ResultSet};
use crate::CliError;

/// Test-only fault injections for negative controls.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Use the wrong square-root branch for the symbol roots.
    FlippedBranch,
}

/// Pencils and records of one solve.
#[derive(Debug, Clone)]
pub struct SolveOutput {
    pub result: ResultSet,
    pub profile: RefractiveProfile,
    /// Coarse and refined pencil of every mode that assembled.
    pub pencils: Vec<DiscretePencil>,
}

fn assemble(profile: &RefractiveProfile, domain: &DomainSpec, mode: Option<u32>, n: usize) -> itlab_core::Result<DiscretePencil> {
    match (domain, mode) {
        (DomainSpec::Interval { a, b, basis }, _) => assemble_interval_with(profile, n, *a, *b, *basis),
        (DomainSpec::Disk { radius, .. }, Some(l)) => assemble_disk_mode(profile, l, n, *radius),
        (DomainSpec::Disk { .. }, None) => unreachable!("disk solves always carry a mode"),
    }
}

/// Records of one mode: clustered coarse eigenvalues, stable when they also
/// appear on the refined mesh.
pub fn solve_mode(
    profile: &RefractiveProfile,
    domain: &DomainSpec,
    mode: Option<u32>,
    mesh: MeshSpec,
    cfg: &RunConfig,
) -> itlab_core::Result<(Vec<EigenvalueRecord>, [DiscretePencil; 2])> {
    let coarse = assemble(profile, domain, mode, mesh.n)?;
    let fine = assemble(profile, domain, mode, mesh.fine())?;
    let rc = cluster_eigenvalues(&solve_quadratic(&coarse, cfg.eig.tol)?, cfg.eig.cluster_tol);
    let rf = cluster_eigenvalues(&solve_quadratic(&fine, cfg.eig.tol)?, cfg.eig.cluster_tol);
    Ok((filter_converged(&rc, &rf, cfg.eig.match_tol), [coarse, fine]))
}

fn modes_of(domain: &DomainSpec) -> Vec<Option<u32>> {
    match domain {
        DomainSpec::Interval { .. } => vec![None],
        DomainSpec::Disk { modes, .. } => modes.modes().into_iter().map(Some).collect(),
    }
}

fn mode_label(mode: Option<u32>) -> String {
    mode.map_or_else(|| "interval".to_string(), |l| format!("mode {l}"))
}

pub fn run_solve(loaded: &LoadedConfig) -> Result<SolveOutput, CliError> {
    let cfg = &loaded.config;
    let domain = cfg.domain()?;
    let mesh = cfg.mesh()?;
    let profile = cfg.refractive_profile()?;
    let per_mode: Vec<_> = modes_of(domain)
        .par_iter()
        .map(|&mode| (mode, solve_mode(&profile, domain, mode, mesh, cfg)))
        .collect();
    let mut records = Vec::new();
    let mut pencils = Vec::new();
    let mut failures = Vec::new();
    for (mode, outcome) in per_mode {
        match outcome {
            Ok((r, p)) => {
                records.extend(r);
                pencils.extend(p);
            }
            Err(e) => failures.push(format!("{}: {e}", mode_label(mode))),
        }
    }
    let region = region_report(&records, &cfg.region(), &profile);
    let result = ResultSet {
        records,
        region: Some(region),
        failures,
        provenance: Provenance::new("solve", &loaded.sha256, cfg.timestamp),
    };
    Ok(SolveOutput { result, profile, pencils })
}

pub fn run_oracle(loaded: &LoadedConfig) -> Result<ResultSet, CliError> {
    let cfg = &loaded.config;
    let domain = cfg.domain()?;
    let profile = cfg.refractive_profile()?;
    let m = match profile.kind {
        ProfileKind::Constant { m } => m,
        _ => return Err(CliError::Input("the oracle needs a constant profile".into())),
    };
    let problems: Vec<(i64, DispersionDomain)> = match domain {
        DomainSpec::Interval { a, b, .. } => vec![(-1, DispersionDomain::Interval { length: b - a })],
        DomainSpec::Disk { radius, modes } => {
            modes.modes().into_iter().map(|l| (l as i64, DispersionDomain::Disk { radius: *radius, l })).collect()
        }
    };
    let per_mode: Vec<_> = problems
        .par_iter()
        .map(|&(mode, d)| {
            let found = DispersionProblem::from_m(d, m).and_then(|prob| {
                let searchbox = cfg.oracle.search_box.unwrap_or_else(|| default_search_box(&d));
                oracle_eigenvalues(&prob, &searchbox, cfg.oracle.maxdepth)
            });
            (mode, found)
        })
        .collect();
    let mut records = Vec::new();
    let mut failures = Vec::new();
    for (mode, found) in per_mode {
        match found {
            Ok(zeros) => records.extend(zeros.into_iter().map(|z| EigenvalueRecord {
                lambda: z.lambda,
                residual: z.residual,
                mode,
                mesh_n: 0,
                stable: true,
                multiplicity: z.multiplicity,
            })),
            Err(e) => failures.push(format!("mode {mode}: {e}")),
        }
    }
    let region = region_report(&records, &cfg.region(), &profile);
    Ok(ResultSet {
        records,
        region: Some(region),
        failures,
        provenance: Provenance::new("oracle", &loaded.sha256, cfg.timestamp),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub kind: String,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub regions: Vec<RegionReport>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub failures: Vec<String>,
    pub provenance: Provenance,
}

fn report(kind: &str, checks: Vec<CheckResult>, loaded: &LoadedConfig) -> VerifyReport {
    VerifyReport {
        kind: kind.to_string(),
        passed: all_passed(&checks),
        checks,
        regions: vec![],
        failures: vec![],
        provenance: Provenance::new(&format!("verify-{kind}"), &loaded.sha256, loaded.config.timestamp),
    }
}

fn core_err(e: itlab_core::Error) -> CliError {
    CliError::Core(e)
}

pub fn run_verify_symbols(loaded: &LoadedConfig, fault: Option<Fault>) -> Result<VerifyReport, CliError> {
    let cfg = SymbolScanConfig {
        seed: loaded.config.seed,
        samples: loaded.config.symbols.samples,
        branch: if fault == Some(Fault::FlippedBranch) { Branch::Flipped } else { Branch::Upper },
    };
    Ok(report("symbols", verify_symbols(&cfg).map_err(core_err)?, loaded))
}

pub fn run_verify_parametrix(loaded: &LoadedConfig) -> Result<VerifyReport, CliError> {
    let profile = loaded.config.refractive_profile()?;
    Ok(report("parametrix", verify_parametrix(&profile, loaded.config.parametrix.delta).map_err(core_err)?, loaded))
}

pub fn run_verify_regions(loaded: &LoadedConfig) -> Result<VerifyReport, CliError> {
    let solved = run_solve(loaded)?;
    let cfg = &loaded.config;
    let scan = RegionScanConfig {
        region: cfg.region(),
        seed: cfg.seed,
        identity_samples: cfg.region.identity_samples,
        grid_n: 10,
        grid_span: cfg.region.grid_span,
        margin: cfg.region.margin,
    };
    let case = RegionCase {
        name: "config".into(),
        profile: &solved.profile,
        pencils: &solved.pencils,
        records: &solved.result.records,
    };
    let (mut checks, regions) = verify_regions(&[case], &scan).map_err(core_err)?;
    checks.push(CheckResult::at_most(
        "modes solved without failure",
        solved.result.failures.len() as f64,
        0.0,
        solved.result.failures.clone(),
    ));
    let mut out = report("regions", checks, loaded);
    out.regions = regions;
    out.failures = solved.result.failures;
    Ok(out)
}
