//! Batch front door: parse a TOML run config (flags win on conflict),
//! dispatch the named pipeline, write JSON reports and plot-ready CSV into
//! the output directory, and exit 0 only when every asserted check passes
//! (1 on usage or config errors, 2 on check failures).

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use clap::Parser;

use hardylab::barriers::{
    caccioppoli_check, certify_superharmonic, make_barrier, BarrierKind, CaccioppoliReport,
    Certificate,
};
use hardylab::config::{Command, RunConfig};
use hardylab::estimator::{
    classical_1d_checks, estimate_constant, punctured_disk_divergence_probe, AscentOptions,
    HardyReport,
};
use hardylab::fields::{random_bump_field, HardyParams};
use hardylab::geometry::{
    distance_field_csv, distance_field_grid, exterior_sphere_identity_check,
    lipschitz_and_eikonal_audit, AuditReport, Domain, ExteriorSphereReport, Grid,
};
use hardylab::report::Document;
use hardylab::{jobs, Error};

/// Verify Hardy inequalities, certify barrier functions, and estimate best
/// constants on discretized domains.
#[derive(Debug, Parser)]
#[command(name = "hardylab", version, disable_help_subcommand = true)]
struct Args {
    /// Pipeline to run: distance | certify | caccioppoli | estimate |
    /// probe-punctured | classical (may also come from --command or the
    /// config file).
    command_name: Option<String>,
    /// TOML run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Pipeline name; overrides the config file.
    #[arg(long)]
    command: Option<String>,
    /// Comma-separated exponent list; overrides [params].p.
    #[arg(long, value_delimiter = ',')]
    p: Option<Vec<f64>>,
    /// Comma-separated grid spacings; overrides [grid].h.
    #[arg(long, value_delimiter = ',')]
    h: Option<Vec<f64>>,
    /// RNG seed; overrides the config file.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for reports and CSV dumps.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Multiplier on check tolerances at grading time.
    #[arg(long)]
    tol_scale: Option<f64>,
}

/// One dispatched job: a human-readable summary line, whether its asserted
/// checks passed, and the files to write (path, contents).
struct JobOutput {
    line: String,
    pass: bool,
    files: Vec<(PathBuf, String)>,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(args) {
        Ok(true) => ExitCode::from(0),
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(args: Args) -> hardylab::Result<bool> {
    let mut cfg = match &args.config {
        Some(path) => RunConfig::from_path(path)?,
        None => RunConfig::default(),
    };
    if let Some(name) = args.command.as_deref().or(args.command_name.as_deref()) {
        cfg.command = Some(Command::from_str(name)?);
    }
    if let Some(p) = args.p {
        cfg.params.p = p;
    }
    if let Some(h) = args.h {
        cfg.grid.h = h;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(out) = args.out {
        cfg.out = out;
    }
    if let Some(s) = args.tol_scale {
        cfg.tol_scale = s;
    }
    cfg.validate()?;
    let command = cfg.command.ok_or_else(|| {
        Error::Config("no command given; pass one as an argument, --command, or in the config".into())
    })?;
    std::fs::create_dir_all(&cfg.out)
        .map_err(|e| Error::Config(format!("cannot create out dir {}: {e}", cfg.out.display())))?;

    let outputs = dispatch(command, &cfg)?;
    let mut all_pass = true;
    for job in &outputs {
        for (path, contents) in &job.files {
            std::fs::write(path, contents)
                .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))?;
        }
        println!("{}", job.line);
        all_pass &= job.pass;
    }
    let failed = outputs.iter().filter(|j| !j.pass).count();
    if failed == 0 {
        println!("{}: all {} job(s) passed", command.name(), outputs.len());
    } else {
        println!("{}: {} of {} job(s) FAILED", command.name(), failed, outputs.len());
    }
    Ok(all_pass)
}

fn dispatch(command: Command, cfg: &RunConfig) -> hardylab::Result<Vec<JobOutput>> {
    match command {
        Command::Distance => run_distance(cfg),
        Command::Certify => run_certify(cfg),
        Command::Caccioppoli => run_caccioppoli(cfg),
        Command::Estimate => run_estimate(cfg),
        Command::ProbePunctured => run_probe(cfg),
        Command::Classical => run_classical(cfg),
    }
}

/// Filesystem-safe slug for a domain name.
fn slug(name: &str) -> String {
    let mut s = String::with_capacity(name.len());
    let mut dash = false;
    for c in name.chars() {
        if c.is_ascii_alphanumeric() {
            s.push(c.to_ascii_lowercase());
            dash = false;
        } else if !dash && !s.is_empty() {
            s.push('-');
            dash = true;
        }
    }
    s.trim_end_matches('-').to_string()
}

fn regrade_audit(a: &AuditReport, s: f64) -> bool {
    a.max_lipschitz_violation <= a.lipschitz_tolerance * s
        && a.off_collar_max_residual <= a.residual_bound * s
}

fn regrade_esi(e: &ExteriorSphereReport, s: f64) -> bool {
    e.max_deviation <= e.tolerance * s
}

fn regrade_certificate(c: &Certificate, s: f64) -> bool {
    c.min_off_collar >= -c.tol_off_collar * s && c.min_collar >= -c.tol_collar * s
}

fn regrade_caccioppoli(r: &CaccioppoliReport, s: f64) -> bool {
    r.max_ratio <= 1.0 + r.tol_fraction * s
}

/// Estimates are graded against the reference when one applies:
/// estimated ≤ reference · (1 + 0.02·tol_scale).
fn regrade_estimate(r: &HardyReport, s: f64) -> bool {
    match r.reference_constant {
        Some(reference) => r.estimated_constant <= reference * (1.0 + 0.02 * s),
        None => true,
    }
}

/// Barrier kind when the config leaves it unset: distance-power for p > n,
/// exterior-sphere for p < n when a radius is known, plain distance
/// otherwise.
fn default_barrier_kind(params: &HardyParams, domain: &Domain, radius: Option<f64>) -> BarrierKind {
    let n = params.n as f64;
    if params.p > n {
        BarrierKind::DistancePower
    } else if params.p < n && (radius.is_some() || domain.exterior_sphere_radius.is_some()) {
        BarrierKind::ExteriorSphere
    } else {
        BarrierKind::Distance
    }
}

#[derive(serde::Serialize)]
struct DistancePayload {
    domain: String,
    h: f64,
    seed: u64,
    tol_scale: f64,
    audit: AuditReport,
    exterior_sphere: Option<ExteriorSphereReport>,
    pass: bool,
}

fn run_distance(cfg: &RunConfig) -> hardylab::Result<Vec<JobOutput>> {
    let domain = cfg.build_domain()?;
    let name = slug(&domain.name());
    let hs = cfg.grid.h.clone();
    let results = jobs::run_indexed(hs.len(), |i| -> hardylab::Result<JobOutput> {
        let h = hs[i];
        let start = Instant::now();
        let grid = Grid::build(&domain, h)?;
        let field = distance_field_grid(&domain, grid)?;
        let audit = lipschitz_and_eikonal_audit(&field, 2000, cfg.seed);
        let esi = match domain.exterior_sphere_radius {
            Some(_) => Some(exterior_sphere_identity_check(&field, 256)?),
            None => None,
        };
        let pass = regrade_audit(&audit, cfg.tol_scale)
            && esi.as_ref().map(|e| regrade_esi(e, cfg.tol_scale)).unwrap_or(true);
        let line = format!(
            "distance {name} L{i} (h={h:.6}): {} (max eikonal residual off collar {:.3e}, bound {:.3e})",
            if pass { "PASS" } else { "FAIL" },
            audit.off_collar_max_residual,
            audit.residual_bound * cfg.tol_scale,
        );
        let payload = DistancePayload {
            domain: domain.name(),
            h,
            seed: cfg.seed,
            tol_scale: cfg.tol_scale,
            audit,
            exterior_sphere: esi,
            pass,
        };
        let doc = Document::new("distance", payload, start.elapsed().as_secs_f64());
        let files = vec![
            (cfg.out.join(format!("distance_{name}_L{i}.json")), doc.to_json()?),
            (cfg.out.join(format!("distance_{name}_L{i}.csv")), distance_field_csv(&field)),
        ];
        Ok(JobOutput { line, pass, files })
    });
    results.into_iter().collect()
}

#[derive(serde::Serialize)]
struct CertifyPayload {
    domain: String,
    p: f64,
    h: f64,
    seed: u64,
    tol_scale: f64,
    certificate: Certificate,
    pass: bool,
}

fn run_certify(cfg: &RunConfig) -> hardylab::Result<Vec<JobOutput>> {
    let domain = cfg.build_domain()?;
    let name = slug(&domain.name());
    let ps = cfg.params.p.clone();
    let hs = cfg.grid.h.clone();
    let count = ps.len() * hs.len();
    let results = jobs::run_indexed(count, |j| -> hardylab::Result<JobOutput> {
        let (pi, hi) = (j / hs.len(), j % hs.len());
        let (p, h) = (ps[pi], hs[hi]);
        let start = Instant::now();
        let params = HardyParams::new(p, domain.dimension)?;
        let grid = Grid::build(&domain, h)?;
        let field = distance_field_grid(&domain, grid)?;
        let kind = cfg
            .barrier
            .kind
            .unwrap_or_else(|| default_barrier_kind(&params, &domain, cfg.barrier.radius));
        let barrier = make_barrier(&field, &params, kind, cfg.barrier.radius)?;
        let cert = certify_superharmonic(&barrier, &params)?;
        let pass = regrade_certificate(&cert, cfg.tol_scale);
        let line = format!(
            "certify {name} p={p} L{hi} (h={h:.6}): {} (min pairing off collar {:.3e} ≥ {:.3e})",
            if pass { "PASS" } else { "FAIL" },
            cert.min_off_collar,
            -cert.tol_off_collar * cfg.tol_scale,
        );
        let payload = CertifyPayload {
            domain: domain.name(),
            p,
            h,
            seed: cfg.seed,
            tol_scale: cfg.tol_scale,
            certificate: cert,
            pass,
        };
        let doc = Document::new("certify", payload, start.elapsed().as_secs_f64());
        let files =
            vec![(cfg.out.join(format!("certify_{name}_p{p}_L{hi}.json")), doc.to_json()?)];
        Ok(JobOutput { line, pass, files })
    });
    results.into_iter().collect()
}

#[derive(serde::Serialize)]
struct CaccioppoliPayload {
    domain: String,
    p: f64,
    h: f64,
    seed: u64,
    tol_scale: f64,
    report: CaccioppoliReport,
    pass: bool,
}

fn run_caccioppoli(cfg: &RunConfig) -> hardylab::Result<Vec<JobOutput>> {
    let domain = cfg.build_domain()?;
    let name = slug(&domain.name());
    let ps = cfg.params.p.clone();
    let hs = cfg.grid.h.clone();
    let count = ps.len() * hs.len();
    let results = jobs::run_indexed(count, |j| -> hardylab::Result<JobOutput> {
        let (pi, hi) = (j / hs.len(), j % hs.len());
        let (p, h) = (ps[pi], hs[hi]);
        let start = Instant::now();
        let params = HardyParams::new(p, domain.dimension)?;
        let grid = Grid::build(&domain, h)?;
        let field = distance_field_grid(&domain, grid)?;
        let kind = cfg
            .barrier
            .kind
            .unwrap_or_else(|| default_barrier_kind(&params, &domain, cfg.barrier.radius));
        let barrier = make_barrier(&field, &params, kind, cfg.barrier.radius)?;
        let zetas: Vec<_> = (0..cfg.caccioppoli.bumps)
            .map(|k| random_bump_field(&field.grid, domain.diameter, cfg.seed.wrapping_add(k as u64)))
            .collect();
        let report = caccioppoli_check(&barrier, &zetas, &params)?;
        let pass = regrade_caccioppoli(&report, cfg.tol_scale);
        let line = format!(
            "caccioppoli {name} p={p} L{hi} (h={h:.6}): {} (max lhs/rhs {:.4} ≤ {:.4}, {} fields)",
            if pass { "PASS" } else { "FAIL" },
            report.max_ratio,
            1.0 + report.tol_fraction * cfg.tol_scale,
            report.zeta_count,
        );
        let payload = CaccioppoliPayload {
            domain: domain.name(),
            p,
            h,
            seed: cfg.seed,
            tol_scale: cfg.tol_scale,
            report,
            pass,
        };
        let doc = Document::new("caccioppoli", payload, start.elapsed().as_secs_f64());
        let files =
            vec![(cfg.out.join(format!("caccioppoli_{name}_p{p}_L{hi}.json")), doc.to_json()?)];
        Ok(JobOutput { line, pass, files })
    });
    results.into_iter().collect()
}

#[derive(serde::Serialize)]
struct EstimatePayload {
    tol_scale: f64,
    report: HardyReport,
    pass: bool,
}

fn run_estimate(cfg: &RunConfig) -> hardylab::Result<Vec<JobOutput>> {
    let domain = cfg.build_domain()?;
    let name = slug(&domain.name());
    let ps = cfg.params.p.clone();
    let results = jobs::run_indexed(ps.len(), |i| -> hardylab::Result<JobOutput> {
        let p = ps[i];
        let start = Instant::now();
        let params = HardyParams::new(p, domain.dimension)?;
        let opts = AscentOptions {
            max_iters: cfg.estimate.max_iters,
            seed: cfg.seed,
            initial: None,
        };
        let report = estimate_constant(&domain, &params, &cfg.grid.h, &opts)?;
        let pass = regrade_estimate(&report, cfg.tol_scale);
        let line = format!(
            "estimate {name} p={p}: {} (estimated {:.6}, reference {}, verdict {})",
            if pass { "PASS" } else { "FAIL" },
            report.estimated_constant,
            report
                .reference_constant
                .map(|r| format!("{r:.6}"))
                .unwrap_or_else(|| "none".into()),
            report.verdict,
        );
        let payload = EstimatePayload { tol_scale: cfg.tol_scale, report, pass };
        let doc = Document::new("estimate", payload, start.elapsed().as_secs_f64());
        let files = vec![(cfg.out.join(format!("estimate_{name}_p{p}.json")), doc.to_json()?)];
        Ok(JobOutput { line, pass, files })
    });
    results.into_iter().collect()
}

fn run_probe(cfg: &RunConfig) -> hardylab::Result<Vec<JobOutput>> {
    let ps = cfg.params.p.clone();
    let results = jobs::run_indexed(ps.len(), |i| -> hardylab::Result<JobOutput> {
        let p = ps[i];
        let start = Instant::now();
        let params = HardyParams::new(p, 2)?;
        let opts = AscentOptions {
            max_iters: cfg.estimate.max_iters,
            seed: cfg.seed,
            initial: None,
        };
        let report = punctured_disk_divergence_probe(&params, cfg.probe.levels, &opts)?;
        let pass = regrade_estimate(&report, cfg.tol_scale);
        let trace: Vec<String> =
            report.refinement_trace.iter().map(|pt| format!("{:.4}", pt.estimated)).collect();
        let line = format!(
            "probe-punctured p={p}: {} (trace [{}], verdict {})",
            if pass { "PASS" } else { "FAIL" },
            trace.join(", "),
            report.verdict,
        );
        let payload = EstimatePayload { tol_scale: cfg.tol_scale, report, pass };
        let doc = Document::new("probe-punctured", payload, start.elapsed().as_secs_f64());
        let files = vec![(cfg.out.join(format!("probe-punctured_p{p}.json")), doc.to_json()?)];
        Ok(JobOutput { line, pass, files })
    });
    results.into_iter().collect()
}

fn run_classical(cfg: &RunConfig) -> hardylab::Result<Vec<JobOutput>> {
    let ps = cfg.params.p.clone();
    let results = jobs::run_indexed(ps.len(), |i| -> hardylab::Result<JobOutput> {
        let p = ps[i];
        let start = Instant::now();
        let params = HardyParams::new(p, 1)?;
        let report = classical_1d_checks(&params, cfg.classical.sequences, cfg.seed);
        let pass = report.pass;
        let line = format!(
            "classical p={p}: {} ({} sequences, min series margin {:.3e}, min interval margin {:.3e})",
            if pass { "PASS" } else { "FAIL" },
            report.samples,
            report.series_min_margin,
            report.interval_min_margin,
        );
        let doc = Document::new("classical", report, start.elapsed().as_secs_f64());
        let files = vec![(cfg.out.join(format!("classical_p{p}.json")), doc.to_json()?)];
        Ok(JobOutput { line, pass, files })
    });
    results.into_iter().collect()
}
