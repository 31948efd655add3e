use std::path::PathBuf;

use ordpat::estimate::{DependenceEstimate, Measure};
use ordpat::harness::{format_sig, parse_config, run_experiment};
use ordpat::procgen::{Family, ProcessSpec, Sample};
use ordpat::{gaussian, kendall, opd, pearson};

use crate::io::{read_input, write_rows, write_text, SeriesInput};
use crate::{CliError, EstimateArgs, ExperimentArgs, Formula, SimulateArgs};

pub const ESTIMATE_HEADER: &str = "method,h,shift,n,value,variance,ci_low,ci_high";
pub const SEED_ENV: &str = "ORDPAT_SEED";

fn input_err(e: ordpat::Error) -> CliError {
    CliError::Input(e.to_string())
}

fn opt(v: Option<f64>) -> String {
    v.map(format_sig).unwrap_or_default()
}

fn record(method: Measure, e: &DependenceEstimate) -> String {
    format!(
        "{},{},{},{},{},{},{},{}",
        method.label(),
        e.order,
        e.shift,
        e.n,
        format_sig(e.value),
        opt(e.variance),
        opt(e.ci_low),
        opt(e.ci_high)
    )
}

pub fn estimate(args: &EstimateArgs) -> Result<(), CliError> {
    let method: Measure = args.method.parse().map_err(input_err)?;
    if args.shift > 0 && method != Measure::Opd {
        return Err(CliError::Input(format!("--shift is only supported for opd, not {}", method.label())));
    }
    if !(args.confidence > 0.0 && args.confidence < 1.0) {
        return Err(CliError::Input(format!("--confidence {} must lie in (0, 1)", args.confidence)));
    }
    let est = match read_input(&args.input)? {
        SeriesInput::Series { x, y } => {
            let h = args.h;
            let res = match method {
                Measure::Opd => opd::opd_from_series(&x, &y, h, args.shift),
                Measure::OpdSigned => opd::signed_opd(&x, &y, h).and_then(|v| {
                    opd::opd_from_series(&x, &y, h, 0).map(|mut e| {
                        e.measure = Measure::OpdSigned;
                        e.value = v;
                        e
                    })
                }),
                Measure::Kendall => kendall::kendall_tau_with_ci(&x, &y, h, args.confidence, args.bandwidth),
                Measure::Pearson => pearson::pearson_mv(&x, &y, h),
            };
            res.map_err(CliError::Estimator)?
        }
        SeriesInput::Vectors { x, y } => {
            let order = x.first().map_or(0, |v| v.len() - 1);
            if args.h != order {
                return Err(CliError::Input(format!(
                    "input holds vectors of length {}, so --h must be {order}",
                    order + 1
                )));
            }
            let res = match method {
                Measure::Opd => opd::opd_iid_estimate(&x, &y, order, args.confidence),
                Measure::Kendall => kendall::kendall_vectors_with_ci(&x, &y, args.confidence, args.bandwidth),
                other => {
                    return Err(CliError::Input(format!(
                        "method {} is not available for vector input",
                        other.label()
                    )))
                }
            };
            res.map_err(CliError::Estimator)?
        }
    };
    if args.header {
        println!("{ESTIMATE_HEADER}");
    }
    println!("{}", record(method, &est));
    Ok(())
}

pub fn parse_params(text: &str) -> Result<Vec<f64>, CliError> {
    text.split([',', ':'])
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| CliError::Input(format!("--params: cannot parse `{s}`")))
        })
        .collect()
}

pub fn simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let family: Family = args.family.parse().map_err(input_err)?;
    let spec = ProcessSpec::new(family, parse_params(&args.params)?, args.n, args.seed).map_err(input_err)?;
    match spec.generate().map_err(input_err)? {
        Sample::Series { x, y } => {
            let header = ["x".to_string(), "y".to_string()];
            write_rows(&args.out, &header, x.into_iter().zip(y).map(|(a, b)| vec![a, b]))?;
        }
        Sample::Vectors { x, y } => {
            let header: Vec<String> = ["x1", "x2", "x3", "y1", "y2", "y3"].map(String::from).to_vec();
            let rows = x.into_iter().zip(y).map(|(a, b)| a.iter().chain(&b).copied().collect());
            write_rows(&args.out, &header, rows)?;
        }
    }
    println!("{}", serde_json::to_string(&spec).expect("spec serializes"));
    Ok(())
}

pub fn metadata_path(out: &std::path::Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".meta.json");
    PathBuf::from(name)
}

pub fn experiment(args: &ExperimentArgs) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| CliError::Input(format!("{}: {e}", args.config.display())))?;
    let mut config = parse_config(&text).map_err(input_err)?;
    if let Ok(seed) = std::env::var(SEED_ENV) {
        config.base_seed = seed
            .trim()
            .parse()
            .map_err(|_| CliError::Input(format!("{SEED_ENV}: cannot parse `{seed}` as a seed")))?;
    }
    if args.threads.is_some() {
        config.threads = args.threads;
    }
    config.validate().map_err(input_err)?;
    let report = run_experiment(&config).map_err(CliError::Estimator)?;
    write_text(&args.out, &report.to_csv())?;
    let meta = serde_json::json!({
        "metadata": report.metadata,
        "config": config,
    });
    write_text(
        &metadata_path(&args.out),
        &serde_json::to_string_pretty(&meta).expect("metadata serializes"),
    )?;
    let failed = report.metadata.failed_cells.len();
    if failed > 0 {
        eprintln!("warning: {failed} cell(s) had failed replications; see the metadata file");
    }
    Ok(())
}

pub fn analytic(formula: &Formula) -> Result<(), CliError> {
    let value = match *formula {
        Formula::Opd1Gauss { r } => gaussian::opd1_gaussian(r),
        Formula::Ar1Opd1 { a, b } => gaussian::ar1_opd1(a, b),
        Formula::ShiftedAr1Opd1 { rho } => gaussian::shifted_ar1_opd1(rho),
        Formula::Orthant2 { rho } => gaussian::bivariate_orthant(rho),
    }
    .map_err(input_err)?;
    println!("{}", format_sig(value));
    Ok(())
}
