use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use qwoa::analysis::{self, FitMode, HistogramAxis};
use qwoa::engine::{self, AmplifyParams, Landscape, RunManifest, RunParams, Selector};
use qwoa::mixers::PhaseConvention;
use qwoa::problems::{generate_instance, Family, ProblemInstance, SizeParams};
use qwoa::tuner::{self, EvalMode, Objective, Optimizer, TuneParams, TuneReport, TuneSpec};
use qwoa::Error;

use crate::{AnalyzeArgs, AxisArg, ConventionArg, FitArg, GenerateArgs, ModeArg, ObjectiveArg, OptimizerArg, RunArgs, TuneArgs};

pub const EXIT_USAGE: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;
pub const EXIT_IO: u8 = 4;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn io(context: &Path, e: impl std::fmt::Display) -> Self {
        Failure {
            code: EXIT_IO,
            message: format!("{}: {e}", context.display()),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NonConvergence { .. } | Error::ZeroOptimum | Error::EmptySubset(_) => EXIT_NUMERICAL,
            Error::Document(_) | Error::Json(_) => EXIT_IO,
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type Outcome = Result<(), Failure>;

fn load_instance(path: &Path) -> Result<ProblemInstance, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
    ProblemInstance::from_json(&text).map_err(|e| Failure {
        code: EXIT_IO,
        message: format!("{}: {e}", path.display()),
    })
}

fn out_dir(dir: &Path) -> Outcome {
    fs::create_dir_all(dir).map_err(|e| Failure::io(dir, e))
}

fn write_file(path: &Path, contents: &str) -> Outcome {
    fs::write(path, contents).map_err(|e| Failure::io(path, e))
}

fn write_with<F>(path: &Path, body: F) -> Outcome
where
    F: FnOnce(BufWriter<File>) -> qwoa::Result<()>,
{
    let file = File::create(path).map_err(|e| Failure::io(path, e))?;
    body(BufWriter::new(file)).map_err(|e| Failure::io(path, e))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serialisable");
    s.push('\n');
    s
}

pub fn generate(args: &GenerateArgs) -> Outcome {
    let family: Family = args.family.parse()?;
    let inst = generate_instance(family, SizeParams::new(args.n, args.k), args.seed)?;
    if let Some(parent) = args.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        out_dir(parent)?;
    }
    write_file(&args.out, &inst.to_json())?;
    println!("digest {}", inst.digest());
    println!("size {}", inst.space.len());
    Ok(())
}

pub fn run(args: &RunArgs) -> Outcome {
    let landscape = Landscape::new(load_instance(&args.instance)?)?;
    let params = RunParams {
        amplify: AmplifyParams::new(args.p, args.gamma, args.t, args.beta),
        sigma: args.sigma,
        lambda_t: args.lambda_t.clone(),
        shots: args.shots,
        seed: args.seed,
        mixer_tolerance: args.tolerance,
        convention: match args.convention {
            ConventionArg::PhaseFree => PhaseConvention::PhaseFree,
            ConventionArg::Exact => PhaseConvention::Exact,
        },
        selector: if args.raw { Selector::Raw } else { Selector::Fixed },
    };
    let (outcome, state, trace, sigma) = engine::solve(&landscape, &params)?;
    let axis = match args.axis {
        AxisArg::Auto => analysis::default_axis(&landscape),
        AxisArg::Ratio => HistogramAxis::Ratio,
        AxisArg::Value => HistogramAxis::Value,
    };
    let hist = analysis::ratio_histogram(&state, &landscape, args.bins, axis)?;
    let manifest = RunManifest::new(&landscape, &params, sigma, trace, &outcome);
    let digest = manifest.config_digest.clone();

    out_dir(&args.out)?;
    write_file(&args.out.join("manifest.json"), &manifest.to_json())?;
    write_with(&args.out.join("trace.csv"), |w| analysis::write_trace(w, &manifest.trace, &digest))?;
    write_with(&args.out.join("histogram.csv"), |w| analysis::write_histogram(w, &hist, &digest))?;

    let last = manifest.trace.rows() - 1;
    println!("config {digest}");
    println!("optimum_probability {}", manifest.trace.tracked_total(last));
    println!("expectation {}", manifest.trace.expectation[last]);
    if let Some(best) = &outcome.best {
        let hit = landscape.optimum.indices.contains(&best.index);
        println!("best {} value {} optimal {hit}", best.index, best.value);
    }
    Ok(())
}

#[derive(Serialize)]
struct TuneDocument<'a> {
    format: &'static str,
    version: u32,
    instance_digest: &'a str,
    config_digest: &'a str,
    report: &'a TuneReport,
}

pub fn tune(args: &TuneArgs) -> Outcome {
    let landscape = Landscape::new(load_instance(&args.instance)?)?;
    let mut init = TuneParams::initial(args.p, &landscape.instance.lambda_f);
    init.gamma = args.gamma.unwrap_or(init.gamma);
    init.t = args.t.unwrap_or(init.t);
    init.beta = args.beta.unwrap_or(init.beta);
    let spec = TuneSpec {
        objective: match args.objective {
            ObjectiveArg::Expectation => Objective::Expectation,
            ObjectiveArg::Cvar => Objective::Cvar(args.alpha),
        },
        init: Some(init),
        mode: match args.mode {
            ModeArg::Exact => EvalMode::Exact,
            ModeArg::Shots => EvalMode::Shots(args.shots),
        },
        budget: args.budget,
        seed: args.seed,
        optimizer: match args.optimizer {
            OptimizerArg::NelderMead => Optimizer::NelderMead,
            OptimizerArg::Bfgs => Optimizer::Bfgs,
        },
        tune_lambda: args.tune_lambda,
        tolerance: args.convergence,
        mixer_tolerance: args.tolerance,
        convention: PhaseConvention::PhaseFree,
    };
    let report = tuner::tune(&landscape, args.p, &spec)?;
    let instance_digest = landscape.instance.digest();
    let digest = engine::config_digest("tune", &instance_digest, &(args.p, &spec));

    out_dir(&args.out)?;
    let doc = TuneDocument {
        format: "qwoa-tune",
        version: 1,
        instance_digest: &instance_digest,
        config_digest: &digest,
        report: &report,
    };
    write_file(&args.out.join("tune_report.json"), &to_json(&doc))?;
    let log_path = args.out.join("tune_log.csv");
    write_with(&log_path, |w| write_tune_log(w, &report, &digest))?;

    println!("config {digest}");
    println!(
        "best gamma {} t {} beta {} lambda_t {:?} value {}",
        report.best.gamma, report.best.t, report.best.beta, report.best.lambda_t, report.best_value
    );
    println!("evaluations {} converged {}", report.evaluations, report.converged);
    Ok(())
}

fn write_tune_log<W: Write>(mut out: W, report: &TuneReport, digest: &str) -> qwoa::Result<()> {
    let io = |e: std::io::Error| Error::Document(e.to_string());
    writeln!(out, "# digest: {digest}").map_err(io)?;
    let mut w = csv::Writer::from_writer(out);
    let lambdas = report.best.lambda_t.len();
    let mut header: Vec<String> = ["eval", "gamma", "t", "beta"].iter().map(|s| s.to_string()).collect();
    header.extend((0..lambdas).map(|i| format!("lambda_{i}")));
    header.extend(["value".to_string(), "best_so_far".to_string()]);
    let csv_err = |e: csv::Error| Error::Document(e.to_string());
    w.write_record(&header).map_err(csv_err)?;
    for r in &report.log {
        let mut rec = vec![
            r.eval.to_string(),
            r.params.gamma.to_string(),
            r.params.t.to_string(),
            r.params.beta.to_string(),
        ];
        rec.extend(r.params.lambda_t.iter().map(|l| l.to_string()));
        rec.extend([r.value.to_string(), r.best_so_far.to_string()]);
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush().map_err(io)
}

pub fn analyze(args: &AnalyzeArgs) -> Outcome {
    let inst = load_instance(&args.instance)?;
    let lambda = if args.raw { inst.raw_lambda() } else { inst.lambda_f.clone() };
    let values = inst.objective_table(&lambda)?;
    let mode = match args.fit {
        FitArg::Exhaustive => FitMode::Exhaustive,
        FitArg::Sampled => FitMode::Sampled {
            references: args.references,
            members: args.members,
            seed: args.seed,
        },
    };
    let fit = analysis::condition_fit(&inst.space, &values, mode)?;
    let digest = engine::config_digest("analyze", &inst.digest(), &(&mode, &lambda));

    out_dir(&args.out)?;
    write_with(&args.out.join("condition_fit.csv"), |w| analysis::write_condition_fit(w, &fit, &digest))?;
    write_with(&args.out.join("condition_bins.csv"), |w| analysis::write_condition_bins(w, &fit, &digest))?;
    println!("config {digest}");
    for r in &fit.rows {
        println!("h {} alpha {} std_err {}", r.h, r.alpha, r.std_err);
    }
    Ok(())
}
