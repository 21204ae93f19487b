//! `nevanlinna`: evaluate, check and classify representing measures from scene files.

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use num_complex::Complex64;
use serde_json::{json, Value};
use std::path::PathBuf;
use std::process::ExitCode;

use nevanlinna::admissibility::{check_measure, Verdict, ZGrid};
use nevanlinna::figure::{emit_figure, FigureId, FigureSpec};
use nevanlinna::kernel::{decompose, nontangential_c, transform_representation, PathSpec};
use nevanlinna::measure::restrict_to_hyperplane;
use nevanlinna::point::{format_complex_short, parse_complex};
use nevanlinna::support::{classify, VerdictKind};
use nevanlinna::torus::{
    blaschke_decompose, classify_torus, disk_evaluate, fourier_coefficient, fourier_scan, restrict_torus, torus_region,
    FourierIndex,
};
use nevanlinna::{evaluate, Axis, DiskPoint, Error, HalfPlanePoint, QuadratureSpec};
use nevanlinna_cli::scene::Scene;

const EXIT_PARSE: u8 = 1;
const EXIT_FAIL: u8 = 2;
const EXIT_INCONCLUSIVE: u8 = 3;
const EXIT_FORBIDDEN: u8 = 4;

/// Relative size below which a sampled mixed Fourier coefficient counts as zero.
const FOURIER_ZERO: f64 = 1e-5;

#[derive(Parser, Debug)]
#[command(
    name = "nevanlinna",
    version,
    about = "Herglotz-Nevanlinna representations, admissibility checks and support geometry"
)]
struct Cli {
    /// Absolute quadrature tolerance (relative tolerance is ten times this).
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Comma-separated coordinate values of the z-grid used by `check`, e.g. "i,1+i,-1+2i".
    #[arg(long, global = true)]
    grid: Option<String>,
    /// Write the JSON report (or the SVG for `plot`) here; "-" sends the JSON report to stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate q(z) from its representing parameters.
    Eval {
        /// Scene JSON file.
        #[arg(long)]
        scene: PathBuf,
        /// Comma-separated coordinates, e.g. "i,1+2i".
        #[arg(long, allow_hyphen_values = true)]
        z: Option<String>,
    },
    /// Test the growth and Nevanlinna conditions on a z-grid.
    Check {
        /// Scene JSON file.
        #[arg(long)]
        scene: PathBuf,
    },
    /// Run the forbidden-region rules on the scene's region.
    Classify {
        /// Scene JSON file.
        #[arg(long)]
        scene: PathBuf,
        /// Classify the region's preimage on the torus.
        #[arg(long)]
        torus: bool,
    },
    /// Apply the coordinate map t_j -> 1/(p - t_j) to the representation.
    Transform {
        /// Scene JSON file.
        #[arg(long)]
        scene: PathBuf,
        /// 1-based coordinate index; defaults to the scene's.
        #[arg(long)]
        axis: Option<usize>,
        /// Pole p of the map; defaults to the scene's.
        #[arg(long, allow_negative_numbers = true)]
        pole: Option<f64>,
        /// Also evaluate the transformed function here.
        #[arg(long, allow_hyphen_values = true)]
        z: Option<String>,
    },
    /// Split off the mass on the hyperplane t_j = p (or s_j = p on the torus).
    Restrict {
        /// Scene JSON file.
        #[arg(long)]
        scene: PathBuf,
        /// 1-based coordinate index; defaults to the scene's.
        #[arg(long)]
        axis: Option<usize>,
        /// Hyperplane position; defaults to the scene's.
        #[arg(long, allow_negative_numbers = true)]
        p: Option<f64>,
        /// Also estimate the constant from the non-tangential limit.
        #[arg(long)]
        nontangential: bool,
    },
    /// Split pole terms c/(p - z_j) off the representation.
    Decompose {
        /// Scene JSON file.
        #[arg(long)]
        scene: PathBuf,
        /// Comma-separated axis:position pairs, e.g. "1:2,2:-0.5".
        #[arg(long, allow_hyphen_values = true)]
        pairs: Option<String>,
        /// Also evaluate both sides here.
        #[arg(long, allow_hyphen_values = true)]
        z: Option<String>,
    },
    /// Tabulate the mixed Fourier coefficients of the torus measure.
    Fourier {
        /// Scene JSON file.
        #[arg(long)]
        scene: PathBuf,
        /// Largest |k| per coordinate in the table.
        #[arg(long)]
        bound: Option<u32>,
    },
    /// Evaluate the polydisk function represented by the torus measure.
    DiskEval {
        /// Scene JSON file.
        #[arg(long)]
        scene: PathBuf,
        /// Comma-separated polydisk coordinates; defaults to the scene's.
        #[arg(long, allow_hyphen_values = true)]
        w: Option<String>,
    },
    /// Emit one of the region figures as SVG.
    Plot {
        /// One of lines, strips, cross, lines-torus, strips-torus, cross-torus.
        #[arg(long)]
        figure: Option<String>,
        /// Scene whose `options.figure` block supplies the figure settings.
        #[arg(long)]
        scene: Option<PathBuf>,
    },
}

struct Outcome {
    summary: String,
    report: Value,
    code: u8,
    /// Replaces the JSON report as the `--out` artifact.
    artifact: Option<String>,
}

impl Outcome {
    fn new(summary: String, report: Value, code: u8) -> Self {
        Outcome { summary, report, code, artifact: None }
    }
}

fn quadrature(cli: &Cli) -> Result<QuadratureSpec> {
    Ok(match cli.tol {
        Some(t) => QuadratureSpec::new(t, 10.0 * t, QuadratureSpec::default().max_depth)?,
        None => QuadratureSpec::default(),
    })
}

fn complex_list(text: &str) -> Result<Vec<Complex64>> {
    text.split(',').map(|s| parse_complex(s).map_err(Into::into)).collect()
}

fn half_plane_point(flag: &Option<String>, scene: &Scene) -> Result<HalfPlanePoint> {
    match flag {
        Some(text) => Ok(HalfPlanePoint::new(complex_list(text)?)?),
        None => scene.options.z.clone().context("give --z or options.z"),
    }
}

fn axis_arg(flag: Option<usize>, scene: &Scene) -> Result<Axis> {
    match flag {
        Some(0) => bail!("axes are numbered from 1"),
        Some(k) => Ok(Axis::new(k)),
        None => scene.options.axis.context("give --axis or options.axis"),
    }
}

fn parse_pairs(text: &str) -> Result<Vec<(Axis, f64)>> {
    text.split(',')
        .map(|item| {
            let (a, p) = item.split_once(':').with_context(|| format!("pair {item:?} is not axis:position"))?;
            let a: usize = a.trim().parse().with_context(|| format!("bad axis in {item:?}"))?;
            if a == 0 {
                bail!("axes are numbered from 1");
            }
            Ok((Axis::new(a), p.trim().parse().with_context(|| format!("bad position in {item:?}"))?))
        })
        .collect()
}

fn short(z: Complex64) -> String {
    format_complex_short(z)
}

fn run(cli: &Cli) -> Result<Outcome> {
    let spec = quadrature(cli)?;
    match &cli.command {
        Command::Eval { scene, z } => {
            let scene = Scene::load(scene)?;
            let params = scene.representation()?;
            let z = half_plane_point(z, &scene)?;
            let value = evaluate(&params, &z, &spec)?;
            Ok(Outcome::new(short(value), json!({ "z": z, "value": short(value) }), 0))
        }
        Command::Check { scene } => {
            let scene = Scene::load(scene)?;
            let mu = scene.half_plane_measure()?;
            let grid = match &cli.grid {
                Some(text) => ZGrid { values: complex_list(text)?, extra: vec![] },
                None => scene.options.grid.clone().unwrap_or_default(),
            };
            let report = check_measure(&mu, &grid, &spec)?;
            let (word, code) = match report.verdict {
                Verdict::Pass => ("pass", 0),
                Verdict::Fail => ("fail", EXIT_FAIL),
                Verdict::Inconclusive => ("inconclusive", EXIT_INCONCLUSIVE),
            };
            let mut summary =
                format!("{word} (max residual {:.3e}, threshold {:.1e})", report.max_residual, report.threshold);
            if let Some(z) = &report.failing_point {
                summary.push_str(&format!(", nonzero at {z}"));
            }
            summary.push_str("\nz\tmax |residual|\tresidual\tremainder");
            for pv in report.point_verdicts() {
                let worst = report.residuals.iter().filter(|r| r.z == pv.z).map(|r| r.value.norm()).fold(0.0, f64::max);
                summary.push_str(&format!("\n{}\t{worst:.3e}\t{:?}\t{:?}", pv.z, pv.residual, pv.remainder));
            }
            Ok(Outcome::new(summary, serde_json::to_value(&report)?, code))
        }
        Command::Classify { scene, torus } => {
            let scene = Scene::load(scene)?;
            let region = scene.region()?;
            let (verdict, report) = if *torus || scene.options.torus == Some(true) {
                let v = classify_torus(&torus_region(region)?)?;
                (v.verdict.clone(), serde_json::to_value(&v)?)
            } else {
                let v = classify(region)?;
                let report = serde_json::to_value(&v)?;
                (v, report)
            };
            let word = match verdict.kind {
                VerdictKind::Forbidden => "forbidden",
                VerdictKind::KnownAdmissible => "known_admissible",
                VerdictKind::Undecided => "undecided",
            };
            let mut summary = word.to_string();
            if !verdict.citation.is_empty() {
                summary.push_str(&format!(" {}", verdict.citation));
            }
            if let Some(z) = &verdict.witness {
                summary.push_str(&format!(" witness {z}"));
            }
            for note in &verdict.notes {
                summary.push_str(&format!("; {note}"));
            }
            let code = if verdict.kind == VerdictKind::Forbidden { EXIT_FORBIDDEN } else { 0 };
            Ok(Outcome::new(summary, report, code))
        }
        Command::Transform { scene, axis, pole, z } => {
            let scene = Scene::load(scene)?;
            let params = scene.representation()?;
            let axis = axis_arg(*axis, &scene)?;
            let p = pole.or(scene.options.p).context("give --pole or options.p")?;
            let t = transform_representation(&params, axis, p, &spec)?;
            let mut report = serde_json::to_value(&t)?;
            let mut summary =
                format!("a = {}, b = {:?}, pole strength {}", t.params.a(), t.params.b(), t.pole.strength);
            if z.is_some() || scene.options.z.is_some() {
                let z = half_plane_point(z, &scene)?;
                let value = evaluate(&t.params, &z, &spec)?;
                summary.push_str(&format!("; Q(z) = {}", short(value)));
                report["value"] = json!(short(value));
            }
            Ok(Outcome::new(summary, report, 0))
        }
        Command::Restrict { scene, axis, p, nontangential } => {
            let scene = Scene::load(scene)?;
            let axis = axis_arg(*axis, &scene)?;
            let p = p.or(scene.options.p).context("give --p or options.p")?;
            if let Some(nu) = &scene.torus_measure {
                let r = restrict_torus(nu, axis, p)?;
                let code = if r.non_lebesgue { EXIT_FAIL } else { 0 };
                let mut summary = format!("d = {}", r.d);
                if r.non_lebesgue {
                    summary.push_str("; mass on the hyperplane is not a multiple of Lebesgue measure");
                }
                return Ok(Outcome::new(summary, serde_json::to_value(&r)?, code));
            }
            let params = scene.representation()?;
            let r = restrict_to_hyperplane(params.mu(), axis, p)?;
            let mut summary = format!("c = {}", r.constant);
            let mut report =
                json!({ "constant": r.constant, "non_lebesgue": r.non_lebesgue, "remainder": r.remainder });
            if *nontangential {
                let lim = nontangential_c(&params, axis, p, &PathSpec::default(), &spec)?;
                summary.push_str(&format!(", non-tangential estimate {:.6} (residual {:.1e})", lim.c, lim.residual));
                report["nontangential"] = serde_json::to_value(lim)?;
            }
            let code = if r.non_lebesgue {
                summary.push_str("; mass on the hyperplane is not a multiple of Lebesgue measure");
                EXIT_FAIL
            } else {
                0
            };
            Ok(Outcome::new(summary, report, code))
        }
        Command::Decompose { scene, pairs, z } => {
            let scene = Scene::load(scene)?;
            let pairs = match pairs {
                Some(text) => parse_pairs(text)?,
                None => scene.options.pairs.clone().context("give --pairs or options.pairs")?,
            };
            if let Some(nu) = &scene.torus_measure {
                let imag = scene.options.imag_at_zero.unwrap_or(0.0);
                let dec = blaschke_decompose(nu, imag, &pairs)?;
                let terms: Vec<String> = dec
                    .terms
                    .iter()
                    .map(|t| {
                        format!(
                            "{}·(e^(i{})+w{})/(e^(i{})-w{})",
                            t.coefficient(),
                            t.location,
                            t.axis,
                            t.location,
                            t.axis
                        )
                    })
                    .collect();
                return Ok(Outcome::new(format!("terms: [{}]", terms.join(", ")), serde_json::to_value(&dec)?, 0));
            }
            let params = scene.representation()?;
            let dec = decompose(&params, &pairs)?;
            let terms: Vec<String> =
                dec.poles.iter().map(|t| format!("{}/({} - z{})", t.strength, t.location, t.axis)).collect();
            let mut summary = format!("poles: [{}], a = {}", terms.join(", "), dec.adjusted.a());
            let mut report = serde_json::to_value(&dec)?;
            if z.is_some() || scene.options.z.is_some() {
                let z = half_plane_point(z, &scene)?;
                let split = dec.evaluate(&z, &spec)?;
                let direct = evaluate(&params, &z, &spec)?;
                summary.push_str(&format!("; split {} vs direct {}", short(split), short(direct)));
                report["value"] = json!({ "split": short(split), "direct": short(direct) });
            }
            Ok(Outcome::new(summary, report, 0))
        }
        Command::Fourier { scene, bound } => {
            let scene = Scene::load(scene)?;
            let nu = scene.torus_measure()?;
            let bound = bound.or(scene.options.bound).unwrap_or(4);
            let scan = fourier_scan(nu, bound, &spec)?;
            let mass = fourier_coefficient(nu, &FourierIndex::new(vec![0; nu.n()]), &spec)?.value.norm();
            let zero = FOURIER_ZERO * mass.max(1.0);
            let (word, code) = if scan.certifies_nonzero(zero) {
                ("nonzero mixed coefficients", EXIT_FAIL)
            } else if scan.vanishes(zero) {
                ("mixed coefficients vanish", 0)
            } else {
                ("inconclusive", EXIT_INCONCLUSIVE)
            };
            let mut lines = vec![format!("{word} (|m|∞ ≤ {bound}, max {:.3e}, threshold {zero:.1e})", scan.max_abs)];
            for e in &scan.entries {
                lines.push(format!("{:?}\t{}", e.m.m, short(e.value)));
            }
            Ok(Outcome::new(lines.join("\n"), serde_json::to_value(&scan)?, code))
        }
        Command::DiskEval { scene, w } => {
            let scene = Scene::load(scene)?;
            let nu = scene.torus_measure()?;
            let w = match w {
                Some(text) => DiskPoint::new(complex_list(text)?)?,
                None => scene.options.w.clone().context("give --w or options.w")?,
            };
            let imag = scene.options.imag_at_zero.unwrap_or(0.0);
            let value = disk_evaluate(nu, imag, &w, &spec)?;
            Ok(Outcome::new(short(value), json!({ "w": w, "value": short(value) }), 0))
        }
        Command::Plot { figure, scene } => {
            let from_scene = match scene {
                Some(path) => Scene::load(path)?.options.figure,
                None => None,
            };
            let spec = match (figure, from_scene) {
                (Some(id), Some(mut s)) => {
                    s.id = id.parse::<FigureId>()?;
                    s
                }
                (Some(id), None) => FigureSpec::new(id.parse()?),
                (None, Some(s)) => s,
                (None, None) => bail!("give --figure or a scene with options.figure"),
            };
            let svg = emit_figure(&spec)?;
            let mut out = Outcome::new(format!("figure {}", spec.id.name()), json!({ "figure": spec }), 0);
            if cli.out.is_none() {
                out.summary = svg.trim_end().to_string();
            } else {
                out.artifact = Some(svg);
            }
            Ok(out)
        }
    }
}

fn exit_code_for(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::NonConvergence { .. }) | Some(Error::EstimationFailed { .. }) => EXIT_INCONCLUSIVE,
        Some(Error::NotNevanlinna(_)) | Some(Error::HyperplaneMass { .. }) => EXIT_FAIL,
        _ => EXIT_PARSE,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let informational = !e.use_stderr();
            let _ = e.print();
            return ExitCode::from(if informational { 0 } else { EXIT_PARSE });
        }
    };
    match run(&cli) {
        Ok(outcome) => {
            match cli.out.as_deref() {
                Some(path) if path.as_os_str() == "-" => {
                    println!("{}", serde_json::to_string_pretty(&outcome.report).expect("report serializes"));
                }
                Some(path) => {
                    let body = outcome.artifact.clone().unwrap_or_else(|| {
                        serde_json::to_string_pretty(&outcome.report).expect("report serializes") + "\n"
                    });
                    if let Err(e) = std::fs::write(path, body) {
                        eprintln!("error: cannot write {}: {e}", path.display());
                        return ExitCode::from(EXIT_PARSE);
                    }
                    println!("{}", outcome.summary);
                }
                None => println!("{}", outcome.summary),
            }
            ExitCode::from(outcome.code)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
