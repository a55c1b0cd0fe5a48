//! Command-line front end: every headline computation is one subcommand.

use clap::{Parser, Subcommand};
use qentropy::cov::{build_cov_w1, build_cov_w2_sym, FirstOrderAverages};
use qentropy::entropy::calibrate_nu;
use qentropy::models::{
    critical_chi, BentCoreModel, D2Model, EnergyLandscape, ModelCoefficients, RodModel,
    ToFullModel, ToReducedModel,
};
use qentropy::optimize::{
    construct_d2_counterexample, minimize_multistart, rod_stationary_census, MinimizeOptions,
    PointKind, ProfileKind,
};
use qentropy::phase::{emit_csv, emit_plot_script, sweep, NodeStatus, SweepSpec};
use qentropy::quasi::{
    finite_difference_gradient, quasi_entropy, quasi_entropy_gradient, Group, OrderParameterSet,
};
use qentropy::tensor::SymTensor;
use qentropy::verify;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "qentropy",
    about = "Log-determinant quasi-entropy models for liquid crystals",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the quasi-entropy of a parameter set read from a tensor file
    Eval {
        /// Point group: dinf, cinf, c2, d2, o, t, d4, d3
        #[arg(long)]
        group: String,
        /// Tensor text file, one member tensor per line in group order
        #[arg(long)]
        params_file: PathBuf,
    },
    /// Check the quasi-entropy gradient against finite differences at seeded
    /// random in-domain points
    GradCheck {
        #[arg(long)]
        group: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        samples: usize,
    },
    /// Multi-start minimization of a free-energy model
    Minimize {
        /// Model: rod, d2, bentcore, to-reduced, to-full
        #[arg(long)]
        model: String,
        /// Coefficient file (flat key = value); defaults apply when omitted
        #[arg(long)]
        coeffs_file: Option<PathBuf>,
        #[arg(long, default_value_t = 24)]
        n_starts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Stationary-point census of the uniaxial rod profile
    Census {
        #[arg(long)]
        chi: f64,
    },
    /// Critical couplings of the rod profile, plus their eta values
    Critical {
        #[arg(long, default_value_t = 5.0 / 9.0)]
        nu: f64,
    },
    /// Entropy-strength calibration against the 1D moment problem
    Calibrate,
    /// Construct the two-fold stationary point without a shared eigenframe
    Counterexample {
        #[arg(long)]
        a: f64,
        #[arg(long)]
        c: f64,
    },
    /// Compare explicit quasi-entropies against the covariance oracle
    OracleCheck {
        /// Group name or `all`
        #[arg(long, default_value = "all")]
        group: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 25)]
        samples: usize,
        /// Dump the labeled covariance blocks of one sampled point as CSV
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Run a phase-diagram sweep from a spec file, writing CSV and a gnuplot
    /// script
    Sweep {
        #[arg(long)]
        spec_file: PathBuf,
        /// Output prefix: writes <out>.csv and <out>.gp
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the full acceptance battery
    VerifyAll {
        #[arg(long, default_value_t = 20260809)]
        seed: u64,
    },
}

/// Nine significant digits, the fixed numeric output format.
fn sig9(x: f64) -> String {
    if x == 0.0 {
        return "0.00000000".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let e = x.abs().log10().floor() as i32;
    if (-4..9).contains(&e) {
        format!("{:.*}", (8 - e).max(0) as usize, x)
    } else {
        format!("{x:.8e}")
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(v) = std::env::var("QENTROPY_THREADS") {
        if let Ok(n) = v.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global();
        }
    }
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("ERROR: {e}");
            ExitCode::from(1)
        }
    }
}

fn read_params(group: Group, path: &PathBuf) -> qentropy::Result<OrderParameterSet> {
    let text = std::fs::read_to_string(path)?;
    let mut members = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let t = SymTensor::from_text(line)?;
        members.push(t.traceless_part());
    }
    OrderParameterSet::new(group, members)
}

fn load_coeffs(path: &Option<PathBuf>) -> qentropy::Result<ModelCoefficients> {
    match path {
        None => Ok(ModelCoefficients::default()),
        Some(p) => ModelCoefficients::from_text(&std::fs::read_to_string(p)?),
    }
}

fn build_model(
    name: &str,
    coeffs: &ModelCoefficients,
) -> qentropy::Result<Box<dyn EnergyLandscape>> {
    Ok(match name.to_ascii_lowercase().as_str() {
        "rod" => Box::new(RodModel {
            coeffs: coeffs.clone(),
        }),
        "d2" => Box::new(D2Model {
            c: [coeffs.c1, coeffs.c2, coeffs.c3],
        }),
        "bentcore" | "bent-core" => Box::new(BentCoreModel::new(coeffs.clone())),
        "to-reduced" | "toreduced" => Box::new(ToReducedModel {
            mu1_bar: coeffs.mu1_bar,
            mu2_bar: coeffs.mu2_bar,
        }),
        "to-full" | "tofull" => Box::new(ToFullModel {
            coeffs: coeffs.clone(),
        }),
        other => {
            return Err(qentropy::Error::Parse(format!(
                "unknown model `{other}` (rod, d2, bentcore, to-reduced, to-full)"
            )))
        }
    })
}

fn run(cli: Cli) -> qentropy::Result<ExitCode> {
    match cli.command {
        Command::Eval { group, params_file } => {
            let group = Group::parse(&group)?;
            let params = read_params(group, &params_file)?;
            let v = quasi_entropy(&params)?;
            if v.in_domain {
                println!("{}", sig9(v.value));
            } else {
                println!("out-of-domain");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::GradCheck {
            group,
            seed,
            samples,
        } => {
            let group = Group::parse(&group)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let radius = match group {
                Group::O | Group::T | Group::D4 | Group::D3 => 0.08,
                _ => 0.2,
            };
            let mut worst: f64 = 0.0;
            for _ in 0..samples {
                let p = OrderParameterSet::random_in_domain(group, radius, &mut rng);
                let ga = quasi_entropy_gradient(&p)?;
                let gf = finite_difference_gradient(&p)?;
                for (a, f) in ga.iter().zip(&gf) {
                    worst = worst.max((a - f).abs() / (1.0 + a.abs()));
                }
            }
            println!("max relative gradient deviation: {}", sig9(worst));
            if worst <= 1e-6 {
                Ok(ExitCode::SUCCESS)
            } else {
                eprintln!("ERROR: gradient deviation {worst:.3e} exceeds 1e-6");
                Ok(ExitCode::from(1))
            }
        }
        Command::Minimize {
            model,
            coeffs_file,
            n_starts,
            seed,
        } => {
            let coeffs = load_coeffs(&coeffs_file)?;
            let model = build_model(&model, &coeffs)?;
            let opts = MinimizeOptions {
                n_starts,
                seed,
                ..Default::default()
            };
            let points = minimize_multistart(model.as_ref(), &opts)?;
            println!(
                "{:>3}  {:>16}  {:>11}  {:>10}  fingerprint",
                "#", "energy", "kind", "grad-norm"
            );
            for (i, p) in points.iter().enumerate() {
                let kind = match p.kind {
                    PointKind::Minimizer => "minimizer",
                    PointKind::Saddle => "saddle",
                    PointKind::Maximizer => "maximizer",
                    PointKind::Degenerate => "degenerate",
                };
                let fp: Vec<String> = p.fingerprint.iter().map(|v| sig9(*v)).collect();
                println!(
                    "{i:>3}  {:>16}  {kind:>11}  {:>10.2e}  [{}]",
                    sig9(p.energy),
                    p.grad_norm,
                    fp.join(", ")
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Census { chi } => {
            let census = rod_stationary_census(chi)?;
            println!("coupling chi = {} (regime {})", sig9(chi), census.case);
            for e in &census.entries {
                let kind = match e.kind {
                    ProfileKind::LocalMin => "local minimum",
                    ProfileKind::LocalMax => "local maximum",
                    ProfileKind::Saddle => "saddle",
                };
                println!("x = {:>12}  {kind}", sig9(e.x));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Critical { nu } => {
            let (chi1, chi2) = critical_chi();
            println!("chi1/2 = {}", sig9(chi1 / 2.0));
            println!("chi2/2 = {}", sig9(chi2 / 2.0));
            println!("eta1(nu={}) = {}", sig9(nu), sig9(nu * chi1));
            println!("eta2(nu={}) = {}", sig9(nu), sig9(nu * chi2));
            Ok(ExitCode::SUCCESS)
        }
        Command::Calibrate => {
            println!("{}", sig9(calibrate_nu()));
            Ok(ExitCode::SUCCESS)
        }
        Command::Counterexample { a, c } => {
            let ce = construct_d2_counterexample(a, c)?;
            println!("r^2 = {}", sig9(ce.r_squared));
            println!("c1 = {}, c2 = c3 = {}", sig9(ce.c[0]), sig9(ce.c[1]));
            for i in 0..3 {
                let m = ce.triple.r(i);
                println!(
                    "R{} = [{} {} {}; {} {} {}; {} {} {}]",
                    i + 1,
                    sig9(m[(0, 0)]),
                    sig9(m[(0, 1)]),
                    sig9(m[(0, 2)]),
                    sig9(m[(1, 0)]),
                    sig9(m[(1, 1)]),
                    sig9(m[(1, 2)]),
                    sig9(m[(2, 0)]),
                    sig9(m[(2, 1)]),
                    sig9(m[(2, 2)])
                );
            }
            println!("euler-lagrange residual = {:.3e}", ce.residual);
            println!("commutator norm = {}", sig9(ce.commutator_norm));
            Ok(ExitCode::SUCCESS)
        }
        Command::OracleCheck {
            group,
            seed,
            samples,
            dump,
        } => {
            let groups: Vec<Group> = if group == "all" {
                Group::ALL.to_vec()
            } else {
                vec![Group::parse(&group)?]
            };
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut all_ok = true;
            for g in groups {
                let second_order = matches!(g, Group::Dinf | Group::Cinf | Group::C2 | Group::D2);
                let radius = if second_order { 0.2 } else { 0.08 };
                let mut worst: f64 = 0.0;
                let mut offsets: Vec<f64> = Vec::new();
                for _ in 0..samples {
                    let p = OrderParameterSet::random_in_domain(g, radius, &mut rng);
                    let explicit = quasi_entropy(&p)?.value;
                    if second_order {
                        let avg = FirstOrderAverages::from_group(&p)?;
                        let oracle = build_cov_w1(&avg).neg_logdet().ok_or_else(|| {
                            qentropy::Error::OutOfDomain("oracle not PD on in-domain point".into())
                        })?;
                        worst = worst.max((oracle - explicit).abs() / (1.0 + explicit.abs()));
                    } else {
                        let blocks = build_cov_w2_sym(g, &p)?;
                        if let Some(d) = dump.as_ref() {
                            if offsets.is_empty() {
                                std::fs::write(d, blocks.to_csv())?;
                            }
                        }
                        let oracle = blocks.neg_logdet_sum().ok_or_else(|| {
                            qentropy::Error::OutOfDomain("oracle not PD on in-domain point".into())
                        })?;
                        offsets.push(oracle - explicit);
                    }
                }
                let (ok, what) = if second_order {
                    (
                        worst <= 1e-10,
                        format!("max relative deviation {worst:.3e}"),
                    )
                } else {
                    let drift = offsets
                        .windows(2)
                        .map(|w| (w[0] - w[1]).abs())
                        .fold(0.0f64, f64::max);
                    (drift <= 1e-8, format!("max offset drift {drift:.3e}"))
                };
                println!(
                    "{}  {:5}  {}",
                    if ok { "PASS" } else { "FAIL" },
                    g.name(),
                    what
                );
                all_ok &= ok;
            }
            if let Some(d) = dump.as_ref() {
                println!("blocks dumped to {}", d.display());
            }
            if all_ok {
                Ok(ExitCode::SUCCESS)
            } else {
                eprintln!("ERROR: oracle comparison failed");
                Ok(ExitCode::from(1))
            }
        }
        Command::Sweep { spec_file, out } => {
            let spec = SweepSpec::from_text(&std::fs::read_to_string(&spec_file)?)?;
            let diagram = sweep(&spec)?;
            let csv_path = out.with_extension("csv");
            let gp_path = out.with_extension("gp");
            emit_csv(&diagram, &csv_path)?;
            emit_plot_script(&diagram, &gp_path)?;
            let failed = diagram
                .nodes
                .iter()
                .filter(|n| n.status == NodeStatus::Failed)
                .count();
            println!(
                "swept {} nodes ({} failed); wrote {} and {}",
                diagram.nodes.len(),
                failed,
                csv_path.display(),
                gp_path.display()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::VerifyAll { seed } => {
            let reports = verify::run_all(seed);
            let mut all_ok = true;
            for r in &reports {
                println!("{}", r.line());
                all_ok &= r.passed;
            }
            if all_ok {
                Ok(ExitCode::SUCCESS)
            } else {
                eprintln!("ERROR: acceptance battery failed");
                Ok(ExitCode::from(1))
            }
        }
    }
}
