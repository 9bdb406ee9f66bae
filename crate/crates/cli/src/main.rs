use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use ordrep::accuracy::{concordance, concordance_of_keys};
use ordrep::cluster::{cluster_embed_line, line_embed, line_embed_halving, line_keys, single_linkage, verify_line};
use ordrep::experiments::{confidence_lower_bound, coverage_experiment, normal_quantile, render_svg, ConfidenceQuery};
use ordrep::neighbours::{
    config_neighbours, decompose_bi_rooted, fn_embed_plane, neighbour_digraph, nn_embed_plane, nn_statistics, plane_nn_feasible,
    Decomposition, Feasibility, Which,
};
use ordrep::prover::{check_proof, parse_order_text, prove, render_proof, CheckOutcome, ConstraintMode, ProveLimits, ProveResult};
use ordrep::rubberband::{optimize_restarts, Init, RubberBandParams};
use ordrep::{io, EdgeOrder, Metric, MetricSpace, RepresentationKind, TiePolicy};

#[derive(Parser)]
#[command(name = "ordrep", version, about = "Order-preserving representations of finite metric spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Full,
    Extremal,
}

#[derive(Clone, Copy, ValueEnum)]
enum WhichArg {
    Nearest,
    Farthest,
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricArg {
    L2,
    L1,
}

#[derive(Subcommand)]
enum Command {
    /// Order accuracy of an image against a reference
    Accuracy {
        /// reference distance matrix
        #[arg(long, conflicts_with = "order", required_unless_present = "order")]
        dist: Option<PathBuf>,
        /// reference edge order
        #[arg(long)]
        order: Option<PathBuf>,
        /// image points
        #[arg(long, conflicts_with = "image_order", required_unless_present = "image_order")]
        points: Option<PathBuf>,
        /// image edge order
        #[arg(long)]
        image_order: Option<PathBuf>,
    },
    /// Rubber-band optimisation of order accuracy
    Optimize {
        #[arg(long)]
        order: PathBuf,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 0.05)]
        fraction: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        max_epochs: usize,
        #[arg(long, default_value_t = 1)]
        restarts: usize,
        #[arg(long)]
        warm_start: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Try to refute an edge order in the plane, or check a transcript.
    /// Exit code 0: refuted (or a valid refutation); 2: no refutation (or a
    /// valid transcript without one); 1: error or invalid transcript.
    Prove {
        /// edge order, either `i-j` tokens or `de < ad < ...`
        #[arg(long, required_unless_present = "check")]
        order: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Mode::Full)]
        mode: Mode,
        #[arg(long, default_value_t = 3)]
        max_depth: usize,
        #[arg(long, default_value_t = 10_000)]
        max_lines: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        /// check a transcript instead of proving
        #[arg(long, conflicts_with = "order")]
        check: Option<PathBuf>,
    },
    /// Nearest or farthest neighbour digraph of a metric space
    Nn {
        #[arg(long)]
        dist: PathBuf,
        #[arg(long, value_enum, default_value_t = WhichArg::Nearest)]
        which: WhichArg,
        /// decide whether the nearest neighbour graph is realisable in the plane
        /// and construct a realisation when it is
        #[arg(long)]
        check_plane: bool,
        /// digraph edges
        #[arg(long)]
        out: Option<PathBuf>,
        /// plane realisation as points (with --check-plane)
        #[arg(long)]
        points: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Monte Carlo statistics of nearest neighbour graphs
    Nnstats {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Plane points with the same farthest neighbours as a metric space
    EmbedFarthest {
        #[arg(long)]
        dist: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Integer line coordinates reproducing the single-linkage cluster tree
    EmbedCluster {
        #[arg(long)]
        dist: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Line map with guaranteed order accuracy, built from balanced bisections
    EmbedLine {
        #[arg(long)]
        dist: PathBuf,
        #[arg(long)]
        certificates: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// accept point counts that are not powers of two, without the guarantee
        #[arg(long)]
        best_effort: bool,
    },
    /// Orders on four or five points shown representable by random sampling
    Coverage {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = MetricArg::L2)]
        metric: MetricArg,
        /// order, local-order, extremal, nearest, farthest, two-nearest-set, first-second-nearest
        #[arg(long, default_value = "order")]
        kind: String,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Lower confidence bound for a success probability. The bound is
    /// evaluated for the given S; pass S + 0.5 for the continuity-corrected
    /// form.
    Confidence {
        #[arg(long = "s")]
        s: f64,
        #[arg(long = "N")]
        n: u64,
        #[arg(long, default_value_t = 0.995)]
        beta: f64,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_space(path: &Path) -> Result<MetricSpace> {
    let m = io::parse_matrix(&read(path)?)?;
    Ok(MetricSpace::new(&m, TiePolicy::Reject)?)
}

fn load_order(path: &Path) -> Result<EdgeOrder> {
    let text = read(path)?;
    if text.contains('<') {
        Ok(parse_order_text(text.trim())?)
    } else {
        Ok(io::parse_order(&text)?)
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Accuracy { dist, order, points, image_order } => {
            let reference = match (dist, order) {
                (Some(d), _) => EdgeOrder::from_space(&load_space(&d)?),
                (None, Some(o)) => load_order(&o)?,
                _ => bail!("give --dist or --order"),
            };
            let c = match (points, image_order) {
                (Some(p), _) => concordance(&reference, &io::parse_points(&read(&p)?)?)?,
                (None, Some(o)) => {
                    let image = load_order(&o)?;
                    let keys: Vec<f64> = image.ranking().iter().map(|&r| r as f64).collect();
                    concordance_of_keys(&reference, &keys)?
                }
                _ => bail!("give --points or --image-order"),
            };
            let a = c.accuracy();
            println!("accuracy {}/{} = {:.6}", a.numer(), a.denom(), c.accuracy_f64());
            println!("concordant {} discordant {} tied {}", c.concordant, c.discordant, c.ties);
            if c.ties == 0 {
                let tau = a * 2 - 1;
                println!("tau {}/{}", tau.numer(), tau.denom());
            }
        }
        Command::Optimize { order, dim, fraction, seed, max_epochs, restarts, warm_start, out, svg } => {
            let target = load_order(&order)?;
            let params = RubberBandParams { fraction, max_epochs, seed, dim, ..RubberBandParams::default() };
            let init = match warm_start {
                Some(p) => Init::WarmStart(io::parse_points(&read(&p)?)?),
                None => Init::RandomUnitCube,
            };
            let r = optimize_restarts(&target, &params, &init, restarts)?;
            let a = r.best_accuracy();
            eprintln!(
                "accuracy {}/{} after {} epochs, {}",
                a.numer(),
                a.denom(),
                r.epochs_used,
                if r.success { "order represented" } else { "not represented" }
            );
            emit(out.as_deref(), &io::write_points(&r.config))?;
            if let Some(p) = svg {
                emit(Some(&p), &render_svg(&r.config, None, None)?)?;
            }
        }
        Command::Prove { order, mode, max_depth, max_lines, out, check } => {
            if let Some(path) = check {
                return match check_proof(&read(&path)?) {
                    Ok(CheckOutcome::Refutation) => {
                        println!("valid refutation");
                        Ok(ExitCode::SUCCESS)
                    }
                    Ok(CheckOutcome::NonRefutation) => {
                        println!("valid, but no refutation");
                        Ok(ExitCode::from(2))
                    }
                    Err(e) => {
                        println!("invalid: {e}");
                        Ok(ExitCode::from(1))
                    }
                };
            }
            let order = load_order(&order.expect("required by clap"))?;
            let mode = match mode {
                Mode::Full => ConstraintMode::FullOrder,
                Mode::Extremal => ConstraintMode::ExtremalOnly,
            };
            let result = prove(&order, mode, ProveLimits { max_depth, max_lines })?;
            emit(out.as_deref(), &render_proof(result.log()))?;
            return Ok(match result {
                ProveResult::Refuted(_) => {
                    eprintln!("refuted");
                    ExitCode::SUCCESS
                }
                ProveResult::Unknown { reason, .. } => {
                    eprintln!("unknown: {reason}");
                    ExitCode::from(2)
                }
            });
        }
        Command::Nn { dist, which, check_plane, out, points, svg } => {
            let space = load_space(&dist)?;
            let which = match which {
                WhichArg::Nearest => Which::Nearest,
                WhichArg::Farthest => Which::Farthest,
            };
            let g = neighbour_digraph(&space, which);
            emit(out.as_deref(), &io::write_edges(g.edges()))?;
            let forest = match decompose_bi_rooted(&g)? {
                Decomposition::Valid(f) => f,
                Decomposition::Invalid(why) => bail!("not a bi-rooted forest: {why}"),
            };
            eprintln!(
                "{} components, depth {}, at most {} proper children",
                forest.components.len(),
                forest.depth(),
                forest.max_proper_children()
            );
            if check_plane {
                if !matches!(which, Which::Nearest) {
                    bail!("--check-plane applies to nearest neighbour graphs");
                }
                match plane_nn_feasible(&forest) {
                    Feasibility::Infeasible => {
                        println!("infeasible: a vertex has five or more proper children");
                        return Ok(ExitCode::from(2));
                    }
                    Feasibility::OutOfScope => println!("undecided: no vertex has five proper children"),
                    Feasibility::Feasible => println!("feasible"),
                }
                let config = nn_embed_plane(&forest)?;
                if let Some(p) = points {
                    emit(Some(&p), &io::write_points(&config))?;
                }
                if let Some(p) = svg {
                    let nn = config_neighbours(&config, Which::Nearest);
                    emit(Some(&p), &render_svg(&config, Some(&nn), None)?)?;
                }
            }
        }
        Command::Nnstats { n, trials, seed } => {
            let s = nn_statistics(n, trials, seed)?;
            println!("biroot_prob {:.5}", s.biroot_prob);
            println!("components_per_point {:.5}", s.components_per_point);
            println!("four_children_pass_rate {:.5}", s.four_children_pass_rate);
        }
        Command::EmbedFarthest { dist, out, svg } => {
            let space = load_space(&dist)?;
            let config = fn_embed_plane(&space)?;
            emit(out.as_deref(), &io::write_points(&config))?;
            if let Some(p) = svg {
                let f = config_neighbours(&config, Which::Farthest);
                emit(Some(&p), &render_svg(&config, None, Some(&f))?)?;
            }
        }
        Command::EmbedCluster { dist, out } => {
            let space = load_space(&dist)?;
            let tree = single_linkage(&space);
            let line = cluster_embed_line(&tree)?;
            if !verify_line(&tree, &line) {
                bail!("construction does not reproduce the cluster tree");
            }
            emit(out.as_deref(), &io::write_coords(&line.coords))?;
        }
        Command::EmbedLine { dist, certificates, out, seed, best_effort } => {
            let space = load_space(&dist)?;
            let emb = if best_effort { line_embed(&space, seed)? } else { line_embed_halving(&space, seed)? };
            emit(out.as_deref(), &io::write_coords(&emb.line.coords))?;
            if let Some(p) = certificates {
                let mut text = String::from("# a b cut total gamma gamma_prime reflected\n");
                for c in &emb.certificates {
                    let list = |v: &[usize]| v.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
                    text.push_str(&format!(
                        "{} {} {} {} {} {} {}\n",
                        list(&c.bisection.a),
                        list(&c.bisection.b),
                        c.bisection.cut,
                        c.bisection.total,
                        c.gamma,
                        c.gamma_prime,
                        c.reflected
                    ));
                }
                emit(Some(&p), &text)?;
            }
            let c = concordance_of_keys(&EdgeOrder::from_space(&space), &line_keys(&emb.line))?;
            eprintln!("accuracy {:.6}", c.accuracy_f64());
        }
        Command::Coverage { n, metric, kind, trials, seed } => {
            let kind: RepresentationKind = kind.parse()?;
            let metric = match metric {
                MetricArg::L2 => Metric::Euclidean,
                MetricArg::L1 => Metric::Manhattan,
            };
            let r = coverage_experiment(n, metric, kind, trials, seed)?;
            println!(
                "{} of {} orders ({:.4}) have a {} representation; {} distinct sampled orders",
                r.distinct_orders_found,
                r.total_orders,
                r.fraction_of_factorial(),
                r.kind,
                r.sampled.distinct()
            );
        }
        Command::Confidence { s, n, beta } => {
            let bound = confidence_lower_bound(ConfidenceQuery { successes: s, trials: n, beta })?;
            println!("c {:.6}", normal_quantile(beta)?);
            println!("lower bound {bound:.6}");
            println!("upper bound for the complement {:.6}", 1.0 - bound);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
