use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use qpt_core::exchange::{
    explore, lift_tilt_search_dir, quotient_graph, regularity_report, subset_indices, Context, Direction, Explore,
};
use qpt_core::io;
use qpt_core::path_algebra::{eje_quiver, jacobian_dims, max_degree_from_env, Finiteness};
use qpt_core::polygon::{exconvrep_sequence, polygon_quiver};
use qpt_core::qp::{mutate, restrict};
use qpt_core::silting::{seg_bullet, seg_explore};
use qpt_core::{Error, Qp, Result, VertexSubset};

#[derive(Parser)]
#[command(name = "qpt", version, about = "Quivers with potential, exchange graphs and silting")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Dir {
    Forward,
    Both,
}

#[derive(Subcommand)]
enum Command {
    /// Check a QP file.
    Validate { file: PathBuf },
    /// Mutate at a vertex and print the QP.
    Mutate {
        file: PathBuf,
        #[arg(short)]
        k: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Restrict to a vertex subset.
    Restrict {
        file: PathBuf,
        #[arg(short = 'I', value_delimiter = ',', required = true)]
        subset: Vec<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Graded dimensions of the Jacobian algebra.
    Jacobian {
        file: PathBuf,
        #[arg(long)]
        max_degree: Option<usize>,
    },
    /// Quiver of eJe with e the idempotent of the complement of I.
    Eje {
        file: PathBuf,
        #[arg(short = 'I', value_delimiter = ',', required = true)]
        subset: Vec<String>,
        #[arg(long)]
        max_degree: Option<usize>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Exchange graph of hearts by breadth-first tilting.
    Explore {
        file: PathBuf,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        #[arg(long, value_enum, default_value_t = Dir::Both)]
        direction: Dir,
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Quotient exchange graph for the subcategory generated by I.
    Quotient {
        file: PathBuf,
        #[arg(short = 'I', value_delimiter = ',', required = true)]
        subset: Vec<String>,
        #[arg(long, default_value_t = 6)]
        depth: usize,
        /// Keep only the classes meeting the hearts listed in this file.
        #[arg(long)]
        region: Option<PathBuf>,
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Silting exchange graph, or its partial version when I is given.
    Silting {
        file: PathBuf,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        #[arg(short = 'I', value_delimiter = ',')]
        subset: Vec<String>,
        #[arg(long)]
        region: Option<PathBuf>,
        #[arg(long, default_value_t = 6)]
        bound: usize,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Tilts at simples of I that make the tilt at k liftable.
    Lift {
        file: PathBuf,
        #[arg(short)]
        k: String,
        #[arg(short = 'I', value_delimiter = ',', required = true)]
        subset: Vec<String>,
        #[arg(long, default_value_t = 6)]
        bound: usize,
        /// Starting heart as tilts from the standard heart, e.g. `1+,2-`.
        #[arg(long, value_delimiter = ',')]
        word: Vec<String>,
        #[arg(long)]
        backward: bool,
    },
    /// Flip sequence for a glued pair of polygons.
    Polygon {
        file: PathBuf,
        #[arg(long)]
        quiver: Option<PathBuf>,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load(path: &Path) -> Result<Qp> {
    io::parse_qp(&read(path)?)
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("plain data");
    s.push('\n');
    s
}

fn vertex_index(qp: &Qp, v: &str) -> Result<usize> {
    qp.quiver
        .vertex_index(v)
        .ok_or_else(|| Error::UnknownVertex(v.to_string()))
}

fn region_keep(eg: &qpt_core::exchange::ExchangeGraph, path: &Path) -> Result<Vec<String>> {
    let keys = io::parse_region(&read(path)?)?;
    for k in &keys {
        if eg.find(k).is_none() {
            return Err(Error::Parse(format!("region heart `{k}` not reached")));
        }
    }
    Ok(keys)
}

fn finiteness(f: &Finiteness) -> String {
    match f {
        Finiteness::Finite(t) => format!("Finite({t})"),
        Finiteness::InfiniteDetected => "InfiniteDetected".into(),
        Finiteness::Unknown(d) => format!("Unknown({d})"),
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Validate { file } => {
            let qp = load(&file)?;
            println!(
                "ok: {} vertices, {} arrows, {} potential terms",
                qp.n(),
                qp.quiver.arrows.len(),
                qp.potential.len()
            );
        }
        Command::Mutate { file, k, output } => {
            let qp = load(&file)?;
            emit(&output, &io::serialize_qp(&mutate(&qp, &k)?))?;
        }
        Command::Restrict { file, subset, output } => {
            let qp = load(&file)?;
            let sub = VertexSubset::new(subset);
            sub.check(&qp)?;
            emit(&output, &io::serialize_qp(&restrict(&qp, &sub)))?;
        }
        Command::Jacobian { file, max_degree } => {
            let qp = load(&file)?;
            let d = jacobian_dims(&qp, max_degree.unwrap_or_else(max_degree_from_env))?;
            let dims: Vec<String> = d.dims.iter().map(usize::to_string).collect();
            println!("dims: {}", dims.join(" "));
            println!("verdict: {}", finiteness(&d.verdict));
            if let Finiteness::Unknown(b) = d.verdict {
                return Err(Error::BoundExceeded(b));
            }
        }
        Command::Eje {
            file,
            subset,
            max_degree,
            output,
        } => {
            let qp = load(&file)?;
            let e = eje_quiver(
                &qp,
                &VertexSubset::new(subset),
                max_degree.unwrap_or_else(max_degree_from_env),
            )?;
            emit(&output, &io::serialize_qp(&e.to_qp()))?;
        }
        Command::Explore {
            file,
            depth,
            direction,
            json,
            dot,
        } => {
            let qp = load(&file)?;
            let ctx = Context::new(&qp)?;
            let dir = match direction {
                Dir::Forward => Explore::Forward,
                Dir::Both => Explore::Both,
            };
            let eg = explore(&ctx, depth, dir);
            if let Some(p) = json {
                write(&p, &pretty(&io::exchange_graph_value(&eg)))?;
            }
            if let Some(p) = dot {
                write(&p, &io::exchange_graph_dot(&eg))?;
            }
            let rep = regularity_report(&eg);
            println!("hearts: {}", eg.len());
            println!("edges: {}", eg.edges.len());
            println!(
                "representable: {}",
                eg.hearts.iter().filter(|h| h.is_representable()).count()
            );
            println!("interior: {}", rep.degrees.len());
            println!("regular: {}", rep.is_regular(qp.n()));
        }
        Command::Quotient {
            file,
            subset,
            depth,
            region,
            json,
            dot,
        } => {
            let qp = load(&file)?;
            let sub = subset_indices(&qp, &VertexSubset::new(subset))?;
            let ctx = Context::new(&qp)?;
            let eg = explore(&ctx, depth, Explore::Both);
            let mut q = quotient_graph(&eg, &sub);
            if let Some(r) = region {
                let keys = region_keep(&eg, &r)?;
                let mut keep: Vec<usize> = keys
                    .iter()
                    .filter_map(|k| eg.find(k).and_then(|v| q.class_containing(v)))
                    .collect();
                keep.sort_unstable();
                keep.dedup();
                q = q.restrict(&keep);
            }
            if let Some(p) = json {
                write(&p, &pretty(&io::quotient_graph_value(&eg, &q)))?;
            }
            if let Some(p) = dot {
                write(&p, &io::quotient_graph_dot(&eg, &q))?;
            }
            let m = q.comp.len();
            let fe: Vec<usize> = (0..q.classes.len()).filter(|&c| q.classes[c].fully_expanded).collect();
            let regular = fe.iter().all(|&c| q.out_degree(c) == m && q.in_degree(c) == m);
            println!("classes: {}", q.classes.len());
            println!("edges: {}", q.edges.len());
            println!("fully expanded: {}", fe.len());
            println!("regular: {regular}");
        }
        Command::Silting {
            file,
            depth,
            subset,
            region,
            bound,
            json,
        } => {
            let qp = load(&file)?;
            let ctx = Context::new(&qp)?;
            if subset.is_empty() {
                let g = seg_explore(&ctx, depth, Explore::Both)?;
                if let Some(p) = json {
                    write(&p, &pretty(&io::silting_graph_value(&g)))?;
                }
                println!("silting objects: {}", g.states.len());
                println!("edges: {}", g.edges.len());
            } else {
                let sub = subset_indices(&qp, &VertexSubset::new(subset))?;
                let eg = explore(&ctx, depth, Explore::Both);
                let mut q = quotient_graph(&eg, &sub);
                if let Some(r) = region {
                    let keys = region_keep(&eg, &r)?;
                    let mut keep: Vec<usize> = keys
                        .iter()
                        .filter_map(|k| eg.find(k).and_then(|v| q.class_containing(v)))
                        .collect();
                    keep.sort_unstable();
                    keep.dedup();
                    q = q.restrict(&keep);
                }
                let g = seg_bullet(&ctx, &q, bound)?;
                if let Some(p) = json {
                    write(&p, &pretty(&io::partial_silting_value(&g)))?;
                }
                println!("partial silting objects: {}", g.vertices.len());
                println!("edges: {}", g.edges.len());
                println!("unverified edges: {}", g.unverified.len());
            }
        }
        Command::Lift {
            file,
            k,
            subset,
            bound,
            word,
            backward,
        } => {
            let qp = load(&file)?;
            let sub = subset_indices(&qp, &VertexSubset::new(subset))?;
            let ctx = Context::new(&qp)?;
            let mut h = ctx.standard_heart();
            for w in &word {
                let (v, dir) = match (w.strip_suffix('+'), w.strip_suffix('-')) {
                    (Some(v), _) => (v, Direction::Forward),
                    (_, Some(v)) => (v, Direction::Backward),
                    _ => return Err(Error::Parse(format!("tilt `{w}` needs a + or - suffix"))),
                };
                h = ctx.tilt(&h, vertex_index(&qp, v)?, dir)?;
            }
            let k = vertex_index(&qp, &k)?;
            let dir = if backward {
                Direction::Backward
            } else {
                Direction::Forward
            };
            let lift = lift_tilt_search_dir(&ctx, &h, k, &sub, dir, bound)?;
            let tilted = ctx.tilt(&lift.heart, k, dir)?;
            let names = qp.vertices();
            for (i, d) in &lift.steps {
                let sign = if *d == Direction::Forward { '+' } else { '-' };
                println!("tilt {}{sign}", names[*i]);
            }
            println!("lifted heart: {}", lift.heart.key);
            println!("tilted heart: {}", tilted.key);
        }
        Command::Polygon { file, quiver } => {
            let (pp, t) = io::parse_polygon(&read(&file)?)?;
            let seq = exconvrep_sequence(&pp, &t)?;
            let flips: Vec<String> = seq.flips.iter().map(|(a, b)| format!("({a},{b})")).collect();
            println!("flips: {}", flips.join(" "));
            println!("first phase: {}", seq.first_phase);
            for (name, side) in [("d_k", qpt_core::polygon::Side::K), ("d_l", qpt_core::polygon::Side::L)] {
                match pp.diagonal_d(side) {
                    Some((a, b)) => println!("{name}: ({a},{b}) present={}", seq.result.chords.contains(&(a, b))),
                    None => println!("{name}: none"),
                }
            }
            if let Some(p) = quiver {
                write(&p, &io::serialize_qp(&polygon_quiver(&pp, &seq.result)?))?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
