//! `sparsekit` command-line entry point: sparsify, verify, inspect, split,
//! generate, and run acceptance suites over the text formats in
//! `sparsekit::io`. Exit code 0 means every requested check passed.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use sparsekit::bipartite::{
    class_count_report, decompose_quasi_bipartite, sparsify_cut_contraction,
    sparsify_flow_contraction,
};
use sparsekit::extensions::{sparsify_vertex_cover, sparsify_vertex_integrity, ContractionKind};
use sparsekit::flow::{verify_flow_sparsifier, Lambda};
use sparsekit::io::{format_demands, format_network, parse_demands, parse_network};
use sparsekit::mincut::verify_cut_sparsifier;
use sparsekit::network::{Network, VertexId};
use sparsekit::rational::{format_rational, parse_rational, Rational};
use sparsekit::rays::{caratheodory_decompose, enumerate_basic_stars};
use sparsekit::signature::{cut_signature, strong_signature};
use sparsekit::split::split_demand;
use sparsekit::treewidth::{
    cut_contraction_blackbox, format_tree_decomposition, identity_blackbox, mimicking_blackbox,
    normalize_decomposition, parse_tree_decomposition, reduce,
};

use sparsekit_cli::accept::{run_suite, SUITES};
use sparsekit_cli::generate::{
    format_vertex_list, generate, parse_vertex_list, Distribution, GeneratedInstance,
    InstanceKind, InstanceSpec,
};

#[derive(Parser)]
#[command(
    name = "sparsekit",
    about = "Exact cut and flow sparsifiers for capacitated terminal networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Cut,
    Flow,
}

#[derive(Clone, Copy, ValueEnum)]
enum BlackboxArg {
    Identity,
    Mimick,
    CutContraction,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKindArg {
    QuasiBipartite,
    VertexCover,
    VertexIntegrity,
    BoundedTreewidth,
}

#[derive(Clone, Copy, ValueEnum)]
enum DistArg {
    UniformRational,
    SmallSupport,
}

#[derive(Subcommand)]
enum Command {
    /// Contract a quasi-bipartite network into an exact cut sparsifier.
    SparsifyCut {
        network: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
        /// Also print star class counts.
        #[arg(long)]
        report: bool,
    },
    /// Contract a quasi-bipartite network into an exact flow sparsifier.
    SparsifyFlow {
        network: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
        #[arg(long)]
        report: bool,
    },
    /// Reduce a network with a known vertex cover to a sparsifier whose
    /// terminals are the cover.
    SparsifyVc {
        network: PathBuf,
        /// File listing the cover vertices.
        #[arg(long)]
        cover: PathBuf,
        #[arg(long, value_enum, default_value = "cut")]
        kind: KindArg,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Contract the bounded components left by a separator.
    SparsifyVi {
        network: PathBuf,
        /// File listing the separator vertices.
        #[arg(long)]
        separator: PathBuf,
        /// Component size bound.
        #[arg(long)]
        bound: usize,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Sparsify each region of a tree decomposition with a black box and
    /// reassemble.
    TwReduce {
        network: PathBuf,
        /// Tree decomposition file.
        #[arg(long)]
        decomposition: PathBuf,
        #[arg(long, value_enum, default_value = "mimick")]
        blackbox: BlackboxArg,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Check every terminal bipartition min cut of `h` against `g`.
    VerifyCut {
        g: PathBuf,
        h: PathBuf,
        #[arg(long, default_value = "1")]
        quality: String,
    },
    /// Check flow factors of `h` against `g` on the given demand files.
    VerifyFlow {
        g: PathBuf,
        h: PathBuf,
        #[arg(long, required = true)]
        demands: Vec<PathBuf>,
        #[arg(long, default_value = "1")]
        quality: String,
    },
    /// Print the weak and strong signature of every star.
    Signature { network: PathBuf },
    /// Print the conic decomposition of every star.
    Decompose {
        network: PathBuf,
        /// Decompose against the strong signature cone.
        #[arg(long)]
        strong: bool,
    },
    /// Print the basic stars (extreme rays) for k terminals.
    EnumerateRays {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        strong: bool,
        /// Override the enumeration size guardrail.
        #[arg(long)]
        force: bool,
    },
    /// Split a demand routable in the merged star across two
    /// strongly-agreeing stars; prints both parts as demand files.
    SplitDemand {
        /// Capacity vector file of the first star.
        c1: PathBuf,
        /// Capacity vector file of the second star.
        c2: PathBuf,
        /// Demand file over terminals 1..=k.
        demands: PathBuf,
    },
    /// Write a seeded random instance (plus any sidecar its kind promises).
    Generate {
        #[arg(long, value_enum)]
        kind: GenKindArg,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        /// Extra cover vertices (vertex-cover) or separator size
        /// (vertex-integrity).
        #[arg(long, default_value_t = 0)]
        a: usize,
        /// Component size bound (vertex-integrity).
        #[arg(long, default_value_t = 0)]
        b: usize,
        /// Decomposition width (bounded-treewidth).
        #[arg(long, default_value_t = 0)]
        w: usize,
        #[arg(long, value_enum, default_value = "uniform-rational")]
        distribution: DistArg,
        #[arg(long, default_value_t = 1)]
        lo: i64,
        #[arg(long, default_value_t = 64)]
        hi: i64,
        #[arg(long, default_value_t = 16)]
        den: i64,
        /// Comma-separated value menu for small-support mode.
        #[arg(long)]
        values: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run an acceptance suite and print one status line per criterion.
    Accept {
        /// One of: cut, flow, polyhedral, extensions, treewidth, all.
        #[arg(long, default_value = "all")]
        suite: String,
        /// Corrupt one flow sparsifier and require the verifier to notice.
        #[arg(long)]
        fault_injection: bool,
        /// Also write tab-separated records to this file.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    // die quietly on a closed pipe (`sparsekit ... | head`) instead of
    // panicking mid-print
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    if let Ok(workers) = std::env::var("SPARSEKIT_WORKERS") {
        if let Ok(n) = workers.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build_global();
        }
    }
    match dispatch(Cli::parse()) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}

type CliResult<T> = Result<T, String>;

fn str_err(e: sparsekit::error::Error) -> String {
    e.to_string()
}

fn lambda_display(l: &Lambda) -> String {
    match l.as_finite() {
        Some(r) => format_rational(r),
        None => "inf".into(),
    }
}

fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn write_text(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))
}

fn read_network(path: &Path) -> CliResult<Network> {
    parse_network(&read_text(path)?).map_err(str_err)
}

fn read_vertex_set(path: &Path) -> CliResult<BTreeSet<VertexId>> {
    Ok(parse_vertex_list(&read_text(path)?)
        .map_err(str_err)?
        .into_iter()
        .collect())
}

fn read_capacity_vector(path: &Path) -> CliResult<Vec<Rational>> {
    let text = read_text(path)?;
    let mut out = Vec::new();
    for tok in text.split_whitespace() {
        out.push(parse_rational(tok).map_err(str_err)?);
    }
    if out.is_empty() {
        return Err(format!("{}: empty capacity vector", path.display()));
    }
    Ok(out)
}

fn emit_network(net: &Network, out: &Option<PathBuf>) -> CliResult<()> {
    let text = format_network(net);
    match out {
        Some(path) => write_text(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn coords_line(coords: &[Rational]) -> String {
    coords
        .iter()
        .map(format_rational)
        .collect::<Vec<_>>()
        .join(" ")
}

fn dispatch(cli: Cli) -> CliResult<ExitCode> {
    match cli.command {
        Command::SparsifyCut { network, out, report } => {
            let g = read_network(&network)?;
            if report {
                let (weak, strong) = class_count_report(&g).map_err(str_err)?;
                println!("# weak classes: {weak}, strong classes: {strong}");
            }
            let result = sparsify_cut_contraction(&g).map_err(str_err)?;
            emit_network(&result.network, &out)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::SparsifyFlow { network, out, report } => {
            let g = read_network(&network)?;
            if report {
                let (weak, strong) = class_count_report(&g).map_err(str_err)?;
                println!("# weak classes: {weak}, strong classes: {strong}");
            }
            let result = sparsify_flow_contraction(&g).map_err(str_err)?;
            emit_network(&result.network, &out)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::SparsifyVc { network, cover, kind, out } => {
            let g = read_network(&network)?;
            let cover = read_vertex_set(&cover)?;
            let kind = match kind {
                KindArg::Cut => ContractionKind::Cut,
                KindArg::Flow => ContractionKind::Flow,
            };
            let h = sparsify_vertex_cover(&g, &cover, kind).map_err(str_err)?;
            emit_network(&h, &out)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::SparsifyVi { network, separator, bound, out } => {
            let g = read_network(&network)?;
            let separator = read_vertex_set(&separator)?;
            let result = sparsify_vertex_integrity(&g, &separator, bound).map_err(str_err)?;
            emit_network(&result.network, &out)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::TwReduce { network, decomposition, blackbox, out } => {
            let g = read_network(&network)?;
            let raw = parse_tree_decomposition(&read_text(&decomposition)?).map_err(str_err)?;
            let td = normalize_decomposition(&g, &raw).map_err(str_err)?;
            let h = match blackbox {
                BlackboxArg::Identity => reduce(&g, &td, &identity_blackbox),
                BlackboxArg::Mimick => reduce(&g, &td, &mimicking_blackbox),
                BlackboxArg::CutContraction => reduce(&g, &td, &cut_contraction_blackbox),
            }
            .map_err(str_err)?;
            emit_network(&h, &out)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::VerifyCut { g, h, quality } => {
            let g = read_network(&g)?;
            let h = read_network(&h)?;
            let q = parse_rational(&quality).map_err(str_err)?;
            let report = verify_cut_sparsifier(&g, &h, &q).map_err(str_err)?;
            for v in &report.violations {
                println!(
                    "violation: side {:?} has cut {} in g, {} in h",
                    v.side,
                    format_rational(&v.kappa_g),
                    format_rational(&v.kappa_h)
                );
            }
            println!(
                "checked {} bipartitions at quality {}: {}",
                report.checked,
                format_rational(&q),
                if report.passed() { "ok" } else { "FAILED" }
            );
            Ok(if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
        Command::VerifyFlow { g, h, demands, quality } => {
            let g = read_network(&g)?;
            let h = read_network(&h)?;
            let q = parse_rational(&quality).map_err(str_err)?;
            let mut parsed = Vec::new();
            for path in &demands {
                parsed.push(parse_demands(&read_text(path)?, g.terminals()).map_err(str_err)?);
            }
            let report = verify_flow_sparsifier(&g, &h, &parsed, &q).map_err(str_err)?;
            for v in &report.violations {
                println!(
                    "violation: demand {} ({}) has flow factor {} in g, {} in h",
                    v.demand_index,
                    demands[v.demand_index].display(),
                    lambda_display(&v.lambda_g),
                    lambda_display(&v.lambda_h)
                );
            }
            println!(
                "checked {} demands at quality {}: {}",
                report.checked,
                format_rational(&q),
                if report.passed() { "ok" } else { "FAILED" }
            );
            Ok(if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
        Command::Signature { network } => {
            let g = read_network(&network)?;
            let dec = decompose_quasi_bipartite(&g).map_err(str_err)?;
            for (center, c) in &dec.star_part {
                let weak = cut_signature(c).map_err(str_err)?;
                let strong = strong_signature(c).map_err(str_err)?;
                println!(
                    "star {center}: capacities [{}] weak {} strong {}",
                    coords_line(c),
                    weak.to_hex(),
                    strong.to_hex()
                );
            }
            let (weak, strong) = class_count_report(&g).map_err(str_err)?;
            println!("{} stars, {weak} weak classes, {strong} strong classes", dec.star_part.len());
            Ok(ExitCode::SUCCESS)
        }
        Command::Decompose { network, strong } => {
            let g = read_network(&network)?;
            let dec = decompose_quasi_bipartite(&g).map_err(str_err)?;
            for (center, c) in &dec.star_part {
                println!("star {center}: [{}]", coords_line(c));
                let conic = caratheodory_decompose(c, strong, false).map_err(str_err)?;
                for term in &conic.terms {
                    println!(
                        "  weight {} ray [{}]",
                        format_rational(&term.weight),
                        coords_line(&term.ray.coords)
                    );
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::EnumerateRays { k, strong, force } => {
            let rays = enumerate_basic_stars(k, strong, force).map_err(str_err)?;
            for ray in &rays {
                println!("{}", coords_line(&ray.coords));
            }
            println!("# {} rays", rays.len());
            Ok(ExitCode::SUCCESS)
        }
        Command::SplitDemand { c1, c2, demands } => {
            let c1 = read_capacity_vector(&c1)?;
            let c2 = read_capacity_vector(&c2)?;
            if c1.len() != c2.len() {
                return Err(format!(
                    "capacity vectors disagree on k: {} vs {}",
                    c1.len(),
                    c2.len()
                ));
            }
            let terminals: Vec<VertexId> = (1..=c1.len() as VertexId).collect();
            let d = parse_demands(&read_text(&demands)?, &terminals).map_err(str_err)?;
            let result = split_demand(&c1, &c2, &d).map_err(str_err)?;
            print!("# star 1\n{}", format_demands(&result.d1, &terminals));
            print!("# star 2\n{}", format_demands(&result.d2, &terminals));
            Ok(ExitCode::SUCCESS)
        }
        Command::Generate {
            kind,
            k,
            n,
            a,
            b,
            w,
            distribution,
            lo,
            hi,
            den,
            values,
            seed,
            out,
        } => {
            let distribution = match distribution {
                DistArg::UniformRational => Distribution::UniformRational {
                    lo,
                    hi,
                    max_denominator: den,
                },
                DistArg::SmallSupport => match values {
                    Some(list) => {
                        let mut vals = Vec::new();
                        for tok in list.split(',') {
                            vals.push(parse_rational(tok.trim()).map_err(str_err)?);
                        }
                        Distribution::SmallSupport(vals)
                    }
                    None => Distribution::default_small_support(),
                },
            };
            let kind = match kind {
                GenKindArg::QuasiBipartite => InstanceKind::QuasiBipartite,
                GenKindArg::VertexCover => InstanceKind::VertexCover,
                GenKindArg::VertexIntegrity => InstanceKind::VertexIntegrity,
                GenKindArg::BoundedTreewidth => InstanceKind::BoundedTreewidth,
            };
            let spec = InstanceSpec {
                kind,
                k,
                n,
                a,
                b,
                w,
                distribution,
                seed,
            };
            let GeneratedInstance {
                network,
                cover,
                separator,
                decomposition,
            } = generate(&spec).map_err(str_err)?;
            write_text(&out, &format_network(&network))?;
            println!("wrote {}", out.display());
            if let Some(cover) = cover {
                let path = PathBuf::from(format!("{}.cover", out.display()));
                write_text(&path, &format_vertex_list(&cover))?;
                println!("wrote {}", path.display());
            }
            if let Some(separator) = separator {
                let path = PathBuf::from(format!("{}.sep", out.display()));
                write_text(&path, &format_vertex_list(&separator))?;
                println!("wrote {}", path.display());
            }
            if let Some(td) = decomposition {
                let path = PathBuf::from(format!("{}.td", out.display()));
                write_text(&path, &format_tree_decomposition(&td))?;
                println!("wrote {}", path.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Accept {
            suite,
            fault_injection,
            summary,
        } => {
            let Some(reports) = run_suite(&suite, fault_injection) else {
                return Err(format!(
                    "unknown suite {suite:?}; expected one of {}",
                    SUITES.join(", ")
                ));
            };
            for report in &reports {
                println!("{}", report.line());
            }
            let passed = reports.iter().all(|r| r.passed);
            println!(
                "suite {suite}: {}/{} criteria passed",
                reports.iter().filter(|r| r.passed).count(),
                reports.len()
            );
            if let Some(path) = summary {
                let mut text = String::new();
                for report in &reports {
                    text.push_str(&report.record());
                    text.push('\n');
                }
                write_text(&path, &text)?;
            }
            Ok(if passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
    }
}
