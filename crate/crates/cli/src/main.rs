//! `pmcover`: perfect matching covers of r-graphs from the command line.
//!
//! Exit codes: 0 ok, 1 check failed, 2 parse or usage error, 3 certificate
//! belongs to another graph, 4 enumeration limit reached.

use std::fs;
use std::ops::ControlFlow;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use pmcover_core::certificate::{fingerprint, verify_cover, Certificate, TreeSummary, VerifyReport};
use pmcover_core::decomposition::{DecompositionTree, TreeNode};
use pmcover_core::generate::random_r_graph;
use pmcover_core::graph::RGraphCheck;
use pmcover_core::graph_file::{read_graph_file, write_graph};
use pmcover_core::matching::for_each_pm;
use pmcover_core::{decompose, solve_r_graph, MultiGraph, SolveOptions};

const OK: u8 = 0;
const CHECK_FAILED: u8 = 1;
const PARSE_ERROR: u8 = 2;
const FINGERPRINT_MISMATCH: u8 = 3;
const LIMIT_REACHED: u8 = 4;

#[derive(Parser)]
#[command(name = "pmcover", version, about = "Perfect matching covers of r-graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Report n, m, r, the minimum odd cut and the r-graph verdict.
    Validate {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Solve and write a certificate (to stdout without --output).
    Solve {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Solve sibling subtrees in parallel.
        #[arg(long)]
        parallel: bool,
    },
    /// Print the tight cut decomposition tree.
    Decompose {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Check a certificate against a graph file.
    Verify {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long)]
        certificate: PathBuf,
    },
    /// Write a random r-graph: the union of r random perfect matchings of K_n.
    Gen {
        #[arg(short)]
        n: usize,
        #[arg(short)]
        r: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// List perfect matchings as sorted edge id lists.
    Enumerate {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long)]
        limit: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

/// Early exit with a message on stderr.
struct Fail(u8, String);

type Outcome = Result<u8, Fail>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Validate { input, format } => validate(&input, format),
        Command::Solve { input, output, parallel } => solve(&input, output.as_deref(), parallel),
        Command::Decompose { input, format } => decomposition(&input, format),
        Command::Verify { input, certificate } => verify(&input, &certificate),
        Command::Gen { n, r, seed, output } => generate(n, r, seed, output.as_deref()),
        Command::Enumerate { input, limit, format } => enumerate(&input, limit, format),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Fail(code, message)) => {
            eprintln!("error: {message}");
            ExitCode::from(code)
        }
    }
}

fn load(path: &Path) -> Result<MultiGraph, Fail> {
    read_graph_file(path).map_err(|e| Fail(PARSE_ERROR, format!("{}: {e}", path.display())))
}

fn emit(output: Option<&Path>, text: &str) -> Result<(), Fail> {
    match output {
        Some(path) => fs::write(path, text).map_err(|e| Fail(CHECK_FAILED, format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn show(n: Option<usize>) -> String {
    n.map_or_else(|| "none".to_string(), |v| v.to_string())
}

/// Why `g` is not an r-graph, with the small odd cut when there is one.
fn rejection(check: &RGraphCheck) -> String {
    let mut out = format!("not an r-graph: {:?}", check.failure.as_ref().expect("failed check"));
    if let Some(cut) = &check.witness {
        out.push_str(&format!(
            "; odd cut of size {} with shore {:?} (edges {:?})",
            cut.size(),
            cut.shore(),
            cut.edge_ids()
        ));
    }
    out
}

fn require_r_graph(g: &MultiGraph) -> Result<(), Fail> {
    let check = g.r_graph_check();
    if check.ok {
        Ok(())
    } else {
        Err(Fail(CHECK_FAILED, rejection(&check)))
    }
}

fn validate(input: &Path, format: Format) -> Outcome {
    let g = load(input)?;
    let check = g.r_graph_check();
    match format {
        Format::Text => {
            println!("n={}, m={}", g.vertex_count(), g.edge_count());
            println!(
                "r={}, min_odd_cut={}, r-graph: {}",
                show(check.r),
                show(check.min_odd_cut),
                if check.ok { "yes" } else { "no" }
            );
            if !check.ok {
                println!("{}", rejection(&check));
            }
        }
        Format::Json => {
            let value = json!({
                "n": g.vertex_count(),
                "m": g.edge_count(),
                "r": check.r,
                "min_odd_cut": check.min_odd_cut,
                "r_graph": check.ok,
                "failure": check.failure.as_ref().map(|f| format!("{f:?}")),
                "witness": check.witness.as_ref().map(|c| c.shore().to_vec()),
            });
            println!("{}", serde_json::to_string_pretty(&value).expect("plain data"));
        }
    }
    Ok(if check.ok { OK } else { CHECK_FAILED })
}

fn report_lines(report: &VerifyReport) -> String {
    format!(
        "coverage: {}\neach term is a perfect matching: {}\nfractional entries are +1/2: {}\n\
         halves: {} (bound ok: {})\nsupport: {} (bound ok: {}, advisory)\nindependent: {}\n\
         max |coefficient|: {} (bound {}, ok: {}, advisory)\ncoefficient sum is r: {}\nverdict: {}\n",
        report.coverage_ok,
        report.each_term_is_pm,
        report.fractional_ok,
        report.halves_count,
        report.halves_bound_ok,
        report.support,
        report.support_bound_ok,
        report.independent,
        report.inf_norm(),
        report.norm_bound,
        report.norm_bound_ok,
        report.coeff_sum_is_r,
        if report.passes_mandatory() { "pass" } else { "FAIL" },
    )
}

fn solve(input: &Path, output: Option<&Path>, parallel: bool) -> Outcome {
    let g = load(input)?;
    require_r_graph(&g)?;
    let (sol, tree) =
        solve_r_graph(&g, SolveOptions { parallel }).map_err(|e| Fail(CHECK_FAILED, format!("solver failed: {e}")))?;
    let cert = Certificate::new(&g, &sol, &tree);
    emit(output, &cert.to_json())?;
    if output.is_some() {
        print!("{}", report_lines(&cert.report));
    }
    Ok(if cert.report.passes_mandatory() { OK } else { CHECK_FAILED })
}

fn tree_json(tree: &DecompositionTree) -> Value {
    let graph = json!({ "n": tree.graph.vertex_count(), "m": tree.graph.edge_count() });
    match &tree.node {
        TreeNode::Leaf(class) => json!({ "graph": graph, "leaf": class }),
        TreeNode::Split(split) => json!({
            "graph": graph,
            "cut": { "shore": split.cut.shore(), "edges": split.cut.edge_ids() },
            "left": tree_json(&split.left),
            "right": tree_json(&split.right),
        }),
    }
}

fn tree_text(tree: &DecompositionTree, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    let (n, m) = (tree.graph.vertex_count(), tree.graph.edge_count());
    match &tree.node {
        TreeNode::Leaf(class) => out.push_str(&format!("{pad}leaf {} (n={n}, m={m})\n", class.name())),
        TreeNode::Split(split) => {
            out.push_str(&format!(
                "{pad}cut (n={n}, m={m}) shore {:?} edges {:?}\n",
                split.cut.shore(),
                split.cut.edge_ids()
            ));
            tree_text(&split.left, depth + 1, out);
            tree_text(&split.right, depth + 1, out);
        }
    }
}

fn decomposition(input: &Path, format: Format) -> Outcome {
    let g = load(input)?;
    require_r_graph(&g)?;
    let tree = decompose(&g).map_err(|e| Fail(CHECK_FAILED, format!("decomposition failed: {e}")))?;
    match format {
        Format::Text => {
            let mut out = String::new();
            tree_text(&tree, 0, &mut out);
            println!("{out}p={}", tree.petersen_count());
        }
        Format::Json => {
            let value = json!({ "tree": tree_json(&tree), "p": tree.petersen_count() });
            println!("{}", serde_json::to_string_pretty(&value).expect("plain data"));
        }
    }
    Ok(OK)
}

fn verify(input: &Path, certificate: &Path) -> Outcome {
    let g = load(input)?;
    let text = fs::read_to_string(certificate)
        .map_err(|e| Fail(PARSE_ERROR, format!("cannot read {}: {e}", certificate.display())))?;
    let cert = Certificate::from_json(&text).map_err(|e| Fail(PARSE_ERROR, format!("{}: {e}", certificate.display())))?;
    let stored = cert.graph().map_err(|e| Fail(PARSE_ERROR, e.to_string()))?;
    let actual = fingerprint(&g);
    if cert.graph.fingerprint != actual || fingerprint(&stored) != actual {
        return Err(Fail(
            FINGERPRINT_MISMATCH,
            format!("certificate is for graph {} but the input is {actual}", cert.graph.fingerprint),
        ));
    }
    require_r_graph(&g)?;
    // the tree is recomputed; the stored summary is only compared
    let tree = decompose(&g).map_err(|e| Fail(CHECK_FAILED, format!("decomposition failed: {e}")))?;
    let summary = TreeSummary::of(&tree);
    let report = verify_cover(&g, &cert.terms, &summary).map_err(|e| Fail(CHECK_FAILED, e.to_string()))?;
    print!("{}", report_lines(&report));
    let summary_ok = summary == cert.tree;
    if !summary_ok {
        println!("stored tree summary differs from the recomputed one");
    }
    Ok(if report.passes_mandatory() && summary_ok { OK } else { CHECK_FAILED })
}

fn generate(n: usize, r: usize, seed: u64, output: Option<&Path>) -> Outcome {
    if n == 0 || n % 2 == 1 {
        return Err(Fail(PARSE_ERROR, format!("n must be a positive even number, got {n}")));
    }
    if r == 0 {
        return Err(Fail(PARSE_ERROR, "r must be at least 1".into()));
    }
    let g = random_r_graph(n, r, seed).map_err(|e| Fail(CHECK_FAILED, e.to_string()))?;
    let check = g.r_graph_check();
    assert!(check.ok, "a connected union of perfect matchings is an r-graph");
    let text = format!("# random r-graph n={n} r={r} seed={seed}\n{}", write_graph(&g));
    emit(output, &text)?;
    Ok(OK)
}

fn enumerate(input: &Path, limit: Option<usize>, format: Format) -> Outcome {
    let g = load(input)?;
    let mut pms = Vec::new();
    let flow = for_each_pm(&g, |pm| {
        if limit.is_some_and(|l| pms.len() >= l) {
            return ControlFlow::Break(());
        }
        pms.push(pm);
        ControlFlow::Continue(())
    });
    let overflow = flow.is_break();
    let lists: Vec<&[usize]> = pms.iter().map(|pm| pm.edges()).collect();
    match format {
        Format::Text => {
            for edges in &lists {
                println!("{edges:?}");
            }
            println!("count={}", lists.len());
        }
        Format::Json => {
            let value = json!({ "matchings": lists, "count": lists.len(), "complete": !overflow });
            println!("{}", serde_json::to_string_pretty(&value).expect("plain data"));
        }
    }
    if overflow {
        eprintln!("limit {} reached; the listing is partial", lists.len());
        return Ok(LIMIT_REACHED);
    }
    Ok(OK)
}
