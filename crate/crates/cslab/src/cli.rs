//! Command-line front end. Exit semantics: 0 for a computed result
//! (including passing checks), 2 when a check command finds a verified
//! violation, 1 for any error, preconditions printed verbatim.
//!
//! Every command prints a report envelope (seed, config echo, version,
//! body) to stdout; file artifacts are written atomically under
//! --out-dir unless --out overrides the path. Output is byte-stable
//! for a fixed config and seed.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use cslab_core::charseq::{compute_charseq, support_check};
use cslab_core::counting::{
    alpha_exact, alpha_lower, turan_upper, CountingError, LowerStrategy, DEFAULT_ALPHA_BUDGET,
};
use cslab_core::graph::Graph;
use cslab_core::independence::{
    build_array, check_block_chain, find_forbidden_config, independence_depth,
    pseudo_loop_search, validate_loop, verify_array, BlockArray, ConfigTemplate,
    ForbiddenOutcome, IndependenceError, LabExtender, LoopOutcome, WitnessMode,
    DEFAULT_BACKTRACK_BUDGET,
};
use cslab_core::orderprops::{
    build_cop_from_ordered, cop_to_chain, find_half_graph, pair_grid, validate_half_graph,
    verify_cop, verify_empty_op, OrderedBase,
};
use cslab_core::rat::{rat, Rat};
use cslab_core::regularity::{
    density_spectrum, equipartition, hierarchical_decomposition, key_lemma_embed, reduced_graph,
    regularity_partition, RegularityCaps,
};
use cslab_core::structures::{
    builtin_formula, gen_crosscutting, gen_half_graph, gen_random_graph, gen_staircase,
    gen_tfrg_staged, FiniteStructure, TfrgLab,
};

use crate::formats::{self, AlphaRow};
use crate::par;
use crate::report;

/// What a successful run means for the process exit code.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Outcome {
    Computed,
    ViolationFound,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Dot,
}

#[derive(Parser, Debug)]
#[command(
    name = "cslab",
    version,
    about = "characteristic sequences, regularity decompositions, order properties"
)]
pub struct Cli {
    /// directory for default-named output files
    #[arg(long, global = true, default_value = ".")]
    pub out_dir: PathBuf,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// worker threads for row-parallel tables
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// generate a structure and write it as JSON
    Gen(GenCmd),
    /// characteristic sequence of supports over a structure
    Charseq(CharseqCmd),
    /// regularity partitions, reduced graphs, embeddings, ledgers
    Reg {
        #[command(subcommand)]
        cmd: RegCmd,
    },
    /// omitted-edge maxima with Turán bounds, one row per subset size
    Alpha(AlphaCmd),
    /// order-property fragments and their checks
    Order {
        #[command(subcommand)]
        cmd: OrderCmd,
    },
    /// independence machinery over array blocks
    Indep {
        #[command(subcommand)]
        cmd: IndepCmd,
    },
    /// bundled CSV + JSON + DOT report for one structure
    Report(ReportCmd),
}

/// Where the working structure comes from: a JSON file or an inline
/// generated family.
#[derive(Args, Clone, Debug)]
pub struct Source {
    /// structure JSON file
    #[arg(long, conflicts_with = "family")]
    pub input: Option<PathBuf>,
    /// inline family: empty:N | complete:N | cycle:N | random:N |
    /// half:K | staircase:M | tfrg[:STAGES[:CAP]] | crosscutting:E,F,C
    #[arg(long)]
    pub family: Option<String>,
    /// seed for seeded families and seeded searches
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// edge probability for random:N (rational like 1/2 or decimal)
    #[arg(long, default_value = "1/2")]
    pub p: String,
}

impl Source {
    pub fn load(&self) -> Result<FiniteStructure> {
        match (&self.input, &self.family) {
            (Some(path), _) => formats::load_structure(path),
            (None, Some(spec)) => build_family(spec, self.seed, &self.p),
            (None, None) => bail!("pass --input FILE or --family SPEC"),
        }
    }

    fn echo(&self) -> Value {
        json!({
            "input": self.input.as_ref().map(|p| p.display().to_string()),
            "family": self.family,
            "seed": self.seed,
            "p": self.p,
        })
    }
}

pub fn parse_rat(s: &str) -> Result<Rat> {
    let t = s.trim();
    let (sign, body) = match t.strip_prefix('-') {
        Some(rest) => (-1i128, rest),
        None => (1i128, t),
    };
    if let Some((a, b)) = body.split_once('/') {
        let n: i128 = a.trim().parse().with_context(|| format!("numerator in {s:?}"))?;
        let d: i128 = b.trim().parse().with_context(|| format!("denominator in {s:?}"))?;
        if d == 0 {
            bail!("zero denominator in {s:?}");
        }
        return Ok(rat(sign * n, d));
    }
    if let Some((ip, fp)) = body.split_once('.') {
        if fp.is_empty() || fp.len() > 18 || !fp.bytes().all(|b| b.is_ascii_digit()) {
            bail!("bad decimal {s:?}");
        }
        let whole: i128 = if ip.is_empty() {
            0
        } else {
            ip.parse().with_context(|| format!("integer part of {s:?}"))?
        };
        let frac: i128 = fp.parse().with_context(|| format!("fraction part of {s:?}"))?;
        let den = 10i128.pow(fp.len() as u32);
        return Ok(rat(sign * (whole * den + frac), den));
    }
    Ok(rat(
        sign * body.parse::<i128>().with_context(|| format!("bad number {s:?}"))?,
        1,
    ))
}

fn split_usizes(s: &str) -> Result<Vec<usize>> {
    s.split([',', ':'])
        .filter(|t| !t.is_empty())
        .map(|t| t.trim().parse::<usize>().with_context(|| format!("bad index {t:?}")))
        .collect()
}

fn split_u64s(s: &str) -> Result<Vec<u64>> {
    s.split(',')
        .filter(|t| !t.is_empty())
        .map(|t| t.trim().parse::<u64>().with_context(|| format!("bad seed {t:?}")))
        .collect()
}

fn build_family(spec: &str, seed: u64, p: &str) -> Result<FiniteStructure> {
    let (name, rest) = match spec.split_once(':') {
        Some((a, b)) => (a, b),
        None => (spec, ""),
    };
    let args = split_usizes(rest)?;
    let one = |what: &str| -> Result<usize> {
        args.first()
            .copied()
            .with_context(|| format!("{what} needs one size, e.g. {what}:8"))
    };
    let from_graph = |g: Graph| {
        let mut s = FiniteStructure::from_graph(&g, "R");
        s.set_seed(seed);
        Ok(s)
    };
    match name {
        "empty" => from_graph(Graph::empty(one("empty")?)),
        "complete" => from_graph(Graph::complete(one("complete")?)),
        "cycle" => from_graph(Graph::cycle(one("cycle")?)),
        "random" => Ok(gen_random_graph(one("random")?, parse_rat(p)?, seed)?),
        "half" => Ok(gen_half_graph(one("half")?)?),
        "staircase" => Ok(gen_staircase(one("staircase")?)?),
        "tfrg" => {
            let stages = args.first().copied().unwrap_or(2);
            let cap = args.get(1).copied().unwrap_or(2);
            Ok(gen_tfrg_staged(stages, cap)?)
        }
        "crosscutting" => {
            if args.len() != 3 {
                bail!("crosscutting needs E,F,CELL, e.g. crosscutting:3,3,2");
            }
            Ok(gen_crosscutting(args[0], args[1], args[2], seed)?)
        }
        other => bail!("unknown family {other:?}"),
    }
}

/// The relation a graph-valued command works over: the --relation flag,
/// else the only relation, else "R".
fn main_relation(s: &FiniteStructure, flag: &Option<String>) -> Result<String> {
    if let Some(name) = flag {
        if s.relation(name).is_none() {
            bail!("structure has no relation {name:?}");
        }
        return Ok(name.clone());
    }
    let names: Vec<&str> = s.relation_names().collect();
    match names.as_slice() {
        [] => bail!("structure has no relations"),
        [only] => Ok((*only).to_owned()),
        _ if names.contains(&"R") => Ok("R".to_owned()),
        _ => bail!("several relations ({}); pass --relation", names.join(", ")),
    }
}

fn out_path(out_dir: &Path, out: &Option<PathBuf>, default_name: &str) -> PathBuf {
    match out {
        Some(p) => p.clone(),
        None => out_dir.join(default_name),
    }
}

fn emit(seed: Option<u64>, config: Value, body: Value) -> Result<()> {
    let env = report::envelope(seed, config, body);
    println!("{}", serde_json::to_string_pretty(&env)?);
    Ok(())
}

pub fn run(cli: Cli) -> Result<Outcome> {
    match &cli.cmd {
        Cmd::Gen(c) => run_gen(&cli, c),
        Cmd::Charseq(c) => run_charseq(&cli, c),
        Cmd::Reg { cmd } => match cmd {
            RegCmd::Partition(c) => run_partition(&cli, c),
            RegCmd::Reduced(c) => run_reduced(&cli, c),
            RegCmd::Embed(c) => run_embed(&cli, c),
            RegCmd::Spectrum(c) => run_spectrum(&cli, c),
            RegCmd::Hier(c) => run_hier(&cli, c),
        },
        Cmd::Alpha(c) => run_alpha(&cli, c),
        Cmd::Order { cmd } => match cmd {
            OrderCmd::Half(c) => run_order_half(&cli, c),
            OrderCmd::Cop(c) => run_order_cop(&cli, c),
            OrderCmd::Chain(c) => run_order_chain(&cli, c),
            OrderCmd::EmptyOp(c) => run_order_empty_op(&cli, c),
        },
        Cmd::Indep { cmd } => match cmd {
            IndepCmd::Depth(c) => run_indep_depth(&cli, c),
            IndepCmd::Forbidden(c) => run_indep_forbidden(&cli, c),
            IndepCmd::Array(c) => run_indep_array(&cli, c),
            IndepCmd::Loops(c) => run_indep_loops(&cli, c),
            IndepCmd::Chain(c) => run_indep_chain(&cli, c),
        },
        Cmd::Report(c) => run_report(&cli, c),
    }
}

// ------------------------------------------------------------------------ gen

#[derive(Args, Debug)]
pub struct GenCmd {
    /// family: empty:N | complete:N | cycle:N | random:N | half:K |
    /// staircase:M | tfrg[:STAGES[:CAP]] | crosscutting:E,F,C
    #[arg(long)]
    pub family: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// edge probability for random:N
    #[arg(long, default_value = "1/2")]
    pub p: String,
    /// output file (default: derived name under --out-dir)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn run_gen(cli: &Cli, c: &GenCmd) -> Result<Outcome> {
    let s = build_family(&c.family, c.seed, &c.p)?;
    let name = format!("{}-s{}.json", c.family.replace([':', ','], "-"), c.seed);
    let path = out_path(&cli.out_dir, &c.out, &name);
    let file = formats::structure_to_file(&s);
    report::write_json(&path, &serde_json::to_value(&file)?)?;
    emit(
        s.seed(),
        json!({"family": c.family, "seed": c.seed, "p": c.p}),
        json!({
            "file": path.display().to_string(),
            "n": s.universe_size(),
            "relations": s.relation_names().collect::<Vec<_>>(),
            "parts": s.part_labels().collect::<Vec<_>>(),
        }),
    )?;
    Ok(Outcome::Computed)
}

// -------------------------------------------------------------------- charseq

#[derive(Args, Debug)]
pub struct CharseqCmd {
    #[command(flatten)]
    pub src: Source,
    #[arg(long, default_value = "edge")]
    pub formula: String,
    #[arg(long, default_value_t = 2)]
    pub max_level: usize,
    /// parameter pool: singletons | pairs
    #[arg(long, default_value = "singletons")]
    pub pool: String,
    /// also run the support-K collapse check at width max_level
    #[arg(long)]
    pub support: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

const POOL_LIMIT: usize = 4096;

fn build_pool(s: &FiniteStructure, kind: &str) -> Result<Vec<Vec<usize>>> {
    let n = s.universe_size();
    let pool: Vec<Vec<usize>> = match kind {
        "singletons" => (0..n).map(|v| vec![v]).collect(),
        "pairs" => {
            let mut out = Vec::new();
            for u in 0..n {
                for v in (u + 1)..n {
                    out.push(vec![u, v]);
                }
            }
            out
        }
        other => bail!("unknown pool {other:?}; use singletons or pairs"),
    };
    if pool.len() > POOL_LIMIT {
        bail!("pool of {} tuples exceeds the limit {POOL_LIMIT}", pool.len());
    }
    Ok(pool)
}

fn run_charseq(cli: &Cli, c: &CharseqCmd) -> Result<Outcome> {
    let s = c.src.load()?;
    let f = builtin_formula(&c.formula)?;
    let pool = build_pool(&s, &c.pool)?;
    let cs = compute_charseq(&s, f.as_ref(), c.max_level, &pool)?;
    let (path, written): (PathBuf, &str) = match cli.format {
        Format::Json => {
            let path = out_path(&cli.out_dir, &c.out, "charseq.json");
            report::write_json(&path, &formats::charseq_to_json(&cs)?)?;
            (path, "levels+witnesses json")
        }
        Format::Dot => {
            let path = out_path(&cli.out_dir, &c.out, "p2.dot");
            report::write_text(&path, &formats::p2_dot(&cs))?;
            (path, "two-element support graph dot")
        }
        Format::Csv => bail!("no CSV rendering for charseq; use json or dot"),
    };
    let mut body = json!({
        "file": path.display().to_string(),
        "rendering": written,
        "formula": c.formula,
        "pool_len": cs.pool_len(),
        "max_level": cs.max_level(),
    });
    let mut outcome = Outcome::Computed;
    if let Some(k) = c.support {
        let verdict = support_check(&cs, k, c.max_level)?;
        match &verdict.counterexample {
            None => {
                body["support"] = json!({"k": k, "holds": true});
            }
            Some(sel) => {
                let tuples: Vec<&Vec<usize>> = sel.iter().map(|&i| &pool[i]).collect();
                println!(
                    "support-{k} fails at width {}: pool indices {sel:?} (tuples {tuples:?})",
                    sel.len()
                );
                body["support"] = json!({
                    "k": k,
                    "holds": false,
                    "counterexample": sel,
                    "tuples": tuples,
                });
                outcome = Outcome::ViolationFound;
            }
        }
    }
    emit(
        s.seed(),
        json!({
            "source": c.src.echo(),
            "formula": c.formula,
            "max_level": c.max_level,
            "pool": c.pool,
            "support": c.support,
        }),
        body,
    )?;
    Ok(outcome)
}

// ------------------------------------------------------------------------ reg

#[derive(Args, Clone, Debug)]
pub struct CapsArgs {
    /// exact pair verdicts up to this side size, sampled above
    #[arg(long, default_value_t = 12)]
    pub side_cap: usize,
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    #[arg(long, default_value_t = 0x5eed)]
    pub sample_seed: u64,
    #[arg(long, default_value_t = 64)]
    pub max_classes: usize,
    #[arg(long, default_value_t = 8)]
    pub max_rounds: usize,
}

impl CapsArgs {
    fn caps(&self) -> RegularityCaps {
        RegularityCaps {
            exact_side_cap: self.side_cap,
            sampled_trials: self.trials,
            sample_seed: self.sample_seed,
            max_classes: self.max_classes,
            max_rounds: self.max_rounds,
        }
    }

    fn echo(&self) -> Value {
        json!({
            "side_cap": self.side_cap,
            "trials": self.trials,
            "sample_seed": self.sample_seed,
            "max_classes": self.max_classes,
            "max_rounds": self.max_rounds,
        })
    }
}

#[derive(Subcommand, Debug)]
pub enum RegCmd {
    /// energy-increment partition with per-pair verdicts
    Partition(PartitionCmd),
    /// quotient keeping regular pairs of density at least delta
    Reduced(ReducedCmd),
    /// greedy embedding of a small target into regular class pairs
    Embed(EmbedCmd),
    /// certified-regular pair densities per side size
    Spectrum(SpectrumCmd),
    /// recursive omission ledger with reconciliation
    Hier(HierCmd),
}

#[derive(Args, Debug)]
pub struct PartitionCmd {
    #[command(flatten)]
    pub src: Source,
    #[arg(long, default_value = "1/4")]
    pub epsilon: String,
    #[arg(long, default_value_t = 2)]
    pub m0: usize,
    #[command(flatten)]
    pub caps: CapsArgs,
    #[arg(long)]
    pub relation: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn run_partition(cli: &Cli, c: &PartitionCmd) -> Result<Outcome> {
    let s = c.src.load()?;
    let g = s.to_graph(&main_relation(&s, &c.relation)?)?;
    let eps = parse_rat(&c.epsilon)?;
    let p = regularity_partition(&g, eps, c.m0, &c.caps.caps())?;
    let path = match cli.format {
        Format::Csv => {
            let path = out_path(&cli.out_dir, &c.out, "pairs.csv");
            report::write_text(&path, &formats::pair_report_csv(&p))?;
            path
        }
        _ => {
            let path = out_path(&cli.out_dir, &c.out, "partition.json");
            report::write_json(&path, &formats::partition_json(&p))?;
            path
        }
    };
    emit(
        s.seed(),
        json!({
            "source": c.src.echo(),
            "epsilon": c.epsilon,
            "m0": c.m0,
            "caps": c.caps.echo(),
        }),
        json!({
            "file": path.display().to_string(),
            "k": p.k(),
            "rounds": p.rounds,
            "irregular_pairs": p.irregular_count(),
            "status": format!("{:?}", p.status),
        }),
    )?;
    Ok(Outcome::Computed)
}

#[derive(Args, Debug)]
pub struct ReducedCmd {
    #[command(flatten)]
    pub src: Source,
    #[arg(long, default_value = "1/4")]
    pub epsilon: String,
    #[arg(long, default_value_t = 2)]
    pub m0: usize,
    #[arg(long, default_value = "1/2")]
    pub delta: String,
    #[command(flatten)]
    pub caps: CapsArgs,
    #[arg(long)]
    pub relation: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn run_reduced(cli: &Cli, c: &ReducedCmd) -> Result<Outcome> {
    let s = c.src.load()?;
    let g = s.to_graph(&main_relation(&s, &c.relation)?)?;
    let p = regularity_partition(&g, parse_rat(&c.epsilon)?, c.m0, &c.caps.caps())?;
    let rg = reduced_graph(&p, parse_rat(&c.delta)?);
    let path = out_path(&cli.out_dir, &c.out, "reduced.dot");
    report::write_text(&path, &formats::reduced_dot(&rg))?;
    emit(
        s.seed(),
        json!({
            "source": c.src.echo(),
            "epsilon": c.epsilon,
            "m0": c.m0,
            "delta": c.delta,
            "caps": c.caps.echo(),
        }),
        json!({
            "file": path.display().to_string(),
            "classes": rg.classes.len(),
            "kept_pairs": rg.quotient.edge_count(),
        }),
    )?;
    Ok(Outcome::Computed)
}

#[derive(Args, Debug)]
pub struct EmbedCmd {
    #[command(flatten)]
    pub src: Source,
    #[arg(long, default_value = "1/10")]
    pub epsilon: String,
    #[arg(long, default_value = "1/2")]
    pub delta: String,
    /// target: triangle | complete:N | cycle:N
    #[arg(long, default_value = "triangle")]
    pub target: String,
    /// equipartition class count (default: one class per target vertex)
    #[arg(long)]
    pub classes: Option<usize>,
    #[arg(long)]
    pub relation: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_target(t: &str) -> Result<Graph> {
    let (name, rest) = match t.split_once(':') {
        Some((a, b)) => (a, b),
        None => (t, ""),
    };
    let size = || -> Result<usize> {
        rest.parse::<usize>()
            .with_context(|| format!("target {t:?} needs a size, e.g. cycle:4"))
    };
    match name {
        "triangle" => Ok(Graph::complete(3)),
        "complete" => Ok(Graph::complete(size()?)),
        "cycle" => Ok(Graph::cycle(size()?)),
        other => bail!("unknown target {other:?}"),
    }
}

fn run_embed(cli: &Cli, c: &EmbedCmd) -> Result<Outcome> {
    let s = c.src.load()?;
    let g = s.to_graph(&main_relation(&s, &c.relation)?)?;
    let h = parse_target(&c.target)?;
    let k = c.classes.unwrap_or(h.n());
    if k == 0 || k > g.n() {
        bail!("class count {k} must lie in 1..={}", g.n());
    }
    let classes = equipartition(g.n(), k);
    let assignment: Vec<usize> = (0..h.n()).map(|i| i % k).collect();
    let embedded = key_lemma_embed(
        &g,
        &classes,
        parse_rat(&c.epsilon)?,
        parse_rat(&c.delta)?,
        &h,
        &assignment,
    )?;
    for u in 0..h.n() {
        for v in (u + 1)..h.n() {
            if h.has_edge(u, v) && !g.has_edge(embedded[u], embedded[v]) {
                bail!("embedding failed re-validation at target edge ({u},{v})");
            }
        }
    }
    let path = out_path(&cli.out_dir, &c.out, "embedding.json");
    report::write_json(
        &path,
        &json!({"target": c.target, "embedded": embedded, "revalidated": true}),
    )?;
    emit(
        s.seed(),
        json!({
            "source": c.src.echo(),
            "epsilon": c.epsilon,
            "delta": c.delta,
            "target": c.target,
            "classes": k,
        }),
        json!({
            "file": path.display().to_string(),
            "embedded": embedded,
            "revalidated": true,
        }),
    )?;
    Ok(Outcome::Computed)
}

#[derive(Args, Debug)]
pub struct SpectrumCmd {
    #[command(flatten)]
    pub src: Source,
    #[arg(long, default_value = "1/4")]
    pub epsilon: String,
    #[arg(long, default_value = "2,4,8")]
    pub sizes: String,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    #[arg(long, default_value_t = 12)]
    pub side_cap: usize,
    #[arg(long)]
    pub relation: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn run_spectrum(cli: &Cli, c: &SpectrumCmd) -> Result<Outcome> {
    let s = c.src.load()?;
    let g = s.to_graph(&main_relation(&s, &c.relation)?)?;
    let sizes = split_usizes(&c.sizes)?;
    let entries = density_spectrum(
        &g,
        &sizes,
        parse_rat(&c.epsilon)?,
        c.trials,
        c.src.seed,
        c.side_cap,
    )?;
    let path = match cli.format {
        Format::Csv => {
            let path = out_path(&cli.out_dir, &c.out, "spectrum.csv");
            report::write_text(&path, &formats::spectrum_csv(&entries))?;
            path
        }
        _ => {
            let path = out_path(&cli.out_dir, &c.out, "spectrum.json");
            report::write_json(&path, &formats::spectrum_json(&entries))?;
            path
        }
    };
    emit(
        s.seed(),
        json!({
            "source": c.src.echo(),
            "epsilon": c.epsilon,
            "sizes": c.sizes,
            "trials": c.trials,
            "side_cap": c.side_cap,
        }),
        json!({
            "file": path.display().to_string(),
            "entries": entries.len(),
            "certified_exact": true,
        }),
    )?;
    Ok(Outcome::Computed)
}

#[derive(Args, Debug)]
pub struct HierCmd {
    #[command(flatten)]
    pub src: Source,
    #[arg(long, default_value = "1/4")]
    pub epsilon: String,
    #[arg(long, default_value_t = 2)]
    pub m0: usize,
    #[arg(long, default_value_t = 2)]
    pub depth: usize,
    /// per-level budget constant in the quadratic bound
    #[arg(long, default_value = "1/100")]
    pub c: String,
    #[command(flatten)]
    pub caps: CapsArgs,
    #[arg(long)]
    pub relation: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn run_hier(cli: &Cli, c: &HierCmd) -> Result<Outcome> {
    let s = c.src.load()?;
    let g = s.to_graph(&main_relation(&s, &c.relation)?)?;
    let r = hierarchical_decomposition(
        &g,
        parse_rat(&c.epsilon)?,
        c.m0,
        c.depth,
        &c.caps.caps(),
        parse_rat(&c.c)?,
    )?;
    let path = match cli.format {
        Format::Csv => {
            let path = out_path(&cli.out_dir, &c.out, "ledger.csv");
            report::write_text(&path, &formats::ledger_csv(&r))?;
            path
        }
        _ => {
            let path = out_path(&cli.out_dir, &c.out, "ledger.json");
            report::write_json(&path, &formats::hierarchical_json(&r))?;
            path
        }
    };
    emit(
        s.seed(),
        json!({
            "source": c.src.echo(),
            "epsilon": c.epsilon,
            "m0": c.m0,
            "depth": c.depth,
            "c": c.c,
            "caps": c.caps.echo(),
        }),
        json!({
            "file": path.display().to_string(),
            "levels": r.levels.len(),
            "total_omitted": r.total_omitted,
            "reconciled": r.reconciled,
            "bound_holds": r.bound_holds,
        }),
    )?;
    Ok(Outcome::Computed)
}

// ---------------------------------------------------------------------- alpha

#[derive(Args, Debug)]
pub struct AlphaCmd {
    #[command(flatten)]
    pub src: Source,
    /// largest subset size; rows run 1..=n (default min(|V|, 12))
    #[arg(long)]
    pub n: Option<usize>,
    /// forbidden empty-subgraph size for the Turán column
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    #[arg(long, default_value_t = DEFAULT_ALPHA_BUDGET)]
    pub budget: u64,
    #[arg(long)]
    pub relation: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn run_alpha(cli: &Cli, c: &AlphaCmd) -> Result<Outcome> {
    let s = c.src.load()?;
    let g = s.to_graph(&main_relation(&s, &c.relation)?)?;
    let n_max = c.n.unwrap_or_else(|| g.n().min(12));
    if n_max > g.n() {
        bail!("--n {n_max} exceeds the vertex count {}", g.n());
    }
    let ns: Vec<usize> = (1..=n_max).collect();
    let rows: Vec<AlphaRow> = par::chunked_map(&ns, cli.threads, |&n| -> Result<AlphaRow> {
        let result = match alpha_exact(&g, n, c.budget) {
            Ok(a) => a,
            Err(CountingError::BudgetExceeded { .. }) => {
                alpha_lower(&g, n, LowerStrategy::Greedy, c.src.seed)?
            }
            Err(e) => return Err(e.into()),
        };
        Ok(AlphaRow {
            n,
            result,
            turan_upper: turan_upper(c.k, n)?,
            floor_half: (n / 2) as u64,
        })
    })
    .into_iter()
    .collect::<Result<_>>()?;
    let path = match cli.format {
        Format::Json => {
            let path = out_path(&cli.out_dir, &c.out, "alpha.json");
            report::write_json(&path, &formats::alpha_rows_json(&rows))?;
            path
        }
        _ => {
            let path = out_path(&cli.out_dir, &c.out, "alpha.csv");
            report::write_text(&path, &formats::alpha_csv(&rows))?;
            path
        }
    };
    emit(
        s.seed(),
        json!({
            "source": c.src.echo(),
            "n": n_max,
            "k": c.k,
            "budget": c.budget,
            "threads": cli.threads,
        }),
        json!({
            "file": path.display().to_string(),
            "rows": formats::alpha_rows_json(&rows),
            "all_exact": rows.iter().all(|r| r.result.exact),
        }),
    )?;
    Ok(Outcome::Computed)
}

// ---------------------------------------------------------------------- order

#[derive(Subcommand, Debug)]
pub enum OrderCmd {
    /// search for rows related exactly below the diagonal
    Half(OrderHalfCmd),
    /// build the joint-positivity fragment over a staircase base and
    /// verify it at depth
    Cop(OrderCopCmd),
    /// materialize the three chain conditions from that fragment
    Chain(OrderChainCmd),
    /// verify ordered cross pairs with jointly inconsistent rows
    EmptyOp(OrderEmptyOpCmd),
}

#[derive(Args, Debug)]
pub struct OrderHalfCmd {
    #[command(flatten)]
    pub src: Source,
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    #[arg(long)]
    pub relation: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn run_order_half(cli: &Cli, c: &OrderHalfCmd) -> Result<Outcome> {
    let s = c.src.load()?;
    let rel_name = main_relation(&s, &c.relation)?;
    let m = s.relation(&rel_name).expect("validated above");
    let rel = |u: usize, v: usize| m.has_edge(u, v);
    let config = json!({"source": c.src.echo(), "k": c.k, "relation": rel_name});
    match find_half_graph(s.universe_size(), &rel, c.k, c.src.seed) {
        Some(frag) => {
            let verified = validate_half_graph(&rel, &frag);
            let path = out_path(&cli.out_dir, &c.out, "half.json");
            report::write_json(&path, &formats::half_fragment_json(&frag, verified))?;
            emit(
                s.seed(),
                config,
                json!({
                    "file": path.display().to_string(),
                    "found": true,
                    "a": frag.a_seq,
                    "b": frag.b_seq,
                    "verified": verified,
                }),
            )?;
        }
        None => {
            println!("no fragment of length {} found", c.k);
            emit(s.seed(), config, json!({"found": false, "k": c.k}))?;
        }
    }
    Ok(Outcome::Computed)
}

#[derive(Args, Debug)]
pub struct OrderCopCmd {
    /// fragment length; the base is a staircase on 6n rows
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    /// verification depth (default n)
    #[arg(long)]
    pub depth: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

struct CopRun {
    st: FiniteStructure,
    pool: Vec<Vec<usize>>,
    base: OrderedBase,
}

/// Staircase base plus the reversed pair pool the interval construction
/// reads its tuples from. Kept together so the charseq can borrow both.
fn cop_setup(n: usize) -> Result<CopRun> {
    if n == 0 {
        bail!("need n >= 1");
    }
    let st = gen_staircase(6 * n)?;
    let a_row: Vec<usize> = st.part("A").context("staircase part A")?.to_vec();
    let lo = -2 * n as i64;
    let hi = 4 * n as i64 - 1;
    let (pool, base) = pair_grid(lo, hi, &mut |s, t| {
        vec![a_row[(t - lo) as usize], a_row[(s - lo) as usize]]
    });
    Ok(CopRun { st, pool, base })
}

fn run_order_cop(cli: &Cli, c: &OrderCopCmd) -> Result<Outcome> {
    let depth = c.depth.unwrap_or(c.n);
    if depth == 0 {
        bail!("need depth >= 1");
    }
    let setup = cop_setup(c.n)?;
    let f = builtin_formula("strict-order-rho")?;
    let cs = compute_charseq(&setup.st, f.as_ref(), 2 * depth, &setup.pool)?;
    let frag = build_cop_from_ordered(&cs, &setup.base, c.n)?;
    let verdict = verify_cop(&cs, &frag, depth, false)?;
    let path = out_path(&cli.out_dir, &c.out, "cop.json");
    report::write_json(&path, &formats::cop_fragment_json(&frag, depth, verdict.holds))?;
    let body = json!({
        "file": path.display().to_string(),
        "a": frag.a_pairs,
        "b": frag.b_pairs,
        "holds": verdict.holds,
        "violation": verdict.violation.as_ref().map(|v| json!({
            "a_indices": v.a_indices,
            "b_indices": v.b_indices,
            "expected": v.expected,
        })),
    });
    emit(
        setup.st.seed(),
        json!({"n": c.n, "depth": depth}),
        body,
    )?;
    if verdict.holds {
        Ok(Outcome::Computed)
    } else {
        println!("joint positivity fails; violation written to the report");
        Ok(Outcome::ViolationFound)
    }
}

#[derive(Args, Debug)]
pub struct OrderChainCmd {
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long)]
    pub depth: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn run_order_chain(cli: &Cli, c: &OrderChainCmd) -> Result<Outcome> {
    let depth = c.depth.unwrap_or(c.n);
    if depth == 0 {
        bail!("need depth >= 1");
    }
    let setup = cop_setup(c.n)?;
    let f = builtin_formula("strict-order-rho")?;
    let cs = compute_charseq(&setup.st, f.as_ref(), 2 * depth, &setup.pool)?;
    let frag = build_cop_from_ordered(&cs, &setup.base, c.n)?;
    let rep = cop_to_chain(&cs, &frag, depth)?;
    print!("{}", formats::chain_verdict_table(&rep.chain));
    let path = out_path(&cli.out_dir, &c.out, "chain.json");
    report::write_json(&path, &formats::cop_chain_json(&rep))?;
    emit(
        setup.st.seed(),
        json!({"n": c.n, "depth": depth}),
        json!({
            "file": path.display().to_string(),
            "cop_holds": rep.cop.holds,
            "chain_holds": rep.chain.holds(),
            "cross_notes": rep.cross.len(),
        }),
    )?;
    if rep.cop.holds && rep.chain.holds() {
        Ok(Outcome::Computed)
    } else {
        Ok(Outcome::ViolationFound)
    }
}

#[derive(Args, Debug)]
pub struct OrderEmptyOpCmd {
    #[command(flatten)]
    pub src: Source,
    /// comma-separated pool indices for the first row
    #[arg(long)]
    pub a: String,
    /// comma-separated pool indices for the second row
    #[arg(long)]
    pub b: String,
    #[arg(long, default_value = "edge")]
    pub formula: String,
    /// row-inconsistency width
    #[arg(long, default_value_t = 2)]
    pub depth: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn run_order_empty_op(cli: &Cli, c: &OrderEmptyOpCmd) -> Result<Outcome> {
    let s = c.src.load()?;
    let f = builtin_formula(&c.formula)?;
    let pool = build_pool(&s, "singletons")?;
    let cs = compute_charseq(&s, f.as_ref(), c.depth.max(2), &pool)?;
    let a = split_usizes(&c.a)?;
    let b = split_usizes(&c.b)?;
    let verdict = verify_empty_op(&cs, &a, &b, c.depth)?;
    let path = out_path(&cli.out_dir, &c.out, "empty-op.json");
    report::write_json(
        &path,
        &formats::empty_op_fragment_json(&a, &b, c.depth, verdict.holds),
    )?;
    emit(
        s.seed(),
        json!({
            "source": c.src.echo(),
            "a": c.a,
            "b": c.b,
            "formula": c.formula,
            "depth": c.depth,
        }),
        json!({
            "file": path.display().to_string(),
            "verdict": formats::empty_op_json(&verdict),
        }),
    )?;
    if verdict.holds {
        Ok(Outcome::Computed)
    } else {
        println!("empty order property fails; see the issue in the report");
        Ok(Outcome::ViolationFound)
    }
}

// ---------------------------------------------------------------------- indep

#[derive(Args, Clone, Debug)]
pub struct LabArgs {
    #[arg(long, default_value_t = 2)]
    pub stages: usize,
    /// per-element subset cap in the staged construction
    #[arg(long, default_value_t = 2)]
    pub cap: usize,
}

#[derive(Subcommand, Debug)]
pub enum IndepCmd {
    /// per-part pattern realizability up to a pattern width
    Depth(IndepDepthCmd),
    /// smallest uniform template the family never realizes
    Forbidden(IndepForbiddenCmd),
    /// helix-fill an array of template rows over the staged lab
    Array(IndepArrayCmd),
    /// exhaustive pseudo-loop scan over the array's blocks
    Loops(IndepLoopsCmd),
    /// chain precondition plus the three block-chain conditions
    Chain(IndepChainCmd),
}

#[derive(Args, Debug)]
pub struct IndepDepthCmd {
    #[command(flatten)]
    pub src: Source,
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    /// per-part pattern budget
    #[arg(long, default_value_t = 1)]
    pub cap: usize,
    /// comma-separated part labels (default: all parts)
    #[arg(long)]
    pub parts: Option<String>,
    #[arg(long)]
    pub relation: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn run_indep_depth(cli: &Cli, c: &IndepDepthCmd) -> Result<Outcome> {
    let s = c.src.load()?;
    let rel_name = main_relation(&s, &c.relation)?;
    let m = s.relation(&rel_name).expect("validated above");
    let rel = |u: usize, v: usize| m.has_edge(u, v);
    let labels: Vec<String> = match &c.parts {
        Some(list) => list.split(',').map(|t| t.trim().to_owned()).collect(),
        None => s.part_labels().map(str::to_owned).collect(),
    };
    if labels.is_empty() {
        bail!("structure has no parts; pass --parts");
    }
    let parts: Vec<Vec<usize>> = labels
        .iter()
        .map(|l| {
            s.part(l)
                .map(<[usize]>::to_vec)
                .with_context(|| format!("no part {l:?}"))
        })
        .collect::<Result<_>>()?;
    let v = independence_depth(&parts, &rel, c.k, c.cap, None)?;
    let path = out_path(&cli.out_dir, &c.out, "depth.json");
    report::write_json(&path, &formats::depth_verdict_json(&v, &labels))?;
    let failing = v.checks.iter().filter(|ch| !ch.holds).count();
    if let Some(first) = v.checks.iter().find(|ch| !ch.holds) {
        if let Some((eta, nu)) = &first.failure {
            println!(
                "{failing} checks fail; first: part {} has no realizer for eta={eta:?}, nu={nu:?}",
                labels
                    .get(first.part)
                    .cloned()
                    .unwrap_or_else(|| first.part.to_string())
            );
        }
    }
    emit(
        s.seed(),
        json!({
            "source": c.src.echo(),
            "k": c.k,
            "cap": c.cap,
            "parts": labels,
            "relation": rel_name,
        }),
        json!({
            "file": path.display().to_string(),
            "holds": v.holds,
            "vacuous": v.vacuous,
        }),
    )?;
    if v.holds {
        Ok(Outcome::Computed)
    } else {
        Ok(Outcome::ViolationFound)
    }
}

#[derive(Args, Debug)]
pub struct IndepForbiddenCmd {
    /// corpus family: tfrg (stage count varies with the seed) or
    /// random:N (edge probability --p)
    #[arg(long, default_value = "tfrg")]
    pub family: String,
    #[arg(long, default_value = "0,1,2")]
    pub seeds: String,
    /// template columns minus one
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub h_max: usize,
    #[arg(long, default_value = "1/2")]
    pub p: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn run_indep_forbidden(cli: &Cli, c: &IndepForbiddenCmd) -> Result<Outcome> {
    let seeds = split_u64s(&c.seeds)?;
    let p = parse_rat(&c.p)?;
    let mut family: Box<dyn FnMut(u64) -> _> = match c.family.split_once(':') {
        None if c.family == "tfrg" => {
            Box::new(|seed: u64| gen_tfrg_staged(1 + (seed % 2) as usize, 2))
        }
        Some(("random", size)) => {
            let n: usize = size.parse().context("random:N needs a size")?;
            Box::new(move |seed: u64| gen_random_graph(n, p, seed))
        }
        _ => bail!("unknown corpus family {:?}; use tfrg or random:N", c.family),
    };
    let outcome = find_forbidden_config(&mut *family, &seeds, c.n, c.h_max)?;
    let config = json!({
        "family": c.family,
        "seeds": c.seeds,
        "n": c.n,
        "h_max": c.h_max,
        "p": c.p,
    });
    match outcome {
        ForbiddenOutcome::Found { template, corpus } => {
            let path = out_path(&cli.out_dir, &c.out, "template.json");
            let file = formats::template_to_file(&template);
            report::write_json(&path, &serde_json::to_value(&file)?)?;
            emit(
                None,
                config,
                json!({
                    "file": path.display().to_string(),
                    "found": true,
                    "h": file.h,
                    "n": file.n,
                    "edges": file.edges,
                    "corpus": corpus,
                }),
            )?;
        }
        ForbiddenOutcome::NotFound => {
            println!("every template up to {} rows is realized somewhere", c.h_max);
            emit(None, config, json!({"found": false, "h_max": c.h_max}))?;
        }
    }
    Ok(Outcome::Computed)
}

fn lab_array(
    stages: usize,
    cap: usize,
    rows: usize,
    budget: usize,
) -> Result<(TfrgLab, BlockArray, ConfigTemplate)> {
    let mut lab = TfrgLab::new(stages, cap)?;
    let template = ConfigTemplate::triangle();
    let arr = {
        let mut ext = LabExtender { lab: &mut lab };
        build_array(&mut ext, &template, rows, budget)?
    };
    Ok((lab, arr, template))
}

#[derive(Args, Debug)]
pub struct IndepArrayCmd {
    #[command(flatten)]
    pub lab: LabArgs,
    #[arg(long, default_value_t = 6)]
    pub rows: usize,
    #[arg(long, default_value_t = DEFAULT_BACKTRACK_BUDGET)]
    pub budget: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn run_indep_array(cli: &Cli, c: &IndepArrayCmd) -> Result<Outcome> {
    let (lab, arr, template) = lab_array(c.lab.stages, c.lab.cap, c.rows, c.budget)?;
    let s = lab.structure();
    let rel = |u: usize, v: usize| s.rel_edge("R", u, v);
    let scan = verify_array(&arr, &template, &rel);
    if let Some((a, b)) = scan {
        bail!("array re-validation failed at slots ({a},{b})");
    }
    let path = out_path(&cli.out_dir, &c.out, "array.json");
    report::write_json(&path, &formats::array_json(&arr, &template))?;
    emit(
        None,
        json!({
            "stages": c.lab.stages,
            "cap": c.lab.cap,
            "rows": c.rows,
            "budget": c.budget,
        }),
        json!({
            "file": path.display().to_string(),
            "rows": arr.rows.len(),
            "blocks": arr.num_blocks(),
            "universe": s.universe_size(),
            "verified": true,
        }),
    )?;
    Ok(Outcome::Computed)
}

#[derive(Args, Debug)]
pub struct IndepLoopsCmd {
    #[command(flatten)]
    pub lab: LabArgs,
    #[arg(long, default_value_t = 6)]
    pub rows: usize,
    #[arg(long, default_value_t = DEFAULT_BACKTRACK_BUDGET)]
    pub build_budget: usize,
    /// (assignment, split) evaluations before giving up
    #[arg(long, default_value_t = 1_000_000)]
    pub budget: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn run_indep_loops(cli: &Cli, c: &IndepLoopsCmd) -> Result<Outcome> {
    let (lab, arr, template) = lab_array(c.lab.stages, c.lab.cap, c.rows, c.build_budget)?;
    let s = lab.structure();
    let rel = |u: usize, v: usize| s.rel_edge("R", u, v);
    let candidates = arr.blocks();
    let n = arr.width - 1;
    let outcome = pseudo_loop_search(&candidates, &template, &rel, n, c.budget)?;
    let path = out_path(&cli.out_dir, &c.out, "loops.json");
    report::write_json(&path, &formats::loop_outcome_json(&outcome))?;
    let config = json!({
        "stages": c.lab.stages,
        "cap": c.lab.cap,
        "rows": c.rows,
        "budget": c.budget,
    });
    match &outcome {
        LoopOutcome::Found(rep) => {
            let revalidated = validate_loop(rep, &candidates, &template, &rel)?;
            println!("loops: found indices={:?} m={}", rep.indices, rep.m);
            emit(
                None,
                config,
                json!({
                    "file": path.display().to_string(),
                    "found": true,
                    "loop": formats::loop_report_json(rep),
                    "revalidated": revalidated,
                }),
            )?;
            Ok(Outcome::ViolationFound)
        }
        LoopOutcome::NoneExhaustive => {
            println!("loops: none");
            emit(
                None,
                config,
                json!({
                    "file": path.display().to_string(),
                    "found": false,
                    "exhaustive": true,
                }),
            )?;
            Ok(Outcome::Computed)
        }
        LoopOutcome::NoneWithinBudget => {
            println!("loops: none within budget");
            emit(
                None,
                config,
                json!({
                    "file": path.display().to_string(),
                    "found": false,
                    "exhaustive": false,
                }),
            )?;
            Ok(Outcome::Computed)
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum WitnessArg {
    /// leave every (n+1)-th block out of the tuple rows as a witness
    Gap,
    /// no witness rows; the second condition is skipped
    Skip,
}

#[derive(Args, Debug)]
pub struct IndepChainCmd {
    #[command(flatten)]
    pub lab: LabArgs,
    #[arg(long, default_value_t = 6)]
    pub rows: usize,
    #[arg(long, default_value_t = DEFAULT_BACKTRACK_BUDGET)]
    pub build_budget: usize,
    #[arg(long, value_enum, default_value_t = WitnessArg::Gap)]
    pub witnesses: WitnessArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn run_indep_chain(cli: &Cli, c: &IndepChainCmd) -> Result<Outcome> {
    let (lab, arr, template) = lab_array(c.lab.stages, c.lab.cap, c.rows, c.build_budget)?;
    let s = lab.structure();
    let rel = |u: usize, v: usize| s.rel_edge("R", u, v);
    let mode = match c.witnesses {
        WitnessArg::Gap => WitnessMode::GapLayout,
        WitnessArg::Skip => WitnessMode::Skip,
    };
    let config = json!({
        "stages": c.lab.stages,
        "cap": c.lab.cap,
        "rows": c.rows,
        "witnesses": format!("{:?}", c.witnesses),
    });
    let rep = match check_block_chain(&arr, &template, &rel, mode, &[]) {
        Ok(rep) => rep,
        Err(IndependenceError::ChainViolation { i, j }) => {
            println!("chain precondition fails between blocks {i} and {j}");
            emit(
                None,
                config,
                json!({"chain_precondition": {"holds": false, "blocks": [i, j]}}),
            )?;
            return Ok(Outcome::ViolationFound);
        }
        Err(e) => return Err(e.into()),
    };
    print!("{}", formats::block_chain_table(&rep));
    let path = out_path(&cli.out_dir, &c.out, "block-chain.json");
    report::write_json(&path, &formats::block_chain_json(&rep))?;
    emit(
        None,
        config,
        json!({
            "file": path.display().to_string(),
            "holds": rep.holds(),
            "degenerate": rep.degenerate,
        }),
    )?;
    if rep.holds() {
        Ok(Outcome::Computed)
    } else {
        Ok(Outcome::ViolationFound)
    }
}

// --------------------------------------------------------------------- report

#[derive(Args, Debug)]
pub struct ReportCmd {
    #[command(flatten)]
    pub src: Source,
    #[arg(long, default_value = "1/4")]
    pub epsilon: String,
    #[arg(long, default_value_t = 2)]
    pub m0: usize,
    #[arg(long, default_value = "1/2")]
    pub delta: String,
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    /// largest alpha subset size (default min(|V|, 10))
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value = "edge")]
    pub formula: String,
    #[arg(long, default_value_t = 2)]
    pub max_level: usize,
    #[command(flatten)]
    pub caps: CapsArgs,
    #[arg(long)]
    pub relation: Option<String>,
}

fn run_report(cli: &Cli, c: &ReportCmd) -> Result<Outcome> {
    let s = c.src.load()?;
    let rel_name = main_relation(&s, &c.relation)?;
    let g = s.to_graph(&rel_name)?;
    let dir = &cli.out_dir;
    let mut files: Vec<String> = Vec::new();
    // names relative to --out-dir, so the bundle is relocatable and its
    // bytes depend only on config and seed
    let mut push = |p: &Path| {
        files.push(
            p.file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_else(|| p.display().to_string()),
        )
    };

    let structure_path = dir.join("structure.json");
    report::write_json(
        &structure_path,
        &serde_json::to_value(formats::structure_to_file(&s))?,
    )?;
    push(&structure_path);

    let f = builtin_formula(&c.formula)?;
    let pool = build_pool(&s, "singletons")?;
    let cs = compute_charseq(&s, f.as_ref(), c.max_level, &pool)?;
    let charseq_path = dir.join("charseq.json");
    report::write_json(&charseq_path, &formats::charseq_to_json(&cs)?)?;
    push(&charseq_path);
    let p2_path = dir.join("p2.dot");
    report::write_text(&p2_path, &formats::p2_dot(&cs))?;
    push(&p2_path);

    let eps = parse_rat(&c.epsilon)?;
    let partition = regularity_partition(&g, eps, c.m0, &c.caps.caps())?;
    let partition_path = dir.join("partition.json");
    report::write_json(&partition_path, &formats::partition_json(&partition))?;
    push(&partition_path);
    let pairs_path = dir.join("pairs.csv");
    report::write_text(&pairs_path, &formats::pair_report_csv(&partition))?;
    push(&pairs_path);
    let rg = reduced_graph(&partition, parse_rat(&c.delta)?);
    let reduced_path = dir.join("reduced.dot");
    report::write_text(&reduced_path, &formats::reduced_dot(&rg))?;
    push(&reduced_path);

    let n_max = c.n.unwrap_or_else(|| g.n().min(10));
    if n_max > g.n() {
        bail!("--n {n_max} exceeds the vertex count {}", g.n());
    }
    let ns: Vec<usize> = (1..=n_max).collect();
    let rows: Vec<AlphaRow> = par::chunked_map(&ns, cli.threads, |&n| -> Result<AlphaRow> {
        let result = match alpha_exact(&g, n, DEFAULT_ALPHA_BUDGET) {
            Ok(a) => a,
            Err(CountingError::BudgetExceeded { .. }) => {
                alpha_lower(&g, n, LowerStrategy::Greedy, c.src.seed)?
            }
            Err(e) => return Err(e.into()),
        };
        Ok(AlphaRow {
            n,
            result,
            turan_upper: turan_upper(c.k, n)?,
            floor_half: (n / 2) as u64,
        })
    })
    .into_iter()
    .collect::<Result<_>>()?;
    let alpha_path = dir.join("alpha.csv");
    report::write_text(&alpha_path, &formats::alpha_csv(&rows))?;
    push(&alpha_path);

    let body = json!({
        "files": files,
        "relation": rel_name,
        "partition": {
            "k": partition.k(),
            "irregular_pairs": partition.irregular_count(),
            "status": format!("{:?}", partition.status),
        },
        "reduced_kept_pairs": rg.quotient.edge_count(),
        "charseq": {"pool_len": cs.pool_len(), "max_level": cs.max_level()},
        "alpha": {
            "rows": rows.len(),
            "all_exact": rows.iter().all(|r| r.result.exact),
        },
    });
    let config = json!({
        "source": c.src.echo(),
        "epsilon": c.epsilon,
        "m0": c.m0,
        "delta": c.delta,
        "k": c.k,
        "n": n_max,
        "formula": c.formula,
        "max_level": c.max_level,
        "caps": c.caps.echo(),
        "threads": cli.threads,
    });
    let report_path = dir.join("report.json");
    report::write_json(&report_path, &report::envelope(s.seed(), config.clone(), body.clone()))?;
    emit(s.seed(), config, body)?;
    Ok(Outcome::Computed)
}
