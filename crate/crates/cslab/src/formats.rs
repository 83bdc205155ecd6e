//! On-disk formats: structure/template JSON with validated loaders,
//! emit-only JSON for sequences/fragments/reports, CSV tables, DOT.
//!
//! Map-valued JSON serializes through BTreeMap, so files are
//! byte-stable for a fixed input.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use cslab_core::charseq::CharSeq;
use cslab_core::counting::AlphaResult;
use cslab_core::graph::Graph;
use cslab_core::independence::{
    BlockArray, BlockChainReport, ConfigTemplate, DepthVerdict, LoopOutcome, LoopReport,
};
use cslab_core::orderprops::{
    ChainIssue, ChainVerdict, CopChainReport, CopFragment, EmptyOpIssue, EmptyOpVerdict,
    HalfGraphFragment,
};
use cslab_core::rat::Rat;
use cslab_core::regularity::{
    HierarchicalReport, PairVerdict, ReducedGraph, RegularPartition, SpectrumEntry,
};
use cslab_core::structures::FiniteStructure;

// ------------------------------------------------------------------ structure

/// Wire form of a finite structure. Every index is re-validated on
/// load; a file that decodes but violates an invariant is rejected.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureFile {
    pub n: usize,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub relations: BTreeMap<String, Vec<(usize, usize)>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub unary: BTreeMap<String, Vec<usize>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub equivalences: BTreeMap<String, Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub constants: BTreeMap<String, usize>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub parts: BTreeMap<String, Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

pub fn structure_to_file(s: &FiniteStructure) -> StructureFile {
    let mut f = StructureFile {
        n: s.universe_size(),
        seed: s.seed(),
        ..StructureFile::default()
    };
    for name in s.relation_names() {
        let m = s.relation(name).expect("name came from the structure");
        f.relations.insert(name.to_owned(), m.edges());
    }
    for name in s.unary_names() {
        let b = s.unary(name).expect("name came from the structure");
        f.unary.insert(name.to_owned(), b.to_vec());
    }
    for name in s.equivalence_names() {
        let p = s.equivalence(name).expect("name came from the structure");
        f.equivalences.insert(name.to_owned(), p.classes().to_vec());
    }
    for (name, v) in s.constants() {
        f.constants.insert(name.to_owned(), v);
    }
    for label in s.part_labels() {
        let members = s.part(label).expect("label came from the structure");
        f.parts.insert(label.to_owned(), members.to_vec());
    }
    f
}

pub fn structure_from_file(f: &StructureFile) -> Result<FiniteStructure> {
    if f.n == 0 {
        bail!("universe must be nonempty");
    }
    let in_range = |what: &str, name: &str, i: usize| -> Result<()> {
        if i >= f.n {
            bail!("{what} {name:?} mentions element {i}, universe size is {}", f.n);
        }
        Ok(())
    };
    let mut s = FiniteStructure::new(f.n);
    for (name, edges) in &f.relations {
        s.ensure_relation(name);
        for &(u, v) in edges {
            in_range("relation", name, u)?;
            in_range("relation", name, v)?;
            s.try_add_edge(name, u, v)
                .with_context(|| format!("relation {name:?}, edge ({u},{v})"))?;
        }
    }
    for (name, members) in &f.unary {
        for &i in members {
            in_range("unary", name, i)?;
        }
        s.set_unary(name, members);
    }
    for (name, classes) in &f.equivalences {
        s.set_equivalence(name, classes.clone())
            .with_context(|| format!("equivalence {name:?}"))?;
    }
    for (name, &v) in &f.constants {
        in_range("constant", name, v)?;
        s.set_constant(name, v)
            .with_context(|| format!("constant {name:?}"))?;
    }
    for (label, members) in &f.parts {
        for &i in members {
            in_range("part", label, i)?;
        }
        s.set_part(label, members.clone());
    }
    if let Some(seed) = f.seed {
        s.set_seed(seed);
    }
    s.validate().context("structure invariants")?;
    Ok(s)
}

pub fn load_structure(path: &Path) -> Result<FiniteStructure> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let file: StructureFile = serde_json::from_str(&text)
        .with_context(|| format!("decoding {}", path.display()))?;
    structure_from_file(&file).with_context(|| format!("validating {}", path.display()))
}

// ------------------------------------------------------- sequence of supports

/// {"levels": {"1": [i,...], "2": [[i,j],...]}, "witnesses": {...}}.
/// Level 1 is flat; higher levels are index tuples. Witness keys are
/// comma-joined tuples; the map is dropped entirely if any witness
/// enumeration exceeds its space cap, never truncated silently.
pub fn charseq_to_json(cs: &CharSeq<'_>) -> Result<Value> {
    let mut levels = serde_json::Map::new();
    let mut witnesses = serde_json::Map::new();
    let mut witnesses_ok = true;
    for lvl in 1..=cs.max_level() {
        let members = cs
            .level_members(lvl)
            .with_context(|| format!("materializing level {lvl}"))?;
        if lvl == 1 {
            let flat: Vec<usize> = members.iter().map(|m| m[0]).collect();
            levels.insert("1".to_owned(), json!(flat));
        } else {
            levels.insert(lvl.to_string(), json!(members));
        }
        if !witnesses_ok {
            continue;
        }
        for m in &members {
            match cs.witness(m) {
                Ok(Some(x)) => {
                    let key = m
                        .iter()
                        .map(|i| i.to_string())
                        .collect::<Vec<_>>()
                        .join(",");
                    witnesses.insert(key, json!(x));
                }
                Ok(None) => unreachable!("level members hold by construction"),
                Err(_) => {
                    witnesses_ok = false;
                    witnesses.clear();
                    break;
                }
            }
        }
    }
    let mut obj = serde_json::Map::new();
    obj.insert("levels".to_owned(), Value::Object(levels));
    if witnesses_ok {
        obj.insert("witnesses".to_owned(), Value::Object(witnesses));
    }
    Ok(Value::Object(obj))
}

pub fn graph_dot(g: &Graph, name: &str) -> String {
    let mut out = format!("graph {name} {{\n");
    for v in 0..g.n() {
        let _ = writeln!(out, "  {v};");
    }
    for u in 0..g.n() {
        for v in (u + 1)..g.n() {
            if g.has_edge(u, v) {
                let _ = writeln!(out, "  {u} -- {v};");
            }
        }
    }
    out.push_str("}\n");
    out
}

/// DOT of the graph on pool indices whose edges are the two-element
/// supports.
pub fn p2_dot(cs: &CharSeq<'_>) -> String {
    graph_dot(&cs.p2_graph(), "p2")
}

// ------------------------------------------------------------------ fragments

/// {"kind": "half" | "cop" | "empty-op", "a": [...], "b": [...],
/// "depth": m, "verified": bool}. For "cop" the rows are the signed
/// base-index pairs; for the other kinds they are element or pool
/// indices.
pub fn half_fragment_json(frag: &HalfGraphFragment, verified: bool) -> Value {
    json!({
        "kind": "half",
        "a": frag.a_seq,
        "b": frag.b_seq,
        "depth": frag.len(),
        "verified": verified,
    })
}

pub fn cop_fragment_json(frag: &CopFragment, depth: usize, verified: bool) -> Value {
    json!({
        "kind": "cop",
        "a": frag.a_pairs,
        "b": frag.b_pairs,
        "depth": depth,
        "verified": verified,
    })
}

pub fn empty_op_fragment_json(a: &[usize], b: &[usize], depth: usize, verified: bool) -> Value {
    json!({
        "kind": "empty-op",
        "a": a,
        "b": b,
        "depth": depth,
        "verified": verified,
    })
}

// ------------------------------------------------------------------ templates

/// {"h": rows, "n": columns - 1, "edges": [[[r,c],[r2,c2]], ...]}.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TemplateFile {
    pub h: usize,
    pub n: usize,
    pub edges: Vec<((usize, usize), (usize, usize))>,
}

pub fn template_to_file(t: &ConfigTemplate) -> TemplateFile {
    TemplateFile {
        h: t.height(),
        n: t.width() - 1,
        edges: t.ones().copied().collect(),
    }
}

pub fn template_from_file(f: &TemplateFile) -> Result<ConfigTemplate> {
    let width = f.n.checked_add(1).context("template column count overflows")?;
    ConfigTemplate::new(f.h, width, &f.edges)
        .map_err(|e| anyhow::anyhow!("invalid template: {e}"))
}

pub fn load_template(path: &Path) -> Result<ConfigTemplate> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let file: TemplateFile = serde_json::from_str(&text)
        .with_context(|| format!("decoding {}", path.display()))?;
    template_from_file(&file).with_context(|| format!("validating {}", path.display()))
}

// ---------------------------------------------------------- array-side reports

pub fn array_json(arr: &BlockArray, template: &ConfigTemplate) -> Value {
    json!({
        "h": arr.h,
        "width": arr.width,
        "rows": arr.rows,
        "blocks": arr.blocks(),
        "template": {
            "h": template.height(),
            "n": template.width() - 1,
            "edges": template.ones().copied().collect::<Vec<_>>(),
        },
    })
}

pub fn loop_report_json(r: &LoopReport) -> Value {
    json!({"indices": r.indices, "m": r.m, "verified": r.verified})
}

pub fn loop_outcome_json(o: &LoopOutcome) -> Value {
    match o {
        LoopOutcome::Found(r) => json!({"found": true, "loop": loop_report_json(r)}),
        LoopOutcome::NoneExhaustive => json!({"found": false, "exhaustive": true}),
        LoopOutcome::NoneWithinBudget => json!({"found": false, "exhaustive": false}),
    }
}

pub fn depth_verdict_json(v: &DepthVerdict, part_names: &[String]) -> Value {
    let checks: Vec<Value> = v
        .checks
        .iter()
        .map(|c| {
            json!({
                "part": part_names.get(c.part).cloned().unwrap_or_else(|| c.part.to_string()),
                "holds": c.holds,
                "failure": c.failure.as_ref().map(|(eta, nu)| json!({"eta": eta, "nu": nu})),
            })
        })
        .collect();
    json!({
        "k": v.k,
        "cap": v.cap,
        "holds": v.holds,
        "vacuous": v.vacuous,
        "checks": checks,
    })
}

pub fn block_chain_json(rep: &BlockChainReport) -> Value {
    json!({
        "tuples": rep.tuples,
        "witness_blocks": rep.witness_blocks,
        "witness_source": rep.witness_source,
        "cond1": rep.cond1,
        "cond2": rep.cond2,
        "cond3": rep.cond3,
        "cond1_loop": rep.cond1_loop.as_ref().map(loop_report_json),
        "cond3_loop": rep.cond3_loop.as_ref().map(loop_report_json),
        "cond2_failure": rep.cond2_failure.map(|(t, i)| json!({"tuple": t, "index": i})),
        "degenerate": rep.degenerate,
        "holds": rep.holds(),
    })
}

/// One line per condition: pass/fail plus the certificate when failing.
pub fn block_chain_table(rep: &BlockChainReport) -> String {
    let mut out = String::from("cond  verdict  certificate\n");
    let loop_str = |l: &Option<LoopReport>| {
        l.as_ref()
            .map(|r| format!("loop indices={:?} m={}", r.indices, r.m))
            .unwrap_or_else(|| "-".to_owned())
    };
    let _ = writeln!(
        out,
        "1     {}  {}",
        if rep.cond1 { "pass   " } else { "FAIL   " },
        loop_str(&rep.cond1_loop)
    );
    let cond2 = match rep.cond2 {
        None => "skip   ",
        Some(true) => "pass   ",
        Some(false) => "FAIL   ",
    };
    let cert2 = rep
        .cond2_failure
        .map(|(t, i)| format!("witness after tuple {t} misses index {i}"))
        .unwrap_or_else(|| "-".to_owned());
    let _ = writeln!(out, "2     {cond2}  {cert2}");
    let _ = writeln!(
        out,
        "3     {}  {}",
        if rep.cond3 { "pass   " } else { "FAIL   " },
        loop_str(&rep.cond3_loop)
    );
    out
}

fn chain_issue_str(issue: &Option<ChainIssue>) -> String {
    match issue {
        None => "-".to_owned(),
        Some(ChainIssue::CommonRealizer { x, block }) => {
            format!("x={x:?} realizes both formulas on block {block}")
        }
        Some(ChainIssue::ChainWitness {
            witness,
            block,
            needed_phi,
        }) => format!(
            "witness {witness} fails {} on block {block}",
            if *needed_phi { "phi" } else { "psi" }
        ),
        Some(ChainIssue::CrossRealizer { x, i, j }) => {
            format!("x={x:?} crosses blocks {i} < {j}")
        }
    }
}

pub fn chain_verdict_table(v: &ChainVerdict) -> String {
    let mut out = String::from("cond  verdict  certificate\n");
    for (idx, c) in [(1, &v.cond1), (2, &v.cond2), (3, &v.cond3)] {
        let _ = writeln!(
            out,
            "{idx}     {}  {}",
            if c.holds { "pass   " } else { "FAIL   " },
            chain_issue_str(&c.issue)
        );
    }
    out.push_str("indiscernibility of the block sequence: not checked\n");
    out
}

pub fn chain_verdict_json(v: &ChainVerdict) -> Value {
    let cond = |c: &cslab_core::orderprops::CondVerdict| {
        json!({"holds": c.holds, "issue": chain_issue_str(&c.issue)})
    };
    json!({
        "cond1": cond(&v.cond1),
        "cond2": cond(&v.cond2),
        "cond3": cond(&v.cond3),
        "holds": v.holds(),
        "indiscernibility_checked": v.indiscernibility_checked,
    })
}

pub fn cop_chain_json(r: &CopChainReport) -> Value {
    let cross: Vec<Value> = r
        .cross
        .iter()
        .map(|c| json!({"i": c.i, "j": c.j, "p2_positive": c.p2_positive}))
        .collect();
    json!({
        "cop_holds": r.cop.holds,
        "chain": chain_verdict_json(&r.chain),
        "cross": cross,
    })
}

pub fn empty_op_json(v: &EmptyOpVerdict) -> Value {
    let issue = match &v.issue {
        None => Value::Null,
        Some(EmptyOpIssue::CrossPair { i, j, expected }) => {
            json!({"cross_pair": {"i": i, "j": j, "expected": expected}})
        }
        Some(EmptyOpIssue::RowPositive { row, indices }) => {
            json!({"row_positive": {"row": format!("{row:?}"), "indices": indices}})
        }
    };
    json!({"holds": v.holds, "vacuous_rows": v.vacuous_rows, "issue": issue})
}

// ------------------------------------------------------------------------ CSV

fn rat_cell(r: Rat) -> String {
    r.to_string()
}

/// i,j,density_num,density_den,verdict,witness_x,witness_y
pub fn pair_report_csv(p: &RegularPartition) -> String {
    let mut out = String::from("i,j,density_num,density_den,verdict,witness_x,witness_y\n");
    for (&(i, j), rep) in &p.pair_report {
        let (verdict, wx, wy) = match &rep.verdict {
            PairVerdict::Regular => ("regular", String::new(), String::new()),
            PairVerdict::Irregular { x_sub, y_sub, .. } => {
                ("irregular", x_sub.len().to_string(), y_sub.len().to_string())
            }
            PairVerdict::Undecided { .. } => ("undecided", String::new(), String::new()),
        };
        let _ = writeln!(
            out,
            "{i},{j},{},{},{verdict},{wx},{wy}",
            rep.density.numer(),
            rep.density.denom()
        );
    }
    out
}

/// level,units,truncated_units,interstitial_omitted,min_k
pub fn ledger_csv(r: &HierarchicalReport) -> String {
    let mut out = String::from("level,units,truncated_units,interstitial_omitted,min_k\n");
    for l in &r.levels {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            l.level,
            l.units,
            l.truncated_units,
            l.interstitial_omitted,
            l.min_k.map(|k| k.to_string()).unwrap_or_default()
        );
    }
    out
}

pub struct AlphaRow {
    pub n: usize,
    pub result: AlphaResult,
    pub turan_upper: Rat,
    pub floor_half: u64,
}

/// n,alpha,exact,turan_upper_k,floor_half,witness (witness ;-joined)
pub fn alpha_csv(rows: &[AlphaRow]) -> String {
    let mut out = String::from("n,alpha,exact,turan_upper_k,floor_half,witness\n");
    for r in rows {
        let witness = r
            .result
            .witness
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(";");
        let _ = writeln!(
            out,
            "{},{},{},{},{},{witness}",
            r.n,
            r.result.value,
            r.result.exact,
            rat_cell(r.turan_upper),
            r.floor_half
        );
    }
    out
}

pub fn alpha_rows_json(rows: &[AlphaRow]) -> Value {
    let v: Vec<Value> = rows
        .iter()
        .map(|r| {
            json!({
                "n": r.n,
                "alpha": r.result.value,
                "exact": r.result.exact,
                "turan_upper_k": rat_cell(r.turan_upper),
                "floor_half": r.floor_half,
                "witness": r.result.witness,
            })
        })
        .collect();
    json!(v)
}

/// size,density_num,density_den,x,y
pub fn spectrum_csv(entries: &[SpectrumEntry]) -> String {
    let mut out = String::from("size,density_num,density_den,x,y\n");
    for e in entries {
        let join = |v: &[usize]| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(";")
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            e.size,
            e.density.numer(),
            e.density.denom(),
            join(&e.x),
            join(&e.y)
        );
    }
    out
}

pub fn spectrum_json(entries: &[SpectrumEntry]) -> Value {
    let v: Vec<Value> = entries
        .iter()
        .map(|e| {
            json!({
                "size": e.size,
                "x": e.x,
                "y": e.y,
                "density": rat_cell(e.density),
            })
        })
        .collect();
    json!(v)
}

/// Classes become nodes labeled by size; edges carry the kept pairs.
pub fn reduced_dot(rg: &ReducedGraph) -> String {
    let mut out = String::from("graph reduced {\n");
    for (i, cl) in rg.classes.iter().enumerate() {
        let _ = writeln!(out, "  {i} [label=\"{i} (|{}|)\"];", cl.len());
    }
    for u in 0..rg.quotient.n() {
        for v in (u + 1)..rg.quotient.n() {
            if rg.quotient.has_edge(u, v) {
                let _ = writeln!(out, "  {u} -- {v};");
            }
        }
    }
    let _ = writeln!(out, "  // delta={} epsilon={}", rg.delta, rg.epsilon);
    out.push_str("}\n");
    out
}

pub fn partition_json(p: &RegularPartition) -> Value {
    let pairs: Vec<Value> = p
        .pair_report
        .iter()
        .map(|(&(i, j), rep)| {
            let verdict = match &rep.verdict {
                PairVerdict::Regular => json!("regular"),
                PairVerdict::Irregular { x_sub, y_sub, deviation } => json!({
                    "irregular": {
                        "witness_x": x_sub,
                        "witness_y": y_sub,
                        "deviation": rat_cell(*deviation),
                    }
                }),
                PairVerdict::Undecided { trials } => json!({"undecided": {"trials": trials}}),
            };
            json!({
                "i": i,
                "j": j,
                "density": rat_cell(rep.density),
                "verdict": verdict,
            })
        })
        .collect();
    json!({
        "k": p.k(),
        "epsilon": rat_cell(p.epsilon),
        "m0": p.m0,
        "rounds": p.rounds,
        "status": format!("{:?}", p.status),
        "irregular_pairs": p.irregular_count(),
        "energy_trace": p.energy_trace.iter().map(|e| rat_cell(*e)).collect::<Vec<_>>(),
        "classes": p.classes,
        "pairs": pairs,
    })
}

pub fn hierarchical_json(r: &HierarchicalReport) -> Value {
    let levels: Vec<Value> = r
        .levels
        .iter()
        .map(|l| {
            json!({
                "level": l.level,
                "units": l.units,
                "truncated_units": l.truncated_units,
                "interstitial_omitted": l.interstitial_omitted,
                "min_k": l.min_k,
            })
        })
        .collect();
    json!({
        "levels": levels,
        "bottom_internal_omitted": r.bottom_internal_omitted,
        "total_omitted": r.total_omitted,
        "reconciled": r.reconciled,
        "bound": rat_cell(r.bound),
        "bound_holds": r.bound_holds,
    })
}
