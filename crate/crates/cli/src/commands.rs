//! One function per subcommand, each producing a [`Report`].

use std::fmt::Write;

use relgrowth::document::{parse_word, Model};
use relgrowth::dynamics::{bound_check, displacement_bracket, growth_report, LengthFunction};
use relgrowth::free_product::Word;
use relgrowth::graph_map::{TopologicalRepresentative, PF_ITERATION_CAP, PF_TOLERANCE};
use relgrowth::graph_of_groups::MarkedMetricGraph;
use relgrowth::legality::{
    classify_turns, verify_rtt, verify_train_track, ConnectingVerdict, RttViolation, Turn,
};
use relgrowth::library::{self, EXAMPLES};
use relgrowth::{Error, Result};
use serde::Serialize;

use crate::output::{num, Report, Table};
use crate::Estimation;

fn edge_names(g: &MarkedMetricGraph, edges: &[usize]) -> Vec<String> {
    edges.iter().map(|&e| g.edges()[e].name.clone()).collect()
}

fn join(xs: &[String]) -> String {
    xs.join(" ")
}

fn joined_nums(xs: &[f64]) -> String {
    xs.iter().map(|&x| num(x)).collect::<Vec<_>>().join(" ")
}

fn element(model: &Model, text: &str) -> Result<Word> {
    parse_word(&model.presentation, text, "element")
}

#[derive(Serialize)]
struct StratumRecord {
    stratum: usize,
    edges: Vec<String>,
    zero: bool,
    eigenvalue: f64,
    eigenvector: Vec<f64>,
}

#[derive(Serialize)]
struct TurnRecord {
    vertex: String,
    turn: String,
    degenerate: bool,
    legal: bool,
    orbit: Vec<String>,
    steps_to_degenerate: Option<usize>,
}

#[derive(Serialize)]
struct AnalyzeRecord {
    edges: Vec<String>,
    transition_matrix: Vec<Vec<u64>>,
    strata: Vec<StratumRecord>,
    mu_max: f64,
    /// One-based `R`.
    top_stratum: usize,
    pf_metric: Vec<f64>,
    pf_lipschitz: f64,
    pf_tolerance: f64,
    pf_iteration_cap: usize,
    turns: Vec<TurnRecord>,
}

pub fn analyze(model: &Model) -> Result<Report> {
    let f = model.representative()?;
    let g = f.graph();
    let s = f.strata();
    let strata: Vec<StratumRecord> = s
        .strata
        .iter()
        .enumerate()
        .map(|(r, h)| StratumRecord {
            stratum: r + 1,
            edges: edge_names(g, &h.edges),
            zero: h.is_zero(),
            eigenvalue: h.eigenvalue,
            eigenvector: h.eigenvector.clone(),
        })
        .collect();
    let pf = f.pf_metric()?;
    let turns: Vec<TurnRecord> = classify_turns(f)
        .turns
        .iter()
        .map(|(t, c)| TurnRecord {
            vertex: g.vertices()[t.vertex].name.clone(),
            turn: t.format(g),
            degenerate: t.is_degenerate(),
            legal: c.legal,
            orbit: c.orbit.iter().map(|u| u.format(g)).collect(),
            steps_to_degenerate: c.steps_to_degenerate,
        })
        .collect();
    let record = AnalyzeRecord {
        edges: g.edges().iter().map(|e| e.name.clone()).collect(),
        transition_matrix: s.matrix.clone(),
        mu_max: s.mu_max,
        top_stratum: s.top + 1,
        pf_lipschitz: f.lipschitz_constant(&pf).constant,
        pf_metric: pf.lengths(),
        pf_tolerance: PF_TOLERANCE,
        pf_iteration_cap: PF_ITERATION_CAP,
        strata,
        turns,
    };

    let mut text = String::new();
    writeln!(text, "strata (bottom-up):").unwrap();
    for h in &record.strata {
        let kind = if h.zero {
            "zero".to_string()
        } else {
            format!("mu = {}", num(h.eigenvalue))
        };
        let top = if h.stratum == record.top_stratum {
            "  [R]"
        } else {
            ""
        };
        writeln!(
            text,
            "  H{} {{{}}}  {kind}{top}",
            h.stratum,
            h.edges.join(", ")
        )
        .unwrap();
    }
    writeln!(
        text,
        "mu_R = {} at R = {}",
        num(record.mu_max),
        record.top_stratum
    )
    .unwrap();
    writeln!(text, "PF metric: {}", joined_nums(&record.pf_metric)).unwrap();
    writeln!(text, "Lip on PF metric: {}", num(record.pf_lipschitz)).unwrap();
    writeln!(text, "turns:").unwrap();
    for t in record.turns.iter().filter(|t| !t.degenerate) {
        let class = if t.legal { "legal" } else { "illegal" };
        writeln!(text, "  {} at {}: {class}", t.turn, t.vertex).unwrap();
    }
    let table = Table {
        headers: vec![
            "stratum",
            "edges",
            "zero",
            "eigenvalue",
            "eigenvector",
            "top",
        ],
        rows: record
            .strata
            .iter()
            .map(|h| {
                vec![
                    h.stratum.to_string(),
                    join(&h.edges),
                    h.zero.to_string(),
                    num(h.eigenvalue),
                    joined_nums(&h.eigenvector),
                    (h.stratum == record.top_stratum).to_string(),
                ]
            })
            .collect(),
    };
    Ok(Report::new("analyze", &record, table, text))
}

pub fn growth(model: &Model, text: &str, tree: bool, est: &Estimation) -> Result<Report> {
    let g = element(model, text)?;
    let length = if tree {
        LengthFunction::Translation(&model.graph)
    } else {
        LengthFunction::Relative(&model.presentation)
    };
    let report = growth_report(
        &model.automorphism,
        &g,
        length,
        est.iterations,
        est.word_guard,
        est.tolerance,
    )?;
    let e = &report.estimate;
    let rows: Vec<Vec<String>> = report
        .sequence
        .iter()
        .enumerate()
        .map(|(k, &l)| {
            let (root, ratio) = if k == 0 {
                (String::new(), String::new())
            } else {
                (num(e.root_estimates[k - 1]), num(e.ratios[k - 1]))
            };
            vec![k.to_string(), num(l), root, ratio]
        })
        .collect();
    let mut out = String::new();
    writeln!(
        out,
        "element {} over {} iterations",
        report.element, report.iterations
    )
    .unwrap();
    for row in &rows {
        writeln!(out, "  k = {:>3}  length = {}", row[0], row[1]).unwrap();
    }
    writeln!(out, "root estimate = {}", num(e.root_estimate)).unwrap();
    writeln!(out, "tail estimate = {}", num(e.tail_estimate)).unwrap();
    writeln!(out, "growth rate estimate = {}", num(e.estimate)).unwrap();
    writeln!(
        out,
        "converged = {} (tolerance {})",
        e.converged,
        num(e.tolerance)
    )
    .unwrap();
    let table = Table {
        headers: vec!["k", "length", "root_estimate", "ratio"],
        rows,
    };
    Ok(Report::new("growth", &report, table, out))
}

pub fn displacement(
    model: &Model,
    grid: &[f64],
    sample: &[String],
    est: &Estimation,
) -> Result<Report> {
    let f = model.representative()?;
    let words: Vec<Word> = if sample.is_empty() {
        model.sample()?
    } else {
        sample
            .iter()
            .enumerate()
            .map(|(i, s)| parse_word(&model.presentation, s, &format!("sample[{i}]")))
            .collect::<Result<_>>()?
    };
    let report = displacement_bracket(
        f,
        grid,
        est.iterations,
        &words,
        est.word_guard,
        est.tolerance,
    )?;
    let mut out = String::new();
    for p in &report.grid {
        writeln!(
            out,
            "  N = {:<8} Lip(f_N) = {}  (edge {})",
            num(p.n),
            num(p.lipschitz),
            p.witness_edge
        )
        .unwrap();
    }
    for g in &report.growth {
        writeln!(
            out,
            "  {}: estimate {} (converged {})",
            g.element,
            num(g.estimate.estimate),
            g.estimate.converged
        )
        .unwrap();
    }
    writeln!(
        out,
        "bracket [{}, {}], width {}",
        num(report.lower),
        num(report.upper),
        num(report.width)
    )
    .unwrap();
    writeln!(
        out,
        "mu_R = {} at R = {}",
        num(report.mu_max),
        report.top_stratum + 1
    )
    .unwrap();
    let table = Table {
        headers: vec!["n", "lipschitz", "witness_edge"],
        rows: report
            .grid
            .iter()
            .map(|p| vec![num(p.n), num(p.lipschitz), p.witness_edge.clone()])
            .collect(),
    };
    Ok(Report::new("displacement", &report, table, out))
}

#[derive(Serialize)]
struct ViolationRecord {
    edge: String,
    detail: String,
}

#[derive(Serialize)]
struct StratumVerdictRecord {
    stratum: usize,
    zero: bool,
    passes: bool,
    germs: Vec<ViolationRecord>,
    connecting: ConnectingVerdict,
    legality: Vec<ViolationRecord>,
}

#[derive(Serialize)]
struct TrainTrackRecord {
    passes: bool,
    witness_edge: Option<String>,
    witness_turn: Option<String>,
}

#[derive(Serialize)]
struct VerifyRecord {
    train_track: TrainTrackRecord,
    rtt_passes: bool,
    rtt_bound: usize,
    strata: Vec<StratumVerdictRecord>,
}

fn connecting_summary(c: &ConnectingVerdict) -> String {
    match c {
        ConnectingVerdict::Vacuous => "vacuous".into(),
        ConnectingVerdict::VerifiedUpTo {
            bound,
            paths_checked,
            exhaustive,
        } => {
            let scope = if *exhaustive { "all" } else { "first" };
            format!("verified up to {bound} edges ({scope} {paths_checked} paths)")
        }
        ConnectingVerdict::Counterexample { path } => format!("counterexample {path}"),
    }
}

pub fn verify(model: &Model, bound: Option<usize>) -> Result<Report> {
    let f: &TopologicalRepresentative = model.representative()?;
    let g = f.graph();
    let bound = bound.unwrap_or(2 * g.edge_count());
    let tt = verify_train_track(f);
    let rtt = verify_rtt(f, bound);
    let witness: Option<&(usize, Turn)> = tt.witness.as_ref();
    let violations = |v: &[RttViolation]| -> Vec<ViolationRecord> {
        v.iter()
            .map(|x| ViolationRecord {
                edge: g.edges()[x.edge].name.clone(),
                detail: x.detail.clone(),
            })
            .collect()
    };
    let record = VerifyRecord {
        train_track: TrainTrackRecord {
            passes: tt.passes,
            witness_edge: witness.map(|(e, _)| g.edges()[*e].name.clone()),
            witness_turn: witness.map(|(_, t)| t.format(g)),
        },
        rtt_passes: rtt.passes(),
        rtt_bound: rtt.bound,
        strata: rtt
            .strata
            .iter()
            .map(|s| StratumVerdictRecord {
                stratum: s.stratum + 1,
                zero: s.zero,
                passes: s.passes(),
                germs: violations(&s.germs),
                connecting: s.connecting.clone(),
                legality: violations(&s.legality),
            })
            .collect(),
    };
    let verdict = |b: bool| if b { "pass" } else { "fail" };
    let mut out = String::new();
    write!(out, "train track: {}", verdict(tt.passes)).unwrap();
    if let (Some(e), Some(t)) = (
        &record.train_track.witness_edge,
        &record.train_track.witness_turn,
    ) {
        write!(out, " (image of {e} takes illegal turn {t})").unwrap();
    }
    writeln!(out).unwrap();
    writeln!(out, "relative train track: {}", verdict(record.rtt_passes)).unwrap();
    for s in &record.strata {
        writeln!(out, "  H{}: {}", s.stratum, verdict(s.passes)).unwrap();
        for v in &s.germs {
            writeln!(out, "    germs: edge {}: {}", v.edge, v.detail).unwrap();
        }
        writeln!(
            out,
            "    connecting paths: {}",
            connecting_summary(&s.connecting)
        )
        .unwrap();
        for v in &s.legality {
            writeln!(out, "    legality: edge {}: {}", v.edge, v.detail).unwrap();
        }
    }
    let table = Table {
        headers: vec![
            "stratum",
            "zero",
            "germs_ok",
            "connecting",
            "legality_ok",
            "passes",
        ],
        rows: record
            .strata
            .iter()
            .map(|s| {
                vec![
                    s.stratum.to_string(),
                    s.zero.to_string(),
                    s.germs.is_empty().to_string(),
                    connecting_summary(&s.connecting),
                    s.legality.is_empty().to_string(),
                    s.passes.to_string(),
                ]
            })
            .collect(),
    };
    let mut report = Report::new("verify", &record, table, out);
    if !record.rtt_passes {
        report.exit_code = 2;
    }
    Ok(report)
}

pub fn bound(model: &Model, text: &str, iterations: usize, word_guard: usize) -> Result<Report> {
    let f = model.representative()?;
    let g = element(model, text)?;
    let report = bound_check(f, &g, iterations, word_guard)?;
    let mut out = String::new();
    writeln!(
        out,
        "element {}: l_T = {} on the PF metric",
        report.element,
        num(report.initial_length)
    )
    .unwrap();
    writeln!(
        out,
        "script A = {}, mu_R = {}",
        num(report.script_a),
        num(report.mu_max)
    )
    .unwrap();
    for s in &report.steps {
        writeln!(
            out,
            "  k = {:>3}  observed {} <= bound {}: {}",
            s.k,
            num(s.observed),
            num(s.bound),
            s.holds && s.stratum_inequalities_hold
        )
        .unwrap();
    }
    writeln!(
        out,
        "deg P = {} (at most m - 1: {})",
        report.p_degree, report.degree_ok
    )
    .unwrap();
    writeln!(out, "bound holds: {}", report.holds).unwrap();
    let table = Table {
        headers: vec![
            "k",
            "index_total",
            "p",
            "bound",
            "observed",
            "holds",
            "stratum_inequalities_hold",
        ],
        rows: report
            .steps
            .iter()
            .map(|s| {
                vec![
                    s.k.to_string(),
                    s.index_total.to_string(),
                    num(s.p),
                    num(s.bound),
                    num(s.observed),
                    s.holds.to_string(),
                    s.stratum_inequalities_hold.to_string(),
                ]
            })
            .collect(),
    };
    let holds = report.holds;
    let mut r = Report::new("bound", &report, table, out);
    if !holds {
        r.exit_code = 2;
    }
    Ok(r)
}

#[derive(Serialize)]
struct SweepRow {
    n: f64,
    lipschitz: f64,
    witness_edge: String,
    lengths: Vec<f64>,
}

pub fn sweep(model: &Model, grid: &[f64]) -> Result<Report> {
    let f = model.representative()?;
    let g = f.graph();
    if grid.is_empty() {
        return Err(Error::input("n-grid", "empty grid"));
    }
    let rows: Vec<SweepRow> = grid
        .iter()
        .map(|&n| {
            let metric = f.rescale_family(n)?;
            let lip = f.lipschitz_constant(&metric);
            Ok(SweepRow {
                n,
                lipschitz: lip.constant,
                witness_edge: g.edges()[lip.witness_edge].name.clone(),
                lengths: metric.lengths(),
            })
        })
        .collect::<Result<_>>()?;
    let mut out = String::new();
    for r in &rows {
        writeln!(
            out,
            "N = {:<8} Lip = {}  (edge {})  lengths {}",
            num(r.n),
            num(r.lipschitz),
            r.witness_edge,
            joined_nums(&r.lengths)
        )
        .unwrap();
    }
    let table = Table {
        headers: vec!["n", "lipschitz", "witness_edge", "lengths"],
        rows: rows
            .iter()
            .map(|r| {
                vec![
                    num(r.n),
                    num(r.lipschitz),
                    r.witness_edge.clone(),
                    joined_nums(&r.lengths),
                ]
            })
            .collect(),
    };
    Ok(Report::new("sweep", &rows, table, out))
}

#[derive(Serialize)]
struct ExampleRecord {
    name: &'static str,
    description: String,
}

pub fn examples(show: Option<&str>) -> Result<Report> {
    if let Some(name) = show {
        let document = library::example_text(name)?;
        let table = Table {
            headers: vec!["name", "document"],
            rows: vec![vec![name.to_string(), document.to_string()]],
        };
        let record = serde_json::json!({ "name": name, "document": document });
        return Ok(Report::new(
            "examples",
            &record,
            table,
            document.to_string(),
        ));
    }
    let list: Vec<ExampleRecord> = EXAMPLES
        .iter()
        .map(|(name, _)| {
            let model = library::example(name)?;
            Ok(ExampleRecord {
                name,
                description: model.info.map(|i| i.description).unwrap_or_default(),
            })
        })
        .collect::<Result<_>>()?;
    let mut out = String::new();
    for e in &list {
        writeln!(out, "{:<12} {}", e.name, e.description).unwrap();
    }
    let table = Table {
        headers: vec!["name", "description"],
        rows: list
            .iter()
            .map(|e| vec![e.name.to_string(), e.description.clone()])
            .collect(),
    };
    Ok(Report::new("examples", &list, table, out))
}
