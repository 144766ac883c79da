use std::fmt::Write;
use std::fs;
use std::path::Path;

use serde_json::{json, Value};

use semchan::coding::{build_two_layer_code, converse_check, simulate, SimResult};
use semchan::distortion::{DistortionContext, DistortionKind, DistortionWeights};
use semchan::example::{self, golden_comparison, Example, GoldenCell};
use semchan::info::{invariant_report, shannon_capacity, InvariantReport};
use semchan::kb::{
    closure_fidelity, core_preservation_ratio, extract_core, parse_kb_with_guard, KnowledgeBase, ProofSystem,
    DEFAULT_GUARD,
};
use semchan::kernel::{ChannelConfig, Distribution};
use semchan::multiagent::{blocklengths, broadcast_analysis, feasibility, overlap, overlap_csv, OverlapCounts};

use crate::render::{atoms, estimate, f3, table};
use crate::{ChannelArgs, Cli, Command, DistortionArgs, Failure, Format, KindArg, PairArgs, SimulateArgs, EXIT_GOLDEN};

/// Formats one report field.
type Cell = fn(&InvariantReport) -> String;

/// Text to print and the exit code to leave with.
pub struct Output {
    pub text: String,
    pub code: u8,
}

impl From<String> for Output {
    fn from(text: String) -> Self {
        Self { text, code: 0 }
    }
}

type Res<T> = Result<T, Failure>;

pub fn run(cli: &Cli) -> Res<Output> {
    let guard = cli.guard.unwrap_or(DEFAULT_GUARD);
    let fmt = cli.format;
    match &cli.command {
        Command::Analyze { kb } => analyze(kb, guard, fmt).map(Into::into),
        Command::Overlap(a) => cmd_overlap(a, guard, fmt).map(Into::into),
        Command::Invariants(a) => invariants(a, guard, fmt).map(Into::into),
        Command::Capacity { channel, tol } => capacity(channel.as_deref(), *tol, fmt).map(Into::into),
        Command::Simulate(a) => cmd_simulate(a, guard, fmt).map(Into::into),
        Command::Example => example_tables(fmt),
        Command::Broadcast(a) => broadcast(a, guard, fmt).map(Into::into),
        Command::Distortion(a) => distortion(a, guard, fmt).map(Into::into),
    }
}

fn read(path: &Path) -> Res<String> {
    fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn load_kb(path: &Path, guard: u128) -> Res<(KnowledgeBase, ProofSystem)> {
    let text = read(path)?;
    parse_kb_with_guard(&text, guard).map_err(|e| {
        let mut f = Failure::from(e);
        f.message = format!("{}: {}", path.display(), f.message);
        f
    })
}

struct Pair {
    sender: KnowledgeBase,
    ps: ProofSystem,
    receivers: Vec<(String, KnowledgeBase)>,
}

/// Receivers share the sender's rules; a receiver file may omit them but
/// must not declare different ones.
fn load_pair(a: &PairArgs, guard: u128) -> Res<Pair> {
    let (sender, ps) = load_kb(&a.kb, guard)?;
    let mut receivers = Vec::new();
    for path in &a.receivers {
        let (kb, rps) = load_kb(path, guard)?;
        if !rps.rules().is_empty() && rps.rules() != ps.rules() {
            return Err(Failure::usage(format!(
                "{}: rules differ from the sender's",
                path.display()
            )));
        }
        ps.check_guard(kb.atoms().iter().chain(sender.atoms()))?;
        let name = path
            .file_stem()
            .map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned());
        receivers.push((name, kb));
    }
    Ok(Pair { sender, ps, receivers })
}

fn load_config(path: Option<&Path>) -> Res<ChannelConfig> {
    let text = match path {
        Some(p) => read(p)?,
        None => example::CHANNEL_JSON.to_owned(),
    };
    Ok(ChannelConfig::from_json(&text)?)
}

fn to_json(v: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

fn analyze(path: &Path, guard: u128, fmt: Format) -> Res<String> {
    let (kb, ps) = load_kb(path, guard)?;
    let a = extract_core(&kb, &ps);
    Ok(match fmt {
        Format::Json => to_json(&a),
        Format::Csv => {
            let mut out = String::from("atom,core,depth\n");
            for (atom, d) in &a.depth_by_atom {
                let _ = writeln!(out, "\"{atom}\",{},{d}", a.is_core(atom));
            }
            out
        }
        Format::Text => {
            let mut out = String::new();
            let _ = writeln!(out, "core ({}): {}", a.core.len(), atoms(&a.core));
            let _ = writeln!(out, "shortcuts ({}): {}", a.shortcuts.len(), atoms(&a.shortcuts));
            for (d, layer) in a.strata.iter().enumerate() {
                let _ = writeln!(out, "T{d}: {}", atoms(layer));
            }
            let _ = writeln!(out, "atomicity: {}", a.atomicity);
            let _ = writeln!(out, "max depth: {}", a.max_depth);
            out
        }
    })
}

fn cmd_overlap(a: &PairArgs, guard: u128, fmt: Format) -> Res<String> {
    let p = load_pair(a, guard)?;
    let rows: Vec<(String, OverlapCounts, Value)> = p
        .receivers
        .iter()
        .map(|(name, r)| {
            let o = overlap(&p.sender, r, &p.ps);
            let f = feasibility(&p.sender, r, &p.ps);
            let rho = core_preservation_ratio(&p.sender, r.atoms(), &p.ps);
            let fcn = closure_fidelity(p.sender.atoms(), r.atoms(), &p.ps);
            let extra = json!({
                "rho_atom": rho.to_string(),
                "f_cn": fcn.to_string(),
                "feasibility": f,
                "sets": o,
            });
            (name.clone(), o.counts(), extra)
        })
        .collect();
    Ok(match fmt {
        Format::Json => {
            let v: Vec<Value> = rows
                .iter()
                .map(|(n, c, extra)| json!({"receiver": n, "counts": c, "detail": extra}))
                .collect();
            to_json(&v)
        }
        Format::Csv => overlap_csv(&rows.into_iter().map(|(n, c, _)| (n, c)).collect::<Vec<_>>()),
        Format::Text => {
            let mut header = vec!["receiver"];
            header.extend(OverlapCounts::FIELDS);
            header.extend(["rho_atom", "F_Cn", "H1", "H2"]);
            let body: Vec<Vec<String>> = rows
                .iter()
                .map(|(n, c, extra)| {
                    let mut r = vec![n.clone()];
                    r.extend(c.as_array().iter().map(ToString::to_string));
                    r.push(extra["rho_atom"].as_str().unwrap_or_default().to_owned());
                    r.push(extra["f_cn"].as_str().unwrap_or_default().to_owned());
                    r.push(extra["feasibility"]["f1_strong"].to_string());
                    r.push(extra["feasibility"]["f2"].to_string());
                    r
                })
                .collect();
            table(&header, &body)
        }
    })
}

fn reports(a: &ChannelArgs, guard: u128) -> Res<(Pair, Vec<InvariantReport>)> {
    let p = load_pair(&a.pair, guard)?;
    let cfg = load_config(a.channel.as_deref())?;
    let w = cfg.carrier()?;
    let ctx = DistortionContext::new(&p.sender, &p.ps);
    let source = Distribution::uniform(p.sender.labels())?;
    let mut out = Vec::new();
    for (_, r) in &p.receivers {
        let chan = cfg.semantic_channel(&p.sender, r, &p.ps)?;
        out.push(invariant_report(&ctx, &chan, &w, &source, a.tol)?);
    }
    Ok((p, out))
}

fn invariants(a: &ChannelArgs, guard: u128, fmt: Format) -> Res<String> {
    let (p, reps) = reports(a, guard)?;
    Ok(match fmt {
        Format::Json => {
            let v: Vec<Value> = p
                .receivers
                .iter()
                .zip(&reps)
                .map(|((n, _), r)| json!({"receiver": n, "report": r}))
                .collect();
            to_json(&v)
        }
        Format::Csv => {
            let mut out = format!("receiver,{}\n", InvariantReport::csv_header());
            for ((n, _), r) in p.receivers.iter().zip(&reps) {
                let _ = writeln!(out, "\"{n}\",{}", r.csv_row());
            }
            out
        }
        Format::Text => {
            let quantities: [(&str, Cell); 16] = [
                ("atomicity", |r| r.structural.atomicity.to_string()),
                ("max_depth", |r| r.structural.max_depth.to_string()),
                ("rho_atom", |r| r.set_level.rho_atom_exact.to_string()),
                ("F_Cn", |r| r.set_level.f_cn_exact.to_string()),
                ("phi_atom", |r| f3(r.noise_pair.phi_atom)),
                ("psi_plus", |r| f3(r.noise_pair.psi_plus)),
                ("F", |r| f3(r.quality.fidelity_index)),
                ("E", |r| f3(r.quality.depth_expansion)),
                ("delta_A", |r| r.shifts.delta_a.to_string()),
                ("delta_Dd", |r| r.shifts.delta_dd.to_string()),
                ("C(W)", |r| f3(r.information.shannon_capacity)),
                ("C_sem", |r| f3(r.information.semantic_capacity)),
                ("C_sem lower", |r| f3(r.information.semantic_capacity_lower)),
                ("I_sem", |r| f3(r.information.semantic_mi)),
                ("Fano lower", |r| f3(r.information.fano_lower)),
                ("E[d_H]", |r| f3(r.information.expected_hamming)),
            ];
            let names: Vec<&str> = p.receivers.iter().map(|(n, _)| n.as_str()).collect();
            let mut header = vec!["quantity"];
            header.extend(&names);
            let body: Vec<Vec<String>> = quantities
                .iter()
                .map(|(q, f)| {
                    let mut row = vec![(*q).to_owned()];
                    row.extend(reps.iter().map(f));
                    row
                })
                .collect();
            table(&header, &body)
        }
    })
}

fn capacity(channel: Option<&Path>, tol: f64, fmt: Format) -> Res<String> {
    let w = load_config(channel)?.carrier()?;
    let c = shannon_capacity(&w, tol)?;
    Ok(match fmt {
        Format::Json => to_json(&c),
        Format::Csv => format!("bits,iterations,gap\n{},{},{}\n", c.bits, c.iterations, c.gap),
        Format::Text => format!(
            "C(W) = {} bits ({} iterations, gap {:.1e})\n",
            f3(c.bits),
            c.iterations,
            c.gap
        ),
    })
}

fn one_receiver(p: &Pair) -> Res<&KnowledgeBase> {
    match p.receivers.as_slice() {
        [(_, r)] => Ok(r),
        _ => Err(Failure::usage("this command takes exactly one --receiver")),
    }
}

fn cmd_simulate(a: &SimulateArgs, guard: u128, fmt: Format) -> Res<String> {
    let p = load_pair(&a.chan.pair, guard)?;
    let r = one_receiver(&p)?;
    let w = load_config(a.chan.channel.as_deref())?.carrier()?;
    let mut runs = Vec::new();
    for &n in &a.n {
        let code = build_two_layer_code(&p.sender, r, &w, n, a.seed, &p.ps)?;
        let res = simulate(&code, &w, a.trials, a.seed)?;
        let conv = converse_check(&code, &w, res.p_e_hat.min(1.0 - f64::EPSILON))?;
        runs.push((res, conv));
    }
    Ok(match fmt {
        Format::Json => {
            let v: Vec<Value> = runs.iter().map(|(s, c)| json!({"result": s, "converse": c})).collect();
            to_json(&v)
        }
        Format::Csv => {
            let mut out = format!("{}\n", SimResult::CSV_HEADER);
            for (s, _) in &runs {
                let _ = writeln!(out, "{}", s.csv_row());
            }
            out
        }
        Format::Text => {
            let body: Vec<Vec<String>> = runs
                .iter()
                .map(|(s, c)| {
                    vec![
                        s.n.to_string(),
                        s.trials.to_string(),
                        f3(s.p_e_hat),
                        f3(s.p_e_cn_hat),
                        f3(s.ci_halfwidth),
                        s.redundant_closure_errors.to_string(),
                        format!("{} <= {}", f3(c.lhs), f3(c.rhs)),
                    ]
                })
                .collect();
            table(
                &["n", "trials", "p_e", "p_e_cn", "ci", "redundant_cn_err", "converse"],
                &body,
            )
        }
    })
}

fn broadcast(a: &ChannelArgs, guard: u128, fmt: Format) -> Res<String> {
    let p = load_pair(&a.pair, guard)?;
    let w = load_config(a.channel.as_deref())?.carrier()?;
    let cw = shannon_capacity(&w, a.tol)?.bits;
    let rs: Vec<KnowledgeBase> = p.receivers.iter().map(|(_, r)| r.clone()).collect();
    let b = broadcast_analysis(&p.sender, &rs, cw, &p.ps);
    Ok(match fmt {
        Format::Json => to_json(&b),
        Format::Csv | Format::Text => {
            let body: Vec<Vec<String>> = b
                .receivers
                .iter()
                .map(|s| {
                    vec![
                        p.receivers[s.index].0.clone(),
                        s.bottleneck.to_string(),
                        s.feasibility.f1.to_string(),
                        s.feasibility.f1_strong.to_string(),
                        s.feasibility.f2.to_string(),
                        s.f_cn_exact.to_string(),
                    ]
                })
                .collect();
            let header = ["receiver", "bottleneck", "F1", "F1_strong", "F2", "F_Cn"];
            if fmt == Format::Csv {
                let mut out = format!("{}\n", header.join(","));
                for r in body {
                    let _ = writeln!(out, "\"{}\",{}", r[0], r[1..].join(","));
                }
                out
            } else {
                let mut out = table(&header, &body);
                let _ = writeln!(out, "n_Cn (broadcast): {}", estimate(&b.n_broadcast));
                out
            }
        }
    })
}

fn distortion(a: &DistortionArgs, guard: u128, fmt: Format) -> Res<String> {
    let p = load_pair(&a.pair, guard)?;
    let r = one_receiver(&p)?;
    let kind = match a.kind {
        KindArg::Hamming => DistortionKind::Hamming,
        KindArg::Closure => DistortionKind::Closure,
        KindArg::Depth => DistortionKind::Depth,
        KindArg::Composite => {
            let [x, y, z] = a.weights[..] else {
                return Err(Failure::usage("--weights takes three values"));
            };
            DistortionKind::Composite {
                weights: DistortionWeights::new(x, y, z)?,
            }
        }
    };
    let m = DistortionContext::new(&p.sender, &p.ps).matrix(r, kind);
    Ok(match fmt {
        Format::Json => to_json(&m),
        Format::Csv | Format::Text => m.to_csv(),
    })
}

fn example_tables(fmt: Format) -> Res<Output> {
    let ex = Example::load()?;
    let cells = golden_comparison(&ex)?;
    let failed = cells.iter().any(|c| c.determined && !c.matches);
    let mut text = match fmt {
        Format::Json => to_json(&cells),
        Format::Csv => {
            let mut out = String::from("table,quantity,pair,expected,actual,determined,matches\n");
            for c in &cells {
                let _ = writeln!(
                    out,
                    "{},\"{}\",\"{}\",{},{},{},{}",
                    c.table, c.quantity, c.pair, c.expected, c.actual, c.determined, c.matches
                );
            }
            out
        }
        Format::Text => golden_text(&cells, &ex),
    };
    if failed && fmt == Format::Text {
        text.push_str("golden mismatch in a KB-determined cell\n");
    }
    Ok(Output {
        text,
        code: if failed { EXIT_GOLDEN } else { 0 },
    })
}

fn golden_text(cells: &[GoldenCell], ex: &Example) -> String {
    let mut out = String::new();
    for name in [
        example::OVERLAP_TABLE,
        example::INVARIANT_TABLE,
        example::BLOCKLENGTH_TABLE,
    ] {
        let body: Vec<Vec<String>> = cells
            .iter()
            .filter(|c| c.table == name)
            .map(|c| {
                let status = match (c.matches, c.determined) {
                    (true, _) => "ok",
                    (false, true) => "MISMATCH",
                    (false, false) => "decoder-dependent",
                };
                vec![
                    c.quantity.to_owned(),
                    format!("(1,{})", c.pair),
                    c.expected.clone(),
                    c.actual.clone(),
                    status.to_owned(),
                ]
            })
            .collect();
        let _ = writeln!(out, "== {name} ==");
        out.push_str(&table(&["quantity", "pair", "published", "computed", "status"], &body));
        out.push('\n');
    }
    let core = extract_core(&ex.sender, &ex.ps);
    let _ = writeln!(out, "sender core: {}", atoms(&core.core));
    if let Some(r) = ex.receiver("2'") {
        if let Ok(c) = ex
            .config
            .carrier()
            .and_then(|w| shannon_capacity(&w, semchan::info::DEFAULT_TOL))
        {
            let b = blocklengths(&ex.sender, r, c.bits, &ex.ps);
            let _ = writeln!(out, "(1,2') compression ratio: {}", estimate(&b.ratio));
        }
    }
    out
}
