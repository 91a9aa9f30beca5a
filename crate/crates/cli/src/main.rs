use std::path::PathBuf;
use std::process::ExitCode;

use balanced_tamari::balance::{find_witness, has_imbalance_invariant, is_balanced};
use balanced_tamari::families::{
    classify_v_interval, closure_check, comparable_pair, is_v_balanced, is_weight_balanced,
    ClosureVerdict, ImbalanceSet,
};
use balanced_tamari::grammar::{builtin, builtin_renames, merge_variables, SynchronousGrammar};
use balanced_tamari::intervals::{count_balanced_intervals, count_maximal_balanced_intervals, BalancedSubposet};
use balanced_tamari::patterns::{classify_balanced, occurs, occurs_any, pattern_set, ImbalancePattern, PatternSetId};
use balanced_tamari::poly::{Polynomial, Var};
use balanced_tamari::sequences::{Family, SequenceReport, BALANCED_INTERVALS, MAXIMAL_INTERVALS};
use balanced_tamari::tamari::{interval_dot, TamariPoset};
use balanced_tamari::BinaryTree;
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "tamari", version, about = "Balanced binary trees in the Tamari lattice")]
struct Cli {
    /// Print JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads for long sweeps.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Count a tree family and compare with the reference values.
    Enum {
        /// balanced, maximal-balanced, balanced-intervals, maximal-intervals,
        /// interior-by-height, weight-balanced, zero-one-balanced or narayana
        family: String,
        #[arg(long)]
        max_n: Option<usize>,
        /// Row of the Narayana table.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Truncated generating series of a grammar.
    Series {
        #[arg(long, conflicts_with = "grammar", required_unless_present = "grammar")]
        builtin: Option<String>,
        /// Grammar file.
        #[arg(long)]
        grammar: Option<PathBuf>,
        #[arg(long)]
        degree: u32,
        /// Specializations such as `y=0`.
        #[arg(long, num_args = 1..)]
        set: Vec<String>,
        /// Print only the coefficient of `x^k`.
        #[arg(long)]
        coefficient: Option<u32>,
    },
    /// Check a property for every size up to a bound.
    Check {
        property: Property,
        #[arg(long, default_value_t = 8)]
        max_n: usize,
        /// Imbalance set such as `-2..0`, `[-2,1]` or `{0,1}`.
        #[arg(long, allow_hyphen_values = true)]
        v: Option<String>,
    },
    /// Hasse diagram in DOT format.
    Hasse {
        #[command(subcommand)]
        target: HasseTarget,
        #[arg(long, global = true)]
        output: Option<PathBuf>,
    },
    /// Test a tree for imbalance patterns or pattern sets.
    Pattern {
        tree: String,
        /// Pattern literals like `[-1 [-1] _]` or set names (pmax, pmin, print, plint).
        #[arg(required = true)]
        patterns: Vec<String>,
    },
    /// Statistics and classification of a tree.
    Classify { tree: String },
}

#[derive(Subcommand)]
enum HasseTarget {
    Tamari { n: usize },
    Balanced { n: usize },
    Interval { t0: String, t1: String },
}

#[derive(Clone, Copy, ValueEnum)]
enum Property {
    ClosureBalanced,
    ClosureVbalanced,
    ClosureWeightBalanced,
    ClosureNarayana,
    Hypercube,
    Intervals,
    /// Search for comparable `V`-balanced pairs.
    IncomparableVbalanced,
}

enum Failure {
    Mismatch,
    Usage(String),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let json = cli.json;
    let result = match cli.command {
        Command::Enum { family, max_n, n } => cmd_enum(&family, max_n, n, json),
        Command::Series {
            builtin,
            grammar,
            degree,
            set,
            coefficient,
        } => cmd_series(builtin, grammar, degree, &set, coefficient, json),
        Command::Check { property, max_n, v } => cmd_check(property, max_n, v.as_deref(), json),
        Command::Hasse { target, output } => cmd_hasse(target, output, json),
        Command::Pattern { tree, patterns } => cmd_pattern(&tree, &patterns, json),
        Command::Classify { tree } => cmd_classify(&tree, json),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Mismatch) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn emit(json: bool, value: Value, text: impl FnOnce() -> String) {
    if json {
        println!("{}", serde_json::to_string_pretty(&value).expect("json"));
    } else {
        print!("{}", text());
    }
}

fn verdict(pass: bool) -> Outcome {
    if pass {
        Ok(())
    } else {
        Err(Failure::Mismatch)
    }
}

fn tree(s: &str) -> Result<BinaryTree, Failure> {
    Ok(s.parse::<BinaryTree>()?)
}

fn cmd_enum(family: &str, max_n: Option<usize>, n: Option<usize>, json: bool) -> Outcome {
    let family: Family = match (family, n) {
        ("narayana", Some(n)) => Family::Narayana(n),
        ("narayana", None) => return Err(Failure::Usage("narayana needs --n".into())),
        (name, _) => name.parse()?,
    };
    let max = max_n.unwrap_or_else(|| family.fixture().len().max(1) - 1);
    let report = SequenceReport::new(family, max)?;
    let verdicts = report.verdicts();
    let rows: Vec<Value> = (0..report.computed.len())
        .map(|i| {
            json!({
                "index": i,
                "computed": report.computed[i].to_string(),
                "expected": report.expected[i],
                "match": verdicts[i],
            })
        })
        .collect();
    emit(
        json,
        json!({"family": family.to_string(), "rows": rows, "match": report.all_match()}),
        || {
            let mut out = format!("{family}\n");
            for i in 0..report.computed.len() {
                let expected = report.expected[i].map_or("-".to_string(), |e| e.to_string());
                let mark = match verdicts[i] {
                    Some(true) => "ok",
                    Some(false) => "MISMATCH",
                    None => "",
                };
                out += &format!("{i:>3} {:>14} {expected:>14} {mark}\n", report.computed[i]);
            }
            out
        },
    );
    verdict(report.all_match())
}

fn parse_sets(sets: &[String]) -> Result<Vec<(String, i64)>, Failure> {
    sets.iter()
        .map(|s| {
            let (k, v) = s
                .split_once('=')
                .ok_or_else(|| Failure::Usage(format!("expected name=value, got `{s}`")))?;
            let v: i64 = v.trim().parse().map_err(|_| Failure::Usage(format!("bad value in `{s}`")))?;
            Ok((k.trim().to_string(), v))
        })
        .collect()
}

fn cmd_series(
    name: Option<String>,
    file: Option<PathBuf>,
    degree: u32,
    sets: &[String],
    coefficient: Option<u32>,
    json: bool,
) -> Outcome {
    let (grammar, renames): (SynchronousGrammar, &[(&str, &str)]) = match (&name, &file) {
        (Some(name), _) => (builtin(name)?, builtin_renames(name)),
        (None, Some(path)) => (std::fs::read_to_string(path)?.parse()?, &[]),
        (None, None) => return Err(Failure::Usage("give --builtin or --grammar".into())),
    };
    if grammar.find_strict_order().is_none() {
        eprintln!("grammar fails the strictness certificate");
        return Err(Failure::Mismatch);
    }
    // merged names expand to their sources
    let mut early = Vec::new();
    let mut late = Vec::new();
    for (k, v) in parse_sets(sets)? {
        let sources: Vec<&str> = renames.iter().filter(|(_, to)| *to == k).map(|(from, _)| *from).collect();
        let names = if sources.is_empty() { vec![k.as_str()] } else { sources };
        for name in names {
            let is_bud = grammar.buds().iter().any(|b| b == name);
            let is_marker = grammar.markers().iter().any(|m| m == name);
            if (is_bud && v == 0) || is_marker {
                early.push((name.to_string(), v));
            } else {
                late.push((name.to_string(), v));
            }
        }
    }
    let early: Vec<(&str, i64)> = early.iter().map(|(k, v)| (k.as_str(), *v)).collect();
    let late: Vec<(&str, i64)> = late.iter().map(|(k, v)| (k.as_str(), *v)).collect();
    let series = grammar.series_with(degree, &early)?;
    let series = merge_variables(&series, renames).specialize(&late);
    let shown: Polynomial = match coefficient {
        Some(k) => series.coefficient_of_power(&Var::counting(grammar.axiom()), k),
        None => series,
    };
    let text = shown.to_string();
    emit(json, json!({"degree": degree, "coefficient": coefficient, "series": text}), || {
        format!("{text}\n")
    });
    Ok(())
}

fn chain_json(chain: &[BinaryTree]) -> Value {
    json!(chain.iter().map(|t| t.to_string()).collect::<Vec<_>>())
}

fn closure_sweep(
    max_n: usize,
    json: bool,
    label: &str,
    pred: impl Fn(&BinaryTree) -> bool + Sync,
) -> Outcome {
    let mut found = None;
    for n in 0..=max_n {
        if let Some(chain) = closure_check(&pred, n)? {
            found = Some((n, chain));
            break;
        }
    }
    let pass = found.is_none();
    emit(
        json,
        json!({
            "property": label,
            "max_n": max_n,
            "verdict": if pass { "PASS" } else { "FAIL" },
            "n": found.as_ref().map(|(n, _)| n),
            "witness": found.as_ref().map(|(_, c)| chain_json(c)),
        }),
        || match &found {
            None => format!("PASS {label} n <= {max_n}\n"),
            Some((n, chain)) => {
                let mut out = format!("FAIL {label} n = {n}\n");
                for t in chain {
                    out += &format!("  {t}\n");
                }
                out
            }
        },
    );
    verdict(pass)
}

fn cmd_check(property: Property, max_n: usize, v: Option<&str>, json: bool) -> Outcome {
    let need_v = || -> Result<ImbalanceSet, Failure> {
        Ok(v.ok_or_else(|| Failure::Usage("this property needs --v".into()))?.parse()?)
    };
    match property {
        Property::ClosureBalanced => closure_sweep(max_n, json, "closure-balanced", is_balanced),
        Property::ClosureWeightBalanced => {
            closure_sweep(max_n, json, "closure-weight-balanced", is_weight_balanced)
        }
        Property::ClosureNarayana => {
            for k in 0..max_n.max(1) {
                let label = format!("closure-narayana k = {k}");
                closure_sweep(max_n, json, &label, |t| t.nar() == k)?;
            }
            Ok(())
        }
        Property::ClosureVbalanced => {
            let set = need_v()?;
            if let Ok(expected) = classify_v_interval(&set) {
                let text = match expected {
                    ClosureVerdict::Closed => "closed".to_string(),
                    ClosureVerdict::NotClosed { case, mirrored, .. } => {
                        format!("not closed ({case:?}{})", if mirrored { ", mirrored" } else { "" })
                    }
                };
                if !json {
                    println!("expected: {text}");
                }
            }
            closure_sweep(max_n, json, &format!("closure-vbalanced {set}"), |t| is_v_balanced(t, &set))
        }
        Property::IncomparableVbalanced => {
            let set = need_v()?;
            let mut found = None;
            for n in 0..=max_n {
                if let Some(pair) = comparable_pair(|t| is_v_balanced(t, &set), n)? {
                    found = Some(pair);
                    break;
                }
            }
            let pass = found.is_none();
            emit(
                json,
                json!({
                    "property": "incomparable-vbalanced",
                    "v": set.to_string(),
                    "verdict": if pass { "PASS" } else { "FAIL" },
                    "witness": found.as_ref().map(|(a, b)| json!([a.to_string(), b.to_string()])),
                }),
                || match &found {
                    None => format!("PASS incomparable-vbalanced {set} n <= {max_n}\n"),
                    Some((a, b)) => format!("FAIL incomparable-vbalanced {set}\n  {a}\n  {b}\n"),
                },
            );
            verdict(pass)
        }
        Property::Hypercube => {
            let mut rows = Vec::new();
            let mut pass = true;
            for n in 0..=max_n {
                let report = BalancedSubposet::new(n)?.hypercube_report();
                let consistent = report.histogram.values().sum::<usize>() == report.intervals;
                pass &= report.failures.is_empty() && consistent;
                rows.push((n, report));
            }
            emit(
                json,
                json!({
                    "property": "hypercube",
                    "verdict": if pass { "PASS" } else { "FAIL" },
                    "sizes": rows.iter().map(|(n, r)| json!({
                        "n": n,
                        "intervals": r.intervals,
                        "histogram": r.histogram,
                        "failures": r.failures.iter().map(|(a, b)| json!([a.to_string(), b.to_string()])).collect::<Vec<_>>(),
                    })).collect::<Vec<_>>(),
                }),
                || {
                    let mut out = format!("{} hypercube n <= {max_n}\n", if pass { "PASS" } else { "FAIL" });
                    for (n, r) in &rows {
                        let hist: Vec<String> = r.histogram.iter().map(|(k, c)| format!("{k}:{c}")).collect();
                        out += &format!("{n:>3} {:>6} {}\n", r.intervals, hist.join(" "));
                        for (a, b) in &r.failures {
                            out += &format!("    failure {a} {b}\n");
                        }
                    }
                    out
                },
            );
            verdict(pass)
        }
        Property::Intervals => {
            let mut rows = Vec::new();
            let mut pass = true;
            for n in 0..=max_n {
                let all = count_balanced_intervals(n)?;
                let maximal = count_maximal_balanced_intervals(n, true)?;
                let total = maximal.specialize(&[("xi", 1)]).coefficient(&Default::default());
                let ok = BALANCED_INTERVALS.get(n).is_none_or(|&e| all == e.into())
                    && MAXIMAL_INTERVALS.get(n).is_none_or(|&e| total == e.into());
                pass &= ok;
                rows.push((n, all, total, maximal, ok));
            }
            emit(
                json,
                json!({
                    "property": "intervals",
                    "verdict": if pass { "PASS" } else { "FAIL" },
                    "sizes": rows.iter().map(|(n, a, t, m, ok)| json!({
                        "n": n, "intervals": a.to_string(), "maximal": t.to_string(),
                        "maximal_by_dimension": m.to_string(), "match": ok,
                    })).collect::<Vec<_>>(),
                }),
                || {
                    let mut out = format!("{} intervals n <= {max_n}\n", if pass { "PASS" } else { "FAIL" });
                    for (n, a, t, m, _) in &rows {
                        out += &format!("{n:>3} {a:>6} {t:>4}  {m}\n");
                    }
                    out
                },
            );
            verdict(pass)
        }
    }
}

fn cmd_hasse(target: HasseTarget, output: Option<PathBuf>, json: bool) -> Outcome {
    let dot = match target {
        HasseTarget::Tamari { n } => TamariPoset::new(n)?.to_dot(),
        HasseTarget::Balanced { n } => BalancedSubposet::new(n)?.to_dot(),
        HasseTarget::Interval { t0, t1 } => interval_dot(&tree(&t0)?, &tree(&t1)?)?,
    };
    match output {
        Some(path) => {
            std::fs::write(&path, &dot)?;
            emit(json, json!({"written": path}), || format!("wrote {}\n", path.display()));
        }
        None => emit(json, json!({"dot": dot}), || dot.clone()),
    }
    Ok(())
}

fn cmd_pattern(t: &str, patterns: &[String], json: bool) -> Outcome {
    let t = tree(t)?;
    let mut rows = Vec::new();
    for p in patterns {
        let found = match p.parse::<PatternSetId>() {
            Ok(id) => occurs_any(&t, &pattern_set(id)),
            Err(_) => occurs(&t, &p.parse::<ImbalancePattern>()?),
        };
        rows.push((p.clone(), found));
    }
    emit(
        json,
        json!({
            "tree": t.to_string(),
            "patterns": rows.iter().map(|(p, f)| json!({"pattern": p, "occurs": f})).collect::<Vec<_>>(),
        }),
        || {
            rows.iter()
                .map(|(p, f)| format!("{p}: {}\n", if *f { "occurs" } else { "avoided" }))
                .collect()
        },
    );
    Ok(())
}

fn cmd_classify(t: &str, json: bool) -> Outcome {
    let t = tree(t)?;
    let balanced = is_balanced(&t);
    let flags = if balanced {
        classify_balanced(&t)?.flag_names()
    } else {
        Vec::new()
    };
    let witness = find_witness(&t);
    let value = json!({
        "tree": t.to_string(),
        "nodes": t.node_count(),
        "height": t.height(),
        "imbalances": t.imbalances(),
        "balanced": balanced,
        "weight_balanced": is_weight_balanced(&t),
        "classes": flags,
        "witness": witness,
        "imbalance_invariant": !balanced && has_imbalance_invariant(&t),
        "canopy": t.canopy(),
        "nar": t.nar(),
    });
    emit(json, value, || {
        let imb: Vec<String> = t.imbalances().iter().map(i64::to_string).collect();
        let mut out = format!(
            "tree        {t}\nnodes       {}\nheight      {}\nimbalances  {}\nbalanced    {balanced}\n",
            t.node_count(),
            t.height(),
            imb.join(" ")
        );
        out += &format!("weight-bal. {}\n", is_weight_balanced(&t));
        if balanced {
            out += &format!("classes     {}\n", flags.join(" "));
        } else if let Some((x, y)) = witness {
            out += &format!("witness     x = {x}, y = {y}\n");
            out += &format!("invariant   {}\n", has_imbalance_invariant(&t));
        }
        out += &format!("canopy      {}\nnar         {}\n", t.canopy(), t.nar());
        out
    });
    Ok(())
}
