use std::collections::BTreeMap;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use epl::actionmodel::{product_raw, product_update, PointedActionModel};
use epl::formula::{build_sigma_check, Agent, AgentSet, Atom, CheckMode, Formula, Sigma};
use epl::kripke::{
    bisim_contraction, bisimilar, model_from_dot, to_dot, DotStyle, FrameClass, ModelFile,
    PointedModel,
};
use epl::normalform::{
    decide_single_agent, enumerate_canonical, falsify_bounded, is_clear, to_dnf, DnfFormula,
    Unclear,
};
use epl::parser::{parse_formula_with, print_formula, FileResolver};
use epl::scenarios::{build_scenario, verify_scenario, SCENARIOS};
use epl::semantics::{
    believed_update_pointed, classify_on_model, eval, sigma_trace, truthful_update, TraceStyle,
};
use epl::truelie::{
    classify_validities, dlf_witness_search, validity_profile, ValidityPair, DEFAULT_PROFILE_LEN,
};
use epl::{Error, Result};

#[derive(Parser)]
#[command(
    name = "epl",
    version,
    about = "Believed and truthful announcements, action models and true lies"
)]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Write the report or produced model here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate a formula at the point of a model.
    Check(ModelFormula),
    /// Announce a formula and print the resulting model.
    Update {
        #[command(flatten)]
        mf: ModelFormula,
        /// State elimination instead of arrow elimination.
        #[arg(long)]
        truthful: bool,
        /// Keep only the part reachable from the point.
        #[arg(long)]
        generated: bool,
    },
    /// Truth values of a formula along repeated announcements.
    Trace {
        #[command(flatten)]
        mf: ModelFormula,
        #[arg(long, default_value_t = 8)]
        steps: usize,
        /// Truthfully announce this formula instead of the traced one.
        #[arg(long, conflicts_with = "whether")]
        announce: Option<String>,
        /// Announce whether this formula holds.
        #[arg(long)]
        whether: Option<String>,
    },
    /// Which announcement outcomes a formula guarantees (or satisfies, with -m).
    Classify {
        #[arg(short = 'f')]
        formula: String,
        #[arg(short = 'm')]
        model: Option<PathBuf>,
        #[arg(long)]
        at: Option<String>,
        #[arg(long, default_value = "kd45")]
        class: FrameClass,
    },
    /// Disjunctive normal form of a single-agent formula.
    Dnf(FormulaArg),
    /// Clarity of each disjunct of the normal form.
    Clarity(FormulaArg),
    /// Search for a disjunctive lying form witness.
    Dlf(FormulaArg),
    /// Validity or satisfiability on canonical single-agent models.
    Decide {
        #[arg(short = 'f')]
        formula: String,
        #[arg(long, default_value = "kd45")]
        class: FrameClass,
        #[arg(long, value_enum, default_value_t = Mode::Valid)]
        mode: Mode,
    },
    /// Validity of the check formula for a sigma string.
    SigmaValid {
        #[arg(short = 'f')]
        formula: String,
        #[arg(long)]
        sigma: Sigma,
        #[arg(long, default_value = "kd45")]
        class: FrameClass,
        #[arg(long)]
        believable: bool,
    },
    /// Validity table over all sigma strings up to a length.
    Profile {
        #[arg(short = 'f')]
        formula: String,
        #[arg(long, default_value = "kd45")]
        class: FrameClass,
        #[arg(long = "max-len", visible_alias = "steps", default_value_t = DEFAULT_PROFILE_LEN)]
        max_len: usize,
    },
    /// Bisimilarity of two pointed models, or the contraction of one.
    Bisim {
        #[arg(short = 'm', required = true, num_args = 1..=2)]
        models: Vec<PathBuf>,
    },
    /// List the canonical single-agent models over some atoms.
    Enumerate {
        /// Comma-separated atoms.
        #[arg(long, default_value = "p")]
        atoms: String,
        #[arg(long, default_value = "kd45")]
        class: FrameClass,
    },
    /// Product update with an action model.
    Product {
        #[arg(short = 'm')]
        model: PathBuf,
        #[arg(long)]
        at: Option<String>,
        #[arg(short = 'a')]
        action: PathBuf,
        /// Keep unreachable pairs.
        #[arg(long)]
        raw: bool,
    },
    /// Bundled worked examples.
    Scenario {
        #[command(subcommand)]
        cmd: ScenarioCmd,
    },
    /// Graphviz rendering of a model, or reading one back.
    Dot {
        #[arg(short = 'm', required_unless_present = "parse")]
        model: Option<PathBuf>,
        #[arg(long)]
        at: Option<String>,
        #[arg(long, default_value = "full")]
        style: DotStyle,
        /// Read a DOT file produced by this tool and print it as JSON.
        #[arg(long, conflicts_with = "model")]
        parse: Option<PathBuf>,
    },
    /// Look for a small countermodel.
    Falsify {
        #[arg(short = 'f')]
        formula: String,
        #[arg(long, default_value = "kd45")]
        class: FrameClass,
        /// Comma-separated agents; defaults to those of the formula.
        #[arg(long)]
        agents: Option<String>,
        #[arg(long = "max-states", default_value_t = 3)]
        max_states: usize,
    },
}

#[derive(Subcommand)]
enum ScenarioCmd {
    List,
    /// Build and verify a scenario; parameters as key=value.
    Run {
        name: String,
        params: Vec<String>,
        /// Also write the scenario's models and actions as JSON files here.
        #[arg(long)]
        export: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ModelFormula {
    #[arg(short = 'm')]
    model: PathBuf,
    #[arg(short = 'f')]
    formula: String,
    /// Evaluate at this state instead of the file's point.
    #[arg(long)]
    at: Option<String>,
}

#[derive(Args)]
struct FormulaArg {
    #[arg(short = 'f')]
    formula: String,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Valid,
    Sat,
}

struct Report {
    json: Value,
    text: String,
}

impl Report {
    fn new(json: Value, text: impl Into<String>) -> Self {
        Report {
            json,
            text: text.into(),
        }
    }
}

fn formula(src: &str) -> Result<Formula> {
    parse_formula_with(src, &FileResolver::default())
}

fn load_model(path: &Path, at: Option<&str>) -> Result<PointedModel> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let file: ModelFile = serde_json::from_str(&text)?;
    let point = at
        .map(str::to_string)
        .or_else(|| file.point.clone())
        .ok_or_else(|| {
            Error::MalformedModel(format!("{} has no \"point\"; pass --at", path.display()))
        })?;
    PointedModel::at(file.into_model()?, &point)
}

fn model_json(pm: &PointedModel) -> Value {
    serde_json::from_str(&pm.to_json()).expect("model JSON is valid")
}

fn pair_json(p: &ValidityPair) -> Value {
    json!({
        "valid": p.plain.valid,
        "nontrivially_valid": p.plain.nontrivially_valid,
        "believable_valid": p.believable.valid,
        "believable_nontrivially_valid": p.believable.nontrivially_valid,
    })
}

fn dnf_json(d: &DnfFormula) -> Value {
    json!({
        "agent": d.agent.as_str(),
        "formula": print_formula(&d.to_formula()),
        "disjuncts": d.disjuncts.iter().map(|x| print_formula(&x.to_formula(&d.agent))).collect::<Vec<_>>(),
    })
}

fn run(cli: &Cli) -> Result<Report> {
    Ok(match &cli.cmd {
        Cmd::Check(mf) => {
            let pm = load_model(&mf.model, mf.at.as_deref())?;
            let f = formula(&mf.formula)?;
            let v = eval(&pm, &f)?;
            Report::new(
                json!({"state": pm.point_id(), "formula": print_formula(&f), "value": v}),
                format!("{v}\n"),
            )
        }
        Cmd::Update {
            mf,
            truthful,
            generated,
        } => {
            let pm = load_model(&mf.model, mf.at.as_deref())?;
            let f = formula(&mf.formula)?;
            let mut out = if *truthful {
                truthful_update(&pm, &f)?
            } else {
                believed_update_pointed(&pm, &f)?
            };
            if *generated {
                out = epl::kripke::generated_submodel(&out);
            }
            let text = out.to_json() + "\n";
            Report::new(model_json(&out), text)
        }
        Cmd::Trace {
            mf,
            steps,
            announce,
            whether,
        } => {
            let pm = load_model(&mf.model, mf.at.as_deref())?;
            let f = formula(&mf.formula)?;
            let style = match (announce, whether) {
                (Some(g), _) => TraceStyle::Truthful(formula(g)?),
                (_, Some(g)) => TraceStyle::TruthfulWhether(formula(g)?),
                _ => TraceStyle::Believed,
            };
            let r = sigma_trace(&pm, &f, *steps, &style)?;
            let bits = r.bit_string();
            let fix = r
                .fixpoint_index
                .map_or("none".to_string(), |k| k.to_string());
            Report::new(
                json!({"bits": bits, "fixpoint_index": r.fixpoint_index}),
                format!("bits {bits}\nfixpoint {fix}\n"),
            )
        }
        Cmd::Classify {
            formula: src,
            model,
            at,
            class,
        } => {
            let f = formula(src)?;
            match model {
                Some(path) => {
                    let pm = load_model(path, at.as_deref())?;
                    let c = classify_on_model(&pm, &f)?;
                    let mut text = String::new();
                    for (sigma, v) in &c.satisfied {
                        text +=
                            &format!("{sigma} satisfied {v} believable {}\n", c.believable[sigma]);
                    }
                    Report::new(
                        json!({"satisfied": c.satisfied, "believable": c.believable}),
                        text,
                    )
                }
                None => {
                    let c = classify_validities(&f, *class)?;
                    let rows = [
                        ("successful", &c.successful),
                        ("self_refuting", &c.self_refuting),
                        ("true_lie", &c.true_lie),
                        ("impossible_lie", &c.impossible_lie),
                    ];
                    let mut text = format!("class {class}\n");
                    let mut obj = serde_json::Map::new();
                    for (name, p) in rows {
                        text += &format!(
                            "{name:15} valid {:5} nontrivial {:5} believable {:5} believable-nontrivial {}\n",
                            p.plain.valid, p.plain.nontrivially_valid, p.believable.valid, p.believable.nontrivially_valid
                        );
                        obj.insert(name.into(), pair_json(p));
                    }
                    Report::new(json!({"class": class.to_string(), "classes": obj}), text)
                }
            }
        }
        Cmd::Dnf(FormulaArg { formula: src }) => {
            let d = to_dnf(&formula(src)?)?;
            let mut text = String::new();
            if d.disjuncts.is_empty() {
                text += "false\n";
            }
            for x in &d.disjuncts {
                text += &format!("{}\n", print_formula(&x.to_formula(&d.agent)));
            }
            Report::new(dnf_json(&d), text)
        }
        Cmd::Clarity(FormulaArg { formula: src }) => {
            let d = to_dnf(&formula(src)?)?;
            let rep = is_clear(&d);
            let mut text = format!("clear {}\n", rep.clear);
            for (i, x) in d.disjuncts.iter().enumerate() {
                let verdict = match rep.failures.iter().find(|(j, _)| *j == i) {
                    Some((_, Unclear::AlphaNotOpen)) => {
                        "unclear (propositional part contradictory)".into()
                    }
                    Some((_, Unclear::NoBoxChoice)) => {
                        "unclear (boxes jointly unsatisfiable)".into()
                    }
                    Some((_, Unclear::Diamond(k))) => {
                        format!("unclear (diamond {k} unsatisfiable)")
                    }
                    None => "clear".into(),
                };
                text += &format!("  {}: {verdict}\n", print_formula(&x.to_formula(&d.agent)));
            }
            Report::new(
                json!({"dnf": dnf_json(&d), "clear": rep.clear, "witness": rep.witness, "failures": rep.failures}),
                text,
            )
        }
        Cmd::Dlf(FormulaArg { formula: src }) => {
            let d = to_dnf(&formula(src)?)?;
            let names: Vec<String> = d
                .disjuncts
                .iter()
                .map(|x| print_formula(&x.to_formula(&d.agent)))
                .collect();
            match dlf_witness_search(&d)? {
                None => Report::new(
                    json!({"dnf": dnf_json(&d), "witness": Value::Null}),
                    "no witness: not equivalent to a disjunctive lying form\n",
                ),
                Some(w) => {
                    let set =
                        |ix: &[usize]| ix.iter().map(|&i| names[i].clone()).collect::<Vec<_>>();
                    let beta: BTreeMap<String, String> = w
                        .beta_choice
                        .iter()
                        .map(|(&t, &b)| {
                            let beta = &d.disjuncts[t].boxes[b];
                            (
                                names[t].clone(),
                                print_formula(&epl::normalform::box_formula(&d.agent, beta)),
                            )
                        })
                        .collect();
                    let text = format!(
                        "witness\nS = {{{}}}\nT = {{{}}}\nbeta = {:?}\nchi = {}\n",
                        set(&w.s).join(", "),
                        set(&w.t).join(", "),
                        beta,
                        print_formula(&w.chi)
                    );
                    Report::new(
                        json!({"dnf": dnf_json(&d), "witness": {
                            "S": set(&w.s), "T": set(&w.t), "beta": beta, "chi": print_formula(&w.chi)
                        }}),
                        text,
                    )
                }
            }
        }
        Cmd::Decide {
            formula: src,
            class,
            mode,
        } => {
            let f = formula(src)?;
            let mode = match mode {
                Mode::Valid => CheckMode::Valid,
                Mode::Sat => CheckMode::Satisfiable,
            };
            let d = decide_single_agent(&f, *class, mode)?;
            let w = d.witness.as_ref().map(|c| c.to_string());
            let text = match &w {
                Some(w) => format!("{}\nwitness {w}\n", d.holds),
                None => format!("{}\n", d.holds),
            };
            Report::new(json!({"holds": d.holds, "witness": w}), text)
        }
        Cmd::SigmaValid {
            formula: src,
            sigma,
            class,
            believable,
        } => {
            let f = formula(src)?;
            let agent = epl::normalform::single_agent(&f)?;
            let check = build_sigma_check(
                &f,
                sigma,
                CheckMode::Valid,
                *believable,
                &AgentSet::from([agent]),
            )?;
            let d = decide_single_agent(&check, *class, CheckMode::Valid)?;
            let w = d.witness.as_ref().map(|c| c.to_string());
            let text = match &w {
                Some(w) => format!("{}\ncounterexample {w}\n", d.holds),
                None => format!("{}\n", d.holds),
            };
            Report::new(
                json!({"sigma": sigma.to_string(), "valid": d.holds, "check": print_formula(&check), "counterexample": w}),
                text,
            )
        }
        Cmd::Profile {
            formula: src,
            class,
            max_len,
        } => {
            let p = validity_profile(&formula(src)?, *class, *max_len)?;
            let mut text = String::new();
            for (s, v) in &p.table {
                text += &format!("{s} {}\n", if *v { "valid" } else { "-" });
            }
            let runs: Vec<Vec<String>> = p
                .runs
                .iter()
                .map(|r| r.iter().map(|s| s.to_string()).collect())
                .collect();
            for r in &runs {
                text += &format!("run {}\n", r.join(" "));
            }
            let table: Vec<Value> = p
                .table
                .iter()
                .map(|(s, v)| json!([s.to_string(), v]))
                .collect();
            Report::new(json!({"table": table, "runs": runs}), text)
        }
        Cmd::Bisim { models } => {
            let first = load_model(&models[0], None)?;
            match models.get(1) {
                Some(path) => {
                    let second = load_model(path, None)?;
                    let v = bisimilar(&first, &second)?;
                    Report::new(json!({"bisimilar": v}), format!("{v}\n"))
                }
                None => {
                    let c = bisim_contraction(&first);
                    let text = c.to_json() + "\n";
                    Report::new(model_json(&c), text)
                }
            }
        }
        Cmd::Enumerate { atoms, class } => {
            let atoms: std::collections::BTreeSet<Atom> = atoms
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(Atom::from)
                .collect();
            let all = enumerate_canonical(&atoms, *class)?;
            let mut text = String::new();
            for (i, c) in all.iter().enumerate() {
                text += &format!("{i} {c}\n");
            }
            text += &format!("{} models\n", all.len());
            let list: Vec<String> = all.iter().map(|c| c.to_string()).collect();
            Report::new(json!({"count": all.len(), "models": list}), text)
        }
        Cmd::Product {
            model,
            at,
            action,
            raw,
        } => {
            let pm = load_model(model, at.as_deref())?;
            let pa = PointedActionModel::load(action)?;
            let out = if *raw {
                let p = product_raw(&pm.model, &pa)?;
                let point = p
                    .index_of(pm.point, pa.point)
                    .ok_or(Error::PreconditionFailedAtPoint)?;
                PointedModel::new(p.model, point)?
            } else {
                product_update(&pm, &pa)?
            };
            let text = out.to_json() + "\n";
            Report::new(model_json(&out), text)
        }
        Cmd::Scenario { cmd } => match cmd {
            ScenarioCmd::List => {
                let mut text = String::new();
                let mut list = Vec::new();
                for s in SCENARIOS {
                    text += &format!("{:13} {}\n", s.name, s.summary);
                    if !s.params.is_empty() {
                        text += &format!("{:13}   params: {}\n", "", s.params);
                    }
                    list.push(json!({"name": s.name, "params": s.params, "summary": s.summary}));
                }
                Report::new(Value::Array(list), text)
            }
            ScenarioCmd::Run {
                name,
                params,
                export,
            } => {
                let mut map = BTreeMap::new();
                for p in params {
                    let (k, v) = p
                        .split_once('=')
                        .ok_or_else(|| Error::ParamOutOfRange(format!("{p:?} is not key=value")))?;
                    map.insert(k.to_string(), v.to_string());
                }
                let sc = build_scenario(name, &map)?;
                if let Some(dir) = export {
                    sc.export(dir)?;
                }
                let report = verify_scenario(&sc);
                Report::new(serde_json::to_value(&report)?, report.to_text())
            }
        },
        Cmd::Dot {
            model,
            at,
            style,
            parse,
        } => match (model, parse) {
            (_, Some(path)) => {
                let text = std::fs::read_to_string(path)?;
                let pm = model_from_dot(&text)?;
                let out = pm.to_json() + "\n";
                Report::new(model_json(&pm), out)
            }
            (Some(path), None) => {
                let pm = load_model(path, at.as_deref())?;
                let dot = to_dot(&pm, *style)?;
                Report::new(json!({"dot": dot}), dot)
            }
            (None, None) => unreachable!("clap requires -m or --parse"),
        },
        Cmd::Falsify {
            formula: src,
            class,
            agents,
            max_states,
        } => {
            let f = formula(src)?;
            let agents: Vec<Agent> = match agents {
                Some(list) => list.split(',').map(str::trim).map(Agent::from).collect(),
                None => {
                    let mut a: Vec<Agent> = f.agents().into_iter().collect();
                    if a.is_empty() {
                        a.push(Agent::from(epl::parser::DEFAULT_AGENT));
                    }
                    a
                }
            };
            match falsify_bounded(&f, *class, &agents, *max_states)? {
                Some(pm) => {
                    let text = format!("countermodel\n{}\n", pm.to_json());
                    Report::new(json!({"found": true, "model": model_json(&pm)}), text)
                }
                None => Report::new(
                    json!({"found": false, "model": Value::Null}),
                    format!("no countermodel with at most {max_states} states\n"),
                ),
            }
        }
    })
}

fn emit(cli: &Cli, report: &Report) -> Result<()> {
    let body = match cli.format {
        Format::Text => report.text.clone(),
        Format::Json => serde_json::to_string_pretty(&report.json)? + "\n",
    };
    match &cli.out {
        Some(path) => std::fs::write(path, body)?,
        None => std::io::stdout().write_all(body.as_bytes())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match std::panic::catch_unwind(|| run(&cli).and_then(|r| emit(&cli, &r))) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(_) => {
            eprintln!("internal error");
            ExitCode::from(2)
        }
    }
}
