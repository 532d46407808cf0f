//! Parametric constructions of the worked examples, each with a list of
//! checks that `verify_scenario` runs.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::actionmodel::{
    actions_equivalent, mk_action, product_raw, product_update, ActionKind, PointedActionModel,
};
use crate::error::{Error, Result};
use crate::formula::{build_sigma_check, Agent, AgentSet, Atom, CheckMode, Formula, Sigma};
use crate::kripke::{
    bisimilar, check_frame_class, generated_submodel, FrameClass, KripkeModel, PointedModel,
};
use crate::normalform::{
    enumerate_canonical, falsify_bounded, sigma_valid_single_agent, CanonicalModel,
};
use crate::parser::parse_formula;
use crate::semantics::{believed_update_pointed, eval, sigma_trace, truthful_update, TraceStyle};

pub const MAX_FAN: usize = 12;
pub const MAX_MUDDY: usize = 6;

#[derive(Debug, Clone)]
pub enum Expect {
    Holds {
        model: String,
        formula: Formula,
        expected: bool,
    },
    Bisimilar {
        left: String,
        right: String,
        expected: bool,
    },
    /// Bit string of `sigma_trace` at the model's point.
    Trace {
        model: String,
        formula: Formula,
        style: TraceStyle,
        expected: String,
    },
    /// Frame class of the point-generated submodel.
    InClass {
        model: String,
        class: FrameClass,
        expected: bool,
    },
    States {
        model: String,
        expected: usize,
    },
    SigmaValid {
        formula: Formula,
        sigma: Sigma,
        class: FrameClass,
        believable: bool,
        expected: bool,
    },
    /// Sequences of named actions, compared over the named models.
    Equivalent {
        left: Vec<String>,
        right: Vec<String>,
        suite: Vec<String>,
        expected: bool,
    },
}

#[derive(Debug, Clone)]
pub struct Check {
    pub description: String,
    /// Which worked example the expectation comes from.
    pub source: String,
    pub expect: Expect,
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub params: BTreeMap<String, String>,
    pub models: Vec<(String, PointedModel)>,
    pub formulas: Vec<(String, Formula)>,
    pub actions: Vec<(String, PointedActionModel)>,
    pub checks: Vec<Check>,
}

impl Scenario {
    fn new(name: &str, params: BTreeMap<String, String>) -> Self {
        Scenario {
            name: name.into(),
            params,
            models: Vec::new(),
            formulas: Vec::new(),
            actions: Vec::new(),
            checks: Vec::new(),
        }
    }

    pub fn model(&self, name: &str) -> Result<&PointedModel> {
        self.models
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, m)| m)
            .ok_or_else(|| {
                Error::UnknownState(format!("no model {name} in scenario {}", self.name))
            })
    }

    pub fn formula(&self, name: &str) -> Result<&Formula> {
        self.formulas
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, f)| f)
            .ok_or_else(|| {
                Error::ParamOutOfRange(format!("no formula {name} in scenario {}", self.name))
            })
    }

    pub fn action(&self, name: &str) -> Result<&PointedActionModel> {
        self.actions
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, a)| a)
            .ok_or_else(|| {
                Error::ParamOutOfRange(format!("no action {name} in scenario {}", self.name))
            })
    }

    fn add_model(&mut self, name: impl Into<String>, pm: PointedModel) {
        self.models.push((name.into(), pm));
    }

    fn add_formula(&mut self, name: &str, f: Formula) {
        self.formulas.push((name.into(), f));
    }

    fn check(&mut self, description: impl Into<String>, source: &str, expect: Expect) {
        self.checks.push(Check {
            description: description.into(),
            source: source.into(),
            expect,
        });
    }

    fn holds(&mut self, model: &str, formula: &Formula, expected: bool, source: &str) {
        self.check(
            format!("{model} |= {formula}"),
            source,
            Expect::Holds {
                model: model.into(),
                formula: formula.clone(),
                expected,
            },
        );
    }

    /// Writes every model and action as JSON into `dir`.
    pub fn export(&self, dir: &Path) -> Result<Vec<std::path::PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        for (name, pm) in &self.models {
            let path = dir.join(format!("{name}.json"));
            std::fs::write(&path, pm.to_json())?;
            written.push(path);
        }
        for (name, pa) in &self.actions {
            let path = dir.join(format!("action_{name}.json"));
            std::fs::write(&path, pa.model.to_json(Some(pa.point_name())))?;
            written.push(path);
        }
        Ok(written)
    }
}

pub struct ScenarioInfo {
    pub name: &'static str,
    pub params: &'static str,
    pub summary: &'static str,
}

pub const SCENARIOS: [ScenarioInfo; 11] = [
    ScenarioInfo {
        name: "two-state",
        params: "",
        summary: "two-state single-agent model where p & B p is a true lie at t only",
    },
    ScenarioInfo {
        name: "fan",
        params: "n=1..12 (8), root=true|false",
        summary: "fan of branches, p alternating from false at the leaves, traced under its unstable formula",
    },
    ScenarioInfo {
        name: "sigma-fan",
        params: "n=1..12 (8), sigma=BITS (011100011), root=true|false",
        summary: "the fan frame decorated so that the trace follows sigma",
    },
    ScenarioInfo {
        name: "doubled-kd45",
        params: "n=2..12 (8), sigma=BITS (alternating)",
        summary: "two-agent KD45 chain version of the fan",
    },
    ScenarioInfo {
        name: "s5-closure",
        params: "n=2..12 (8), sigma=BITS (alternating)",
        summary: "equivalence closure of the doubled model under truthful announcements",
    },
    ScenarioInfo {
        name: "muddy",
        params: "n=1..6 (3), k=1..n (n)",
        summary: "muddy children after the father's announcement, with nobody-knows rounds",
    },
    ScenarioInfo {
        name: "butterfly",
        params: "",
        summary: "two private lies followed by two private assignments",
    },
    ScenarioInfo {
        name: "k45-eight",
        params: "",
        summary: "the eight one-atom K45 models and a true lie that is not successful",
    },
    ScenarioInfo {
        name: "arnold",
        params: "",
        summary: "smallest KD45 models for each row of the spy belief table",
    },
    ScenarioInfo {
        name: "pang-juan",
        params: "",
        summary: "a lie combined with an assignment, as one action and as two",
    },
    ScenarioInfo {
        name: "oscillation",
        params: "iterations=1..12 (6)",
        summary: "two-action model whose repeated execution alternates between two models",
    },
];

fn fixed(src: &str) -> Formula {
    parse_formula(src).expect("built-in formula parses")
}

fn param_usize(
    params: &BTreeMap<String, String>,
    key: &str,
    default: usize,
    lo: usize,
    hi: usize,
) -> Result<usize> {
    let v = match params.get(key) {
        None => default,
        Some(s) => s
            .parse()
            .map_err(|_| Error::ParamOutOfRange(format!("{key}={s} is not a number")))?,
    };
    if v < lo || v > hi {
        return Err(Error::ParamOutOfRange(format!(
            "{key}={v} is outside {lo}..={hi}"
        )));
    }
    Ok(v)
}

fn param_bool(params: &BTreeMap<String, String>, key: &str, default: bool) -> Result<bool> {
    match params.get(key).map(String::as_str) {
        None => Ok(default),
        Some("true") => Ok(true),
        Some("false") => Ok(false),
        Some(s) => Err(Error::ParamOutOfRange(format!(
            "{key}={s} is not true or false"
        ))),
    }
}

fn param_sigma(params: &BTreeMap<String, String>, default: Sigma, min_len: usize) -> Result<Sigma> {
    let sigma = match params.get("sigma") {
        None => default,
        Some(s) => Sigma::parse(s)?,
    };
    if sigma.len() < min_len {
        return Err(Error::SigmaTooShort(sigma.len()));
    }
    Ok(sigma)
}

/// `0101…` of the given length.
pub fn alternating(len: usize) -> Sigma {
    Sigma::new((0..len).map(|i| i % 2 == 1).collect())
}

// σ_k, 1-based, padded with 0 beyond the given bits.
fn bit(sigma: &Sigma, k: usize) -> bool {
    sigma.bits().get(k - 1).copied().unwrap_or(false)
}

/// `¬□⊥ ∧ ((◇□⊥ ∧ ◇¬□⊥) → ◇(p ∧ □⊥))`: not a leaf, and if branching then
/// some branch of length one ends in `p`.
pub fn fan_formula() -> Formula {
    fixed("~B false & ((D B false & D ~B false) -> D(p & B false))")
}

/// Root `r` with branches of lengths `1..=branches`; node `b{l}_{d}` at depth
/// `d` of branch `l` carries `p = σ_{l-d+1}`, so leaves carry `σ_1`.
pub fn fan_model(sigma: &Sigma, branches: usize, root_p: bool) -> PointedModel {
    let mut ids = vec!["r".to_string()];
    for l in 1..=branches {
        ids.extend((1..=l).map(|d| format!("b{l}_{d}")));
    }
    let mut m = KripkeModel::new(["a"], ids).expect("fan ids are distinct");
    m.set_atom(0, "p", root_p);
    let mut idx = 1;
    for l in 1..=branches {
        m.add_edge(0, 0, idx);
        for d in 1..=l {
            m.set_atom(idx, "p", bit(sigma, l - d + 1));
            if d < l {
                m.add_edge(0, idx, idx + 1);
            }
            idx += 1;
        }
    }
    PointedModel::new(m, 0).expect("root exists")
}

/// `¬◇_b(□_a p ∨ □_a ¬p) ∧ ((p ∧ □_b ¬p) → ◇_a ◇_b □_a p)`
pub fn doubled_formula() -> Formula {
    fixed("~D{b}(B{a} p | B{a} ~p) & ((p & B{b} ~p) -> D{a} D{b} B{a} p)")
}

/// Announced formula for the equivalence-closure model.
pub fn s5_announcement() -> Formula {
    fixed("~D{b}(B{a} p | B{a} ~p)")
}

/// Traced formula for the equivalence-closure model.
pub fn s5_trace_formula() -> Formula {
    fixed("~(B{b} p | B{b} ~p) -> D{a} D{b} B{a} p")
}

// Branch l of the doubled model has nodes b{l}_1..b{l}_{2l}; pair d is
// (2d-1, 2d), b-linked, carrying σ_{l-d+1}; a links 2d to 2d+1.
fn doubled_frame(sigma: &Sigma, branches: usize, closure: bool) -> PointedModel {
    let mut ids = vec!["r".to_string(), "u".to_string()];
    for l in 1..=branches {
        ids.extend((1..=2 * l).map(|i| format!("b{l}_{i}")));
    }
    let mut m = KripkeModel::new(["a", "b"], ids).expect("ids are distinct");
    let (a, b) = (0, 1);
    m.set_atom(0, "p", true);
    let mut first = Vec::new();
    let mut start = 2;
    for l in 1..=branches {
        first.push(start);
        for d in 1..=l {
            let (x, y) = (start + 2 * d - 2, start + 2 * d - 1);
            let v = bit(sigma, l - d + 1);
            m.set_atom(x, "p", v);
            m.set_atom(y, "p", v);
            for (s, t) in [(x, x), (x, y), (y, x), (y, y)] {
                m.add_edge(b, s, t);
            }
            m.add_edge(a, y, y);
            if d == 1 {
                continue;
            }
            // a-link between the previous pair's second node and x
            let prev = x - 1;
            m.add_edge(a, prev, x);
            m.add_edge(a, x, prev);
            m.add_edge(a, x, x);
        }
        start += 2 * l;
    }
    // a-class of the branches' first nodes
    for &x in &first {
        for &y in &first {
            m.add_edge(a, x, y);
        }
    }
    let (r, u) = (0, 1);
    if closure {
        let mut class = vec![r, u];
        class.extend(&first);
        for &x in &class {
            for &y in &class {
                m.add_edge(a, x, y);
            }
        }
        for (s, t) in [(r, r), (r, u), (u, r), (u, u)] {
            m.add_edge(b, s, t);
        }
    } else {
        for &x in &first {
            m.add_edge(a, r, x);
            m.add_edge(a, u, x);
        }
        m.add_edge(b, r, u);
        m.add_edge(b, u, u);
    }
    PointedModel::new(m, r).expect("root exists")
}

/// The fan with every arrow replaced by an `a`-link plus a `b`-link, and an
/// extra node `u` below the root that `b` believes in.
pub fn doubled_model(sigma: &Sigma, branches: usize) -> PointedModel {
    doubled_frame(sigma, branches, false)
}

pub fn s5_closure_model(sigma: &Sigma, branches: usize) -> PointedModel {
    doubled_frame(sigma, branches, true)
}

pub fn muddy_agents(n: usize) -> Vec<Agent> {
    (1..=n).map(|i| Agent::new(format!("c{i}"))).collect()
}

fn muddy_atom(i: usize) -> Formula {
    Formula::atom(format!("m{i}"))
}

/// All `2^n` worlds, named by bit strings; child `i` sees everything but `m_i`.
/// The point has children `1..=k` muddy.
pub fn muddy_cube(n: usize, k: usize) -> PointedModel {
    let ids: Vec<String> = (0..1usize << n)
        .map(|w| {
            (0..n)
                .map(|i| if w >> i & 1 == 1 { '1' } else { '0' })
                .collect()
        })
        .collect();
    let mut m = KripkeModel::new(muddy_agents(n), ids).expect("ids are distinct");
    for w in 0..1usize << n {
        for i in 0..n {
            m.set_atom(w, format!("m{}", i + 1), w >> i & 1 == 1);
            m.add_edge(i, w, w);
            m.add_edge(i, w, w ^ (1 << i));
        }
    }
    PointedModel::new(m, (1usize << k) - 1).expect("point exists")
}

/// `⋁` over all sets of `j` children of their all being muddy.
pub fn at_least_muddy(n: usize, j: usize) -> Formula {
    let mut out = Vec::new();
    for w in 0..1usize << n {
        if (w as u32).count_ones() as usize == j {
            out.push(Formula::conj(
                (0..n)
                    .filter(|i| w >> i & 1 == 1)
                    .map(|i| muddy_atom(i + 1)),
            ));
        }
    }
    Formula::disj(out)
}

/// Nobody knows whether they are muddy.
pub fn nobody_knows(n: usize) -> Formula {
    Formula::conj((1..=n).map(|i| {
        let c = Agent::new(format!("c{i}"));
        let m = muddy_atom(i);
        Formula::not(Formula::or(
            Formula::boxed(c.clone(), m.clone()),
            Formula::boxed(c, Formula::not(m)),
        ))
    }))
}

/// Point `00`; the first digit is `p_y`. Each of `y`, `s` knows their own atom.
pub fn butterfly_initial() -> PointedModel {
    let mut m = KripkeModel::new(["y", "s"], ["00", "01", "10", "11"]).expect("ids are distinct");
    for (id, py, ps) in [
        ("00", false, false),
        ("01", false, true),
        ("10", true, false),
        ("11", true, true),
    ] {
        let s = m.state_index(id).expect("declared");
        m.set_atom(s, "p_y", py);
        m.set_atom(s, "p_s", ps);
    }
    for (agent, classes) in [
        ("y", [["00", "01"], ["10", "11"]]),
        ("s", [["00", "10"], ["01", "11"]]),
    ] {
        for class in classes {
            for x in class {
                for y in class {
                    m.add_edge_by_name(agent, x, y).expect("declared");
                }
            }
        }
    }
    PointedModel::at(m, "00").expect("declared")
}

/// Lie to `y` that `p_s`, lie to `s` that `p_y`, then `p_y := □_y p_s` by
/// `y` and `p_s := □_s p_y` by `s`.
pub fn butterfly_actions() -> Vec<(String, PointedActionModel)> {
    let agents = [Agent::from("y"), Agent::from("s")];
    let kinds = [
        (
            "lie_to_y",
            ActionKind::PrivateLie {
                phi: Formula::atom("p_s"),
                listener: Agent::from("y"),
            },
        ),
        (
            "lie_to_s",
            ActionKind::PrivateLie {
                phi: Formula::atom("p_y"),
                listener: Agent::from("s"),
            },
        ),
        (
            "y_decides",
            ActionKind::PrivateAssign {
                atom: Atom::from("p_y"),
                value: fixed("B{y} p_s"),
                actor: Agent::from("y"),
            },
        ),
        (
            "s_decides",
            ActionKind::PrivateAssign {
                atom: Atom::from("p_s"),
                value: fixed("B{s} p_y"),
                actor: Agent::from("s"),
            },
        ),
    ];
    kinds
        .into_iter()
        .map(|(n, k)| {
            (
                n.to_string(),
                mk_action(&k, &agents).expect("agents declared"),
            )
        })
        .collect()
}

/// `□⊥ ∨ (p ∧ ◇p ∧ ◇¬p) ∨ (¬p ∧ ◇p ∧ □p)`, 01-valid but not 11-valid.
pub fn eight_model_formula() -> Formula {
    fixed("B false | p & D p & D ~p | ~p & D p & B p")
}

/// The one-atom K45 canonical models labelled `a`..`h`.
pub fn eight_models() -> Vec<(char, CanonicalModel)> {
    let atoms = [Atom::from("p")].into();
    let all = enumerate_canonical(&atoms, FrameClass::K45).expect("one atom is within any bound");
    let find = |point: bool, cluster: &[bool]| -> CanonicalModel {
        all.iter()
            .find(|c| {
                c.point_val.contains(&Atom::from("p")) == point
                    && c.cluster.len() == cluster.len()
                    && c.cluster
                        .iter()
                        .zip(cluster)
                        .all(|(v, &q)| v.contains(&Atom::from("p")) == q)
            })
            .expect("canonical model exists")
            .clone()
    };
    vec![
        ('a', find(true, &[])),
        ('b', find(false, &[])),
        ('c', find(true, &[false, true])),
        ('d', find(false, &[true])),
        ('e', find(true, &[true])),
        ('f', find(false, &[false])),
        ('g', find(false, &[false, true])),
        ('h', find(true, &[false])),
    ]
}

/// Rows of the spy table: facts and beliefs of `a` and `j`.
pub fn arnold_rows() -> Vec<(&'static str, Formula)> {
    [
        (
            "i",
            "p_a & ~p_j & B{a} p_a & B{j} ~p_a & B{a} ~p_j & B{j} ~p_j",
        ),
        (
            "ii",
            "p_a & ~p_j & B{a} p_a & B{j} ~p_a & B{a} ~p_j & B{j} p_j",
        ),
        (
            "iii",
            "p_a & ~p_j & B{a} p_a & B{j} p_a & B{a} ~p_j & B{j} p_j",
        ),
        (
            "iv",
            "p_a & p_j & B{a} p_a & B{j} p_a & B{a} p_j & B{j} p_j",
        ),
    ]
    .into_iter()
    .map(|(n, s)| (n, fixed(s)))
    .collect()
}

/// Two states, `n` (the point, `¬p`) and `y`; the agent considers both.
pub fn pang_juan_model() -> PointedModel {
    let mut m = KripkeModel::new(["a"], ["n", "y"]).expect("ids are distinct");
    m.set_atom(1, "p", true);
    for s in 0..2 {
        m.set_successors(0, s, vec![0, 1]);
    }
    PointedModel::new(m, 0).expect("point exists")
}

/// `a` cannot tell the `p` point from the other state; `b` can.
pub fn oscillation_model() -> PointedModel {
    let mut m = KripkeModel::new(["a", "b"], ["1", "0"]).expect("ids are distinct");
    m.set_atom(0, "p", true);
    for s in 0..2 {
        m.set_successors(0, s, vec![0, 1]);
        m.set_successors(1, s, vec![s]);
    }
    PointedModel::new(m, 0).expect("point exists")
}

/// Actions `s` (pre `¬□_a p`, the point) and `t` (pre `p ∧ □_b ¬□_a p`);
/// `a` tells them apart, `b` does not.
pub fn oscillation_action() -> PointedActionModel {
    let mut am =
        crate::actionmodel::ActionModel::new(["a", "b"], ["s", "t"]).expect("ids are distinct");
    am.set_pre("s", fixed("~B{a} p")).expect("declared");
    am.set_pre("t", fixed("p & B{b} ~B{a} p"))
        .expect("declared");
    for x in ["s", "t"] {
        am.add_edge("a", x, x).expect("declared");
        for y in ["s", "t"] {
            am.add_edge("b", x, y).expect("declared");
        }
    }
    PointedActionModel::new(am, "s").expect("declared")
}

fn agent_set(names: &[&str]) -> AgentSet {
    names.iter().map(|&n| Agent::from(n)).collect()
}

pub fn build_scenario(name: &str, params: &BTreeMap<String, String>) -> Result<Scenario> {
    let mut sc = Scenario::new(name, params.clone());
    match name {
        "two-state" => {
            let mut m = KripkeModel::new(["a"], ["s", "t"])?;
            m.set_atom(1, "p", true);
            for s in 0..2 {
                m.set_successors(0, s, vec![0, 1]);
            }
            let check = build_sigma_check(
                &fixed("p & B p"),
                &Sigma::parse("01")?,
                CheckMode::Valid,
                false,
                &agent_set(&["a"]),
            )?;
            sc.add_model("at_s", PointedModel::new(m.clone(), 0)?);
            sc.add_model("at_t", PointedModel::new(m, 1)?);
            sc.add_formula("check", check.clone());
            let src = "true lie on the two-state model";
            sc.holds("at_t", &check, true, src);
            sc.holds("at_s", &check, false, src);
        }
        "fan" | "sigma-fan" => {
            let n = param_usize(params, "n", 8, 1, MAX_FAN)?;
            let root = param_bool(params, "root", true)?;
            let sigma = if name == "fan" {
                if params.contains_key("sigma") {
                    return Err(Error::ParamOutOfRange(
                        "fan is always alternating; use sigma-fan".into(),
                    ));
                }
                alternating(n + 1)
            } else {
                param_sigma(params, Sigma::parse("011100011")?, n)?
            };
            let f = fan_formula();
            sc.add_formula("phi", f.clone());
            // branch n+1 keeps the root branching during the n-th update
            sc.add_model("fan", fan_model(&sigma, n + 1, root));
            sc.add_model("fan_root_flipped", fan_model(&sigma, n + 1, !root));
            let expected = sigma.prefix(n).to_string();
            let src = "fan decorated by sigma";
            for model in ["fan", "fan_root_flipped"] {
                sc.check(
                    format!("trace of phi on {model} for {n} steps"),
                    src,
                    Expect::Trace {
                        model: model.into(),
                        formula: f.clone(),
                        style: TraceStyle::Believed,
                        expected: expected.clone(),
                    },
                );
            }
        }
        "doubled-kd45" | "s5-closure" => {
            let n = param_usize(params, "n", 8, 2, MAX_FAN)?;
            let sigma = param_sigma(params, alternating(n), n - 1)?;
            let expected = sigma.prefix(n - 1).to_string();
            let doubled = name == "doubled-kd45";
            let (pm, style, traced, class, src) = if doubled {
                let psi = doubled_formula();
                (
                    doubled_model(&sigma, n),
                    TraceStyle::Believed,
                    psi,
                    FrameClass::KD45,
                    "doubled fan for consistent belief",
                )
            } else {
                (
                    s5_closure_model(&sigma, n),
                    TraceStyle::Truthful(s5_announcement()),
                    s5_trace_formula(),
                    FrameClass::S5,
                    "equivalence closure of the doubled fan",
                )
            };
            sc.add_formula("psi", traced.clone());
            if let TraceStyle::Truthful(phi) = &style {
                sc.add_formula("phi", phi.clone());
            }
            let mut cur = pm.clone();
            for k in 0..n - 1 {
                let id = format!("step{k}");
                sc.add_model(id.clone(), cur.clone());
                sc.check(
                    format!("{id} is {class}"),
                    src,
                    Expect::InClass {
                        model: id,
                        class,
                        expected: true,
                    },
                );
                if k + 2 < n {
                    cur = match &style {
                        TraceStyle::Truthful(phi) => truthful_update(&cur, phi)?,
                        _ => generated_submodel(&believed_update_pointed(&cur, &traced)?),
                    };
                }
            }
            sc.check(
                format!("trace of psi for {} steps", n - 1),
                src,
                Expect::Trace {
                    model: "step0".into(),
                    formula: traced,
                    style,
                    expected,
                },
            );
        }
        "muddy" => {
            let n = param_usize(params, "n", 3, 1, MAX_MUDDY)?;
            let k = param_usize(params, "k", n, 1, n)?;
            let cube = muddy_cube(n, k);
            let father = at_least_muddy_any(n);
            let phi = nobody_knows(n);
            let all: AgentSet = muddy_agents(n).into_iter().collect();
            sc.add_formula("father", father.clone());
            sc.add_formula("nobody_knows", phi.clone());
            sc.add_model("cube", cube.clone());
            let mut cur = truthful_update(&cube, &father)?;
            let src = "muddy children";
            sc.check(
                "after the father there are 2^n - 1 worlds",
                src,
                Expect::States {
                    model: "round0".into(),
                    expected: (1 << n) - 1,
                },
            );
            for j in 0..k {
                let id = format!("round{j}");
                sc.add_model(id.clone(), cur.clone());
                let c = Formula::common(all.clone(), at_least_muddy(n, j + 1));
                sc.holds(&id, &c, true, src);
                if j + 1 < k {
                    let succ = build_sigma_check(
                        &phi,
                        &Sigma::parse("11")?,
                        CheckMode::Satisfiable,
                        false,
                        &all,
                    )?;
                    sc.check(
                        format!("nobody-knows round {} is successful", j + 1),
                        src,
                        Expect::Holds {
                            model: id.clone(),
                            formula: succ,
                            expected: j + 1 + 2 <= k,
                        },
                    );
                    cur = truthful_update(&cur, &phi)?;
                }
            }
            let last = format!("round{}", k - 1);
            let know = Formula::conj(
                (1..=k).map(|i| Formula::boxed(Agent::new(format!("c{i}")), muddy_atom(i))),
            );
            sc.holds(&last, &know, true, src);
        }
        "butterfly" => {
            let init = butterfly_initial();
            let actions = butterfly_actions();
            sc.add_model("initial", init.clone());
            let raw = product_raw(&init.model, &actions[0].1)?;
            let mut cur = init;
            let names = ["after_lie_to_y", "after_lies", "after_y_decides", "final"];
            for ((_, pa), id) in actions.iter().zip(names) {
                cur = product_update(&cur, pa)?;
                sc.add_model(id, cur.clone());
            }
            sc.actions = actions;
            let src = "private lies";
            sc.check(
                "raw product of the first lie",
                src,
                Expect::States {
                    model: "raw_first_lie".into(),
                    expected: 8,
                },
            );
            let raw_point = raw.index_of(0, 0).expect("the lie is executable at 00");
            sc.add_model("raw_first_lie", PointedModel::new(raw.model, raw_point)?);
            sc.holds("after_lie_to_y", &fixed("~p_s & B{y} p_s"), true, src);
            sc.holds(
                "after_lies",
                &fixed("~p_y & B{y} p_s & B{y} ~(B{s} p_y | B{s} ~p_y)"),
                true,
                src,
            );
            sc.holds(
                "after_lies",
                &fixed("~p_s & B{s} p_y & B{s} ~(B{y} p_s | B{y} ~p_s)"),
                true,
                src,
            );
            sc.check(
                "generated model after both lies",
                src,
                Expect::States {
                    model: "after_lies".into(),
                    expected: 7,
                },
            );
            sc.holds(
                "final",
                &fixed("p_y & p_s & B{y} B{s} ~(B{y} p_s | B{y} ~p_s)"),
                true,
                src,
            );
            sc.holds(
                "final",
                &fixed("p_y & p_s & B{s} B{y} ~(B{s} p_y | B{s} ~p_y)"),
                true,
                src,
            );
        }
        "k45-eight" => {
            let phi = eight_model_formula();
            sc.add_formula("phi", phi.clone());
            let a = Agent::from("a");
            let src = "eight one-atom K45 models";
            for (label, cm) in eight_models() {
                let pm = cm.render(&a);
                let label = label.to_string();
                let updated = generated_submodel(&believed_update_pointed(&pm, &phi)?);
                sc.add_model(label.clone(), pm);
                sc.add_model(format!("{label}'"), updated);
                sc.holds(&label, &phi, "abcd".contains(label.as_str()), src);
            }
            for (x, y) in [("e", "a"), ("f", "b"), ("g", "d"), ("h", "a"), ("c", "e")] {
                sc.check(
                    format!("{x}' ~ {y}"),
                    src,
                    Expect::Bisimilar {
                        left: format!("{x}'"),
                        right: y.into(),
                        expected: true,
                    },
                );
            }
            for class in [FrameClass::K45, FrameClass::KD45] {
                for (bits, expected) in [("01", true), ("11", false)] {
                    sc.check(
                        format!("phi is {bits}-valid on {class}: {expected}"),
                        src,
                        Expect::SigmaValid {
                            formula: phi.clone(),
                            sigma: Sigma::parse(bits)?,
                            class,
                            believable: false,
                            expected,
                        },
                    );
                }
            }
        }
        "arnold" => {
            let agents = [Agent::from("a"), Agent::from("j")];
            let src = "spy belief table";
            for (row, f) in arnold_rows() {
                let id = format!("row_{row}");
                let witness =
                    falsify_bounded(&Formula::not(f.clone()), FrameClass::KD45, &agents, 3)?
                        .ok_or_else(|| {
                            Error::ParamOutOfRange(format!(
                                "no KD45 model of row {row} within 3 states"
                            ))
                        })?;
                sc.add_formula(&id, f.clone());
                sc.add_model(id.clone(), witness);
                sc.holds(&id, &f, true, src);
                sc.check(
                    format!("{id} is KD45"),
                    src,
                    Expect::InClass {
                        model: id,
                        class: FrameClass::KD45,
                        expected: true,
                    },
                );
            }
        }
        "pang-juan" => {
            let agents = [Agent::from("a")];
            let p = Formula::atom("p");
            let alpha = mk_action(
                &ActionKind::PangJuan {
                    atom: Atom::from("p"),
                },
                &agents,
            )?;
            let lie = mk_action(
                &ActionKind::PublicBelieved {
                    phi: p.clone(),
                    lie: true,
                },
                &agents,
            )?;
            let assign = mk_action(
                &ActionKind::PublicAssign {
                    atom: Atom::from("p"),
                    value: Formula::Top,
                },
                &agents,
            )?;
            let target = Formula::and(
                Formula::not(p.clone()),
                Formula::action(std::sync::Arc::new(alpha.clone()), p.clone()),
            );
            sc.actions = vec![
                ("alpha".into(), alpha),
                ("lie".into(), lie),
                ("assign".into(), assign),
            ];
            sc.add_model("two_state", pang_juan_model());
            sc.add_formula("target", target.clone());
            let src = "lie combined with assignment";
            sc.holds("two_state", &target, true, src);
            let atoms = [Atom::from("p")].into();
            let mut suite = vec!["two_state".to_string()];
            for (i, cm) in enumerate_canonical(&atoms, FrameClass::KD45)?
                .into_iter()
                .enumerate()
            {
                if cm.point_val.is_empty() {
                    let id = format!("canonical{i}");
                    sc.add_model(id.clone(), cm.render(&Agent::from("a")));
                    suite.push(id);
                }
            }
            sc.check(
                "alpha(p) equals the lie that p followed by p := true",
                src,
                Expect::Equivalent {
                    left: vec!["alpha".into()],
                    right: vec!["lie".into(), "assign".into()],
                    suite,
                    expected: true,
                },
            );
        }
        "oscillation" => {
            let iterations = param_usize(params, "iterations", 6, 1, MAX_FAN)?;
            let pa = oscillation_action();
            let mut cur = oscillation_model();
            sc.add_model("m0", cur.clone());
            for i in 1..=iterations {
                cur = product_update(&cur, &pa)?;
                sc.add_model(format!("m{i}"), cur.clone());
            }
            sc.actions = vec![("osc".into(), pa)];
            let src = "non-stabilizing action model";
            for i in 0..=iterations {
                sc.check(
                    format!("m{i} has {} states", if i % 2 == 0 { 2 } else { 3 }),
                    src,
                    Expect::States {
                        model: format!("m{i}"),
                        expected: if i % 2 == 0 { 2 } else { 3 },
                    },
                );
                if i >= 1 {
                    sc.check(
                        format!("m{i} not ~ m{}", i - 1),
                        src,
                        Expect::Bisimilar {
                            left: format!("m{i}"),
                            right: format!("m{}", i - 1),
                            expected: false,
                        },
                    );
                }
                if i >= 2 {
                    sc.check(
                        format!("m{i} ~ m{}", i - 2),
                        src,
                        Expect::Bisimilar {
                            left: format!("m{i}"),
                            right: format!("m{}", i - 2),
                            expected: true,
                        },
                    );
                }
            }
        }
        other => return Err(Error::UnknownScenario(other.into())),
    }
    Ok(sc)
}

// At least one child is muddy.
fn at_least_muddy_any(n: usize) -> Formula {
    Formula::disj((1..=n).map(muddy_atom))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckResult {
    pub description: String,
    pub source: String,
    pub expected: String,
    pub actual: String,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub scenario: String,
    pub params: BTreeMap<String, String>,
    pub results: Vec<CheckResult>,
}

impl ScenarioReport {
    pub fn all_pass(&self) -> bool {
        self.results.iter().all(|r| r.pass)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "scenario {}", self.scenario);
        for r in &self.results {
            let verdict = if r.pass { "PASS" } else { "FAIL" };
            let _ = writeln!(
                out,
                "{verdict}  {}  expected {} got {}  [{}]",
                r.description, r.expected, r.actual, r.source
            );
        }
        let passed = self.results.iter().filter(|r| r.pass).count();
        let _ = writeln!(out, "{passed}/{} checks passed", self.results.len());
        out
    }
}

fn run_check(sc: &Scenario, expect: &Expect) -> Result<(String, String)> {
    Ok(match expect {
        Expect::Holds {
            model,
            formula,
            expected,
        } => (
            expected.to_string(),
            eval(sc.model(model)?, formula)?.to_string(),
        ),
        Expect::Bisimilar {
            left,
            right,
            expected,
        } => (
            expected.to_string(),
            bisimilar(sc.model(left)?, sc.model(right)?)?.to_string(),
        ),
        Expect::Trace {
            model,
            formula,
            style,
            expected,
        } => {
            let report = sigma_trace(sc.model(model)?, formula, expected.len(), style)?;
            (expected.clone(), report.bit_string())
        }
        Expect::InClass {
            model,
            class,
            expected,
        } => {
            let g = generated_submodel(sc.model(model)?);
            (
                expected.to_string(),
                check_frame_class(&g.model, *class).holds.to_string(),
            )
        }
        Expect::States { model, expected } => (
            expected.to_string(),
            sc.model(model)?.model.len().to_string(),
        ),
        Expect::SigmaValid {
            formula,
            sigma,
            class,
            believable,
            expected,
        } => (
            expected.to_string(),
            sigma_valid_single_agent(formula, sigma, *class, *believable)?.to_string(),
        ),
        Expect::Equivalent {
            left,
            right,
            suite,
            expected,
        } => {
            let seq = |names: &[String]| -> Result<Vec<PointedActionModel>> {
                names.iter().map(|n| sc.action(n).cloned()).collect()
            };
            let models = suite
                .iter()
                .map(|n| sc.model(n).cloned())
                .collect::<Result<Vec<_>>>()?;
            let verdict = actions_equivalent(&seq(left)?, &seq(right)?, &models)?;
            (expected.to_string(), verdict.to_string())
        }
    })
}

/// Runs every check; evaluation errors become failing rows.
pub fn verify_scenario(sc: &Scenario) -> ScenarioReport {
    let results = sc
        .checks
        .iter()
        .map(|c| {
            let (expected, actual) = match run_check(sc, &c.expect) {
                Ok(pair) => pair,
                Err(e) => (expected_text(&c.expect), format!("error: {e}")),
            };
            CheckResult {
                description: c.description.clone(),
                source: c.source.clone(),
                pass: expected == actual,
                expected,
                actual,
            }
        })
        .collect();
    ScenarioReport {
        scenario: sc.name.clone(),
        params: sc.params.clone(),
        results,
    }
}

fn expected_text(e: &Expect) -> String {
    match e {
        Expect::Holds { expected, .. }
        | Expect::Bisimilar { expected, .. }
        | Expect::InClass { expected, .. }
        | Expect::SigmaValid { expected, .. }
        | Expect::Equivalent { expected, .. } => expected.to_string(),
        Expect::Trace { expected, .. } => expected.clone(),
        Expect::States { expected, .. } => expected.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(name: &str, params: &[(&str, &str)]) -> ScenarioReport {
        let params = params
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect();
        verify_scenario(&build_scenario(name, &params).unwrap())
    }

    #[test]
    fn every_scenario_passes_with_defaults() {
        for info in SCENARIOS {
            let report = run(info.name, &[]);
            assert!(report.all_pass(), "{}", report.to_text());
        }
    }

    #[test]
    fn fan_shape() {
        let pm = fan_model(&alternating(4), 4, true);
        assert_eq!(pm.model.len(), 1 + 1 + 2 + 3 + 4);
        assert_eq!(pm.model.succ(0, 0).len(), 4);
        let leaves: Vec<usize> = (1..pm.model.len())
            .filter(|&s| pm.model.succ(0, s).is_empty())
            .collect();
        assert_eq!(leaves.len(), 4);
        let p = Atom::from("p");
        assert!(leaves.iter().all(|&s| !pm.model.holds(s, &p)));
        // alternating towards the root along the longest branch
        let b4: Vec<bool> = (1..=4)
            .map(|d| {
                pm.model
                    .holds(pm.model.state_index(&format!("b4_{d}")).unwrap(), &p)
            })
            .collect();
        assert_eq!(b4, [true, false, true, false]);
    }

    #[test]
    fn fan_alternating_eight() {
        let r = run("fan", &[("n", "8")]);
        assert!(r.all_pass());
        assert_eq!(r.results[0].actual, "01010101");
    }

    #[test]
    fn sigma_fan_example_string() {
        let r = run("sigma-fan", &[("n", "9"), ("sigma", "011100011")]);
        assert!(r.all_pass(), "{}", r.to_text());
        assert_eq!(r.results[0].actual, "011100011");
    }

    #[test]
    fn ranges() {
        let p = |k: &str, v: &str| [(k.to_string(), v.to_string())].into();
        assert!(matches!(
            build_scenario("fan", &p("n", "13")),
            Err(Error::ParamOutOfRange(_))
        ));
        assert!(matches!(
            build_scenario("muddy", &p("n", "7")),
            Err(Error::ParamOutOfRange(_))
        ));
        assert!(matches!(
            build_scenario("nope", &BTreeMap::new()),
            Err(Error::UnknownScenario(_))
        ));
    }

    #[test]
    fn doubled_model_is_kd45_and_root_unique() {
        let pm = doubled_model(&alternating(5), 5);
        assert!(check_frame_class(&pm.model, FrameClass::KD45).holds);
        let root_mark = fixed("p & B{b} ~p");
        let truth = crate::semantics::truth_set(&pm.model, &root_mark).unwrap();
        assert_eq!(truth.iter().filter(|&&b| b).count(), 1);
        assert!(truth[pm.point]);
        let closure = s5_closure_model(&alternating(5), 5);
        assert!(check_frame_class(&closure.model, FrameClass::S5).holds);
    }

    #[test]
    fn muddy_sizes() {
        let sc = build_scenario(
            "muddy",
            &[("n".into(), "3".into()), ("k".into(), "3".into())].into(),
        )
        .unwrap();
        assert_eq!(sc.model("cube").unwrap().model.len(), 8);
        assert_eq!(sc.model("round0").unwrap().model.len(), 7);
        assert_eq!(sc.model("cube").unwrap().point_id(), "111");
    }

    #[test]
    fn eight_model_labels() {
        let labels: Vec<String> = eight_models()
            .iter()
            .map(|(l, c)| format!("{l}={c}"))
            .collect();
        assert_eq!(
            labels,
            [
                "a=<p | {}>",
                "b=<~p | {}>",
                "c=<p | {~p, p}>",
                "d=<~p | {p}>",
                "e=<p | {p}>",
                "f=<~p | {~p}>",
                "g=<~p | {~p, p}>",
                "h=<p | {~p}>",
            ]
        );
    }

    #[test]
    fn export_writes_models() {
        let dir = std::env::temp_dir().join(format!("epl-export-{}", std::process::id()));
        let sc = build_scenario("pang-juan", &BTreeMap::new()).unwrap();
        let files = sc.export(&dir).unwrap();
        assert_eq!(files.len(), sc.models.len() + sc.actions.len());
        let back = PointedModel::from_json(&std::fs::read_to_string(&files[0]).unwrap()).unwrap();
        assert_eq!(back, sc.models[0].1);
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
