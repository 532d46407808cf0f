//! Action models with pre- and postconditions, and product update.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formula::{Agent, Atom, Formula};
use crate::kripke::{bisimilar, generated_submodel, KripkeModel, PointedModel};
use crate::parser::{parse_formula_with, print_formula, ActionResolver, FileResolver};
use crate::semantics::{eval, truth_set};

/// The frame is stored as a Kripke model over the actions with an empty
/// valuation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ActionModel {
    frame: KripkeModel,
    pre: Vec<Formula>,
    post: Vec<BTreeMap<Atom, Formula>>,
    /// File or constructor name, used when printing `[act NAME # point]`.
    pub source: Option<String>,
}

impl ActionModel {
    /// Actions with precondition `true`, no postconditions and no arrows.
    pub fn new<A, S>(agents: A, actions: S) -> Result<Self>
    where
        A: IntoIterator,
        A::Item: Into<Agent>,
        S: IntoIterator,
        S::Item: Into<String>,
    {
        let frame = KripkeModel::new(agents, actions)?;
        let n = frame.len();
        Ok(ActionModel {
            frame,
            pre: vec![Formula::Top; n],
            post: vec![BTreeMap::new(); n],
            source: None,
        })
    }

    pub fn agents(&self) -> &[Agent] {
        self.frame.agents()
    }

    pub fn actions(&self) -> &[String] {
        self.frame.states()
    }

    pub fn frame(&self) -> &KripkeModel {
        &self.frame
    }

    pub fn action_index(&self, name: &str) -> Result<usize> {
        self.frame.state_index(name)
    }

    pub fn pre(&self, action: usize) -> &Formula {
        &self.pre[action]
    }

    pub fn post(&self, action: usize) -> &BTreeMap<Atom, Formula> {
        &self.post[action]
    }

    pub fn set_pre(&mut self, action: &str, f: Formula) -> Result<()> {
        let i = self.action_index(action)?;
        self.pre[i] = f;
        Ok(())
    }

    pub fn set_post(&mut self, action: &str, atom: impl Into<Atom>, f: Formula) -> Result<()> {
        let i = self.action_index(action)?;
        self.post[i].insert(atom.into(), f);
        Ok(())
    }

    pub fn add_edge(&mut self, agent: &str, from: &str, to: &str) -> Result<()> {
        self.frame.add_edge_by_name(agent, from, to)
    }

    /// All pre- and postcondition formulas.
    pub fn formulas(&self) -> impl Iterator<Item = &Formula> + '_ {
        self.pre
            .iter()
            .chain(self.post.iter().flat_map(|m| m.values()))
    }

    pub fn assigned_atoms(&self) -> impl Iterator<Item = Atom> + '_ {
        self.post.iter().flat_map(|m| m.keys().cloned())
    }

    pub fn display_name(&self) -> String {
        self.source.clone().unwrap_or_else(|| "action".to_string())
    }

    fn named(mut self, name: &str) -> Self {
        self.source = Some(name.to_string());
        self
    }

    pub fn from_json_with(text: &str, resolver: &dyn ActionResolver) -> Result<Self> {
        Ok(Self::pointed_from_json_with(text, resolver)?.0)
    }

    /// Parses an action file; the second component is its `point`, if any.
    pub fn pointed_from_json_with(
        text: &str,
        resolver: &dyn ActionResolver,
    ) -> Result<(Self, Option<String>)> {
        let file: ActionFile = serde_json::from_str(text)?;
        let frame_file = crate::kripke::ModelFile {
            agents: file.agents,
            states: file.states,
            rel: file.rel,
            val: BTreeMap::new(),
            point: None,
        };
        let frame = frame_file.into_model()?;
        let n = frame.len();
        let mut am = ActionModel {
            frame,
            pre: vec![Formula::Top; n],
            post: vec![BTreeMap::new(); n],
            source: None,
        };
        for (action, src) in file.pre {
            let f = parse_formula_with(&src, resolver)?;
            am.set_pre(&action, f)?;
        }
        for (action, assignments) in file.post {
            for (atom, src) in assignments {
                let f = parse_formula_with(&src, resolver)?;
                am.set_post(&action, Atom::new(atom), f)?;
            }
        }
        Ok((am, file.point))
    }

    pub fn to_json(&self, point: Option<&str>) -> String {
        let frame = crate::kripke::ModelFile::from_model(&self.frame);
        let names = self.actions();
        let file = ActionFile {
            agents: frame.agents,
            states: frame.states,
            rel: frame.rel,
            pre: (0..names.len())
                .filter(|&i| self.pre[i] != Formula::Top)
                .map(|i| (names[i].clone(), print_formula(&self.pre[i])))
                .collect(),
            post: (0..names.len())
                .filter(|&i| !self.post[i].is_empty())
                .map(|i| {
                    let m = self.post[i]
                        .iter()
                        .map(|(p, f)| (p.to_string(), print_formula(f)))
                        .collect();
                    (names[i].clone(), m)
                })
                .collect(),
            point: point.map(String::from),
        };
        serde_json::to_string_pretty(&file).expect("action file serializes")
    }
}

/// On-disk action model format, mirroring the model format.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ActionFile {
    pub agents: Vec<String>,
    #[serde(alias = "actions")]
    pub states: Vec<String>,
    #[serde(default)]
    pub rel: BTreeMap<String, Vec<(String, String)>>,
    #[serde(default)]
    pub pre: BTreeMap<String, String>,
    #[serde(default)]
    pub post: BTreeMap<String, BTreeMap<String, String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PointedActionModel {
    pub model: ActionModel,
    pub point: usize,
}

impl PointedActionModel {
    pub fn new(model: ActionModel, point: &str) -> Result<Self> {
        let point = model.action_index(point)?;
        Ok(PointedActionModel { model, point })
    }

    pub fn point_name(&self) -> &str {
        &self.model.actions()[self.point]
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let resolver = FileResolver {
            base: path.parent().map(Path::to_path_buf),
        };
        let (mut model, point) = ActionModel::pointed_from_json_with(&text, &resolver)?;
        model.source = Some(path.display().to_string());
        let point =
            point.ok_or_else(|| Error::MalformedModel("action file has no \"point\"".into()))?;
        PointedActionModel::new(model, &point)
    }
}

/// Raw product with the (state, action) pair behind every product state.
#[derive(Debug, Clone)]
pub struct Product {
    pub model: KripkeModel,
    pub pairs: Vec<(usize, usize)>,
}

impl Product {
    pub fn index_of(&self, state: usize, action: usize) -> Option<usize> {
        self.pairs.binary_search(&(state, action)).ok()
    }
}

/// Every executable (state, action) pair, without restricting to the point.
pub fn product_raw(m: &KripkeModel, pa: &PointedActionModel) -> Result<Product> {
    let am = &pa.model;
    let model_agents: BTreeSet<&Agent> = m.agents().iter().collect();
    let action_agents: BTreeSet<&Agent> = am.agents().iter().collect();
    if model_agents != action_agents {
        return Err(Error::AgentMismatch(format!(
            "model agents {:?} vs action agents {:?}",
            model_agents, action_agents
        )));
    }
    let pre: Vec<Vec<bool>> = am
        .pre
        .iter()
        .map(|f| truth_set(m, f))
        .collect::<Result<_>>()?;
    let post: Vec<Vec<(Atom, Vec<bool>)>> = am
        .post
        .iter()
        .map(|assign| {
            assign
                .iter()
                .map(|(p, f)| Ok((p.clone(), truth_set(m, f)?)))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let mut pairs = Vec::new();
    for s in 0..m.len() {
        for (a, ok) in pre.iter().enumerate() {
            if ok[s] {
                pairs.push((s, a));
            }
        }
    }
    if pairs.is_empty() {
        // a model needs states; callers only look up executable pairs
        return Ok(Product {
            model: KripkeModel::new(m.agents().to_vec(), ["(none)"])?,
            pairs,
        });
    }
    let ids = pairs
        .iter()
        .map(|&(s, a)| format!("({},{})", m.states()[s], am.actions()[a]));
    let mut out = KripkeModel::new(m.agents().to_vec(), ids)?;
    let index: BTreeMap<(usize, usize), usize> =
        pairs.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    for (x, agent) in m.agents().iter().enumerate() {
        let ax = am.frame.agent_index(agent)?;
        for (i, &(s, a)) in pairs.iter().enumerate() {
            for &t in m.succ(x, s) {
                for &b in am.frame.succ(ax, a) {
                    if let Some(&j) = index.get(&(t, b)) {
                        out.add_edge(x, i, j);
                    }
                }
            }
        }
    }
    for (i, &(s, a)) in pairs.iter().enumerate() {
        let mut val = m.val(s).clone();
        for (p, holds) in &post[a] {
            if holds[s] {
                val.insert(p.clone());
            } else {
                val.remove(p);
            }
        }
        out.set_val(i, val);
    }
    Ok(Product { model: out, pairs })
}

/// Product update without restriction to the generated submodel.
pub fn product_update_raw(pm: &PointedModel, pa: &PointedActionModel) -> Result<PointedModel> {
    if !eval(pm, pa.model.pre(pa.point))? {
        return Err(Error::PreconditionFailedAtPoint);
    }
    let product = product_raw(&pm.model, pa)?;
    let point = product
        .index_of(pm.point, pa.point)
        .expect("precondition holds at the point");
    PointedModel::new(product.model, point)
}

/// Product update, restricted to the part generated by the new point.
pub fn product_update(pm: &PointedModel, pa: &PointedActionModel) -> Result<PointedModel> {
    Ok(generated_submodel(&product_update_raw(pm, pa)?))
}

/// Applies the actions in order; `None` as soon as a precondition fails.
pub fn apply_sequence(
    pm: &PointedModel,
    seq: &[PointedActionModel],
) -> Result<Option<PointedModel>> {
    let mut cur = pm.clone();
    for pa in seq {
        match product_update(&cur, pa) {
            Ok(next) => cur = next,
            Err(Error::PreconditionFailedAtPoint) => return Ok(None),
            Err(e) => return Err(e),
        }
    }
    Ok(Some(cur))
}

/// Compares two action sequences on every suite model. Where neither side
/// can execute the model is skipped; where exactly one side can, the
/// sequences differ.
pub fn actions_equivalent(
    lhs: &[PointedActionModel],
    rhs: &[PointedActionModel],
    suite: &[PointedModel],
) -> Result<bool> {
    if suite.is_empty() {
        return Err(Error::ParamOutOfRange("empty test suite".into()));
    }
    for pm in suite {
        match (apply_sequence(pm, lhs)?, apply_sequence(pm, rhs)?) {
            (None, None) => {}
            (Some(x), Some(y)) => {
                if !bisimilar(&x, &y)? {
                    return Ok(false);
                }
            }
            _ => return Ok(false),
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ActionKind {
    /// Single action with precondition `φ`, reflexive for everyone.
    PublicTruthful(Formula),
    /// Actions `yes` (pre `φ`) and `no` (pre `¬φ`); everyone's arrows lead
    /// to `yes`. Pointed at `no` when `lie` is set.
    PublicBelieved {
        phi: Formula,
        lie: bool,
    },
    /// The listener is told `φ` while it is false; the other agents see
    /// nothing happen.
    PrivateLie {
        phi: Formula,
        listener: Agent,
    },
    /// `atom := value` performed by `actor`, unseen by the others.
    PrivateAssign {
        atom: Atom,
        value: Formula,
        actor: Agent,
    },
    PublicAssign {
        atom: Atom,
        value: Formula,
    },
    /// Two actions `n` (pre `¬p`, the point) and `y` (pre `p`), both setting
    /// `p` to true; all arrows lead to `y`.
    PangJuan {
        atom: Atom,
    },
    Custom(std::path::PathBuf),
}

impl ActionKind {
    pub fn name(&self) -> &'static str {
        match self {
            ActionKind::PublicTruthful(_) => "public_truthful",
            ActionKind::PublicBelieved { .. } => "public_believed",
            ActionKind::PrivateLie { .. } => "private_lie",
            ActionKind::PrivateAssign { .. } => "private_assign",
            ActionKind::PublicAssign { .. } => "public_assign",
            ActionKind::PangJuan { .. } => "pang_juan",
            ActionKind::Custom(_) => "custom",
        }
    }
}

pub const ACTION_KINDS: [&str; 7] = [
    "public_truthful",
    "public_believed",
    "private_lie",
    "private_assign",
    "public_assign",
    "pang_juan",
    "custom",
];

fn require_agent(agents: &[Agent], a: &Agent) -> Result<()> {
    if agents.contains(a) {
        Ok(())
    } else {
        Err(Error::UndeclaredAgent(a.clone()))
    }
}

pub fn mk_action(kind: &ActionKind, agents: &[Agent]) -> Result<PointedActionModel> {
    let names: Vec<&str> = agents.iter().map(Agent::as_str).collect();
    match kind {
        ActionKind::PublicTruthful(phi) => {
            let mut am = ActionModel::new(agents.to_vec(), ["e"])?;
            am.set_pre("e", phi.clone())?;
            for a in &names {
                am.add_edge(a, "e", "e")?;
            }
            PointedActionModel::new(am.named(kind.name()), "e")
        }
        ActionKind::PublicBelieved { phi, lie } => {
            let mut am = ActionModel::new(agents.to_vec(), ["yes", "no"])?;
            am.set_pre("yes", phi.clone())?;
            am.set_pre("no", Formula::not(phi.clone()))?;
            for a in &names {
                am.add_edge(a, "yes", "yes")?;
                am.add_edge(a, "no", "yes")?;
            }
            PointedActionModel::new(am.named(kind.name()), if *lie { "no" } else { "yes" })
        }
        ActionKind::PrivateLie { phi, listener } => {
            require_agent(agents, listener)?;
            let mut am = ActionModel::new(agents.to_vec(), ["x", "y", "z"])?;
            am.set_pre("x", Formula::not(phi.clone()))?;
            am.set_pre("y", phi.clone())?;
            for a in agents {
                if a == listener {
                    am.add_edge(a.as_str(), "x", "y")?;
                    am.add_edge(a.as_str(), "y", "y")?;
                    am.add_edge(a.as_str(), "z", "z")?;
                } else {
                    for from in ["x", "y", "z"] {
                        am.add_edge(a.as_str(), from, "z")?;
                    }
                }
            }
            PointedActionModel::new(am.named(kind.name()), "x")
        }
        ActionKind::PrivateAssign { atom, value, actor } => {
            require_agent(agents, actor)?;
            let mut am = ActionModel::new(agents.to_vec(), ["x", "z"])?;
            am.set_post("x", atom.clone(), value.clone())?;
            for a in agents {
                if a == actor {
                    am.add_edge(a.as_str(), "x", "x")?;
                } else {
                    am.add_edge(a.as_str(), "x", "z")?;
                }
                am.add_edge(a.as_str(), "z", "z")?;
            }
            PointedActionModel::new(am.named(kind.name()), "x")
        }
        ActionKind::PublicAssign { atom, value } => {
            let mut am = ActionModel::new(agents.to_vec(), ["e"])?;
            am.set_post("e", atom.clone(), value.clone())?;
            for a in &names {
                am.add_edge(a, "e", "e")?;
            }
            PointedActionModel::new(am.named(kind.name()), "e")
        }
        ActionKind::PangJuan { atom } => {
            let p = Formula::Atom(atom.clone());
            let mut am = ActionModel::new(agents.to_vec(), ["n", "y"])?;
            am.set_pre("n", Formula::not(p.clone()))?;
            am.set_pre("y", p)?;
            for action in ["n", "y"] {
                am.set_post(action, atom.clone(), Formula::Top)?;
            }
            for a in &names {
                am.add_edge(a, "n", "y")?;
                am.add_edge(a, "y", "y")?;
            }
            PointedActionModel::new(am.named(kind.name()), "n")
        }
        ActionKind::Custom(path) => {
            let pa = PointedActionModel::load(path)?;
            let given: BTreeSet<&Agent> = agents.iter().collect();
            let found: BTreeSet<&Agent> = pa.model.agents().iter().collect();
            if !agents.is_empty() && given != found {
                return Err(Error::AgentMismatch(format!("{:?} vs {:?}", given, found)));
            }
            Ok(pa)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kripke::check_frame_class;
    use crate::kripke::FrameClass;
    use crate::parser::parse_formula;
    use crate::semantics::{believed_update_pointed, truthful_update};

    fn agents(names: &[&str]) -> Vec<Agent> {
        names.iter().map(|&n| Agent::from(n)).collect()
    }

    fn f(src: &str) -> Formula {
        parse_formula(src).unwrap()
    }

    /// p false at the point, true at the other state; total relation for `a`.
    fn two_state() -> PointedModel {
        let mut m = KripkeModel::new(["a"], ["np", "p"]).unwrap();
        for x in 0..2 {
            for y in 0..2 {
                m.add_edge(0, x, y);
            }
        }
        m.set_atom(1, "p", true);
        PointedModel::new(m, 0).unwrap()
    }

    #[test]
    fn truthful_action_is_identity_for_top() {
        let pm = two_state();
        let pa = mk_action(&ActionKind::PublicTruthful(Formula::Top), &agents(&["a"])).unwrap();
        assert!(bisimilar(&product_update(&pm, &pa).unwrap(), &pm).unwrap());
    }

    #[test]
    fn believed_lie_matches_believed_update() {
        let pm = two_state();
        let lie = mk_action(
            &ActionKind::PublicBelieved {
                phi: f("p"),
                lie: true,
            },
            &agents(&["a"]),
        )
        .unwrap();
        let via_action = product_update(&pm, &lie).unwrap();
        let direct = generated_submodel(&believed_update_pointed(&pm, &f("p")).unwrap());
        assert!(bisimilar(&via_action, &direct).unwrap());
        let truth = mk_action(&ActionKind::PublicTruthful(f("p")), &agents(&["a"])).unwrap();
        assert_eq!(
            product_update(&pm, &truth),
            Err(Error::PreconditionFailedAtPoint)
        );
        assert!(!actions_equivalent(&[lie], &[truth], &[pm]).unwrap());
    }

    #[test]
    fn truthful_action_matches_truthful_update() {
        let pm = two_state().with_point(1);
        let truth = mk_action(&ActionKind::PublicTruthful(f("p")), &agents(&["a"])).unwrap();
        let via_action = product_update(&pm, &truth).unwrap();
        assert!(bisimilar(&via_action, &truthful_update(&pm, &f("p")).unwrap()).unwrap());
    }

    #[test]
    fn pang_juan_makes_p_true() {
        let pm = two_state();
        let alpha = mk_action(
            &ActionKind::PangJuan {
                atom: Atom::from("p"),
            },
            &agents(&["a"]),
        )
        .unwrap();
        let after = product_update(&pm, &alpha).unwrap();
        assert!(eval(&after, &f("p")).unwrap());
        let holds = Formula::and(f("~p"), Formula::action(std::sync::Arc::new(alpha), f("p")));
        assert!(eval(&pm, &holds).unwrap());
    }

    #[test]
    fn canned_models_are_kd45() {
        let ag = agents(&["y", "s"]);
        let kinds = [
            ActionKind::PublicTruthful(f("p")),
            ActionKind::PublicBelieved {
                phi: f("p"),
                lie: true,
            },
            ActionKind::PrivateLie {
                phi: f("p"),
                listener: Agent::from("y"),
            },
            ActionKind::PrivateAssign {
                atom: Atom::from("p"),
                value: f("B{y} q"),
                actor: Agent::from("y"),
            },
            ActionKind::PublicAssign {
                atom: Atom::from("p"),
                value: Formula::Top,
            },
            ActionKind::PangJuan {
                atom: Atom::from("p"),
            },
        ];
        for k in &kinds {
            let pa = mk_action(k, &ag).unwrap();
            assert!(
                check_frame_class(pa.model.frame(), FrameClass::KD45).holds,
                "{k:?}"
            );
        }
    }

    #[test]
    fn private_assign_shape() {
        let pa = mk_action(
            &ActionKind::PrivateAssign {
                atom: Atom::from("p_y"),
                value: f("B{y} p_s"),
                actor: Agent::from("y"),
            },
            &agents(&["y", "s"]),
        )
        .unwrap();
        let fr = pa.model.frame();
        assert_eq!(fr.pairs(0).collect::<Vec<_>>(), vec![(0, 0), (1, 1)]);
        assert_eq!(fr.pairs(1).collect::<Vec<_>>(), vec![(0, 1), (1, 1)]);
        assert_eq!(pa.point_name(), "x");
        assert_eq!(pa.model.post(0)[&Atom::from("p_y")], f("B{y} p_s"));
        assert!(pa.model.post(1).is_empty());
    }

    #[test]
    fn postconditions_read_the_old_model() {
        // swap p and q simultaneously
        let mut m = KripkeModel::new(["a"], ["w"]).unwrap();
        m.set_atom(0, "p", true);
        let pm = PointedModel::new(m, 0).unwrap();
        let mut am = ActionModel::new(["a"], ["e"]).unwrap();
        am.set_post("e", "p", f("q")).unwrap();
        am.set_post("e", "q", f("p")).unwrap();
        let pa = PointedActionModel::new(am, "e").unwrap();
        let out = product_update(&pm, &pa).unwrap();
        assert!(eval(&out, &f("~p & q")).unwrap());
    }

    #[test]
    fn raw_product_counts_executable_pairs() {
        let pm = two_state();
        let lie = mk_action(
            &ActionKind::PublicBelieved {
                phi: f("p"),
                lie: true,
            },
            &agents(&["a"]),
        )
        .unwrap();
        // each state executes exactly one of yes/no
        assert_eq!(product_update_raw(&pm, &lie).unwrap().model.len(), 2);
    }

    #[test]
    fn json_round_trip() {
        let pa = mk_action(
            &ActionKind::PangJuan {
                atom: Atom::from("p"),
            },
            &agents(&["a", "b"]),
        )
        .unwrap();
        let text = pa.model.to_json(Some(pa.point_name()));
        let dir = std::env::temp_dir().join(format!("epl-action-{}.json", std::process::id()));
        std::fs::write(&dir, &text).unwrap();
        let back = PointedActionModel::load(&dir).unwrap();
        std::fs::remove_file(&dir).ok();
        assert_eq!(back.model.frame(), pa.model.frame());
        assert_eq!(back.point, pa.point);
        assert_eq!(back.model.pre(0), pa.model.pre(0));
        assert_eq!(back.model.post(1), pa.model.post(1));
    }

    #[test]
    fn agent_mismatch_is_reported() {
        let pm = two_state();
        let pa = mk_action(&ActionKind::PublicTruthful(Formula::Top), &agents(&["b"])).unwrap();
        assert!(matches!(
            product_update(&pm, &pa),
            Err(Error::AgentMismatch(_))
        ));
    }
}
