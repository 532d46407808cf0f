//! Finite multi-agent Kripke models.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formula::{Agent, Atom};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FrameClass {
    K,
    K45,
    KD45,
    S5,
}

impl FrameClass {
    pub const ALL: [FrameClass; 4] = [
        FrameClass::K,
        FrameClass::K45,
        FrameClass::KD45,
        FrameClass::S5,
    ];
}

impl fmt::Display for FrameClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FrameClass::K => "K",
            FrameClass::K45 => "K45",
            FrameClass::KD45 => "KD45",
            FrameClass::S5 => "S5",
        })
    }
}

impl FromStr for FrameClass {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "k" => Ok(FrameClass::K),
            "k45" => Ok(FrameClass::K45),
            "kd45" => Ok(FrameClass::KD45),
            "s5" => Ok(FrameClass::S5),
            _ => Err(Error::UnsupportedClass(s.to_string())),
        }
    }
}

/// States are addressed by index; ids are kept for display and files only.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct KripkeModel {
    agents: Vec<Agent>,
    states: Vec<String>,
    // rel[agent][state] = sorted successor indices
    rel: Vec<Vec<Vec<usize>>>,
    val: Vec<BTreeSet<Atom>>,
}

impl KripkeModel {
    /// A model with no arrows and no true atoms.
    pub fn new<A, S>(agents: A, states: S) -> Result<Self>
    where
        A: IntoIterator,
        A::Item: Into<Agent>,
        S: IntoIterator,
        S::Item: Into<String>,
    {
        let agents: Vec<Agent> = agents.into_iter().map(Into::into).collect();
        let states: Vec<String> = states.into_iter().map(Into::into).collect();
        if agents.is_empty() {
            return Err(Error::MalformedModel("agent set is empty".into()));
        }
        if states.is_empty() {
            return Err(Error::MalformedModel("state set is empty".into()));
        }
        if agents.iter().collect::<BTreeSet<_>>().len() != agents.len() {
            return Err(Error::MalformedModel("duplicate agent".into()));
        }
        if states.iter().collect::<BTreeSet<_>>().len() != states.len() {
            return Err(Error::MalformedModel("duplicate state id".into()));
        }
        let n = states.len();
        Ok(KripkeModel {
            rel: vec![vec![Vec::new(); n]; agents.len()],
            val: vec![BTreeSet::new(); n],
            agents,
            states,
        })
    }

    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state_index(&self, id: &str) -> Result<usize> {
        self.states
            .iter()
            .position(|s| s == id)
            .ok_or_else(|| Error::UnknownState(id.to_string()))
    }

    pub fn agent_index(&self, agent: &Agent) -> Result<usize> {
        self.agents
            .iter()
            .position(|a| a == agent)
            .ok_or_else(|| Error::UndeclaredAgent(agent.clone()))
    }

    pub fn succ(&self, agent: usize, s: usize) -> &[usize] {
        &self.rel[agent][s]
    }

    pub fn has_edge(&self, agent: usize, s: usize, t: usize) -> bool {
        self.rel[agent][s].binary_search(&t).is_ok()
    }

    pub fn add_edge(&mut self, agent: usize, s: usize, t: usize) {
        let succ = &mut self.rel[agent][s];
        if let Err(i) = succ.binary_search(&t) {
            succ.insert(i, t);
        }
    }

    pub fn add_edge_by_name(&mut self, agent: &str, s: &str, t: &str) -> Result<()> {
        let a = self.agent_index(&Agent::from(agent))?;
        let (s, t) = (self.state_index(s)?, self.state_index(t)?);
        self.add_edge(a, s, t);
        Ok(())
    }

    pub fn set_successors(&mut self, agent: usize, s: usize, mut succ: Vec<usize>) {
        succ.sort_unstable();
        succ.dedup();
        self.rel[agent][s] = succ;
    }

    pub fn val(&self, s: usize) -> &BTreeSet<Atom> {
        &self.val[s]
    }

    pub fn holds(&self, s: usize, p: &Atom) -> bool {
        self.val[s].contains(p)
    }

    pub fn set_atom(&mut self, s: usize, p: impl Into<Atom>, value: bool) {
        let p = p.into();
        if value {
            self.val[s].insert(p);
        } else {
            self.val[s].remove(&p);
        }
    }

    pub fn set_val(&mut self, s: usize, atoms: BTreeSet<Atom>) {
        self.val[s] = atoms;
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        self.val.iter().flatten().cloned().collect()
    }

    /// Relation of one agent as (state, successor) index pairs, sorted.
    pub fn pairs(&self, agent: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.rel[agent]
            .iter()
            .enumerate()
            .flat_map(|(s, succ)| succ.iter().map(move |&t| (s, t)))
    }

    pub fn arrow_count(&self) -> usize {
        self.rel.iter().flatten().map(Vec::len).sum()
    }

    pub fn same_relations(&self, other: &KripkeModel) -> bool {
        self.rel == other.rel
    }

    pub fn rename_states(&mut self, ids: Vec<String>) -> Result<()> {
        if ids.len() != self.states.len() || ids.iter().collect::<BTreeSet<_>>().len() != ids.len()
        {
            return Err(Error::MalformedModel(
                "state renaming is not a bijection".into(),
            ));
        }
        self.states = ids;
        Ok(())
    }

    /// Submodel on `keep` (indices, any order; duplicates ignored). Returns the
    /// submodel and the old-to-new index map.
    pub fn restrict(&self, keep: &[usize]) -> (KripkeModel, Vec<Option<usize>>) {
        let mut keep: Vec<usize> = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        let mut map = vec![None; self.len()];
        for (i, &s) in keep.iter().enumerate() {
            map[s] = Some(i);
        }
        let rel = self
            .rel
            .iter()
            .map(|per_state| {
                keep.iter()
                    .map(|&s| per_state[s].iter().filter_map(|&t| map[t]).collect())
                    .collect()
            })
            .collect();
        let sub = KripkeModel {
            agents: self.agents.clone(),
            states: keep.iter().map(|&s| self.states[s].clone()).collect(),
            rel,
            val: keep.iter().map(|&s| self.val[s].clone()).collect(),
        };
        (sub, map)
    }

    /// States reachable from `from` (inclusive) along any agent's arrows, sorted.
    pub fn reachable_from(&self, from: usize) -> Vec<usize> {
        let mut seen = vec![false; self.len()];
        seen[from] = true;
        let mut queue = VecDeque::from([from]);
        while let Some(s) = queue.pop_front() {
            for per_state in &self.rel {
                for &t in &per_state[s] {
                    if !seen[t] {
                        seen[t] = true;
                        queue.push_back(t);
                    }
                }
            }
        }
        (0..self.len()).filter(|&s| seen[s]).collect()
    }

    pub fn satisfies_class(&self, class: FrameClass) -> bool {
        check_frame_class(self, class).holds
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointedModel {
    pub model: KripkeModel,
    pub point: usize,
}

impl PointedModel {
    pub fn new(model: KripkeModel, point: usize) -> Result<Self> {
        if point >= model.len() {
            return Err(Error::UnknownState(format!("#{point}")));
        }
        Ok(PointedModel { model, point })
    }

    pub fn at(model: KripkeModel, point: &str) -> Result<Self> {
        let point = model.state_index(point)?;
        Ok(PointedModel { model, point })
    }

    pub fn point_id(&self) -> &str {
        &self.model.states[self.point]
    }

    pub fn with_point(&self, point: usize) -> PointedModel {
        PointedModel {
            model: self.model.clone(),
            point,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(text)?;
        let point = file
            .point
            .clone()
            .ok_or_else(|| Error::MalformedModel("model file has no \"point\"".into()))?;
        let model = file.into_model()?;
        PointedModel::at(model, &point)
    }

    pub fn to_json(&self) -> String {
        let mut file = ModelFile::from_model(&self.model);
        file.point = Some(self.point_id().to_string());
        serde_json::to_string_pretty(&file).expect("model file serializes")
    }
}

/// On-disk model format.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ModelFile {
    pub agents: Vec<String>,
    pub states: Vec<String>,
    #[serde(default)]
    pub rel: BTreeMap<String, Vec<(String, String)>>,
    #[serde(default)]
    pub val: BTreeMap<String, Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<String>,
}

impl ModelFile {
    pub fn into_model(self) -> Result<KripkeModel> {
        let mut m = KripkeModel::new(self.agents, self.states)?;
        for (agent, pairs) in &self.rel {
            let a = m.agent_index(&Agent::new(agent.as_str()))?;
            for (s, t) in pairs {
                let (s, t) = (m.state_index(s)?, m.state_index(t)?);
                m.add_edge(a, s, t);
            }
        }
        for (state, atoms) in self.val {
            let s = m.state_index(&state)?;
            for p in atoms {
                m.set_atom(s, Atom::new(p), true);
            }
        }
        Ok(m)
    }

    pub fn from_model(m: &KripkeModel) -> Self {
        let rel = m
            .agents
            .iter()
            .enumerate()
            .map(|(a, name)| {
                let pairs = m
                    .pairs(a)
                    .map(|(s, t)| (m.states[s].clone(), m.states[t].clone()))
                    .collect();
                (name.to_string(), pairs)
            })
            .collect();
        let val = (0..m.len())
            .filter(|&s| !m.val[s].is_empty())
            .map(|s| {
                (
                    m.states[s].clone(),
                    m.val[s].iter().map(|p| p.to_string()).collect(),
                )
            })
            .collect();
        ModelFile {
            agents: m.agents.iter().map(|a| a.to_string()).collect(),
            states: m.states.clone(),
            rel,
            val,
            point: None,
        }
    }
}

impl KripkeModel {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str::<ModelFile>(text)?.into_model()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&ModelFile::from_model(self)).expect("model file serializes")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Condition {
    Serial,
    Reflexive,
    Symmetric,
    Transitive,
    Euclidean,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameViolation {
    pub agent: Agent,
    pub condition: Condition,
    pub states: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameCheck {
    pub holds: bool,
    pub violation: Option<FrameViolation>,
}

fn conditions(class: FrameClass) -> &'static [Condition] {
    match class {
        FrameClass::K => &[],
        FrameClass::K45 => &[Condition::Transitive, Condition::Euclidean],
        FrameClass::KD45 => &[
            Condition::Serial,
            Condition::Transitive,
            Condition::Euclidean,
        ],
        FrameClass::S5 => &[
            Condition::Reflexive,
            Condition::Symmetric,
            Condition::Transitive,
        ],
    }
}

// First counterexample to `cond` for one agent, as state indices.
fn violation(m: &KripkeModel, a: usize, cond: Condition) -> Option<Vec<usize>> {
    let n = m.len();
    for s in 0..n {
        let succ = m.succ(a, s);
        match cond {
            Condition::Serial if succ.is_empty() => return Some(vec![s]),
            Condition::Reflexive if !m.has_edge(a, s, s) => return Some(vec![s]),
            Condition::Symmetric => {
                if let Some(&t) = succ.iter().find(|&&t| !m.has_edge(a, t, s)) {
                    return Some(vec![s, t]);
                }
            }
            Condition::Transitive => {
                for &t in succ {
                    if let Some(&u) = m.succ(a, t).iter().find(|&&u| !m.has_edge(a, s, u)) {
                        return Some(vec![s, t, u]);
                    }
                }
            }
            Condition::Euclidean => {
                for &t in succ {
                    if let Some(&u) = succ.iter().find(|&&u| !m.has_edge(a, t, u)) {
                        return Some(vec![s, t, u]);
                    }
                }
            }
            _ => {}
        }
    }
    None
}

pub fn agent_in_class(m: &KripkeModel, agent: usize, class: FrameClass) -> bool {
    conditions(class)
        .iter()
        .all(|&c| violation(m, agent, c).is_none())
}

/// Checks every agent's relation, reporting the first failed condition in
/// agent declaration order.
pub fn check_frame_class(m: &KripkeModel, class: FrameClass) -> FrameCheck {
    for a in 0..m.agents.len() {
        for &cond in conditions(class) {
            if let Some(states) = violation(m, a, cond) {
                return FrameCheck {
                    holds: false,
                    violation: Some(FrameViolation {
                        agent: m.agents[a].clone(),
                        condition: cond,
                        states: states.into_iter().map(|s| m.states[s].clone()).collect(),
                    }),
                };
            }
        }
    }
    FrameCheck {
        holds: true,
        violation: None,
    }
}

pub fn generated_submodel(pm: &PointedModel) -> PointedModel {
    let keep = pm.model.reachable_from(pm.point);
    let (model, map) = pm.model.restrict(&keep);
    PointedModel {
        model,
        point: map[pm.point].expect("point is reachable from itself"),
    }
}

/// Coarsest bisimulation of a single model as block numbers per state.
pub fn bisimulation_classes(m: &KripkeModel) -> Vec<usize> {
    let mut block = number_by_key(m.val.iter());
    let mut count = block.iter().max().map_or(0, |b| b + 1);
    loop {
        let signatures: Vec<(usize, Vec<Vec<usize>>)> = (0..m.len())
            .map(|s| {
                let per_agent = m
                    .rel
                    .iter()
                    .map(|per_state| {
                        let mut targets: Vec<usize> =
                            per_state[s].iter().map(|&t| block[t]).collect();
                        targets.sort_unstable();
                        targets.dedup();
                        targets
                    })
                    .collect();
                (block[s], per_agent)
            })
            .collect();
        let next = number_by_key(signatures.iter());
        let next_count = next.iter().max().map_or(0, |b| b + 1);
        block = next;
        if next_count == count {
            return block;
        }
        count = next_count;
    }
}

// Numbers distinct keys in order of first occurrence.
fn number_by_key<'a, K: Ord + 'a>(keys: impl Iterator<Item = &'a K>) -> Vec<usize> {
    let mut ids: BTreeMap<&K, usize> = BTreeMap::new();
    keys.map(|k| {
        let next = ids.len();
        *ids.entry(k).or_insert(next)
    })
    .collect()
}

/// Disjoint union with agents in `m1`'s order. States of `m2` are shifted by
/// `m1.len()`.
pub fn disjoint_union(m1: &KripkeModel, m2: &KripkeModel) -> Result<KripkeModel> {
    let set1: BTreeSet<&Agent> = m1.agents.iter().collect();
    let set2: BTreeSet<&Agent> = m2.agents.iter().collect();
    if set1 != set2 {
        return Err(Error::AgentMismatch(format!(
            "{{{}}} vs {{{}}}",
            join(&m1.agents),
            join(&m2.agents)
        )));
    }
    let off = m1.len();
    let mut states: Vec<String> = m1.states.iter().map(|s| format!("1:{s}")).collect();
    states.extend(m2.states.iter().map(|s| format!("2:{s}")));
    let rel = m1
        .agents
        .iter()
        .enumerate()
        .map(|(a1, agent)| {
            let a2 = m2.agent_index(agent).expect("agent sets are equal");
            let mut per_state = m1.rel[a1].clone();
            per_state.extend(
                m2.rel[a2]
                    .iter()
                    .map(|succ| succ.iter().map(|t| t + off).collect()),
            );
            per_state
        })
        .collect();
    let mut val = m1.val.clone();
    val.extend(m2.val.iter().cloned());
    Ok(KripkeModel {
        agents: m1.agents.clone(),
        states,
        rel,
        val,
    })
}

fn join(agents: &[Agent]) -> String {
    agents
        .iter()
        .map(|a| a.as_str())
        .collect::<Vec<_>>()
        .join(",")
}

pub fn bisimilar(pm1: &PointedModel, pm2: &PointedModel) -> Result<bool> {
    let union = disjoint_union(&pm1.model, &pm2.model)?;
    let classes = bisimulation_classes(&union);
    Ok(classes[pm1.point] == classes[pm1.model.len() + pm2.point])
}

/// Quotient of the generated submodel by its coarsest bisimulation. Each block
/// keeps the id of its first member.
pub fn bisim_contraction(pm: &PointedModel) -> PointedModel {
    let gen = generated_submodel(pm);
    let m = &gen.model;
    let classes = bisimulation_classes(m);
    let count = classes.iter().max().map_or(0, |b| b + 1);
    let mut rep = vec![usize::MAX; count];
    for (s, &b) in classes.iter().enumerate() {
        if rep[b] == usize::MAX {
            rep[b] = s;
        }
    }
    let rel = m
        .rel
        .iter()
        .map(|per_state| {
            rep.iter()
                .map(|&s| {
                    let mut succ: Vec<usize> = per_state[s].iter().map(|&t| classes[t]).collect();
                    succ.sort_unstable();
                    succ.dedup();
                    succ
                })
                .collect()
        })
        .collect();
    PointedModel {
        model: KripkeModel {
            agents: m.agents.clone(),
            states: rep.iter().map(|&s| m.states[s].clone()).collect(),
            rel,
            val: rep.iter().map(|&s| m.val[s].clone()).collect(),
        },
        point: classes[gen.point],
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Clusters {
    /// Sorted member lists, ordered by first member.
    pub clusters: Vec<Vec<usize>>,
    pub unreachable: Vec<usize>,
}

impl Clusters {
    pub fn cluster_of(&self, s: usize) -> Option<usize> {
        self.clusters
            .iter()
            .position(|c| c.binary_search(&s).is_ok())
    }
}

/// In a transitive euclidean relation every nonempty image is a clique and
/// two images are equal or disjoint; those images are the clusters.
pub fn detect_clusters(m: &KripkeModel, agent: &Agent) -> Result<Clusters> {
    let a = m.agent_index(agent)?;
    if !agent_in_class(m, a, FrameClass::K45) {
        return Err(Error::NotK45(agent.clone()));
    }
    let mut clusters: Vec<Vec<usize>> = (0..m.len())
        .map(|s| m.succ(a, s).to_vec())
        .filter(|img| !img.is_empty())
        .collect();
    clusters.sort();
    clusters.dedup();
    let mut in_cluster = vec![false; m.len()];
    for &s in clusters.iter().flatten() {
        in_cluster[s] = true;
    }
    Ok(Clusters {
        clusters,
        unreachable: (0..m.len()).filter(|&s| !in_cluster[s]).collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DotStyle {
    Full,
    Simplified,
}

impl FromStr for DotStyle {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(DotStyle::Full),
            "simplified" => Ok(DotStyle::Simplified),
            _ => Err(Error::ParamOutOfRange(format!("dot style {s:?}"))),
        }
    }
}

const EDGE_STYLES: [&str; 4] = ["solid", "dashed", "dotted", "bold"];

fn edge_style(agent: usize) -> &'static str {
    EDGE_STYLES[agent % EDGE_STYLES.len()]
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Graphviz rendering. The simplified style draws each cluster as a chain of
/// undirected edges and each state outside the clusters as one arrow into its
/// target cluster; loops are implied. Node comments carry the valuation and,
/// for states without successors, the agents concerned, so the drawing can be
/// read back with [`model_from_dot`].
pub fn to_dot(pm: &PointedModel, style: DotStyle) -> Result<String> {
    let m = &pm.model;
    let clusters = match style {
        DotStyle::Full => None,
        DotStyle::Simplified => Some(
            m.agents
                .iter()
                .map(|a| detect_clusters(m, a).map_err(|_| Error::NotSimplifiable(a.clone())))
                .collect::<Result<Vec<_>>>()?,
        ),
    };
    let mut out = String::from("digraph M {\n");
    let style_name = match style {
        DotStyle::Full => "full",
        DotStyle::Simplified => "simplified",
    };
    out.push_str(&format!(
        "  graph [comment={}];\n",
        quote(&format!("agents={};style={style_name}", join(&m.agents)))
    ));
    out.push_str("  node [shape=circle];\n");
    for s in 0..m.len() {
        let atoms: Vec<&str> = m.val[s].iter().map(|p| p.as_str()).collect();
        let mut comment = format!("val={}", atoms.join(","));
        if let Some(cl) = &clusters {
            let dead: Vec<&str> = (0..m.agents.len())
                .filter(|&a| m.succ(a, s).is_empty() && cl[a].cluster_of(s).is_none())
                .map(|a| m.agents[a].as_str())
                .collect();
            if !dead.is_empty() {
                comment.push_str(&format!(";dead={}", dead.join(",")));
            }
        }
        let label = if atoms.is_empty() {
            m.states[s].clone()
        } else {
            format!("{}\\n{}", m.states[s], atoms.join(" "))
        };
        let shape = if s == pm.point {
            ", shape=doublecircle"
        } else {
            ""
        };
        out.push_str(&format!(
            "  {} [label={}, comment={}{}];\n",
            quote(&m.states[s]),
            quote(&label),
            quote(&comment),
            shape
        ));
    }
    for (a, agent) in m.agents.iter().enumerate() {
        let style_attr = edge_style(a);
        let mut edge = |s: usize, t: usize, undirected: bool| {
            out.push_str(&format!(
                "  {} -> {} [label={}, style={}{}];\n",
                quote(&m.states[s]),
                quote(&m.states[t]),
                quote(agent.as_str()),
                style_attr,
                if undirected { ", dir=none" } else { "" }
            ));
        };
        match &clusters {
            None => {
                for (s, t) in m.pairs(a) {
                    edge(s, t, false);
                }
            }
            Some(cl) => {
                for members in &cl[a].clusters {
                    for w in members.windows(2) {
                        edge(w[0], w[1], true);
                    }
                }
                for &s in &cl[a].unreachable {
                    if let Some(&t) = m.succ(a, s).first() {
                        edge(s, t, false);
                    }
                }
            }
        }
    }
    out.push_str("}\n");
    Ok(out)
}

// Minimal reader for the DOT text produced by `to_dot`.
struct DotTokens<'a> {
    rest: &'a str,
}

impl<'a> Iterator for DotTokens<'a> {
    type Item = String;
    fn next(&mut self) -> Option<String> {
        self.rest = self.rest.trim_start();
        let mut chars = self.rest.char_indices();
        let (_, c) = chars.next()?;
        if c == '"' {
            let mut s = String::new();
            let mut escaped = false;
            for (i, c) in chars {
                if escaped {
                    s.push(c);
                    escaped = false;
                } else if c == '\\' {
                    escaped = true;
                } else if c == '"' {
                    self.rest = &self.rest[i + 1..];
                    return Some(s);
                } else {
                    s.push(c);
                }
            }
            self.rest = "";
            return Some(s);
        }
        if self.rest.starts_with("->") {
            self.rest = &self.rest[2..];
            return Some("->".into());
        }
        if "[]{};,=".contains(c) {
            self.rest = &self.rest[1..];
            return Some(c.to_string());
        }
        let end = self
            .rest
            .find(|c: char| c.is_whitespace() || "[]{};,=\"".contains(c))
            .unwrap_or(self.rest.len());
        let word = self.rest[..end].to_string();
        self.rest = &self.rest[end..];
        Some(word)
    }
}

fn read_attrs(tokens: &mut std::iter::Peekable<DotTokens<'_>>) -> BTreeMap<String, String> {
    let mut attrs = BTreeMap::new();
    if tokens.peek().map(String::as_str) != Some("[") {
        return attrs;
    }
    tokens.next();
    while let Some(key) = tokens.next() {
        if key == "]" {
            break;
        }
        if key == "," {
            continue;
        }
        if tokens.peek().map(String::as_str) == Some("=") {
            tokens.next();
            attrs.insert(key, tokens.next().unwrap_or_default());
        }
    }
    attrs
}

/// Rebuilds a pointed model from [`to_dot`] output of either style, closing
/// simplified drawings under the cluster conventions: chain-connected states
/// form a cluster, an isolated state without a `dead` mark is a reflexive
/// singleton, and an arrow from a state outside the clusters targets the
/// whole cluster of its head.
pub fn model_from_dot(text: &str) -> Result<PointedModel> {
    let bad = |msg: &str| Error::MalformedModel(format!("dot: {msg}"));
    let mut tokens = DotTokens { rest: text }.peekable();
    let mut agents: Vec<String> = Vec::new();
    let mut nodes: Vec<(String, BTreeMap<String, String>)> = Vec::new();
    let mut edges: Vec<(String, String, BTreeMap<String, String>)> = Vec::new();
    let mut simplified = false;
    while let Some(tok) = tokens.next() {
        match tok.as_str() {
            "digraph" | "M" | "{" | "}" | ";" => {}
            "graph" => {
                let attrs = read_attrs(&mut tokens);
                for part in attrs
                    .get("comment")
                    .map(String::as_str)
                    .unwrap_or("")
                    .split(';')
                {
                    if let Some(list) = part.strip_prefix("agents=") {
                        agents = list
                            .split(',')
                            .filter(|s| !s.is_empty())
                            .map(String::from)
                            .collect();
                    } else if part == "style=simplified" {
                        simplified = true;
                    }
                }
            }
            "node" => {
                read_attrs(&mut tokens);
            }
            id => {
                if tokens.peek().map(String::as_str) == Some("->") {
                    tokens.next();
                    let to = tokens.next().ok_or_else(|| bad("edge without head"))?;
                    let attrs = read_attrs(&mut tokens);
                    edges.push((id.to_string(), to, attrs));
                } else {
                    let attrs = read_attrs(&mut tokens);
                    nodes.push((id.to_string(), attrs));
                }
            }
        }
    }
    if agents.is_empty() {
        return Err(bad("missing agent declaration"));
    }
    let mut m = KripkeModel::new(agents.clone(), nodes.iter().map(|(id, _)| id.clone()))?;
    let mut point = None;
    let mut dead: Vec<BTreeSet<String>> = vec![BTreeSet::new(); nodes.len()];
    for (s, (_, attrs)) in nodes.iter().enumerate() {
        if attrs.get("shape").map(String::as_str) == Some("doublecircle") {
            point = Some(s);
        }
        let comment = attrs.get("comment").map(String::as_str).unwrap_or("");
        for part in comment.split(';') {
            if let Some(v) = part.strip_prefix("val=") {
                for p in v.split(',').filter(|p| !p.is_empty()) {
                    m.set_atom(s, Atom::new(p), true);
                }
            } else if let Some(d) = part.strip_prefix("dead=") {
                dead[s] = d.split(',').map(String::from).collect();
            }
        }
    }
    let mut directed: Vec<Vec<(usize, usize)>> = vec![Vec::new(); agents.len()];
    let mut undirected: Vec<Vec<(usize, usize)>> = vec![Vec::new(); agents.len()];
    for (from, to, attrs) in &edges {
        let agent = attrs
            .get("label")
            .ok_or_else(|| bad("edge without agent label"))?;
        let a = m.agent_index(&Agent::new(agent.as_str()))?;
        let (s, t) = (m.state_index(from)?, m.state_index(to)?);
        if attrs.get("dir").map(String::as_str) == Some("none") {
            undirected[a].push((s, t));
        } else {
            directed[a].push((s, t));
        }
    }
    if !simplified {
        for (a, es) in directed.iter().enumerate() {
            for &(s, t) in es {
                m.add_edge(a, s, t);
            }
        }
    } else {
        let n = m.len();
        for a in 0..agents.len() {
            // union-find over undirected chain edges
            let mut parent: Vec<usize> = (0..n).collect();
            fn find(p: &mut [usize], x: usize) -> usize {
                let mut r = x;
                while p[r] != r {
                    r = p[r];
                }
                p[x] = r;
                r
            }
            for &(s, t) in &undirected[a] {
                let (rs, rt) = (find(&mut parent, s), find(&mut parent, t));
                parent[rs] = rt;
            }
            let outside: BTreeSet<usize> = directed[a].iter().map(|e| e.0).collect();
            let agent_name = &agents[a];
            let roots: Vec<usize> = (0..n).map(|s| find(&mut parent, s)).collect();
            let in_cluster = |s: usize| !outside.contains(&s) && !dead[s].contains(agent_name);
            let members = |root: usize| -> Vec<usize> {
                (0..n)
                    .filter(|&u| roots[u] == root && in_cluster(u))
                    .collect()
            };
            for s in 0..n {
                if in_cluster(s) {
                    m.set_successors(a, s, members(roots[s]));
                }
            }
            for &(s, t) in &directed[a] {
                m.set_successors(a, s, members(roots[t]));
            }
        }
    }
    let point = point.ok_or_else(|| bad("no designated point"))?;
    PointedModel::new(m, point)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Two states, p false at s and true at t, one agent unable to tell them apart.
    fn two_state() -> KripkeModel {
        let mut m = KripkeModel::new(["a"], ["s", "t"]).unwrap();
        for (x, y) in [("s", "s"), ("s", "t"), ("t", "s"), ("t", "t")] {
            m.add_edge_by_name("a", x, y).unwrap();
        }
        m.set_atom(1, "p", true);
        m
    }

    /// Point valuation `point_p`, arrows into a cluster of the given valuations.
    fn canonical(point_p: bool, cluster: &[bool]) -> PointedModel {
        let mut ids = vec!["w".to_string()];
        ids.extend((0..cluster.len()).map(|i| format!("c{i}")));
        let mut m = KripkeModel::new(["a"], ids).unwrap();
        m.set_atom(0, "p", point_p);
        for (i, &v) in cluster.iter().enumerate() {
            m.set_atom(i + 1, "p", v);
        }
        for s in 0..=cluster.len() {
            for t in 1..=cluster.len() {
                m.add_edge(0, s, t);
            }
        }
        PointedModel::new(m, 0).unwrap()
    }

    #[test]
    fn frame_classes() {
        let m = two_state();
        assert!(check_frame_class(&m, FrameClass::S5).holds);
        let empty = KripkeModel::new(["a"], ["s", "t"]).unwrap();
        let c = check_frame_class(&empty, FrameClass::KD45);
        assert!(!c.holds);
        let v = c.violation.unwrap();
        assert_eq!(v.condition, Condition::Serial);
        assert_eq!(v.states, ["s"]);
        let a = canonical(true, &[]);
        assert!(check_frame_class(&a.model, FrameClass::K45).holds);
        assert!(!check_frame_class(&a.model, FrameClass::KD45).holds);
        assert!(check_frame_class(&a.model, FrameClass::K).holds);
    }

    #[test]
    fn transitivity_witness() {
        let mut m = KripkeModel::new(["a"], ["x", "y", "z"]).unwrap();
        m.add_edge(0, 0, 1);
        m.add_edge(0, 1, 2);
        let v = check_frame_class(&m, FrameClass::K45).violation.unwrap();
        assert_eq!(v.condition, Condition::Transitive);
        assert_eq!(v.states, ["x", "y", "z"]);
    }

    #[test]
    fn generated_drops_isolated_state() {
        let mut m = KripkeModel::new(["a"], ["w", "x"]).unwrap();
        m.set_atom(0, "p", true);
        let g = generated_submodel(&PointedModel::new(m, 0).unwrap());
        assert_eq!(g.model.len(), 1);
        assert_eq!(g.model.arrow_count(), 0);
        let pm = PointedModel::new(two_state(), 1).unwrap();
        assert_eq!(generated_submodel(&pm), pm);
    }

    #[test]
    fn bisimilarity_basics() {
        let pm = PointedModel::new(two_state(), 0).unwrap();
        assert!(bisimilar(&pm, &pm).unwrap());
        // model c (point inside the cluster) vs its canonical rendering
        let c_drawn = {
            let mut m = KripkeModel::new(["a"], ["u", "v"]).unwrap();
            m.set_atom(1, "p", true);
            for (x, y) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                m.add_edge(0, x, y);
            }
            PointedModel::new(m, 1).unwrap()
        };
        assert!(bisimilar(&c_drawn, &canonical(true, &[false, true])).unwrap());
        assert!(!bisimilar(&c_drawn, &canonical(false, &[false, true])).unwrap());
        let other = PointedModel::new(KripkeModel::new(["b"], ["s"]).unwrap(), 0).unwrap();
        assert!(matches!(
            bisimilar(&pm, &other),
            Err(Error::AgentMismatch(_))
        ));
    }

    #[test]
    fn contraction_merges_duplicates() {
        let mut m = KripkeModel::new(["a"], ["w", "x", "y"]).unwrap();
        for t in [1, 2] {
            m.add_edge(0, 0, t);
            m.add_edge(0, 1, t);
            m.add_edge(0, 2, t);
        }
        m.set_atom(1, "p", true);
        m.set_atom(2, "p", true);
        let c = bisim_contraction(&PointedModel::new(m.clone(), 0).unwrap());
        assert_eq!(c.model.len(), 2);
        assert!(bisimilar(&c, &PointedModel::new(m, 0).unwrap()).unwrap());
        let s = PointedModel::new(two_state(), 0).unwrap();
        assert_eq!(bisim_contraction(&s).model.len(), 2);
    }

    #[test]
    fn clusters() {
        let d = canonical(false, &[true]);
        let cl = detect_clusters(&d.model, &Agent::from("a")).unwrap();
        assert_eq!(cl.clusters, vec![vec![1]]);
        assert_eq!(cl.unreachable, vec![0]);
        let s5 = detect_clusters(&two_state(), &Agent::from("a")).unwrap();
        assert_eq!(s5.clusters, vec![vec![0, 1]]);
        assert!(s5.unreachable.is_empty());
        let empty = KripkeModel::new(["a"], ["s", "t"]).unwrap();
        let e = detect_clusters(&empty, &Agent::from("a")).unwrap();
        assert!(e.clusters.is_empty());
        assert_eq!(e.unreachable, vec![0, 1]);
        let mut bad = KripkeModel::new(["a"], ["x", "y", "z"]).unwrap();
        bad.add_edge(0, 0, 1);
        bad.add_edge(0, 1, 2);
        assert!(matches!(
            detect_clusters(&bad, &Agent::from("a")),
            Err(Error::NotK45(_))
        ));
    }

    fn edge_lines(dot: &str) -> Vec<&str> {
        dot.lines().filter(|l| l.contains("->")).collect()
    }

    #[test]
    fn dot_styles() {
        let d = canonical(false, &[true]);
        let simple = to_dot(&d, DotStyle::Simplified).unwrap();
        let lines = edge_lines(&simple);
        assert_eq!(lines.len(), 1);
        assert!(lines[0].contains("\"w\" -> \"c0\"") && !lines[0].contains("dir=none"));
        assert!(simple.contains("doublecircle"));
        let full = to_dot(&d, DotStyle::Full).unwrap();
        let lines = edge_lines(&full);
        assert_eq!(lines.len(), 2);
        assert!(lines.iter().any(|l| l.contains("\"c0\" -> \"c0\"")));

        let mut single = KripkeModel::new(["a"], ["s"]).unwrap();
        single.add_edge(0, 0, 0);
        let pm = PointedModel::new(single, 0).unwrap();
        assert!(edge_lines(&to_dot(&pm, DotStyle::Simplified).unwrap()).is_empty());

        let mut bad = KripkeModel::new(["a"], ["x", "y", "z"]).unwrap();
        bad.add_edge(0, 0, 1);
        bad.add_edge(0, 1, 2);
        let pm = PointedModel::new(bad, 0).unwrap();
        assert!(matches!(
            to_dot(&pm, DotStyle::Simplified),
            Err(Error::NotSimplifiable(_))
        ));
    }

    #[test]
    fn dot_round_trip() {
        for pm in [
            canonical(false, &[true]),
            canonical(true, &[]),
            canonical(true, &[false, true]),
            PointedModel::new(two_state(), 0).unwrap(),
        ] {
            for style in [DotStyle::Full, DotStyle::Simplified] {
                let back = model_from_dot(&to_dot(&pm, style).unwrap()).unwrap();
                assert_eq!(back, pm, "{style:?}");
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let pm = PointedModel::new(two_state(), 1).unwrap();
        let back = PointedModel::from_json(&pm.to_json()).unwrap();
        assert_eq!(back, pm);
        let text = r#"{"agents":["a","b"],"states":["s","t"],"rel":{"a":[["s","s"],["s","t"]]},"val":{"t":["p"]},"point":"s"}"#;
        let pm = PointedModel::from_json(text).unwrap();
        assert_eq!(pm.model.arrow_count(), 2);
        assert!(pm.model.holds(1, &Atom::from("p")));
        assert!(PointedModel::from_json(
            r#"{"agents":["a"],"states":["s"],"rel":{"z":[]},"point":"s"}"#
        )
        .is_err());
    }
}
