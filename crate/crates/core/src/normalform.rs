//! Single-agent KD45 normal forms, clarity, canonical models and the
//! decision procedures built on them.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formula::{
    build_sigma_check, translate, Agent, AgentSet, Atom, CheckMode, Formula, Sigma,
};
use crate::kripke::{agent_in_class, FrameClass, KripkeModel, PointedModel};
use crate::parser::DEFAULT_AGENT;
use crate::semantics::eval;

pub const DEFAULT_MAX_ATOMS: usize = 2;

/// Atom bound for canonical enumeration, overridable through `EPL_MAX_ATOMS`.
pub fn atom_bound() -> usize {
    std::env::var("EPL_MAX_ATOMS")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_MAX_ATOMS)
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Literal {
    pub atom: Atom,
    pub positive: bool,
}

impl Literal {
    pub fn pos(atom: impl Into<Atom>) -> Self {
        Literal {
            atom: atom.into(),
            positive: true,
        }
    }

    pub fn neg(atom: impl Into<Atom>) -> Self {
        Literal {
            atom: atom.into(),
            positive: false,
        }
    }

    pub fn negated(&self) -> Self {
        Literal {
            atom: self.atom.clone(),
            positive: !self.positive,
        }
    }

    pub fn to_formula(&self) -> Formula {
        let p = Formula::Atom(self.atom.clone());
        if self.positive {
            p
        } else {
            Formula::not(p)
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.positive {
            f.write_str("~")?;
        }
        write!(f, "{}", self.atom)
    }
}

pub type Literals = BTreeSet<Literal>;

pub fn is_open(lits: &Literals) -> bool {
    lits.iter().all(|l| !lits.contains(&l.negated()))
}

/// `α ∧ □β_1 ∧ … ∧ □β_n ∧ ◇γ_1 ∧ … ∧ ◇γ_m`; each `β_i` is a disjunction
/// and each `γ_j` a conjunction of literals.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Disjunct {
    pub alpha: Literals,
    pub boxes: Vec<Literals>,
    pub diamonds: Vec<Literals>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Unclear {
    /// Condition (i): the propositional part is contradictory.
    AlphaNotOpen,
    /// Condition (ii): no consistent choice of one literal per box.
    NoBoxChoice,
    /// Condition (iii) fails for the diamond at this index.
    Diamond(usize),
}

impl Disjunct {
    pub fn literal(l: Literal) -> Self {
        Disjunct {
            alpha: [l].into(),
            ..Disjunct::default()
        }
    }

    pub fn boxed(beta: Literals) -> Self {
        Disjunct {
            boxes: vec![beta],
            ..Disjunct::default()
        }
    }

    pub fn diamond(gamma: Literals) -> Self {
        Disjunct {
            diamonds: vec![gamma],
            ..Disjunct::default()
        }
    }

    pub fn conjoin(&self, other: &Disjunct) -> Disjunct {
        let mut out = self.clone();
        out.alpha.extend(other.alpha.iter().cloned());
        out.boxes.extend(other.boxes.iter().cloned());
        out.diamonds.extend(other.diamonds.iter().cloned());
        out.normalize();
        out
    }

    /// Drops conjuncts that are KD45-redundant: tautological boxes, boxes
    /// implied by smaller boxes, `◇⊤`, and diamonds implied by larger ones.
    pub fn normalize(&mut self) {
        let mut boxes: Vec<Literals> = std::mem::take(&mut self.boxes)
            .into_iter()
            .filter(is_open)
            .collect();
        boxes.sort();
        boxes.dedup();
        let keep: Vec<bool> = boxes
            .iter()
            .map(|b| !boxes.iter().any(|c| c != b && c.is_subset(b)))
            .collect();
        self.boxes = boxes
            .into_iter()
            .zip(keep)
            .filter(|(_, k)| *k)
            .map(|(b, _)| b)
            .collect();

        let mut dias: Vec<Literals> = std::mem::take(&mut self.diamonds)
            .into_iter()
            .filter(|g| !g.is_empty())
            .collect();
        dias.sort();
        dias.dedup();
        let keep: Vec<bool> = dias
            .iter()
            .map(|g| !dias.iter().any(|h| h != g && g.is_subset(h)))
            .collect();
        self.diamonds = dias
            .into_iter()
            .zip(keep)
            .filter(|(_, k)| *k)
            .map(|(g, _)| g)
            .collect();
    }

    pub fn clarity(&self) -> std::result::Result<(), Unclear> {
        if !is_open(&self.alpha) {
            return Err(Unclear::AlphaNotOpen);
        }
        if !choose(&self.boxes, &BTreeSet::new()) {
            return Err(Unclear::NoBoxChoice);
        }
        for (k, gamma) in self.diamonds.iter().enumerate() {
            if !is_open(gamma) || !choose(&self.boxes, gamma) {
                return Err(Unclear::Diamond(k));
            }
        }
        Ok(())
    }

    pub fn is_clear(&self) -> bool {
        self.clarity().is_ok()
    }

    /// Syntactic entailment: every conjunct of `other` follows from a conjunct of `self`.
    pub fn entails(&self, other: &Disjunct) -> bool {
        other.alpha.is_subset(&self.alpha)
            && other
                .boxes
                .iter()
                .all(|b| self.boxes.iter().any(|c| c.is_subset(b)))
            && other
                .diamonds
                .iter()
                .all(|g| self.diamonds.iter().any(|h| g.is_subset(h)))
    }

    pub fn alpha_formula(&self) -> Formula {
        Formula::conj(self.alpha.iter().map(Literal::to_formula))
    }

    /// The modal part `δ^{□◇}`.
    pub fn modal_formula(&self, agent: &Agent) -> Formula {
        let boxes = self.boxes.iter().map(|b| box_formula(agent, b));
        let dias = self.diamonds.iter().map(|g| diamond_formula(agent, g));
        Formula::conj(boxes.chain(dias))
    }

    pub fn to_formula(&self, agent: &Agent) -> Formula {
        let alpha = self.alpha.iter().map(Literal::to_formula);
        let boxes = self.boxes.iter().map(|b| box_formula(agent, b));
        let dias = self.diamonds.iter().map(|g| diamond_formula(agent, g));
        Formula::conj(alpha.chain(boxes).chain(dias))
    }
}

pub fn box_formula(agent: &Agent, beta: &Literals) -> Formula {
    Formula::boxed(
        agent.clone(),
        Formula::disj(beta.iter().map(Literal::to_formula)),
    )
}

pub fn diamond_formula(agent: &Agent, gamma: &Literals) -> Formula {
    Formula::diamond(
        agent.clone(),
        Formula::conj(gamma.iter().map(Literal::to_formula)),
    )
}

// Picks one literal from each clause, consistent with `base` and with each other.
fn choose(clauses: &[Literals], base: &Literals) -> bool {
    fn go(clauses: &[Literals], chosen: &mut Vec<Literal>, base: &Literals) -> bool {
        let Some((first, rest)) = clauses.split_first() else {
            return true;
        };
        for l in first {
            let neg = l.negated();
            if base.contains(&neg) || chosen.contains(&neg) {
                continue;
            }
            chosen.push(l.clone());
            if go(rest, chosen, base) {
                return true;
            }
            chosen.pop();
        }
        false
    }
    go(clauses, &mut Vec::new(), base)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DnfFormula {
    pub agent: Agent,
    /// Empty means `false`.
    pub disjuncts: Vec<Disjunct>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClarityReport {
    pub clear: bool,
    /// First clear disjunct.
    pub witness: Option<usize>,
    /// Reason per unclear disjunct, by index.
    pub failures: Vec<(usize, Unclear)>,
}

impl DnfFormula {
    pub fn to_formula(&self) -> Formula {
        Formula::disj(self.disjuncts.iter().map(|d| d.to_formula(&self.agent)))
    }

    pub fn is_clear(&self) -> ClarityReport {
        let mut failures = Vec::new();
        let mut witness = None;
        for (i, d) in self.disjuncts.iter().enumerate() {
            match d.clarity() {
                Ok(()) => {
                    if witness.is_none() {
                        witness = Some(i);
                    }
                }
                Err(e) => failures.push((i, e)),
            }
        }
        ClarityReport {
            clear: witness.is_some(),
            witness,
            failures,
        }
    }
}

impl fmt::Display for DnfFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_formula())
    }
}

pub fn is_clear(f: &DnfFormula) -> ClarityReport {
    f.is_clear()
}

/// The single agent of `f`, or the default agent when there is none.
pub fn single_agent(f: &Formula) -> Result<Agent> {
    let agents = f.agents();
    match agents.len() {
        0 => Ok(Agent::from(DEFAULT_AGENT)),
        1 => Ok(agents.into_iter().next().expect("one agent")),
        _ => Err(Error::MultiAgentFormula(
            agents
                .iter()
                .map(Agent::as_str)
                .collect::<Vec<_>>()
                .join(","),
        )),
    }
}

// Negation normal form over the single agent.
#[derive(Debug, Clone)]
enum Nnf {
    Top,
    Bot,
    Lit(Literal),
    And(Vec<Nnf>),
    Or(Vec<Nnf>),
    Box(Box<Nnf>),
    Dia(Box<Nnf>),
}

fn nnf(f: &Formula, positive: bool) -> Result<Nnf> {
    Ok(match f {
        Formula::Top => {
            if positive {
                Nnf::Top
            } else {
                Nnf::Bot
            }
        }
        Formula::Bottom => {
            if positive {
                Nnf::Bot
            } else {
                Nnf::Top
            }
        }
        Formula::Atom(p) => Nnf::Lit(Literal {
            atom: p.clone(),
            positive,
        }),
        Formula::Not(g) => nnf(g, !positive)?,
        Formula::And(a, b) => {
            let parts = vec![nnf(a, positive)?, nnf(b, positive)?];
            if positive {
                Nnf::And(parts)
            } else {
                Nnf::Or(parts)
            }
        }
        Formula::Box(_, g) => {
            let inner = Box::new(nnf(g, positive)?);
            if positive {
                Nnf::Box(inner)
            } else {
                Nnf::Dia(inner)
            }
        }
        Formula::CommonBelief(..) => return Err(Error::UnsupportedOperator("common belief")),
        Formula::Announce(..) | Formula::ActionBox(..) => {
            return Err(Error::UntranslatedDynamicOperator)
        }
    })
}

/// Conjunction of two DNFs, dropping unclear products.
pub fn conj_disjuncts(a: &[Disjunct], b: &[Disjunct]) -> Vec<Disjunct> {
    let mut out = Vec::new();
    for x in a {
        for y in b {
            let d = x.conjoin(y);
            if d.is_clear() {
                out.push(d);
            }
        }
    }
    simplify_disjuncts(out)
}

/// Removes unclear, duplicate and subsumed disjuncts; sorts the rest.
pub fn simplify_disjuncts(ds: Vec<Disjunct>) -> Vec<Disjunct> {
    let mut ds: Vec<Disjunct> = ds
        .into_iter()
        .map(|mut d| {
            d.normalize();
            d
        })
        .filter(Disjunct::is_clear)
        .collect();
    ds.sort();
    ds.dedup();
    let keep: Vec<bool> = (0..ds.len())
        .map(|i| !(0..ds.len()).any(|j| j != i && ds[i].entails(&ds[j])))
        .collect();
    ds.into_iter()
        .zip(keep)
        .filter(|(_, k)| *k)
        .map(|(d, _)| d)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Component {
    Lit(Literal),
    Box(Literals),
    Dia(Literals),
}

fn flatten(n: &Nnf) -> Vec<Disjunct> {
    match n {
        Nnf::Top => vec![Disjunct::default()],
        Nnf::Bot => vec![],
        Nnf::Lit(l) => vec![Disjunct::literal(l.clone())],
        Nnf::Or(parts) => simplify_disjuncts(parts.iter().flat_map(flatten).collect()),
        Nnf::And(parts) => {
            let mut acc = vec![Disjunct::default()];
            for p in parts {
                if acc.is_empty() {
                    break;
                }
                acc = conj_disjuncts(&acc, &flatten(p));
            }
            acc
        }
        Nnf::Dia(body) => {
            // ◇(α ∧ D) ↔ ◇α ∧ D for modal D, and ◇ distributes over ∨
            let ds = flatten(body)
                .into_iter()
                .map(|d| Disjunct {
                    alpha: Literals::new(),
                    boxes: d.boxes,
                    diamonds: {
                        let mut g = d.diamonds;
                        g.push(d.alpha);
                        g
                    },
                })
                .collect();
            simplify_disjuncts(ds)
        }
        Nnf::Box(body) => box_of(&flatten(body)),
    }
}

// □ of a disjunction: CNF of the body, then □(L ∨ M) ↔ □L ∨ M per clause.
fn box_of(body: &[Disjunct]) -> Vec<Disjunct> {
    let options: Vec<Vec<Component>> = body
        .iter()
        .map(|d| {
            d.alpha
                .iter()
                .cloned()
                .map(Component::Lit)
                .chain(d.boxes.iter().cloned().map(Component::Box))
                .chain(d.diamonds.iter().cloned().map(Component::Dia))
                .collect()
        })
        .collect();
    if options.iter().any(Vec::is_empty) {
        // the body contains the disjunct `true`
        return vec![Disjunct::default()];
    }
    let mut clauses: Vec<BTreeSet<Component>> = Vec::new();
    fn tautological(c: &BTreeSet<Component>) -> bool {
        c.iter().any(|x| match x {
            Component::Lit(l) => c.contains(&Component::Lit(l.negated())),
            _ => false,
        })
    }
    fn build(
        options: &[Vec<Component>],
        cur: &mut BTreeSet<Component>,
        out: &mut Vec<BTreeSet<Component>>,
    ) {
        let Some((first, rest)) = options.split_first() else {
            out.push(cur.clone());
            return;
        };
        for c in first {
            let fresh = cur.insert(c.clone());
            if !tautological(cur) {
                build(rest, cur, out);
            }
            if fresh {
                cur.remove(c);
            }
        }
    }
    build(&options, &mut BTreeSet::new(), &mut clauses);
    clauses.sort();
    clauses.dedup();
    let minimal: Vec<&BTreeSet<Component>> = clauses
        .iter()
        .filter(|c| !clauses.iter().any(|d| d != *c && d.is_subset(c)))
        .collect();
    let mut acc = vec![Disjunct::default()];
    for clause in minimal {
        let mut lits = Literals::new();
        let mut alternatives = Vec::new();
        for comp in clause {
            match comp {
                Component::Lit(l) => {
                    lits.insert(l.clone());
                }
                Component::Box(b) => alternatives.push(Disjunct::boxed(b.clone())),
                Component::Dia(g) => alternatives.push(Disjunct::diamond(g.clone())),
            }
        }
        alternatives.push(Disjunct::boxed(lits));
        acc = conj_disjuncts(&acc, &simplify_disjuncts(alternatives));
        if acc.is_empty() {
            break;
        }
    }
    acc
}

/// KD45-equivalent disjunctive normal form of a single-agent formula.
/// Unsatisfiable and subsumed disjuncts are removed along the way.
pub fn to_dnf(f: &Formula) -> Result<DnfFormula> {
    let agent = single_agent(f)?;
    let g = translate(f)?;
    let n = nnf(&g, true)?;
    Ok(DnfFormula {
        agent,
        disjuncts: flatten(&n),
    })
}

/// A single-agent K45 pointed model up to bisimilarity: the valuation of the
/// point and the set of valuations of the cluster it sees.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CanonicalModel {
    pub atoms: Vec<Atom>,
    pub point_val: BTreeSet<Atom>,
    pub cluster: Vec<BTreeSet<Atom>>,
}

impl CanonicalModel {
    /// Point `w` outside the cluster states `c0, c1, …`, even when its
    /// valuation occurs in the cluster.
    pub fn render(&self, agent: &Agent) -> PointedModel {
        let mut ids = vec!["w".to_string()];
        ids.extend((0..self.cluster.len()).map(|i| format!("c{i}")));
        let mut m = KripkeModel::new([agent.clone()], ids).expect("nonempty model");
        m.set_val(0, self.point_val.clone());
        for (i, v) in self.cluster.iter().enumerate() {
            m.set_val(i + 1, v.clone());
        }
        for s in 0..=self.cluster.len() {
            m.set_successors(0, s, (1..=self.cluster.len()).collect());
        }
        PointedModel::new(m, 0).expect("point exists")
    }

    fn valuation_text(&self, v: &BTreeSet<Atom>) -> String {
        if self.atoms.is_empty() {
            return "-".into();
        }
        self.atoms
            .iter()
            .map(|p| {
                if v.contains(p) {
                    p.to_string()
                } else {
                    format!("~{p}")
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl fmt::Display for CanonicalModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cluster: Vec<String> = self
            .cluster
            .iter()
            .map(|v| self.valuation_text(v))
            .collect();
        write!(
            f,
            "<{} | {{{}}}>",
            self.valuation_text(&self.point_val),
            cluster.join(", ")
        )
    }
}

fn valuations(atoms: &[Atom]) -> Vec<BTreeSet<Atom>> {
    (0..1usize << atoms.len())
        .map(|code| {
            atoms
                .iter()
                .enumerate()
                .filter(|(i, _)| code >> i & 1 == 1)
                .map(|(_, p)| p.clone())
                .collect()
        })
        .collect()
}

/// All canonical models over `atoms`, ordered by point valuation and then
/// cluster bitmask; KD45 leaves out the empty cluster.
pub fn enumerate_canonical(
    atoms: &BTreeSet<Atom>,
    class: FrameClass,
) -> Result<Vec<CanonicalModel>> {
    let serial = match class {
        FrameClass::K45 => false,
        FrameClass::KD45 => true,
        other => return Err(Error::UnsupportedClass(other.to_string())),
    };
    let bound = atom_bound();
    if atoms.len() > bound {
        return Err(Error::TooManyAtoms {
            found: atoms.len(),
            bound,
        });
    }
    let atoms: Vec<Atom> = atoms.iter().cloned().collect();
    let vals = valuations(&atoms);
    let mut out = Vec::new();
    for point in &vals {
        for mask in 0u64..1 << vals.len() {
            if serial && mask == 0 {
                continue;
            }
            let cluster = (0..vals.len())
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| vals[i].clone())
                .collect();
            out.push(CanonicalModel {
                atoms: atoms.clone(),
                point_val: point.clone(),
                cluster,
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decision {
    pub holds: bool,
    /// A model where the formula is true (satisfiable) or false (valid).
    pub witness: Option<CanonicalModel>,
}

/// Complete for single-agent K45/KD45: evaluates `f` on every canonical
/// model over its atoms.
pub fn decide_single_agent(f: &Formula, class: FrameClass, mode: CheckMode) -> Result<Decision> {
    let agent = single_agent(f)?;
    if f.has_common_belief() {
        return Err(Error::UnsupportedOperator("common belief"));
    }
    for cm in enumerate_canonical(&f.atoms(), class)? {
        let value = eval(&cm.render(&agent), f)?;
        match mode {
            CheckMode::Satisfiable if value => {
                return Ok(Decision {
                    holds: true,
                    witness: Some(cm),
                })
            }
            CheckMode::Valid if !value => {
                return Ok(Decision {
                    holds: false,
                    witness: Some(cm),
                })
            }
            _ => {}
        }
    }
    Ok(Decision {
        holds: mode == CheckMode::Valid,
        witness: None,
    })
}

pub fn sigma_valid_single_agent(
    f: &Formula,
    sigma: &Sigma,
    class: FrameClass,
    believable: bool,
) -> Result<bool> {
    let agent = single_agent(f)?;
    let agents = AgentSet::from([agent]);
    let check = build_sigma_check(f, sigma, CheckMode::Valid, believable, &agents)?;
    Ok(decide_single_agent(&check, class, CheckMode::Valid)?.holds)
}

pub fn sigma_satisfiable_single_agent(
    f: &Formula,
    sigma: &Sigma,
    class: FrameClass,
    believable: bool,
) -> Result<bool> {
    let agent = single_agent(f)?;
    let agents = AgentSet::from([agent]);
    let check = build_sigma_check(f, sigma, CheckMode::Satisfiable, believable, &agents)?;
    Ok(decide_single_agent(&check, class, CheckMode::Satisfiable)?.holds)
}

// Every relation on `n` states in `class`, as successor lists.
fn relations_in_class(n: usize, class: FrameClass) -> Vec<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    for code in 0u64..1 << (n * n) {
        let mut m = KripkeModel::new(["a"], (0..n).map(|i| i.to_string())).expect("nonempty");
        for s in 0..n {
            for t in 0..n {
                if code >> (s * n + t) & 1 == 1 {
                    m.add_edge(0, s, t);
                }
            }
        }
        if agent_in_class(&m, 0, class) {
            out.push((0..n).map(|s| m.succ(0, s).to_vec()).collect());
        }
    }
    out
}

/// Searches models with up to `max_states` states, point first, for one
/// where `f` is false. `None` is inconclusive.
pub fn falsify_bounded(
    f: &Formula,
    class: FrameClass,
    agents: &[Agent],
    max_states: usize,
) -> Result<Option<PointedModel>> {
    if agents.is_empty() {
        return Err(Error::ParamOutOfRange("no agents given".into()));
    }
    for a in f.agents() {
        if !agents.contains(&a) {
            return Err(Error::UndeclaredAgent(a));
        }
    }
    let atoms: Vec<Atom> = f.atoms().into_iter().collect();
    let vals = valuations(&atoms);
    for n in 1..=max_states {
        let rels = relations_in_class(n, class);
        if rels.is_empty() {
            continue;
        }
        let mut rel_idx = vec![0usize; agents.len()];
        loop {
            let mut m = KripkeModel::new(agents.to_vec(), (0..n).map(|i| format!("s{i}")))?;
            for (a, &r) in rel_idx.iter().enumerate() {
                for (s, succ) in rels[r].iter().enumerate() {
                    m.set_successors(a, s, succ.clone());
                }
            }
            let mut val_idx = vec![0usize; n];
            loop {
                for (s, &v) in val_idx.iter().enumerate() {
                    m.set_val(s, vals[v].clone());
                }
                let pm = PointedModel::new(m.clone(), 0)?;
                if !eval(&pm, f)? {
                    return Ok(Some(pm));
                }
                if !odometer(&mut val_idx, vals.len()) {
                    break;
                }
            }
            if !odometer(&mut rel_idx, rels.len()) {
                break;
            }
        }
    }
    Ok(None)
}

// Advances a mixed counter; false after the last value.
fn odometer(digits: &mut [usize], base: usize) -> bool {
    for d in digits.iter_mut() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kripke::{bisimilar, check_frame_class};
    use crate::parser::parse_formula;

    fn f(src: &str) -> Formula {
        parse_formula(src).unwrap()
    }

    fn lits(ls: &[Literal]) -> Literals {
        ls.iter().cloned().collect()
    }

    #[test]
    fn dnf_of_p_and_box_p() {
        let d = to_dnf(&f("p & B p")).unwrap();
        assert_eq!(d.disjuncts.len(), 1);
        let x = &d.disjuncts[0];
        assert_eq!(x.alpha, lits(&[Literal::pos("p")]));
        assert_eq!(x.boxes, vec![lits(&[Literal::pos("p")])]);
        assert!(x.diamonds.is_empty());
    }

    #[test]
    fn dnf_extracts_and_merges_boxes() {
        let d = to_dnf(&f("~p & B p & D(p & B p)")).unwrap();
        assert_eq!(d.disjuncts.len(), 1);
        let x = &d.disjuncts[0];
        assert_eq!(x.alpha, lits(&[Literal::neg("p")]));
        assert_eq!(x.boxes, vec![lits(&[Literal::pos("p")])]);
        assert_eq!(x.diamonds, vec![lits(&[Literal::pos("p")])]);
    }

    #[test]
    fn dnf_of_nested_box() {
        assert_eq!(to_dnf(&f("B B p")).unwrap(), to_dnf(&f("B p")).unwrap());
    }

    #[test]
    fn dnf_rejects_two_agents() {
        assert!(matches!(
            to_dnf(&f("B{a} p & B{b} p")),
            Err(Error::MultiAgentFormula(_))
        ));
    }

    #[test]
    fn clarity_conditions() {
        let d = Disjunct {
            alpha: lits(&[Literal::pos("p"), Literal::neg("p")]),
            ..Disjunct::default()
        };
        assert_eq!(d.clarity(), Err(Unclear::AlphaNotOpen));
        let chi3 = Disjunct {
            diamonds: vec![lits(&[Literal::pos("p"), Literal::neg("p")])],
            ..Disjunct::default()
        };
        assert_eq!(chi3.clarity(), Err(Unclear::Diamond(0)));
        let boxes = Disjunct {
            boxes: vec![lits(&[Literal::pos("p")]), lits(&[Literal::neg("p")])],
            ..Disjunct::default()
        };
        assert_eq!(boxes.clarity(), Err(Unclear::NoBoxChoice));
        let empty_box = Disjunct::boxed(Literals::new());
        assert_eq!(empty_box.clarity(), Err(Unclear::NoBoxChoice));
        assert!(
            to_dnf(&f("~p & B p & D(p & B p)"))
                .unwrap()
                .is_clear()
                .clear
        );
    }

    #[test]
    fn canonical_counts() {
        let p: BTreeSet<Atom> = [Atom::from("p")].into();
        let pq: BTreeSet<Atom> = [Atom::from("p"), Atom::from("q")].into();
        assert_eq!(enumerate_canonical(&p, FrameClass::K45).unwrap().len(), 8);
        assert_eq!(enumerate_canonical(&p, FrameClass::KD45).unwrap().len(), 6);
        assert_eq!(
            enumerate_canonical(&BTreeSet::new(), FrameClass::K45)
                .unwrap()
                .len(),
            2
        );
        assert_eq!(enumerate_canonical(&pq, FrameClass::K45).unwrap().len(), 64);
        assert_eq!(
            enumerate_canonical(&pq, FrameClass::KD45).unwrap().len(),
            60
        );
        assert!(matches!(
            enumerate_canonical(&p, FrameClass::S5),
            Err(Error::UnsupportedClass(_))
        ));
    }

    #[test]
    fn canonical_renderings_are_in_class_and_distinct() {
        let p: BTreeSet<Atom> = [Atom::from("p")].into();
        let a = Agent::from("a");
        let all = enumerate_canonical(&p, FrameClass::K45).unwrap();
        for (i, x) in all.iter().enumerate() {
            let rx = x.render(&a);
            assert!(check_frame_class(&rx.model, FrameClass::K45).holds);
            for y in &all[i + 1..] {
                assert!(!bisimilar(&rx, &y.render(&a)).unwrap());
            }
        }
    }

    #[test]
    fn decisions() {
        let v = CheckMode::Valid;
        assert!(
            decide_single_agent(&f("~B p -> [ann B p] B p"), FrameClass::K45, v)
                .unwrap()
                .holds
        );
        assert!(
            decide_single_agent(
                &f("~(p | B p) -> [ann p | B p](p | B p)"),
                FrameClass::K45,
                v
            )
            .unwrap()
            .holds
        );
        assert!(
            !decide_single_agent(&f("p & ~p"), FrameClass::KD45, CheckMode::Satisfiable)
                .unwrap()
                .holds
        );
        let phi5 = "(B false | p & D p & D ~p | ~p & D p & B p)";
        let d = decide_single_agent(
            &f(&format!("{phi5} -> [ann {phi5}] {phi5}")),
            FrameClass::KD45,
            v,
        )
        .unwrap();
        assert!(!d.holds);
        let w = d.witness.unwrap();
        assert_eq!(w.to_string(), "<p | {~p, p}>");
    }

    #[test]
    fn sigma_validity() {
        let s = |x: &str| Sigma::parse(x).unwrap();
        assert!(
            sigma_valid_single_agent(&f("p | B p"), &s("0111"), FrameClass::K45, false).unwrap()
        );
        assert!(sigma_valid_single_agent(&f("B p"), &s("01"), FrameClass::KD45, true).unwrap());
        assert!(
            !sigma_satisfiable_single_agent(&f("B p"), &s("01"), FrameClass::KD45, true).unwrap()
        );
    }

    #[test]
    fn bounded_falsification() {
        let check = f("B p -> B B p");
        let a = [Agent::from("a")];
        let cex = falsify_bounded(&check, FrameClass::K, &a, 3)
            .unwrap()
            .unwrap();
        assert_eq!(cex.model.len(), 2);
        assert!(!eval(&cex, &check).unwrap());
        assert!(falsify_bounded(&Formula::Top, FrameClass::KD45, &a, 3)
            .unwrap()
            .is_none());
        assert!(
            falsify_bounded(&f("p -> [ann p] p"), FrameClass::KD45, &a, 3)
                .unwrap()
                .is_none()
        );
    }
}
