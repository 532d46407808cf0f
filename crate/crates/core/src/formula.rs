//! Formula syntax tree, derived connectives and the announcement-elimination
//! rewriting.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::actionmodel::PointedActionModel;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Agent(String);

impl Agent {
    pub fn new(name: impl Into<String>) -> Self {
        Agent(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Agent {
    fn from(s: &str) -> Self {
        Agent(s.to_string())
    }
}

impl From<String> for Agent {
    fn from(s: String) -> Self {
        Agent(s)
    }
}

impl fmt::Display for Agent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Atom(String);

impl Atom {
    pub fn new(name: impl Into<String>) -> Self {
        Atom(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Atom {
    fn from(s: &str) -> Self {
        Atom(s.to_string())
    }
}

impl From<String> for Atom {
    fn from(s: String) -> Self {
        Atom(s)
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub type AgentSet = BTreeSet<Agent>;

/// Only the primitive connectives are stored. `or`, `implies`, `iff` and
/// `diamond` build their usual expansions; the printer folds them back.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Top,
    Bottom,
    Atom(Atom),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Box(Agent, Box<Formula>),
    /// `[φ]ψ`, believed announcement.
    Announce(Box<Formula>, Box<Formula>),
    CommonBelief(AgentSet, Box<Formula>),
    ActionBox(Arc<PointedActionModel>, Box<Formula>),
}

impl Formula {
    pub fn atom(name: impl Into<String>) -> Formula {
        Formula::Atom(Atom::new(name))
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    /// Negation that cancels an outer negation instead of stacking a second one.
    pub fn negate(f: Formula) -> Formula {
        match f {
            Formula::Not(g) => *g,
            g => Formula::not(g),
        }
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::not(Formula::and(Formula::not(a), Formula::not(b)))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::not(Formula::and(a, Formula::not(b)))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::and(
            Formula::implies(a.clone(), b.clone()),
            Formula::implies(b, a),
        )
    }

    pub fn boxed(agent: impl Into<Agent>, f: Formula) -> Formula {
        Formula::Box(agent.into(), Box::new(f))
    }

    pub fn diamond(agent: impl Into<Agent>, f: Formula) -> Formula {
        Formula::not(Formula::boxed(agent, Formula::not(f)))
    }

    pub fn announce(ann: Formula, body: Formula) -> Formula {
        Formula::Announce(Box::new(ann), Box::new(body))
    }

    pub fn common(group: AgentSet, f: Formula) -> Formula {
        Formula::CommonBelief(group, Box::new(f))
    }

    pub fn action(pa: Arc<PointedActionModel>, f: Formula) -> Formula {
        Formula::ActionBox(pa, Box::new(f))
    }

    /// Left-nested conjunction; the empty conjunction is `true`.
    pub fn conj<I: IntoIterator<Item = Formula>>(items: I) -> Formula {
        let mut it = items.into_iter();
        match it.next() {
            None => Formula::Top,
            Some(first) => it.fold(first, Formula::and),
        }
    }

    /// Left-nested disjunction; the empty disjunction is `false`.
    pub fn disj<I: IntoIterator<Item = Formula>>(items: I) -> Formula {
        let mut it = items.into_iter();
        match it.next() {
            None => Formula::Bottom,
            Some(first) => it.fold(first, Formula::or),
        }
    }

    pub fn shared_box<'a, I: IntoIterator<Item = &'a Agent>>(agents: I, f: &Formula) -> Formula {
        Formula::conj(
            agents
                .into_iter()
                .map(|a| Formula::boxed(a.clone(), f.clone())),
        )
    }

    /// `◇_A φ`: every agent in `agents` considers `φ` possible.
    pub fn believable<'a, I: IntoIterator<Item = &'a Agent>>(agents: I, f: &Formula) -> Formula {
        Formula::conj(
            agents
                .into_iter()
                .map(|a| Formula::diamond(a.clone(), f.clone())),
        )
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<Atom>) {
        match self {
            Formula::Top | Formula::Bottom => {}
            Formula::Atom(p) => {
                out.insert(p.clone());
            }
            Formula::Not(g) | Formula::Box(_, g) | Formula::CommonBelief(_, g) => {
                g.collect_atoms(out)
            }
            Formula::And(a, b) | Formula::Announce(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
            Formula::ActionBox(pa, g) => {
                for f in pa.model.formulas() {
                    f.collect_atoms(out);
                }
                for p in pa.model.assigned_atoms() {
                    out.insert(p);
                }
                g.collect_atoms(out);
            }
        }
    }

    /// Agents mentioned anywhere, including inside action models.
    pub fn agents(&self) -> AgentSet {
        let mut out = BTreeSet::new();
        self.collect_agents(&mut out);
        out
    }

    fn collect_agents(&self, out: &mut AgentSet) {
        match self {
            Formula::Top | Formula::Bottom | Formula::Atom(_) => {}
            Formula::Not(g) => g.collect_agents(out),
            Formula::Box(a, g) => {
                out.insert(a.clone());
                g.collect_agents(out);
            }
            Formula::CommonBelief(group, g) => {
                out.extend(group.iter().cloned());
                g.collect_agents(out);
            }
            Formula::And(a, b) | Formula::Announce(a, b) => {
                a.collect_agents(out);
                b.collect_agents(out);
            }
            Formula::ActionBox(pa, g) => {
                out.extend(pa.model.agents().iter().cloned());
                for f in pa.model.formulas() {
                    f.collect_agents(out);
                }
                g.collect_agents(out);
            }
        }
    }

    pub fn has_common_belief(&self) -> bool {
        match self {
            Formula::CommonBelief(..) => true,
            Formula::Top | Formula::Bottom | Formula::Atom(_) => false,
            Formula::Not(g) | Formula::Box(_, g) => g.has_common_belief(),
            Formula::And(a, b) | Formula::Announce(a, b) => {
                a.has_common_belief() || b.has_common_belief()
            }
            Formula::ActionBox(pa, g) => {
                g.has_common_belief() || pa.model.formulas().any(|f| f.has_common_belief())
            }
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Formula::Top | Formula::Bottom | Formula::Atom(_) => 1,
            Formula::Not(g)
            | Formula::Box(_, g)
            | Formula::CommonBelief(_, g)
            | Formula::ActionBox(_, g) => 1 + g.size(),
            Formula::And(a, b) | Formula::Announce(a, b) => 1 + a.size() + b.size(),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::parser::print_formula(self))
    }
}

/// Nesting depth of boxes; common belief counts as one level.
pub fn modal_depth(f: &Formula) -> Result<usize> {
    Ok(match f {
        Formula::Top | Formula::Bottom | Formula::Atom(_) => 0,
        Formula::Not(g) => modal_depth(g)?,
        Formula::And(a, b) => modal_depth(a)?.max(modal_depth(b)?),
        Formula::Box(_, g) | Formula::CommonBelief(_, g) => 1 + modal_depth(g)?,
        Formula::Announce(..) | Formula::ActionBox(..) => {
            return Err(Error::UntranslatedDynamicOperator)
        }
    })
}

/// Removes every announcement using the reduction axioms. Announcing `true`
/// is the identity and is dropped outright.
pub fn translate(f: &Formula) -> Result<Formula> {
    Ok(match f {
        Formula::Top | Formula::Bottom | Formula::Atom(_) => f.clone(),
        Formula::Not(g) => Formula::not(translate(g)?),
        Formula::And(a, b) => Formula::and(translate(a)?, translate(b)?),
        Formula::Box(ag, g) => Formula::boxed(ag.clone(), translate(g)?),
        Formula::CommonBelief(group, g) => Formula::common(group.clone(), translate(g)?),
        Formula::Announce(ann, body) => {
            let ann = translate(ann)?;
            let body = translate(body)?;
            push_announcement(&ann, &body)?
        }
        Formula::ActionBox(..) => return Err(Error::UnsupportedOperator("action modality")),
    })
}

// `[ann]body` for announcement-free `ann` and `body`.
fn push_announcement(ann: &Formula, body: &Formula) -> Result<Formula> {
    if *ann == Formula::Top {
        return Ok(body.clone());
    }
    Ok(match body {
        Formula::Top | Formula::Bottom | Formula::Atom(_) => body.clone(),
        Formula::Not(g) => Formula::not(push_announcement(ann, g)?),
        Formula::And(a, b) => Formula::and(push_announcement(ann, a)?, push_announcement(ann, b)?),
        Formula::Box(ag, g) => Formula::boxed(
            ag.clone(),
            Formula::implies(ann.clone(), push_announcement(ann, g)?),
        ),
        Formula::CommonBelief(..) => return Err(Error::UnsupportedNesting),
        Formula::Announce(..) => unreachable!("inner announcements are translated first"),
        Formula::ActionBox(..) => return Err(Error::UnsupportedOperator("action modality")),
    })
}

/// Bottom-up absorption of `true`/`false` and double negation.
pub fn simplify(f: &Formula) -> Formula {
    match f {
        Formula::Top | Formula::Bottom | Formula::Atom(_) => f.clone(),
        Formula::Not(g) => match simplify(g) {
            Formula::Top => Formula::Bottom,
            Formula::Bottom => Formula::Top,
            Formula::Not(h) => *h,
            h => Formula::not(h),
        },
        Formula::And(a, b) => match (simplify(a), simplify(b)) {
            (Formula::Bottom, _) | (_, Formula::Bottom) => Formula::Bottom,
            (Formula::Top, h) | (h, Formula::Top) => h,
            (x, y) => Formula::and(x, y),
        },
        Formula::Box(ag, g) => match simplify(g) {
            Formula::Top => Formula::Top,
            h => Formula::boxed(ag.clone(), h),
        },
        Formula::Announce(a, b) => match (simplify(a), simplify(b)) {
            (Formula::Top, h) => h,
            (_, Formula::Top) => Formula::Top,
            (x, y) => Formula::announce(x, y),
        },
        Formula::CommonBelief(group, g) => match simplify(g) {
            Formula::Top => Formula::Top,
            h => Formula::common(group.clone(), h),
        },
        Formula::ActionBox(pa, g) => match simplify(g) {
            Formula::Top => Formula::Top,
            h => Formula::action(pa.clone(), h),
        },
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Sigma(Vec<bool>);

impl Sigma {
    pub fn new(bits: Vec<bool>) -> Self {
        Sigma(bits)
    }

    pub fn parse(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::InvalidSigma(s.to_string())),
            })
            .collect::<Result<Vec<_>>>()
            .map(Sigma)
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `σ_k(φ)` for 1-based `k`.
    pub fn apply(&self, k: usize, f: &Formula) -> Formula {
        if self.0[k - 1] {
            f.clone()
        } else {
            Formula::negate(f.clone())
        }
    }

    pub fn prefix(&self, len: usize) -> Sigma {
        Sigma(self.0[..len].to_vec())
    }

    /// All strings of length `len` in lexicographic order.
    pub fn all_of_length(len: usize) -> Vec<Sigma> {
        (0..1u64 << len)
            .map(|code| Sigma((0..len).map(|i| code >> (len - 1 - i) & 1 == 1).collect()))
            .collect()
    }
}

impl TryFrom<String> for Sigma {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        Sigma::parse(&s)
    }
}

impl From<Sigma> for String {
    fn from(s: Sigma) -> String {
        s.to_string()
    }
}

impl fmt::Display for Sigma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl std::str::FromStr for Sigma {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Sigma::parse(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckMode {
    Satisfiable,
    Valid,
}

/// Builds `σ_1(φ) ∧ [φ]τ_2(φ)` (satisfiable) or `σ_1(φ) → [φ]τ_2(φ)` (valid),
/// where `τ_k = σ_k(φ) ∧ [φ]τ_{k+1}` and `τ_n = σ_n(φ)`. The believable variant
/// adds `◇_A φ` next to `σ_1(φ)` and to every intermediate `τ_k`.
pub fn build_sigma_check(
    f: &Formula,
    sigma: &Sigma,
    mode: CheckMode,
    believable: bool,
    agents: &AgentSet,
) -> Result<Formula> {
    let n = sigma.len();
    if n < 2 {
        return Err(Error::SigmaTooShort(n));
    }
    let dia = Formula::believable(agents, f);
    let mut tau = sigma.apply(n, f);
    for k in (2..n).rev() {
        let mut head = sigma.apply(k, f);
        if believable {
            head = Formula::and(head, dia.clone());
        }
        tau = Formula::and(head, Formula::announce(f.clone(), tau));
    }
    let mut antecedent = sigma.apply(1, f);
    if believable {
        antecedent = Formula::and(antecedent, dia);
    }
    let tail = Formula::announce(f.clone(), tau);
    Ok(match mode {
        CheckMode::Satisfiable => Formula::and(antecedent, tail),
        CheckMode::Valid => Formula::implies(antecedent, tail),
    })
}

/// Formulas serialize as their printed text.
impl Serialize for Formula {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&crate::parser::print_formula(self))
    }
}

impl<'de> Deserialize<'de> for Formula {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        crate::parser::parse_formula(&text).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_formula;

    fn p() -> Formula {
        Formula::atom("p")
    }

    #[test]
    fn depth_examples() {
        assert_eq!(modal_depth(&p()).unwrap(), 0);
        assert_eq!(
            modal_depth(&Formula::or(Formula::boxed("a", p()), p())).unwrap(),
            1
        );
        let f = parse_formula("~D{b}(B{a} p | B{a} ~p)").unwrap();
        assert_eq!(modal_depth(&f).unwrap(), 2);
        let g = Formula::common(AgentSet::from([Agent::from("a")]), Formula::boxed("a", p()));
        assert_eq!(modal_depth(&g).unwrap(), 2);
        assert_eq!(
            modal_depth(&Formula::announce(p(), p())),
            Err(Error::UntranslatedDynamicOperator)
        );
    }

    #[test]
    fn translate_box_clause() {
        let f = Formula::announce(p(), Formula::boxed("a", p()));
        assert_eq!(
            translate(&f).unwrap(),
            Formula::boxed("a", Formula::implies(p(), p()))
        );
        let top = Formula::announce(Formula::Top, Formula::boxed("a", p()));
        assert_eq!(translate(&top).unwrap(), Formula::boxed("a", p()));
    }

    #[test]
    fn translate_refuses_common_under_announcement() {
        let group = AgentSet::from([Agent::from("a")]);
        let f = Formula::announce(p(), Formula::common(group.clone(), p()));
        assert_eq!(translate(&f), Err(Error::UnsupportedNesting));
        // common belief outside an announcement is fine
        let g = Formula::common(group, Formula::announce(p(), p()));
        assert!(translate(&g).is_ok());
    }

    #[test]
    fn sigma_check_shapes() {
        let phi = p();
        let none = AgentSet::new();
        let s01 = Sigma::parse("01").unwrap();
        let got = build_sigma_check(&phi, &s01, CheckMode::Valid, false, &none).unwrap();
        assert_eq!(got, parse_formula("~p -> [ann p] p").unwrap());

        let s001 = Sigma::parse("001").unwrap();
        let got = build_sigma_check(&phi, &s001, CheckMode::Valid, false, &none).unwrap();
        assert_eq!(got, parse_formula("~p -> [ann p](~p & [ann p] p)").unwrap());

        let s11 = Sigma::parse("11").unwrap();
        let a = AgentSet::from([Agent::from("a")]);
        let got = build_sigma_check(&phi, &s11, CheckMode::Satisfiable, true, &a).unwrap();
        assert_eq!(got, parse_formula("p & D{a} p & [ann p] p").unwrap());

        let s1 = Sigma::parse("1").unwrap();
        assert_eq!(
            build_sigma_check(&phi, &s1, CheckMode::Valid, false, &none),
            Err(Error::SigmaTooShort(1))
        );
    }

    #[test]
    fn believable_interleaves_intermediate_taus() {
        let a = AgentSet::from([Agent::from("a")]);
        let s = Sigma::parse("011").unwrap();
        let got = build_sigma_check(&p(), &s, CheckMode::Valid, true, &a).unwrap();
        let want = parse_formula("~p & D{a} p -> [ann p](p & D{a} p & [ann p] p)").unwrap();
        assert_eq!(got, want);
    }

    #[test]
    fn sigma_negation_does_not_stack() {
        let s = Sigma::parse("00").unwrap();
        let np = Formula::not(p());
        assert_eq!(s.apply(1, &np), p());
        assert_eq!(s.apply(2, &p()), np);
    }

    #[test]
    fn sigma_enumeration_order() {
        let all: Vec<String> = Sigma::all_of_length(2)
            .iter()
            .map(|s| s.to_string())
            .collect();
        assert_eq!(all, ["00", "01", "10", "11"]);
        assert!(Sigma::parse("012").is_err());
    }

    #[test]
    fn simplify_absorbs_constants() {
        let f = Formula::and(Formula::Top, Formula::not(Formula::not(p())));
        assert_eq!(simplify(&f), p());
        let g = Formula::or(Formula::Bottom, Formula::boxed("a", Formula::Top));
        assert_eq!(simplify(&g), Formula::Top);
    }
}
