//! Model checking and the announcement updates.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::actionmodel::product_raw;
use crate::error::{Error, Result};
use crate::formula::{build_sigma_check, AgentSet, CheckMode, Formula, Sigma};
use crate::kripke::{KripkeModel, PointedModel};

fn check_agents(m: &KripkeModel, f: &Formula) -> Result<()> {
    for a in f.agents() {
        m.agent_index(&a)?;
    }
    Ok(())
}

pub fn eval(pm: &PointedModel, f: &Formula) -> Result<bool> {
    Ok(truth_set(&pm.model, f)?[pm.point])
}

/// `⟦f⟧` as a membership vector over the model's states.
pub fn truth_set(m: &KripkeModel, f: &Formula) -> Result<Vec<bool>> {
    check_agents(m, f)?;
    ext(m, f)
}

fn ext(m: &KripkeModel, f: &Formula) -> Result<Vec<bool>> {
    let n = m.len();
    Ok(match f {
        Formula::Top => vec![true; n],
        Formula::Bottom => vec![false; n],
        Formula::Atom(p) => (0..n).map(|s| m.holds(s, p)).collect(),
        Formula::Not(g) => ext(m, g)?.into_iter().map(|b| !b).collect(),
        Formula::And(a, b) => {
            let x = ext(m, a)?;
            let y = ext(m, b)?;
            x.into_iter().zip(y).map(|(u, v)| u && v).collect()
        }
        Formula::Box(agent, g) => {
            let a = m.agent_index(agent)?;
            let inner = ext(m, g)?;
            (0..n)
                .map(|s| m.succ(a, s).iter().all(|&t| inner[t]))
                .collect()
        }
        Formula::Announce(ann, body) => {
            let keep = ext(m, ann)?;
            ext(&restrict_arrows(m, &keep), body)?
        }
        Formula::CommonBelief(group, g) => common_belief(m, group, &ext(m, g)?)?,
        Formula::ActionBox(pa, g) => {
            let product = product_raw(m, pa)?;
            let inner = ext(&product.model, g)?;
            (0..n)
                .map(|s| match product.index_of(s, pa.point) {
                    Some(i) => inner[i],
                    None => true,
                })
                .collect()
        }
    })
}

// States from which every path of length >= 1 along group arrows stays in `holds`.
fn common_belief(m: &KripkeModel, group: &AgentSet, holds: &[bool]) -> Result<Vec<bool>> {
    let n = m.len();
    let agents = group
        .iter()
        .map(|a| m.agent_index(a))
        .collect::<Result<Vec<_>>>()?;
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &a in &agents {
        for (s, t) in m.pairs(a) {
            preds[t].push(s);
        }
    }
    // `bad[s]`: some nonempty path from s reaches a state outside `holds`.
    let mut bad = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    for t in (0..n).filter(|&t| !holds[t]) {
        stack.extend(&preds[t]);
    }
    while let Some(s) = stack.pop() {
        if !bad[s] {
            bad[s] = true;
            stack.extend(&preds[s]);
        }
    }
    Ok(bad.into_iter().map(|b| !b).collect())
}

fn restrict_arrows(m: &KripkeModel, keep: &[bool]) -> KripkeModel {
    let mut out = m.clone();
    for a in 0..m.agents().len() {
        for s in 0..m.len() {
            let succ = m.succ(a, s).iter().copied().filter(|&t| keep[t]).collect();
            out.set_successors(a, s, succ);
        }
    }
    out
}

/// Arrow elimination: every agent keeps only arrows into `⟦f⟧`.
pub fn believed_update(m: &KripkeModel, f: &Formula) -> Result<KripkeModel> {
    let keep = truth_set(m, f)?;
    Ok(restrict_arrows(m, &keep))
}

pub fn believed_update_pointed(pm: &PointedModel, f: &Formula) -> Result<PointedModel> {
    Ok(PointedModel {
        model: believed_update(&pm.model, f)?,
        point: pm.point,
    })
}

/// State elimination; defined only when `f` holds at the point.
pub fn truthful_update(pm: &PointedModel, f: &Formula) -> Result<PointedModel> {
    let keep = truth_set(&pm.model, f)?;
    if !keep[pm.point] {
        return Err(Error::AnnouncementFalseAtPoint);
    }
    let states: Vec<usize> = (0..pm.model.len()).filter(|&s| keep[s]).collect();
    let (model, map) = pm.model.restrict(&states);
    Ok(PointedModel {
        model,
        point: map[pm.point].expect("point survives"),
    })
}

/// Truthfully announces whichever of `f` and `¬f` holds at the point.
pub fn announce_whether(pm: &PointedModel, f: &Formula) -> Result<PointedModel> {
    if eval(pm, f)? {
        truthful_update(pm, f)
    } else {
        truthful_update(pm, &Formula::not(f.clone()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TraceStyle {
    /// Announce the traced formula itself, believed semantics.
    Believed,
    /// Truthfully announce the given formula; fails once it is false at the point.
    Truthful(Formula),
    /// Announce whether the given formula holds.
    TruthfulWhether(Formula),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceReport {
    pub bits: Vec<bool>,
    pub fixpoint_index: Option<usize>,
    pub final_model: PointedModel,
}

impl TraceReport {
    pub fn bit_string(&self) -> String {
        Sigma::new(self.bits.clone()).to_string()
    }
}

/// Bit `k` is the truth of `f` at the point after `k` updates.
pub fn sigma_trace(
    pm: &PointedModel,
    f: &Formula,
    steps: usize,
    style: &TraceStyle,
) -> Result<TraceReport> {
    if steps == 0 {
        return Err(Error::ParamOutOfRange(
            "trace needs at least one step".into(),
        ));
    }
    check_agents(&pm.model, f)?;
    let mut cur = pm.clone();
    let mut bits = Vec::with_capacity(steps);
    let mut fixpoint_index = None;
    for k in 0..steps {
        bits.push(eval(&cur, f)?);
        if fixpoint_index.is_some() {
            continue;
        }
        let last = k + 1 == steps;
        let next = match style {
            TraceStyle::Believed => believed_update_pointed(&cur, f)?,
            TraceStyle::Truthful(g) => match truthful_update(&cur, g) {
                Ok(next) => next,
                Err(Error::AnnouncementFalseAtPoint) if last => break,
                Err(e) => return Err(e),
            },
            TraceStyle::TruthfulWhether(g) => announce_whether(&cur, g)?,
        };
        let unchanged = match style {
            TraceStyle::Believed => next.model.same_relations(&cur.model),
            _ => next.model.len() == cur.model.len(),
        };
        if unchanged {
            fixpoint_index = Some(k);
        } else if !last {
            cur = next;
        }
    }
    Ok(TraceReport {
        bits,
        fixpoint_index,
        final_model: cur,
    })
}

/// Iterates the believed update of `f` until the relation stops changing.
/// Returns the number of effective updates and the stable model.
pub fn iterate_until_fixpoint(pm: &PointedModel, f: &Formula) -> Result<(usize, PointedModel)> {
    let mut cur = pm.clone();
    let mut k = 0;
    loop {
        let next = believed_update_pointed(&cur, f)?;
        if next.model.same_relations(&cur.model) {
            return Ok((k, cur));
        }
        cur = next;
        k += 1;
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelClassification {
    /// Keyed by the two-bit strings 00, 01, 10, 11.
    pub satisfied: BTreeMap<String, bool>,
    /// Same, with `◇_A f` conjoined for all agents of the model.
    pub believable: BTreeMap<String, bool>,
}

pub fn classify_on_model(pm: &PointedModel, f: &Formula) -> Result<ModelClassification> {
    let agents: AgentSet = pm.model.agents().iter().cloned().collect();
    let mut satisfied = BTreeMap::new();
    let mut believable = BTreeMap::new();
    for sigma in Sigma::all_of_length(2) {
        let plain = build_sigma_check(f, &sigma, CheckMode::Satisfiable, false, &agents)?;
        let bel = build_sigma_check(f, &sigma, CheckMode::Satisfiable, true, &agents)?;
        satisfied.insert(sigma.to_string(), eval(pm, &plain)?);
        believable.insert(sigma.to_string(), eval(pm, &bel)?);
    }
    Ok(ModelClassification {
        satisfied,
        believable,
    })
}
