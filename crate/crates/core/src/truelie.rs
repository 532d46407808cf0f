//! Disjunctive lying forms and the classification of formulas by which
//! announcement outcomes they guarantee.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formula::{simplify, Formula, Sigma};
use crate::kripke::FrameClass;
use crate::normalform::{
    conj_disjuncts, sigma_satisfiable_single_agent, sigma_valid_single_agent, single_agent, to_dnf,
    Disjunct, DnfFormula, Literals,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DlfWitness {
    /// Indices into the disjuncts of the searched DNF.
    pub s: Vec<usize>,
    pub t: Vec<usize>,
    /// For each member of `t`, the index of its chosen box conjunct.
    pub beta_choice: BTreeMap<usize, usize>,
    pub chi: Formula,
}

fn alpha_and(sigma: &Disjunct, lits: &Literals) -> Formula {
    let mut all = sigma.alpha.clone();
    all.extend(lits.iter().cloned());
    Formula::conj(all.iter().map(|l| l.to_formula()))
}

// ⋁_{σ∈S} ◇(σ^α ∧ γ)
fn some_s_sees(phi: &DnfFormula, s: &[usize], gamma: &Literals) -> Formula {
    Formula::disj(
        s.iter()
            .map(|&i| Formula::diamond(phi.agent.clone(), alpha_and(&phi.disjuncts[i], gamma))),
    )
}

fn t_of(phi: &DnfFormula, s: &[usize], theta: &Disjunct) -> Formula {
    let dias = theta.diamonds.iter().map(|g| some_s_sees(phi, s, g));
    Formula::and(theta.alpha_formula(), Formula::conj(dias))
}

fn chi1(phi: &DnfFormula, s: &[usize], t: &[usize]) -> Formula {
    Formula::conj(phi.disjuncts.iter().enumerate().map(|(i, theta)| {
        let body = t_of(phi, s, theta);
        if t.contains(&i) {
            body
        } else {
            Formula::not(body)
        }
    }))
}

fn chi2(phi: &DnfFormula, s: &[usize]) -> Formula {
    Formula::conj(phi.disjuncts.iter().enumerate().map(|(i, sigma)| {
        let modal = sigma.modal_formula(&phi.agent);
        if s.contains(&i) {
            modal
        } else {
            Formula::not(modal)
        }
    }))
}

fn negated(beta: &Literals) -> Literals {
    beta.iter().map(|l| l.negated()).collect()
}

fn chi3(phi: &DnfFormula, s: &[usize], beta_choice: &BTreeMap<usize, usize>) -> Formula {
    Formula::conj(
        beta_choice
            .iter()
            .map(|(&theta, &b)| some_s_sees(phi, s, &negated(&phi.disjuncts[theta].boxes[b]))),
    )
}

fn check_subsets(phi: &DnfFormula, s: &[usize], t: &[usize]) -> Result<()> {
    match s.iter().chain(t).find(|&&i| i >= phi.disjuncts.len()) {
        Some(&i) => Err(Error::DisjunctOutOfRange(i)),
        None => Ok(()),
    }
}

/// `¬φ ∧ ◇φ ∧ χ1 ∧ χ2 ∧ χ3` with `⊤`/`⊥` absorbed.
pub fn build_chi(
    phi: &DnfFormula,
    s: &[usize],
    t: &[usize],
    beta_choice: &BTreeMap<usize, usize>,
) -> Result<Formula> {
    check_subsets(phi, s, t)?;
    for &theta in t {
        match beta_choice.get(&theta) {
            Some(&b) if b < phi.disjuncts[theta].boxes.len() => {}
            _ => return Err(Error::BetaChoiceIncomplete(theta)),
        }
    }
    if let Some(&extra) = beta_choice.keys().find(|k| !t.contains(k)) {
        return Err(Error::BetaChoiceIncomplete(extra));
    }
    let f = phi.to_formula();
    let chi = Formula::conj([
        Formula::not(f.clone()),
        Formula::diamond(phi.agent.clone(), f),
        chi1(phi, s, t),
        chi2(phi, s),
        chi3(phi, s, beta_choice),
    ]);
    Ok(simplify(&chi))
}

fn subsets_of_size(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

fn dnf_of(f: &Formula) -> Result<Vec<Disjunct>> {
    Ok(to_dnf(&simplify(f))?.disjuncts)
}

/// First witness in order of `|S| + |T|`, then `S`, then `T` (as sorted
/// index lists), then box choices in odometer order.
///
/// The DNF of `χ` is built as a conjunction of the DNFs of its parts,
/// so a pair `(S, T)` is dropped as soon as a partial conjunction is
/// unsatisfiable. The first hit is the same as for the full `χ`.
pub fn dlf_witness_search(phi: &DnfFormula) -> Result<Option<DlfWitness>> {
    let n = phi.disjuncts.len();
    if n > 16 {
        return Err(Error::ParamOutOfRange(format!(
            "{n} disjuncts is too many for the witness search"
        )));
    }
    let f = phi.to_formula();
    let base = dnf_of(&Formula::and(
        Formula::not(f.clone()),
        Formula::diamond(phi.agent.clone(), f),
    ))?;
    if base.is_empty() {
        return Ok(None);
    }
    let mut with_s: HashMap<Vec<usize>, Vec<Disjunct>> = HashMap::new();
    for total in 0..=2 * n {
        let mut pairs = Vec::new();
        for ks in total.saturating_sub(n)..=total.min(n) {
            for s in subsets_of_size(n, ks) {
                for t in subsets_of_size(n, total - ks) {
                    pairs.push((s.clone(), t));
                }
            }
        }
        pairs.sort();
        for (s, t) in pairs {
            if t.iter().any(|&i| phi.disjuncts[i].boxes.is_empty()) {
                continue;
            }
            if !with_s.contains_key(&s) {
                let part = conj_disjuncts(&base, &dnf_of(&chi2(phi, &s))?);
                with_s.insert(s.clone(), part);
            }
            let part_s = &with_s[&s];
            if part_s.is_empty() {
                continue;
            }
            let part_st = conj_disjuncts(part_s, &dnf_of(&chi1(phi, &s, &t))?);
            if part_st.is_empty() {
                continue;
            }
            let mut digits = vec![0usize; t.len()];
            loop {
                let choice: BTreeMap<usize, usize> =
                    t.iter().copied().zip(digits.iter().copied()).collect();
                let full = conj_disjuncts(&part_st, &dnf_of(&chi3(phi, &s, &choice))?);
                if !full.is_empty() {
                    let chi = build_chi(phi, &s, &t, &choice)?;
                    return Ok(Some(DlfWitness {
                        s,
                        t,
                        beta_choice: choice,
                        chi,
                    }));
                }
                if !next_choice(&mut digits, &t, phi) {
                    break;
                }
            }
        }
    }
    Ok(None)
}

// Odometer over box indices, last position fastest.
fn next_choice(digits: &mut [usize], t: &[usize], phi: &DnfFormula) -> bool {
    for pos in (0..digits.len()).rev() {
        digits[pos] += 1;
        if digits[pos] < phi.disjuncts[t[pos]].boxes.len() {
            return true;
        }
        digits[pos] = 0;
    }
    false
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Syntactic,
    Semantic,
}

/// Whether `¬f ∧ ◇f → [f]f` is KD45-valid. Syntactically: `to_dnf(f)`
/// has no lying-form witness.
pub fn is_believable_true_lie(f: &Formula, method: Method) -> Result<bool> {
    single_agent(f)?;
    match method {
        Method::Syntactic => Ok(dlf_witness_search(&to_dnf(f)?)?.is_none()),
        Method::Semantic => {
            sigma_valid_single_agent(f, &Sigma::new(vec![false, true]), FrameClass::KD45, true)
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Validity {
    pub valid: bool,
    /// Valid and satisfiable.
    pub nontrivially_valid: bool,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidityPair {
    pub plain: Validity,
    pub believable: Validity,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidityClasses {
    /// 11
    pub successful: ValidityPair,
    /// 10
    pub self_refuting: ValidityPair,
    /// 01
    pub true_lie: ValidityPair,
    /// 00
    pub impossible_lie: ValidityPair,
}

fn validity(f: &Formula, sigma: &Sigma, c: FrameClass, believable: bool) -> Result<Validity> {
    let valid = sigma_valid_single_agent(f, sigma, c, believable)?;
    let nontrivially_valid = valid && sigma_satisfiable_single_agent(f, sigma, c, believable)?;
    Ok(Validity {
        valid,
        nontrivially_valid,
    })
}

pub fn classify_validities(f: &Formula, c: FrameClass) -> Result<ValidityClasses> {
    let pair = |bits: &str| -> Result<ValidityPair> {
        let sigma = Sigma::parse(bits)?;
        Ok(ValidityPair {
            plain: validity(f, &sigma, c, false)?,
            believable: validity(f, &sigma, c, true)?,
        })
    };
    Ok(ValidityClasses {
        successful: pair("11")?,
        self_refuting: pair("10")?,
        true_lie: pair("01")?,
        impossible_lie: pair("00")?,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidityProfile {
    /// Every σ with `2 ≤ |σ| ≤ max_len`, by length and then lexicographically.
    pub table: Vec<(Sigma, bool)>,
    /// For each valid σ that extends no other valid σ, its valid prefixes
    /// of length at least 2, shortest first.
    pub runs: Vec<Vec<Sigma>>,
}

impl ValidityProfile {
    pub fn is_valid(&self, sigma: &Sigma) -> Option<bool> {
        self.table.iter().find(|(s, _)| s == sigma).map(|(_, v)| *v)
    }

    pub fn valid(&self) -> impl Iterator<Item = &Sigma> + '_ {
        self.table.iter().filter(|(_, v)| *v).map(|(s, _)| s)
    }
}

pub const DEFAULT_PROFILE_LEN: usize = 8;

pub fn validity_profile(f: &Formula, c: FrameClass, max_len: usize) -> Result<ValidityProfile> {
    if max_len < 2 {
        return Err(Error::ParamOutOfRange(format!(
            "max_len {max_len} is below 2"
        )));
    }
    let mut table = Vec::new();
    for len in 2..=max_len {
        for sigma in Sigma::all_of_length(len) {
            let v = sigma_valid_single_agent(f, &sigma, c, false)?;
            table.push((sigma, v));
        }
    }
    let valid: Vec<&Sigma> = table.iter().filter(|(_, v)| *v).map(|(s, _)| s).collect();
    let mut runs = Vec::new();
    for s in &valid {
        let extended = valid
            .iter()
            .any(|o| o.len() > s.len() && o.prefix(s.len()) == **s);
        if !extended {
            let run = (2..=s.len())
                .map(|k| s.prefix(k))
                .filter(|p| valid.contains(&p))
                .collect();
            runs.push(run);
        }
    }
    Ok(ValidityProfile { table, runs })
}
