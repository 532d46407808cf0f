#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use epl::{Agent, Formula, FrameClass, KripkeModel, PointedModel};

pub use rand::SeedableRng;
pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn agents(n: usize) -> Vec<Agent> {
    ["a", "b", "c"][..n]
        .iter()
        .map(|&s| Agent::from(s))
        .collect()
}

/// Random formula of modal and connective depth at most `depth`.
pub fn formula(rng: &mut TestRng, depth: usize, atoms: &[&str], agents: &[Agent]) -> Formula {
    if depth == 0 || rng.gen_ratio(1, 4) {
        return match rng.gen_range(0..10) {
            0 => Formula::Top,
            1 => Formula::Bottom,
            _ => Formula::atom(*atoms.choose(rng).unwrap()),
        };
    }
    let sub = |rng: &mut TestRng| formula(rng, depth - 1, atoms, agents);
    match rng.gen_range(0..6) {
        0 => Formula::not(sub(rng)),
        1 => Formula::and(sub(rng), sub(rng)),
        2 => Formula::or(sub(rng), sub(rng)),
        3 => Formula::implies(sub(rng), sub(rng)),
        4 => Formula::boxed(agents.choose(rng).unwrap().clone(), sub(rng)),
        _ => Formula::diamond(agents.choose(rng).unwrap().clone(), sub(rng)),
    }
}

fn state_ids(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("w{i}")).collect()
}

fn valuate(rng: &mut TestRng, m: &mut KripkeModel, atoms: &[&str]) {
    for s in 0..m.len() {
        for &p in atoms {
            m.set_atom(s, p, rng.gen_bool(0.5));
        }
    }
}

/// Arbitrary relations, every pair with probability `density`.
pub fn model(
    rng: &mut TestRng,
    max_states: usize,
    atoms: &[&str],
    agents: &[Agent],
    density: f64,
) -> PointedModel {
    let n = rng.gen_range(1..=max_states);
    let mut m = KripkeModel::new(agents.to_vec(), state_ids(n)).unwrap();
    for a in 0..agents.len() {
        for s in 0..n {
            for t in 0..n {
                if rng.gen_bool(density) {
                    m.add_edge(a, s, t);
                }
            }
        }
    }
    valuate(rng, &mut m, atoms);
    let point = rng.gen_range(0..n);
    PointedModel::new(m, point).unwrap()
}

/// Relations drawn from `class` (K45, KD45 or S5; K falls back to `model`).
/// In K45 each state sees nothing or all of one cluster, and cluster
/// members see exactly their cluster.
pub fn model_in(
    rng: &mut TestRng,
    max_states: usize,
    atoms: &[&str],
    agents: &[Agent],
    class: FrameClass,
) -> PointedModel {
    if class == FrameClass::K {
        return model(rng, max_states, atoms, agents, 0.35);
    }
    let n = rng.gen_range(1..=max_states);
    let mut m = KripkeModel::new(agents.to_vec(), state_ids(n)).unwrap();
    for a in 0..agents.len() {
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);
        // cluster label per state; None for states outside every cluster
        let mut label = vec![None; n];
        let mut clusters = 0;
        for &s in &order {
            let joins = class == FrameClass::S5 || rng.gen_bool(0.6);
            if joins {
                let c = if clusters > 0 && rng.gen_bool(0.5) {
                    rng.gen_range(0..clusters)
                } else {
                    clusters += 1;
                    clusters - 1
                };
                label[s] = Some(c);
            }
        }
        for s in 0..n {
            let target = match label[s] {
                Some(c) => Some(c),
                None if clusters == 0 => None,
                None if class == FrameClass::K45 && rng.gen_bool(0.2) => None,
                None => Some(rng.gen_range(0..clusters)),
            };
            match target {
                Some(c) => {
                    let succ = (0..n).filter(|&t| label[t] == Some(c)).collect();
                    m.set_successors(a, s, succ);
                }
                None if class == FrameClass::K45 => {}
                // serial classes need a successor; a self-loop is its own cluster
                None => m.set_successors(a, s, vec![s]),
            }
        }
    }
    valuate(rng, &mut m, atoms);
    let point = rng.gen_range(0..n);
    let pm = PointedModel::new(m, point).unwrap();
    assert!(pm.model.satisfies_class(class), "generator left {class}");
    pm
}
