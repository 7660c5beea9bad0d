use std::collections::{HashMap, VecDeque};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::potentials::{add_labels, FourierPotential, FrequencyModule, Label};

/// Finite set of dual vectors `p_r` (lattice points or module points) with
/// `p_0 = 0`, closed under negation, ordered by length.
#[derive(Debug, Clone, Serialize)]
pub struct DualSet {
    pub module: FrequencyModule,
    pub cutoff: f64,
    pub labels: Vec<Label>,
    pub vectors: Vec<[f64; 2]>,
    #[serde(skip)]
    index: HashMap<Label, usize>,
}

impl DualSet {
    /// All lattice points of a periodic potential with `|p| <= cutoff`, or
    /// for a quasi-periodic potential the module points reachable from 0 in
    /// at most `hops` steps by potential frequencies, with `|p| <= cutoff`.
    pub fn build(pot: &FourierPotential, cutoff: f64, hops: usize) -> Result<Self> {
        if !(cutoff.is_finite() && cutoff >= 0.0) {
            return Err(Error::EmptyLattice { cutoff });
        }
        let module = pot.module;
        let mut labels: Vec<Label> = match module {
            FrequencyModule::Lattice { step } => {
                let m0 = (cutoff / step[0]).floor() as i64;
                let m1 = (cutoff / step[1]).floor() as i64;
                let mut v = Vec::new();
                for a in -m0..=m0 {
                    for b in -m1..=m1 {
                        let l = [a, b, 0, 0];
                        let p = module.freq(l);
                        if p[0].hypot(p[1]) <= cutoff {
                            v.push(l);
                        }
                    }
                }
                v
            }
            FrequencyModule::Quasi { .. } => {
                let mut seen: HashMap<Label, usize> = HashMap::new();
                let mut queue = VecDeque::new();
                seen.insert([0; 4], 0);
                queue.push_back([0; 4]);
                while let Some(l) = queue.pop_front() {
                    let depth = seen[&l];
                    if depth == hops {
                        continue;
                    }
                    for m in &pot.modes {
                        let next = add_labels(l, m.label);
                        let p = module.freq(next);
                        if p[0].hypot(p[1]) <= cutoff && !seen.contains_key(&next) {
                            seen.insert(next, depth + 1);
                            queue.push_back(next);
                        }
                    }
                }
                seen.into_keys().collect()
            }
        };
        // the module set must be closed under negation
        if matches!(module, FrequencyModule::Quasi { .. }) {
            let present: std::collections::HashSet<Label> = labels.iter().copied().collect();
            labels.retain(|l| present.contains(&[-l[0], -l[1], -l[2], -l[3]]));
        }
        let norm = |l: &Label| {
            let p = module.freq(*l);
            p[0].hypot(p[1])
        };
        labels.sort_by(|a, b| norm(a).total_cmp(&norm(b)).then(a.cmp(b)));
        debug_assert_eq!(labels.first(), Some(&[0; 4]));
        let vectors = labels.iter().map(|&l| module.freq(l)).collect();
        let index = labels.iter().enumerate().map(|(i, &l)| (l, i)).collect();
        Ok(Self { module, cutoff, labels, vectors, index })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn position(&self, label: Label) -> Option<usize> {
        self.index.get(&label).copied()
    }
}
