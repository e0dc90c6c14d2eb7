//! Exact BSC-mixture algebra for BMS channels.
//!
//! Every BMS channel admits a decomposition into a finite (or limiting)
//! mixture of binary symmetric channels, `W = Σ αⱼ BSC(pⱼ)`. Serial and
//! parallel polar transforms act atom-by-atom, so a finite mixture is closed
//! under both and can be combined exactly. This module is the brute-force
//! oracle the rest of the crate is tested against; atom counts grow
//! exponentially with combination depth, which is fine at oracle scale.

use crate::{Error, Result};

/// One mixture component: `weight · BSC(crossover)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BscAtom {
    /// Probability mass of this component, in `[0, 1]`.
    pub weight: f64,
    /// Crossover probability, canonically folded into `[0, 1/2]`.
    pub crossover: f64,
}

/// A BMS channel represented as a canonical finite BSC mixture.
///
/// Canonical form: weights sum to 1, crossovers lie in `[0, 1/2]` and are
/// strictly increasing, and no atom has zero weight.
#[derive(Clone, Debug, PartialEq)]
pub struct BscMix {
    atoms: Vec<BscAtom>,
}

/// Crossovers closer than this are merged during canonicalization.
const MERGE_TOL: f64 = 1e-14;
/// Allowed deviation of the total weight from 1.
const WEIGHT_TOL: f64 = 1e-12;

fn fold(p: f64) -> f64 {
    // BSC(p) and BSC(1-p) are the same channel up to output relabeling.
    p.min(1.0 - p)
}

impl BscMix {
    /// Builds a canonical mixture from raw `(weight, crossover)` pairs.
    pub fn from_atoms(atoms: &[(f64, f64)]) -> Result<Self> {
        let total: f64 = atoms.iter().map(|a| a.0).sum();
        if (total - 1.0).abs() > WEIGHT_TOL {
            return Err(Error::Domain(format!(
                "mixture weights sum to {total}, expected 1"
            )));
        }
        for &(w, p) in atoms {
            if !(0.0..=1.0).contains(&w) || !(0.0..=1.0).contains(&p) {
                return Err(Error::Domain(format!(
                    "atom ({w}, {p}) outside the unit square"
                )));
            }
        }
        Ok(canonicalize(atoms.iter().map(|&(w, p)| BscAtom {
            weight: w,
            crossover: p,
        })))
    }

    /// The canonical atom list, sorted by crossover.
    pub fn atoms(&self) -> &[BscAtom] {
        &self.atoms
    }
}

/// A single binary symmetric channel with crossover probability `p`.
pub fn make_bsc(p: f64) -> Result<BscMix> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("BSC crossover {p} outside [0,1]")));
    }
    Ok(canonicalize(std::iter::once(BscAtom {
        weight: 1.0,
        crossover: p,
    })))
}

/// A binary erasure channel: `BEC(ε) = (1−ε) BSC(0) + ε BSC(1/2)`.
pub fn make_bec(eps: f64) -> Result<BscMix> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::Domain(format!("BEC erasure {eps} outside [0,1]")));
    }
    Ok(canonicalize(
        [
            BscAtom {
                weight: 1.0 - eps,
                crossover: 0.0,
            },
            BscAtom {
                weight: eps,
                crossover: 0.5,
            },
        ]
        .into_iter(),
    ))
}

/// Folds crossovers into `[0, 1/2]`, merges equal atoms, drops zero weights,
/// and sorts ascending. Idempotent.
pub fn canonicalize(atoms: impl Iterator<Item = BscAtom>) -> BscMix {
    let mut work: Vec<BscAtom> = atoms
        .filter(|a| a.weight > 0.0)
        .map(|a| BscAtom {
            weight: a.weight,
            crossover: fold(a.crossover),
        })
        .collect();
    work.sort_by(|a, b| a.crossover.total_cmp(&b.crossover));
    let mut merged: Vec<BscAtom> = Vec::with_capacity(work.len());
    for atom in work {
        match merged.last_mut() {
            Some(last) if atom.crossover - last.crossover <= MERGE_TOL => {
                last.weight += atom.weight;
            }
            _ => merged.push(atom),
        }
    }
    BscMix { atoms: merged }
}

/// Serial (check-node) combination: atom-wise `p ⋆ q = p(1−q) + (1−p)q`.
pub fn serial(a: &BscMix, b: &BscMix) -> BscMix {
    let pairs = a.atoms.iter().flat_map(|x| {
        b.atoms.iter().map(move |y| {
            let (p, q) = (x.crossover, y.crossover);
            BscAtom {
                weight: x.weight * y.weight,
                crossover: p * (1.0 - q) + (1.0 - p) * q,
            }
        })
    });
    canonicalize(pairs)
}

/// Parallel (variable-node) combination: each atom pair splits into two
/// children with weights `p⋆q` and `1−p⋆q` and crossovers
/// `p(1−q)/(p⋆q)` and `pq/(1−p⋆q)`. Zero-weight children are dropped
/// before their (otherwise 0/0) crossover is formed.
pub fn parallel(a: &BscMix, b: &BscMix) -> BscMix {
    let mut children = Vec::with_capacity(2 * a.atoms.len() * b.atoms.len());
    for x in &a.atoms {
        for y in &b.atoms {
            let (p, q) = (x.crossover, y.crossover);
            let w = x.weight * y.weight;
            let star = p * (1.0 - q) + (1.0 - p) * q;
            if w * star > 0.0 {
                children.push(BscAtom {
                    weight: w * star,
                    crossover: p * (1.0 - q) / star,
                });
            }
            let co = 1.0 - star;
            if w * co > 0.0 {
                children.push(BscAtom {
                    weight: w * co,
                    crossover: p * q / co,
                });
            }
        }
    }
    canonicalize(children.into_iter())
}

/// Bhattacharyya parameter `Z(W) = Σ αⱼ · 2√(pⱼ(1−pⱼ))`.
pub fn bhattacharyya(m: &BscMix) -> f64 {
    m.atoms
        .iter()
        .map(|a| a.weight * 2.0 * (a.crossover * (1.0 - a.crossover)).sqrt())
        .sum()
}
