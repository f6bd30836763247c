//! Local realisers: families of partial linear extensions, with coverage
//! verification and multiplicity accounting. Verification is the measurement
//! instrument for every construction in this crate.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::poset::{Elem, OrderHost};

const ABSENT: u32 = u32::MAX;

/// A family of partial linear extensions over a host with ground set
/// `1..=n`. Lists are multisets: duplicated identical lists are allowed and
/// each copy counts towards multiplicity.
#[derive(Clone, Debug)]
pub struct LocalRealiser {
    n: u32,
    lists: Vec<Vec<Elem>>,
}

impl LocalRealiser {
    /// Validates ids and per-list distinctness; order validity against a
    /// host is checked by [`verify_local_realiser`].
    pub fn new(n: u32, lists: Vec<Vec<Elem>>) -> Result<LocalRealiser> {
        let mut seen = vec![0u32; n as usize];
        for (li, list) in lists.iter().enumerate() {
            if list.is_empty() {
                return Err(Error::Parameter(format!("list {li} is empty")));
            }
            for &e in list {
                if e < 1 || e > n {
                    return Err(Error::Range { id: e as u64, n });
                }
                if seen[e as usize - 1] == li as u32 + 1 {
                    return Err(Error::DuplicateElement(e));
                }
                seen[e as usize - 1] = li as u32 + 1;
            }
        }
        Ok(LocalRealiser { n, lists })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn lists(&self) -> &[Vec<Elem>] {
        &self.lists
    }

    pub fn list_count(&self) -> u32 {
        self.lists.len() as u32
    }

    /// Copy with all one-element lists removed. One-element lists cover no
    /// pair, so this never changes validity.
    pub fn without_trivial_lists(&self) -> LocalRealiser {
        LocalRealiser {
            n: self.n,
            lists: self.lists.iter().filter(|l| l.len() >= 2).cloned().collect(),
        }
    }

    /// Per-element count of lists whose ground set contains it.
    pub fn multiplicities(&self) -> Vec<u32> {
        let mut mult = vec![0u32; self.n as usize];
        for list in &self.lists {
            for &e in list {
                mult[e as usize - 1] += 1;
            }
        }
        mult
    }

    pub fn max_multiplicity(&self) -> u32 {
        self.multiplicities().into_iter().max().unwrap_or(0)
    }
}

/// Outcome of checking a realiser against its host.
#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub valid: bool,
    /// Requirements with no witnessing list, ascending.
    pub uncovered: Vec<(Elem, Elem)>,
    /// `multiplicity[id - 1]` = number of lists containing `id`.
    pub multiplicity: Vec<u32>,
    pub max_multiplicity: u32,
    pub list_count: u32,
}

/// Checks that every list is a partial linear extension of the host and
/// that every ordered pair `(x, y)` with `x != y`, `not (y <= x)` has a list
/// placing `x` before `y`. The requirement set is partitioned across worker
/// threads; the report does not depend on the partitioning.
pub fn verify_local_realiser<H: OrderHost>(
    host: &H,
    realiser: &LocalRealiser,
) -> Result<VerificationReport> {
    let n = host.size();
    if realiser.n() != n {
        return Err(Error::Parameter(format!(
            "realiser ground size {} does not match host size {n}",
            realiser.n()
        )));
    }

    // Reject any list inverting a comparable pair; report the first offender
    // in list order.
    let invalid = realiser
        .lists
        .par_iter()
        .enumerate()
        .find_map_first(|(li, list)| {
            for j in 1..list.len() {
                for i in 0..j {
                    if host.lt(list[j], list[i]) {
                        return Some(Error::InvalidList {
                            list: li,
                            below: list[j],
                            above: list[i],
                        });
                    }
                }
            }
            None
        });
    if let Some(err) = invalid {
        return Err(err);
    }

    // Element -> position table per list makes each (pair, list) probe two
    // array reads.
    let positions: Vec<Vec<u32>> = realiser
        .lists
        .par_iter()
        .map(|list| {
            let mut pos = vec![ABSENT; n as usize + 1];
            for (i, &e) in list.iter().enumerate() {
                pos[e as usize] = i as u32;
            }
            pos
        })
        .collect();

    let uncovered: Vec<(Elem, Elem)> = (1..=n)
        .into_par_iter()
        .map(|x| {
            let mut missing = Vec::new();
            for y in 1..=n {
                if y == x || host.lt(y, x) {
                    continue;
                }
                let covered = positions.iter().any(|pos| {
                    let px = pos[x as usize];
                    let py = pos[y as usize];
                    px != ABSENT && py != ABSENT && px < py
                });
                if !covered {
                    missing.push((x, y));
                }
            }
            missing
        })
        .collect::<Vec<_>>()
        .concat();

    let multiplicity = realiser.multiplicities();
    let max_multiplicity = multiplicity.iter().copied().max().unwrap_or(0);
    Ok(VerificationReport {
        valid: uncovered.is_empty(),
        uncovered,
        multiplicity,
        max_multiplicity,
        list_count: realiser.list_count(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::Poset;

    #[test]
    fn chain_single_extension() {
        let p = Poset::chain(3);
        let r = LocalRealiser::new(3, vec![vec![1, 2, 3]]).unwrap();
        let rep = verify_local_realiser(&p, &r).unwrap();
        assert!(rep.valid);
        assert_eq!(rep.max_multiplicity, 1);
        assert_eq!(rep.list_count, 1);
    }

    #[test]
    fn antichain_needs_both_directions() {
        let p = Poset::antichain(2);
        let one = LocalRealiser::new(2, vec![vec![1, 2]]).unwrap();
        let rep = verify_local_realiser(&p, &one).unwrap();
        assert!(!rep.valid);
        assert_eq!(rep.uncovered, vec![(2, 1)]);

        let both = LocalRealiser::new(2, vec![vec![1, 2], vec![2, 1]]).unwrap();
        let rep = verify_local_realiser(&p, &both).unwrap();
        assert!(rep.valid);
        assert_eq!(rep.max_multiplicity, 2);
    }

    #[test]
    fn inverted_list_is_an_error() {
        let p = Poset::chain(2);
        let r = LocalRealiser::new(2, vec![vec![2, 1]]).unwrap();
        assert!(matches!(
            verify_local_realiser(&p, &r),
            Err(Error::InvalidList { list: 0, below: 1, above: 2 })
        ));
    }

    #[test]
    fn duplicate_within_list_rejected_at_construction() {
        assert!(matches!(
            LocalRealiser::new(3, vec![vec![1, 2, 1]]),
            Err(Error::DuplicateElement(1))
        ));
        // identical duplicated lists are fine (multiset semantics)
        let r = LocalRealiser::new(2, vec![vec![1, 2], vec![1, 2]]).unwrap();
        assert_eq!(r.multiplicities(), vec![2, 2]);
    }

    #[test]
    fn dropping_singleton_lists_preserves_validity() {
        let p = Poset::antichain(2);
        let r = LocalRealiser::new(2, vec![vec![1, 2], vec![2, 1], vec![1]]).unwrap();
        let rep = verify_local_realiser(&p, &r).unwrap();
        assert!(rep.valid);
        assert_eq!(rep.multiplicity, vec![3, 2]);
        let slim = r.without_trivial_lists();
        assert_eq!(slim.list_count(), 2);
        assert!(verify_local_realiser(&p, &slim).unwrap().valid);
    }
}
