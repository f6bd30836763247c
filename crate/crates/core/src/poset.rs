//! Finite strict partial orders on the ground set `1..=n`, stored
//! transitively closed so comparability queries are O(1).

use serde::Serialize;

use crate::error::{Error, Result};

/// Element id. Ground sets are always `1..=n`; labels are display-only.
pub type Elem = u32;

/// Read access to a strict order. Implemented by [`Poset`] and by the lazy
/// [`crate::layer::LayerPoset`], so verification never forces a dense matrix.
pub trait OrderHost: Sync {
    /// Number of elements; ids run `1..=size()`.
    fn size(&self) -> u32;
    /// True iff `a` is strictly below `b`.
    fn lt(&self, a: Elem, b: Elem) -> bool;
}

/// Square bit matrix holding the strict relation.
#[derive(Clone, PartialEq, Eq)]
struct BitMatrix {
    n: usize,
    stride: usize,
    words: Vec<u64>,
}

impl BitMatrix {
    fn new(n: usize) -> Self {
        let stride = n.div_ceil(64);
        BitMatrix { n, stride, words: vec![0; n * stride] }
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> bool {
        self.words[i * self.stride + j / 64] >> (j % 64) & 1 == 1
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize) {
        self.words[i * self.stride + j / 64] |= 1 << (j % 64);
    }

    /// `row[dst] |= row[src]`; the two rows must differ.
    fn or_row(&mut self, dst: usize, src: usize) {
        debug_assert_ne!(dst, src);
        let (d, s) = (dst * self.stride, src * self.stride);
        for w in 0..self.stride {
            let v = self.words[s + w];
            self.words[d + w] |= v;
        }
    }
}

/// A finite strict order on `1..=n`, transitively closed at construction.
#[derive(Clone)]
pub struct Poset {
    n: u32,
    lt: BitMatrix,
    labels: Option<Vec<String>>,
}

impl Poset {
    /// Builds a poset from strict relations `a < b`, applying transitive
    /// closure. Rejects out-of-range ids and any relation set whose closure
    /// would make an element reach itself.
    pub fn new(n: u32, relations: &[(Elem, Elem)]) -> Result<Poset> {
        if n == 0 {
            return Err(Error::Parameter("poset must be nonempty".into()));
        }
        let mut lt = BitMatrix::new(n as usize);
        for &(a, b) in relations {
            for id in [a, b] {
                if id < 1 || id > n {
                    return Err(Error::Range { id: id as u64, n: n as u64 });
                }
            }
            if a == b {
                return Err(Error::Cycle(a));
            }
            lt.set(a as usize - 1, b as usize - 1);
        }
        // Warshall closure on the bit rows.
        for k in 0..n as usize {
            for i in 0..n as usize {
                if i != k && lt.get(i, k) {
                    lt.or_row(i, k);
                }
            }
        }
        for i in 0..n as usize {
            if lt.get(i, i) {
                return Err(Error::Cycle(i as Elem + 1));
            }
        }
        Ok(Poset { n, lt, labels: None })
    }

    /// Internal constructor for relations already transitively closed.
    pub(crate) fn from_closed(n: u32, relations: &[(Elem, Elem)]) -> Poset {
        let mut lt = BitMatrix::new(n as usize);
        for &(a, b) in relations {
            lt.set(a as usize - 1, b as usize - 1);
        }
        let p = Poset { n, lt, labels: None };
        debug_assert!(p.check_axioms());
        p
    }

    /// Elements `1..=n`, `a < b` iff `a` properly divides `b`.
    pub fn divisibility(n: u32) -> Result<Poset> {
        if n == 0 {
            return Err(Error::Parameter("divisibility poset needs n >= 1".into()));
        }
        let mut lt = BitMatrix::new(n as usize);
        for a in 1..=n as usize {
            let mut b = 2 * a;
            while b <= n as usize {
                lt.set(a - 1, b - 1);
                b += a;
            }
        }
        Ok(Poset { n, lt, labels: None })
    }

    /// The chain `1 < 2 < ... < n`.
    pub fn chain(n: u32) -> Poset {
        let mut lt = BitMatrix::new(n as usize);
        for a in 0..n as usize {
            for b in a + 1..n as usize {
                lt.set(a, b);
            }
        }
        Poset { n, lt, labels: None }
    }

    /// `n` pairwise incomparable elements.
    pub fn antichain(n: u32) -> Poset {
        Poset { n, lt: BitMatrix::new(n as usize), labels: None }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    #[inline]
    pub fn lt(&self, a: Elem, b: Elem) -> bool {
        self.lt.get(a as usize - 1, b as usize - 1)
    }

    pub fn le(&self, a: Elem, b: Elem) -> bool {
        a == b || self.lt(a, b)
    }

    pub fn set_labels(&mut self, labels: Vec<String>) {
        debug_assert_eq!(labels.len(), self.n as usize);
        self.labels = Some(labels);
    }

    pub fn label(&self, a: Elem) -> String {
        match &self.labels {
            Some(l) => l[a as usize - 1].clone(),
            None => a.to_string(),
        }
    }

    /// The order with all relations reversed.
    pub fn dual(&self) -> Poset {
        let mut lt = BitMatrix::new(self.n as usize);
        for a in 0..self.n as usize {
            for b in 0..self.n as usize {
                if self.lt.get(a, b) {
                    lt.set(b, a);
                }
            }
        }
        Poset { n: self.n, lt, labels: self.labels.clone() }
    }

    /// All strict relations `(a, b)` with `a < b`, ascending.
    pub fn relation_pairs(&self) -> Vec<(Elem, Elem)> {
        let mut out = Vec::new();
        for a in 1..=self.n {
            for b in 1..=self.n {
                if self.lt(a, b) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// Ordered pairs `(x, y)` with `x != y` and not `y <= x`: the pairs a
    /// local realiser must witness. Comparable pairs appear in their order
    /// direction only; incomparable pairs appear in both directions.
    pub fn requirements(&self) -> Vec<(Elem, Elem)> {
        let mut out = Vec::new();
        for x in 1..=self.n {
            for y in 1..=self.n {
                if x != y && !self.lt(y, x) {
                    out.push((x, y));
                }
            }
        }
        out
    }

    /// True iff the sequence never places an element before something it is
    /// above. Errors on out-of-range ids and duplicates.
    pub fn is_partial_linear_extension(&self, items: &[Elem]) -> Result<bool> {
        let mut seen = vec![false; self.n as usize];
        for &e in items {
            if e < 1 || e > self.n {
                return Err(Error::Range { id: e as u64, n: self.n as u64 });
            }
            if seen[e as usize - 1] {
                return Err(Error::DuplicateElement(e));
            }
            seen[e as usize - 1] = true;
        }
        for j in 1..items.len() {
            for i in 0..j {
                if self.lt(items[j], items[i]) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    pub fn is_chain(&self) -> bool {
        for a in 1..=self.n {
            for b in a + 1..=self.n {
                if !self.lt(a, b) && !self.lt(b, a) {
                    return false;
                }
            }
        }
        true
    }

    /// One linear extension: repeatedly take the least remaining minimal
    /// element. Deterministic, used as the default spine for compositions.
    pub fn least_linear_extension(&self) -> Vec<Elem> {
        let n = self.n as usize;
        let mut placed = vec![false; n];
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            let next = (1..=self.n)
                .find(|&e| {
                    !placed[e as usize - 1]
                        && (1..=self.n).all(|f| placed[f as usize - 1] || !self.lt(f, e))
                })
                .expect("acyclic order always has a minimal element");
            placed[next as usize - 1] = true;
            out.push(next);
        }
        out
    }

    fn check_axioms(&self) -> bool {
        for a in 1..=self.n {
            if self.lt(a, a) {
                return false;
            }
            for b in 1..=self.n {
                if self.lt(a, b) && self.lt(b, a) {
                    return false;
                }
                for c in 1..=self.n {
                    if self.lt(a, b) && self.lt(b, c) && !self.lt(a, c) {
                        return false;
                    }
                }
            }
        }
        true
    }
}

impl OrderHost for Poset {
    fn size(&self) -> u32 {
        self.n
    }

    fn lt(&self, a: Elem, b: Elem) -> bool {
        Poset::lt(self, a, b)
    }
}

impl std::fmt::Debug for Poset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Poset(n={}, relations={:?})", self.n, self.relation_pairs())
    }
}

/// Lexicographic sum of `summands[x-1]` over the index poset, together with
/// the mapping between `(x, y)` pairs and ids of the sum.
pub struct LexSum {
    pub poset: Poset,
    offsets: Vec<u32>,
    sizes: Vec<u32>,
}

impl LexSum {
    /// Id in the sum of point `y` of summand `x`.
    pub fn id(&self, x: Elem, y: Elem) -> Elem {
        debug_assert!(y >= 1 && y <= self.sizes[x as usize - 1]);
        self.offsets[x as usize - 1] + y
    }

    /// Inverse of [`LexSum::id`].
    pub fn split(&self, id: Elem) -> (Elem, Elem) {
        let x = self.offsets.partition_point(|&o| o < id);
        (x as Elem, id - self.offsets[x - 1])
    }

    pub fn summand_size(&self, x: Elem) -> u32 {
        self.sizes[x as usize - 1]
    }
}

/// Builds the lexicographic sum: `(x,y) < (z,w)` iff `x < z` in the index
/// poset, or `x = z` and `y < w` in the summand. Block ids are assigned by
/// ascending `x`, then ascending `y`.
pub fn lex_sum(index: &Poset, summands: &[Poset]) -> Result<LexSum> {
    if summands.len() != index.n() as usize {
        return Err(Error::Parameter(format!(
            "expected {} summands, got {}",
            index.n(),
            summands.len()
        )));
    }
    let sizes: Vec<u32> = summands.iter().map(|q| q.n()).collect();
    let mut offsets = Vec::with_capacity(sizes.len());
    let mut total = 0u32;
    for &s in &sizes {
        offsets.push(total);
        total += s;
    }
    let mut lt = BitMatrix::new(total as usize);
    for x in 1..=index.n() {
        for z in 1..=index.n() {
            if index.lt(x, z) {
                for y in 1..=sizes[x as usize - 1] {
                    for w in 1..=sizes[z as usize - 1] {
                        lt.set(
                            (offsets[x as usize - 1] + y) as usize - 1,
                            (offsets[z as usize - 1] + w) as usize - 1,
                        );
                    }
                }
            }
        }
        let q = &summands[x as usize - 1];
        for y in 1..=q.n() {
            for w in 1..=q.n() {
                if q.lt(y, w) {
                    lt.set(
                        (offsets[x as usize - 1] + y) as usize - 1,
                        (offsets[x as usize - 1] + w) as usize - 1,
                    );
                }
            }
        }
    }
    let poset = Poset { n: total, lt, labels: None };
    debug_assert!(poset.check_axioms());
    Ok(LexSum { poset, offsets, sizes })
}

/// A report row used by serialisable outputs: `(element, value)` pairs keep
/// the JSON mirror stable regardless of internal indexing.
#[derive(Serialize)]
pub struct PairList(pub Vec<(Elem, Elem)>);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closure_infers_chain() {
        let p = Poset::new(3, &[(1, 2), (2, 3)]).unwrap();
        assert!(p.lt(1, 3));
        assert!(p.is_chain());
    }

    #[test]
    fn empty_relation_is_antichain() {
        let p = Poset::new(2, &[]).unwrap();
        assert_eq!(p.relation_pairs(), vec![]);
    }

    #[test]
    fn two_cycle_rejected() {
        assert!(matches!(Poset::new(2, &[(1, 2), (2, 1)]), Err(Error::Cycle(_))));
    }

    #[test]
    fn loop_and_range_rejected() {
        assert!(matches!(Poset::new(2, &[(1, 1)]), Err(Error::Cycle(1))));
        assert!(matches!(Poset::new(2, &[(1, 3)]), Err(Error::Range { id: 3, n: 2 })));
    }

    #[test]
    fn divisibility_small() {
        let p = Poset::divisibility(4).unwrap();
        assert_eq!(p.relation_pairs(), vec![(1, 2), (1, 3), (1, 4), (2, 4)]);
        let p1 = Poset::divisibility(1).unwrap();
        assert_eq!(p1.relation_pairs(), vec![]);
        let p6 = Poset::divisibility(6).unwrap();
        assert!(!p6.lt(2, 3) && !p6.lt(3, 2));
        assert!(p6.lt(2, 6) && p6.lt(3, 6));
    }

    #[test]
    fn requirements_of_small_posets() {
        assert_eq!(Poset::antichain(2).requirements(), vec![(1, 2), (2, 1)]);
        assert_eq!(Poset::chain(2).requirements(), vec![(1, 2)]);
    }

    #[test]
    fn dual_swaps_requirements() {
        let p = Poset::new(4, &[(1, 2), (1, 3)]).unwrap();
        let d = p.dual();
        let mut swapped: Vec<_> = p.requirements().iter().map(|&(x, y)| (y, x)).collect();
        swapped.sort_unstable();
        let mut dual_reqs = d.requirements();
        dual_reqs.sort_unstable();
        assert_eq!(swapped, dual_reqs);
    }

    #[test]
    fn partial_linear_extension_checks() {
        let c = Poset::chain(2);
        assert!(c.is_partial_linear_extension(&[1, 2]).unwrap());
        assert!(!c.is_partial_linear_extension(&[2, 1]).unwrap());
        assert!(matches!(
            c.is_partial_linear_extension(&[1, 1]),
            Err(Error::DuplicateElement(1))
        ));
        let a = Poset::antichain(3);
        assert!(a.is_partial_linear_extension(&[3, 1, 2]).unwrap());
    }

    #[test]
    fn lex_sum_unfolds_definition() {
        // index antichain {x, y}; Q_x a 2-chain, Q_y a point
        let idx = Poset::antichain(2);
        let s = lex_sum(&idx, &[Poset::chain(2), Poset::chain(1)]).unwrap();
        assert_eq!(s.poset.n(), 3);
        assert!(s.poset.lt(s.id(1, 1), s.id(1, 2)));
        assert!(!s.poset.lt(s.id(2, 1), s.id(1, 1)));
        assert!(!s.poset.lt(s.id(1, 1), s.id(2, 1)));

        // chain index with point summands is an isomorphic chain
        let s2 = lex_sum(&Poset::chain(2), &[Poset::chain(1), Poset::chain(1)]).unwrap();
        assert!(s2.poset.is_chain());

        // chain of 2-antichains: complete bipartite order between blocks
        let s3 = lex_sum(&Poset::chain(2), &[Poset::antichain(2), Poset::antichain(2)]).unwrap();
        assert_eq!(s3.poset.n(), 4);
        for y in 1..=2 {
            for w in 1..=2 {
                assert!(s3.poset.lt(s3.id(1, y), s3.id(2, w)));
            }
        }
    }

    #[test]
    fn lex_sum_split_roundtrip() {
        let idx = Poset::chain(3);
        let s = lex_sum(&idx, &[Poset::antichain(2), Poset::chain(1), Poset::chain(3)]).unwrap();
        for id in 1..=s.poset.n() {
            let (x, y) = s.split(id);
            assert_eq!(s.id(x, y), id);
        }
    }

    #[test]
    fn least_linear_extension_is_valid() {
        let p = Poset::new(4, &[(2, 1), (3, 1), (4, 2)]).unwrap();
        let le = p.least_linear_extension();
        assert!(p.is_partial_linear_extension(&le).unwrap());
        assert_eq!(le.len(), 4);
    }
}
