//! Two layers of the Boolean lattice as a lazy poset: elements are the
//! `ell`-subsets and `k`-subsets of `1..=n` kept as bitmasks, ordered by
//! containment. Comparability is computed from the masks, so hosts with
//! hundreds of thousands of comparabilities never materialise a matrix.

use crate::error::{Error, Result};
use crate::poset::{Elem, OrderHost, Poset};

/// Largest `n` for which a dense matrix is materialised by default.
pub const DENSE_CAP: u32 = 14;

/// Safety cap on the number of elements of a layer poset.
const MAX_ELEMENTS: u64 = 5_000_000;

/// `C(n, k)` as u64; 0 when `k > n`.
pub fn binomial(n: u32, k: u32) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k as u128 {
        acc = acc * (n as u128 - i) / (i + 1);
    }
    acc as u64
}

/// All `k`-subset bitmasks of `{0,...,n-1}` in ascending numeric order
/// (Gosper's hack). `k = 0` yields `[0]`.
pub fn k_subset_masks(n: u32, k: u32) -> Vec<u64> {
    assert!(n <= 64 && k <= n);
    let count = binomial(n, k);
    let mut out = Vec::with_capacity(count as usize);
    if k == 0 {
        out.push(0);
        return out;
    }
    let mut v: u64 = (1u64 << (k - 1) << 1).wrapping_sub(1);
    for _ in 0..count {
        out.push(v);
        let c = v & v.wrapping_neg();
        let r = v.wrapping_add(c);
        v = (((r ^ v) >> 2) / c) | r;
    }
    out
}

/// The suborder of the Boolean lattice induced by layers `ell` and `k`.
/// Ids `1..=C(n,ell)` are the lower layer in ascending mask order, ids
/// `C(n,ell)+1..` the upper layer likewise.
pub struct LayerPoset {
    n: u32,
    ell: u32,
    k: u32,
    lower: Vec<u64>,
    upper: Vec<u64>,
}

impl LayerPoset {
    pub fn new(n: u32, ell: u32, k: u32) -> Result<LayerPoset> {
        if ell >= k {
            return Err(Error::Parameter(format!("layers need ell < k, got ({ell}, {k})")));
        }
        if k > n || n > 64 {
            return Err(Error::Parameter(format!(
                "layers need k <= n <= 64, got (n={n}, k={k})"
            )));
        }
        if binomial(n, ell) + binomial(n, k) > MAX_ELEMENTS {
            return Err(Error::Parameter(format!(
                "layer poset ({n}, {ell}, {k}) exceeds {MAX_ELEMENTS} elements"
            )));
        }
        Ok(LayerPoset {
            n,
            ell,
            k,
            lower: k_subset_masks(n, ell),
            upper: k_subset_masks(n, k),
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn ell(&self) -> u32 {
        self.ell
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn lower_count(&self) -> u32 {
        self.lower.len() as u32
    }

    pub fn upper_count(&self) -> u32 {
        self.upper.len() as u32
    }

    pub fn is_lower(&self, id: Elem) -> bool {
        id <= self.lower_count()
    }

    /// Subset bitmask of the element with the given id.
    pub fn mask(&self, id: Elem) -> u64 {
        let lc = self.lower_count();
        if id <= lc {
            self.lower[id as usize - 1]
        } else {
            self.upper[(id - lc) as usize - 1]
        }
    }

    pub fn lower_id(&self, mask: u64) -> Option<Elem> {
        self.lower.binary_search(&mask).ok().map(|i| i as Elem + 1)
    }

    pub fn upper_id(&self, mask: u64) -> Option<Elem> {
        self.upper
            .binary_search(&mask)
            .ok()
            .map(|i| i as Elem + 1 + self.lower_count())
    }

    /// Dense materialisation, capped at `DENSE_CAP` cube dimensions.
    pub fn to_poset(&self) -> Result<Poset> {
        self.to_poset_capped(DENSE_CAP)
    }

    pub fn to_poset_capped(&self, cap: u32) -> Result<Poset> {
        if self.n > cap {
            return Err(Error::Parameter(format!(
                "dense materialisation capped at n <= {cap}, layer poset has n = {}",
                self.n
            )));
        }
        let total = self.size();
        let mut relations = Vec::new();
        for a in 1..=self.lower_count() {
            for b in self.lower_count() + 1..=total {
                if OrderHost::lt(self, a, b) {
                    relations.push((a, b));
                }
            }
        }
        let mut p = Poset::from_closed(total, &relations);
        let labels = (1..=total).map(|id| mask_label(self.mask(id))).collect();
        p.set_labels(labels);
        Ok(p)
    }
}

fn mask_label(mask: u64) -> String {
    let elems: Vec<String> = (0..64)
        .filter(|i| mask >> i & 1 == 1)
        .map(|i| (i + 1).to_string())
        .collect();
    format!("{{{}}}", elems.join(","))
}

impl OrderHost for LayerPoset {
    fn size(&self) -> u32 {
        (self.lower.len() + self.upper.len()) as u32
    }

    #[inline]
    fn lt(&self, a: Elem, b: Elem) -> bool {
        let lc = self.lower_count();
        if a > lc || b <= lc {
            return false;
        }
        let ma = self.lower[a as usize - 1];
        ma & self.upper[(b - lc) as usize - 1] == ma
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn comparable_pairs(p: &LayerPoset) -> u64 {
        let mut count = 0;
        for a in 1..=p.size() {
            for b in 1..=p.size() {
                if OrderHost::lt(p, a, b) {
                    count += 1;
                }
            }
        }
        count
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(4, 2), 6);
        assert_eq!(binomial(16, 8), 12870);
        assert_eq!(binomial(3, 5), 0);
        assert_eq!(binomial(64, 32), 1_832_624_140_942_590_534);
    }

    #[test]
    fn gosper_ascending() {
        let masks = k_subset_masks(4, 2);
        assert_eq!(masks, vec![0b0011, 0b0101, 0b0110, 0b1001, 0b1010, 0b1100]);
        assert_eq!(k_subset_masks(3, 0), vec![0]);
        assert_eq!(k_subset_masks(3, 3), vec![0b111]);
    }

    #[test]
    fn standard_example_s3() {
        let p = LayerPoset::new(3, 1, 2).unwrap();
        assert_eq!(p.size(), 6);
        // each singleton below exactly two 2-sets
        assert_eq!(comparable_pairs(&p), 6);
    }

    #[test]
    fn layer_4_1_3_counts() {
        let p = LayerPoset::new(4, 1, 3).unwrap();
        assert_eq!(p.size(), 8);
        for a in 1..=4 {
            let above = (5..=8).filter(|&b| OrderHost::lt(&p, a, b)).count();
            assert_eq!(above as u64, binomial(3, 2));
        }
    }

    #[test]
    fn bottom_and_top() {
        let p = LayerPoset::new(2, 0, 2).unwrap();
        assert_eq!(p.size(), 2);
        assert_eq!(comparable_pairs(&p), 1);
    }

    #[test]
    fn rejects_bad_layers() {
        assert!(LayerPoset::new(3, 2, 2).is_err());
        assert!(LayerPoset::new(3, 2, 1).is_err());
        assert!(LayerPoset::new(3, 1, 4).is_err());
    }

    #[test]
    fn comparable_pair_count_formula() {
        // C(n-ell, k-ell) * C(n, ell) containments
        for (n, ell, k) in [(4, 1, 2), (5, 2, 4), (6, 0, 3), (6, 2, 3)] {
            let p = LayerPoset::new(n, ell, k).unwrap();
            assert_eq!(comparable_pairs(&p), binomial(n - ell, k - ell) * binomial(n, ell));
        }
    }

    #[test]
    fn dense_materialisation_matches() {
        let layer = LayerPoset::new(4, 1, 3).unwrap();
        let dense = layer.to_poset().unwrap();
        for a in 1..=layer.size() {
            for b in 1..=layer.size() {
                assert_eq!(OrderHost::lt(&layer, a, b), dense.lt(a, b));
            }
        }
        assert_eq!(dense.label(1), "{1}");
        assert_eq!(dense.label(8), "{2,3,4}");
    }

    #[test]
    fn dense_cap_enforced() {
        let layer = LayerPoset::new(16, 1, 2).unwrap();
        assert!(layer.to_poset().is_err());
        assert!(layer.to_poset_capped(16).is_ok());
    }
}
