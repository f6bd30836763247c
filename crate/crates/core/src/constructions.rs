//! Explicit realiser and embedding constructions, parameterised and
//! deterministic. Every "any order" choice is pinned to ascending bitmask
//! order (with per-layer reversal for the second linear extension) so runs
//! are reproducible and golden tests diff cleanly.

use crate::error::{Error, Result};
use crate::layer::LayerPoset;
use crate::poset::{lex_sum, Elem, LexSum, OrderHost, Poset};
use crate::realiser::{verify_local_realiser, LocalRealiser, VerificationReport};

/// A realiser over a layer poset together with its verification report.
/// Constructors verify their output; an invalid construction is a bug.
pub struct LayerConstruction {
    pub host: LayerPoset,
    pub realiser: LocalRealiser,
    pub report: VerificationReport,
}

impl LayerConstruction {
    pub fn max_lower_multiplicity(&self) -> u32 {
        let lc = self.host.lower_count() as usize;
        self.report.multiplicity[..lc].iter().copied().max().unwrap_or(0)
    }

    pub fn max_upper_multiplicity(&self) -> u32 {
        let lc = self.host.lower_count() as usize;
        self.report.multiplicity[lc..].iter().copied().max().unwrap_or(0)
    }
}

/// Realiser of the layers `(ell, top)` built from two full linear extensions
/// plus, for each ground element `i`, the top-layer sets avoiding `i`
/// followed by the lower-layer sets containing `i`. Gives every lower set
/// multiplicity at most `2 + ell` and every top set at most `2 + (n - top)`.
/// Lists shorter than two elements cover nothing and are dropped.
pub fn far_layers_realiser(n: u32, ell: u32, top: u32) -> Result<LayerConstruction> {
    let host = LayerPoset::new(n, ell, top)?;
    let lc = host.lower_count();
    let total = host.size();

    let mut lists: Vec<Vec<Elem>> = Vec::with_capacity(n as usize + 2);
    let pi0: Vec<Elem> = (1..=total).collect();
    let mut pi1: Vec<Elem> = (1..=lc).rev().collect();
    pi1.extend((lc + 1..=total).rev());
    lists.push(pi0);
    lists.push(pi1);

    for i in 0..n {
        let bit = 1u64 << i;
        let mut li: Vec<Elem> = (lc + 1..=total).filter(|&id| host.mask(id) & bit == 0).collect();
        li.extend((1..=lc).filter(|&id| host.mask(id) & bit != 0));
        lists.push(li);
    }
    lists.retain(|l| l.len() >= 2);

    let realiser = LocalRealiser::new(total, lists)?;
    let report = verify_local_realiser(&host, &realiser)?;
    let built = LayerConstruction { host, realiser, report };
    assert!(built.report.valid, "far-layers construction must verify");
    assert!(built.max_lower_multiplicity() <= 2 + ell);
    assert!(built.max_upper_multiplicity() <= 2 + (n - top));
    Ok(built)
}

/// Bipartite graph with parts `A` (ids `1..=a_count`) and `B`, edges indexed
/// `1..=edge_count` in insertion order.
#[derive(Clone, Debug)]
pub struct BipartiteGraph {
    a_count: u32,
    b_count: u32,
    edges: Vec<(u32, u32)>,
}

impl BipartiteGraph {
    pub fn new(a_count: u32, b_count: u32, edges: Vec<(u32, u32)>) -> Result<BipartiteGraph> {
        if a_count == 0 || b_count == 0 {
            return Err(Error::Degree("parts must be nonempty".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for &(a, b) in &edges {
            if a < 1 || a > a_count || b < 1 || b > b_count {
                return Err(Error::Degree(format!("edge ({a}, {b}) out of range")));
            }
            if !seen.insert((a, b)) {
                return Err(Error::Degree(format!("duplicate edge ({a}, {b})")));
            }
        }
        Ok(BipartiteGraph { a_count, b_count, edges })
    }

    pub fn a_count(&self) -> u32 {
        self.a_count
    }

    pub fn b_count(&self) -> u32 {
        self.b_count
    }

    pub fn edge_count(&self) -> u32 {
        self.edges.len() as u32
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    /// Incident `(b_vertex, edge_index)` pairs of an a-vertex, ascending by
    /// b-vertex.
    fn incident(&self, v: u32) -> Vec<(u32, u32)> {
        let mut out: Vec<(u32, u32)> = self
            .edges
            .iter()
            .enumerate()
            .filter(|(_, &(a, _))| a == v)
            .map(|(i, &(_, b))| (b, i as u32 + 1))
            .collect();
        out.sort_unstable();
        out
    }

    pub fn max_degree(&self) -> u32 {
        (1..=self.a_count).map(|v| self.incident(v).len() as u32).max().unwrap_or(0)
    }
}

/// Any `n`-edge bipartite graph with `|A| = ceil(n / D)` and `|B| = ceil(D)`
/// where `D = log2 n - log2 log2 n - log2 ell`; edges are laid out row-major
/// (`a_1` takes `b_1..`, then `a_2`, ...) until `n` edges are placed.
pub fn default_bipartite_graph(n: u32, ell: u32) -> Result<BipartiteGraph> {
    if n < 2 || ell < 1 {
        return Err(Error::Parameter(format!(
            "default graph needs n >= 2 and ell >= 1, got (n={n}, ell={ell})"
        )));
    }
    let nf = n as f64;
    let denom = nf.log2() - nf.log2().log2() - (ell as f64).log2();
    if !(denom > 0.0) {
        return Err(Error::Parameter(format!(
            "log2 n - log2 log2 n - log2 ell = {denom} is not positive at n={n}, ell={ell}"
        )));
    }
    let a_count = (nf / denom).ceil() as u32;
    let b_count = denom.ceil() as u32;
    if (a_count as u64) * (b_count as u64) < n as u64 {
        return Err(Error::Parameter(format!(
            "{a_count}x{b_count} grid cannot hold {n} edges"
        )));
    }
    let mut edges = Vec::with_capacity(n as usize);
    'fill: for a in 1..=a_count {
        for b in 1..=b_count {
            if edges.len() == n as usize {
                break 'fill;
            }
            edges.push((a, b));
        }
    }
    BipartiteGraph::new(a_count, b_count, edges)
}

/// Disjoint union of `ell` copies of the `m`-dimensional hypercube graph,
/// bipartitioned by popcount parity (even side is `A`). Edge order: copy,
/// then even-endpoint mask ascending, then flipped bit ascending.
pub fn hypercube_graph_union(m: u32, ell: u32) -> Result<BipartiteGraph> {
    if m < 1 || ell < 1 {
        return Err(Error::Parameter("hypercube union needs m >= 1 and ell >= 1".into()));
    }
    if m > 20 {
        return Err(Error::Parameter("hypercube dimension capped at 20".into()));
    }
    let half = 1u32 << (m - 1);
    let mut a_of = vec![0u32; 1 << m];
    let mut b_of = vec![0u32; 1 << m];
    let (mut na, mut nb) = (0, 0);
    for mask in 0..1u32 << m {
        if mask.count_ones() % 2 == 0 {
            na += 1;
            a_of[mask as usize] = na;
        } else {
            nb += 1;
            b_of[mask as usize] = nb;
        }
    }
    let mut edges = Vec::new();
    for copy in 0..ell {
        let off = copy * half;
        for mask in 0..1u32 << m {
            if mask.count_ones() % 2 != 0 {
                continue;
            }
            for bit in 0..m {
                edges.push((off + a_of[mask as usize], off + b_of[(mask ^ (1 << bit)) as usize]));
            }
        }
    }
    BipartiteGraph::new(ell * half, ell * half, edges)
}

/// Realiser of the `(ell, k)` layers over the edge set of `g` (so the cube
/// dimension is the edge count). Besides the two full extensions, one list
/// per a-vertex `v` and neighbourhood subset `X`: the k-sets whose edges at
/// `v` hit exactly `X`, then the ell-sets containing an edge `vu`, `u`
/// outside `X`. Every k-set ends up in at most `a_count + 2` lists.
pub fn bipartite_realiser(g: &BipartiteGraph, ell: u32, k: u32) -> Result<LayerConstruction> {
    let n = g.edge_count();
    if ell < 1 || ell >= k || k > n {
        return Err(Error::Parameter(format!(
            "need 1 <= ell < k <= edge count, got (ell={ell}, k={k}, n={n})"
        )));
    }
    let host = LayerPoset::new(n, ell, k)?;
    let lc = host.lower_count();
    let total = host.size();

    let incident: Vec<Vec<(u32, u32)>> = (1..=g.a_count()).map(|v| g.incident(v)).collect();
    let subset_budget: u64 = incident.iter().map(|inc| 1u64 << inc.len()).sum();
    if subset_budget > 1_000_000 {
        return Err(Error::Parameter(
            "too many neighbourhood subsets; reduce vertex degrees".into(),
        ));
    }

    // Bucket every k-set by (a-vertex, local neighbourhood mask).
    let mut buckets: Vec<Vec<Vec<Elem>>> =
        incident.iter().map(|inc| vec![Vec::new(); 1 << inc.len()]).collect();
    for id in lc + 1..=total {
        let mask = host.mask(id);
        for (vi, inc) in incident.iter().enumerate() {
            let mut x_sub = 0usize;
            for (pos, &(_, e)) in inc.iter().enumerate() {
                if mask >> (e - 1) & 1 == 1 {
                    x_sub |= 1 << pos;
                }
            }
            buckets[vi][x_sub].push(id);
        }
    }

    let mut lists: Vec<Vec<Elem>> = Vec::new();
    let pi0: Vec<Elem> = (1..=total).collect();
    let mut pi1: Vec<Elem> = (1..=lc).rev().collect();
    pi1.extend((lc + 1..=total).rev());
    lists.push(pi0);
    lists.push(pi1);

    for (vi, inc) in incident.iter().enumerate() {
        for x_sub in 0..1usize << inc.len() {
            // edges vu with u not in X, as a mask over edge bits
            let mut active = 0u64;
            for (pos, &(_, e)) in inc.iter().enumerate() {
                if x_sub >> pos & 1 == 0 {
                    active |= 1 << (e - 1);
                }
            }
            let mut list = buckets[vi][x_sub].clone();
            list.extend((1..=lc).filter(|&id| host.mask(id) & active != 0));
            if list.len() >= 2 {
                lists.push(list);
            }
        }
    }

    let realiser = LocalRealiser::new(total, lists)?;
    let report = verify_local_realiser(&host, &realiser)?;
    let built = LayerConstruction { host, realiser, report };
    assert!(built.report.valid, "bipartite construction must verify");
    assert!(built.max_upper_multiplicity() <= g.a_count() + 2);
    Ok(built)
}

/// One summand of a lexicographic composition: the summand poset and the
/// lists of its realiser (full linear extensions for the substitution rule)
/// or local realiser (for the additive rule).
pub struct LexSummand {
    pub poset: Poset,
    pub lists: Vec<Vec<Elem>>,
}

/// Result of composing realisers over a lexicographic sum.
pub struct LexComposition {
    pub sum: LexSum,
    pub realiser: LocalRealiser,
    pub report: VerificationReport,
}

fn check_full_extension(summand: &LexSummand, list: &[Elem], index: usize) -> Result<()> {
    if list.len() != summand.poset.n() as usize {
        return Err(Error::NotARealiser {
            index: index + 1,
            reason: format!("list of length {} is partial (summand has {} elements)", list.len(), summand.poset.n()),
        });
    }
    if !summand.poset.is_partial_linear_extension(list)? {
        return Err(Error::NotARealiser {
            index: index + 1,
            reason: "list is not a linear extension".into(),
        });
    }
    Ok(())
}

fn expand(sum: &LexSum, x: Elem, block: &[Elem], out: &mut Vec<Elem>) {
    out.extend(block.iter().map(|&y| sum.id(x, y)));
}

/// Substitution rule: every occurrence of `x` in the index realiser becomes
/// an `x`-block running through one full extension of the summand, cycling
/// so each extension is used at least once; extensions in excess of the
/// occurrence count are appended as new lists. The multiplicity of `(x, y)`
/// in the output is exactly `max(mu(x), |M_x|)`.
pub fn lex_realiser_subst(
    index: &Poset,
    index_realiser: &LocalRealiser,
    summands: &[LexSummand],
) -> Result<LexComposition> {
    let index_report = verify_local_realiser(index, index_realiser)?;
    if !index_report.valid {
        return Err(Error::Parameter("index realiser does not cover its poset".into()));
    }
    for (i, s) in summands.iter().enumerate() {
        if s.lists.is_empty() {
            return Err(Error::NotARealiser {
                index: i + 1,
                reason: "realiser must contain at least one linear extension".into(),
            });
        }
        for list in &s.lists {
            check_full_extension(s, list, i)?;
        }
    }

    let posets: Vec<Poset> = summands.iter().map(|s| s.poset.clone()).collect();
    let sum = lex_sum(index, &posets)?;

    let mut occurrences = vec![0usize; index.n() as usize];
    let mut lists: Vec<Vec<Elem>> = Vec::new();
    for list in index_realiser.lists() {
        let mut fused = Vec::new();
        for &x in list {
            let mx = &summands[x as usize - 1].lists;
            expand(&sum, x, &mx[occurrences[x as usize - 1] % mx.len()], &mut fused);
            occurrences[x as usize - 1] += 1;
        }
        lists.push(fused);
    }
    for x in 1..=index.n() {
        let mx = &summands[x as usize - 1].lists;
        for leftover in mx.iter().skip(occurrences[x as usize - 1]) {
            let mut fused = Vec::new();
            expand(&sum, x, leftover, &mut fused);
            lists.push(fused);
        }
    }

    let realiser = LocalRealiser::new(sum.poset.n(), lists)?;
    let report = verify_local_realiser(&sum.poset, &realiser)?;
    if !report.valid {
        return Err(Error::Parameter(
            "substitution output failed verification; some summand realiser is not covering".into(),
        ));
    }
    Ok(LexComposition { sum, realiser, report })
}

/// Additive rule: every occurrence of `x` in the index realiser becomes the
/// `x`-block of the spine `K_x`, and every list `M` of the summand's local
/// realiser is appended as `x`-block of `M`. The multiplicity of `(x, y)` in
/// the output is exactly `mu(x) + mu_{M_x}(y)`.
pub fn lex_realiser_add(
    index: &Poset,
    index_realiser: &LocalRealiser,
    summands: &[LexSummand],
    spines: &[Vec<Elem>],
) -> Result<LexComposition> {
    let index_report = verify_local_realiser(index, index_realiser)?;
    if !index_report.valid {
        return Err(Error::Parameter("index realiser does not cover its poset".into()));
    }
    if spines.len() != summands.len() {
        return Err(Error::Parameter("one spine per summand required".into()));
    }
    for (i, (s, spine)) in summands.iter().zip(spines).enumerate() {
        check_full_extension(s, spine, i)?;
        for list in &s.lists {
            if !s.poset.is_partial_linear_extension(list)? {
                return Err(Error::NotARealiser {
                    index: i + 1,
                    reason: "local realiser list inverts a comparable pair".into(),
                });
            }
        }
    }

    let posets: Vec<Poset> = summands.iter().map(|s| s.poset.clone()).collect();
    let sum = lex_sum(index, &posets)?;

    let mut lists: Vec<Vec<Elem>> = Vec::new();
    for list in index_realiser.lists() {
        let mut fused = Vec::new();
        for &x in list {
            expand(&sum, x, &spines[x as usize - 1], &mut fused);
        }
        lists.push(fused);
    }
    for x in 1..=index.n() {
        for m in &summands[x as usize - 1].lists {
            let mut fused = Vec::new();
            expand(&sum, x, m, &mut fused);
            lists.push(fused);
        }
    }

    let realiser = LocalRealiser::new(sum.poset.n(), lists)?;
    let report = verify_local_realiser(&sum.poset, &realiser)?;
    if !report.valid {
        return Err(Error::Parameter(
            "additive output failed verification; some summand realiser is not covering".into(),
        ));
    }
    Ok(LexComposition { sum, realiser, report })
}

/// An order-embedding between two materialised posets: `map[a - 1]` is the
/// target id of source element `a`.
pub struct Embedding {
    pub source: Poset,
    pub target: Poset,
    pub map: Vec<Elem>,
}

/// True iff `map` is total, injective and preserves and reflects order.
pub fn verify_embedding<S: OrderHost, T: OrderHost>(source: &S, target: &T, map: &[Elem]) -> bool {
    if map.len() != source.size() as usize {
        return false;
    }
    if map.iter().any(|&t| t < 1 || t > target.size()) {
        return false;
    }
    let mut sorted = map.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return false;
    }
    for a in 1..=source.size() {
        for b in 1..=source.size() {
            if a != b
                && source.lt(a, b) != target.lt(map[a as usize - 1], map[b as usize - 1])
            {
                return false;
            }
        }
    }
    true
}

fn assert_embedding(source: Poset, target: Poset, map: Vec<Elem>) -> Embedding {
    assert!(verify_embedding(&source, &target, &map), "construction must embed");
    Embedding { source, target, map }
}

/// Embeds layers `(1, 2)` of the `(n-k+1)`-cube into layers `(k, k+1)` of
/// the `n`-cube by adjoining the `k - 1` fresh elements `n-k+2..=n` to every
/// set.
pub fn shift_embedding_12(n: u32, k: u32) -> Result<Embedding> {
    if k < 1 || n + 1 < k + 2 {
        return Err(Error::Parameter(format!(
            "need 1 <= k and n - k + 1 >= 2, got (n={n}, k={k})"
        )));
    }
    let m = n - k + 1;
    let source_layer = LayerPoset::new(m, 1, 2)?;
    let target_layer = LayerPoset::new(n, k, k + 1)?;
    let fresh: u64 = if k == 1 { 0 } else { ((1u64 << (k - 1)) - 1) << m };
    let map: Vec<Elem> = (1..=source_layer.size())
        .map(|id| {
            let mask = source_layer.mask(id) | fresh;
            if source_layer.is_lower(id) {
                target_layer.lower_id(mask).expect("shifted set is a k-set")
            } else {
                target_layer.upper_id(mask).expect("shifted set is a (k+1)-set")
            }
        })
        .collect();
    Ok(assert_embedding(source_layer.to_poset()?, target_layer.to_poset()?, map))
}

/// Embeds layers `(ell, k)` of the `n`-cube into layers `(ell, k+1)` of the
/// `(n+1)`-cube: lower sets are fixed, upper sets gain the element `n+1`.
pub fn shift_embedding_up(n: u32, ell: u32, k: u32) -> Result<Embedding> {
    if ell < 1 || ell >= k || k > n {
        return Err(Error::Parameter(format!(
            "need 1 <= ell < k <= n, got (n={n}, ell={ell}, k={k})"
        )));
    }
    let source_layer = LayerPoset::new(n, ell, k)?;
    let target_layer = LayerPoset::new(n + 1, ell, k + 1)?;
    let map: Vec<Elem> = (1..=source_layer.size())
        .map(|id| {
            if source_layer.is_lower(id) {
                target_layer.lower_id(source_layer.mask(id)).expect("ell-set persists")
            } else {
                target_layer
                    .upper_id(source_layer.mask(id) | 1u64 << n)
                    .expect("extended set is a (k+1)-set")
            }
        })
        .collect();
    Ok(assert_embedding(source_layer.to_poset()?, target_layer.to_poset()?, map))
}

/// First `k` primes.
pub fn first_primes(k: usize) -> Vec<u64> {
    let mut primes: Vec<u64> = Vec::with_capacity(k);
    let mut cand = 2u64;
    while primes.len() < k {
        if primes.iter().take_while(|&&p| p * p <= cand).all(|&p| cand % p != 0) {
            primes.push(cand);
        }
        cand += 1;
    }
    primes
}

/// Embeds layers `(1, floor(sqrt(k)))` of the `k`-cube into the divisibility
/// order on `1..=n` by sending a subset to the product of its primes. The
/// precondition is the exact one: the product of the `floor(sqrt(k))`
/// largest of the first `k` primes must be at most `n`.
pub fn divisibility_embedding(k: u32, n: u32) -> Result<Embedding> {
    let r = (k as f64).sqrt().floor() as u32;
    if r < 2 {
        return Err(Error::Parameter(format!(
            "floor(sqrt(k)) = {r} leaves no room above the first layer (k={k})"
        )));
    }
    let primes = first_primes(k as usize);
    let max_product: u128 = primes[(k - r) as usize..].iter().map(|&p| p as u128).product();
    if max_product > n as u128 {
        return Err(Error::Range { id: max_product.min(u64::MAX as u128) as u64, n: n as u64 });
    }
    let source_layer = LayerPoset::new(k, 1, r)?;
    let target = Poset::divisibility(n)?;
    let map: Vec<Elem> = (1..=source_layer.size())
        .map(|id| {
            let mask = source_layer.mask(id);
            let mut product = 1u64;
            for (i, &p) in primes.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    product *= p;
                }
            }
            product as Elem
        })
        .collect();
    Ok(assert_embedding(source_layer.to_poset()?, target, map))
}
