//! Desk-scale exact oracles: local dimension, Dushnik-Miller dimension and
//! 2-dimension by exhaustive search. These are slow by design and exist as
//! ground truth for everything the constructions claim; keep them under
//! eight elements.

use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::poset::{Elem, Poset};
use crate::realiser::LocalRealiser;

/// Hard cap on the oracle ground-set size.
pub const MAX_ORACLE_ELEMENTS: u32 = 8;

/// Limits for the exact searches. `Exceeded` reports the best proven lower
/// bound instead of guessing.
#[derive(Clone, Debug)]
pub struct SearchBudget {
    pub d_max: u32,
    pub node_limit: u64,
    pub time_limit: Duration,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            d_max: 64,
            node_limit: 200_000_000,
            time_limit: Duration::from_secs(120),
        }
    }
}

pub struct LdimResult {
    pub value: u32,
    /// A realiser attaining the value; deterministic for a given poset.
    pub witness: LocalRealiser,
}

pub struct DimResult {
    pub value: u32,
    pub witness: Vec<Vec<Elem>>,
}

pub struct TwoDimResult {
    pub value: u32,
    /// `images[id - 1]` is the cube point of element `id` as a bitmask.
    pub images: Vec<u64>,
}

enum Search<T> {
    Found(T),
    Exhausted,
    Budget(String),
}

fn guard_size(p: &Poset, what: &str) -> Result<()> {
    if p.n() > MAX_ORACLE_ELEMENTS {
        return Err(Error::Parameter(format!(
            "{what} oracle is exhaustive; limited to {MAX_ORACLE_ELEMENTS} elements, got {}",
            p.n()
        )));
    }
    Ok(())
}

/// A partial linear extension prepared for the covering searches.
struct Ple {
    seq: Vec<Elem>,
    members: u16,
    covers: u64,
}

/// Requirement list plus an `n x n` lookup of requirement indices.
fn requirement_index(p: &Poset) -> (Vec<(Elem, Elem)>, Vec<Option<u8>>) {
    let n = p.n() as usize;
    let reqs = p.requirements();
    debug_assert!(reqs.len() <= 64);
    let mut idx = vec![None; n * n];
    for (i, &(a, b)) in reqs.iter().enumerate() {
        idx[(a as usize - 1) * n + (b as usize - 1)] = Some(i as u8);
    }
    (reqs, idx)
}

struct PleEnum<'a> {
    p: &'a Poset,
    idx: &'a [Option<u8>],
    seq: Vec<Elem>,
    members: u16,
    covers: u64,
    out: Vec<Ple>,
}

impl PleEnum<'_> {
    /// Depth-first over all sequences, ascending element order; records
    /// every sequence of length two or more.
    fn run(&mut self) {
        let n = self.p.n();
        for e in 1..=n {
            if self.members >> (e - 1) & 1 == 1 {
                continue;
            }
            // appending e must not invert a comparable pair
            if self.seq.iter().any(|&s| self.p.lt(e, s)) {
                continue;
            }
            let mut added = 0u64;
            for &s in &self.seq {
                if let Some(r) = self.idx[(s as usize - 1) * n as usize + (e as usize - 1)] {
                    added |= 1 << r;
                }
            }
            let saved = self.covers;
            self.seq.push(e);
            self.members |= 1 << (e - 1);
            self.covers |= added;
            if self.seq.len() >= 2 {
                self.out.push(Ple {
                    seq: self.seq.clone(),
                    members: self.members,
                    covers: self.covers,
                });
            }
            self.run();
            self.covers = saved;
            self.members &= !(1 << (e - 1));
            self.seq.pop();
        }
    }
}

fn enumerate_ples(p: &Poset, idx: &[Option<u8>]) -> Vec<Ple> {
    let mut e = PleEnum { p, idx, seq: Vec::new(), members: 0, covers: 0, out: Vec::new() };
    e.run();
    e.out
}

struct LdimSearch<'a> {
    n: u32,
    ples: &'a [Ple],
    cands: &'a [Vec<u32>],
    reqs: &'a [(Elem, Elem)],
    rev: &'a [Option<u8>],
    budgets: Vec<u8>,
    zero_mask: u16,
    banned: Vec<bool>,
    chosen: Vec<u32>,
    nodes: u64,
    node_limit: u64,
    deadline: Instant,
}

impl LdimSearch<'_> {
    fn dfs(&mut self, uncovered: u64) -> Search<()> {
        self.nodes += 1;
        if self.nodes & 0xFFF == 0 {
            if self.nodes > self.node_limit {
                return Search::Budget("node limit".into());
            }
            if Instant::now() > self.deadline {
                return Search::Budget("time limit".into());
            }
        }
        if uncovered == 0 {
            return Search::Found(());
        }

        // Feasibility prunes. An endpoint with no budget left kills its
        // pair; a pair still uncovered in both directions needs two more
        // lists through both endpoints.
        let n = self.n as usize;
        let mut deg = [0u32; MAX_ORACLE_ELEMENTS as usize];
        let mut bits = uncovered;
        while bits != 0 {
            let r = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let (a, b) = self.reqs[r];
            let (ai, bi) = (a as usize - 1, b as usize - 1);
            if self.budgets[ai] == 0 || self.budgets[bi] == 0 {
                return Search::Exhausted;
            }
            deg[ai] += 1;
            deg[bi] += 1;
            if let Some(rr) = self.rev[r] {
                if uncovered >> rr & 1 == 1 && (self.budgets[ai] < 2 || self.budgets[bi] < 2) {
                    return Search::Exhausted;
                }
            }
        }
        for e in 0..n {
            if deg[e] > self.budgets[e] as u32 * (self.n - 1) {
                return Search::Exhausted;
            }
        }

        // Branch on the least uncovered requirement; a sibling's candidate
        // is banned for the rest of the node so each family is tried once.
        let r0 = uncovered.trailing_zeros() as usize;
        let mut banned_here: Vec<u32> = Vec::new();
        let mut outcome = Search::Exhausted;
        for i in 0..self.cands[r0].len() {
            let ci = self.cands[r0][i];
            if self.banned[ci as usize] {
                continue;
            }
            let (members, covers) = {
                let ple = &self.ples[ci as usize];
                (ple.members, ple.covers)
            };
            if members & self.zero_mask != 0 {
                continue;
            }
            let mut ms = members;
            while ms != 0 {
                let e = ms.trailing_zeros() as usize;
                ms &= ms - 1;
                self.budgets[e] -= 1;
                if self.budgets[e] == 0 {
                    self.zero_mask |= 1 << e;
                }
            }
            self.chosen.push(ci);
            match self.dfs(uncovered & !covers) {
                Search::Found(()) => return Search::Found(()),
                Search::Budget(why) => {
                    outcome = Search::Budget(why);
                }
                Search::Exhausted => {}
            }
            self.chosen.pop();
            let mut ms = members;
            while ms != 0 {
                let e = ms.trailing_zeros() as usize;
                ms &= ms - 1;
                self.budgets[e] += 1;
                self.zero_mask &= !(1 << e);
            }
            if matches!(outcome, Search::Budget(_)) {
                break;
            }
            self.banned[ci as usize] = true;
            banned_here.push(ci);
        }
        for ci in banned_here {
            self.banned[ci as usize] = false;
        }
        outcome
    }
}

/// Smallest `d` admitting a local realiser with every multiplicity at most
/// `d`. Iterative deepening on `d`; within a depth, depth-first covering of
/// the requirement set with budget, degree and двух-direction prunes. The
/// branching order is fixed, so the witness is deterministic.
pub fn exact_ldim(p: &Poset, budget: &SearchBudget) -> Result<LdimResult> {
    guard_size(p, "local dimension")?;
    let n = p.n();
    let (reqs, idx) = requirement_index(p);
    if reqs.is_empty() {
        return Ok(LdimResult { value: 1, witness: LocalRealiser::new(n, vec![])? });
    }
    let ples = enumerate_ples(p, &idx);
    let rev: Vec<Option<u8>> = reqs
        .iter()
        .map(|&(a, b)| idx[(b as usize - 1) * n as usize + (a as usize - 1)])
        .collect();

    let mut cands: Vec<Vec<u32>> = vec![Vec::new(); reqs.len()];
    for (pi, ple) in ples.iter().enumerate() {
        let mut bits = ple.covers;
        while bits != 0 {
            let r = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            cands[r].push(pi as u32);
        }
    }
    // widest coverage first
    for c in &mut cands {
        c.sort_by_key(|&pi| std::cmp::Reverse(ples[pi as usize].covers.count_ones()));
    }

    let all = (1u64 << reqs.len()) - 1 + (reqs.len() == 64) as u64; // reqs.len() < 64 in practice
    let lower = if rev.iter().any(Option::is_some) { 2 } else { 1 };
    let deadline = Instant::now() + budget.time_limit;
    let mut nodes = 0u64;
    for d in lower..=budget.d_max.min(255) {
        let mut search = LdimSearch {
            n,
            ples: &ples,
            cands: &cands,
            reqs: &reqs,
            rev: &rev,
            budgets: vec![d as u8; n as usize],
            zero_mask: 0,
            banned: vec![false; ples.len()],
            chosen: Vec::new(),
            nodes,
            node_limit: budget.node_limit,
            deadline,
        };
        match search.dfs(all) {
            Search::Found(()) => {
                let lists: Vec<Vec<Elem>> =
                    search.chosen.iter().map(|&ci| ples[ci as usize].seq.clone()).collect();
                let witness = LocalRealiser::new(n, lists)?;
                return Ok(LdimResult { value: d, witness });
            }
            Search::Exhausted => {
                nodes = search.nodes;
            }
            Search::Budget(reason) => {
                return Err(Error::Exceeded { lower_bound: d, reason });
            }
        }
    }
    Err(Error::Exceeded {
        lower_bound: budget.d_max.min(255) + 1,
        reason: "d_max reached".into(),
    })
}

fn enumerate_linear_extensions(p: &Poset, idx: &[Option<u8>]) -> Vec<Ple> {
    let n = p.n() as usize;
    let mut e = PleEnum { p, idx, seq: Vec::new(), members: 0, covers: 0, out: Vec::new() };
    e.run();
    let mut out = e.out;
    out.retain(|ple| ple.seq.len() == n);
    out
}

fn dim_dfs(
    exts: &[Ple],
    cands: &[Vec<u32>],
    banned: &mut [bool],
    uncovered: u64,
    depth_left: u32,
    max_cover: u32,
    chosen: &mut Vec<u32>,
) -> bool {
    if uncovered == 0 {
        return true;
    }
    if depth_left == 0 || uncovered.count_ones() > depth_left * max_cover {
        return false;
    }
    let r0 = uncovered.trailing_zeros() as usize;
    let mut banned_here = Vec::new();
    let mut found = false;
    for i in 0..cands[r0].len() {
        let ci = cands[r0][i];
        if banned[ci as usize] {
            continue;
        }
        chosen.push(ci);
        if dim_dfs(
            exts,
            cands,
            banned,
            uncovered & !exts[ci as usize].covers,
            depth_left - 1,
            max_cover,
            chosen,
        ) {
            found = true;
            break;
        }
        chosen.pop();
        banned[ci as usize] = true;
        banned_here.push(ci);
    }
    for ci in banned_here {
        banned[ci as usize] = false;
    }
    found
}

/// Minimum number of full linear extensions whose intersection is the
/// poset: exact set cover over the incomparable ordered pairs.
pub fn exact_dim(p: &Poset) -> Result<DimResult> {
    guard_size(p, "dimension")?;
    let n = p.n() as usize;
    let mut pairs = Vec::new();
    let mut idx = vec![None; n * n];
    for x in 1..=p.n() {
        for y in 1..=p.n() {
            if x != y && !p.lt(x, y) && !p.lt(y, x) {
                idx[(x as usize - 1) * n + (y as usize - 1)] = Some(pairs.len() as u8);
                pairs.push((x, y));
            }
        }
    }
    if pairs.is_empty() {
        return Ok(DimResult { value: 1, witness: vec![p.least_linear_extension()] });
    }
    let exts = enumerate_linear_extensions(p, &idx);
    let mut cands: Vec<Vec<u32>> = vec![Vec::new(); pairs.len()];
    for (ei, ext) in exts.iter().enumerate() {
        let mut bits = ext.covers;
        while bits != 0 {
            let r = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            cands[r].push(ei as u32);
        }
    }
    for c in &mut cands {
        c.sort_by_key(|&ei| std::cmp::Reverse(exts[ei as usize].covers.count_ones()));
    }
    let all = (1u64 << pairs.len()) - 1;
    let max_cover = exts.iter().map(|e| e.covers.count_ones()).max().unwrap_or(1);
    let mut banned = vec![false; exts.len()];
    for r in 2..=p.n() {
        let mut chosen = Vec::new();
        if dim_dfs(&exts, &cands, &mut banned, all, r, max_cover, &mut chosen) {
            let witness = chosen.iter().map(|&ci| exts[ci as usize].seq.clone()).collect();
            return Ok(DimResult { value: r, witness });
        }
    }
    unreachable!("a poset on n elements is realised by at most n extensions")
}

fn longest_chain(p: &Poset) -> u32 {
    let n = p.n();
    let order = p.least_linear_extension();
    let mut height = vec![1u32; n as usize + 1];
    for &e in &order {
        for &f in &order {
            if p.lt(f, e) {
                height[e as usize] = height[e as usize].max(height[f as usize] + 1);
            }
        }
    }
    (1..=n).map(|e| height[e as usize]).max().unwrap_or(0)
}

struct TwoDimSearch<'a> {
    p: &'a Poset,
    order: Vec<Elem>,
    masks: Vec<u64>,
    d: u32,
    nodes: u64,
    node_limit: u64,
    deadline: Instant,
}

impl TwoDimSearch<'_> {
    fn assign(&mut self, pos: usize, used: u32) -> Search<()> {
        self.nodes += 1;
        if self.nodes & 0xFFF == 0 {
            if self.nodes > self.node_limit {
                return Search::Budget("node limit".into());
            }
            if Instant::now() > self.deadline {
                return Search::Budget("time limit".into());
            }
        }
        if pos == self.order.len() {
            return Search::Found(());
        }
        let e = self.order[pos];
        // Coordinates are interchangeable: new ones must be taken as the
        // next contiguous block, so each labelling is tried once.
        for t in 0..=self.d - used {
            let block = if t == 0 { 0 } else { ((1u64 << t) - 1) << used };
            for old in 0..1u64 << used {
                let mask = old | block;
                let mut ok = true;
                for &f in &self.order[..pos] {
                    let mf = self.masks[f as usize - 1];
                    if self.p.lt(f, e) {
                        if mf & mask != mf || mf == mask {
                            ok = false;
                            break;
                        }
                    } else if mf & mask == mf || mask & mf == mask {
                        ok = false;
                        break;
                    }
                }
                if !ok {
                    continue;
                }
                self.masks[e as usize - 1] = mask;
                match self.assign(pos + 1, used + t) {
                    Search::Found(()) => return Search::Found(()),
                    Search::Budget(why) => return Search::Budget(why),
                    Search::Exhausted => {}
                }
            }
        }
        Search::Exhausted
    }
}

/// Smallest `d` such that the poset order-embeds into the `d`-cube, by
/// backtracking assignment of subsets along a linear extension with
/// coordinate-permutation symmetry broken.
pub fn exact_twodim(p: &Poset, budget: &SearchBudget) -> Result<TwoDimResult> {
    guard_size(p, "2-dimension")?;
    let n = p.n();
    let pigeonhole = u32::BITS - (n - 1).leading_zeros(); // ceil(log2 n)
    let lower = pigeonhole.max(longest_chain(p) - 1);
    let deadline = Instant::now() + budget.time_limit;
    let mut nodes = 0u64;
    for d in lower..=n.min(budget.d_max) {
        let mut search = TwoDimSearch {
            p,
            order: p.least_linear_extension(),
            masks: vec![0; n as usize],
            d,
            nodes,
            node_limit: budget.node_limit,
            deadline,
        };
        match search.assign(0, 0) {
            Search::Found(()) => {
                return Ok(TwoDimResult { value: d, images: search.masks });
            }
            Search::Exhausted => nodes = search.nodes,
            Search::Budget(reason) => return Err(Error::Exceeded { lower_bound: d, reason }),
        }
    }
    Err(Error::Exceeded { lower_bound: n.min(budget.d_max) + 1, reason: "d_max reached".into() })
}

/// Every labelled strict partial order on `1..=n`. Exhaustive over relation
/// sets, so capped at five elements.
pub fn all_labelled_posets(n: u32) -> Vec<Poset> {
    assert!((1..=5).contains(&n), "exhaustive enumeration capped at n = 5");
    let mut pairs = Vec::new();
    for a in 1..=n {
        for b in 1..=n {
            if a != b {
                pairs.push((a, b));
            }
        }
    }
    let mut out = Vec::new();
    let nn = n as usize;
    for mask in 0u64..1 << pairs.len() {
        let mut rel = [[false; 5]; 5];
        for (i, &(a, b)) in pairs.iter().enumerate() {
            if mask >> i & 1 == 1 {
                rel[a as usize - 1][b as usize - 1] = true;
            }
        }
        let mut ok = true;
        'check: for a in 0..nn {
            for b in 0..nn {
                if rel[a][b] && rel[b][a] {
                    ok = false;
                    break 'check;
                }
                if !rel[a][b] {
                    continue;
                }
                for c in 0..nn {
                    if rel[b][c] && !rel[a][c] {
                        ok = false;
                        break 'check;
                    }
                }
            }
        }
        if ok {
            let relations: Vec<(Elem, Elem)> = pairs
                .iter()
                .enumerate()
                .filter(|&(i, _)| mask >> i & 1 == 1)
                .map(|(_, &p)| p)
                .collect();
            out.push(Poset::from_closed(n, &relations));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layer::LayerPoset;
    use crate::realiser::verify_local_realiser;

    fn s_n(n: u32) -> Poset {
        LayerPoset::new(n, 1, n - 1).unwrap().to_poset().unwrap()
    }

    #[test]
    fn ldim_of_chains_is_one() {
        for n in 1..=5 {
            let r = exact_ldim(&Poset::chain(n), &SearchBudget::default()).unwrap();
            assert_eq!(r.value, 1, "chain of {n}");
        }
    }

    #[test]
    fn ldim_of_antichains_is_two() {
        for n in 2..=6 {
            let r = exact_ldim(&Poset::antichain(n), &SearchBudget::default()).unwrap();
            assert_eq!(r.value, 2, "antichain of {n}");
            let rep = verify_local_realiser(&Poset::antichain(n), &r.witness).unwrap();
            assert!(rep.valid);
            assert!(rep.max_multiplicity <= 2);
        }
    }

    #[test]
    fn ldim_of_standard_example() {
        let r = exact_ldim(&s_n(3), &SearchBudget::default()).unwrap();
        assert_eq!(r.value, 3);
        let rep = verify_local_realiser(&s_n(3), &r.witness).unwrap();
        assert!(rep.valid && rep.max_multiplicity == 3);
    }

    #[test]
    fn dim_small_cases() {
        assert_eq!(exact_dim(&Poset::chain(4)).unwrap().value, 1);
        assert_eq!(exact_dim(&Poset::antichain(2)).unwrap().value, 2);
        assert_eq!(exact_dim(&s_n(3)).unwrap().value, 3);
    }

    #[test]
    fn twodim_known_values() {
        for n in 2..=6 {
            assert_eq!(exact_twodim(&Poset::chain(n), &SearchBudget::default()).unwrap().value, n - 1);
        }
        assert_eq!(exact_twodim(&Poset::antichain(6), &SearchBudget::default()).unwrap().value, 4);
        assert_eq!(exact_twodim(&Poset::chain(1), &SearchBudget::default()).unwrap().value, 0);
    }

    #[test]
    fn twodim_witness_embeds() {
        let p = s_n(3);
        let r = exact_twodim(&p, &SearchBudget::default()).unwrap();
        for a in 1..=p.n() {
            for b in 1..=p.n() {
                if a != b {
                    let (ma, mb) = (r.images[a as usize - 1], r.images[b as usize - 1]);
                    assert_eq!(p.lt(a, b), ma & mb == ma && ma != mb);
                }
            }
        }
    }

    #[test]
    fn exceeded_reports_lower_bound() {
        let tight = SearchBudget { d_max: 2, ..SearchBudget::default() };
        match exact_ldim(&s_n(3), &tight) {
            Err(Error::Exceeded { lower_bound, .. }) => assert_eq!(lower_bound, 3),
            other => panic!("expected Exceeded, got {:?}", other.map(|r| r.value)),
        }
    }

    #[test]
    fn labelled_poset_counts() {
        assert_eq!(all_labelled_posets(1).len(), 1);
        assert_eq!(all_labelled_posets(2).len(), 3);
        assert_eq!(all_labelled_posets(3).len(), 19);
        assert_eq!(all_labelled_posets(4).len(), 219);
    }

    #[test]
    fn oracle_guard() {
        let p = Poset::antichain(9);
        assert!(exact_ldim(&p, &SearchBudget::default()).is_err());
    }
}
