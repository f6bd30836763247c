//! Random ensembles, entropy, and the table of closed-form bounds. All
//! sampling runs on a fixed xorshift64* generator so every platform
//! reproduces the same posets bit for bit; experiment samples derive their
//! seeds from (seed, index), so parallel and sequential runs agree.

use serde::Serialize;

use crate::codec::crespelle_encode;
use crate::error::{Error, Result};
use crate::exact::{exact_ldim, SearchBudget};
use crate::layer::{binomial, k_subset_masks};
use crate::poset::{Elem, Poset};

/// xorshift64* with the 0x2545F4914F6CDD1D output multiplier.
pub struct Xorshift64Star {
    state: u64,
}

impl Xorshift64Star {
    /// The state must be nonzero; seed 0 is mapped to a fixed constant.
    pub fn new(seed: u64) -> Xorshift64Star {
        Xorshift64Star { state: if seed == 0 { 0x9E3779B97F4A7C15 } else { seed } }
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.state;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.state = x;
        x.wrapping_mul(0x2545F4914F6CDD1D)
    }

    /// Top bit of the next output.
    pub fn next_bit(&mut self) -> bool {
        self.next_u64() >> 63 != 0
    }

    /// Uniform in `0..bound`. The modulo bias is far below anything a
    /// desk-scale frequency test can see.
    pub fn below(&mut self, bound: u64) -> u64 {
        debug_assert!(bound > 0);
        self.next_u64() % bound
    }

    /// Uniform `k`-subset of `{1..=n}` as a bitmask, by partial
    /// Fisher-Yates on `1..=n`.
    pub fn k_subset(&mut self, n: u32, k: u32) -> u64 {
        debug_assert!(k <= n && n <= 64);
        let mut pool: Vec<u32> = (0..n).collect();
        let mut mask = 0u64;
        for i in 0..k as usize {
            let j = i + self.below((n as usize - i) as u64) as usize;
            pool.swap(i, j);
            mask |= 1 << pool[i];
        }
        mask
    }
}

/// Per-sample seed: splitmix64 finaliser over a golden-ratio-stepped index.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(index.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Shannon entropy in bits; zero-probability entries are skipped.
pub fn entropy(p: &[f64]) -> Result<f64> {
    let mut sum = 0.0;
    for &x in p {
        if x < 0.0 || !x.is_finite() {
            return Err(Error::NotADistribution(format!("entry {x} is not a probability")));
        }
        sum += x;
    }
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::NotADistribution(format!("entries sum to {sum}")));
    }
    Ok(p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.log2()).sum())
}

/// Random two-layer poset: bottoms `1..=floor(n/2)`, tops above them, each
/// (bottom, top) pair related independently with probability 1/2.
pub fn sample_two_layer(n: u32, seed: u64) -> Result<Poset> {
    if n == 0 {
        return Err(Error::Parameter("ensemble needs n >= 1".into()));
    }
    let bottoms = n / 2;
    let mut rng = Xorshift64Star::new(seed);
    let mut relations = Vec::new();
    for a in 1..=bottoms {
        for b in bottoms + 1..=n {
            if rng.next_bit() {
                relations.push((a, b));
            }
        }
    }
    Ok(Poset::from_closed(n, &relations))
}

/// Analytic entropy of the two-layer ensemble, in bits.
pub fn two_layer_entropy_bits(n: u32) -> f64 {
    ((n / 2) * n.div_ceil(2)) as f64
}

/// Random layer-model poset: `A` is every `ell`-subset of `1..=n`; each of
/// the `m` new top elements picks a uniform `k`-subset `X_b` and sits above
/// exactly the `ell`-sets inside it.
pub fn sample_layer_model(n: u32, ell: u32, k: u32, m: u32, seed: u64) -> Result<Poset> {
    if ell >= k || k > n || n > 64 || m < 1 {
        return Err(Error::Parameter(format!(
            "layer model needs ell < k <= n <= 64 and m >= 1, got (n={n}, ell={ell}, k={k}, m={m})"
        )));
    }
    let lower = k_subset_masks(n, ell);
    let a_count = lower.len() as u32;
    if a_count as u64 + m as u64 > 10_000 {
        return Err(Error::Parameter("layer model too large to materialise".into()));
    }
    let mut rng = Xorshift64Star::new(seed);
    let mut relations = Vec::new();
    for b in 0..m {
        let xb = rng.k_subset(n, k);
        for (i, &mask) in lower.iter().enumerate() {
            if mask & xb == mask {
                relations.push((i as Elem + 1, a_count + b + 1));
            }
        }
    }
    Ok(Poset::from_closed(a_count + m, &relations))
}

/// Analytic entropy of the layer model, in bits.
pub fn layer_model_entropy_bits(n: u32, k: u32, m: u32) -> f64 {
    m as f64 * log2_binomial(n, k)
}

/// Top-count choice used by the layer-model lower bound:
/// `floor(C(n,ell) * (log2 C(n,ell) - 1))`.
pub fn default_m(n: u32, ell: u32) -> Result<u32> {
    let c = binomial(n, ell);
    if c < 3 {
        return Err(Error::Parameter(format!(
            "C({n},{ell}) = {c} makes the top count nonpositive"
        )));
    }
    Ok((c as f64 * ((c as f64).log2() - 1.0)).floor() as u32)
}

/// Among top-side elements with identical down-sets, keeps the least id and
/// drops the rest; the bottom side is untouched. Ids are renumbered
/// consecutively in ascending old order.
pub fn dedup_neighbourhoods(p: &Poset, b_side: &[Elem]) -> Result<Poset> {
    let n = p.n();
    let mut is_b = vec![false; n as usize + 1];
    for &b in b_side {
        if b < 1 || b > n {
            return Err(Error::Range { id: b as u64, n: n as u64 });
        }
        is_b[b as usize] = true;
    }
    for (x, y) in p.relation_pairs() {
        if is_b[x as usize] || !is_b[y as usize] {
            return Err(Error::NotTwoLevel(format!(
                "relation {x} < {y} does not go from the bottom side to the designated top side"
            )));
        }
    }

    let mut seen = std::collections::HashSet::new();
    let mut keep = vec![false; n as usize + 1];
    for x in 1..=n {
        if !is_b[x as usize] {
            keep[x as usize] = true;
            continue;
        }
        let down: Vec<Elem> = (1..=n).filter(|&a| p.lt(a, x)).collect();
        if seen.insert(down) {
            keep[x as usize] = true;
        }
    }
    let survivors: Vec<Elem> = (1..=n).filter(|&x| keep[x as usize]).collect();
    let mut new_id = vec![0 as Elem; n as usize + 1];
    for (i, &x) in survivors.iter().enumerate() {
        new_id[x as usize] = i as Elem + 1;
    }
    let relations: Vec<(Elem, Elem)> = p
        .relation_pairs()
        .into_iter()
        .filter(|&(x, y)| keep[x as usize] && keep[y as usize])
        .map(|(x, y)| (new_id[x as usize], new_id[y as usize]))
        .collect();
    Ok(Poset::from_closed(survivors.len() as u32, &relations))
}

/// `log2 C(n, k)` without materialising the binomial.
pub fn log2_binomial(n: u32, k: u32) -> f64 {
    assert!(k <= n);
    let k = k.min(n - k);
    let mut acc = 0.0;
    for i in 1..=k as u64 {
        acc += ((n as u64 - k as u64 + i) as f64 / i as f64).log2();
    }
    acc
}

/// One evaluated bound.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Bound {
    pub value: f64,
    pub applicable: bool,
    /// Leading term of an asymptotic statement; never asserted against
    /// measurements.
    pub asymptotic: bool,
}

impl Bound {
    fn exact(value: f64) -> Bound {
        Bound { value, applicable: true, asymptotic: false }
    }

    fn leading(value: f64) -> Bound {
        Bound { value, applicable: true, asymptotic: true }
    }

    fn not_applicable() -> Bound {
        Bound { value: 0.0, applicable: false, asymptotic: false }
    }

    fn when(applicable: bool, value: f64) -> Bound {
        if applicable {
            Bound::exact(value)
        } else {
            Bound::not_applicable()
        }
    }
}

/// Every closed-form bound evaluated at `(n, ell, k)`, base-2 logs
/// throughout (natural log only where a formula says so).
#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub n: u32,
    pub ell: u32,
    pub k: u32,
    /// Entropy lower bound on the layers' local dimension, with the stated
    /// constant `log2 12`.
    pub lower_lk: Bound,
    /// Same bound with the sharper constant the derivation yields,
    /// `log2 6 + 1/C(n,ell)`.
    pub lower_lk_proof_c: Bound,
    /// Bipartite-graph construction upper bound on the layers' local
    /// dimension (general-`ell` form).
    pub upper_lk: Bound,
    /// Far-layers construction: `2 + max(ell, n - k)`.
    pub far_layers: Bound,
    /// Dimension upper bound for layer gap `k - ell`.
    pub brightwell: Bound,
    /// Consecutive-layers dimension bound `6 ceil(log3 n)`.
    pub brightwell_k1: Bound,
    /// Consecutive-layers dimension bound `2 min{j : 2 j! >= n}`.
    pub kostochka: Bound,
    /// Dimension lower bound `n - sqrt(n)` for `ell = 1`, `k >= 2 sqrt(n)`.
    pub dushnik_dim: Bound,
    /// 2-dimension of an `n`-antichain: least `m` with `C(m, m/2) >= n`.
    pub sperner_twodim: Bound,
    /// Expected local dimension of a uniform poset on `n` points:
    /// `n / (4 log2 3n)`.
    pub avg_ldim_lower: Bound,
    /// Expected 2-dimension of a uniform poset: `n/4 - ceil(log2 n)/n`.
    pub tdim_expected_lower: Bound,
    /// `(1 - alpha) n^alpha` with `alpha = log k / log n`.
    pub alpha_leading: Bound,
    /// Divisibility-order upper bound `4 ln 2 (log n)^2 / log log n`.
    pub lewis_souza_upper: Bound,
    /// `log log n` leading term for layers `(1, 2)`.
    pub loglog_leading: Bound,
}

impl BoundReport {
    pub fn entries(&self) -> Vec<(&'static str, Bound)> {
        vec![
            ("lower_lk", self.lower_lk),
            ("lower_lk_proof_c", self.lower_lk_proof_c),
            ("upper_lk", self.upper_lk),
            ("far_layers", self.far_layers),
            ("brightwell", self.brightwell),
            ("brightwell_k1", self.brightwell_k1),
            ("kostochka", self.kostochka),
            ("dushnik_dim", self.dushnik_dim),
            ("sperner_twodim", self.sperner_twodim),
            ("avg_ldim_lower", self.avg_ldim_lower),
            ("tdim_expected_lower", self.tdim_expected_lower),
            ("alpha_leading", self.alpha_leading),
            ("lewis_souza_upper", self.lewis_souza_upper),
            ("loglog_leading", self.loglog_leading),
        ]
    }
}

fn ceil_log2(n: u32) -> u32 {
    u32::BITS - (n - 1).leading_zeros()
}

/// Least `j` with `2 * j! >= n`.
fn kostochka_threshold(n: u32) -> u32 {
    let mut fact: u64 = 1;
    for j in 1.. {
        fact = fact.saturating_mul(j as u64);
        if 2u64.saturating_mul(fact) >= n as u64 {
            return j;
        }
    }
    unreachable!()
}

/// Least `m` with `C(m, floor(m/2)) >= n`.
fn sperner_threshold(n: u32) -> u32 {
    (0..).find(|&m| binomial(m, m / 2) >= n as u64).unwrap()
}

/// Evaluates every bound at `(n, ell, k)`; formulas outside their stated
/// hypotheses are flagged inapplicable rather than erroring.
pub fn bound_table(n: u32, ell: u32, k: u32) -> Result<BoundReport> {
    if n < 2 {
        return Err(Error::Parameter("bound table needs n >= 2".into()));
    }
    if ell >= k || k > n {
        return Err(Error::Parameter(format!(
            "bound table needs ell < k <= n, got (n={n}, ell={ell}, k={k})"
        )));
    }
    let nf = n as f64;
    let log_n = nf.log2();
    let loglog_n = log_n.log2();
    let gap = k - ell;

    let entropy_lower = |c: f64| {
        let l_ell = log2_binomial(n, ell);
        let l_k = log2_binomial(n, k);
        l_k / l_ell - l_k / (l_ell * l_ell) * (l_ell.log2() + c)
    };
    let lower_applicable = ell >= 1 && k < n;
    let lower_lk = Bound::when(lower_applicable, if lower_applicable { entropy_lower(12f64.log2()) } else { 0.0 });
    let proof_c = 6f64.log2() + (-log2_binomial(n, ell.max(1))).exp2();
    let lower_lk_proof_c =
        Bound::when(lower_applicable, if lower_applicable { entropy_lower(proof_c) } else { 0.0 });

    let upper_applicable = ell >= 1 && (ell as f64) < nf / log_n;
    let upper_lk = Bound::when(
        upper_applicable,
        nf / log_n + 2.0 * nf * (loglog_n + (ell.max(1) as f64).log2()) / (log_n * log_n) + 3.0,
    );

    Ok(BoundReport {
        n,
        ell,
        k,
        lower_lk,
        lower_lk_proof_c,
        upper_lk,
        far_layers: Bound::exact((2 + ell.max(n - k)) as f64),
        brightwell: Bound::exact((4 * gap * gap + 18 * gap) as f64 * nf.ln().ceil()),
        brightwell_k1: Bound::when(gap == 1, 6.0 * (nf.ln() / 3f64.ln()).ceil()),
        kostochka: Bound::when(gap == 1, 2.0 * kostochka_threshold(n) as f64),
        dushnik_dim: Bound::when(ell == 1 && (k as f64) >= 2.0 * nf.sqrt(), nf - nf.sqrt()),
        sperner_twodim: Bound::exact(sperner_threshold(n) as f64),
        avg_ldim_lower: Bound::exact(nf / (4.0 * (3.0 * nf).log2())),
        tdim_expected_lower: Bound::exact(nf / 4.0 - ceil_log2(n) as f64 / nf),
        alpha_leading: Bound::leading((1.0 - (k as f64).ln() / nf.ln()) * k as f64),
        lewis_souza_upper: Bound {
            value: if n >= 3 { 4.0 * 2f64.ln() * log_n * log_n / loglog_n } else { 0.0 },
            applicable: n >= 3,
            asymptotic: true,
        },
        loglog_leading: Bound::leading(loglog_n),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct AvgLdimReport {
    pub n: u32,
    pub samples: u32,
    pub mean_ldim: f64,
    /// `n / (4 log2 3n)`.
    pub lower_bound: f64,
    pub satisfied: bool,
}

impl AvgLdimReport {
    pub fn metrics(&self) -> Vec<(String, f64)> {
        vec![
            ("mean_ldim".into(), self.mean_ldim),
            ("lower_bound".into(), self.lower_bound),
            ("satisfied".into(), self.satisfied as u32 as f64),
        ]
    }
}

/// Samples the two-layer ensemble and compares the mean exact local
/// dimension with the entropy lower bound for uniform posets.
pub fn run_avg_ldim(
    n: u32,
    samples: u32,
    seed: u64,
    budget: &SearchBudget,
) -> Result<AvgLdimReport> {
    if samples == 0 {
        return Err(Error::Parameter("need at least one sample".into()));
    }
    let mut cache: std::collections::HashMap<Vec<(Elem, Elem)>, u32> =
        std::collections::HashMap::new();
    let mut total = 0u64;
    for i in 0..samples {
        let p = sample_two_layer(n, derive_seed(seed, i as u64))?;
        let key = p.relation_pairs();
        let value = match cache.get(&key) {
            Some(&v) => v,
            None => {
                let v = exact_ldim(&p, budget)?.value;
                cache.insert(key, v);
                v
            }
        };
        total += value as u64;
    }
    let mean_ldim = total as f64 / samples as f64;
    let lower_bound = n as f64 / (4.0 * (3.0 * n as f64).log2());
    Ok(AvgLdimReport { n, samples, mean_ldim, lower_bound, satisfied: mean_ldim >= lower_bound })
}

#[derive(Clone, Debug, Serialize)]
pub struct ShannonLengthReport {
    pub n: u32,
    pub samples: u32,
    pub mean_bits: f64,
    /// Analytic ensemble entropy `floor(n/2) * ceil(n/2)` bits.
    pub entropy_bits: f64,
    /// One-sided slack applied to the assertion.
    pub slack: f64,
    pub satisfied: bool,
}

impl ShannonLengthReport {
    pub fn metrics(&self) -> Vec<(String, f64)> {
        vec![
            ("mean_bits".into(), self.mean_bits),
            ("entropy_bits".into(), self.entropy_bits),
            ("slack".into(), self.slack),
            ("satisfied".into(), self.satisfied as u32 as f64),
        ]
    }
}

/// Samples the two-layer ensemble, encodes a minimal-multiplicity witness
/// realiser of each sample, and checks the mean bit cost against the
/// ensemble entropy (the source-coding lower bound, 2% one-sided slack).
pub fn run_shannon_length(
    n: u32,
    samples: u32,
    seed: u64,
    budget: &SearchBudget,
) -> Result<ShannonLengthReport> {
    if samples == 0 {
        return Err(Error::Parameter("need at least one sample".into()));
    }
    let mut cache: std::collections::HashMap<Vec<(Elem, Elem)>, f64> =
        std::collections::HashMap::new();
    let mut total_bits = 0.0;
    for i in 0..samples {
        let p = sample_two_layer(n, derive_seed(seed, i as u64))?;
        let key = p.relation_pairs();
        let bits = match cache.get(&key) {
            Some(&b) => b,
            None => {
                let witness = exact_ldim(&p, budget)?.witness.without_trivial_lists();
                let order: Vec<usize> = (0..witness.list_count() as usize).collect();
                let b = crespelle_encode(&witness, &order)?.bit_cost();
                cache.insert(key, b);
                b
            }
        };
        total_bits += bits;
    }
    let mean_bits = total_bits / samples as f64;
    let entropy_bits = two_layer_entropy_bits(n);
    let slack = 0.02;
    Ok(ShannonLengthReport {
        n,
        samples,
        mean_bits,
        entropy_bits,
        slack,
        satisfied: mean_bits >= entropy_bits * (1.0 - slack),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct UnimodalRow {
    pub k: u32,
    pub lower_lk: Bound,
    pub upper_lk: Bound,
    pub far_layers: Bound,
}

#[derive(Clone, Debug, Serialize)]
pub struct UnimodalReport {
    pub n: u32,
    pub ell: u32,
    pub rows: Vec<UnimodalRow>,
}

/// Tabulates the lower and upper formulas of `f_n(k)` over the whole layer
/// range, the scan behind the unimodality question.
pub fn run_unimodal(n: u32, ell: u32) -> Result<UnimodalReport> {
    if ell + 1 > n.saturating_sub(1) {
        return Err(Error::Parameter("no layers strictly between ell and n".into()));
    }
    let mut rows = Vec::new();
    for k in ell + 1..n {
        let t = bound_table(n, ell, k)?;
        rows.push(UnimodalRow {
            k,
            lower_lk: t.lower_lk,
            upper_lk: t.upper_lk,
            far_layers: t.far_layers,
        });
    }
    Ok(UnimodalReport { n, ell, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entropy_known_values() {
        assert_eq!(entropy(&[0.25; 4]).unwrap(), 2.0);
        assert_eq!(entropy(&[1.0, 0.0]).unwrap(), 0.0);
        assert_eq!(entropy(&[0.5, 0.25, 0.25]).unwrap(), 1.5);
        assert!(entropy(&[0.5, 0.4]).is_err());
        assert!(entropy(&[1.5, -0.5]).is_err());
    }

    #[test]
    fn entropy_of_uniform_powers() {
        for k in 1..=20 {
            let m = 1usize << k;
            let p = vec![1.0 / m as f64; m];
            assert!((entropy(&p).unwrap() - k as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn sampler_is_deterministic() {
        let a = sample_two_layer(5, 42).unwrap();
        let b = sample_two_layer(5, 42).unwrap();
        assert_eq!(a.relation_pairs(), b.relation_pairs());
        let c = sample_layer_model(4, 1, 2, 3, 7).unwrap();
        let d = sample_layer_model(4, 1, 2, 3, 7).unwrap();
        assert_eq!(c.relation_pairs(), d.relation_pairs());
    }

    #[test]
    fn layer_model_shape() {
        let p = sample_layer_model(4, 1, 2, 3, 99).unwrap();
        assert_eq!(p.n(), 7);
        for b in 5..=7 {
            let below = (1..=4).filter(|&a| p.lt(a, b)).count();
            assert_eq!(below, 2); // C(k, ell) = C(2, 1)
        }
    }

    #[test]
    fn default_m_examples() {
        assert_eq!(default_m(4, 1).unwrap(), 4);
        assert_eq!(default_m(5, 1).unwrap(), 6);
        assert!(default_m(2, 1).is_err());
    }

    #[test]
    fn dedup_keeps_least_id() {
        // two tops with the same down-set {1}, one with {2}
        let p = Poset::new(5, &[(1, 3), (1, 4), (2, 5)]).unwrap();
        let d = dedup_neighbourhoods(&p, &[3, 4, 5]).unwrap();
        assert_eq!(d.n(), 4);
        assert_eq!(d.relation_pairs(), vec![(1, 3), (2, 4)]);
        // all distinct: identity
        let q = Poset::new(4, &[(1, 3), (2, 4)]).unwrap();
        let dq = dedup_neighbourhoods(&q, &[3, 4]).unwrap();
        assert_eq!(dq.relation_pairs(), q.relation_pairs());
        // rejects a three-level poset
        let chain = Poset::chain(3);
        assert!(dedup_neighbourhoods(&chain, &[3]).is_err());
    }

    #[test]
    fn bound_table_spot_values() {
        let t = bound_table(4, 1, 2).unwrap();
        assert_eq!(t.kostochka.value, 4.0);
        assert!(t.kostochka.applicable);
        let t6 = bound_table(6, 1, 2).unwrap();
        assert_eq!(t6.sperner_twodim.value, 4.0);
        assert!((t6.avg_ldim_lower.value - 6.0 / (4.0 * 18f64.log2())).abs() < 1e-12);
        // far layers at top-gap 1
        let t_far = bound_table(6, 1, 5).unwrap();
        assert_eq!(t_far.far_layers.value, 3.0);
        // consecutive-layer bounds flip off when the gap widens
        assert!(!t_far.kostochka.applicable);
        assert!(!t_far.brightwell_k1.applicable);
    }

    #[test]
    fn bound_invariant_at_middle_layer() {
        for e in [10u32, 15, 20] {
            let n = 1u32 << e;
            let t = bound_table(n, 1, n / 2).unwrap();
            assert!(t.lower_lk.applicable && t.upper_lk.applicable);
            assert!(t.lower_lk.value.is_finite() && t.upper_lk.value.is_finite());
            assert!(t.lower_lk.value <= t.upper_lk.value);
        }
    }

    #[test]
    fn log2_binomial_agrees_with_exact() {
        for (n, k) in [(10u32, 3u32), (16, 8), (20, 1), (7, 0)] {
            let exact = (binomial(n, k) as f64).log2();
            assert!((log2_binomial(n, k) - exact).abs() < 1e-9);
        }
    }

    #[test]
    fn unimodal_scan_has_plateau_shape() {
        let rep = run_unimodal(64, 1).unwrap();
        assert_eq!(rep.rows.len(), 62);
        let mid = rep.rows.iter().find(|r| r.k == 32).unwrap();
        let top = rep.rows.iter().find(|r| r.k == 63).unwrap();
        assert!(mid.upper_lk.value > top.far_layers.value);
    }
}
