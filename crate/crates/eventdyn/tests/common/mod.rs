//! Shared oracles for the integration suites: independent re-implementations
//! (different formulas, no shared code paths with the crate) that the
//! library's fast implementations are checked against.

#![allow(dead_code)]

use eventdyn::CountryCode;

/// Deterministic xorshift64* stream, independent of the crate's RNG.
pub struct TestRng(u64);

impl TestRng {
    pub fn new(seed: u64) -> Self {
        TestRng(seed.max(1))
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.0 = x;
        x.wrapping_mul(0x2545_f491_4f6c_dd1d)
    }

    /// Uniform in [0, 1).
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Uniform integer in [lo, hi].
    pub fn int(&mut self, lo: u64, hi: u64) -> u64 {
        lo + self.next_u64() % (hi - lo + 1)
    }

    /// Standard normal via Box–Muller.
    pub fn normal(&mut self) -> f64 {
        let u1 = self.uniform().max(1e-300);
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }
}

pub fn code(s: &str) -> CountryCode {
    CountryCode::new(s).unwrap()
}

/// The i-th synthetic country code: AA, AB, … ZZ.
pub fn nth_code(i: usize) -> CountryCode {
    assert!(i < 26 * 26);
    let bytes = [b'A' + (i / 26) as u8, b'A' + (i % 26) as u8];
    code(std::str::from_utf8(&bytes).unwrap())
}

/// Direct-formula burstiness oracle: single pass over raw day gaps, no
/// shared helpers with the crate.
pub fn burstiness_oracle(gaps: &[u64]) -> Option<f64> {
    if gaps.len() < 2 {
        return None;
    }
    let n = gaps.len() as f64;
    let sum: f64 = gaps.iter().map(|&g| g as f64).sum();
    let sum_sq: f64 = gaps.iter().map(|&g| (g * g) as f64).sum();
    let tau = sum / n;
    let sigma = (sum_sq / n - tau * tau).max(0.0).sqrt();
    Some((sigma - tau) / (sigma + tau))
}

/// Adaptive Simpson quadrature to ~1e-13, the reference integrator behind
/// the special-function oracles.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        ((b - a) / 6.0 * (fa + 4.0 * fm + fb), m, fm)
    }
    #[allow(clippy::too_many_arguments)] // threaded interval state, not an API
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        m: f64,
        fm: f64,
        eps: f64,
        depth: u32,
    ) -> f64 {
        let (left, lm, flm) = simpson(f, a, fa, m, fm);
        let (right, rm, frm) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * eps {
            left + right + delta / 15.0
        } else {
            recurse(f, a, fa, m, fm, left, lm, flm, 0.5 * eps, depth - 1)
                + recurse(f, m, fm, b, fb, right, rm, frm, 0.5 * eps, depth - 1)
        }
    }
    let (fa, fb) = (f(a), f(b));
    let (whole, m, fm) = simpson(f, a, fa, b, fb);
    recurse(f, a, fa, b, fb, whole, m, fm, 1e-13, 48)
}

/// Regularized incomplete beta by direct quadrature of the density; needs
/// a, b ≥ 1 so the integrand stays bounded.
pub fn inc_beta_oracle(a: f64, b: f64, x: f64) -> f64 {
    assert!(a >= 1.0 && b >= 1.0, "oracle grid keeps the integrand bounded");
    let density = |t: f64| t.powf(a - 1.0) * (1.0 - t).powf(b - 1.0);
    let full = integrate(&density, 0.0, 1.0);
    integrate(&density, 0.0, x) / full
}

/// Chi-square survival by quadrature; even df keeps Γ(df/2) an exact
/// factorial.
pub fn chi_squared_sf_oracle(x: f64, df: u32) -> f64 {
    assert!(df >= 2 && df.is_multiple_of(2), "oracle grid uses even df");
    let k = (df / 2) as i32;
    let mut gamma_k = 1.0; // (k−1)!
    for i in 2..k {
        gamma_k *= i as f64;
    }
    let norm = 2f64.powi(k) * gamma_k;
    let density = |t: f64| t.powi(k - 1) * (-t / 2.0).exp() / norm;
    1.0 - integrate(&density, 0.0, x)
}

/// Standard normal CDF by quadrature of the density from 0.
pub fn normal_cdf_oracle(z: f64) -> f64 {
    let density = |t: f64| (-0.5 * t * t).exp() / (std::f64::consts::TAU).sqrt();
    0.5 + integrate(&density, 0.0, z)
}

/// Squared Euclidean distances between rows.
pub fn squared_distances(rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = rows.len();
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            d[i][j] = rows[i]
                .iter()
                .zip(&rows[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
        }
    }
    d
}

/// One step of the from-scratch Ward oracle: the merge cost between leaf
/// sets A and B computed directly from the original squared Euclidean
/// distances via the centroid identity
/// ‖c_A − c_B‖² = T_AB/(|A||B|) − T_AA/(2|A|²) − T_BB/(2|B|²), with T_XY
/// the full double sum of squared distances, scaled by 2|A||B|/(|A|+|B|).
fn ward_cost(sq: &[Vec<f64>], a: &[usize], b: &[usize]) -> f64 {
    let sum_over = |xs: &[usize], ys: &[usize]| -> f64 {
        xs.iter().map(|&i| ys.iter().map(|&j| sq[i][j]).sum::<f64>()).sum()
    };
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let centroid_gap =
        sum_over(a, b) / (na * nb) - sum_over(a, a) / (2.0 * na * na) - sum_over(b, b) / (2.0 * nb * nb);
    2.0 * na * nb / (na + nb) * centroid_gap
}

/// A from-scratch Ward dendrogram: every step recomputes all pairwise merge
/// costs from the original matrix (no Lance–Williams recursion). Returns
/// (heights, partitions after each merge as sorted leaf sets).
pub fn naive_ward(rows: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<Vec<usize>>>) {
    let sq = squared_distances(rows);
    let mut clusters: Vec<Vec<usize>> = (0..rows.len()).map(|i| vec![i]).collect();
    let mut heights = Vec::new();
    let mut partitions = Vec::new();
    while clusters.len() > 1 {
        let mut best = (f64::INFINITY, 0usize, 0usize);
        for i in 0..clusters.len() {
            for j in (i + 1)..clusters.len() {
                let cost = ward_cost(&sq, &clusters[i], &clusters[j]);
                if cost < best.0 {
                    best = (cost, i, j);
                }
            }
        }
        let (cost, i, j) = best;
        // Keep deterministic order: merged cluster appended, like new ids.
        let b = clusters.remove(j);
        let mut a = clusters.remove(i);
        a.extend(b);
        a.sort_unstable();
        clusters.push(a);
        heights.push(cost.max(0.0).sqrt());
        let mut snapshot: Vec<Vec<usize>> = clusters.clone();
        snapshot.sort();
        partitions.push(snapshot);
    }
    (heights, partitions)
}

/// Partition from cluster ids, as sorted leaf sets, for order-free
/// comparison.
pub fn partition_of(ids: &[u32]) -> Vec<Vec<usize>> {
    let k = ids.iter().copied().max().unwrap_or(0) as usize;
    let mut sets = vec![Vec::new(); k];
    for (leaf, &id) in ids.iter().enumerate() {
        sets[id as usize - 1].push(leaf);
    }
    sets.retain(|s| !s.is_empty());
    for s in &mut sets {
        s.sort_unstable();
    }
    sets.sort();
    sets
}

/// Adjusted Rand index between two labelings of the same items.
pub fn adjusted_rand_index(a: &[u32], b: &[u32]) -> f64 {
    assert_eq!(a.len(), b.len());
    let n = a.len();
    let ka = *a.iter().max().unwrap() as usize;
    let kb = *b.iter().max().unwrap() as usize;
    let mut table = vec![vec![0u64; kb]; ka];
    for i in 0..n {
        table[a[i] as usize - 1][b[i] as usize - 1] += 1;
    }
    let choose2 = |v: u64| (v * v.saturating_sub(1) / 2) as f64;
    let sum_cells: f64 = table.iter().flatten().map(|&v| choose2(v)).sum();
    let sum_rows: f64 = table.iter().map(|row| choose2(row.iter().sum())).sum();
    let sum_cols: f64 = (0..kb)
        .map(|j| choose2(table.iter().map(|row| row[j]).sum()))
        .sum();
    let total = choose2(n as u64);
    let expected = sum_rows * sum_cols / total;
    let max_index = 0.5 * (sum_rows + sum_cols);
    if (max_index - expected).abs() < 1e-12 {
        return 1.0;
    }
    (sum_cells - expected) / (max_index - expected)
}
