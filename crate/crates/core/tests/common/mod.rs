//! Reference computations for tests. Nothing here calls into the library's
//! numerical code paths.

#![allow(dead_code)]

use std::time::Instant;

/// Double-centered Gram matrix of a distance matrix given as nested vectors.
pub fn double_center(d: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = d.len();
    let sq: Vec<Vec<f64>> = d.iter().map(|r| r.iter().map(|v| v * v).collect()).collect();
    let mut b = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            let mut s = sq[i][j];
            s -= (0..n).map(|k| sq[i][k]).sum::<f64>() / n as f64;
            s -= (0..n).map(|k| sq[k][j]).sum::<f64>() / n as f64;
            s += sq.iter().flatten().sum::<f64>() / (n * n) as f64;
            b[i][j] = -0.5 * s;
        }
    }
    b
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, descending.
pub fn jacobi_eigenvalues(a: &[Vec<f64>]) -> Vec<f64> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i][j] * m[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if m[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[k][p], m[k][q]);
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[p][k], m[q][k]);
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| m[i][i]).collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev
}

/// Spectrum of a distance configuration via the reference route.
pub fn oracle_spectrum(d: &[Vec<f64>]) -> Vec<f64> {
    jacobi_eigenvalues(&double_center(d))
}

/// Continuous clustering by the literal ordered-triple sum.
pub fn naive_clustering(d: &[Vec<f64>]) -> f64 {
    let n = d.len();
    let mut total = 0.0;
    let mut count = 0usize;
    for i in 0..n {
        for j in 0..n {
            if j != i {
                total += d[i][j];
                count += 1;
            }
        }
    }
    let mean = total / count as f64;
    let v = |i: usize, j: usize| (-d[i][j] / mean).exp();
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if i != j && j != k && i != k {
                    sum += v(i, j) * v(j, k) * v(i, k);
                }
            }
        }
    }
    sum / (n * (n - 1) * (n - 2)) as f64
}

/// Decodes a Prüfer sequence into the edge list of a labeled tree.
pub fn prufer_edges(seq: &[usize], n: usize) -> Vec<(usize, usize)> {
    let mut degree = vec![1usize; n];
    for &s in seq {
        degree[s] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &s in seq {
        let leaf = (0..n).find(|&v| degree[v] == 1).unwrap();
        edges.push((leaf.min(s), leaf.max(s)));
        degree[leaf] -= 1;
        degree[s] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    edges.push((rest[0], rest[1]));
    edges
}

/// Minimum spanning tree weight and edge set by enumerating all `n^(n-2)`
/// labeled trees. Returns every minimal edge set (sorted).
pub fn brute_force_mst(d: &[Vec<f64>]) -> (f64, Vec<Vec<(usize, usize)>>) {
    let n = d.len();
    if n == 2 {
        return (d[0][1], vec![vec![(0, 1)]]);
    }
    let len = n - 2;
    let total = n.pow(len as u32);
    let mut best = f64::INFINITY;
    let mut argbest: Vec<Vec<(usize, usize)>> = Vec::new();
    let mut seq = vec![0usize; len];
    for code in 0..total {
        let mut c = code;
        for s in seq.iter_mut() {
            *s = c % n;
            c /= n;
        }
        let mut edges = prufer_edges(&seq, n);
        let w: f64 = edges.iter().map(|&(i, j)| d[i][j]).sum();
        edges.sort_unstable();
        if w < best - 1e-12 {
            best = w;
            argbest = vec![edges];
        } else if (w - best).abs() <= 1e-12 {
            argbest.push(edges);
        }
    }
    (best, argbest)
}

fn ranks(xs: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..xs.len()).collect();
    idx.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut r = vec![0.0; xs.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && xs[idx[j + 1]] == xs[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for k in i..=j {
            r[idx[k]] = avg;
        }
        i = j + 1;
    }
    r
}

/// Spearman rank correlation (average ranks for ties).
pub fn spearman(xs: &[f64], ys: &[f64]) -> f64 {
    let (rx, ry) = (ranks(xs), ranks(ys));
    let n = rx.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    cov / (vx * vy).sqrt()
}

/// Prints one acceptance line and returns whether it passed.
pub fn report(id: &str, name: &str, passed: bool, detail: &str, started: Instant) -> bool {
    println!(
        "[{}] criterion {id}: {name} ({detail}; {:.2}s)",
        if passed { "PASS" } else { "FAIL" },
        started.elapsed().as_secs_f64()
    );
    passed
}

/// Tiny deterministic generator for test fixtures (SplitMix64).
pub struct SplitMix(pub u64);

impl SplitMix {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform on [0, 1).
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn range(&mut self, lo: usize, hi: usize) -> usize {
        lo + (self.next_u64() % (hi - lo) as u64) as usize
    }
}
