//! Slow, obviously-correct reference implementations used to check the
//! library. Nothing here calls into csei_core.
#![allow(dead_code, clippy::needless_range_loop)]

pub mod pca {
    pub const MAX_DIM: usize = 5;
    type Square = [[f64; MAX_DIM]; MAX_DIM];

    /// Column covariance with an n − 1 denominator.
    pub fn covariance(rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let n = rows.len();
        let p = rows[0].len();
        let means: Vec<f64> = (0..p)
            .map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / n as f64)
            .collect();
        let mut c = vec![vec![0.0; p]; p];
        for (i, ci) in c.iter_mut().enumerate() {
            for (j, cij) in ci.iter_mut().enumerate() {
                *cij = rows
                    .iter()
                    .map(|r| (r[i] - means[i]) * (r[j] - means[j]))
                    .sum::<f64>()
                    / (n - 1) as f64;
            }
        }
        c
    }

    fn det(mut m: Square, p: usize) -> f64 {
        let mut d = 1.0;
        for col in 0..p {
            let piv = (col..p)
                .max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))
                .unwrap();
            if m[piv][col] == 0.0 {
                return 0.0;
            }
            if piv != col {
                m.swap(piv, col);
                d = -d;
            }
            d *= m[col][col];
            for r in col + 1..p {
                let f = m[r][col] / m[col][col];
                for k in col..p {
                    m[r][k] -= f * m[col][k];
                }
            }
        }
        d
    }

    fn shifted(a: &[Vec<f64>], lambda: f64) -> Square {
        let mut m = [[0.0; MAX_DIM]; MAX_DIM];
        for i in 0..a.len() {
            for j in 0..a.len() {
                m[i][j] = a[i][j] - if i == j { lambda } else { 0.0 };
            }
        }
        m
    }

    /// det(A − λI)
    pub fn char_poly(a: &[Vec<f64>], lambda: f64) -> f64 {
        det(shifted(a, lambda), a.len())
    }

    /// Largest root of the characteristic polynomial of a symmetric
    /// positive semi-definite matrix: scan down from the Gershgorin bound
    /// for the first sign change, then bisect.
    pub fn largest_eigenvalue(a: &[Vec<f64>]) -> f64 {
        let bound = a
            .iter()
            .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
            * 1.001
            + 1e-300;
        const STEPS: usize = 20_000;
        let sign_top = char_poly(a, bound).signum();
        let mut hi = bound;
        let mut lo = bound;
        for k in 1..=STEPS {
            let x = bound * (1.0 - k as f64 / STEPS as f64);
            let v = char_poly(a, x);
            if v == 0.0 {
                return x;
            }
            if v.signum() != sign_top {
                lo = x;
                break;
            }
            hi = x;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if char_poly(a, mid).signum() == sign_top {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    fn solve(mut m: Square, mut b: [f64; MAX_DIM], p: usize) -> [f64; MAX_DIM] {
        for col in 0..p {
            let piv = (col..p)
                .max_by(|&x, &y| m[x][col].abs().total_cmp(&m[y][col].abs()))
                .unwrap();
            m.swap(piv, col);
            b.swap(piv, col);
            let d = if m[col][col] == 0.0 {
                1e-300
            } else {
                m[col][col]
            };
            for r in col + 1..p {
                let f = m[r][col] / d;
                for k in col..p {
                    m[r][k] -= f * m[col][k];
                }
                b[r] -= f * b[col];
            }
        }
        let mut x = [0.0; MAX_DIM];
        for r in (0..p).rev() {
            let s: f64 = (r + 1..p).map(|k| m[r][k] * x[k]).sum();
            let d = if m[r][r] == 0.0 { 1e-300 } else { m[r][r] };
            x[r] = (b[r] - s) / d;
        }
        x
    }

    /// Unit eigenvector for `lambda` by inverse iteration.
    pub fn eigenvector(a: &[Vec<f64>], lambda: f64) -> Vec<f64> {
        let p = a.len();
        let shift = lambda + 1e-10 * lambda.abs().max(1e-12);
        let m = shifted(a, shift);
        let mut v = [0.0; MAX_DIM];
        for (i, vi) in v.iter_mut().enumerate().take(p) {
            *vi = 1.0 + 0.1 * i as f64;
        }
        for _ in 0..6 {
            let x = solve(m, v, p);
            let norm = x[..p].iter().map(|t| t * t).sum::<f64>().sqrt();
            for i in 0..p {
                v[i] = x[i] / norm;
            }
        }
        v[..p].to_vec()
    }
}

pub mod extrema {
    /// Indices `t` where `x(t)` beats every in-bounds neighbour within `d`,
    /// with at least one neighbour on each side, and `x(t)` minus the window
    /// minimum is at least `p`. Candidates are then thinned highest-first.
    pub fn peaks(x: &[f64], d: usize, p: f64) -> Vec<(usize, f64)> {
        let n = x.len();
        let mut found = Vec::new();
        for t in 0..n {
            let mut left = 0;
            let mut right = 0;
            let mut strict = true;
            let mut lowest = x[t];
            for s in 0..n {
                let gap = s.abs_diff(t);
                if s == t || gap > d {
                    continue;
                }
                if s < t {
                    left += 1;
                } else {
                    right += 1;
                }
                if x[s] >= x[t] {
                    strict = false;
                }
                if x[s] < lowest {
                    lowest = x[s];
                }
            }
            let prom = x[t] - lowest;
            if strict && left > 0 && right > 0 && prom >= p {
                found.push((t, prom));
            }
        }
        let mut order: Vec<usize> = (0..found.len()).collect();
        order.sort_by(|&a, &b| {
            x[found[b].0]
                .partial_cmp(&x[found[a].0])
                .unwrap()
                .then(found[a].0.cmp(&found[b].0))
        });
        let mut keep: Vec<(usize, f64)> = Vec::new();
        for i in order {
            if keep.iter().all(|k| k.0.abs_diff(found[i].0) >= d) {
                keep.push(found[i]);
            }
        }
        keep.sort_by_key(|k| k.0);
        keep
    }

    /// Mirror image of [`peaks`]: strict window minima whose depth below
    /// the window maximum is at least `p`.
    pub fn valleys(x: &[f64], d: usize, p: f64) -> Vec<(usize, f64)> {
        let n = x.len();
        let mut found = Vec::new();
        for t in 0..n {
            let lo = t.saturating_sub(d);
            let hi = (t + d).min(n - 1);
            if lo == t || hi == t {
                continue;
            }
            let window = &x[lo..=hi];
            let below = window
                .iter()
                .enumerate()
                .all(|(k, v)| lo + k == t || *v > x[t]);
            let highest = window.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if below && highest - x[t] >= p {
                found.push((t, highest - x[t]));
            }
        }
        found
    }
}

pub mod pearson {
    fn mean(v: &[f64]) -> f64 {
        v.iter().sum::<f64>() / v.len() as f64
    }

    pub fn r(x: &[f64], y: &[f64]) -> f64 {
        let (mx, my) = (mean(x), mean(y));
        let num: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
        let sx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
        let sy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
        num / (sx * sy).sqrt()
    }

    fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, intervals: usize) -> f64 {
        let n = intervals + intervals % 2;
        let h = (b - a) / n as f64;
        let mut s = f(a) + f(b);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(a + i as f64 * h);
        }
        s * h / 3.0
    }

    /// Two-sided p-value for correlation `r` from `n` pairs, by numerically
    /// integrating the Student-t density with `n − 2` degrees of freedom.
    /// With t = √ν·tan θ the density becomes proportional to cos^(ν−1) θ,
    /// and |t| ≥ t₀ corresponds to θ ≥ asin|r|.
    pub fn p_value(r: f64, n: usize) -> f64 {
        let nu = (n - 2) as f64;
        if r.abs() >= 1.0 {
            return 0.0;
        }
        let theta0 = r.abs().asin();
        let half_pi = std::f64::consts::FRAC_PI_2;
        let f = |th: f64| th.cos().max(0.0).powf(nu - 1.0);
        let tail = simpson(f, theta0, half_pi, 200_000);
        let whole = simpson(f, 0.0, half_pi, 200_000);
        tail / whole
    }
}
