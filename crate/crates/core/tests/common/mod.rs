//! Independent oracles for the acceptance suite.

/// Coefficients `[c0, c1, …, c_{n-1}]` of the monic characteristic polynomial
/// `det(xI − M) = xⁿ + c_{n−1}xⁿ⁻¹ + … + c0`, for `n ≤ 3`, by cofactor expansion.
pub fn characteristic_polynomial(m: &[Vec<u64>]) -> Vec<f64> {
    let a = |i: usize, j: usize| m[i][j] as f64;
    match m.len() {
        1 => vec![-a(0, 0)],
        2 => vec![a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0), -(a(0, 0) + a(1, 1))],
        3 => {
            let trace = a(0, 0) + a(1, 1) + a(2, 2);
            let minors = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0) + a(0, 0) * a(2, 2)
                - a(0, 2) * a(2, 0)
                + a(1, 1) * a(2, 2)
                - a(1, 2) * a(2, 1);
            let det = a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1))
                - a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0))
                + a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
            vec![-det, minors, -trace]
        }
        n => panic!("characteristic polynomial oracle handles n ≤ 3, got {n}"),
    }
}

fn eval(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(1.0, |acc, &c| acc * x + c)
}

/// Largest real root of the monic polynomial, for degree ≤ 3.
///
/// Quadratics use the closed form. For cubics the largest real root lies at
/// or beyond the largest real critical point (Gauss-Lucas, since the root of
/// maximal modulus is real here), where the cubic is increasing, so bisection
/// on `[critical point, Cauchy bound]` finds it.
pub fn largest_real_root(coeffs: &[f64]) -> f64 {
    match coeffs.len() {
        1 => -coeffs[0],
        2 => {
            let (c0, c1) = (coeffs[0], coeffs[1]);
            let disc = (c1 * c1 - 4.0 * c0).max(0.0);
            (-c1 + disc.sqrt()) / 2.0
        }
        3 => {
            let (c1, c2) = (coeffs[1], coeffs[2]);
            let bound = 1.0 + coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
            // p'(x) = 3x² + 2c2·x + c1
            let disc = 4.0 * c2 * c2 - 12.0 * c1;
            let mut lo = if disc >= 0.0 {
                (-2.0 * c2 + disc.sqrt()) / 6.0
            } else {
                -bound
            };
            let mut hi = bound;
            if eval(coeffs, lo) > 0.0 {
                // the critical point is a local max above the axis: the only root is below
                lo = -bound;
                hi = (-2.0 * c2 - disc.max(0.0).sqrt()) / 6.0;
            }
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if eval(coeffs, mid) <= 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        }
        n => panic!("root oracle handles degree ≤ 3, got {n}"),
    }
}

/// `(I + M)^{n−1}` is entrywise positive.
pub fn irreducible(m: &[Vec<u64>]) -> bool {
    let n = m.len();
    let mut reach: Vec<Vec<bool>> = (0..n)
        .map(|i| (0..n).map(|j| i == j || m[i][j] > 0).collect())
        .collect();
    let step = reach.clone();
    for _ in 2..n {
        reach = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (0..n).any(|k| reach[i][k] && step[k][j]))
                    .collect()
            })
            .collect();
    }
    reach.iter().all(|row| row.iter().all(|&b| b))
}

/// Every `n × n` matrix with entries in `0..=max`.
pub fn all_matrices(n: usize, max: u64) -> impl Iterator<Item = Vec<Vec<u64>>> {
    let base = max + 1;
    (0..base.pow((n * n) as u32)).map(move |mut code| {
        let mut m = vec![vec![0; n]; n];
        for entry in m.iter_mut().flatten() {
            *entry = code % base;
            code /= base;
        }
        m
    })
}

/// Explicit enumeration of `{(i_1, …, i_k) : r ≤ i_1 ≤ … ≤ i_k ≤ m}`.
pub fn index_tuples(k: usize, r: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|t: Vec<usize>| {
                let lo = t.last().copied().unwrap_or(r);
                (lo..=m).map(move |x| {
                    let mut u = t.clone();
                    u.push(x);
                    u
                })
            })
            .collect();
    }
    out
}
