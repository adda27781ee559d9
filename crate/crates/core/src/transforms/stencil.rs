//! Finite-difference weights and uniform-grid derivatives.

/// Fornberg's recursion: weights `c[k][j]` such that
/// `f^(k)(z) ~ sum_j c[k][j] f(x_j)` for `k = 0..=m`.
pub(crate) fn fornberg(z: f64, x: &[f64], m: usize) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut c = vec![vec![0.0; n]; m + 1];
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// Width of the derivative stencils below (sixth order for centred first
/// and second derivatives).
pub(crate) const WIDTH: usize = 7;

/// `order`-th derivative (1 or 2) of uniformly sampled data. Interior points
/// use centred stencils; near the ends the stencil is shifted inwards, except
/// at a start point flagged as an even symmetry axis, where mirrored ghost
/// values `g(-r) = g(r)` are used.
pub(crate) fn grid_derivative(samples: &[f64], step: f64, order: usize, even_start: bool) -> Vec<f64> {
    let n = samples.len();
    assert!(n >= WIDTH, "derivative needs at least {WIDTH} samples");
    let half = (WIDTH / 2) as isize;
    let scale = step.powi(order as i32);
    // Weights for a stencil whose evaluation point sits at `offset` within
    // the window 0..WIDTH.
    let table: Vec<Vec<f64>> = (0..WIDTH)
        .map(|offset| {
            let nodes: Vec<f64> = (0..WIDTH).map(|j| j as f64 - offset as f64).collect();
            fornberg(0.0, &nodes, order)[order].clone()
        })
        .collect();
    let centred = &table[WIDTH / 2];
    (0..n)
        .map(|i| {
            let ii = i as isize;
            let acc: f64 = if ii - half >= 0 && ii + half < n as isize {
                (0..WIDTH)
                    .map(|j| centred[j] * samples[(ii - half) as usize + j])
                    .sum()
            } else if even_start && ii - half < 0 && ii + half < n as isize {
                (0..WIDTH)
                    .map(|j| centred[j] * samples[(ii - half + j as isize).unsigned_abs()])
                    .sum()
            } else {
                let lo = (ii - half).clamp(0, n as isize - WIDTH as isize) as usize;
                let w = &table[i - lo];
                (0..WIDTH).map(|j| w[j] * samples[lo + j]).sum()
            };
            acc / scale
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fornberg_reproduces_classic_stencils() {
        let c = fornberg(0.0, &[-1.0, 0.0, 1.0], 2);
        assert!((c[1][0] + 0.5).abs() < 1e-15 && (c[1][2] - 0.5).abs() < 1e-15);
        assert!((c[2][0] - 1.0).abs() < 1e-15 && (c[2][1] + 2.0).abs() < 1e-15);
    }

    #[test]
    fn derivatives_of_sextics_are_exact() {
        let h = 0.05;
        let g: Vec<f64> = (0..40).map(|k| (k as f64 * h).powi(6)).collect();
        let d1 = grid_derivative(&g, h, 1, false);
        let d2 = grid_derivative(&g, h, 2, false);
        for (k, (a, b)) in d1.iter().zip(&d2).enumerate() {
            let r = k as f64 * h;
            assert!((a - 6.0 * r.powi(5)).abs() < 1e-8, "{k}");
            assert!((b - 30.0 * r.powi(4)).abs() < 1e-6, "{k}");
        }
    }

    #[test]
    fn even_extension_at_origin() {
        let h = 0.01;
        let g: Vec<f64> = (0..50).map(|k| (-(k as f64 * h).powi(2)).exp()).collect();
        let d1 = grid_derivative(&g, h, 1, true);
        assert!(d1[0].abs() < 1e-12);
        assert!((d1[1] + 2.0 * h * (-h * h).exp()).abs() < 1e-11);
    }
}
