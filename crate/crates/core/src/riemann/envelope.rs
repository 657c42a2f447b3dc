/// Lower convex envelope of the piecewise-linear interpolant of
/// `(taus[k], f[k])`, evaluated at the nodes, together with its slope:
/// `sigma[k]` is the left slope at node `k` and `sigma[0]` the first chord
/// slope. Computed with one monotone-chain scan.
pub fn lower_convex_envelope(taus: &[f64], f: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let m = taus.len();
    assert_eq!(m, f.len());
    assert!(taus.windows(2).all(|w| w[1] > w[0]), "abscissae must be strictly increasing");
    if m == 1 {
        return (f.to_vec(), vec![0.0]);
    }
    let mut hull: Vec<usize> = Vec::with_capacity(m);
    for k in 0..m {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            // Drop b unless it lies strictly below the chord a → k.
            let cross = (taus[b] - taus[a]) * (f[k] - f[a]) - (f[b] - f[a]) * (taus[k] - taus[a]);
            if cross <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(k);
    }
    let mut conv = vec![0.0; m];
    let mut sigma = vec![0.0; m];
    for w in hull.windows(2) {
        let (a, b) = (w[0], w[1]);
        let slope = (f[b] - f[a]) / (taus[b] - taus[a]);
        conv[a] = f[a];
        for k in a + 1..=b {
            conv[k] = if k == b { f[b] } else { f[a] + slope * (taus[k] - taus[a]) };
            sigma[k] = slope;
        }
    }
    sigma[0] = sigma[1];
    (conv, sigma)
}

/// Upper concave envelope; `sigma` is its (nonincreasing) left slope.
pub fn upper_concave_envelope(taus: &[f64], f: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let neg: Vec<f64> = f.iter().map(|x| -x).collect();
    let (c, s) = lower_convex_envelope(taus, &neg);
    (c.into_iter().map(|x| -x).collect(), s.into_iter().map(|x| -x).collect())
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use proptest::prelude::*;

    /// O(M²) oracle: the envelope at a node is the lowest chord value over
    /// all node pairs bracketing it.
    pub(crate) fn brute_force(taus: &[f64], f: &[f64]) -> Vec<f64> {
        let m = taus.len();
        (0..m)
            .map(|k| {
                let mut best = f[k];
                for a in 0..=k {
                    for b in k..m {
                        if a == b {
                            continue;
                        }
                        let th = (taus[k] - taus[a]) / (taus[b] - taus[a]);
                        best = best.min((1.0 - th) * f[a] + th * f[b]);
                    }
                }
                best
            })
            .collect()
    }

    fn grid(a: f64, b: f64, m: usize) -> Vec<f64> {
        (0..m).map(|k| a + (b - a) * k as f64 / (m - 1) as f64).collect()
    }

    #[test]
    fn convex_input_is_its_own_envelope() {
        let t = grid(0.0, 1.0, 101);
        let f: Vec<f64> = t.iter().map(|x| x * x).collect();
        let (c, s) = lower_convex_envelope(&t, &f);
        assert_eq!(c, f);
        assert!(s.windows(2).skip(1).all(|w| w[1] > w[0]));
    }

    #[test]
    fn concave_input_collapses_to_the_chord() {
        let t = grid(0.0, 1.0, 101);
        let f: Vec<f64> = t.iter().map(|x| -x * x).collect();
        let (c, s) = lower_convex_envelope(&t, &f);
        for k in 0..t.len() {
            assert!((c[k] + t[k]).abs() < 1e-15);
            assert!(((f[k] - c[k]) - (t[k] - t[k] * t[k])).abs() < 1e-15);
            assert!((s[k] + 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn cubic_matches_brute_force() {
        let t = grid(0.0, 2.0, 201);
        let f: Vec<f64> = t.iter().map(|x| x * x * x - 3.0 * x * x + 2.0 * x).collect();
        let (c, _) = lower_convex_envelope(&t, &f);
        let o = brute_force(&t, &f);
        for k in 0..t.len() {
            assert!((c[k] - o[k]).abs() <= 1e-12);
        }
        // f is concave on [0, 1]: the envelope leaves the origin along a
        // tangent chord and only follows f on the convex part.
        assert_eq!((c[0], c[200]), (f[0], f[200]));
        assert!(c[50] < f[50] - 0.1);
        assert_eq!(c[180], f[180]);
    }

    #[test]
    fn concave_envelope_mirrors() {
        let t = grid(-1.0, 0.0, 51);
        let f: Vec<f64> = t.iter().map(|x| x * x).collect();
        let (c, s) = upper_concave_envelope(&t, &f);
        for k in 0..t.len() {
            assert!(c[k] >= f[k] - 1e-15);
            assert!((s[k] + 1.0).abs() < 1e-13);
        }
    }

    proptest! {
        #[test]
        fn envelope_properties(vals in prop::collection::vec(-1.0f64..1.0, 2..60)) {
            let t = grid(0.0, 1.0, vals.len());
            let (c, s) = lower_convex_envelope(&t, &vals);
            let (cc, _) = lower_convex_envelope(&t, &c);
            let o = brute_force(&t, &vals);
            for k in 0..t.len() {
                prop_assert!(c[k] <= vals[k]);
                prop_assert!((cc[k] - c[k]).abs() <= 1e-14);
                prop_assert!((c[k] - o[k]).abs() <= 1e-12);
            }
            prop_assert!(s.windows(2).all(|w| w[1] >= w[0] - 1e-12));
        }
    }
}
