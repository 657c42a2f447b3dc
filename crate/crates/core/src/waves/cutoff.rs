use serde::{Deserialize, Serialize};

/// Scale of the odd cutoff `θ`: identity on `|s| ≤ δ1`, zero on `|s| ≥ 3δ1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffParams {
    pub delta1: f64,
}

impl Default for CutoffParams {
    fn default() -> Self {
        Self { delta1: 0.2 }
    }
}

const SEG: f64 = 1.0 / 3.0;

fn smooth(y: f64) -> f64 {
    y * y * (3.0 - 2.0 * y)
}

/// `∫_0^y smooth`.
fn smooth_int(y: f64) -> f64 {
    y * y * y - 0.5 * y * y * y * y
}

// On the blend the slope θ' = g(x), x = (s − δ1)/(2δ1) ∈ [0, 1], ramps
// 1 → −1, holds −1, then relaxes −1 → 0 in three equal pieces. The pieces
// are glued with zero-slope cubics, so θ is C² with |θ'| ≤ 1, and
// ∫_0^1 g = −1/2 brings θ back to exactly zero at s = 3δ1.
fn slope(x: f64) -> f64 {
    if x < SEG {
        1.0 - 2.0 * smooth(x / SEG)
    } else if x < 2.0 * SEG {
        -1.0
    } else {
        -1.0 + smooth((x - 2.0 * SEG) / SEG)
    }
}

fn slope_int(x: f64) -> f64 {
    if x < SEG {
        x - 2.0 * SEG * smooth_int(x / SEG)
    } else if x < 2.0 * SEG {
        -(x - SEG)
    } else {
        -SEG - (x - 2.0 * SEG) + SEG * smooth_int((x - 2.0 * SEG) / SEG)
    }
}

pub fn theta(s: f64, p: CutoffParams) -> f64 {
    let d = p.delta1;
    let a = s.abs();
    let v = if a <= d {
        a
    } else if a >= 3.0 * d {
        0.0
    } else {
        d + 2.0 * d * slope_int((a - d) / (2.0 * d))
    };
    v.copysign(s)
}

pub fn theta_prime(s: f64, p: CutoffParams) -> f64 {
    let d = p.delta1;
    let a = s.abs();
    if a <= d {
        1.0
    } else if a >= 3.0 * d {
        0.0
    } else {
        slope((a - d) / (2.0 * d))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const P: CutoffParams = CutoffParams { delta1: 0.1 };

    #[test]
    fn identity_and_zero_regions() {
        assert_eq!(theta(0.05, P), 0.05);
        assert_eq!(theta(0.5, P), 0.0);
        assert_eq!(theta(-0.1, P), -0.1);
        assert_eq!(theta(0.31, P), 0.0);
        assert!(theta(0.3 - 1e-9, P).abs() < 1e-12);
    }

    #[test]
    fn sampled_invariants() {
        for d in [0.1, 0.2, 1.0 / 3.0] {
            let p = CutoffParams { delta1: d };
            let h = 1e-3;
            let mut s = -4.0 * d;
            let mut prev_d1 = theta_prime(s, p);
            while s < 4.0 * d {
                let t = theta(s, p);
                assert_eq!(theta(-s, p), -t);
                let tp = theta_prime(s, p);
                assert!(tp.abs() <= 1.0 + 1e-15);
                // Slope agrees with a central difference of θ.
                let fd = (theta(s + 1e-7, p) - theta(s - 1e-7, p)) / 2e-7;
                assert!((fd - tp).abs() < 1e-5, "s={s} fd={fd} tp={tp}");
                // θ' is Lipschitz (θ is C^{1,1} at least; C² by construction).
                assert!((tp - prev_d1).abs() <= 2.0 * 3.0 * 1.5 / (2.0 * d) * 1e-3 / SEG + 1e-12);
                prev_d1 = tp;
                s += h;
            }
        }
    }

    #[test]
    fn second_derivative_is_continuous_at_the_joints() {
        let p = CutoffParams { delta1: 0.2 };
        let second = |s: f64| (theta_prime(s + 1e-7, p) - theta_prime(s - 1e-7, p)) / 2e-7;
        for joint in [0.2, 0.2 + 0.4 / 3.0, 0.2 + 0.8 / 3.0, 0.6] {
            // |θ''| reaches about 22 inside the blend; at the joints it vanishes.
            assert!(second(joint - 1e-6).abs() < 1e-2 && second(joint + 1e-6).abs() < 1e-2);
        }
    }

    proptest! {
        #[test]
        fn odd_and_bounded(s in -2.0f64..2.0, d in 0.01f64..0.33) {
            let p = CutoffParams { delta1: d };
            prop_assert_eq!(theta(-s, p), -theta(s, p));
            prop_assert!(theta(s, p).abs() <= 1.21 * d);
            prop_assert!(theta_prime(s, p).abs() <= 1.0);
        }
    }
}
