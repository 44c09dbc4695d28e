use std::f64::consts::{PI, SQRT_2};

/// Uniform bound sup_j sup_t |φ_j(t)| of the trigonometric basis.
pub const TRIG_BASIS_BOUND: f64 = SQRT_2;

/// Trigonometric orthonormal basis of L²([0, 1]), 0-based:
/// φ_0 = 1, φ_{2m-1}(t) = √2 sin(2πmt), φ_{2m}(t) = √2 cos(2πmt) for m ≥ 1.
pub fn trig_basis_eval(j: usize, t: f64) -> f64 {
    if j == 0 {
        return 1.0;
    }
    let m = j.div_ceil(2) as f64;
    let arg = 2.0 * PI * m * t;
    if j % 2 == 1 {
        SQRT_2 * arg.sin()
    } else {
        SQRT_2 * arg.cos()
    }
}

/// Fills `out` with φ_0(t), …, φ_{out.len()-1}(t).
///
/// Uses the angle-addition recurrence, so only one `sin_cos` call is made.
pub fn trig_basis_prefix(t: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = 1.0;
    let (s1, c1) = (2.0 * PI * t).sin_cos();
    let (mut s, mut c) = (s1, c1);
    let mut j = 1;
    while j < out.len() {
        out[j] = SQRT_2 * s;
        if j + 1 < out.len() {
            out[j + 1] = SQRT_2 * c;
        }
        let next_s = s * c1 + c * s1;
        c = c * c1 - s * s1;
        s = next_s;
        j += 2;
    }
}
