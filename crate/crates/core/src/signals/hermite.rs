use std::f64::consts::PI;

/// Physicists' Hermite polynomial H_l(t) by the three-term recurrence
/// `H_{l+1} = 2t H_l − 2l H_{l−1}`.
pub fn hermite_poly(l: u32, t: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, 2.0 * t);
    if l == 0 {
        return prev;
    }
    for k in 1..l {
        let next = 2.0 * t * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Normalized Hermite function `u_l(t) = (l! 2^l √π)^{-1/2} e^{-t²/2} H_l(t)`.
///
/// Runs the recurrence on the normalized functions directly,
/// `u_{l+1} = √(2/(l+1)) t u_l − √(l/(l+1)) u_{l−1}`, so no factorial is ever
/// formed. Tested for l ≤ 60.
pub fn hermite_fn(l: u32, t: f64) -> f64 {
    let u0 = PI.powf(-0.25) * (-0.5 * t * t).exp();
    if l == 0 {
        return u0;
    }
    let (mut prev, mut cur) = (u0, 2f64.sqrt() * t * u0);
    for k in 1..l {
        let k = k as f64;
        let next = (2.0 / (k + 1.0)).sqrt() * t * cur - (k / (k + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}
