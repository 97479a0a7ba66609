// SPDX-License-Identifier: Apache-2.0

//! Sequences `J_0(t)..J_{n-1}(t)` and `I_0(t)..I_{n-1}(t)` by backward
//! recurrence with a normalizing sum.

const RESCALE_ABOVE: f64 = 1e250;
/// Below this argument the power series is used instead of the recurrence.
const SERIES_BELOW: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Kind {
    J,
    I,
}

/// Values of the first `n` Bessel functions of the given kind at `t ≥ 0`.
pub(crate) fn sequence(kind: Kind, n: usize, t: f64) -> Vec<f64> {
    let mut out = vec![0.0; n];
    if n == 0 {
        return out;
    }
    if t == 0.0 {
        out[0] = 1.0;
        return out;
    }
    if t < SERIES_BELOW {
        return small_argument(kind, n, t);
    }
    let start = n + 15 + (1.3 * t).ceil() as usize;
    let mut vals = vec![0.0f64; start + 2];
    vals[start] = 1.0;
    for k in (1..=start).rev() {
        let ratio = 2.0 * k as f64 / t;
        if vals[k].abs() > RESCALE_ABOVE / ratio {
            for v in &mut vals[k..] {
                *v /= RESCALE_ABOVE;
            }
        }
        vals[k - 1] = match kind {
            Kind::J => ratio * vals[k] - vals[k + 1],
            Kind::I => ratio * vals[k] + vals[k + 1],
        };
    }
    match kind {
        Kind::J => {
            let norm = vals[0] + 2.0 * vals[2..=start].iter().step_by(2).sum::<f64>();
            for (o, v) in out.iter_mut().zip(&vals) {
                *o = v / norm;
            }
        }
        Kind::I => {
            // all terms are positive; normalize in log space so that large t
            // does not overflow before the division
            let sum = vals[0] + 2.0 * vals[1..=start].iter().sum::<f64>();
            let shift = t - sum.ln();
            for (o, v) in out.iter_mut().zip(&vals) {
                *o = if *v > 0.0 { (v.ln() + shift).exp() } else { 0.0 };
            }
        }
    }
    out
}

fn small_argument(kind: Kind, n: usize, t: f64) -> Vec<f64> {
    let half = 0.5 * t;
    let q = half * half;
    let sign = if kind == Kind::J { -1.0 } else { 1.0 };
    let mut lead = 1.0;
    (0..n)
        .map(|l| {
            if l > 0 {
                lead *= half / l as f64;
            }
            let mut term = lead;
            let mut sum = lead;
            for m in 1..=8 {
                term *= sign * q / (m as f64 * (m + l) as f64);
                sum += term;
            }
            sum
        })
        .collect()
}
