use crate::error::{Error, Result};

/// Below this the elementary form loses digits to cancellation.
pub const SERIES_THRESHOLD: f64 = 0.05;

fn series(x: f64) -> f64 {
    let mut sum = 0.0;
    let mut xn = 1.0;
    for n in 0..200 {
        let nf = n as f64;
        let term = 2.0 * xn / ((nf + 1.0) * (nf + 2.0));
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
        xn *= x;
    }
    sum
}

/// ₂F₁(1, 1; 3; x) for 0 ≤ x < 1.
pub fn hyp2f1_113(x: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&x) {
        return Err(Error::domain("hyp2f1_113", format!("requires 0 <= x < 1, got {x}")));
    }
    Ok(hyp2f1_113_split(x, 1.0 - x))
}

/// ₂F₁(1, 1; 3; x) with the complement `one_minus_x = 1 − x` supplied by the
/// caller, who can often form it without cancellation. Accepts x = 1
/// (value 2, the Abel limit).
pub(crate) fn hyp2f1_113_split(x: f64, one_minus_x: f64) -> f64 {
    if x < SERIES_THRESHOLD {
        return series(x);
    }
    if one_minus_x <= 0.0 {
        return 2.0;
    }
    2.0 * (x + one_minus_x * one_minus_x.ln()) / (x * x)
}
