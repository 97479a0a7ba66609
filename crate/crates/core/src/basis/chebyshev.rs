// SPDX-License-Identifier: Apache-2.0

//! Monomial coefficients of Chebyshev polynomials of the first kind.

use std::io::Write;

use crate::error::{Error, Result};

/// Largest degree accepted by [`chebyshev_coeffs`].
pub const MAX_DEGREE: usize = 1000;

/// Row `k` holds `T_{k,0..=k}` with `T_k(x) = Σ_ℓ T_{k,ℓ} x^ℓ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebyshevCoeffTable {
    rows: Vec<Vec<f64>>,
}

impl ChebyshevCoeffTable {
    /// Highest degree in the table.
    pub fn degree(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn row(&self, k: usize) -> &[f64] {
        &self.rows[k]
    }

    pub fn get(&self, k: usize, l: usize) -> f64 {
        self.rows[k].get(l).copied().unwrap_or(0.0)
    }

    /// `T_k(x)` by Horner on the stored coefficients.
    pub fn eval(&self, k: usize, x: f64) -> f64 {
        self.rows[k].iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    /// One CSV record per degree: `k, T_{k,0}, …, T_{k,k}`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().flexible(true).from_writer(out);
        for (k, row) in self.rows.iter().enumerate() {
            let mut rec = vec![k.to_string()];
            rec.extend(row.iter().map(|c| format!("{c}")));
            w.write_record(&rec)?;
        }
        w.flush().map_err(|source| Error::Io {
            path: "<csv>".into(),
            source,
        })
    }
}

/// Builds rows `0..=max_degree` from `T_{k+1} = 2x T_k − T_{k−1}` in
/// coefficient space.
pub fn chebyshev_coeffs(max_degree: usize) -> Result<ChebyshevCoeffTable> {
    if max_degree > MAX_DEGREE {
        return Err(Error::contract(format!(
            "chebyshev_coeffs: degree {max_degree} exceeds {MAX_DEGREE}"
        )));
    }
    let mut rows: Vec<Vec<f64>> = vec![vec![1.0]];
    if max_degree >= 1 {
        rows.push(vec![0.0, 1.0]);
    }
    for k in 1..max_degree {
        let mut next = vec![0.0; k + 2];
        for (l, &c) in rows[k].iter().enumerate() {
            next[l + 1] += 2.0 * c;
        }
        for (l, &c) in rows[k - 1].iter().enumerate() {
            next[l] -= c;
        }
        if next.iter().any(|c| !c.is_finite()) {
            return Err(Error::NumericOverflow(format!(
                "Chebyshev coefficients of degree {} overflow f64",
                k + 1
            )));
        }
        rows.push(next);
    }
    Ok(ChebyshevCoeffTable { rows })
}
