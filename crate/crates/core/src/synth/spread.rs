//! Direct-sequence spreading with Walsh codes.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Row `index` of the Sylvester Hadamard matrix of order `len` (a power of two).
pub fn walsh_code(len: usize, index: usize) -> Vec<i8> {
    assert!(len.is_power_of_two() && index < len);
    (0..len)
        .map(|k| if (index & k).count_ones() % 2 == 0 { 1 } else { -1 })
        .collect()
}

/// `out[i * L + k] = symbols[i] * code[k]`.
pub fn cdma_spread(symbols: &[Complex64], code: &[i8]) -> Result<Vec<Complex64>> {
    if code.len() < 2 {
        return Err(Error::invalid_input(format!(
            "spreading code needs at least 2 chips, got {}",
            code.len()
        )));
    }
    if code.iter().any(|&c| c != 1 && c != -1) {
        return Err(Error::invalid_input("spreading code must be +1/-1"));
    }
    Ok(symbols
        .iter()
        .flat_map(|&s| code.iter().map(move |&c| s * f64::from(c)))
        .collect())
}

/// Correlates chips against `code`, one symbol per code period.
pub fn cdma_despread(chips: &[Complex64], code: &[i8]) -> Vec<Complex64> {
    let l = code.len() as f64;
    chips
        .chunks_exact(code.len())
        .map(|block| {
            block
                .iter()
                .zip(code)
                .map(|(&x, &c)| x * f64::from(c))
                .sum::<Complex64>()
                / l
        })
        .collect()
}
