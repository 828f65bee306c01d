//! Gray-coded unit-power constellations.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;

use super::ModulationScheme;
use crate::error::{Error, Result};

fn gray_decode(mut g: u32) -> u32 {
    let mut b = g;
    while g > 1 {
        g >>= 1;
        b ^= g;
    }
    b
}

fn bits_to_index(bits: &[u8]) -> u32 {
    bits.iter().fold(0u32, |acc, &b| (acc << 1) | u32::from(b))
}

fn qpsk(index: u32) -> Complex64 {
    let re = if index & 0b10 == 0 { 1.0 } else { -1.0 };
    let im = if index & 0b01 == 0 { 1.0 } else { -1.0 };
    Complex64::new(re, im) * FRAC_1_SQRT_2
}

fn mpsk(index: u32, order: u32) -> Complex64 {
    let position = gray_decode(index);
    Complex64::from_polar(1.0, 2.0 * PI * f64::from(position) / f64::from(order))
}

/// Gray level on a `2^bits`-point odd-integer PAM axis, e.g. {-3,-1,1,3}.
fn pam_level(index: u32, bits: u32) -> f64 {
    let levels = 1u32 << bits;
    let position = gray_decode(index);
    f64::from(2 * position) - f64::from(levels - 1)
}

fn qam16(index: u32) -> Complex64 {
    let i = pam_level(index >> 2, 2);
    let q = pam_level(index & 0b11, 2);
    Complex64::new(i, q) / 10f64.sqrt()
}

/// 32-point cross constellation: an 8x4 Gray rectangle whose outermost
/// columns are folded onto the top and bottom rows (quasi-Gray).
fn qam32(index: u32) -> Complex64 {
    let i = pam_level(index >> 2, 3);
    let q = pam_level(index & 0b11, 2);
    let (x, y) = if i.abs() == 7.0 {
        (i.signum() * (4.0 - q.abs()), 5.0 * q.signum())
    } else {
        (i, q)
    };
    Complex64::new(x, y) / 20f64.sqrt()
}

/// Maps a single symbol index (MSB-first bit group) onto the constellation.
pub fn symbol_for_index(scheme: ModulationScheme, index: u32) -> Complex64 {
    match scheme {
        ModulationScheme::Qpsk | ModulationScheme::CdmaQpsk | ModulationScheme::OfdmQpsk => {
            qpsk(index)
        }
        ModulationScheme::Psk8 => mpsk(index, 8),
        ModulationScheme::Psk16 => mpsk(index, 16),
        ModulationScheme::Psk32 => mpsk(index, 32),
        ModulationScheme::Qam16 => qam16(index),
        ModulationScheme::Qam32 => qam32(index),
    }
}

/// Every constellation point in index order.
pub fn constellation(scheme: ModulationScheme) -> Vec<Complex64> {
    let order = 1u32 << scheme.bits_per_symbol();
    (0..order).map(|i| symbol_for_index(scheme, i)).collect()
}

/// Maps a bit sequence (values 0/1, MSB first within each symbol) to symbols.
pub fn map_bits_to_symbols(bits: &[u8], scheme: ModulationScheme) -> Result<Vec<Complex64>> {
    let k = scheme.bits_per_symbol() as usize;
    if bits.len() % k != 0 {
        return Err(Error::invalid_input(format!(
            "{} bits is not a multiple of {k} bits per {scheme} symbol",
            bits.len()
        )));
    }
    if let Some(bad) = bits.iter().find(|&&b| b > 1) {
        return Err(Error::invalid_input(format!("bit value {bad} is not 0 or 1")));
    }
    Ok(bits
        .chunks_exact(k)
        .map(|chunk| symbol_for_index(scheme, bits_to_index(chunk)))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    const EPS: f64 = 1e-12;

    #[test]
    fn qpsk_zero_bits() {
        let s = map_bits_to_symbols(&[0, 0], ModulationScheme::Qpsk).unwrap();
        assert_eq!(s.len(), 1);
        assert!((s[0] - Complex64::new(1.0, 1.0) / 2f64.sqrt()).norm() < EPS);
    }

    #[test]
    fn empty_bits_give_empty_symbols() {
        for scheme in ModulationScheme::ALL {
            assert!(map_bits_to_symbols(&[], scheme).unwrap().is_empty());
        }
    }

    #[test]
    fn rejects_ragged_bit_count() {
        assert!(map_bits_to_symbols(&[0, 1, 1], ModulationScheme::Qpsk).is_err());
        assert!(map_bits_to_symbols(&[0; 4], ModulationScheme::Psk8).is_err());
        assert!(map_bits_to_symbols(&[2, 0], ModulationScheme::Qpsk).is_err());
    }

    #[test]
    fn unit_average_power_for_every_scheme() {
        for scheme in ModulationScheme::ALL {
            let points = constellation(scheme);
            let power = points.iter().map(|p| p.norm_sqr()).sum::<f64>() / points.len() as f64;
            assert!((power - 1.0).abs() < EPS, "{scheme}: {power}");
        }
    }

    #[test]
    fn constellation_points_are_distinct() {
        for scheme in ModulationScheme::ALL {
            let points = constellation(scheme);
            for (i, a) in points.iter().enumerate() {
                for b in &points[i + 1..] {
                    assert!((a - b).norm() > 1e-6, "{scheme} has duplicate points");
                }
            }
        }
    }

    #[test]
    fn psk_neighbours_differ_in_one_bit() {
        for (scheme, order) in [
            (ModulationScheme::Psk8, 8u32),
            (ModulationScheme::Psk16, 16),
            (ModulationScheme::Psk32, 32),
        ] {
            let points = constellation(scheme);
            for idx in 0..order {
                let p = points[idx as usize];
                // nearest neighbour by angle
                let nearest = (0..order)
                    .filter(|&j| j != idx)
                    .min_by(|&a, &b| {
                        (points[a as usize] - p)
                            .norm()
                            .total_cmp(&(points[b as usize] - p).norm())
                    })
                    .unwrap();
                assert_eq!((idx ^ nearest).count_ones(), 1, "{scheme} index {idx}");
            }
        }
    }

    #[test]
    fn qam16_is_gray() {
        let points = constellation(ModulationScheme::Qam16);
        let d_min = 2.0 / 10f64.sqrt();
        for (i, a) in points.iter().enumerate() {
            for (j, b) in points.iter().enumerate() {
                if ((a - b).norm() - d_min).abs() < 1e-9 {
                    assert_eq!((i ^ j).count_ones(), 1);
                }
            }
        }
    }

    #[test]
    fn qam32_is_a_cross() {
        let scale = 20f64.sqrt();
        let mut grid: Vec<(i32, i32)> = constellation(ModulationScheme::Qam32)
            .iter()
            .map(|p| ((p.re * scale).round() as i32, (p.im * scale).round() as i32))
            .collect();
        grid.sort_unstable();
        let mut expected = Vec::new();
        for x in [-5i32, -3, -1, 1, 3, 5] {
            for y in [-5i32, -3, -1, 1, 3, 5] {
                if x.abs() != 5 || y.abs() != 5 {
                    expected.push((x, y));
                }
            }
        }
        expected.sort_unstable();
        assert_eq!(grid, expected);
    }
}
