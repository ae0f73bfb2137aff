use num_traits::ToPrimitive;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{trial_rng, OracleError};
use crate::lattice::PointSet;

/// Upper bound on the size of the enumerated torus `(F_p^*)^n`.
pub const SAMPLE_CAP: u128 = 10_000_000;

/// Per-trial common-zero counts in `(F_p^*)^n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleStats {
    pub prime: u64,
    pub counts: Vec<u64>,
}

impl SampleStats {
    pub fn zero_fraction(&self) -> f64 {
        self.counts.iter().filter(|&&c| c == 0).count() as f64 / self.counts.len().max(1) as f64
    }

    pub fn max(&self) -> u64 {
        self.counts.iter().copied().max().unwrap_or(0)
    }
}

pub(crate) fn to_i64_rows(a: &PointSet) -> Result<Vec<Vec<i64>>, OracleError> {
    a.iter()
        .map(|p| {
            p.coords()
                .iter()
                .map(|c| c.to_i64().ok_or_else(|| OracleError::CapExceeded(format!("coordinate {c} exceeds i64"))))
                .collect()
        })
        .collect()
}

fn inv_mod(a: u64, p: u64) -> u64 {
    let mut acc = 1u128;
    let mut base = a as u128;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p as u128;
        }
        base = base * base % p as u128;
        e >>= 1;
    }
    acc as u64
}

/// For random coefficient draws (uniform in `F_p^*`), counts the common
/// zeros of the system with these supports by enumerating `(F_p^*)^n`.
pub fn sample_common_solutions(supports: &[PointSet], p: u64, trials: usize, seed: u64) -> Result<SampleStats, OracleError> {
    super::finite_field::FiniteField::prime(p)?;
    let n = supports.first().ok_or(OracleError::NoSupports)?.ambient_rank();
    if (p as u128).pow(n as u32) > SAMPLE_CAP {
        return Err(OracleError::CapExceeded(format!("{p}^{n} exceeds {SAMPLE_CAP}")));
    }
    let systems: Vec<Vec<Vec<i64>>> = supports.iter().map(to_i64_rows).collect::<Result<_, _>>()?;
    // power tables: pow[i][v - 1][e - lo[i]] = v^e
    let mut lo = vec![0i64; n];
    let mut hi = vec![0i64; n];
    for pt in systems.iter().flatten() {
        for i in 0..n {
            lo[i] = lo[i].min(pt[i]);
            hi[i] = hi[i].max(pt[i]);
        }
    }
    let tables: Vec<Vec<Vec<u64>>> = (0..n)
        .map(|i| {
            (1..p)
                .map(|v| {
                    let vinv = inv_mod(v, p);
                    (lo[i]..=hi[i])
                        .map(|e| {
                            let (b, k) = if e < 0 { (vinv, (-e) as u64) } else { (v, e as u64) };
                            (0..k).fold(1u128, |acc, _| acc * b as u128 % p as u128) as u64
                        })
                        .collect()
                })
                .collect()
        })
        .collect();

    let counts = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng: ChaCha8Rng = trial_rng(seed, t as u64);
            let coeffs: Vec<Vec<u64>> = systems
                .iter()
                .map(|s| s.iter().map(|_| rng.gen_range(1..p)).collect())
                .collect();
            let mut point = vec![1u64; n];
            let mut count = 0u64;
            loop {
                let all_zero = systems.iter().zip(&coeffs).all(|(sys, cs)| {
                    let v = sys.iter().zip(cs).fold(0u128, |acc, (mono, &c)| {
                        let term = (0..n).fold(c as u128, |t, i| {
                            t * tables[i][(point[i] - 1) as usize][(mono[i] - lo[i]) as usize] as u128 % p as u128
                        });
                        (acc + term) % p as u128
                    });
                    v == 0
                });
                count += all_zero as u64;
                let mut i = 0;
                loop {
                    if i == n {
                        return count;
                    }
                    point[i] += 1;
                    if point[i] < p {
                        break;
                    }
                    point[i] = 1;
                    i += 1;
                }
            }
        })
        .collect();
    Ok(SampleStats { prime: p, counts })
}
