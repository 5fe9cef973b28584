//! Exact finite-field certification of emptiness claims.
//!
//! A claim says: the linear system of degree-d forms through a configured
//! scheme is empty.  The oracle realizes the scheme with random coordinates
//! over a large prime field and computes the exact rank of its condition
//! matrix.  Full column rank proves the claim — specializing coordinates
//! and reducing mod p can only lower the rank, so the generic
//! characteristic-zero rank is at least the observed one.  A deficient rank
//! proves nothing (the sample may be unlucky) and is retried with a fresh
//! seed and another prime.

mod field;
mod matrix;
mod realize;

pub use field::{is_prime, PrimeField};
pub use matrix::{MatFp, MonomialBasis, PowTable};
pub use realize::{
    calibrate, condition_matrix, realize_specialized, Calibration, SpecializedTriple,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::Scheme;
use crate::numstr;

/// 2^31 − 1: comfortably larger than any degree in range, small enough
/// that products of reduced elements fit in a machine word.
pub const DEFAULT_PRIME: u64 = 2_147_483_647;

/// Alternative moduli for retries, so an unlucky rank collapse that is
/// characteristic-specific cannot repeat.
pub const FALLBACK_PRIMES: [u64; 2] = [4_294_967_291, 2_147_483_629];

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("{0} is not a prime below 2^32")]
    NotPrime(u64),
    #[error("field too small: need p > {degree}, got p = {prime}")]
    PrimeTooSmall { prime: u64, degree: u64 },
    #[error("could not sample a nondegenerate realization within the retry budget")]
    ResamplingExhausted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleConfig {
    #[serde(with = "numstr::u64str")]
    pub prime: u64,
    #[serde(with = "numstr::u64str")]
    pub seed: u64,
    #[serde(with = "numstr::u32str")]
    pub retries: u32,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            prime: DEFAULT_PRIME,
            seed: 0,
            retries: 3,
        }
    }
}

/// Outcome of an emptiness check.  `Verified` records the witness — prime
/// and seed reproduce the exact matrix whose rank was full.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Verdict {
    Verified {
        #[serde(with = "numstr::u64str")]
        prime: u64,
        #[serde(with = "numstr::u64str")]
        seed: u64,
        #[serde(with = "numstr::u64str")]
        rank: u64,
        #[serde(with = "numstr::u64str")]
        cols: u64,
    },
    Inconclusive {
        #[serde(with = "numstr::u64str")]
        best_rank: u64,
        #[serde(with = "numstr::u64str")]
        cols: u64,
        #[serde(with = "numstr::u32str")]
        attempts: u32,
    },
}

impl Verdict {
    pub fn is_verified(&self) -> bool {
        matches!(self, Verdict::Verified { .. })
    }
}

/// Try to certify that the scheme imposes independent conditions exhausting
/// all forms of its degree.
///
/// Negative degree is immediately `Verified`: there are no forms at all, so
/// the system is empty by convention.  Otherwise up to `retries` attempts
/// are made — the configured prime first, then the fallback ladder, each
/// with a fresh seed.  An attempt whose prime is too small for the degree
/// or whose sample degenerates is skipped but still counted.
pub fn verify_empty(scheme: &Scheme, cfg: &OracleConfig) -> Result<Verdict, OracleError> {
    if scheme.degree() < 0 {
        return Ok(Verdict::Verified {
            prime: cfg.prime,
            seed: cfg.seed,
            rank: 0,
            cols: 0,
        });
    }
    let degree = scheme.degree() as u64;
    let cols = scheme.dim_forms();
    let attempts = cfg.retries.max(1);
    let mut best_rank = 0u64;
    for i in 0..attempts {
        let prime = if i == 0 {
            cfg.prime
        } else {
            FALLBACK_PRIMES[(i as usize - 1) % FALLBACK_PRIMES.len()]
        };
        let seed = cfg.seed.wrapping_add(u64::from(i));
        if prime <= degree {
            continue;
        }
        let matrix = match condition_matrix(scheme, prime, seed) {
            Ok(m) => m,
            Err(OracleError::ResamplingExhausted) => continue,
            Err(e) => return Err(e),
        };
        let rank = matrix.rank();
        best_rank = best_rank.max(rank);
        if rank == cols {
            return Ok(Verdict::Verified {
                prime,
                seed,
                rank,
                cols,
            });
        }
    }
    Ok(Verdict::Inconclusive {
        best_rank,
        cols,
        attempts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{PlaneScheme, SpaceScheme, SubStar};

    fn plane(d: i64, dbl: u64, len2: u64, star: (u64, u64), pts: u64) -> Scheme {
        Scheme::Plane(PlaneScheme {
            d,
            double_points: dbl,
            length2: len2,
            substar: SubStar::new(star.0, star.1).unwrap(),
            points: pts,
            collinear: 0,
            marked: 0,
        })
    }

    #[test]
    fn base_configuration_verifies() {
        let s = Scheme::Space(SpaceScheme::new(9, 14, 4, (4, 2), 0).unwrap());
        let v = verify_empty(&s, &OracleConfig::default()).unwrap();
        match v {
            Verdict::Verified { prime, seed, rank, cols } => {
                assert_eq!(prime, DEFAULT_PRIME);
                assert_eq!(seed, 0);
                assert_eq!(rank, 220);
                assert_eq!(cols, 220);
            }
            other => panic!("expected verification, got {other:?}"),
        }
    }

    #[test]
    fn stripped_base_trace_verifies() {
        let v = verify_empty(&plane(5, 0, 3, (4, 2), 11), &OracleConfig::default()).unwrap();
        assert!(v.is_verified());
    }

    #[test]
    fn negative_degree_is_immediately_verified() {
        let cfg = OracleConfig {
            prime: 6, // never touched: no matrix is built
            ..OracleConfig::default()
        };
        let v = verify_empty(&plane(-1, 0, 0, (1, 0), 0), &cfg).unwrap();
        assert_eq!(
            v,
            Verdict::Verified {
                prime: 6,
                seed: 0,
                rank: 0,
                cols: 0
            }
        );
    }

    #[test]
    fn deficient_claim_stays_inconclusive() {
        let s = Scheme::Space(SpaceScheme::new(3, 2, 0, (0, 0), 0).unwrap());
        let v = verify_empty(&s, &OracleConfig::default()).unwrap();
        assert_eq!(
            v,
            Verdict::Inconclusive {
                best_rank: 8,
                cols: 20,
                attempts: 3
            }
        );
    }

    #[test]
    fn small_prime_falls_through_to_ladder() {
        let cfg = OracleConfig {
            prime: 5,
            seed: 0,
            retries: 3,
        };
        let s = plane(5, 0, 3, (4, 2), 11);
        let v = verify_empty(&s, &cfg).unwrap();
        match v {
            Verdict::Verified { prime, seed, .. } => {
                assert_eq!(prime, FALLBACK_PRIMES[0]);
                assert_eq!(seed, 1);
            }
            other => panic!("expected fallback verification, got {other:?}"),
        }
    }

    #[test]
    fn composite_modulus_is_rejected() {
        let cfg = OracleConfig {
            prime: 91,
            ..OracleConfig::default()
        };
        let s = plane(2, 0, 0, (0, 0), 6);
        assert_eq!(verify_empty(&s, &cfg), Err(OracleError::NotPrime(91)));
    }

    #[test]
    fn verdict_serializes_with_decimal_strings() {
        let v = Verdict::Verified {
            prime: DEFAULT_PRIME,
            seed: 0,
            rank: 220,
            cols: 220,
        };
        let json = serde_json::to_string(&v).unwrap();
        assert!(json.contains(r#""kind":"verified""#));
        assert!(json.contains(r#""prime":"2147483647""#));
        let back: Verdict = serde_json::from_str(&json).unwrap();
        assert_eq!(back, v);
    }
}
