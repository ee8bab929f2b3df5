use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParamsError {
    #[error("k must be positive")]
    ZeroK,
    #[error("phase boundaries must satisfy tau1 > tau2 > tau3 > 0 (got {tau1}, {tau2}, {tau3})")]
    NonMonotoneTaus { tau1: u64, tau2: u64, tau3: u64 },
    #[error("tau_prime must be positive")]
    ZeroTauPrime,
    #[error("overestimation factor must be at least 1")]
    ZeroOverestimation,
}

/// Constants of the counting protocol.
///
/// `tau1 > tau2 > tau3` split an agent's countdown into the exchange, hold
/// and reset phases, `tau_prime` bounds the interactions an agent may have
/// before it draws a backup sample, and `overestimation` is the factor
/// fresh samples are scaled by before being stored. Logarithms are base 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct ProtocolParams {
    k: u32,
    tau1: i64,
    tau2: i64,
    tau3: i64,
    tau_prime: i64,
    overestimation: i64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawParams {
    pub k: u32,
    pub tau1: u64,
    pub tau2: u64,
    pub tau3: u64,
    pub tau_prime: u64,
    pub overestimation: u64,
}

impl TryFrom<RawParams> for ProtocolParams {
    type Error = ParamsError;

    fn try_from(raw: RawParams) -> Result<Self, Self::Error> {
        Self::new(
            raw.k,
            raw.tau1,
            raw.tau2,
            raw.tau3,
            raw.tau_prime,
            raw.overestimation,
        )
    }
}

impl From<ProtocolParams> for RawParams {
    fn from(p: ProtocolParams) -> Self {
        Self {
            k: p.k,
            tau1: p.tau1 as u64,
            tau2: p.tau2 as u64,
            tau3: p.tau3 as u64,
            tau_prime: p.tau_prime as u64,
            overestimation: p.overestimation as u64,
        }
    }
}

// Keeps every product `tau * estimate` comfortably inside i64.
const MAX_CONSTANT: u64 = 1 << 31;

impl ProtocolParams {
    pub fn new(
        k: u32,
        tau1: u64,
        tau2: u64,
        tau3: u64,
        tau_prime: u64,
        overestimation: u64,
    ) -> Result<Self, ParamsError> {
        if k == 0 {
            return Err(ParamsError::ZeroK);
        }
        if !(tau1 > tau2 && tau2 > tau3 && tau3 > 0) || tau1 > MAX_CONSTANT {
            return Err(ParamsError::NonMonotoneTaus { tau1, tau2, tau3 });
        }
        if tau_prime == 0 {
            return Err(ParamsError::ZeroTauPrime);
        }
        if overestimation == 0 {
            return Err(ParamsError::ZeroOverestimation);
        }
        Ok(Self {
            k,
            tau1: tau1 as i64,
            tau2: tau2 as i64,
            tau3: tau3 as i64,
            tau_prime: tau_prime.min(MAX_CONSTANT) as i64,
            overestimation: overestimation.min(MAX_CONSTANT) as i64,
        })
    }

    /// Constants under which the holding-time analysis goes through:
    /// `tau1 = 1140k`, `tau2 = 1119k`, `tau3 = 454k`, `tau' = 4350k` and an
    /// overestimation factor of `20(k+1)`.
    pub fn theory(k: u32) -> Result<Self, ParamsError> {
        let k64 = u64::from(k);
        Self::new(
            k,
            1140 * k64,
            1119 * k64,
            454 * k64,
            4350 * k64,
            20 * (k64 + 1),
        )
    }

    /// The small constants used for the simulations: `tau1 = 6`, `tau2 = 4`,
    /// `tau3 = 2`, `tau' = 20`, `k = 16`, without overestimation.
    pub fn empirical() -> Self {
        Self::new(16, 6, 4, 2, 20, 1).expect("empirical constants are valid")
    }

    #[inline]
    pub fn k(&self) -> u32 {
        self.k
    }
    #[inline]
    pub fn tau1(&self) -> i64 {
        self.tau1
    }
    #[inline]
    pub fn tau2(&self) -> i64 {
        self.tau2
    }
    #[inline]
    pub fn tau3(&self) -> i64 {
        self.tau3
    }
    #[inline]
    pub fn tau_prime(&self) -> i64 {
        self.tau_prime
    }
    #[inline]
    pub fn overestimation(&self) -> i64 {
        self.overestimation
    }
}
