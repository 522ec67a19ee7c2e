//! Integer bookkeeping for `GL_n` over a number field of signature `(r1, r2)`.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Signature {
    pub n: u64,
    pub r1: u64,
    pub r2: u64,
}

impl Signature {
    pub fn new(n: u64, r1: u64, r2: u64) -> Result<Signature> {
        let s = Signature { n, r1, r2 };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Schema { path: "n".into(), msg: "dimension must be at least 1".into() });
        }
        if self.degree() == 0 {
            return Err(Error::Schema { path: "r1/r2".into(), msg: "field degree r1 + 2 r2 must be at least 1".into() });
        }
        Ok(())
    }

    /// `[F:Q] = r1 + 2 r2`.
    pub fn degree(&self) -> i128 {
        self.r1 as i128 + 2 * self.r2 as i128
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Invariants {
    pub l0: i128,
    pub q0: i128,
    pub dim_y: i128,
    pub h0sum: i128,
}

pub fn invariants(s: Signature) -> Result<Invariants> {
    s.validate()?;
    let (n, r1, r2) = (s.n as i128, s.r1 as i128, s.r2 as i128);
    let odd = n % 2 == 1;
    let l0 = if odd { r1 * (n - 1) / 2 } else { r1 * (n - 2) / 2 } + r2 * (n - 1);
    let dim_y = r1 * (n * n - 1 - n * (n - 1) / 2) + r2 * (n * n - 1);
    if (dim_y - l0) % 2 != 0 {
        return Err(Error::Invariant { name: "q0".into(), msg: format!("2q0 = {} is odd", dim_y - l0) });
    }
    let h0sum = if odd { r1 * ((n * n + 1) / 2 - 1) } else { r1 * (n * n / 2 - 1) } + r2 * (n * n - 1);
    Ok(Invariants { l0, q0: (dim_y - l0) / 2, dim_y, h0sum })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct InfinityIdentity {
    pub lhs: i128,
    pub rhs: i128,
    pub equal: bool,
}

/// Archimedean `h^0` sum against `[F:Q] n(n-1)/2 + l0`.
pub fn check_infinity_identity(s: Signature) -> Result<InfinityIdentity> {
    let inv = invariants(s)?;
    let n = s.n as i128;
    let rhs = s.degree() * n * (n - 1) / 2 + inv.l0;
    Ok(InfinityIdentity { lhs: inv.h0sum, rhs, equal: inv.h0sum == rhs })
}

/// Every complex conjugation has trace in `{-1, 0, 1}`.
pub fn oddness(n: u64, traces: &[i64]) -> Result<bool> {
    for &t in traces {
        if t.unsigned_abs() > n || (t - n as i64).rem_euclid(2) != 0 {
            return Err(Error::Parity(format!("{t} is not the trace of an involution in dimension {n}")));
        }
    }
    Ok(traces.iter().all(|t| (-1..=1).contains(t)))
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SelmerInput {
    pub h1_dual: u64,
    pub h0_ad: u64,
    pub h0_ad1: u64,
    #[serde(default)]
    pub local_terms: Vec<u64>,
    pub h0_t_and_infty: u64,
}

/// `h^1_{L,T}` from the dual Selmer group and the local terms.
pub fn selmer_difference(inp: &SelmerInput) -> i128 {
    inp.h1_dual as i128 + inp.h0_ad as i128 - inp.h0_ad1 as i128 + inp.local_terms.iter().map(|&x| x as i128).sum::<i128>()
        - inp.h0_t_and_infty as i128
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GeneratorCount {
    pub value: i128,
    /// Set when the count is negative, which signals an inconsistent setup.
    pub warning: Option<String>,
}

/// `q + |T| - 1 - [F:Q] n(n-1)/2 - l0`, reported unclamped.
pub fn tw_generator_count(q: u64, t_size: u64, s: Signature) -> Result<GeneratorCount> {
    let inv = invariants(s)?;
    let n = s.n as i128;
    let value = q as i128 + t_size as i128 - 1 - s.degree() * n * (n - 1) / 2 - inv.l0;
    let warning = (value < 0).then(|| format!("negative generator count {value}"));
    Ok(GeneratorCount { value, warning })
}

/// `1 + |S_p ∪ R| (n^2 - 1) + [F:Q] n(n-1)/2`.
pub fn rloc_dimension(spr_size: u64, s: Signature) -> Result<i128> {
    s.validate()?;
    let n = s.n as i128;
    Ok(1 + spr_size as i128 * (n * n - 1) + s.degree() * n * (n - 1) / 2)
}

/// Framing variable count `j = n^2 |T| - 1`.
pub fn framing_variables(n: u64, t_size: u64) -> i128 {
    (n as i128) * (n as i128) * t_size as i128 - 1
}

/// `1 + j + q - l0`, the expected dimension of the patched ring.
pub fn patched_dimension(j: i128, q: i128, l0: i128) -> i128 {
    1 + j + q - l0
}

/// `l0 = 0` exactly when `n = 1` or `r2 = 0` and `n <= 2`.
pub fn l0_vanishes(s: Signature) -> bool {
    s.n == 1 || (s.r2 == 0 && s.n <= 2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig(n: u64, r1: u64, r2: u64) -> Signature {
        Signature::new(n, r1, r2).unwrap()
    }

    #[test]
    fn invariant_examples() {
        let i = invariants(sig(2, 0, 1)).unwrap();
        assert_eq!((i.l0, i.q0), (1, 1));
        let i = invariants(sig(2, 1, 0)).unwrap();
        assert_eq!((i.l0, i.q0, i.dim_y), (0, 1, 2));
        let i = invariants(sig(3, 1, 1)).unwrap();
        assert_eq!((i.l0, i.dim_y, i.q0), (3, 13, 5));
    }

    #[test]
    fn infinity_identity_examples() {
        assert_eq!(check_infinity_identity(sig(2, 1, 0)).unwrap(), InfinityIdentity { lhs: 1, rhs: 1, equal: true });
        assert_eq!(check_infinity_identity(sig(3, 1, 1)).unwrap(), InfinityIdentity { lhs: 12, rhs: 12, equal: true });
        assert!(check_infinity_identity(sig(1, 4, 2)).unwrap().equal);
    }

    #[test]
    fn oddness_examples() {
        assert!(oddness(2, &[0]).unwrap());
        assert!(oddness(3, &[1, -1]).unwrap());
        assert!(!oddness(3, &[3]).unwrap());
        assert!(oddness(4, &[0]).unwrap());
        assert!(!oddness(4, &[2]).unwrap());
        assert!(matches!(oddness(3, &[0]), Err(Error::Parity(_))));
    }

    #[test]
    fn selmer_examples() {
        assert_eq!(selmer_difference(&SelmerInput::default()), 0);
        let q = SelmerInput { local_terms: vec![1; 4], ..Default::default() };
        assert_eq!(selmer_difference(&q), 4);
        let desk = SelmerInput { h1_dual: 2, h0_ad: 1, h0_ad1: 0, local_terms: vec![1, 2], h0_t_and_infty: 4 };
        assert_eq!(selmer_difference(&desk), 2);
    }

    #[test]
    fn generator_counts() {
        assert_eq!(tw_generator_count(1, 1, sig(2, 1, 0)).unwrap().value, 0);
        assert_eq!(tw_generator_count(3, 2, sig(2, 0, 1)).unwrap().value, 1);
        assert_eq!(tw_generator_count(0, 1, sig(1, 1, 0)).unwrap().value, 0);
        assert!(tw_generator_count(0, 0, sig(2, 1, 0)).unwrap().warning.is_some());
    }

    #[test]
    fn rloc_examples() {
        assert_eq!(rloc_dimension(1, sig(2, 1, 0)).unwrap(), 5);
        assert_eq!(rloc_dimension(3, sig(1, 1, 0)).unwrap(), 1);
        assert_eq!(rloc_dimension(2, sig(2, 0, 1)).unwrap(), 9);
        assert_eq!(framing_variables(2, 1), 3);
    }

    #[test]
    fn degenerate_signature_rejected() {
        assert!(Signature::new(2, 0, 0).is_err());
        assert!(Signature::new(0, 1, 0).is_err());
    }
}
