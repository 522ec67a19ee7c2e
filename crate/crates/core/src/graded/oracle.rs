//! Brute-force cross-checks: regular sequences found by search, and
//! dimensions of monomial quotients by enumeration.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::Result;

use super::poly::{Mono, Vector};
use super::GradedModule;

/// All monomials of degree `d` in `q` variables, ascending.
pub fn monomials(q: usize, d: u16) -> Vec<Mono> {
    fn go(q: usize, d: u16, prefix: &mut Vec<u16>, out: &mut Vec<Mono>) {
        if prefix.len() + 1 == q {
            prefix.push(d);
            out.push(Mono(prefix.clone()));
            prefix.pop();
            return;
        }
        for e in 0..=d {
            prefix.push(e);
            go(q, d - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if q == 0 {
        if d == 0 {
            out.push(Mono(Vec::new()));
        }
        return out;
    }
    go(q, d, &mut Vec::new(), &mut out);
    out.sort();
    out
}

/// `f` is a nonzerodivisor on `m` iff `HS(M/fM) = (1 - t^d) HS(M)`.
pub fn is_regular(m: &GradedModule, f: &Vector) -> Result<bool> {
    let d = f.degree(&[0]).unwrap_or(0);
    let hs = m.hilbert_series()?;
    Ok(m.quotient_by_element(f)?.hilbert_series()? == hs.times_one_minus(d))
}

/// Candidate forms of degree `d`, normalized to leading coefficient 1.
/// Exhaustive when there are at most `cap` of them, otherwise a seeded sample.
fn candidates(m: &GradedModule, d: u16, cap: usize, rng: &mut ChaCha8Rng) -> (Vec<Vector>, bool) {
    let field = m.ring.field;
    let p = field.p();
    let monos = monomials(m.ring.q, d);
    let n = monos.len() as u32;
    let total = (p as f64).powi(n as i32);
    let build = |coeffs: &[u64]| {
        Vector::from_terms(field, monos.iter().zip(coeffs).map(|(mo, &c)| (0, mo.clone(), c)).collect())
    };
    let mut out = Vec::new();
    if total <= cap as f64 * (p - 1) as f64 + 1.0 {
        let mut coeffs = vec![0u64; n as usize];
        loop {
            // odometer over F_p^n, low index most significant for the ordering
            let mut i = n as usize;
            loop {
                if i == 0 {
                    return (out, true);
                }
                i -= 1;
                coeffs[i] += 1;
                if coeffs[i] < p {
                    break;
                }
                coeffs[i] = 0;
            }
            let first = coeffs.iter().find(|&&c| c != 0).copied();
            if first == Some(1) {
                out.push(build(&coeffs));
            }
        }
    }
    for _ in 0..cap {
        let coeffs: Vec<u64> = (0..n).map(|_| rng.gen_range(0..p)).collect();
        let v = build(&coeffs);
        if !v.is_zero() {
            out.push(v.make_monic(field));
        }
    }
    (out, false)
}

#[derive(Clone, Debug)]
pub struct RegularSequence {
    pub sequence: Vec<Vector>,
    /// Whether every candidate tested at the final step was enumerated.
    pub exhaustive: bool,
}

/// Greedy search for a regular sequence of length `target` among forms of
/// degree `1..=max_degree`; stops early if no candidate is regular.
pub fn exhibit_regular_sequence(
    m: &GradedModule,
    target: usize,
    max_degree: u16,
    cap: usize,
    seed: u64,
) -> Result<RegularSequence> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut current = m.clone();
    let mut sequence = Vec::new();
    let mut exhaustive = true;
    'outer: while sequence.len() < target && !current.is_zero()? {
        for d in 1..=max_degree {
            let (cands, full) = candidates(&current, d, cap, &mut rng);
            exhaustive = full;
            for f in cands {
                if is_regular(&current, &f)? {
                    current = current.quotient_by_element(&f)?;
                    sequence.push(f);
                    continue 'outer;
                }
            }
        }
        break;
    }
    Ok(RegularSequence { sequence, exhaustive })
}

/// `dim S/J` for a monomial ideal: the largest set of variables supporting no
/// generator. `-1` when `J` is the unit ideal.
pub fn monomial_dim(q: usize, gens: &[Mono]) -> i64 {
    if gens.iter().any(Mono::is_one) {
        return -1;
    }
    (0u32..1 << q)
        .filter(|&set| gens.iter().all(|g| g.support().iter().any(|&v| set >> v & 1 == 0)))
        .map(|set| set.count_ones() as i64)
        .max()
        .unwrap_or(0)
}

/// Standard monomials of `S/J` in each degree `0..=upto`, by enumeration.
pub fn standard_monomial_counts(q: usize, gens: &[Mono], upto: u16) -> Vec<u64> {
    (0..=upto).map(|d| monomials(q, d).iter().filter(|m| !gens.iter().any(|g| g.divides(m))).count() as u64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded::GradedRing;

    #[test]
    fn monomial_counts() {
        assert_eq!(monomials(3, 2).len(), 6);
        assert_eq!(monomials(1, 4), vec![Mono(vec![4])]);
    }

    #[test]
    fn regular_sequences_on_small_modules() {
        let s = GradedRing::polynomial(2, 2).unwrap();
        let free = GradedModule::free(&s, vec![0]);
        assert_eq!(exhibit_regular_sequence(&free, 2, 1, 64, 1).unwrap().sequence.len(), 2);
        // F_2[x,y]/(x^2, xy): x in the socle, nothing is regular
        let m = GradedModule::cyclic(
            &s,
            vec![Vector::term(0, Mono(vec![2, 0]), 1), Vector::term(0, Mono(vec![1, 1]), 1)],
        )
        .unwrap();
        assert!(exhibit_regular_sequence(&m, 1, 2, 64, 1).unwrap().sequence.is_empty());
        // F_2[x,y]/(xy): x + y is regular
        let h = GradedModule::cyclic(&s, vec![Vector::term(0, Mono(vec![1, 1]), 1)]).unwrap();
        assert_eq!(exhibit_regular_sequence(&h, 1, 1, 64, 1).unwrap().sequence.len(), 1);
    }

    #[test]
    fn monomial_dimension_oracle() {
        let x2 = Mono(vec![2, 0, 0]);
        let yz = Mono(vec![0, 1, 1]);
        assert_eq!(monomial_dim(3, &[x2.clone(), yz]), 1);
        assert_eq!(monomial_dim(3, &[]), 3);
        assert_eq!(monomial_dim(3, &[Mono::one(3)]), -1);
        assert_eq!(standard_monomial_counts(3, &[x2], 2), vec![1, 3, 5]);
    }
}
