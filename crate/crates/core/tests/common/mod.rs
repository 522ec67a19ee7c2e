//! Oracles and random generators shared by the integration tests.

#![allow(dead_code)]

use patchlab::complexes::Complex;
use patchlab::linalg::ZMatrix;
use patchlab::rings::{RMatrix, Ring};
use patchlab::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn err(e: Error) -> String {
    format!("{}: {e}", e.code())
}

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Arithmetic mod `p^m` on plain integers.
#[derive(Clone, Copy)]
pub struct Modp {
    pub p: u64,
    pub m: u32,
    pub q: u64,
}

impl Modp {
    pub fn new(p: u64, m: u32) -> Self {
        Modp { p, m, q: p.pow(m) }
    }

    pub fn val(&self, x: u64) -> u32 {
        let mut x = x % self.q;
        if x == 0 {
            return self.m;
        }
        let mut v = 0;
        while x.is_multiple_of(self.p) {
            x /= self.p;
            v += 1;
        }
        v
    }

    pub fn inv(&self, x: u64) -> u64 {
        let (mut a, mut b, mut s, mut t) = (x as i64 % self.q as i64, self.q as i64, 1i64, 0i64);
        while b != 0 {
            let k = a / b;
            (a, b) = (b, a - k * b);
            (s, t) = (t, s - k * t);
        }
        assert_eq!(a, 1, "not a unit");
        s.rem_euclid(self.q as i64) as u64
    }
}

pub fn naive_mul(md: Modp, a: &[Vec<u64>], b: &[Vec<u64>]) -> Vec<Vec<u64>> {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| (0..cols).map(|c| (0..inner).map(|k| row[k] * b[k][c] % md.q).sum::<u64>() % md.q).collect())
        .collect()
}

/// Log of the size of the column span of `a` over `Z/p^m`, by elimination
/// with minimal-valuation pivots.
pub fn image_log(md: Modp, a: &[Vec<u64>]) -> u64 {
    let mut a: Vec<Vec<u64>> = a.iter().map(|r| r.iter().map(|x| x % md.q).collect()).collect();
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut total = 0u64;
    let (mut r0, mut c0) = (0, 0);
    while r0 < rows && c0 < cols {
        let mut best: Option<(u32, usize, usize)> = None;
        for r in r0..rows {
            for c in c0..cols {
                let v = md.val(a[r][c]);
                if v < md.m && best.is_none_or(|b| v < b.0) {
                    best = Some((v, r, c));
                }
            }
        }
        let Some((v, pr, pc)) = best else { break };
        a.swap(r0, pr);
        for row in a.iter_mut() {
            row.swap(c0, pc);
        }
        let unit = md.inv(a[r0][c0] / md.p.pow(v));
        for r in r0 + 1..rows {
            if a[r][c0] == 0 {
                continue;
            }
            let f = (a[r][c0] / md.p.pow(v)) * unit % md.q;
            for c in c0..cols {
                a[r][c] = (a[r][c] + md.q - f * a[r0][c] % md.q) % md.q;
            }
        }
        for c in c0 + 1..cols {
            if a[r0][c] == 0 {
                continue;
            }
            let f = (a[r0][c] / md.p.pow(v)) * unit % md.q;
            for row in a.iter_mut() {
                row[c] = (row[c] + md.q - f * row[c0] % md.q) % md.q;
            }
        }
        total += (md.m - v) as u64;
        r0 += 1;
        c0 += 1;
    }
    total
}

pub fn rank_mod_p(p: u64, a: &[Vec<u64>]) -> usize {
    image_log(Modp::new(p, 1), a) as usize
}

pub fn rows_of(z: &ZMatrix) -> Vec<Vec<u64>> {
    (0..z.rows()).map(|r| (0..z.cols()).map(|c| z.get(r, c)).collect()).collect()
}

pub const GROUP_ALGEBRAS: [(u64, u32, u32, u32); 10] =
    [(2, 2, 1, 2), (2, 3, 1, 3), (2, 2, 2, 2), (2, 1, 2, 3), (3, 2, 1, 1), (3, 3, 1, 1), (3, 2, 2, 1), (3, 1, 1, 2), (3, 1, 2, 2), (5, 2, 1, 1)];

pub fn random_elem(rng: &mut ChaCha8Rng, ring: &Ring) -> Vec<u64> {
    let q = ring.coeff().modulus();
    (0..ring.basis_size()).map(|_| if rng.gen_bool(0.5) { 0 } else { rng.gen_range(0..q) }).collect()
}

/// Random element of the maximal ideal: coordinates sum to zero mod `p`.
pub fn random_nonunit(rng: &mut ChaCha8Rng, ring: &Ring) -> Vec<u64> {
    let mut x = random_elem(rng, ring);
    let q = ring.coeff().modulus();
    let s = x.iter().sum::<u64>() % ring.p();
    x[0] = (x[0] + q - s) % q;
    x
}

pub fn random_unit(rng: &mut ChaCha8Rng, ring: &Ring) -> Vec<u64> {
    let mut x = random_nonunit(rng, ring);
    x[0] = (x[0] + rng.gen_range(1..ring.p())) % ring.coeff().modulus();
    x
}

pub fn random_invertible(rng: &mut ChaCha8Rng, ring: &Ring, n: usize) -> RMatrix {
    let mut g = RMatrix::identity(ring, n);
    if n == 0 {
        return g;
    }
    for _ in 0..3 * n {
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        match rng.gen_range(0..3) {
            0 if a != b => g.add_row_multiple(a, b, &random_elem(rng, ring)),
            1 => g.swap_rows(a, b),
            _ => g.scale_row(a, &random_unit(rng, ring)),
        }
    }
    g
}

struct Piece {
    start: usize,
    ranks: Vec<usize>,
    diffs: Vec<Vec<Vec<Vec<u64>>>>,
}

pub fn random_complex(rng: &mut ChaCha8Rng) -> Result<Complex, String> {
    let (p, m, q, n) = GROUP_ALGEBRAS[rng.gen_range(0..GROUP_ALGEBRAS.len())];
    let ring = Ring::group_algebra(p, m, q, n).map_err(err)?;
    let len = rng.gen_range(1..=3usize);
    let mut ranks = vec![0usize; len + 1];
    let mut pieces = Vec::new();
    for _ in 0..rng.gen_range(1..=6) {
        let start = rng.gen_range(0..=len);
        let piece = match rng.gen_range(0..3) {
            0 => Piece { start, ranks: vec![1], diffs: vec![] },
            1 if start + 2 <= len => {
                let (x, y) = (random_nonunit(rng, &ring), random_nonunit(rng, &ring));
                let neg_y: Vec<u64> = y.iter().map(|&c| (ring.coeff().modulus() - c) % ring.coeff().modulus()).collect();
                Piece { start, ranks: vec![1, 2, 1], diffs: vec![vec![vec![x.clone()], vec![y]], vec![vec![neg_y, x]]] }
            }
            _ if start < len => {
                let (a, b) = (rng.gen_range(1..=2usize), rng.gen_range(1..=2usize));
                let entries = (0..b)
                    .map(|_| {
                        (0..a).map(|_| if rng.gen_bool(0.4) { random_elem(rng, &ring) } else { random_nonunit(rng, &ring) }).collect()
                    })
                    .collect();
                Piece { start, ranks: vec![a, b], diffs: vec![entries] }
            }
            _ => continue,
        };
        if piece.ranks.iter().enumerate().any(|(i, r)| ranks[piece.start + i] + r > 6) {
            continue;
        }
        for (i, r) in piece.ranks.iter().enumerate() {
            ranks[piece.start + i] += r;
        }
        pieces.push(piece);
    }
    let mut offsets = vec![0usize; len + 1];
    let mut diffs: Vec<RMatrix> = (0..len).map(|k| RMatrix::zeros(&ring, ranks[k + 1], ranks[k])).collect();
    for piece in &pieces {
        for (i, d) in piece.diffs.iter().enumerate() {
            let k = piece.start + i;
            for (r, row) in d.iter().enumerate() {
                for (c, x) in row.iter().enumerate() {
                    diffs[k].set(offsets[k + 1] + r, offsets[k] + c, x);
                }
            }
        }
        for (i, r) in piece.ranks.iter().enumerate() {
            offsets[piece.start + i] += r;
        }
    }
    let gs: Vec<RMatrix> = ranks.iter().map(|&r| random_invertible(rng, &ring, r)).collect();
    let mixed = diffs
        .iter()
        .enumerate()
        .map(|(k, d)| Ok(gs[k + 1].mul(d).mul(&gs[k].inverse().ok_or("generated basis change not invertible")?)))
        .collect::<Result<Vec<_>, String>>()?;
    let lo = rng.gen_range(-1..=1);
    Complex::new_checked(&ring, lo, ranks, mixed).map_err(err)
}

/// Residues in `F_p` of a matrix over a group algebra: sum of coordinates.
pub fn residue_rows(d: &RMatrix) -> Vec<Vec<u64>> {
    let p = d.ring().p();
    (0..d.rows()).map(|r| (0..d.cols()).map(|c| d.entry(r, c).iter().sum::<u64>() % p).collect()).collect()
}

