mod common;

use common::*;
use patchlab::complexes::{minimize, same_homology, ChainMap};
use patchlab::graded::{depth_pd, minimal_free_resolution, GradedModule, GradedRing, Mono, Vector};
use patchlab::linalg::{smith_normal_form, FiniteModule, IsoVerdict, Track, ZMatrix, Zpm};
use patchlab::numerology::{check_infinity_identity, invariants, Signature};
use patchlab::ordinary::{
    fitting_decomposition, localization_projector_module, ordinary_part_complex, verify_ordinary_part,
};
use patchlab::patching::{patch, reduce_datum, PatchOptions, TowerConfig};
use patchlab::rings::{MapKind, Params, RMatrix, Ring, RingMap};
use proptest::prelude::*;
use rand::Rng;

fn ring_for(choice: usize) -> Ring {
    let params = [
        Params::chain(2, 3),
        Params::chain(5, 2),
        Params::group_algebra(2, 2, 1, 2),
        Params::group_algebra(3, 2, 2, 1),
        Params::group_algebra(3, 1, 1, 2),
        Params::trunc_ext(3, 2, 1, 1, 1, 3),
        Params::trunc_ext(2, 2, 1, 2, 2, 2),
    ];
    Ring::from_params(params[choice % params.len()]).unwrap()
}

fn matrix_strategy() -> impl Strategy<Value = (u64, u32, usize, usize, Vec<u64>)> {
    (prop::sample::select(vec![2u64, 3, 5]), 1..=3u32, 1..=6usize, 1..=6usize)
        .prop_flat_map(|(p, m, r, c)| (Just(p), Just(m), Just(r), Just(c), prop::collection::vec(0..p.pow(m), r * c)))
}

fn zmatrix(p: u64, m: u32, r: usize, c: usize, data: &[u64]) -> ZMatrix {
    ZMatrix::from_data(Zpm::new(p, m).unwrap(), r, c, data.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn nonunits_form_an_ideal(choice in 0..7usize, seed in any::<u64>()) {
        let ring = ring_for(choice);
        let mut rng = seeded(seed);
        let q = ring.coeff().modulus();
        let sample = |rng: &mut rand_chacha::ChaCha8Rng| -> Vec<u64> { (0..ring.basis_size()).map(|_| rng.gen_range(0..q)).collect() };
        let (a, b, c) = (sample(&mut rng), sample(&mut rng), sample(&mut rng));
        let (a, b) = (ring.sub(&a, &ring.scalar(ring.residue(&a))), ring.sub(&b, &ring.scalar(ring.residue(&b))));
        prop_assert!(!ring.is_unit(&a) && !ring.is_unit(&b));
        prop_assert!(!ring.is_unit(&ring.add(&a, &b)));
        prop_assert!(!ring.is_unit(&ring.mul(&c, &a)));
        let u = ring.add(&a, &ring.one());
        prop_assert_eq!(ring.mul(&u, &ring.inv(&u).unwrap()), ring.one());
    }

    #[test]
    fn structure_maps_are_homomorphisms(choice in 0..7usize, kind in 0..5usize, seed in any::<u64>()) {
        let ring = ring_for(choice);
        let par = ring.params();
        let kind = match kind {
            0 => MapKind::ReduceLevel { n: par.n.saturating_sub(1).max(if par.q == 0 { 0 } else { 1 }) },
            1 => MapKind::ModPower { n: 1 },
            2 => MapKind::Augment,
            3 => MapKind::KillVars,
            _ => MapKind::Inclusion { j: par.j.max(1), t: if par.j > 0 { par.t } else { 2 } },
        };
        let f = RingMap::new(&ring, kind).unwrap();
        let mut rng = seeded(seed);
        let x = random_elem(&mut rng, &ring);
        let y = random_elem(&mut rng, &ring);
        let (fx, fy) = (f.apply(&x).unwrap(), f.apply(&y).unwrap());
        prop_assert_eq!(f.apply(&ring.add(&x, &y)).unwrap(), f.dst.add(&fx, &fy));
        prop_assert_eq!(f.apply(&ring.mul(&x, &y)).unwrap(), f.dst.mul(&fx, &fy));
        prop_assert_eq!(f.apply(&ring.one()).unwrap(), f.dst.one());
        // Augmenting after the structure map agrees with augmenting directly.
        let aug = RingMap::new(&f.dst, MapKind::Augment).unwrap();
        let direct = RingMap::new(&ring, MapKind::Augment).unwrap();
        let via = aug.apply(&fx).unwrap();
        let straight = direct.apply(&x).unwrap();
        let md = Modp::new(par.p, f.dst.coeff().m());
        prop_assert_eq!(via[0] % md.q, straight[0] % md.q);
    }

    #[test]
    fn snf_round_trip((p, m, r, c, data) in matrix_strategy()) {
        let a = zmatrix(p, m, r, c, &data);
        let snf = smith_normal_form(&a, Track::ALL);
        let back = snf.u_inv.as_ref().unwrap().mul(&snf.d()).mul(snf.v_inv.as_ref().unwrap());
        prop_assert_eq!(&back, &a);
        prop_assert_eq!(snf.u.as_ref().unwrap().mul(snf.u_inv.as_ref().unwrap()), ZMatrix::identity(a.ring(), r));
        prop_assert_eq!(snf.v.as_ref().unwrap().mul(snf.v_inv.as_ref().unwrap()), ZMatrix::identity(a.ring(), c));
    }

    #[test]
    fn prime_field_rank_is_gaussian_rank((p, _m, r, c, data) in matrix_strategy()) {
        let data: Vec<u64> = data.iter().map(|x| x % p).collect();
        let a = zmatrix(p, 1, r, c, &data);
        prop_assert_eq!(smith_normal_form(&a, Track::NONE).rank, rank_mod_p(p, &rows_of(&a)));
    }

    #[test]
    fn kernel_of_product_is_bounded(p in prop::sample::select(vec![2u64, 3]), m in 1..=3u32, seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let (k, l, n) = (rng.gen_range(1..=5usize), rng.gen_range(1..=5usize), rng.gen_range(1..=5usize));
        let md = Modp::new(p, m);
        let mut random = |r: usize, c: usize| (0..r).map(|_| (0..c).map(|_| rng.gen_range(0..md.q)).collect()).collect::<Vec<Vec<u64>>>();
        let (a, b) = (random(k, l), random(l, n));
        let ab = naive_mul(md, &a, &b);
        let ker = |x: &[Vec<u64>], cols: usize| cols as u64 * m as u64 - image_log(md, x);
        prop_assert!(ker(&ab, n) <= ker(&a, l) + ker(&b, n));
    }

    #[test]
    fn underlying_is_functorial(choice in 2..5usize, seed in any::<u64>()) {
        let ring = ring_for(choice);
        let mut rng = seeded(seed);
        let (r, k, c) = (rng.gen_range(1..=3usize), rng.gen_range(1..=3usize), rng.gen_range(1..=3usize));
        let mut x = RMatrix::zeros(&ring, r, k);
        let mut y = RMatrix::zeros(&ring, k, c);
        for i in 0..r { for j in 0..k { x.set(i, j, &random_elem(&mut rng, &ring)); } }
        for i in 0..k { for j in 0..c { y.set(i, j, &random_elem(&mut rng, &ring)); } }
        prop_assert_eq!(x.mul(&y).underlying(), x.underlying().mul(&y.underlying()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn minimization_invariants(seed in any::<u64>()) {
        let c = random_complex(&mut seeded(seed)).unwrap();
        let once = minimize(&c);
        prop_assert!(once.certificate.is_minimal());
        prop_assert_eq!(once.complex.euler_characteristic(), c.euler_characteristic());
        prop_assert!(once.incl.is_chain_map(&once.complex, &c));
        prop_assert!(once.proj.is_chain_map(&c, &once.complex));
        let twice = minimize(&once.complex);
        prop_assert_eq!(twice.complex.ranks(), once.complex.ranks());
        prop_assert_eq!(twice.splits, 0);
        let cmp = same_homology(&c, &once.complex).unwrap();
        prop_assert!(cmp.verdict != IsoVerdict::Distinct);
        for deg in c.degrees() {
            prop_assert_eq!(c.cohomology(deg).module().exps.clone(), once.complex.cohomology(deg).module().exps.clone());
        }
    }

    #[test]
    fn ordinary_part_matches_cohomology(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let c = random_complex(&mut rng).unwrap();
        let ring = c.ring().clone();
        // Multiplication by a ring element is a chain endomorphism.
        let x = if rng.gen_bool(0.5) { random_unit(&mut rng, &ring) } else { random_nonunit(&mut rng, &ring) };
        let t = ChainMap { lo: c.lo(), maps: c.degrees().map(|d| RMatrix::scalar_diag(&ring, c.rank(d), &x)).collect() };
        let part = ordinary_part_complex(&c, &t).unwrap();
        for check in verify_ordinary_part(&c, &t, &part).unwrap() {
            prop_assert!(check.equal, "degree {}: {:?} vs {:?}", check.degree, check.exps_summand, check.exps_ordinary);
        }
    }

    #[test]
    fn fitting_and_projectors(p in prop::sample::select(vec![2u64, 3, 5]), m in 1..=3u32, seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let mut exps: Vec<u32> = (0..rng.gen_range(1..=4)).map(|_| rng.gen_range(1..=m)).collect();
        exps.sort_unstable_by(|a, b| b.cmp(a));
        let coeff = Zpm::new(p, m).unwrap();
        let endo = |rng: &mut rand_chacha::ChaCha8Rng| {
            let rows: Vec<Vec<i64>> = exps
                .iter()
                .map(|&ei| exps.iter().map(|&ej| (p.pow(ei.saturating_sub(ej)) * rng.gen_range(0..p.pow(m))) as i64).collect())
                .collect();
            ZMatrix::from_rows(coeff, &rows).unwrap()
        };
        let a = endo(&mut rng);
        let t = a.mul(&a).add(&a.scale(rng.gen_range(0..p.pow(m))));
        let module = FiniteModule::new(coeff, exps.clone()).unwrap().with_action("A", a.clone()).unwrap();
        let fit = fitting_decomposition(&module, &t).unwrap();
        let checks = fit.check(&module);
        prop_assert!(checks.all(), "{:?}", checks);
        let k = fit.stabilization as u64;
        prop_assert_eq!(module.span_log_order(&t.pow(k)), module.span_log_order(&t.pow(k + 1)));
        prop_assert!(k <= module.log_order());
        let eta = rng.gen_range(0..p.pow(m));
        let proj = localization_projector_module(&module, &[(t.clone(), eta)], &[]).unwrap();
        prop_assert!(module.commutes(&proj, &a));
        prop_assert!(module.commutes(&proj, &t));
    }

    #[test]
    fn auslander_buchsbaum(p in prop::sample::select(vec![2u64, 3]), q in 1..=3usize, seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let ring = GradedRing::polynomial(p, q).unwrap();
        let field = Zpm::new(p, 1).unwrap();
        let gens: Vec<Vector> = (0..rng.gen_range(1..=3))
            .map(|_| {
                let d = rng.gen_range(1..=3u16);
                let terms = (0..rng.gen_range(1..=3))
                    .map(|_| {
                        let mut e = vec![0u16; q];
                        for _ in 0..d { e[rng.gen_range(0..q)] += 1; }
                        (0, Mono(e), rng.gen_range(1..p))
                    })
                    .collect();
                Vector::from_terms(field, terms)
            })
            .filter(|v| !v.is_zero())
            .collect();
        let module = GradedModule::cyclic(&ring, gens).unwrap();
        let res = minimal_free_resolution(&module).unwrap();
        prop_assert!(res.composites_vanish());
        prop_assert!(res.length().is_none_or(|l| l <= q));
        let rep = depth_pd(&module).unwrap();
        if let (Some(d), Some(pd)) = (rep.depth, rep.proj_dim) {
            prop_assert_eq!(d + pd, q);
            prop_assert!(d as i64 <= rep.krull_dim);
        }
    }

    #[test]
    fn numerology_identities(n in 1..=5000u64, r1 in 0..=500u64, r2 in 0..=500u64) {
        prop_assume!(r1 + r2 > 0);
        let s = Signature::new(n, r1, r2).unwrap();
        let inv = invariants(s).unwrap();
        prop_assert!(inv.l0 >= 0 && inv.q0 >= 0);
        prop_assert_eq!(2 * inv.q0 + inv.l0, inv.dim_y);
        prop_assert!(check_infinity_identity(s).unwrap().equal);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn patching_is_deterministic_and_compatible(
        p in prop::sample::select(vec![2u64, 3]),
        m in 1..=2u32,
        j in 0..=1u32,
        levels in 1..=3u32,
    ) {
        let tower = TowerConfig::free(p, m, 1, j, levels);
        let opts = PatchOptions { levels: None, parallel: false };
        let a = patch(&tower, opts).unwrap();
        let b = patch(&tower, PatchOptions { parallel: true, ..opts }).unwrap();
        prop_assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        prop_assert!(a.chain_compatible());
        for w in a.data.windows(2) {
            let down = reduce_datum(&w[1], w[0].level).unwrap();
            prop_assert_eq!(down.fingerprint, w[0].fingerprint);
        }
        for d in &a.data {
            // Free of rank one: |H truncation| = |R truncation| after augmenting.
            let aug = d.augmented().unwrap();
            prop_assert_eq!(aug.cohomology(0).module().log_order(), d.h.log_order());
        }
    }
}
