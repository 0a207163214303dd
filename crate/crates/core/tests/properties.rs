use std::collections::BTreeSet;
use std::path::PathBuf;
use std::sync::Arc;

use proptest::prelude::*;

use bq_core::cyclo::{RootOfUnity, Q};
use bq_core::extquot::GammaSet;
use bq_core::geomequiv::{check_spectrum_preserving, compose_certificates, BlockAlgebra, FilteredMorphism};
use bq_core::groups::{character_table, dixon_character_table, twisted_irreps, Cocycle, FiniteGroup};
use bq_core::klparam::{
    a_weight, affine_to_kl, is_tempered, kl_to_affine, stab_action, MultiSegment, Segment, StabElement,
};
use bq_core::packets::{cuspidal_support_unitary_part, enumerate_params_component, enumerate_params_g};
use bq_core::report::kl_stab_elements;
use bq_core::scenario::Scenario;
use bq_core::springer::{
    a_value_regular_in_levi, class_of_levi, distinguished_levi, partitions, UnipotentClass,
};
use bq_core::torus::{Coord, TorusPoint};

fn scenario(name: &str) -> Scenario {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join(format!("../../scenarios/{name}.scenario"));
    Scenario::load(&p).unwrap()
}

fn coord() -> impl Strategy<Value = Coord> {
    (0i64..6, -6i64..=6).prop_map(|(a, r)| Coord::new(RootOfUnity::from_fraction(a, 6), Q::new(r, 2)))
}

fn segment() -> impl Strategy<Value = Segment> {
    (coord(), 1u32..=4).prop_map(|(start, len)| Segment { start, len })
}

fn multisegment(blocks: usize) -> impl Strategy<Value = MultiSegment> {
    prop::collection::vec(prop::collection::vec(segment(), 0..4), blocks)
        .prop_map(|b| MultiSegment::new(b).unwrap())
}

fn perm(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<usize>>()).prop_shuffle()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, ..ProptestConfig::default() })]

    #[test]
    fn kl_round_trip(ms in multisegment(3)) {
        let p = kl_to_affine(&ms);
        prop_assert_eq!(affine_to_kl(&p), ms.clone());
        prop_assert_eq!(kl_to_affine(&affine_to_kl(&p)), p.clone());
        prop_assert_eq!(p.t().rank() as u32, ms.block_lengths().iter().sum::<u32>());
    }

    #[test]
    fn stab_action_keeps_weight_and_temperedness(
        ms in multisegment(3),
        bp in perm(3),
        shifts in prop::collection::vec(0i64..12, 3),
    ) {
        let g = StabElement {
            label: "g".into(),
            block_perm: bp,
            shift: shifts.iter().map(|&k| Coord::unitary(RootOfUnity::from_fraction(k, 12))).collect(),
        };
        let moved = stab_action(&ms, &g).unwrap();
        prop_assert_eq!(a_weight(&moved), a_weight(&ms));
        prop_assert_eq!(is_tempered(&moved), is_tempered(&ms));
    }

    #[test]
    fn unitary_part_idempotent_and_equivariant(
        pts in prop::collection::vec(coord(), 4),
        p in perm(4),
        shift in prop::collection::vec(0i64..6, 4),
    ) {
        let t = TorusPoint(pts);
        let u = t.unitary_part();
        prop_assert_eq!(u.unitary_part(), u.clone());
        prop_assert!(u.is_unitary());
        let s = TorusPoint(shift.iter().map(|&k| Coord::unitary(RootOfUnity::from_fraction(k, 6))).collect());
        prop_assert_eq!(t.permute(&p).add(&s).unitary_part(), u.permute(&p).add(&s));
    }

    #[test]
    fn cohomologous_cocycles_give_equal_dims(
        base in prop::sample::select(vec![0usize, 1, 2]),
        cochain in prop::collection::vec(0i64..12, 8),
    ) {
        let (g, c) = match base {
            0 => (Arc::new(FiniteGroup::abelian(&[2, 2])), true),
            1 => (Arc::new(FiniteGroup::abelian(&[2, 4])), true),
            _ => (Arc::new(FiniteGroup::symmetric(3)), false),
        };
        let k = if c {
            let inv: Vec<usize> = if g.order() == 4 { vec![2, 2] } else { vec![2, 4] };
            Cocycle::from_fn(g.clone(), move |a, b| {
                let (x, y) = (FiniteGroup::mixed_radix(a, &inv), FiniteGroup::mixed_radix(b, &inv));
                RootOfUnity::from_fraction((x[0] * y[1]) as i64, 2)
            })
            .unwrap()
        } else {
            Cocycle::trivial(g.clone())
        };
        let mut f: Vec<RootOfUnity> = (0..g.order()).map(|i| RootOfUnity::from_fraction(cochain[i % 8], 12)).collect();
        f[0] = RootOfUnity::ONE;
        let shifted = k.add(&Cocycle::coboundary(g.clone(), &f).unwrap());
        let dims = |c: &Cocycle| {
            let mut d: Vec<u64> = twisted_irreps(c).unwrap().iter().map(|r| r.dim).collect();
            d.sort_unstable();
            d
        };
        prop_assert_eq!(dims(&k), dims(&shifted));
    }

    #[test]
    fn extended_quotient_ignores_point_order(p in perm(10)) {
        let s5 = Arc::new(FiniteGroup::symmetric(5));
        let all: Vec<Vec<usize>> = (0..5).flat_map(|i| (i + 1..5).map(move |j| vec![i, j])).collect();
        let perms = s5.perms().unwrap().to_vec();
        let x = GammaSet::from_action(s5, all.iter().map(|s| format!("{s:?}")).collect(), |e, k| {
            let mut img: Vec<usize> = all[k].iter().map(|&i| perms[e][i]).collect();
            img.sort_unstable();
            all.iter().position(|s| *s == img).unwrap()
        })
        .unwrap();
        let y = x.relabel(&p).unwrap();
        let key = |s: &GammaSet| {
            let mut v: Vec<(String, String, u64)> = s
                .extended_quotient()
                .unwrap()
                .into_iter()
                .map(|q| {
                    let d = q.induced_dim();
                    let o = s.orbits().into_iter().find(|o| o.contains(&q.point)).unwrap();
                    (o.iter().map(|&i| s.labels()[i].clone()).min().unwrap(), q.rho_label, d)
                })
                .collect();
            v.sort();
            v
        };
        prop_assert_eq!(key(&x), key(&y));
    }

    #[test]
    fn spectrum_certificates_compose_and_ignore_labels(
        p1 in perm(3), p2 in perm(3), p3 in perm(3),
        q1 in perm(2), q2 in perm(2), q3 in perm(2),
        rs in perm(5), rt in perm(5),
    ) {
        // level 0 holds blocks 0..3, level 1 adds 3..5
        let alg = |t: &str| BlockAlgebra::new(
            (0..5).map(|i| (format!("{t}{i}"), 1 + i as u64)).collect(),
            vec![vec![0, 1, 2], vec![0, 1, 2, 3, 4]],
        ).unwrap();
        let step = |a: &[usize], b: &[usize], s: &str, t: &str| {
            let mut e: Vec<(usize, usize, u64)> = (0..3).map(|i| (i, a[i], 1)).collect();
            e.extend((0..2).map(|i| (3 + i, 3 + b[i], 1)));
            e.push((3, a[0], 1));
            FilteredMorphism::new(alg(s), alg(t), e).unwrap()
        };
        let m = [step(&p1, &q1, "a", "b"), step(&p2, &q2, "b", "c"), step(&p3, &q3, "c", "d")];
        let certs: Vec<Vec<usize>> = m.iter().map(|x| check_spectrum_preserving(x).prim.unwrap()).collect();
        let composed = compose_certificates(&compose_certificates(&certs[0], &certs[1]), &certs[2]);
        let direct = m[0].then(&m[1]).unwrap().then(&m[2]).unwrap();
        prop_assert_eq!(check_spectrum_preserving(&direct).prim, Some(composed));
        // relabelling within levels
        let fix = |r: &[usize]| -> Vec<usize> {
            let low: Vec<usize> = r.iter().copied().filter(|&x| x < 3).collect();
            let high: Vec<usize> = r.iter().copied().filter(|&x| x >= 3).collect();
            low.into_iter().chain(high).collect()
        };
        let (rs, rt) = (fix(&rs), fix(&rt));
        let moved = m[0].relabel(&rs, &rt).unwrap();
        let c0 = &certs[0];
        let c1 = check_spectrum_preserving(&moved).prim.unwrap();
        for b in 0..5 {
            prop_assert_eq!(c1[rt[b]], rs[c0[b]]);
        }
    }
}

#[test]
fn mn_matches_dixon_up_to_s7() {
    for n in 2..=7 {
        let g = FiniteGroup::symmetric_product(&[n]);
        let mn = character_table(&g).unwrap();
        let dx = dixon_character_table(&g).unwrap();
        let rows = |t: &bq_core::groups::CharacterTable| -> BTreeSet<Vec<String>> {
            (0..t.len()).map(|r| t.element_values(r).iter().map(|v| v.to_string()).collect()).collect()
        };
        assert_eq!(rows(&mn), rows(&dx), "S{n}");
        let sq: i64 = (0..mn.len()).map(|r| mn.rows[r].degree().pow(2)).sum();
        assert_eq!(sq as usize, g.order());
    }
}

#[test]
fn trivial_cocycles_match_pairs_count() {
    // (X // Γ)_2 counted directly: orbits times conjugacy classes of stabilizers
    let s4 = Arc::new(FiniteGroup::symmetric(4));
    let perms = s4.perms().unwrap().to_vec();
    let pairs: Vec<(usize, usize)> = (0..4).flat_map(|i| (0..4).filter(move |&j| j != i).map(move |j| (i, j))).collect();
    let x = GammaSet::from_action(s4.clone(), pairs.iter().map(|p| format!("{p:?}")).collect(), |e, k| {
        let (i, j) = pairs[k];
        pairs.iter().position(|&q| q == (perms[e][i], perms[e][j])).unwrap()
    })
    .unwrap();
    let mut direct = 0;
    for o in x.orbits() {
        let stab: Vec<usize> = (0..24).filter(|&g| x.act(g, o[0]) == o[0]).collect();
        let mut seen = BTreeSet::new();
        for &a in &stab {
            if seen.contains(&a) {
                continue;
            }
            direct += 1;
            for &h in &stab {
                seen.insert(s4.mul(s4.mul(h, a), s4.inv(h)));
            }
        }
    }
    assert_eq!(x.extended_quotient().unwrap().len(), direct);
}

#[test]
fn distinguished_levi_injective_and_regular() {
    for n in 1..=8 {
        let mut seen = BTreeSet::new();
        for l in partitions(n) {
            let u = UnipotentClass::new(vec![l]);
            let shape = distinguished_levi(&u);
            assert_eq!(class_of_levi(&shape), u);
            assert_eq!(a_value_regular_in_levi(&shape), 0);
            assert!(seen.insert(shape));
        }
    }
}

#[test]
fn same_packet_is_an_equivalence_on_resamples() {
    for (name, dens) in [("sl2_quadratic", [3u32, 5]), ("swap_pairs", [3, 5]), ("halved", [2, 4]), ("twisted_r", [3, 5])] {
        for den in dens {
            let sc = scenario(name).with_denominator(Some(den));
            let s = &sc.class;
            let pts = sc.points();
            let g = enumerate_params_g(s, &pts, false).unwrap();
            let part = g.packet_partition().unwrap();
            assert!(part.equivalence_checked);
            assert!(part.sizes().iter().all(|&k| k == 1), "{name}/{den}");
            for c in s.enumerate_subordinate().unwrap() {
                let set = enumerate_params_component(s, &c, &pts).unwrap();
                assert!(set.packet_partition().unwrap().equivalence_checked);
            }
        }
    }
}

#[test]
fn cuspidal_support_unitary_part_is_an_orbit_invariant() {
    for name in ["swap_pairs", "sl2_quadratic", "klein_twisted"] {
        let sc = scenario(name);
        let g = enumerate_params_g(&sc.class, &sc.points(), false).unwrap();
        for i in 0..g.points.len() {
            if !g.points[i].tempered {
                assert!(cuspidal_support_unitary_part(&g, i).is_err());
                continue;
            }
            let orbit = cuspidal_support_unitary_part(&g, i).unwrap();
            assert!(orbit.iter().all(|t| t.is_unitary() && t.unitary_part() == *t));
            // equal on every parameter with the same base orbit
            for j in 0..g.points.len() {
                if g.points[j].tempered && orbit.contains(&g.points[j].base) {
                    assert_eq!(cuspidal_support_unitary_part(&g, j).unwrap(), orbit);
                }
            }
        }
    }
}

#[test]
fn stab_generators_permute_g_parameters() {
    for name in ["sl2_quadratic", "swap_pairs", "halved", "klein_twisted", "twisted_r"] {
        let sc = scenario(name);
        let s = &sc.class;
        let g = enumerate_params_g(s, &sc.points(), false).unwrap();
        let all: BTreeSet<MultiSegment> = g.points.iter().map(|p| p.multisegment(&s.blocks).unwrap()).collect();
        assert_eq!(all.len(), g.points.len());
        for e in kl_stab_elements(s, sc.sample.angle_denominator) {
            let img: BTreeSet<MultiSegment> = all.iter().map(|m| stab_action(m, &e).unwrap()).collect();
            assert_eq!(img, all, "{name}: {}", e.label);
        }
    }
}

#[test]
fn component_cocycle_vanishes_on_weyl_part() {
    for name in ["sl2_quadratic", "swap_pairs", "halved", "klein_twisted", "twisted_r"] {
        let sc = scenario(name);
        let s = &sc.class;
        for c in s.enumerate_subordinate().unwrap() {
            let weyl: Vec<usize> = (0..c.w_t.order())
                .filter(|&w| {
                    let m = &c.w_t_maps[w];
                    m.shift.is_zero() && s.block_perm(&m.perm).is_some_and(|b| b.iter().enumerate().all(|(i, &j)| i == j))
                })
                .collect();
            for &w in &weyl {
                for x in 0..c.w_t.order() {
                    assert_eq!(c.cocycle.get(w, x), RootOfUnity::ONE, "{name}");
                    assert_eq!(c.cocycle.get(x, w), RootOfUnity::ONE, "{name}");
                }
            }
        }
    }
}
