//! Worked examples for each public operation.

use steenres::engine::extend_naive;
use steenres::freemod::{differential_matrix, extract_component, slice};
use steenres::gf2::{kernel_basis, quotient_basis, rank, solve};
use steenres::milnor::basis_of_degree;
use steenres::strategy::{is_applicable, Regime};
use steenres::*;

fn sq(r: &[u32]) -> MilnorExponent {
    MilnorExponent::from_slice(r)
}

fn sum(terms: &[&[u32]]) -> MilnorSum {
    terms.iter().map(|r| sq(r)).collect()
}

fn sub(name: &str) -> Subalgebra {
    make_subalgebra(name.parse().unwrap(), None).unwrap()
}

fn sig(r: &[u32]) -> Signature {
    Signature { value: sq(r) }
}

fn vec_of(bits: &[u8]) -> GF2Vector {
    GF2Vector::from_bits(bits)
}

fn mat(rows: &[&[u8]]) -> GF2Matrix {
    GF2Matrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
}

fn resolved(max_s: u32, max_stem: i64) -> Resolution {
    let mut res = Resolution::new();
    resolve_range(&mut res, max_s, max_stem, &Strategy::naive()).unwrap();
    res
}

#[test]
fn degrees() {
    assert_eq!(sq(&[]).degree(), 0);
    assert_eq!(sq(&[0, 1]).degree(), 3);
    assert_eq!(sq(&[3, 1]).degree(), 6);
}

#[test]
fn bases() {
    assert_eq!(basis_of_degree(0), vec![sq(&[])]);
    assert_eq!(basis_of_degree(1), vec![sq(&[1])]);
    assert_eq!(basis_of_degree(3), vec![sq(&[3]), sq(&[0, 1])]);
}

#[test]
fn products() {
    assert!(multiply(&sq(&[1]), &sq(&[1])).is_zero());
    assert_eq!(multiply(&sq(&[2, 1]), &sq(&[])), sum(&[&[2, 1]]));
    assert_eq!(multiply(&sq(&[2]), &sq(&[1])), sum(&[&[3], &[0, 1]]));
    assert_eq!(multiply(&sq(&[1]), &sq(&[2])), sum(&[&[3]]));
}

#[test]
fn btrivial_products() {
    let a0 = sub("A(0)");
    assert_eq!(a0.multiply_btrivial(&sq(&[2]), &sq(&[1])), sum(&[&[3], &[0, 1]]));
    assert!(a0.multiply_btrivial(&sq(&[1]), &sq(&[1])).is_zero());
    for name in ["A(0)", "A(1)", "A(2)", "E"] {
        assert_eq!(sub(name).multiply_btrivial(&sq(&[5, 2]), &sq(&[])), sum(&[&[5, 2]]));
    }
}

#[test]
fn signatures() {
    let a0 = sub("A(0)");
    let a1 = sub("A(1)");
    assert_eq!(a0.signature_of(&sq(&[3])), sig(&[1]));
    assert!(a0.signature_of(&sq(&[0, 1])).is_zero());
    assert_eq!(a1.signature_of(&sq(&[3, 1])), sig(&[3, 1]));

    for name in ["A(0)", "A(1)", "E", "A(2)"] {
        assert_eq!(sub(name).signature_rank(&Signature::zero()), 0);
    }
    assert!(a1.signature_rank(&sig(&[0, 1])) > a1.signature_rank(&sig(&[3])));
    assert_eq!(a0.signature_rank(&sig(&[])), 0);
    assert_eq!(a0.signature_rank(&sig(&[1])), 1);

    assert_eq!(a0.enumerate_signatures(), vec![sig(&[]), sig(&[1])]);
    let all = a1.enumerate_signatures();
    assert_eq!(all.len(), 8);
    assert_eq!(all.first(), Some(&sig(&[])));
    assert_eq!(all.last(), Some(&sig(&[3, 1])));
    let e = make_subalgebra("E(Sq1,Sq(0,1))".parse().unwrap(), None).unwrap();
    assert_eq!(e.enumerate_signatures(), vec![sig(&[]), sig(&[1]), sig(&[0, 1]), sig(&[1, 1])]);
}

#[test]
fn presets() {
    let a1 = sub("A(1)");
    let mut got = a1.positions().to_vec();
    got.sort();
    let mut want = vec![BitPosition::new(0, 1), BitPosition::new(1, 1), BitPosition::new(0, 2)];
    want.sort();
    assert_eq!(got, want);

    // Truncation intersects with A(3): slot 1 is gone, slots 2 and 3 remain.
    let f1 = make_subalgebra("F(1)".parse().unwrap(), Some(3)).unwrap();
    let a3 = sub("A(3)");
    assert!(f1.positions().iter().all(|&p| p.t >= 2 && a3.contains_position(p)));
    assert!(f1.positions().iter().any(|p| p.t == 2) && f1.positions().iter().any(|p| p.t == 3));
    let table = milnor::BasisTable::new(30);
    let f1 = make_for_window("F(1)".parse().unwrap(), 30).unwrap();
    assert!(f1.zero_slice_dims(&table, 30).iter().all(|&d| d == 1));
    let fp1 = make_for_window("F'(1)".parse().unwrap(), 30).unwrap();
    let a0 = sub("A(0)").zero_slice_dims(&table, 30);
    let a0_dims: Vec<usize> = (0..=30).map(|n| usize::from(n <= 1)).collect();
    assert_eq!(fp1.zero_slice_dims(&table, 30), a0_dims);
    assert_eq!(a0[0], 1);
}

#[test]
fn bounds() {
    assert_eq!(sub("A(0)").vanishing_bounds().unwrap(), (1, 1));
    assert_eq!(sub("A(1)").vanishing_bounds().unwrap(), (1, 3));
    let f1 = make_subalgebra("F(1)".parse().unwrap(), Some(2)).unwrap();
    assert_eq!(f1.vanishing_bounds().unwrap(), (3, 7));
}

#[test]
fn linear_algebra() {
    assert_eq!(kernel_basis(&mat(&[&[1, 1]])), vec![vec_of(&[1, 1])]);
    assert!(kernel_basis(&GF2Matrix::identity(4)).is_empty());
    assert_eq!(kernel_basis(&mat(&[&[1, 0, 1], &[0, 1, 1]])), vec![vec_of(&[1, 1, 1])]);

    let e1 = vec_of(&[1, 0]);
    assert_eq!(quotient_basis(std::slice::from_ref(&e1), &GF2Matrix::zero(2, 1)).unwrap(), vec![e1.clone()]);
    let n = GF2Matrix::from_columns(2, std::slice::from_ref(&e1));
    assert!(quotient_basis(&[e1], &n).unwrap().is_empty());
    let k = [vec_of(&[1, 1, 0]), vec_of(&[0, 0, 1])];
    let n = GF2Matrix::from_columns(3, &[vec_of(&[1, 1, 0])]);
    let q = quotient_basis(&k, &n).unwrap();
    assert_eq!(q.len(), 1);
    // The class of (0,0,1) modulo (1,1,0).
    assert!(q[0] == vec_of(&[0, 0, 1]) || q[0] == vec_of(&[1, 1, 1]));

    let e = vec_of(&[1, 0, 1, 1]);
    assert_eq!(solve(&GF2Matrix::identity(4), &e), Some(e));
    assert_eq!(solve(&mat(&[&[1, 1]]), &vec_of(&[1])), Some(vec_of(&[1, 0])));
    assert_eq!(solve(&mat(&[&[1], &[1]]), &vec_of(&[1, 0])), None);

    assert_eq!(rank(&GF2Matrix::zero(3, 5)), 0);
    assert_eq!(rank(&GF2Matrix::identity(6)), 6);
    assert_eq!(rank(&mat(&[&[1, 1], &[1, 1]])), 1);
}

#[test]
fn element_degrees() {
    let res = resolved(2, 4);
    let g0 = res.generator_ref(0, 0).unwrap();
    let h1 = res.generator_ref(1, 1).unwrap();
    assert_eq!(h1.t, 2);
    assert_eq!(element_degree(&FreeElement::generator(h1)), Ok((1, 2)));
    assert_eq!(element_degree(&FreeElement::term(sq(&[1]), g0)), Ok((0, 1)));
    let mut mixed = FreeElement::term(sq(&[1]), g0);
    mixed.add_term(sq(&[2]), g0);
    assert!(matches!(element_degree(&mixed), Err(FreeModError::NotHomogeneous(..))));
}

#[test]
fn slices() {
    let res = Resolution::new();
    let f1 = make_for_window("F(1)".parse().unwrap(), 20).unwrap();
    for t in 0..=20 {
        assert_eq!(slice(&res, &f1, &Signature::zero(), 0, t).dim(), 1, "t = {t}");
    }
    assert!(slice(&res, &f1, &Signature::zero(), 3, 5).is_empty());
    let a0 = sub("A(0)");
    let even = slice(&res, &a0, &sig(&[]), 0, 3).dim();
    let odd = slice(&res, &a0, &sig(&[1]), 0, 3).dim();
    assert_eq!(even + odd, basis_of_degree(3).len());
    assert_eq!((even, odd), (1, 1));
}

#[test]
fn differential_matrices() {
    let res = resolved(3, 6);
    let a0 = sub("A(0)");
    let m = differential_matrix(&res, &a0, &Signature::zero(), 0, 4);
    assert_eq!(m.rows(), 0);

    // Top signature: the induced matrix is the full one on that slice.
    let a1 = sub("A(1)");
    let top = a1.enumerate_signatures().pop().unwrap();
    let (s, t) = (2, 8);
    let dom = slice(&res, &a1, &top, s, t);
    let cod = slice(&res, &a1, &top, s - 1, t);
    let m = differential_matrix(&res, &a1, &top, s, t);
    assert_eq!(m, steenres::freemod::full_matrix(&res, &dom, &cod));

    // d(Sq(1) g1) = Sq(1) Sq(1) g0 = 0.
    let g1 = res.generator_ref(1, 0).unwrap();
    let dom = slice(&res, &a0, &sig(&[1]), 1, 2);
    assert!(dom.position(&sq(&[1]), g1).is_some());
    let m = differential_matrix(&res, &a0, &sig(&[1]), 1, 2);
    let col = dom.position(&sq(&[1]), g1).unwrap();
    assert!(m.column(col).is_zero());
}

#[test]
fn components() {
    let res = Resolution::new();
    let g0 = res.generator_ref(0, 0).unwrap();
    let a0 = sub("A(0)");
    assert!(extract_component(&res, &a0, &FreeElement::zero(), &sig(&[1]), 0, 3).is_zero());
    let mut x = FreeElement::term(sq(&[3]), g0);
    x.add_term(sq(&[0, 1]), g0);
    let odd = slice(&res, &a0, &sig(&[1]), 0, 3);
    let v = extract_component(&res, &a0, &x, &sig(&[1]), 0, 3);
    assert_eq!(odd.embed(&v), FreeElement::term(sq(&[3]), g0));
    let mut back = FreeElement::zero();
    for s in a0.enumerate_signatures() {
        let part = slice(&res, &a0, &s, 0, 3);
        back.add(&part.embed(&part.extract(&x)));
    }
    assert_eq!(back, x);
    assert_eq!(odd.extract(&odd.embed(&v)), v);
}

#[test]
fn differentials() {
    let res = resolved(4, 10);
    for s in 1..=4 {
        for i in 0..res.num_generators(s) as u32 {
            let g = res.generator_ref(s, i).unwrap();
            let x = FreeElement::generator(g);
            assert_eq!(&apply_differential(&res, &x), res.differential(g));
            assert!(apply_differential(&res, &apply_differential(&res, &x)).is_zero());
        }
    }
    let g1 = res.generator_ref(1, 0).unwrap();
    assert!(apply_differential(&res, &FreeElement::term(sq(&[1]), g1)).is_zero());
}

#[test]
fn naive_steps() {
    let mut res = Resolution::new();
    extend_naive(&mut res, 0, 0).unwrap();
    assert_eq!(extend_naive(&mut res, 0, 1).unwrap(), 1);
    let g0 = res.generator_ref(0, 0).unwrap();
    let h0 = res.generator_ref(1, 0).unwrap();
    assert_eq!(res.differential(h0), &FreeElement::term(sq(&[1]), g0));
    assert_eq!(extend_naive(&mut res, 0, 2).unwrap(), 1);
    assert_eq!(extend_naive(&mut res, 0, 3).unwrap(), 0);
    // Below the diagonal nothing happens.
    assert_eq!(extend_naive(&mut res, 2, 1).unwrap(), 0);
}

#[test]
fn filtered_steps_match_naive() {
    let naive = resolved(6, 14);
    let counts = |res: &Resolution, s: u32, t: u32| res.generators(s + 1).iter().filter(|g| g.t == t).count();
    for name in ["A(0)", "A(1)"] {
        let b = sub(name);
        let mut res = Resolution::new();
        let choose = |s: u32, t: u32| is_applicable(&b, s, t).then(|| b.clone());
        let ctx = EngineContext::default();
        steenres::resolve_range_with::<EngineError>(&mut res, 6, 14, &choose, &ctx, &mut |_, _| Ok(())).unwrap();
        let filtered: Vec<_> = res.methods().iter().filter(|(_, m)| *m != "naive").map(|(k, _)| *k).collect();
        assert!(!filtered.is_empty(), "{name}");
        for (s, t) in filtered {
            assert_eq!(counts(&res, s, t), counts(&naive, s, t), "{name} at ({s}, {t})");
        }
        assert_eq!(res.chart(), naive.chart());
    }
}

#[test]
fn auto_matches_naive_through_stem_20() {
    let mut auto = Resolution::new();
    resolve_range(&mut auto, 10, 20, &Strategy::auto()).unwrap();
    assert_eq!(auto.chart(), resolved(10, 20).chart());
    assert!(auto.methods().values().any(|m| m != "naive"));
}

#[test]
fn predicates() {
    let a2 = sub("A(2)");
    assert_eq!(a2.tau(), 23);
    assert!(applicable_below(&a2, 2, 14, 134).unwrap());
    assert!(!applicable_below(&sub("A(0)"), 0, 5, 6).unwrap());
    assert!(applicable_below(&sub("A(1)"), 1, 1, 19).unwrap());

    let f1 = make_for_window("F(1)".parse().unwrap(), 200).unwrap();
    for s in 2..40u32 {
        for t in s + 1..3 * s - 3 {
            assert!(applicable_above(&f1, 1, s, t, false).unwrap(), "({s}, {t})");
        }
    }
    let fp1 = make_for_window("F'(1)".parse().unwrap(), 200).unwrap();
    for s in 2..40u32 {
        for t in s + 2..2 * s {
            assert!(applicable_above(&fp1, 1, s, t, true).unwrap(), "({s}, {t})");
        }
    }
    let f2 = make_for_window("F(2)".parse().unwrap(), 149).unwrap();
    assert!(applicable_above(&f2, 2, 35, 149, false).unwrap());
}

#[test]
fn choices() {
    let auto = Strategy::auto();
    assert!(auto.choose(1, 2).is_none());
    let deep = Strategy::new(Mode::Auto(Regime::Below)).choose(1, 40).unwrap();
    assert!(deep.contained_in_a(2) && deep.a_containment() >= 2);
    let steep = auto.choose(10, 15).unwrap();
    assert_eq!(steep.name(), "F'(1)");
}

#[test]
fn lifts() {
    let res = resolved(5, 12);
    let a0 = sub("A(0)");
    assert!(lift_cycle(&res, &a0, &FreeElement::zero()).unwrap().is_zero());
    let mut lifted = 0;
    for s in 2..=4 {
        for i in 0..res.num_generators(s) as u32 {
            let g = res.generator_ref(s, i).unwrap();
            let z = res.differential(g).clone();
            let (zs, t) = element_degree(&z).unwrap();
            assert_eq!(zs, s - 1);
            let Some(b) = Strategy::auto().choose(s, t) else { continue };
            let w = lift_cycle(&res, &b, &z).unwrap();
            assert_eq!(apply_differential(&res, &w), z);
            lifted += 1;
        }
    }
    assert!(lifted > 0);
}

#[test]
fn ranges() {
    let res = resolved(0, 20);
    let c1: Vec<u32> = res.generators(1).iter().map(|g| g.t).collect();
    assert_eq!(c1, vec![1, 2, 4, 8, 16]);
    assert_eq!(res.max_s(), 1);

    let mut res = Resolution::new();
    resolve_range(&mut res, 5, -1, &Strategy::auto()).unwrap();
    assert_eq!(res, Resolution::new());
}

#[test]
fn verification() {
    let res = resolved(4, 10);
    assert!(verify(&res, true).is_ok());

    // Delete one term from a differential with several terms.
    let (g, d) = (2..=4)
        .flat_map(|s| (0..res.num_generators(s) as u32).map(move |i| (s, i)))
        .map(|(s, i)| res.generator_ref(s, i).unwrap())
        .map(|g| (g, res.differential(g).clone()))
        .find(|(_, d)| d.len() >= 2)
        .unwrap();
    let mut broken = res.clone();
    let mut d2 = d.clone();
    let (r, h) = d.terms().next().map(|(r, h)| (r.clone(), h)).unwrap();
    d2.add_term(r, h);
    broken.set_differential(g, d2);
    let report = verify(&broken, true);
    assert!(report
        .violations
        .iter()
        .any(|v| matches!(v, Violation::DSquared { .. } | Violation::NotExact { .. })));

    // Inject a unit term: d(g) for the generator of C_2 in degree 2 gains Sq(0) h_1.
    let mut broken = res.clone();
    let g = res.generator_ref(2, 0).unwrap();
    assert_eq!(g.t, 2);
    let h1 = res.generator_ref(1, 1).unwrap();
    let mut d = res.differential(g).clone();
    d.add_term(MilnorExponent::unit(), h1);
    broken.set_differential(g, d);
    let report = verify(&broken, false);
    assert!(report.violations.contains(&Violation::NotMinimal { generator: g }));
}

#[test]
fn charts() {
    let res = resolved(8, 8);
    let c1: Vec<u32> = res.chart().iter().filter(|e| e.s == 1).map(|e| e.t).collect();
    assert_eq!(c1, vec![1, 2, 4, 8]);
    assert_eq!(Resolution::new().chart(), vec![ChartEntry { s: 0, t: 0, n: 1 }]);
    let res = resolved(10, 20);
    for e in res.chart() {
        let stem = e.t as i64 - e.s as i64;
        assert!(!(0 < stem && stem < 2 * e.s as i64 - 3), "{e:?}");
    }
}

/// A(0) past t - s > 1 and A(1) past t > 3(s + 1), without the tau term,
/// still reproduce the naive chart on this range.
#[test]
fn sharper_bounds_agree_with_naive() {
    let naive = resolved(10, 20).chart();
    let ctx = EngineContext {
        enforce_predicate: false,
        ..EngineContext::default()
    };
    let cases: [(&str, fn(u32, u32) -> bool); 2] = [("A(0)", |s, t| t > s + 1), ("A(1)", |s, t| t > 3 * (s + 1))];
    for (name, gate) in cases {
        let b = sub(name);
        let mut res = Resolution::new();
        let choose = |s: u32, t: u32| gate(s, t).then(|| b.clone());
        steenres::resolve_range_with::<EngineError>(&mut res, 10, 20, &choose, &ctx, &mut |_, _| Ok(())).unwrap();
        assert_eq!(res.chart(), naive, "{name}");
    }
}
