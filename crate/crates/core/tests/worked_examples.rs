//! Symbolic Taylor polynomials of generic functions on the filiform models.

use carnot::harness::catalog::lookup;
use carnot::scalar::{int, rat};
use carnot::taylor::{symbolic_jet, GroupTaylor, QuotientTaylor};
use carnot::{Jet, Monomial, Poly, Rational, Tolerance};

type SymPoly = Poly<Poly<Rational>>;

fn mono(e: &[u32]) -> Monomial {
    Monomial::from_exponents(e)
}

/// `X^{w_0} X^{w_1} ... F(0)`, rightmost letter applied first.
fn word_value(frame: &[carnot::field::PolyVectorField], word: &[usize], jet: &Jet<Poly<Rational>>) -> Poly<Rational> {
    let mut j = jet.clone();
    for &b in word.iter().rev() {
        j = frame[b].apply_to_jet(&j).unwrap();
    }
    j.value()
}

fn support(p: &SymPoly, n: usize) -> Vec<Vec<u32>> {
    let mut s: Vec<Vec<u32>> = p.terms().map(|(m, _)| m.padded(n)).collect();
    s.sort();
    s
}

#[test]
fn step_four_filiform_mclaurin_degree_two() {
    let m = lookup("filiform3").unwrap().build();
    let g = m.group();
    // coordinates y1 y2 y3 x1 x2; Y1 is field 0, X1 is field 3
    let (jet, _) = symbolic_jet(5, 2);
    let p = GroupTaylor::new(g, 2).mclaurin(&jet, &Tolerance::default()).unwrap().polynomial;
    let frame = g.left_frame();
    let v = |w: &[usize]| word_value(frame, w, &jet);
    let half = Poly::constant(rat(1, 2));
    let expected: Vec<(Vec<u32>, Poly<Rational>)> = vec![
        (vec![0, 0, 0, 0, 0], v(&[])),
        (vec![0, 0, 0, 1, 0], v(&[3])),
        (vec![1, 0, 0, 0, 0], v(&[0])),
        (vec![0, 0, 0, 2, 0], &v(&[3, 3]) * &half),
        (vec![2, 0, 0, 0, 0], &v(&[0, 0]) * &half),
        (vec![1, 0, 0, 1, 0], v(&[0, 3])),
        (vec![0, 1, 0, 0, 0], &v(&[3, 0]) - &v(&[0, 3])),
    ];
    let mut want: Vec<Vec<u32>> = expected.iter().map(|(e, _)| e.clone()).collect();
    want.sort();
    assert_eq!(support(&p, 5), want);
    for (e, c) in &expected {
        assert_eq!(&p.coeff(&mono(e)), c, "coefficient of {e:?}");
    }
    // the commutator coefficient is a genuine second-order combination
    assert!(!expected[6].1.is_empty());
}

#[test]
fn grushin_mclaurin_degree_two() {
    let m = lookup("filiform3").unwrap().build();
    let (jet, _) = symbolic_jet(2, 2);
    let q = vec![int(0), int(0)];
    let out = QuotientTaylor::new(&m, 2).taylor(&jet, &q, true, &Tolerance::default()).unwrap();
    let x1 = &m.projected_frame()[3];
    let f0 = jet.value();
    let d1 = x1.apply_to_jet(&jet).unwrap();
    let d11 = x1.apply_to_jet(&d1).unwrap();
    let expected = Poly::from_terms([
        (mono(&[0, 0]), f0),
        (mono(&[1, 0]), d1.value()),
        (mono(&[2, 0]), &d11.value() * &Poly::constant(rat(1, 2))),
    ]);
    assert_eq!(out.result.polynomial, expected);
}

/// Degree-3 polynomial on the quotient by the second layer of the Engel group.
fn engel_degree_three(q: &[Rational], x4_free: bool) -> (SymPoly, SymPoly) {
    let m = lookup("filiform4-2nd").unwrap().build();
    let (jet, _) = symbolic_jet(3, 3);
    let mut disp = jet.poly().clone();
    if x4_free {
        disp = disp.remap_vars(|i| if i == 2 { None } else { Some(i) });
    }
    let center: Vec<Poly<Rational>> = q.iter().map(|c| Poly::constant(c.clone())).collect();
    let jet = Jet::from_displacement(center, 3, disp);
    let out = QuotientTaylor::new(&m, 3).taylor(&jet, q, false, &Tolerance::default()).unwrap();
    (out.result.polynomial, out.lifted.polynomial)
}

const LISTED: [[u32; 3]; 10] = [
    [0, 0, 0],
    [1, 0, 0],
    [0, 1, 0],
    [1, 1, 0],
    [2, 0, 0],
    [0, 2, 0],
    [2, 1, 0],
    [1, 2, 0],
    [3, 0, 0],
    [0, 3, 0],
];

#[test]
fn engel_quotient_support_and_vanishing_coefficients() {
    for q in [vec![int(0), int(0), int(0)], vec![int(0), rat(1, 2), int(-1)]] {
        let (p, lifted) = engel_degree_three(&q, true);
        let mut want: Vec<Vec<u32>> = LISTED.iter().map(|e| e.to_vec()).collect();
        want.sort();
        assert_eq!(support(&p, 3), want, "center {q:?}");
        // lifted coordinates are x3 x1 x2 x4
        for e in [[1, 0, 0, 0], [1, 1, 0, 0], [1, 0, 1, 0]] {
            assert!(lifted.coeff(&mono(&e)).is_empty(), "{e:?} at {q:?}");
        }
        assert!(!lifted.depends_on(0));
    }
}

#[test]
fn engel_quotient_generic_function_adds_x4() {
    let (p, _) = engel_degree_three(&[int(0), int(0), int(0)], false);
    let mut want: Vec<Vec<u32>> = LISTED.iter().map(|e| e.to_vec()).collect();
    want.push(vec![0, 0, 1]);
    want.sort();
    assert_eq!(support(&p, 3), want);
}
