//! Randomized round-trip and value-preservation checks.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use txs_core::algebra::collect_tensors;
use txs_core::expr::numeric::{evaluate, lcg, random_assignment};
use txs_core::expr::{parse, Dim, Printer, Session, TensorKind};
use txs_core::symm::{canonicalize, SymmetrySpec};

fn session(dim: Dim) -> Session {
    let mut s = Session::standard(dim);
    s.declare_tensor("A", 2, SymmetrySpec::symmetric(2, &[0, 1]), "A", TensorKind::Plain).unwrap();
    s.declare_tensor("B", 2, SymmetrySpec::antisymmetric(2, &[0, 1]), "B", TensorKind::Plain).unwrap();
    s.declare_tensor("V", 1, SymmetrySpec::none(1), "V", TensorKind::Plain).unwrap();
    s.declare_tensor("T", 3, SymmetrySpec::symmetric(3, &[1, 2]), "T", TensorKind::Plain).unwrap();
    s.declare_tensor("phi", 0, SymmetrySpec::none(0), "phi", TensorKind::Plain).unwrap();
    s.declare_constant("k").unwrap();
    s
}

/// Factor templates; `_` marks a slot.
const ALGEBRAIC: [&str; 9] = [
    "A[_,_]",
    "B[_,_]",
    "V[_]",
    "T[_,_,_]",
    "g[_,_]",
    "Riemann[_,_,_,_]",
    "Ricci[_,_]",
    "RicciScalar[]",
    "phi[]",
];
const DIFFERENTIAL: [&str; 3] = ["CD[_][V[_]]", "CD[_][CD[_][phi[]]]", "CD[_][A[_,_]]"];

const FREE: [&str; 3] = ["a", "b", "c"];
const DUMMY: [&str; 6] = ["m", "n", "p", "q", "r", "s"];

fn slots(t: &str) -> usize {
    t.matches('_').count()
}

/// Random templates whose slot count can host `nfree` frees.
fn random_templates(rng: &mut impl Rng, pool: &[&'static str], nfree: usize) -> Vec<&'static str> {
    loop {
        let k = rng.gen_range(1..=3);
        let ts: Vec<_> = (0..k).map(|_| *pool.choose(rng).unwrap()).collect();
        let n: usize = ts.iter().map(|t| slots(t)).sum();
        if n >= nfree && (n - nfree).is_multiple_of(2) && n <= 8 {
            return ts;
        }
    }
}

fn fill(rng: &mut impl Rng, templates: &[&str], frees: &[(&str, bool)]) -> String {
    let n: usize = templates.iter().map(|t| slots(t)).sum();
    let mut labels: Vec<String> = frees
        .iter()
        .map(|(l, up)| if *up { l.to_string() } else { format!("-{}", l) })
        .collect();
    for d in DUMMY.iter().take((n - frees.len()) / 2) {
        let up: bool = rng.gen();
        labels.push(if up { d.to_string() } else { format!("-{}", d) });
        labels.push(if up { format!("-{}", d) } else { d.to_string() });
    }
    labels.shuffle(rng);
    let mut it = labels.into_iter();
    templates
        .iter()
        .map(|t| {
            let mut out = String::new();
            for ch in t.chars() {
                if ch == '_' {
                    out.push_str(&it.next().unwrap());
                } else {
                    out.push(ch);
                }
            }
            out
        })
        .collect::<Vec<_>>()
        .join("*")
}

/// A random rational, optionally involving the constant `k` and the
/// symbolic dimension `d`.
fn random_coeff(rng: &mut impl Rng, with_d: bool) -> String {
    let p: i64 = rng.gen_range(-5..=5);
    let q: i64 = rng.gen_range(1..=4);
    match rng.gen_range(0..if with_d { 4 } else { 3 }) {
        0 => format!("{}", p),
        1 => format!("({}/{})", p, q),
        2 => format!("({}/{} + k)", p, q),
        _ => format!("(d - {})/({} + k)", q, q),
    }
}

/// A random sum of monomials sharing the same free indices.
fn random_expr(rng: &mut impl Rng, pool: &[&'static str], with_d: bool) -> String {
    let nfree = rng.gen_range(0..=2);
    let frees: Vec<(&str, bool)> = FREE.iter().take(nfree).map(|l| (*l, rng.gen())).collect();
    let terms = rng.gen_range(1..=3);
    (0..terms)
        .map(|_| {
            let ts = random_templates(rng, pool, nfree);
            format!("{}*{}", random_coeff(rng, with_d), fill(rng, &ts, &frees))
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

pub fn check_round_trip() {
    let s = session(Dim::Sym(Arc::from("d")));
    let pool: Vec<&str> = ALGEBRAIC.iter().chain(DIFFERENTIAL.iter()).copied().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..1000 {
        let text = random_expr(&mut rng, &pool, true);
        let e = parse(&text, &s).unwrap();
        let printed = Printer::plain(&s).expr(&e);
        let back = parse(&printed, &s).unwrap_or_else(|err| panic!("{}\n{}\n{}", text, printed, err));
        assert_eq!(Printer::plain(&s).expr(&back), printed, "{}", text);
        assert_eq!(canonicalize(&back, &s).unwrap(), canonicalize(&e, &s).unwrap(), "{}", text);

        let c = collect_tensors(&e, &s).unwrap();
        let printed = Printer::plain(&s).expr(&c);
        let back = parse(&printed, &s).unwrap();
        assert_eq!(Printer::plain(&s).expr(&back), printed, "{}", text);
    }
}

pub fn check_collect_preserves_values() {
    let s = session(Dim::Int(3));
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for case in 0..200 {
        let text = random_expr(&mut rng, &ALGEBRAIC, false);
        let e = parse(&text, &s).unwrap();
        let c = collect_tensors(&e, &s).unwrap();
        let mut a = random_assignment(&s, 3, &mut lcg(case)).unwrap();
        a.constants.insert(Arc::from("k"), BigRational::from_integer(BigInt::from(7)));
        let (fe, ve) = evaluate(&e, &s, &a).unwrap();
        let (fc, vc) = evaluate(&c, &s, &a).unwrap();
        if c.is_zero() {
            assert!(ve.is_zero(), "{}", text);
            continue;
        }
        assert_eq!(fe, fc, "{}", text);
        assert_eq!(ve, vc, "{}\n{}", text, Printer::plain(&s).expr(&c));
    }
}

#[test]
fn printing_and_parsing_round_trip() {
    check_round_trip();
}

#[test]
fn collecting_preserves_values() {
    check_collect_preserves_values();
}
