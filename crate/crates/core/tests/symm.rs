//! Randomized checks of canonicalization against a brute-force orbit search.

use std::collections::HashMap;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use txs_core::expr::{parse, Dim, Session, TensorKind};
use txs_core::symm::{canonicalize, permutations, SymmetrySpec};
use txs_core::Expr;

const CASES: usize = 1000;

fn session() -> Session {
    let mut s = Session::standard(Dim::Sym(Arc::from("d")));
    let decl = [
        ("A", SymmetrySpec::symmetric(2, &[0, 1])),
        ("B", SymmetrySpec::antisymmetric(2, &[0, 1])),
        ("W", SymmetrySpec::riemann()),
        ("V", SymmetrySpec::none(1)),
        ("T", SymmetrySpec::symmetric(3, &[0, 1])),
        ("U", SymmetrySpec::antisymmetric(3, &[0, 1, 2])),
        ("X", SymmetrySpec::none(3)),
    ];
    for (name, sym) in decl {
        let rank = sym.n;
        s.declare_tensor(name, rank, sym, name, TensorKind::Plain).unwrap();
    }
    s
}

type Slot = (String, bool);

#[derive(Clone, Debug)]
struct Mono {
    factors: Vec<(String, Vec<Slot>)>,
}

impl Mono {
    fn text(&self) -> String {
        self.factors
            .iter()
            .map(|(h, slots)| {
                let ix: Vec<String> = slots
                    .iter()
                    .map(|(l, up)| if *up { l.clone() } else { format!("-{}", l) })
                    .collect();
                format!("{}[{}]", h, ix.join(","))
            })
            .collect::<Vec<_>>()
            .join("*")
    }

    fn expr(&self, s: &Session) -> Expr {
        parse(&self.text(), s).unwrap()
    }

    fn dummies(&self) -> Vec<String> {
        let mut count: HashMap<&str, usize> = HashMap::new();
        for (_, slots) in &self.factors {
            for (l, _) in slots {
                *count.entry(l).or_default() += 1;
            }
        }
        let mut d: Vec<String> = count.into_iter().filter(|(_, n)| *n == 2).map(|(l, _)| l.to_string()).collect();
        d.sort();
        d
    }

    /// Key invariant under renaming dummies: dummies are named by order of
    /// first appearance.
    fn key(&self) -> String {
        let dummies = self.dummies();
        let mut names: HashMap<String, String> = HashMap::new();
        let mut out = String::new();
        for (h, slots) in &self.factors {
            out.push_str(h);
            out.push('[');
            for (l, up) in slots {
                let name = if dummies.contains(l) {
                    let n = names.len();
                    names.entry(l.clone()).or_insert_with(|| format!("#{}", n)).clone()
                } else {
                    l.clone()
                };
                out.push_str(if *up { "+" } else { "-" });
                out.push_str(&name);
                out.push(',');
            }
            out.push(']');
        }
        out
    }
}

const HEADS: [(&str, usize); 7] = [("A", 2), ("B", 2), ("W", 4), ("V", 1), ("T", 3), ("U", 3), ("X", 3)];
const FREE: [&str; 8] = ["a", "b", "c", "d", "e", "f", "g", "h"];
const DUMMY: [&str; 8] = ["m", "n", "o", "p", "q", "r", "s", "t"];

fn random_heads(rng: &mut impl Rng) -> Vec<(&'static str, usize)> {
    loop {
        let k = rng.gen_range(1..=3);
        let heads: Vec<_> = (0..k).map(|_| HEADS[rng.gen_range(0..HEADS.len())]).collect();
        let n: usize = heads.iter().map(|h| h.1).sum();
        if n <= 8 {
            return heads;
        }
    }
}

/// A random monomial on the given heads; `frees` fixes the free labels and
/// their variances when given.
fn random_mono(rng: &mut impl Rng, heads: &[(&str, usize)], frees: Option<&[Slot]>) -> Mono {
    let n: usize = heads.iter().map(|h| h.1).sum();
    let mut slots: Vec<Slot> = Vec::new();
    match frees {
        Some(f) => slots.extend(f.iter().cloned()),
        None => {
            let pairs = rng.gen_range(0..=n / 2);
            for l in FREE.iter().take(n - 2 * pairs) {
                slots.push((l.to_string(), rng.gen()));
            }
        }
    }
    let pairs = (n - slots.len()) / 2;
    for l in DUMMY.iter().take(pairs) {
        let up = rng.gen();
        slots.push((l.to_string(), up));
        slots.push((l.to_string(), !up));
    }
    slots.shuffle(rng);
    let mut it = slots.into_iter();
    Mono {
        factors: heads
            .iter()
            .map(|(h, r)| (h.to_string(), it.by_ref().take(*r).collect()))
            .collect(),
    }
}

fn frees_of(m: &Mono) -> Vec<Slot> {
    let d = m.dummies();
    m.factors
        .iter()
        .flat_map(|(_, s)| s.iter().cloned())
        .filter(|(l, _)| !d.contains(l))
        .collect()
}

fn slot_group(s: &Session, head: &str) -> Vec<(Vec<u32>, i8)> {
    let g = s.factor_group(head, 0).unwrap();
    g.elements.iter().map(|p| (p.images.clone(), p.sign)).collect()
}

fn permute(slots: &[Slot], images: &[u32]) -> Vec<Slot> {
    images.iter().map(|&i| slots[i as usize].clone()).collect()
}

/// A random element of the orbit of `m` with its sign.
fn random_orbit_element(rng: &mut impl Rng, m: &Mono, s: &Session) -> (Mono, i8) {
    let mut sign = 1;
    let mut factors: Vec<(String, Vec<Slot>)> = m
        .factors
        .iter()
        .map(|(h, slots)| {
            let g = slot_group(s, h);
            let (images, sg) = &g[rng.gen_range(0..g.len())];
            sign *= sg;
            (h.clone(), permute(slots, images))
        })
        .collect();
    factors.shuffle(rng);
    let dummies = m.dummies();
    let mut fresh: Vec<&str> = DUMMY.to_vec();
    fresh.shuffle(rng);
    let rename: HashMap<&String, (&str, bool)> =
        dummies.iter().zip(fresh).map(|(d, f)| (d, (f, rng.gen::<bool>()))).collect();
    for (_, slots) in &mut factors {
        for (l, up) in slots.iter_mut() {
            if let Some((f, flip)) = rename.get(l) {
                *l = f.to_string();
                *up ^= flip;
            }
        }
    }
    (Mono { factors }, sign)
}

/// The orbit of `m` under slot symmetries, factor reordering and exchange of
/// the positions of each dummy pair, as key -> set of signs reached.
fn orbit(m: &Mono, s: &Session) -> HashMap<String, (bool, bool)> {
    let groups: Vec<_> = m.factors.iter().map(|(h, _)| slot_group(s, h)).collect();
    let dummies = m.dummies();
    let mut out: HashMap<String, (bool, bool)> = HashMap::new();
    let mut choice = vec![0usize; groups.len()];
    loop {
        let mut sign = 1i8;
        let base: Vec<(String, Vec<Slot>)> = m
            .factors
            .iter()
            .zip(&groups)
            .zip(&choice)
            .map(|(((h, slots), g), &c)| {
                sign *= g[c].1;
                (h.clone(), permute(slots, &g[c].0))
            })
            .collect();
        for order in permutations(base.len()) {
            let arranged: Vec<_> = order.iter().map(|&i| base[i as usize].clone()).collect();
            for mask in 0..(1u32 << dummies.len()) {
                let mut f = arranged.clone();
                for (_, slots) in &mut f {
                    for (l, up) in slots.iter_mut() {
                        if let Some(k) = dummies.iter().position(|d| d == l) {
                            if mask >> k & 1 == 1 {
                                *up = !*up;
                            }
                        }
                    }
                }
                let key = Mono { factors: f }.key();
                let e = out.entry(key).or_insert((false, false));
                if sign > 0 {
                    e.0 = true;
                } else {
                    e.1 = true;
                }
            }
        }
        // next element of the product of groups
        let mut k = 0;
        loop {
            if k == choice.len() {
                return out;
            }
            choice[k] += 1;
            if choice[k] < groups[k].len() {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
}

#[derive(Debug, PartialEq)]
enum Brute {
    Zero,
    /// Whether `other` lies in the orbit, and with which sign.
    Related(Option<i8>),
}

fn brute_compare(m: &Mono, other: &Mono, s: &Session) -> Brute {
    let orb = orbit(m, s);
    if orb.values().any(|&(p, n)| p && n) {
        return Brute::Zero;
    }
    Brute::Related(orb.get(&other.key()).map(|&(p, _)| if p { 1 } else { -1 }))
}

pub fn check_idempotent() {
    let s = session();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..CASES {
        let heads = random_heads(&mut rng);
        let m = random_mono(&mut rng, &heads, None);
        let once = canonicalize(&m.expr(&s), &s).unwrap();
        let twice = canonicalize(&once, &s).unwrap();
        assert_eq!(once, twice, "{}", m.text());
    }
}

pub fn check_constant_on_orbits() {
    let s = session();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..CASES {
        let heads = random_heads(&mut rng);
        let m = random_mono(&mut rng, &heads, None);
        let (o, sign) = random_orbit_element(&mut rng, &m, &s);
        let a = canonicalize(&m.expr(&s), &s).unwrap();
        let b = canonicalize(&o.expr(&s), &s).unwrap();
        let b = if sign < 0 { b.neg() } else { b };
        assert_eq!(a, b, "{} vs {}", m.text(), o.text());
    }
}

pub fn check_agrees_with_brute_force() {
    let s = session();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut related = 0;
    for case in 0..CASES {
        let heads = random_heads(&mut rng);
        let m = random_mono(&mut rng, &heads, None);
        let other = if case % 2 == 0 {
            random_orbit_element(&mut rng, &m, &s).0
        } else {
            random_mono(&mut rng, &heads, Some(&frees_of(&m)))
        };
        let a = canonicalize(&m.expr(&s), &s).unwrap();
        let b = canonicalize(&other.expr(&s), &s).unwrap();
        match brute_compare(&m, &other, &s) {
            Brute::Zero => assert!(a.is_zero(), "{} should vanish", m.text()),
            Brute::Related(Some(sign)) => {
                related += 1;
                let b = if sign < 0 { b.neg() } else { b };
                assert_eq!(a, b, "{} ~ {}", m.text(), other.text());
            }
            Brute::Related(None) => {
                assert!(!a.is_zero(), "{} is not zero", m.text());
                assert!(
                    a != b && a != b.neg(),
                    "{} and {} are not related but canonicalize alike",
                    m.text(),
                    other.text()
                );
            }
        }
    }
    assert!(related > CASES / 3);
}

#[test]
fn canonicalization_is_idempotent() {
    check_idempotent();
}

#[test]
fn canonical_form_is_constant_on_orbits() {
    check_constant_on_orbits();
}

#[test]
fn canonicalization_agrees_with_brute_force_orbits() {
    check_agrees_with_brute_force();
}
