use std::sync::Arc;

use txs_core::expr::{parse, Dim, Session, TensorKind};
use txs_core::symm::{canonicalize, Group, SignedPerm, SymmetrySpec};
use txs_core::young::{antisymmetrize, riemann_young_project, tableau_symmetric, young_project, Manifest, Tableau};

fn session() -> Session {
    let mut s = Session::standard(Dim::Sym(Arc::from("d")));
    s.declare_tensor("T", 3, SymmetrySpec::none(3), "T", TensorKind::Plain).unwrap();
    s
}

fn labels(v: &[&str]) -> Vec<Arc<str>> {
    v.iter().map(|s| Arc::from(*s)).collect()
}

fn assert_equal(a: &txs_core::Expr, b: &str, s: &Session) {
    let b = parse(b, s).unwrap();
    let d = canonicalize(&a.sub(&b), s).unwrap();
    assert!(d.is_zero(), "difference: {}", txs_core::expr::Printer::plain(s).expr(&d));
}

#[test]
fn rank_three_both_manifest_modes() {
    let s = session();
    let e = parse("T[a,b,c]", &s).unwrap();
    let tab = Tableau::from_strs(&[&["a", "b"], &["c"]]).unwrap();
    let anti = young_project(&e, &tab, Manifest::Antisymmetric, &s).unwrap();
    assert_equal(&anti, "1/3*T[a,b,c] + 1/3*T[b,a,c] - 1/3*T[b,c,a] - 1/3*T[c,b,a]", &s);
    let sym = young_project(&e, &tab, Manifest::Symmetric, &s).unwrap();
    assert_equal(&sym, "1/3*T[a,b,c] + 1/3*T[b,a,c] - 1/3*T[c,a,b] - 1/3*T[c,b,a]", &s);

    // manifest antisymmetry in the column {a,c}
    let swap = std::collections::HashMap::from([
        (Arc::from("a"), txs_core::Index::up("c")),
        (Arc::from("c"), txs_core::Index::up("a")),
    ]);
    assert!(canonicalize(&anti.add(&anti.rename_frees(&swap)), &s).unwrap().is_zero());
    // manifest symmetry in the row {a,b}
    let swap = std::collections::HashMap::from([
        (Arc::from("a"), txs_core::Index::up("b")),
        (Arc::from("b"), txs_core::Index::up("a")),
    ]);
    assert!(canonicalize(&sym.sub(&sym.rename_frees(&swap)), &s).unwrap().is_zero());
}

#[test]
fn projectors_are_idempotent() {
    let s = session();
    let e = parse("T[a,b,c]", &s).unwrap();
    for rows in [vec![vec!["a", "b"], vec!["c"]], vec![vec!["a", "c"], vec!["b"]], vec![vec!["a", "b", "c"]]] {
        let rows: Vec<&[&str]> = rows.iter().map(|r| r.as_slice()).collect();
        let tab = Tableau::from_strs(&rows).unwrap();
        for m in [Manifest::Antisymmetric, Manifest::Symmetric] {
            let once = young_project(&e, &tab, m, &s).unwrap();
            let twice = young_project(&once, &tab, m, &s).unwrap();
            assert_eq!(once, twice);
        }
    }
}

#[test]
fn first_bianchi_after_projection() {
    let s = session();
    let e = parse("Riemann[-a,-b,-c,-d]", &s).unwrap();
    let p = riemann_young_project(&e, &s).unwrap();
    let b = antisymmetrize(&p, &labels(&["a", "b", "c"]), &s).unwrap();
    assert!(b.is_zero());
}

#[test]
fn differentiated_riemann() {
    let s = session();
    let e = parse("CD[-e][Riemann[-a,-b,-c,-d]]", &s).unwrap();
    let p = riemann_young_project(&e, &s).unwrap();
    assert_eq!(p.len(), 15);
    assert_equal(
        &p,
        "1/12*CD[-a][Riemann[-b,-c,-d,-e]] - 1/12*CD[-a][Riemann[-b,-d,-c,-e]] - 1/6*CD[-a][Riemann[-b,-e,-c,-d]] \
         - 1/12*CD[-b][Riemann[-a,-c,-d,-e]] + 1/12*CD[-b][Riemann[-a,-d,-c,-e]] + 1/6*CD[-b][Riemann[-a,-e,-c,-d]] \
         - 1/6*CD[-c][Riemann[-a,-b,-d,-e]] - 1/12*CD[-c][Riemann[-a,-d,-b,-e]] + 1/12*CD[-c][Riemann[-a,-e,-b,-d]] \
         + 1/6*CD[-d][Riemann[-a,-b,-c,-e]] + 1/12*CD[-d][Riemann[-a,-c,-b,-e]] - 1/12*CD[-d][Riemann[-a,-e,-b,-c]] \
         + 1/3*CD[-e][Riemann[-a,-b,-c,-d]] + 1/6*CD[-e][Riemann[-a,-c,-b,-d]] - 1/6*CD[-e][Riemann[-a,-d,-b,-c]]",
        &s,
    );
}

#[test]
fn second_bianchi_after_projection() {
    let s = session();
    let e = parse("CD[-a][Riemann[-b,-c,-d,-e]]", &s).unwrap();
    let a = antisymmetrize(&e, &labels(&["a", "b", "c"]), &s).unwrap();
    assert!(riemann_young_project(&a, &s).unwrap().is_zero());
}

#[test]
fn quadratic_riemann_identity() {
    let s = session();
    let e = parse("Riemann[-a,-c,-d,-e]*(Riemann[b,d,c,e] - 1/2*Riemann[b,c,d,e])", &s).unwrap();
    assert!(riemann_young_project(&e, &s).unwrap().is_zero());
}

fn rank6(sym: SymmetrySpec) -> Session {
    let mut s = Session::standard(Dim::Sym(Arc::from("d")));
    s.declare_tensor("T6", 6, sym, "T", TensorKind::Plain).unwrap();
    s
}

#[test]
fn tableau_symmetry_shrinks_projection() {
    let tab = Tableau::from_strs(&[&["a", "b", "c"], &["d", "e"], &["f"]]).unwrap();
    let slots = labels(&["a", "b", "c", "d", "e", "f"]);
    let plain = rank6(SymmetrySpec::none(6));
    let e = parse("T6[a,b,c,d,e,f]", &plain).unwrap();
    assert_eq!(young_project(&e, &tab, Manifest::Antisymmetric, &plain).unwrap().len(), 144);

    let spec = tableau_symmetric(&tab, &slots).unwrap();
    let with = rank6(spec);
    let e = parse("T6[a,b,c,d,e,f]", &with).unwrap();
    assert_eq!(young_project(&e, &tab, Manifest::Antisymmetric, &with).unwrap().len(), 57);
    let c = canonicalize(&parse("T6[f,e,c,a,b,d]", &with).unwrap(), &with).unwrap();
    assert_equal(&c, "-T6[a,b,c,d,e,f]", &with);
}

/// Brute force: every signed permutation leaving the projector image
/// invariant belongs to the tableau group, and vice versa.
#[test]
fn tableau_group_is_the_invariance_group() {
    for rows in [
        vec![vec!["a", "c"], vec!["b", "d"]],
        vec![vec!["a", "b"], vec!["c"]],
        vec![vec!["a", "b", "c"], vec!["d"]],
    ] {
        let rows: Vec<&[&str]> = rows.iter().map(|r| r.as_slice()).collect();
        let tab = Tableau::from_strs(&rows).unwrap();
        let n = tab.size();
        let names: Vec<&str> = ["a", "b", "c", "d"][..n].to_vec();
        let mut s = Session::standard(Dim::Sym(Arc::from("d")));
        s.declare_tensor("U", n, SymmetrySpec::none(n), "U", TensorKind::Plain).unwrap();
        let e = parse(&format!("U[{}]", names.join(",")), &s).unwrap();
        let p = young_project(&e, &tab, Manifest::Antisymmetric, &s).unwrap();
        let group = Group::closure(&tableau_symmetric(&tab, &labels(&names)).unwrap(), 10_000).unwrap();
        let mut found = 0;
        for images in txs_core::symm::permutations(n) {
            let map: std::collections::HashMap<Arc<str>, txs_core::Index> = (0..n)
                .map(|k| (Arc::from(names[images[k] as usize]), txs_core::Index::up(names[k])))
                .collect();
            let q = p.rename_frees(&map);
            for sign in [1i8, -1] {
                let diff = if sign > 0 { q.sub(&p) } else { q.add(&p) };
                if canonicalize(&diff, &s).unwrap().is_zero() {
                    found += 1;
                    let perm = SignedPerm::from_images(images.clone(), sign);
                    assert!(group.contains(&perm) || group.contains(&perm.inverse()), "{:?}", perm);
                }
            }
        }
        assert_eq!(found, group.order());
    }
}
