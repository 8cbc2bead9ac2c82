use serde::Serialize;

use super::{complex_algebra, dist_complex_algebra, Error, FiniteAlgebra};
use crate::semantics::{DistFrame, Frame, Poset, Set};

/// Largest world count for which isomorphisms are searched.
pub const MAX_ISO: usize = 6;

/// A bijection on worlds (or on join-irreducibles): `perm[i]` is the image of `i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Iso {
    pub perm: Vec<usize>,
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                go(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

fn guard(n: usize) -> Result<(), Error> {
    if n > MAX_ISO {
        return Err(Error::Budget(format!("isomorphism search on {} points", n)));
    }
    Ok(())
}

pub fn frame_iso(a: &Frame, b: &Frame) -> Result<Option<Iso>, Error> {
    guard(a.n())?;
    if a.n() != b.n() || a.normal().count_ones() != b.normal().count_ones() || a.edges().len() != b.edges().len() {
        return Ok(None);
    }
    Ok(permutations(a.n())
        .into_iter()
        .find(|p| &a.permute(p) == b)
        .map(|perm| Iso { perm }))
}

pub fn dist_frame_iso(a: &DistFrame, b: &DistFrame) -> Result<Option<Iso>, Error> {
    guard(a.n())?;
    if a.n() != b.n() {
        return Ok(None);
    }
    Ok(permutations(a.n())
        .into_iter()
        .find(|p| &a.permute(p) == b)
        .map(|perm| Iso { perm }))
}

/// The additive unary operation used to read off `N` and `S`: `dia` itself,
/// or the De Morgan dual of `box` when only that is present.
fn diamond(a: &FiniteAlgebra) -> Result<Box<dyn Fn(Set) -> Set + '_>, Error> {
    if a.op("dia").is_some() {
        Ok(Box::new(move |x| a.apply("dia", &[x]).expect("element")))
    } else if a.op("box").is_some() {
        let top = a.top();
        Ok(Box::new(move |x| top & !a.apply("box", &[top & !x]).expect("element")))
    } else {
        Err(Error::Unsupported("atom structure needs `dia` or `box`".into()))
    }
}

/// Atom structure `A_+`: worlds are the atoms, `N` the atoms not below `f(⊥)`,
/// and `x S y` iff `x ∈ N` and `x ≤ f(y)`.
pub fn atom_structure(a: &FiniteAlgebra) -> Result<Frame, Error> {
    if !a.is_boolean() {
        return Err(Error::NotBoolean);
    }
    a.validate()?;
    let f = diamond(a)?;
    let atoms = a.join_irreducibles();
    let bot = f(0);
    let mut normal = Vec::new();
    let mut edges = Vec::new();
    for (x, &ax) in atoms.iter().enumerate() {
        if a.leq(ax, bot) {
            continue;
        }
        normal.push(x);
        for (y, &ay) in atoms.iter().enumerate() {
            if a.leq(ax, f(ay)) {
                edges.push((x, y));
            }
        }
    }
    Frame::from_edges(atoms.len(), &normal, &edges).map_err(|e| Error::Invalid(e.to_string()))
}

/// Distributive atom structure: points are the join-irreducibles ordered by
/// reverse inclusion, with `S_g` read through `κ(x) = ⋁{a | x ≰ a}`.
pub fn dist_atom_structure(a: &FiniteAlgebra) -> Result<DistFrame, Error> {
    a.validate()?;
    if a.op("dia").is_none() || a.op("box").is_none() {
        return Err(Error::Unsupported("distributive atom structure needs `dia` and `box`".into()));
    }
    let f = |x: Set| a.apply("dia", &[x]).expect("element");
    let g = |x: Set| a.apply("box", &[x]).expect("element");
    let js = a.join_irreducibles();
    let k = js.len();
    let up: Vec<Set> = js
        .iter()
        .map(|&jx| (0..k).filter(|&y| a.leq(js[y], jx)).fold(0, |acc, y| acc | 1 << y))
        .collect();
    let order = Poset::new(up).map_err(|e| Error::Invalid(e.to_string()))?;
    let kappa: Vec<Set> = js
        .iter()
        .map(|&jx| a.join_all(a.elements().iter().copied().filter(|&e| !a.leq(jx, e))))
        .collect();
    let (fbot, gtop) = (f(0), g(a.top()));
    let mut nf = 0;
    let mut ng = 0;
    let mut sf = vec![0; k];
    let mut sg = vec![0; k];
    for x in 0..k {
        if !a.leq(js[x], fbot) {
            nf |= 1 << x;
            sf[x] = (0..k).filter(|&y| a.leq(js[x], f(js[y]))).fold(0, |acc, y| acc | 1 << y);
        }
        if a.leq(js[x], gtop) {
            ng |= 1 << x;
            sg[x] = (0..k).filter(|&y| a.leq(g(kappa[y]), kappa[x])).fold(0, |acc, y| acc | 1 << y);
        }
    }
    DistFrame::new(order, nf, sf, ng, sg).map_err(|e| Error::Invalid(e.to_string()))
}

/// Isomorphism of algebras induced by a bijection of join-irreducibles.
pub fn algebra_iso(a: &FiniteAlgebra, b: &FiniteAlgebra) -> Result<Option<Iso>, Error> {
    let ja = a.join_irreducibles();
    let jb = b.join_irreducibles();
    guard(ja.len())?;
    if ja.len() != jb.len() || a.elements().len() != b.elements().len() {
        return Ok(None);
    }
    let names: Vec<_> = a.ops().map(|t| t.decl.clone()).collect();
    if names.iter().any(|d| b.op(&d.name).map(|t| &t.decl) != Some(d)) {
        return Ok(None);
    }
    'perm: for perm in permutations(ja.len()) {
        let map = |x: Set| {
            ja.iter()
                .enumerate()
                .filter(|(_, &j)| a.leq(j, x))
                .fold(0, |acc, (i, _)| acc | jb[perm[i]])
        };
        let mut image: Vec<Set> = a.elements().iter().map(|&x| map(x)).collect();
        image.sort_unstable();
        image.dedup();
        if image.len() != a.elements().len() || image.iter().any(|&y| !b.contains(y)) {
            continue;
        }
        for d in &names {
            let e = a.elements().len();
            let mut args = vec![0; d.arity];
            for code in 0..e.pow(d.arity as u32) {
                let mut c = code;
                for x in args.iter_mut() {
                    *x = a.elements()[c % e];
                    c /= e;
                }
                let mapped: Vec<Set> = args.iter().map(|&x| map(x)).collect();
                if map(a.apply(&d.name, &args)?) != b.apply(&d.name, &mapped)? {
                    continue 'perm;
                }
            }
        }
        return Ok(Some(Iso { perm }));
    }
    Ok(None)
}

/// `(F^+)_+ ≅ F`. The complex algebra is relabelled by a rotation first so the
/// witness is found by search rather than read off positionally.
pub fn duality_roundtrip(f: &Frame) -> Result<Iso, Error> {
    guard(f.n())?;
    let n = f.n();
    let rotation: Vec<usize> = (0..n).map(|w| (w + 1) % n).collect();
    let back = atom_structure(&complex_algebra(f).relabel(&rotation))?;
    frame_iso(f, &back)?.ok_or(Error::NotIsomorphic)
}

pub fn dist_duality_roundtrip(f: &DistFrame) -> Result<Iso, Error> {
    guard(f.n())?;
    let back = dist_atom_structure(&dist_complex_algebra(f))?;
    dist_frame_iso(f, &back)?.ok_or(Error::NotIsomorphic)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::{enumerate_dist_frames, enumerate_frames, enumerate_posets};
    use crate::syntax::{ConnectiveDecl, Kind, Order};

    #[test]
    fn permutation_count() {
        assert_eq!(permutations(4).len(), 24);
        assert_eq!(permutations(1), vec![vec![0]]);
    }

    #[test]
    fn atom_structure_example() {
        let f = Frame::from_edges(2, &[0], &[(0, 1)]).unwrap();
        let back = atom_structure(&complex_algebra(&f)).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn constant_top_diamond_has_no_normal_atoms() {
        let mut a = FiniteAlgebra::boolean(2);
        a.add_op(ConnectiveDecl::new("dia", Kind::Additive, vec![Order::One]), |_| 0b11)
            .unwrap();
        let fr = atom_structure(&a).unwrap();
        assert_eq!(fr.normal(), 0);
        assert!(fr.edges().is_empty());
    }

    #[test]
    fn singleton_impossible_world_is_identity() {
        let f = Frame::from_edges(1, &[], &[]).unwrap();
        assert_eq!(duality_roundtrip(&f).unwrap(), Iso { perm: vec![0] });
    }

    #[test]
    fn roundtrips_up_to_three_worlds() {
        for n in 1..=3 {
            for f in enumerate_frames(n) {
                duality_roundtrip(&f).unwrap();
                let a = complex_algebra(&f);
                let back = complex_algebra(&atom_structure(&a).unwrap());
                assert!(algebra_iso(&a, &back).unwrap().is_some());
            }
        }
    }

    #[test]
    fn non_isomorphic_frames_are_told_apart() {
        let a = Frame::from_edges(2, &[0], &[(0, 1)]).unwrap();
        let b = Frame::from_edges(2, &[0], &[(0, 0)]).unwrap();
        assert!(frame_iso(&a, &b).unwrap().is_none());
    }

    #[test]
    fn two_chain_distributive_roundtrip() {
        // a < b, N_f = {a, b}, S_f = ≥ restricted, N_g = {b}, S_g = {(b, b)}
        let chain = Poset::new(vec![0b11, 0b10]).unwrap();
        let f = DistFrame::new(chain.clone(), 0b11, vec![0b01, 0b11], 0b10, vec![0, 0b10]).unwrap();
        let a = dist_complex_algebra(&f);
        assert_eq!(a.elements(), &[0b00, 0b10, 0b11]);
        let back = dist_atom_structure(&a).unwrap();
        assert!(dist_frame_iso(&f, &back).unwrap().is_some());
        assert!(algebra_iso(&a, &dist_complex_algebra(&back)).unwrap().is_some());
    }

    #[test]
    fn distributive_roundtrips_on_two_points() {
        for p in enumerate_posets(2) {
            for f in enumerate_dist_frames(&p) {
                dist_duality_roundtrip(&f).unwrap();
            }
        }
    }
}
