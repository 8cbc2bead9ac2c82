use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use regcorr::algebra::{atom_structure, complex_algebra, dist_duality_roundtrip, duality_roundtrip, Iso};
use regcorr::semantics::{enumerate_dist_frames, enumerate_posets, frame_at, frame_count, frames_up_to, Frame};

/// The bijection carries normal worlds and edges of `a` onto those of `b`.
fn witnesses(iso: &Iso, a: &Frame, b: &Frame) -> bool {
    let p = &iso.perm;
    let n = a.n();
    let mut seen = vec![false; n];
    for &x in p {
        if x >= n || std::mem::replace(&mut seen[x], true) {
            return false;
        }
    }
    (0..n).all(|w| a.is_normal(w) == b.is_normal(p[w]))
        && (0..n).all(|u| (0..n).all(|v| a.related(u, v) == b.related(p[u], p[v])))
}

#[test]
fn every_small_frame_round_trips() {
    let frames = frames_up_to(3);
    assert_eq!(frames.len(), 3 + 25 + 729);
    let failures = frames
        .par_iter()
        .filter(|f| {
            let back = atom_structure(&complex_algebra(f)).unwrap();
            !matches!(duality_roundtrip(f), Ok(iso) if iso.perm.len() == f.n())
                || back.n() != f.n()
        })
        .count();
    assert_eq!(failures, 0);
}

#[test]
fn returned_bijections_are_isomorphisms() {
    for f in frames_up_to(3) {
        let back = atom_structure(&complex_algebra(&f)).unwrap();
        // Search on the unrelabelled algebra so the witness maps f into `back` directly.
        let iso = regcorr::algebra::frame_iso(&f, &back).unwrap().expect("isomorphic");
        assert!(witnesses(&iso, &f, &back), "{}", f);
    }
}

#[test]
fn sampled_four_world_frames_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let total = frame_count(4);
    let sample: Vec<Frame> = (0..200).map(|_| frame_at(4, rng.gen_range(0..total))).collect();
    let failures = sample.par_iter().filter(|f| duality_roundtrip(f).is_err()).count();
    assert_eq!(failures, 0);
}

#[test]
fn distributive_frames_round_trip_up_to_three_points() {
    for n in 1..=3 {
        for p in enumerate_posets(n) {
            let frames: Vec<_> = enumerate_dist_frames(&p).collect();
            let failures = frames.par_iter().filter(|f| dist_duality_roundtrip(f).is_err()).count();
            assert_eq!(failures, 0, "poset {:?}", p);
        }
    }
}
