use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Error, Set};

/// Largest supported number of worlds.
pub const MAX_WORLDS: usize = 16;

/// Kripke frame with impossible worlds: worlds `0..n`, normal worlds `normal`,
/// and `succ[w]` the S-successors of `w` (empty unless `w` is normal).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Frame {
    n: usize,
    normal: Set,
    succ: Vec<Set>,
    pred: Vec<Set>,
}

pub fn full(n: usize) -> Set {
    if n >= 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

pub fn members(s: Set) -> impl Iterator<Item = usize> {
    (0..32).filter(move |&i| s >> i & 1 == 1)
}

impl Frame {
    /// Build a frame from its successor sets. Fails if a non-normal world has successors.
    pub fn new(n: usize, normal: Set, succ: Vec<Set>) -> Result<Frame, Error> {
        if n == 0 || n > MAX_WORLDS {
            return Err(Error::InvalidFrame(format!("world count {} out of range", n)));
        }
        if succ.len() != n || normal & !full(n) != 0 || succ.iter().any(|s| s & !full(n) != 0) {
            return Err(Error::InvalidFrame("set out of range".into()));
        }
        for (w, s) in succ.iter().enumerate() {
            if *s != 0 && normal >> w & 1 == 0 {
                return Err(Error::InvalidFrame(format!("world {} is not normal but has successors", w)));
            }
        }
        let mut pred = vec![0; n];
        for (w, s) in succ.iter().enumerate() {
            for v in members(*s) {
                pred[v] |= 1 << w;
            }
        }
        Ok(Frame { n, normal, succ, pred })
    }

    pub fn from_edges(n: usize, normal: &[usize], edges: &[(usize, usize)]) -> Result<Frame, Error> {
        let mut nm = 0;
        for &w in normal {
            if w >= n {
                return Err(Error::InvalidFrame(format!("world {} out of range", w)));
            }
            nm |= 1 << w;
        }
        let mut succ = vec![0; n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidFrame(format!("edge ({}, {}) out of range", u, v)));
            }
            succ[u] |= 1 << v;
        }
        Frame::new(n, nm, succ)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn worlds(&self) -> Set {
        full(self.n)
    }

    pub fn normal(&self) -> Set {
        self.normal
    }

    pub fn is_normal(&self, w: usize) -> bool {
        self.normal >> w & 1 == 1
    }

    pub fn succ(&self, w: usize) -> Set {
        self.succ[w]
    }

    pub fn pred(&self, w: usize) -> Set {
        self.pred[w]
    }

    pub fn related(&self, u: usize, v: usize) -> bool {
        self.succ[u] >> v & 1 == 1
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.n {
            for v in members(self.succ[u]) {
                out.push((u, v));
            }
        }
        out
    }

    /// S⁻¹[X]: worlds with some successor in X.
    pub fn pre_image(&self, x: Set) -> Set {
        let mut out = 0;
        for w in 0..self.n {
            if self.succ[w] & x != 0 {
                out |= 1 << w;
            }
        }
        out
    }

    /// S[X]: successors of worlds in X.
    pub fn image(&self, x: Set) -> Set {
        members(x).fold(0, |acc, w| acc | self.succ[w])
    }

    /// N^c ∪ S⁻¹[X].
    pub fn dia(&self, x: Set) -> Set {
        (!self.normal & self.worlds()) | self.pre_image(x)
    }

    /// N ∩ {w : S[w] ⊆ X}.
    pub fn boxed(&self, x: Set) -> Set {
        let mut out = 0;
        for w in members(self.normal) {
            if self.succ[w] & !x == 0 {
                out |= 1 << w;
            }
        }
        out
    }

    /// {x : every S-predecessor of x is in Y} (the relational reading of ■ for dia).
    pub fn black_box(&self, y: Set) -> Set {
        let mut out = 0;
        for w in 0..self.n {
            if self.pred[w] & !y == 0 {
                out |= 1 << w;
            }
        }
        out
    }

    /// S[Y] (the relational reading of ♦ for box).
    pub fn black_dia(&self, y: Set) -> Set {
        self.image(y)
    }

    /// Apply a world permutation: world `w` becomes `perm[w]`.
    pub fn permute(&self, perm: &[usize]) -> Frame {
        let map = |s: Set| members(s).fold(0, |acc, w| acc | 1 << perm[w]);
        let mut succ = vec![0; self.n];
        for w in 0..self.n {
            succ[perm[w]] = map(self.succ[w]);
        }
        Frame::new(self.n, map(self.normal), succ).expect("permutation of a valid frame")
    }

    /// Plain-text format: `n`, then the normal worlds, then one `u v` edge per line.
    pub fn to_text(&self) -> String {
        let normal: Vec<String> = members(self.normal).map(|w| w.to_string()).collect();
        let mut out = format!("{}\n{}\n", self.n, normal.join(" "));
        for (u, v) in self.edges() {
            out.push_str(&format!("{} {}\n", u, v));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Frame, Error> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.starts_with('#'));
        let bad = |m: &str| Error::InvalidFrame(m.to_string());
        let n: usize = lines
            .next()
            .ok_or_else(|| bad("missing world count"))?
            .parse()
            .map_err(|_| bad("bad world count"))?;
        let normal_line = lines.next().unwrap_or("");
        let normal: Result<Vec<usize>, _> = normal_line.split_whitespace().map(str::parse).collect();
        let normal = normal.map_err(|_| bad("bad normal-world list"))?;
        let mut edges = Vec::new();
        for l in lines.filter(|l| !l.is_empty()) {
            let parts: Result<Vec<usize>, _> = l.split_whitespace().map(str::parse).collect();
            match parts.map_err(|_| bad("bad edge"))?.as_slice() {
                [u, v] => edges.push((*u, *v)),
                _ => return Err(bad("edge lines need two worlds")),
            }
        }
        Frame::from_edges(n, &normal, &edges)
    }

    pub fn to_json(&self) -> FrameJson {
        FrameJson {
            n: self.n,
            normal: members(self.normal).collect(),
            s: self.edges().into_iter().map(|(u, v)| [u, v]).collect(),
        }
    }

    pub fn from_json(j: &FrameJson) -> Result<Frame, Error> {
        let edges: Vec<(usize, usize)> = j.s.iter().map(|e| (e[0], e[1])).collect();
        Frame::from_edges(j.n, &j.normal, &edges)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameJson {
    pub n: usize,
    #[serde(rename = "N")]
    pub normal: Vec<usize>,
    #[serde(rename = "S")]
    pub s: Vec<[usize; 2]>,
}

impl Serialize for Frame {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Frame {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Frame, D::Error> {
        let j = FrameJson::deserialize(d)?;
        Frame::from_json(&j).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let normal: Vec<String> = members(self.normal).map(|w| w.to_string()).collect();
        let edges: Vec<String> = self.edges().iter().map(|(u, v)| format!("{}{}", u, v)).collect();
        write!(f, "W={} N={{{}}} S={{{}}}", self.n, normal.join(","), edges.join(","))
    }
}

/// Number of labeled frames on `n` worlds: Σ_k C(n,k)·2^(n·k).
pub fn frame_count(n: usize) -> u64 {
    (0u32..(1 << n)).map(|nm| 1u64 << (n as u32 * nm.count_ones())).sum()
}

/// The `index`-th frame on `n` worlds in enumeration order.
pub fn frame_at(n: usize, mut index: u64) -> Frame {
    for nm in 0u32..(1 << n) {
        let k = nm.count_ones();
        let block = 1u64 << (n as u32 * k);
        if index < block {
            return decode(n, nm, index);
        }
        index -= block;
    }
    panic!("frame index out of range")
}

fn decode(n: usize, normal: Set, mut bits: u64) -> Frame {
    let mut succ = vec![0; n];
    for w in members(normal) {
        succ[w] = (bits & ((1 << n) - 1)) as Set;
        bits >>= n;
    }
    Frame::new(n, normal, succ).expect("decoded frame is valid")
}

/// All labeled frames on `n` worlds, each exactly once.
pub fn enumerate_frames(n: usize) -> impl Iterator<Item = Frame> {
    assert!((1..=4).contains(&n), "enumeration supports 1..=4 worlds");
    (0u32..(1 << n)).flat_map(move |nm| {
        let k = nm.count_ones();
        (0u64..(1u64 << (n as u32 * k))).map(move |bits| decode(n, nm, bits))
    })
}

/// All frames with 1..=max_n worlds.
pub fn frames_up_to(max_n: usize) -> Vec<Frame> {
    (1..=max_n).flat_map(enumerate_frames).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn frame_counts() {
        assert_eq!(enumerate_frames(1).count(), 3);
        assert_eq!(enumerate_frames(2).count(), 25);
        assert_eq!(enumerate_frames(3).count(), 729);
        assert_eq!(frame_count(4), 83_521);
        // Independent oracle: Σ_k C(n,k) 2^(n k).
        let binom = |n: u64, k: u64| (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1));
        for n in 1..=4u64 {
            let expected: u64 = (0..=n).map(|k| binom(n, k) << (n * k)).sum();
            assert_eq!(frame_count(n as usize), expected);
        }
    }

    #[test]
    fn enumeration_is_injective_and_indexed() {
        let all: Vec<Frame> = enumerate_frames(3).collect();
        let set: HashSet<&Frame> = all.iter().collect();
        assert_eq!(set.len(), 729);
        for (i, f) in all.iter().enumerate() {
            assert_eq!(&frame_at(3, i as u64), f);
        }
    }

    #[test]
    fn complex_operations() {
        // W={a,b}, N={a}, S={(a,b)}
        let f = Frame::from_edges(2, &[0], &[(0, 1)]).unwrap();
        assert_eq!(f.dia(0b10), 0b11);
        assert_eq!(f.dia(0), 0b10);
        assert_eq!(f.boxed(0b10), 0b01);
        assert_eq!(f.boxed(0b11), 0b01);
        assert_eq!(f.black_dia(0b01), 0b10);
        assert_eq!(f.black_box(0b01), 0b11);
        assert_eq!(f.black_box(0b10), 0b01);
    }

    #[test]
    fn rejects_successors_of_impossible_worlds() {
        assert!(Frame::from_edges(2, &[0], &[(1, 0)]).is_err());
    }

    #[test]
    fn text_and_json_round_trip() {
        for f in enumerate_frames(2) {
            assert_eq!(Frame::from_text(&f.to_text()).unwrap(), f);
            let j = serde_json::to_string(&f).unwrap();
            assert_eq!(serde_json::from_str::<Frame>(&j).unwrap(), f);
        }
        let f = Frame::from_text("2\n0\n0 1\n").unwrap();
        assert_eq!(serde_json::to_value(&f).unwrap(), serde_json::json!({"n":2,"N":[0],"S":[[0,1]]}));
    }
}
