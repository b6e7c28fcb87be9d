//! Lattice geometry on ℤ² and ℤ³: positions, L1 balls and block tilings.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::TuredoError;

/// Dimension of the lattice. Only the plane and space are supported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dim {
    Two,
    Three,
}

impl Dim {
    pub fn new(d: usize) -> Result<Dim, TuredoError> {
        match d {
            2 => Ok(Dim::Two),
            3 => Ok(Dim::Three),
            other => Err(TuredoError::UnsupportedDimension(other)),
        }
    }

    pub fn get(self) -> usize {
        match self {
            Dim::Two => 2,
            Dim::Three => 3,
        }
    }
}

impl Serialize for Dim {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u64(self.get() as u64)
    }
}

impl<'de> Deserialize<'de> for Dim {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = u64::deserialize(d)?;
        Dim::new(v as usize).map_err(de::Error::custom)
    }
}

/// A lattice position (or offset). Two-dimensional positions keep a zero
/// third coordinate so that ordering is lexicographic in both dimensions.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Position {
    coords: [i64; 3],
    dim: Dim,
}

impl Position {
    pub const fn p2(x: i64, y: i64) -> Position {
        Position { coords: [x, y, 0], dim: Dim::Two }
    }

    pub const fn p3(x: i64, y: i64, z: i64) -> Position {
        Position { coords: [x, y, z], dim: Dim::Three }
    }

    pub fn origin(dim: Dim) -> Position {
        Position { coords: [0; 3], dim }
    }

    pub fn from_slice(v: &[i64]) -> Result<Position, TuredoError> {
        match *v {
            [x, y] => Ok(Position::p2(x, y)),
            [x, y, z] => Ok(Position::p3(x, y, z)),
            _ => Err(TuredoError::UnsupportedDimension(v.len())),
        }
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn x(&self) -> i64 {
        self.coords[0]
    }

    pub fn y(&self) -> i64 {
        self.coords[1]
    }

    pub fn z(&self) -> i64 {
        self.coords[2]
    }

    /// Coordinates, `dim` of them.
    pub fn coords(&self) -> &[i64] {
        &self.coords[..self.dim.get()]
    }

    pub fn l1(&self) -> i64 {
        self.coords.iter().map(|c| c.abs()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.coords == [0; 3]
    }

    /// Componentwise product `b ⊗ z`.
    pub fn scale(&self, b: &Position) -> Position {
        let mut c = self.coords;
        for (ci, bi) in c.iter_mut().zip(b.coords.iter()) {
            *ci *= bi;
        }
        Position { coords: c, dim: self.dim }
    }

    /// Rotation by a quarter turn counter-clockwise in the xy-plane, `k` times.
    pub fn rot90(&self, k: u8) -> Position {
        let [mut x, mut y, z] = self.coords;
        for _ in 0..(k % 4) {
            let nx = -y;
            y = x;
            x = nx;
        }
        Position { coords: [x, y, z], dim: self.dim }
    }

    /// Same coordinates in the `x,y[,z]` key syntax used by rule files.
    pub fn key(&self) -> String {
        let parts: Vec<String> = self.coords().iter().map(|c| c.to_string()).collect();
        parts.join(",")
    }

    pub fn parse_key(s: &str) -> Result<Position, TuredoError> {
        let v: Result<Vec<i64>, _> = s.split(',').map(|p| p.trim().parse::<i64>()).collect();
        let v = v.map_err(|_| TuredoError::Schema(format!("bad offset key {s:?}")))?;
        Position::from_slice(&v)
    }
}

impl fmt::Debug for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.key())
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.key())
    }
}

impl Add for Position {
    type Output = Position;
    fn add(self, o: Position) -> Position {
        let mut c = self.coords;
        for i in 0..3 {
            c[i] += o.coords[i];
        }
        Position { coords: c, dim: self.dim }
    }
}

impl Sub for Position {
    type Output = Position;
    fn sub(self, o: Position) -> Position {
        self + (-o)
    }
}

impl Neg for Position {
    type Output = Position;
    fn neg(self) -> Position {
        let [x, y, z] = self.coords;
        Position { coords: [-x, -y, -z], dim: self.dim }
    }
}

impl Serialize for Position {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let c = self.coords();
        let mut seq = s.serialize_seq(Some(c.len()))?;
        for v in c {
            seq.serialize_element(v)?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for Position {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = Position;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an array of 2 or 3 integers")
            }
            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Position, A::Error> {
                let mut v = Vec::with_capacity(3);
                while let Some(x) = seq.next_element::<i64>()? {
                    v.push(x);
                }
                Position::from_slice(&v).map_err(de::Error::custom)
            }
        }
        d.deserialize_seq(V)
    }
}

/// The L1 ball `B_d(r)` as a canonically ordered offset list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ball {
    pub dim: Dim,
    pub radius: u32,
    offsets: Vec<Position>,
}

impl Ball {
    pub fn offsets(&self) -> &[Position] {
        &self.offsets
    }

    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }

    pub fn index_of(&self, p: &Position) -> Option<usize> {
        self.offsets.binary_search(p).ok()
    }

    pub fn contains(&self, p: &Position) -> bool {
        p.dim() == self.dim && p.l1() <= self.radius as i64
    }
}

/// All offsets with L1 norm at most `r`, in lexicographic order.
pub fn ball(dim: Dim, r: u32) -> Ball {
    let r = r as i64;
    let mut offsets = Vec::new();
    match dim {
        Dim::Two => {
            for x in -r..=r {
                for y in -r..=r {
                    if x.abs() + y.abs() <= r {
                        offsets.push(Position::p2(x, y));
                    }
                }
            }
        }
        Dim::Three => {
            for x in -r..=r {
                for y in -r..=r {
                    for z in -r..=r {
                        if x.abs() + y.abs() + z.abs() <= r {
                            offsets.push(Position::p3(x, y, z));
                        }
                    }
                }
            }
        }
    }
    Ball { dim, radius: r as u32, offsets }
}

/// Same as [`ball`] but taking a raw dimension number.
pub fn ball_checked(d: usize, r: u32) -> Result<Ball, TuredoError> {
    Ok(ball(Dim::new(d)?, r))
}

/// Splits `z` into the block reference point `ρ_b(z) ∈ b⊗ℤ^d` and the
/// in-block offset `μ_b(z) ∈ R_b`.
pub fn block_decompose(z: &Position, b: &Position) -> (Position, Position) {
    let mut rho = [0i64; 3];
    let mut mu = [0i64; 3];
    for i in 0..z.dim().get() {
        let bi = b.coords[i];
        let q = z.coords[i].div_euclid(bi);
        rho[i] = q * bi;
        mu[i] = z.coords[i].rem_euclid(bi);
    }
    (Position { coords: rho, dim: z.dim }, Position { coords: mu, dim: z.dim })
}

/// Index of the block containing `z`, i.e. the `w` with `b⊗w = ρ_b(z)`.
pub fn block_index(z: &Position, b: &Position) -> Position {
    let mut w = [0i64; 3];
    for i in 0..z.dim().get() {
        w[i] = z.coords[i].div_euclid(b.coords[i]);
    }
    Position { coords: w, dim: z.dim }
}

/// Offsets of the rectangular block `R_b` in row-major order
/// (x fastest, then y, then z).
pub fn block_offsets(b: &Position) -> Vec<Position> {
    let mut out = Vec::new();
    match b.dim() {
        Dim::Two => {
            for y in 0..b.y() {
                for x in 0..b.x() {
                    out.push(Position::p2(x, y));
                }
            }
        }
        Dim::Three => {
            for z in 0..b.z() {
                for y in 0..b.y() {
                    for x in 0..b.x() {
                        out.push(Position::p3(x, y, z));
                    }
                }
            }
        }
    }
    out
}

/// Unit moves of `B_d(1)` without the zero move, in canonical order.
pub fn unit_moves(dim: Dim) -> Vec<Position> {
    ball(dim, 1).offsets().iter().copied().filter(|p| !p.is_zero()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_sizes() {
        assert_eq!(ball(Dim::Two, 1).len(), 5);
        assert_eq!(ball(Dim::Two, 2).len(), 13);
        assert_eq!(ball(Dim::Three, 1).len(), 7);
        assert_eq!(ball(Dim::Two, 0).offsets(), &[Position::p2(0, 0)]);
    }

    #[test]
    fn ball_2_1_members() {
        let b = ball(Dim::Two, 1);
        let mut want = vec![
            Position::p2(0, 0),
            Position::p2(1, 0),
            Position::p2(-1, 0),
            Position::p2(0, 1),
            Position::p2(0, -1),
        ];
        want.sort();
        assert_eq!(b.offsets(), want.as_slice());
    }

    #[test]
    fn ball_symmetric() {
        for d in [Dim::Two, Dim::Three] {
            for r in 0..4 {
                let b = ball(d, r);
                assert!(b.contains(&Position::origin(d)));
                for p in b.offsets() {
                    assert!(b.index_of(&-*p).is_some());
                    let c = p.coords();
                    let mut sw = c.to_vec();
                    sw.swap(0, 1);
                    assert!(b.index_of(&Position::from_slice(&sw).unwrap()).is_some());
                }
            }
        }
    }

    #[test]
    fn unsupported_dimension() {
        assert!(ball_checked(4, 1).is_err());
        assert!(ball_checked(1, 1).is_err());
    }

    #[test]
    fn decompose_examples() {
        let (rho, mu) = block_decompose(&Position::p2(7, -3), &Position::p2(3, 2));
        assert_eq!((rho, mu), (Position::p2(6, -4), Position::p2(1, 1)));
        let (rho, mu) = block_decompose(&Position::p2(-5, 9), &Position::p2(1, 1));
        assert_eq!((rho, mu), (Position::p2(-5, 9), Position::p2(0, 0)));
        let (rho, mu) = block_decompose(&Position::p2(-1, 0), &Position::p2(4, 4));
        assert_eq!((rho, mu), (Position::p2(-4, 0), Position::p2(3, 0)));
    }

    #[test]
    fn rotation_cycles() {
        let e = Position::p2(1, 0);
        assert_eq!(e.rot90(1), Position::p2(0, 1));
        assert_eq!(e.rot90(2), Position::p2(-1, 0));
        assert_eq!(e.rot90(3), Position::p2(0, -1));
        assert_eq!(e.rot90(4), e);
    }

    #[test]
    fn key_roundtrip() {
        let p = Position::p3(-1, 2, 0);
        assert_eq!(Position::parse_key(&p.key()).unwrap(), p);
        assert!(Position::parse_key("1;2").is_err());
    }
}
