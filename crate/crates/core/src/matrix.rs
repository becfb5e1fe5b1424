//! Builders for the Legendre-symbol matrices, each tagged with the
//! parameters that produced it.

use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nt::{mod_mul, reduce, PrimeCtx};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatrixKind {
    /// [((i² + d j²)/p)], 1 ≤ i, j ≤ n.
    S { d: i64 },
    /// S(1, p) with its first row replaced by ((j/p)).
    SStar,
    /// [((i − j)/p)], 1 ≤ i, j ≤ p − 1.
    Carlitz,
    /// Constants of [x + ((i + j − 1)/p)], size n (or n + 1 when `star`).
    Chapman { star: bool },
    /// [((j − i)/p)], 1 ≤ i, j ≤ n + 1.
    Evil,
    /// Read back from the text grid format.
    Parsed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixTag {
    pub kind: MatrixKind,
    pub p: Option<u64>,
}

impl fmt::Display for MatrixTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.p.map(|p| p.to_string()).unwrap_or_else(|| "?".into());
        match self.kind {
            MatrixKind::S { d } => write!(f, "S(d={d}, p={p})"),
            MatrixKind::SStar => write!(f, "S*(1, p={p})"),
            MatrixKind::Carlitz => write!(f, "D_p(p={p})"),
            MatrixKind::Chapman { star: false } => write!(f, "C_p(x)(p={p})"),
            MatrixKind::Chapman { star: true } => write!(f, "C*_p(x)(p={p})"),
            MatrixKind::Evil => write!(f, "evil(p={p})"),
            MatrixKind::Parsed => write!(f, "parsed"),
        }
    }
}

/// Dense square matrix with entries in {−1, 0, 1}, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignMatrix {
    dim: usize,
    entries: Vec<i8>,
    tag: MatrixTag,
}

impl SignMatrix {
    fn from_fn(dim: usize, tag: MatrixTag, f: impl Fn(usize, usize) -> i8) -> Self {
        let mut entries = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                entries.push(f(r, c));
            }
        }
        SignMatrix { dim, entries, tag }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn tag(&self) -> MatrixTag {
        self.tag
    }

    /// Zero-based access.
    pub fn get(&self, r: usize, c: usize) -> i8 {
        self.entries[r * self.dim + c]
    }

    pub fn row(&self, r: usize) -> &[i8] {
        &self.entries[r * self.dim..(r + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[i8]> {
        self.entries.chunks(self.dim.max(1)).take(self.dim)
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.dim).all(|r| (0..r).all(|c| self.get(r, c) == self.get(c, r)))
    }

    pub fn trace(&self) -> i64 {
        (0..self.dim).map(|i| self.get(i, i) as i64).sum()
    }

    pub fn to_int_matrix(&self) -> IntMatrix {
        IntMatrix::from_fn(self.dim, |r, c| BigInt::from(self.get(r, c)))
    }

    /// Rows of space-separated −1/0/1, one row per line.
    pub fn to_grid(&self) -> String {
        grid_string(self.dim, |r, c| self.get(r, c))
    }

    pub fn parse_grid(text: &str) -> Result<Self> {
        let rows = parse_rows(text)?;
        let dim = rows.len();
        Ok(SignMatrix {
            dim,
            entries: rows.into_iter().flatten().collect(),
            tag: MatrixTag {
                kind: MatrixKind::Parsed,
                p: None,
            },
        })
    }
}

/// Square matrix whose (i, j) entry is `x + constants(i, j)` for a formal `x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineMatrix {
    dim: usize,
    constants: Vec<i8>,
    tag: MatrixTag,
}

impl AffineMatrix {
    /// Untagged affine matrix from row-major constants.
    pub fn from_constants(dim: usize, constants: Vec<i8>) -> Self {
        assert_eq!(constants.len(), dim * dim, "constants must be dim × dim");
        AffineMatrix {
            dim,
            constants,
            tag: MatrixTag {
                kind: MatrixKind::Parsed,
                p: None,
            },
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn tag(&self) -> MatrixTag {
        self.tag
    }

    pub fn constant(&self, r: usize, c: usize) -> i8 {
        self.constants[r * self.dim + c]
    }

    /// The integer matrix obtained by substituting `x`.
    pub fn at(&self, x: i64) -> IntMatrix {
        IntMatrix::from_fn(self.dim, |r, c| {
            BigInt::from(x + self.constant(r, c) as i64)
        })
    }

    pub fn to_grid(&self) -> String {
        grid_string(self.dim, |r, c| self.constant(r, c))
    }
}

fn grid_string(dim: usize, f: impl Fn(usize, usize) -> i8) -> String {
    let mut out = String::new();
    for r in 0..dim {
        let row: Vec<String> = (0..dim).map(|c| f(r, c).to_string()).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

fn parse_rows(text: &str) -> Result<Vec<Vec<i8>>> {
    let rows: Vec<Vec<i8>> = text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|line| {
            line.split_whitespace()
                .map(|tok| match tok {
                    "-1" => Ok(-1),
                    "0" => Ok(0),
                    "1" => Ok(1),
                    other => Err(Error::Parse(format!("entry {other:?} not in {{-1,0,1}}"))),
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    if let Some(bad) = rows.iter().find(|r| r.len() != rows.len()) {
        return Err(Error::NotSquare {
            rows: rows.len(),
            cols: bad.len(),
        });
    }
    Ok(rows)
}

/// Dense square matrix of big integers, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    dim: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> BigInt) -> Self {
        let mut entries = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                entries.push(f(r, c));
            }
        }
        IntMatrix { dim, entries }
    }

    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Result<Self> {
        let dim = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::NotSquare {
                rows: dim,
                cols: bad.len(),
            });
        }
        Ok(IntMatrix {
            dim,
            entries: rows.iter().flatten().cloned().map(Into::into).collect(),
        })
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |r, c| BigInt::from((r == c) as i32))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, r: usize, c: usize) -> &BigInt {
        &self.entries[r * self.dim + c]
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.entries
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |r, c| self.get(c, r).clone())
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.dim {
            self.entries.swap(a * self.dim + c, b * self.dim + c);
        }
    }

    /// `k·I − self`.
    pub fn shifted_negation(&self, k: i64) -> Self {
        Self::from_fn(self.dim, |r, c| {
            let v = -self.get(r, c);
            if r == c {
                v + k
            } else {
                v
            }
        })
    }
}

impl From<&SignMatrix> for IntMatrix {
    fn from(m: &SignMatrix) -> Self {
        m.to_int_matrix()
    }
}

/// Legendre symbols of every residue mod p, indexed by residue.
fn symbol_table(ctx: &PrimeCtx) -> Vec<i8> {
    let p = ctx.p();
    let mut table = vec![-1i8; p as usize];
    table[0] = 0;
    for x in 1..=ctx.n() {
        table[mod_mul(x, x, p) as usize] = 1;
    }
    table
}

fn tag(ctx: &PrimeCtx, kind: MatrixKind) -> MatrixTag {
    MatrixTag {
        kind,
        p: Some(ctx.p()),
    }
}

pub fn build_s(ctx: &PrimeCtx, d: i64) -> SignMatrix {
    let p = ctx.p();
    let chi = symbol_table(ctx);
    let dr = reduce(d, p);
    let squares: Vec<u64> = (1..=ctx.n()).map(|j| mod_mul(j, j, p)).collect();
    let scaled: Vec<u64> = squares.iter().map(|&s| mod_mul(dr, s, p)).collect();
    SignMatrix::from_fn(ctx.n() as usize, tag(ctx, MatrixKind::S { d }), |r, c| {
        chi[((squares[r] + scaled[c]) % p) as usize]
    })
}

pub fn build_sstar(ctx: &PrimeCtx) -> SignMatrix {
    let chi = symbol_table(ctx);
    let s = build_s(ctx, 1);
    SignMatrix::from_fn(s.dim, tag(ctx, MatrixKind::SStar), |r, c| {
        if r == 0 {
            chi[c + 1]
        } else {
            s.get(r, c)
        }
    })
}

pub fn build_carlitz(ctx: &PrimeCtx) -> SignMatrix {
    let chi = symbol_table(ctx);
    let p = ctx.p() as i64;
    SignMatrix::from_fn((p - 1) as usize, tag(ctx, MatrixKind::Carlitz), |r, c| {
        chi[reduce(r as i64 - c as i64, p as u64) as usize]
    })
}

pub fn build_chapman(ctx: &PrimeCtx, star: bool) -> AffineMatrix {
    let chi = symbol_table(ctx);
    let p = ctx.p() as usize;
    let dim = ctx.n() as usize + star as usize;
    let mut constants = Vec::with_capacity(dim * dim);
    for r in 0..dim {
        for c in 0..dim {
            // (i + j − 1) with 1-based i, j is r + c + 1 zero-based.
            constants.push(chi[(r + c + 1) % p]);
        }
    }
    AffineMatrix {
        dim,
        constants,
        tag: tag(ctx, MatrixKind::Chapman { star }),
    }
}

pub fn build_evil(ctx: &PrimeCtx) -> SignMatrix {
    let chi = symbol_table(ctx);
    let p = ctx.p();
    SignMatrix::from_fn(ctx.n() as usize + 1, tag(ctx, MatrixKind::Evil), |r, c| {
        chi[reduce(c as i64 - r as i64, p) as usize]
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(p: u64) -> PrimeCtx {
        PrimeCtx::new(p).unwrap()
    }

    fn grid(m: &SignMatrix) -> Vec<Vec<i8>> {
        m.rows().map(|r| r.to_vec()).collect()
    }

    #[test]
    fn s_matrix_small() {
        let m = build_s(&ctx(5), 1);
        assert_eq!(grid(&m), vec![vec![-1, 0], vec![0, -1]]);
        assert_eq!(m.tag().kind, MatrixKind::S { d: 1 });
    }

    #[test]
    fn s_matrix_entries_match_definition() {
        for p in [7u64, 13, 17, 19] {
            let c = ctx(p);
            for d in [-3i64, 1, 2, 5, 11] {
                let m = build_s(&c, d);
                for i in 1..=c.n() as i64 {
                    for j in 1..=c.n() as i64 {
                        assert_eq!(
                            m.get(i as usize - 1, j as usize - 1),
                            c.legendre(i * i + d * j * j)
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn s_zero_pattern() {
        for p in [13u64, 17, 19, 23, 29] {
            let c = ctx(p);
            for d in 1..p as i64 {
                let m = build_s(&c, d);
                let zeros = m.rows().flatten().filter(|&&v| v == 0).count();
                if c.legendre(-d) == -1 {
                    assert_eq!(zeros, 0, "p={p} d={d}");
                }
                for i in 1..=c.n() as i64 {
                    for j in 1..=c.n() as i64 {
                        let vanishes = (i * i + d * j * j).rem_euclid(p as i64) == 0;
                        assert_eq!(m.get(i as usize - 1, j as usize - 1) == 0, vanishes);
                    }
                }
            }
        }
    }

    #[test]
    fn s_with_d_one_is_symmetric() {
        for p in [5u64, 7, 13, 101] {
            assert!(build_s(&ctx(p), 1).is_symmetric());
        }
        assert!(!build_s(&ctx(13), 2).is_symmetric());
    }

    #[test]
    fn sstar_small() {
        let m = build_sstar(&ctx(5));
        assert_eq!(grid(&m), vec![vec![1, -1], vec![0, -1]]);
    }

    #[test]
    fn carlitz() {
        assert_eq!(grid(&build_carlitz(&ctx(3))), vec![vec![0, -1], vec![1, 0]]);
        assert_eq!(build_carlitz(&ctx(5)).get(0, 2), -1);
        for p in [3u64, 5, 7, 11, 13] {
            let m = build_carlitz(&ctx(p));
            assert_eq!(m.dim(), p as usize - 1);
            assert_eq!(m.trace(), 0);
        }
    }

    #[test]
    fn chapman_constants() {
        let m = build_chapman(&ctx(7), false);
        let rows: Vec<Vec<i8>> = (0..3)
            .map(|r| (0..3).map(|c| m.constant(r, c)).collect())
            .collect();
        assert_eq!(rows, vec![vec![1, 1, -1], vec![1, -1, 1], vec![-1, 1, -1]]);
        let m = build_chapman(&ctx(5), false);
        assert_eq!(m.to_grid(), "1 -1\n-1 -1\n");
        let m = build_chapman(&ctx(5), true);
        assert_eq!(m.dim(), 3);
        assert_eq!(m.constant(2, 2), 0);
        assert_eq!(m.at(2).get(0, 1), &BigInt::from(1));
    }

    #[test]
    fn evil() {
        // (j − i)/3 at (1, 2) is (1/3) = 1.
        assert_eq!(grid(&build_evil(&ctx(3))), vec![vec![0, 1], vec![-1, 0]]);
        let m = build_evil(&ctx(7));
        assert_eq!(m.get(0, 3), -1);
        assert_eq!(m.trace(), 0);
        assert!((0..m.dim()).all(|i| m.get(i, i) == 0));
    }

    #[test]
    fn grid_roundtrip_and_errors() {
        let m = build_s(&ctx(13), 1);
        let back = SignMatrix::parse_grid(&m.to_grid()).unwrap();
        assert_eq!(grid(&back), grid(&m));
        assert!(matches!(
            SignMatrix::parse_grid("1 0\n1"),
            Err(Error::NotSquare { .. })
        ));
        assert!(matches!(SignMatrix::parse_grid("2"), Err(Error::Parse(_))));
    }
}
