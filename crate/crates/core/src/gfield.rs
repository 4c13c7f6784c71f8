//! Arithmetic in GF(2^m) and dense linear algebra over it.
//!
//! Elements are stored as `u16` polynomial bit patterns, so extension degrees
//! up to 16 are supported. Multiplication goes through log/antilog tables
//! built once per [`GaloisField`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An element of GF(2^m), bit `i` holding the coefficient of `x^i`.
pub type FieldElement = u16;

pub const MAX_DEGREE: u32 = 16;

/// Conventional irreducible polynomials, indexed by degree.
const DEFAULT_POLYS: [u32; 17] = [
    0, 0x3, 0x7, 0xB, 0x13, 0x25, 0x43, 0x89, 0x11B, 0x211, 0x409, 0x805, 0x1053, 0x201B, 0x4443,
    0x8003, 0x1100B,
];

/// Degree and reduction polynomial of a binary extension field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub m: u32,
    pub reduction_polynomial: u32,
}

impl FieldSpec {
    pub fn new(m: u32, reduction_polynomial: u32) -> Result<Self> {
        if m == 0 || m > MAX_DEGREE {
            return Err(Error::Param(format!("extension degree {m} outside 1..={MAX_DEGREE}")));
        }
        if degree(reduction_polynomial) != Some(m) {
            return Err(Error::Param(format!(
                "polynomial {reduction_polynomial:#x} does not have degree {m}"
            )));
        }
        if !is_irreducible(reduction_polynomial) {
            return Err(Error::Param(format!("polynomial {reduction_polynomial:#x} is reducible")));
        }
        Ok(Self { m, reduction_polynomial })
    }

    /// The field with the standard polynomial for degree `m` (0x11B for m = 8).
    pub fn with_degree(m: u32) -> Result<Self> {
        if m == 0 || m > MAX_DEGREE {
            return Err(Error::Param(format!("extension degree {m} outside 1..={MAX_DEGREE}")));
        }
        Self::new(m, DEFAULT_POLYS[m as usize])
    }

    /// Looks up the field of order `q`, which must be a power of two.
    pub fn with_order(q: u32) -> Result<Self> {
        if q < 2 || !q.is_power_of_two() {
            return Err(Error::Param(format!("field size {q} is not a power of two >= 2")));
        }
        Self::with_degree(q.trailing_zeros())
    }

    pub fn order(&self) -> u32 {
        1 << self.m
    }
}

impl Default for FieldSpec {
    fn default() -> Self {
        Self { m: 8, reduction_polynomial: 0x11B }
    }
}

fn degree(p: u32) -> Option<u32> {
    (p != 0).then(|| 31 - p.leading_zeros())
}

/// Remainder of carry-less division `a mod b`.
fn poly_mod(mut a: u64, b: u64) -> u64 {
    let db = 63 - b.leading_zeros();
    while a != 0 && 63 - a.leading_zeros() >= db {
        a ^= b << (63 - a.leading_zeros() - db);
    }
    a
}

/// Trial division by every polynomial of degree at most half of `p`'s.
pub fn is_irreducible(p: u32) -> bool {
    let Some(d) = degree(p) else { return false };
    if d == 0 {
        return false;
    }
    (2u64..(1u64 << (d / 2 + 1))).all(|f| poly_mod(p as u64, f) != 0)
}

/// Schoolbook carry-less multiplication followed by reduction.
pub fn mul_schoolbook(a: u32, b: u32, poly: u32) -> u32 {
    let mut acc = 0u64;
    for i in 0..32 {
        if (b >> i) & 1 == 1 {
            acc ^= (a as u64) << i;
        }
    }
    poly_mod(acc, poly as u64) as u32
}

/// Lookup tables for one GF(2^m).
#[derive(Clone, Debug)]
pub struct GaloisField {
    spec: FieldSpec,
    q: usize,
    log: Vec<u16>,
    // doubled so that exp[log a + log b] needs no reduction
    exp: Vec<u16>,
}

impl GaloisField {
    pub fn new(spec: FieldSpec) -> Self {
        let q = spec.order() as usize;
        let poly = spec.reduction_polynomial;
        let order = q - 1;
        let generator = (1..q as u32)
            .find(|&g| multiplicative_order(g, poly, order) == order)
            .expect("an irreducible polynomial yields a cyclic multiplicative group");
        let mut log = vec![0u16; q];
        let mut exp = vec![0u16; 2 * order.max(1)];
        let mut x = 1u32;
        for i in 0..order {
            exp[i] = x as u16;
            exp[i + order] = x as u16;
            log[x as usize] = i as u16;
            x = mul_schoolbook(x, generator, poly);
        }
        Self { spec, q, log, exp }
    }

    pub fn with_order(q: u32) -> Result<Self> {
        Ok(Self::new(FieldSpec::with_order(q)?))
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn order(&self) -> usize {
        self.q
    }

    pub fn contains(&self, a: u32) -> bool {
        (a as usize) < self.q
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        a ^ b
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a == 0 || b == 0 {
            0
        } else {
            self.exp[self.log[a as usize] as usize + self.log[b as usize] as usize]
        }
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a == 0 {
            return Err(Error::Domain("zero has no multiplicative inverse".into()));
        }
        let order = self.q - 1;
        Ok(self.exp[(order - self.log[a as usize] as usize) % order])
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// `dst += c * src`, element-wise.
    #[inline]
    pub fn axpy(&self, dst: &mut [FieldElement], c: FieldElement, src: &[FieldElement]) {
        debug_assert_eq!(dst.len(), src.len());
        match c {
            0 => {}
            1 => dst.iter_mut().zip(src).for_each(|(d, s)| *d ^= s),
            _ => {
                let lc = self.log[c as usize] as usize;
                for (d, &s) in dst.iter_mut().zip(src) {
                    if s != 0 {
                        *d ^= self.exp[lc + self.log[s as usize] as usize];
                    }
                }
            }
        }
    }

    /// `v *= c`, element-wise.
    #[inline]
    pub fn scale(&self, v: &mut [FieldElement], c: FieldElement) {
        if c == 1 {
            return;
        }
        v.iter_mut().for_each(|x| *x = self.mul(*x, c));
    }

    pub fn dot(&self, a: &[FieldElement], b: &[FieldElement]) -> FieldElement {
        a.iter().zip(b).fold(0, |acc, (&x, &y)| acc ^ self.mul(x, y))
    }
}

fn multiplicative_order(g: u32, poly: u32, group_order: usize) -> usize {
    let mut x = g;
    let mut k = 1;
    while x != 1 {
        x = mul_schoolbook(x, g, poly);
        k += 1;
        if k > group_order {
            break;
        }
    }
    k
}

/// Dense row-major matrix over a binary extension field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    entries: Vec<FieldElement>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, entries: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    pub fn from_rows(rows: usize, cols: usize, entries: Vec<FieldElement>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::Input(format!(
                "{} entries do not fill a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[FieldElement] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [FieldElement] {
        &mut self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for c in 0..self.cols {
                self.entries.swap(a * self.cols + c, b * self.cols + c);
            }
        }
    }

    /// `row[dst] += c * row[src]`
    pub fn add_scaled_row(&mut self, field: &GaloisField, dst: usize, c: FieldElement, src: usize) {
        assert_ne!(dst, src);
        let cols = self.cols;
        let (lo, hi) = self.entries.split_at_mut(dst.max(src) * cols);
        let (d, s) = if dst < src {
            (&mut lo[dst * cols..(dst + 1) * cols], &hi[..cols])
        } else {
            (&mut hi[..cols], &lo[src * cols..(src + 1) * cols])
        };
        field.axpy(d, c, s);
    }

    pub fn mul(&self, field: &GaloisField, rhs: &Matrix) -> Result<Matrix> {
        if self.cols != rhs.rows {
            return Err(Error::Input(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a != 0 {
                    field.axpy(out.row_mut(i), a, rhs.row(k));
                }
            }
        }
        Ok(out)
    }

    /// Row rank by Gaussian elimination, pivoting on the first nonzero entry
    /// of the leftmost remaining column.
    pub fn rank(&self, field: &GaloisField) -> usize {
        let mut m = self.clone();
        let mut rank = 0;
        for col in 0..m.cols {
            if rank == m.rows {
                break;
            }
            let Some(p) = (rank..m.rows).find(|&r| m[(r, col)] != 0) else { continue };
            m.swap_rows(rank, p);
            let inv = field.inv(m[(rank, col)]).expect("pivot is nonzero");
            for r in rank + 1..m.rows {
                let c = m[(r, col)];
                if c != 0 {
                    m.add_scaled_row(field, r, field.mul(c, inv), rank);
                }
            }
            rank += 1;
        }
        rank
    }

    /// Solves `self * X = rhs` for square, nonsingular `self`.
    pub fn solve(&self, field: &GaloisField, rhs: &Matrix) -> Result<Matrix> {
        let n = self.rows;
        if self.cols != n {
            return Err(Error::Input(format!("solve needs a square matrix, got {}x{}", n, self.cols)));
        }
        if rhs.rows != n {
            return Err(Error::Input(format!("rhs has {} rows, expected {n}", rhs.rows)));
        }
        let mut a = self.clone();
        let mut x = rhs.clone();
        for col in 0..n {
            let Some(p) = (col..n).find(|&r| a[(r, col)] != 0) else {
                return Err(Error::RankDeficient { rank: self.rank(field), needed: n });
            };
            a.swap_rows(col, p);
            x.swap_rows(col, p);
            let inv = field.inv(a[(col, col)]).expect("pivot is nonzero");
            field.scale(a.row_mut(col), inv);
            field.scale(x.row_mut(col), inv);
            for r in 0..n {
                let c = a[(r, col)];
                if r != col && c != 0 {
                    a.add_scaled_row(field, r, c, col);
                    x.add_scaled_row(field, r, c, col);
                }
            }
        }
        Ok(x)
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = FieldElement;

    fn index(&self, (r, c): (usize, usize)) -> &FieldElement {
        &self.entries[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut FieldElement {
        &mut self.entries[r * self.cols + c]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn gf256() -> GaloisField {
        GaloisField::new(FieldSpec::default())
    }

    fn random_matrix(f: &GaloisField, rows: usize, cols: usize, rng: &mut impl Rng) -> Matrix {
        let q = f.order() as u32;
        let e = (0..rows * cols).map(|_| rng.gen_range(0..q) as u16).collect();
        Matrix::from_rows(rows, cols, e).unwrap()
    }

    // determinant by cofactor expansion; characteristic 2 has no signs
    fn det_cofactor(f: &GaloisField, m: &[Vec<u16>]) -> u16 {
        let n = m.len();
        if n == 0 {
            return 1;
        }
        let mut acc = 0;
        for c in 0..n {
            if m[0][c] == 0 {
                continue;
            }
            let minor: Vec<Vec<u16>> = m[1..]
                .iter()
                .map(|row| row.iter().enumerate().filter(|&(j, _)| j != c).map(|(_, &v)| v).collect())
                .collect();
            acc ^= f.mul(m[0][c], det_cofactor(f, &minor));
        }
        acc
    }

    // largest k such that some k x k minor is nonzero
    fn rank_by_minors(f: &GaloisField, m: &Matrix) -> usize {
        fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
            if k == 0 {
                return vec![vec![]];
            }
            if n < k {
                return vec![];
            }
            let mut out = subsets(n - 1, k);
            for mut s in subsets(n - 1, k - 1) {
                s.push(n - 1);
                out.push(s);
            }
            out
        }
        for k in (1..=m.rows().min(m.cols())).rev() {
            for rs in subsets(m.rows(), k) {
                for cs in subsets(m.cols(), k) {
                    let sub: Vec<Vec<u16>> =
                        rs.iter().map(|&r| cs.iter().map(|&c| m[(r, c)]).collect()).collect();
                    if det_cofactor(f, &sub) != 0 {
                        return k;
                    }
                }
            }
        }
        0
    }

    #[test]
    fn default_polynomials_are_irreducible() {
        for m in 1..=MAX_DEGREE {
            let spec = FieldSpec::with_degree(m).unwrap();
            assert_eq!(spec.order(), 1 << m);
        }
        assert!(FieldSpec::new(8, 0x11A).is_err());
        assert!(FieldSpec::new(8, 0x1B).is_err());
        assert!(FieldSpec::with_order(12).is_err());
    }

    #[test]
    fn add_examples() {
        let f = gf256();
        assert_eq!(f.add(0x53, 0x53), 0);
        assert_eq!(f.add(0x9f, 0), 0x9f);
        assert_eq!(f.add(0x01, 0x02), 0x03);
    }

    #[test]
    fn mul_matches_schoolbook_everywhere() {
        let f = gf256();
        for a in 0..256u32 {
            for b in 0..256u32 {
                assert_eq!(f.mul(a as u16, b as u16) as u32, mul_schoolbook(a, b, 0x11B));
            }
        }
        assert_eq!(f.mul(0x53, 0xCA), 0x01);
        assert_eq!(f.mul(0x77, 0x01), 0x77);
        assert_eq!(f.mul(0x77, 0x00), 0x00);
    }

    #[test]
    fn inverse_by_exhaustive_search() {
        let f = gf256();
        for a in 1..256u32 {
            let expected = (1..256u32).find(|&b| mul_schoolbook(a, b, 0x11B) == 1).unwrap();
            assert_eq!(f.inv(a as u16).unwrap() as u32, expected);
        }
        assert_eq!(f.inv(0x53).unwrap(), 0xCA);
        assert_eq!(f.inv(0x01).unwrap(), 0x01);
        assert!(matches!(f.inv(0), Err(Error::Domain(_))));
    }

    #[test]
    fn field_axioms_exhaustive_gf16() {
        let f = GaloisField::with_order(16).unwrap();
        for a in 0..16u16 {
            assert_eq!(f.add(a, 0), a);
            assert_eq!(f.mul(a, 1), a);
            if a != 0 {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
            }
            for b in 0..16u16 {
                assert_eq!(f.add(a, b), f.add(b, a));
                assert_eq!(f.mul(a, b), f.mul(b, a));
                for c in 0..16u16 {
                    assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                    assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                    assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                }
            }
        }
    }

    #[test]
    fn large_fields_have_consistent_tables() {
        for q in [2u32, 4, 1 << 12, 1 << 16] {
            let f = GaloisField::with_order(q).unwrap();
            let poly = f.spec().reduction_polynomial;
            let mut rng = ChaCha8Rng::seed_from_u64(q as u64);
            for _ in 0..2000 {
                let a = rng.gen_range(0..q);
                let b = rng.gen_range(0..q);
                assert_eq!(f.mul(a as u16, b as u16) as u32, mul_schoolbook(a, b, poly));
                if a != 0 {
                    assert_eq!(f.mul(a as u16, f.inv(a as u16).unwrap()), 1);
                }
            }
        }
    }

    #[test]
    fn rank_examples() {
        let f = gf256();
        assert_eq!(Matrix::identity(7).rank(&f), 7);
        assert_eq!(Matrix::zeros(4, 6).rank(&f), 0);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = random_matrix(&f, 10, 10, &mut rng);
        assert!(m.rank(&f) >= 9);
    }

    #[test]
    fn rank_matches_minor_oracle() {
        let f = GaloisField::with_order(4).unwrap();
        let big = gf256();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..300 {
            let (rows, cols) = (rng.gen_range(1..=5), rng.gen_range(1..=5));
            let field = if trial % 2 == 0 { &f } else { &big };
            let mut m = random_matrix(field, rows, cols, &mut rng);
            // low-rank cases are rare over GF(256); force dependent rows sometimes
            if rows > 2 && trial % 3 == 0 {
                let c = rng.gen_range(1..field.order() as u32) as u16;
                let src = m.row(0).to_vec();
                m.row_mut(1).iter_mut().zip(&src).for_each(|(d, &s)| *d = field.mul(c, s));
            }
            assert_eq!(m.rank(field), rank_by_minors(field, &m), "{m:?}");
        }
    }

    #[test]
    fn solve_examples() {
        let f = gf256();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let rhs = random_matrix(&f, 4, 3, &mut rng);
        assert_eq!(Matrix::identity(4).solve(&f, &rhs).unwrap(), rhs);

        let diag = [3u16, 0x53, 0x80, 1];
        let mut d = Matrix::zeros(4, 4);
        for (i, &a) in diag.iter().enumerate() {
            d[(i, i)] = a;
        }
        let x = d.solve(&f, &rhs).unwrap();
        for (i, &a) in diag.iter().enumerate() {
            for c in 0..3 {
                assert_eq!(x[(i, c)], f.mul(f.inv(a).unwrap(), rhs[(i, c)]));
            }
        }

        let mut solved = 0;
        while solved < 20 {
            let m = random_matrix(&f, 8, 8, &mut rng);
            if m.rank(&f) < 8 {
                continue;
            }
            let b = random_matrix(&f, 8, 5, &mut rng);
            let x = m.solve(&f, &b).unwrap();
            assert_eq!(m.mul(&f, &x).unwrap(), b);
            solved += 1;
        }
    }

    #[test]
    fn solve_singular_is_an_error() {
        let f = gf256();
        let m = Matrix::from_rows(2, 2, vec![1, 2, 1, 2]).unwrap();
        let b = Matrix::zeros(2, 1);
        assert!(matches!(m.solve(&f, &b), Err(Error::RankDeficient { rank: 1, needed: 2 })));
    }

    proptest! {
        #[test]
        fn field_axioms_gf256(a in 0u16..256, b in 0u16..256, c in 0u16..256) {
            let f = gf256();
            prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
            prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
            prop_assert_eq!(f.mul(a, b), f.mul(b, a));
            if a != 0 {
                prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
            }
        }

        #[test]
        fn rank_is_invariant_under_row_operations(
            seed in any::<u64>(),
            rows in 1usize..7,
            cols in 1usize..7,
            ops in proptest::collection::vec((0usize..7, 0usize..7, 1u16..256, 0u8..3), 0..12),
        ) {
            let f = gf256();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut m = random_matrix(&f, rows, cols, &mut rng);
            if rows > 1 {
                let src = m.row(0).to_vec();
                m.row_mut(rows - 1).copy_from_slice(&src);
            }
            let before = m.rank(&f);
            for (a, b, c, kind) in ops {
                let (a, b) = (a % rows, b % rows);
                match kind {
                    0 => m.swap_rows(a, b),
                    1 => f.scale(m.row_mut(a), c),
                    _ if a != b => m.add_scaled_row(&f, a, c, b),
                    _ => {}
                }
            }
            prop_assert_eq!(m.rank(&f), before);
        }
    }
}
