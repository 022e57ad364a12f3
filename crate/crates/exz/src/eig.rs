//! Upper-Hessenberg matrices and their eigenvalues at extended precision.
//!
//! The solver first snaps entries below `eig_tol * max|entry|` to exact
//! zero (a backward perturbation of the same size), splits at zero
//! subdiagonals, and reads eigenvalues directly off the diagonal of blocks
//! whose strict upper triangle vanishes (such blocks are lower triangular;
//! shifted QR cannot resolve their defective clusters to better than a root
//! of the backward error, but the structure determines them exactly).
//! Remaining blocks run explicit Givens-based QR with Wilkinson shifts.

use crate::error::{Error, Result};
use crate::num::{Cx, PrecisionContext};
use rug::Float;

/// Column-major dense storage of an upper-Hessenberg array with `rows` =
/// `cols` or `cols + 1`. Recurrence coefficients of an orthonormal sequence
/// are kept in the rectangular form; eigenvalue extraction works on square
/// leading sections.
#[derive(Debug, Clone)]
pub struct HessenbergMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Cx>,
}

impl HessenbergMatrix {
    pub fn zero(rows: usize, cols: usize, bits: u32) -> Self {
        HessenbergMatrix {
            rows,
            cols,
            data: vec![Cx::zero(bits); rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    fn idx(&self, row: usize, col: usize) -> usize {
        debug_assert!(row < self.rows && col < self.cols);
        col * self.rows + row
    }

    pub fn get(&self, row: usize, col: usize) -> &Cx {
        &self.data[self.idx(row, col)]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Cx) {
        let i = self.idx(row, col);
        self.data[i] = value;
    }

    /// Square n-by-n upper-left section.
    pub fn leading_section(&self, n: usize) -> HessenbergMatrix {
        assert!(n <= self.rows && n <= self.cols, "section exceeds matrix");
        let mut out = HessenbergMatrix {
            rows: n,
            cols: n,
            data: Vec::with_capacity(n * n),
        };
        for col in 0..n {
            for row in 0..n {
                out.data.push(self.get(row, col).clone());
            }
        }
        out
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self, bits: u32) -> Float {
        let mut best = Float::new(bits);
        for v in &self.data {
            let a = v.abs();
            if a > best {
                best = a;
            }
        }
        best
    }
}

/// Eigenvalues of a square upper-Hessenberg matrix, sorted by real part,
/// then imaginary part.
pub fn hessenberg_eigenvalues(h: &HessenbergMatrix, ctx: &PrecisionContext) -> Result<Vec<Cx>> {
    if h.rows != h.cols {
        return Err(Error::InvalidConfig(format!(
            "eigenvalues need a square matrix, got {}x{}",
            h.rows, h.cols
        )));
    }
    let n = h.rows;
    if n == 0 {
        return Ok(Vec::new());
    }
    let bits = ctx.precision_bits;
    let mut a = Matrix::from_hessenberg(h, bits);
    let hmax = a.max_abs(bits);
    if hmax.is_zero() {
        return Ok(vec![Cx::zero(bits); n]);
    }
    let mut snap = hmax.clone();
    snap *= &ctx.eig_tol;
    a.snap_small(&snap);

    let mut eigs: Vec<Cx> = Vec::with_capacity(n);
    let mut budget = 50 * n;
    let mut iterations = 0usize;
    // split at structurally zero subdiagonals
    let mut lo = 0usize;
    while lo < n {
        let mut hi = lo;
        while hi + 1 < n && !a.get(hi + 1, hi).is_zero() {
            hi += 1;
        }
        if a.block_is_lower_triangular(lo, hi) {
            for j in lo..=hi {
                eigs.push(a.get(j, j).clone());
            }
        } else {
            a.qr_block(lo, hi, &snap, &mut budget, &mut iterations, &mut eigs, ctx)?;
        }
        lo = hi + 1;
    }
    debug_assert_eq!(eigs.len(), n);
    eigs.sort_by(|p, q| {
        p.re.partial_cmp(&q.re)
            .expect("eigenvalues are finite")
            .then_with(|| p.im.partial_cmp(&q.im).expect("eigenvalues are finite"))
    });
    Ok(eigs)
}

/// Determinant of a square upper-Hessenberg matrix by one-step-pivoted
/// elimination of the subdiagonal.
pub fn hessenberg_det(h: &HessenbergMatrix, bits: u32) -> Result<Cx> {
    if h.rows != h.cols {
        return Err(Error::InvalidConfig(format!(
            "determinant needs a square matrix, got {}x{}",
            h.rows, h.cols
        )));
    }
    let n = h.rows;
    let mut det = Cx::from_f64(1.0, 0.0, bits);
    if n == 0 {
        return Ok(det);
    }
    let mut a = Matrix::from_hessenberg(h, bits);
    let mut negate = false;
    for k in 0..n {
        if k + 1 < n {
            let below = a.get(k + 1, k).abs();
            let here = a.get(k, k).abs();
            if below > here {
                a.swap_rows(k, k + 1, k, n - 1);
                negate = !negate;
            }
            let pivot = a.get(k, k).clone();
            if !pivot.is_zero() && !a.get(k + 1, k).is_zero() {
                let factor = a.get(k + 1, k).div(&pivot);
                for col in k..n {
                    let sub = factor.mul(a.get(k, col));
                    let mut v = a.get(k + 1, col).clone();
                    v = v.sub(&sub);
                    a.set(k + 1, col, v);
                }
            }
        }
        det = det.mul(a.get(k, k));
    }
    if negate {
        det = det.neg();
    }
    Ok(det)
}

/// Dense square working copy (column-major) plus in-place QR machinery.
struct Matrix {
    n: usize,
    data: Vec<Cx>,
}

impl Matrix {
    fn from_hessenberg(h: &HessenbergMatrix, bits: u32) -> Self {
        let n = h.rows;
        let mut data = Vec::with_capacity(n * n);
        for col in 0..n {
            for row in 0..n {
                let v = h.get(row, col);
                data.push(Cx::from_floats(
                    Float::with_val(bits, &v.re),
                    Float::with_val(bits, &v.im),
                ));
            }
        }
        Matrix { n, data }
    }

    #[inline]
    fn at(&self, row: usize, col: usize) -> usize {
        col * self.n + row
    }

    fn get(&self, row: usize, col: usize) -> &Cx {
        &self.data[self.at(row, col)]
    }

    fn set(&mut self, row: usize, col: usize, v: Cx) {
        let i = self.at(row, col);
        self.data[i] = v;
    }

    fn swap_rows(&mut self, r0: usize, r1: usize, col_lo: usize, col_hi: usize) {
        for col in col_lo..=col_hi {
            let i = self.at(r0, col);
            let j = self.at(r1, col);
            self.data.swap(i, j);
        }
    }

    fn max_abs(&self, bits: u32) -> Float {
        let mut best = Float::new(bits);
        for v in &self.data {
            let a = v.abs();
            if a > best {
                best = a;
            }
        }
        best
    }

    fn snap_small(&mut self, threshold: &Float) {
        for v in &mut self.data {
            let a = v.abs();
            if a <= *threshold && !v.is_zero() {
                let bits = v.re.prec();
                *v = Cx::zero(bits);
            }
        }
    }

    /// True if the block lo..=hi has an identically zero strict upper
    /// triangle. A Hessenberg block of that form is lower triangular, so
    /// its eigenvalues are the diagonal entries, exactly — even when they
    /// form a defective cluster that iterative QR would blur.
    fn block_is_lower_triangular(&self, lo: usize, hi: usize) -> bool {
        for col in lo + 1..=hi {
            for row in lo..col {
                if !self.get(row, col).is_zero() {
                    return false;
                }
            }
        }
        true
    }

    /// Shifted QR on the block lo..=hi, appending its eigenvalues.
    #[allow(clippy::too_many_arguments)]
    fn qr_block(
        &mut self,
        lo: usize,
        hi_in: usize,
        snap: &Float,
        budget: &mut usize,
        iterations: &mut usize,
        eigs: &mut Vec<Cx>,
        ctx: &PrecisionContext,
    ) -> Result<()> {
        let bits = ctx.precision_bits;
        let mut hi = hi_in;
        let mut stagnation = 0usize;
        loop {
            // deflate converged subdiagonals: relative test plus the
            // absolute floor used for the initial snap
            for k in lo..hi {
                if self.get(k + 1, k).is_zero() {
                    continue;
                }
                let mut scale = self.get(k, k).abs();
                scale += self.get(k + 1, k + 1).abs();
                scale *= &ctx.eig_tol;
                let sub = self.get(k + 1, k).abs();
                if sub <= scale || sub <= *snap {
                    self.set(k + 1, k, Cx::zero(bits));
                }
            }
            // peel converged trailing eigenvalues
            loop {
                if hi == lo {
                    eigs.push(self.get(hi, hi).clone());
                    return Ok(());
                }
                if self.get(hi, hi - 1).is_zero() {
                    eigs.push(self.get(hi, hi).clone());
                    hi -= 1;
                    stagnation = 0;
                    continue;
                }
                if hi - 1 == lo || self.get(hi - 1, hi - 2).is_zero() {
                    let (l1, l2) = two_by_two_eigs(
                        self.get(hi - 1, hi - 1),
                        self.get(hi - 1, hi),
                        self.get(hi, hi - 1),
                        self.get(hi, hi),
                        bits,
                    );
                    eigs.push(l1);
                    eigs.push(l2);
                    if hi - 1 == lo {
                        return Ok(());
                    }
                    hi -= 2;
                    stagnation = 0;
                    continue;
                }
                break;
            }
            // innermost unreduced window [m, hi]
            let mut m = hi - 1;
            while m > lo && !self.get(m, m - 1).is_zero() {
                m -= 1;
            }
            if *budget == 0 {
                return Err(Error::QrStagnation {
                    iterations: *iterations,
                    size: self.n,
                });
            }
            *budget -= 1;
            *iterations += 1;
            stagnation += 1;
            let shift = if stagnation % 12 == 0 {
                // exceptional shift to break symmetric stalls
                let mut re = self.get(hi, hi - 1).abs();
                re *= Float::with_val(bits, 1.5f64);
                re += &self.get(hi, hi).re;
                Cx::from_floats(re, Float::with_val(bits, &self.get(hi, hi).im))
            } else {
                wilkinson_shift(
                    self.get(hi - 1, hi - 1),
                    self.get(hi - 1, hi),
                    self.get(hi, hi - 1),
                    self.get(hi, hi),
                    bits,
                )
            };
            self.qr_step(m, hi, &shift, bits);
        }
    }

    /// One explicit shifted QR sweep on the window [m, hi]:
    /// factor A - shift = QR by Givens rotations, then form RQ + shift.
    fn qr_step(&mut self, m: usize, hi: usize, shift: &Cx, bits: u32) {
        for k in m..=hi {
            let i = self.at(k, k);
            let v = self.data[i].sub(shift);
            self.data[i] = v;
        }
        let mut rots: Vec<(Cx, Cx)> = Vec::with_capacity(hi - m);
        for p in m..hi {
            let (u, v) = givens(self.get(p, p), self.get(p + 1, p), bits);
            self.apply_left(&u, &v, p, p, hi);
            // the annihilated entry is exactly zero by construction
            self.set(p + 1, p, Cx::zero(bits));
            rots.push((u, v));
        }
        for (off, (u, v)) in rots.iter().enumerate() {
            let p = m + off;
            let top = m;
            let bottom = (p + 1).min(hi);
            self.apply_right(u, v, p, top, bottom);
        }
        for k in m..=hi {
            let i = self.at(k, k);
            let v = self.data[i].add(shift);
            self.data[i] = v;
        }
    }

    /// Rows p, p+1 <- G * rows, G = [[u, v], [-conj(v), conj(u)]],
    /// over columns col_lo..=col_hi.
    fn apply_left(&mut self, u: &Cx, v: &Cx, p: usize, col_lo: usize, col_hi: usize) {
        for col in col_lo..=col_hi {
            let x = self.get(p, col).clone();
            let y = self.get(p + 1, col).clone();
            let nx = u.mul(&x).add(&v.mul(&y));
            let ny = y.mul(&u.conj()).sub(&x.mul(&v.conj()));
            self.set(p, col, nx);
            self.set(p + 1, col, ny);
        }
    }

    /// Columns p, p+1 <- columns * G^H over rows row_lo..=row_hi.
    fn apply_right(&mut self, u: &Cx, v: &Cx, p: usize, row_lo: usize, row_hi: usize) {
        for row in row_lo..=row_hi {
            let x = self.get(row, p).clone();
            let y = self.get(row, p + 1).clone();
            let nx = x.mul(&u.conj()).add(&y.mul(&v.conj()));
            let ny = y.mul(u).sub(&x.mul(v));
            self.set(row, p, nx);
            self.set(row, p + 1, ny);
        }
    }
}

/// Rotation (u, v) with u a + v b = r >= 0 and -conj(v) a + conj(u) b = 0.
fn givens(a: &Cx, b: &Cx, bits: u32) -> (Cx, Cx) {
    if b.is_zero() {
        return (Cx::from_f64(1.0, 0.0, bits), Cx::zero(bits));
    }
    let mut r2 = a.sqnorm();
    r2 += b.sqnorm();
    let r = r2.sqrt();
    let mut inv = r;
    inv.recip_mut();
    (a.conj().scale(&inv), b.conj().scale(&inv))
}

/// Both roots of the 2x2 block [[a, b], [c, d]].
fn two_by_two_eigs(a: &Cx, b: &Cx, c: &Cx, d: &Cx, bits: u32) -> (Cx, Cx) {
    let half = Float::with_val(bits, 0.5f64);
    let mid = a.add(d).scale(&half);
    // disc = sqrt(((a-d)/2)^2 + b c)
    let delta = a.sub(d).scale(&half);
    let disc = delta.mul(&delta).add(&b.mul(c)).sqrt();
    (mid.add(&disc), mid.sub(&disc))
}

/// Eigenvalue of the trailing 2x2 closest to its bottom-right entry.
fn wilkinson_shift(a: &Cx, b: &Cx, c: &Cx, d: &Cx, bits: u32) -> Cx {
    let (l1, l2) = two_by_two_eigs(a, b, c, d, bits);
    if l1.dist(d) <= l2.dist(d) {
        l1
    } else {
        l2
    }
}
