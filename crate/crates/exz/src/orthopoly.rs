//! Polynomial sequences defined by Hessenberg recurrences: area-orthonormal
//! (Bergman) sequences built by Arnoldi orthogonalization against a
//! quadrature discretization, and Faber-type monic sequences built from a
//! Laurent expansion of the exterior conformal map.
//!
//! Domains that are invariant under complex conjugation (a disk centered on
//! the real axis, or a sector with real vertex and bisector along the
//! positive real axis) get a compressed code path: the recurrence
//! coefficients are then real, and inner products reduce to real dot
//! products over the upper half of the node set.

use crate::eig::{hessenberg_eigenvalues, HessenbergMatrix};
use crate::error::{Error, Result};
use crate::geometry::{Domain, Shape};
use crate::num::{rational_to_float, Cx, PrecisionContext};
use crate::numerics::{domain_rule, sym_disk_rule, sym_sector_rule};
use rug::ops::NegAssign;
use rug::{Assign, Float, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SequenceKind {
    Bergman,
    Faber,
}

impl SequenceKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SequenceKind::Bergman => "bergman",
            SequenceKind::Faber => "faber",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "bergman" => Ok(SequenceKind::Bergman),
            "faber" => Ok(SequenceKind::Faber),
            other => Err(Error::Parse(format!("unknown sequence kind {other:?}"))),
        }
    }
}

/// A polynomial sequence p_0, p_1, ... determined by
/// z p_k = sum_{j<=k} h_{j,k} p_j + h_{k+1,k} p_{k+1}, with positive real
/// subdiagonal and p_0 = 1/norm0. For Bergman sequences norm0 is the square
/// root of the domain area; Faber sequences are monic with norm0 = 1 and
/// unit subdiagonal.
#[derive(Debug, Clone)]
pub struct OrthoSequence {
    hessenberg: HessenbergMatrix,
    kind: SequenceKind,
    norm0: Float,
    n_max: usize,
    bits: u32,
}

impl OrthoSequence {
    /// Assemble from parts, enforcing the shape invariants. Used when
    /// importing a serialized sequence.
    pub fn from_parts(
        kind: SequenceKind,
        hessenberg: HessenbergMatrix,
        norm0: Float,
        bits: u32,
    ) -> Result<OrthoSequence> {
        let n_max = hessenberg.cols();
        if hessenberg.rows() != n_max + 1 {
            return Err(Error::InvalidConfig(format!(
                "recurrence matrix must have one more row than columns, got {}x{}",
                hessenberg.rows(),
                n_max
            )));
        }
        for k in 0..n_max {
            let sub = hessenberg.get(k + 1, k);
            if !sub.im.is_zero() || !(sub.re.is_sign_positive() && !sub.re.is_zero()) {
                return Err(Error::InvalidConfig(format!(
                    "subdiagonal entry {} must be positive real",
                    k
                )));
            }
        }
        if !(norm0.is_finite() && norm0.is_sign_positive() && !norm0.is_zero()) {
            return Err(Error::InvalidConfig(
                "normalization constant must be positive and finite".into(),
            ));
        }
        Ok(OrthoSequence {
            hessenberg,
            kind,
            norm0,
            n_max,
            bits,
        })
    }

    pub fn hessenberg(&self) -> &HessenbergMatrix {
        &self.hessenberg
    }

    pub fn kind(&self) -> SequenceKind {
        self.kind
    }

    pub fn norm0(&self) -> &Float {
        &self.norm0
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn precision_bits(&self) -> u32 {
        self.bits
    }

    /// Leading coefficients of p_0, ..., p_n_max: positive reals fixed by
    /// the normalization and the subdiagonal via
    /// lambda_{k+1} = lambda_k / h_{k+1,k}.
    pub fn leading_coefficients(&self) -> Vec<Float> {
        let mut out = Vec::with_capacity(self.n_max + 1);
        let mut first = self.norm0.clone();
        first.recip_mut();
        out.push(first);
        for k in 0..self.n_max {
            let mut next = out[k].clone();
            next /= &self.hessenberg.get(k + 1, k).re;
            out.push(next);
        }
        out
    }

    /// Values p_0(z), ..., p_n(z) by the forward recurrence.
    pub fn evaluate_all(&self, z: &Cx, n: usize) -> Result<Vec<Cx>> {
        if n > self.n_max {
            return Err(Error::InvalidConfig(format!(
                "degree {} exceeds available recurrence length {}",
                n, self.n_max
            )));
        }
        let bits = self.bits;
        let mut inv0 = self.norm0.clone();
        inv0.recip_mut();
        let mut p: Vec<Cx> = Vec::with_capacity(n + 1);
        p.push(Cx::real(Float::with_val(bits, &inv0)));
        for k in 0..n {
            let mut v = z.mul(&p[k]);
            for j in 0..=k {
                let hjk = self.hessenberg.get(j, k);
                if !hjk.is_zero() {
                    v = v.sub(&hjk.mul(&p[j]));
                }
            }
            let mut inv = self.hessenberg.get(k + 1, k).re.clone();
            inv.recip_mut();
            p.push(v.scale(&inv));
        }
        Ok(p)
    }

    pub fn evaluate(&self, z: &Cx, n: usize) -> Result<Cx> {
        Ok(self.evaluate_all(z, n)?.pop().expect("nonempty"))
    }

    /// Zeros of p_n: eigenvalues of the leading n-by-n recurrence section.
    pub fn zeros(&self, n: usize, ctx: &PrecisionContext) -> Result<Vec<Cx>> {
        if n == 0 || n > self.n_max {
            return Err(Error::InvalidConfig(format!(
                "zero extraction needs 1 <= n <= {}, got {}",
                self.n_max, n
            )));
        }
        hessenberg_eigenvalues(&self.hessenberg.leading_section(n), ctx)
    }

    /// Coefficients (ascending powers) of the monic multiple of p_n.
    pub fn monic_coefficients(&self, n: usize) -> Result<Vec<Cx>> {
        if n > self.n_max {
            return Err(Error::InvalidConfig(format!(
                "degree {} exceeds available recurrence length {}",
                n, self.n_max
            )));
        }
        let bits = self.bits;
        let mut inv0 = self.norm0.clone();
        inv0.recip_mut();
        let mut rows: Vec<Vec<Cx>> = vec![vec![Cx::real(inv0)]];
        for k in 0..n {
            let mut next = vec![Cx::zero(bits); k + 2];
            for (i, c) in rows[k].iter().enumerate() {
                next[i + 1] = next[i + 1].add(c);
            }
            for j in 0..=k {
                let hjk = self.hessenberg.get(j, k);
                if hjk.is_zero() {
                    continue;
                }
                for (i, c) in rows[j].iter().enumerate() {
                    next[i] = next[i].sub(&hjk.mul(c));
                }
            }
            let mut inv = self.hessenberg.get(k + 1, k).re.clone();
            inv.recip_mut();
            for c in &mut next {
                *c = c.scale(&inv);
            }
            rows.push(next);
        }
        let mut out = rows.pop().expect("nonempty");
        let lead = out.last().expect("nonempty").clone();
        // leading coefficient is a positive real product of reciprocals
        let mut inv = lead.re;
        inv.recip_mut();
        for c in &mut out {
            *c = c.scale(&inv);
        }
        Ok(out)
    }
}

/// Area-orthonormal sequence on the domain, built by twice-iterated
/// classical Gram-Schmidt (CGS2) over a quadrature rule of the context's
/// degree. Rejects contexts whose rule cannot resolve degree-2n products,
/// reporting the orthonormality residual measured on an independent rule of
/// sufficient degree.
pub fn bergman_arnoldi(domain: &Domain, n_max: usize, ctx: &PrecisionContext) -> Result<OrthoSequence> {
    ctx.validate()?;
    let bits = ctx.precision_bits;
    let structural_ok = ctx.quad_degree >= 2 * n_max as u32 + 2;
    let rule = measure_rule(domain, ctx)?;
    match arnoldi_build(&rule, n_max, bits) {
        Build::Done {
            hessenberg,
            norm0,
            basis,
        } => {
            let real_sym = rule.real_sym;
            let seq = OrthoSequence {
                hessenberg,
                kind: SequenceKind::Bergman,
                norm0,
                n_max,
                bits,
            };
            if !structural_ok {
                let residual = gram_residual(&seq, domain, ctx)?;
                return Err(Error::QuadratureTooCoarse {
                    degree: ctx.quad_degree,
                    n_max,
                    residual,
                    tol: ctx.ortho_tol.to_f64(),
                });
            }
            // consistency check on the construction rule: CGS2 leaves the
            // final pair orthonormal to working precision, far below the
            // tolerance; anything larger indicates precision exhaustion
            if n_max >= 1 {
                let gnn = dot(&basis[n_max], &basis[n_max], bits, real_sym);
                let gnm = dot(&basis[n_max], &basis[n_max - 1], bits, real_sym);
                let mut r = gnn.re;
                r -= 1u32;
                r.abs_mut();
                let mut residual = r;
                let a = gnn.im.clone().abs();
                if a > residual {
                    residual = a;
                }
                let a = gnm.abs();
                if a > residual {
                    residual = a;
                }
                if residual > ctx.ortho_tol {
                    return Err(Error::PrecisionExhausted { step: n_max });
                }
            }
            Ok(seq)
        }
        Build::Breakdown { step } => {
            if !structural_ok {
                Err(Error::QuadratureTooCoarse {
                    degree: ctx.quad_degree,
                    n_max,
                    residual: f64::INFINITY,
                    tol: ctx.ortho_tol.to_f64(),
                })
            } else {
                Err(Error::PrecisionExhausted { step })
            }
        }
    }
}

/// Discretized area measure: node values and weights, plus whether the
/// compressed conjugation-symmetric representation is in use.
struct HalfRule {
    nodes: Vec<Cx>,
    weights: Vec<Float>,
    real_sym: bool,
}

fn measure_rule(domain: &Domain, ctx: &PrecisionContext) -> Result<HalfRule> {
    let bits = ctx.precision_bits;
    let parts = domain.parts();
    if parts.len() == 1 {
        match &parts[0] {
            Shape::Disk { center, radius } if center.y == 0 => {
                let rule = sym_disk_rule(radius, ctx.quad_degree, bits)?;
                return Ok(shift_real(rule, rational_to_float(&center.x, bits)));
            }
            Shape::Sector {
                vertex,
                radius,
                angle_start,
                angle_end,
            } if vertex.y == 0 && angle_start.add(angle_end).is_zero() => {
                let rule = sym_sector_rule(radius, angle_end, ctx.quad_degree, bits)?;
                return Ok(shift_real(rule, rational_to_float(&vertex.x, bits)));
            }
            _ => {}
        }
    }
    let rule = domain_rule(domain, ctx.quad_degree, bits)?;
    Ok(HalfRule {
        nodes: rule.nodes,
        weights: rule.weights,
        real_sym: false,
    })
}

fn shift_real(rule: crate::numerics::SymPolarRule, shift: Float) -> HalfRule {
    let mut nodes = rule.nodes;
    if !shift.is_zero() {
        for z in &mut nodes {
            z.re += &shift;
        }
    }
    HalfRule {
        nodes,
        weights: rule.eff_weights,
        real_sym: true,
    }
}

enum Build {
    Done {
        hessenberg: HessenbergMatrix,
        norm0: Float,
        basis: Vec<Vec<Cx>>,
    },
    Breakdown {
        step: usize,
    },
}

/// Arnoldi with classical Gram-Schmidt on weight-scaled node vectors:
/// basis vectors store sqrt(w_i) p_k(z_i), so inner products are plain dot
/// products. A second orthogonalization pass runs only when the first one
/// shrank the vector below half its starting norm, the standard selective
/// criterion: without such cancellation one pass already leaves the
/// residual orthogonal to working precision.
fn arnoldi_build(rule: &HalfRule, n_max: usize, bits: u32) -> Build {
    let nn = rule.nodes.len();
    let work = bits + 32;
    let mut mass = Float::new(work);
    for w in &rule.weights {
        mass += w;
    }
    mass.sqrt_mut();
    let norm0 = Float::with_val(bits, &mass);
    let mut inv0 = norm0.clone();
    inv0.recip_mut();
    let mut q0 = Vec::with_capacity(nn);
    for w in &rule.weights {
        let mut s = w.clone();
        s.sqrt_mut();
        s *= &inv0;
        q0.push(Cx::real(s));
    }
    let mut basis: Vec<Vec<Cx>> = vec![q0];
    let mut h = HessenbergMatrix::zero(n_max + 1, n_max, bits);
    let mut t = Float::new(bits);
    for k in 0..n_max {
        let mut v: Vec<Cx> = Vec::with_capacity(nn);
        {
            let qk = &basis[k];
            for (z, q) in rule.nodes.iter().zip(qk.iter()) {
                v.push(z.mul(q));
            }
        }
        let scale0 = vec_norm(&v, bits);
        let mut hcol = vec![Cx::zero(bits); k + 1];
        for j in 0..=k {
            let c = dot(&v, &basis[j], bits, rule.real_sym);
            axpy_sub(&mut v, &c, &basis[j], rule.real_sym, &mut t);
            hcol[j] = hcol[j].add(&c);
        }
        let mut nv = vec_norm(&v, bits);
        let mut half0 = Float::with_val(bits, &scale0);
        half0 >>= 1;
        if nv < half0 {
            for j in 0..=k {
                let c = dot(&v, &basis[j], bits, rule.real_sym);
                axpy_sub(&mut v, &c, &basis[j], rule.real_sym, &mut t);
                hcol[j] = hcol[j].add(&c);
            }
            nv = vec_norm(&v, bits);
        }
        let floor = scale0 >> (bits / 2);
        if !nv.is_finite() || nv <= floor {
            return Build::Breakdown { step: k };
        }
        let mut inv = nv.clone();
        inv.recip_mut();
        for x in &mut v {
            x.re *= &inv;
            x.im *= &inv;
        }
        for (j, c) in hcol.into_iter().enumerate() {
            h.set(j, k, c);
        }
        h.set(k + 1, k, Cx::real(nv));
        basis.push(v);
    }
    Build::Done {
        hessenberg: h,
        norm0,
        basis,
    }
}

/// <a, b> = sum a_i conj(b_i); in the symmetric representation both
/// arguments are values of conjugation-symmetric functions, making the
/// product's imaginary parts cancel pairwise, so only the real part is
/// accumulated.
fn dot(a: &[Cx], b: &[Cx], bits: u32, real_sym: bool) -> Cx {
    let work = bits + 32;
    let mut re = Float::new(work);
    let mut t = Float::new(work);
    if real_sym {
        for (x, y) in a.iter().zip(b.iter()) {
            t.assign(x.re.mul_add_mul_ref(&y.re, &x.im, &y.im));
            re += &t;
        }
        Cx::real(Float::with_val(bits, &re))
    } else {
        let mut im = Float::new(work);
        for (x, y) in a.iter().zip(b.iter()) {
            t.assign(x.re.mul_add_mul_ref(&y.re, &x.im, &y.im));
            re += &t;
            t.assign(x.im.mul_sub_mul_ref(&y.re, &x.re, &y.im));
            im += &t;
        }
        Cx::from_floats(Float::with_val(bits, &re), Float::with_val(bits, &im))
    }
}

/// v -= h * q, componentwise. The real-coefficient path rewrites the
/// update as x = (-h) * y + x so each component costs one fused
/// multiply-add, swapped into place.
fn axpy_sub(v: &mut [Cx], h: &Cx, q: &[Cx], real_sym: bool, t: &mut Float) {
    if h.is_zero() {
        return;
    }
    if real_sym {
        let mut hneg = h.re.clone();
        hneg.neg_assign();
        for (x, y) in v.iter_mut().zip(q.iter()) {
            t.assign(hneg.mul_add_ref(&y.re, &x.re));
            std::mem::swap(&mut x.re, t);
            t.assign(hneg.mul_add_ref(&y.im, &x.im));
            std::mem::swap(&mut x.im, t);
        }
    } else {
        for (x, y) in v.iter_mut().zip(q.iter()) {
            t.assign(h.re.mul_sub_mul_ref(&y.re, &h.im, &y.im));
            x.re -= &*t;
            t.assign(h.re.mul_add_mul_ref(&y.im, &h.im, &y.re));
            x.im -= &*t;
        }
    }
}

fn vec_norm(v: &[Cx], bits: u32) -> Float {
    let work = bits + 32;
    let mut acc = Float::new(work);
    let mut t = Float::new(work);
    for x in v {
        t.assign(x.re.mul_add_mul_ref(&x.re, &x.im, &x.im));
        acc += &t;
    }
    acc.sqrt_mut();
    Float::with_val(bits, &acc)
}

/// Orthonormality residual of the final pair, measured on an independent
/// rule whose degree resolves all products that occur.
fn gram_residual(seq: &OrthoSequence, domain: &Domain, ctx: &PrecisionContext) -> Result<f64> {
    let n = seq.n_max;
    if n == 0 {
        return Ok(0.0);
    }
    let bits = ctx.precision_bits;
    let probe_degree = (2 * n as u32 + 2).max(ctx.quad_degree) + 8;
    let rule = domain_rule(domain, probe_degree, bits)?;
    let work = bits + 32;
    let mut gnn = Float::new(work);
    let mut g01_re = Float::new(work);
    let mut g01_im = Float::new(work);
    let mut t = Float::new(work);
    for (z, w) in rule.nodes.iter().zip(rule.weights.iter()) {
        let p = seq.evaluate_all(z, n)?;
        let pn = &p[n];
        let pm = &p[n - 1];
        t.assign(pn.re.mul_add_mul_ref(&pn.re, &pn.im, &pn.im));
        t *= w;
        gnn += &t;
        t.assign(pn.re.mul_add_mul_ref(&pm.re, &pn.im, &pm.im));
        t *= w;
        g01_re += &t;
        t.assign(pn.im.mul_sub_mul_ref(&pm.re, &pn.re, &pm.im));
        t *= w;
        g01_im += &t;
    }
    gnn -= 1u32;
    gnn.abs_mut();
    let cross = Cx::from_floats(
        Float::with_val(bits, &g01_re),
        Float::with_val(bits, &g01_im),
    )
    .abs();
    let mut residual = gnn.to_f64();
    if cross.to_f64() > residual {
        residual = cross.to_f64();
    }
    Ok(residual)
}

/// Laurent expansion at infinity of the exterior conformal map
/// phi(z) = z/capacity + c_0 + c_1/z + c_2/z^2 + ..., normalized so that
/// phi'(infinity) = 1/capacity > 0. `coefficients[k]` is c_k.
#[derive(Debug, Clone)]
pub struct ExteriorMapSeries {
    pub capacity: Float,
    pub coefficients: Vec<Cx>,
}

impl ExteriorMapSeries {
    /// Exact series for a disk: phi(z) = (z - center)/radius.
    pub fn disk(center: &Cx, radius: &Float, n_terms: usize) -> ExteriorMapSeries {
        let bits = radius.prec();
        let mut inv = radius.clone();
        inv.recip_mut();
        let c0 = center.scale(&inv).neg();
        let mut coefficients = vec![c0];
        coefficients.resize(n_terms.max(1), Cx::zero(bits));
        ExteriorMapSeries {
            capacity: radius.clone(),
            coefficients,
        }
    }

    /// Series for the real segment [-half, half]: the inverse Joukowski map
    /// psi(z) = (z + sqrt(z^2 - half^2))/2 expands as
    /// z - sum_{k>=1} C_{k-1} (half^2/4)^k z^{-(2k-1)} with Catalan numbers
    /// C_j, and the capacity is half/2. Coefficients are generated exactly in
    /// rational arithmetic before rounding.
    pub fn segment(half: &Rational, n_terms: usize, bits: u32) -> Result<ExteriorMapSeries> {
        if *half <= 0 {
            return Err(Error::InvalidConfig(
                "segment half-length must be positive".into(),
            ));
        }
        let quarter = Rational::from(half / 2u32);
        let capacity = rational_to_float(&quarter, bits);
        let n = n_terms.max(1);
        let mut coefficients = vec![Cx::zero(bits); n];
        // After dividing psi's tail by the capacity, the odd coefficients are
        // c_{2k-1} = -C_{k-1} (half/2)^{2k-1}; track the term as a rational
        // and advance with the Catalan ratio C_k / C_{k-1} = 2(2k-1)/(k+1).
        let rr = Rational::from(&quarter * &quarter);
        let mut term = quarter;
        let mut k = 1u32;
        while ((2 * k - 1) as usize) < n {
            let mut f = rational_to_float(&term, bits);
            f = -f;
            coefficients[(2 * k - 1) as usize] = Cx::real(f);
            term *= &rr;
            term *= 2 * (2 * k - 1);
            term /= k + 1;
            k += 1;
        }
        Ok(ExteriorMapSeries {
            capacity,
            coefficients,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.capacity.is_finite() && self.capacity.is_sign_positive() && !self.capacity.is_zero())
        {
            return Err(Error::InvalidConfig(
                "exterior map capacity must be positive and finite".into(),
            ));
        }
        if self.coefficients.is_empty() {
            return Err(Error::InvalidConfig(
                "exterior map series needs at least the constant coefficient".into(),
            ));
        }
        for c in &self.coefficients {
            if !c.re.is_finite() || !c.im.is_finite() {
                return Err(Error::InvalidConfig(
                    "exterior map series coefficients must be finite".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Monic Faber-type sequence: F_n is the polynomial part of
/// (capacity * phi)^n. Computing the polynomial part of the n-th power
/// exactly requires the series tail down to z^{-(n-1)}; shorter input is
/// rejected rather than silently truncated.
pub fn faber_from_series(
    series: &ExteriorMapSeries,
    n_max: usize,
    ctx: &PrecisionContext,
) -> Result<OrthoSequence> {
    ctx.validate()?;
    series.validate()?;
    let bits = ctx.precision_bits;
    let tail = series.coefficients.len() - 1;
    let need = n_max.saturating_sub(1);
    if tail < need {
        return Err(Error::InsufficientSeriesTail { have: tail, need });
    }
    let one = Cx::from_f64(1.0, 0.0, bits);
    // psi = capacity * phi = z + psi_0 + psi_1/z + ... (monic)
    let cap = Float::with_val(bits, &series.capacity);
    let psi: Vec<Cx> = series.coefficients.iter().map(|c| c.scale(&cap)).collect();
    // Laurent coefficients of psi^n on powers -tail ..= n_max;
    // index i holds the coefficient of z^(i - tail)
    let len = tail + n_max + 1;
    let mut cur = vec![Cx::zero(bits); len];
    cur[tail] = one.clone();
    let mut polys: Vec<Vec<Cx>> = vec![vec![one.clone()]];
    for n in 1..=n_max {
        let mut next = vec![Cx::zero(bits); len];
        for i in 0..len {
            if cur[i].is_zero() {
                continue;
            }
            if i + 1 < len {
                next[i + 1] = next[i + 1].add(&cur[i]);
            }
            for (j, c) in psi.iter().enumerate() {
                if c.is_zero() || j > i {
                    continue;
                }
                next[i - j] = next[i - j].add(&cur[i].mul(c));
            }
        }
        cur = next;
        polys.push(cur[tail..=tail + n].to_vec());
    }
    // change of basis: z F_k - F_{k+1} has degree <= k; expand it over the
    // monic family to read off column k of the recurrence
    let mut h = HessenbergMatrix::zero(n_max + 1, n_max, bits);
    for k in 0..n_max {
        let mut rem = vec![Cx::zero(bits); k + 1];
        for (i, c) in polys[k].iter().enumerate().take(k) {
            rem[i + 1] = c.clone();
        }
        // the shifted leading term cancels exactly against F_{k+1}
        for (i, c) in polys[k + 1].iter().enumerate().take(k + 1) {
            rem[i] = rem[i].sub(c);
        }
        for j in (0..=k).rev() {
            let hv = rem[j].clone();
            if !hv.is_zero() {
                for (i, c) in polys[j].iter().enumerate() {
                    rem[i] = rem[i].sub(&hv.mul(c));
                }
            }
            h.set(j, k, hv);
        }
        h.set(k + 1, k, one.clone());
    }
    Ok(OrthoSequence {
        hessenberg: h,
        kind: SequenceKind::Faber,
        norm0: Float::with_val(bits, 1u32),
        n_max,
        bits,
    })
}

/// Supremum of |p_n| over the domain boundary, estimated on endpoint-
/// clustered (Chebyshev-spaced) samples of every boundary piece; the
/// clustering concentrates samples near corners where extremal growth
/// occurs.
pub fn sup_norm_estimate(seq: &OrthoSequence, n: usize, domain: &Domain) -> Result<Float> {
    if n > seq.n_max() {
        return Err(Error::InvalidConfig(format!(
            "degree {} exceeds available recurrence length {}",
            n,
            seq.n_max()
        )));
    }
    let bits = seq.precision_bits();
    let m = (2 * n + 17).max(65);
    let mut best = Float::new(bits);
    for pp in domain.boundary().pieces() {
        let plen = pp.piece.len();
        for i in 0..m {
            let frac = 0.5 * (1.0 - (std::f64::consts::PI * i as f64 / (m - 1) as f64).cos());
            let (x, y) = pp.piece.point_at(frac * plen);
            let z = Cx::from_f64(x, y, bits);
            let val = seq.evaluate(&z, n)?.abs();
            if val > best {
                best = val;
            }
        }
    }
    Ok(best)
}
