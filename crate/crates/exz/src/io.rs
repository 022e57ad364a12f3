//! Serialization: domain specs as JSON with exact decimal-string numbers,
//! Hessenberg data round-tripping at full working precision, and
//! CSV/JSON artifact writers for the command-line front end.

use crate::diagnostics::StudyReport;
use crate::error::{Error, Result};
use crate::geometry::{Angle, Domain, Pt, Shape};
use crate::num::Cx;
use crate::orthopoly::{OrthoSequence, SequenceKind};
use crate::potential::MeasureCloud;
use crate::eig::HessenbergMatrix;
use rug::{Float, Integer, Rational};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::Path;

/// Parses an exact number: a decimal string ("1.25", "-3e-2") or a
/// fraction ("7/150").
pub fn parse_rational_string(s: &str) -> Result<Rational> {
    let t = s.trim();
    if t.contains('/') {
        let val = Rational::parse(t)
            .map_err(|e| Error::Parse(format!("bad fraction {t:?}: {e}")))?;
        Ok(Rational::from(val))
    } else {
        crate::num::rational_from_decimal(t)
    }
}

/// Exact decimal form when the denominator is 2^a 5^b, fraction form
/// otherwise.
pub fn rational_to_string(q: &Rational) -> String {
    let denom = q.denom();
    let mut rest = denom.clone();
    let mut twos = 0u32;
    while rest.is_even() && rest != 0 {
        rest /= 2;
        twos += 1;
    }
    let mut fives = 0u32;
    loop {
        let (quot, rem) = rest.clone().div_rem(Integer::from(5));
        if rem == 0 && quot != 0 {
            rest = quot;
            fives += 1;
        } else {
            break;
        }
    }
    if rest != 1 {
        return format!("{}/{}", q.numer(), denom);
    }
    // q = numer / (2^a 5^b): scale to denominator 10^max(a,b)
    let digits = twos.max(fives);
    let mut scaled = q.numer().clone();
    scaled *= Integer::from(Integer::u_pow_u(2, digits - twos));
    scaled *= Integer::from(Integer::u_pow_u(5, digits - fives));
    let negative = scaled < 0;
    let mag = scaled.abs().to_string();
    let mut out = String::new();
    if negative {
        out.push('-');
    }
    let d = digits as usize;
    if d == 0 {
        out.push_str(&mag);
        return out;
    }
    if mag.len() > d {
        out.push_str(&mag[..mag.len() - d]);
        out.push('.');
        out.push_str(&mag[mag.len() - d..]);
    } else {
        out.push_str("0.");
        for _ in 0..(d - mag.len()) {
            out.push('0');
        }
        out.push_str(&mag);
    }
    // trim trailing zeros after the point
    while out.ends_with('0') {
        out.pop();
    }
    if out.ends_with('.') {
        out.pop();
    }
    if out.is_empty() || out == "-" {
        out = "0".into();
    }
    out
}

/// Angles are written as a rational multiple of pi with an optional exact
/// radian offset: "1.5pi", "-0.75pi", "0.25pi+0.125", or a bare offset.
pub fn parse_angle(s: &str) -> Result<Angle> {
    let t = s.trim();
    if let Some(pos) = t.find("pi") {
        let coeff_str = &t[..pos];
        let coeff = match coeff_str {
            "" | "+" => Rational::from(1),
            "-" => Rational::from(-1),
            other => parse_rational_string(other)?,
        };
        let rest = &t[pos + 2..];
        let offset = if rest.is_empty() {
            Rational::new()
        } else if let Some(r) = rest.strip_prefix('+') {
            parse_rational_string(r)?
        } else if rest.starts_with('-') {
            parse_rational_string(rest)?
        } else {
            return Err(Error::Parse(format!("bad angle {t:?}")));
        };
        Ok(Angle::new(coeff, offset))
    } else {
        Ok(Angle::new(Rational::new(), parse_rational_string(t)?))
    }
}

pub fn angle_to_string(a: &Angle) -> String {
    let coeff = rational_to_string(&a.pi_coeff);
    let off = &a.offset;
    if *off == 0 {
        format!("{coeff}pi")
    } else if *off > 0 {
        format!("{coeff}pi+{}", rational_to_string(off))
    } else {
        format!("{coeff}pi{}", rational_to_string(off))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum DomainJson {
    Disk {
        center: [String; 2],
        radius: String,
    },
    Sector {
        vertex: [String; 2],
        radius: String,
        angle_start: String,
        angle_end: String,
    },
    Polygon {
        vertices: Vec<[String; 2]>,
    },
    Union {
        parts: Vec<DomainJson>,
    },
}

fn point(p: &[String; 2]) -> Result<Pt> {
    Ok(Pt::new(
        parse_rational_string(&p[0])?,
        parse_rational_string(&p[1])?,
    ))
}

fn domain_from_spec(spec: DomainJson) -> Result<Domain> {
    match spec {
        DomainJson::Disk { center, radius } => {
            Domain::disk(point(&center)?, parse_rational_string(&radius)?)
        }
        DomainJson::Sector {
            vertex,
            radius,
            angle_start,
            angle_end,
        } => Domain::sector(
            point(&vertex)?,
            parse_rational_string(&radius)?,
            parse_angle(&angle_start)?,
            parse_angle(&angle_end)?,
        ),
        DomainJson::Polygon { vertices } => {
            let vs = vertices.iter().map(point).collect::<Result<Vec<_>>>()?;
            Domain::polygon(vs)
        }
        DomainJson::Union { parts } => {
            let mut doms = Vec::with_capacity(parts.len());
            for p in parts {
                if matches!(p, DomainJson::Union { .. }) {
                    return Err(Error::Parse("nested unions are not allowed".into()));
                }
                doms.push(domain_from_spec(p)?);
            }
            Domain::union(doms)
        }
    }
}

fn shape_to_spec(shape: &Shape) -> DomainJson {
    match shape {
        Shape::Disk { center, radius } => DomainJson::Disk {
            center: [
                rational_to_string(&center.x),
                rational_to_string(&center.y),
            ],
            radius: rational_to_string(radius),
        },
        Shape::Sector {
            vertex,
            radius,
            angle_start,
            angle_end,
        } => DomainJson::Sector {
            vertex: [
                rational_to_string(&vertex.x),
                rational_to_string(&vertex.y),
            ],
            radius: rational_to_string(radius),
            angle_start: angle_to_string(angle_start),
            angle_end: angle_to_string(angle_end),
        },
        Shape::Polygon { vertices } => DomainJson::Polygon {
            vertices: vertices
                .iter()
                .map(|v| [rational_to_string(&v.x), rational_to_string(&v.y)])
                .collect(),
        },
    }
}

pub fn domain_from_json(text: &str) -> Result<Domain> {
    let spec: DomainJson = serde_json::from_str(text)?;
    domain_from_spec(spec)
}

pub fn domain_from_path(path: &Path) -> Result<Domain> {
    domain_from_json(&std::fs::read_to_string(path)?)
}

pub fn domain_to_json(domain: &Domain) -> String {
    let parts = domain.parts();
    let spec = if parts.len() == 1 {
        shape_to_spec(&parts[0])
    } else {
        DomainJson::Union {
            parts: parts.iter().map(shape_to_spec).collect(),
        }
    };
    serde_json::to_string_pretty(&spec).expect("domain spec serializes")
}

fn float_to_string(f: &Float) -> String {
    crate::num::float_to_decimal(f)
}

fn float_from_string(s: &str, bits: u32) -> Result<Float> {
    crate::num::float_from_decimal(s, bits)
}

#[derive(Serialize, Deserialize)]
struct SequenceJson {
    kind: String,
    n_max: usize,
    /// Row-major (n_max+1) x n_max recurrence matrix; entries are
    /// [re, im] decimal strings.
    hessenberg: Vec<Vec<[String; 2]>>,
    /// Positive leading coefficients lambda_0..lambda_n_max.
    leading_coeffs: Vec<String>,
    /// Bit precision the entries were generated at, so a re-import
    /// reproduces the sequence exactly.
    precision_bits: u32,
}

pub fn sequence_to_json(seq: &OrthoSequence) -> String {
    let h = seq.hessenberg();
    let n_max = seq.n_max();
    let mut rows = Vec::with_capacity(n_max + 1);
    for row in 0..=n_max {
        let mut r = Vec::with_capacity(n_max);
        for col in 0..n_max {
            let e = h.get(row, col);
            r.push([float_to_string(&e.re), float_to_string(&e.im)]);
        }
        rows.push(r);
    }
    let body = SequenceJson {
        kind: seq.kind().as_str().to_string(),
        n_max,
        hessenberg: rows,
        leading_coeffs: seq
            .leading_coefficients()
            .iter()
            .map(float_to_string)
            .collect(),
        precision_bits: seq.precision_bits(),
    };
    serde_json::to_string_pretty(&body).expect("sequence serializes")
}

pub fn sequence_from_json(text: &str) -> Result<OrthoSequence> {
    let body: SequenceJson = serde_json::from_str(text)?;
    let kind = SequenceKind::parse(&body.kind)?;
    let bits = body.precision_bits;
    let n_max = body.n_max;
    if body.hessenberg.len() != n_max + 1 {
        return Err(Error::Parse(format!(
            "expected {} recurrence rows, found {}",
            n_max + 1,
            body.hessenberg.len()
        )));
    }
    if body.leading_coeffs.len() != n_max + 1 {
        return Err(Error::Parse(format!(
            "expected {} leading coefficients, found {}",
            n_max + 1,
            body.leading_coeffs.len()
        )));
    }
    let mut h = HessenbergMatrix::zero(n_max + 1, n_max, bits);
    for (row, r) in body.hessenberg.iter().enumerate() {
        if r.len() != n_max {
            return Err(Error::Parse(format!(
                "row {} must have {} entries, found {}",
                row,
                n_max,
                r.len()
            )));
        }
        for (col, e) in r.iter().enumerate() {
            if row > col + 1 {
                continue; // below the subdiagonal: structurally zero
            }
            let re = float_from_string(&e[0], bits)?;
            let im = float_from_string(&e[1], bits)?;
            h.set(row, col, Cx { re, im });
        }
    }
    let mut norm0 = float_from_string(&body.leading_coeffs[0], bits)?;
    if !(norm0.is_finite() && norm0.is_sign_positive() && !norm0.is_zero()) {
        return Err(Error::Parse(
            "leading coefficients must be positive".into(),
        ));
    }
    norm0.recip_mut();
    OrthoSequence::from_parts(kind, h, norm0, bits)
}

pub fn save_sequence(path: &Path, seq: &OrthoSequence) -> Result<()> {
    std::fs::write(path, sequence_to_json(seq) + "\n")?;
    Ok(())
}

pub fn load_sequence(path: &Path) -> Result<OrthoSequence> {
    sequence_from_json(&std::fs::read_to_string(path)?)
}

pub fn write_zeros_csv(path: &Path, n: usize, zeros: &[Cx]) -> Result<()> {
    let mut out = String::from("n,re,im\n");
    for z in zeros {
        let _ = writeln!(
            out,
            "{},{},{}",
            n,
            float_to_string(&z.re),
            float_to_string(&z.im)
        );
    }
    std::fs::write(path, out)?;
    Ok(())
}

pub fn write_cloud_csv(path: &Path, cloud: &MeasureCloud) -> Result<()> {
    let mut out = String::from("re,im,weight\n");
    for (i, &(x, y)) in cloud.atoms().iter().enumerate() {
        let _ = writeln!(out, "{},{},{}", x, y, rational_to_string(&cloud.weights()[i]));
    }
    std::fs::write(path, out)?;
    Ok(())
}

pub fn read_cloud_csv(path: &Path) -> Result<MeasureCloud> {
    let text = std::fs::read_to_string(path)?;
    let mut atoms = Vec::new();
    let mut weights = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || (lineno == 0 && t.starts_with("re")) {
            continue;
        }
        let cols: Vec<&str> = t.split(',').collect();
        if cols.len() != 3 {
            return Err(Error::Parse(format!(
                "cloud CSV line {}: expected re,im,weight",
                lineno + 1
            )));
        }
        let x: f64 = cols[0]
            .trim()
            .parse()
            .map_err(|e| Error::Parse(format!("cloud CSV line {}: {e}", lineno + 1)))?;
        let y: f64 = cols[1]
            .trim()
            .parse()
            .map_err(|e| Error::Parse(format!("cloud CSV line {}: {e}", lineno + 1)))?;
        atoms.push((x, y));
        weights.push(parse_rational_string(cols[2])?);
    }
    MeasureCloud::new(atoms, weights)
}

pub fn write_trace_csv(path: &Path, rows: &[(f64, f64)]) -> Result<()> {
    let mut out = String::from("r,value\n");
    for &(r, v) in rows {
        let _ = writeln!(out, "{r},{v}");
    }
    std::fs::write(path, out)?;
    Ok(())
}

pub fn write_proof_csv(path: &Path, rows: &[(f64, f64, f64)]) -> Result<()> {
    let mut out = String::from("r,claim_a_integral,claim_b_integral\n");
    for &(r, a, b) in rows {
        let _ = writeln!(out, "{r},{a},{b}");
    }
    std::fs::write(path, out)?;
    Ok(())
}

pub fn write_report_json(path: &Path, report: &StudyReport) -> Result<()> {
    let text = serde_json::to_string_pretty(report)?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}
