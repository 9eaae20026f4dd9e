//! Certificate checking. Deliberately naive: dense evaluation, odometer
//! enumeration and plain digit arithmetic, nothing shared with the searches.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use super::certificate::{Certificate, CertificateKind, FsTarget, GeneratorRule, Payload};
use super::SearchError;
use crate::coloring::{Coloring, DomainRule};
use crate::matrix::SparseMatrix;
use crate::numeric::Rational;

/// Largest number of vectors or colorings a rescan may visit.
const RESCAN_CAP: u128 = 1 << 26;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub ok: bool,
    pub violations: Vec<String>,
    /// Number of vectors / colorings / values examined.
    pub checked: u64,
}

fn malformed(msg: impl Into<String>) -> SearchError {
    SearchError::MalformedCertificate(msg.into())
}

fn eval(dense: &[Vec<Rational>], x: &[Rational]) -> Vec<Rational> {
    dense
        .iter()
        .map(|row| {
            let mut s = Rational::zero();
            for (a, b) in row.iter().zip(x) {
                if !a.is_zero() {
                    s = s + a * b;
                }
            }
            s
        })
        .collect()
}

/// Calls `f` on every vector of `points^v` in odometer order; stops early
/// when `f` returns false.
fn odometer(points: &[Rational], v: usize, mut f: impl FnMut(&[Rational]) -> bool) {
    if points.is_empty() {
        return;
    }
    let mut idx = vec![0usize; v];
    let mut x: Vec<Rational> = vec![points[0].clone(); v];
    loop {
        if !f(&x) {
            return;
        }
        let mut k = 0;
        loop {
            if k == v {
                return;
            }
            idx[k] += 1;
            if idx[k] < points.len() {
                x[k] = points[idx[k]].clone();
                break;
            }
            idx[k] = 0;
            x[k] = points[0].clone();
            k += 1;
        }
    }
}

fn space_size(base: usize, exp: usize) -> u128 {
    (base as u128).checked_pow(exp as u32).unwrap_or(u128::MAX)
}

/// Membership in the finite sums of distinct generators with index >= tail.
fn fs_member(target: &FsTarget, v: &Rational) -> bool {
    match &target.generators {
        GeneratorRule::Base4 { first, count } => base4_member(*first, *count, target.tail, v),
        GeneratorRule::Explicit { generators } => {
            let gens = generators.get(target.tail..).unwrap_or(&[]);
            subset_sum_member(gens, v)
        }
    }
}

/// `v` is a sum of distinct `4^-(first+i)`, `tail <= i < count`, exactly when
/// its base-4 digits are all 0 or 1 and sit at allowed positions.
fn base4_member(first: i64, count: usize, tail: usize, v: &Rational) -> bool {
    if !v.is_positive() || tail >= count {
        return false;
    }
    let lo = first + tail as i64;
    let hi = first + count as i64 - 1;
    // v * 4^hi must be an integer with base-4 digits in {0,1}
    let scaled = v * &Rational::pow2(2 * hi);
    if !scaled.is_integer() {
        return false;
    }
    let mut n = scaled.numer().clone();
    let four = BigInt::from(4);
    let mut pos = hi;
    while n.is_positive() {
        if pos < lo {
            return false;
        }
        let (q, digit) = n.div_rem(&four);
        if digit > BigInt::one() {
            return false;
        }
        n = q;
        pos -= 1;
    }
    true
}

fn subset_sum_member(gens: &[Rational], v: &Rational) -> bool {
    if gens.len() > 24 {
        return false;
    }
    (1u32..(1 << gens.len())).any(|mask| {
        let s: Rational = gens
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, g)| g.clone())
            .sum();
        s == *v
    })
}

fn integer_domain_upto(c: &Coloring, n: usize) -> bool {
    matches!(c.domain().rule(), DomainRule::Integers { lo: 1, hi } if *hi == n as i64)
}

/// Scans every vector of `domain^v`; records one violation per
/// monochromatic image found inside the domain.
fn rescan_avoiding(m: &SparseMatrix, c: &Coloring, out: &mut VerificationReport) -> Result<(), SearchError> {
    let pts = c.domain().points().to_vec();
    if space_size(pts.len(), m.ncols()) > RESCAN_CAP {
        return Err(malformed("refutation domain too large to rescan"));
    }
    let dense = m.to_dense();
    let mut err = None;
    odometer(&pts, m.ncols(), |x| {
        out.checked += 1;
        let img = eval(&dense, x);
        let mut color = None;
        for y in &img {
            if !c.domain().contains(y) {
                return true;
            }
            let k = match c.color_of(y) {
                Ok(k) => k,
                Err(e) => {
                    err = Some(e);
                    return false;
                }
            };
            if *color.get_or_insert(k) != k {
                return true;
            }
        }
        let shown: Vec<String> = x.iter().map(ToString::to_string).collect();
        out.violations
            .push(format!("x = ({}) has a monochromatic image", shown.join(", ")));
        true
    });
    match err {
        Some(e) => Err(malformed(format!("coloring cannot be evaluated: {e}"))),
        None => Ok(()),
    }
}

/// True when every `r`-coloring of `1..=n` has a monochromatic image of `m`
/// over `1..=n`. Colorings are enumerated with the color of 1 fixed to 0.
fn every_coloring_hit(m: &SparseMatrix, r: usize, n: usize, out: &mut VerificationReport) -> Result<bool, SearchError> {
    let pts: Vec<Rational> = (1..=n as i64).map(Rational::from_integer).collect();
    if space_size(n, m.ncols()) > RESCAN_CAP || space_size(r, n.saturating_sub(1)) > RESCAN_CAP {
        return Err(malformed("bound too large to re-verify"));
    }
    let dense = m.to_dense();
    let mut images: Vec<Vec<usize>> = Vec::new();
    odometer(&pts, m.ncols(), |x| {
        let img = eval(&dense, x);
        let idx: Option<Vec<usize>> = img
            .iter()
            .map(|y| {
                let k = y.to_i64()?;
                (y.is_integer() && k >= 1 && k <= n as i64).then_some(k as usize - 1)
            })
            .collect();
        if let Some(idx) = idx {
            images.push(idx);
        }
        true
    });
    if n == 0 {
        return Ok(false);
    }
    let mut colors = vec![0usize; n];
    loop {
        out.checked += 1;
        let hit = images
            .iter()
            .any(|s| s.iter().all(|&i| colors[i] == colors[s[0]]));
        if !hit {
            let shown: Vec<String> = colors.iter().map(ToString::to_string).collect();
            out.violations
                .push(format!("coloring [{}] of 1..={n} avoids every image", shown.join(", ")));
            return Ok(false);
        }
        // next coloring, point 0 stays at color 0
        let mut k = 1;
        loop {
            if k >= n {
                return Ok(true);
            }
            colors[k] += 1;
            if colors[k] < r {
                break;
            }
            colors[k] = 0;
            k += 1;
        }
    }
}

fn check_witness(cert: &Certificate, out: &mut VerificationReport) -> Result<(), SearchError> {
    let Payload::Witness {
        x,
        image,
        color,
        targets,
        ..
    } = &cert.payload
    else {
        return Err(malformed("kind witness without witness payload"));
    };
    let m = &cert.matrix;
    if x.len() != m.ncols() {
        return Err(malformed(format!("x has {} entries, matrix has {} columns", x.len(), m.ncols())));
    }
    if image.len() != m.nrows() {
        return Err(malformed(format!("image has {} entries, matrix has {} rows", image.len(), m.nrows())));
    }
    if color.is_some() && cert.coloring.is_none() {
        return Err(malformed("color given without a coloring"));
    }
    let dense = m.to_dense();
    let recomputed = eval(&dense, x);
    let zero_row: Vec<bool> = dense.iter().map(|r| r.iter().all(Rational::is_zero)).collect();
    for (i, (stored, real)) in image.iter().zip(&recomputed).enumerate() {
        out.checked += 1;
        if stored != real {
            out.violations
                .push(format!("image entry {i}: stored {stored}, recomputed {real}"));
        }
    }
    for (i, y) in recomputed.iter().enumerate() {
        if zero_row[i] {
            continue;
        }
        if !y.is_positive() {
            out.violations.push(format!("image entry {i}: {y} is not positive"));
        }
        if let Some(e) = &cert.epsilon {
            if y >= e {
                out.violations.push(format!("image entry {i}: {y} is not below epsilon {e}"));
            }
        }
        if let (Some(want), Some(c)) = (color, &cert.coloring) {
            match c.color_of(y) {
                Ok(k) if k == *want => {}
                Ok(k) => out
                    .violations
                    .push(format!("image entry {i}: {y} has color {k}, expected {want}")),
                Err(_) => out
                    .violations
                    .push(format!("image entry {i}: {y} is outside the coloring domain")),
            }
        }
        if !targets.is_empty() && !targets.iter().any(|t| fs_member(t, y)) {
            out.violations
                .push(format!("image entry {i}: {y} is not in any target set"));
        }
    }
    // every segment prefix B_n x must land in the targets as well
    if let (Some(bps), false) = (m.breakpoints(), targets.is_empty()) {
        for (n, &hi) in bps.iter().enumerate().skip(1) {
            let hi = hi.min(m.ncols());
            for (i, row) in dense.iter().enumerate() {
                if row[..hi].iter().all(Rational::is_zero) {
                    continue;
                }
                out.checked += 1;
                let partial = eval(&[row[..hi].to_vec()], &x[..hi]).remove(0);
                if !targets.iter().any(|t| fs_member(t, &partial)) {
                    out.violations.push(format!(
                        "prefix B_{} row {i}: {partial} is not in any target set",
                        n - 1
                    ));
                }
            }
        }
    }
    Ok(())
}

/// Re-checks a certificate from its contents alone.
pub fn verify_certificate(cert: &Certificate) -> Result<VerificationReport, SearchError> {
    let mut out = VerificationReport {
        ok: false,
        violations: Vec::new(),
        checked: 0,
    };
    match (cert.kind, &cert.payload) {
        (CertificateKind::Witness, _) => check_witness(cert, &mut out)?,
        (CertificateKind::Refutation, Payload::Refutation { r, avoiding, .. }) => {
            if avoiding.r() != *r {
                return Err(malformed("palette size differs from the coloring's"));
            }
            let report = avoiding.validate();
            if !report.valid {
                out.violations.extend(report.violations);
            }
            rescan_avoiding(&cert.matrix, avoiding, &mut out)?;
        }
        (CertificateKind::Bound, Payload::Bound { r, n, below, .. }) => {
            match (n, below) {
                (1, None) => {}
                (_, Some(c)) if integer_domain_upto(c, n - 1) && c.r() == *r => {
                    rescan_avoiding(&cert.matrix, c, &mut out)?;
                }
                _ => return Err(malformed(format!("bound {n} needs an avoiding {r}-coloring of 1..={}", n - 1))),
            }
            every_coloring_hit(&cert.matrix, *r, *n, &mut out)?;
        }
        (kind, _) => return Err(malformed(format!("payload does not match kind {kind:?}"))),
    }
    out.ok = out.violations.is_empty();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coloring::Domain;
    use crate::matrix::build_family;
    use crate::search::{compactness_bound, BoundOutcome, find_avoiding_coloring, find_witness, SearchBounds, SearchOptions};

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn schur_witness() -> Certificate {
        let schur = build_family("schur", 2, &[]).unwrap();
        let c = Coloring::table_from_fn(Domain::integers(1, 5).unwrap(), 2, |x| {
            usize::from(!matches!(x.to_i64().unwrap(), 1 | 4 | 5))
        });
        find_witness(&schur, &c, &SearchBounds::integer_box(5, 2), &SearchOptions::default())
            .unwrap()
            .found()
            .unwrap()
    }

    #[test]
    fn witness_round_trip_and_tamper() {
        let cert = schur_witness();
        assert!(verify_certificate(&cert).unwrap().ok);
        let back = Certificate::from_json(&cert.to_json()).unwrap();
        assert_eq!(back, cert);

        // recolor image entry 2 (value 5) in the stored coloring
        let mut bad = cert.clone();
        bad.coloring = Some(Coloring::table_from_fn(Domain::integers(1, 5).unwrap(), 2, |x| {
            usize::from(!matches!(x.to_i64().unwrap(), 1 | 4))
        }));
        let rep = verify_certificate(&bad).unwrap();
        assert!(!rep.ok);
        assert!(rep.violations.iter().any(|v| v.starts_with("image entry 2")), "{rep:?}");

        let mut bad = cert;
        if let Payload::Witness { image, .. } = &mut bad.payload {
            image[1] = q("3");
        }
        let rep = verify_certificate(&bad).unwrap();
        assert!(rep.violations.iter().any(|v| v.starts_with("image entry 1")));
    }

    #[test]
    fn refutation_rescans_sixteen_vectors() {
        let schur = build_family("schur", 2, &[]).unwrap();
        let cert = find_avoiding_coloring(&schur, 2, &Domain::integers(1, 4).unwrap(), &SearchOptions::default())
            .unwrap()
            .found()
            .unwrap();
        let rep = verify_certificate(&cert).unwrap();
        assert!(rep.ok);
        assert_eq!(rep.checked, 16);

        let mut bad = cert;
        if let Payload::Refutation { avoiding, .. } = &mut bad.payload {
            *avoiding = Coloring::table_from_colors(Domain::integers(1, 4).unwrap(), 2, &[0, 0, 1, 1]);
        }
        assert!(!verify_certificate(&bad).unwrap().ok);
    }

    #[test]
    fn bound_certificates() {
        let schur = build_family("schur", 2, &[]).unwrap();
        let BoundOutcome::Resolved(cert) = compactness_bound(&schur, 2, 10, &SearchOptions::default()).unwrap() else {
            panic!()
        };
        let rep = verify_certificate(&cert).unwrap();
        assert!(rep.ok, "{rep:?}");

        let mut low = cert.clone();
        if let Payload::Bound { n, below, .. } = &mut low.payload {
            *n = 4;
            *below = Some(Coloring::table_from_colors(Domain::integers(1, 3).unwrap(), 2, &[0, 1, 1]));
        }
        assert!(!verify_certificate(&low).unwrap().ok);

        let mut kind = cert;
        kind.kind = CertificateKind::Refutation;
        assert!(matches!(verify_certificate(&kind), Err(SearchError::MalformedCertificate(_))));
    }

    #[test]
    fn base4_membership() {
        let t = FsTarget {
            generators: GeneratorRule::Base4 { first: 1, count: 4 },
            tail: 1,
        };
        // generators 1/4, 1/16, 1/64, 1/256; tail drops 1/4
        assert!(fs_member(&t, &q("1/16")));
        assert!(fs_member(&t, &q("21/256")));
        assert!(!fs_member(&t, &q("1/4")));
        assert!(!fs_member(&t, &q("1/8")));
        assert!(!fs_member(&t, &q("2/16")));
        assert!(!fs_member(&t, &q("1/1024")));
        let e = FsTarget {
            generators: GeneratorRule::Explicit {
                generators: vec![q("1/3"), q("1/5"), q("1/7")],
            },
            tail: 0,
        };
        assert!(fs_member(&e, &q("12/35")));
        assert!(!fs_member(&e, &q("2/3")));
    }
}
