//! Finite colorings of explicit number grids.
//!
//! Every coloring carries a finite [`Domain`] generated by a declared
//! [`DomainRule`]. Table colorings store their assignment; interval,
//! dyadic-φ and product colorings compute colors on demand, so they can also
//! color points outside the declared grid (e.g. multiples `t * x`).

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numeric::{Dyadic, NumericError, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ColoringError {
    #[error("{0} is not in the coloring domain")]
    NotInDomain(String),
    #[error("{0} is outside the dyadic interval (0, 2)")]
    OutOfRange(String),
    #[error("domain not closed under multiples: {}", format_pairs(.0))]
    DomainNotClosed(Vec<(String, usize)>),
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("invalid coloring: {0}")]
    Invalid(String),
    #[error(transparent)]
    Numeric(#[from] NumericError),
}

fn format_pairs(pairs: &[(String, usize)]) -> String {
    let shown: Vec<String> = pairs.iter().take(8).map(|(x, t)| format!("({x}, t={t})")).collect();
    let more = if pairs.len() > 8 {
        format!(" and {} more", pairs.len() - 8)
    } else {
        String::new()
    };
    format!("{}{more}", shown.join(", "))
}

/// Generation rule of a finite grid of positive rationals.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainRule {
    /// `lo..=hi`, both positive.
    Integers { lo: i64, hi: i64 },
    /// Dyadics whose support is a nonempty subset of `[low, high]`.
    DyadicWindow { low: i64, high: i64 },
    /// Reduced fractions `p/q` with `1 <= p <= max_num`, `1 <= q <= max_den`.
    Fractions { max_num: u64, max_den: u64 },
    Explicit { points: Vec<Rational> },
    /// Points of `base` strictly below `bound`.
    Below { base: Box<DomainRule>, bound: Rational },
}

impl DomainRule {
    fn generate(&self) -> Result<Vec<Rational>, ColoringError> {
        let mut pts = match self {
            DomainRule::Integers { lo, hi } => {
                if *lo < 1 || lo > hi {
                    return Err(ColoringError::InvalidDomain(format!("integers {lo}..={hi}")));
                }
                (*lo..=*hi).map(Rational::from_integer).collect()
            }
            DomainRule::DyadicWindow { low, high } => {
                if low > high || high - low >= 24 {
                    return Err(ColoringError::InvalidDomain(format!(
                        "dyadic window [{low}, {high}] (at most 24 exponents)"
                    )));
                }
                crate::numeric::window_grid(*low, *high)
            }
            DomainRule::Fractions { max_num, max_den } => {
                if *max_num == 0 || *max_den == 0 || max_num.saturating_mul(*max_den) > 1 << 22 {
                    return Err(ColoringError::InvalidDomain("fraction grid bounds".into()));
                }
                let mut v = Vec::new();
                for q in 1..=*max_den {
                    for p in 1..=*max_num {
                        if num_integer::gcd(p, q) == 1 {
                            v.push(Rational::new(p, q).expect("q > 0"));
                        }
                    }
                }
                v
            }
            DomainRule::Explicit { points } => {
                if let Some(p) = points.iter().find(|p| !p.is_positive()) {
                    return Err(ColoringError::InvalidDomain(format!("{p} is not positive")));
                }
                points.clone()
            }
            DomainRule::Below { base, bound } => {
                base.generate()?.into_iter().filter(|p| p < bound).collect()
            }
        };
        pts.sort();
        pts.dedup();
        Ok(pts)
    }
}

/// Finite sorted grid of positive rationals with an index for lookup.
#[derive(Clone)]
pub struct Domain {
    rule: DomainRule,
    points: Vec<Rational>,
    index: HashMap<Rational, usize>,
}

impl fmt::Debug for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Domain")
            .field("rule", &self.rule)
            .field("len", &self.points.len())
            .finish()
    }
}

impl PartialEq for Domain {
    fn eq(&self, other: &Self) -> bool {
        self.rule == other.rule && self.points == other.points
    }
}

impl Eq for Domain {}

impl Domain {
    pub fn from_rule(rule: DomainRule) -> Result<Self, ColoringError> {
        let points = rule.generate()?;
        let index = points.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        Ok(Domain { rule, points, index })
    }

    pub fn integers(lo: i64, hi: i64) -> Result<Self, ColoringError> {
        Self::from_rule(DomainRule::Integers { lo, hi })
    }

    pub fn dyadic_window(low: i64, high: i64) -> Result<Self, ColoringError> {
        Self::from_rule(DomainRule::DyadicWindow { low, high })
    }

    pub fn explicit(points: Vec<Rational>) -> Result<Self, ColoringError> {
        Self::from_rule(DomainRule::Explicit { points })
    }

    pub fn rule(&self) -> &DomainRule {
        &self.rule
    }

    /// Points in ascending order.
    pub fn points(&self) -> &[Rational] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn index_of(&self, x: &Rational) -> Option<usize> {
        self.index.get(x).copied()
    }

    pub fn contains(&self, x: &Rational) -> bool {
        self.index.contains_key(x)
    }

    /// Sub-grid of points strictly below `bound`.
    pub fn below(&self, bound: &Rational) -> Self {
        Self::from_rule(DomainRule::Below {
            base: Box::new(self.rule.clone()),
            bound: bound.clone(),
        })
        .expect("restriction of a valid rule is valid")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColoringKind {
    /// Explicit assignment; pairs may be missing or repeated in hand-written
    /// input, which [`Coloring::validate`] reports.
    Table { assignment: Vec<(Rational, usize)> },
    /// Color of `x` is the number of cuts `<= x`.
    Interval { cuts: Vec<Rational> },
    /// Color of a dyadic `x` in `(0, 2)` is `φ(x) mod r`.
    DyadicPhi,
    /// Color of `x` is the index of the signature `(base(1x), ..., base(kx))`
    /// among the signatures realized on the domain.
    Product {
        base: Box<Coloring>,
        k: usize,
        signatures: Vec<Vec<usize>>,
    },
}

impl ColoringKind {
    pub fn name(&self) -> &'static str {
        match self {
            ColoringKind::Table { .. } => "table",
            ColoringKind::Interval { .. } => "interval",
            ColoringKind::DyadicPhi => "dyadic-phi",
            ColoringKind::Product { .. } => "product",
        }
    }
}

/// A coloring of a finite grid with colors `0..r`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ColoringJson", into = "ColoringJson")]
pub struct Coloring {
    domain: Domain,
    r: usize,
    kind: ColoringKind,
    lookup: Option<HashMap<Rational, usize>>,
}

/// Outcome of [`Coloring::validate`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub r: usize,
    pub domain_size: usize,
    pub class_sizes: Vec<usize>,
    pub realized_classes: usize,
    pub violations: Vec<String>,
}

impl Coloring {
    fn build(domain: Domain, r: usize, kind: ColoringKind) -> Self {
        let lookup = match &kind {
            ColoringKind::Table { assignment } => {
                let mut map = HashMap::with_capacity(assignment.len());
                for (x, c) in assignment {
                    map.entry(x.clone()).or_insert(*c);
                }
                Some(map)
            }
            _ => None,
        };
        Coloring { domain, r, kind, lookup }
    }

    /// Table coloring; the assignment is checked only by [`Coloring::validate`].
    pub fn table(domain: Domain, r: usize, assignment: Vec<(Rational, usize)>) -> Self {
        Self::build(domain, r, ColoringKind::Table { assignment })
    }

    /// Table coloring from a rule evaluated on every domain point.
    pub fn table_from_fn(domain: Domain, r: usize, f: impl Fn(&Rational) -> usize) -> Self {
        let assignment = domain.points().iter().map(|x| (x.clone(), f(x))).collect();
        Self::table(domain, r, assignment)
    }

    /// Table coloring of `domain` with colors listed in domain order.
    pub fn table_from_colors(domain: Domain, r: usize, colors: &[usize]) -> Self {
        let assignment = domain.points().iter().cloned().zip(colors.iter().copied()).collect();
        Self::table(domain, r, assignment)
    }

    pub fn interval(domain: Domain, mut cuts: Vec<Rational>) -> Self {
        cuts.sort();
        cuts.dedup();
        let r = cuts.len() + 1;
        Self::build(domain, r, ColoringKind::Interval { cuts })
    }

    /// `φ(x) mod r` on a grid inside `(0, 2)`.
    pub fn dyadic_phi(domain: Domain, r: usize) -> Self {
        Self::build(domain, r, ColoringKind::DyadicPhi)
    }

    /// The three-class even-zero-block coloring of the dyadics with support
    /// in `[low, high]`, `high <= 0`.
    pub fn dyadic_three(low: i64, high: i64) -> Result<Self, ColoringError> {
        if high > 0 {
            return Err(ColoringError::InvalidDomain(format!(
                "window top {high} leaves (0, 2)"
            )));
        }
        Ok(Self::dyadic_phi(Domain::dyadic_window(low, high)?, 3))
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn kind(&self) -> &ColoringKind {
        &self.kind
    }

    /// Whether colors of points outside the domain can be computed.
    pub fn is_computable(&self) -> bool {
        !matches!(self.kind, ColoringKind::Table { .. })
    }

    /// Color of `x`. Table colorings only know their listed points; the other
    /// kinds compute colors wherever their rule is defined.
    pub fn color_of(&self, x: &Rational) -> Result<usize, ColoringError> {
        match &self.kind {
            ColoringKind::Table { .. } => self
                .lookup
                .as_ref()
                .and_then(|m| m.get(x).copied())
                .ok_or_else(|| ColoringError::NotInDomain(x.to_string())),
            ColoringKind::Interval { cuts } => {
                if !x.is_positive() {
                    return Err(ColoringError::NotInDomain(x.to_string()));
                }
                Ok(cuts.partition_point(|c| c <= x))
            }
            ColoringKind::DyadicPhi => {
                let d = Dyadic::from_rational(x)?;
                if !d.in_unit_pair_interval() {
                    return Err(ColoringError::OutOfRange(x.to_string()));
                }
                Ok((d.phi()? % self.r as u64) as usize)
            }
            ColoringKind::Product { base, k, signatures } => {
                let sig = signature(base, *k, x)?;
                signatures
                    .iter()
                    .position(|s| *s == sig)
                    .ok_or_else(|| ColoringError::NotInDomain(x.to_string()))
            }
        }
    }

    /// Color of `x` if `x` belongs to the declared domain.
    pub fn color_in_domain(&self, x: &Rational) -> Option<usize> {
        if self.domain.contains(x) {
            self.color_of(x).ok()
        } else {
            None
        }
    }

    /// Colors of all domain points, in domain order.
    pub fn colors(&self) -> Result<Vec<usize>, ColoringError> {
        self.domain.points().iter().map(|x| self.color_of(x)).collect()
    }

    /// Same rule restricted to the domain points below `bound`.
    pub fn restrict_below(&self, bound: &Rational) -> Self {
        let domain = self.domain.below(bound);
        let kind = match &self.kind {
            ColoringKind::Table { assignment } => ColoringKind::Table {
                assignment: assignment.iter().filter(|(x, _)| x < bound).cloned().collect(),
            },
            other => other.clone(),
        };
        Self::build(domain, self.r, kind)
    }

    /// Totality, palette bound and partition property; never fails.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        let mut class_sizes = vec![0usize; self.r];
        if self.r == 0 {
            violations.push("palette is empty".to_string());
        }
        if let ColoringKind::Table { assignment } = &self.kind {
            let mut seen: HashMap<&Rational, usize> = HashMap::new();
            for (x, c) in assignment {
                if !self.domain.contains(x) {
                    violations.push(format!("assigned point {x} is not in the domain"));
                }
                if let Some(prev) = seen.insert(x, *c) {
                    if prev != *c {
                        violations.push(format!("point {x} has colors {prev} and {c}"));
                    } else {
                        violations.push(format!("point {x} listed twice"));
                    }
                }
            }
        }
        if let ColoringKind::DyadicPhi = self.kind {
            if let Some(x) = self.domain.points().iter().find(|x| {
                !Dyadic::from_rational(x).map(|d| d.in_unit_pair_interval()).unwrap_or(false)
            }) {
                violations.push(format!("domain point {x} is not a dyadic in (0, 2)"));
            }
        }
        let mut missing = 0usize;
        for x in self.domain.points() {
            match self.color_of(x) {
                Ok(c) if c < self.r => class_sizes[c] += 1,
                Ok(c) => violations.push(format!("point {x} has color {c} >= r = {}", self.r)),
                Err(_) => {
                    missing += 1;
                    if missing <= 5 {
                        violations.push(format!("not total: point {x} has no color"));
                    }
                }
            }
        }
        if missing > 5 {
            violations.push(format!("not total: {} more points have no color", missing - 5));
        }
        let realized_classes = class_sizes.iter().filter(|&&n| n > 0).count();
        ValidationReport {
            valid: violations.is_empty(),
            r: self.r,
            domain_size: self.domain.len(),
            class_sizes,
            realized_classes,
            violations,
        }
    }
}

fn signature(base: &Coloring, k: usize, x: &Rational) -> Result<Vec<usize>, ColoringError> {
    (1..=k).map(|t| base.color_of(&x.scale(t as i64))).collect()
}

/// Colors `x` by the tuple `(base(1x), ..., base(kx))`; two points share a
/// color exactly when `base(t x)` agrees for every `t <= k`.
///
/// The base must be able to color every needed multiple: table bases need
/// `t x` in their assignment, computable bases need `t x` within their rule.
pub fn product_coloring(base: &Coloring, k: usize) -> Result<Coloring, ColoringError> {
    product_coloring_on(base, k, base.domain.clone())
}

/// [`product_coloring`] over an explicit domain, typically a sub-grid of the
/// base domain whose multiples the base can still color.
pub fn product_coloring_on(base: &Coloring, k: usize, domain: Domain) -> Result<Coloring, ColoringError> {
    if k == 0 {
        return Err(ColoringError::Invalid("k must be positive".into()));
    }
    let mut offending = Vec::new();
    let mut index: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    let mut signatures = Vec::new();
    for x in domain.points() {
        let mut sig = Vec::with_capacity(k);
        for t in 1..=k {
            match base.color_of(&x.scale(t as i64)) {
                Ok(c) => sig.push(c),
                Err(_) => offending.push((x.to_string(), t)),
            }
        }
        if sig.len() == k && !index.contains_key(&sig) {
            index.insert(sig.clone(), signatures.len());
            signatures.push(sig);
        }
    }
    if !offending.is_empty() {
        return Err(ColoringError::DomainNotClosed(offending));
    }
    let r = signatures.len().max(1);
    Ok(Coloring::build(
        domain,
        r,
        ColoringKind::Product {
            base: Box::new(base.clone()),
            k,
            signatures,
        },
    ))
}

/// `φ(x) mod 3` for `x` in `D ∩ (0, 2)`.
pub fn dyadic_three_color(x: &Dyadic) -> Result<usize, ColoringError> {
    if !x.in_unit_pair_interval() {
        return Err(ColoringError::OutOfRange(format!("{:?}", x.support())));
    }
    Ok((x.phi()? % 3) as usize)
}

/// On-disk coloring form: `{kind, domain_rule, r, assignment?, ...}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct ColoringJson {
    kind: String,
    domain_rule: DomainRule,
    r: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    assignment: Option<Vec<(Rational, usize)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cuts: Option<Vec<Rational>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    base: Option<Box<Coloring>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    signatures: Option<Vec<Vec<usize>>>,
}

impl TryFrom<ColoringJson> for Coloring {
    type Error = ColoringError;
    fn try_from(j: ColoringJson) -> Result<Self, Self::Error> {
        let domain = Domain::from_rule(j.domain_rule)?;
        let missing = |what: &str| ColoringError::Invalid(format!("{} coloring needs {what}", j.kind));
        let kind = match j.kind.as_str() {
            "table" => ColoringKind::Table {
                assignment: j.assignment.ok_or_else(|| missing("assignment"))?,
            },
            "interval" => {
                let cuts = j.cuts.ok_or_else(|| missing("cuts"))?;
                if cuts.len() + 1 != j.r {
                    return Err(ColoringError::Invalid(format!(
                        "{} cuts give {} classes, r = {}",
                        cuts.len(),
                        cuts.len() + 1,
                        j.r
                    )));
                }
                ColoringKind::Interval { cuts }
            }
            "dyadic-phi" => ColoringKind::DyadicPhi,
            "product" => ColoringKind::Product {
                base: j.base.ok_or_else(|| missing("base"))?,
                k: j.k.ok_or_else(|| missing("k"))?,
                signatures: j.signatures.ok_or_else(|| missing("signatures"))?,
            },
            other => return Err(ColoringError::Invalid(format!("unknown kind {other:?}"))),
        };
        Ok(Coloring::build(domain, j.r, kind))
    }
}

impl From<Coloring> for ColoringJson {
    fn from(c: Coloring) -> Self {
        let mut j = ColoringJson {
            kind: c.kind.name().to_string(),
            domain_rule: c.domain.rule.clone(),
            r: c.r,
            assignment: None,
            cuts: None,
            k: None,
            base: None,
            signatures: None,
        };
        match c.kind {
            ColoringKind::Table { assignment } => j.assignment = Some(assignment),
            ColoringKind::Interval { cuts } => j.cuts = Some(cuts),
            ColoringKind::DyadicPhi => {}
            ColoringKind::Product { base, k, signatures } => {
                j.base = Some(base);
                j.k = Some(k);
                j.signatures = Some(signatures);
            }
        }
        j
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn three_color_examples() {
        let d = |s: &str| Dyadic::from_rational(&q(s)).unwrap();
        assert_eq!(dyadic_three_color(&d("1")).unwrap(), 0);
        assert_eq!(dyadic_three_color(&d("9/8")).unwrap(), 1);
        assert_eq!(dyadic_three_color(&d("73/64")).unwrap(), 2);
        assert!(matches!(dyadic_three_color(&d("2")), Err(ColoringError::OutOfRange(_))));
        assert!(dyadic_three_color(&Dyadic::zero()).is_err());
    }

    #[test]
    fn dyadic_phi_coloring_validates() {
        let c = Coloring::dyadic_three(-8, 0).unwrap();
        let rep = c.validate();
        assert!(rep.valid, "{:?}", rep.violations);
        assert_eq!(rep.realized_classes, 3);
        assert_eq!(rep.class_sizes.iter().sum::<usize>(), 511);
        assert!(Coloring::dyadic_three(-3, 1).is_err());
    }

    #[test]
    fn table_missing_point_is_not_total() {
        let dom = Domain::integers(1, 4).unwrap();
        let c = Coloring::table(dom, 2, vec![(q("1"), 0), (q("2"), 1), (q("3"), 1)]);
        let rep = c.validate();
        assert!(!rep.valid);
        assert!(rep.violations.iter().any(|v| v.contains("not total")), "{:?}", rep.violations);
    }

    #[test]
    fn table_conflicting_and_out_of_palette() {
        let dom = Domain::integers(1, 2).unwrap();
        let c = Coloring::table(dom, 2, vec![(q("1"), 0), (q("1"), 1), (q("2"), 5), (q("9"), 0)]);
        let rep = c.validate();
        assert!(!rep.valid);
        assert_eq!(rep.violations.len(), 3, "{:?}", rep.violations);
    }

    #[test]
    fn interval_coloring() {
        let dom = Domain::from_rule(DomainRule::Fractions { max_num: 4, max_den: 4 }).unwrap();
        let c = Coloring::interval(dom, vec![q("1")]);
        let rep = c.validate();
        assert!(rep.valid);
        assert_eq!(rep.realized_classes, 2);
        assert_eq!(c.color_of(&q("1/2")).unwrap(), 0);
        assert_eq!(c.color_of(&q("1")).unwrap(), 1);
    }

    fn parity(lo: i64, hi: i64) -> Coloring {
        Coloring::table_from_fn(Domain::integers(lo, hi).unwrap(), 2, |x| {
            (x.to_i64().unwrap() % 2) as usize
        })
    }

    #[test]
    fn product_of_parity() {
        // doubling leaves {1..20}: 11..20 have no color for t = 2
        match product_coloring(&parity(1, 20), 2) {
            Err(ColoringError::DomainNotClosed(pairs)) => {
                assert_eq!(pairs.len(), 10);
                assert_eq!(pairs[0], ("11".to_string(), 2));
            }
            other => panic!("{other:?}"),
        }
        let psi = product_coloring_on(&parity(1, 40), 2, Domain::integers(1, 20).unwrap()).unwrap();
        let rep = psi.validate();
        assert!(rep.valid, "{:?}", rep.violations);
        assert_eq!(rep.realized_classes, 2);
        assert_eq!(psi.r(), 2);
    }

    #[test]
    fn product_with_k1_is_base() {
        let c = Coloring::dyadic_three(-6, 0).unwrap();
        let psi = product_coloring(&c, 1).unwrap();
        for x in c.domain().points() {
            // signatures are numbered by first appearance; with k = 1 the
            // numbering is a relabelling of the base classes
            let sig = match psi.kind() {
                ColoringKind::Product { signatures, .. } => signatures[psi.color_of(x).unwrap()].clone(),
                _ => unreachable!(),
            };
            assert_eq!(sig, vec![c.color_of(x).unwrap()]);
        }
    }

    #[test]
    fn product_of_three_color_is_bounded() {
        let c = Coloring::dyadic_three(-8, -1).unwrap();
        let psi = product_coloring(&c, 2).unwrap();
        assert!(psi.r() <= 9);
        assert!(psi.validate().valid);
    }

    #[test]
    fn json_round_trip_all_kinds() {
        let dom = Domain::integers(1, 3).unwrap();
        let t = Coloring::table_from_colors(dom.clone(), 2, &[0, 1, 0]);
        let s = serde_json::to_string(&t).unwrap();
        assert_eq!(
            s,
            r#"{"kind":"table","domain_rule":{"integers":{"lo":1,"hi":3}},"r":2,"assignment":[["1",0],["2",1],["3",0]]}"#
        );
        assert_eq!(serde_json::from_str::<Coloring>(&s).unwrap(), t);

        let d = Coloring::dyadic_three(-4, 0).unwrap();
        let s = serde_json::to_string(&d).unwrap();
        assert!(!s.contains("assignment"));
        assert_eq!(serde_json::from_str::<Coloring>(&s).unwrap(), d);

        let p = product_coloring(&Coloring::dyadic_three(-5, -2).unwrap(), 2).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(serde_json::from_str::<Coloring>(&s).unwrap(), p);
    }
}
