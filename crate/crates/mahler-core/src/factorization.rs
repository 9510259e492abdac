//! Factorizations of ladder partials: the axioms, the child maps delta,
//! epsilon, and Delta, measure vectors, and the lexicographic order on them.
//!
//! A factorization at level `n` is an ordered tuple of positive fractions
//! multiplying to `alpha_n`, with non-increasing entry maxima and no prime
//! shared between any numerator and any denominator. Trailing `1/1` entries
//! are never stored; the empty tuple is the unique level-0 factorization.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;

use crate::error::{Error, Result};
use crate::primes;
use crate::rational::{big_ln, PrimeLadder, PrimeSign};

/// One entry `num/den`. Not reduced on construction: a shared factor between
/// the sides is a validation finding, not a representation error.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fraction {
    num: BigUint,
    den: BigUint,
}

impl Fraction {
    pub fn new(num: BigUint, den: BigUint) -> Result<Self> {
        use num_traits::Zero;
        if num.is_zero() || den.is_zero() {
            return Err(Error::InvalidInput(
                "fraction sides must be positive".into(),
            ));
        }
        Ok(Fraction { num, den })
    }

    pub fn one() -> Self {
        Fraction {
            num: BigUint::one(),
            den: BigUint::one(),
        }
    }

    pub fn numerator(&self) -> &BigUint {
        &self.num
    }

    pub fn denominator(&self) -> &BigUint {
        &self.den
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    /// `max{num, den}`: the integer whose log is this entry's Mahler measure.
    pub fn max_side(&self) -> &BigUint {
        if self.num >= self.den {
            &self.num
        } else {
            &self.den
        }
    }

    /// Natural log of the max side, for t-norm evaluation.
    pub fn ln_max(&self) -> f64 {
        big_ln(self.max_side())
    }

    fn parse(text: &str) -> Result<Self> {
        let (num_text, den_text) = match text.split_once('/') {
            Some((a, b)) => (a, b),
            None => (text, "1"),
        };
        let num = parse_big(num_text, text)?;
        let den = parse_big(den_text, text)?;
        Fraction::new(num, den)
    }
}

fn parse_big(digits: &str, whole: &str) -> Result<BigUint> {
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::Parse(format!("bad fraction {whole:?}")));
    }
    Ok(BigUint::parse_bytes(digits.as_bytes(), 10).expect("digits checked"))
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// An ordered tuple of entries claimed to multiply to `alpha_level`.
///
/// The claim is checked by [`Factorization::validate`], never by the
/// constructor, so that invalid inputs can be represented and reported.
/// Ordering and equality are raw entrywise comparisons; values produced by
/// this crate's child maps, builders, and oracles are always canonical, so
/// raw equality on them coincides with equality up to tied-entry reordering.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Factorization {
    level: usize,
    entries: Vec<Fraction>,
}

impl Factorization {
    /// Wraps the entries, trimming trailing `1/1`.
    pub fn new(level: usize, mut entries: Vec<Fraction>) -> Self {
        while entries.last().is_some_and(Fraction::is_one) {
            entries.pop();
        }
        Factorization { level, entries }
    }

    /// The unique factorization of `alpha_0 = 1`.
    pub fn empty() -> Self {
        Factorization {
            level: 0,
            entries: Vec::new(),
        }
    }

    /// Parses `"5/7*3*2"` (separators `*` or `·`, `/1` optional), inferring
    /// the level from which ladder partial the product equals.
    pub fn parse(text: &str, ladder: &PrimeLadder) -> Result<Self> {
        let mut entries = Vec::new();
        for piece in text.split(['*', '·']) {
            entries.push(Fraction::parse(piece)?);
        }
        let fact = Factorization::new(0, entries);
        let (num, den) = fact.product();
        for n in 0..=ladder.len() {
            let target = ladder.partial(n);
            if &num * target.denominator() == &den * target.numerator() {
                return Ok(Factorization::new(n, fact.entries));
            }
        }
        Err(Error::InvalidInput(format!(
            "{text} does not multiply to any partial of {}",
            ladder.alpha()
        )))
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn entries(&self) -> &[Fraction] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Unreduced product over all entries.
    pub fn product(&self) -> (BigUint, BigUint) {
        let mut num = BigUint::one();
        let mut den = BigUint::one();
        for e in &self.entries {
            num *= &e.num;
            den *= &e.den;
        }
        (num, den)
    }

    /// Checks axioms (ii)-(iv) against the ladder. Axiom (i), positivity, is
    /// guaranteed by `Fraction::new`. Violations are data, not errors.
    pub fn validate(&self, ladder: &PrimeLadder) -> ValidationReport {
        let mut violations = Vec::new();
        if self.level > ladder.len() {
            violations.push(AxiomViolation::LevelOutOfRange {
                level: self.level,
                ladder_len: ladder.len(),
            });
        } else {
            let (num, den) = self.product();
            let target = ladder.partial(self.level);
            if &num * target.denominator() != &den * target.numerator() {
                violations.push(AxiomViolation::WrongLevelProduct { level: self.level });
            }
        }
        for i in 0..self.entries.len().saturating_sub(1) {
            if self.entries[i].max_side() < self.entries[i + 1].max_side() {
                violations.push(AxiomViolation::MaximaIncrease { index: i });
            }
        }
        for m in 0..self.entries.len() {
            for n in 0..self.entries.len() {
                if !self.entries[m].num.gcd(&self.entries[n].den).is_one() {
                    violations.push(AxiomViolation::SharedFactor {
                        numerator_index: m,
                        denominator_index: n,
                    });
                }
            }
        }
        ValidationReport { violations }
    }

    /// True when every entry's max side is prime or 1.
    pub fn is_primitive(&self) -> bool {
        self.entries
            .iter()
            .all(|e| e.max_side().is_one() || primes::is_prime(e.max_side()))
    }

    /// Normal form: each run of tied maxima is stably sorted by descending
    /// numerator. Axiom (iii) leaves tied entries unordered; this picks one.
    pub fn canonicalize(&self) -> Factorization {
        let mut entries = self.entries.clone();
        let mut i = 0;
        while i < entries.len() {
            let mut j = i + 1;
            while j < entries.len() && entries[j].max_side() == entries[i].max_side() {
                j += 1;
            }
            entries[i..j].sort_by(|a, b| b.num.cmp(&a.num));
            i = j;
        }
        Factorization::new(self.level, entries)
    }

    /// Entrywise maxima with trailing 1s trimmed.
    pub fn measure_vector(&self) -> MeasureVector {
        MeasureVector::new(self.entries.iter().map(|e| e.max_side().clone()).collect())
    }

    /// The children that multiply the next prime into an existing entry.
    /// Empty when no entry passes the strict dominance inequality.
    pub fn delta(&self, ladder: &PrimeLadder) -> Result<Vec<Factorization>> {
        let (p, sign) = self.next_prime(ladder)?;
        let mut out: Vec<Factorization> = Vec::new();
        for k in 0..self.entries.len() {
            let e = &self.entries[k];
            let admissible = match sign {
                PrimeSign::Numerator => &e.num * p < e.den,
                PrimeSign::Denominator => &e.den * p < e.num,
            };
            if !admissible {
                continue;
            }
            let mut entries = self.entries.clone();
            match sign {
                PrimeSign::Numerator => entries[k].num *= p,
                PrimeSign::Denominator => entries[k].den *= p,
            }
            let child = Factorization::new(self.level + 1, entries).canonicalize();
            if !out.contains(&child) {
                out.push(child);
            }
        }
        Ok(out)
    }

    /// The child that appends the next prime as a fresh entry. Always valid:
    /// the next prime is no larger than any max already placed.
    pub fn epsilon(&self, ladder: &PrimeLadder) -> Result<Factorization> {
        let (p, sign) = self.next_prime(ladder)?;
        let mut entries = self.entries.clone();
        entries.push(match sign {
            PrimeSign::Numerator => Fraction {
                num: p.clone(),
                den: BigUint::one(),
            },
            PrimeSign::Denominator => Fraction {
                num: BigUint::one(),
                den: p.clone(),
            },
        });
        Ok(Factorization::new(self.level + 1, entries).canonicalize())
    }

    /// Delta = delta united with epsilon, deduplicated; never empty.
    pub fn children(&self, ladder: &PrimeLadder) -> Result<Vec<Factorization>> {
        let mut out = self.delta(ladder)?;
        let eps = self.epsilon(ladder)?;
        if !out.contains(&eps) {
            out.push(eps);
        }
        Ok(out)
    }

    fn next_prime<'l>(&self, ladder: &'l PrimeLadder) -> Result<(&'l BigUint, PrimeSign)> {
        if self.level >= ladder.len() {
            return Err(Error::LevelExhausted {
                level: self.level,
                ladder_len: ladder.len(),
            });
        }
        Ok((ladder.prime(self.level + 1), ladder.sign(self.level + 1)))
    }
}

impl fmt::Display for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entries.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.entries.iter().map(Fraction::to_string).collect();
        write!(f, "{}", parts.join("·"))
    }
}

/// True iff `b` arises from `a` by placing the next ladder prime into one
/// entry (matching side) or appending it, with both tuples valid. Placing
/// a prime can change where the entry sorts, so entry multisets are
/// compared rather than tuples.
pub fn is_direct_subfactorization(
    a: &Factorization,
    b: &Factorization,
    ladder: &PrimeLadder,
) -> bool {
    if b.level != a.level + 1 || b.level > ladder.len() {
        return false;
    }
    if !a.validate(ladder).is_ok() || !b.validate(ladder).is_ok() {
        return false;
    }
    let p = ladder.prime(b.level);
    let sign = ladder.sign(b.level);
    let mut target = b.entries.clone();
    target.sort_unstable();
    for k in 0..=a.entries.len() {
        let mut entries = a.entries.clone();
        if k < entries.len() {
            match sign {
                PrimeSign::Numerator => entries[k].num *= p,
                PrimeSign::Denominator => entries[k].den *= p,
            }
        } else {
            entries.push(match sign {
                PrimeSign::Numerator => Fraction {
                    num: p.clone(),
                    den: BigUint::one(),
                },
                PrimeSign::Denominator => Fraction {
                    num: BigUint::one(),
                    den: p.clone(),
                },
            });
        }
        entries.sort_unstable();
        if entries == target {
            return true;
        }
    }
    false
}

/// Equal measure vectors. Valid factorizations have no unit entries, so
/// equal vectors force equal entry counts; the level may differ.
pub fn measure_equivalent(a: &Factorization, b: &Factorization) -> bool {
    a.measure_vector() == b.measure_vector()
}

/// Per-entry maxima of a factorization, trailing 1s trimmed.
///
/// The `Ord` instance is the padded lexicographic order: the shorter vector
/// is extended with 1s, then entries are compared left to right. On trimmed
/// vectors this is a total order and the search modules rely on it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MeasureVector(Vec<BigUint>);

impl MeasureVector {
    pub fn new(mut maxima: Vec<BigUint>) -> Self {
        while maxima.last().is_some_and(BigUint::is_one) {
            maxima.pop();
        }
        MeasureVector(maxima)
    }

    pub fn maxima(&self) -> &[BigUint] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_non_increasing(&self) -> bool {
        self.0.windows(2).all(|w| w[0] >= w[1])
    }
}

impl Ord for MeasureVector {
    fn cmp(&self, other: &Self) -> Ordering {
        let one = BigUint::one();
        let len = self.0.len().max(other.0.len());
        for i in 0..len {
            let x = self.0.get(i).unwrap_or(&one);
            let y = other.0.get(i).unwrap_or(&one);
            match x.cmp(y) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for MeasureVector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MeasureVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(BigUint::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Padded lexicographic comparison, rejecting vectors that are not
/// non-increasing (those cannot come from a valid factorization).
pub fn lex_compare(u: &MeasureVector, v: &MeasureVector) -> Result<Ordering> {
    for (name, vector) in [("left", u), ("right", v)] {
        if !vector.is_non_increasing() {
            return Err(Error::InvalidInput(format!(
                "{name} measure vector {vector} is not non-increasing"
            )));
        }
    }
    Ok(u.cmp(v))
}

/// Everything `validate` can find wrong with a factorization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AxiomViolation {
    LevelOutOfRange {
        level: usize,
        ladder_len: usize,
    },
    /// Axiom (ii): the entries do not multiply to `alpha_level`.
    WrongLevelProduct {
        level: usize,
    },
    /// Axiom (iii): entry `index` has a smaller max than its successor.
    MaximaIncrease {
        index: usize,
    },
    /// Axiom (iv): a numerator and a denominator share a prime.
    SharedFactor {
        numerator_index: usize,
        denominator_index: usize,
    },
}

impl fmt::Display for AxiomViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AxiomViolation::LevelOutOfRange { level, ladder_len } => {
                write!(f, "level {level} exceeds ladder length {ladder_len}")
            }
            AxiomViolation::WrongLevelProduct { level } => {
                write!(f, "product does not equal the level-{level} partial")
            }
            AxiomViolation::MaximaIncrease { index } => {
                write!(f, "entry {index} has a smaller max than entry {}", index + 1)
            }
            AxiomViolation::SharedFactor {
                numerator_index,
                denominator_index,
            } => write!(
                f,
                "numerator of entry {numerator_index} shares a factor with denominator of entry {denominator_index}"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<AxiomViolation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return write!(f, "ok");
        }
        let parts: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", parts.join("; "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ReducedRational;

    fn ladder(alpha: &str) -> PrimeLadder {
        ReducedRational::parse(alpha)
            .unwrap()
            .prime_ladder()
            .unwrap()
    }

    fn fact(text: &str, ladder: &PrimeLadder) -> Factorization {
        Factorization::parse(text, ladder).unwrap()
    }

    #[test]
    fn validate_accepts_figure_factorizations() {
        let l = ladder("30/7");
        assert!(fact("5/7*3*2", &l).validate(&l).is_ok());
        assert!(fact("10/7*3", &l).validate(&l).is_ok());
        assert_eq!(fact("10/7*3", &l).level(), 4);
    }

    #[test]
    fn validate_reports_maxima_violation() {
        let l = ladder("30/7");
        let f = Factorization::new(
            4,
            vec![
                Fraction::parse("3").unwrap(),
                Fraction::parse("5/7").unwrap(),
                Fraction::parse("2").unwrap(),
            ],
        );
        let report = f.validate(&l);
        assert_eq!(
            report.violations,
            vec![AxiomViolation::MaximaIncrease { index: 0 }]
        );
    }

    #[test]
    fn validate_reports_wrong_product_and_shared_factor() {
        let l = ladder("30/7");
        let wrong = Factorization::new(
            3,
            vec![
                Fraction::parse("2/7").unwrap(),
                Fraction::parse("5").unwrap(),
            ],
        );
        assert!(wrong
            .validate(&l)
            .violations
            .contains(&AxiomViolation::WrongLevelProduct { level: 3 }));

        let l15 = ladder("15/2");
        let shared = Factorization::new(
            3,
            vec![
                Fraction::parse("15/2").unwrap(),
                Fraction::parse("2/2").unwrap(),
            ],
        );
        let report = shared.validate(&l15);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, AxiomViolation::SharedFactor { .. })));
    }

    #[test]
    fn primitivity() {
        let l = ladder("851/858");
        assert!(fact("37/33*23/13*1/2", &l).is_primitive());
        let l307 = ladder("30/7");
        assert!(!fact("10/7*3", &l307).is_primitive());
        assert!(Factorization::empty().is_primitive());
    }

    #[test]
    fn canonicalize_sorts_tied_maxima_by_numerator() {
        let l = ladder("30/7");
        let sorted = fact("5/7*3*2", &l);
        assert_eq!(sorted.canonicalize(), sorted);

        let l4 = ladder("4/15");
        let tied = fact("1/5*1/3*2*2", &l4);
        assert_eq!(tied.canonicalize(), tied);

        // Hypothetical tie at max 3; the rule puts the larger numerator first.
        let swapped = Factorization::new(
            0,
            vec![
                Fraction::parse("1/3").unwrap(),
                Fraction::parse("3").unwrap(),
            ],
        );
        let canon = swapped.canonicalize();
        assert_eq!(canon.entries()[0], Fraction::parse("3").unwrap());
        assert_eq!(canon.entries()[1], Fraction::parse("1/3").unwrap());
        assert_eq!(canon.canonicalize(), canon);
    }

    #[test]
    fn direct_subfactorization_cases() {
        let l = ladder("30/7");
        let a = fact("5/7*3", &l);
        let b = fact("5/7*3*2", &l);
        assert!(is_direct_subfactorization(&a, &b, &l));

        let a2 = fact("3/7*5", &l);
        assert!(!is_direct_subfactorization(&a2, &b, &l));

        // (2/7, 5/1) multiplies to 10/7, which is no partial of 30/7.
        let bad = Factorization::new(
            3,
            vec![
                Fraction::parse("2/7").unwrap(),
                Fraction::parse("5").unwrap(),
            ],
        );
        let b2 = Factorization::new(
            4,
            vec![
                Fraction::parse("2/7").unwrap(),
                Fraction::parse("5").unwrap(),
                Fraction::parse("3").unwrap(),
            ],
        );
        assert!(!is_direct_subfactorization(&bad, &b2, &l));
    }

    #[test]
    fn direct_subfactorization_ignores_the_dominance_inequality() {
        // 5/7*3 -> 10/7*3 multiplies 2 into the first numerator even though
        // 5·2 ≥ 7; the relation holds regardless.
        let l = ladder("30/7");
        let a = fact("5/7*3", &l);
        let b = fact("10/7*3", &l);
        assert!(is_direct_subfactorization(&a, &b, &l));
    }

    #[test]
    fn delta_follows_the_strict_inequality() {
        let l = ladder("30/7");
        let d = fact("1/7*5", &l).delta(&l).unwrap();
        assert_eq!(d, vec![fact("3/7*5", &l)]);

        assert!(fact("5/7", &l).delta(&l).unwrap().is_empty());

        let l851 = ladder("851/858");
        let d2 = fact("37*23", &l851).delta(&l851).unwrap();
        assert_eq!(d2, vec![fact("37/13*23", &l851), fact("37*23/13", &l851)]);
    }

    #[test]
    fn delta_deduplicates_under_canonicalize() {
        // alpha = 6/25: ladder [(5,den),(5,den),(3,num),(2,num)].
        // Both entries of (1/5, 1/5) accept the 3; the two children agree
        // after tie sorting.
        let l = ladder("6/25");
        let a = fact("1/5*1/5", &l);
        let d = a.delta(&l).unwrap();
        assert_eq!(d, vec![fact("3/5*1/5", &l)]);
    }

    #[test]
    fn epsilon_appends_the_next_prime() {
        let l = ladder("30/7");
        assert_eq!(fact("5/7*3", &l).epsilon(&l).unwrap(), fact("5/7*3*2", &l));
        assert_eq!(Factorization::empty().epsilon(&l).unwrap(), fact("1/7", &l));

        let lc = ladder("316889/549010");
        assert_eq!(
            fact("131/77*59/31*41/23", &lc).epsilon(&lc).unwrap(),
            fact("131/77*59/31*41/23*1/5", &lc)
        );
    }

    #[test]
    fn children_union() {
        let l = ladder("30/7");
        assert_eq!(
            fact("1/7*5", &l).children(&l).unwrap(),
            vec![fact("3/7*5", &l), fact("1/7*5*3", &l)]
        );
        assert_eq!(
            fact("5/7*3", &l).children(&l).unwrap(),
            vec![fact("5/7*3*2", &l)]
        );
        assert_eq!(
            Factorization::empty().children(&l).unwrap(),
            vec![fact("1/7", &l)]
        );
    }

    #[test]
    fn children_at_top_level_error() {
        let l = ladder("30/7");
        let top = fact("5/7*3*2", &l);
        assert!(matches!(
            top.children(&l),
            Err(Error::LevelExhausted { level: 4, .. })
        ));
    }

    #[test]
    fn measure_vectors() {
        let l = ladder("851/858");
        let mv = fact("37/33*23/13*1/2", &l).measure_vector();
        assert_eq!(mv.to_string(), "(37,23,2)");
        assert_eq!(Factorization::empty().measure_vector().to_string(), "()");
        let l307 = ladder("30/7");
        assert_eq!(
            fact("5/7*3*2", &l307).measure_vector().to_string(),
            "(7,3,2)"
        );
    }

    #[test]
    fn measure_equivalence() {
        let l = ladder("851/858");
        let a = fact("37/13*23/11*1/3", &l);
        let b = fact("37/13*23/22*1/3", &l);
        assert!(measure_equivalent(&a, &b));

        let c = fact("37/33*23/13", &l);
        assert!(!measure_equivalent(&c, &a));
        assert!(measure_equivalent(&a, &a));
    }

    #[test]
    fn lex_comparison() {
        let mv = |nums: &[u32]| MeasureVector::new(nums.iter().map(|&n| n.into()).collect());
        assert_eq!(
            lex_compare(&mv(&[37, 23, 2]), &mv(&[37, 23, 3])).unwrap(),
            Ordering::Less
        );
        assert_eq!(
            lex_compare(&mv(&[7, 3, 2]), &mv(&[7, 3, 2])).unwrap(),
            Ordering::Equal
        );
        assert_eq!(
            lex_compare(&mv(&[131, 59, 41]), &mv(&[131, 59, 41, 7])).unwrap(),
            Ordering::Less
        );
        assert!(lex_compare(&mv(&[3, 7]), &mv(&[7, 3])).is_err());
    }

    #[test]
    fn display_and_parse_round_trip() {
        let l = ladder("851/858");
        let f = fact("37/33*23/13*1/2", &l);
        assert_eq!(f.to_string(), "37/33·23/13·1/2");
        assert_eq!(Factorization::parse(&f.to_string(), &l).unwrap(), f);
        assert_eq!(Factorization::empty().to_string(), "1");
        assert_eq!(
            Factorization::parse("1", &l).unwrap(),
            Factorization::empty()
        );
    }
}
