//! Reduced positive rationals and their prime ladders.
//!
//! The ladder of `a/b` lists every prime of `a` and `b` with multiplicity in
//! non-increasing order, each tagged with the side it divides. Truncating the
//! ladder after `n` primes yields the partial `alpha_n`; the partials are the
//! targets that level-`n` factorizations must multiply to.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::primes::factor_integer;

/// A positive rational in lowest terms. Both sides are at least 1.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ReducedRational {
    num: BigUint,
    den: BigUint,
}

impl ReducedRational {
    /// Builds `num/den` in lowest terms. Zero on either side is rejected.
    pub fn new(num: BigUint, den: BigUint) -> Result<Self> {
        if num.is_zero() || den.is_zero() {
            return Err(Error::InvalidInput(
                "rational must be positive; zero numerator or denominator".into(),
            ));
        }
        let g = num.gcd(&den);
        Ok(ReducedRational {
            num: num / &g,
            den: den / &g,
        })
    }

    pub fn one() -> Self {
        ReducedRational {
            num: BigUint::one(),
            den: BigUint::one(),
        }
    }

    /// Parses `<digits>` or `<digits>/<digits>`; no signs, no whitespace.
    pub fn parse(text: &str) -> Result<Self> {
        if text.starts_with('-') || text.starts_with('+') {
            return Err(Error::InvalidInput(format!(
                "rational must be positive: {text:?}"
            )));
        }
        let (num_text, den_text) = match text.split_once('/') {
            Some((a, b)) => (a, b),
            None => (text, "1"),
        };
        let num = parse_digits(num_text, text)?;
        let den = parse_digits(den_text, text)?;
        ReducedRational::new(num, den)
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

    /// `max{a, b}`: the exact integer whose logarithm is the Mahler measure.
    pub fn measure_proxy(&self) -> &BigUint {
        if self.num >= self.den {
            &self.num
        } else {
            &self.den
        }
    }

    /// Natural logarithm of `max{a, b}`; 0 exactly when the rational is 1.
    pub fn mahler_measure(&self) -> f64 {
        big_ln(self.measure_proxy())
    }

    /// Factors both sides and assembles the prime ladder.
    pub fn prime_ladder(&self) -> Result<PrimeLadder> {
        PrimeLadder::of(self)
    }
}

impl fmt::Display for ReducedRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl FromStr for ReducedRational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ReducedRational::parse(s)
    }
}

fn parse_digits(text: &str, whole: &str) -> Result<BigUint> {
    if text.is_empty() || !text.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::Parse(format!(
            "expected <digits> or <digits>/<digits>, got {whole:?}"
        )));
    }
    Ok(BigUint::parse_bytes(text.as_bytes(), 10).expect("digits checked"))
}

/// Natural log of a positive big integer, via `f64` with graceful overflow.
pub(crate) fn big_ln(n: &BigUint) -> f64 {
    match n.to_f64() {
        Some(x) if x.is_finite() => x.ln(),
        _ => {
            // Fall back to bits * ln 2 adjusted by the top 64 bits.
            let bits = n.bits();
            let shift = bits.saturating_sub(64);
            let head = (n >> shift).to_f64().unwrap_or(f64::MAX);
            head.ln() + shift as f64 * std::f64::consts::LN_2
        }
    }
}

/// Which side of the rational a ladder prime divides.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PrimeSign {
    Numerator,
    Denominator,
}

impl fmt::Display for PrimeSign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PrimeSign::Numerator => write!(f, "num"),
            PrimeSign::Denominator => write!(f, "den"),
        }
    }
}

/// One rung of the ladder: a prime together with the side it divides.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LadderEntry {
    pub prime: BigUint,
    pub sign: PrimeSign,
}

/// The non-increasing list of prime occurrences of a rational, with partials.
///
/// Entries are stored zero-indexed; the accessors `prime`, `sign`, and
/// `partial` use the one-based position `n` so that `partial(n)` is the
/// product of the first `n` primes (`partial(0)` is 1).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeLadder {
    alpha: ReducedRational,
    entries: Vec<LadderEntry>,
    partials: Vec<ReducedRational>,
}

impl PrimeLadder {
    pub fn of(alpha: &ReducedRational) -> Result<Self> {
        let mut entries: Vec<LadderEntry> = Vec::new();
        for p in factor_integer(alpha.numerator())? {
            entries.push(LadderEntry {
                prime: p,
                sign: PrimeSign::Numerator,
            });
        }
        for p in factor_integer(alpha.denominator())? {
            entries.push(LadderEntry {
                prime: p,
                sign: PrimeSign::Denominator,
            });
        }
        entries.sort_by(|a, b| b.prime.cmp(&a.prime));

        let mut partials = Vec::with_capacity(entries.len() + 1);
        let mut num = BigUint::one();
        let mut den = BigUint::one();
        partials.push(ReducedRational::one());
        for e in &entries {
            match e.sign {
                PrimeSign::Numerator => num *= &e.prime,
                PrimeSign::Denominator => den *= &e.prime,
            }
            // The sides stay coprime, so no reduction is ever needed.
            partials.push(ReducedRational {
                num: num.clone(),
                den: den.clone(),
            });
        }
        Ok(PrimeLadder {
            alpha: alpha.clone(),
            entries,
            partials,
        })
    }

    pub fn alpha(&self) -> &ReducedRational {
        &self.alpha
    }

    /// Number of prime occurrences, counted with multiplicity.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[LadderEntry] {
        &self.entries
    }

    /// The `n`-th prime, one-based: `prime(1)` is the largest.
    pub fn prime(&self, n: usize) -> &BigUint {
        &self.entries[n - 1].prime
    }

    pub fn sign(&self, n: usize) -> PrimeSign {
        self.entries[n - 1].sign
    }

    /// The partial product `alpha_n` of the first `n` primes; `partial(0) = 1`.
    pub fn partial(&self, n: usize) -> &ReducedRational {
        &self.partials[n]
    }

    /// True when no prime occurs twice.
    pub fn is_square_free(&self) -> bool {
        self.entries.windows(2).all(|w| w[0].prime != w[1].prime)
    }

    /// Levels `n` at which every prime placed so far strictly exceeds every
    /// prime still to come. Levels 0 and N always qualify.
    pub fn separation_indices(&self) -> Vec<usize> {
        let n_total = self.len();
        let mut out = vec![0];
        for n in 1..n_total {
            if self.prime(n) > self.prime(n + 1) {
                out.push(n);
            }
        }
        if n_total > 0 {
            out.push(n_total);
        }
        out
    }
}
