//! Coefficient rings.
//!
//! A [`RingSpec`] names a commutative ring: `Z`, `Q`, `Z/m`, or a polynomial
//! ring over one of these (nested at most twice). Elements are stored as
//! payload-only [`Elem`] values and all arithmetic goes through the spec, so
//! a series can hold thousands of coefficients without repeating the ring
//! description in each of them. [`crate::RingValue`] pairs the two when a
//! self-describing value is needed.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Maximum nesting of polynomial constructors.
pub const MAX_POLY_DEPTH: usize = 2;

/// A commutative ring with exact arithmetic.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum RingSpec {
    Integers,
    Rationals,
    /// `Z/m` for `m >= 2`, composite moduli included.
    IntegersMod(BigInt),
    /// `base[var]`.
    Polynomial(Box<RingSpec>, String),
}

/// Canonical element payload. Which variant is valid depends on the ring:
/// `Int` for `Z` and `Z/m` (residues in `[0, m)`), `Rat` for `Q`, and `Poly`
/// (constant term first, no trailing zeros) for polynomial rings.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Elem {
    Int(BigInt),
    Rat(BigRational),
    Poly(Vec<Elem>),
}

impl RingSpec {
    pub fn integers_mod(m: impl Into<BigInt>) -> Result<Self> {
        let m = m.into();
        if m < BigInt::from(2) {
            return Err(Error::InvalidSpec(format!("modulus {m} must be at least 2")));
        }
        Ok(RingSpec::IntegersMod(m))
    }

    pub fn polynomial(base: RingSpec, var: &str) -> Result<Self> {
        if !is_identifier(var) {
            return Err(Error::InvalidSpec(format!("`{var}` is not a variable name")));
        }
        if base.depth() + 1 > MAX_POLY_DEPTH {
            return Err(Error::InvalidSpec(format!(
                "polynomial nesting deeper than {MAX_POLY_DEPTH}"
            )));
        }
        if base.variables().contains(&var) {
            return Err(Error::InvalidSpec(format!("variable `{var}` used twice")));
        }
        Ok(RingSpec::Polynomial(Box::new(base), var.to_string()))
    }

    /// Parses `Z`, `Q`, `Z/<m>` and `<base>[<var>]`.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        let (head, mut rest) = match text.find('[') {
            Some(i) => (&text[..i], &text[i..]),
            None => (text, ""),
        };
        let mut spec = match head.trim() {
            "Z" => RingSpec::Integers,
            "Q" => RingSpec::Rationals,
            h if h.starts_with("Z/") => {
                let m: BigInt = h[2..]
                    .trim()
                    .parse()
                    .map_err(|_| Error::InvalidSpec(format!("bad modulus in `{text}`")))?;
                RingSpec::integers_mod(m)?
            }
            _ => return Err(Error::InvalidSpec(format!("unknown ring `{text}`"))),
        };
        while !rest.is_empty() {
            let close = rest
                .find(']')
                .ok_or_else(|| Error::InvalidSpec(format!("unbalanced bracket in `{text}`")))?;
            spec = RingSpec::polynomial(spec, rest[1..close].trim())?;
            rest = rest[close + 1..].trim_start();
            if !rest.is_empty() && !rest.starts_with('[') {
                return Err(Error::InvalidSpec(format!("trailing input in `{text}`")));
            }
        }
        Ok(spec)
    }

    pub fn depth(&self) -> usize {
        match self {
            RingSpec::Polynomial(base, _) => 1 + base.depth(),
            _ => 0,
        }
    }

    /// Polynomial variables, outermost first.
    pub fn variables(&self) -> Vec<&str> {
        match self {
            RingSpec::Polynomial(base, v) => {
                let mut out = vec![v.as_str()];
                out.extend(base.variables());
                out
            }
            _ => Vec::new(),
        }
    }

    /// The ring at the bottom of the polynomial tower.
    pub fn scalar_ring(&self) -> &RingSpec {
        match self {
            RingSpec::Polynomial(base, _) => base.scalar_ring(),
            r => r,
        }
    }

    pub fn contains_rationals(&self) -> bool {
        matches!(self.scalar_ring(), RingSpec::Rationals)
    }

    /// True for `Z`, `Q` and polynomial rings over them.
    pub fn is_torsion_free(&self) -> bool {
        !matches!(self.scalar_ring(), RingSpec::IntegersMod(_))
    }

    pub fn zero(&self) -> Elem {
        match self {
            RingSpec::Integers | RingSpec::IntegersMod(_) => Elem::Int(BigInt::zero()),
            RingSpec::Rationals => Elem::Rat(BigRational::zero()),
            RingSpec::Polynomial(..) => Elem::Poly(Vec::new()),
        }
    }

    pub fn one(&self) -> Elem {
        self.from_int(1)
    }

    pub fn from_int(&self, n: i64) -> Elem {
        self.from_bigint(&BigInt::from(n))
    }

    pub fn from_bigint(&self, n: &BigInt) -> Elem {
        match self {
            RingSpec::Integers => Elem::Int(n.clone()),
            RingSpec::IntegersMod(m) => Elem::Int(n.mod_floor(m)),
            RingSpec::Rationals => Elem::Rat(BigRational::from_integer(n.clone())),
            RingSpec::Polynomial(base, _) => self.constant(base.from_bigint(n)),
        }
    }

    /// Embeds an element of the immediate base ring as a constant polynomial.
    /// For non-polynomial rings this is the identity.
    pub fn constant(&self, c: Elem) -> Elem {
        match self {
            RingSpec::Polynomial(base, _) => {
                if base.is_zero(&c) {
                    Elem::Poly(Vec::new())
                } else {
                    Elem::Poly(vec![c])
                }
            }
            _ => c,
        }
    }

    /// The generator of the outermost polynomial variable.
    pub fn generator(&self) -> Option<Elem> {
        match self {
            RingSpec::Polynomial(base, _) => Some(Elem::Poly(vec![base.zero(), base.one()])),
            _ => None,
        }
    }

    /// Element for a named variable anywhere in the tower.
    pub fn variable(&self, name: &str) -> Option<Elem> {
        match self {
            RingSpec::Polynomial(_, v) if v == name => self.generator(),
            RingSpec::Polynomial(base, _) => base.variable(name).map(|c| self.constant(c)),
            _ => None,
        }
    }

    pub fn is_zero(&self, a: &Elem) -> bool {
        match a {
            Elem::Int(x) => x.is_zero(),
            Elem::Rat(x) => x.is_zero(),
            Elem::Poly(c) => c.is_empty(),
        }
    }

    pub fn is_one(&self, a: &Elem) -> bool {
        *a == self.one()
    }

    pub fn add(&self, a: &Elem, b: &Elem) -> Elem {
        match (self, a, b) {
            (RingSpec::Integers, Elem::Int(x), Elem::Int(y)) => Elem::Int(x + y),
            (RingSpec::IntegersMod(m), Elem::Int(x), Elem::Int(y)) => {
                let s = x + y;
                Elem::Int(if &s >= m { s - m } else { s })
            }
            (RingSpec::Rationals, Elem::Rat(x), Elem::Rat(y)) => Elem::Rat(x + y),
            (RingSpec::Polynomial(base, _), Elem::Poly(x), Elem::Poly(y)) => {
                let (long, short) = if x.len() >= y.len() { (x, y) } else { (y, x) };
                let mut out = long.clone();
                for (o, s) in out.iter_mut().zip(short) {
                    *o = base.add(o, s);
                }
                Elem::Poly(trim(base, out))
            }
            _ => panic!("element does not belong to {self}"),
        }
    }

    pub fn neg(&self, a: &Elem) -> Elem {
        match (self, a) {
            (RingSpec::Integers, Elem::Int(x)) => Elem::Int(-x),
            (RingSpec::IntegersMod(m), Elem::Int(x)) => {
                Elem::Int(if x.is_zero() { x.clone() } else { m - x })
            }
            (RingSpec::Rationals, Elem::Rat(x)) => Elem::Rat(-x),
            (RingSpec::Polynomial(base, _), Elem::Poly(x)) => {
                Elem::Poly(x.iter().map(|c| base.neg(c)).collect())
            }
            _ => panic!("element does not belong to {self}"),
        }
    }

    pub fn sub(&self, a: &Elem, b: &Elem) -> Elem {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        match (self, a, b) {
            (RingSpec::Integers, Elem::Int(x), Elem::Int(y)) => Elem::Int(x * y),
            (RingSpec::IntegersMod(m), Elem::Int(x), Elem::Int(y)) => Elem::Int((x * y) % m),
            (RingSpec::Rationals, Elem::Rat(x), Elem::Rat(y)) => Elem::Rat(x * y),
            (RingSpec::Polynomial(base, _), Elem::Poly(x), Elem::Poly(y)) => {
                if x.is_empty() || y.is_empty() {
                    return Elem::Poly(Vec::new());
                }
                let mut out = vec![base.zero(); x.len() + y.len() - 1];
                for (i, xi) in x.iter().enumerate() {
                    for (j, yj) in y.iter().enumerate() {
                        out[i + j] = base.add(&out[i + j], &base.mul(xi, yj));
                    }
                }
                Elem::Poly(trim(base, out))
            }
            _ => panic!("element does not belong to {self}"),
        }
    }

    pub fn mul_int(&self, a: &Elem, n: i64) -> Elem {
        self.mul(a, &self.from_int(n))
    }

    pub fn pow(&self, a: &Elem, mut e: u64) -> Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    pub fn is_nilpotent(&self, a: &Elem) -> bool {
        match (self, a) {
            (RingSpec::IntegersMod(m), Elem::Int(x)) => {
                let e = m.bits();
                x.modpow(&BigInt::from(e), m).is_zero()
            }
            (RingSpec::Polynomial(base, _), Elem::Poly(c)) => c.iter().all(|x| base.is_nilpotent(x)),
            _ => self.is_zero(a),
        }
    }

    pub fn is_unit(&self, a: &Elem) -> bool {
        match (self, a) {
            (RingSpec::Integers, Elem::Int(x)) => x.abs().is_one(),
            (RingSpec::Rationals, Elem::Rat(x)) => !x.is_zero(),
            (RingSpec::IntegersMod(m), Elem::Int(x)) => x.gcd(m).is_one(),
            (RingSpec::Polynomial(base, _), Elem::Poly(c)) => match c.split_first() {
                None => false,
                Some((c0, rest)) => base.is_unit(c0) && rest.iter().all(|x| base.is_nilpotent(x)),
            },
            _ => false,
        }
    }

    /// Multiplicative inverse, if `a` is a unit.
    pub fn inv(&self, a: &Elem) -> Option<Elem> {
        match (self, a) {
            (RingSpec::Integers, Elem::Int(x)) => x.abs().is_one().then(|| a.clone()),
            (RingSpec::Rationals, Elem::Rat(x)) => (!x.is_zero()).then(|| Elem::Rat(x.recip())),
            (RingSpec::IntegersMod(m), Elem::Int(x)) => x.modinv(m).map(Elem::Int),
            (RingSpec::Polynomial(base, _), Elem::Poly(c)) => {
                if !self.is_unit(a) {
                    return None;
                }
                // a = c0 (1 + n) with n nilpotent; the geometric series terminates.
                let c0_inv = base.inv(&c[0])?;
                let n = self.sub(&self.mul(a, &self.constant(c0_inv.clone())), &self.one());
                let minus_n = self.neg(&n);
                let mut term = self.one();
                let mut acc = self.zero();
                while !self.is_zero(&term) {
                    acc = self.add(&acc, &term);
                    term = self.mul(&term, &minus_n);
                }
                Some(self.mul(&acc, &self.constant(c0_inv)))
            }
            _ => None,
        }
    }

    /// Exact division by a positive integer, when it is defined: over `Z`
    /// the quotient must be exact, over `Z/m` the divisor must be a unit.
    pub fn div_int(&self, a: &Elem, n: &BigInt) -> Option<Elem> {
        if n.is_zero() {
            return None;
        }
        match (self, a) {
            (RingSpec::Integers, Elem::Int(x)) => {
                let (q, r) = x.div_rem(n);
                r.is_zero().then_some(Elem::Int(q))
            }
            (RingSpec::Rationals, Elem::Rat(x)) => {
                Some(Elem::Rat(x / BigRational::from_integer(n.clone())))
            }
            (RingSpec::IntegersMod(m), Elem::Int(x)) => {
                let inv = n.mod_floor(m).modinv(m)?;
                Some(Elem::Int((x * inv) % m))
            }
            (RingSpec::Polynomial(base, _), Elem::Poly(c)) => c
                .iter()
                .map(|x| base.div_int(x, n))
                .collect::<Option<Vec<_>>>()
                .map(Elem::Poly),
            _ => None,
        }
    }

    /// Formal derivative with respect to the outermost variable.
    pub fn derivative(&self, a: &Elem) -> Option<Elem> {
        match (self, a) {
            (RingSpec::Polynomial(base, _), Elem::Poly(c)) => {
                let out = c
                    .iter()
                    .enumerate()
                    .skip(1)
                    .map(|(i, x)| base.mul_int(x, i as i64))
                    .collect();
                Some(Elem::Poly(trim(base, out)))
            }
            _ => None,
        }
    }

    /// Checks that `a` has the right shape for this ring and returns its
    /// canonical form (residues reduced, trailing zeros dropped).
    pub fn canonicalize(&self, a: &Elem) -> Result<Elem> {
        match (self, a) {
            (RingSpec::Integers, Elem::Int(_)) => Ok(a.clone()),
            (RingSpec::Integers, Elem::Rat(x)) if x.is_integer() => Ok(Elem::Int(x.to_integer())),
            (RingSpec::IntegersMod(m), Elem::Int(x)) => Ok(Elem::Int(x.mod_floor(m))),
            (RingSpec::Rationals, Elem::Rat(x)) => {
                Ok(Elem::Rat(BigRational::new(x.numer().clone(), x.denom().clone())))
            }
            (RingSpec::Rationals, Elem::Int(x)) => Ok(Elem::Rat(BigRational::from_integer(x.clone()))),
            (RingSpec::Polynomial(base, _), Elem::Poly(c)) => {
                let out = c.iter().map(|x| base.canonicalize(x)).collect::<Result<Vec<_>>>()?;
                Ok(Elem::Poly(trim(base, out)))
            }
            (RingSpec::Polynomial(..), _) => {
                let inner = match self {
                    RingSpec::Polynomial(base, _) => base.canonicalize(a)?,
                    _ => unreachable!(),
                };
                Ok(self.constant(inner))
            }
            _ => Err(Error::SpecMismatch(format!("{a:?} is not an element of {self}"))),
        }
    }

    /// Coefficients of a polynomial element, constant first.
    pub fn coefficients<'a>(&self, a: &'a Elem) -> Option<&'a [Elem]> {
        match (self, a) {
            (RingSpec::Polynomial(..), Elem::Poly(c)) => Some(c),
            _ => None,
        }
    }

    /// Evaluates a polynomial element at `at`, an element of the base ring.
    pub fn evaluate(&self, a: &Elem, at: &Elem) -> Option<Elem> {
        let (RingSpec::Polynomial(base, _), Elem::Poly(c)) = (self, a) else {
            return None;
        };
        let mut acc = base.zero();
        for x in c.iter().rev() {
            acc = base.add(&base.mul(&acc, at), x);
        }
        Some(acc)
    }

    /// Human-readable rendering.
    pub fn format(&self, a: &Elem) -> String {
        match (self, a) {
            (_, Elem::Int(x)) => x.to_string(),
            (_, Elem::Rat(x)) => x.to_string(),
            (RingSpec::Polynomial(base, var), Elem::Poly(c)) => {
                if c.is_empty() {
                    return "0".to_string();
                }
                let mut out = String::new();
                for (i, x) in c.iter().enumerate() {
                    if base.is_zero(x) {
                        continue;
                    }
                    let mono = match i {
                        0 => String::new(),
                        1 => var.clone(),
                        _ => format!("{var}^{i}"),
                    };
                    let mut coeff = base.format(x);
                    let compound = coeff[1..].contains(['+', '-']);
                    let negative = !compound && coeff.starts_with('-');
                    if negative {
                        coeff.remove(0);
                    }
                    if compound {
                        coeff = format!("({coeff})");
                    }
                    if out.is_empty() {
                        if negative {
                            out.push('-');
                        }
                    } else {
                        out.push_str(if negative { " - " } else { " + " });
                    }
                    match (mono.is_empty(), coeff == "1") {
                        (true, _) => out.push_str(&coeff),
                        (false, true) => out.push_str(&mono),
                        (false, false) => {
                            let _ = write!(out, "{coeff}*{mono}");
                        }
                    }
                }
                out
            }
            _ => format!("{a:?}"),
        }
    }

    /// Integer value of an element of `Z` or a residue; `None` otherwise.
    pub fn as_integer<'a>(&self, a: &'a Elem) -> Option<&'a BigInt> {
        match a {
            Elem::Int(x) => Some(x),
            _ => None,
        }
    }
}

impl std::fmt::Display for RingSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RingSpec::Integers => f.write_str("Z"),
            RingSpec::Rationals => f.write_str("Q"),
            RingSpec::IntegersMod(m) => write!(f, "Z/{m}"),
            RingSpec::Polynomial(base, v) => write!(f, "{base}[{v}]"),
        }
    }
}

impl std::str::FromStr for RingSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        RingSpec::parse(s)
    }
}

fn trim(base: &RingSpec, mut c: Vec<Elem>) -> Vec<Elem> {
    while c.last().is_some_and(|x| base.is_zero(x)) {
        c.pop();
    }
    c
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}
