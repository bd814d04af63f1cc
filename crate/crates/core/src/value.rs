//! Self-describing ring values, their JSON form, and a small expression
//! parser for writing elements such as `2*l^2 - 3/4` on the command line.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::ring::{Elem, RingSpec};

/// An element together with the ring it lives in.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RingValue {
    spec: RingSpec,
    elem: Elem,
}

/// The operations accepted by [`ring_arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Mul,
    Neg,
    Sub,
    Eq,
    IsZero,
    IsUnit,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ArithResult {
    Value(RingValue),
    Bool(bool),
}

impl RingValue {
    /// Validates and canonicalizes `elem` as an element of `spec`.
    pub fn new(spec: RingSpec, elem: Elem) -> Result<Self> {
        let elem = spec.canonicalize(&elem)?;
        Ok(RingValue { spec, elem })
    }

    pub fn integer(spec: &RingSpec, n: i64) -> Self {
        RingValue { spec: spec.clone(), elem: spec.from_int(n) }
    }

    /// Parses an expression such as `3/4`, `-2`, or `1 + 4*l + l^2`.
    pub fn parse(spec: &RingSpec, text: &str) -> Result<Self> {
        let elem = parse_elem(spec, text)?;
        Ok(RingValue { spec: spec.clone(), elem })
    }

    pub fn spec(&self) -> &RingSpec {
        &self.spec
    }

    pub fn elem(&self) -> &Elem {
        &self.elem
    }

    pub fn into_elem(self) -> Elem {
        self.elem
    }

    fn same_ring(&self, other: &RingValue) -> Result<()> {
        if self.spec != other.spec {
            return Err(Error::SpecMismatch(format!("{} vs {}", self.spec, other.spec)));
        }
        Ok(())
    }

    pub fn add(&self, other: &RingValue) -> Result<RingValue> {
        self.same_ring(other)?;
        Ok(self.with(self.spec.add(&self.elem, &other.elem)))
    }

    pub fn sub(&self, other: &RingValue) -> Result<RingValue> {
        self.same_ring(other)?;
        Ok(self.with(self.spec.sub(&self.elem, &other.elem)))
    }

    pub fn mul(&self, other: &RingValue) -> Result<RingValue> {
        self.same_ring(other)?;
        Ok(self.with(self.spec.mul(&self.elem, &other.elem)))
    }

    pub fn neg(&self) -> RingValue {
        self.with(self.spec.neg(&self.elem))
    }

    pub fn is_zero(&self) -> bool {
        self.spec.is_zero(&self.elem)
    }

    pub fn is_unit(&self) -> bool {
        self.spec.is_unit(&self.elem)
    }

    fn with(&self, elem: Elem) -> RingValue {
        RingValue { spec: self.spec.clone(), elem }
    }

    pub fn to_json(&self) -> Value {
        elem_to_json(&self.spec, &self.elem)
    }

    pub fn from_json(spec: &RingSpec, value: &Value) -> Result<Self> {
        Ok(RingValue { spec: spec.clone(), elem: elem_from_json(spec, value)? })
    }
}

impl std::fmt::Display for RingValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.spec.format(&self.elem))
    }
}

/// Dispatches one of the basic ring operations. Binary operations require
/// `b` and a shared ring.
pub fn ring_arith(op: ArithOp, a: &RingValue, b: Option<&RingValue>) -> Result<ArithResult> {
    let need_b = || b.ok_or_else(|| Error::Invalid(format!("{op:?} needs two operands")));
    Ok(match op {
        ArithOp::Add => ArithResult::Value(a.add(need_b()?)?),
        ArithOp::Sub => ArithResult::Value(a.sub(need_b()?)?),
        ArithOp::Mul => ArithResult::Value(a.mul(need_b()?)?),
        ArithOp::Neg => ArithResult::Value(a.neg()),
        ArithOp::Eq => {
            let b = need_b()?;
            a.same_ring(b)?;
            ArithResult::Bool(a.elem == b.elem)
        }
        ArithOp::IsZero => ArithResult::Bool(a.is_zero()),
        ArithOp::IsUnit => ArithResult::Bool(a.is_unit()),
    })
}

/// Formal derivative of a polynomial with respect to its outermost variable.
pub fn poly_derivative(p: &RingValue) -> Result<RingValue> {
    let d = p
        .spec
        .derivative(&p.elem)
        .ok_or_else(|| Error::SpecMismatch(format!("{} is not a polynomial ring", p.spec)))?;
    Ok(p.with(d))
}

/// True iff every coefficient of an integer polynomial is divisible by `m`.
pub fn divides_all_coeffs(p: &RingValue, m: &BigInt) -> Result<bool> {
    let RingSpec::Polynomial(base, _) = &p.spec else {
        return Err(Error::SpecMismatch(format!("{} is not Z[var]", p.spec)));
    };
    if **base != RingSpec::Integers {
        return Err(Error::SpecMismatch(format!("{} is not Z[var]", p.spec)));
    }
    if m.is_zero() {
        return Err(Error::Invalid("modulus must be positive".into()));
    }
    let coeffs = p.spec.coefficients(&p.elem).unwrap_or(&[]);
    Ok(coeffs.iter().all(|c| match c {
        Elem::Int(x) => x.is_multiple_of(m),
        _ => false,
    }))
}

/// JSON form: scalars as decimal strings (`"a/b"` for non-integral
/// rationals), polynomials as coefficient arrays, constant term first.
pub fn elem_to_json(spec: &RingSpec, a: &Elem) -> Value {
    match (spec, a) {
        (RingSpec::Polynomial(base, _), Elem::Poly(c)) => {
            Value::Array(c.iter().map(|x| elem_to_json(base, x)).collect())
        }
        _ => Value::String(spec.format(a)),
    }
}

pub fn elem_from_json(spec: &RingSpec, v: &Value) -> Result<Elem> {
    match (spec, v) {
        (RingSpec::Polynomial(base, _), Value::Array(items)) => {
            let coeffs = items.iter().map(|x| elem_from_json(base, x)).collect::<Result<Vec<_>>>()?;
            spec.canonicalize(&Elem::Poly(coeffs))
        }
        (_, Value::String(s)) => parse_elem(spec, s),
        (_, Value::Number(n)) => parse_elem(spec, &n.to_string()),
        _ => Err(Error::Parse(format!("cannot read {v} as an element of {spec}"))),
    }
}

/// Parses a ring element from infix text. Supports `+ - * / ^`, parentheses,
/// integer literals and the polynomial variables of `spec`. Division is by
/// units only.
pub fn parse_elem(spec: &RingSpec, text: &str) -> Result<Elem> {
    let tokens = tokenize(text)?;
    let mut p = ExprParser { spec, tokens: &tokens, pos: 0 };
    let e = p.sum()?;
    if p.pos != tokens.len() {
        return Err(Error::Parse(format!("unexpected input in `{text}`")));
    }
    Ok(e)
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Sym(char),
}

fn tokenize(text: &str) -> Result<Vec<Tok>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            out.push(Tok::Num(s.parse().expect("digits")));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Sym(c));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character `{c}` in `{text}`")));
        }
    }
    Ok(out)
}

struct ExprParser<'a> {
    spec: &'a RingSpec,
    tokens: &'a [Tok],
    pos: usize,
}

impl ExprParser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn sum(&mut self) -> Result<Elem> {
        let r = self.spec;
        let mut acc = if self.eat('-') { r.neg(&self.product()?) } else { self.product()? };
        loop {
            if self.eat('+') {
                acc = r.add(&acc, &self.product()?);
            } else if self.eat('-') {
                acc = r.sub(&acc, &self.product()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn product(&mut self) -> Result<Elem> {
        let r = self.spec;
        let mut acc = self.power()?;
        loop {
            if self.eat('*') {
                acc = r.mul(&acc, &self.power()?);
            } else if self.eat('/') {
                let d = self.power()?;
                let inv = r
                    .inv(&d)
                    .ok_or_else(|| Error::Parse(format!("{} is not invertible in {r}", r.format(&d))))?;
                acc = r.mul(&acc, &inv);
            } else if matches!(self.peek(), Some(Tok::Ident(_)) | Some(Tok::Sym('('))) {
                // Juxtaposition, as in `2l` or `3(l+1)`.
                acc = r.mul(&acc, &self.power()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn power(&mut self) -> Result<Elem> {
        let base = self.atom()?;
        if self.eat('^') {
            match self.peek().cloned() {
                Some(Tok::Num(e)) => {
                    self.pos += 1;
                    let e: u64 = e.try_into().map_err(|_| Error::Parse("exponent too large".into()))?;
                    Ok(self.spec.pow(&base, e))
                }
                _ => Err(Error::Parse("expected an integer exponent".into())),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Elem> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(self.spec.from_bigint(&n))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                self.spec
                    .variable(&name)
                    .ok_or_else(|| Error::Parse(format!("unknown variable `{name}` in {}", self.spec)))
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let e = self.sum()?;
                if !self.eat(')') {
                    return Err(Error::Parse("missing `)`".into()));
                }
                Ok(e)
            }
            Some(Tok::Sym('-')) => {
                self.pos += 1;
                Ok(self.spec.neg(&self.power()?))
            }
            other => Err(Error::Parse(format!("unexpected token {other:?}"))),
        }
    }
}

/// Builds a rational element `n/d` (used by tests and the Legendre module).
pub(crate) fn rational(n: i64, d: i64) -> Elem {
    Elem::Rat(BigRational::new(n.into(), d.into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(spec: &str, text: &str) -> RingValue {
        RingValue::parse(&RingSpec::parse(spec).unwrap(), text).unwrap()
    }

    fn value(r: ArithResult) -> RingValue {
        match r {
            ArithResult::Value(v) => v,
            ArithResult::Bool(b) => panic!("expected a value, got {b}"),
        }
    }

    #[test]
    fn documented_arithmetic() {
        assert_eq!(value(ring_arith(ArithOp::Add, &v("Z", "2"), Some(&v("Z", "3"))).unwrap()), v("Z", "5"));
        assert_eq!(
            value(ring_arith(ArithOp::Mul, &v("Q", "1/2"), Some(&v("Q", "2/3"))).unwrap()),
            v("Q", "1/3")
        );
        assert_eq!(value(ring_arith(ArithOp::Mul, &v("Z/9", "4"), Some(&v("Z/9", "7"))).unwrap()), v("Z/9", "1"));
        assert_eq!(ring_arith(ArithOp::IsUnit, &v("Z/9", "3"), None).unwrap(), ArithResult::Bool(false));
        assert_eq!(ring_arith(ArithOp::Eq, &v("Q", "2/4"), Some(&v("Q", "1/2"))).unwrap(), ArithResult::Bool(true));
    }

    #[test]
    fn mismatched_rings_are_rejected() {
        let err = ring_arith(ArithOp::Add, &v("Z", "2"), Some(&v("Q", "3"))).unwrap_err();
        assert!(matches!(err, Error::SpecMismatch(_)));
        assert!(ring_arith(ArithOp::Add, &v("Z", "2"), None).is_err());
    }

    #[test]
    fn derivatives() {
        assert_eq!(poly_derivative(&v("Z[l]", "2 + 2l")).unwrap(), v("Z[l]", "2"));
        assert_eq!(poly_derivative(&v("Z[l]", "1 + 4l + l^2")).unwrap(), v("Z[l]", "4 + 2l"));
        assert_eq!(
            poly_derivative(&v("Z[l]", "70 + 1120l + 2520l^2")).unwrap(),
            v("Z[l]", "1120 + 5040l")
        );
        assert!(matches!(poly_derivative(&v("Z", "3")), Err(Error::SpecMismatch(_))));
    }

    #[test]
    fn coefficient_divisibility() {
        let three = BigInt::from(3);
        assert!(divides_all_coeffs(&v("Z[l]", "6 - 18l"), &three).unwrap());
        assert!(divides_all_coeffs(&v("Z[l]", "0"), &BigInt::from(17)).unwrap());
        assert!(!divides_all_coeffs(&v("Z[l]", "6 - 18l"), &BigInt::from(4)).unwrap());
        assert!(divides_all_coeffs(&v("Q[l]", "6"), &three).is_err());
    }

    #[test]
    fn expression_parser() {
        assert_eq!(v("Q[l]", "(1 - 2l)^2").to_string(), "1 - 4*l + 4*l^2");
        assert_eq!(v("Z/7", "1/3").to_string(), "5");
        assert!(RingValue::parse(&RingSpec::Integers, "1/2").is_err());
        assert!(RingValue::parse(&RingSpec::Integers, "x").is_err());
        assert_eq!(v("Z[c1][c2]", "c1 c2 (c1 + c2)").to_string(), "c1^2*c2 + c1*c2^2");
    }

    #[test]
    fn json_forms() {
        let p = v("Q[l]", "1/2 - 3l");
        assert_eq!(p.to_json(), serde_json::json!(["1/2", "-3"]));
        assert_eq!(RingValue::from_json(p.spec(), &p.to_json()).unwrap(), p);
        let r = RingSpec::parse("Z/5").unwrap();
        assert_eq!(RingValue::from_json(&r, &serde_json::json!("-1")).unwrap(), v("Z/5", "4"));
    }

    fn arb_spec() -> impl Strategy<Value = RingSpec> {
        prop_oneof![
            Just(RingSpec::Integers),
            Just(RingSpec::Rationals),
            (2i64..40).prop_map(|m| RingSpec::integers_mod(m).unwrap()),
            Just(RingSpec::parse("Z[l]").unwrap()),
            Just(RingSpec::parse("Q[l]").unwrap()),
            Just(RingSpec::parse("Z/6[l]").unwrap()),
        ]
    }

    fn arb_elem(spec: RingSpec) -> BoxedStrategy<Elem> {
        match spec.clone() {
            RingSpec::Rationals => (-50i64..50, 1i64..12)
                .prop_map(|(n, d)| rational(n, d))
                .boxed(),
            RingSpec::Polynomial(base, _) => proptest::collection::vec(arb_elem(*base), 0..4)
                .prop_map(move |c| spec.canonicalize(&Elem::Poly(c)).unwrap())
                .boxed(),
            _ => (-1000i64..1000).prop_map(move |n| spec.from_int(n)).boxed(),
        }
    }

    fn spec_and_triple() -> impl Strategy<Value = (RingSpec, Elem, Elem, Elem)> {
        arb_spec().prop_flat_map(|s| {
            let e = arb_elem(s.clone());
            (Just(s), e.clone(), e.clone(), e)
        })
    }

    proptest! {
        #[test]
        fn ring_axioms((r, a, b, c) in spec_and_triple()) {
            prop_assert_eq!(r.add(&a, &b), r.add(&b, &a));
            prop_assert_eq!(r.mul(&a, &b), r.mul(&b, &a));
            prop_assert_eq!(r.add(&r.add(&a, &b), &c), r.add(&a, &r.add(&b, &c)));
            prop_assert_eq!(r.mul(&r.mul(&a, &b), &c), r.mul(&a, &r.mul(&b, &c)));
            prop_assert_eq!(r.mul(&a, &r.add(&b, &c)), r.add(&r.mul(&a, &b), &r.mul(&a, &c)));
            prop_assert_eq!(r.add(&a, &r.zero()), a.clone());
            prop_assert_eq!(r.mul(&a, &r.one()), a.clone());
            prop_assert!(r.is_zero(&r.add(&a, &r.neg(&a))));
            prop_assert_eq!(r.canonicalize(&a).unwrap(), a);
        }

        #[test]
        fn reduction_is_a_homomorphism(x in -10_000i64..10_000, y in -10_000i64..10_000, m in 2i64..60) {
            let zm = RingSpec::integers_mod(m).unwrap();
            let z = RingSpec::Integers;
            let red = |e: &Elem| zm.canonicalize(e).unwrap();
            let (a, b) = (z.from_int(x), z.from_int(y));
            prop_assert_eq!(red(&z.add(&a, &b)), zm.add(&red(&a), &red(&b)));
            prop_assert_eq!(red(&z.mul(&a, &b)), zm.mul(&red(&a), &red(&b)));
        }
    }

    #[test]
    fn exhaustive_small_moduli() {
        for m in 2..=12i64 {
            let r = RingSpec::integers_mod(m).unwrap();
            let elems: Vec<Elem> = (0..m).map(|i| r.from_int(i)).collect();
            for a in &elems {
                for b in &elems {
                    assert_eq!(r.add(a, b), r.add(b, a));
                    assert_eq!(r.mul(a, b), r.mul(b, a));
                    for c in &elems {
                        assert_eq!(r.mul(a, &r.add(b, c)), r.add(&r.mul(a, b), &r.mul(a, c)));
                        assert_eq!(r.mul(&r.mul(a, b), c), r.mul(a, &r.mul(b, c)));
                        assert_eq!(r.add(&r.add(a, b), c), r.add(a, &r.add(b, c)));
                    }
                }
                if r.is_unit(a) {
                    assert_eq!(r.mul(a, &r.inv(a).unwrap()), r.one());
                }
            }
        }
    }
}
