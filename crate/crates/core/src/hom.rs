//! Ring maps used for base change: reduction modulo `m`, clearing the `Q`
//! structure when coefficients are integral, and evaluating polynomial
//! variables.

use std::collections::BTreeMap;

use num_integer::Integer;
use num_traits::One;

use crate::error::{Error, Result};
use crate::ring::{Elem, RingSpec};
use crate::value::RingValue;

/// A ring map `source -> target`, determined by the target ring and the
/// values assigned to polynomial variables that are evaluated away.
/// Variables that are not assigned must reappear (same name) in the target.
#[derive(Clone, Debug)]
pub struct RingMap {
    source: RingSpec,
    target: RingSpec,
    assignment: BTreeMap<String, RingValue>,
}

impl RingMap {
    pub fn new(source: RingSpec, target: RingSpec) -> Self {
        RingMap { source, target, assignment: BTreeMap::new() }
    }

    /// Sends `var` to `value`, which must live in the ring the variable's
    /// coefficients are mapped into.
    pub fn assign(mut self, var: &str, value: RingValue) -> Self {
        self.assignment.insert(var.to_string(), value);
        self
    }

    pub fn source(&self) -> &RingSpec {
        &self.source
    }

    pub fn target(&self) -> &RingSpec {
        &self.target
    }

    pub fn apply(&self, a: &Elem) -> Result<Elem> {
        map_elem(&self.source, &self.target, &self.assignment, a)
    }
}

fn map_elem(
    src: &RingSpec,
    dst: &RingSpec,
    assignment: &BTreeMap<String, RingValue>,
    a: &Elem,
) -> Result<Elem> {
    match (src, a) {
        (RingSpec::Polynomial(base, var), Elem::Poly(coeffs)) => {
            if let Some(value) = assignment.get(var) {
                if value.spec() != dst {
                    return Err(Error::SpecMismatch(format!(
                        "value for `{var}` lives in {}, expected {dst}",
                        value.spec()
                    )));
                }
                let mut acc = dst.zero();
                for c in coeffs.iter().rev() {
                    let c = map_elem(base, dst, assignment, c)?;
                    acc = dst.add(&dst.mul(&acc, value.elem()), &c);
                }
                return Ok(acc);
            }
            match dst {
                RingSpec::Polynomial(dbase, dvar) if dvar == var => {
                    let out = coeffs
                        .iter()
                        .map(|c| map_elem(base, dbase, assignment, c))
                        .collect::<Result<Vec<_>>>()?;
                    dst.canonicalize(&Elem::Poly(out))
                }
                _ => Err(Error::SpecMismatch(format!(
                    "variable `{var}` has no image in {dst}; assign it a value"
                ))),
            }
        }
        (_, _) if matches!(dst, RingSpec::Polynomial(..)) => {
            let RingSpec::Polynomial(dbase, _) = dst else { unreachable!() };
            Ok(dst.constant(map_elem(src, dbase, assignment, a)?))
        }
        (RingSpec::Integers, Elem::Int(x)) => match dst {
            RingSpec::Integers | RingSpec::IntegersMod(_) | RingSpec::Rationals => Ok(dst.from_bigint(x)),
            _ => unreachable!(),
        },
        (RingSpec::Rationals, Elem::Rat(x)) => match dst {
            RingSpec::Rationals => Ok(a.clone()),
            RingSpec::Integers if x.denom().is_one() => Ok(Elem::Int(x.numer().clone())),
            RingSpec::IntegersMod(m) => {
                let inv = x
                    .denom()
                    .mod_floor(m)
                    .modinv(m)
                    .ok_or_else(|| Error::DenominatorNotInvertible(x.to_string()))?;
                Ok(Elem::Int((x.numer() * inv).mod_floor(m)))
            }
            _ => Err(Error::DenominatorNotInvertible(x.to_string())),
        },
        (RingSpec::IntegersMod(m), Elem::Int(x)) => match dst {
            RingSpec::IntegersMod(n) if m.is_multiple_of(n) => Ok(dst.from_bigint(x)),
            _ => Err(Error::SpecMismatch(format!("no ring map {src} -> {dst}"))),
        },
        _ => Err(Error::SpecMismatch(format!("{a:?} is not an element of {src}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(s: &str) -> RingSpec {
        RingSpec::parse(s).unwrap()
    }

    #[test]
    fn reductions() {
        let q = spec("Q");
        let map = RingMap::new(q.clone(), spec("Z/7"));
        let half = RingValue::parse(&q, "1/2").unwrap();
        assert_eq!(map.apply(half.elem()).unwrap(), Elem::Int(4.into()));
        let map = RingMap::new(q.clone(), spec("Z/6"));
        assert!(matches!(map.apply(half.elem()), Err(Error::DenominatorNotInvertible(_))));
        let map = RingMap::new(q.clone(), spec("Z"));
        assert!(map.apply(half.elem()).is_err());
        assert_eq!(map.apply(&q.from_int(-3)).unwrap(), Elem::Int((-3).into()));
        let map = RingMap::new(spec("Z/12"), spec("Z/4"));
        assert_eq!(map.apply(&Elem::Int(7.into())).unwrap(), Elem::Int(3.into()));
        assert!(RingMap::new(spec("Z/12"), spec("Z/5")).apply(&Elem::Int(7.into())).is_err());
    }

    #[test]
    fn evaluation_and_coefficient_maps() {
        let src = spec("Q[l]");
        let p = RingValue::parse(&src, "1/3 + 2l + l^2").unwrap();
        let z3 = spec("Z/5");
        let map = RingMap::new(src.clone(), z3.clone()).assign("l", RingValue::integer(&z3, 1));
        // 1/3 + 3 = 2 + 3 = 0 mod 5
        assert_eq!(map.apply(p.elem()).unwrap(), Elem::Int(0.into()));
        let map = RingMap::new(src.clone(), spec("Z/5[l]"));
        assert_eq!(spec("Z/5[l]").format(&map.apply(p.elem()).unwrap()), "2 + 2*l + l^2");
        assert!(RingMap::new(src, spec("Z/5")).apply(p.elem()).is_err());
    }
}
