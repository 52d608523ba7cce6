//! A computable multiplicative model of `K*` for an algebraically closed
//! non-Archimedean field: monomials `q · e^{2πiθ} · t^v` with `q ∈ Q_{>0}`,
//! `θ ∈ Q/Z` and `v ∈ Q`. The valuation is the `t`-exponent.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawMonomial", into = "RawMonomial")]
pub struct ValuedMonomial {
    magnitude: Rational,
    phase: Rational,
    t_exponent: Rational,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMonomial {
    mag: Rational,
    phase: Rational,
    texp: Rational,
}

impl TryFrom<RawMonomial> for ValuedMonomial {
    type Error = Error;
    fn try_from(raw: RawMonomial) -> Result<Self> {
        ValuedMonomial::new(raw.mag, raw.phase, raw.texp)
    }
}

impl From<ValuedMonomial> for RawMonomial {
    fn from(m: ValuedMonomial) -> Self {
        RawMonomial {
            mag: m.magnitude,
            phase: m.phase,
            texp: m.t_exponent,
        }
    }
}

impl ValuedMonomial {
    /// Fails unless `magnitude > 0`; the phase is reduced mod 1.
    pub fn new(magnitude: Rational, phase: Rational, t_exponent: Rational) -> Result<Self> {
        if !magnitude.is_positive() {
            return Err(Error::Invalid(format!("magnitude {magnitude} must be positive")));
        }
        Ok(ValuedMonomial {
            magnitude,
            phase: phase.fract_positive(),
            t_exponent,
        })
    }

    pub fn one() -> Self {
        ValuedMonomial {
            magnitude: Rational::one(),
            phase: Rational::zero(),
            t_exponent: Rational::zero(),
        }
    }

    /// `t^v`.
    pub fn t_power(v: Rational) -> Self {
        ValuedMonomial {
            magnitude: Rational::one(),
            phase: Rational::zero(),
            t_exponent: v,
        }
    }

    /// `e^{2πiθ}`.
    pub fn root_of_unity(theta: Rational) -> Self {
        ValuedMonomial {
            magnitude: Rational::one(),
            phase: theta.fract_positive(),
            t_exponent: Rational::zero(),
        }
    }

    /// `-1`.
    pub fn minus_one() -> Self {
        Self::root_of_unity(Rational::half())
    }

    /// A nonzero rational constant, sign carried in the phase.
    pub fn constant(c: Rational) -> Result<Self> {
        if c.is_zero() {
            return Err(Error::Invalid("zero is not a unit".into()));
        }
        let phase = if c.is_negative() {
            Rational::half()
        } else {
            Rational::zero()
        };
        ValuedMonomial::new(c.abs(), phase, Rational::zero())
    }

    pub fn magnitude(&self) -> &Rational {
        &self.magnitude
    }

    pub fn phase(&self) -> &Rational {
        &self.phase
    }

    pub fn t_exponent(&self) -> &Rational {
        &self.t_exponent
    }

    pub fn valuation(&self) -> Rational {
        self.t_exponent.clone()
    }

    pub fn is_one(&self) -> bool {
        *self == Self::one()
    }

    pub fn mul(&self, other: &ValuedMonomial) -> ValuedMonomial {
        ValuedMonomial {
            magnitude: &self.magnitude * &other.magnitude,
            phase: (&self.phase + &other.phase).fract_positive(),
            t_exponent: &self.t_exponent + &other.t_exponent,
        }
    }

    pub fn inv(&self) -> ValuedMonomial {
        ValuedMonomial {
            magnitude: self.magnitude.recip(),
            phase: (-&self.phase).fract_positive(),
            t_exponent: -&self.t_exponent,
        }
    }

    pub fn div(&self, other: &ValuedMonomial) -> ValuedMonomial {
        self.mul(&other.inv())
    }

    pub fn pow(&self, n: i64) -> ValuedMonomial {
        ValuedMonomial {
            magnitude: self.magnitude.pow(n),
            phase: self.phase.mul_int(n).fract_positive(),
            t_exponent: self.t_exponent.mul_int(n),
        }
    }

    /// `x^{p/q}` for the principal branch of the phase; errors when the
    /// magnitude has no rational `q`-th root.
    pub fn pow_rational(&self, e: &Rational) -> Result<ValuedMonomial> {
        let (p, q) = (e.numer().clone(), e.denom().clone());
        let q64 = q
            .to_u32()
            .ok_or_else(|| Error::OutsideModel("root degree too large".into()))?;
        let root = |n: &BigInt| -> Option<BigInt> {
            let r = n.nth_root(q64);
            (num_traits::pow(r.clone(), q64 as usize) == *n).then_some(r)
        };
        let num = root(self.magnitude.numer());
        let den = root(self.magnitude.denom());
        let (Some(num), Some(den)) = (num, den) else {
            return Err(Error::OutsideModel(format!(
                "magnitude {} has no rational {q64}-th root",
                self.magnitude
            )));
        };
        let base = ValuedMonomial {
            magnitude: Rational::from_big(num, den),
            phase: (&self.phase / &Rational::from(q.clone())).fract_positive(),
            t_exponent: &self.t_exponent / &Rational::from(q),
        };
        let p = p
            .to_i64()
            .ok_or_else(|| Error::OutsideModel("exponent too large".into()))?;
        Ok(base.pow(p))
    }

    /// Multiplicative order if `x` is a root of unity.
    pub fn torsion_order(&self) -> Option<u64> {
        if self.magnitude != Rational::one() || !self.t_exponent.is_zero() {
            return None;
        }
        self.phase.denom().to_u64()
    }
}

impl fmt::Display for ValuedMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}·e(2πi·{})·t^{}",
            self.magnitude, self.phase, self.t_exponent
        )
    }
}

impl fmt::Debug for ValuedMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.magnitude, self.phase, self.t_exponent)
    }
}

/// A point of the split torus `(K*)^g`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiplicativePoint {
    pub coords: Vec<ValuedMonomial>,
}

impl MultiplicativePoint {
    pub fn new(coords: Vec<ValuedMonomial>) -> Self {
        MultiplicativePoint { coords }
    }

    pub fn identity(g: usize) -> Self {
        MultiplicativePoint {
            coords: vec![ValuedMonomial::one(); g],
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn mul(&self, other: &MultiplicativePoint) -> Result<MultiplicativePoint> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch("points of different dimension".into()));
        }
        Ok(MultiplicativePoint {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a.mul(b))
                .collect(),
        })
    }

    pub fn pow(&self, n: i64) -> MultiplicativePoint {
        MultiplicativePoint {
            coords: self.coords.iter().map(|c| c.pow(n)).collect(),
        }
    }

    /// Componentwise valuations: the tropicalization of the point.
    pub fn tropicalize(&self) -> Vec<Rational> {
        self.coords.iter().map(ValuedMonomial::valuation).collect()
    }

    /// Value `∏ p_i^{m_i}` of the character `χ^m` at this point.
    pub fn eval_character(&self, m: &[i64]) -> Result<ValuedMonomial> {
        if m.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "character of length {} on point of dimension {}",
                m.len(),
                self.dim()
            )));
        }
        Ok(self
            .coords
            .iter()
            .zip(m)
            .fold(ValuedMonomial::one(), |acc, (p, &e)| acc.mul(&p.pow(e))))
    }
}

/// `∏ x_i^{e_i}` for integer exponents.
pub fn monomial_product(values: &[ValuedMonomial], exponents: &[i64]) -> ValuedMonomial {
    values
        .iter()
        .zip(exponents)
        .fold(ValuedMonomial::one(), |acc, (x, &e)| acc.mul(&x.pow(e)))
}

/// Least common multiple of two torsion orders.
pub fn lcm_order(a: u64, b: u64) -> u64 {
    a.lcm(&b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn mono(m: Rational, p: Rational, v: Rational) -> ValuedMonomial {
        ValuedMonomial::new(m, p, v).unwrap()
    }

    #[test]
    fn group_law_examples() {
        let t = ValuedMonomial::t_power(q(1, 1));
        assert_eq!(t.mul(&t), mono(q(1, 1), q(0, 1), q(2, 1)));
        let m1 = ValuedMonomial::minus_one();
        assert_eq!(m1.pow(2), ValuedMonomial::one());
        let a = mono(q(2, 1), q(0, 1), q(1, 1));
        let b = mono(q(3, 1), q(1, 2), q(-1, 1));
        assert_eq!(a.mul(&b), mono(q(6, 1), q(1, 2), q(0, 1)));
        assert_eq!(a.pow(0), ValuedMonomial::one());
        assert_eq!(a.mul(&a.inv()), ValuedMonomial::one());
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(ValuedMonomial::t_power(q(1, 1)).valuation(), q(1, 1));
        assert_eq!(ValuedMonomial::minus_one().valuation(), q(0, 1));
        assert_eq!(mono(q(3, 1), q(1, 4), q(-2, 3)).valuation(), q(-2, 3));
    }

    #[test]
    fn eval_character_examples() {
        let t = ValuedMonomial::t_power(q(1, 1));
        let lambda1 = MultiplicativePoint::new(vec![t.clone(), ValuedMonomial::one()]);
        let lambda2 = MultiplicativePoint::new(vec![ValuedMonomial::minus_one(), t]);
        assert_eq!(lambda1.eval_character(&[0, 1]).unwrap(), ValuedMonomial::one());
        assert_eq!(
            lambda2.eval_character(&[1, 0]).unwrap(),
            ValuedMonomial::minus_one()
        );
        assert_eq!(lambda2.eval_character(&[0, 0]).unwrap(), ValuedMonomial::one());
        assert!(matches!(
            lambda2.eval_character(&[1]),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn torsion_examples() {
        assert_eq!(ValuedMonomial::minus_one().torsion_order(), Some(2));
        assert_eq!(ValuedMonomial::one().torsion_order(), Some(1));
        assert_eq!(ValuedMonomial::root_of_unity(q(1, 3)).torsion_order(), Some(3));
        assert_eq!(ValuedMonomial::t_power(q(1, 1)).torsion_order(), None);
        assert_eq!(mono(q(2, 1), q(0, 1), q(0, 1)).torsion_order(), None);
    }

    #[test]
    fn rational_powers_stay_in_model() {
        let x = mono(q(4, 9), q(1, 2), q(1, 1));
        let r = x.pow_rational(&q(1, 2)).unwrap();
        assert_eq!(r.pow(2), x);
        assert!(mono(q(2, 1), q(0, 1), q(0, 1)).pow_rational(&q(1, 2)).is_err());
    }

    #[test]
    fn json_shape() {
        let x = mono(q(3, 1), q(1, 4), q(-2, 3));
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(s, r#"{"mag":"3","phase":"1/4","texp":"-2/3"}"#);
        let back: ValuedMonomial = serde_json::from_str(&s).unwrap();
        assert_eq!(back, x);
        let bad: std::result::Result<ValuedMonomial, _> =
            serde_json::from_str(r#"{"mag":"-1","phase":"0","texp":"0"}"#);
        assert!(bad.is_err());
    }
}
