//! Truncated one-variable p-adic power series and Strassmann counting.

use serde::Serialize;

use super::element::PadicElement;
use crate::error::{Error, Result};

/// What the caller knows about the coefficients beyond the truncation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TailBound {
    /// The series is a polynomial.
    Zero,
    /// Every discarded coefficient has valuation at least this value.
    AtLeast(i64),
    Uncertified,
}

#[derive(Clone, Debug, Serialize)]
pub struct PadicSeries1 {
    pub prime: u64,
    pub coeffs: Vec<PadicElement>,
    pub tail: TailBound,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StrassmannCount {
    Zeros(usize),
    IdenticallyZero,
}

impl PadicSeries1 {
    pub fn new(prime: u64, coeffs: Vec<PadicElement>, tail: TailBound) -> Self {
        PadicSeries1 { prime, coeffs, tail }
    }

    pub fn truncation(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, t: &PadicElement) -> PadicElement {
        let prec = self.coeffs.iter().map(|c| c.prec()).min().unwrap_or(t.prec());
        let mut acc = PadicElement::zero(self.prime, prec);
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * t) + c;
        }
        acc
    }
}

/// Upper bound on the zeros of `s` in the closed unit disk.
pub fn strassmann_count(s: &PadicSeries1) -> Result<StrassmannCount> {
    let t = s.truncation();
    let vmin = s.coeffs.iter().filter_map(|c| c.valuation()).min();
    let Some(vmin) = vmin else {
        let prec = s.coeffs.iter().map(|c| c.prec()).min().unwrap_or(0);
        return match s.tail {
            TailBound::Zero => Ok(StrassmannCount::IdenticallyZero),
            TailBound::AtLeast(k) if k >= prec => Ok(StrassmannCount::IdenticallyZero),
            _ => Err(Error::InconclusiveTruncation),
        };
    };
    let n = s.coeffs.iter().rposition(|c| c.valuation() == Some(vmin)).unwrap();
    if s.coeffs[n + 1..].iter().any(|c| c.is_zero() && c.prec() <= vmin) {
        return Err(Error::RaisePrecision(
            "a vanishing coefficient could still attain the maximal norm".into(),
        ));
    }
    match s.tail {
        TailBound::Zero => {}
        TailBound::AtLeast(k) if k > vmin => {}
        TailBound::AtLeast(_) => return Err(Error::InconclusiveTruncation),
        TailBound::Uncertified if n == t => return Err(Error::InconclusiveTruncation),
        TailBound::Uncertified => {}
    }
    Ok(StrassmannCount::Zeros(n))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ser(p: u64, c: &[i64], tail: TailBound) -> PadicSeries1 {
        PadicSeries1::new(p, c.iter().map(|&x| PadicElement::from_int(p, x, 20)).collect(), tail)
    }

    #[test]
    fn spec_examples() {
        assert_eq!(strassmann_count(&ser(3, &[3, -1], TailBound::Zero)), Ok(StrassmannCount::Zeros(1)));
        assert_eq!(strassmann_count(&ser(3, &[1], TailBound::Zero)), Ok(StrassmannCount::Zeros(0)));
        assert_eq!(strassmann_count(&ser(5, &[0, -1, 1], TailBound::Zero)), Ok(StrassmannCount::Zeros(2)));
        assert_eq!(strassmann_count(&ser(5, &[0, 0], TailBound::Zero)), Ok(StrassmannCount::IdenticallyZero));
    }

    #[test]
    fn tail_policy() {
        assert_eq!(
            strassmann_count(&ser(3, &[3, 1], TailBound::Uncertified)),
            Err(Error::InconclusiveTruncation)
        );
        assert_eq!(strassmann_count(&ser(3, &[1, 3], TailBound::Uncertified)), Ok(StrassmannCount::Zeros(0)));
        assert_eq!(strassmann_count(&ser(3, &[1, 3], TailBound::AtLeast(1))), Ok(StrassmannCount::Zeros(0)));
        assert_eq!(
            strassmann_count(&ser(3, &[1, 3], TailBound::AtLeast(0))),
            Err(Error::InconclusiveTruncation)
        );
    }
}
