//! Newton polygons of polynomials over Q_p.

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactnum::rational::{self, Rational};
use crate::exactnum::Poly;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Segment {
    #[serde(with = "rational::serde_rat")]
    pub slope: Rational,
    pub length: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NewtonPolygon {
    pub vertices: Vec<(usize, String)>,
    pub slopes: Vec<Segment>,
    /// Roots at 0 (leading run of zero coefficients), not covered by slopes.
    pub zero_roots: usize,
}

impl NewtonPolygon {
    /// Lower convex hull of the given (index, valuation) points.
    pub fn from_points(points: &[(usize, Rational)]) -> Self {
        let mut pts: Vec<(usize, Rational)> = points.to_vec();
        pts.sort_by_key(|p| p.0);
        let zero_roots = pts.first().map(|p| p.0).unwrap_or(0);
        let mut hull: Vec<(usize, Rational)> = vec![];
        for pt in pts {
            while hull.len() >= 2 {
                let o = &hull[hull.len() - 2];
                let a = &hull[hull.len() - 1];
                let cross = rational::int(a.0 as i64 - o.0 as i64) * (&pt.1 - &o.1)
                    - (&a.1 - &o.1) * rational::int(pt.0 as i64 - o.0 as i64);
                if cross <= Rational::zero() {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(pt);
        }
        let slopes = hull
            .windows(2)
            .map(|w| {
                let len = w[1].0 - w[0].0;
                Segment { slope: (&w[1].1 - &w[0].1) / rational::int(len as i64), length: len }
            })
            .collect();
        let vertices = hull.iter().map(|(i, v)| (*i, rational::to_string(v))).collect();
        NewtonPolygon { vertices, slopes, zero_roots }
    }

    /// (root valuation, multiplicity), ascending valuation order reversed from slopes.
    pub fn root_valuations(&self) -> Vec<(Rational, usize)> {
        self.slopes.iter().map(|s| (-s.slope.clone(), s.length)).collect()
    }
}

pub fn newton_polygon(p: &Poly, prime: u64) -> Result<NewtonPolygon> {
    if p.is_zero() {
        return Err(Error::Precondition("Newton polygon of the zero polynomial".into()));
    }
    let pts: Vec<(usize, Rational)> = p
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| (i, rational::int(rational::valuation(c, prime).unwrap())))
        .collect();
    Ok(NewtonPolygon::from_points(&pts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rational::{int, rat};

    #[test]
    fn spec_examples() {
        let np = newton_polygon(&Poly::from_ints(&[-5, 0, 1]), 5).unwrap();
        assert_eq!(np.slopes, vec![Segment { slope: rat(-1, 2), length: 2 }]);
        let np = newton_polygon(&Poly::from_ints(&[2, -3, 1]), 2).unwrap();
        assert_eq!(np.root_valuations(), vec![(int(1), 1), (int(0), 1)]);
        let np = newton_polygon(&Poly::from_ints(&[-1, -2, 1]), 2).unwrap();
        assert_eq!(np.root_valuations(), vec![(int(0), 2)]);
        assert!(newton_polygon(&Poly::zero(), 2).is_err());
    }

    #[test]
    fn zero_roots_counted() {
        let np = newton_polygon(&Poly::from_ints(&[0, 0, 3, 1]), 3).unwrap();
        assert_eq!(np.zero_roots, 2);
        assert_eq!(np.slopes.iter().map(|s| s.length).sum::<usize>(), 1);
    }
}
