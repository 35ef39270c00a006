//! Topological and dynamical degrees.

use serde::Serialize;

use super::map::MapSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Degrees {
    pub d_f: u64,
    pub lambda1: u64,
    /// Some line bundle L has f^*L - L ample.
    pub amplified: bool,
}

/// d_f, the first dynamical degree, and whether the map is amplified.
///
/// On surfaces d_f > lambda1 is sufficient. A P^1 map of degree >= 2 and a
/// split map whose factors all have degree >= 2 are polarized by O(1,...,1),
/// hence amplified even when d_f = lambda1.
pub fn degrees(f: &MapSpec) -> Degrees {
    match f {
        MapSpec::P1(m) => {
            let d = m.degree() as u64;
            Degrees { d_f: d, lambda1: d, amplified: d >= 2 }
        }
        MapSpec::P2(m) => {
            let d = m.degree() as u64;
            Degrees { d_f: d * d, lambda1: d, amplified: d >= 2 }
        }
        MapSpec::P1xN(ms) => {
            let ds: Vec<u64> = ms.iter().map(|m| m.degree() as u64).collect();
            let d_f = ds.iter().product();
            let lambda1 = *ds.iter().max().unwrap();
            // every line bundle is O(a_1, ..., a_N) and f^*O(a) - O(a) = O((d_i - 1) a_i)
            Degrees { d_f, lambda1, amplified: ds.iter().all(|&d| d >= 2) }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rational::int;
    use crate::exactnum::{MPoly, Poly};
    use crate::projdyn::map::{P1Map, P2Map};

    fn p(c: &[i64]) -> P1Map {
        P1Map::polynomial(&Poly::from_ints(c)).unwrap()
    }

    #[test]
    fn spec_examples() {
        let m = |e: [u32; 3]| MPoly::from_terms(3, [(e.to_vec(), int(1))]);
        let f = MapSpec::P2(P2Map::new([m([2, 0, 0]), m([0, 2, 0]), m([0, 0, 2])], 2).unwrap());
        assert_eq!(degrees(&f), Degrees { d_f: 4, lambda1: 2, amplified: true });
        let f = MapSpec::P1xN(vec![p(&[0, 0, 1]), p(&[0, 0, 0, 1])]);
        assert_eq!(degrees(&f), Degrees { d_f: 6, lambda1: 3, amplified: true });
        let mob = P1Map::rational(&Poly::from_ints(&[1, 1]), &Poly::from_ints(&[2, 1])).unwrap();
        let f = MapSpec::P1xN(vec![p(&[0, 0, 1]), mob]);
        assert_eq!(degrees(&f), Degrees { d_f: 2, lambda1: 2, amplified: false });
    }
}
