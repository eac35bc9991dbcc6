use nalgebra::DMatrix;
use num_complex::Complex64;

use super::context::OrbitContext;
use crate::matrix::ComplexMatrix;

/// Entrywise matrices that express the derivative of `Δ` at `D`.
///
/// `N` here is the Hadamard factor `|d_j|^{-1/2}`, not a point of the orbit.
#[derive(Debug, Clone)]
#[allow(non_snake_case)]
pub struct DerivativeKit {
    pub J: ComplexMatrix,
    pub K: ComplexMatrix,
    pub L: ComplexMatrix,
    pub M: ComplexMatrix,
    pub N: ComplexMatrix,
    pub R: ComplexMatrix,
    pub T_plus: ComplexMatrix,
    pub T_minus: ComplexMatrix,
    pub H: ComplexMatrix,
    pub H1: ComplexMatrix,
    pub H2: ComplexMatrix,
}

impl DerivativeKit {
    /// Named matrices in a fixed order.
    pub fn named(&self) -> [(&'static str, &ComplexMatrix); 11] {
        [
            ("J", &self.J),
            ("K", &self.K),
            ("L", &self.L),
            ("M", &self.M),
            ("N", &self.N),
            ("R", &self.R),
            ("T_plus", &self.T_plus),
            ("T_minus", &self.T_minus),
            ("H", &self.H),
            ("H1", &self.H1),
            ("H2", &self.H2),
        ]
    }
}

pub fn build_kit(ctx: &OrbitContext) -> DerivativeKit {
    let r = ctx.dim();
    let d = ctx.d();
    let m = ctx.moduli();
    let s: Vec<f64> = m.iter().map(|x| x.sqrt()).collect();
    let fill = |f: &dyn Fn(usize, usize) -> Complex64| ComplexMatrix::wrap(DMatrix::from_fn(r, r, |i, j| f(i, j)));
    let re = |x: f64| Complex64::new(x, 0.0);

    let k = fill(&|i, j| {
        if ctx.is_equal(i, j) {
            re(0.0)
        } else {
            let sign = if j > i { 1.0 } else { -1.0 };
            re((d[j] - d[i]).norm() * sign)
        }
    });
    let jm = fill(&|i, j| if ctx.is_equal(i, j) { re(1.0) } else { (d[j] - d[i]) / k.get(i, j) });
    let n = fill(&|_, j| re(1.0 / s[j]));
    let l = fill(&|i, j| re(s[i] / s[j]));
    let mm = fill(&|i, j| re(1.0 / ((m[i] + m[j]) * (s[i] + s[j]))));
    let rr = fill(&|i, j| d[i].conj() * d[j] * 2.0);
    let tp = fill(&|i, j| re(m[i] * m[i] + m[j] * m[j]));
    let tm = fill(&|i, j| re(m[j] * m[j] - m[i] * m[i]));
    let h = &mm.hadamard(&n).hadamard(&(&rr - &tp)) + &l;
    let half = Complex64::new(0.5, 0.0);
    let h1 = (&h + &h.adjoint()).scale(half);
    let h2 = (&h - &h.adjoint()).scale(half);
    DerivativeKit { J: jm, K: k, L: l, M: mm, N: n, R: rr, T_plus: tp, T_minus: tm, H: h, H1: h1, H2: h2 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn closed_form_h1(d: &[Complex64], i: usize, j: usize) -> Complex64 {
        let (ri, rj) = (d[i].norm(), d[j].norm());
        let (ti, tj) = (d[i].arg(), d[j].arg());
        (c(1.0, 0.0) + Complex64::from_polar(1.0, tj - ti)) * (ri.sqrt() * rj.sqrt() / (ri + rj))
    }

    fn check_invariants(d: &[Complex64]) {
        let ctx = OrbitContext::new(d).unwrap();
        let kit = build_kit(&ctx);
        let r = d.len();
        let scale = d.iter().map(|z| z.norm()).fold(1.0, f64::max);
        for i in 0..r {
            for j in 0..r {
                assert!((kit.J.get(i, j).norm() - 1.0).abs() < 1e-14);
                assert_eq!(kit.K.get(i, j).im, 0.0);
                assert_eq!(kit.K.get(i, j), -kit.K.get(j, i));
                assert!((kit.J.get(i, j) * kit.K.get(i, j) - (d[j] - d[i])).norm() < 1e-14 * scale);
                assert!(kit.M.get(i, j).re > 0.0 && kit.M.get(i, j).im == 0.0);
                let ones = kit.M.get(i, j) * kit.N.get(i, j) * kit.T_minus.get(i, j) + kit.L.get(i, j);
                assert!((ones - c(1.0, 0.0)).norm() < 1e-13);
                assert!((kit.H1.get(i, j) - closed_form_h1(d, i, j)).norm() < 1e-13);
                assert!((kit.H1.get(i, j) - kit.H1.get(j, i).conj()).norm() < 1e-15);
                assert!((kit.H2.get(i, j) + kit.H2.get(j, i).conj()).norm() < 1e-15);
            }
            assert!((kit.H1.get(i, i) - c(1.0, 0.0)).norm() < 1e-14);
        }
        assert!((&kit.H1 + &kit.H2 - &kit.H).max_abs() < 1e-15);
    }

    #[test]
    fn two_point_values() {
        let ctx = OrbitContext::new(&[c(1.0, 0.0), c(2.0, 0.0)]).unwrap();
        let kit = build_kit(&ctx);
        assert!((kit.M.get(0, 1).re - 1.0 / (3.0 * (1.0 + 2f64.sqrt()))).abs() < 1e-15);
        assert!((kit.M.get(0, 1).re - 0.1380712).abs() < 1e-7);
        let h1 = kit.H1.get(0, 1);
        assert!((h1.re - 2.0 * 2f64.sqrt() / 3.0).abs() < 1e-14 && h1.im.abs() < 1e-15);
        assert!((h1.re - ctx.k_d()).abs() < 1e-14);
    }

    #[test]
    fn invariants_on_fixed_diagonals() {
        check_invariants(&[c(1.0, 0.0), c(2.0, 0.0)]);
        check_invariants(&[c(1.0, 0.0), c(0.0, 1.0)]);
        check_invariants(&[c(1.0, 0.0), c(2.0, 0.0), c(0.0, 3.0)]);
        check_invariants(&[c(1.0, 0.0), c(-1.0, 0.1)]);
        check_invariants(&[c(1.0, 0.0), c(1.0, 0.0), c(-2.0, 0.0)]);
    }

    #[test]
    fn equal_pairs_use_unit_defaults() {
        let ctx = OrbitContext::new(&[c(2.0, 1.0), c(2.0, 1.0)]).unwrap();
        let kit = build_kit(&ctx);
        assert_eq!(kit.K.get(0, 1), c(0.0, 0.0));
        assert_eq!(kit.J.get(0, 1), c(1.0, 0.0));
    }

    proptest! {
        #[test]
        fn invariants_on_random_diagonals(
            parts in proptest::collection::vec((0.1f64..3.0, -3.2f64..3.2), 2..6),
        ) {
            let d: Vec<Complex64> = parts.iter().map(|&(r, t)| Complex64::from_polar(r, t)).collect();
            check_invariants(&d);
        }
    }
}
