//! Baker–Campbell–Hausdorff product through Dynkin's commutator series.
//!
//! `log(exp u · exp v) = Σ_w c(w) [w_1, [w_2, … [w_{m-1}, w_m]…]]` over words
//! `w` in the letters `{u, v}`. Words longer than the step contribute nothing.

use num_traits::{One, Zero};

use super::algebra::{AlgebraElement, StratifiedAlgebra};
use crate::symcalc::jet::inv_factorial;
use crate::scalar::{Rational, Scalar};

/// Dynkin coefficients for all words of length `1..=max_len`.
///
/// A word of length `m` is a bit pattern, bit `m-1-p` set when position `p`
/// is the letter `v`.
#[derive(Clone, Debug)]
pub struct DynkinTable {
    max_len: u32,
    /// `coeffs[m][bits]`
    coeffs: Vec<Vec<Rational>>,
}

impl DynkinTable {
    pub fn new(max_len: u32) -> Self {
        let mut coeffs = vec![Vec::new()];
        for m in 1..=max_len {
            coeffs.push((0..1u32 << m).map(|bits| word_coefficient(bits, m)).collect());
        }
        DynkinTable { max_len, coeffs }
    }

    pub fn max_len(&self) -> u32 {
        self.max_len
    }

    pub fn coefficient(&self, bits: u32, len: u32) -> &Rational {
        &self.coeffs[len as usize][bits as usize]
    }
}

fn letter(bits: u32, len: u32, p: u32) -> bool {
    bits >> (len - 1 - p) & 1 == 1
}

/// Sum over splittings of the word into `n` nonempty blocks `u^r v^s` of
/// `(-1)^{n-1} / (n · m · Π r! s!)`.
fn word_coefficient(bits: u32, m: u32) -> Rational {
    let m_us = m as usize;
    // block_weight[a][b] = 1/(r! s!) if positions a..b form u^r v^s
    let mut block = vec![vec![None; m_us + 1]; m_us + 1];
    for a in 0..m_us {
        for b in a + 1..=m_us {
            let mut r = 0;
            let mut s = 0;
            let mut ok = true;
            for p in a..b {
                if letter(bits, m, p as u32) {
                    s += 1;
                } else if s > 0 {
                    ok = false;
                    break;
                } else {
                    r += 1;
                }
            }
            if ok {
                block[a][b] = Some(inv_factorial(r) * inv_factorial(s));
            }
        }
    }
    // dp[pos][n] = Σ over splittings of the prefix of length pos into n blocks
    let mut dp = vec![vec![Rational::zero(); m_us + 1]; m_us + 1];
    dp[0][0] = Rational::one();
    for pos in 1..=m_us {
        for start in 0..pos {
            if let Some(w) = &block[start][pos] {
                for n in 0..pos {
                    if !dp[start][n].is_zero() {
                        let add = &dp[start][n] * w;
                        dp[pos][n + 1] += add;
                    }
                }
            }
        }
    }
    let mut total = Rational::zero();
    for n in 1..=m_us {
        let c = &dp[m_us][n] / Rational::from_integer((n * m_us).into());
        if n % 2 == 1 {
            total += c;
        } else {
            total -= c;
        }
    }
    total
}

impl StratifiedAlgebra {
    /// `z` with `exp(u) exp(v) = exp(z)`.
    pub fn bch<S: Scalar>(&self, u: &AlgebraElement<S>, v: &AlgebraElement<S>) -> AlgebraElement<S> {
        let table = self.dynkin();
        let mut acc = AlgebraElement::zero(self.dim());
        for (last, val) in [(0u32, u), (1u32, v)] {
            if !val.is_zero() {
                self.bch_dfs(table, u, v, last, 1, val.clone(), &mut acc);
            }
        }
        acc
    }

    /// `suffix` is the nested commutator of the word `bits` (length `len`).
    #[allow(clippy::too_many_arguments)]
    fn bch_dfs<S: Scalar>(
        &self,
        table: &DynkinTable,
        u: &AlgebraElement<S>,
        v: &AlgebraElement<S>,
        bits: u32,
        len: u32,
        suffix: AlgebraElement<S>,
        acc: &mut AlgebraElement<S>,
    ) {
        let c = table.coefficient(bits, len);
        if !c.is_zero() {
            *acc = acc.add(&suffix.scale(&S::from_rational(c)));
        }
        if len == table.max_len() {
            return;
        }
        for (l, x) in [(0u32, u), (1u32, v)] {
            let next = self.bracket(x, &suffix);
            if !next.is_zero() {
                self.bch_dfs(table, u, v, bits | l << len, len + 1, next, acc);
            }
        }
    }

    /// Left-to-right product `exp(a_1) ⋯ exp(a_r)` in first-kind coordinates.
    pub fn bch_chain<S: Scalar>(&self, factors: &[AlgebraElement<S>]) -> AlgebraElement<S> {
        factors.iter().fold(AlgebraElement::zero(self.dim()), |acc, f| self.bch(&acc, f))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::algebra::RawAlgebra;
    use crate::scalar::{int, rat};

    fn coeff(word: &str) -> Rational {
        let m = word.len() as u32;
        let bits = word.chars().fold(0, |b, c| b << 1 | u32::from(c == 'Y'));
        word_coefficient(bits, m)
    }

    #[test]
    fn low_order_coefficients() {
        assert_eq!(coeff("X"), int(1));
        assert_eq!(coeff("Y"), int(1));
        // [X,Y]/2
        assert_eq!(coeff("XY") - coeff("YX"), rat(1, 2));
        // [X,[X,Y]]/12 and [Y,[Y,X]]/12
        assert_eq!(coeff("XXY") - coeff("XYX"), rat(1, 12));
        assert_eq!(coeff("YYX") - coeff("YXY"), rat(1, 12));
    }

    #[test]
    fn heisenberg_product() {
        let raw = RawAlgebra::new(&["e1", "e2", "e3"], &[1, 1, 2]).bracket("e1", "e2", &[("e3", int(1))]);
        let h = StratifiedAlgebra::validate(&raw).unwrap();
        let (a, b) = (rat(3, 2), rat(-5, 7));
        let u = AlgebraElement::new(vec![a.clone(), int(0), int(0)]);
        let v = AlgebraElement::new(vec![int(0), b.clone(), int(0)]);
        let z = h.bch(&u, &v);
        assert_eq!(z.coeffs, vec![a.clone(), b.clone(), &a * &b / int(2)]);
    }

    #[test]
    fn step_three_term() {
        // [v1, w1] = w2, [v1, w2] = v2: bch(v1, w1) carries [v1,[v1,w1]]/12 on v2
        let raw = RawAlgebra::new(&["w1", "w2", "v1", "v2"], &[1, 2, 1, 3])
            .bracket("v1", "w1", &[("w2", int(1))])
            .bracket("v1", "w2", &[("v2", int(1))]);
        let alg = StratifiedAlgebra::validate(&raw).unwrap();
        let v1 = AlgebraElement::<Rational>::basis(4, 2);
        let w1 = AlgebraElement::<Rational>::basis(4, 0);
        let z = alg.bch(&v1, &w1);
        assert_eq!(z.coeffs, vec![int(1), rat(1, 2), int(1), rat(1, 12)]);
    }
}
