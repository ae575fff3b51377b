//! Closed-form representation theory of `𝔰𝔭(m)` and `𝔰𝔭(1)`: highest weights,
//! Weyl dimensions, Casimir eigenvalues, and the label predicates for the
//! summands `Sym^k H ⊗ Λ^{a,b}₀E` of `Λ^p(H ⊗ E)`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{rat, Scalar};

/// A dominant integral weight `λ₁ ≥ … ≥ λ_m ≥ 0` of `𝔰𝔭(m)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HighestWeight(Vec<i64>);

impl HighestWeight {
    pub fn new(entries: Vec<i64>) -> Result<Self> {
        let dominant = entries.windows(2).all(|w| w[0] >= w[1]) && entries.last().is_none_or(|&x| x >= 0);
        if !dominant {
            return Err(Error::InvalidParameter(format!("weight {entries:?} is not dominant")));
        }
        Ok(HighestWeight(entries))
    }

    /// `λ` padded with zeros to rank `m`.
    pub fn padded(&self, m: usize) -> Result<Vec<i64>> {
        if self.0.len() > m && self.0[m..].iter().any(|&x| x != 0) {
            return Err(Error::InvalidParameter(format!("weight {:?} has more than m = {m} nonzero entries", self.0)));
        }
        let mut v = self.0.clone();
        v.resize(m, 0);
        Ok(v)
    }

    pub fn entries(&self) -> &[i64] {
        &self.0
    }
}

impl fmt::Display for HighestWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(i64::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// `ρ = (m, m−1, …, 1)`.
pub fn rho(m: usize) -> HighestWeight {
    HighestWeight((1..=m as i64).rev().collect())
}

/// The summand `Sym^k H ⊗ Λ^{a,b}₀E` with `0 ≤ b ≤ a`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RepLabel {
    pub k: usize,
    pub a: usize,
    pub b: usize,
}

impl RepLabel {
    pub fn new(k: usize, a: usize, b: usize) -> Self {
        RepLabel { k, a, b }
    }

    pub fn validate(&self, m: usize) -> Result<()> {
        if self.b > self.a || self.a > m {
            return Err(Error::InvalidParameter(format!("label {self} violates 0 ≤ b ≤ a ≤ m = {m}")));
        }
        Ok(())
    }

    /// `(2, …, 2, 1, …, 1, 0, …)` with `b` twos and `a − b` ones.
    pub fn weight(&self, m: usize) -> Result<HighestWeight> {
        self.validate(m)?;
        Ok(weight(self.a, self.b, m))
    }

    /// `(k + 1) · dim Λ^{a,b}₀E`.
    pub fn dimension(&self, m: usize) -> Result<u64> {
        Ok((self.k as u64 + 1) * weyl_dimension(&self.weight(m)?, m)?)
    }
}

impl fmt::Display for RepLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.k, self.a, self.b)
    }
}

/// Highest weight of `Λ^{a,b}₀E`, assuming `b ≤ a ≤ m`.
pub fn weight(a: usize, b: usize, m: usize) -> HighestWeight {
    HighestWeight(
        (0..m)
            .map(|i| {
                if i < b {
                    2
                } else if i < a {
                    1
                } else {
                    0
                }
            })
            .collect(),
    )
}

fn dot(x: &[i64], y: &[i64]) -> i64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// `c_π = ((λ, λ) + (λ, 2ρ)) / (4(m+1))`, so that the Casimir of the Killing
/// form acts as `−c_π`.
pub fn casimir_spm_killing(lambda: &HighestWeight, m: usize) -> Result<Scalar> {
    let l = lambda.padded(m)?;
    let r = rho(m);
    let two_rho: Vec<i64> = r.0.iter().map(|x| 2 * x).collect();
    Ok(rat(dot(&l, &l) + dot(&l, &two_rho), 4 * (m as i64 + 1)))
}

/// Representations with a closed-form Casimir eigenvalue.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClosedForm {
    /// `Sym^k E`.
    SymE(usize),
    /// `Λ^a₀E`.
    Alt(usize),
    /// `Λ^{a,b}₀E`.
    Cartan { a: usize, b: usize },
    /// `Sym^k H` for `𝔰𝔭(1)`.
    SymH(usize),
}

/// Closed-form Casimir eigenvalue (Killing normalization), cross-checked
/// against [`casimir_spm_killing`] on the corresponding highest weight.
pub fn casimir_label(rep: ClosedForm, m: usize) -> Result<Scalar> {
    let mm = m as i64;
    let den = 4 * (mm + 1);
    let (value, lambda) = match rep {
        ClosedForm::SymE(k) => {
            let k = k as i64;
            let mut w = vec![0; m.max(1)];
            w[0] = k;
            (rat(k * (k + 2 * mm), den), HighestWeight(w))
        }
        ClosedForm::Alt(a) => {
            if a > m {
                return Err(Error::InvalidParameter(format!("Λ^{a}₀E needs a ≤ m = {m}")));
            }
            let a = a as i64;
            (rat(a * (2 - a + 2 * mm), den), weight(a as usize, 0, m))
        }
        ClosedForm::Cartan { a, b } => {
            RepLabel::new(0, a, b).validate(m)?;
            let (a, b) = (a as i64, b as i64);
            (rat(2 * b - a * a - b * b + 2 * (a + b) * (mm + 1), den), weight(a as usize, b as usize, m))
        }
        ClosedForm::SymH(k) => {
            let k = k as i64;
            (rat(k * (k + 2), 8), HighestWeight(vec![k]))
        }
    };
    let check_rank = if let ClosedForm::SymH(_) = rep { 1 } else { m };
    let via_weight = casimir_spm_killing(&lambda, check_rank)?;
    if via_weight != value {
        return Err(Error::Internal(format!(
            "closed form {value} disagrees with weight formula {via_weight} for {rep:?}"
        )));
    }
    Ok(value)
}

/// `J = −k(k+2)` on `Sym^k H ⊗ …`.
pub fn eigenvalue_j(k: usize) -> Scalar {
    let k = k as i64;
    Scalar::from(-k * (k + 2))
}

/// `P(k,a,b,p) = ¼(p(4m−p+6) − k(k+2) − 4b + 2a² + 2b² − 4(a+b)(m+1))`, the
/// eigenvalue of `C`.
pub fn eigenvalue_c(label: RepLabel, p: usize, m: usize) -> Scalar {
    let (k, a, b, p, m) = (label.k as i64, label.a as i64, label.b as i64, p as i64, m as i64);
    rat(p * (4 * m - p + 6) - k * (k + 2) - 4 * b + 2 * a * a + 2 * b * b - 4 * (a + b) * (m + 1), 4)
}

/// `½(p−a)(2m+2−p−a)`, the simplified value of `P(p,a,0,p)`.
pub fn eigenvalue_c_simplified(a: usize, p: usize, m: usize) -> Scalar {
    let (a, p, m) = (a as i64, p as i64, m as i64);
    rat((p - a) * (2 * m + 2 - p - a), 2)
}

/// Weyl dimension for `𝔰𝔭(m)`, positive roots `ε_i ± ε_j` (`i < j`) and `2ε_i`.
pub fn weyl_dimension(lambda: &HighestWeight, m: usize) -> Result<u64> {
    let l = lambda.padded(m)?;
    let r = rho(m).0;
    let lr: Vec<i64> = l.iter().zip(&r).map(|(x, y)| x + y).collect();
    let mut num = Scalar::from(1);
    let mut den = Scalar::from(1);
    for i in 0..m {
        num *= Scalar::from(2 * lr[i]);
        den *= Scalar::from(2 * r[i]);
        for j in i + 1..m {
            num *= Scalar::from((lr[i] - lr[j]) * (lr[i] + lr[j]));
            den *= Scalar::from((r[i] - r[j]) * (r[i] + r[j]));
        }
    }
    let d = num / den;
    d.to_i64()
        .filter(|_| d.is_integer())
        .map(|v| v as u64)
        .ok_or_else(|| Error::Internal(format!("non-integral Weyl dimension {d}")))
}

/// All `(k,a,b)` with `0 ≤ b ≤ a ≤ m`, `2b ≤ min(p−k, 4m−p−k)`,
/// `2a ≤ min(p+k, 4m−p+k)` and `k ≡ p ≡ a+b (mod 2)`.
///
/// These are necessary conditions only: the set may contain labels that do
/// not occur in `Λ^p`.
pub fn admissible_labels(p: usize, m: usize) -> Vec<RepLabel> {
    let n = 4 * m;
    if p > n {
        return Vec::new();
    }
    let q = n - p;
    let mut out = Vec::new();
    for k in 0..=p.min(q) {
        if !(k + p).is_multiple_of(2) {
            continue;
        }
        for a in 0..=m {
            if 2 * a > (p + k).min(q + k) {
                continue;
            }
            for b in 0..=a {
                if 2 * b <= (p - k).min(q - k) && (a + b + p).is_multiple_of(2) {
                    out.push(RepLabel::new(k, a, b));
                }
            }
        }
    }
    out
}

/// Labels meeting every condition of [`admissible_labels`] except `a ≤ m`.
/// They never occur, since `Λ^a₀E = 0` for `a > m`.
pub fn excluded_by_rank(p: usize, m: usize) -> Vec<RepLabel> {
    let n = 4 * m;
    if p > n {
        return Vec::new();
    }
    let q = n - p;
    let mut out = Vec::new();
    for k in (0..=p.min(q)).filter(|k| (k + p).is_multiple_of(2)) {
        for a in m + 1..=(p + k).min(q + k) / 2 {
            for b in 0..=a {
                if 2 * b <= (p - k).min(q - k) && (a + b + p).is_multiple_of(2) {
                    out.push(RepLabel::new(k, a, b));
                }
            }
        }
    }
    out
}

/// `|k − k′| = 1` and `|a − a′| + |b − b′| = 1`.
pub fn adjacent(x: RepLabel, y: RepLabel) -> bool {
    x.k.abs_diff(y.k) == 1 && x.a.abs_diff(y.a) + x.b.abs_diff(y.b) == 1
}

/// Joint eigenvalues `(j, c)` of `J` and `C`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EigenPair {
    pub j: Scalar,
    pub c: Scalar,
}

impl EigenPair {
    pub fn new(j: Scalar, c: Scalar) -> Self {
        EigenPair { j, c }
    }

    pub fn of_label(label: RepLabel, p: usize, m: usize) -> Self {
        EigenPair { j: eigenvalue_j(label.k), c: eigenvalue_c(label, p, m) }
    }

    /// `k` with `j = −k(k+2)`, if any.
    pub fn k(&self) -> Option<usize> {
        let target = -&self.j;
        if target.is_negative() || !target.is_integer() {
            return None;
        }
        let t = target.to_i64()?;
        (0..)
            .map(|k: i64| (k, k * (k + 2)))
            .take_while(|&(_, v)| v <= t)
            .find(|&(_, v)| v == t)
            .map(|(k, _)| k as usize)
    }
}

impl fmt::Display for EigenPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.j, self.c)
    }
}

/// `true` iff `P(p,a,0,p) = ½(p−a)(2m+2−p−a)` for every `a, p ≤ 4m`.
pub fn simplification_holds(m: usize) -> bool {
    (0..=4 * m)
        .all(|p| (0..=4 * m).all(|a| eigenvalue_c(RepLabel::new(p, a, 0), p, m) == eigenvalue_c_simplified(a, p, m)))
}

/// Sum of label dimensions for a list of `(label, multiplicity)` pairs.
pub fn total_dimension(entries: &[(RepLabel, u64)], m: usize) -> Result<u64> {
    entries.iter().try_fold(0u64, |acc, (l, mult)| Ok(acc + mult * l.dimension(m)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    #[test]
    fn rho_values() {
        assert_eq!(rho(1).entries(), &[1]);
        assert_eq!(rho(2).entries(), &[2, 1]);
        assert_eq!(rho(4).entries(), &[4, 3, 2, 1]);
    }

    #[test]
    fn dominance_is_enforced() {
        assert!(HighestWeight::new(vec![1, 2]).is_err());
        assert!(HighestWeight::new(vec![1, -1]).is_err());
        assert!(HighestWeight::new(vec![2, 2, 0]).is_ok());
    }

    #[test]
    fn killing_casimir_table() {
        for m in 1..=8 {
            let adj = HighestWeight::new(vec![2]).unwrap();
            assert_eq!(casimir_spm_killing(&adj, m).unwrap(), Scalar::from(1));
            let e = HighestWeight::new(vec![1]).unwrap();
            assert_eq!(casimir_spm_killing(&e, m).unwrap(), rat(2 * m as i64 + 1, 4 * (m as i64 + 1)));
            assert!(casimir_spm_killing(&HighestWeight::new(vec![]).unwrap(), m).unwrap().is_zero());
        }
    }

    #[test]
    fn closed_forms_agree() {
        for m in 1..=8 {
            for k in 0..6 {
                casimir_label(ClosedForm::SymE(k), m).unwrap();
            }
            for a in 0..=m {
                let alt = casimir_label(ClosedForm::Alt(a), m).unwrap();
                assert_eq!(alt, casimir_label(ClosedForm::Cartan { a, b: 0 }, m).unwrap());
                for b in 0..=a {
                    casimir_label(ClosedForm::Cartan { a, b }, m).unwrap();
                }
            }
        }
        assert_eq!(casimir_label(ClosedForm::Cartan { a: 1, b: 1 }, 2).unwrap(), Scalar::from(1));
        assert_eq!(casimir_label(ClosedForm::SymH(2), 2).unwrap(), Scalar::from(1));
        assert!(casimir_label(ClosedForm::Cartan { a: 1, b: 2 }, 2).is_err());
    }

    #[test]
    fn eigenvalues() {
        assert!(eigenvalue_j(0).is_zero());
        assert_eq!(eigenvalue_j(1), Scalar::from(-3));
        assert_eq!(eigenvalue_j(4), Scalar::from(-24));
        assert!(eigenvalue_c(RepLabel::new(0, 0, 0), 0, 2).is_zero());
        for m in 1..=6 {
            assert!(simplification_holds(m));
        }
    }

    #[test]
    fn weyl_dimensions() {
        assert_eq!(weyl_dimension(&HighestWeight::new(vec![0, 0]).unwrap(), 2).unwrap(), 1);
        assert_eq!(weyl_dimension(&HighestWeight::new(vec![2, 0]).unwrap(), 2).unwrap(), 10);
        assert_eq!(weyl_dimension(&HighestWeight::new(vec![2, 1]).unwrap(), 2).unwrap(), 16);
        assert_eq!(weyl_dimension(&HighestWeight::new(vec![1]).unwrap(), 3).unwrap(), 6);
        // adjoint is m(2m+1)
        for m in 1..=6 {
            assert_eq!(weyl_dimension(&HighestWeight::new(vec![2]).unwrap(), m).unwrap(), (m * (2 * m + 1)) as u64);
        }
    }

    #[test]
    fn admissible_sets() {
        assert_eq!(admissible_labels(0, 2), vec![RepLabel::new(0, 0, 0)]);
        let mut got = admissible_labels(2, 2);
        got.sort();
        let want = vec![RepLabel::new(0, 0, 0), RepLabel::new(0, 1, 1), RepLabel::new(2, 0, 0), RepLabel::new(2, 2, 0)];
        assert_eq!(got, want);
        let p3 = admissible_labels(3, 2);
        assert!(p3.contains(&RepLabel::new(1, 2, 1)));
        assert!(p3.contains(&RepLabel::new(3, 1, 0)));
        assert!(p3.iter().all(|l| l.a <= 2));
    }

    #[test]
    fn admissible_is_symmetric() {
        for m in 1..=5 {
            for p in 0..=4 * m {
                let mut x = admissible_labels(p, m);
                let mut y = admissible_labels(4 * m - p, m);
                x.sort();
                y.sort();
                assert_eq!(x, y);
            }
        }
    }

    #[test]
    fn rank_exclusions() {
        assert_eq!(excluded_by_rank(3, 2), vec![RepLabel::new(3, 3, 0)]);
        assert!(excluded_by_rank(2, 2).is_empty());
    }

    #[test]
    fn adjacency() {
        assert!(adjacent(RepLabel::new(1, 1, 0), RepLabel::new(0, 1, 1)));
        assert!(!adjacent(RepLabel::new(1, 1, 0), RepLabel::new(1, 2, 0)));
        assert!(adjacent(RepLabel::new(2, 2, 0), RepLabel::new(1, 1, 0)));
    }

    #[test]
    fn eigenpair_k() {
        assert_eq!(EigenPair::new(Scalar::from(-24), Scalar::zero()).k(), Some(4));
        assert_eq!(EigenPair::new(Scalar::from(0), Scalar::zero()).k(), Some(0));
        assert_eq!(EigenPair::new(Scalar::from(-5), Scalar::zero()).k(), None);
    }
}
