use num_traits::Zero;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::rational::{self, Exact, Rational};
use crate::verdict::{Tally, Verdict};

/// Exact joint law of `(X, Y)`, indexed `table[k][l] = Pr(X = k, Y = l)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointXYLaw {
    table: Vec<Vec<Rational>>,
    i_urns: Vec<usize>,
    j_urns: Vec<usize>,
}

impl JointXYLaw {
    /// `table` must be rectangular; it is normalized here.
    pub(crate) fn from_weights(
        mut table: Vec<Vec<Rational>>,
        i_urns: Vec<usize>,
        j_urns: Vec<usize>,
    ) -> Self {
        let total: Rational = table.iter().flatten().sum();
        debug_assert!(!total.is_zero());
        for row in &mut table {
            for p in row.iter_mut() {
                *p = &*p / &total;
            }
        }
        JointXYLaw {
            table,
            i_urns,
            j_urns,
        }
    }

    pub fn i_urns(&self) -> &[usize] {
        &self.i_urns
    }

    pub fn j_urns(&self) -> &[usize] {
        &self.j_urns
    }

    pub fn table(&self) -> &[Vec<Rational>] {
        &self.table
    }

    pub fn x_values(&self) -> usize {
        self.table.len()
    }

    pub fn y_values(&self) -> usize {
        self.table.first().map_or(0, Vec::len)
    }

    pub fn prob(&self, k: usize, l: usize) -> Rational {
        self.table
            .get(k)
            .and_then(|r| r.get(l))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn x_marginal(&self) -> Vec<Rational> {
        self.table.iter().map(|r| r.iter().sum()).collect()
    }

    pub fn y_marginal(&self) -> Vec<Rational> {
        (0..self.y_values())
            .map(|l| self.table.iter().map(|r| &r[l]).sum())
            .collect()
    }

    /// `μ_k(l) = Pr(Y = l | X = k)`, or `None` when `Pr(X = k) = 0`.
    pub fn mu(&self, k: usize) -> Option<Vec<Rational>> {
        let row = self.table.get(k)?;
        let px: Rational = row.iter().sum();
        if px.is_zero() {
            return None;
        }
        Some(row.iter().map(|p| p / &px).collect())
    }

    /// Law of `Z = X + Y`.
    pub fn z_law(&self) -> Vec<Rational> {
        let len = self.x_values() + self.y_values();
        let mut z = vec![Rational::zero(); len.saturating_sub(1).max(1)];
        for (k, row) in self.table.iter().enumerate() {
            for (l, p) in row.iter().enumerate() {
                z[k + l] += p;
            }
        }
        z
    }

    pub fn support(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        for (k, row) in self.table.iter().enumerate() {
            for (l, p) in row.iter().enumerate() {
                if !p.is_zero() {
                    out.push(vec![k, l]);
                }
            }
        }
        out
    }

    /// `μ_{k+1}(l+1)/μ_{k+1}(l) <= μ_k(l+1)/μ_k(l)` wherever neither side is `0/0`.
    pub fn check_ratio_table(&self) -> Verdict {
        let mut tally = Tally::default();
        for k in 0..self.x_values().saturating_sub(1) {
            for l in 0..self.y_values().saturating_sub(1) {
                let a = &self.table[k + 1][l + 1];
                let b = &self.table[k + 1][l];
                let c = &self.table[k][l + 1];
                let d = &self.table[k][l];
                let outcome = rational::ratio_le(a, b, c, d);
                if tally.record(outcome, || {
                    json!({
                        "k": k, "l": l,
                        "lhs": [rational::format(a), rational::format(b)],
                        "rhs": [rational::format(c), rational::format(d)],
                    })
                }) {
                    break;
                }
            }
            if tally.failed() {
                break;
            }
        }
        tally.finish("ratio_table")
    }

    /// `X ↓ Y`: `{X >= s} ↓ {Y >= t}` for all thresholds.
    pub fn check_negative_dependence(&self) -> Verdict {
        let mut tally = Tally::default();
        let px = self.x_marginal();
        let py = self.y_marginal();
        for s in 1..self.x_values() {
            let ps: Rational = px[s..].iter().sum();
            for t in 1..self.y_values() {
                let pt: Rational = py[t..].iter().sum();
                let joint: Rational = self.table[s..].iter().flat_map(|r| &r[t..]).sum();
                let ok = joint <= &ps * &pt;
                if tally.record(Some(ok), || {
                    json!({"s": s, "t": t, "joint": rational::format(&joint),
                           "product": rational::format(&(&ps * &pt))})
                }) {
                    return tally.finish("x_down_y");
                }
            }
        }
        tally.finish("x_down_y")
    }

    pub fn to_file(&self) -> XYLawFile {
        XYLawFile {
            i_urns: self.i_urns.clone(),
            j_urns: self.j_urns.clone(),
            table: self
                .table
                .iter()
                .map(|r| r.iter().cloned().map(Exact).collect())
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct XYLawFile {
    pub i_urns: Vec<usize>,
    pub j_urns: Vec<usize>,
    pub table: Vec<Vec<Exact>>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn antidiagonal_law() {
        // X + Y = 2 exactly.
        let law = JointXYLaw::from_weights(
            vec![
                vec![int(0), int(0), int(1)],
                vec![int(0), int(2), int(0)],
                vec![int(1), int(0), int(0)],
            ],
            vec![0],
            vec![1],
        );
        assert_eq!(law.z_law(), vec![int(0), int(0), int(1), int(0), int(0)]);
        assert!(law.check_ratio_table().is_holds());
        assert!(law.check_negative_dependence().is_holds());
        assert_eq!(law.mu(1).unwrap(), vec![int(0), int(1), int(0)]);
        assert_eq!(law.x_marginal(), vec![rat(1, 4), rat(1, 2), rat(1, 4)]);
    }

    #[test]
    fn positively_dependent_law_fails() {
        let law = JointXYLaw::from_weights(
            vec![vec![int(1), int(0)], vec![int(0), int(1)]],
            vec![0],
            vec![1],
        );
        assert!(law.check_ratio_table().is_violated());
        assert!(law.check_negative_dependence().is_violated());
    }
}
