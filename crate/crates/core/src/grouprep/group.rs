use std::collections::BTreeSet;

use rand::Rng;

use crate::error::{Error, Result};
use crate::random;

/// Finite group given by its multiplication table.
///
/// `mult[g][h]` is the index of `g·h`. Conjugacy classes are ordered by
/// their smallest element index unless supplied explicitly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    labels: Vec<String>,
    mult: Vec<Vec<usize>>,
    identity: usize,
    inverse: Vec<usize>,
    classes: Vec<Vec<usize>>,
    class_of: Vec<usize>,
}

impl FiniteGroup {
    /// Validates the table (Latin square, identity, inverses, associativity)
    /// and computes or checks the conjugacy classes.
    pub fn from_table(
        labels: Vec<String>,
        mult: Vec<Vec<usize>>,
        classes: Option<Vec<Vec<usize>>>,
    ) -> Result<Self> {
        let n = mult.len();
        if n == 0 {
            return Err(Error::InvalidGroup("empty multiplication table".into()));
        }
        if labels.len() != n {
            return Err(Error::InvalidGroup(format!(
                "{} labels for a table of order {n}",
                labels.len()
            )));
        }
        if labels.iter().collect::<BTreeSet<_>>().len() != n {
            return Err(Error::InvalidGroup("element labels are not unique".into()));
        }
        for (i, row) in mult.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidGroup(format!(
                    "row {i} has length {}",
                    row.len()
                )));
            }
            if row.iter().any(|&x| x >= n) {
                return Err(Error::InvalidGroup(format!(
                    "row {i} has an out-of-range entry"
                )));
            }
            if row.iter().collect::<BTreeSet<_>>().len() != n {
                return Err(Error::InvalidGroup(format!("row {i} repeats an element")));
            }
        }
        for j in 0..n {
            if (0..n).map(|i| mult[i][j]).collect::<BTreeSet<_>>().len() != n {
                return Err(Error::InvalidGroup(format!(
                    "column {j} repeats an element"
                )));
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|g| mult[e][g] == g && mult[g][e] == g))
            .ok_or_else(|| Error::InvalidGroup("no identity element".into()))?;
        let inverse = (0..n)
            .map(|g| {
                (0..n)
                    .find(|&h| mult[g][h] == identity && mult[h][g] == identity)
                    .ok_or_else(|| Error::InvalidGroup(format!("element {g} has no inverse")))
            })
            .collect::<Result<Vec<_>>>()?;

        let assoc = |a: usize, b: usize, c: usize| mult[mult[a][b]][c] == mult[a][mult[b][c]];
        if n <= 64 {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        if !assoc(a, b, c) {
                            return Err(Error::InvalidGroup(format!(
                                "associativity fails on ({a}, {b}, {c})"
                            )));
                        }
                    }
                }
            }
        } else {
            let mut rng = random::rng(0);
            for _ in 0..100_000 {
                let (a, b, c) = (
                    rng.gen_range(0..n),
                    rng.gen_range(0..n),
                    rng.gen_range(0..n),
                );
                if !assoc(a, b, c) {
                    return Err(Error::InvalidGroup(format!(
                        "associativity fails on ({a}, {b}, {c})"
                    )));
                }
            }
        }

        let mut group = Self {
            labels,
            mult,
            identity,
            inverse,
            classes: Vec::new(),
            class_of: vec![0; n],
        };
        let computed = group.conjugacy_orbits();
        let classes = match classes {
            None => computed,
            Some(given) => {
                let mut seen = vec![false; n];
                for class in &given {
                    for &g in class {
                        if g >= n || seen[g] {
                            return Err(Error::InvalidGroup(
                                "conjugacy classes do not partition the group".into(),
                            ));
                        }
                        seen[g] = true;
                    }
                }
                if seen.iter().any(|s| !s) {
                    return Err(Error::InvalidGroup(
                        "conjugacy classes do not cover the group".into(),
                    ));
                }
                let as_sets = |cs: &[Vec<usize>]| {
                    cs.iter()
                        .map(|c| c.iter().copied().collect::<BTreeSet<_>>())
                        .collect::<BTreeSet<_>>()
                };
                if as_sets(&given) != as_sets(&computed) {
                    return Err(Error::InvalidGroup(
                        "supplied classes are not the conjugacy classes".into(),
                    ));
                }
                given
            }
        };
        for (c, class) in classes.iter().enumerate() {
            for &g in class {
                group.class_of[g] = c;
            }
        }
        group.classes = classes;
        Ok(group)
    }

    fn conjugacy_orbits(&self) -> Vec<Vec<usize>> {
        let n = self.order();
        let mut assigned = vec![false; n];
        let mut classes = Vec::new();
        for g in 0..n {
            if assigned[g] {
                continue;
            }
            let orbit: BTreeSet<usize> = (0..n)
                .map(|h| self.mul(self.mul(h, g), self.inverse[h]))
                .collect();
            for &x in &orbit {
                assigned[x] = true;
            }
            classes.push(orbit.into_iter().collect());
        }
        classes
    }

    pub fn order(&self) -> usize {
        self.mult.len()
    }

    #[inline]
    pub fn mul(&self, g: usize, h: usize) -> usize {
        self.mult[g][h]
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn inverse(&self, g: usize) -> usize {
        self.inverse[g]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn class_of(&self, g: usize) -> usize {
        self.class_of[g]
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    /// Class containing the inverses of the given class.
    pub fn inverse_class(&self, c: usize) -> usize {
        self.class_of[self.inverse[self.classes[c][0]]]
    }

    pub fn multiplication_table(&self) -> &[Vec<usize>] {
        &self.mult
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order();
        (0..n).all(|a| (0..n).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn cyclic(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGroup("cyclic group order must be ≥ 1".into()));
        }
        let labels = (0..n)
            .map(|k| match k {
                0 => "e".to_string(),
                1 => "a".to_string(),
                _ => format!("a^{k}"),
            })
            .collect();
        let mult = (0..n)
            .map(|i| (0..n).map(|j| (i + j) % n).collect())
            .collect();
        Self::from_table(labels, mult, None)
    }

    /// `Z₂ × Z₂` with elements `e, a, b, ab` (index = bit pattern).
    pub fn klein_four() -> Result<Self> {
        let labels = ["e", "a", "b", "ab"].map(String::from).to_vec();
        let mult = (0..4).map(|i| (0..4).map(|j| i ^ j).collect()).collect();
        Self::from_table(labels, mult, None)
    }

    /// Dihedral group of order `2n` with `r^n = s² = e`, `r s = s r⁻¹`.
    /// Element `s^f r^k` has index `f·n + k`.
    pub fn dihedral(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidGroup("dihedral group needs n ≥ 2".into()));
        }
        let rot = |k: usize| match k {
            0 => String::new(),
            1 => "r".to_string(),
            _ => format!("r^{k}"),
        };
        let mut labels = Vec::with_capacity(2 * n);
        for f in 0..2 {
            for k in 0..n {
                labels.push(match (f, k) {
                    (0, 0) => "e".to_string(),
                    (0, _) => rot(k),
                    _ => format!("s{}", rot(k)),
                });
            }
        }
        let mult = (0..2 * n)
            .map(|g| {
                (0..2 * n)
                    .map(|h| {
                        let (f1, k1) = (g / n, g % n);
                        let (f2, k2) = (h / n, h % n);
                        let k1 = if f2 == 1 { (n - k1) % n } else { k1 };
                        ((f1 + f2) % 2) * n + (k1 + k2) % n
                    })
                    .collect()
            })
            .collect();
        Self::from_table(labels, mult, None)
    }
}
