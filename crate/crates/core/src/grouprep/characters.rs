use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::{abs2, czero, Real, C};

use super::group::FiniteGroup;

#[derive(Debug, Clone, PartialEq)]
pub struct Irrep<T: Real = f64> {
    pub name: String,
    pub dim: usize,
    /// One value per conjugacy class, in the group's class order.
    pub characters: Vec<C<T>>,
}

/// Character table validated against a group: one irrep per class,
/// `Σ d_λ² = |G|`, and orthonormal rows.
#[derive(Debug, Clone, PartialEq)]
pub struct CharacterTable<T: Real = f64> {
    irreps: Vec<Irrep<T>>,
}

impl<T: Real> CharacterTable<T> {
    pub fn new(group: &FiniteGroup, irreps: Vec<Irrep<T>>) -> Result<Self> {
        let classes = group.class_count();
        if irreps.len() != classes {
            return Err(Error::InvalidCharacterTable(format!(
                "{} irreps for {classes} conjugacy classes",
                irreps.len()
            )));
        }
        let id_class = group.class_of(group.identity());
        for irrep in &irreps {
            if irrep.characters.len() != classes {
                return Err(Error::InvalidCharacterTable(format!(
                    "irrep '{}' has {} values for {classes} classes",
                    irrep.name,
                    irrep.characters.len()
                )));
            }
            let at_identity = irrep.characters[id_class];
            let d = T::from_usize(irrep.dim).unwrap();
            if irrep.dim == 0 || (at_identity - C::new(d, T::zero())).norm() > T::lit(1e-9) {
                return Err(Error::InvalidCharacterTable(format!(
                    "irrep '{}': character at the identity is {at_identity}, expected dimension {}",
                    irrep.name, irrep.dim
                )));
            }
        }
        let sum_sq: usize = irreps.iter().map(|i| i.dim * i.dim).sum();
        if sum_sq != group.order() {
            return Err(Error::InvalidCharacterTable(format!(
                "sum of squared dimensions {sum_sq} differs from group order {}",
                group.order()
            )));
        }
        let table = Self { irreps };
        let tol = T::lit(T::default_tolerances().ortho);
        for a in 0..table.irreps.len() {
            for b in 0..table.irreps.len() {
                let ip = table.inner_product(group, a, b);
                let expected = if a == b { T::one() } else { T::zero() };
                if (ip - C::new(expected, T::zero())).norm() > tol {
                    return Err(Error::InvalidCharacterTable(format!(
                        "rows '{}' and '{}' have inner product {ip}",
                        table.irreps[a].name, table.irreps[b].name
                    )));
                }
            }
        }
        Ok(table)
    }

    /// `(1/|G|) Σ_g χ_a(g) conj(χ_b(g))`.
    pub fn inner_product(&self, group: &FiniteGroup, a: usize, b: usize) -> C<T> {
        let n = T::from_usize(group.order()).unwrap();
        let sum = (0..group.order()).fold(czero(), |acc, g| {
            acc + self.character(group, a, g) * self.character(group, b, g).conj()
        });
        sum.unscale(n)
    }

    pub fn irreps(&self) -> &[Irrep<T>] {
        &self.irreps
    }

    pub fn len(&self) -> usize {
        self.irreps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.irreps.is_empty()
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.irreps.iter().position(|i| i.name == name)
    }

    /// `χ_λ(g)` for irrep index `irrep` and element index `g`.
    pub fn character(&self, group: &FiniteGroup, irrep: usize, g: usize) -> C<T> {
        self.irreps[irrep].characters[group.class_of(g)]
    }

    /// Largest `|Σ_λ |χ_λ(c)|² − |G|/|c||` over classes (column orthogonality).
    pub fn column_residual(&self, group: &FiniteGroup) -> T {
        let n = T::from_usize(group.order()).unwrap();
        group
            .classes()
            .iter()
            .enumerate()
            .map(|(c, members)| {
                let s = self
                    .irreps
                    .iter()
                    .fold(T::zero(), |acc, i| acc + abs2(i.characters[c]));
                (s - n / T::from_usize(members.len()).unwrap()).abs()
            })
            .fold(T::zero(), |m, x| m.max(x))
    }
}

/// Groups with a hard-coded character table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuiltinGroup {
    Cyclic(usize),
    KleinFour,
    S3,
    D4,
}

impl BuiltinGroup {
    /// Accepts `Z<n>`, `Z2xZ2`, `S3`, `D4` (case-insensitive).
    pub fn parse(name: &str) -> Result<Self> {
        let upper = name.trim().to_ascii_uppercase();
        match upper.as_str() {
            "Z2XZ2" | "Z2*Z2" | "V4" | "KLEIN" => return Ok(Self::KleinFour),
            "S3" | "D3" => return Ok(Self::S3),
            "D4" => return Ok(Self::D4),
            _ => {}
        }
        if let Some(n) = upper
            .strip_prefix('Z')
            .and_then(|s| s.parse::<usize>().ok())
        {
            if n >= 1 {
                return Ok(Self::Cyclic(n));
            }
        }
        Err(Error::UnknownGroup(name.to_string()))
    }

    pub fn name(&self) -> String {
        match self {
            Self::Cyclic(n) => format!("Z{n}"),
            Self::KleinFour => "Z2xZ2".into(),
            Self::S3 => "S3".into(),
            Self::D4 => "D4".into(),
        }
    }
}

impl fmt::Display for BuiltinGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

fn collapse<T: Real>(
    group: &FiniteGroup,
    name: &str,
    dim: usize,
    chi: impl Fn(usize) -> C<T>,
) -> Irrep<T> {
    Irrep {
        name: name.to_string(),
        dim,
        characters: group.classes().iter().map(|c| chi(c[0])).collect(),
    }
}

/// Built-in group with its verified character table.
pub fn builtin_group<T: Real>(which: BuiltinGroup) -> Result<(FiniteGroup, CharacterTable<T>)> {
    let real = |x: f64| C::new(T::lit(x), T::zero());
    let (group, irreps) = match which {
        BuiltinGroup::Cyclic(n) => {
            let g = FiniteGroup::cyclic(n)?;
            let irreps = (0..n)
                .map(|j| {
                    let name = if j == 0 {
                        "trivial".to_string()
                    } else {
                        format!("chi{j}")
                    };
                    collapse(&g, &name, 1, |k| {
                        // exact values at phases 0 and π
                        let m = (j * k) % n;
                        if m == 0 {
                            return real(1.0);
                        }
                        if 2 * m == n {
                            return real(-1.0);
                        }
                        let angle =
                            T::TAU() * T::from_usize(m).unwrap() / T::from_usize(n).unwrap();
                        C::from_polar(T::one(), angle)
                    })
                })
                .collect();
            (g, irreps)
        }
        BuiltinGroup::KleinFour => {
            let g = FiniteGroup::klein_four()?;
            let sign = |bit: bool| if bit { -1.0 } else { 1.0 };
            let irreps = [
                ("trivial", false, false),
                ("alt_b", false, true),
                ("alt_a", true, false),
                ("alt_ab", true, true),
            ]
            .iter()
            .map(|&(name, on_a, on_b)| {
                collapse(&g, name, 1, |x| {
                    real(sign(on_a && x & 1 == 1) * sign(on_b && x & 2 == 2))
                })
            })
            .collect();
            (g, irreps)
        }
        BuiltinGroup::S3 => {
            let g = FiniteGroup::dihedral(3)?;
            let irreps = vec![
                collapse(&g, "trivial", 1, |_| real(1.0)),
                collapse(&g, "sign", 1, |x| real(if x / 3 == 1 { -1.0 } else { 1.0 })),
                collapse(&g, "standard", 2, |x| {
                    real(match (x / 3, x % 3) {
                        (0, 0) => 2.0,
                        (0, _) => -1.0,
                        _ => 0.0,
                    })
                }),
            ];
            (g, irreps)
        }
        BuiltinGroup::D4 => {
            let g = FiniteGroup::dihedral(4)?;
            let one_dim = |name: &str, on_r: f64, on_s: f64| {
                collapse(&g, name, 1, |x| {
                    let (f, k) = (x / 4, x % 4);
                    real(on_r.powi(k as i32) * on_s.powi(f as i32))
                })
            };
            let irreps = vec![
                one_dim("trivial", 1.0, 1.0),
                one_dim("sign_s", 1.0, -1.0),
                one_dim("sign_r", -1.0, 1.0),
                one_dim("sign_rs", -1.0, -1.0),
                collapse(&g, "standard", 2, |x| {
                    real(match (x / 4, x % 4) {
                        (0, 0) => 2.0,
                        (0, 2) => -2.0,
                        _ => 0.0,
                    })
                }),
            ];
            (g, irreps)
        }
    };
    let table = CharacterTable::new(&group, irreps)?;
    Ok((group, table))
}
