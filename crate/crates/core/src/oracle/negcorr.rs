//! Exact negative-correlation checks for crossing events of non-incident
//! random edges and open triangles (cherries).
//!
//! Conditioning on the first component fixes how many of its vertices lie in
//! `R = [r]` and in `C = [n] \ [r]`; the second component is uniform over
//! copies avoiding those vertices, so its conditional crossing probability is
//! a ratio of counts on the remaining `r'` + `c'` vertices. Crossing cherries
//! split into four classes:
//!
//! * class 1: an edge inside `R` (two vertices in `R`, adjacent)
//! * class 2: an edge inside `C`
//! * class 3: one vertex in `R`, the two non-adjacent ones in `C`
//! * class 4: one vertex in `C`, the two non-adjacent ones in `R`

use num_bigint::BigInt;
use num_integer::binomial;
use num_rational::BigRational;
use serde::Serialize;

use super::crossing::{p_cherry_connects, p_edge_connects};
use crate::error::Result;

fn c2(a: i64) -> i64 {
    if a < 2 {
        0
    } else {
        a * (a - 1) / 2
    }
}

fn c3(a: i64) -> i64 {
    if a < 3 {
        0
    } else {
        binomial(a, 3)
    }
}

/// Crossing edges on `r'` + `c'` vertices.
fn crossing_edges(r: i64, c: i64) -> i64 {
    r.max(0) * c.max(0)
}

/// Crossing cherries on `r'` + `c'` vertices.
fn crossing_cherries(r: i64, c: i64) -> i64 {
    let (r, c) = (r.max(0), c.max(0));
    3 * c2(r) * c + 3 * c2(c) * r
}

fn q(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassRatio {
    pub class: u8,
    /// Number of crossing cherries in this class.
    pub weight: i64,
    /// `N_i / M_i`: conditional crossing probability of the second component.
    pub conditional: String,
    /// `N / M`: its unconditional crossing probability.
    pub unconditional: String,
    /// `N_i / M_i <= N / M`; classes with zero weight hold vacuously.
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct InequalityCheck {
    pub name: &'static str,
    /// `P{A ∩ B}`.
    pub joint: String,
    /// `P{A} P{B}`.
    pub product: String,
    pub holds: bool,
    pub classes: Vec<ClassRatio>,
}

#[derive(Clone, Debug, Serialize)]
pub struct NegCorrReport {
    pub n: usize,
    pub r: usize,
    pub checks: Vec<InequalityCheck>,
    /// Inequalities outside their stated range, with the reason.
    pub skipped: Vec<(&'static str, String)>,
}

impl NegCorrReport {
    pub fn all_hold(&self) -> bool {
        self.checks
            .iter()
            .all(|c| c.holds && c.classes.iter().all(|k| k.holds))
    }
}

fn edge_given_edge(n: i64, r: i64) -> BigRational {
    q(crossing_edges(r - 1, n - r - 1), c2(n - 2))
}

/// Classes of a crossing cherry: (class id, count, vertices left in R, in C).
fn cherry_classes(n: i64, r: i64) -> [(u8, i64, i64, i64); 4] {
    let two_in_r = c2(r) * (n - r);
    let two_in_c = c2(n - r) * r;
    [
        (1, 2 * two_in_r, r - 2, n - r - 1),
        (2, 2 * two_in_c, r - 1, n - r - 2),
        (3, two_in_c, r - 1, n - r - 2),
        (4, two_in_r, r - 2, n - r - 1),
    ]
}

fn by_classes(
    name: &'static str,
    n: i64,
    r: i64,
    second_unconditional: BigRational,
    first_unconditional: BigRational,
    conditional: impl Fn(i64, i64) -> BigRational,
) -> InequalityCheck {
    let total_cherries = 3 * c3(n);
    let mut joint = q(0, 1);
    let mut classes = Vec::new();
    for (class, weight, rr, cc) in cherry_classes(n, r) {
        let cond = if weight > 0 { conditional(rr, cc) } else { q(0, 1) };
        joint += q(weight, total_cherries) * &cond;
        classes.push(ClassRatio {
            class,
            weight,
            holds: weight == 0 || cond <= second_unconditional,
            conditional: cond.to_string(),
            unconditional: second_unconditional.to_string(),
        });
    }
    let product = &first_unconditional * &second_unconditional;
    InequalityCheck {
        name,
        holds: joint < product,
        joint: joint.to_string(),
        product: product.to_string(),
        classes,
    }
}

/// Verifies in exact arithmetic that crossing events of non-incident random
/// components are negatively correlated:
///
/// | events      | inequality                      | range                  |
/// |-------------|---------------------------------|------------------------|
/// | two edges   | `P{ℒ₁ ∩ ℒ₂} < P{ℒ₁}P{ℒ₂}`       | `r <= n/4`             |
/// | edge/cherry | `P{ℒ₁ ∩ 𝒯₁} < P{ℒ₁}P{𝒯₁}`       | `r <= n/6`             |
/// | two cherries| `P{𝒯₁ ∩ 𝒯₂} < P{𝒯₁}P{𝒯₂}`       | `r <= n/10`, `n >= 11` |
pub fn check_negative_correlation(n: usize, r: usize) -> Result<NegCorrReport> {
    let (ni, ri) = (n as i64, r as i64);
    let mut checks = Vec::new();
    let mut skipped = Vec::new();

    if r >= 1 && 4 * r <= n && n >= 4 {
        let p_l = p_edge_connects(n, r)?;
        let cond = edge_given_edge(ni, ri);
        let joint = &p_l * &cond;
        let product = &p_l * &p_l;
        checks.push(InequalityCheck {
            name: "edge-edge",
            holds: joint < product,
            joint: joint.to_string(),
            product: product.to_string(),
            classes: vec![ClassRatio {
                class: 0,
                weight: crossing_edges(ri, ni - ri),
                holds: cond < p_l,
                conditional: cond.to_string(),
                unconditional: p_l.to_string(),
            }],
        });
    } else {
        skipped.push(("edge-edge", format!("needs 1 <= r <= n/4 and n >= 4 (n={n}, r={r})")));
    }

    if r >= 1 && 6 * r <= n && n >= 5 {
        let p_l = p_edge_connects(n, r)?;
        let p_t = p_cherry_connects(n, r)?;
        let m = c2(ni - 3);
        checks.push(by_classes("edge-cherry", ni, ri, p_l, p_t, |rr, cc| {
            q(crossing_edges(rr, cc), m)
        }));
    } else {
        skipped.push(("edge-cherry", format!("needs 1 <= r <= n/6 and n >= 5 (n={n}, r={r})")));
    }

    if r >= 1 && 10 * r <= n && n >= 11 {
        let p_t = p_cherry_connects(n, r)?;
        let m = 3 * c3(ni - 3);
        checks.push(by_classes("cherry-cherry", ni, ri, p_t.clone(), p_t, |rr, cc| {
            q(crossing_cherries(rr, cc), m)
        }));
    } else {
        skipped.push((
            "cherry-cherry",
            format!("needs 1 <= r <= n/10 and n >= 11 (n={n}, r={r})"),
        ));
    }

    Ok(NegCorrReport {
        n,
        r,
        checks,
        skipped,
    })
}

/// Runs [`check_negative_correlation`] over `n_min..=n_max` and every `r`
/// in `1..n`, returning (inequalities checked, failing reports).
pub fn negative_correlation_sweep(n_min: usize, n_max: usize) -> Result<(usize, Vec<NegCorrReport>)> {
    let mut checked = 0;
    let mut failures = Vec::new();
    for n in n_min..=n_max {
        for r in 1..n {
            let rep = check_negative_correlation(n, r)?;
            checked += rep.checks.len();
            if !rep.all_hold() {
                failures.push(rep);
            }
        }
    }
    Ok((checked, failures))
}

/// Exact conditional crossing probabilities used by the checks, exposed for
/// cross-checking against direct enumeration: `(P{ℒ₂ | ℒ₁}, P{ℒ₁ ∩ 𝒯₁},
/// P{𝒯₁ ∩ 𝒯₂})`, each `None` when the configuration does not fit in `K_n`.
pub fn joint_crossing_probabilities(
    n: usize,
    r: usize,
) -> (Option<BigRational>, Option<BigRational>, Option<BigRational>) {
    let (ni, ri) = (n as i64, r as i64);
    let ll = (n >= 4 && r >= 1 && r < n).then(|| edge_given_edge(ni, ri));
    let lt = (n >= 5 && r >= 1 && r < n).then(|| {
        let m = c2(ni - 3);
        cherry_classes(ni, ri)
            .into_iter()
            .filter(|c| c.1 > 0)
            .map(|(_, w, rr, cc)| q(w, 3 * c3(ni)) * q(crossing_edges(rr, cc), m))
            .fold(q(0, 1), |a, b| a + b)
    });
    let tt = (n >= 6 && r >= 1 && r < n).then(|| {
        let m = 3 * c3(ni - 3);
        cherry_classes(ni, ri)
            .into_iter()
            .filter(|c| c.1 > 0)
            .map(|(_, w, rr, cc)| q(w, 3 * c3(ni)) * q(crossing_cherries(rr, cc), m))
            .fold(q(0, 1), |a, b| a + b)
    });
    (ll, lt, tt)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n12_r2_edge_pair() {
        let rep = check_negative_correlation(12, 2).unwrap();
        let ee = &rep.checks[0];
        assert_eq!(ee.name, "edge-edge");
        assert_eq!(ee.classes[0].conditional, "1/5");
        assert_eq!(ee.classes[0].unconditional, q(40, 132).to_string());
        assert!(rep.all_hold());
        assert_eq!(rep.skipped.len(), 1);
    }

    #[test]
    fn r1_holds_trivially() {
        let rep = check_negative_correlation(40, 1).unwrap();
        assert_eq!(rep.checks.len(), 3);
        assert!(rep.all_hold());
        assert_eq!(rep.checks[0].joint, "0");
    }

    #[test]
    fn out_of_range_is_skipped() {
        let rep = check_negative_correlation(12, 5).unwrap();
        assert!(rep.checks.is_empty());
        assert_eq!(rep.skipped.len(), 3);
    }

    #[test]
    fn sweep_small() {
        let (checked, failures) = negative_correlation_sweep(4, 60).unwrap();
        assert!(checked > 0);
        assert!(failures.is_empty());
    }
}
