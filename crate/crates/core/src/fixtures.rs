//! Small named groupoids used throughout tests, examples and the CLI.

use crate::groupoid::{Arrow, ArrowId, ArrowSet, Atom, FiniteGroupoid, GroupTable, WeightedUnitSpace};

/// Two atoms of mass 1/2, no non-unit arrows.
pub fn triv2() -> FiniteGroupoid {
    FiniteGroupoid::principal(WeightedUnitSpace::named_uniform(&["x", "y"]), Vec::new()).unwrap()
}

/// Full relation on `x, y` with `f: x → y` and `finv: y → x`.
pub fn r2() -> FiniteGroupoid {
    FiniteGroupoid::principal(
        WeightedUnitSpace::named_uniform(&["x", "y"]),
        vec![Arrow::new("f", Atom(0), Atom(1)), Arrow::new("finv", Atom(1), Atom(0))],
    )
    .unwrap()
}

/// Full relation on `a, b, c`. The arrow `ab` goes from `a` to `b`; the
/// id order makes the greedy decomposition `X, σ, σ²`.
pub fn r3() -> FiniteGroupoid {
    let (a, b, c) = (Atom(0), Atom(1), Atom(2));
    FiniteGroupoid::principal(
        WeightedUnitSpace::named_uniform(&["a", "b", "c"]),
        vec![
            Arrow::new("ab", a, b),
            Arrow::new("bc", b, c),
            Arrow::new("ca", c, a),
            Arrow::new("ac", a, c),
            Arrow::new("ba", b, a),
            Arrow::new("cb", c, b),
        ],
    )
    .unwrap()
}

/// ℤ/2 over a single atom `e` of mass 1, with generator `a`.
pub fn z2pt() -> FiniteGroupoid {
    let units = WeightedUnitSpace::named_uniform(&["e"]);
    let arrows = vec![Arrow::new("e", Atom(0), Atom(0)), Arrow::new("a", Atom(0), Atom(0))];
    let (e, a) = (ArrowId(0), ArrowId(1));
    let compose = vec![Some(e), Some(a), Some(a), Some(e)];
    FiniteGroupoid::from_parts(units, arrows, vec![e, a], compose).unwrap()
}

/// ℤ/2 swapping two atoms of mass 1/2.
pub fn swap() -> FiniteGroupoid {
    FiniteGroupoid::transformation_groupoid(
        &GroupTable::cyclic(2),
        &[vec![0, 1], vec![1, 0]],
        WeightedUnitSpace::named_uniform(&["x", "y"]),
    )
    .unwrap()
}

/// ℤ/2 acting trivially on two atoms of mass 1/2.
pub fn triv_action() -> FiniteGroupoid {
    FiniteGroupoid::transformation_groupoid(
        &GroupTable::cyclic(2),
        &[vec![0, 0], vec![1, 1]],
        WeightedUnitSpace::named_uniform(&["x", "y"]),
    )
    .unwrap()
}

/// R3 together with the arrow sets of `G₁` (full relation on `a, b` plus
/// the unit at `c`) and `G₂` (full relation on `b, c` plus the unit at `a`).
pub fn amalg3() -> (FiniteGroupoid, ArrowSet, ArrowSet) {
    let g = r3();
    let set = |names: &[&str]| ArrowSet::new(&g, names.iter().map(|n| g.arrow_by_name(n).unwrap())).unwrap();
    let g1 = set(&["a", "b", "c", "ab", "ba"]);
    let g2 = set(&["a", "b", "c", "bc", "cb"]);
    (g, g1, g2)
}

/// All fixtures by name.
pub fn all() -> Vec<(&'static str, FiniteGroupoid)> {
    vec![
        ("triv2", triv2()),
        ("r2", r2()),
        ("r3", r3()),
        ("z2pt", z2pt()),
        ("swap", swap()),
        ("trivaction", triv_action()),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_are_valid() {
        for (name, g) in all() {
            let report = g.validate();
            assert!(report.is_valid(), "{name}: {:?}", report.violations);
        }
    }

    #[test]
    fn principality_matches_freeness() {
        assert!(swap().is_principal());
        assert!(!triv_action().is_principal());
    }
}
