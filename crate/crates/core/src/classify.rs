//! Interaction groups, the 0/1 flip, and the complexity classification of
//! all 256 Boolean types.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::interaction::{BooleanType, Interaction, Interaction::*};
use crate::region::Region;

pub fn exit() -> BooleanType {
    BooleanType::from([Inp, Res, Swap])
}

pub fn enter() -> BooleanType {
    BooleanType::from([Out, Set, Swap])
}

pub fn save1() -> BooleanType {
    BooleanType::from([Nop, Set, Used])
}

pub fn save0() -> BooleanType {
    BooleanType::from([Nop, Res, Free])
}

pub fn save() -> BooleanType {
    save1().union(save0())
}

/// Exchanges inp/out, res/set and used/free.
pub fn flip_type(tau: BooleanType) -> BooleanType {
    tau.members().map(Interaction::flip).collect()
}

/// Transports a `tau`-region to a `flip_type(tau)`-region by complementing
/// the support and flipping every signature value.
pub fn flip_region(region: &Region) -> Region {
    Region {
        support: region.support.iter().map(|b| !b).collect(),
        signature: region.signature.iter().map(|i| i.flip()).collect(),
    }
}

/// Checks that `x -> 1-x` maps the edges of `tau` onto the edges of its flip.
pub fn flip_is_isomorphism(tau: BooleanType) -> bool {
    let flipped = flip_type(tau);
    let mut image: Vec<_> = tau.edges().into_iter().map(|(x, i, y)| (!x, i.flip(), !y)).collect();
    let mut target = flipped.edges();
    image.sort();
    target.sort();
    image == target
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Complexity {
    Polynomial,
    NpComplete,
}

impl fmt::Display for Complexity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Complexity::Polynomial => "polynomial",
            Complexity::NpComplete => "NP-complete",
        })
    }
}

/// A row of the complexity overview together with its complexity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Classification {
    pub row: u8,
    pub complexity: Complexity,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "§{} {}", self.row, self.complexity)
    }
}

pub fn row_complexity(row: u8) -> Complexity {
    match row {
        1 | 2 | 3 | 5 | 6 | 9 => Complexity::NpComplete,
        4 | 7 | 8 | 10 => Complexity::Polynomial,
        _ => panic!("no row {row}"),
    }
}

/// Expected number of types per row, indexed by `row - 1`.
pub const ROW_COUNTS: [usize; 10] = [16, 32, 32, 16, 2, 10, 20, 64, 60, 4];

fn t<const N: usize>(members: [Interaction; N]) -> BooleanType {
    BooleanType::from(members)
}

/// `tau == base ∪ ω` for some `ω ⊆ extra`.
fn pattern(tau: BooleanType, base: BooleanType, extra: BooleanType) -> bool {
    base.is_subset(tau) && tau.is_subset(base.union(extra))
}

/// Which row patterns of the overview table match `tau`.
pub fn matching_rows(tau: BooleanType) -> Vec<u8> {
    let io_uf = t([Inp, Out, Used, Free]);
    let uf = t([Used, Free]);
    let rows: [(u8, bool); 10] = [
        (1, pattern(tau, t([Nop, Res, Set, Swap]), io_uf)),
        (
            2,
            pattern(tau, t([Nop, Res, Swap]), io_uf) || pattern(tau, t([Nop, Set, Swap]), io_uf),
        ),
        (
            3,
            pattern(tau, t([Nop, Res, Set]), io_uf)
                || pattern(tau, t([Nop, Out, Res]), t([Inp, Used, Free]))
                || pattern(tau, t([Nop, Inp, Set]), t([Out, Used, Free])),
        ),
        (
            4,
            pattern(tau, t([Nop, Res]), t([Inp, Used, Free])) || pattern(tau, t([Nop, Set]), t([Out, Used, Free])),
        ),
        (5, tau == t([Nop, Inp, Out]) || tau == t([Nop, Inp, Out, Used])),
        (
            6,
            tau == t([Nop, Inp, Out, Free])
                || tau == t([Nop, Inp, Out, Used, Free])
                || pattern(tau, t([Nop, Inp]), uf)
                || pattern(tau, t([Nop, Out]), uf),
        ),
        (7, pattern(tau, t([Nop, Swap]), io_uf) || pattern(tau, t([Nop]), uf)),
        (8, pattern(tau, BooleanType::EMPTY, t([Inp, Out, Res, Set, Used, Free]))),
        (
            9,
            pattern(tau, t([Swap]), t([Inp, Out, Res, Set, Used, Free]))
                && !tau.intersection(t([Res, Set, Used, Free])).is_empty(),
        ),
        (10, pattern(tau, t([Swap]), t([Inp, Out]))),
    ];
    rows.iter().filter(|(_, hit)| *hit).map(|(r, _)| *r).collect()
}

/// Classification by direct lookup in the row-pattern table.
pub fn classify_by_table(tau: BooleanType) -> Classification {
    let rows = matching_rows(tau);
    assert_eq!(
        rows.len(),
        1,
        "row patterns must partition the types; {tau} matched {rows:?}"
    );
    Classification {
        row: rows[0],
        complexity: row_complexity(rows[0]),
    }
}

/// Classification by the hardness criteria for the three families of types
/// (nop without res/set, nop with res or set, and nop-free).
pub fn classify_by_rules(tau: BooleanType) -> Classification {
    let has = |i| tau.contains(i);
    let hits = |g: BooleanType| !tau.intersection(g).is_empty();
    let row = if has(Nop) && !has(Res) && !has(Set) {
        if hits(t([Inp, Out])) && !has(Swap) {
            if has(Inp) && has(Out) && !has(Free) {
                5
            } else {
                6
            }
        } else {
            7
        }
    } else if has(Nop) {
        let hard = (has(Res) && hits(enter())) || (has(Set) && hits(exit()));
        if has(Swap) {
            if has(Res) && has(Set) {
                1
            } else {
                2
            }
        } else if hard {
            3
        } else {
            4
        }
    } else if !has(Swap) {
        8
    } else if hits(save()) {
        9
    } else {
        10
    };
    Classification {
        row,
        complexity: row_complexity(row),
    }
}

pub fn classify_type(tau: BooleanType) -> Classification {
    classify_by_table(tau)
}

/// All 256 types with their classification.
pub fn enumerate_types() -> Vec<(BooleanType, Classification)> {
    BooleanType::all().map(|tau| (tau, classify_type(tau))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn groups() {
        assert_eq!(save().to_string(), "{nop,res,set,used,free}");
        assert_eq!(exit().intersection(enter()), t([Swap]));
    }

    #[test]
    fn flip_examples() {
        assert_eq!(flip_type(t([Nop, Inp])), t([Nop, Out]));
        assert_eq!(flip_type(t([Swap, Free])), t([Swap, Used]));
        assert_eq!(flip_type(t([Nop, Swap])), t([Nop, Swap]));
        for tau in BooleanType::all() {
            assert_eq!(flip_type(flip_type(tau)), tau);
            assert!(flip_is_isomorphism(tau));
        }
    }

    #[test]
    fn flip_region_examples() {
        let r = Region {
            support: vec![true, false],
            signature: vec![Inp, Inp],
        };
        let f = flip_region(&r);
        assert_eq!(
            f,
            Region {
                support: vec![false, true],
                signature: vec![Out, Out]
            }
        );
        assert_eq!(flip_region(&f), r);
    }

    #[test]
    fn row_examples() {
        let cases = [
            (t([Nop, Res, Set, Swap]), 1, Complexity::NpComplete),
            (t([Nop, Swap, Used]), 7, Complexity::Polynomial),
            (t([Swap, Inp, Out]), 10, Complexity::Polynomial),
            (BooleanType::EMPTY, 8, Complexity::Polynomial),
            (t([Nop, Inp, Out, Used]), 5, Complexity::NpComplete),
            (t([Nop, Inp]), 6, Complexity::NpComplete),
            (t([Nop, Res, Used]), 4, Complexity::Polynomial),
        ];
        for (tau, row, complexity) in cases {
            assert_eq!(classify_type(tau), Classification { row, complexity }, "{tau}");
        }
    }

    #[test]
    fn rows_partition_and_encodings_agree() {
        let mut counts = [0usize; 10];
        for tau in BooleanType::all() {
            assert_eq!(matching_rows(tau).len(), 1, "{tau}");
            let c = classify_by_table(tau);
            assert_eq!(c, classify_by_rules(tau), "{tau}");
            assert_eq!(c.complexity, classify_type(flip_type(tau)).complexity, "{tau}");
            counts[c.row as usize - 1] += 1;
        }
        assert_eq!(counts, ROW_COUNTS);
    }

    #[test]
    fn only_rows_five_and_six_break_under_flip() {
        let broken: Vec<_> = BooleanType::all()
            .filter(|&tau| classify_type(tau).row != classify_type(flip_type(tau)).row)
            .collect();
        assert_eq!(broken, vec![t([Nop, Inp, Out, Used]), t([Nop, Inp, Out, Free])]);
    }
}
