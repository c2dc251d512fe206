//! The eight Boolean interactions and the types of nets built from them.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// A partial function `{0,1} -> {0,1}` relating a place to a transition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Interaction {
    Nop,
    Inp,
    Out,
    Res,
    Set,
    Swap,
    Used,
    Free,
}

impl Interaction {
    /// All interactions, in the fixed order used for search tie-breaking.
    pub const ALL: [Interaction; 8] = [
        Interaction::Nop,
        Interaction::Inp,
        Interaction::Out,
        Interaction::Res,
        Interaction::Set,
        Interaction::Swap,
        Interaction::Used,
        Interaction::Free,
    ];

    /// Applies the interaction to a bit. `None` marks the four undefined
    /// cells: `inp(0)`, `out(1)`, `used(0)` and `free(1)`.
    pub fn apply(self, x: bool) -> Option<bool> {
        use Interaction::*;
        match (self, x) {
            (Nop, x) => Some(x),
            (Inp, true) => Some(false),
            (Inp, false) => None,
            (Out, false) => Some(true),
            (Out, true) => None,
            (Res, _) => Some(false),
            (Set, _) => Some(true),
            (Swap, x) => Some(!x),
            (Used, true) => Some(true),
            (Used, false) => None,
            (Free, false) => Some(false),
            (Free, true) => None,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Interaction> {
        Interaction::ALL.get(i).copied()
    }

    pub fn name(self) -> &'static str {
        use Interaction::*;
        match self {
            Nop => "nop",
            Inp => "inp",
            Out => "out",
            Res => "res",
            Set => "set",
            Swap => "swap",
            Used => "used",
            Free => "free",
        }
    }

    /// The image of this interaction under the state relabeling `x -> 1-x`.
    pub fn flip(self) -> Interaction {
        use Interaction::*;
        match self {
            Inp => Out,
            Out => Inp,
            Res => Set,
            Set => Res,
            Used => Free,
            Free => Used,
            Nop => Nop,
            Swap => Swap,
        }
    }

    /// Whether some bit is moved to the other bit by this interaction.
    pub fn can_change(self) -> bool {
        [false, true].into_iter().any(|x| self.apply(x).is_some_and(|y| y != x))
    }
}

impl fmt::Display for Interaction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown interaction name `{0}`")]
pub struct UnknownInteraction(pub String);

impl FromStr for Interaction {
    type Err = UnknownInteraction;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.trim().to_ascii_lowercase();
        Interaction::ALL
            .into_iter()
            .find(|i| i.name() == lower)
            .ok_or_else(|| UnknownInteraction(s.to_string()))
    }
}

/// A Boolean type of nets, identified with its set of interactions.
///
/// Stored as an 8-bit mask indexed by [`Interaction::index`], so the 256
/// types are exactly the values `0..=255`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct BooleanType(u8);

impl BooleanType {
    pub const EMPTY: BooleanType = BooleanType(0);

    pub fn from_bits(bits: u8) -> Self {
        BooleanType(bits)
    }

    pub fn bits(self) -> u8 {
        self.0
    }

    pub fn all() -> impl Iterator<Item = BooleanType> {
        (0u16..256).map(|b| BooleanType(b as u8))
    }

    pub fn contains(self, i: Interaction) -> bool {
        self.0 & (1 << i.index()) != 0
    }

    pub fn with(self, i: Interaction) -> Self {
        BooleanType(self.0 | (1 << i.index()))
    }

    pub fn without(self, i: Interaction) -> Self {
        BooleanType(self.0 & !(1 << i.index()))
    }

    pub fn union(self, other: BooleanType) -> Self {
        BooleanType(self.0 | other.0)
    }

    pub fn intersection(self, other: BooleanType) -> Self {
        BooleanType(self.0 & other.0)
    }

    pub fn is_subset(self, other: BooleanType) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Members in the fixed tie-breaking order.
    pub fn members(self) -> impl Iterator<Item = Interaction> {
        Interaction::ALL.into_iter().filter(move |&i| self.contains(i))
    }

    /// The type's transition function `delta(x, i) = i(x)`, undefined for
    /// interactions outside the type.
    pub fn delta(self, x: bool, i: Interaction) -> Option<bool> {
        if self.contains(i) {
            i.apply(x)
        } else {
            None
        }
    }

    /// Whether `x -i-> y` is an edge of the type.
    pub fn has_edge(self, x: bool, i: Interaction, y: bool) -> bool {
        self.delta(x, i) == Some(y)
    }

    /// All edges `(x, i, y)` of the type viewed as a two-state transition system.
    pub fn edges(self) -> Vec<(bool, Interaction, bool)> {
        let mut out = Vec::new();
        for i in self.members() {
            for x in [false, true] {
                if let Some(y) = i.apply(x) {
                    out.push((x, i, y));
                }
            }
        }
        out
    }
}

impl FromIterator<Interaction> for BooleanType {
    fn from_iter<T: IntoIterator<Item = Interaction>>(iter: T) -> Self {
        iter.into_iter().fold(BooleanType::EMPTY, BooleanType::with)
    }
}

impl<const N: usize> From<[Interaction; N]> for BooleanType {
    fn from(members: [Interaction; N]) -> Self {
        members.into_iter().collect()
    }
}

impl fmt::Display for BooleanType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (n, i) in self.members().enumerate() {
            if n > 0 {
                f.write_str(",")?;
            }
            f.write_str(i.name())?;
        }
        f.write_str("}")
    }
}
