use std::fmt;

use crate::caps;

/// A subset of the players `0..n`, stored as a bitmask. `n` is carried along
/// so the grand coalition and complements are well defined.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coalition {
    mask: u32,
    n: u8,
}

impl Coalition {
    pub fn empty(n: usize) -> Self {
        Self::from_mask(n, 0)
    }

    pub fn grand(n: usize) -> Self {
        assert!(n >= 1, "a game needs at least one player");
        Self::from_mask(n, (1u32 << n) - 1)
    }

    /// Interpret `mask` as a coalition over `n` players.
    ///
    /// Panics if `n` exceeds [`caps::MAX_PLAYERS`] or `mask` has bits outside
    /// `0..n`; callers parsing external input must validate first.
    pub fn from_mask(n: usize, mask: u32) -> Self {
        assert!(
            n <= caps::MAX_PLAYERS,
            "at most {} players",
            caps::MAX_PLAYERS
        );
        assert!(
            u64::from(mask) < (1u64 << n),
            "mask {:#x} has members outside 0..{}",
            mask,
            n
        );
        Coalition { mask, n: n as u8 }
    }

    pub fn from_members(n: usize, members: &[usize]) -> Self {
        let mut mask = 0u32;
        for &i in members {
            assert!(i < n, "member {} outside 0..{}", i, n);
            mask |= 1 << i;
        }
        Self::from_mask(n, mask)
    }

    pub fn mask(&self) -> u32 {
        self.mask
    }

    pub fn player_count(&self) -> usize {
        self.n as usize
    }

    pub fn size(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    pub fn is_grand(&self) -> bool {
        u64::from(self.mask) == (1u64 << self.n) - 1
    }

    pub fn contains(&self, player: usize) -> bool {
        player < self.n as usize && self.mask & (1 << player) != 0
    }

    /// This coalition with `player` added.
    pub fn with(&self, player: usize) -> Self {
        assert!(player < self.n as usize);
        Coalition {
            mask: self.mask | (1 << player),
            n: self.n,
        }
    }

    /// This coalition with `player` removed.
    pub fn without(&self, player: usize) -> Self {
        assert!(player < self.n as usize);
        Coalition {
            mask: self.mask & !(1 << player),
            n: self.n,
        }
    }

    pub fn complement(&self) -> Self {
        let full = (1u32 << self.n) - 1;
        Coalition {
            mask: full & !self.mask,
            n: self.n,
        }
    }

    pub fn members(&self) -> impl Iterator<Item = usize> + '_ {
        let n = self.n as usize;
        (0..n).filter(move |&i| self.mask & (1 << i) != 0)
    }

    /// All coalitions over `n` players in ascending mask order, the empty
    /// coalition first and the grand coalition last.
    pub fn all(n: usize) -> impl Iterator<Item = Coalition> {
        assert!(n <= caps::MAX_PLAYERS);
        (0..(1u64 << n) as u32).map(move |mask| Coalition::from_mask(n, mask))
    }
}

impl fmt::Debug for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.members().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", i)?;
        }
        write!(f, "}}")
    }
}
