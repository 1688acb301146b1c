//! Cyclic index arithmetic on node and group labels `1..=n`.
//!
//! Node `i` stores, at parity offset `t`, a combination of group `i ⊕ t`
//! with generator column `v_t`.

use crate::error::{param, Result};

/// `x ⊕ y` for `x` in `1..=n` and `y` in `1..n`: `x + y`, wrapped into `1..=n`.
pub fn mod_n_add(x: usize, y: usize, n: usize) -> Result<usize> {
    if x == 0 || x > n {
        return param(format!("index {x} outside 1..={n}"));
    }
    if y == 0 || y >= n {
        return param(format!("offset {y} outside 1..{n}"));
    }
    let s = x + y;
    Ok(if s <= n { s } else { s - n })
}

/// The offset `t` at which node `holder` stores a parity of `group`,
/// i.e. the unique `t` with `holder ⊕ t = group`.
pub fn offset_of(group: usize, holder: usize, n: usize) -> Result<usize> {
    if group == 0 || group > n || holder == 0 || holder > n {
        return param(format!("group {group} / holder {holder} outside 1..={n}"));
    }
    if group == holder {
        return param(format!("node {holder} stores group {group} systematically"));
    }
    Ok((group + n - holder) % n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn mod_n_add_examples() {
        assert_eq!(mod_n_add(4, 1, 5).unwrap(), 5);
        assert_eq!(mod_n_add(5, 1, 5).unwrap(), 1);
        assert!(mod_n_add(0, 1, 5).is_err());
        assert!(mod_n_add(6, 1, 5).is_err());
        assert!(mod_n_add(1, 5, 5).is_err());
        assert!(mod_n_add(1, 0, 5).is_err());
    }

    #[test]
    fn mod_n_add_is_a_bijection_onto_other_indices() {
        for n in 2..=9 {
            for i in 1..=n {
                let hit: BTreeSet<_> = (1..n).map(|t| mod_n_add(i, t, n).unwrap()).collect();
                let expect: BTreeSet<_> = (1..=n).filter(|&g| g != i).collect();
                assert_eq!(hit, expect);
            }
        }
    }

    #[test]
    fn offset_of_examples() {
        // node 5 holds x_4 · v_4, node 4 holds x_5 · v_1
        assert_eq!(offset_of(4, 5, 5).unwrap(), 4);
        assert_eq!(offset_of(5, 4, 5).unwrap(), 1);
        assert!(offset_of(3, 3, 5).is_err());
        assert!(offset_of(0, 3, 5).is_err());
    }

    #[test]
    fn offset_of_inverts_mod_n_add() {
        for n in 2..=9 {
            for m in 1..=n {
                for t in 1..n {
                    let g = mod_n_add(m, t, n).unwrap();
                    assert_eq!(offset_of(g, m, n).unwrap(), t);
                }
            }
        }
    }
}
