//! Canonical text rendering of groups and families, e.g. `{x, xy, xyz}`.
//!
//! Groups print as their variable names concatenated in id order. When a
//! group contains a multi-character name the names are joined with `.`
//! instead so the rendering stays unambiguous.

use crate::groups::GroupSet;
use crate::varset::{Var, VarSet};

/// Source of display names for variable ids.
pub trait VarNames {
    fn name(&self, v: Var) -> String;
}

/// Single-letter names: ids 0..6 are `x y z u v w`, then `a`..`t`, then
/// `_N`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Letters;

pub const LETTERS: &str = "xyzuvwabcdefghijklmnopqrst";

impl VarNames for Letters {
    fn name(&self, v: Var) -> String {
        LETTERS
            .chars()
            .nth(v.index())
            .map(String::from)
            .unwrap_or_else(|| format!("_{}", v.0))
    }
}

impl VarNames for [String] {
    fn name(&self, v: Var) -> String {
        self.get(v.index())
            .cloned()
            .unwrap_or_else(|| format!("_{}", v.0))
    }
}

impl VarNames for Vec<String> {
    fn name(&self, v: Var) -> String {
        self.as_slice().name(v)
    }
}

impl<F: Fn(Var) -> String> VarNames for F {
    fn name(&self, v: Var) -> String {
        self(v)
    }
}

pub fn render_group(g: VarSet, names: &(impl VarNames + ?Sized)) -> String {
    let parts: Vec<String> = g.iter().map(|v| names.name(v)).collect();
    if parts.iter().all(|p| p.chars().count() == 1) {
        parts.concat()
    } else {
        parts.join(".")
    }
}

pub fn render_groups(gs: &GroupSet, names: &(impl VarNames + ?Sized)) -> String {
    let items: Vec<String> = gs
        .lex_sorted()
        .into_iter()
        .map(|g| render_group(g, names))
        .collect();
    format!("{{{}}}", items.join(", "))
}

/// Renders a plain variable set such as a freeness component: `{x, y}`.
pub fn render_vars(vs: VarSet, names: &(impl VarNames + ?Sized)) -> String {
    let items: Vec<String> = vs.iter().map(|v| names.name(v)).collect();
    format!("{{{}}}", items.join(", "))
}

/// Parses a single group written with [`Letters`] names, e.g. `"xyz"`.
///
/// # Panics
/// On characters outside the letter table. Intended for fixtures.
pub fn group(s: &str) -> VarSet {
    s.chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| {
            let i = LETTERS
                .find(c)
                .unwrap_or_else(|| panic!("unknown variable letter {c:?}"));
            Var(i as u32)
        })
        .collect()
}

/// Parses a family such as `"{x, xy}"`, `"x, xy"`, `"∅"` or `""`.
pub fn groups(s: &str) -> GroupSet {
    let body = s.trim().trim_start_matches('{').trim_end_matches('}').trim();
    if body.is_empty() || body == "∅" {
        return GroupSet::new();
    }
    body.split(',').map(group).collect()
}

/// Parses a variable set written as a single word or comma list: `"xy"` or
/// `"x, y"`.
pub fn vars(s: &str) -> VarSet {
    let body = s.trim().trim_start_matches('{').trim_end_matches('}');
    if body.trim() == "∅" {
        return VarSet::EMPTY;
    }
    body.split(',').map(group).fold(VarSet::EMPTY, VarSet::union)
}
