//! Precision and size measurements over the program points of an analysis.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::engine::{AbstractSubstitution, Analysis};

/// Measurements of one recorded substitution.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PointMetrics {
    pub pred: String,
    pub clause: usize,
    pub point: usize,
    /// Table slot of the call variant the point belongs to.
    pub variant: usize,
    pub vars: usize,
    /// Sharing groups represented (cliques counted by expansion).
    pub groups: u128,
    /// `2^vars - 1`.
    pub worst: u128,
    pub cliques: usize,
    /// Cliques plus explicit groups.
    pub size: usize,
    pub bottom: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Totals {
    pub points: usize,
    pub variants: usize,
    pub groups: u128,
    pub worst: u128,
    pub cliques: usize,
    pub size: usize,
    pub peak_size: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Metrics {
    pub time_ms: f64,
    pub passes: usize,
    pub totals: Totals,
    pub variant_counts: BTreeMap<String, usize>,
    pub points: Vec<PointMetrics>,
}

fn worst_case(vars: usize) -> u128 {
    if vars >= 128 {
        u128::MAX
    } else {
        (1u128 << vars) - 1
    }
}

pub fn point_metrics(s: &AbstractSubstitution) -> (usize, u128, u128, usize, usize) {
    let vars = s.domain().len();
    (vars, s.group_count(), worst_case(vars), s.clique_count(), s.size())
}

impl Metrics {
    /// Sums over all reachable variants of all program points.
    pub fn of(analysis: &Analysis) -> Metrics {
        let mut points = Vec::new();
        for &slot in &analysis.reachable {
            let (key, entry) = analysis.table.get_index(slot).expect("slot index");
            for (ci, rec) in entry.clauses.iter().enumerate() {
                for (pi, s) in rec.points.iter().enumerate() {
                    let (vars, groups, worst, cliques, size) = point_metrics(s);
                    points.push(PointMetrics {
                        pred: key.pred.to_string(),
                        clause: ci,
                        point: pi,
                        variant: slot,
                        vars,
                        groups,
                        worst,
                        cliques,
                        size,
                        bottom: s.is_bottom(),
                    });
                }
            }
        }
        let totals = Totals {
            points: points.len(),
            variants: analysis.reachable.len(),
            groups: points.iter().map(|p| p.groups).fold(0u128, u128::saturating_add),
            worst: points.iter().map(|p| p.worst).fold(0u128, u128::saturating_add),
            cliques: points.iter().map(|p| p.cliques).sum(),
            size: points.iter().map(|p| p.size).sum(),
            peak_size: points.iter().map(|p| p.size).max().unwrap_or(0),
        };
        Metrics {
            time_ms: analysis.elapsed.as_secs_f64() * 1e3,
            passes: analysis.passes,
            totals,
            variant_counts: analysis.variant_counts(),
            points,
        }
    }
}
