//! Parameter sets of the reference figures.

use twoatom::sweep::TimeGrid;

use crate::table::Table;

#[derive(Debug, Clone, Copy)]
pub struct FigureSpec {
    pub nbar: f64,
    pub ratios: &'static [f64],
    pub window: TimeGrid,
    pub columns: &'static [&'static str],
}

const THREE: &[f64] = &[0.0, 0.5, 1.0];

pub fn spec(id: u32) -> Option<FigureSpec> {
    let s = |nbar, ratios, window, columns| {
        Some(FigureSpec {
            nbar,
            ratios,
            window,
            columns,
        })
    };
    let s1: &'static [&'static str] = &["S1"];
    let q1: &'static [&'static str] = &["Q1"];
    match id {
        1 => s(0.2, &[0.5], TimeGrid::long(), &["S1", "S2"]),
        2 => s(0.2, THREE, TimeGrid::short(), s1),
        3 => s(0.4, THREE, TimeGrid::short(), s1),
        4 => s(0.8, THREE, TimeGrid::short(), s1),
        5 => s(1.0, &[0.1, 0.3, 0.5, 0.7], TimeGrid::short(), s1),
        6 => s(0.8, &[0.5], TimeGrid::long(), &["Q1", "Q2"]),
        7 => s(0.4, THREE, TimeGrid::short_ass(), q1),
        8 => s(0.8, THREE, TimeGrid::short_ass(), q1),
        9 => s(1.2, THREE, TimeGrid::short_ass(), q1),
        _ => None,
    }
}

/// Keeps `tau` plus the named columns.
pub fn project(t: &Table, columns: &[&'static str]) -> Table {
    let idx: Vec<usize> = std::iter::once(0)
        .chain(
            columns
                .iter()
                .filter_map(|c| t.columns.iter().position(|x| x == c)),
        )
        .collect();
    Table {
        columns: idx.iter().map(|&i| t.columns[i]).collect(),
        rows: t
            .rows
            .iter()
            .map(|r| idx.iter().map(|&i| r[i].clone()).collect())
            .collect(),
        comment: t.comment.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_one_to_nine() {
        assert!(spec(0).is_none());
        assert!(spec(10).is_none());
        let curves: Vec<usize> = (1..=9).map(|i| spec(i).unwrap().ratios.len()).collect();
        assert_eq!(curves, [1, 3, 3, 3, 4, 1, 3, 3, 3]);
    }
}
