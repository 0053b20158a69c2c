//! Betti tables and other machine-readable summaries.

use serde_json::{json, Value};

use crate::error::Result;
use crate::homology::GammaComplex;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BettiRow {
    pub degree: usize,
    pub cell_dim: usize,
    pub rank: usize,
    pub betti: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BettiTable {
    pub n: usize,
    pub level: u64,
    pub field: String,
    pub rows: Vec<BettiRow>,
}

impl BettiTable {
    pub fn of(c: &GammaComplex) -> Result<Self> {
        let betti = c.betti_numbers()?;
        let rows = betti
            .iter()
            .enumerate()
            .map(|(k, &b)| BettiRow { degree: k, cell_dim: c.table.cell_dim(k), rank: c.rank(k), betti: b })
            .collect();
        Ok(BettiTable { n: c.n, level: c.level, field: c.field.to_string(), rows })
    }

    /// `H0=3, H1=1`.
    pub fn line(&self) -> String {
        self.rows.iter().map(|r| format!("H{}={}", r.degree, r.betti)).collect::<Vec<_>>().join(", ")
    }

    pub fn csv(&self) -> String {
        let mut s = String::from("n,level,field,degree,cell_dim,rank,betti\n");
        for r in &self.rows {
            s.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                self.n, self.level, self.field, r.degree, r.cell_dim, r.rank, r.betti
            ));
        }
        s
    }

    pub fn to_json(&self) -> Value {
        json!({
            "n": self.n,
            "level": self.level,
            "field": self.field,
            "degrees": self.rows.iter().map(|r| json!({
                "degree": r.degree,
                "cell_dim": r.cell_dim,
                "rank": r.rank,
                "betti": r.betti,
            })).collect::<Vec<_>>(),
        })
    }
}

/// Pretty JSON with sorted keys and a trailing newline.
pub fn render_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homology::build_complex;
    use crate::linalg::Field;

    #[test]
    fn level_eleven_line() {
        let c = build_complex(2, 11, Field::Rational).unwrap();
        let t = BettiTable::of(&c).unwrap();
        assert_eq!(t.line(), "H0=3, H1=1");
        assert!(t.csv().ends_with("2,11,Q,1,2,4,1\n"), "{}", t.csv());
    }
}
