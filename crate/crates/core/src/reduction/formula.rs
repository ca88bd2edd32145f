//! Monotone cubic 3-CNF formulas and exhaustive 1-in-3 satisfiability.

use std::fmt::{self, Write as _};

use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormulaError {
    #[error("line {line}: malformed input: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("line {line}: clause has {found} variables, expected 3")]
    ClauseSize { line: usize, found: usize },
    #[error("line {line}: variable {variable} repeated within a clause")]
    RepeatedVariable { line: usize, variable: usize },
    #[error("line {line}: variable {variable} out of range 1..={count}")]
    VariableOutOfRange {
        line: usize,
        variable: usize,
        count: usize,
    },
    #[error("variable {variable} occurs {found} times, expected exactly 3")]
    Occurrences { variable: usize, found: usize },
    #[error("unexpected end of input: expected {expected}")]
    Truncated { expected: String },
    #[error("assignment has {found} values for {expected} variables")]
    AssignmentLength { found: usize, expected: usize },
    #[error("assignment character `{0}` is not T or F")]
    AssignmentChar(char),
}

/// A monotone 3-CNF in which every variable occurs in exactly three clauses.
/// Variables are 0-based internally and 1-based in files and messages.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Formula {
    variable_count: usize,
    clauses: Vec<[usize; 3]>,
}

impl Formula {
    /// Validates 0-based clauses.
    pub fn new(variable_count: usize, clauses: Vec<[usize; 3]>) -> Result<Self, FormulaError> {
        for (j, clause) in clauses.iter().enumerate() {
            check_clause(clause, variable_count, j + 1)?;
        }
        let formula = Self {
            variable_count,
            clauses,
        };
        formula.check_occurrences()?;
        Ok(formula)
    }

    fn check_occurrences(&self) -> Result<(), FormulaError> {
        let mut counts = vec![0usize; self.variable_count];
        for clause in &self.clauses {
            for &x in clause {
                counts[x] += 1;
            }
        }
        match counts.iter().position(|&c| c != 3) {
            Some(x) => Err(FormulaError::Occurrences {
                variable: x + 1,
                found: counts[x],
            }),
            None => Ok(()),
        }
    }

    pub fn parse(text: &str) -> Result<Self, FormulaError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hline, header) = lines.next().ok_or(FormulaError::Truncated {
            expected: "header `<n> <m>`".into(),
        })?;
        let head = parse_ints(header, hline)?;
        let [n, m] = head[..] else {
            return Err(FormulaError::Malformed {
                line: hline,
                msg: "expected `<n> <m>`".into(),
            });
        };
        let mut clauses = Vec::with_capacity(m);
        for _ in 0..m {
            let (line, text) = lines.next().ok_or_else(|| FormulaError::Truncated {
                expected: format!("{m} clause lines"),
            })?;
            let ids = parse_ints(text, line)?;
            if ids.len() != 3 {
                return Err(FormulaError::ClauseSize {
                    line,
                    found: ids.len(),
                });
            }
            let mut clause = [0; 3];
            for (slot, &id) in clause.iter_mut().zip(&ids) {
                if id == 0 || id > n {
                    return Err(FormulaError::VariableOutOfRange {
                        line,
                        variable: id,
                        count: n,
                    });
                }
                *slot = id - 1;
            }
            check_clause(&clause, n, line)?;
            clauses.push(clause);
        }
        if let Some((line, _)) = lines.next() {
            return Err(FormulaError::Malformed {
                line,
                msg: "more clause lines than declared".into(),
            });
        }
        let formula = Self {
            variable_count: n,
            clauses,
        };
        formula.check_occurrences()?;
        Ok(formula)
    }

    pub fn variable_count(&self) -> usize {
        self.variable_count
    }

    pub fn clauses(&self) -> &[[usize; 3]] {
        &self.clauses
    }

    /// Ascending indices of the three clauses containing `x`.
    pub fn occurrences(&self, x: usize) -> [usize; 3] {
        let mut out = [0; 3];
        let mut k = 0;
        for (j, clause) in self.clauses.iter().enumerate() {
            if clause.contains(&x) {
                out[k] = j;
                k += 1;
            }
        }
        debug_assert_eq!(k, 3);
        out
    }

    /// Necessary condition for a planar incidence graph: a simple bipartite
    /// planar graph on `V ≥ 3` vertices has at most `2V − 4` edges.
    pub fn incidence_may_be_planar(&self) -> bool {
        let vertices = self.variable_count + self.clauses.len();
        let edges = 3 * self.clauses.len();
        vertices < 3 || edges + 4 <= 2 * vertices
    }

    pub fn planarity_warning(&self) -> Option<String> {
        (!self.incidence_may_be_planar()).then(|| {
            let v = self.variable_count + self.clauses.len();
            format!(
                "warning: incidence graph has {} edges > 2*{v}-4; it cannot be planar",
                3 * self.clauses.len()
            )
        })
    }

    /// Canonical file text.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.variable_count, self.clauses.len());
        for [a, b, c] in &self.clauses {
            let _ = writeln!(out, "{} {} {}", a + 1, b + 1, c + 1);
        }
        out
    }

    /// Short stable digest of the canonical text.
    pub fn digest(&self) -> String {
        let hash = Sha256::digest(self.to_text().as_bytes());
        hash.iter().take(6).map(|b| format!("{b:02x}")).collect()
    }

    pub fn is_one_in_three(&self, b: &Assignment) -> bool {
        b.len() == self.variable_count
            && self
                .clauses
                .iter()
                .all(|c| c.iter().filter(|&&x| b.value(x)).count() == 1)
    }

    /// Every 1-in-3 satisfying assignment, in increasing binary order
    /// (variable 1 is the least significant bit).
    pub fn satisfying_assignments(&self) -> Vec<Assignment> {
        assert!(
            self.variable_count <= 20,
            "exhaustive search limited to 20 variables"
        );
        (0u32..1 << self.variable_count)
            .map(|bits| {
                Assignment::new(
                    (0..self.variable_count)
                        .map(|i| bits >> i & 1 == 1)
                        .collect(),
                )
            })
            .filter(|b| self.is_one_in_three(b))
            .collect()
    }

    pub fn is_satisfiable(&self) -> bool {
        !self.satisfying_assignments().is_empty()
    }
}

fn check_clause(clause: &[usize; 3], n: usize, line: usize) -> Result<(), FormulaError> {
    for (k, &x) in clause.iter().enumerate() {
        if x >= n {
            return Err(FormulaError::VariableOutOfRange {
                line,
                variable: x + 1,
                count: n,
            });
        }
        if clause[..k].contains(&x) {
            return Err(FormulaError::RepeatedVariable {
                line,
                variable: x + 1,
            });
        }
    }
    Ok(())
}

fn parse_ints(text: &str, line: usize) -> Result<Vec<usize>, FormulaError> {
    text.split_whitespace()
        .map(|tok| {
            tok.parse().map_err(|_| FormulaError::Malformed {
                line,
                msg: format!("`{tok}` is not a non-negative integer"),
            })
        })
        .collect()
}

/// A truth value per variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Assignment(Vec<bool>);

impl Assignment {
    pub fn new(values: Vec<bool>) -> Self {
        Self(values)
    }

    /// Parses a `T`/`F` string such as `TFF`.
    pub fn parse(text: &str, variable_count: usize) -> Result<Self, FormulaError> {
        let values = text
            .trim()
            .chars()
            .map(|c| match c {
                'T' | 't' => Ok(true),
                'F' | 'f' => Ok(false),
                other => Err(FormulaError::AssignmentChar(other)),
            })
            .collect::<Result<Vec<_>, _>>()?;
        if values.len() != variable_count {
            return Err(FormulaError::AssignmentLength {
                found: values.len(),
                expected: variable_count,
            });
        }
        Ok(Self(values))
    }

    pub fn value(&self, x: usize) -> bool {
        self.0[x]
    }

    pub fn values(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &v in &self.0 {
            f.write_char(if v { 'T' } else { 'F' })?;
        }
        Ok(())
    }
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn pinned_formulas() {
        let f = sat3();
        assert_eq!(f.variable_count(), 3);
        assert!(f.planarity_warning().is_some());
        let sols: Vec<String> = f
            .satisfying_assignments()
            .iter()
            .map(|b| b.to_string())
            .collect();
        assert_eq!(sols, ["TFF", "FTF", "FFT"]);

        let g = unsat4();
        assert!(g.planarity_warning().is_none());
        assert!(!g.is_satisfiable());
        assert_eq!(g.occurrences(0), [0, 1, 2]);
        assert_eq!(g.occurrences(3), [1, 2, 3]);
    }

    #[test]
    fn brute_force_unsat4() {
        // Independent count over all 16 assignments.
        let clauses = [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]];
        let hits = (0u32..16)
            .filter(|bits| {
                clauses
                    .iter()
                    .all(|c| c.iter().filter(|&&x| bits >> x & 1 == 1).count() == 1)
            })
            .count();
        assert_eq!(hits, 0);
    }

    #[test]
    fn validation_errors() {
        assert_eq!(
            Formula::parse("3 3\n1 1 2\n1 2 3\n2 3 3\n").unwrap_err(),
            FormulaError::RepeatedVariable {
                line: 2,
                variable: 1
            }
        );
        assert_eq!(
            Formula::parse("3 3\n1 2\n1 2 3\n1 2 3\n").unwrap_err(),
            FormulaError::ClauseSize { line: 2, found: 2 }
        );
        assert_eq!(
            Formula::parse("4 3\n1 2 3\n1 2 3\n1 2 3\n").unwrap_err(),
            FormulaError::Occurrences {
                variable: 4,
                found: 0
            }
        );
        assert!(matches!(
            Formula::parse("3 3\n1 2 4\n1 2 3\n1 2 3\n").unwrap_err(),
            FormulaError::VariableOutOfRange {
                line: 2,
                variable: 4,
                ..
            }
        ));
        assert!(matches!(
            Formula::parse("3 3\n1 2 3\n1 2 3\n").unwrap_err(),
            FormulaError::Truncated { .. }
        ));
    }

    #[test]
    fn roundtrip_and_digest() {
        let f = unsat4();
        assert_eq!(f.to_text(), UNSAT4);
        assert_eq!(Formula::parse(&f.to_text()).unwrap(), f);
        assert_eq!(f.digest(), unsat4().digest());
        assert_ne!(f.digest(), sat3().digest());
    }

    #[test]
    fn assignment_parsing() {
        let b = Assignment::parse("TfF", 3).unwrap();
        assert_eq!(b.values(), &[true, false, false]);
        assert!(matches!(
            Assignment::parse("TF", 3),
            Err(FormulaError::AssignmentLength { .. })
        ));
        assert!(matches!(
            Assignment::parse("TXF", 3),
            Err(FormulaError::AssignmentChar('X'))
        ));
    }
}
