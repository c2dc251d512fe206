//! Cubic monotone one-in-three 3SAT.

use std::collections::{BTreeSet, HashMap};

/// A validated formula: `m` negation-free three-clauses over `m` variables,
/// each variable occurring in exactly three clauses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CmFormula {
    names: Vec<String>,
    clauses: Vec<[usize; 3]>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CmError {
    #[error("clause {clause} repeats a variable")]
    RepeatedVariable { clause: usize },
    #[error("clause {clause} uses variable index {index}, but only {variables} variables exist")]
    VariableOutOfRange {
        clause: usize,
        index: usize,
        variables: usize,
    },
    #[error("clauses {first} and {second} contain the same variables")]
    DuplicateClause { first: usize, second: usize },
    #[error("variable `{variable}` occurs {count} times, expected 3")]
    OccurrenceNotThree { variable: String, count: usize },
    #[error("{variables} variables for {clauses} clauses")]
    VariableCountMismatch { variables: usize, clauses: usize },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("oracle limited to {cap} clauses, got {clauses}")]
    SizeCapExceeded { clauses: usize, cap: usize },
}

/// Largest formula the oracle accepts.
pub const ORACLE_MAX_CLAUSES: usize = 24;

impl CmFormula {
    /// Validates clauses over variables named `names[i]`.
    pub fn new(names: Vec<String>, clauses: Vec<[usize; 3]>) -> Result<Self, CmError> {
        let n = names.len();
        for (c, clause) in clauses.iter().enumerate() {
            if let Some(&index) = clause.iter().find(|&&v| v >= n) {
                return Err(CmError::VariableOutOfRange {
                    clause: c,
                    index,
                    variables: n,
                });
            }
            if clause[0] == clause[1] || clause[0] == clause[2] || clause[1] == clause[2] {
                return Err(CmError::RepeatedVariable { clause: c });
            }
        }
        let mut seen: HashMap<[usize; 3], usize> = HashMap::new();
        for (c, clause) in clauses.iter().enumerate() {
            let mut key = *clause;
            key.sort();
            if let Some(&first) = seen.get(&key) {
                return Err(CmError::DuplicateClause { first, second: c });
            }
            seen.insert(key, c);
        }
        let mut count = vec![0; n];
        for clause in &clauses {
            for &v in clause {
                count[v] += 1;
            }
        }
        if let Some(v) = (0..n).find(|&v| count[v] != 3) {
            return Err(CmError::OccurrenceNotThree {
                variable: names[v].clone(),
                count: count[v],
            });
        }
        if n != clauses.len() {
            return Err(CmError::VariableCountMismatch {
                variables: n,
                clauses: clauses.len(),
            });
        }
        Ok(CmFormula { names, clauses })
    }

    /// Validates index clauses, naming variable `i` as `X{i}`. The variable
    /// count is one more than the largest index used.
    pub fn from_indices(clauses: &[[usize; 3]]) -> Result<Self, CmError> {
        let n = clauses.iter().flatten().map(|&v| v + 1).max().unwrap_or(0);
        CmFormula::new((0..n).map(|i| format!("X{i}")).collect(), clauses.to_vec())
    }

    /// Validates named clauses, indexing variables by first appearance.
    pub fn from_named<S: AsRef<str>>(clauses: &[[S; 3]]) -> Result<Self, CmError> {
        let mut names: Vec<String> = Vec::new();
        let mut index: HashMap<String, usize> = HashMap::new();
        let mut out = Vec::with_capacity(clauses.len());
        for clause in clauses {
            let mut triple = [0; 3];
            for (slot, name) in triple.iter_mut().zip(clause) {
                let name = name.as_ref();
                *slot = *index.entry(name.to_string()).or_insert_with(|| {
                    names.push(name.to_string());
                    names.len() - 1
                });
            }
            out.push(triple);
        }
        CmFormula::new(names, out)
    }

    pub fn m(&self) -> usize {
        self.clauses.len()
    }

    pub fn clauses(&self) -> &[[usize; 3]] {
        &self.clauses
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, v: usize) -> &str {
        &self.names[v]
    }

    pub fn var_id(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// The copy with every variable renamed by appending `'`.
    pub fn renamed(&self) -> CmFormula {
        CmFormula {
            names: self.names.iter().map(|n| format!("{n}'")).collect(),
            clauses: self.clauses.clone(),
        }
    }

    /// Resolves variable names into a model.
    pub fn model<S: AsRef<str>>(&self, names: &[S]) -> Result<BTreeSet<usize>, CmError> {
        names
            .iter()
            .map(|n| {
                self.var_id(n.as_ref())
                    .ok_or_else(|| CmError::UnknownVariable(n.as_ref().to_string()))
            })
            .collect()
    }

    /// Whether `model` meets every clause in exactly one variable.
    pub fn is_one_in_three(&self, model: &BTreeSet<usize>) -> bool {
        self.clauses
            .iter()
            .all(|c| c.iter().filter(|v| model.contains(v)).count() == 1)
    }
}

/// The formula of the running example: six clauses over `X0..X5`.
pub fn example_formula() -> CmFormula {
    CmFormula::from_indices(&[[0, 1, 2], [0, 2, 3], [0, 1, 3], [2, 4, 5], [1, 4, 5], [3, 4, 5]])
        .expect("example formula is cubic monotone")
}

/// All four 3-subsets of four variables; has no one-in-three model.
pub fn unsat_formula() -> CmFormula {
    CmFormula::from_indices(&[[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]]).expect("valid formula")
}

/// Finds the lexicographically least one-in-three model, if any.
pub fn cm_oracle(formula: &CmFormula) -> Result<Option<BTreeSet<usize>>, CmError> {
    if formula.m() > ORACLE_MAX_CLAUSES {
        return Err(CmError::SizeCapExceeded {
            clauses: formula.m(),
            cap: ORACLE_MAX_CLAUSES,
        });
    }
    let n = formula.names.len();
    let mut occurs = vec![Vec::new(); n];
    for (c, clause) in formula.clauses.iter().enumerate() {
        for &v in clause {
            occurs[v].push(c);
        }
    }
    let mut value = vec![None; n];
    if search(formula, &occurs, &mut value, 0) {
        Ok(Some((0..n).filter(|&v| value[v] == Some(true)).collect()))
    } else {
        Ok(None)
    }
}

/// Assigns variables in index order, trying true first, with unit
/// propagation inside clauses. All models have the same size, so the
/// first one found is the least.
fn search(f: &CmFormula, occurs: &[Vec<usize>], value: &mut Vec<Option<bool>>, next: usize) -> bool {
    let Some(v) = (next..value.len()).find(|&v| value[v].is_none()) else {
        return true;
    };
    for choice in [true, false] {
        let saved = value.clone();
        value[v] = Some(choice);
        if propagate(f, occurs, value, v) && search(f, occurs, value, v + 1) {
            return true;
        }
        *value = saved;
    }
    false
}

fn propagate(f: &CmFormula, occurs: &[Vec<usize>], value: &mut [Option<bool>], start: usize) -> bool {
    let mut stack = vec![start];
    while let Some(v) = stack.pop() {
        for &c in &occurs[v] {
            let clause = f.clauses[c];
            let trues = clause.iter().filter(|&&x| value[x] == Some(true)).count();
            let open: Vec<usize> = clause.iter().copied().filter(|&x| value[x].is_none()).collect();
            match (trues, open.len()) {
                (t, _) if t > 1 => return false,
                (1, _) => {
                    for x in open {
                        value[x] = Some(false);
                        stack.push(x);
                    }
                }
                (0, 0) => return false,
                (0, 1) => {
                    value[open[0]] = Some(true);
                    stack.push(open[0]);
                }
                _ => {}
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent check: the least model by plain subset enumeration.
    fn least_model_by_subsets(f: &CmFormula) -> Option<BTreeSet<usize>> {
        let n = f.names().len();
        let mut models: Vec<Vec<usize>> = (0u32..1 << n)
            .map(|mask| (0..n).filter(|&v| mask >> v & 1 == 1).collect::<Vec<_>>())
            .filter(|m| f.is_one_in_three(&m.iter().copied().collect()))
            .collect();
        models.sort();
        models.first().map(|m| m.iter().copied().collect())
    }

    #[test]
    fn validation() {
        let f = example_formula();
        assert_eq!(f.m(), 6);
        assert_eq!(unsat_formula().m(), 4);
        assert!(matches!(
            CmFormula::from_indices(&[[0, 1, 2]]),
            Err(CmError::OccurrenceNotThree { .. })
        ));
        assert!(matches!(
            CmFormula::from_indices(&[[0, 1, 2], [2, 1, 0], [0, 1, 2]]),
            Err(CmError::DuplicateClause { first: 0, second: 1 })
        ));
        assert!(matches!(
            CmFormula::from_indices(&[[0, 0, 1]]),
            Err(CmError::RepeatedVariable { clause: 0 })
        ));
        assert!(matches!(
            CmFormula::new(vec!["a".into()], vec![[0, 1, 2]]),
            Err(CmError::VariableOutOfRange { .. })
        ));
    }

    #[test]
    fn oracle_on_fixtures() {
        let f = example_formula();
        assert_eq!(cm_oracle(&f).unwrap(), Some(BTreeSet::from([0, 4])));
        assert_eq!(cm_oracle(&unsat_formula()).unwrap(), None);
        assert_eq!(least_model_by_subsets(&unsat_formula()), None);
        let renamed = f.renamed();
        let m = cm_oracle(&renamed).unwrap().unwrap();
        let names: Vec<&str> = m.iter().map(|&v| renamed.name(v)).collect();
        assert_eq!(names, ["X0'", "X4'"]);
    }

    #[test]
    fn named_clauses_index_by_first_appearance() {
        let f = CmFormula::from_named(&[
            ["b", "a", "c"],
            ["b", "c", "d"],
            ["b", "a", "d"],
            ["c", "e", "f"],
            ["a", "e", "f"],
            ["d", "e", "f"],
        ])
        .unwrap();
        assert_eq!(f.names()[..3], ["b", "a", "c"]);
        assert_eq!(f.model(&["b", "e"]).unwrap(), BTreeSet::from([0, 4]));
        assert!(f.model(&["zz"]).is_err());
    }

    #[test]
    fn oracle_agrees_with_subset_enumeration() {
        let formulas = [
            example_formula(),
            unsat_formula(),
            CmFormula::from_indices(&[
                [0, 1, 2],
                [3, 4, 5],
                [0, 3, 6],
                [1, 4, 7],
                [2, 5, 8],
                [6, 7, 8],
                [0, 4, 8],
                [1, 5, 6],
                [2, 3, 7],
            ])
            .unwrap(),
        ];
        for f in formulas {
            assert_eq!(cm_oracle(&f).unwrap(), least_model_by_subsets(&f));
        }
    }

    #[test]
    fn size_cap() {
        let m = 27;
        let clauses: Vec<[usize; 3]> = (0..m).map(|i| [i, (i + 1) % m, (i + 2) % m]).collect();
        let f = CmFormula::from_indices(&clauses).unwrap();
        assert!(matches!(cm_oracle(&f), Err(CmError::SizeCapExceeded { .. })));
    }
}
