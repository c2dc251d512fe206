//! Text and JSON file formats for transition systems, types and formulas.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use ssp_core::reductions::{CmError, CmFormula};
use ssp_core::{BooleanType, Interaction, TransitionSystem, TsBuilder, TsError};

#[derive(Debug, thiserror::Error)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("missing `initial <state>` line")]
    MissingInitial,
    #[error(transparent)]
    Invalid(#[from] TsError),
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Formula(#[from] CmError),
}

fn syntax(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        message: message.into(),
    }
}

/// Identifiers are `[A-Za-z0-9_.'-]+`.
pub fn is_identifier(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || "_.'-".contains(c))
}

/// Text of `line` before any `#`, trimmed.
fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim()
}

/// Parses the text format: `initial <state>` followed by one
/// `<src> <event> <dst>` edge per line.
pub fn parse_ts(text: &str) -> Result<TransitionSystem, ParseError> {
    let mut builder = TsBuilder::new();
    let mut has_initial = false;
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let content = strip_comment(raw);
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        if let Some(bad) = fields.iter().find(|f| !is_identifier(f)) {
            return Err(syntax(line, format!("invalid identifier `{bad}`")));
        }
        if !has_initial {
            match fields.as_slice() {
                ["initial", state] => {
                    builder.initial(*state);
                    has_initial = true;
                }
                _ => return Err(syntax(line, "expected `initial <state>`")),
            }
            continue;
        }
        match fields.as_slice() {
            [src, event, dst] => {
                builder.edge(*src, *event, *dst);
            }
            _ => {
                return Err(syntax(
                    line,
                    format!("expected `<src> <event> <dst>`, found {} fields", fields.len()),
                ))
            }
        }
    }
    if !has_initial {
        return Err(ParseError::MissingInitial);
    }
    Ok(builder.build()?)
}

/// The text format, edges in lexicographic order.
pub fn serialize_ts(ts: &TransitionSystem) -> String {
    let mut out = format!("initial {}\n", ts.state_name(ts.initial()));
    for (s, e, t) in ts.edge_names() {
        let _ = writeln!(out, "{s} {e} {t}");
    }
    out
}

/// JSON mirror of the text format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TsJson {
    pub initial: String,
    pub edges: Vec<[String; 3]>,
}

pub fn parse_ts_json(text: &str) -> Result<TransitionSystem, ParseError> {
    let doc: TsJson = serde_json::from_str(text)?;
    let mut builder = TsBuilder::new();
    for name in std::iter::once(&doc.initial).chain(doc.edges.iter().flatten()) {
        if !is_identifier(name) {
            return Err(TsError::InvalidIdentifier(name.clone()).into());
        }
    }
    builder.initial(doc.initial.as_str());
    for [s, e, t] in &doc.edges {
        builder.edge(s.as_str(), e.as_str(), t.as_str());
    }
    Ok(builder.build()?)
}

pub fn serialize_ts_json(ts: &TransitionSystem) -> String {
    let doc = TsJson {
        initial: ts.state_name(ts.initial()).to_string(),
        edges: ts
            .edge_names()
            .map(|(s, e, t)| [s.into(), e.into(), t.into()])
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("serializable") + "\n"
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TypeSpecError {
    #[error("unknown interaction name `{0}`")]
    UnknownInteractionName(String),
    #[error("interaction `{0}` listed twice")]
    Duplicate(String),
}

/// Parses a comma-separated, case-insensitive list of interactions. The
/// empty string is the empty type.
pub fn parse_type(spec: &str) -> Result<BooleanType, TypeSpecError> {
    let mut tau = BooleanType::EMPTY;
    if spec.trim().is_empty() {
        return Ok(tau);
    }
    for part in spec.split(',') {
        let i: Interaction = part
            .parse()
            .map_err(|_| TypeSpecError::UnknownInteractionName(part.trim().to_string()))?;
        if tau.contains(i) {
            return Err(TypeSpecError::Duplicate(i.name().to_string()));
        }
        tau = tau.with(i);
    }
    Ok(tau)
}

/// Canonical spelling, members in index order.
pub fn format_type(tau: BooleanType) -> String {
    tau.members().map(Interaction::name).collect::<Vec<_>>().join(",")
}

/// One clause per line, three whitespace-separated variable names.
pub fn parse_formula(text: &str) -> Result<CmFormula, ParseError> {
    let mut clauses: Vec<[String; 3]> = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let content = strip_comment(raw);
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        if let Some(bad) = fields.iter().find(|f| !is_identifier(f)) {
            return Err(syntax(n + 1, format!("invalid variable name `{bad}`")));
        }
        match fields.as_slice() {
            [a, b, c] => clauses.push([a.to_string(), b.to_string(), c.to_string()]),
            _ => {
                return Err(syntax(
                    n + 1,
                    format!("expected three variables, found {}", fields.len()),
                ))
            }
        }
    }
    Ok(CmFormula::from_named(&clauses)?)
}

pub fn serialize_formula(formula: &CmFormula) -> String {
    let mut out = String::new();
    for clause in formula.clauses() {
        let _ = writeln!(
            out,
            "{} {} {}",
            formula.name(clause[0]),
            formula.name(clause[1]),
            formula.name(clause[2])
        );
    }
    out
}

/// Parses a model given as comma- or space-separated variable names.
pub fn parse_model(formula: &CmFormula, spec: &str) -> Result<BTreeSet<usize>, CmError> {
    let names: Vec<&str> = spec
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .collect();
    formula.model(&names)
}

/// Plain Graphviz digraph; the initial state is drawn with a double circle.
pub fn to_dot(ts: &TransitionSystem) -> String {
    let mut out = String::from("digraph ts {\n");
    for (s, name) in ts.states().iter().enumerate() {
        let shape = if s == ts.initial() { "doublecircle" } else { "circle" };
        let _ = writeln!(out, "  \"{name}\" [shape={shape}];");
    }
    for (s, e, t) in ts.edge_names() {
        let _ = writeln!(out, "  \"{s}\" -> \"{t}\" [label=\"{e}\"];");
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use ssp_core::random::{random_ts, RandomTsParams};
    use ssp_core::reductions::example_formula;

    const A1: &str = "# two states\ninitial s0\ns0 a s1\ns1 a s0\n";

    #[test]
    fn parses_with_comments() {
        let ts = parse_ts(A1).unwrap();
        assert_eq!(ts.num_states(), 2);
        assert_eq!(ts.num_edges(), 2);
        assert_eq!(serialize_ts(&ts), "initial s0\ns0 a s1\ns1 a s0\n");
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = parse_ts("initial s0\ns0 a\n").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { line: 2, .. }), "{err}");
        let err = parse_ts("\n# c\ns0 a s1\n").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { line: 3, .. }), "{err}");
        let err = parse_ts("initial s0\ns0 a s$\n").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { line: 2, .. }), "{err}");
        assert!(matches!(parse_ts("# nothing\n"), Err(ParseError::MissingInitial)));
        assert!(matches!(
            parse_ts("initial s0\ns0 a s1\ns0 a s2\n"),
            Err(ParseError::Invalid(_))
        ));
    }

    #[test]
    fn single_state_without_edges() {
        let ts = parse_ts("initial q\n").unwrap();
        assert_eq!((ts.num_states(), ts.num_events()), (1, 0));
        assert_eq!(serialize_ts(&ts), "initial q\n");
    }

    #[test]
    fn json_mirrors_text() {
        let ts = parse_ts(A1).unwrap();
        let json = serialize_ts_json(&ts);
        assert_eq!(parse_ts_json(&json).unwrap(), ts);
        assert!(parse_ts_json("{\"initial\": \"s 0\", \"edges\": []}").is_err());
    }

    #[test]
    fn type_specs() {
        assert_eq!(
            parse_type("nop,INP").unwrap(),
            BooleanType::from([Interaction::Nop, Interaction::Inp])
        );
        assert_eq!(parse_type("").unwrap(), BooleanType::EMPTY);
        assert_eq!(
            parse_type(" swap , out ").unwrap(),
            BooleanType::from([Interaction::Swap, Interaction::Out])
        );
        assert_eq!(parse_type("nop,nop"), Err(TypeSpecError::Duplicate("nop".into())));
        assert_eq!(
            parse_type("nop,jump"),
            Err(TypeSpecError::UnknownInteractionName("jump".into()))
        );
        assert_eq!(format_type(parse_type("out,nop").unwrap()), "nop,out");
    }

    #[test]
    fn formula_round_trip() {
        let f = example_formula();
        assert_eq!(parse_formula(&serialize_formula(&f)).unwrap(), f);
        assert!(matches!(
            parse_formula("X0 X1\n"),
            Err(ParseError::Syntax { line: 1, .. })
        ));
        assert!(matches!(parse_formula("X0 X1 X2\n"), Err(ParseError::Formula(_))));
        assert_eq!(parse_model(&f, "X0,X4").unwrap(), BTreeSet::from([0, 4]));
    }

    #[test]
    fn dot_lists_every_edge() {
        let dot = to_dot(&parse_ts(A1).unwrap());
        assert!(dot.contains("\"s0\" -> \"s1\" [label=\"a\"]"));
        assert!(dot.contains("\"s0\" [shape=doublecircle]"));
    }

    proptest! {
        #[test]
        fn text_and_json_round_trip(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let ts = random_ts(&mut rng, &RandomTsParams::default());
            prop_assert_eq!(&parse_ts(&serialize_ts(&ts)).unwrap(), &ts);
            prop_assert_eq!(&parse_ts_json(&serialize_ts_json(&ts)).unwrap(), &ts);
        }
    }
}
