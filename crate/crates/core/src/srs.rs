//! Plain-text rewriting systems: one `lhs -> rhs` rule per line, symbols
//! separated by whitespace, `#` starting a comment.

use std::collections::BTreeSet;

use crate::chain::Symbol;
use crate::completion::Rule;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Srs {
    pub alphabet: BTreeSet<Symbol>,
    pub rules: Vec<Rule>,
}

pub fn parse_srs(text: &str) -> Result<Srs> {
    let mut rules = Vec::new();
    let mut last_line = 0;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        last_line = line_no;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: &str| Error::Parse {
            line: line_no,
            message: message.to_string(),
        };
        let (lhs, rhs) = line.split_once("->").ok_or_else(|| err("expected `->`"))?;
        if rhs.contains("->") {
            return Err(err("more than one `->`"));
        }
        let tokens = |s: &str| s.split_whitespace().map(Symbol::new).collect::<Vec<_>>();
        let lhs = tokens(lhs);
        if lhs.is_empty() {
            return Err(err("empty left-hand side"));
        }
        rules.push(Rule {
            lhs,
            rhs: tokens(rhs),
        });
    }
    if rules.is_empty() {
        return Err(Error::Parse {
            line: last_line.max(1),
            message: "no rules".to_string(),
        });
    }
    let alphabet = rules
        .iter()
        .flat_map(|r| r.lhs.iter().chain(&r.rhs))
        .cloned()
        .collect();
    Ok(Srs { alphabet, rules })
}
