//! Text syntax for formulas.
//!
//! ```text
//! iff     := imp ("<->" imp)*
//! imp     := or ("->" imp)?
//! or      := and ("|" and)*
//! and     := prefix ("&" prefix)*
//! prefix  := "~" prefix | "B{" agent "}" prefix | "D{" agent "}" prefix
//!          | "B" prefix | "D" prefix | "C{" agent ("," agent)* "}" prefix
//!          | "[ann" iff "]" prefix | "[act" file "#" action "]" prefix | atom
//! atom    := ident | "true" | "false" | "(" iff ")"
//! ```
//!
//! Bare `B` and `D` refer to agent `a`. `//` starts a comment.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Arc;

use crate::actionmodel::{ActionModel, PointedActionModel};
use crate::error::{Error, Result};
use crate::formula::{Agent, AgentSet, Formula};

pub const DEFAULT_AGENT: &str = "a";

const KEYWORDS: [&str; 5] = ["true", "false", "B", "D", "C"];

pub fn is_valid_atom_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !KEYWORDS.contains(&name)
}

/// Supplies action models for `[act FILE # point]`.
pub trait ActionResolver {
    fn resolve(&self, file: &str) -> std::result::Result<ActionModel, String>;
}

/// Reads action-model JSON files, relative paths resolved against `base`.
#[derive(Debug, Clone, Default)]
pub struct FileResolver {
    pub base: Option<PathBuf>,
}

impl ActionResolver for FileResolver {
    fn resolve(&self, file: &str) -> std::result::Result<ActionModel, String> {
        let path = match &self.base {
            Some(b) => b.join(file),
            None => PathBuf::from(file),
        };
        let text = std::fs::read_to_string(&path).map_err(|e| e.to_string())?;
        ActionModel::from_json_with(&text, self).map_err(|e| e.to_string())
    }
}

/// In-memory action models keyed by name.
#[derive(Debug, Clone, Default)]
pub struct MapResolver(pub BTreeMap<String, ActionModel>);

impl ActionResolver for MapResolver {
    fn resolve(&self, file: &str) -> std::result::Result<ActionModel, String> {
        self.0
            .get(file)
            .cloned()
            .ok_or_else(|| "no such action model".to_string())
    }
}

pub fn parse_formula(src: &str) -> Result<Formula> {
    parse_formula_with(src, &FileResolver::default())
}

pub fn parse_formula_with(src: &str, resolver: &dyn ActionResolver) -> Result<Formula> {
    let mut p = Parser {
        src,
        pos: 0,
        resolver,
    };
    p.skip_ws();
    let f = p.parse_iff()?;
    p.skip_ws();
    if p.pos < src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(f)
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    resolver: &'a dyn ActionResolver,
}

impl<'a> Parser<'a> {
    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn line_col(&self, pos: usize) -> (usize, usize) {
        let before = &self.src[..pos];
        let line = before.matches('\n').count() + 1;
        let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        (line, column)
    }

    fn error_at(&self, pos: usize, msg: impl Into<String>) -> Error {
        let (line, column) = self.line_col(pos);
        Error::Syntax {
            line,
            column,
            message: msg.into(),
        }
    }

    fn error(&self, msg: impl Into<String>) -> Error {
        self.error_at(self.pos, msg)
    }

    fn skip_ws(&mut self) {
        loop {
            let rest = self.rest();
            let trimmed = rest.trim_start();
            self.pos += rest.len() - trimmed.len();
            if trimmed.starts_with("//") {
                self.pos += trimmed.find('\n').unwrap_or(trimmed.len());
            } else {
                break;
            }
        }
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(tok) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &str) -> Result<()> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{tok}`")))
        }
    }

    fn ident(&mut self) -> Option<&'a str> {
        self.skip_ws();
        let rest = self.rest();
        let len = rest
            .char_indices()
            .find(|&(_, c)| !(c.is_ascii_alphanumeric() || c == '_'))
            .map_or(rest.len(), |(i, _)| i);
        if len == 0 {
            return None;
        }
        self.pos += len;
        Some(&rest[..len])
    }

    fn parse_iff(&mut self) -> Result<Formula> {
        let mut lhs = self.parse_imp()?;
        while self.eat("<->") {
            let rhs = self.parse_imp()?;
            lhs = Formula::iff(lhs, rhs);
        }
        Ok(lhs)
    }

    fn parse_imp(&mut self) -> Result<Formula> {
        let lhs = self.parse_or()?;
        if self.eat("->") {
            let rhs = self.parse_imp()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn parse_or(&mut self) -> Result<Formula> {
        let mut lhs = self.parse_and()?;
        while self.eat("|") {
            let rhs = self.parse_and()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn parse_and(&mut self) -> Result<Formula> {
        let mut lhs = self.parse_prefix()?;
        while self.eat("&") {
            let rhs = self.parse_prefix()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn agent_in_braces(&mut self) -> Result<Agent> {
        let name = self
            .ident()
            .ok_or_else(|| self.error("expected agent name"))?;
        self.expect("}")?;
        Ok(Agent::new(name))
    }

    fn parse_prefix(&mut self) -> Result<Formula> {
        self.skip_ws();
        if self.eat("~") {
            return Ok(Formula::not(self.parse_prefix()?));
        }
        if self.eat("[") {
            return self.parse_bracket();
        }
        if self.eat("(") {
            let f = self.parse_iff()?;
            self.expect(")")?;
            return Ok(f);
        }
        let start = self.pos;
        let Some(word) = self.ident() else {
            return Err(self.error("expected a formula"));
        };
        match word {
            "true" => Ok(Formula::Top),
            "false" => Ok(Formula::Bottom),
            "B" | "D" => {
                let agent = if self.eat("{") {
                    self.agent_in_braces()?
                } else {
                    Agent::from(DEFAULT_AGENT)
                };
                let body = self.parse_prefix()?;
                Ok(if word == "B" {
                    Formula::boxed(agent, body)
                } else {
                    Formula::diamond(agent, body)
                })
            }
            "C" => {
                self.expect("{")?;
                let mut group = AgentSet::new();
                loop {
                    let name = self
                        .ident()
                        .ok_or_else(|| self.error("expected agent name"))?;
                    group.insert(Agent::new(name));
                    if !self.eat(",") {
                        break;
                    }
                }
                self.expect("}")?;
                let body = self.parse_prefix()?;
                Ok(Formula::common(group, body))
            }
            w if w.starts_with(|c: char| c.is_ascii_digit()) => {
                Err(self.error_at(start, format!("atom `{w}` must start with a letter")))
            }
            w => Ok(Formula::atom(w)),
        }
    }

    fn parse_bracket(&mut self) -> Result<Formula> {
        let kw_pos = {
            self.skip_ws();
            self.pos
        };
        match self.ident() {
            Some("ann") => {
                let ann = self.parse_iff()?;
                self.expect("]")?;
                let body = self.parse_prefix()?;
                Ok(Formula::announce(ann, body))
            }
            Some("act") => {
                self.skip_ws();
                let file_pos = self.pos;
                let file = self.action_file()?;
                self.expect("#")?;
                let point = self
                    .ident()
                    .ok_or_else(|| self.error("expected action name"))?
                    .to_string();
                self.expect("]")?;
                let (line, column) = self.line_col(file_pos);
                let fail = |reason: String| Error::UnknownActionFile {
                    file: file.clone(),
                    line,
                    column,
                    reason,
                };
                let mut model = self.resolver.resolve(&file).map_err(fail)?;
                model.source = Some(file.clone());
                let pa = PointedActionModel::new(model, &point).map_err(|e| fail(e.to_string()))?;
                let body = self.parse_prefix()?;
                Ok(Formula::action(Arc::new(pa), body))
            }
            _ => Err(self.error_at(kw_pos, "expected `ann` or `act` after `[`")),
        }
    }

    fn action_file(&mut self) -> Result<String> {
        if self.rest().starts_with('"') {
            let body = &self.rest()[1..];
            let end = body
                .find('"')
                .ok_or_else(|| self.error("unterminated file name"))?;
            let name = body[..end].to_string();
            self.pos += end + 2;
            return Ok(name);
        }
        let rest = self.rest();
        let len = rest
            .find(|c: char| c.is_whitespace() || c == '#' || c == ']')
            .unwrap_or(rest.len());
        if len == 0 {
            return Err(self.error("expected action file name"));
        }
        self.pos += len;
        Ok(rest[..len].to_string())
    }
}

// Binding strength, loosest first.
const P_IFF: u8 = 1;
const P_IMP: u8 = 2;
const P_OR: u8 = 3;
const P_AND: u8 = 4;
const P_PREFIX: u8 = 5;

enum View<'a> {
    Iff(&'a Formula, &'a Formula),
    Imp(&'a Formula, &'a Formula),
    Or(&'a Formula, &'a Formula),
    Dia(&'a crate::formula::Agent, &'a Formula),
    Other,
}

// Recognizes the expansions produced by the derived-connective builders.
fn view(f: &Formula) -> View<'_> {
    if let Formula::And(l, r) = f {
        if let (Formula::Not(l), Formula::Not(r)) = (&**l, &**r) {
            if let (Formula::And(a, nb), Formula::And(b, na)) = (&**l, &**r) {
                if let (Formula::Not(nb), Formula::Not(na)) = (&**nb, &**na) {
                    if a == na && b == nb {
                        return View::Iff(a, b);
                    }
                }
            }
        }
        return View::Other;
    }
    let Formula::Not(inner) = f else {
        return View::Other;
    };
    match &**inner {
        Formula::And(l, r) => match (&**l, &**r) {
            // ~(~(x & ~y) & ~r) reads better as (x -> y) -> r
            (Formula::Not(a), Formula::Not(b)) if !is_imp_body(a) => View::Or(a, b),
            (a, Formula::Not(b)) => View::Imp(a, b),
            _ => View::Other,
        },
        Formula::Box(ag, body) => match &**body {
            Formula::Not(g) => View::Dia(ag, g),
            _ => View::Other,
        },
        _ => View::Other,
    }
}

fn is_imp_body(f: &Formula) -> bool {
    matches!(f, Formula::And(_, r) if matches!(**r, Formula::Not(_)))
}

/// Prints with the fewest parentheses such that parsing gives back `f`.
pub fn print_formula(f: &Formula) -> String {
    let mut out = String::new();
    write(f, 0, &mut out);
    out
}

fn write(f: &Formula, min: u8, out: &mut String) {
    let (prec, text) = render(f);
    if prec < min {
        out.push('(');
        out.push_str(&text);
        out.push(')');
    } else {
        out.push_str(&text);
    }
}

fn sub(f: &Formula, min: u8) -> String {
    let mut s = String::new();
    write(f, min, &mut s);
    s
}

fn render(f: &Formula) -> (u8, String) {
    match view(f) {
        View::Iff(a, b) => return (P_IFF, format!("{} <-> {}", sub(a, P_IFF), sub(b, P_IMP))),
        View::Imp(a, b) => return (P_IMP, format!("{} -> {}", sub(a, P_OR), sub(b, P_IMP))),
        View::Or(a, b) => return (P_OR, format!("{} | {}", sub(a, P_OR), sub(b, P_AND))),
        View::Dia(ag, g) => return (P_PREFIX, format!("D{{{ag}}} {}", sub(g, P_PREFIX))),
        View::Other => {}
    }
    match f {
        Formula::Top => (P_PREFIX, "true".into()),
        Formula::Bottom => (P_PREFIX, "false".into()),
        Formula::Atom(p) => (P_PREFIX, p.to_string()),
        Formula::Not(g) => (P_PREFIX, format!("~{}", sub(g, P_PREFIX))),
        Formula::And(a, b) => (P_AND, format!("{} & {}", sub(a, P_AND), sub(b, P_PREFIX))),
        Formula::Box(ag, g) => (P_PREFIX, format!("B{{{ag}}} {}", sub(g, P_PREFIX))),
        Formula::Announce(a, b) => (
            P_PREFIX,
            format!("[ann {}] {}", sub(a, 0), sub(b, P_PREFIX)),
        ),
        Formula::CommonBelief(group, g) => {
            let names: Vec<&str> = group.iter().map(|a| a.as_str()).collect();
            (
                P_PREFIX,
                format!("C{{{}}} {}", names.join(","), sub(g, P_PREFIX)),
            )
        }
        Formula::ActionBox(pa, g) => {
            let file = pa.model.display_name();
            let file = if file.contains(|c: char| c.is_whitespace() || c == '#' || c == ']') {
                format!("\"{file}\"")
            } else {
                file
            };
            (
                P_PREFIX,
                format!("[act {file} # {}] {}", pa.point_name(), sub(g, P_PREFIX)),
            )
        }
    }
}
