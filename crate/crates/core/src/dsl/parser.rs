use std::collections::BTreeSet;

use super::lexer::{lex, Tok, Token};
use super::{DslError, Statement, Stmt};
use crate::logic::{
    conj_normalize, sym, ActTerm, Atom, Literal, Origin, PropFormula, Rule, Strength, Sym,
};
use crate::value::Value;

pub struct Parser {
    toks: Vec<Token>,
    pos: usize,
    end: (usize, usize),
}

impl Parser {
    pub fn new(text: &str) -> Result<Self, DslError> {
        let toks = lex(text)?;
        let lines = text.lines().count().max(1);
        let last = text.lines().last().map(|l| l.chars().count() + 1).unwrap_or(1);
        Ok(Parser {
            toks,
            pos: 0,
            end: (lines, last),
        })
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .map(|t| (t.line, t.column))
            .unwrap_or(self.end)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, DslError> {
        let (line, column) = self.here();
        Err(DslError::new(line, column, msg))
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn found(&self) -> String {
        match self.peek() {
            Some(t) => t.describe(),
            None => "end of input".into(),
        }
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.tok.clone());
        self.pos += 1;
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), DslError> {
        if self.eat(&tok) {
            Ok(())
        } else {
            self.err(format!("expected {}, found {}", tok.describe(), self.found()))
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if s == kw)
    }

    fn ident(&mut self, what: &str) -> Result<Sym, DslError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = sym(s);
                self.pos += 1;
                Ok(s)
            }
            _ => self.err(format!("expected {what}, found {}", self.found())),
        }
    }

    fn ident_list(&mut self, what: &str) -> Result<Vec<Sym>, DslError> {
        let mut out = vec![self.ident(what)?];
        while self.eat(&Tok::Comma) {
            out.push(self.ident(what)?);
        }
        Ok(out)
    }

    fn number(&mut self) -> Result<Value, DslError> {
        let neg = if self.eat(&Tok::Minus) {
            true
        } else {
            self.eat(&Tok::Plus);
            false
        };
        match self.peek() {
            Some(Tok::Number(n)) => {
                let text = if neg { format!("-{n}") } else { n.clone() };
                let v = text
                    .parse::<Value>()
                    .or_else(|e| self.err(e.to_string()))?;
                self.pos += 1;
                Ok(v)
            }
            _ => self.err(format!("expected a rational number, found {}", self.found())),
        }
    }

    fn formula(&mut self) -> Result<PropFormula, DslError> {
        let negated = self.eat(&Tok::Tilde);
        let atoms = if negated && self.eat(&Tok::LParen) {
            let atoms = self.conjunction()?;
            self.expect(Tok::RParen)?;
            atoms
        } else {
            self.conjunction()?
        };
        conj_normalize(atoms, negated).or_else(|e| self.err(e.to_string()))
    }

    fn conjunction(&mut self) -> Result<Vec<Sym>, DslError> {
        let mut atoms = vec![self.ident("a property")?];
        while self.eat(&Tok::Amp) {
            atoms.push(self.ident("a property")?);
        }
        Ok(atoms)
    }

    fn act_term(&mut self) -> Result<ActTerm, DslError> {
        let mut acts = vec![self.ident("an act")?];
        while self.eat(&Tok::Amp) {
            acts.push(self.ident("an act")?);
        }
        ActTerm::new(acts).or_else(|e| self.err(e.to_string()))
    }

    pub fn literal(&mut self) -> Result<Literal, DslError> {
        if self.eat(&Tok::Tilde) || (self.is_keyword("not") && self.bump().is_some()) {
            return Ok(self.literal()?.negate());
        }
        let head = self.ident("a literal")?;
        let atom = match &*head {
            "entry" => {
                if !self.is_keyword("contr") {
                    return self.err(format!("expected `contr` after `entry`, found {}", self.found()));
                }
                self.pos += 1;
                self.expect(Tok::LParen)?;
                let formula = self.formula()?;
                self.expect(Tok::RParen)?;
                self.expect(Tok::Eq)?;
                Atom::ContrEntry {
                    formula,
                    value: self.number()?,
                }
            }
            "holds" => {
                self.expect(Tok::LParen)?;
                let formula = self.formula()?;
                self.expect(Tok::Comma)?;
                let state = self.ident("a state")?;
                self.expect(Tok::RParen)?;
                Atom::Holds { formula, state }
            }
            "achieves" => {
                self.expect(Tok::LParen)?;
                let act = self.act_term()?;
                self.expect(Tok::Comma)?;
                let formula = self.formula()?;
                self.expect(Tok::RParen)?;
                Atom::Achieves { act, formula }
            }
            "desir" | "undesir" => {
                self.expect(Tok::LParen)?;
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                if &*head == "desir" {
                    Atom::Desir(f)
                } else {
                    Atom::Undesir(f)
                }
            }
            "do" => {
                self.expect(Tok::LParen)?;
                let a = self.act_term()?;
                self.expect(Tok::RParen)?;
                Atom::Do(a)
            }
            "contr" => {
                self.expect(Tok::LParen)?;
                let formula = self.formula()?;
                self.expect(Tok::RParen)?;
                self.expect(Tok::Eq)?;
                Atom::Contr {
                    formula,
                    value: self.number()?,
                }
            }
            "u" => {
                self.expect(Tok::LParen)?;
                let state = self.ident("a state")?;
                let basis = if self.eat(&Tok::Bar) {
                    let mut b = BTreeSet::new();
                    if !matches!(self.peek(), Some(Tok::RParen)) {
                        b.extend(self.ident_list("a property")?);
                    }
                    Some(b)
                } else {
                    None
                };
                self.expect(Tok::RParen)?;
                self.expect(Tok::Eq)?;
                let value = self.number()?;
                match basis {
                    Some(basis) => Atom::Assess {
                        state,
                        basis,
                        value,
                    },
                    None => Atom::Utility { state, value },
                }
            }
            "prob" => {
                self.expect(Tok::LParen)?;
                let event = self.ident("an event")?;
                self.expect(Tok::Comma)?;
                let state = self.ident("a state")?;
                self.expect(Tok::RParen)?;
                self.expect(Tok::Eq)?;
                Atom::Prob {
                    event,
                    state,
                    value: self.number()?,
                }
            }
            other => {
                self.pos -= 1;
                return self.err(format!("unknown literal kind `{other}`"));
            }
        };
        Ok(Literal::pos(atom))
    }

    fn literal_list(&mut self, stop: &Tok) -> Result<Vec<Literal>, DslError> {
        let mut out = Vec::new();
        if self.peek() == Some(stop) {
            return Ok(out);
        }
        out.push(self.literal()?);
        while self.eat(&Tok::Comma) {
            out.push(self.literal()?);
        }
        Ok(out)
    }

    fn rule(&mut self, strength: Strength) -> Result<Rule, DslError> {
        let name = self.ident("a rule name")?;
        self.expect(Tok::Colon)?;
        let arrow = match strength {
            Strength::Defeasible => Tok::Presumes,
            Strength::Strict => Tok::Implies,
        };
        let body = self.literal_list(&arrow)?;
        if !self.eat(&arrow) {
            return self.err(format!("expected {}, found {}", arrow.describe(), self.found()));
        }
        let head = self.literal()?;
        Ok(Rule::new(
            name.to_string(),
            body,
            head,
            strength,
            Origin::User(name.to_string()),
        ))
    }

    pub fn statement(&mut self) -> Result<Statement, DslError> {
        let (line, column) = self.here();
        let kw = self.ident("a statement keyword")?;
        let stmt = match &*kw {
            "prop" => Stmt::Prop(self.ident_list("a property")?),
            "act" => Stmt::Act(self.ident_list("an act")?),
            "state" => Stmt::State(self.ident_list("a state")?),
            "root" => {
                let act = self.ident("an act")?;
                self.expect(Tok::Eq)?;
                let state = self.ident("a state")?;
                Stmt::Root { act, state }
            }
            "holds" => {
                let state = self.ident("a state")?;
                self.expect(Tok::Colon)?;
                let mut props = vec![self.holds_item()?];
                while self.eat(&Tok::Comma) {
                    props.push(self.holds_item()?);
                }
                Stmt::Holds { state, props }
            }
            "contr" => {
                let formula = self.formula()?;
                self.expect(Tok::Eq)?;
                Stmt::Contr {
                    formula,
                    value: self.number()?,
                }
            }
            "assess" => {
                if !self.is_keyword("u") {
                    return self.err(format!("expected `u(`, found {}", self.found()));
                }
                self.pos += 1;
                self.expect(Tok::LParen)?;
                let state = self.ident("a state")?;
                self.expect(Tok::Bar)?;
                let basis: BTreeSet<Sym> = self.ident_list("a property")?.into_iter().collect();
                self.expect(Tok::RParen)?;
                self.expect(Tok::Eq)?;
                Stmt::Assess {
                    state,
                    basis,
                    value: self.number()?,
                }
            }
            "utility" => {
                let state = self.ident("a state")?;
                self.expect(Tok::Eq)?;
                Stmt::Utility {
                    state,
                    value: self.number()?,
                }
            }
            "chance" => {
                let state = self.ident("a state")?;
                self.expect(Tok::Colon)?;
                let event = self.ident("an event")?;
                self.expect(Tok::Eq)?;
                let k = self.number()?;
                self.expect(Tok::Question)?;
                let positive = self.ident("a state")?;
                self.expect(Tok::Colon)?;
                let negative = self.ident("a state")?;
                Stmt::Chance {
                    state,
                    event,
                    k,
                    positive,
                    negative,
                }
            }
            "evidence" => Stmt::Evidence(self.literal()?),
            "presume" => Stmt::Rule(self.rule(Strength::Defeasible)?),
            "strict" => Stmt::Rule(self.rule(Strength::Strict)?),
            other => {
                self.pos -= 1;
                return self.err(format!("unknown statement `{other}`"));
            }
        };
        self.expect(Tok::Dot)?;
        Ok(Statement { stmt, line, column })
    }

    fn holds_item(&mut self) -> Result<PropFormula, DslError> {
        let negated = self.eat(&Tok::Tilde);
        let p = self.ident("a property")?;
        let f = PropFormula::atom(&p);
        Ok(if negated { f.negate() } else { f })
    }

    pub fn statements(&mut self) -> Result<Vec<Statement>, DslError> {
        let mut out = Vec::new();
        while !self.at_end() {
            out.push(self.statement()?);
        }
        Ok(out)
    }

    pub fn finish(&self) -> Result<(), DslError> {
        if self.at_end() {
            Ok(())
        } else {
            self.err(format!("unexpected {} after the end", self.found()))
        }
    }
}
