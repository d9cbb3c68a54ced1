use thiserror::Error;

use super::Formula;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("parse error at byte {position}: expected {expected}")]
pub struct ParseError {
    pub position: usize,
    pub expected: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    LParen,
    RParen,
    Not,
    And,
    Or,
    Next,
    Eventually,
    Always,
    Until,
    Release,
    True,
    False,
    Atom(String),
}

fn is_atom_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '-'
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(pos, c)) = chars.peek() {
        let single = match c {
            c if c.is_whitespace() => {
                chars.next();
                continue;
            }
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '!' => Some(Tok::Not),
            '&' => Some(Tok::And),
            '|' => Some(Tok::Or),
            _ => None,
        };
        if let Some(tok) = single {
            chars.next();
            out.push((pos, tok));
            continue;
        }
        if !is_atom_char(c) {
            return Err(ParseError {
                position: pos,
                expected: "operator, parenthesis or atom".into(),
            });
        }
        let mut word = String::new();
        while let Some(&(_, c)) = chars.peek() {
            if !is_atom_char(c) {
                break;
            }
            word.push(c);
            chars.next();
        }
        let tok = match word.as_str() {
            "X" => Tok::Next,
            "F" => Tok::Eventually,
            "G" => Tok::Always,
            "U" => Tok::Until,
            "R" => Tok::Release,
            "true" => Tok::True,
            "false" => Tok::False,
            _ => Tok::Atom(word),
        };
        out.push((pos, tok));
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn position(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |(p, _)| *p)
    }

    fn error(&self, expected: &str) -> ParseError {
        ParseError {
            position: self.position(),
            expected: expected.to_string(),
        }
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn temporal(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if self.eat(&Tok::Until) {
            let rhs = self.temporal()?;
            Ok(Formula::until(lhs, rhs))
        } else if self.eat(&Tok::Release) {
            let rhs = self.temporal()?;
            Ok(Formula::release(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut parts = vec![self.conjunction()?];
        while self.eat(&Tok::Or) {
            parts.push(self.conjunction()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().expect("one part")
        } else {
            Formula::Or(parts)
        })
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut parts = vec![self.unary()?];
        while self.eat(&Tok::And) {
            parts.push(self.unary()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().expect("one part")
        } else {
            Formula::And(parts)
        })
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        let wrap: fn(Formula) -> Formula = match self.peek() {
            Some(Tok::Not) => Formula::not,
            Some(Tok::Next) => Formula::next,
            Some(Tok::Eventually) => Formula::eventually,
            Some(Tok::Always) => Formula::always,
            _ => return self.primary(),
        };
        self.at += 1;
        Ok(wrap(self.unary()?))
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        let f = match self.peek().cloned() {
            Some(Tok::True) => Formula::True,
            Some(Tok::False) => Formula::False,
            Some(Tok::Atom(a)) => Formula::Atom(a),
            Some(Tok::LParen) => {
                self.at += 1;
                let inner = self.temporal()?;
                if !self.eat(&Tok::RParen) {
                    return Err(self.error("`)`"));
                }
                return Ok(inner);
            }
            _ => return Err(self.error("operand")),
        };
        self.at += 1;
        Ok(f)
    }
}

/// Parses formula text. Chains of `&` or `|` become a single n-ary node.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        at: 0,
        end: text.len(),
    };
    let f = p.temporal()?;
    if p.at != p.toks.len() {
        return Err(p.error("end of input"));
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(n: &str) -> Formula {
        Formula::atom(n)
    }

    #[test]
    fn cost_bound_shape() {
        let f = parse_formula("F G (cost-5 & goal-state)").unwrap();
        assert_eq!(
            f,
            Formula::eventually(Formula::always(Formula::and(a("cost-5"), a("goal-state"))))
        );
    }

    #[test]
    fn goal_order_shape() {
        let f = parse_formula("(!g2 U g1)").unwrap();
        assert_eq!(f, Formula::until(Formula::not(a("g2")), a("g1")));
    }

    #[test]
    fn lone_next_is_an_error() {
        let err = parse_formula("X").unwrap_err();
        assert_eq!(err.position, 1);
        assert_eq!(err.expected, "operand");
    }

    #[test]
    fn precedence_and_associativity() {
        let f = parse_formula("a & b | c U d U e").unwrap();
        let expected = Formula::until(
            Formula::Or(vec![Formula::and(a("a"), a("b")), a("c")]),
            Formula::until(a("d"), a("e")),
        );
        assert_eq!(f, expected);
        assert_eq!(parse_formula("!F a").unwrap(), Formula::not(Formula::eventually(a("a"))));
    }

    #[test]
    fn literals_and_errors() {
        assert_eq!(parse_formula("true R false").unwrap(), Formula::release(Formula::True, Formula::False));
        assert!(parse_formula("(a & b").is_err());
        assert!(parse_formula("a b").is_err());
        assert!(parse_formula("a $ b").is_err());
        assert!(parse_formula("").is_err());
    }

    #[test]
    fn behaviour_formula_text_parses() {
        let f = parse_formula("F G (cost-5 & goal-state) & (!first-g2 U first-g1)").unwrap();
        assert!(matches!(f, Formula::And(ref ps) if ps.len() == 2));
    }
}
