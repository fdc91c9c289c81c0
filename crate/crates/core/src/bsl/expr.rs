//! Recursive-descent parsing of condition expressions and `SetDo` payloads.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::ast::{Act, BinOp, ContextVar, Expr, Literal, SetDoAction};
use super::lexer::{tokenize_expression, Tok, Token};
use super::{BslError, Location};

pub fn parse_expression(text: &str) -> Result<Expr, BslError> {
    let tokens = tokenize_expression(text)?;
    let mut cursor = Cursor::new(&tokens, Location::new(1, 1));
    let expr = cursor.expression()?;
    cursor.expect_end()?;
    Ok(expr)
}

pub fn parse_setdo(text: &str) -> Result<Vec<SetDoAction>, BslError> {
    let tokens = tokenize_expression(text)?;
    let mut cursor = Cursor::new(&tokens, Location::new(1, 1));
    let actions = cursor.setdo()?;
    cursor.expect_end()?;
    Ok(actions)
}

pub(crate) struct Cursor<'t> {
    tokens: &'t [Token],
    pos: usize,
    end_loc: Location,
}

fn describe(tok: Option<&Tok>) -> String {
    match tok {
        None | Some(Tok::Newline) => String::from("end of statement"),
        Some(Tok::Ident(s)) => format!("identifier `{s}`"),
        Some(Tok::Value(s)) => format!("`{s}`"),
        Some(Tok::Var(s)) => format!("`${s}`"),
        Some(Tok::Number(n)) => format!("number {n}"),
        Some(Tok::Str(s)) => format!("string {s:?}"),
        Some(other) => format!("{other:?}"),
    }
}

impl<'t> Cursor<'t> {
    pub(crate) fn new(tokens: &'t [Token], end_loc: Location) -> Self {
        Cursor {
            tokens,
            pos: 0,
            end_loc,
        }
    }

    fn peek(&self) -> Option<&'t Tok> {
        self.tokens.get(self.pos).map(|t| &t.tok)
    }

    fn loc(&self) -> Location {
        self.tokens
            .get(self.pos)
            .map(|t| t.loc)
            .unwrap_or(self.end_loc)
    }

    fn bump(&mut self) -> Option<&'t Tok> {
        let tok = self.tokens.get(self.pos).map(|t| &t.tok);
        if tok.is_some() {
            self.pos += 1;
        }
        tok
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr_error(&self, message: impl Into<String>) -> BslError {
        BslError::Expr {
            loc: self.loc(),
            message: message.into(),
        }
    }

    fn setdo_error(&self, message: impl Into<String>) -> BslError {
        BslError::SetDo {
            loc: self.loc(),
            message: message.into(),
        }
    }

    pub(crate) fn expect_end(&self) -> Result<(), BslError> {
        match self.peek() {
            None => Ok(()),
            found => Err(self.expr_error(format!("unexpected {}", describe(found)))),
        }
    }

    pub(crate) fn expression(&mut self) -> Result<Expr, BslError> {
        self.binary(1)
    }

    fn binary_op(&self) -> Option<BinOp> {
        match self.peek()? {
            Tok::OrOr => Some(BinOp::Or),
            Tok::AndAnd => Some(BinOp::And),
            Tok::EqEq => Some(BinOp::Eq),
            Tok::EqEqEq => Some(BinOp::StrictEq),
            Tok::Lt => Some(BinOp::Lt),
            Tok::Gt => Some(BinOp::Gt),
            Tok::Ge => Some(BinOp::Ge),
            _ => None,
        }
    }

    fn binary(&mut self, min_prec: u8) -> Result<Expr, BslError> {
        let mut lhs = if min_prec >= 4 {
            return self.unary();
        } else {
            self.binary(min_prec + 1)?
        };
        while let Some(op) = self.binary_op() {
            if op.precedence() != min_prec {
                break;
            }
            self.pos += 1;
            if matches!(self.peek(), None | Some(Tok::Comma) | Some(Tok::RBrace)) {
                return Err(self.expr_error(format!("dangling operator `{}`", op.symbol())));
            }
            let rhs = self.binary(min_prec + 1)?;
            lhs = Expr::binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, BslError> {
        if self.eat(&Tok::Plus) {
            let inner = self.unary()?;
            return Ok(Expr::NumCoerce(Box::new(inner)));
        }
        self.primary()
    }

    fn property_name(&mut self) -> Result<String, BslError> {
        match self.bump() {
            Some(Tok::Ident(name)) => Ok(name.clone()),
            other => {
                self.pos = self.pos.saturating_sub(usize::from(other.is_some()));
                Err(self.expr_error(format!("expected property name, found {}", describe(other))))
            }
        }
    }

    /// `$.name` / `$$.name` after the sigil has been consumed.
    fn property_path(&mut self) -> Result<Expr, BslError> {
        if !self.eat(&Tok::Dot) {
            return Err(self.expr_error("expected `.` after `$`"));
        }
        Ok(Expr::Prop(self.property_name()?))
    }

    /// A parenthesized relation reference followed by `.property`.
    fn navigation(&mut self, inner: Expr) -> Result<Expr, BslError> {
        let relation = match inner {
            Expr::Prop(relation) => relation,
            Expr::Deref { .. } => {
                return Err(self.expr_error("multi-hop relation navigation is not supported"))
            }
            _ => return Err(self.expr_error("relation navigation expects `$.relation`")),
        };
        let property = self.property_name()?;
        if self.peek() == Some(&Tok::Dot) {
            return Err(self.expr_error("multi-hop relation navigation is not supported"));
        }
        Ok(Expr::Deref { relation, property })
    }

    fn primary(&mut self) -> Result<Expr, BslError> {
        let loc = self.loc();
        match self.bump() {
            Some(Tok::Number(n)) => Ok(Expr::Literal(Literal::Number(*n))),
            Some(Tok::Str(s)) => Ok(Expr::Literal(Literal::Text(s.clone()))),
            Some(Tok::Var(name)) => match name.as_str() {
                "Value" => Ok(Expr::Var(ContextVar::Value)),
                "CurrentIndividual" => Ok(Expr::Var(ContextVar::CurrentIndividual)),
                other => Err(BslError::Expr {
                    loc,
                    message: format!("unknown sigil `${other}`"),
                }),
            },
            Some(Tok::DoubleDollar) => self.property_path(),
            Some(Tok::Dollar) => {
                if self.eat(&Tok::LParen) {
                    let inner = self.expression()?;
                    if !self.eat(&Tok::RParen) {
                        return Err(self.expr_error("expected `)`"));
                    }
                    if !self.eat(&Tok::Dot) {
                        return Err(self.expr_error("expected `.property` after `$(...)`"));
                    }
                    self.navigation(inner)
                } else {
                    self.property_path()
                }
            }
            Some(Tok::LParen) => {
                let inner = self.expression()?;
                if !self.eat(&Tok::RParen) {
                    return Err(self.expr_error("expected `)`"));
                }
                if self.eat(&Tok::Dot) {
                    self.navigation(inner)
                } else {
                    Ok(inner)
                }
            }
            other => {
                let found = describe(other);
                Err(BslError::Expr {
                    loc,
                    message: format!("expected operand, found {found}"),
                })
            }
        }
    }

    fn literal(&mut self) -> Result<Literal, BslError> {
        match self.bump() {
            Some(Tok::Number(n)) => Ok(Literal::Number(*n)),
            Some(Tok::Str(s)) => Ok(Literal::Text(s.clone())),
            other => {
                let found = describe(other);
                self.pos -= usize::from(other.is_some());
                Err(self.setdo_error(format!("expected literal value, found {found}")))
            }
        }
    }

    /// One or more `{...}` objects, optionally wrapped in parentheses.
    pub(crate) fn setdo(&mut self) -> Result<Vec<SetDoAction>, BslError> {
        let wrapped = self.eat(&Tok::LParen);
        let mut actions = Vec::new();
        loop {
            actions.push(self.setdo_object()?);
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        if wrapped && !self.eat(&Tok::RParen) {
            return Err(self.setdo_error("expected `)`"));
        }
        Ok(actions)
    }

    fn setdo_object(&mut self) -> Result<SetDoAction, BslError> {
        let open = self.loc();
        if !self.eat(&Tok::LBrace) {
            return Err(self.setdo_error(format!("expected `{{`, found {}", describe(self.peek()))));
        }
        let mut act = None;
        let mut target = None;
        let mut guard = None;
        let mut assignments: Vec<(String, Literal)> = Vec::new();
        loop {
            if self.eat(&Tok::RBrace) {
                break;
            }
            let key_loc = self.loc();
            let key = match self.bump() {
                Some(Tok::Str(k)) | Some(Tok::Ident(k)) => k.clone(),
                other => {
                    return Err(BslError::SetDo {
                        loc: key_loc,
                        message: format!("expected quoted key, found {}", describe(other)),
                    })
                }
            };
            if !self.eat(&Tok::Colon(1)) {
                return Err(self.setdo_error(format!("expected `:` after key '{key}'")));
            }
            let duplicate = |what: &str| BslError::SetDo {
                loc: key_loc,
                message: format!("duplicate key '{what}'"),
            };
            match key.as_str() {
                // The short spelling `do` appears in published listings.
                "$do" | "do" => {
                    let name = match self.bump() {
                        Some(Tok::Str(s)) | Some(Tok::Ident(s)) => s.clone(),
                        other => {
                            return Err(self.setdo_error(format!(
                                "expected act name, found {}",
                                describe(other)
                            )))
                        }
                    };
                    if act.is_some() {
                        return Err(duplicate("$do"));
                    }
                    act = match name.as_str() {
                        "EditIndividual" => Some(Act::EditIndividual),
                        other => {
                            return Err(BslError::SetDo {
                                loc: key_loc,
                                message: format!("unknown act '{other}'"),
                            })
                        }
                    };
                }
                "$IndividualID" => {
                    if target.is_some() {
                        return Err(duplicate("$IndividualID"));
                    }
                    target = Some(self.expression()?);
                }
                "$Condition" => {
                    if guard.is_some() {
                        return Err(duplicate("$Condition"));
                    }
                    guard = Some(self.expression()?);
                }
                property => {
                    if property.starts_with('$') {
                        return Err(BslError::SetDo {
                            loc: key_loc,
                            message: format!("unknown system key '{property}'"),
                        });
                    }
                    if assignments.iter().any(|(p, _)| p == property) {
                        return Err(duplicate(property));
                    }
                    let value = self.literal()?;
                    assignments.push((String::from(property), value));
                }
            }
            if self.eat(&Tok::Comma) {
                continue;
            }
            if self.eat(&Tok::RBrace) {
                break;
            }
            return Err(self.setdo_error(format!(
                "expected `,` or `}}`, found {}",
                describe(self.peek())
            )));
        }
        let missing = |key: &str| BslError::SetDo {
            loc: open,
            message: format!("missing '{key}'"),
        };
        Ok(SetDoAction {
            act: act.ok_or_else(|| missing("$do"))?,
            target: target.ok_or_else(|| missing("$IndividualID"))?,
            guard: guard.ok_or_else(|| missing("$Condition"))?,
            assignments,
        })
    }
}
