//! Canonical BSL text. `parse_document(pretty_print(d)) == d` for any
//! document produced by the parser.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use super::ast::*;
use crate::event::format_number;

pub fn pretty_print(doc: &Document) -> String {
    let mut out = String::new();
    let mut previous: Option<&Declaration> = None;
    for decl in &doc.declarations {
        let blank = !matches!(
            (previous, decl),
            (None, _)
                | (Some(Declaration::Concept(_)), Declaration::Concept(_))
                | (Some(Declaration::Property(_)), Declaration::Property(_))
        );
        if blank {
            out.push('\n');
        }
        print_declaration(&mut out, decl);
        previous = Some(decl);
    }
    out
}

fn colons(n: usize) -> String {
    ":".repeat(n)
}

fn print_declaration(out: &mut String, decl: &Declaration) {
    match decl {
        Declaration::Concept(c) => {
            let _ = writeln!(out, "Concept: Instance: {}", c.name);
        }
        Declaration::Property(p) => {
            let _ = writeln!(out, "{}: Individual: {}", p.kind.keyword(), p.name);
            if let Some(dt) = p.data_type {
                let _ = writeln!(out, ": DataType: {}", dt.name());
            }
            if let Some(range) = &p.range {
                let _ = writeln!(out, ": Range: {range}");
            }
        }
        Declaration::Model(m) => {
            let _ = writeln!(out, "{}: Model: {}", m.concept, m.name);
            for use_ in &m.properties {
                print_property_use(out, use_, 1);
            }
        }
        Declaration::Individual(ind) => {
            let _ = writeln!(out, "{}: Individual: {}", ind.concept, ind.name);
            if let Some(model) = &ind.model {
                let _ = writeln!(out, ": SetModel: {model}");
            }
            for line in &ind.values {
                let _ = writeln!(
                    out,
                    "{} {}: {}",
                    colons(usize::from(line.depth)),
                    line.property,
                    line.value
                );
            }
        }
    }
}

fn print_property_use(out: &mut String, use_: &PropertyUse, depth: usize) {
    let _ = writeln!(out, "{} {}: {}", colons(depth), use_.kind.keyword(), use_.property);
    for r in &use_.restrictions {
        let _ = write!(out, "{} {}:", colons(depth + 1), r.keyword());
        let payload = match r {
            Restriction::Condition(e) | Restriction::SetValue(e) => print_expression(e),
            Restriction::SetDo(actions) => print_setdo(actions),
            Restriction::Default(lit) => match lit {
                Literal::Number(n) => format_number(*n),
                Literal::Text(s) => s.clone(),
            },
            Restriction::Multiple(b) | Restriction::Required(b) => String::from(if *b { "1" } else { "0" }),
            Restriction::Unsupported { raw, .. } => raw.clone(),
        };
        if !payload.is_empty() {
            out.push(' ');
            out.push_str(&payload);
        }
        out.push('\n');
    }
    for child in &use_.nested {
        print_property_use(out, child, depth + 1);
    }
}

fn quote(out: &mut String, s: &str, q: char) {
    out.push(q);
    for c in s.chars() {
        if c == q || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push(q);
}

/// A literal as it appears inside an expression.
pub fn print_literal(lit: &Literal) -> String {
    match lit {
        Literal::Number(n) => format_number(*n),
        Literal::Text(s) => {
            let mut out = String::new();
            quote(&mut out, s, '"');
            out
        }
    }
}

/// Prints with the fewest parentheses that preserve the tree.
pub fn print_expression(expr: &Expr) -> String {
    let mut out = String::new();
    write_expr(&mut out, expr);
    out
}

fn precedence(expr: &Expr) -> u8 {
    match expr {
        Expr::Binary { op, .. } => op.precedence(),
        _ => u8::MAX,
    }
}

fn write_operand(out: &mut String, expr: &Expr, parens: bool) {
    if parens {
        out.push('(');
        write_expr(out, expr);
        out.push(')');
    } else {
        write_expr(out, expr);
    }
}

fn write_expr(out: &mut String, expr: &Expr) {
    match expr {
        Expr::Literal(lit) => out.push_str(&print_literal(lit)),
        Expr::Prop(p) => {
            let _ = write!(out, "$.{p}");
        }
        Expr::Var(v) => {
            let _ = write!(out, "${}", v.name());
        }
        Expr::Deref { relation, property } => {
            let _ = write!(out, "$($.{relation}).{property}");
        }
        Expr::NumCoerce(inner) => {
            out.push('+');
            write_operand(out, inner, matches!(**inner, Expr::Binary { .. }));
        }
        Expr::Binary { op, lhs, rhs } => {
            let p = op.precedence();
            write_operand(out, lhs, precedence(lhs) < p);
            let _ = write!(out, " {} ", op.symbol());
            write_operand(out, rhs, precedence(rhs) <= p);
        }
    }
}

pub fn print_setdo(actions: &[SetDoAction]) -> String {
    let objects: Vec<String> = actions
        .iter()
        .map(|a| {
            let mut out = String::from("{'$do': ");
            quote(&mut out, a.act.name(), '\'');
            out.push_str(", '$IndividualID': ");
            write_expr(&mut out, &a.target);
            out.push_str(", '$Condition': ");
            write_expr(&mut out, &a.guard);
            for (key, value) in &a.assignments {
                out.push_str(", ");
                quote(&mut out, key, '\'');
                out.push_str(": ");
                out.push_str(&print_literal(value));
            }
            out.push('}');
            out
        })
        .collect();
    let mut out = String::from("(");
    out.push_str(&objects.join(", "));
    out.push(')');
    out
}

#[cfg(test)]
mod tests {
    use super::super::{parse_document, parse_expression, parse_setdo};
    use super::*;

    #[test]
    fn minimal_parentheses() {
        for text in [
            "$.a == 1 && $.b == 0",
            "($.a == 1 || $.b == 1) && $.c == 1",
            "+$.warmth < +$.warmthMin",
            "$($.location).hasFire == 1 && $.hasWood == 1 && $.warmthLow == 1",
            "$.a == ($.b == 1)",
            "+($.a == 1) === \"1\"",
            "$Value === \"say \\\"hi\\\"\"",
        ] {
            let e = parse_expression(text).unwrap();
            assert_eq!(print_expression(&e), text);
        }
        let nav = parse_expression("($$.location).hasDeer == 1").unwrap();
        assert_eq!(print_expression(&nav), "$($.location).hasDeer == 1");
    }

    #[test]
    fn setdo_canonical_form() {
        let actions =
            parse_setdo("({'do': 'EditIndividual', '$IndividualID': $CurrentIndividual, '$Condition': $Value == \"1\", 'hasWood': 1})")
                .unwrap();
        assert_eq!(
            print_setdo(&actions),
            "({'$do': 'EditIndividual', '$IndividualID': $CurrentIndividual, '$Condition': $Value == \"1\", 'hasWood': 1})"
        );
    }

    #[test]
    fn document_round_trip() {
        let src = "Concept: Instance: A\nConcept: Instance: B\n\nAttribute: Individual: x\n: DataType: Numeric\n\nA: Model: M\n: Attribute: x\n:: Default: 3\n:: Immutable:\n: Relation: r\n:: Attribute: y\n::: Multiple: 1\n\nA: Individual: a one\n: SetModel: M\n: x: 4\n:: y: deep\n";
        let doc = parse_document(src).unwrap();
        let printed = pretty_print(&doc);
        assert_eq!(printed, src);
        assert_eq!(parse_document(&printed).unwrap(), doc);
    }
}
