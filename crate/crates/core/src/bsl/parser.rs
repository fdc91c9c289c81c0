use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::ast::*;
use super::expr::Cursor;
use super::lexer::{tokenize, Tok, Token};
use super::{BslError, Location};

/// Maximum number of leading colons on a property line.
const MAX_COLONS: u8 = 5;

pub fn parse_document(source: &str) -> Result<Document, BslError> {
    let tokens = tokenize(source)?;
    let mut parser = Parser {
        doc: Document::default(),
        path: Vec::new(),
    };
    let mut start = 0;
    for (idx, token) in tokens.iter().enumerate() {
        if token.tok == Tok::Newline {
            parser.statement(&tokens[start..idx], token.loc)?;
            start = idx + 1;
        }
    }
    Ok(parser.doc)
}

struct Parser {
    doc: Document,
    /// Index path from a model's property list down to the most recently
    /// declared property use.
    path: Vec<usize>,
}

fn found(tok: Option<&Token>) -> String {
    match tok.map(|t| &t.tok) {
        None | Some(Tok::Newline) => String::from("end of line"),
        Some(Tok::Ident(s)) => format!("`{s}`"),
        Some(Tok::Value(s)) => format!("`{s}`"),
        Some(Tok::Colon(n)) => format!("{n} colon(s)"),
        Some(other) => format!("{other:?}"),
    }
}

impl Parser {
    fn statement(&mut self, toks: &[Token], eol: Location) -> Result<(), BslError> {
        let Some(first) = toks.first() else {
            return Ok(());
        };
        match first.tok {
            Tok::Colon(n) => self.sub_statement(n, first.loc, &toks[1..], eol),
            _ => self.header(toks, eol),
        }
    }

    fn header(&mut self, toks: &[Token], eol: Location) -> Result<(), BslError> {
        let ident = |i: usize, expected: &[&str]| -> Result<String, BslError> {
            match toks.get(i).map(|t| &t.tok) {
                Some(Tok::Ident(s)) => Ok(s.clone()),
                _ => Err(BslError::parse(
                    toks.get(i).map(|t| t.loc).unwrap_or(eol),
                    expected,
                    found(toks.get(i)),
                )),
            }
        };
        let colon = |i: usize| -> Result<(), BslError> {
            match toks.get(i).map(|t| &t.tok) {
                Some(Tok::Colon(1)) => Ok(()),
                _ => Err(BslError::parse(
                    toks.get(i).map(|t| t.loc).unwrap_or(eol),
                    &["`:`"],
                    found(toks.get(i)),
                )),
            }
        };
        let head = ident(0, &["declaration keyword"])?;
        colon(1)?;
        let kind = ident(2, &["`Instance`", "`Individual`", "`Model`"])?;
        colon(3)?;
        let name = match toks.get(4).map(|t| &t.tok) {
            Some(Tok::Value(v)) => v.clone(),
            _ => {
                return Err(BslError::parse(
                    toks.get(4).map(|t| t.loc).unwrap_or(eol),
                    &["name"],
                    found(toks.get(4)),
                ))
            }
        };
        if let Some(extra) = toks.get(5) {
            return Err(BslError::parse(extra.loc, &["end of line"], found(Some(extra))));
        }
        self.path.clear();
        let decl = match (head.as_str(), kind.as_str()) {
            ("Concept", "Instance") => Declaration::Concept(ConceptDecl { name }),
            ("Concept", _) => {
                return Err(BslError::parse(toks[2].loc, &["`Instance`"], found(toks.get(2))))
            }
            ("Attribute" | "Relation", "Individual") => Declaration::Property(PropertyDecl {
                kind: PropertyKind::from_keyword(&head).expect("matched keyword"),
                name,
                data_type: None,
                range: None,
            }),
            (_, "Model") => Declaration::Model(ModelDecl {
                concept: head,
                name,
                properties: Vec::new(),
            }),
            (_, "Individual") => Declaration::Individual(IndividualDecl {
                concept: head,
                name,
                model: None,
                values: Vec::new(),
            }),
            _ => {
                return Err(BslError::parse(
                    toks[2].loc,
                    &["`Instance`", "`Individual`", "`Model`"],
                    found(toks.get(2)),
                ))
            }
        };
        self.doc.declarations.push(decl);
        Ok(())
    }

    fn sub_statement(
        &mut self,
        colons: u8,
        colon_loc: Location,
        toks: &[Token],
        eol: Location,
    ) -> Result<(), BslError> {
        let key = match toks.first().map(|t| &t.tok) {
            Some(Tok::Ident(k)) => k.clone(),
            _ => {
                return Err(BslError::parse(
                    toks.first().map(|t| t.loc).unwrap_or(eol),
                    &["keyword"],
                    found(toks.first()),
                ))
            }
        };
        match toks.get(1).map(|t| &t.tok) {
            Some(Tok::Colon(1)) => {}
            _ => {
                return Err(BslError::parse(
                    toks.get(1).map(|t| t.loc).unwrap_or(eol),
                    &["`:`"],
                    found(toks.get(1)),
                ))
            }
        }
        let key_loc = toks[0].loc;
        let payload = &toks[2..];
        let value_text = || -> Result<String, BslError> {
            match payload {
                [Token {
                    tok: Tok::Value(v), ..
                }] => Ok(v.clone()),
                [] => Err(BslError::parse(eol, &["value"], "end of line")),
                [_, extra, ..] => Err(BslError::parse(extra.loc, &["end of line"], found(Some(extra)))),
                [other] => Err(BslError::parse(other.loc, &["value"], found(Some(other)))),
            }
        };
        let Some(current) = self.doc.declarations.last_mut() else {
            return Err(BslError::parse(colon_loc, &["declaration"], "`:` line"));
        };
        match current {
            Declaration::Concept(_) => Err(BslError::parse(
                colon_loc,
                &["declaration"],
                "property line under a concept",
            )),
            Declaration::Property(decl) => {
                if colons != 1 {
                    return Err(BslError::parse(colon_loc, &["`:`"], format!("{colons} colons")));
                }
                match (decl.kind, key.as_str()) {
                    (PropertyKind::Attribute, "DataType") => {
                        let text = value_text()?;
                        if decl.data_type.is_some() {
                            return Err(BslError::parse(key_loc, &["end of declaration"], "second DataType"));
                        }
                        decl.data_type = Some(DataType::from_name(&text).ok_or_else(|| {
                            BslError::parse(
                                payload[0].loc,
                                &["`Numeric`", "`Boolean`", "`String`"],
                                format!("`{text}`"),
                            )
                        })?);
                        Ok(())
                    }
                    (PropertyKind::Relation, "Range") => {
                        let text = value_text()?;
                        if decl.range.is_some() {
                            return Err(BslError::parse(key_loc, &["end of declaration"], "second Range"));
                        }
                        decl.range = Some(text);
                        Ok(())
                    }
                    (PropertyKind::Attribute, _) => {
                        Err(BslError::parse(key_loc, &["`DataType`"], format!("`{key}`")))
                    }
                    (PropertyKind::Relation, _) => {
                        Err(BslError::parse(key_loc, &["`Range`"], format!("`{key}`")))
                    }
                }
            }
            Declaration::Individual(ind) => {
                if key == "SetModel" {
                    if colons != 1 {
                        return Err(BslError::parse(colon_loc, &["`:`"], format!("{colons} colons")));
                    }
                    let model = value_text()?;
                    if ind.model.is_some() {
                        return Err(BslError::parse(key_loc, &["value line"], "second SetModel"));
                    }
                    ind.model = Some(model);
                } else {
                    if colons > MAX_COLONS {
                        return Err(BslError::parse(colon_loc, &["at most 5 colons"], format!("{colons}")));
                    }
                    ind.values.push(ValueLine {
                        depth: colons,
                        property: key,
                        value: value_text()?,
                    });
                }
                Ok(())
            }
            Declaration::Model(model) => {
                if let Some(kind) = PropertyKind::from_keyword(&key) {
                    let name = value_text()?;
                    return attach_property_use(model, &mut self.path, colons, colon_loc, kind, name);
                }
                let restriction = restriction(&key, key_loc, payload, eol, value_text)?;
                let Some(owner) = property_at(&mut model.properties, &self.path) else {
                    return Err(BslError::parse(
                        key_loc,
                        &["`Attribute`", "`Relation`"],
                        format!("restriction `{key}` before any property"),
                    ));
                };
                owner.restrictions.push(restriction);
                Ok(())
            }
        }
    }
}

fn attach_property_use(
    model: &mut ModelDecl,
    path: &mut Vec<usize>,
    colons: u8,
    colon_loc: Location,
    kind: PropertyKind,
    name: String,
) -> Result<(), BslError> {
    if colons > MAX_COLONS {
        return Err(BslError::parse(colon_loc, &["at most 5 colons"], format!("{colons}")));
    }
    let depth = usize::from(colons) - 1;
    if depth > path.len() {
        return Err(BslError::parse(
            colon_loc,
            &[if path.is_empty() { "`:`" } else { "fewer colons" }],
            format!("{colons} colons with no parent property"),
        ));
    }
    path.truncate(depth);
    let siblings = match children_at(&mut model.properties, path) {
        Some(list) => list,
        None => return Err(BslError::parse(colon_loc, &["parent property"], "nothing")),
    };
    siblings.push(PropertyUse::new(kind, name));
    path.push(siblings.len() - 1);
    Ok(())
}

fn children_at<'a>(list: &'a mut Vec<PropertyUse>, path: &[usize]) -> Option<&'a mut Vec<PropertyUse>> {
    match path.split_first() {
        None => Some(list),
        Some((&i, rest)) => children_at(&mut list.get_mut(i)?.nested, rest),
    }
}

fn property_at<'a>(list: &'a mut [PropertyUse], path: &[usize]) -> Option<&'a mut PropertyUse> {
    let (&i, rest) = path.split_first()?;
    let node = list.get_mut(i)?;
    if rest.is_empty() {
        Some(node)
    } else {
        property_at(&mut node.nested, rest)
    }
}

const UNSUPPORTED_RESTRICTIONS: [&str; 4] = ["Immutable", "Unique", "SetRange", "Permission"];

fn is_unsupported_restriction(key: &str) -> bool {
    UNSUPPORTED_RESTRICTIONS.contains(&key) || key.starts_with("UniqueId") || key.starts_with("ValueCon")
}

fn flag(text: &str, loc: Location) -> Result<bool, BslError> {
    match text.trim() {
        "1" => Ok(true),
        "0" => Ok(false),
        other => Err(BslError::parse(loc, &["`1`", "`0`"], format!("`{other}`"))),
    }
}

fn restriction(
    key: &str,
    key_loc: Location,
    payload: &[Token],
    eol: Location,
    value_text: impl Fn() -> Result<String, BslError>,
) -> Result<Restriction, BslError> {
    let expression = || {
        let mut cursor = Cursor::new(payload, eol);
        let expr = cursor.expression()?;
        cursor.expect_end()?;
        Ok::<_, BslError>(expr)
    };
    Ok(match key {
        "Condition" => Restriction::Condition(expression()?),
        "SetValue" => Restriction::SetValue(expression()?),
        "SetDo" => {
            let mut cursor = Cursor::new(payload, eol);
            let actions = cursor.setdo()?;
            cursor.expect_end()?;
            Restriction::SetDo(actions)
        }
        "Default" => Restriction::Default(Literal::from_text(&value_text()?)),
        "Multiple" => Restriction::Multiple(flag(&value_text()?, key_loc)?),
        "Required" => Restriction::Required(flag(&value_text()?, key_loc)?),
        other if is_unsupported_restriction(other) => Restriction::Unsupported {
            kind: String::from(other),
            raw: match payload {
                [] => String::new(),
                _ => value_text()?,
            },
        },
        other => {
            return Err(BslError::parse(
                key_loc,
                &["`Attribute`", "`Relation`", "restriction keyword"],
                format!("`{other}`"),
            ))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_concept() {
        let doc = parse_document("Concept: Instance: Survivor").unwrap();
        assert_eq!(
            doc.declarations,
            alloc::vec![Declaration::Concept(ConceptDecl {
                name: "Survivor".into()
            })]
        );
    }

    #[test]
    fn missing_model_name() {
        let err = parse_document("Survivor: Model:").unwrap_err();
        assert!(matches!(err, BslError::Parse { .. }), "{err:?}");
    }

    #[test]
    fn property_declarations() {
        let doc = parse_document(
            "Attribute: Individual: energy\n: DataType: Numeric\nRelation: Individual: location\n: Range: Location\n",
        )
        .unwrap();
        let props: Vec<_> = doc.properties().collect();
        assert_eq!(props[0].data_type, Some(DataType::Numeric));
        assert_eq!(props[0].range, None);
        assert_eq!(props[1].range.as_deref(), Some("Location"));
        assert_eq!(props[1].data_type, None);
        assert!(parse_document("Attribute: Individual: x\n: Range: Location").is_err());
        assert!(parse_document("Relation: Individual: x\n: DataType: Numeric").is_err());
        assert!(parse_document("Attribute: Individual: x\n: DataType: Float").is_err());
    }

    #[test]
    fn restrictions_attach_to_latest_property() {
        let doc = parse_document(
            "Survivor: Model: Model Survivor\n: Attribute: energyMin\n:: Default: 30\n: Attribute: energyLow\n:: SetValue: +$.energy < +$.energyMin\n",
        )
        .unwrap();
        let model = doc.models().next().unwrap();
        assert_eq!(model.name, "Model Survivor");
        assert_eq!(
            model.properties[0].restrictions,
            alloc::vec![Restriction::Default(Literal::Number(30.0))]
        );
        assert!(matches!(model.properties[1].restrictions[0], Restriction::SetValue(_)));
    }

    #[test]
    fn nested_property_uses() {
        let doc = parse_document(
            "View: Model: V\n: Attribute: ViewConcept\n:: Relation: Individuallist\n::: SetValue: $.IndividualID\n::: Attribute: Include\n::: Multiple: 1\n: Attribute: Other\n",
        )
        .unwrap();
        let model = doc.models().next().unwrap();
        let concept = &model.properties[0];
        assert_eq!(concept.nested.len(), 1);
        let list = &concept.nested[0];
        assert!(matches!(list.restrictions[0], Restriction::SetValue(_)));
        assert_eq!(list.nested[0].property, "Include");
        assert_eq!(list.nested[0].restrictions, alloc::vec![Restriction::Multiple(true)]);
        assert_eq!(model.properties[1].property, "Other");
        assert!(parse_document("View: Model: V\n:: Attribute: orphan").is_err());
    }

    #[test]
    fn individuals_keep_value_lines() {
        let doc = parse_document(
            "Survivor: Individual: John Doe\n: SetModel: Model Survivor\n: location: Forest Clearing\n:: nested: x y\n",
        )
        .unwrap();
        let ind = doc.individuals().next().unwrap();
        assert_eq!(ind.name, "John Doe");
        assert_eq!(ind.model.as_deref(), Some("Model Survivor"));
        assert_eq!(ind.values[0].value, "Forest Clearing");
        assert_eq!(ind.values[1].depth, 2);
        assert!(parse_document("Survivor: Individual: x\n: hasWood:").is_err());
        assert!(parse_document("Survivor: Individual: x\n: SetModel: a\n: SetModel: b").is_err());
    }

    #[test]
    fn unsupported_restrictions_are_kept() {
        let doc = parse_document("S: Model: M\n: Attribute: a\n:: Immutable: 1\n:: UniqueIdentifier: 1\n").unwrap();
        let restrictions = &doc.models().next().unwrap().properties[0].restrictions;
        assert_eq!(restrictions.len(), 2);
        assert!(matches!(&restrictions[0], Restriction::Unsupported { kind, .. } if kind == "Immutable"));
        assert!(parse_document("S: Model: M\n: Attribute: a\n:: Frobnicate: 1\n").is_err());
    }

    #[test]
    fn orphan_lines_are_errors() {
        assert!(parse_document(": Attribute: x").is_err());
        assert!(parse_document("Concept: Instance: A\n: Attribute: x").is_err());
        assert!(parse_document("S: Model: M\n:: Default: 1").is_err());
    }
}
