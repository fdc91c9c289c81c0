use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Document {
    pub declarations: Vec<Declaration>,
}

impl Document {
    pub fn concepts(&self) -> impl Iterator<Item = &ConceptDecl> {
        self.declarations.iter().filter_map(|d| match d {
            Declaration::Concept(c) => Some(c),
            _ => None,
        })
    }

    pub fn properties(&self) -> impl Iterator<Item = &PropertyDecl> {
        self.declarations.iter().filter_map(|d| match d {
            Declaration::Property(p) => Some(p),
            _ => None,
        })
    }

    pub fn models(&self) -> impl Iterator<Item = &ModelDecl> {
        self.declarations.iter().filter_map(|d| match d {
            Declaration::Model(m) => Some(m),
            _ => None,
        })
    }

    pub fn individuals(&self) -> impl Iterator<Item = &IndividualDecl> {
        self.declarations.iter().filter_map(|d| match d {
            Declaration::Individual(i) => Some(i),
            _ => None,
        })
    }
}

/// The concept under which user-interface pages are declared.
pub const VIEW_CONCEPT: &str = "View";

#[derive(Debug, Clone, PartialEq)]
pub enum Declaration {
    Concept(ConceptDecl),
    Property(PropertyDecl),
    Model(ModelDecl),
    Individual(IndividualDecl),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConceptDecl {
    pub name: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PropertyKind {
    Attribute,
    Relation,
}

impl PropertyKind {
    pub fn keyword(self) -> &'static str {
        match self {
            PropertyKind::Attribute => "Attribute",
            PropertyKind::Relation => "Relation",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Self> {
        match s {
            "Attribute" => Some(PropertyKind::Attribute),
            "Relation" => Some(PropertyKind::Relation),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DataType {
    Numeric,
    Boolean,
    String,
}

impl DataType {
    pub fn name(self) -> &'static str {
        match self {
            DataType::Numeric => "Numeric",
            DataType::Boolean => "Boolean",
            DataType::String => "String",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "Numeric" => Some(DataType::Numeric),
            "Boolean" => Some(DataType::Boolean),
            "String" => Some(DataType::String),
            _ => None,
        }
    }
}

/// `Attribute: Individual: <name>` with `: DataType:`, or
/// `Relation: Individual: <name>` with `: Range:`.
#[derive(Debug, Clone, PartialEq)]
pub struct PropertyDecl {
    pub kind: PropertyKind,
    pub name: String,
    pub data_type: Option<DataType>,
    pub range: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelDecl {
    pub concept: String,
    pub name: String,
    pub properties: Vec<PropertyUse>,
}

impl ModelDecl {
    pub fn is_view(&self) -> bool {
        self.concept == VIEW_CONCEPT
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyUse {
    pub kind: PropertyKind,
    pub property: String,
    pub restrictions: Vec<Restriction>,
    pub nested: Vec<PropertyUse>,
}

impl PropertyUse {
    pub fn new(kind: PropertyKind, property: impl Into<String>) -> Self {
        PropertyUse {
            kind,
            property: property.into(),
            restrictions: Vec::new(),
            nested: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Restriction {
    Condition(Expr),
    SetValue(Expr),
    SetDo(Vec<SetDoAction>),
    Default(Literal),
    Multiple(bool),
    Required(bool),
    /// A restriction keyword this runtime recognizes but does not interpret.
    Unsupported { kind: String, raw: String },
}

impl Restriction {
    pub fn keyword(&self) -> &str {
        match self {
            Restriction::Condition(_) => "Condition",
            Restriction::SetValue(_) => "SetValue",
            Restriction::SetDo(_) => "SetDo",
            Restriction::Default(_) => "Default",
            Restriction::Multiple(_) => "Multiple",
            Restriction::Required(_) => "Required",
            Restriction::Unsupported { kind, .. } => kind,
        }
    }
}

/// `<Concept>: Individual: <name>` and its value lines.
#[derive(Debug, Clone, PartialEq)]
pub struct IndividualDecl {
    pub concept: String,
    pub name: String,
    pub model: Option<String>,
    /// Value lines in source order; nesting is resolved at registration.
    pub values: Vec<ValueLine>,
}

impl IndividualDecl {
    pub fn is_view(&self) -> bool {
        self.concept == VIEW_CONCEPT
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValueLine {
    /// Number of leading colons.
    pub depth: u8,
    pub property: String,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Literal {
    Number(f64),
    Text(String),
}

impl Literal {
    /// Literal from value-position text: numeric when it parses as a number.
    pub fn from_text(text: &str) -> Literal {
        match text.trim().parse::<f64>() {
            Ok(n) if n.is_finite() => Literal::Number(n),
            _ => Literal::Text(String::from(text.trim())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContextVar {
    /// `$Value`: the value that triggered a `SetDo`.
    Value,
    /// `$CurrentIndividual`
    CurrentIndividual,
}

impl ContextVar {
    pub fn name(self) -> &'static str {
        match self {
            ContextVar::Value => "Value",
            ContextVar::CurrentIndividual => "CurrentIndividual",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    /// `==`, compares numerically when both sides are numbers.
    Eq,
    /// `===`, compares canonical text.
    StrictEq,
    Lt,
    Gt,
    Ge,
    And,
    Or,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Eq => "==",
            BinOp::StrictEq => "===",
            BinOp::Lt => "<",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::And => "&&",
            BinOp::Or => "||",
        }
    }

    pub(crate) fn precedence(self) -> u8 {
        match self {
            BinOp::Or => 1,
            BinOp::And => 2,
            _ => 3,
        }
    }

    pub fn is_comparison(self) -> bool {
        self.precedence() == 3
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Literal(Literal),
    /// `$.property` on the current individual.
    Prop(String),
    Var(ContextVar),
    /// Unary `+`.
    NumCoerce(Box<Expr>),
    /// `$($.relation).property`, one navigation hop.
    Deref { relation: String, property: String },
    Binary {
        op: BinOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
}

impl Expr {
    pub fn binary(op: BinOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::Binary {
            op,
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
        }
    }

    /// Visits every node, parents before children, left to right.
    pub fn walk<'a>(&'a self, f: &mut dyn FnMut(&'a Expr)) {
        f(self);
        match self {
            Expr::NumCoerce(inner) => inner.walk(f),
            Expr::Binary { lhs, rhs, .. } => {
                lhs.walk(f);
                rhs.walk(f);
            }
            _ => {}
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Act {
    EditIndividual,
}

impl Act {
    pub fn name(self) -> &'static str {
        match self {
            Act::EditIndividual => "EditIndividual",
        }
    }
}

/// One guarded system act from a `SetDo` payload.
#[derive(Debug, Clone, PartialEq)]
pub struct SetDoAction {
    pub act: Act,
    pub target: Expr,
    pub guard: Expr,
    /// Property assignments in source order.
    pub assignments: Vec<(String, Literal)>,
}
