//! Bundled BSL sources.

/// Schema of the `View` concept every engine starts with.
pub const VIEW_GENESIS: &str = "\
Concept: Instance: View

Attribute: Individual: ConceptPage
: DataType: String
Relation: Individual: IndividualID
: Range: Individual
Attribute: Individual: ViewConcept
: DataType: String
Relation: Individual: Individuallist
: Range: Individual
Attribute: Individual: ViewMode
: DataType: String
Attribute: Individual: Title
: DataType: String
Attribute: Individual: Include
: DataType: String
Attribute: Individual: Exclude
: DataType: String
Attribute: Individual: Control
: DataType: String
Attribute: Individual: ControlType
: DataType: String
Attribute: Individual: Value
: DataType: String
";

/// The survival scenario: two concepts, the survivor and location models,
/// their individuals and the views over them.
pub const WINTER_FEAST: &str = include_str!("../../../scenarios/winter_feast.bsl");

/// A quest layered on [`WINTER_FEAST`].
pub const SURVIVE_THE_WINTER: &str = include_str!("../../../scenarios/survive_the_winter.bsl");

/// Seven-step priority walkthrough in the scenario-script format.
pub const WINTER_FEAST_TABLE2: &str = include_str!("../../../scenarios/winter_feast_table2.script");
