pub mod algebra;
pub mod commonality;
pub mod corpus;
pub mod dot;
pub mod error;
pub mod implication;
pub mod lang;
pub mod oracle;
pub mod report;
pub mod semantics;
pub mod translation;

pub use algebra::{Algebra, Element, Limits, Prop, Side, StarProp};
pub use commonality::{
    classify_awareness, common_language, fixed_points, joint_embeddings, perfect_translations, Awareness,
    AwarenessVerdict, CommonLanguage, Form,
};
pub use error::{Error, Result};
pub use implication::{CrossImplication, Node};
pub use lang::{parse_formula, parse_language, Formula, LanguageSpec, ParseError};
pub use report::{AxiomReport, Mode, Operator, Verdict, Witness};
pub use semantics::{probability_bounds, verify_agreement, Distribution, Interval, JointStateSpace, SemanticTranslation, StarEvent, State};
pub use translation::Translation;
