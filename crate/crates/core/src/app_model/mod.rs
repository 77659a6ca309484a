//! The declarative app model and the component-universe extraction over it.

mod parse;
mod types;
mod universe;

pub use parse::{parse_app_model, validate_app_model, ParseError, ParseErrorKind, SourceLocation};
pub use types::{
    Action, AppModel, Bounds, Canvas, ComponentId, ComponentKind, GuiComponent, Screen, ScreenId,
    Target, Transition, UnknownAction, CRASH_PREFIX,
};
pub use universe::{
    extract_component_universe, Column, ComponentRecord, ComponentUniverse, RelativeLocation, Row,
};
