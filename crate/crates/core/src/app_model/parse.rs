//! Parsing and validation of the JSON app-model format.
//!
//! Syntax and shape errors come straight from `serde_json`. Semantic rules are
//! checked afterwards in document order; the offending value is reported by
//! its JSON path and resolved back to a line/column with a small scanner over
//! the original text.

use std::collections::HashSet;
use std::fmt;

use super::types::{Action, AppModel, ComponentKind, Target};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    /// Malformed JSON or a value of the wrong shape.
    Syntax,
    DuplicateId,
    /// A transition names a screen or component that does not exist where it should.
    UnknownReference,
    /// A transition's action is not allowed by the component's capability flags.
    CapabilityMismatch,
    /// Two transitions share the same (screen, component, action) trigger.
    DuplicateTransition,
    /// Any other violated invariant (bounds, empty screens, identifier format).
    InvalidValue,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ParseErrorKind::Syntax => "SyntaxError",
            ParseErrorKind::DuplicateId => "DuplicateId",
            ParseErrorKind::UnknownReference => "UnknownReference",
            ParseErrorKind::CapabilityMismatch => "CapabilityMismatch",
            ParseErrorKind::DuplicateTransition => "DuplicateTransition",
            ParseErrorKind::InvalidValue => "InvalidValue",
        })
    }
}

/// Position of the offending value: JSON path plus 1-based line and column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SourceLocation {
    pub path: String,
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for SourceLocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() {
            write!(f, "{}:{}", self.line, self.column)
        } else {
            write!(f, "{}:{} ({})", self.line, self.column, self.path)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{kind} at {location}: {message}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub message: String,
    pub location: SourceLocation,
}

/// Parses and validates an app model.
pub fn parse_app_model(source: &str) -> Result<AppModel, ParseError> {
    let model: AppModel = serde_json::from_str(source).map_err(|e| ParseError {
        kind: ParseErrorKind::Syntax,
        message: strip_position(&e.to_string()),
        location: SourceLocation {
            path: String::new(),
            line: e.line(),
            column: e.column(),
        },
    })?;
    validate(&model).map_err(|v| v.locate(source))?;
    Ok(model)
}

/// Checks every model invariant; the error carries a path but no line info.
pub fn validate_app_model(model: &AppModel) -> Result<(), ParseError> {
    validate(model).map_err(|v| v.unlocated())
}

fn strip_position(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(idx) => msg[..idx].to_owned(),
        None => msg.to_owned(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Seg {
    Key(&'static str),
    Index(usize),
}

fn render_path(path: &[Seg]) -> String {
    let mut out = String::new();
    for seg in path {
        match seg {
            Seg::Key(k) => {
                if !out.is_empty() {
                    out.push('.');
                }
                out.push_str(k);
            }
            Seg::Index(i) => {
                out.push_str(&format!("[{i}]"));
            }
        }
    }
    out
}

struct Violation {
    kind: ParseErrorKind,
    message: String,
    path: Vec<Seg>,
}

impl Violation {
    fn new(kind: ParseErrorKind, path: Vec<Seg>, message: impl Into<String>) -> Self {
        Self {
            kind,
            message: message.into(),
            path,
        }
    }

    fn locate(self, source: &str) -> ParseError {
        let (line, column) = locate(source, &self.path)
            .map(|offset| line_column(source, offset))
            .unwrap_or((1, 1));
        ParseError {
            kind: self.kind,
            message: self.message,
            location: SourceLocation {
                path: render_path(&self.path),
                line,
                column,
            },
        }
    }

    fn unlocated(self) -> ParseError {
        ParseError {
            kind: self.kind,
            message: self.message,
            location: SourceLocation {
                path: render_path(&self.path),
                line: 0,
                column: 0,
            },
        }
    }
}

fn valid_identifier(id: &str) -> bool {
    !id.is_empty()
        && id
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
}

fn validate(model: &AppModel) -> Result<(), Violation> {
    use ParseErrorKind::*;

    if model.canvas.width == 0 || model.canvas.height == 0 {
        return Err(Violation::new(
            InvalidValue,
            vec![Seg::Key("canvas")],
            "canvas dimensions must be positive",
        ));
    }

    let mut screen_ids = HashSet::new();
    let mut component_ids = HashSet::new();
    for (si, screen) in model.screens.iter().enumerate() {
        let at = |rest: &[Seg]| {
            let mut p = vec![Seg::Key("screens"), Seg::Index(si)];
            p.extend_from_slice(rest);
            p
        };
        if !valid_identifier(screen.id.as_str()) {
            return Err(Violation::new(
                InvalidValue,
                at(&[Seg::Key("id")]),
                format!("screen id `{}` must be non-empty [A-Za-z0-9_.-]", screen.id),
            ));
        }
        if !screen_ids.insert(&screen.id) {
            return Err(Violation::new(
                DuplicateId,
                at(&[Seg::Key("id")]),
                format!("duplicate screen id `{}`", screen.id),
            ));
        }
        if screen.components.is_empty() {
            return Err(Violation::new(
                InvalidValue,
                at(&[Seg::Key("components")]),
                format!("screen `{}` has no components", screen.id),
            ));
        }
        for (ci, c) in screen.components.iter().enumerate() {
            let cat = |key: &'static str| at(&[Seg::Key("components"), Seg::Index(ci), Seg::Key(key)]);
            if !valid_identifier(c.id.as_str()) {
                return Err(Violation::new(
                    InvalidValue,
                    cat("id"),
                    format!("component id `{}` must be non-empty [A-Za-z0-9_.-]", c.id),
                ));
            }
            if !component_ids.insert(&c.id) {
                return Err(Violation::new(
                    DuplicateId,
                    cat("id"),
                    format!("duplicate component id `{}`", c.id),
                ));
            }
            if c.bounds.w == 0 || c.bounds.h == 0 {
                return Err(Violation::new(
                    InvalidValue,
                    cat("bounds"),
                    format!("component `{}` has an empty bounding box", c.id),
                ));
            }
            if !model.canvas.contains(&c.bounds) {
                return Err(Violation::new(
                    InvalidValue,
                    cat("bounds"),
                    format!("component `{}` extends outside the canvas", c.id),
                ));
            }
            if c.editable && c.kind != ComponentKind::Edittext {
                return Err(Violation::new(
                    InvalidValue,
                    cat("editable"),
                    format!("component `{}` is editable but its kind is {}", c.id, c.kind),
                ));
            }
        }
    }

    if model.screen(&model.initial_screen).is_none() {
        return Err(Violation::new(
            UnknownReference,
            vec![Seg::Key("initial_screen")],
            format!("initial screen `{}` does not exist", model.initial_screen),
        ));
    }

    let mut triggers = HashSet::new();
    for (ti, t) in model.transitions.iter().enumerate() {
        let at = |key: &'static str| vec![Seg::Key("transitions"), Seg::Index(ti), Seg::Key(key)];
        let Some(from) = model.screen(&t.from) else {
            return Err(Violation::new(
                UnknownReference,
                at("from"),
                format!("unknown screen `{}`", t.from),
            ));
        };
        let Some(component) = from.components.iter().find(|c| c.id == t.component) else {
            return Err(Violation::new(
                UnknownReference,
                at("component"),
                format!("component `{}` is not on screen `{}`", t.component, t.from),
            ));
        };
        match &t.to {
            Target::Screen(to) if model.screen(to).is_none() => {
                return Err(Violation::new(
                    UnknownReference,
                    at("to"),
                    format!("unknown target screen `{to}`"),
                ));
            }
            Target::Crash { exception } if exception.is_empty() => {
                return Err(Violation::new(
                    InvalidValue,
                    at("to"),
                    "crash marker needs an exception name",
                ));
            }
            _ => {}
        }
        if !component.permits(t.action) {
            return Err(Violation::new(
                CapabilityMismatch,
                at("action"),
                format!(
                    "`{}` is not permitted on `{}` ({})",
                    t.action,
                    t.component,
                    capability_flag(t.action)
                ),
            ));
        }
        if !triggers.insert((&t.from, &t.component, t.action)) {
            return Err(Violation::new(
                DuplicateTransition,
                vec![Seg::Key("transitions"), Seg::Index(ti)],
                format!("second transition for {}@{} on `{}`", t.action, t.component, t.from),
            ));
        }
    }
    Ok(())
}

fn capability_flag(action: Action) -> &'static str {
    match action {
        Action::Tap => "needs clickable",
        Action::LongTouch => "needs long_clickable",
        Action::Swipe => "needs swipeable",
        Action::Type => "needs editable",
    }
}

fn line_column(source: &str, offset: usize) -> (usize, usize) {
    let before = &source[..offset];
    let line = before.matches('\n').count() + 1;
    let line_start = before.rfind('\n').map_or(0, |i| i + 1);
    let column = source[line_start..offset].chars().count() + 1;
    (line, column)
}

/// Byte offset of the value addressed by `path`, if the text contains it.
fn locate(source: &str, path: &[Seg]) -> Option<usize> {
    let mut scanner = Scanner {
        src: source,
        pos: 0,
    };
    scanner.skip_ws();
    for seg in path {
        match seg {
            Seg::Key(key) => scanner.enter_key(key)?,
            Seg::Index(idx) => scanner.enter_index(*idx)?,
        }
    }
    Some(scanner.pos)
}

struct Scanner<'a> {
    src: &'a str,
    pos: usize,
}

impl Scanner<'_> {
    fn peek(&self) -> Option<u8> {
        self.src.as_bytes().get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b' ' | b'\t' | b'\n' | b'\r')) {
            self.pos += 1;
        }
    }

    fn expect(&mut self, byte: u8) -> Option<()> {
        self.skip_ws();
        (self.peek()? == byte).then(|| self.pos += 1)
    }

    fn string(&mut self) -> Option<String> {
        self.skip_ws();
        let start = self.pos;
        if self.peek()? != b'"' {
            return None;
        }
        self.pos += 1;
        loop {
            match self.peek()? {
                b'\\' => self.pos += 2,
                b'"' => {
                    self.pos += 1;
                    break;
                }
                _ => self.pos += 1,
            }
        }
        serde_json::from_str(&self.src[start..self.pos]).ok()
    }

    fn skip_value(&mut self) -> Option<()> {
        self.skip_ws();
        match self.peek()? {
            b'"' => self.string().map(|_| ()),
            open @ (b'{' | b'[') => {
                let close = if open == b'{' { b'}' } else { b']' };
                self.pos += 1;
                self.skip_ws();
                if self.peek()? == close {
                    self.pos += 1;
                    return Some(());
                }
                loop {
                    if open == b'{' {
                        self.string()?;
                        self.expect(b':')?;
                    }
                    self.skip_value()?;
                    self.skip_ws();
                    match self.peek()? {
                        b',' => self.pos += 1,
                        c if c == close => {
                            self.pos += 1;
                            return Some(());
                        }
                        _ => return None,
                    }
                }
            }
            _ => {
                while !matches!(
                    self.peek(),
                    None | Some(b',' | b'}' | b']' | b' ' | b'\t' | b'\n' | b'\r')
                ) {
                    self.pos += 1;
                }
                Some(())
            }
        }
    }

    fn enter_key(&mut self, key: &str) -> Option<()> {
        self.expect(b'{')?;
        loop {
            let name = self.string()?;
            self.expect(b':')?;
            self.skip_ws();
            if name == key {
                return Some(());
            }
            self.skip_value()?;
            self.expect(b',')?;
        }
    }

    fn enter_index(&mut self, idx: usize) -> Option<()> {
        self.expect(b'[')?;
        for _ in 0..idx {
            self.skip_value()?;
            self.expect(b',')?;
        }
        self.skip_ws();
        Some(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn err(src: &str) -> ParseError {
        parse_app_model(src).expect_err("model should be rejected")
    }

    #[test]
    fn noteapp_v1_counts() {
        let m = parse_app_model(fixtures::NOTEAPP_V1).unwrap();
        assert_eq!(m.screens.len(), 3);
        assert_eq!(m.component_count(), 7);
        assert_eq!(m.transitions.len(), 7);
    }

    #[test]
    fn all_fixtures_parse() {
        for (name, src) in fixtures::ALL {
            parse_app_model(src).unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }

    #[test]
    fn syntax_error_has_line_and_column() {
        let e = err("{\n  \"app_id\": \"x\",\n  oops\n}");
        assert_eq!(e.kind, ParseErrorKind::Syntax);
        assert_eq!(e.location.line, 3);
    }

    #[test]
    fn missing_field_is_a_syntax_error() {
        let e = err(r#"{"app_id": "x", "version": "1"}"#);
        assert_eq!(e.kind, ParseErrorKind::Syntax);
    }

    #[test]
    fn duplicate_component_id() {
        let src = r#"{
  "app_id": "x", "version": "1", "initial_screen": "a",
  "screens": [
    {"id": "a", "activity": "A", "components": [
      {"id": "btn_x", "kind": "button", "bounds": [0, 0, 10, 10]},
      {"id": "btn_x", "kind": "button", "bounds": [0, 20, 10, 10]}
    ]}
  ],
  "transitions": []
}"#;
        let e = err(src);
        assert_eq!(e.kind, ParseErrorKind::DuplicateId);
        assert_eq!(e.location.path, "screens[0].components[1].id");
        assert_eq!((e.location.line, e.location.column), (6, 14));
    }

    #[test]
    fn duplicate_across_screens() {
        let src = r#"{"app_id": "x", "version": "1", "initial_screen": "a",
  "screens": [
    {"id": "a", "activity": "A", "components": [{"id": "c", "kind": "image", "bounds": [0, 0, 1, 1]}]},
    {"id": "b", "activity": "B", "components": [{"id": "c", "kind": "image", "bounds": [0, 0, 1, 1]}]}
  ], "transitions": []}"#;
        assert_eq!(err(src).kind, ParseErrorKind::DuplicateId);
    }

    #[test]
    fn transition_on_wrong_screen_is_unknown_reference() {
        let src = fixtures::NOTEAPP_V1.replace(
            r#"{ "from": "editor", "component": "btn_save", "action": "tap", "to": "list" }"#,
            r#"{ "from": "main", "component": "btn_save", "action": "tap", "to": "list" }"#,
        );
        let e = err(&src);
        assert_eq!(e.kind, ParseErrorKind::UnknownReference);
        assert_eq!(e.location.path, "transitions[3].component");
        assert_eq!(e.location.line, 37);
    }

    #[test]
    fn unknown_target_screen() {
        let src = fixtures::NOTEAPP_V1.replace(r#""to": "list" }"#, r#""to": "nowhere" }"#);
        let e = err(&src);
        assert_eq!(e.kind, ParseErrorKind::UnknownReference);
        assert!(e.message.contains("nowhere"));
    }

    #[test]
    fn capability_mismatch() {
        let src = fixtures::NOTEAPP_V1.replace(
            r#""component": "btn_new", "action": "tap""#,
            r#""component": "btn_new", "action": "swipe""#,
        );
        let e = err(&src);
        assert_eq!(e.kind, ParseErrorKind::CapabilityMismatch);
        assert_eq!(e.location.path, "transitions[0].action");
    }

    #[test]
    fn editable_requires_edittext() {
        let src = fixtures::NOTEAPP_V1.replace(
            r#""label": "Save", "bounds": [20, 560, 150, 60], "clickable": true"#,
            r#""label": "Save", "bounds": [20, 560, 150, 60], "clickable": true, "editable": true"#,
        );
        assert_eq!(err(&src).kind, ParseErrorKind::InvalidValue);
    }

    #[test]
    fn bounds_outside_canvas() {
        let src = fixtures::NOTEAPP_V1.replace("[190, 560, 150, 60]", "[190, 600, 150, 60]");
        let e = err(&src);
        assert_eq!(e.kind, ParseErrorKind::InvalidValue);
        assert!(e.location.path.ends_with("bounds"));
    }

    #[test]
    fn missing_initial_screen() {
        let src = fixtures::NOTEAPP_V1.replace(r#""initial_screen": "main""#, r#""initial_screen": "splash""#);
        assert_eq!(err(&src).kind, ParseErrorKind::UnknownReference);
    }

    #[test]
    fn flags_default_to_false() {
        let src = r#"{"app_id": "x", "version": "1", "initial_screen": "a",
  "screens": [{"id": "a", "activity": "A", "components": [{"id": "c", "kind": "button", "bounds": [0, 0, 1, 1]}]}],
  "transitions": [{"from": "a", "component": "c", "action": "tap", "to": "a"}]}"#;
        assert_eq!(err(src).kind, ParseErrorKind::CapabilityMismatch);
    }

    #[test]
    fn duplicate_trigger() {
        let src = fixtures::NOTEAPP_V1.replace(
            r#"{ "from": "list", "component": "btn_home", "action": "tap", "to": "main" }"#,
            r#"{ "from": "list", "component": "btn_home", "action": "tap", "to": "main" },
    { "from": "list", "component": "btn_home", "action": "tap", "to": "editor" }"#,
        );
        assert_eq!(err(&src).kind, ParseErrorKind::DuplicateTransition);
    }

    #[test]
    fn canvas_defaults() {
        let m = parse_app_model(fixtures::NOTEAPP_V1).unwrap();
        assert_eq!((m.canvas.width, m.canvas.height), (360, 640));
    }
}
