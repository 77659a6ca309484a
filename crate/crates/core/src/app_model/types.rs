use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

macro_rules! id_newtype {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub String);

        impl $name {
            pub fn new(id: impl Into<String>) -> Self {
                Self(id.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                Self(s.to_owned())
            }
        }

        impl From<String> for $name {
            fn from(s: String) -> Self {
                Self(s)
            }
        }
    };
}

id_newtype!(
    /// Identifier of a screen (window) in an app model.
    ScreenId
);
id_newtype!(
    /// Identifier of a GUI component, unique across the whole model.
    ComponentId
);

/// The four reporter-visible actions, in canonical order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Action {
    Tap,
    LongTouch,
    Swipe,
    Type,
}

impl Action {
    pub const ALL: [Action; 4] = [Action::Tap, Action::LongTouch, Action::Swipe, Action::Type];

    pub fn as_str(self) -> &'static str {
        match self {
            Action::Tap => "tap",
            Action::LongTouch => "long-touch",
            Action::Swipe => "swipe",
            Action::Type => "type",
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown action `{0}` (expected tap, long-touch, swipe or type)")]
pub struct UnknownAction(pub String);

impl FromStr for Action {
    type Err = UnknownAction;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Action::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| UnknownAction(s.to_owned()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ComponentKind {
    Button,
    Textview,
    Edittext,
    Spinner,
    Checkbox,
    Image,
    ListItem,
}

impl ComponentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ComponentKind::Button => "button",
            ComponentKind::Textview => "textview",
            ComponentKind::Edittext => "edittext",
            ComponentKind::Spinner => "spinner",
            ComponentKind::Checkbox => "checkbox",
            ComponentKind::Image => "image",
            ComponentKind::ListItem => "list-item",
        }
    }
}

impl fmt::Display for ComponentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Axis-aligned rectangle in abstract pixels, serialized as `[x, y, w, h]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "[u32; 4]", into = "[u32; 4]")]
pub struct Bounds {
    pub x: u32,
    pub y: u32,
    pub w: u32,
    pub h: u32,
}

impl Bounds {
    pub const fn new(x: u32, y: u32, w: u32, h: u32) -> Self {
        Self { x, y, w, h }
    }

    /// Twice the center point; keeps the arithmetic in integers.
    pub fn doubled_center(&self) -> (u64, u64) {
        (
            2 * u64::from(self.x) + u64::from(self.w),
            2 * u64::from(self.y) + u64::from(self.h),
        )
    }
}

impl From<[u32; 4]> for Bounds {
    fn from([x, y, w, h]: [u32; 4]) -> Self {
        Self { x, y, w, h }
    }
}

impl From<Bounds> for [u32; 4] {
    fn from(b: Bounds) -> Self {
        [b.x, b.y, b.w, b.h]
    }
}

/// Screen size in abstract pixels, serialized as `[width, height]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "[u32; 2]", into = "[u32; 2]")]
pub struct Canvas {
    pub width: u32,
    pub height: u32,
}

impl Default for Canvas {
    fn default() -> Self {
        Self {
            width: 360,
            height: 640,
        }
    }
}

impl Canvas {
    pub fn contains(&self, b: &Bounds) -> bool {
        u64::from(b.x) + u64::from(b.w) <= u64::from(self.width)
            && u64::from(b.y) + u64::from(b.h) <= u64::from(self.height)
    }
}

impl From<[u32; 2]> for Canvas {
    fn from([width, height]: [u32; 2]) -> Self {
        Self { width, height }
    }
}

impl From<Canvas> for [u32; 2] {
    fn from(c: Canvas) -> Self {
        [c.width, c.height]
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GuiComponent {
    pub id: ComponentId,
    pub kind: ComponentKind,
    #[serde(default)]
    pub label: String,
    pub bounds: Bounds,
    #[serde(default)]
    pub clickable: bool,
    #[serde(default)]
    pub long_clickable: bool,
    #[serde(default)]
    pub swipeable: bool,
    #[serde(default)]
    pub editable: bool,
}

impl GuiComponent {
    /// Whether the capability flags allow `action` on this component.
    pub fn permits(&self, action: Action) -> bool {
        match action {
            Action::Tap => self.clickable,
            Action::LongTouch => self.long_clickable,
            Action::Swipe => self.swipeable,
            Action::Type => self.editable,
        }
    }

    /// Permitted actions in canonical order.
    pub fn actions(&self) -> impl Iterator<Item = Action> + '_ {
        Action::ALL.into_iter().filter(|a| self.permits(*a))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Screen {
    pub id: ScreenId,
    pub activity: String,
    #[serde(default)]
    pub overlay: bool,
    pub components: Vec<GuiComponent>,
}

/// Destination of a transition: another screen, or a declared crash.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "String", into = "String")]
pub enum Target {
    Screen(ScreenId),
    Crash { exception: String },
}

pub const CRASH_PREFIX: &str = "CRASH:";

impl From<String> for Target {
    fn from(s: String) -> Self {
        match s.strip_prefix(CRASH_PREFIX) {
            Some(exception) => Target::Crash {
                exception: exception.to_owned(),
            },
            None => Target::Screen(ScreenId(s)),
        }
    }
}

impl From<Target> for String {
    fn from(t: Target) -> Self {
        match t {
            Target::Screen(id) => id.0,
            Target::Crash { exception } => format!("{CRASH_PREFIX}{exception}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Transition {
    pub from: ScreenId,
    pub component: ComponentId,
    pub action: Action,
    pub to: Target,
}

/// Declarative description of a GUI application.
///
/// Parsed models are validated (see [`crate::app_model::parse_app_model`]);
/// the lookup helpers below assume a valid model.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AppModel {
    pub app_id: String,
    pub version: String,
    #[serde(default)]
    pub canvas: Canvas,
    pub initial_screen: ScreenId,
    pub screens: Vec<Screen>,
    pub transitions: Vec<Transition>,
}

impl AppModel {
    pub fn screen(&self, id: &ScreenId) -> Option<&Screen> {
        self.screens.iter().find(|s| &s.id == id)
    }

    /// Finds a component and the screen it belongs to.
    pub fn component(&self, id: &ComponentId) -> Option<(&Screen, &GuiComponent)> {
        self.screens.iter().find_map(|s| {
            s.components
                .iter()
                .find(|c| &c.id == id)
                .map(|c| (s, c))
        })
    }

    pub fn transition(
        &self,
        from: &ScreenId,
        component: &ComponentId,
        action: Action,
    ) -> Option<&Transition> {
        self.transitions
            .iter()
            .find(|t| &t.from == from && &t.component == component && t.action == action)
    }

    pub fn component_count(&self) -> usize {
        self.screens.iter().map(|s| s.components.len()).sum()
    }
}
