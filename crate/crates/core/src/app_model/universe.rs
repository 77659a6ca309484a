use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::types::{AppModel, Bounds, Canvas, ComponentId, ComponentKind, ScreenId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Row {
    Top,
    Middle,
    Bottom,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Column {
    Left,
    Center,
    Right,
}

/// Position of a component's center on a 3×3 grid over the canvas.
///
/// Serialized as `"<row>-<column>"`, e.g. `"bottom-left"`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct RelativeLocation {
    pub row: Row,
    pub column: Column,
}

impl RelativeLocation {
    /// Classifies the bounds center into half-open canvas thirds.
    pub fn of(bounds: &Bounds, canvas: &Canvas) -> Self {
        let (cx2, cy2) = bounds.doubled_center();
        // center c lies in [k·L/3, (k+1)·L/3) iff 3·(2c) < 2·(k+1)·L
        let third = |c2: u64, len: u32| {
            let scaled = 3 * c2;
            let len = u64::from(len);
            if scaled < 2 * len {
                0
            } else if scaled < 4 * len {
                1
            } else {
                2
            }
        };
        let row = [Row::Top, Row::Middle, Row::Bottom][third(cy2, canvas.height)];
        let column = [Column::Left, Column::Center, Column::Right][third(cx2, canvas.width)];
        Self { row, column }
    }
}

impl fmt::Display for RelativeLocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let row = match self.row {
            Row::Top => "top",
            Row::Middle => "middle",
            Row::Bottom => "bottom",
        };
        let column = match self.column {
            Column::Left => "left",
            Column::Center => "center",
            Column::Right => "right",
        };
        write!(f, "{row}-{column}")
    }
}

impl From<RelativeLocation> for String {
    fn from(l: RelativeLocation) -> Self {
        l.to_string()
    }
}

impl TryFrom<String> for RelativeLocation {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        let (row, column) = s
            .split_once('-')
            .ok_or_else(|| format!("bad relative location `{s}`"))?;
        let row = match row {
            "top" => Row::Top,
            "middle" => Row::Middle,
            "bottom" => Row::Bottom,
            _ => return Err(format!("bad row in `{s}`")),
        };
        let column = match column {
            "left" => Column::Left,
            "center" => Column::Center,
            "right" => Column::Right,
            _ => return Err(format!("bad column in `{s}`")),
        };
        Ok(Self { row, column })
    }
}

/// A component together with its traceability link to the source activity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentRecord {
    pub component_id: ComponentId,
    pub kind: ComponentKind,
    pub label: String,
    pub bounds: Bounds,
    pub relative_location: RelativeLocation,
    pub activity: String,
    pub screen: ScreenId,
}

/// One record per component, sorted by (screen id, component id).
pub fn extract_component_universe(model: &AppModel) -> Vec<ComponentRecord> {
    let mut records: Vec<ComponentRecord> = model
        .screens
        .iter()
        .flat_map(|screen| {
            screen.components.iter().map(move |c| ComponentRecord {
                component_id: c.id.clone(),
                kind: c.kind,
                label: c.label.clone(),
                bounds: c.bounds,
                relative_location: RelativeLocation::of(&c.bounds, &model.canvas),
                activity: screen.activity.clone(),
                screen: screen.id.clone(),
            })
        })
        .collect();
    records.sort_by(|a, b| (&a.screen, &a.component_id).cmp(&(&b.screen, &b.component_id)));
    records
}

/// Indexed view over the extracted universe.
#[derive(Clone, Debug, Default)]
pub struct ComponentUniverse {
    records: Vec<ComponentRecord>,
    by_id: BTreeMap<ComponentId, usize>,
}

impl ComponentUniverse {
    pub fn from_model(model: &AppModel) -> Self {
        Self::from_records(extract_component_universe(model))
    }

    pub fn from_records(records: Vec<ComponentRecord>) -> Self {
        let by_id = records
            .iter()
            .enumerate()
            .map(|(i, r)| (r.component_id.clone(), i))
            .collect();
        Self { records, by_id }
    }

    pub fn get(&self, id: &ComponentId) -> Option<&ComponentRecord> {
        self.by_id.get(id).map(|&i| &self.records[i])
    }

    pub fn records(&self) -> &[ComponentRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::app_model::parse_app_model;
    use crate::fixtures;
    use proptest::prelude::*;

    fn loc(x: u32, y: u32, w: u32, h: u32) -> String {
        RelativeLocation::of(&Bounds::new(x, y, w, h), &Canvas::default()).to_string()
    }

    #[test]
    fn noteapp_universe() {
        let model = parse_app_model(fixtures::NOTEAPP_V1).unwrap();
        let universe = extract_component_universe(&model);
        assert_eq!(universe.len(), 7);
        let save = universe.iter().find(|r| r.component_id.as_str() == "btn_save").unwrap();
        assert_eq!(save.activity, "EditorActivity");
        assert_eq!(save.relative_location.to_string(), "bottom-left");
        let keys: Vec<_> = universe.iter().map(|r| (r.screen.as_str(), r.component_id.as_str())).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
    }

    #[test]
    fn thirds_rule() {
        // btn_save: center (95, 590)
        assert_eq!(loc(20, 560, 150, 60), "bottom-left");
        // exact canvas center
        assert_eq!(loc(170, 310, 20, 20), "middle-center");
        // txt_title: center (180, 70)
        assert_eq!(loc(20, 40, 320, 60), "top-center");
        // center exactly on x = 120 belongs to the middle column
        assert_eq!(loc(110, 0, 20, 10), "top-center");
        // center just short of 120
        assert_eq!(loc(109, 0, 20, 10), "top-left");
        // center exactly on x = 240 is right
        assert_eq!(loc(230, 0, 20, 10), "top-right");
    }

    #[test]
    fn location_string_round_trip() {
        let l = RelativeLocation::of(&Bounds::new(0, 600, 10, 10), &Canvas::default());
        let s: String = l.into();
        assert_eq!(RelativeLocation::try_from(s).unwrap(), l);
        assert!(RelativeLocation::try_from("left-top".to_owned()).is_err());
    }

    proptest! {
        #[test]
        fn every_center_maps_to_one_label(w in 1u32..2000, h in 1u32..2000, fx in 0.0f64..1.0, fy in 0.0f64..1.0) {
            let canvas = Canvas { width: w, height: h };
            let x = (fx * f64::from(w - 1)) as u32;
            let y = (fy * f64::from(h - 1)) as u32;
            let l = RelativeLocation::of(&Bounds::new(x, y, 1, 1), &canvas);
            // compare against a float evaluation of the thirds
            let cx = f64::from(x) + 0.5;
            let cy = f64::from(y) + 0.5;
            let col = ((cx * 3.0) / f64::from(w)).floor().min(2.0) as usize;
            let row = ((cy * 3.0) / f64::from(h)).floor().min(2.0) as usize;
            prop_assert_eq!(l.column as usize, col);
            prop_assert_eq!(l.row as usize, row);
        }
    }
}
