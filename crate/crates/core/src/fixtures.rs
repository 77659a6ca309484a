//! App models bundled with the crate for tests, benchmarks and demos.

pub const NOTEAPP_V1: &str = include_str!("../fixtures/noteapp-v1.json");
pub const NOTEAPP_V2: &str = include_str!("../fixtures/noteapp-v2.json");
/// noteapp 2.1: the editor's back button is renamed, relabeled and moved.
pub const NOTEAPP_V2_REDESIGN: &str = include_str!("../fixtures/noteapp-v2-redesign.json");
pub const SETTINGSAPP: &str = include_str!("../fixtures/settingsapp.json");
pub const SHOPCART: &str = include_str!("../fixtures/shopcart.json");

pub const ALL: [(&str, &str); 5] = [
    ("noteapp-v1", NOTEAPP_V1),
    ("noteapp-v2", NOTEAPP_V2),
    ("noteapp-v2-redesign", NOTEAPP_V2_REDESIGN),
    ("settingsapp", SETTINGSAPP),
    ("shopcart", SHOPCART),
];
