use crate::app_model::{Action, ComponentRecord};
use crate::flow::Step;

fn verb(action: Action) -> &'static str {
    match action {
        Action::Tap => "Tap",
        Action::LongTouch => "Long-touch",
        Action::Swipe => "Swipe",
        Action::Type => "Type",
    }
}

/// Natural-language rendering of one step.
pub fn generate_step_sentence(step: &Step, record: &ComponentRecord) -> String {
    let subject = if record.label.is_empty() {
        format!("the {}", record.kind)
    } else {
        format!("the \"{}\" {}", record.label, record.kind)
    };
    let mut sentence = format!(
        "{} {subject} located on the {} of the screen",
        verb(step.event.action),
        record.relative_location
    );
    if step.event.action == Action::Type {
        sentence.push_str(&format!(
            " entering \"{}\"",
            step.input_text.as_deref().unwrap_or_default()
        ));
    }
    sentence.push('.');
    sentence
}
