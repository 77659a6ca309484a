//! Deterministic SVG screenshots of GUI states.

use std::fmt::Write;

use super::state::GuiState;
use super::RipError;
use crate::app_model::{Bounds, Canvas, ComponentId, ComponentKind, GuiComponent};

const HIGHLIGHT: &str = "#e53935";

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

fn fill(kind: ComponentKind) -> &'static str {
    match kind {
        ComponentKind::Button => "#bbdefb",
        ComponentKind::Textview => "#f5f5f5",
        ComponentKind::Edittext => "#ffffff",
        ComponentKind::Spinner => "#e1bee7",
        ComponentKind::Checkbox => "#c8e6c9",
        ComponentKind::Image => "#ffe0b2",
        ComponentKind::ListItem => "#eeeeee",
    }
}

fn body(state: &GuiState, canvas: &Canvas, highlight: Option<&GuiComponent>) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        r##"  <rect class="frame" x="0" y="0" width="{}" height="{}" fill="#fafafa" stroke="#212121" stroke-width="2"/>"##,
        canvas.width, canvas.height
    );
    if state.overlay {
        let _ = writeln!(
            out,
            r##"  <rect class="scrim" x="0" y="0" width="{}" height="{}" fill="#000000" fill-opacity="0.3"/>"##,
            canvas.width, canvas.height
        );
    }
    for c in &state.visible_components {
        let Bounds { x, y, w, h } = c.bounds;
        let text = match state.entered_text.get(&c.id) {
            Some(typed) if !typed.is_empty() => typed.clone(),
            _ if c.label.is_empty() => format!("[{}]", c.kind),
            _ => c.label.clone(),
        };
        let _ = writeln!(
            out,
            r##"  <g class="component" data-id="{}" data-kind="{}">"##,
            escape(c.id.as_str()),
            c.kind
        );
        let _ = writeln!(
            out,
            r##"    <rect x="{x}" y="{y}" width="{w}" height="{h}" rx="4" fill="{}" stroke="#616161" stroke-width="1"/>"##,
            fill(c.kind)
        );
        let _ = writeln!(
            out,
            r##"    <text x="{}" y="{}" font-family="sans-serif" font-size="14" text-anchor="middle" dominant-baseline="middle">{}</text>"##,
            f64::from(x) + f64::from(w) / 2.0,
            f64::from(y) + f64::from(h) / 2.0,
            escape(&text)
        );
        out.push_str("  </g>\n");
    }
    if let Some(c) = highlight {
        let Bounds { x, y, w, h } = c.bounds;
        let _ = writeln!(
            out,
            r##"  <rect class="highlight" data-id="{}" x="{x}" y="{y}" width="{w}" height="{h}" fill="none" stroke="{HIGHLIGHT}" stroke-width="4"/>"##,
            escape(c.id.as_str())
        );
    }
    out
}

fn lookup<'a>(state: &'a GuiState, id: &ComponentId) -> Result<&'a GuiComponent, RipError> {
    state.component(id).ok_or_else(|| RipError::UnknownComponent {
        component: id.clone(),
        screen: state.screen.clone(),
    })
}

/// Full-screen rendering, optionally outlining one component.
pub fn render_screenshot(
    state: &GuiState,
    canvas: &Canvas,
    highlight: Option<&ComponentId>,
) -> Result<String, RipError> {
    let highlight = highlight.map(|id| lookup(state, id)).transpose()?;
    let mut svg = format!(
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" data-screen="{}">"#,
        escape(state.screen.as_str()),
        w = canvas.width,
        h = canvas.height
    );
    svg.push('\n');
    svg.push_str(&body(state, canvas, highlight));
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Component-specific screenshot: the full rendering viewed through the
/// component's bounds.
pub fn crop_screenshot(
    state: &GuiState,
    canvas: &Canvas,
    component: &ComponentId,
) -> Result<String, RipError> {
    let c = lookup(state, component)?;
    let Bounds { x, y, w, h } = c.bounds;
    let mut svg = format!(
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="{x} {y} {w} {h}" data-screen="{}" data-component="{}">"#,
        escape(state.screen.as_str()),
        escape(component.as_str())
    );
    svg.push('\n');
    svg.push_str(&body(state, canvas, None));
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Reads the `viewBox` of an SVG produced by this module.
pub fn svg_viewbox(svg: &str) -> Option<(i64, i64, i64, i64)> {
    let start = svg.find("viewBox=\"")? + "viewBox=\"".len();
    let end = start + svg[start..].find('"')?;
    let nums: Vec<i64> = svg[start..end]
        .split_whitespace()
        .map(|n| n.parse().ok())
        .collect::<Option<_>>()?;
    match nums[..] {
        [x, y, w, h] => Some((x, y, w, h)),
        _ => None,
    }
}
