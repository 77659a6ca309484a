//! Three-section report documents: preliminary information, the step list,
//! and the per-step full screenshots.

use std::fmt::Write;
use std::str::FromStr;

use serde::Serialize;

use super::report::BugReport;
use crate::canonical::to_canonical_json;

/// Directory (relative to an app database) holding screenshot SVGs.
pub const SCREENSHOT_DIR: &str = "screens";

pub const SECTION_TITLES: [&str; 3] = ["Preliminary Information", "Steps to Reproduce", "Screenshots"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Markdown,
    Html,
    Json,
}

impl ReportFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ReportFormat::Markdown => "md",
            ReportFormat::Html => "html",
            ReportFormat::Json => "json",
        }
    }
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "md" | "markdown" => Ok(ReportFormat::Markdown),
            "html" => Ok(ReportFormat::Html),
            "json" => Ok(ReportFormat::Json),
            other => Err(format!("unknown report format `{other}` (expected md, html or json)")),
        }
    }
}

fn screenshot_link(id: &str) -> String {
    format!("{SCREENSHOT_DIR}/{id}.svg")
}

#[derive(Serialize)]
struct Preliminary<'a> {
    report_id: &'a str,
    title: &'a str,
    device: &'a str,
    description: &'a str,
    app_id: &'a str,
    app_version: &'a str,
    created_at: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    crash: Option<&'a str>,
}

/// One row of the step list: the five per-step fields plus context.
#[derive(Serialize)]
struct StepRow {
    ordinal: u32,
    action: String,
    component_type: String,
    relative_location: String,
    activity: String,
    component_screenshot: Option<String>,
    component_id: String,
    label: String,
    input_text: Option<String>,
    note: Option<String>,
    sentence: Option<String>,
    overridden: bool,
}

#[derive(Serialize)]
struct ScreenshotRow {
    ordinal: u32,
    full_screenshot: Option<String>,
}

#[derive(Serialize)]
struct Document<'a> {
    preliminary: Preliminary<'a>,
    steps: Vec<StepRow>,
    screenshots: Vec<ScreenshotRow>,
}

fn document(report: &BugReport) -> Document<'_> {
    let steps = report
        .steps
        .iter()
        .map(|s| {
            let record = s.component.as_ref();
            StepRow {
                ordinal: s.ordinal,
                action: s.event.action.to_string(),
                component_type: record.map_or_else(|| "?".to_owned(), |r| r.kind.to_string()),
                relative_location: record
                    .map_or_else(|| "?".to_owned(), |r| r.relative_location.to_string()),
                activity: record.map_or_else(|| "?".to_owned(), |r| r.activity.clone()),
                component_screenshot: s.screenshots.cropped.as_deref().map(screenshot_link),
                component_id: s.event.component.to_string(),
                label: record.map(|r| r.label.clone()).unwrap_or_default(),
                input_text: s.input_text.clone(),
                note: s.note.clone(),
                sentence: s.sentence.clone(),
                overridden: s.overridden,
            }
        })
        .collect();
    let screenshots = report
        .steps
        .iter()
        .map(|s| ScreenshotRow {
            ordinal: s.ordinal,
            full_screenshot: s.screenshots.full.as_deref().map(screenshot_link),
        })
        .collect();
    Document {
        preliminary: Preliminary {
            report_id: &report.report_id,
            title: &report.title,
            device: &report.device,
            description: &report.description,
            app_id: &report.app_id,
            app_version: &report.app_version,
            created_at: report.created_at.to_rfc3339(),
            crash: report.crash.as_deref(),
        },
        steps,
        screenshots,
    }
}

/// Renders a finalized report. Output is a pure function of the report.
pub fn render_report(report: &BugReport, format: ReportFormat) -> String {
    let doc = document(report);
    match format {
        ReportFormat::Json => to_canonical_json(&doc),
        ReportFormat::Markdown => markdown(&doc),
        ReportFormat::Html => html(&doc),
    }
}

fn md_cell(text: &str) -> String {
    text.replace('|', "\\|").replace('\n', " ")
}

fn markdown(doc: &Document<'_>) -> String {
    let p = &doc.preliminary;
    let mut out = String::new();
    let _ = writeln!(out, "# {}\n", SECTION_TITLES[0]);
    let _ = writeln!(out, "- **Title:** {}", p.title);
    let _ = writeln!(out, "- **Report:** {}", p.report_id);
    let _ = writeln!(out, "- **App:** {} {}", p.app_id, p.app_version);
    let _ = writeln!(out, "- **Device:** {}", p.device);
    let _ = writeln!(out, "- **Created:** {}", p.created_at);
    if let Some(crash) = p.crash {
        let _ = writeln!(out, "- **Crash:** {crash}");
    }
    let _ = writeln!(out, "\n{}\n", p.description);

    let _ = writeln!(out, "# {}\n", SECTION_TITLES[1]);
    out.push_str("| # | Action | Component type | Relative location | Activity | Component screenshot | Description |\n");
    out.push_str("|---|---|---|---|---|---|---|\n");
    for s in &doc.steps {
        let shot = s
            .component_screenshot
            .as_deref()
            .map_or_else(|| "n/a".to_owned(), |link| format!("![{}]({link})", md_cell(&s.component_id)));
        let mut text = s.sentence.clone().unwrap_or_default();
        if let Some(note) = &s.note {
            text.push_str(&format!(" Note: {note}"));
        }
        if s.overridden {
            text.push_str(" (entered manually)");
        }
        let _ = writeln!(
            out,
            "| {} | {} | {} | {} | {} | {} | {} |",
            s.ordinal,
            s.action,
            s.component_type,
            s.relative_location,
            md_cell(&s.activity),
            shot,
            md_cell(text.trim())
        );
    }
    out.push('\n');

    let _ = writeln!(out, "# {}\n", SECTION_TITLES[2]);
    for shot in &doc.screenshots {
        match &shot.full_screenshot {
            Some(link) => {
                let _ = writeln!(out, "{}. ![Step {}]({link})", shot.ordinal, shot.ordinal);
            }
            None => {
                let _ = writeln!(out, "{}. (no screenshot)", shot.ordinal);
            }
        }
    }
    out
}

fn esc(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            _ => out.push(c),
        }
    }
    out
}

fn html(doc: &Document<'_>) -> String {
    let p = &doc.preliminary;
    let mut out = String::new();
    out.push_str("<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n");
    let _ = writeln!(out, "<title>{}</title>", esc(p.title));
    out.push_str("</head>\n<body>\n");

    let _ = writeln!(out, "<section id=\"preliminary\">\n<h1>{}</h1>\n<dl>", SECTION_TITLES[0]);
    let mut field = |name: &str, value: &str| {
        let _ = writeln!(out, "<dt>{name}</dt><dd>{}</dd>", esc(value));
    };
    field("Title", p.title);
    field("Report", p.report_id);
    field("App", &format!("{} {}", p.app_id, p.app_version));
    field("Device", p.device);
    field("Created", &p.created_at);
    if let Some(crash) = p.crash {
        field("Crash", crash);
    }
    let _ = writeln!(out, "</dl>\n<p>{}</p>\n</section>", esc(p.description));

    let _ = writeln!(out, "<section id=\"steps\">\n<h1>{}</h1>\n<table>", SECTION_TITLES[1]);
    out.push_str("<tr><th>#</th><th>Action</th><th>Component type</th><th>Relative location</th><th>Activity</th><th>Component screenshot</th><th>Description</th></tr>\n");
    for s in &doc.steps {
        let shot = s.component_screenshot.as_deref().map_or_else(
            || "n/a".to_owned(),
            |link| format!("<img src=\"{}\" alt=\"{}\">", esc(link), esc(&s.component_id)),
        );
        let mut text = esc(s.sentence.as_deref().unwrap_or_default());
        if let Some(note) = &s.note {
            text.push_str(&format!("<br><em>Note:</em> {}", esc(note)));
        }
        if s.overridden {
            text.push_str(" (entered manually)");
        }
        let _ = writeln!(
            out,
            "<tr><td>{}</td><td>{}</td><td>{}</td><td>{}</td><td>{}</td><td>{shot}</td><td>{text}</td></tr>",
            s.ordinal,
            esc(&s.action),
            esc(&s.component_type),
            esc(&s.relative_location),
            esc(&s.activity)
        );
    }
    out.push_str("</table>\n</section>\n");

    let _ = writeln!(out, "<section id=\"screenshots\">\n<h1>{}</h1>\n<ol>", SECTION_TITLES[2]);
    for shot in &doc.screenshots {
        match &shot.full_screenshot {
            Some(link) => {
                let _ = writeln!(out, "<li><img src=\"{}\" alt=\"Step {}\"></li>", esc(link), shot.ordinal);
            }
            None => {
                let _ = writeln!(out, "<li>(no screenshot)</li>");
            }
        }
    }
    out.push_str("</ol>\n</section>\n</body>\n</html>\n");
    out
}
