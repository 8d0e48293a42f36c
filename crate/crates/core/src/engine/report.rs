//! Plain-text rendering of a run.

use std::fmt::Write;

use super::runner::{ReversalReport, TestRun};
use super::verdict::*;
use crate::apostl::eval::EvalReport;
use crate::json::JsonValue;

const LABEL_WIDTH: usize = 45;
const RULE: &str = "--------------------------------------------------------------------------";

/// Colons line up whatever the indent.
fn status_line(out: &mut String, indent: &str, label: &str, status: impl std::fmt::Display) {
    let width = (LABEL_WIDTH + 2).saturating_sub(indent.len());
    let _ = writeln!(out, "{indent}{label:<width$} :  {status}");
}

fn failures(out: &mut String, report: &EvalReport) {
    if report.satisfied() {
        return;
    }
    out.push_str("    > Failed:\n");
    for failed in &report.failed {
        let _ = writeln!(out, "      - {failed}");
    }
}

fn condition_step(out: &mut String, label: &str, report: &EvalReport) {
    status_line(out, "  ", label, if report.satisfied() { "OK" } else { "NOT OK" });
    failures(out, report);
}

/// Top-level arrays keep at most `max` elements.
fn truncate(body: &JsonValue, max: usize) -> (JsonValue, usize) {
    match body {
        JsonValue::Array(items) if items.len() > max => (JsonValue::Array(items[..max].to_vec()), items.len() - max),
        other => (other.clone(), 0),
    }
}

fn response(out: &mut String, body: &JsonValue, max_resources: usize) {
    let (shown, hidden) = truncate(body, max_resources);
    out.push_str("  > Response\n");
    for line in shown.to_pretty_string().lines() {
        let _ = writeln!(out, "  {line}");
    }
    if hidden > 0 {
        let _ = writeln!(out, "  ... ({hidden} more not shown)");
    }
}

pub fn render_operation(verdict: &OperationVerdict, verbose: bool, max_resources: usize) -> String {
    let mut out = String::new();
    let _ = writeln!(out, ">> {}", verdict.label());
    for step in &verdict.trace {
        match step {
            Step::Invariants(report) => condition_step(&mut out, "> Verifying Invariants", report),
            Step::Data { source, error } => {
                let label = match source {
                    DataSource::Generated => "> Generating Data",
                    DataSource::Recycled => "> Recycling Data",
                };
                status_line(&mut out, "  ", label, if error.is_none() { "OK" } else { "NOT OK" });
                if let Some(error) = error {
                    let _ = writeln!(out, "    > Caused by:\n      > Error: {error}");
                }
            }
            Step::Preconditions(report) => condition_step(&mut out, "> Verifying Preconditions", report),
            Step::Request(record) => {
                let status = match (record.code, verdict.outcome) {
                    (Some(200), _) => "OK",
                    (_, Outcome::FailedAsExpected) => "FAILED (as expected)",
                    _ => "FAILED (analyse exec. trace)",
                };
                status_line(&mut out, "  ", "> Performing Request", status);
                if verbose {
                    if let Some(body) = &record.response_body {
                        response(&mut out, body, max_resources);
                    }
                }
                if record.code != Some(200) {
                    out.push_str("    > Caused by:\n");
                    if let Some(code) = record.code {
                        let _ = writeln!(out, "      > Code: {code}");
                    }
                    if let Some(message) = &record.message {
                        let _ = writeln!(out, "      > Message: {message}");
                    }
                    if let Some(error) = &record.transport_error {
                        let _ = writeln!(out, "      > Error: {error}");
                    }
                }
            }
            Step::Postconditions(report) => condition_step(&mut out, "> Verifying Postconditions", report),
        }
    }
    let _ = writeln!(out, "  {RULE}");
    status_line(&mut out, "  ", &verdict.label(), verdict.outcome.label());
    out
}

/// `players` becomes `Player's API`.
pub fn api_title(name: &str) -> String {
    let mut chars = name.chars();
    let mut title: String = match chars.next() {
        Some(first) => first.to_uppercase().chain(chars).collect(),
        None => String::from("Root"),
    };
    if title.len() > 1 && title.ends_with('s') {
        title.pop();
    }
    format!("{title}'s API")
}

pub fn render_api_summary(result: &ApiResult) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{RULE}");
    let _ = writeln!(out, ">>> {} Results:", api_title(&result.name));
    status_line(&mut out, "    ", "OK", result.ok);
    status_line(&mut out, "    ", "NOT OK", result.not_ok);
    status_line(&mut out, "    ", "INCONCLUSIVE", result.inconclusive);
    out
}

pub fn render_reversal(report: &ReversalReport) -> String {
    let mut out = String::new();
    status_line(&mut out, "", ">>> REVERTING ALL EFFECTS", if report.ok() { "OK" } else { "NOT OK" });
    if !report.ok() {
        out.push_str("    > Failed:\n");
        for r in report.requests.iter().filter(|r| !matches!(r.code, Some(200) | Some(404))) {
            match (&r.code, &r.error) {
                (Some(code), _) => {
                    let _ = writeln!(out, "      - DELETE {} ({code})", r.url);
                }
                (None, error) => {
                    let _ = writeln!(out, "      - DELETE {} ({})", r.url, error.as_deref().unwrap_or("no response"));
                }
            }
        }
    }
    out
}

/// Full report: every operation in test order, a summary per API and the
/// reversal line.
pub fn render_report(run: &TestRun, verbose: bool, max_resources: usize) -> String {
    let mut out = String::new();
    for result in &run.results {
        for verdict in &result.verdicts {
            out.push_str(&render_operation(verdict, verbose, max_resources));
            out.push('\n');
        }
        out.push_str(&render_api_summary(result));
        out.push('\n');
    }
    out.push_str(&render_reversal(&run.reversal));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::apostl::eval::FailedCondition;
    use crate::apostl::Method;

    fn record(code: u16, body: Option<JsonValue>, message: Option<&str>) -> RequestRecord {
        RequestRecord {
            method: Method::Post,
            url: "http://x/players".into(),
            code: Some(code),
            message: message.map(str::to_string),
            transport_error: None,
            response_body: body,
        }
    }

    #[test]
    fn green_operation_has_every_step() {
        let v = OperationVerdict {
            method: Method::Post,
            path: "/players".into(),
            outcome: Outcome::Ok,
            trace: vec![
                Step::Invariants(EvalReport::default()),
                Step::Data { source: DataSource::Generated, error: None },
                Step::Preconditions(EvalReport::default()),
                Step::Request(record(200, None, None)),
                Step::Postconditions(EvalReport::default()),
            ],
        };
        let text = render_operation(&v, false, 0);
        let expected = [
            ">> POST /players",
            "  > Verifying Invariants                        :  OK",
            "  > Generating Data                             :  OK",
            "  > Verifying Preconditions                     :  OK",
            "  > Performing Request                          :  OK",
            "  > Verifying Postconditions                    :  OK",
            &format!("  {RULE}"),
            "  POST /players                                 :  OK",
        ];
        assert_eq!(text.lines().collect::<Vec<_>>(), expected);
    }

    #[test]
    fn failures_and_causes_are_listed() {
        let pre = EvalReport {
            failed: vec![FailedCondition { formula: "response_code(GET /players/1) == 200".into(), reason: None }],
            passed: 0,
        };
        let v = OperationVerdict {
            method: Method::Delete,
            path: "/players/{playerNIF}".into(),
            outcome: Outcome::FailedAsExpected,
            trace: vec![
                Step::Preconditions(pre),
                Step::Request(record(404, None, Some("Player with NIF 1 not found."))),
            ],
        };
        let text = render_operation(&v, false, 0);
        assert!(text.contains("  > Verifying Preconditions                     :  NOT OK\n    > Failed:\n      - response_code(GET /players/1) == 200\n"));
        assert!(text.contains(":  FAILED (as expected)\n    > Caused by:\n      > Code: 404\n      > Message: Player with NIF 1 not found.\n"));
        assert!(text.trim_end().ends_with("DELETE /players/{playerNIF}                   :  OK"));
    }

    #[test]
    fn verbose_truncates_collections() {
        let players = JsonValue::Array((0..5).map(JsonValue::Int).collect());
        let v = OperationVerdict {
            method: Method::Get,
            path: "/players".into(),
            outcome: Outcome::Ok,
            trace: vec![Step::Request(record(200, Some(players), None))],
        };
        let text = render_operation(&v, true, 2);
        assert!(text.contains("  > Response\n  [\n    0,\n    1\n  ]\n  ... (3 more not shown)\n"), "{text}");
        assert!(!render_operation(&v, false, 2).contains("Response"));
    }

    #[test]
    fn summary_and_titles() {
        assert_eq!(api_title("players"), "Player's API");
        assert_eq!(api_title("tournaments"), "Tournament's API");
        let empty = ApiResult::new("players", vec![]);
        let text = render_api_summary(&empty);
        let ok_line = format!("    OK{} :  0\n", " ".repeat(41));
        assert!(text.contains(&format!(">>> Player's API Results:\n{ok_line}")), "{text}");
        let op_line = "  POST /players                                 :  OK";
        assert_eq!(ok_line.find(':'), op_line.find(':'));
        assert!(render_reversal(&ReversalReport::default()).starts_with(">>> REVERTING ALL EFFECTS"));
    }
}
