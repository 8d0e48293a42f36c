use crate::apostl::eval::EvalReport;
use crate::apostl::Method;
use crate::json::JsonValue;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Ok,
    NotOk,
    /// Non-200 response after a failed precondition. Tallied as OK.
    FailedAsExpected,
    /// Non-200 response although every precondition held.
    Inconclusive,
}

impl Outcome {
    /// `post` is the conjunction of plain and `previous`-bearing
    /// postconditions; it is ignored when the request did not succeed.
    pub fn classify(code_ok: bool, pre: bool, post: bool) -> Outcome {
        match (code_ok, pre, post) {
            (true, true, true) => Outcome::Ok,
            (true, _, _) => Outcome::NotOk,
            (false, false, _) => Outcome::FailedAsExpected,
            (false, true, _) => Outcome::Inconclusive,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Outcome::Ok | Outcome::FailedAsExpected => "OK",
            Outcome::NotOk => "NOT OK",
            Outcome::Inconclusive => "INCONCLUSIVE",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataSource {
    Generated,
    Recycled,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RequestRecord {
    pub method: Method,
    pub url: String,
    pub code: Option<u16>,
    pub message: Option<String>,
    pub transport_error: Option<String>,
    pub response_body: Option<JsonValue>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Step {
    Invariants(EvalReport),
    Data { source: DataSource, error: Option<String> },
    Preconditions(EvalReport),
    Request(RequestRecord),
    Postconditions(EvalReport),
}

#[derive(Debug, Clone, PartialEq)]
pub struct OperationVerdict {
    pub method: Method,
    /// Templated path, e.g. `/players/{playerNIF}`.
    pub path: String,
    pub outcome: Outcome,
    pub trace: Vec<Step>,
}

impl OperationVerdict {
    pub fn label(&self) -> String {
        format!("{} {}", self.method, self.path)
    }

    pub fn request(&self) -> Option<&RequestRecord> {
        self.trace.iter().find_map(|s| match s {
            Step::Request(r) => Some(r),
            _ => None,
        })
    }

    pub fn invariants(&self) -> Option<&EvalReport> {
        self.trace.iter().find_map(|s| match s {
            Step::Invariants(r) => Some(r),
            _ => None,
        })
    }

    pub fn preconditions(&self) -> Option<&EvalReport> {
        self.trace.iter().find_map(|s| match s {
            Step::Preconditions(r) => Some(r),
            _ => None,
        })
    }

    pub fn postconditions(&self) -> Option<&EvalReport> {
        self.trace.iter().find_map(|s| match s {
            Step::Postconditions(r) => Some(r),
            _ => None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApiResult {
    pub name: String,
    pub ok: usize,
    pub not_ok: usize,
    pub inconclusive: usize,
    pub verdicts: Vec<OperationVerdict>,
}

impl ApiResult {
    pub fn new(name: impl Into<String>, verdicts: Vec<OperationVerdict>) -> Self {
        let count = |f: fn(Outcome) -> bool| verdicts.iter().filter(|v| f(v.outcome)).count();
        ApiResult {
            name: name.into(),
            ok: count(|o| matches!(o, Outcome::Ok | Outcome::FailedAsExpected)),
            not_ok: count(|o| o == Outcome::NotOk),
            inconclusive: count(|o| o == Outcome::Inconclusive),
            verdicts,
        }
    }

    pub fn verdict(&self, method: Method, path: &str) -> Option<&OperationVerdict> {
        self.verdicts.iter().find(|v| v.method == method && v.path == path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn outcome_table_is_total() {
        for code_ok in [true, false] {
            for pre in [true, false] {
                for post in [true, false] {
                    for prev in [true, false] {
                        let expected = match (code_ok, pre, post && prev) {
                            (true, true, true) => Outcome::Ok,
                            (true, false, _) => Outcome::NotOk,
                            (true, true, false) => Outcome::NotOk,
                            (false, false, _) => Outcome::FailedAsExpected,
                            (false, true, _) => Outcome::Inconclusive,
                        };
                        assert_eq!(Outcome::classify(code_ok, pre, post && prev), expected);
                    }
                }
            }
        }
    }

    #[test]
    fn failed_as_expected_tallies_as_ok() {
        let v = |outcome| OperationVerdict { method: Method::Get, path: "/x".into(), outcome, trace: vec![] };
        let r = ApiResult::new(
            "x",
            vec![v(Outcome::Ok), v(Outcome::FailedAsExpected), v(Outcome::NotOk), v(Outcome::Inconclusive)],
        );
        assert_eq!((r.ok, r.not_ok, r.inconclusive), (2, 1, 1));
        assert_eq!(Outcome::FailedAsExpected.label(), "OK");
    }
}
