use std::fmt;

/// Why a run stopped, mapped onto the process exit code.
#[derive(Debug)]
pub enum Failure {
    Config(String),
    Infeasible(String),
    Numerical(String),
    /// `validate` found failing checks.
    Checks(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Config(_) => 2,
            Failure::Infeasible(_) => 3,
            Failure::Numerical(_) => 4,
            Failure::Checks(_) => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Failure::Config(_) => "config",
            Failure::Infeasible(_) => "infeasible",
            Failure::Numerical(_) => "numerical",
            Failure::Checks(_) => "validation",
        }
    }

    pub fn reason(&self) -> &str {
        match self {
            Failure::Config(r)
            | Failure::Infeasible(r)
            | Failure::Numerical(r)
            | Failure::Checks(r) => r,
        }
    }

    /// One JSON object on one line.
    pub fn to_line(&self) -> String {
        serde_json::json!({ "error": self.kind(), "reason": self.reason() }).to_string()
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind(), self.reason())
    }
}

impl From<rescomp::Error> for Failure {
    fn from(e: rescomp::Error) -> Self {
        let reason = e.to_string();
        if e.is_infeasible() {
            Failure::Infeasible(reason)
        } else if e.is_numerical() {
            Failure::Numerical(reason)
        } else {
            Failure::Config(reason)
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Config(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Config(e.to_string())
    }
}

pub type Outcome<T> = Result<T, Failure>;

pub fn config_err(msg: impl Into<String>) -> Failure {
    Failure::Config(msg.into())
}
