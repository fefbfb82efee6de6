use std::fmt;

/// Failure of a subcommand, carrying its exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad input: unparsable formula, invalid flags, inconsistent data.
    Input(String),
    /// A file could not be read or written.
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 1,
            CliError::Io(_) => 2,
        }
    }

    pub fn io(path: &std::path::Path, e: impl fmt::Display) -> Self {
        CliError::Io(format!("{}: {e}", path.display()))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) | CliError::Io(m) => f.write_str(m),
        }
    }
}

/// Library errors map to the input exit code unless they are I/O failures.
macro_rules! lib_error {
    ($($ty:ty => $io:pat),* $(,)?) => {$(
        impl From<$ty> for CliError {
            fn from(e: $ty) -> Self {
                if matches!(e, $io) { CliError::Io(e.to_string()) } else { CliError::Input(e.to_string()) }
            }
        }
    )*};
}

use voxlabel::{
    abstraction::AbstractionError, bench::BenchError, label::LabelError, workspace::WorkspaceError,
};

macro_rules! input_error {
    ($($ty:ty),*) => {$(
        impl From<$ty> for CliError {
            fn from(e: $ty) -> Self {
                CliError::Input(e.to_string())
            }
        }
    )*};
}

input_error!(
    voxlabel::ltl::LtlError,
    voxlabel::buchi::BuchiError,
    voxlabel::planner::PlannerError
);

lib_error!(
    WorkspaceError => WorkspaceError::Io(_),
    AbstractionError => AbstractionError::Io(_) | AbstractionError::Workspace(WorkspaceError::Io(_)),
    LabelError => LabelError::Io(_) | LabelError::Workspace(WorkspaceError::Io(_)),
    BenchError => BenchError::Io(_) | BenchError::Abstraction(AbstractionError::Io(_)) | BenchError::Label(LabelError::Io(_)),
);
