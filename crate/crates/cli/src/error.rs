use std::fmt;

use stratmap::gsp::GspError;
use stratmap::km::KmError;
use stratmap::metrics::MetricsError;
use stratmap::sim::SimError;
use stratmap::submap::SubmapError;
use stratmap::PipelineError;

/// Failure classes, each with its own exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Internal,
    Config,
    Input,
    UnknownCore,
    EmptyData,
}

impl ErrorClass {
    pub fn exit_code(self) -> u8 {
        match self {
            ErrorClass::Internal => 1,
            ErrorClass::Config => 2,
            ErrorClass::Input => 3,
            ErrorClass::UnknownCore => 4,
            ErrorClass::EmptyData => 5,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            ErrorClass::Internal => "internal",
            ErrorClass::Config => "config",
            ErrorClass::Input => "input",
            ErrorClass::UnknownCore => "unknown-core",
            ErrorClass::EmptyData => "empty-data",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub class: ErrorClass,
    pub message: String,
}

impl CliError {
    pub fn new(class: ErrorClass, message: impl Into<String>) -> Self {
        CliError {
            class,
            message: message.into(),
        }
    }

    pub fn config(message: impl Into<String>) -> Self {
        Self::new(ErrorClass::Config, message)
    }

    pub fn input(message: impl Into<String>) -> Self {
        Self::new(ErrorClass::Input, message)
    }

    pub fn exit_code(&self) -> u8 {
        self.class.exit_code()
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "error[{}]: {}", self.class.tag(), self.message)
    }
}

impl std::error::Error for CliError {}

fn km_class(e: &KmError) -> ErrorClass {
    match e {
        KmError::NotFound(_) | KmError::Ambiguous { .. } | KmError::UnknownUnit(_) => ErrorClass::UnknownCore,
        _ => ErrorClass::Input,
    }
}

impl From<KmError> for CliError {
    fn from(e: KmError) -> Self {
        CliError::new(km_class(&e), e.to_string())
    }
}

fn submap_class(e: &SubmapError) -> ErrorClass {
    match e {
        SubmapError::Km(k) => km_class(k),
        SubmapError::SameUnit(_) | SubmapError::ZeroDepth => ErrorClass::Config,
    }
}

impl From<SubmapError> for CliError {
    fn from(e: SubmapError) -> Self {
        CliError::new(submap_class(&e), e.to_string())
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        let class = match &e {
            SimError::Km(k) => km_class(k),
            SimError::Submap(s) => submap_class(s),
            SimError::EmptySubmapFixture(_) => ErrorClass::EmptyData,
            SimError::CoreItemCount(_)
            | SimError::InvalidMix(_)
            | SimError::InvalidInterleave(_)
            | SimError::InvalidCompletion(_) => ErrorClass::Config,
        };
        CliError::new(class, e.to_string())
    }
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        let class = match &e {
            PipelineError::Config(_) => ErrorClass::Config,
            PipelineError::Lookup(k) => km_class(k),
            PipelineError::Submap(s) => submap_class(s),
            PipelineError::EmptyData(_) => ErrorClass::EmptyData,
            PipelineError::Metrics(MetricsError::EmptySubmap(_)) => ErrorClass::EmptyData,
            PipelineError::Metrics(MetricsError::InvalidThreshold(_)) => ErrorClass::Config,
            PipelineError::Gsp(GspError::EmptyDatabase) => ErrorClass::EmptyData,
            PipelineError::Gsp(GspError::InvalidMinsup(_)) => ErrorClass::Config,
            PipelineError::Gsp(_) | PipelineError::Codec(_) | PipelineError::Abstraction(_) => ErrorClass::Internal,
        };
        CliError::new(class, e.to_string())
    }
}
