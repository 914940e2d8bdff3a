use std::path::PathBuf;

/// Errors produced by the segmentation engine.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("cannot parse hierarchy spec `{input}`: {reason}")]
    SpecSyntax { input: String, reason: String },

    #[error("graph is disconnected ({components} components)")]
    Disconnected { components: usize },

    #[error("degenerate measure: {0}")]
    DegenerateMeasure(String),

    #[error("erosion-based measures need the fine label map attached to the hierarchy")]
    MissingGeometry,

    #[error("malformed data: {0}")]
    Format(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Decode {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),

    #[error("image `{id}`: {source}")]
    Image {
        id: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn for_image(id: &str, source: Error) -> Self {
        Error::Image {
            id: id.to_string(),
            source: Box::new(source),
        }
    }

    /// Process exit code: 1 bad config, 2 data error, 3 degenerate measure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::SpecSyntax { .. } | Error::InvalidParameter(_) => 1,
            Error::DegenerateMeasure(_) => 3,
            Error::Image { source, .. } => source.exit_code(),
            _ => 2,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
