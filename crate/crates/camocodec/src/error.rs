use std::path::{Path, PathBuf};

use camocodec_core::dataset::DatasetError;
use camocodec_core::dnn::DnnError;
use camocodec_core::dsp::DspError;
use camocodec_core::metrics::MetricsError;
use camocodec_core::raster::RasterError;
use camocodec_core::sonify::{SonifyError, WavError};
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{}: file not found", .0.display())]
    Missing(PathBuf),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {source}", path.display())]
    Raster { path: PathBuf, source: RasterError },
    #[error("{}: {source}", path.display())]
    Wav { path: PathBuf, source: WavError },
    #[error("{}: {source}", path.display())]
    Features { path: PathBuf, source: DatasetError },
    #[error("{}: {source}", path.display())]
    Model { path: PathBuf, source: DnnError },
    #[error("{}: {source}", path.display())]
    Encode { path: PathBuf, source: SonifyError },
    #[error("{}: {source}", path.display())]
    Mfcc { path: PathBuf, source: DspError },
    #[error("{}: manifest line {line}: {message}", path.display())]
    Manifest { path: PathBuf, line: u64, message: String },
    #[error("{}: {source}", path.display())]
    Config { path: PathBuf, source: serde_json::Error },
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Dnn(#[from] DnnError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Sonify(#[from] SonifyError),
    #[error(transparent)]
    Dsp(#[from] DspError),
}

impl Error {
    /// Maps `NotFound` to [`Error::Missing`] so absent inputs are
    /// distinguishable from other IO failures.
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        if source.kind() == std::io::ErrorKind::NotFound {
            Error::Missing(path.to_path_buf())
        } else {
            Error::Io { path: path.to_path_buf(), source }
        }
    }
}
