// Copyright 2026 The qmap Authors
// SPDX-License-Identifier: Apache-2.0

use std::io;
use std::path::PathBuf;

use qmap::asymptote::AsymptoteError;
use qmap::classify::ClassifyError;
use qmap::integrate::IntegrationError;
use qmap::oracle::OracleError;
use qmap::ratefn::ScenarioError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("writing output: {0}")]
    Output(#[source] io::Error),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Qmap(#[from] qmap::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

macro_rules! via_qmap {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Qmap(e.into())
            }
        }
    )*};
}

via_qmap!(ClassifyError, IntegrationError, AsymptoteError, OracleError);

/// How a successful run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Ok,
    /// A report broke M ⇒ QM ⇒ CP ⇒ P. Output was still written.
    ChainInconsistent,
}

impl Outcome {
    pub fn exit_code(self) -> u8 {
        match self {
            Outcome::Ok => 0,
            Outcome::ChainInconsistent => 2,
        }
    }

    pub fn from_consistent(consistent: bool) -> Self {
        if consistent {
            Outcome::Ok
        } else {
            Outcome::ChainInconsistent
        }
    }
}
