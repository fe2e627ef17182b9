// Copyright 2026 The qmap Authors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

use crate::asymptote::AsymptoteError;
use crate::classify::ClassifyError;
use crate::dynmap::MapError;
use crate::integrate::IntegrationError;
use crate::oracle::OracleError;
use crate::ratefn::{EvalError, ParseError, ScenarioError};

/// Any error raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Integration(#[from] IntegrationError),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    #[error(transparent)]
    Asymptote(#[from] AsymptoteError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
