#![allow(clippy::needless_range_loop)]

pub mod classgrp;
pub mod error;
pub mod ideal;
pub mod kernel;
pub mod numfield;
pub mod tower;

pub use error::{Error, KernelError, Result};
