pub mod config;
pub mod csvio;
pub mod experiments;
pub mod manifest;

