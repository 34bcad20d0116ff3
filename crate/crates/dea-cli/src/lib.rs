//! Library surface of the `dea` command-line tool: the report schema and its
//! renderers, shared between the binary and its integration tests.

pub mod report;
