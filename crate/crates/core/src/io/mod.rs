//! File formats: mono WAV and raw float32 audio, the trace CSV schema, and
//! a small SVG plot writer.

pub mod csv;
pub mod svg;
pub mod wav;
