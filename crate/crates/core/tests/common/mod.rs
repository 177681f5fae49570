pub mod props;
pub mod synth;
