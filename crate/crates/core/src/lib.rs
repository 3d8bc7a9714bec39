pub mod cli;
pub mod elliptic;
pub mod families;
pub mod jet;
pub mod paramdsl;
pub mod series;
pub mod texpr;
pub mod verifier;
