//! Community-structured benchmark networks, SIR epidemics and targeted immunization.
//!
//! * [`lfr`] generates LFR benchmark graphs with a planted partition.
//! * [`centrality`] scores nodes by degree, betweenness or community in/out degree.
//! * [`strategy`] turns scores (or random walks) into ordered immunization plans.
//! * [`sir`] runs discrete-time SIR epidemics, optionally after immunization.
//! * [`harness`] sweeps strategies over removal fractions and aggregates outcomes.

pub mod centrality;
pub mod error;
pub mod graph;
pub mod harness;
pub mod io;
pub mod lfr;
pub mod sir;
pub mod strategy;
pub mod util;

pub use error::{Error, Result};
pub use graph::{CommunityId, DegreeSplit, Graph, NodeId, Partition};
