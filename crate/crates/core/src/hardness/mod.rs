//! Instance generators: the gadgets and the full reduction from capacitated
//! dominating set, plus seeded random instances.

pub mod cds;
pub mod gadgets;
pub mod random;

pub use cds::{
    build_witness_walk, cds_brute_force, check_cds_witness, gen_cds_reduction, parse_cds, reduction_budget,
    serialize_cds, CdsInstance, CdsReduction, CdsWitness,
};
pub use gadgets::{force_gadget_host, gen_cover_gadget, gen_force_gadget, GadgetFragment, PortDir};
pub use random::{gen_random, RandomParams};
