//! Periodic-point counts, the liftable-orbit invariant and the embeddability decision.

mod census;
mod decide;
mod liftable;
mod necklace;

pub use census::{count_periodic, count_periodic_sft, count_periodic_sofic, CensusRow, PeriodicCensus};
pub use decide::{decide_embeddable, BoundKind, DecisionReport, DecisionRow, Mode, PeriodicUpperBound, TailCertificate, Verdict, DEFAULT_ALPHA};
pub use liftable::{count_liftable, growth_check, liftable_counts, GrowthRow, LiftableCensus, LiftableRow, LiftedOrbit};
pub use necklace::{accepts_periodic, for_each_periodic_orbit, periodic_orbits_while, least_period, least_rotation, CyclicWord};
pub(crate) use liftable::Lifter;
