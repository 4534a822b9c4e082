//! Polynomial-time building blocks: median orders and H-partitions, rainbow
//! Hamilton paths with one spare color, with a forced color or forced color
//! set, layered rainbow connection, and the color absorber.

pub mod absorber;
pub mod connect;
pub mod forcing;
pub mod hpartition;
pub mod median;
pub mod one_spare;

pub use absorber::{absorb, build_absorber, Absorber, AbsorberRequest, AbsorberSchedule};
pub use connect::{certify_strongly_rainbow_connected, rainbow_connect, rainbow_connect_ordered};
pub use forcing::{
    forcing_color_on, forcing_set_on, forcing_set_preconditions, is_exceptional, rainbow_ham_path_forcing_color,
    rainbow_ham_path_forcing_set,
};
pub use hpartition::{h_partition, h_partition_on, split_block, HPartition};
pub use median::{forward_arcs, local_median_order, low_degree_count_bound_check, LocalMedianOrder};
pub use one_spare::{one_spare_on, rainbow_ham_path_one_spare, rainbow_ham_path_one_spare_counted};
