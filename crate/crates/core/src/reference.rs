//! Reference systems with known crossing structure.

use crate::system::RetardedSystem;

/// A three-state benchmark with five crossing frequencies.
pub fn literature_example() -> RetardedSystem {
    RetardedSystem::from_rows(
        3,
        &[-1.0, 13.5, -1.0, -3.0, -1.0, -2.0, -2.0, -1.0, -4.0],
        &[-5.9, 7.1, -70.3, 2.0, -1.0, 5.0, 2.0, 0.0, 6.0],
    )
    .expect("valid literature example")
}

/// `x' = -x(t) - 2 x(t - tau)`: a single crossing at `omega = sqrt(3)`.
pub fn scalar_example() -> RetardedSystem {
    RetardedSystem::from_rows(1, &[-1.0], &[-2.0]).expect("valid scalar example")
}
