//! Two-level controller.
