//! MIQP solver.
