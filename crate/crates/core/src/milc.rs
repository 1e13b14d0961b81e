//! STL to mixed-integer linear constraint encoding.
