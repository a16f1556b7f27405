pub mod algebra;
pub mod cli;
pub mod complex;
pub mod glue;
pub mod io;
pub mod linalg;
pub mod torsion;
