//! Local entropies and energies of free Klein-Gordon wave packets and of
//! chiral U(1)-current profiles, with the numerical machinery needed to test
//! entropy-energy inequalities on them.

pub mod bekenstein;
pub mod bumps;
pub mod cauchy;
pub mod divergence;
pub mod eigen;
pub mod entropy;
pub mod error;
pub mod gamma;
pub mod grid;
pub mod io;
pub mod linalg;
pub mod profile;
pub mod quadrature;
pub mod region;
pub mod spectral;
pub mod u1;

pub use cauchy::{inner_product, norm_pm, CauchyData, EnergyDensity, Sign};
pub use entropy::WedgeVertex;
pub use error::{Error, Result};
pub use grid::{Field, GridSpec};
pub use spectral::SpectralField;
pub use region::{Region, Side};
