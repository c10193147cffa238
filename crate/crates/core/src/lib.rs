//! Exact finite models of Tits buildings, coisotropic subspace posets and
//! decompositions of Heisenberg-group representations.

pub mod buildings;
pub mod cyclolin;
pub mod gflin;
pub mod guard;
pub mod homology;
pub mod poset;
pub mod repdecomp;
pub mod verify;
