pub mod classify;
pub mod conj3;
pub mod fig1;
pub mod grid;
pub mod seq;
pub mod verify;
