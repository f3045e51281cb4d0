pub mod channels;
pub mod cmac;
pub mod hilbert;
pub mod infoq;
pub mod regions;
pub mod sampling;
pub mod search;
