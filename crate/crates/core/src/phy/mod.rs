//! OFDM framing around BMOCZ: resource mapping, symbol synthesis,
//! synchronization, PAPR, blind channel estimation and the hybrid packet.

pub mod chest;
pub mod ofdm;
pub mod packet;
pub mod papr;
pub mod sync;

pub use chest::{blind_chest, equalize, estimate_noise_var, ChannelEstimate};
pub use ofdm::{
    demap, map_fm, map_tm, ofdm_demodulate, ofdm_modulate, Mapping, Numerology, OfdmConfig,
    ResourceGrid,
};
pub use packet::{PacketBits, PacketLayout, PacketRx, RxOptions};
pub use papr::{papr_fm_huffman, papr_fm_jutted, prop1_condition, PaprMethod};
pub use sync::{build_sync_symbol, sync_search, SyncResult};
