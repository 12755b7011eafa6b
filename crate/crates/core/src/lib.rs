//! Joint relay-pair selection and relay power allocation for a two-hop
//! network of buffered half-duplex decode-and-forward relays.
//!
//! In every slot one relay receives from the source while another forwards
//! buffered data to the destination, interfering with the first. The
//! [`schemes`] module picks the pair and the transmit power; [`sim`] runs
//! Monte Carlo episodes over Rayleigh fading from [`channel`], and [`sweep`]
//! turns parameter sweeps into CSV.

pub mod channel;
pub mod error;
pub mod model;
#[cfg(feature = "oracle")]
pub mod oracle;
pub mod par;
pub mod schemes;
pub mod sim;
pub mod sweep;

pub use error::{ChannelError, ModelError, SimError, SweepError};
pub use model::{
    BufferCapacity, BufferState, ChannelRealization, Decision, Evaluations, Mode, PowerInterval, SystemParams,
};
pub use schemes::{SchemeId, SelectionContext};
pub use sim::{run_episode, EpisodeConfig, RunMetrics, SlotMetrics};
