#ifndef INAVM_CHANNELS_HPP
#define INAVM_CHANNELS_HPP

// Chained propagation of one or more independent navigation channels. A
// channel is an initial state plus its stream of update batches; channels
// share nothing, so they are distributed across threads.

#include <vector>

#include "inavm/navigator.hpp"

namespace inavm {

struct Channel {
  NavState initial;
  std::vector<ImuBatch> batches;
};

struct ChannelTrack {
  std::vector<NavState> states;  // one per batch, at interval end
  std::vector<LoopDiagnostics> attitude;
  std::vector<LoopDiagnostics> velpos;
};

ChannelTrack propagate(const Navigator& nav, const Channel& channel);

/// One track per channel, computed in parallel.
std::vector<ChannelTrack> propagate_channels(const Navigator& nav, const std::vector<Channel>& channels);

/// Single-threaded reference of propagate_channels.
std::vector<ChannelTrack> propagate_channels_serial(const Navigator& nav, const std::vector<Channel>& channels);

}  // namespace inavm

#endif  // INAVM_CHANNELS_HPP
