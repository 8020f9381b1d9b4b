#include "inavm/channels.hpp"

#include <exception>

namespace inavm {

ChannelTrack propagate(const Navigator& nav, const Channel& channel) {
  ChannelTrack track;
  track.states.reserve(channel.batches.size());
  track.attitude.reserve(channel.batches.size());
  track.velpos.reserve(channel.batches.size());
  NavState state = channel.initial;
  for (const ImuBatch& batch : channel.batches) {
    StepResult r = nav.step(state, batch);
    state = r.state;
    track.states.push_back(state);
    track.attitude.push_back(r.solution.attitude);
    track.velpos.push_back(r.solution.velpos);
  }
  return track;
}

std::vector<ChannelTrack> propagate_channels(const Navigator& nav, const std::vector<Channel>& channels) {
  const int n = static_cast<int>(channels.size());
  std::vector<ChannelTrack> out(n);
  std::vector<std::exception_ptr> errors(n);
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n; ++i) {
    try {
      out[i] = propagate(nav, channels[i]);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  // exceptions must not cross the parallel region; rethrow the first one here
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

std::vector<ChannelTrack> propagate_channels_serial(const Navigator& nav, const std::vector<Channel>& channels) {
  std::vector<ChannelTrack> out;
  out.reserve(channels.size());
  for (const Channel& c : channels) out.push_back(propagate(nav, c));
  return out;
}

}  // namespace inavm
