#pragma once

#include "fluidnet/history.h"

namespace fluidnet {

// Lossless constant-delay transmission channel. The channel holds no state of
// its own: output and content are reads of the input history.

// phi(eps(E), t) = phi(beta(E), t - delay)
double channel_output(const Trajectory& input, double delay, double t);

// Packets on the channel at t: N_beta(t, t - delay).
double channel_in_transit(const Trajectory& input, double delay, double t);

}  // namespace fluidnet
