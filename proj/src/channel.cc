#include "fluidnet/channel.h"

#include <stdexcept>

namespace fluidnet {

double channel_output(const Trajectory& input, double delay, double t) {
  if (delay < 0.0) throw std::invalid_argument("negative channel delay");
  return input.eval(t - delay);
}

double channel_in_transit(const Trajectory& input, double delay, double t) {
  if (delay < 0.0) throw std::invalid_argument("negative channel delay");
  return input.integrate(t - delay, t);
}

}  // namespace fluidnet
