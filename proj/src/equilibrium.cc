#include "fluidnet/equilibrium.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "fluidnet/errors.h"

namespace fluidnet {
namespace {

struct Loads {
  std::vector<double> load;   // user packets per second into each queue
  std::vector<double> slope;  // -d load_j / d tau_j
  std::vector<double> rates;
};

Loads evaluate(const Network& n, const EquilibriumProblem& p,
               const std::vector<double>& tau) {
  Loads l;
  l.load.assign(n.queue_count(), 0.0);
  l.slope.assign(n.queue_count(), 0.0);
  l.rates.assign(n.user_count(), 0.0);
  for (int i = 0; i < n.user_count(); ++i) {
    const Circuit& c = n.circuit_of(i);
    double rtt = c.total_delay;
    for (int j : c.queues) rtt += tau[j];
    double x = p.windows[i] / rtt;
    l.rates[i] = x;
    for (int j : c.queues) {
      l.load[j] += x;
      l.slope[j] += x / rtt;
    }
  }
  return l;
}

double residual(const Network& n, const std::vector<double>& cap,
                const std::vector<double>& tau, const Loads& l) {
  double worst = 0.0;
  for (int j = 0; j < n.queue_count(); ++j) {
    double excess = l.load[j] - cap[j];
    double r = tau[j] > 0.0 ? std::abs(excess) : std::max(excess, 0.0);
    worst = std::max(worst, r / n.capacity(j));
  }
  return worst;
}

}  // namespace

EquilibriumResult equilibrium_queue(const EquilibriumProblem& p) {
  if (!p.network) throw ConfigError("equilibrium problem without a network");
  const Network& n = *p.network;
  if (static_cast<int>(p.windows.size()) != n.user_count()) {
    throw ConfigError("equilibrium problem: one window per user required");
  }
  std::vector<double> cap(n.queue_count());
  for (int j = 0; j < n.queue_count(); ++j) {
    double delta = j < static_cast<int>(p.cross_fraction.size())
                       ? p.cross_fraction[j]
                       : 0.0;
    cap[j] = n.capacity(j) * (1.0 - delta);
    if (!(cap[j] > 0.0)) {
      throw ConfigError("cross traffic saturates queue '" + n.queue_id(j) +
                        "'; no fixed-window equilibrium");
    }
  }
  for (double w : p.windows) {
    if (!(w >= 0.0)) throw ConfigError("equilibrium windows must be >= 0");
  }

  EquilibriumResult r;
  std::vector<double> tau(n.queue_count(), 0.0);
  Loads l = evaluate(n, p, tau);
  double res = residual(n, cap, tau, l);
  int it = 0;

  // Phase 1: damped Newton on each queue's own delay.
  constexpr double kDamping = 0.7;
  double best = res;
  int since_progress = 0;
  while (res >= kEquilibriumTolerance && it < kEquilibriumMaxIterations / 2) {
    for (int j = 0; j < n.queue_count(); ++j) {
      double excess = l.load[j] - cap[j];
      if (l.slope[j] > 0.0) {
        tau[j] = std::max(0.0, tau[j] + kDamping * excess / l.slope[j]);
      }
    }
    l = evaluate(n, p, tau);
    res = residual(n, cap, tau, l);
    ++it;
    if (res < 0.5 * best) {
      best = res;
      since_progress = 0;
    } else if (++since_progress > 200) {
      break;
    }
  }

  // Phase 2: Gauss-Seidel sweeps, each queue solved exactly by bisection
  // with the others held fixed. Load is decreasing in every tau_j.
  if (res >= kEquilibriumTolerance) r.used_bisection = true;
  while (res >= kEquilibriumTolerance && it < kEquilibriumMaxIterations) {
    for (int j = 0; j < n.queue_count(); ++j) {
      auto excess = [&](double v) {
        double saved = tau[j];
        tau[j] = v;
        double e = evaluate(n, p, tau).load[j] - cap[j];
        tau[j] = saved;
        return e;
      };
      if (excess(0.0) <= 0.0) {
        tau[j] = 0.0;
        continue;
      }
      double lo = 0.0;
      double hi = 1.0;
      double total = 0.0;
      for (double w : p.windows) total += w;
      hi = std::max(hi, total / cap[j]);
      for (int k = 0; k < 200 && hi - lo > 1e-15 * hi; ++k) {
        double mid = 0.5 * (lo + hi);
        (excess(mid) > 0.0 ? lo : hi) = mid;
      }
      tau[j] = 0.5 * (lo + hi);
    }
    l = evaluate(n, p, tau);
    res = residual(n, cap, tau, l);
    ++it;
  }
  if (res >= kEquilibriumTolerance) {
    throw SimulationError("equilibrium did not converge in " +
                          std::to_string(it) + " iterations, residual " +
                          std::to_string(res));
  }

  r.tau = tau;
  r.rates = l.rates;
  r.congested.resize(n.queue_count());
  for (int j = 0; j < n.queue_count(); ++j) r.congested[j] = tau[j] > 0.0;
  r.residual = res;
  r.iterations = it;
  return r;
}

}  // namespace fluidnet
