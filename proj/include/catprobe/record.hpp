#ifndef CATPROBE_RECORD_HPP
#define CATPROBE_RECORD_HPP

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace catprobe {

// A homodyne detection record on a uniform time grid: increments dy_k over
// [k dt, (k+1) dt), units s^(1/2). When produced by a stochastic integration
// the underlying Wiener increments are kept as well so a run can be replayed
// bit-exactly.
struct MeasurementRecord {
  double dt = 0.0;
  std::vector<double> dy;
  std::vector<double> dw;  // empty unless produced by an SDE run
  std::uint64_t rng_seed = 0;

  std::size_t steps() const { return dy.size(); }
  double duration() const { return dt * static_cast<double>(dy.size()); }

  // Integrated photocurrent Y.
  double integrated() const {
    return std::accumulate(dy.begin(), dy.end(), 0.0);
  }

  // Record with prescribed integrated value Y spread uniformly over the grid.
  // In the steady-state regime the conditional state depends on the record
  // through Y alone, so this stands in for any record with that Y.
  static MeasurementRecord from_integrated(double y_total, double t, int steps) {
    if (steps <= 0 || t <= 0.0)
      throw std::invalid_argument("MeasurementRecord::from_integrated: need steps > 0, t > 0");
    MeasurementRecord r;
    r.dt = t / steps;
    r.dy.assign(static_cast<std::size_t>(steps), y_total / steps);
    return r;
  }
};

}  // namespace catprobe

#endif
