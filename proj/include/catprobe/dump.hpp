#ifndef CATPROBE_DUMP_HPP
#define CATPROBE_DUMP_HPP

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "catprobe/csvio.hpp"
#include "catprobe/gaussian.hpp"

namespace catprobe {

// Full-state dump of a Gaussian ensemble: versioned structured-text container
// with every component's covariance, mean, and log-weight plus the record, so
// a run can be inspected or replayed offline.
inline void write_ensemble_dump(const GaussianEnsemble& ens,
                                const std::filesystem::path& path) {
  nlohmann::json j;
  j["format"] = "catprobe-ensemble";
  j["version"] = 1;
  j["params"] = params_to_json(ens.params());
  j["time"] = ens.time();
  j["step_index"] = ens.step_index();
  j["folded"] = ens.folded();
  j["record"] = {{"dt", ens.record().dt},
                 {"dy", ens.record().dy},
                 {"dw", ens.record().dw},
                 {"rng_seed", ens.record().rng_seed}};
  nlohmann::json comps = nlohmann::json::array();
  for (const auto& c : ens.components()) {
    nlohmann::json jc;
    jc["n"] = c.n;
    jc["m"] = c.m;
    jc["log_weight"] = {c.log_weight.real(), c.log_weight.imag()};
    std::vector<double> yb;
    for (int a = 0; a < 4; ++a) {
      yb.push_back(c.ybar(a).real());
      yb.push_back(c.ybar(a).imag());
    }
    jc["ybar"] = yb;
    std::vector<double> v;
    for (int r = 0; r < 4; ++r)
      for (int cc = 0; cc < 4; ++cc) {
        v.push_back(c.v(r, cc).real());
        v.push_back(c.v(r, cc).imag());
      }
    jc["v"] = v;
    comps.push_back(std::move(jc));
  }
  j["components"] = std::move(comps);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << j.dump() << "\n";
}

}  // namespace catprobe

#endif
