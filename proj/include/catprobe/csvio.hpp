#ifndef CATPROBE_CSVIO_HPP
#define CATPROBE_CSVIO_HPP

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "catprobe/params.hpp"

namespace catprobe {

// CSV writer with a fixed number format so identical runs produce
// byte-identical files.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& columns)
      : out_(path), ncols_(columns.size()), path_(path.string()) {
    if (!out_) throw std::runtime_error("cannot open " + path.string());
    for (std::size_t i = 0; i < columns.size(); ++i)
      out_ << (i ? "," : "") << columns[i];
    out_ << "\n";
  }

  void row(const std::vector<double>& values) {
    if (values.size() != ncols_)
      throw std::invalid_argument("CsvWriter: column count mismatch in " + path_);
    char buf[40];
    for (std::size_t i = 0; i < values.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g", values[i]);
      out_ << (i ? "," : "") << buf;
    }
    out_ << "\n";
    ++rows_;
  }

  std::size_t rows() const { return rows_; }

 private:
  std::ofstream out_;
  std::size_t ncols_;
  std::string path_;
  std::size_t rows_ = 0;
};

inline nlohmann::json params_to_json(const PhysicalParams& p) {
  nlohmann::json j;
  j["g"] = p.g;
  j["delta"] = p.delta;
  j["kappa1"] = p.kappa1;
  j["kappa_loss1"] = p.kappa_loss1;
  j["kappa2"] = p.kappa2;
  j["kappa_loss2"] = p.kappa_loss2;
  j["beta_re"] = p.beta.real();
  j["beta_im"] = p.beta.imag();
  j["epsilon_re"] = p.epsilon.real();
  j["epsilon_im"] = p.epsilon.imag();
  j["eta"] = p.eta;
  j["phi"] = p.phi;
  j["gamma_sp"] = p.gamma_sp;
  j["big_j"] = p.big_j;
  j["derived"] = {{"kappa", p.kappa()},
                  {"kappa_c", p.kappa_c()},
                  {"g_tilde", p.g_tilde()},
                  {"drive_ratio", p.drive_ratio()}};
  return j;
}

// Every emitted artifact gets a JSON sidecar carrying full parameter and seed
// provenance, enough to re-run the job exactly.
inline void write_sidecar(const std::filesystem::path& path, const nlohmann::json& body) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << body.dump(2) << "\n";
}

}  // namespace catprobe

#endif
