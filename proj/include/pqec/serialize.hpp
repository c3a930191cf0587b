// JSON serialization for channels and study results.
//
// Channel schema: {"dim_in", "dim_out", "representation", <payload>} with
// representation one of "kraus" | "choi" | "ptm".  Matrix entries are flat
// row-major arrays; complex matrices carry parallel "real" and "imag" arrays.
#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pqec/channel.hpp"
#include "pqec/compiler.hpp"
#include "pqec/errors.hpp"
#include "pqec/logical_channel.hpp"
#include "pqec/numerics.hpp"

namespace pqec::serialize {

using json = nlohmann::json;

inline json matrix_to_json(const Mat& m) {
  std::vector<double> re, im;
  re.reserve(m.size());
  im.reserve(m.size());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      re.push_back(m(i, j).real());
      im.push_back(m(i, j).imag());
    }
  return json{{"real", re}, {"imag", im}};
}

inline Mat matrix_from_json(const json& j, Eigen::Index rows, Eigen::Index cols) {
  const auto& re = j.at("real");
  const auto& im = j.at("imag");
  if (static_cast<Eigen::Index>(re.size()) != rows * cols ||
      static_cast<Eigen::Index>(im.size()) != rows * cols)
    throw config_error("matrix_from_json: entry count mismatch");
  Mat m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j2 = 0; j2 < cols; ++j2)
      m(i, j2) = cxd(re[i * cols + j2].get<double>(), im[i * cols + j2].get<double>());
  return m;
}

inline json channel_to_json(const Channel& c) {
  json j{{"dim_in", c.dim_in()}, {"dim_out", c.dim_out()}};
  if (c.holds_kraus()) {
    j["representation"] = "kraus";
    const auto& ops = std::get<KrausSet>(c.representation()).ops;
    json arr = json::array();
    for (const Mat& k : ops) arr.push_back(matrix_to_json(k));
    j["kraus"] = {{"count", ops.size()}, {"operators", arr}};
  } else if (c.holds_choi()) {
    j["representation"] = "choi";
    j["choi"] = matrix_to_json(c.choi());
  } else {
    j["representation"] = "ptm";
    const RMat r = c.ptm();
    std::vector<double> entries;
    entries.reserve(r.size());
    for (Eigen::Index a = 0; a < r.rows(); ++a)
      for (Eigen::Index b = 0; b < r.cols(); ++b) entries.push_back(r(a, b));
    j["ptm"] = {{"entries", entries}};
  }
  return j;
}

// raw (unvalidated) load, so a checker can report violations instead of
// refusing to parse
struct RawChannel {
  Eigen::Index dim_in = 0, dim_out = 0;
  std::string representation;
  std::vector<Mat> kraus;
  Mat choi;
  RMat ptm;

  Mat to_choi() const {
    if (representation == "kraus") {
      KrausSet ks{kraus};
      return ks.choi();
    }
    if (representation == "choi") return choi;
    int n = 0;
    while ((Eigen::Index(1) << n) < dim_in) ++n;
    return Channel::ptm_to_choi(ptm, n);
  }
};

inline RawChannel raw_channel_from_json(const json& j) {
  RawChannel raw;
  raw.dim_in = j.at("dim_in").get<Eigen::Index>();
  raw.dim_out = j.at("dim_out").get<Eigen::Index>();
  raw.representation = j.at("representation").get<std::string>();
  if (raw.dim_in < 1 || raw.dim_out < 1) throw config_error("channel: bad dimensions");
  if (raw.representation == "kraus") {
    for (const auto& op : j.at("kraus").at("operators"))
      raw.kraus.push_back(matrix_from_json(op, raw.dim_out, raw.dim_in));
    if (raw.kraus.empty()) throw config_error("channel: empty Kraus set");
  } else if (raw.representation == "choi") {
    raw.choi = matrix_from_json(j.at("choi"), raw.dim_in * raw.dim_out,
                                raw.dim_in * raw.dim_out);
  } else if (raw.representation == "ptm") {
    const auto& entries = j.at("ptm").at("entries");
    const Eigen::Index side = raw.dim_in * raw.dim_in;
    if (static_cast<Eigen::Index>(entries.size()) != side * side)
      throw config_error("channel: PTM entry count mismatch");
    raw.ptm.resize(side, side);
    for (Eigen::Index a = 0; a < side; ++a)
      for (Eigen::Index b = 0; b < side; ++b) raw.ptm(a, b) = entries[a * side + b].get<double>();
  } else {
    throw config_error("channel: unknown representation '" + raw.representation + "'");
  }
  return raw;
}

inline Channel channel_from_json(const json& j) {
  const RawChannel raw = raw_channel_from_json(j);
  if (raw.representation == "kraus") return Channel::from_kraus(raw.kraus, 1e-8);
  if (raw.representation == "choi")
    return Channel::from_choi(raw.choi, raw.dim_in, raw.dim_out, kCpEigTol, 1e-8);
  return Channel::from_ptm(raw.ptm, 1e-8);
}

inline json noise_to_json(const NoiseModel& n) {
  return json{{"kind", to_string(n.kind)},
              {"p_phys", n.p_phys},
              {"mismatch_factor", n.mismatch_factor}};
}

inline json logical_round_to_json(const LogicalRoundChannel& ch) {
  json probs, sems;
  for (int a = 0; a < 4; ++a) {
    probs[pauli_label(a, 1)] = ch.pauli_probs.probs()[a];
    sems[pauli_label(a, 1)] = ch.standard_errors[a];
  }
  json j{{"distance", ch.distance},
         {"noise", noise_to_json(ch.noise)},
         {"policy", ch.policy},
         {"pauli_probs", probs},
         {"standard_errors", sems}};
  if (ch.method.kind == EstimationMethod::Kind::exact_enumeration) {
    j["method"] = "exact";
  } else {
    j["method"] = "monte_carlo";
    j["samples"] = ch.method.samples;
    j["seed"] = ch.method.seed;
  }
  return j;
}

inline json fit_result_to_json(const FitResult& fit,
                               const std::vector<std::string>& labels = {}) {
  json j{{"weights", fit.weights.weights()},
         {"residual", fit.residual},
         {"fw_gap", fit.fw_gap},
         {"iterations", fit.iterations},
         {"converged", fit.converged}};
  std::vector<std::size_t> support = fit.weights.support();
  j["support"] = support;
  if (!labels.empty()) j["labels"] = labels;
  return j;
}

inline json compiled_step_to_json(const CompiledStep& step, std::uint64_t seed = 0) {
  return json{{"strategy", to_string(step.strategy)},
              {"fit", fit_result_to_json(step.fit, step.library.labels)},
              {"assembled_choi", matrix_to_json(step.assembled.choi())},
              {"baseline", channel_to_json(step.baseline)},
              {"coherent", channel_to_json(step.coherent)},
              {"seed", seed}};
}

inline void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw config_error("cannot open for writing: " + path);
  out << j.dump(2) << "\n";
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw config_error("malformed JSON in " + path + ": " + e.what());
  }
  return j;
}

}  // namespace pqec::serialize
