#pragma once

// JSON schedules and CSV exports.

#include "geoq/engine.hpp"
#include "geoq/schedule.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <ostream>
#include <string>

namespace geoq {

inline nlohmann::json to_json(const Schedule& s) {
  nlohmann::json segments = nlohmann::json::array();
  for (const auto& seg : s.segments) {
    segments.push_back({{"duration", seg.duration},
                        {"rabi", seg.rabi},
                        {"phase", seg.phase},
                        {"detuning", seg.detuning}});
  }
  return {{"scheme", to_string(s.scheme)},
          {"gate", {{"theta", s.gate.theta}, {"phi", s.gate.phi}, {"gamma", s.gate.gamma}}},
          {"segments", segments},
          {"error", {{"epsilon", s.error.epsilon}, {"delta", s.error.delta}}}};
}

inline Schedule schedule_from_json(const nlohmann::json& j) {
  try {
    Schedule s;
    s.scheme = parse_scheme(j.at("scheme").get<std::string>());
    const auto& g = j.at("gate");
    s.gate = GateParams::make(g.at("theta").get<double>(), g.at("phi").get<double>(),
                              g.at("gamma").get<double>());
    for (const auto& seg : j.at("segments")) {
      PulseSegment p{seg.at("duration").get<double>(), seg.at("rabi").get<double>(),
                     seg.at("phase").get<double>(), seg.at("detuning").get<double>()};
      if (!(p.duration >= 0.0)) throw ValidationError("segment duration must be non-negative");
      s.segments.push_back(p);
    }
    if (j.contains("error")) {
      s.error.epsilon = j["error"].value("epsilon", 0.0);
      s.error.delta = j["error"].value("delta", 0.0);
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed schedule JSON: ") + e.what());
  }
}

/// `time,pop_0,...,pop_{d-1},state_fidelity`, one row per sample.
inline void write_trajectory_csv(std::ostream& out, const std::vector<TrajectorySample>& traj) {
  const std::size_t dim = traj.empty() ? 0 : traj.front().populations.size();
  out << "time";
  for (std::size_t i = 0; i < dim; ++i) out << ",pop_" << i;
  out << ",state_fidelity\n";
  for (const auto& s : traj) {
    out << fmt::format("{}", s.time);
    for (double p : s.populations) out << fmt::format(",{}", p);
    out << fmt::format(",{}\n", s.state_fidelity);
  }
}

}  // namespace geoq
