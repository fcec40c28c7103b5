#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace nfr::app {

/// One JSON-lines record per command run.
struct RunReport {
  std::string command;
  std::vector<std::string> argv;
  nlohmann::ordered_json parameters = nlohmann::ordered_json::object();
  int iterations = 0;
  std::string stop_reason;
  std::vector<double> j_trace;
  std::map<std::string, double> timings_ms;
  std::uint64_t kernel_evaluations = 0;
  std::vector<std::string> outputs;

  nlohmann::ordered_json to_json() const;
  std::string to_line() const { return to_json().dump() + '\n'; }
};

/// Accumulates wall time per named phase into a report.
class PhaseTimer {
public:
  PhaseTimer(RunReport& report, std::string phase)
      : report_(report), phase_(std::move(phase)), start_(std::chrono::steady_clock::now()) {}
  ~PhaseTimer() {
    const auto elapsed = std::chrono::steady_clock::now() - start_;
    report_.timings_ms[phase_] += std::chrono::duration<double, std::milli>(elapsed).count();
  }
  PhaseTimer(const PhaseTimer&) = delete;
  PhaseTimer& operator=(const PhaseTimer&) = delete;

private:
  RunReport& report_;
  std::string phase_;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace nfr::app
