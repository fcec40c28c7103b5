#include "app/report.hpp"

namespace nfr::app {

nlohmann::ordered_json RunReport::to_json() const {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["argv"] = argv;
  j["parameters"] = parameters;
  j["iterations"] = iterations;
  j["stop_reason"] = stop_reason;
  j["j_trace"] = j_trace;
  j["timings_ms"] = timings_ms;
  j["kernel_evaluations"] = kernel_evaluations;
  j["outputs"] = outputs;
  return j;
}

}  // namespace nfr::app
