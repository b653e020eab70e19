#include "pform/report.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <stdexcept>

namespace pform::report {

LogLevel log_level() {
  const char* env = std::getenv("PFORM_LOG");
  if (!env) return LogLevel::Info;
  std::string v(env);
  if (v == "quiet") return LogLevel::Quiet;
  if (v == "debug") return LogLevel::Debug;
  if (v == "info") return LogLevel::Info;
  return LogLevel::Info;
}

void log_info(const std::string& msg) {
  if (log_level() != LogLevel::Quiet) std::cerr << "[pform] " << msg << "\n";
}

void log_debug(const std::string& msg) {
  if (log_level() == LogLevel::Debug) std::cerr << "[pform:debug] " << msg << "\n";
}

void Report::add_check(const std::string& name, double value, double tolerance, bool pass) {
  results.push_back(
      {{"name", name}, {"value", value}, {"tolerance", tolerance}, {"pass", pass}});
}

void Report::add_exact(const std::string& name, bool exact_zero, const std::string& witness) {
  nlohmann::json row = {{"identity", name},
                        {"status", exact_zero ? "exact-zero" : "failed"},
                        {"pass", exact_zero}};
  if (!witness.empty()) row["witness"] = witness;
  results.push_back(row);
}

void Report::add_value(const std::string& name, const nlohmann::json& value) {
  results.push_back({{"name", name}, {"value", value}, {"pass", true}});
}

bool Report::all_passed() const {
  for (const auto& r : results)
    if (r.contains("pass") && !r["pass"].get<bool>()) return false;
  return true;
}

nlohmann::json Report::body() const {
  return {{"schema", kSchema}, {"artifact_version", kVersion}, {"verb", verb},
          {"params", params},  {"seed", seed},                 {"results", results},
          {"pass", all_passed()}};
}

nlohmann::json Report::document() const {
  nlohmann::json doc = body();
  auto now = std::chrono::system_clock::now().time_since_epoch();
  doc["timestamp_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(now).count();
  return doc;
}

void Report::append_to(const std::string& path) const {
  if (path.empty()) return;
  std::ofstream f(path, std::ios::app);
  if (!f) throw std::runtime_error("cannot open report file: " + path);
  f << document().dump() << "\n";
}

}  // namespace pform::report
