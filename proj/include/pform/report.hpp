#pragma once

#include <string>

#include <json.hpp>

namespace pform::report {

inline constexpr const char* kSchema = "pform-report/1";
inline constexpr const char* kVersion = "1.0.0";

enum class LogLevel { Quiet, Info, Debug };

/** PFORM_LOG in {quiet, info, debug}; defaults to info. */
LogLevel log_level();
void log_info(const std::string& msg);
void log_debug(const std::string& msg);

/**
 * Run report: verb, parameter echo, result rows with tolerances and pass
 * flags.  Serialised as a single JSON document per run; files are opened in
 * append mode (one document per line).
 */
struct Report {
  std::string verb;
  nlohmann::json params = nlohmann::json::object();
  nlohmann::json results = nlohmann::json::array();
  uint64_t seed = 0;

  void add_check(const std::string& name, double value, double tolerance, bool pass);
  void add_exact(const std::string& name, bool exact_zero, const std::string& witness = "");
  void add_value(const std::string& name, const nlohmann::json& value);
  bool all_passed() const;

  /** Body without the timestamp: byte-identical across identical runs. */
  nlohmann::json body() const;
  /** Full document, timestamp included. */
  nlohmann::json document() const;
  /** Appends document() as one line to `path`; no-op when path is empty. */
  void append_to(const std::string& path) const;
};

}  // namespace pform::report
