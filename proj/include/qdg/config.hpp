#ifndef QDG_CONFIG_HPP
#define QDG_CONFIG_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qdg/model.hpp"

// Plain-text configuration: `section.key = value` lines with `#` comments.
// Every key has a registered default and can be overridden by a CLI flag of
// the same dotted name; unknown keys are errors.

namespace qdg::config {

struct KeySpec {
  const char* key;
  const char* default_value;
  const char* help;
};

const std::vector<KeySpec>& key_registry();

class Settings {
 public:
  Settings();  // registry defaults

  void load_file(const std::string& path);
  void set(const std::string& key, const std::string& value);
  bool is_known(const std::string& key) const;

  const std::string& raw(const std::string& key) const;
  double number(const std::string& key) const;
  long integer(const std::string& key) const;
  std::uint64_t unsigned64(const std::string& key) const;
  bool flag(const std::string& key) const;
  std::vector<double> number_list(const std::string& key) const;  // comma-separated

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

// Everything a run needs, resolved from settings: physical system (gamma in
// meV, Fock cutoff chosen), derived schedule, and the target phase.
struct RunSetup {
  model::SystemParams sys;
  model::DerivedParams derived;
  double target_phi = 0.0;
  double gamma0 = 0.0;  // reference decay rate in meV
};

RunSetup resolve_setup(const Settings& settings);

// Ordered key/value snapshot of the physical parameters for CSV metadata.
std::vector<std::pair<std::string, std::string>> parameter_snapshot(const Settings& settings,
                                                                    const RunSetup& setup);

}  // namespace qdg::config

#endif  // QDG_CONFIG_HPP
