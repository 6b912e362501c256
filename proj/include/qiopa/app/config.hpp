#ifndef QIOPA_APP_CONFIG_HPP
#define QIOPA_APP_CONFIG_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qiopa/neif.hpp"
#include "qiopa/opa.hpp"
#include "qiopa/temporal.hpp"

namespace qiopa::app {

/// Bad command line or configuration file; maps to exit status 1.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitNumerical = 2;

/// Environment variable naming the default output directory.
inline constexpr const char* kOutputDirEnv = "QIOPA_OUTPUT_DIR";

enum class Command { Amplify, Rates, WignerSlice, ScanX, ScanZ, Validate };
enum class OutputFormat { Csv, Json };

const char* to_string(Command c);
std::optional<Command> parse_command(const std::string& s);

struct Sweep {
  std::string param;
  double start = 0.0;
  double stop = 1.0;
  int steps = 11;

  double value(int i) const;
};

struct RunConfig {
  std::optional<Command> command;
  OpaParams opa;
  NeifConfig neif;
  TemporalParams temporal;
  double phi = kPi;
  /// "pair" injects pair_state(phi); "vacuum" runs the bare amplifier.
  std::string input = "pair";
  XorVeto xor_veto = XorVeto::D1v;
  std::optional<Sweep> sweep;
  std::string output;
  OutputFormat format = OutputFormat::Csv;
  std::int64_t seed = 0;

  /// Half-width of the x or z scan in um of optical path; 0 picks three
  /// envelope widths.
  double scan_range = 0.0;
  int scan_points = 401;

  /// Coordinate whose real and imaginary parts span the Wigner slice.
  std::string wigner_plane = "alpha1";
  double wigner_extent = 2.0;
  int wigner_points = 41;
  /// When > 0, evaluate at this many seeded random points instead of a grid.
  int wigner_samples = 0;
  /// Also evaluate the displaced-parity oracle (slow).
  bool wigner_numeric = false;
};

/// One configurable key. Every key is accepted both as a --flag and as a line
/// of a configuration file.
struct KeySpec {
  std::string name;
  std::string help;
  /// Real-valued keys can be swept.
  bool sweepable = false;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
  std::function<double&(RunConfig&)> real;
};

const std::vector<KeySpec>& key_registry();
const KeySpec* find_key(const std::string& name);

/// Real number or a multiple of pi: "0.5", "pi", "-pi/4", "3pi/2", "0.5*pi".
double parse_real(const std::string& text);

/// key -> value pairs from a configuration file. Blank lines and "#" comments
/// are skipped and "#@ key = value" lines are read as settings. A file with any
/// "#@" line is an emitted artifact and its data lines are ignored; otherwise
/// every line must be "key = value". A file starting with '{' is read as
/// emitted JSON and its "config" object is used.
std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path);

/// Applies one setting; UsageError naming the key when the key is unknown or
/// the value malformed or out of range.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);

/// Cross-field checks (sweep target, command present, nested validate()).
void check_config(const RunConfig& cfg);

/// Parses argv: an optional command word, --config FILE, and --key value /
/// --key=value for every registry key. File settings are applied first and
/// flags override them.
RunConfig parse_config(int argc, const char* const* argv);

/// The full effective configuration as (key, value) in registry order; the
/// output location is not part of it.
std::vector<std::pair<std::string, std::string>> config_entries(const RunConfig& cfg);

std::string usage_text();

}  // namespace qiopa::app

#endif  // QIOPA_APP_CONFIG_HPP
