#include "qiopa/app/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <regex>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qiopa/errors.hpp"
#include "qiopa/io.hpp"

namespace qiopa::app {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Range {
  double lo = -kInf;
  double hi = kInf;
  bool lo_open = false;
  bool hi_open = false;

  bool contains(double v) const {
    if (std::isnan(v)) return false;
    if (lo_open ? !(v > lo) : !(v >= lo)) return false;
    return hi_open ? v < hi : v <= hi;
  }
  std::string text() const {
    return std::string(lo_open ? "(" : "[") + format_double(lo) + ", " + format_double(hi) +
           (hi_open ? ")" : "]");
  }
};

KeySpec real_key(std::string name, std::string help, std::function<double&(RunConfig&)> ref,
                 Range range, bool sweepable = true) {
  KeySpec k;
  k.name = name;
  k.help = std::move(help);
  k.sweepable = sweepable;
  k.real = ref;
  k.set = [name, ref, range](RunConfig& c, const std::string& v) {
    const double x = parse_real(v);
    if (!range.contains(x))
      throw UsageError(name + ": value " + v + " outside " + range.text());
    ref(c) = x;
  };
  k.get = [ref](const RunConfig& c) { return format_double(ref(const_cast<RunConfig&>(c))); };
  return k;
}

long long parse_integer(const std::string& name, const std::string& v) {
  long long x = 0;
  const std::string t = trim(v);
  const auto res = std::from_chars(t.data(), t.data() + t.size(), x);
  if (res.ec != std::errc{} || res.ptr != t.data() + t.size())
    throw UsageError(name + ": expected an integer, got '" + v + "'");
  return x;
}

template <class Int>
KeySpec int_key(std::string name, std::string help, std::function<Int&(RunConfig&)> ref,
                long long lo, long long hi) {
  KeySpec k;
  k.name = name;
  k.help = std::move(help);
  k.set = [name, ref, lo, hi](RunConfig& c, const std::string& v) {
    const long long x = parse_integer(name, v);
    if (x < lo || x > hi)
      throw UsageError(name + ": value " + v + " outside [" + std::to_string(lo) + ", " +
                       std::to_string(hi) + "]");
    ref(c) = static_cast<Int>(x);
  };
  k.get = [ref](const RunConfig& c) {
    return std::to_string(static_cast<long long>(ref(const_cast<RunConfig&>(c))));
  };
  return k;
}

KeySpec choice_key(std::string name, std::string help, std::vector<std::string> choices,
                   std::function<void(RunConfig&, const std::string&)> set,
                   std::function<std::string(const RunConfig&)> get) {
  KeySpec k;
  k.name = name;
  k.help = std::move(help);
  k.set = [name, choices, set](RunConfig& c, const std::string& v) {
    const std::string t = trim(v);
    if (std::find(choices.begin(), choices.end(), t) == choices.end()) {
      std::string list;
      for (const auto& ch : choices) list += (list.empty() ? "" : ", ") + ch;
      throw UsageError(name + ": '" + v + "' is not one of {" + list + "}");
    }
    set(c, t);
  };
  k.get = std::move(get);
  return k;
}

std::vector<KeySpec> build_registry() {
  const Range any;
  const Range nonneg{0.0, kInf};
  const Range positive{0.0, kInf, true};
  const Range unit{0.0, 1.0};
  std::vector<KeySpec> r;

  r.push_back(choice_key(
      "command", "amplify | rates | wigner-slice | scan-x | scan-z | validate",
      {"amplify", "rates", "wigner-slice", "scan-x", "scan-z", "validate"},
      [](RunConfig& c, const std::string& v) { c.command = parse_command(v); },
      [](const RunConfig& c) { return c.command ? std::string(to_string(*c.command)) : ""; }));
  r.push_back(choice_key(
      "input", "injected state: pair (uses phi) or vacuum", {"pair", "vacuum"},
      [](RunConfig& c, const std::string& v) { c.input = v; },
      [](const RunConfig& c) { return c.input; }));
  r.push_back(real_key("phi", "phase of the injected pair (pi = singlet, 0 = triplet)",
                       [](RunConfig& c) -> double& { return c.phi; }, any));
  r.push_back(int_key<std::int64_t>("seed", "seed for randomized sampling",
                                    [](RunConfig& c) -> std::int64_t& { return c.seed; }, 0,
                                    (1LL << 53)));
  r.push_back(choice_key(
      "format", "csv | json", {"csv", "json"},
      [](RunConfig& c, const std::string& v) {
        c.format = v == "json" ? OutputFormat::Json : OutputFormat::Csv;
      },
      [](const RunConfig& c) { return std::string(c.format == OutputFormat::Json ? "json" : "csv"); }));

  r.push_back(real_key("opa.g", "amplifier gain g",
                       [](RunConfig& c) -> double& { return c.opa.g; }, Range{0.0, 3.0}));
  r.push_back(real_key("opa.psi", "phase of amplifier B",
                       [](RunConfig& c) -> double& { return c.opa.psi; }, any));
  r.push_back(real_key("opa.eta", "gain ratio g / g'",
                       [](RunConfig& c) -> double& { return c.opa.eta; }, positive));
  r.push_back(int_key<int>("opa.cutoff", "per-mode photon cutoff",
                           [](RunConfig& c) -> int& { return c.opa.cutoff; }, 1, kDefaultMaxCutoff));

  r.push_back(real_key("neif.delta1", "birefringent phase of beam 1",
                       [](RunConfig& c) -> double& { return c.neif.delta1; }, any));
  r.push_back(real_key("neif.delta2", "birefringent phase of beam 2",
                       [](RunConfig& c) -> double& { return c.neif.delta2; }, any));
  r.push_back(real_key("neif.theta1", "rotator angle of beam 1",
                       [](RunConfig& c) -> double& { return c.neif.theta1; }, any));
  r.push_back(real_key("neif.theta2", "rotator angle of beam 2",
                       [](RunConfig& c) -> double& { return c.neif.theta2; }, any));
  r.push_back(real_key("neif.bs_transmittance", "beam-splitter transmittance",
                       [](RunConfig& c) -> double& { return c.neif.bs_transmittance; }, unit));
  r.push_back(choice_key(
      "neif.xor_veto", "port-1 veto of the triple coincidence: d1v | d1h | both",
      {"d1v", "d1h", "both"},
      [](RunConfig& c, const std::string& v) {
        c.xor_veto = v == "d1h" ? XorVeto::D1h : v == "both" ? XorVeto::Both : XorVeto::D1v;
      },
      [](const RunConfig& c) { return std::string(to_string(c.xor_veto)); }));

  r.push_back(real_key("temporal.lambda", "signal wavelength (nm)",
                       [](RunConfig& c) -> double& { return c.temporal.lambda; }, positive));
  r.push_back(real_key("temporal.lambda_p", "pump wavelength (nm)",
                       [](RunConfig& c) -> double& { return c.temporal.lambda_p; }, positive));
  r.push_back(real_key("temporal.delta_lambda", "filter passband FWHM (nm)",
                       [](RunConfig& c) -> double& { return c.temporal.delta_lambda; }, positive));
  r.push_back(real_key("temporal.pump_coherence", "pump coherence time (fs)",
                       [](RunConfig& c) -> double& { return c.temporal.pump_coherence; }, positive));
  r.push_back(real_key("temporal.visibility", "contrast of the x-scan dip/peak",
                       [](RunConfig& c) -> double& { return c.temporal.visibility; }, unit));
  r.push_back(real_key("temporal.fringe_visibility", "contrast of the z-scan fringe",
                       [](RunConfig& c) -> double& { return c.temporal.fringe_visibility; }, unit));
  r.push_back(real_key("temporal.filter_constant", "k in tau_c = k lambda^2 / (c dlambda)",
                       [](RunConfig& c) -> double& { return c.temporal.filter_constant; }, positive));

  r.push_back(real_key("scan.range", "scan half-width in um of optical path (0 = automatic)",
                       [](RunConfig& c) -> double& { return c.scan_range; }, nonneg, false));
  r.push_back(int_key<int>("scan.points", "number of scan positions",
                           [](RunConfig& c) -> int& { return c.scan_points; }, 2, 1000000));

  r.push_back(choice_key(
      "wigner.plane", "coordinate spanned by the slice", {"alpha1", "alpha2", "beta1", "beta2"},
      [](RunConfig& c, const std::string& v) { c.wigner_plane = v; },
      [](const RunConfig& c) { return c.wigner_plane; }));
  r.push_back(real_key("wigner.extent", "slice half-width / sampling radius",
                       [](RunConfig& c) -> double& { return c.wigner_extent; },
                       Range{0.0, 20.0, true}, false));
  r.push_back(int_key<int>("wigner.points", "grid points per axis",
                           [](RunConfig& c) -> int& { return c.wigner_points; }, 2, 2001));
  r.push_back(int_key<int>("wigner.samples", "random points instead of a grid (0 = grid)",
                           [](RunConfig& c) -> int& { return c.wigner_samples; }, 0, 1000000));
  r.push_back(choice_key(
      "wigner.numeric", "also evaluate the displaced-parity oracle: 0 | 1", {"0", "1"},
      [](RunConfig& c, const std::string& v) { c.wigner_numeric = v == "1"; },
      [](const RunConfig& c) { return std::string(c.wigner_numeric ? "1" : "0"); }));

  auto sweep_ref = [](RunConfig& c) -> Sweep& {
    if (!c.sweep) c.sweep = Sweep{};
    return *c.sweep;
  };
  {
    KeySpec k;
    k.name = "sweep.param";
    k.help = "real-valued key to sweep (empty = no sweep)";
    k.set = [sweep_ref](RunConfig& c, const std::string& v) {
      const std::string t = trim(v);
      if (t.empty()) {
        c.sweep.reset();
        return;
      }
      const KeySpec* target = find_key(t);
      if (target == nullptr || !target->sweepable)
        throw UsageError("sweep.param: '" + t + "' is not a real-valued configuration key");
      sweep_ref(c).param = t;
    };
    k.get = [](const RunConfig& c) { return c.sweep ? c.sweep->param : std::string(); };
    r.push_back(k);
  }
  for (const char* which : {"sweep.start", "sweep.stop"}) {
    const bool start = std::string(which) == "sweep.start";
    KeySpec k;
    k.name = which;
    k.help = start ? "first sweep value" : "last sweep value";
    k.set = [sweep_ref, start](RunConfig& c, const std::string& v) {
      const double x = parse_real(v);
      (start ? sweep_ref(c).start : sweep_ref(c).stop) = x;
    };
    k.get = [start](const RunConfig& c) {
      const Sweep s = c.sweep.value_or(Sweep{});
      return format_double(start ? s.start : s.stop);
    };
    r.push_back(k);
  }
  {
    KeySpec k;
    k.name = "sweep.steps";
    k.help = "number of sweep points (>= 2)";
    k.set = [sweep_ref](RunConfig& c, const std::string& v) {
      const long long x = parse_integer("sweep.steps", v);
      if (x < 2 || x > 100000) throw UsageError("sweep.steps: value " + v + " outside [2, 100000]");
      sweep_ref(c).steps = static_cast<int>(x);
    };
    k.get = [](const RunConfig& c) { return std::to_string(c.sweep.value_or(Sweep{}).steps); };
    r.push_back(k);
  }
  return r;
}

}  // namespace

const char* to_string(Command c) {
  switch (c) {
    case Command::Amplify: return "amplify";
    case Command::Rates: return "rates";
    case Command::WignerSlice: return "wigner-slice";
    case Command::ScanX: return "scan-x";
    case Command::ScanZ: return "scan-z";
    case Command::Validate: return "validate";
  }
  return "?";
}

std::optional<Command> parse_command(const std::string& s) {
  for (Command c : {Command::Amplify, Command::Rates, Command::WignerSlice, Command::ScanX,
                    Command::ScanZ, Command::Validate})
    if (s == to_string(c)) return c;
  return std::nullopt;
}

double Sweep::value(int i) const {
  return start + (stop - start) * static_cast<double>(i) / static_cast<double>(steps - 1);
}

const std::vector<KeySpec>& key_registry() {
  static const std::vector<KeySpec> registry = build_registry();
  return registry;
}

const KeySpec* find_key(const std::string& name) {
  for (const auto& k : key_registry())
    if (k.name == name) return &k;
  return nullptr;
}

double parse_real(const std::string& text) {
  const std::string t = trim(text);
  static const std::regex pi_form(R"(^([+-]?)(\d*\.?\d*)\*?pi(?:/(\d*\.?\d+))?$)");
  std::smatch m;
  if (std::regex_match(t, m, pi_form)) {
    double coef = 1.0;
    if (m[2].length() > 0) coef = std::stod(m[2].str());
    double div = 1.0;
    if (m[3].matched) div = std::stod(m[3].str());
    if (div == 0.0) throw UsageError("division by zero in '" + text + "'");
    return (m[1].str() == "-" ? -1.0 : 1.0) * coef * kPi / div;
  }
  double v = 0.0;
  const char* first = t.data();
  if (!t.empty() && t[0] == '+') ++first;
  const auto res = std::from_chars(first, t.data() + t.size(), v);
  if (t.empty() || res.ec != std::errc{} || res.ptr != t.data() + t.size() || !std::isfinite(v))
    throw UsageError("expected a real number, got '" + text + "'");
  return v;
}

std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open configuration file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  std::vector<std::pair<std::string, std::string>> out;

  if (const auto first = text.find_first_not_of(" \t\r\n");
      first != std::string::npos && text[first] == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw UsageError(path + ": " + e.what());
    }
    if (!j.contains("config") || !j["config"].is_object())
      throw UsageError(path + ": JSON file has no \"config\" object");
    for (const auto& [k, v] : j["config"].items())
      out.emplace_back(k, v.is_string() ? v.get<std::string>() : v.dump());
    return out;
  }

  const bool artifact = text.find("#@") != std::string::npos;
  std::istringstream lines(text);
  std::string line;
  int lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.rfind("#@", 0) == 0) {
      t = trim(t.substr(2));
    } else if (t.empty() || t[0] == '#' || artifact) {
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw UsageError(path + ":" + std::to_string(lineno) + ": expected 'key = value'");
    out.emplace_back(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
  return out;
}

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value) {
  const KeySpec* spec = find_key(key);
  if (spec == nullptr) throw UsageError("unknown key '" + key + "'");
  try {
    spec->set(cfg, value);
  } catch (const UsageError& e) {
    const std::string msg = e.what();
    if (msg.rfind(key + ":", 0) == 0) throw;
    throw UsageError(key + ": " + msg);
  }
}

void check_config(const RunConfig& cfg) {
  if (!cfg.command) throw UsageError("missing command");
  if (cfg.sweep) {
    if (cfg.sweep->param.empty()) throw UsageError("sweep.param: sweep settings given without a parameter");
    if (*cfg.command != Command::Rates && *cfg.command != Command::Amplify)
      throw UsageError("sweep.param: sweeps are supported by the rates and amplify commands");
  }
  try {
    cfg.opa.validate();
    cfg.neif.validate();
    cfg.temporal.validate();
  } catch (const ContractError& e) {
    throw UsageError(e.what());
  }
}

RunConfig parse_config(int argc, const char* const* argv) {
  CLI::App app("qiopa");
  app.set_help_flag();
  app.allow_extras(false);
  std::string command_word;
  std::string config_path;
  app.add_option("verb", command_word, "command to run");
  app.add_option("--config", config_path);
  std::string output_value;
  app.add_option("--output,-o", output_value);
  std::map<std::string, std::string> flag_values;
  std::vector<std::pair<std::string, CLI::Option*>> flags;
  for (const auto& k : key_registry())
    flags.emplace_back(k.name, app.add_option("--" + k.name, flag_values[k.name]));

  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg.rfind("--", 0) != 0) continue;
    const std::string key = arg.substr(2, arg.find('=') == std::string::npos ? std::string::npos : arg.find('=') - 2);
    if (key != "config" && key != "output" && find_key(key) == nullptr)
      throw UsageError("unknown key '" + key + "'");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  RunConfig cfg;
  if (!config_path.empty())
    for (const auto& [k, v] : read_config_file(config_path)) apply_setting(cfg, k, v);
  if (!command_word.empty()) apply_setting(cfg, "command", command_word);
  for (const auto& [name, opt] : flags)
    if (opt->count() > 0) apply_setting(cfg, name, flag_values[name]);
  if (!output_value.empty()) cfg.output = output_value;
  check_config(cfg);
  return cfg;
}

std::vector<std::pair<std::string, std::string>> config_entries(const RunConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& k : key_registry()) {
    if (k.name.rfind("sweep.", 0) == 0 && !cfg.sweep) continue;
    out.emplace_back(k.name, k.get(cfg));
  }
  return out;
}

std::string usage_text() {
  std::ostringstream os;
  os << "usage: qiopa <command> [--config FILE] [--output PATH] [--key value ...]\n\n"
        "commands: amplify, rates, wigner-slice, scan-x, scan-z, validate\n\n"
        "keys (also accepted as 'key = value' lines in a configuration file):\n";
  for (const auto& k : key_registry()) os << "  --" << k.name << "\n      " << k.help << '\n';
  os << "\nAngles accept multiples of pi (pi, -pi/4, 3pi/2). Output goes to PATH, to\n"
        "stdout for '-', or to <command>.<format> in $"
     << kOutputDirEnv << " (default: current directory).\n";
  return os.str();
}

}  // namespace qiopa::app
