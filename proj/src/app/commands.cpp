#include "qiopa/app/commands.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include "qiopa/app/acceptance.hpp"
#include "qiopa/errors.hpp"
#include "qiopa/neif.hpp"
#include "qiopa/opa.hpp"
#include "qiopa/temporal.hpp"
#include "qiopa/wigner.hpp"

namespace qiopa::app {

namespace {

double parity_code(SwapParity p) {
  switch (p) {
    case SwapParity::Even: return 1.0;
    case SwapParity::Odd: return -1.0;
    case SwapParity::Mixed: return 0.0;
  }
  return 0.0;
}

bool pair_input(const RunConfig& cfg) { return cfg.input == "pair"; }

StateVector closed_form_output(const RunConfig& cfg, const BasisPtr& basis) {
  if (pair_input(cfg)) return cat_output_closed_form(cfg.phi, cfg.opa, basis).state;
  return squeezed_vacuum_closed_form(cfg.opa, basis);
}

double extra_pairs(const RunConfig& cfg, const StateVector& out) {
  return (out.mean_total() - (pair_input(cfg) ? 2.0 : 0.0)) / 2.0;
}

std::vector<RunConfig> sweep_points(const RunConfig& cfg) {
  std::vector<RunConfig> pts;
  const Sweep& sw = *cfg.sweep;
  const KeySpec* key = find_key(sw.param);
  for (int i = 0; i < sw.steps; ++i) {
    RunConfig c = cfg;
    c.sweep.reset();
    key->real(c) = sw.value(i);
    check_config(c);
    pts.push_back(std::move(c));
  }
  return pts;
}

const std::vector<std::string> kRateColumns = {
    "phi",           "g",
    "d1h_d2v",       "d1v_d2h",
    "d1h_d1v",       "d2h_d2v",
    "d1h_d2h",       "d1v_d2v",
    "d1h_d2v_distinguishable",
    "d1h_d2v_closed_form",
    "d1h_d2v_closed_form_corrected",
    "noise_d2h_d2v", "noise_closed_form",
    "xor_signal",    "xor_noise",
    "extra_pairs"};

std::vector<double> rates_row(const RunConfig& cfg) {
  const BasisPtr basis = make_basis(cfg.opa.cutoff);
  const StateVector out = evolve(input_state(cfg), cfg.opa);
  const StateVector noise = evolve(StateVector::vacuum(basis), cfg.opa);
  const auto& n = cfg.neif;
  using D = Detector;
  const double S = cfg.opa.S();
  return {cfg.phi,
          cfg.opa.g,
          double_coincidence(out, n, {D::D1h, D::D2v}),
          double_coincidence(out, n, {D::D1v, D::D2h}),
          double_coincidence(out, n, {D::D1h, D::D1v}),
          double_coincidence(out, n, {D::D2h, D::D2v}),
          double_coincidence(out, n, {D::D1h, D::D2h}),
          double_coincidence(out, n, {D::D1v, D::D2v}),
          double_coincidence_distinguishable(out, n, {D::D1h, D::D2v}),
          rate_closed_form(cfg.phi, n, S, RateForm::AsPrinted),
          rate_closed_form(cfg.phi, n, S, RateForm::Corrected),
          double_coincidence(noise, n, {D::D2h, D::D2v}),
          noise_rate_closed_form(n, S),
          xor_suppressed_rate(out, n, cfg.xor_veto),
          xor_suppressed_rate(noise, n, cfg.xor_veto),
          extra_pairs(cfg, out)};
}

PhasePoint plane_point(const std::string& plane, cplx z) {
  std::array<cplx, 4> c{};
  const std::array<const char*, 4> names = {"alpha1", "alpha2", "beta1", "beta2"};
  for (std::size_t i = 0; i < 4; ++i)
    if (plane == names[i]) c[i] = z;
  return PhasePoint::from_coords(c);
}

nlohmann::json config_json(const RunConfig& cfg) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [k, v] : config_entries(cfg)) j[k] = v;
  return j;
}

void write_validation(std::ostream& os, const RunConfig& cfg, const std::vector<CheckResult>& results) {
  if (cfg.format == OutputFormat::Json) {
    nlohmann::json j;
    j["config"] = config_json(cfg);
    j["checks"] = nlohmann::json::array();
    for (const auto& r : results)
      j["checks"].push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"summary", r.summary}});
    os << j.dump(2) << '\n';
    return;
  }
  for (const auto& [k, v] : config_entries(cfg)) os << "#@ " << k << " = " << v << '\n';
  os << "id,name,status,summary\n";
  for (const auto& r : results) {
    std::string summary = r.summary;
    for (char& ch : summary)
      if (ch == '"') ch = '\'';
    os << r.id << ',' << r.name << ',' << (r.pass ? "PASS" : "FAIL") << ",\"" << summary << "\"\n";
  }
}

}  // namespace

StateVector input_state(const RunConfig& cfg) {
  const BasisPtr basis = make_basis(cfg.opa.cutoff);
  return pair_input(cfg) ? pair_state(cfg.phi, basis) : StateVector::vacuum(basis);
}

Artifact compute_amplify(const RunConfig& cfg) {
  Artifact a;
  if (cfg.sweep) {
    a.table.columns = {cfg.sweep->param, "extra_pairs", "boundary_weight", "swap_parity",
                       "closed_form_fidelity"};
    const auto pts = sweep_points(cfg);
    auto rows = parallel_map(pts.size(), [&](std::size_t i) {
      const RunConfig& c = pts[i];
      const StateVector out = evolve(input_state(c), c.opa);
      return std::vector<double>{cfg.sweep->value(static_cast<int>(i)),
                                 extra_pairs(c, out), boundary_weight(out),
                                 parity_code(swap_parity(out, 1e-8)),
                                 fidelity(out, closed_form_output(c, out.basis_ptr()))};
    });
    for (auto& r : rows) a.table.add_row(std::move(r));
    return a;
  }
  const StateVector out = evolve(input_state(cfg), cfg.opa);
  a.table.columns = {"n1h", "n2v", "n1v", "n2h", "re", "im", "probability"};
  const FockBasis& basis = out.basis();
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const cplx amp = out.amps()[static_cast<Eigen::Index>(i)];
    if (std::abs(amp) < 1e-14) continue;
    const auto& n = basis[i].n;
    a.table.add_row({double(n[0]), double(n[1]), double(n[2]), double(n[3]), amp.real(), amp.imag(),
                     std::norm(amp)});
  }
  a.extra["state"] = state_to_json(out);
  a.extra["summary"] = {{"extra_pairs", extra_pairs(cfg, out)},
                        {"boundary_weight", boundary_weight(out)},
                        {"swap_parity", to_string(swap_parity(out, 1e-8))},
                        {"closed_form_fidelity", fidelity(out, closed_form_output(cfg, out.basis_ptr()))}};
  return a;
}

Artifact compute_rates(const RunConfig& cfg) {
  Artifact a;
  if (!cfg.sweep) {
    a.table.columns = kRateColumns;
    a.table.add_row(rates_row(cfg));
    return a;
  }
  a.table.columns = {cfg.sweep->param};
  a.table.columns.insert(a.table.columns.end(), kRateColumns.begin(), kRateColumns.end());
  const auto pts = sweep_points(cfg);
  auto rows = parallel_map(pts.size(), [&](std::size_t i) {
    std::vector<double> r{cfg.sweep->value(static_cast<int>(i))};
    const auto body = rates_row(pts[i]);
    r.insert(r.end(), body.begin(), body.end());
    return r;
  });
  for (auto& r : rows) a.table.add_row(std::move(r));
  return a;
}

Artifact compute_wigner_slice(const RunConfig& cfg) {
  Artifact a;
  std::vector<PhasePoint> points;
  std::vector<std::vector<double>> coords;
  if (cfg.wigner_samples > 0) {
    std::mt19937_64 rng(static_cast<std::uint64_t>(cfg.seed));
    a.table.columns = {"alpha1_re", "alpha1_im", "alpha2_re", "alpha2_im",
                       "beta1_re",  "beta1_im",  "beta2_re",  "beta2_im"};
    for (int i = 0; i < cfg.wigner_samples; ++i) {
      const PhasePoint p = random_point(rng, cfg.wigner_extent);
      std::vector<double> c;
      for (cplx z : p.coords()) {
        c.push_back(z.real());
        c.push_back(z.imag());
      }
      points.push_back(p);
      coords.push_back(std::move(c));
    }
  } else {
    a.table.columns = {"re", "im"};
    const int n = cfg.wigner_points;
    const double e = cfg.wigner_extent;
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) {
        const double x = -e + 2.0 * e * i / (n - 1);
        const double y = -e + 2.0 * e * k / (n - 1);
        points.push_back(plane_point(cfg.wigner_plane, cplx(x, y)));
        coords.push_back({x, y});
      }
  }
  a.table.columns.push_back("closed_form");
  if (pair_input(cfg)) a.table.columns.push_back("closed_form_corrected");
  if (cfg.wigner_numeric) a.table.columns.push_back("numeric");

  std::optional<StateVector> out;
  if (cfg.wigner_numeric) out = evolve(input_state(cfg), cfg.opa);
  auto rows = parallel_map(points.size(), [&](std::size_t i) {
    std::vector<double> r = coords[i];
    const PhasePoint& p = points[i];
    if (pair_input(cfg)) {
      r.push_back(wigner_closed_form(p, cfg.opa.g, cfg.phi, DeltaForm::AsPrinted));
      r.push_back(wigner_closed_form(p, cfg.opa.g, cfg.phi, DeltaForm::Corrected));
    } else {
      r.push_back(wigner_squeezed_vacuum(p, cfg.opa.g));
    }
    if (out) r.push_back(kNumericToClosedForm * wigner_numeric(*out, p));
    return r;
  });
  for (auto& r : rows) a.table.add_row(std::move(r));
  a.extra["normalization"] = "closed-form convention: vacuum origin value pi^-4";
  return a;
}

Artifact compute_scan_x(const RunConfig& cfg) {
  const StateVector out = evolve(input_state(cfg), cfg.opa);
  using D = Detector;
  const double r0 = double_coincidence(out, cfg.neif, {D::D1h, D::D2v});
  const double b0 = double_coincidence_distinguishable(out, cfg.neif, {D::D1h, D::D2v});
  const double c0 = complementary_coincidence(out, cfg.neif);
  const double cb = double_coincidence_distinguishable(out, cfg.neif, {D::D1h, D::D1v});
  const double tau = cfg.temporal.coherence_time();
  const double range = cfg.scan_range > 0.0 ? cfg.scan_range : 3.0 * kLightSpeedUmPerFs * tau;

  Artifact a;
  a.table.columns = {"x_um", "delay_fs", "d1h_d2v", "d1h_d1v"};
  const int n = cfg.scan_points;
  for (int i = 0; i < n; ++i) {
    const double x = -range + 2.0 * range * i / (n - 1);
    a.table.add_row({x, x / kLightSpeedUmPerFs, x_scan_envelope(x, r0, b0, cfg.temporal),
                     x_scan_envelope(x, c0, cb, cfg.temporal)});
  }
  a.extra["coherence_time_fs"] = tau;
  a.extra["d1h_d2v"] = {{"at_zero", r0}, {"baseline", b0}};
  a.extra["d1h_d1v"] = {{"at_zero", c0}, {"baseline", cb}};
  return a;
}

Artifact compute_scan_z(const RunConfig& cfg) {
  const StateVector out = evolve(input_state(cfg), cfg.opa);
  const StateVector noise = evolve(StateVector::vacuum(out.basis_ptr()), cfg.opa);
  const double peak = xor_suppressed_rate(out, cfg.neif, cfg.xor_veto);
  const double floor = xor_suppressed_rate(noise, cfg.neif, cfg.xor_veto);
  const double range = cfg.scan_range > 0.0 ? cfg.scan_range : 3.0 * z_overlap_width(cfg.temporal);

  Artifact a;
  a.table.columns = {"z_um", "mirror_um", "fringe", "xor_rate"};
  const int n = cfg.scan_points;
  for (int i = 0; i < n; ++i) {
    const double z = -range + 2.0 * range * i / (n - 1);
    a.table.add_row({z, 0.5 * z, z_fringe(z, cfg.temporal), z_amplification(z, peak, floor, cfg.temporal)});
  }
  a.extra["xor_rate"] = {{"peak", peak}, {"floor", floor}};
  a.extra["overlap_width_um"] = z_overlap_width(cfg.temporal);
  return a;
}

Artifact compute(const RunConfig& cfg) {
  switch (cfg.command.value()) {
    case Command::Amplify: return compute_amplify(cfg);
    case Command::Rates: return compute_rates(cfg);
    case Command::WignerSlice: return compute_wigner_slice(cfg);
    case Command::ScanX: return compute_scan_x(cfg);
    case Command::ScanZ: return compute_scan_z(cfg);
    case Command::Validate: break;
  }
  throw UsageError("validate does not produce a data table");
}

std::string output_path(const RunConfig& cfg) {
  if (!cfg.output.empty()) return cfg.output;
  const char* dir = std::getenv(kOutputDirEnv);
  const std::filesystem::path base = dir != nullptr && *dir != '\0' ? dir : ".";
  return (base / (std::string(to_string(cfg.command.value())) +
                  (cfg.format == OutputFormat::Json ? ".json" : ".csv")))
      .string();
}

void write_artifact(std::ostream& os, const RunConfig& cfg, const Artifact& a) {
  if (cfg.format == OutputFormat::Csv) {
    write_csv(os, a.table, config_entries(cfg));
    return;
  }
  nlohmann::json j = a.extra;
  j["config"] = config_json(cfg);
  j["columns"] = a.table.columns;
  j["rows"] = a.table.rows;
  os << j.dump(2) << '\n';
}

int run(const RunConfig& cfg) {
  const std::string path = output_path(cfg);
  auto emit = [&](auto&& writer) {
    if (path == "-") {
      writer(std::cout);
      return;
    }
    const std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream f(p, std::ios::binary);
    if (!f) throw UsageError("cannot write output file " + path);
    writer(f);
    std::cerr << "wrote " << path << '\n';
  };

  if (cfg.command == Command::Validate) {
    const auto scratch = std::filesystem::temp_directory_path() /
                         ("qiopa-validate-" + std::to_string(std::random_device{}()));
    std::vector<CheckResult> results;
    for (const auto& check : acceptance_checks(scratch)) {
      results.push_back(check());
      std::cerr << format_check(results.back()) << '\n';
    }
    std::filesystem::remove_all(scratch);
    emit([&](std::ostream& os) { write_validation(os, cfg, results); });
    const bool ok = std::all_of(results.begin(), results.end(), [](const auto& r) { return r.pass; });
    return ok ? kExitOk : kExitNumerical;
  }

  const Artifact a = compute(cfg);
  emit([&](std::ostream& os) { write_artifact(os, cfg, a); });
  return kExitOk;
}

int main_entry(int argc, const char* const* argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--help" || arg == "-h") {
      std::cout << usage_text();
      return kExitOk;
    }
  }
  RunConfig cfg;
  try {
    cfg = parse_config(argc, argv);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\nrun 'qiopa --help' for the list of keys\n";
    return kExitUsage;
  }
  try {
    return run(cfg);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const TruncationError& e) {
    std::cerr << "numerical error: " << e.what() << "\nhint: increase --opa.cutoff (currently "
              << cfg.opa.cutoff << ", maximum " << kDefaultMaxCutoff << ") or lower --opa.g\n";
    return kExitNumerical;
  } catch (const Error& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace qiopa::app
