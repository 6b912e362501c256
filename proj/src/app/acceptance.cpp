#include "qiopa/app/acceptance.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "qiopa/app/commands.hpp"
#include "qiopa/neif.hpp"
#include "qiopa/opa.hpp"
#include "qiopa/temporal.hpp"
#include "qiopa/wigner.hpp"

namespace qiopa::app {

namespace {

// Pinned tolerances.
constexpr double kLeadingTol = 1e-8;
constexpr double kSelectivityTol = 1e-8;
constexpr double kGainRemainderMax = 20.0;
constexpr double kSqueezedRatioTol = 1e-8;
constexpr double kSqueezedLeakTol = 1e-10;
constexpr double kCatFidelityMin = 0.999;
constexpr double kBogoliubovTol = 1e-6;
constexpr double kWignerRelTol = 1e-4;
constexpr double kWignerOriginTol = 1e-12;
constexpr double kNoiseZeroTol = 1e-8;
constexpr double kNoiseRemainderMax = 20.0;
constexpr double kPairsLow = 0.10;
constexpr double kPairsHigh = 0.30;
// Extra couples for an injected singlet at g = 0.22, cutoff 8 (4 sinh^2 0.22).
constexpr double kGoldenPairs = 0.196744;
constexpr double kGoldenPairsTol = 5e-7;
constexpr double kDoublePairTarget = 1e-2;
constexpr double kDoublePairFactor = 3.0;
// Two-pair / one-pair probability of the amplified vacuum at g' = 0.22 / 3.
constexpr double kGoldenDoublePair = 0.00803783;
constexpr double kGoldenDoublePairTol = 5e-8;
constexpr double kEnvelopeRelTol = 1e-3;
constexpr double kContrastTol = 1e-3;

constexpr int kGrid = 10;
constexpr std::uint64_t kWignerSeed = 20240501;

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string fixed(double v, int digits = 6) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

struct GridPoint {
  double phi;
  NeifConfig cfg;
};

// (phi, Delta, theta1 + theta2) over [0, 2pi) x [0, 2pi) x [0, pi), split
// evenly between the rotators.
std::vector<GridPoint> rate_grid() {
  std::vector<GridPoint> pts;
  for (int i = 0; i < kGrid; ++i)
    for (int j = 0; j < kGrid; ++j)
      for (int k = 0; k < kGrid; ++k) {
        NeifConfig c;
        c.delta1 = 2.0 * kPi * j / kGrid;
        const double sum = kPi * k / kGrid;
        c.theta1 = 0.5 * sum;
        c.theta2 = 0.5 * sum;
        pts.push_back({2.0 * kPi * i / kGrid, c});
      }
  return pts;
}

CheckResult leading_order() {
  CheckResult r{1, "leading-order rate grid", false, {}};
  OpaParams p;
  p.g = 0.0;
  const auto basis = make_basis(4);
  double worst = 0.0;
  double last_phi = -1.0;
  std::optional<StateVector> out;
  for (const auto& gp : rate_grid()) {
    if (gp.phi != last_phi) {
      out = evolve(pair_state(gp.phi, basis), p);
      last_phi = gp.phi;
    }
    const double sim = double_coincidence(*out, gp.cfg, {Detector::D1h, Detector::D2v});
    worst = std::max(worst, std::abs(sim - rate_closed_form(gp.phi, gp.cfg, 0.0)));
  }
  r.pass = worst < kLeadingTol;
  r.summary = "max |sim - closed form| = " + sci(worst) + " over 1000 points (tol " + sci(kLeadingTol) + ")";
  return r;
}

CheckResult selectivity() {
  CheckResult r{2, "parity selectivity", false, {}};
  OpaParams p;
  p.g = 0.0;
  const auto basis = make_basis(2);
  const NeifConfig c;  // delta = 0, theta1 + theta2 = pi/2
  const StateVector trip = evolve(pair_state(0.0, basis), p);
  const StateVector sing = evolve(pair_state(kPi, basis), p);
  const double t = double_coincidence(trip, c, {Detector::D1h, Detector::D2v});
  const double s = double_coincidence(sing, c, {Detector::D1h, Detector::D2v});
  const double tc = complementary_coincidence(trip, c);
  const double sc = complementary_coincidence(sing, c);
  const double err = std::max({std::abs(t - 0.5), std::abs(s), std::abs(tc), std::abs(sc - 0.5)});
  r.pass = err < kSelectivityTol;
  r.summary = "(D1hD2v) triplet " + fixed(t) + " singlet " + fixed(s) + "; (D1hD1v) triplet " +
              fixed(tc) + " singlet " + fixed(sc) + "; max error " + sci(err) + " (tol " +
              sci(kSelectivityTol) + ")";
  return r;
}

CheckResult gain_grid() {
  CheckResult r{3, "rate with gain, O(S^4) remainder", false, {}};
  const auto grid = rate_grid();
  const auto basis = make_basis(8);
  std::ostringstream os;
  bool pass = true;
  for (double g : {0.1, 0.22}) {
    OpaParams p;
    p.g = g;
    const double S = p.S();
    const double S4 = std::pow(S, 4);
    double c_printed = 0.0;
    double c_corrected = 0.0;
    double last_phi = -1.0;
    std::optional<StateVector> out;
    for (const auto& gp : grid) {
      if (gp.phi != last_phi) {
        out = evolve(pair_state(gp.phi, basis), p);
        last_phi = gp.phi;
      }
      const double sim = double_coincidence(*out, gp.cfg, {Detector::D1h, Detector::D2v});
      const double printed = rate_closed_form(gp.phi, gp.cfg, S, RateForm::AsPrinted);
      const double corrected = rate_closed_form(gp.phi, gp.cfg, S, RateForm::Corrected);
      c_printed = std::max(c_printed, std::abs(sim - printed) / S4);
      c_corrected = std::max(c_corrected, std::abs(sim - corrected) / S4);
    }
    pass = pass && c_printed <= kGainRemainderMax;
    os << "g=" << g << ": c = " << fixed(c_printed, 2) << " (bound " << kGainRemainderMax
       << "), c with 1/4[cos^2 2t1 + cos^2 2t2] = " << fixed(c_corrected, 2) << "; ";
  }
  // Least-squares coefficient k of the residual k S^2 cos2theta1 cos2theta2 at
  // small gain, where the O(S^4) remainder is negligible.
  OpaParams p;
  p.g = 0.01;
  const double S = p.S();
  double num = 0.0;
  double den = 0.0;
  double last_phi = -1.0;
  std::optional<StateVector> out;
  for (const auto& gp : grid) {
    if (gp.phi != last_phi) {
      out = evolve(pair_state(gp.phi, basis), p);
      last_phi = gp.phi;
    }
    const double sim = double_coincidence(*out, gp.cfg, {Detector::D1h, Detector::D2v});
    const double x = S * S * std::cos(2 * gp.cfg.theta1) * std::cos(2 * gp.cfg.theta2);
    num += (sim - rate_closed_form(gp.phi, gp.cfg, S, RateForm::AsPrinted)) * x;
    den += x * x;
  }
  r.pass = pass;
  r.summary = os.str() + "residual of the printed form fitted at g=0.01: " + fixed(num / den, 4) +
              " S^2 cos2t1 cos2t2, i.e. printed 1/4[cos2t1 + cos2t2]^2 is a candidate typo for "
              "1/4[cos^2 2t1 + cos^2 2t2]";
  return r;
}

struct SqueezedComparison {
  double ratio_err = 0.0;
  double leak = 0.0;
  SwapParity parity = SwapParity::Mixed;
};

SqueezedComparison compare_squeezed(const OpaParams& p, int cutoff) {
  const auto basis = make_basis(cutoff);
  const StateVector out = evolve(StateVector::vacuum(basis), p);
  const cplx a0 = out.amplitude(FockState{{0, 0, 0, 0}});
  SqueezedComparison c;
  for (std::size_t i = 0; i < basis->size(); ++i) {
    const auto& n = (*basis)[i].n;
    const cplx a = out.amps()[static_cast<Eigen::Index>(i)];
    if (n[0] == n[1] && n[2] == n[3])
      c.ratio_err = std::max(c.ratio_err, std::abs(a / a0 - std::pow(p.Gamma(), n[0] + n[2])));
    else
      c.leak += std::norm(a);
  }
  c.parity = swap_parity(out);
  return c;
}

CheckResult squeezed_vacuum() {
  CheckResult r{4, "squeezed vacuum expansion", false, {}};
  OpaParams p;
  p.g = 0.22;
  // Amplitudes next to the truncation boundary carry the cutoff error, so the
  // comparison runs at the largest supported cutoff.
  const SqueezedComparison c = compare_squeezed(p, kDefaultMaxCutoff);
  const SqueezedComparison c8 = compare_squeezed(p, 8);
  r.pass = c.ratio_err < kSqueezedRatioTol && c.leak < kSqueezedLeakTol && c.parity == SwapParity::Even;
  r.summary = "cutoff " + std::to_string(kDefaultMaxCutoff) + ": max |ratio - Gamma^(n+m)| = " +
              sci(c.ratio_err) + " (tol " + sci(kSqueezedRatioTol) + "), weight off |nn.mm> = " +
              sci(c.leak) + " (tol " + sci(kSqueezedLeakTol) + "), parity " + to_string(c.parity) +
              "; cutoff 8: " + sci(c8.ratio_err) + ", parity " + to_string(c8.parity);
  return r;
}

CheckResult cat_state() {
  CheckResult r{5, "cat-state closed form and parity", false, {}};
  OpaParams p;
  p.g = 0.22;
  const auto basis = make_basis(8);
  std::ostringstream os;
  bool pass = true;
  for (double phi : {kPi, 0.0}) {
    const StateVector out = evolve(pair_state(phi, basis), p);
    const double f = fidelity(out, cat_output_closed_form(phi, p, basis).state);
    pass = pass && f > kCatFidelityMin;
    os << (phi == 0.0 ? "triplet" : "singlet") << " fidelity " << fixed(f) << "; ";
  }
  os << "(min " << kCatFidelityMin << "); singlet parity:";
  for (double g : {0.05, 0.1, 0.22, 0.3}) {
    OpaParams q;
    q.g = g;
    const SwapParity par = swap_parity(evolve(pair_state(kPi, basis), q));
    pass = pass && par == SwapParity::Odd;
    os << " g=" << g << " " << to_string(par);
  }
  r.pass = pass;
  r.summary = os.str();
  return r;
}

CheckResult bogoliubov() {
  CheckResult r{6, "Bogoliubov identity", false, {}};
  OpaParams p;
  p.g = 0.22;
  const auto basis = make_basis(8);
  const double dev = bogoliubov_check(p, basis, 2);
  r.pass = dev < kBogoliubovTol;
  std::ostringstream os;
  os << "max deviation on occupancies <= 6 at cutoff 8: " << sci(dev) << " (tol " << sci(kBogoliubovTol)
     << "); by block:";
  for (int margin = 7; margin >= 3; --margin)
    os << " <=" << 8 - margin << " " << sci(bogoliubov_check(p, basis, margin));
  r.summary = os.str();
  return r;
}

CheckResult wigner() {
  CheckResult r{7, "Wigner closed form vs displaced parity", false, {}};
  constexpr int kPoints = 20;
  const double g = 0.22;
  OpaParams p;
  p.g = g;
  const auto basis = make_basis(10);
  std::mt19937_64 rng(kWignerSeed);
  std::vector<PhasePoint> pts;
  for (int i = 0; i < kPoints; ++i) pts.push_back(random_point(rng, 1.0));

  std::ostringstream os;
  bool pass = true;
  for (double phi : {0.0, kPi}) {
    const StateVector out = evolve(pair_state(phi, basis), p);
    const auto oracle = parallel_map(pts.size(), [&](std::size_t i) {
      return kNumericToClosedForm * wigner_numeric(out, pts[i]);
    });
    double scale = 0.0;
    double err_printed = 0.0;
    double err_corrected = 0.0;
    // Fit Delta = a (|g+|^2 - |g-|^2) - i b Re(g+ g-*): linear in (a^2, b^2) at real e^{i phi}.
    Eigen::MatrixXd A(kPoints, 2);
    Eigen::VectorXd y(kPoints);
    for (int i = 0; i < kPoints; ++i) {
      const double w = oracle[static_cast<std::size_t>(i)];
      scale = std::max(scale, std::abs(w));
      err_printed = std::max(err_printed, std::abs(wigner_closed_form(pts[i], g, phi, DeltaForm::AsPrinted) - w));
      err_corrected = std::max(err_corrected, std::abs(wigner_closed_form(pts[i], g, phi, DeltaForm::Corrected) - w));
      const SqueezedVars v = squeezed_vars(pts[i], g);
      const double gauss = std::exp(-v.sum_sq()) / std::pow(kPi, 4);
      const double sign = std::cos(phi);
      const double X = sign * (std::norm(v.a_plus) - std::norm(v.a_minus)) +
                       (std::norm(v.b_plus) - std::norm(v.b_minus));
      const double Y = sign * (v.a_plus * std::conj(v.a_minus)).real() +
                       (v.b_plus * std::conj(v.b_minus)).real();
      A(i, 0) = gauss * X * X;
      A(i, 1) = gauss * Y * Y;
      y(i) = w - gauss * (1.0 - v.sum_sq());
    }
    const Eigen::Vector2d fit = A.colPivHouseholderQr().solve(y);
    err_printed /= scale;
    err_corrected /= scale;
    pass = pass && err_corrected < kWignerRelTol;
    os << "phi=" << (phi == 0.0 ? "0" : "pi") << ": rel. error as printed " << sci(err_printed)
       << ", corrected " << sci(err_corrected) << ", fitted a^2 = " << fixed(fit(0), 4)
       << " b^2 = " << fixed(fit(1), 4) << "; ";
  }
  const double origin_closed = wigner_closed_form(PhasePoint{}, g, kPi, DeltaForm::AsPrinted);
  const StateVector out = evolve(pair_state(kPi, basis), p);
  const double origin_numeric = kNumericToClosedForm * wigner_numeric(out, PhasePoint{});
  const double pi4 = std::pow(kPi, -4);
  const double origin_err =
      std::max(std::abs(origin_closed - pi4), std::abs(origin_numeric - pi4)) / pi4;
  pass = pass && origin_err < kWignerOriginTol;
  r.pass = pass;
  r.summary = os.str() + "tol " + sci(kWignerRelTol) + "; W(0) rel. error " + sci(origin_err) +
              "; printed Delta = 1/2[|g+|^2 - |g-|^2 - i Re(g+g-*)] (a^2 = b^2 = 0.25) is a candidate "
              "typo for 2^-1/2[|g+|^2 - |g-|^2 - 2i Re(g+g-*)] (a^2 = 0.5, b^2 = 2)";
  return r;
}

CheckResult noise() {
  CheckResult r{8, "XOR noise suppression", false, {}};
  const auto basis = make_basis(8);
  double worst_zero = 0.0;
  for (double g : {0.05, 0.1, 0.2, 0.3}) {
    OpaParams p;
    p.g = g;
    const StateVector vac = evolve(StateVector::vacuum(basis), p);
    for (XorVeto v : {XorVeto::D1v, XorVeto::D1h, XorVeto::Both})
      worst_zero = std::max(worst_zero, xor_suppressed_rate(vac, NeifConfig{}, v));
  }
  double c_noise = 0.0;
  for (double g : {0.1, 0.22}) {
    OpaParams p;
    p.g = g;
    const double S4 = std::pow(p.S(), 4);
    const StateVector vac = evolve(StateVector::vacuum(basis), p);
    for (int j = 0; j < kGrid; ++j)
      for (int k = 0; k < kGrid; ++k) {
        NeifConfig c;
        c.delta1 = 2.0 * kPi * j / kGrid;
        c.theta1 = 0.1 * k;
        c.theta2 = kPi / 4 - 0.05 * k;
        const double sim = double_coincidence(vac, c, {Detector::D2h, Detector::D2v});
        c_noise = std::max(c_noise, std::abs(sim - noise_rate_closed_form(c, p.S())) / S4);
      }
  }
  OpaParams p;
  p.g = 0.22;
  const double signal = xor_suppressed_rate(evolve(pair_state(kPi, basis), p), NeifConfig{});
  r.pass = worst_zero < kNoiseZeroTol && c_noise <= kNoiseRemainderMax;
  r.summary = "max vacuum XOR rate at Delta=0, g<=0.3 = " + sci(worst_zero) + " (tol " +
              sci(kNoiseZeroTol) + "); noise remainder c = " + fixed(c_noise, 3) + " S^4 (bound " +
              fixed(kNoiseRemainderMax, 0) + "); singlet XOR signal at g=0.22 = " + fixed(signal);
  return r;
}

CheckResult stimulated() {
  CheckResult r{9, "stimulated pairs", false, {}};
  OpaParams p;
  p.g = 0.22;
  const double n = stimulated_pairs(kPi, p);
  bool monotone = true;
  double prev = -1.0;
  for (int i = 0; i <= 12; ++i) {
    OpaParams q;
    q.g = 0.025 * i;
    const double v = stimulated_pairs(kPi, q);
    monotone = monotone && v > prev;
    prev = v;
  }
  r.pass = n >= kPairsLow && n <= kPairsHigh && std::abs(n - kGoldenPairs) < kGoldenPairsTol && monotone;
  r.summary = "N(0.22) = " + fixed(n) + " in [" + fixed(kPairsLow, 2) + ", " + fixed(kPairsHigh, 2) +
              "], golden " + fixed(kGoldenPairs) + ", monotone in g on [0, 0.3]: " +
              (monotone ? "yes" : "no");
  return r;
}

CheckResult double_pairs() {
  CheckResult r{10, "double-pair ratio", false, {}};
  OpaParams p;
  const double gp = p.g_prime();
  const double ratio = double_pair_ratio(gp);
  const bool band = ratio >= kDoublePairTarget / kDoublePairFactor && ratio <= kDoublePairTarget * kDoublePairFactor;
  r.pass = band && std::abs(ratio - kGoldenDoublePair) < kGoldenDoublePairTol;
  r.summary = "ratio at g' = " + fixed(gp, 5) + ": " + fixed(ratio, 8) + " (band [" +
              sci(kDoublePairTarget / kDoublePairFactor) + ", " + sci(kDoublePairTarget * kDoublePairFactor) +
              "], golden " + fixed(kGoldenDoublePair, 8) + ", 1.5 tanh^2 g' = " +
              fixed(1.5 * std::pow(std::tanh(gp), 2), 8) + ")";
  return r;
}

Table run_to_csv(RunConfig cfg, const std::filesystem::path& path) {
  cfg.output = path.string();
  cfg.format = OutputFormat::Csv;
  std::filesystem::create_directories(path.parent_path());
  {
    std::ofstream f(path);
    write_artifact(f, cfg, compute(cfg));
  }
  std::ifstream in(path);
  return read_csv(in);
}

// Full width at half maximum of |y - y_far| by linear interpolation.
double fwhm(const std::vector<double>& x, const std::vector<double>& y) {
  const double far = y.front();
  std::size_t peak = 0;
  for (std::size_t i = 0; i < y.size(); ++i)
    if (std::abs(y[i] - far) > std::abs(y[peak] - far)) peak = i;
  const double half = 0.5 * std::abs(y[peak] - far);
  auto cross = [&](int dir) {
    std::size_t i = peak;
    while (std::abs(y[i] - far) > half) i = static_cast<std::size_t>(static_cast<long>(i) + dir);
    const std::size_t j = static_cast<std::size_t>(static_cast<long>(i) - dir);
    const double a = std::abs(y[i] - far) - half;
    const double b = std::abs(y[j] - far) - half;
    return x[i] + (x[j] - x[i]) * a / (a - b);
  };
  return cross(1) - cross(-1);
}

CheckResult envelopes(const std::filesystem::path& scratch) {
  CheckResult r{11, "scan envelopes", false, {}};
  RunConfig base;
  base.scan_points = 4001;

  RunConfig xs = base;
  xs.command = Command::ScanX;
  const Table tx = run_to_csv(xs, scratch / "scan-x.csv");
  const double width = fwhm(tx.column("delay_fs"), tx.column("d1h_d2v"));
  const double tau = base.temporal.coherence_time();
  const double width_err = std::abs(width - 225.0) / 225.0;

  RunConfig zs = base;
  zs.command = Command::ScanZ;
  zs.scan_range = 2.0;
  const Table tz = run_to_csv(zs, scratch / "scan-z.csv");
  const auto z = tz.column("z_um");
  const auto f = tz.column("fringe");
  std::vector<double> peaks;
  for (std::size_t i = 1; i + 1 < f.size(); ++i)
    if (f[i] > f[i - 1] && f[i] >= f[i + 1]) {
      // vertex of the parabola through the three samples
      const double d = f[i - 1] - 2 * f[i] + f[i + 1];
      const double h = z[i + 1] - z[i];
      peaks.push_back(z[i] + 0.5 * h * (f[i - 1] - f[i + 1]) / d);
    }
  double period = 0.0;
  for (std::size_t i = 1; i < peaks.size(); ++i)
    if (peaks[i - 1] < 0.0 && peaks[i] >= -1e-12) period = peaks[i] - peaks[i - 1];
  if (period == 0.0 && peaks.size() >= 2) period = peaks[1] - peaks[0];
  const double lambda_um = base.temporal.lambda * 1e-3;
  const double period_err = std::abs(period - lambda_um) / lambda_um;
  double hi = -1e300;
  double lo = 1e300;
  for (std::size_t i = 0; i < z.size(); ++i)
    if (std::abs(z[i]) <= lambda_um) {
      hi = std::max(hi, f[i]);
      lo = std::min(lo, f[i]);
    }
  const double contrast = hi - lo;
  const double contrast_err = std::abs(contrast - 2.0 * base.temporal.fringe_visibility);

  r.pass = width_err < kEnvelopeRelTol && period_err < kEnvelopeRelTol && contrast_err < kContrastTol;
  r.summary = "x-scan FWHM " + fixed(width, 3) + " fs (tau_c " + fixed(tau, 3) + ", target 225, rel. tol " +
              sci(kEnvelopeRelTol) + "); fringe period " + fixed(period * 1e3, 3) + " nm (lambda " +
              fixed(base.temporal.lambda, 1) + "); contrast " + fixed(contrast, 5) + " (target " +
              fixed(2.0 * base.temporal.fringe_visibility, 2) + ", tol " + sci(kContrastTol) + ")";
  return r;
}

}  // namespace

std::vector<std::function<CheckResult()>> acceptance_checks(const std::filesystem::path& scratch) {
  return {leading_order, selectivity, gain_grid, squeezed_vacuum, cat_state, bogoliubov,
          wigner,        noise,       stimulated, double_pairs,   [scratch] { return envelopes(scratch); }};
}

std::string format_check(const CheckResult& r) {
  char head[16];
  std::snprintf(head, sizeof head, "%s %2d ", r.pass ? "PASS" : "FAIL", r.id);
  return std::string(head) + r.name + ": " + r.summary;
}

}  // namespace qiopa::app
