#include "qiopa/opa.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>
#include <tuple>

#include <unsupported/Eigen/MatrixFunctions>

#include "qiopa/errors.hpp"

namespace qiopa {

void OpaParams::validate() const {
  if (!(g >= 0.0) || !std::isfinite(g)) throw ContractError("gain g must be >= 0");
  if (!(eta > 0.0) || !std::isfinite(eta)) throw ContractError("scaling eta must be > 0");
  if (!std::isfinite(psi)) throw ContractError("phase psi must be finite");
  if (cutoff < 0) throw ContractError("cutoff must be >= 0");
}

SparseMatrix ladder_matrix(Ladder op, Mode mode, const FockBasis& basis) {
  std::vector<Eigen::Triplet<cplx>> entries;
  entries.reserve(basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i) {
    FockState ket = basis[i];
    const int n = ket[mode];
    if (op == Ladder::Annihilate) {
      if (n == 0) continue;
      ket[mode] = n - 1;
      entries.emplace_back(static_cast<int>(basis.index(ket)), static_cast<int>(i),
                           std::sqrt(static_cast<double>(n)));
    } else {
      if (n == basis.cutoff()) continue;
      ket[mode] = n + 1;
      entries.emplace_back(static_cast<int>(basis.index(ket)), static_cast<int>(i),
                           std::sqrt(static_cast<double>(n + 1)));
    }
  }
  const auto dim = static_cast<Eigen::Index>(basis.size());
  SparseMatrix m(dim, dim);
  m.setFromTriplets(entries.begin(), entries.end());
  return m;
}

SparseMatrix hamiltonian_generator(const OpaParams& params, const FockBasis& basis) {
  const int c = basis.cutoff();
  const cplx phase = std::polar(1.0, params.psi);
  std::vector<Eigen::Triplet<cplx>> entries;
  entries.reserve(4 * basis.size());
  // Pair creation a_i^+ a_j^+ |..n_i..n_j..> = sqrt((n_i+1)(n_j+1)) |..n_i+1..n_j+1..>.
  auto add_pair = [&](std::size_t col, FockState ket, Mode i, Mode j, cplx coupling) {
    if (ket[i] == c || ket[j] == c) return;
    const double amp = std::sqrt(static_cast<double>((ket[i] + 1) * (ket[j] + 1)));
    ket[i] += 1;
    ket[j] += 1;
    const auto row = static_cast<int>(basis.index(ket));
    entries.emplace_back(row, static_cast<int>(col), coupling * amp);
    entries.emplace_back(static_cast<int>(col), row, -std::conj(coupling) * amp);
  };
  for (std::size_t k = 0; k < basis.size(); ++k) {
    add_pair(k, basis[k], Mode::H1, Mode::V2, 1.0);
    add_pair(k, basis[k], Mode::V1, Mode::H2, phase);
  }
  const auto dim = static_cast<Eigen::Index>(basis.size());
  SparseMatrix K(dim, dim);
  K.setFromTriplets(entries.begin(), entries.end());
  return K;
}

namespace {

// Union-find over the nonzero pattern of the generator.
std::vector<std::vector<Eigen::Index>> connected_blocks(const SparseMatrix& K) {
  const auto n = static_cast<std::size_t>(K.rows());
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto root = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (Eigen::Index col = 0; col < K.outerSize(); ++col)
    for (SparseMatrix::InnerIterator it(K, col); it; ++it) {
      auto a = root(static_cast<std::size_t>(it.row()));
      auto b = root(static_cast<std::size_t>(it.col()));
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  std::map<std::size_t, std::vector<Eigen::Index>> groups;
  for (std::size_t i = 0; i < n; ++i) groups[root(i)].push_back(static_cast<Eigen::Index>(i));
  std::vector<std::vector<Eigen::Index>> out;
  out.reserve(groups.size());
  for (auto& [r, members] : groups) out.push_back(std::move(members));
  return out;
}

}  // namespace

Propagator::Propagator(const OpaParams& params, BasisPtr basis)
    : basis_(std::move(basis)), g_(params.g), psi_(params.psi) {
  params.validate();
  const SparseMatrix K = hamiltonian_generator(params, *basis_);
  for (auto& members : connected_blocks(K)) {
    const auto m = static_cast<Eigen::Index>(members.size());
    Block block{std::move(members), Eigen::MatrixXcd::Identity(m, m)};
    if (m > 1 && g_ != 0.0) {
      Eigen::MatrixXcd sub = Eigen::MatrixXcd::Zero(m, m);
      for (Eigen::Index c = 0; c < m; ++c)
        for (Eigen::Index r = 0; r < m; ++r) sub(r, c) = K.coeff(block.index[r], block.index[c]);
      block.unitary = (g_ * sub).exp();
    }
    blocks_.push_back(std::move(block));
  }
}

std::size_t Propagator::largest_block() const noexcept {
  std::size_t best = 0;
  for (const auto& b : blocks_) best = std::max(best, b.index.size());
  return best;
}

StateVector Propagator::apply_impl(const StateVector& s, bool adjoint) const {
  if (s.basis().cutoff() != basis_->cutoff())
    throw ContractError("propagator and state use different cutoffs");
  StateVector out(s.basis_ptr());
  Eigen::VectorXcd in_block;
  for (const auto& b : blocks_) {
    const auto m = static_cast<Eigen::Index>(b.index.size());
    in_block.resize(m);
    for (Eigen::Index k = 0; k < m; ++k) in_block[k] = s.amps()[b.index[k]];
    if (in_block.isZero(0.0)) continue;
    const Eigen::VectorXcd res =
        adjoint ? Eigen::VectorXcd(b.unitary.adjoint() * in_block) : Eigen::VectorXcd(b.unitary * in_block);
    for (Eigen::Index k = 0; k < m; ++k) out.amps()[b.index[k]] = res[k];
  }
  return out;
}

StateVector Propagator::apply(const StateVector& s) const { return apply_impl(s, false); }

StateVector Propagator::apply_adjoint(const StateVector& s) const { return apply_impl(s, true); }

SparseMatrix Propagator::matrix() const {
  std::vector<Eigen::Triplet<cplx>> entries;
  for (const auto& b : blocks_) {
    const auto m = static_cast<Eigen::Index>(b.index.size());
    for (Eigen::Index c = 0; c < m; ++c)
      for (Eigen::Index r = 0; r < m; ++r)
        if (b.unitary(r, c) != cplx{})
          entries.emplace_back(static_cast<int>(b.index[r]), static_cast<int>(b.index[c]),
                               b.unitary(r, c));
  }
  const auto dim = static_cast<Eigen::Index>(basis_->size());
  SparseMatrix U(dim, dim);
  U.setFromTriplets(entries.begin(), entries.end());
  return U;
}

std::shared_ptr<const Propagator> cached_propagator(const OpaParams& params, const BasisPtr& basis) {
  using Key = std::tuple<double, double, int>;
  static std::mutex mutex;
  static std::map<Key, std::shared_ptr<const Propagator>> cache;
  const Key key{params.g, params.psi, basis->cutoff()};
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  auto built = std::make_shared<const Propagator>(params, basis);
  std::lock_guard lock(mutex);
  if (cache.size() > 64) cache.clear();
  return cache.emplace(key, std::move(built)).first->second;
}

double boundary_weight(const StateVector& s) {
  const FockBasis& basis = s.basis();
  const int c = basis.cutoff();
  double w = 0.0;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const auto& n = basis[i].n;
    if (std::find(n.begin(), n.end(), c) != n.end())
      w += std::norm(s.amps()[static_cast<Eigen::Index>(i)]);
  }
  return w;
}

StateVector evolve(const StateVector& s, const OpaParams& params, double max_loss) {
  params.validate();
  if (!s.is_normalized()) throw ContractError("evolve requires a normalized state");
  if (params.g == 0.0) return s;
  const StateVector out = cached_propagator(params, s.basis_ptr())->apply(s);
  const double loss = boundary_weight(out);
  if (loss > max_loss) {
    std::ostringstream msg;
    msg << "truncation loss " << loss << " at cutoff " << s.basis().cutoff() << " exceeds "
        << max_loss << "; increase the cutoff";
    throw TruncationError(msg.str(), loss, max_loss);
  }
  return out;
}

StateVector squeezed_vacuum_closed_form(const OpaParams& params, const BasisPtr& basis) {
  params.validate();
  StateVector s(basis);
  const double C = params.C();
  const double Gamma = params.Gamma();
  for (int n = 0; n <= basis->cutoff(); ++n)
    for (int m = 0; m <= basis->cutoff(); ++m)
      s.set_amplitude(FockState{{n, n, m, m}},
                      std::polar(std::pow(Gamma, n + m) / (C * C), params.psi * m));
  return s.normalized();
}

CatOutput cat_output_closed_form(double phi, const OpaParams& params, const BasisPtr& basis) {
  params.validate();
  if (basis->cutoff() < 1) throw BasisError("cat output needs cutoff >= 1");
  const double Gamma = params.Gamma();
  const double prefactor = std::sqrt(2.0) * params.eta * std::pow(params.C(), -5);
  const cplx relative = std::polar(1.0, phi);
  StateVector s(basis);
  for (int n = 0; n <= basis->cutoff(); ++n)
    for (int m = 0; m <= basis->cutoff(); ++m) {
      // The B macrostate carries the phase of the B amplifier once per
      // additional pair: e^{i psi (m-1)} relative to the injected couple.
      const cplx psi_a = static_cast<double>(n) * std::polar(1.0, params.psi * m);
      const cplx psi_b = static_cast<double>(m) * std::polar(1.0, params.psi * (m - 1));
      s.set_amplitude(FockState{{n, n, m, m}},
                      std::pow(Gamma, n + m) * (psi_a + relative * psi_b) / std::sqrt(2.0));
    }
  const double raw = s.norm();
  if (raw == 0.0) throw BasisError("cat expansion vanishes on this basis");
  return CatOutput{s.normalized(), prefactor * raw};
}

double bogoliubov_check(const OpaParams& params, const BasisPtr& basis, int margin) {
  params.validate();
  const int c = basis->cutoff();
  if (margin < 1) throw ContractError("Bogoliubov margin must be >= 1");
  if (c < margin) throw BasisError("Bogoliubov check needs cutoff >= margin");
  const SparseMatrix U = cached_propagator(params, basis)->matrix();
  const SparseMatrix Ud = U.adjoint();

  std::vector<char> inside(basis->size());
  for (std::size_t i = 0; i < basis->size(); ++i) {
    const auto& n = (*basis)[i].n;
    inside[i] = *std::max_element(n.begin(), n.end()) <= c - margin;
  }

  double worst = 0.0;
  for (Mode m : kAllModes) {
    const cplx s_coef = pair_of(m) == ModePair::A ? cplx(params.S()) : params.S_tilde();
    const SparseMatrix lhs = SparseMatrix(Ud * ladder_matrix(Ladder::Annihilate, m, *basis)) * U;
    const SparseMatrix rhs = params.C() * ladder_matrix(Ladder::Annihilate, m, *basis) +
                             s_coef * ladder_matrix(Ladder::Create, partner(m), *basis);
    const SparseMatrix diff = lhs - rhs;
    for (Eigen::Index col = 0; col < diff.outerSize(); ++col) {
      if (!inside[static_cast<std::size_t>(col)]) continue;
      for (SparseMatrix::InnerIterator it(diff, col); it; ++it)
        if (inside[static_cast<std::size_t>(it.row())]) worst = std::max(worst, std::abs(it.value()));
    }
  }
  return worst;
}

double stimulated_pairs(double phi, const OpaParams& params) {
  params.validate();
  const auto basis = make_basis(params.cutoff);
  const StateVector out = evolve(pair_state(phi, basis), params);
  return (out.mean_total() - 2.0) / 2.0;
}

double double_pair_ratio(double g_prime, int cutoff) {
  if (!(g_prime >= 0.0)) throw ContractError("g' must be >= 0");
  OpaParams p;
  p.g = g_prime;
  p.psi = 0.0;
  p.cutoff = cutoff;
  const auto basis = make_basis(cutoff);
  const StateVector out = evolve(StateVector::vacuum(basis), p);
  double one = 0.0;
  double two = 0.0;
  for (std::size_t i = 0; i < basis->size(); ++i) {
    const int photons = (*basis)[i].total();
    const double w = std::norm(out.amps()[static_cast<Eigen::Index>(i)]);
    if (photons == 2) one += w;
    if (photons == 4) two += w;
  }
  return one == 0.0 ? 0.0 : two / one;
}

}  // namespace qiopa
