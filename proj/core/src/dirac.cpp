#include "ncg/dirac.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>

#include <Eigen/Eigenvalues>

#include "json.hpp"
#include "ncg/errors.hpp"
#include "ncg/format.hpp"

namespace ncg {

std::string_view to_string(DiracKind k) {
  switch (k) {
    case DiracKind::D0: return "standard";
    case DiracKind::HarmonicAbstract: return "harmonic-abstract";
    case DiracKind::D1: return "harmonic";
    case DiracKind::D2: return "d2";
    case DiracKind::Landau: return "landau";
    case DiracKind::Twisted: return "twisted";
  }
  return "?";
}

DiracKind dirac_kind_from_string(std::string_view s) {
  if (s == "standard" || s == "d0") return DiracKind::D0;
  if (s == "harmonic" || s == "d1") return DiracKind::D1;
  if (s == "d2") return DiracKind::D2;
  if (s == "harmonic-abstract") return DiracKind::HarmonicAbstract;
  if (s == "landau") return DiracKind::Landau;
  if (s == "twisted") return DiracKind::Twisted;
  throw ConfigurationError("unknown triple kind '" + std::string(s) + "'");
}

int spin_dimension(DiracKind k) { return (k == DiracKind::D0 || k == DiracKind::Landau) ? 2 : 4; }

const std::array<CMatrix, 3>& pauli() {
  static const std::array<CMatrix, 3> s = [] {
    std::array<CMatrix, 3> p;
    p[0] = CMatrix::Zero(2, 2);
    p[0] << 0.0, 1.0, 1.0, 0.0;
    p[1] = CMatrix::Zero(2, 2);
    p[1] << 0.0, kI, -kI, 0.0;
    p[2] = kI * p[0] * p[1];
    return p;
  }();
  return s;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

namespace {

void validate_params(DiracKind kind, const DiracParams& p) {
  if (!(p.theta > 0.0) || !std::isfinite(p.theta)) throw DomainError("theta must be positive");
  const bool harmonic = kind == DiracKind::D1 || kind == DiracKind::D2 || kind == DiracKind::HarmonicAbstract;
  if (harmonic && !(p.omega > 0.0 && p.omega <= 1.0)) throw DomainError("Omega must lie in (0, 1]");
  if (!std::isfinite(p.xi)) throw DomainError("xi must be finite");
}

void validate_gammas(const std::vector<CMatrix>& g) {
  if (g.size() != 4) throw ConfigurationError("abstract harmonic kind needs exactly four gamma matrices");
  const CMatrix one = CMatrix::Identity(4, 4);
  for (const auto& m : g) {
    if (m.rows() != 4 || m.cols() != 4) throw DimensionError("gamma matrices must be 4x4");
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-12) throw ConfigurationError("gamma matrices must be hermitian");
  }
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      const CMatrix ac = g[a] * g[b] + g[b] * g[a];
      const CMatrix want = (a == b ? 2.0 : 0.0) * one;
      if ((ac - want).cwiseAbs().maxCoeff() > 1e-12) {
        throw ConfigurationError("gamma matrices violate the Clifford relations");
      }
    }
  }
}

}  // namespace

DiracMatrices dirac_matrices(DiracKind kind, const DiracParams& params) {
  validate_params(kind, params);
  const auto& s = pauli();
  const CMatrix one = CMatrix::Identity(2, 2);
  const double om = params.omega;
  const double xi = params.xi;
  DiracMatrices m;
  for (int mu = 0; mu < 2; ++mu) {
    switch (kind) {
      case DiracKind::D0:
        m.p[mu] = s[mu];
        m.q[mu] = CMatrix::Zero(2, 2);
        break;
      case DiracKind::D1:
        m.p[mu] = kron(one, s[mu]);
        m.q[mu] = -om * kron(s[mu], s[2]);
        break;
      case DiracKind::D2:
        m.p[mu] = kron(s[2], s[mu]);
        m.q[mu] = -om * kron(s[mu], one);
        break;
      case DiracKind::HarmonicAbstract: {
        if (params.gammas.empty()) {
          m.p[mu] = kron(one, s[mu]);
          m.q[mu] = -om * kron(s[mu], s[2]);
        } else {
          validate_gammas(params.gammas);
          m.p[mu] = params.gammas[mu];
          m.q[mu] = -om * params.gammas[mu + 2];
        }
        break;
      }
      case DiracKind::Landau:
        m.p[mu] = s[mu];
        m.q[mu] = xi * s[mu];
        break;
      case DiracKind::Twisted:
        m.p[mu] = kron(one, s[mu]);
        m.q[mu] = -xi * kron(s[2], s[mu]);
        break;
    }
  }
  return m;
}

SpinorOperator::SpinorOperator(DiracKind kind, DiracParams params, int trunc, std::vector<LadderStencil> blocks,
                               bool degenerate)
    : kind_(kind),
      params_(std::move(params)),
      trunc_(trunc),
      spin_(spin_dimension(kind)),
      blocks_(std::move(blocks)),
      degenerate_(degenerate) {
  if (trunc_ < 2) throw DimensionError("truncation N must be at least 2");
  if (static_cast<int>(blocks_.size()) != spin_ * spin_) throw DimensionError("block count does not match spin");
}

namespace {

bool is_zero(const LadderStencil& s) {
  return s.row_lower == cplx{0.0} && s.row_raise == cplx{0.0} && s.col_raise == cplx{0.0} &&
         s.col_lower == cplx{0.0};
}

void require_spinor(const Spinor& psi, int spin, int trunc) {
  if (static_cast<int>(psi.size()) != spin) throw DimensionError("spinor rank mismatch");
  for (const auto& c : psi) {
    if (c.rows() != trunc || c.cols() != trunc) throw DimensionError("spinor component truncation mismatch");
  }
}

}  // namespace

Spinor SpinorOperator::apply(const Spinor& psi) const {
  require_spinor(psi, spin_, trunc_);
  Spinor out(static_cast<size_t>(spin_), CMatrix::Zero(trunc_, trunc_));
  for (int i = 0; i < spin_; ++i) {
    for (int j = 0; j < spin_; ++j) {
      const auto& b = block(i, j);
      if (!is_zero(b)) out[i] += apply_stencil(b, psi[j]);
    }
  }
  return out;
}

SpMatrix SpinorOperator::assemble() const {
  const int n = trunc_;
  const int n2 = n * n;
  std::vector<Eigen::Triplet<cplx>> t;
  for (int i = 0; i < spin_; ++i) {
    for (int j = 0; j < spin_; ++j) {
      const auto& b = block(i, j);
      if (is_zero(b)) continue;
      const Multipliers mul = multipliers(b, n);
      for (int k = 0; k < mul.left.outerSize(); ++k) {
        for (SpMatrix::InnerIterator it(mul.left, k); it; ++it) {
          for (int c = 0; c < n; ++c) t.emplace_back(i * n2 + it.row() + n * c, j * n2 + it.col() + n * c, it.value());
        }
      }
      for (int k = 0; k < mul.right.outerSize(); ++k) {
        for (SpMatrix::InnerIterator it(mul.right, k); it; ++it) {
          // (X R)_{m,k} = Σ_j X_{m,j} R_{j,k}
          for (int r = 0; r < n; ++r) t.emplace_back(i * n2 + r + n * it.col(), j * n2 + r + n * it.row(), it.value());
        }
      }
    }
  }
  SpMatrix m(spin_ * n2, spin_ * n2);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

SpinorOperator build_dirac(DiracKind kind, const DiracParams& params, int trunc, const LadderTable& table) {
  const DiracMatrices dm = dirac_matrices(kind, params);
  const int s = spin_dimension(kind);
  std::array<LadderStencil, 2> d;
  std::array<LadderStencil, 2> x;
  for (int mu = 0; mu < 2; ++mu) {
    d[mu] = derivative_stencil(mu == 0 ? Derivative::X1 : Derivative::X2, table, params.theta);
    x[mu] = xtilde_stencil(mu + 1, XMode::Pointwise, table, params.theta);
  }
  std::vector<LadderStencil> blocks(static_cast<size_t>(s * s));
  for (int i = 0; i < s; ++i) {
    for (int j = 0; j < s; ++j) {
      LadderStencil b;
      for (int mu = 0; mu < 2; ++mu) {
        if (dm.p[mu](i, j) != cplx{0.0}) b += (-kI * dm.p[mu](i, j)) * d[mu];
        if (dm.q[mu](i, j) != cplx{0.0}) b += dm.q[mu](i, j) * x[mu];
      }
      blocks[static_cast<size_t>(i * s + j)] = b;
    }
  }
  const bool degenerate = kind == DiracKind::Landau && params.xi == 1.0;
  return SpinorOperator(kind, params, trunc, std::move(blocks), degenerate);
}

std::string operator_to_json(const SpinorOperator& d) {
  using nlohmann::json;
  json j;
  j["schema"] = 1;
  j["kind"] = std::string(to_string(d.kind()));
  j["params"] = {{"theta", d.params().theta}, {"omega", d.params().omega}, {"xi", d.params().xi}};
  j["trunc"] = d.trunc();
  j["spin"] = d.spin();
  j["degenerate"] = d.degenerate();
  json blocks = json::array();
  const int n = d.trunc();
  auto band = [&](int bi, int bj, const char* side, int offset, cplx c) {
    if (c == cplx{0.0}) return;
    json vals = json::array();
    for (int k = 1; k < n; ++k) {
      const cplx v = c * std::sqrt(static_cast<double>(k));
      vals.push_back(json::array({v.real(), v.imag()}));
    }
    blocks.push_back({{"block_row", bi}, {"block_col", bj}, {"side", side}, {"band_offset", offset}, {"values", vals}});
  };
  for (int i = 0; i < d.spin(); ++i) {
    for (int k = 0; k < d.spin(); ++k) {
      const auto& b = d.block(i, k);
      // S⁻ sits on the superdiagonal (offset +1), S⁺ on the subdiagonal (offset -1).
      band(i, k, "left", +1, b.row_lower);
      band(i, k, "left", -1, b.row_raise);
      band(i, k, "right", +1, b.col_raise);
      band(i, k, "right", -1, b.col_lower);
    }
  }
  j["blocks"] = std::move(blocks);
  return j.dump(2);
}

CMatrix CommutatorBlocks::dense() const {
  const Eigen::Index n = blocks.front().rows();
  CMatrix out(spin * n, spin * n);
  for (int i = 0; i < spin; ++i) {
    for (int j = 0; j < spin; ++j) out.block(i * n, j * n, n, n) = at(i, j);
  }
  return out;
}

CommutatorBlocks commutator(const SpinorOperator& d, const TruncatedElement& a, CommutatorMode mode,
                            const LadderTable& table) {
  if (a.trunc() != d.trunc()) throw DimensionError("element and operator truncations differ");
  if (a.theta() != d.params().theta) throw DimensionError("element and operator theta differ");
  const int s = d.spin();
  const int n = d.trunc();
  CommutatorBlocks c;
  c.spin = s;
  c.blocks.assign(static_cast<size_t>(s * s), CMatrix::Zero(n, n));
  if (mode == CommutatorMode::Direct) {
    // [D_ij, L(a)] X = (D_ij(a) - a D_ij(1)) X: the right-acting part cancels.
    const CMatrix one = CMatrix::Identity(n, n);
    for (int i = 0; i < s; ++i) {
      for (int j = 0; j < s; ++j) {
        const auto& b = d.block(i, j);
        if (is_zero(b)) continue;
        const SpMatrix b_one = apply_stencil(b, one).sparseView();
        c.blocks[static_cast<size_t>(i * s + j)] = apply_stencil(b, a.coeffs()) - a.coeffs() * b_one;
      }
    }
    return c;
  }
  const DiracMatrices dm = dirac_matrices(d.kind(), d.params());
  const CMatrix d1 = derivative(a, Derivative::X1, table).coeffs();
  const CMatrix d2 = derivative(a, Derivative::X2, table).coeffs();
  for (int i = 0; i < s; ++i) {
    for (int j = 0; j < s; ++j) {
      const cplx g1 = dm.p[0](i, j) - dm.q[0](i, j);
      const cplx g2 = dm.p[1](i, j) - dm.q[1](i, j);
      if (g1 == cplx{0.0} && g2 == cplx{0.0}) continue;
      c.blocks[static_cast<size_t>(i * s + j)] = -kI * (g1 * d1 + g2 * d2);
    }
  }
  return c;
}

CliffordSet clifford_metric(DiracKind kind, const DiracParams& params) {
  const DiracMatrices dm = dirac_matrices(kind, params);
  CliffordSet cs;
  for (int mu = 0; mu < 2; ++mu) cs.gammas[mu] = dm.p[mu] - dm.q[mu];
  const int s = static_cast<int>(cs.gammas[0].rows());
  const CMatrix one = CMatrix::Identity(s, s);
  CMatrix ac[2][2];
  double residual = 0.0;
  for (int mu = 0; mu < 2; ++mu) {
    for (int nu = 0; nu < 2; ++nu) {
      ac[mu][nu] = cs.gammas[mu] * cs.gammas[nu] + cs.gammas[nu] * cs.gammas[mu];
      const cplx tr = ac[mu][nu].trace() / static_cast<double>(s);
      cs.metric_inverse(mu, nu) = 0.5 * tr.real();
      residual = std::max(residual, (ac[mu][nu] - tr * one).cwiseAbs().maxCoeff());
    }
  }
  cs.scalar = residual <= 1e-12;
  if (cs.scalar) {
    cs.anticommutator_residual = residual;
    cs.sector_scales = {cs.metric_inverse(0, 0)};
  } else {
    // Sectors: eigenspaces of {Γ¹, Γ¹}/2, on which every anticommutator must be scalar.
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * ac[0][0]);
    const RVector& ev = es.eigenvalues();
    double sector_residual = 0.0;
    for (int k = 0; k < s;) {
      int e = k + 1;
      while (e < s && std::abs(ev(e) - ev(k)) < 1e-10 * std::max(1.0, std::abs(ev(k)))) ++e;
      const CMatrix v = es.eigenvectors().middleCols(k, e - k);
      for (int mu = 0; mu < 2; ++mu) {
        for (int nu = 0; nu < 2; ++nu) {
          const CMatrix blk = v.adjoint() * ac[mu][nu] * v;
          const double want = mu == nu ? 2.0 * ev(k) : 0.0;
          sector_residual = std::max(sector_residual,
                                     (blk - want * CMatrix::Identity(e - k, e - k)).cwiseAbs().maxCoeff());
        }
      }
      cs.sector_scales.push_back(ev(k));
      k = e;
    }
    if (sector_residual > 1e-10) {
      throw NumericalError("anticommutators are not scalar on any sector decomposition");
    }
    cs.anticommutator_residual = sector_residual;
    const double cmax = *std::max_element(cs.sector_scales.begin(), cs.sector_scales.end());
    cs.metric_inverse = cmax * RMatrix::Identity(2, 2);
  }
  const double det_inv = cs.metric_inverse.determinant();
  if (!(det_inv > 1e-300)) {
    throw DomainError("effective Clifford metric is singular (" + std::string(to_string(kind)) +
                      ", xi = " + format_double(params.xi) + ")");
  }
  cs.det_g = 1.0 / det_inv;
  cs.det_g_quarter = std::pow(cs.det_g, 0.25);
  return cs;
}

Spinor random_interior_spinor(int spin, int trunc, int margin, unsigned long long seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  Spinor psi;
  const int lim = std::max(0, trunc - margin);
  for (int c = 0; c < spin; ++c) {
    CMatrix m = CMatrix::Zero(trunc, trunc);
    for (int j = 0; j < lim; ++j) {
      for (int i = 0; i < lim; ++i) m(i, j) = {nd(rng), nd(rng)};
    }
    psi.push_back(std::move(m));
  }
  return psi;
}

namespace {

CMatrix apply_partial(const CMatrix& psi, int mu, double theta, const LadderTable& table) {
  return apply_stencil(derivative_stencil(mu == 1 ? Derivative::X1 : Derivative::X2, table, theta), psi);
}

CMatrix apply_xt(const CMatrix& psi, int mu, double theta, const LadderTable& table) {
  return apply_stencil(xtilde_stencil(mu, XMode::Pointwise, table, theta), psi);
}

double spinor_max(const Spinor& s) {
  double m = 0.0;
  for (const auto& c : s) m = std::max(m, c.cwiseAbs().maxCoeff());
  return m;
}

double relative_residual(const Spinor& lhs, const Spinor& rhs) {
  double r = 0.0;
  for (size_t i = 0; i < lhs.size(); ++i) r = std::max(r, (lhs[i] - rhs[i]).cwiseAbs().maxCoeff());
  return r / std::max({spinor_max(lhs), spinor_max(rhs), 1e-300});
}

Spinor scalar_op(const Spinor& psi, const std::function<CMatrix(const CMatrix&)>& f) {
  Spinor out;
  for (const auto& c : psi) out.push_back(f(c));
  return out;
}

Spinor spin_matrix_apply(const CMatrix& m, const Spinor& psi) {
  Spinor out(psi.size(), CMatrix::Zero(psi[0].rows(), psi[0].cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (m(i, j) != cplx{0.0}) out[i] += m(i, j) * psi[j];
    }
  }
  return out;
}

Spinor add(Spinor a, const Spinor& b) {
  for (size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  return a;
}

}  // namespace

CMatrix apply_minus_laplacian(const CMatrix& psi, double theta, const LadderTable& table) {
  CMatrix out = CMatrix::Zero(psi.rows(), psi.cols());
  for (int mu = 1; mu <= 2; ++mu) out -= apply_partial(apply_partial(psi, mu, theta, table), mu, theta, table);
  return out;
}

CMatrix apply_xtilde_squared(const CMatrix& psi, double theta, const LadderTable& table) {
  CMatrix out = CMatrix::Zero(psi.rows(), psi.cols());
  for (int mu = 1; mu <= 2; ++mu) out += apply_xt(apply_xt(psi, mu, theta, table), mu, theta, table);
  return out;
}

CMatrix apply_landau_hamiltonian(const CMatrix& psi, double xi, double theta, const LadderTable& table) {
  CMatrix out = CMatrix::Zero(psi.rows(), psi.cols());
  for (int mu = 1; mu <= 2; ++mu) {
    auto p = [&](const CMatrix& v) { return CMatrix(-kI * apply_partial(v, mu, theta, table) + xi * apply_xt(v, mu, theta, table)); };
    out += p(p(psi));
  }
  return out;
}

std::vector<IdentityReport> square_identity_check(DiracKind kind, const DiracParams& params, int trunc,
                                                  const LadderTable& table, unsigned long long seed) {
  constexpr double kTol = 1e-9;
  const double th = params.theta;
  const SpinorOperator d = build_dirac(kind, params, trunc, table);
  const Spinor psi = random_interior_spinor(d.spin(), trunc, 2, seed);
  const Spinor dd = d.apply(d.apply(psi));
  std::vector<IdentityReport> out;
  auto lap = [&](const CMatrix& c) { return apply_minus_laplacian(c, th, table); };
  auto xt2 = [&](const CMatrix& c) { return apply_xtilde_squared(c, th, table); };

  switch (kind) {
    case DiracKind::D0: {
      out.push_back({"D0^2 = -Laplacian x 1", relative_residual(dd, scalar_op(psi, lap)), kTol});
      break;
    }
    case DiracKind::D1:
    case DiracKind::D2:
    case DiracKind::HarmonicAbstract: {
      const double om = params.omega;
      const DiracMatrices dm = dirac_matrices(kind, params);
      // 2iΩ γ^μ γ^{ν+2} Θ⁻¹_{νμ} with γ^{ν+2} = -q^ν/Ω and Θ⁻¹ = θ⁻¹[[0,-1],[1,0]].
      const double tinv[2][2] = {{0.0, -1.0 / th}, {1.0 / th, 0.0}};
      CMatrix spin_term = CMatrix::Zero(d.spin(), d.spin());
      for (int mu = 0; mu < 2; ++mu) {
        for (int nu = 0; nu < 2; ++nu) spin_term += -2.0 * kI * dm.p[mu] * dm.q[nu] * tinv[nu][mu];
      }
      const Spinor hh = scalar_op(psi, [&](const CMatrix& c) { return CMatrix(lap(c) + om * om * xt2(c)); });
      out.push_back({"harmonic square identity", relative_residual(dd, add(hh, spin_matrix_apply(spin_term, psi))),
                     kTol});
      if (kind != DiracKind::HarmonicAbstract) {
        const auto& s = pauli();
        const CMatrix quoted = (-2.0 * om / th) * (kron(s[0], s[0]) + kron(s[1], s[1]));
        out.push_back({"spin term = -(2 Omega/theta) sigma^mu x sigma^mu",
                       (spin_term - quoted).cwiseAbs().maxCoeff() / std::max(1.0, quoted.cwiseAbs().maxCoeff()), 1e-14});
        const SpinorOperator other =
            build_dirac(kind == DiracKind::D1 ? DiracKind::D2 : DiracKind::D1, params, trunc, table);
        out.push_back({"D1^2 = D2^2", relative_residual(dd, other.apply(other.apply(psi))), kTol});
      }
      break;
    }
    case DiracKind::Landau: {
      const double xi = params.xi;
      const Spinor hl = scalar_op(psi, [&](const CMatrix& c) { return apply_landau_hamiltonian(c, xi, th, table); });
      const CMatrix s3 = (-4.0 * xi / th) * pauli()[2];
      out.push_back({"Landau square = H_L x 1 - (4 xi/theta) sigma^3", relative_residual(dd, add(hl, spin_matrix_apply(s3, psi))),
                     kTol});
      // Expanded form -∂² + ξ²x̃² - 2iξ x̃_μ·∂_μ.
      const Spinor expanded = scalar_op(psi, [&](const CMatrix& c) {
        CMatrix r = lap(c) + xi * xi * xt2(c);
        for (int mu = 1; mu <= 2; ++mu) r += -2.0 * kI * xi * apply_xt(apply_partial(c, mu, th, table), mu, th, table);
        return r;
      });
      out.push_back({"H_L = P_mu P_mu", relative_residual(hl, expanded), kTol});
      break;
    }
    case DiracKind::Twisted: {
      DiracParams lp = params;
      lp.xi = -params.xi;
      const SpinorOperator dm = build_dirac(DiracKind::Landau, lp, trunc, table);
      lp.xi = params.xi;
      const SpinorOperator dp = build_dirac(DiracKind::Landau, lp, trunc, table);
      const Spinor up = dm.apply({psi[0], psi[1]});
      const Spinor lo = dp.apply({psi[2], psi[3]});
      out.push_back({"twisted = diag(D_{-xi}, D_xi)", relative_residual(d.apply(psi), {up[0], up[1], lo[0], lo[1]}), kTol});
      const Spinor up2 = dm.apply(dm.apply({psi[0], psi[1]}));
      const Spinor lo2 = dp.apply(dp.apply({psi[2], psi[3]}));
      out.push_back({"twisted square = diag(D_{-xi}^2, D_xi^2)", relative_residual(dd, {up2[0], up2[1], lo2[0], lo2[1]}),
                     kTol});
      break;
    }
  }
  return out;
}

TruncatedElement xtilde_element(int mu, int trunc, double theta, const LadderTable& table) {
  return xtilde_apply(TruncatedElement::identity(trunc, theta), mu, XMode::StarLeft, table);
}

TruncatedElement connection_apply(const TruncatedElement& a, int mu, const TruncatedElement& a_mu,
                                  const LadderTable& table) {
  TruncatedElement r = derivative(a, mu == 1 ? Derivative::X1 : Derivative::X2, table);
  r -= kI * star(a_mu, a);
  return r;
}

TruncatedElement covariant_derivative(const TruncatedElement& a, int mu, double lambda, const LadderTable& table) {
  TruncatedElement r = derivative(a, mu == 1 ? Derivative::X1 : Derivative::X2, table);
  r += (kI * lambda) * xtilde_apply(a, mu, XMode::StarLeft, table);
  return r;
}

TruncatedElement gauge_transform(const TruncatedElement& a_mu, const TruncatedElement& g, int mu,
                                 const LadderTable& table, double tol) {
  require_compatible(a_mu, g);
  const CMatrix one = CMatrix::Identity(g.trunc(), g.trunc());
  const double u1 = (g.coeffs().adjoint() * g.coeffs() - one).cwiseAbs().maxCoeff();
  const double u2 = (g.coeffs() * g.coeffs().adjoint() - one).cwiseAbs().maxCoeff();
  if (u1 > tol || u2 > tol) {
    throw PreconditionError("gauge element is not unitary (defect " + format_sig(std::max(u1, u2), 3) + ")");
  }
  const TruncatedElement gd = involution(g);
  TruncatedElement r = star(star(gd, a_mu), g);
  r += kI * star(gd, derivative(g, mu == 1 ? Derivative::X1 : Derivative::X2, table));
  return r;
}

std::vector<IdentityReport> connection_identity_check(double xi, double theta, int trunc, const LadderTable& table,
                                                      unsigned long long seed) {
  constexpr double kTol = 1e-9;
  std::vector<IdentityReport> out;
  const Spinor comps = random_interior_spinor(2, trunc, 2, seed);
  const TruncatedElement a(comps[0], theta);
  double r_inv = 0.0;
  for (int mu = 1; mu <= 2; ++mu) {
    const CMatrix lhs = covariant_derivative(a, mu, 0.5, table).coeffs();
    const CMatrix rhs = 0.5 * kI * xtilde_apply(a, mu, XMode::StarRight, table).coeffs();
    r_inv = std::max(r_inv, (lhs - rhs).cwiseAbs().maxCoeff() / std::max(1e-300, lhs.cwiseAbs().maxCoeff()));
  }
  out.push_back({"invariant connection = (i/2) a * xt", r_inv, kTol});

  if (xi != -1.0) {
    DiracParams p;
    p.theta = theta;
    p.xi = xi;
    const SpinorOperator d = build_dirac(DiracKind::Landau, p, trunc, table);
    const double lambda = xi / (1.0 + xi);
    const auto& s = pauli();
    Spinor cov(2, CMatrix::Zero(trunc, trunc));
    for (int mu = 1; mu <= 2; ++mu) {
      Spinor nab;
      for (const auto& c : comps) nab.push_back(covariant_derivative(TruncatedElement(c, theta), mu, lambda, table).coeffs());
      cov = add(cov, spin_matrix_apply((-kI * (1.0 + xi)) * s[mu - 1], nab));
    }
    out.push_back({"covariant Dirac operator", relative_residual(d.apply(comps), cov), kTol});
  }
  return out;
}

std::vector<double> hermitian_eigenvalues(const SpMatrix& h) {
  const int n = static_cast<int>(h.rows());
  if (h.rows() != h.cols()) throw DimensionError("spectrum needs a square operator");
  std::vector<int> parent(static_cast<size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  // Couplings below 1e-10 of the largest entry are calibration noise between
  // sectors that the operators conserve exactly.
  double scale = 0.0;
  for (int k = 0; k < h.outerSize(); ++k) {
    for (SpMatrix::InnerIterator it(h, k); it; ++it) scale = std::max(scale, std::abs(it.value()));
  }
  const double cut = 1e-10 * scale;
  for (int k = 0; k < h.outerSize(); ++k) {
    for (SpMatrix::InnerIterator it(h, k); it; ++it) {
      if (std::abs(it.value()) <= cut) continue;
      const int a = find(static_cast<int>(it.row()));
      const int b = find(static_cast<int>(it.col()));
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  }
  std::vector<std::vector<int>> comps;
  std::vector<int> comp_of(static_cast<size_t>(n), -1);
  std::vector<int> local(static_cast<size_t>(n), 0);
  for (int i = 0; i < n; ++i) {
    const int r = find(i);
    if (comp_of[r] < 0) {
      comp_of[r] = static_cast<int>(comps.size());
      comps.emplace_back();
    }
    local[i] = static_cast<int>(comps[comp_of[r]].size());
    comps[comp_of[r]].push_back(i);
  }
  std::vector<CMatrix> dense(comps.size());
  for (size_t c = 0; c < comps.size(); ++c) dense[c] = CMatrix::Zero(comps[c].size(), comps[c].size());
  for (int k = 0; k < h.outerSize(); ++k) {
    for (SpMatrix::InnerIterator it(h, k); it; ++it) {
      const int c = comp_of[find(static_cast<int>(it.row()))];
      if (c != comp_of[find(static_cast<int>(it.col()))]) continue;
      dense[c](local[it.row()], local[it.col()]) += it.value();
    }
  }
  std::vector<double> ev;
  ev.reserve(static_cast<size_t>(n));
  for (auto& m : dense) {
    if (m.rows() == 1) {
      ev.push_back(m(0, 0).real());
      continue;
    }
    const CMatrix herm = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> es(herm, Eigen::EigenvaluesOnly);
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) ev.push_back(es.eigenvalues()(i));
  }
  std::sort(ev.begin(), ev.end());
  return ev;
}

std::vector<SpectrumCluster> cluster_eigenvalues(const std::vector<double>& ev, double tol) {
  std::vector<SpectrumCluster> out;
  size_t i = 0;
  while (i < ev.size()) {
    size_t j = i + 1;
    while (j < ev.size() && ev[j] - ev[i] <= tol * std::max(1.0, std::abs(ev[i]))) ++j;
    double sum = 0.0;
    for (size_t k = i; k < j; ++k) sum += ev[k];
    out.push_back({static_cast<int>(out.size()), sum / static_cast<double>(j - i), static_cast<int>(j - i)});
    i = j;
  }
  return out;
}

namespace {

SpMatrix stencil_matrix(const LadderStencil& s, int n) {
  const Multipliers mul = multipliers(s, n);
  std::vector<Eigen::Triplet<cplx>> t;
  for (int k = 0; k < mul.left.outerSize(); ++k) {
    for (SpMatrix::InnerIterator it(mul.left, k); it; ++it) {
      for (int c = 0; c < n; ++c) t.emplace_back(it.row() + n * c, it.col() + n * c, it.value());
    }
  }
  for (int k = 0; k < mul.right.outerSize(); ++k) {
    for (SpMatrix::InnerIterator it(mul.right, k); it; ++it) {
      for (int r = 0; r < n; ++r) t.emplace_back(r + n * it.col(), r + n * it.row(), it.value());
    }
  }
  SpMatrix m(n * n, n * n);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

}  // namespace

SpMatrix hamiltonian_matrix(Hamiltonian h, const DiracParams& params, int trunc, const LadderTable& table) {
  if (trunc < 2) throw DimensionError("truncation N must be at least 2");
  if (!(params.theta > 0.0)) throw DomainError("theta must be positive");
  const int ext = trunc + 2;
  const double th = params.theta;
  SpMatrix full(ext * ext, ext * ext);
  for (int mu = 1; mu <= 2; ++mu) {
    const SpMatrix dmu =
        stencil_matrix(derivative_stencil(mu == 1 ? Derivative::X1 : Derivative::X2, table, th), ext);
    const SpMatrix xmu = stencil_matrix(xtilde_stencil(mu, XMode::Pointwise, table, th), ext);
    if (h == Hamiltonian::Harmonic) {
      full += SpMatrix(-(dmu * dmu)) + SpMatrix(params.omega * params.omega * (xmu * xmu));
    } else {
      const SpMatrix p = SpMatrix(-kI * dmu) + SpMatrix(params.xi * xmu);
      full += SpMatrix(p * p);
    }
  }
  // Compression to the first trunc×trunc matrix units.
  std::vector<int> map(static_cast<size_t>(ext * ext), -1);
  for (int n = 0; n < trunc; ++n) {
    for (int m = 0; m < trunc; ++m) map[m + ext * n] = m + trunc * n;
  }
  std::vector<Eigen::Triplet<cplx>> t;
  for (int k = 0; k < full.outerSize(); ++k) {
    for (SpMatrix::InnerIterator it(full, k); it; ++it) {
      const int r = map[it.row()];
      const int c = map[it.col()];
      if (r >= 0 && c >= 0 && std::abs(it.value()) > 1e-13) t.emplace_back(r, c, it.value());
    }
  }
  SpMatrix out(trunc * trunc, trunc * trunc);
  out.setFromTriplets(t.begin(), t.end());
  return out;
}

namespace {

double lowest_spacing(const std::vector<SpectrumCluster>& c, int count) {
  std::vector<double> gaps;
  for (int i = 1; i < std::min<int>(count, static_cast<int>(c.size())); ++i) {
    gaps.push_back(c[i].eigenvalue - c[i - 1].eigenvalue);
  }
  if (gaps.empty()) return 0.0;
  std::sort(gaps.begin(), gaps.end());
  return gaps[gaps.size() / 2];
}

}  // namespace

SpectrumReport hamiltonian_spectrum(Hamiltonian h, const DiracParams& params, int trunc, const LadderTable& table,
                                    double cluster_tol) {
  SpectrumReport r;
  r.eigenvalues = hermitian_eigenvalues(hamiltonian_matrix(h, params, trunc, table));
  r.clusters = cluster_eigenvalues(r.eigenvalues, cluster_tol);
  r.measured_spacing = lowest_spacing(r.clusters, 5);
  r.stated_spacing = h == Hamiltonian::Harmonic ? params.omega / params.theta : 8.0 * std::abs(params.xi) / params.theta;
  r.prefactor_ratio = r.stated_spacing > 0.0 ? r.measured_spacing / r.stated_spacing : 0.0;
  return r;
}

SpectrumReport dirac_spectrum(const SpinorOperator& d, double cluster_tol) {
  SpectrumReport r;
  r.eigenvalues = hermitian_eigenvalues(d.assemble());
  r.clusters = cluster_eigenvalues(r.eigenvalues, cluster_tol);
  return r;
}

std::string spectrum_to_csv(const SpectrumReport& r) {
  std::string out = "cluster_index,eigenvalue,multiplicity\n";
  for (const auto& c : r.clusters) {
    out += std::to_string(c.index) + "," + format_double(c.eigenvalue) + "," + std::to_string(c.multiplicity) + "\n";
  }
  return out;
}

}  // namespace ncg
