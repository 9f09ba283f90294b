// SPDX-License-Identifier: Apache-2.0
#include "dires/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <random>
#include <stdexcept>

#include "dires/threading.hpp"

namespace dires {

namespace {

// Matrix-free action of S = W^{1/2} G W^{1/2} for the 3D static kernel on a
// uniform voxel mesh (all weights equal), blocked for cache reuse.
class NewtonianAction3D {
 public:
  explicit NewtonianAction3D(const Mesh& mesh) : mesh_(mesh) {
    const int n = mesh.size();
    x_.resize(n);
    y_.resize(n);
    z_.resize(n);
    for (int i = 0; i < n; ++i) {
      x_[i] = mesh.centers[i][0];
      y_[i] = mesh.centers[i][1];
      z_[i] = mesh.centers[i][2];
    }
    w_ = mesh.weights[0];
    self_ = self_integral_static(3, w_);
  }

  int size() const { return static_cast<int>(x_.size()); }

  void apply(const Eigen::VectorXd& v, Eigen::VectorXd& out) const {
    const int n = size();
    out.resize(n);
    const double scale = w_ / (4.0 * kPi);
    const double* px = x_.data();
    const double* py = y_.data();
    const double* pz = z_.data();
    const double* pv = v.data();
    parallel_blocks(n, [&](int rb, int re) {
      constexpr int kBlock = 48;
      double acc[kBlock];
      for (int b = rb; b < re; b += kBlock) {
        const int m = std::min(kBlock, re - b);
        for (int t = 0; t < m; ++t) acc[t] = 0.0;
        for (int j = 0; j < n; ++j) {
          const double xj = px[j], yj = py[j], zj = pz[j], vj = pv[j];
          for (int t = 0; t < m; ++t) {
            const int i = b + t;
            const double dx = px[i] - xj;
            const double dy = py[i] - yj;
            const double dz = pz[i] - zj;
            const double r2 = dx * dx + dy * dy + dz * dz;
            // the diagonal contributes 0 here and is patched below
            acc[t] += (i == j) ? 0.0 : vj / std::sqrt(r2);
          }
        }
        for (int t = 0; t < m; ++t) out[b + t] = scale * acc[t] + self_ * pv[b + t];
      }
    });
  }

 private:
  const Mesh& mesh_;
  std::vector<double> x_, y_, z_;
  double w_ = 0.0, self_ = 0.0;
};

void orthogonalize(const std::vector<Eigen::VectorXd>& basis, Eigen::VectorXd& v) {
  for (int pass = 0; pass < 2; ++pass)
    for (const auto& q : basis) v -= q.dot(v) * q;
}

struct RawPair {
  double lambda;
  Eigen::VectorXd vec;  // orthonormal in the plain 2-norm (= weighted norm of phi)
  double residual;
};

// Deflated Lanczos with full reorthogonalization for the k largest eigenpairs.
// Exact lattice degeneracies are invisible to a single Krylov sequence, so
// converged pairs are deflated and the iteration restarts until k pairs are in
// hand.
template <class Action>
std::vector<RawPair> lanczos_topk(const Action& A, int n, int k, double tol, unsigned seed,
                                  int max_basis = 260) {
  std::vector<RawPair> found;
  std::vector<Eigen::VectorXd> deflate;
  std::mt19937 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  // A restart sees one copy per distinct eigenvalue, so degenerate clusters
  // need one deflated restart per copy.  Restarting stops once the largest
  // remaining eigenvalue falls strictly below the current k-th largest.
  const int max_restarts = 3 * k + 6;
  for (int restart = 0; restart < max_restarts; ++restart) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = gauss(rng);
    orthogonalize(deflate, v);
    const double nv = v.norm();
    if (nv < 1e-12) continue;
    v /= nv;

    std::vector<Eigen::VectorXd> V{v};
    std::vector<double> alpha, beta;
    Eigen::VectorXd u(n), prev = Eigen::VectorXd::Zero(n);
    const int want = std::max(1, k - static_cast<int>(found.size()));
    double top_new = -std::numeric_limits<double>::infinity();
    for (int m = 1; m <= max_basis; ++m) {
      A.apply(V.back(), u);
      if (m > 1) u -= beta.back() * prev;
      const double a = V.back().dot(u);
      alpha.push_back(a);
      u -= a * V.back();
      orthogonalize(deflate, u);
      orthogonalize(V, u);
      const double b = u.norm();

      const bool check = (m % 6 == 0) || b < 1e-14 || m == max_basis;
      if (check) {
        Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
        for (int i = 0; i < m; ++i) T(i, i) = alpha[i];
        for (int i = 0; i + 1 < m; ++i) T(i, i + 1) = T(i + 1, i) = beta[i];
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
        int converged_here = 0;
        for (int r = 0; r < m; ++r) {
          const double rhat = b * std::abs(es.eigenvectors()(m - 1, m - 1 - r));
          if (rhat <= tol)
            ++converged_here;
          else
            break;
        }
        if (converged_here >= want || b < 1e-14 || m == max_basis) {
          // harvest the contiguous converged block from the top
          for (int r = 0; r < std::min(converged_here, k + 2); ++r) {
            const int col = m - 1 - r;
            Eigen::VectorXd q = Eigen::VectorXd::Zero(n);
            for (int i = 0; i < m; ++i) q += es.eigenvectors()(i, col) * V[i];
            orthogonalize(deflate, q);
            const double qn = q.norm();
            if (qn < 1e-8) continue;  // already represented
            q /= qn;
            Eigen::VectorXd Aq(n);
            A.apply(q, Aq);
            const double lam = q.dot(Aq);
            found.push_back({lam, q, (Aq - lam * q).norm()});
            deflate.push_back(found.back().vec);
            top_new = std::max(top_new, lam);
          }
          break;
        }
      }
      if (b < 1e-14) break;
      beta.push_back(b);
      prev = V.back();
      V.push_back(u / b);
    }

    if (static_cast<int>(found.size()) >= k) {
      std::sort(found.begin(), found.end(),
                [](const RawPair& a, const RawPair& b) { return a.lambda > b.lambda; });
      const double kth = found[k - 1].lambda;
      if (top_new < kth - 1e-9 * std::max(1.0, std::abs(kth))) break;
    }
  }
  std::sort(found.begin(), found.end(),
            [](const RawPair& a, const RawPair& b) { return a.lambda > b.lambda; });
  if (static_cast<int>(found.size()) > k) found.resize(k);
  return found;
}

void fix_sign(const Mesh& mesh, Eigen::VectorXd& phi) {
  double mean = 0.0, amax = 0.0;
  for (int i = 0; i < mesh.size(); ++i) {
    mean += mesh.weights[i] * phi[i];
    amax = std::max(amax, std::abs(phi[i]));
  }
  const double tie = 1e-12 * std::sqrt(mesh.total_measure);
  if (std::abs(mean) > tie) {
    if (mean < 0.0) phi = -phi;
    return;
  }
  for (int i = 0; i < mesh.size(); ++i) {
    if (std::abs(phi[i]) > 1e-8 * amax) {
      if (phi[i] < 0.0) phi = -phi;
      return;
    }
  }
}

std::vector<SpectralPair> finalize_pairs(const Mesh& mesh, std::vector<RawPair> raw,
                                         double symmetry_tol = 1e-6) {
  std::vector<SpectralPair> pairs(raw.size());
  Eigen::VectorXd inv_sqw(mesh.size());
  for (int i = 0; i < mesh.size(); ++i) inv_sqw[i] = 1.0 / std::sqrt(mesh.weights[i]);
  for (size_t p = 0; p < raw.size(); ++p) {
    pairs[p].lambda = raw[p].lambda;
    pairs[p].residual = raw[p].residual;
    pairs[p].phi = raw[p].vec.cwiseProduct(inv_sqw);
    fix_sign(mesh, pairs[p].phi);
  }
  const auto clusters = cluster_eigenvalues(pairs);
  for (size_t p = 0; p < pairs.size(); ++p) {
    double gap = std::numeric_limits<double>::infinity();
    for (size_t q = 0; q < pairs.size(); ++q)
      if (clusters[q] != clusters[p])
        gap = std::min(gap, std::abs(pairs[q].lambda - pairs[p].lambda));
    pairs[p].multiplicity_gap = gap;
    pairs[p].symmetry = mesh.symmetric()
                            ? symmetry_class(mesh, pairs[p].phi, symmetry_tol)
                            : Symmetry::None;
  }
  return pairs;
}

}  // namespace

std::vector<int> cluster_eigenvalues(const std::vector<SpectralPair>& pairs, double cluster_tol) {
  std::vector<int> id(pairs.size(), 0);
  int current = 0;
  for (size_t p = 1; p < pairs.size(); ++p) {
    const double ref = std::abs(pairs[p - 1].lambda);
    if (std::abs(pairs[p].lambda - pairs[p - 1].lambda) > cluster_tol * std::max(ref, 1e-30))
      ++current;
    id[p] = current;
  }
  return id;
}

std::vector<SpectralPair> top_eigenpairs(const OperatorMatrix& op, int k) {
  const Mesh& mesh = *op.mesh;
  if (k < 1 || k > mesh.size())
    throw std::invalid_argument("top_eigenpairs: k out of range");
  if (op.kind == OperatorKind::HelmholtzPotential)
    throw std::invalid_argument("top_eigenpairs: newtonian or tilde kinds only");
  const Eigen::MatrixXd S = symmetrized_matrix(op);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
  if (es.info() != Eigen::Success) throw std::runtime_error("top_eigenpairs: eigensolver failed");
  std::vector<RawPair> raw(k);
  const int n = mesh.size();
  for (int p = 0; p < k; ++p) {
    raw[p].lambda = es.eigenvalues()[n - 1 - p];
    raw[p].vec = es.eigenvectors().col(n - 1 - p);
    raw[p].residual = (S * raw[p].vec - raw[p].lambda * raw[p].vec).norm();
  }
  return finalize_pairs(mesh, std::move(raw));
}

std::vector<SpectralPair> compute_spectrum(const Mesh& mesh, OperatorKind kind, int k,
                                           int dense_threshold) {
  if (mesh.size() <= dense_threshold) {
    const OperatorMatrix op =
        kind == OperatorKind::TildeNewtonian ? assemble_tilde(mesh) : assemble_newtonian(mesh);
    return top_eigenpairs(op, k);
  }
  if (kind != OperatorKind::Newtonian || mesh.dim != 3)
    throw std::invalid_argument("compute_spectrum: matrix-free path covers 3D newtonian only");
  NewtonianAction3D A(mesh);
  auto raw = lanczos_topk(A, mesh.size(), k, 1e-11, /*seed=*/20250808u);
  return finalize_pairs(mesh, std::move(raw));
}

KreinRutmanReport check_krein_rutman(const std::vector<SpectralPair>& pairs, double gap_tol_rel) {
  if (pairs.empty()) throw std::invalid_argument("check_krein_rutman: no pairs");
  KreinRutmanReport rep;
  const SpectralPair& p0 = pairs[0];
  rep.simple = p0.multiplicity_gap > gap_tol_rel * std::abs(p0.lambda);
  rep.relative_gap = p0.multiplicity_gap / std::abs(p0.lambda);
  rep.min_phi0 = std::numeric_limits<double>::infinity();
  for (int i = 0; i < p0.phi.size(); ++i) {
    if (p0.phi[i] < rep.min_phi0) {
      rep.min_phi0 = p0.phi[i];
      if (p0.phi[i] <= 0.0) rep.offending_cell = i;
    }
  }
  rep.pass = rep.simple && rep.min_phi0 > 0.0;
  if (rep.pass) rep.offending_cell = -1;
  return rep;
}

std::vector<DiluteDimerReport> dilute_dimer_analysis(const DomainSpec& base,
                                                     const std::vector<double>& L_values,
                                                     double h) {
  if (base.dimension != 3)
    throw std::invalid_argument("dilute_dimer_analysis: 3D bases only");
  DomainSpec single = base;
  single.resolution = h;
  const Mesh mesh0 = build_mesh(single);
  const auto spec0 = compute_spectrum(mesh0, OperatorKind::Newtonian, 1);
  const double lambda0 = spec0[0].lambda;
  const Eigen::VectorXd& phi0 = spec0[0].phi;

  std::vector<DiluteDimerReport> out;
  for (double L : L_values) {
    DomainSpec dspec = DomainSpec::dimer(base, L, h);
    const Mesh dm = build_mesh(dspec);
    const auto tmap = translation_map(mesh0, dm, L);

    Eigen::VectorXd tphi = Eigen::VectorXd::Zero(dm.size());
    for (int c = 0; c < dm.size(); ++c)
      if (tmap[c] >= 0) tphi[c] = phi0[tmap[c]];
    const Eigen::VectorXd rtphi = reflect(dm, tphi);

    const OperatorMatrix K = assemble_newtonian(dm);
    const Eigen::VectorXcd Kt = K.entries * tphi.cast<Complex>();
    double kI = 0.0;
    for (int c = 0; c < dm.size(); ++c) kI += dm.weights[c] * rtphi[c] * Kt[c].real();

    const auto pairs = compute_spectrum(dm, OperatorKind::Newtonian, 3);

    DiluteDimerReport rep;
    rep.L = L;
    rep.lambda_single = lambda0;
    rep.k_I = kI;
    rep.lambda_plus_pred = lambda0 + kI;
    rep.lambda_minus_pred = lambda0 - kI;
    rep.lambda_plus_meas = pairs[0].lambda;
    rep.lambda_minus_meas = pairs[1].lambda;
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    double op_ = 0.0, om_ = 0.0;
    for (int c = 0; c < dm.size(); ++c) {
      op_ += dm.weights[c] * pairs[0].phi[c] * (tphi[c] + rtphi[c]) * inv_sqrt2;
      om_ += dm.weights[c] * pairs[1].phi[c] * (tphi[c] - rtphi[c]) * inv_sqrt2;
    }
    rep.overlap_plus = std::abs(op_);
    rep.overlap_minus = std::abs(om_);
    out.push_back(rep);
  }
  return out;
}

void write_spectrum_csv(std::ostream& os, const std::vector<SpectralPair>& pairs) {
  os << "index,lambda,symmetry,gap,residual\n";
  os << std::setprecision(16) << std::scientific;
  for (size_t p = 0; p < pairs.size(); ++p)
    os << p << ',' << pairs[p].lambda << ',' << to_string(pairs[p].symmetry) << ','
       << pairs[p].multiplicity_gap << ',' << pairs[p].residual << '\n';
}

}  // namespace dires
