#include "sparselab/design.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "sparselab/errors.hpp"
#include "sparselab/rng.hpp"

namespace sparselab {

namespace {

constexpr double kNormTol = 1e-10;
constexpr int kRejectionBudget = 1000;

template <typename... Args>
std::string concat(const Args&... args) {
  std::ostringstream os;
  (os << ... << args);
  return os.str();
}

// Orthonormal m x d basis drawn from the Haar measure (QR of a Gaussian block).
Matrix random_orthonormal(Index m, Index d, Rng& rng) {
  Matrix g(m, d);
  for (Index c = 0; c < d; ++c) g.col(c) = rng.gaussian(m);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(m, d);
  // Fix the sign convention so the basis is a deterministic function of g.
  const Matrix r = qr.matrixQR().topLeftCorner(d, d).triangularView<Eigen::Upper>();
  for (Index c = 0; c < d; ++c)
    if (r(c, c) < 0) q.col(c) = -q.col(c);
  return q;
}

}  // namespace

void DesignParams::validate() const {
  if (m <= 0 || p <= 0 || k <= 0)
    throw InfeasibleParams(concat("m, p, k must be positive (m=", m, ", p=", p, ", k=", k, ")"));
  if (group_size < 0) throw InfeasibleParams("group_size must be nonnegative");
  if (k > m) throw InfeasibleParams(concat("k=", k, " exceeds m=", m));
  if (k * (1 + group_size) > p)
    throw InfeasibleParams(concat("k*(1+group_size)=", k * (1 + group_size), " exceeds p=", p));
  if (!(rho_out_max > 0.0 && rho_out_max < rho_in && rho_in < 1.0))
    throw InfeasibleParams(concat("need 0 < rho_out_max < rho_in < 1 (rho_out_max=", rho_out_max,
                                  ", rho_in=", rho_in, ")"));
  if (!(support_gram_offdiag >= 0.0 && support_gram_offdiag <= rho_out_max))
    throw InfeasibleParams("support_gram_offdiag must lie in [0, rho_out_max]");
  if (k >= 2 && !(support_gram_offdiag < 1.0 / static_cast<double>(k - 1)))
    throw InfeasibleParams("support Gram not positive definite: need gamma < 1/(k-1)");
  if (!(duplicate_tilt >= 0.0 && duplicate_tilt < 1.0))
    throw InfeasibleParams("duplicate_tilt must lie in [0, 1)");
  if (group_size > 0 && m <= k)
    throw InfeasibleParams("near-duplicates need m > k to leave the prototype span");
}

DesignMatrix::DesignMatrix(Matrix columns, Support true_support, std::map<Index, Support> groups,
                           DesignParams params)
    : columns_(std::move(columns)),
      true_support_(std::move(true_support)),
      groups_(std::move(groups)),
      params_(params) {
  const Index p = columns_.cols();
  for (Index j = 0; j < p; ++j) {
    const double nrm = columns_.col(j).norm();
    if (std::abs(nrm - 1.0) > kNormTol)
      throw InfeasibleParams(concat("column ", j, " has norm ", nrm, ", expected 1"));
  }
  std::sort(true_support_.begin(), true_support_.end());
  std::set<Index> seen;
  for (Index j : true_support_) {
    if (j < 0 || j >= p) throw InfeasibleParams(concat("support index ", j, " out of range"));
    if (!seen.insert(j).second) throw InfeasibleParams(concat("duplicate support index ", j));
  }
  for (auto& [owner, members] : groups_) {
    if (!std::binary_search(true_support_.begin(), true_support_.end(), owner))
      throw InfeasibleParams(concat("group owner ", owner, " is not in the true support"));
    std::sort(members.begin(), members.end());
    for (Index l : members) {
      if (l < 0 || l >= p) throw InfeasibleParams(concat("group member ", l, " out of range"));
      if (!seen.insert(l).second)
        throw InfeasibleParams(concat("group member ", l, " overlaps the support or another group"));
    }
  }
}

Matrix DesignMatrix::support_columns() const {
  Matrix out(rows(), static_cast<Index>(true_support_.size()));
  for (Index i = 0; i < out.cols(); ++i) out.col(i) = columns_.col(true_support_[i]);
  return out;
}

Support DesignMatrix::off_support() const {
  Support out;
  out.reserve(cols() - true_support_.size());
  for (Index j = 0; j < cols(); ++j)
    if (!std::binary_search(true_support_.begin(), true_support_.end(), j)) out.push_back(j);
  return out;
}

Index DesignMatrix::group_owner(Index col) const {
  if (std::binary_search(true_support_.begin(), true_support_.end(), col)) return col;
  for (const auto& [owner, members] : groups_)
    if (std::binary_search(members.begin(), members.end(), col)) return owner;
  return -1;
}

DesignMatrix build_design(const DesignParams& params) {
  params.validate();
  const Index m = params.m, p = params.p, k = params.k, gs = params.group_size;
  const Index n_dup = k * gs;
  const Index n_struct = k + n_dup;

  Rng rng(params.seed);

  // Column slots: [prototypes | duplicates | fillers] scattered by a random
  // permutation so that index order carries no information about S*.
  std::vector<Index> slot(static_cast<std::size_t>(p));
  std::iota(slot.begin(), slot.end(), Index{0});
  std::shuffle(slot.begin(), slot.end(), rng.engine());

  const Index d = std::min(m, n_struct);
  const Matrix basis = random_orthonormal(m, d, rng);

  // Prototypes: a_i = sum_r L(i, r) q_r with L L^T = (1 - gamma) I + gamma 1 1^T.
  const double gamma = params.support_gram_offdiag;
  Matrix target = Matrix::Constant(k, k, gamma);
  target.diagonal().setOnes();
  Eigen::LLT<Matrix> llt(target);
  if (llt.info() != Eigen::Success) throw InfeasibleParams("support Gram is not positive definite");
  const Matrix lower = llt.matrixL();
  Matrix protos = basis.leftCols(k) * lower.transpose();
  for (Index i = 0; i < k; ++i) protos.col(i).normalize();

  Matrix A = Matrix::Zero(m, p);
  Support support;
  std::map<Index, Support> groups;
  for (Index i = 0; i < k; ++i) {
    A.col(slot[i]) = protos.col(i);
    support.push_back(slot[i]);
  }

  const double rho = params.rho_in;
  const double perp = std::sqrt(1.0 - rho * rho);
  const double tilt = k > 1 ? params.duplicate_tilt : 0.0;
  const Matrix proto_basis = basis.leftCols(k);
  Index next_slot = k;
  for (Index i = 0; i < k; ++i) {
    const Vector aj = protos.col(i);
    Vector toward = Vector::Zero(m);
    if (tilt > 0.0) {
      toward = protos.col((i + 1) % k) - aj.dot(protos.col((i + 1) % k)) * aj;
      toward.normalize();
    }
    Support& members = groups[slot[i]];
    for (Index g = 0; g < gs; ++g, ++next_slot) {
      Vector z;
      if (next_slot < d) {
        z = basis.col(next_slot);
      } else {
        // Out of fresh orthogonal directions: project a random draw off the prototype span.
        do {
          z = rng.gaussian(m);
          z -= proto_basis * (proto_basis.transpose() * z);
        } while (z.norm() < 1e-8);
        z.normalize();
      }
      if (tilt > 0.0) z = tilt * toward + std::sqrt(1.0 - tilt * tilt) * z;
      Vector col = rho * aj + perp * z;
      col.normalize();
      A.col(slot[next_slot]) = col;
      members.push_back(slot[next_slot]);
    }
  }

  Matrix structured(m, n_struct);
  for (Index s = 0; s < n_struct; ++s) structured.col(s) = A.col(slot[s]);

  // Between-group bound among structured columns is a property of (rho_in, gamma, tilt).
  {
    const Matrix g = structured.transpose() * structured;
    for (Index a = k; a < n_struct; ++a) {
      const Index owner = (a - k) / std::max<Index>(gs, 1);
      for (Index b = 0; b < n_struct; ++b) {
        const bool same_group = b == owner || (b >= k && (b - k) / gs == owner);
        if (same_group) continue;
        if (std::abs(g(a, b)) > params.rho_out_max + 1e-8)
          throw InfeasibleParams(concat("near-duplicate coherence ", std::abs(g(a, b)),
                                        " exceeds rho_out_max=", params.rho_out_max,
                                        "; lower duplicate_tilt or support_gram_offdiag"));
      }
    }
  }

  for (Index s = n_struct; s < p; ++s) {
    bool placed = false;
    for (int attempt = 0; attempt < kRejectionBudget; ++attempt) {
      Vector f = rng.unit_vector(m);
      if ((structured.transpose() * f).cwiseAbs().maxCoeff() <= params.rho_out_max) {
        A.col(slot[s]) = f;
        placed = true;
        break;
      }
    }
    if (!placed)
      throw RejectionBudgetExhausted(concat("no filler within rho_out_max=", params.rho_out_max,
                                            " after ", kRejectionBudget, " draws (m=", m,
                                            ", structured columns=", n_struct, ")"));
  }

  return DesignMatrix(std::move(A), std::move(support), std::move(groups), params);
}

Matrix gram(const DesignMatrix& design) {
  Matrix g = design.columns().transpose() * design.columns();
  // Symmetrise exactly; the product is symmetric only up to rounding.
  return (0.5 * (g + g.transpose())).eval();
}

std::vector<std::string> structure_violations(const DesignMatrix& design, double tol) {
  std::vector<std::string> out;
  const Matrix g = gram(design);
  const auto& params = design.params();
  for (Index j = 0; j < design.cols(); ++j)
    if (std::abs(g(j, j) - 1.0) > 1e-10) out.push_back(concat("column ", j, " not unit norm"));
  for (const auto& [owner, members] : design.groups()) {
    for (Index l : members) {
      if (g(owner, l) < params.rho_in - tol)
        out.push_back(concat("<a_", owner, ", a_", l, "> = ", g(owner, l), " < rho_in"));
      for (Index r = 0; r < design.cols(); ++r) {
        if (r == owner || std::binary_search(members.begin(), members.end(), r)) continue;
        if (std::abs(g(l, r)) > params.rho_out_max + tol)
          out.push_back(concat("|<a_", l, ", a_", r, ">| = ", std::abs(g(l, r)), " > rho_out_max"));
      }
    }
  }
  return out;
}

DesignMatrix identity_design(Index n, Support true_support) {
  DesignParams params;
  params.m = n;
  params.p = n;
  params.k = static_cast<Index>(true_support.size());
  params.group_size = 0;
  params.rho_in = 0.5;
  params.rho_out_max = 0.25;
  return DesignMatrix(Matrix::Identity(n, n), std::move(true_support), {}, params);
}

}  // namespace sparselab
