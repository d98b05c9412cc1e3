#pragma once

// Vector norms on R^n: representation, validation and evaluation.
//
// A NormSpec is an unchecked description (as parsed from input). Passing it
// through validate_norm_spec() yields a ValidatedNorm, the only type the
// analysis modules accept. Four families are supported:
//
//   lp                 |x|_p, 1 <= p <= inf
//   scaled             |x| = inner(T x), T nonsingular
//   polyhedral         Minkowski gauge of conv(vertices)
//   piecewise_orthant  |x| = inner_s(x) where s is the sign pattern of x
//
// Sign patterns use '+' for x_i >= 0 and '-' for x_i < 0, so zero coordinates
// belong to the '+' side. Pieces of a piecewise norm must agree on shared
// orthant faces; validation samples this (see Sampler below).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "logmeasure/linalg.hpp"
#include "logmeasure/lp_simplex.hpp"

namespace logmeasure {

struct NormSpec;
using NormSpecPtr = std::shared_ptr<const NormSpec>;

struct LpSpec {
  double p = 2.0;  // +inf encodes the max norm
};

struct ScaledSpec {
  Matrix T;
  NormSpecPtr inner;
};

struct PolyhedralSpec {
  std::vector<Vector> vertices;
};

struct OrthantCase {
  std::string signs;
  NormSpecPtr inner;
};

struct PiecewiseOrthantSpec {
  std::vector<OrthantCase> cases;
};

struct NormSpec {
  std::variant<LpSpec, ScaledSpec, PolyhedralSpec, PiecewiseOrthantSpec> kind;
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline NormSpec lp_spec(double p) { return NormSpec{LpSpec{p}}; }

inline NormSpec scaled_spec(Matrix t, NormSpec inner) {
  return NormSpec{ScaledSpec{std::move(t), std::make_shared<const NormSpec>(std::move(inner))}};
}

inline NormSpec polyhedral_spec(std::vector<Vector> vertices) {
  return NormSpec{PolyhedralSpec{std::move(vertices)}};
}

inline NormSpec piecewise_orthant_spec(const std::vector<std::pair<std::string, NormSpec>>& cases) {
  PiecewiseOrthantSpec pw;
  for (const auto& [signs, inner] : cases) pw.cases.push_back({signs, std::make_shared<const NormSpec>(inner)});
  return NormSpec{std::move(pw)};
}

// --------------------------------------------------------------------------
// Geometry helpers shared by validation and vertex enumeration.
// --------------------------------------------------------------------------
namespace geometry {

inline constexpr double kDedupTol = 1e-9;

inline bool same_point(const Vector& a, const Vector& b, double tol = kDedupTol) {
  return (a - b).cwiseAbs().maxCoeff() <= tol;
}

inline std::vector<Vector> dedup(const std::vector<Vector>& pts, double tol = kDedupTol) {
  std::vector<Vector> out;
  for (const auto& p : pts) {
    bool seen = false;
    for (const auto& q : out)
      if (same_point(p, q, tol)) {
        seen = true;
        break;
      }
    if (!seen) out.push_back(p);
  }
  return out;
}

inline double cross2(const Vector& o, const Vector& a, const Vector& b) {
  return (a(0) - o(0)) * (b(1) - o(1)) - (a(1) - o(1)) * (b(0) - o(0));
}

/// Strictly convex hull of planar points, counter-clockwise (Andrew's monotone chain).
inline std::vector<Vector> convex_hull_2d(std::vector<Vector> pts) {
  if (pts.size() < 3) return pts;
  std::sort(pts.begin(), pts.end(), [](const Vector& a, const Vector& b) {
    return a(0) < b(0) || (a(0) == b(0) && a(1) < b(1));
  });
  double scale = 0.0;
  for (const auto& p : pts) scale = std::max(scale, p.cwiseAbs().maxCoeff());
  const double tol = 1e-12 * std::max(1.0, scale * scale);
  std::vector<Vector> hull(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross2(hull[k - 2], hull[k - 1], pts[i]) <= tol) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross2(hull[k - 2], hull[k - 1], pts[i]) <= tol) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

/// True when p lies in conv(others), decided by an LP feasibility problem.
inline bool in_convex_hull(const Vector& p, const std::vector<Vector>& others) {
  if (others.empty()) return false;
  const Eigen::Index n = p.size();
  const Eigen::Index m = static_cast<Eigen::Index>(others.size());
  Matrix a(n + 1, m);
  for (Eigen::Index k = 0; k < m; ++k) {
    a.col(k).head(n) = others[static_cast<std::size_t>(k)];
    a(n, k) = 1.0;
  }
  Vector b(n + 1);
  b.head(n) = p;
  b(n) = 1.0;
  return lp::feasible(a, b, 1e-11);
}

/// Extreme points of conv(pts); input is assumed deduplicated.
inline std::vector<Vector> extreme_points(const std::vector<Vector>& pts) {
  if (pts.empty()) return pts;
  const Eigen::Index n = pts.front().size();
  if (n == 1) {
    auto [lo, hi] = std::minmax_element(pts.begin(), pts.end(), [](const Vector& a, const Vector& b) { return a(0) < b(0); });
    if (same_point(*lo, *hi)) return {*lo};
    return {*hi, *lo};
  }
  if (n == 2) {
    auto hull = convex_hull_2d(pts);
    // Preserve the caller's ordering for stable downstream witnesses.
    std::vector<Vector> out;
    for (const auto& p : pts)
      for (const auto& h : hull)
        if (same_point(p, h, 0.0)) {
          out.push_back(p);
          break;
        }
    return out;
  }
  std::vector<Vector> kept = pts;
  for (std::size_t k = 0; k < kept.size();) {
    std::vector<Vector> others;
    for (std::size_t j = 0; j < kept.size(); ++j)
      if (j != k) others.push_back(kept[j]);
    if (in_convex_hull(kept[k], others))
      kept.erase(kept.begin() + static_cast<std::ptrdiff_t>(k));
    else
      ++k;
  }
  return kept;
}

inline std::size_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return static_cast<std::size_t>(std::llround(r));
}

/// Calls f(indices) for every k-subset of {0..n-1} in lexicographic order.
template <typename F>
void for_each_subset(std::size_t n, std::size_t k, F&& f) {
  if (k > n) return;
  std::vector<std::size_t> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    f(idx);
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

inline constexpr std::size_t kMaxSubsetEnumeration = 2'000'000;

/// Halfspace g.x <= h.
struct Halfspace {
  Vector g;
  double h;
};

/// Vertices of {x : g_k.x <= h_k} by enumerating n-subsets of active constraints.
inline std::vector<Vector> vertices_of_halfspaces(const std::vector<Halfspace>& cons, Eigen::Index n) {
  const std::size_t m = cons.size();
  if (binomial(m, static_cast<std::size_t>(n)) > kMaxSubsetEnumeration)
    throw Error(ErrorCode::UnsupportedDimension, "too many constraints for vertex enumeration");
  std::vector<Vector> out;
  Matrix a(n, n);
  Vector b(n);
  for_each_subset(m, static_cast<std::size_t>(n), [&](const std::vector<std::size_t>& idx) {
    for (Eigen::Index r = 0; r < n; ++r) {
      a.row(r) = cons[idx[static_cast<std::size_t>(r)]].g.transpose();
      b(r) = cons[idx[static_cast<std::size_t>(r)]].h;
    }
    Eigen::FullPivLU<Matrix> lu(a);
    lu.setThreshold(1e-12);
    if (lu.rank() < n) return;
    const Vector x = lu.solve(b);
    if (!x.allFinite()) return;
    for (const auto& c : cons)
      if (c.g.dot(x) > c.h + 1e-9 * (1.0 + std::abs(c.h))) return;
    out.push_back(x);
  });
  return dedup(out);
}

/// Facet normals {a : a.x <= 1} of a full-dimensional, origin-centred polytope.
inline std::vector<Vector> facets_from_vertices(const std::vector<Vector>& verts) {
  const Eigen::Index n = verts.front().size();
  std::vector<Vector> out;
  if (n == 1) {
    double r = 0.0;
    for (const auto& v : verts) r = std::max(r, std::abs(v(0)));
    out.push_back(Vector::Constant(1, 1.0 / r));
    out.push_back(Vector::Constant(1, -1.0 / r));
    return out;
  }
  if (n == 2) {
    const auto hull = convex_hull_2d(verts);
    for (std::size_t k = 0; k < hull.size(); ++k) {
      const Vector& p = hull[k];
      const Vector& q = hull[(k + 1) % hull.size()];
      Vector normal(2);
      normal << q(1) - p(1), -(q(0) - p(0));
      out.push_back(normal / normal.dot(p));
    }
    return out;
  }
  if (binomial(verts.size(), static_cast<std::size_t>(n)) > kMaxSubsetEnumeration)
    throw Error(ErrorCode::UnsupportedDimension, "too many vertices for facet enumeration");
  Matrix a(n, n);
  for_each_subset(verts.size(), static_cast<std::size_t>(n), [&](const std::vector<std::size_t>& idx) {
    for (Eigen::Index r = 0; r < n; ++r) a.row(r) = verts[idx[static_cast<std::size_t>(r)]].transpose();
    Eigen::FullPivLU<Matrix> lu(a);
    lu.setThreshold(1e-12);
    if (lu.rank() < n) return;
    const Vector normal = lu.solve(Vector::Ones(n));
    for (const auto& v : verts)
      if (normal.dot(v) > 1.0 + 1e-9) return;
    out.push_back(normal);
  });
  return dedup(out);
}

}  // namespace geometry

// --------------------------------------------------------------------------
// Validated norm
// --------------------------------------------------------------------------

class ValidatedNorm;

namespace detail {

enum class NormKind { Lp, Scaled, Polyhedral, PiecewiseOrthant };

struct NormNode {
  NormKind kind = NormKind::Lp;
  Eigen::Index dim = 0;
  NormSpec spec;
  double p = 2.0;
  Matrix t, t_inv;
  std::shared_ptr<const NormNode> inner;
  std::vector<Vector> poly_vertices;
  Matrix poly_matrix;                  // vertices as columns, for the LP gauge
  std::vector<Vector> poly_facets;     // n <= 2 only
  std::vector<std::shared_ptr<const NormNode>> pieces;  // indexed by sign mask
  std::optional<std::vector<Vector>> ball_vertices;
};

inline std::uint64_t sign_mask(const Eigen::Ref<const Vector>& x) {
  std::uint64_t mask = 0;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (x(i) < 0.0) mask |= std::uint64_t{1} << i;
  return mask;
}

inline double lp_value(const Eigen::Ref<const Vector>& x, double p) {
  if (p == 1.0) return x.cwiseAbs().sum();
  if (p == 2.0) return x.norm();
  if (std::isinf(p)) return x.size() ? x.cwiseAbs().maxCoeff() : 0.0;
  const double m = x.cwiseAbs().maxCoeff();
  if (m == 0.0) return 0.0;
  return m * std::pow((x.cwiseAbs() / m).array().pow(p).sum(), 1.0 / p);
}

inline double polyhedral_gauge(const NormNode& node, const Eigen::Ref<const Vector>& x) {
  if (x.cwiseAbs().maxCoeff() == 0.0) return 0.0;
  if (!node.poly_facets.empty()) {
    double g = 0.0;
    for (const auto& a : node.poly_facets) g = std::max(g, a.dot(x));
    return g;
  }
  // min sum(mu) s.t. V mu = x, mu >= 0
  const auto res = lp::minimize(node.poly_matrix, x, Vector::Ones(node.poly_matrix.cols()));
  if (res.status != lp::Status::Optimal)
    throw Error(ErrorCode::DegenerateBall, "gauge program failed; origin not interior?");
  return res.value;
}

inline double evaluate(const NormNode& node, const Eigen::Ref<const Vector>& x) {
  switch (node.kind) {
    case NormKind::Lp: return lp_value(x, node.p);
    case NormKind::Scaled: return evaluate(*node.inner, node.t * x);
    case NormKind::Polyhedral: return polyhedral_gauge(node, x);
    case NormKind::PiecewiseOrthant: return evaluate(*node.pieces[sign_mask(x)], x);
  }
  return 0.0;
}

}  // namespace detail

class ValidatedNorm {
 public:
  using Kind = detail::NormKind;

  Kind kind() const { return node_->kind; }
  Eigen::Index dim() const { return node_->dim; }

  /// Normalized spec: polyhedral vertices deduplicated and pruned to extreme points.
  const NormSpec& spec() const { return node_->spec; }

  /// Norm value without a dimension check; see eval_norm() for the checked form.
  double operator()(const Eigen::Ref<const Vector>& x) const { return detail::evaluate(*node_, x); }

  double lp_exponent() const { return node_->p; }
  const Matrix& scaling() const { return node_->t; }
  const Matrix& scaling_inverse() const { return node_->t_inv; }
  ValidatedNorm inner() const { return ValidatedNorm(node_->inner); }
  ValidatedNorm piece(std::uint64_t mask) const { return ValidatedNorm(node_->pieces.at(mask)); }
  const std::vector<Vector>& polytope_vertices() const { return node_->poly_vertices; }

  /// Unit-ball vertices computed at validation time, when the ball is a polytope
  /// small enough to enumerate. Plain lp(1)/lp(inf) are generated on demand instead.
  const std::optional<std::vector<Vector>>& cached_ball_vertices() const { return node_->ball_vertices; }

  bool is_lp(double p) const { return kind() == Kind::Lp && node_->p == p; }

  /// Collapses nested scalings over an lp base: returns (T, p) with |x| = |T x|_p.
  std::optional<std::pair<Matrix, double>> as_scaled_lp() const {
    Matrix t = Matrix::Identity(dim(), dim());
    const detail::NormNode* cur = node_.get();
    while (cur->kind == Kind::Scaled) {
      t = cur->t * t;
      cur = cur->inner.get();
    }
    if (cur->kind != Kind::Lp) return std::nullopt;
    return std::make_pair(t, cur->p);
  }

  std::string describe() const {
    switch (kind()) {
      case Kind::Lp: return std::isinf(node_->p) ? "lp(inf)" : "lp(" + trim(node_->p) + ")";
      case Kind::Scaled: return "scaled(" + inner().describe() + ")";
      case Kind::Polyhedral: return "polyhedral(" + std::to_string(node_->poly_vertices.size()) + " vertices)";
      case Kind::PiecewiseOrthant: return "piecewise_orthant(n=" + std::to_string(dim()) + ")";
    }
    return "?";
  }

 private:
  friend ValidatedNorm validate_norm_spec(const NormSpec&, std::optional<Eigen::Index>, std::uint64_t);
  explicit ValidatedNorm(std::shared_ptr<const detail::NormNode> node) : node_(std::move(node)) {}

  static std::string trim(double p) {
    std::string s = std::to_string(p);
    while (!s.empty() && s.back() == '0') s.pop_back();
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
  }

  std::shared_ptr<const detail::NormNode> node_;
};

/// Checked evaluation of |x|.
inline double eval_norm(const Vector& x, const ValidatedNorm& norm) {
  if (x.size() != norm.dim())
    throw Error(ErrorCode::DimensionMismatch,
                "vector has dimension " + std::to_string(x.size()) + ", norm has " + std::to_string(norm.dim()));
  if (!x.allFinite()) throw Error(ErrorCode::InvalidSpec, "vector has non-finite entries");
  return norm(x);
}

// --------------------------------------------------------------------------
// Sampler used by every probabilistic check in validation and classification:
// coordinates uniform on [-1, 1], each independently set to exactly zero with
// probability 0.15 so that orthant faces are exercised. Seeded explicitly.
// --------------------------------------------------------------------------
inline Vector sample_probe(Rng& rng, Eigen::Index n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::bernoulli_distribution zero(0.15);
  Vector x(n);
  for (Eigen::Index i = 0; i < n; ++i) x(i) = zero(rng) ? 0.0 : u(rng);
  if (x.cwiseAbs().maxCoeff() == 0.0) x(0) = 1.0;
  return x;
}

inline constexpr int kConvexityPairs = 1000;

namespace detail {

inline std::optional<Eigen::Index> infer_dim(const NormSpec& spec) {
  return std::visit(
      [](const auto& s) -> std::optional<Eigen::Index> {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, LpSpec>) {
          return std::nullopt;
        } else if constexpr (std::is_same_v<T, ScaledSpec>) {
          if (s.T.rows() > 0) return s.T.rows();
          return s.inner ? infer_dim(*s.inner) : std::nullopt;
        } else if constexpr (std::is_same_v<T, PolyhedralSpec>) {
          if (s.vertices.empty()) return std::nullopt;
          return s.vertices.front().size();
        } else {
          if (s.cases.empty()) return std::nullopt;
          return static_cast<Eigen::Index>(s.cases.front().signs.size());
        }
      },
      spec.kind);
}

inline std::optional<std::vector<Vector>> try_ball_vertices(const NormNode& node);

inline std::vector<Vector> facets_of(const NormNode& node) {
  const Eigen::Index n = node.dim;
  switch (node.kind) {
    case NormKind::Lp: {
      std::vector<Vector> out;
      if (node.p == 1.0) {
        require_enumerable(n);
        for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask)
          out.push_back(sign_diagonal(n, mask).diagonal());
      } else if (std::isinf(node.p)) {
        for (Eigen::Index i = 0; i < n; ++i) {
          out.push_back(Vector::Unit(n, i));
          out.push_back(-Vector::Unit(n, i));
        }
      } else {
        throw Error(ErrorCode::NotPolyhedral, "lp ball is not a polytope for this p");
      }
      return out;
    }
    case NormKind::Scaled: {
      auto inner = facets_of(*node.inner);
      for (auto& a : inner) a = node.t.transpose() * a;
      return inner;
    }
    case NormKind::Polyhedral:
      if (!node.poly_facets.empty()) return node.poly_facets;
      return geometry::facets_from_vertices(node.poly_vertices);
    case NormKind::PiecewiseOrthant: {
      auto verts = try_ball_vertices(node);
      if (!verts) throw Error(ErrorCode::NotPolyhedral, "piecewise norm has a non-polyhedral piece");
      return geometry::facets_from_vertices(*verts);
    }
  }
  return {};
}

inline std::vector<Vector> piecewise_vertices(const NormNode& node) {
  const Eigen::Index n = node.dim;
  if (n > 3) throw Error(ErrorCode::UnsupportedDimension, "piecewise vertex enumeration supports n <= 3");
  std::vector<Vector> candidates;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    std::vector<geometry::Halfspace> cons;
    for (const auto& a : facets_of(*node.pieces[mask])) cons.push_back({a, 1.0});
    for (Eigen::Index i = 0; i < n; ++i) {
      const double sigma = (mask >> i & 1u) ? -1.0 : 1.0;
      cons.push_back({-sigma * Vector::Unit(n, i), 0.0});
    }
    for (auto& v : geometry::vertices_of_halfspaces(cons, n))
      if (v.cwiseAbs().maxCoeff() > 1e-9) candidates.push_back(std::move(v));
  }
  return geometry::extreme_points(geometry::dedup(candidates));
}

inline std::vector<Vector> ball_vertices(const NormNode& node) {
  const Eigen::Index n = node.dim;
  switch (node.kind) {
    case NormKind::Lp: {
      std::vector<Vector> out;
      if (node.p == 1.0) {
        for (Eigen::Index i = 0; i < n; ++i) {
          out.push_back(Vector::Unit(n, i));
          out.push_back(-Vector::Unit(n, i));
        }
      } else if (std::isinf(node.p)) {
        require_enumerable(n);
        for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask)
          out.push_back(sign_diagonal(n, mask).diagonal());
      } else {
        throw Error(ErrorCode::NotPolyhedral, "lp ball is not a polytope for this p");
      }
      return out;
    }
    case NormKind::Scaled: {
      if (node.ball_vertices) return *node.ball_vertices;
      auto inner = ball_vertices(*node.inner);
      for (auto& v : inner) v = node.t_inv * v;
      return inner;
    }
    case NormKind::Polyhedral: return node.poly_vertices;
    case NormKind::PiecewiseOrthant:
      if (node.ball_vertices) return *node.ball_vertices;
      return piecewise_vertices(node);
  }
  return {};
}

inline std::optional<std::vector<Vector>> try_ball_vertices(const NormNode& node) {
  try {
    return ball_vertices(node);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NotPolyhedral || e.code() == ErrorCode::UnsupportedDimension) return std::nullopt;
    throw;
  }
}

inline std::shared_ptr<const NormNode> build(const NormSpec& spec, Eigen::Index n, std::uint64_t seed);

inline std::shared_ptr<const NormNode> build_lp(const LpSpec& s, Eigen::Index n) {
  if (std::isnan(s.p) || s.p < 1.0) throw Error(ErrorCode::InvalidSpec, "lp norm needs 1 <= p <= inf");
  auto node = std::make_shared<NormNode>();
  node->kind = NormKind::Lp;
  node->dim = n;
  node->p = s.p;
  node->spec = NormSpec{s};
  return node;
}

inline std::shared_ptr<const NormNode> build_scaled(const ScaledSpec& s, Eigen::Index n, std::uint64_t seed) {
  if (!s.inner) throw Error(ErrorCode::InvalidSpec, "scaled norm without inner norm");
  if (s.T.rows() != n || s.T.cols() != n)
    throw Error(ErrorCode::DimensionMismatch, "scaling matrix must be " + std::to_string(n) + "x" + std::to_string(n));
  require_finite(s.T, "scaling matrix");
  Eigen::JacobiSVD<Matrix> svd(s.T);
  const auto& sv = svd.singularValues();
  if (sv(n - 1) <= 1e-12 * sv(0) || sv(n - 1) == 0.0)
    throw Error(ErrorCode::SingularScaling, "scaling matrix is singular within tolerance (cond > 1e12)");
  auto node = std::make_shared<NormNode>();
  node->kind = NormKind::Scaled;
  node->dim = n;
  node->t = s.T;
  node->t_inv = accurate_inverse(s.T);
  node->inner = build(*s.inner, n, seed);
  node->spec = NormSpec{ScaledSpec{s.T, std::make_shared<const NormSpec>(node->inner->spec)}};
  if (n <= 10) node->ball_vertices = try_ball_vertices(*node);
  return node;
}

inline std::shared_ptr<const NormNode> build_polyhedral(const PolyhedralSpec& s, Eigen::Index n) {
  if (s.vertices.empty()) throw Error(ErrorCode::InvalidSpec, "polyhedral norm without vertices");
  for (const auto& v : s.vertices) {
    if (v.size() != n) throw Error(ErrorCode::DimensionMismatch, "vertices have mixed dimensions");
    if (!v.allFinite()) throw Error(ErrorCode::InvalidSpec, "vertex has non-finite entries");
  }
  auto verts = geometry::dedup(s.vertices);
  for (const auto& v : verts) {
    const bool has_neg = std::any_of(verts.begin(), verts.end(),
                                     [&](const Vector& w) { return geometry::same_point(w, -v); });
    if (!has_neg) {
      std::string coords;
      for (Eigen::Index i = 0; i < n; ++i) coords += (i ? ", " : "") + std::to_string(v(i));
      throw Error(ErrorCode::NotCentrallySymmetric, "vertex (" + coords + ") present but its negation is absent");
    }
  }
  Matrix vm(n, static_cast<Eigen::Index>(verts.size()));
  for (std::size_t k = 0; k < verts.size(); ++k) vm.col(static_cast<Eigen::Index>(k)) = verts[k];
  Eigen::FullPivLU<Matrix> lu(vm);
  lu.setThreshold(1e-10);
  if (lu.rank() < n) throw Error(ErrorCode::DegenerateBall, "vertices do not span R^n; origin is not interior");

  verts = geometry::extreme_points(verts);
  auto node = std::make_shared<NormNode>();
  node->kind = NormKind::Polyhedral;
  node->dim = n;
  node->poly_vertices = verts;
  node->poly_matrix.resize(n, static_cast<Eigen::Index>(verts.size()));
  for (std::size_t k = 0; k < verts.size(); ++k) node->poly_matrix.col(static_cast<Eigen::Index>(k)) = verts[k];
  if (n <= 2) node->poly_facets = geometry::facets_from_vertices(verts);
  node->ball_vertices = verts;
  node->spec = NormSpec{PolyhedralSpec{verts}};
  return node;
}

inline std::uint64_t parse_signs(const std::string& signs, Eigen::Index n) {
  if (static_cast<Eigen::Index>(signs.size()) != n)
    throw Error(ErrorCode::DimensionMismatch, "sign pattern '" + signs + "' has the wrong length");
  std::uint64_t mask = 0;
  for (std::size_t i = 0; i < signs.size(); ++i) {
    if (signs[i] == '-')
      mask |= std::uint64_t{1} << i;
    else if (signs[i] != '+')
      throw Error(ErrorCode::InvalidSpec, "sign pattern '" + signs + "' may only contain '+' and '-'");
  }
  return mask;
}

inline std::string mask_to_signs(std::uint64_t mask, Eigen::Index n) {
  std::string s(static_cast<std::size_t>(n), '+');
  for (Eigen::Index i = 0; i < n; ++i)
    if (mask >> i & 1u) s[static_cast<std::size_t>(i)] = '-';
  return s;
}

inline void check_piecewise_samples(const NormNode& node, std::uint64_t seed) {
  const Eigen::Index n = node.dim;
  Rng rng(seed);
  auto close = [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)}); };
  for (int k = 0; k < kConvexityPairs; ++k) {
    const Vector x = sample_probe(rng, n);
    const double fx = evaluate(node, x);
    // Every piece whose closed orthant contains x must agree there.
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
      bool contains = true;
      for (Eigen::Index i = 0; i < n && contains; ++i) {
        const bool neg = mask >> i & 1u;
        contains = neg ? x(i) <= 0.0 : x(i) >= 0.0;
      }
      if (contains && !close(fx, evaluate(*node.pieces[mask], x)))
        throw Error(ErrorCode::NotConvex, "pieces disagree on a shared orthant face");
    }
    if (!close(fx, evaluate(node, -x)))
      throw Error(ErrorCode::NotCentrallySymmetric, "|-x| != |x| on a sampled point");
  }
  for (int k = 0; k < kConvexityPairs; ++k) {
    const Vector x = sample_probe(rng, n);
    Vector y = sample_probe(rng, n);
    // Force a different orthant by flipping one random coordinate's sign.
    std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
    const Eigen::Index j = pick(rng);
    if ((x(j) < 0.0) == (y(j) < 0.0)) y(j) = -(y(j) == 0.0 ? 0.5 : y(j));
    const double lhs = evaluate(node, 0.5 * (x + y));
    const double rhs = 0.5 * (evaluate(node, x) + evaluate(node, y));
    if (lhs > rhs * (1.0 + 1e-12) + 1e-15) throw Error(ErrorCode::NotConvex, "midpoint convexity fails across orthants");
  }
}

inline std::shared_ptr<const NormNode> build_piecewise(const PiecewiseOrthantSpec& s, Eigen::Index n,
                                                       std::uint64_t seed) {
  if (s.cases.empty()) throw Error(ErrorCode::InvalidSpec, "piecewise norm without cases");
  require_enumerable(n);
  const std::size_t count = std::size_t{1} << n;
  auto node = std::make_shared<NormNode>();
  node->kind = NormKind::PiecewiseOrthant;
  node->dim = n;
  node->pieces.resize(count);
  for (const auto& c : s.cases) {
    if (!c.inner) throw Error(ErrorCode::InvalidSpec, "orthant case without inner norm");
    const auto mask = parse_signs(c.signs, n);
    if (node->pieces[mask]) throw Error(ErrorCode::InvalidSpec, "orthant '" + c.signs + "' assigned twice");
    node->pieces[mask] = build(*c.inner, n, seed);
  }
  PiecewiseOrthantSpec normalized;
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    if (!node->pieces[mask])
      throw Error(ErrorCode::InvalidSpec, "orthant '" + mask_to_signs(mask, n) + "' has no assigned norm");
    normalized.cases.push_back({mask_to_signs(mask, n), std::make_shared<const NormSpec>(node->pieces[mask]->spec)});
  }
  node->spec = NormSpec{std::move(normalized)};
  check_piecewise_samples(*node, seed);
  node->ball_vertices = try_ball_vertices(*node);
  return node;
}

inline std::shared_ptr<const NormNode> build(const NormSpec& spec, Eigen::Index n, std::uint64_t seed) {
  if (auto d = infer_dim(spec); d && *d != n)
    throw Error(ErrorCode::DimensionMismatch,
                "norm has dimension " + std::to_string(*d) + " where " + std::to_string(n) + " is required");
  return std::visit(
      [&](const auto& s) -> std::shared_ptr<const NormNode> {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, LpSpec>) return build_lp(s, n);
        else if constexpr (std::is_same_v<T, ScaledSpec>) return build_scaled(s, n, seed);
        else if constexpr (std::is_same_v<T, PolyhedralSpec>) return build_polyhedral(s, n);
        else return build_piecewise(s, n, seed);
      },
      spec.kind);
}

}  // namespace detail

/// Checks the norm axioms for `spec` and attaches its dimension. `dim` is
/// required when the spec does not pin one down (a bare lp norm); when both are
/// present they must agree. Sampled checks use `seed`.
inline ValidatedNorm validate_norm_spec(const NormSpec& spec, std::optional<Eigen::Index> dim = std::nullopt,
                                        std::uint64_t seed = kDefaultSeed) {
  const auto inferred = detail::infer_dim(spec);
  if (inferred && dim && *inferred != *dim)
    throw Error(ErrorCode::DimensionMismatch,
                "norm has dimension " + std::to_string(*inferred) + ", expected " + std::to_string(*dim));
  const auto n = inferred ? inferred : dim;
  if (!n || *n < 1) throw Error(ErrorCode::InvalidSpec, "norm dimension cannot be deduced");
  return ValidatedNorm(detail::build(spec, *n, seed));
}

/// Extreme points of the unit ball, closed under negation.
inline std::vector<Vector> unit_ball_vertices(const ValidatedNorm& norm) {
  if (norm.cached_ball_vertices()) return *norm.cached_ball_vertices();
  switch (norm.kind()) {
    case ValidatedNorm::Kind::Lp:
      if (norm.lp_exponent() == 1.0 || std::isinf(norm.lp_exponent())) break;
      throw Error(ErrorCode::NotPolyhedral, norm.describe() + " has no vertices");
    case ValidatedNorm::Kind::PiecewiseOrthant:
      if (norm.dim() > 3)
        throw Error(ErrorCode::UnsupportedDimension, "piecewise vertex enumeration supports n <= 3");
      throw Error(ErrorCode::NotPolyhedral, norm.describe() + " has a non-polyhedral piece");
    case ValidatedNorm::Kind::Scaled: {
      // Scaled lp(1)/lp(inf) in high dimension is not cached; derive it here.
      auto inner = unit_ball_vertices(norm.inner());
      for (auto& v : inner) v = norm.scaling_inverse() * v;
      return inner;
    }
    case ValidatedNorm::Kind::Polyhedral: return norm.polytope_vertices();
  }
  const Eigen::Index n = norm.dim();
  std::vector<Vector> out;
  if (norm.lp_exponent() == 1.0) {
    for (Eigen::Index i = 0; i < n; ++i) {
      out.push_back(Vector::Unit(n, i));
      out.push_back(-Vector::Unit(n, i));
    }
  } else {
    require_enumerable(n);
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask)
      out.push_back(sign_diagonal(n, mask).diagonal());
  }
  return out;
}

/// True when unit_ball_vertices() will succeed without enumerating beyond limits.
inline bool has_ball_vertices(const ValidatedNorm& norm) {
  if (norm.cached_ball_vertices()) return true;
  if (norm.kind() == ValidatedNorm::Kind::Lp)
    return norm.lp_exponent() == 1.0 || (std::isinf(norm.lp_exponent()) && norm.dim() <= 12);
  if (norm.kind() == ValidatedNorm::Kind::Scaled) return has_ball_vertices(norm.inner());
  return false;
}

}  // namespace logmeasure
