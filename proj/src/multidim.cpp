#include "mechkit/multidim.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

namespace mechkit {

struct VectorAllocation::Node {
  Kind kind = Kind::linear;
  int dimension = 0;
  std::vector<AllocationCurve> coordinates;
  std::vector<std::vector<Rational>> matrix;
  Rational cell_size{1};
  std::vector<int> cells_per_axis;
  std::vector<Vec> table;
};

namespace {

// Diagonal coordinates get their argument rescaled along rays, which only
// the piecewise families support.
bool reparam_supported(const AllocationCurve& c) {
  switch (c.kind()) {
    case CurveKind::piecewise_constant:
    case CurveKind::piecewise_polynomial:
      return true;
    case CurveKind::sum:
      return reparam_supported(c.left()) && reparam_supported(c.right());
    case CurveKind::scale:
      return reparam_supported(c.inner());
    default:
      return false;
  }
}

// curve(rate * t) as a curve in t, rate > 0.
AllocationCurve reparam(const AllocationCurve& c, const Rational& rate) {
  switch (c.kind()) {
    case CurveKind::piecewise_constant: {
      std::vector<Rational> bps;
      for (const auto& q : c.breakpoints()) bps.push_back(q / rate);
      return AllocationCurve::piecewise_constant(std::move(bps), c.values());
    }
    case CurveKind::piecewise_polynomial: {
      std::vector<Rational> bps;
      for (const auto& q : c.breakpoints()) bps.push_back(q / rate);
      std::vector<Polynomial> pieces;
      for (const auto& p : c.pieces()) pieces.push_back(p.compose_scale(rate));
      return AllocationCurve::piecewise_polynomial(std::move(bps), std::move(pieces));
    }
    case CurveKind::sum:
      return AllocationCurve::sum(reparam(c.left(), rate), reparam(c.right(), rate));
    case CurveKind::scale:
      return AllocationCurve::scale(c.factor(), reparam(c.inner(), rate));
    default:
      throw std::invalid_argument("ray reduction: unsupported coordinate curve");
  }
}

void check_vec(const Vec& x, int dimension, const char* what) {
  if (static_cast<int>(x.size()) != dimension)
    throw std::invalid_argument(std::string(what) + ": wrong dimension");
  for (const auto& v : x)
    if (v < Rational(0)) throw std::invalid_argument(std::string(what) + ": negative coordinate");
}

}  // namespace

VectorAllocation VectorAllocation::diagonal(std::vector<AllocationCurve> coordinates) {
  if (coordinates.empty()) throw std::invalid_argument("diagonal: no coordinates");
  for (const auto& c : coordinates)
    if (!reparam_supported(c))
      throw std::invalid_argument(
          "diagonal: coordinate curves must be piecewise families (ray reductions rescale "
          "their argument)");
  auto n = std::make_shared<Node>();
  n->kind = Kind::diagonal;
  n->dimension = static_cast<int>(coordinates.size());
  n->coordinates = std::move(coordinates);
  return VectorAllocation(std::move(n));
}

VectorAllocation VectorAllocation::linear(std::vector<std::vector<Rational>> matrix) {
  const auto dim = matrix.size();
  if (dim == 0) throw std::invalid_argument("linear: empty matrix");
  for (const auto& row : matrix) {
    if (row.size() != dim) throw std::invalid_argument("linear: matrix must be square");
    for (const auto& v : row)
      if (v < Rational(0)) throw std::invalid_argument("linear: negative matrix entry");
  }
  auto n = std::make_shared<Node>();
  n->kind = Kind::linear;
  n->dimension = static_cast<int>(dim);
  n->matrix = std::move(matrix);
  return VectorAllocation(std::move(n));
}

VectorAllocation VectorAllocation::bundle_table(int dimension, const Rational& cell_size,
                                                std::vector<int> cells_per_axis,
                                                std::vector<Vec> table) {
  if (dimension < 1) throw std::invalid_argument("bundle table: dimension must be >= 1");
  if (!(cell_size > Rational(0))) throw std::invalid_argument("bundle table: cell size <= 0");
  if (cells_per_axis.size() != static_cast<std::size_t>(dimension))
    throw std::invalid_argument("bundle table: need one extent per axis");
  std::size_t total = 1;
  for (int e : cells_per_axis) {
    if (e < 1) throw std::invalid_argument("bundle table: extent must be >= 1");
    total *= static_cast<std::size_t>(e) + 1;
    if (total > 65536) throw std::invalid_argument("bundle table: lattice too large");
  }
  if (table.size() != total)
    throw std::invalid_argument("bundle table: table size must match the lattice");
  for (const auto& v : table) check_vec(v, dimension, "bundle table entry");

  // strides for the flattened index, axis 0 fastest
  std::vector<std::size_t> stride(static_cast<std::size_t>(dimension));
  std::size_t s = 1;
  for (int a = 0; a < dimension; ++a) {
    stride[static_cast<std::size_t>(a)] = s;
    s *= static_cast<std::size_t>(cells_per_axis[static_cast<std::size_t>(a)]) + 1;
  }
  // axis-neighbor monotonicity implies monotonicity in the product order
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rem = idx;
    for (int a = 0; a < dimension; ++a) {
      const std::size_t ext = static_cast<std::size_t>(cells_per_axis[static_cast<std::size_t>(a)]);
      const std::size_t coord = rem / stride[static_cast<std::size_t>(a)] % (ext + 1);
      if (coord < ext) {
        const std::size_t up = idx + stride[static_cast<std::size_t>(a)];
        for (int d = 0; d < dimension; ++d)
          if (table[idx][static_cast<std::size_t>(d)] > table[up][static_cast<std::size_t>(d)])
            throw std::invalid_argument("bundle table: not monotone along axis " +
                                        std::to_string(a));
      }
    }
    (void)rem;
  }

  auto n = std::make_shared<Node>();
  n->kind = Kind::bundle_table;
  n->dimension = dimension;
  n->cell_size = cell_size;
  n->cells_per_axis = std::move(cells_per_axis);
  n->table = std::move(table);
  return VectorAllocation(std::move(n));
}

VectorAllocation::Kind VectorAllocation::kind() const { return node_->kind; }
int VectorAllocation::dimension() const { return node_->dimension; }

namespace {
[[noreturn]] void nd_wrong_kind() {
  throw std::invalid_argument("vector allocation: accessor on wrong kind");
}
}  // namespace

const std::vector<AllocationCurve>& VectorAllocation::coordinates() const {
  if (node_->kind != Kind::diagonal) nd_wrong_kind();
  return node_->coordinates;
}
const std::vector<std::vector<Rational>>& VectorAllocation::matrix() const {
  if (node_->kind != Kind::linear) nd_wrong_kind();
  return node_->matrix;
}
const Rational& VectorAllocation::cell_size() const {
  if (node_->kind != Kind::bundle_table) nd_wrong_kind();
  return node_->cell_size;
}
const std::vector<int>& VectorAllocation::cells_per_axis() const {
  if (node_->kind != Kind::bundle_table) nd_wrong_kind();
  return node_->cells_per_axis;
}
const std::vector<Vec>& VectorAllocation::table() const {
  if (node_->kind != Kind::bundle_table) nd_wrong_kind();
  return node_->table;
}

Rational dot(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: dimension mismatch");
  Rational acc(0);
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

namespace {

// per-axis cell coordinate of v: the number of positive lattice multiples
// strictly below v (left-closed cells), clamped to the table extent
std::size_t axis_cell(const Rational& v, const Rational& cell, int extent) {
  std::size_t c = 0;
  Rational boundary = cell;
  while (c < static_cast<std::size_t>(extent) && boundary < v) {
    ++c;
    boundary += cell;
  }
  return c;
}

Vec bundle_lookup(const VectorAllocation& f, const Vec& x) {
  const auto& extents = f.cells_per_axis();
  std::size_t idx = 0;
  std::size_t stride = 1;
  for (int a = 0; a < f.dimension(); ++a) {
    const auto sa = static_cast<std::size_t>(a);
    idx += stride * axis_cell(x[sa], f.cell_size(), extents[sa]);
    stride *= static_cast<std::size_t>(extents[sa]) + 1;
  }
  return f.table()[idx];
}

}  // namespace

Vec eval(const VectorAllocation& f, const Vec& x) {
  check_vec(x, f.dimension(), "eval");
  switch (f.kind()) {
    case VectorAllocation::Kind::diagonal: {
      Vec out;
      out.reserve(x.size());
      for (std::size_t j = 0; j < x.size(); ++j)
        out.push_back(*eval_exact(f.coordinates()[j], x[j]));
      return out;
    }
    case VectorAllocation::Kind::linear: {
      Vec out;
      out.reserve(x.size());
      for (const auto& row : f.matrix()) out.push_back(dot(row, x));
      return out;
    }
    case VectorAllocation::Kind::bundle_table:
      return bundle_lookup(f, x);
  }
  throw std::logic_error("eval: unreachable");
}

RayReduction ray_reduce(const VectorAllocation& f, const Vec& x) {
  check_vec(x, f.dimension(), "ray reduction");
  switch (f.kind()) {
    case VectorAllocation::Kind::diagonal: {
      // f(t x) . x = sum over j of x_j * c_j(x_j t)
      std::optional<AllocationCurve> acc;
      for (std::size_t j = 0; j < x.size(); ++j) {
        if (x[j].is_zero()) continue;
        AllocationCurve term =
            AllocationCurve::scale(x[j], reparam(f.coordinates()[j], x[j]));
        acc = acc ? AllocationCurve::sum(std::move(*acc), std::move(term)) : std::move(term);
      }
      if (!acc) return {x, AllocationCurve::constant(Rational(0))};
      return {x, std::move(*acc)};
    }
    case VectorAllocation::Kind::linear: {
      // f(t x) . x = t * (x . M x)
      Rational quad(0);
      const auto& mat = f.matrix();
      for (std::size_t i = 0; i < x.size(); ++i) quad += x[i] * dot(mat[i], x);
      return {x, AllocationCurve::polynomial(Polynomial({Rational(0), quad}))};
    }
    case VectorAllocation::Kind::bundle_table: {
      // piecewise constant in t; breakpoints where t * x_j crosses a lattice
      // multiple
      std::vector<Rational> bps;
      for (std::size_t j = 0; j < x.size(); ++j) {
        if (x[j].is_zero()) continue;
        for (int m = 1; m <= f.cells_per_axis()[j]; ++m)
          bps.push_back(Rational(m) * f.cell_size() / x[j]);
      }
      std::sort(bps.begin(), bps.end());
      bps.erase(std::unique(bps.begin(), bps.end()), bps.end());

      auto value_at = [&](const Rational& t) {
        Vec point;
        point.reserve(x.size());
        for (const auto& xi : x) point.push_back(t * xi);
        return dot(bundle_lookup(f, point), x);
      };
      std::vector<Rational> vals;
      vals.reserve(bps.size() + 1);
      // left-closed pieces: the value at a breakpoint belongs to the piece
      // below it, so each piece j is represented by its right endpoint
      for (const auto& q : bps) vals.push_back(value_at(q));
      vals.push_back(value_at(bps.empty() ? Rational(0) : bps.back() + Rational(1)));
      return {x, AllocationCurve::piecewise_constant(std::move(bps), std::move(vals))};
    }
  }
  throw std::logic_error("ray_reduce: unreachable");
}

RayMonotonicityReport is_ray_monotone(const VectorAllocation& f, const std::vector<Vec>& rays) {
  if (rays.empty()) throw std::invalid_argument("ray monotonicity: empty ray set");
  for (const Vec& ray : rays) {
    const RayReduction red = ray_reduce(f, ray);
    const MonotonicityReport rep = is_monotone(red.curve);
    if (!rep.monotone) return {false, RayWitness{ray, *rep.witness}};
  }
  return {true, std::nullopt};
}

Rational myerson_payment_nd_exact(const VectorAllocation& f, const Vec& x, const Rational& pivot) {
  RayReduction red = ray_reduce(f, x);
  MonotonicityReport rep = is_monotone(red.curve);
  if (!rep.monotone) throw NotRayMonotoneError(x, std::move(rep));
  // C + f_x(1) - integral of f_x over [0, 1]
  return *payment_exact(PaymentCurve::myerson_unchecked(red.curve, pivot), Rational(1));
}

IntervalBound myerson_payment_nd(const VectorAllocation& f, const Vec& x, const Rational& pivot) {
  return IntervalBound::from_exact(myerson_payment_nd_exact(f, x, pivot));
}

NdViolationReport check_ic_nd(const VectorAllocation& f,
                              const std::function<Rational(const Vec&)>& g,
                              const std::vector<std::pair<Vec, Vec>>& pairs,
                              const NdCheckOptions& opts) {
  struct CaseResult {
    std::vector<NdPairWitness> witnesses;
    std::size_t vector_pairs = 0;
    std::size_t scalar_checks = 0;
  };

  auto scaled = [](const Rational& t, const Vec& x) {
    Vec out;
    out.reserve(x.size());
    for (const auto& xi : x) out.push_back(t * xi);
    return out;
  };

  auto one_pair = [&](std::size_t idx) {
    const auto& [x, y] = pairs[idx];
    CaseResult r;

    // vector inequality g(y) - g(x) >= (f(y) - f(x)) . x
    const Rational lhs = g(y) - g(x);
    const Vec fy = eval(f, y);
    const Vec fx = eval(f, x);
    Vec df;
    df.reserve(fx.size());
    for (std::size_t i = 0; i < fx.size(); ++i) df.push_back(fy[i] - fx[i]);
    const Rational rhs = dot(df, x);
    ++r.vector_pairs;
    if (lhs < rhs - opts.tol) r.witnesses.push_back({x, y, lhs, rhs, false});

    // scalar route on the ray through x: g_x(t) - g_x(s) >= s (f_x(t) - f_x(s))
    const RayReduction red = ray_reduce(f, x);
    for (const Rational& s : opts.scalar_grid) {
      for (const Rational& t : opts.scalar_grid) {
        ++r.scalar_checks;
        const Rational slhs = g(scaled(t, x)) - g(scaled(s, x));
        const Rational srhs =
            s * (*eval_exact(red.curve, t) - *eval_exact(red.curve, s));
        if (slhs < srhs - opts.tol)
          r.witnesses.push_back({scaled(s, x), scaled(t, x), slhs, srhs, true});
      }
    }
    return std::vector<CaseResult>{std::move(r)};
  };

  auto results = detail::ordered_collect<CaseResult>(pairs.size(), opts.exec, one_pair);

  NdViolationReport report;
  for (auto& r : results) {
    report.pairs_checked += r.vector_pairs;
    report.scalar_checks += r.scalar_checks;
    for (auto& w : r.witnesses) report.witnesses.push_back(std::move(w));
  }
  report.passed = report.witnesses.empty();
  return report;
}

std::vector<Vec> sample_vectors(int count, int dimension, std::uint64_t seed,
                                const Rational& max_coord) {
  std::mt19937_64 eng(seed);
  auto draw = [&](std::uint64_t k) { return static_cast<std::int64_t>(eng() % k); };
  std::vector<Vec> out;
  // axis unit vectors and the all-ones diagonal first
  for (int a = 0; a < dimension; ++a) {
    Vec e(static_cast<std::size_t>(dimension), Rational(0));
    e[static_cast<std::size_t>(a)] = Rational(1);
    out.push_back(std::move(e));
  }
  out.emplace_back(static_cast<std::size_t>(dimension), Rational(1));
  while (static_cast<int>(out.size()) < count + dimension + 1) {
    Vec v;
    v.reserve(static_cast<std::size_t>(dimension));
    for (int a = 0; a < dimension; ++a) {
      const std::int64_t den = draw(8) + 1;
      const std::int64_t num_max = (max_coord * Rational(den)).floor();
      v.emplace_back(draw(static_cast<std::uint64_t>(num_max) + 1), den);
    }
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<std::pair<Vec, Vec>> sample_pairs(int count, int dimension, std::uint64_t seed,
                                              const Rational& max_coord) {
  const auto vecs = sample_vectors(2 * count, dimension, seed, max_coord);
  std::vector<std::pair<Vec, Vec>> out;
  out.reserve(vecs.size() / 2);
  for (std::size_t i = 0; i + 1 < vecs.size(); i += 2) out.emplace_back(vecs[i], vecs[i + 1]);
  return out;
}

}  // namespace mechkit
