#pragma once

// Foundational types: point sets, traces (bit-vectors recording which points a
// family member picks out) and the FamilyHandle abstraction every engine
// works against.

#include <algorithm>
#include <bit>
#include <compare>
#include <cstdint>
#include <functional>
#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include <boost/container/small_vector.hpp>

#include "vclab/error.hpp"
#include "vclab/parallel.hpp"
#include "vclab/rng.hpp"

namespace vclab {

using ParamView = std::span<const double>;
using PointView = std::span<const double>;
using Params = std::vector<double>;

// ---------------------------------------------------------------------------
// PointSet

/// Finite ordered list of points in R^dim. Indices are stable; duplicates are
/// kept as given.
class PointSet {
 public:
  PointSet() = default;
  explicit PointSet(std::size_t dim) : dim_(dim) { require(dim > 0, "PointSet: dim must be positive"); }

  PointSet(std::size_t dim, std::vector<double> flat) : dim_(dim), coords_(std::move(flat)) {
    require(dim > 0, "PointSet: dim must be positive");
    require(coords_.size() % dim == 0, "PointSet: coordinate count is not a multiple of dim");
  }

  static PointSet from_rows(const std::vector<std::vector<double>>& rows) {
    require(!rows.empty(), "PointSet::from_rows: no rows");
    PointSet out(rows.front().size());
    for (const auto& r : rows) out.push_back(r);
    return out;
  }

  /// One-dimensional point set.
  static PointSet on_line(std::span<const double> xs) {
    return PointSet(1, std::vector<double>(xs.begin(), xs.end()));
  }

  void push_back(PointView p) {
    require(p.size() == dim_, "PointSet: point has dimension " + std::to_string(p.size()) +
                                  ", expected " + std::to_string(dim_));
    coords_.insert(coords_.end(), p.begin(), p.end());
  }
  void push_back(std::initializer_list<double> p) { push_back(PointView(p.begin(), p.size())); }

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return dim_ == 0 ? 0 : coords_.size() / dim_; }
  bool empty() const { return size() == 0; }

  PointView operator[](std::size_t i) const { return {coords_.data() + i * dim_, dim_}; }
  std::span<double> mutable_point(std::size_t i) { return {coords_.data() + i * dim_, dim_}; }

  /// First `count` points, in order.
  PointSet prefix(std::size_t count) const {
    count = std::min(count, size());
    return PointSet(dim_, std::vector<double>(coords_.begin(), coords_.begin() + count * dim_));
  }

  const std::vector<double>& flat() const { return coords_; }

  friend bool operator==(const PointSet&, const PointSet&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<double> coords_;
};

/// CSV with header `x0,x1,...`, one point per row.
inline void write_csv(std::ostream& os, const PointSet& pts) {
  for (std::size_t j = 0; j < pts.dim(); ++j) os << (j ? "," : "") << 'x' << j;
  os << '\n';
  std::ostringstream cell;
  cell.precision(17);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    auto p = pts[i];
    for (std::size_t j = 0; j < p.size(); ++j) {
      cell.str({});
      cell << p[j];
      os << (j ? "," : "") << cell.str();
    }
    os << '\n';
  }
}

inline PointSet read_point_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ConfigError("point CSV: missing header");
  const std::size_t dim = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
  {
    std::istringstream header(line);
    std::string name;
    std::size_t j = 0;
    while (std::getline(header, name, ',')) {
      while (!name.empty() && (name.back() == '\r' || name.back() == ' ')) name.pop_back();
      if (name != "x" + std::to_string(j)) throw ConfigError("point CSV: bad header column '" + name + "'");
      ++j;
    }
  }
  PointSet out(dim);
  std::vector<double> row;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    row.clear();
    std::istringstream fields(line);
    std::string field;
    while (std::getline(fields, field, ',')) {
      try {
        row.push_back(std::stod(field));
      } catch (const std::exception&) {
        throw ConfigError("point CSV line " + std::to_string(line_no) + ": bad number '" + field + "'");
      }
    }
    if (row.size() != dim) throw ConfigError("point CSV line " + std::to_string(line_no) + ": wrong column count");
    out.push_back(row);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Trace

/// Bit-vector of length n; bit i set iff point i belongs to the set. Up to 64
/// points live inline, longer traces spill to the heap.
class Trace {
 public:
  using Word = std::uint64_t;
  static constexpr std::size_t kWordBits = 64;

  Trace() = default;
  explicit Trace(std::size_t n) : n_(n), words_((n + kWordBits - 1) / kWordBits, 0) {}

  /// Parses '0'/'1' text, index 0 leftmost.
  static Trace from_string(std::string_view bits) {
    Trace t(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) {
      if (bits[i] == '1') t.set(i);
      else require(bits[i] == '0', "Trace::from_string: expected 0/1");
    }
    return t;
  }

  /// Trace of length n whose low bits are taken from `mask` (bit i = point i).
  static Trace from_mask(std::size_t n, std::uint64_t mask) {
    Trace t(n);
    if (n > 0) t.words_[0] = mask & low_mask(std::min<std::size_t>(n, kWordBits));
    return t;
  }

  std::size_t size() const { return n_; }

  bool test(std::size_t i) const { return (words_[i / kWordBits] >> (i % kWordBits)) & 1u; }
  void set(std::size_t i, bool value = true) {
    const Word bit = Word{1} << (i % kWordBits);
    if (value) words_[i / kWordBits] |= bit;
    else words_[i / kWordBits] &= ~bit;
  }
  void flip(std::size_t i) { words_[i / kWordBits] ^= Word{1} << (i % kWordBits); }

  std::size_t count() const {
    std::size_t c = 0;
    for (Word w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }

  std::span<const Word> words() const { return {words_.data(), words_.size()}; }

  std::string to_string() const {
    std::string s(n_, '0');
    for (std::size_t i = 0; i < n_; ++i)
      if (test(i)) s[i] = '1';
    return s;
  }

  std::size_t hash() const {
    std::uint64_t h = splitmix64(n_);
    for (Word w : words_) h = splitmix64(h ^ w);
    return static_cast<std::size_t>(h);
  }

  friend bool operator==(const Trace& a, const Trace& b) {
    return a.n_ == b.n_ && std::equal(a.words_.begin(), a.words_.end(), b.words_.begin(), b.words_.end());
  }
  /// Orders by the '0'/'1' string representation.
  friend std::strong_ordering operator<=>(const Trace& a, const Trace& b) {
    const std::size_t common = std::min(a.n_, b.n_);
    for (std::size_t i = 0; i < common; ++i) {
      const bool x = a.test(i), y = b.test(i);
      if (x != y) return x ? std::strong_ordering::greater : std::strong_ordering::less;
    }
    return a.n_ <=> b.n_;
  }

 private:
  static constexpr Word low_mask(std::size_t bits) { return bits >= kWordBits ? ~Word{0} : (Word{1} << bits) - 1; }

  std::size_t n_ = 0;
  boost::container::small_vector<Word, 1> words_;
};

struct TraceHash {
  std::size_t operator()(const Trace& t) const noexcept { return t.hash(); }
};

/// Deduplicated collection of traces over a common point count n.
class TraceSet {
 public:
  TraceSet() = default;
  explicit TraceSet(std::size_t n) : n_(n) {}

  std::size_t point_count() const { return n_; }
  std::size_t size() const { return traces_.size(); }
  bool empty() const { return traces_.empty(); }

  bool insert(Trace t) {
    require(t.size() == n_, "TraceSet: trace length " + std::to_string(t.size()) + " differs from point count " +
                                std::to_string(n_));
    return traces_.insert(std::move(t)).second;
  }
  void merge(const TraceSet& other) {
    for (const auto& t : other.traces_) insert(t);
  }
  bool contains(const Trace& t) const { return traces_.contains(t); }
  bool contains(std::string_view bits) const { return contains(Trace::from_string(bits)); }

  /// Traces sorted by their string form.
  std::vector<Trace> sorted() const {
    std::vector<Trace> out(traces_.begin(), traces_.end());
    std::sort(out.begin(), out.end());
    return out;
  }
  std::vector<std::string> strings() const {
    std::vector<std::string> out;
    for (const auto& t : sorted()) out.push_back(t.to_string());
    return out;
  }

  /// True iff all 2^n subsets are present.
  bool shattered() const { return n_ < 64 && traces_.size() == (std::uint64_t{1} << n_); }

 private:
  std::size_t n_ = 0;
  std::unordered_set<Trace, TraceHash> traces_;
};

// ---------------------------------------------------------------------------
// Families

/// How a function class turns into a set family.
///
/// `open_lower` is the usual subgraph {(x,t): 0<=t<=f(x) or 0>t>f(x)}. With it,
/// (x,0) belongs to subgraph(f) iff f(x) >= 0, and (x,f(x)) with f(x)<0 is
/// excluded.
///
/// `closed_lower` is {(x,t): 0<=t<=f(x) or 0>=t>=f(x)}, the form the Box-Cox
/// dual-interval case table is written against: (x,0) belongs to every
/// subgraph and the negative branch is closed at f(x).
enum class SubgraphConvention { open_lower, closed_lower };

inline bool subgraph_contains(double f, double t, SubgraphConvention convention) {
  if (convention == SubgraphConvention::open_lower) return (0.0 <= t && t <= f) || (0.0 > t && t > f);
  return (0.0 <= t && t <= f) || (0.0 >= t && t >= f);
}

/// Axis-aligned box of parameter values used for random parameter search.
struct ParamBox {
  std::vector<double> lo;
  std::vector<double> hi;
};

/// Behaviour of one parametric family. Implementations are immutable.
class FamilyModel {
 public:
  virtual ~FamilyModel() = default;

  virtual std::string name() const = 0;
  virtual std::size_t param_dim() const = 0;
  /// Dimension of the points the sets live in (input dimension + 1 for
  /// subgraph families).
  virtual std::size_t point_dim() const = 0;
  /// VC-density bound certified by the parameter count argument.
  virtual int certified_bound() const = 0;

  /// Domain check beyond the dimension (orderings, excluded values, ...).
  virtual bool params_valid(ParamView params) const = 0;
  virtual bool contains(ParamView params, PointView point) const = 0;

  virtual bool has_evaluator() const { return false; }
  /// f_params(x) for function classes; x has dimension point_dim() - 1.
  virtual double evaluate(ParamView, PointView) const {
    throw ContractError(name() + ": family has no evaluator");
  }
  virtual SubgraphConvention convention() const { return SubgraphConvention::open_lower; }

  /// Random member of the documented sampling box.
  virtual Params sample_params(Rng& rng) const = 0;
  /// Family-appropriate random point set of size n in the set space.
  virtual PointSet sample_points(std::size_t n, Rng& rng) const = 0;
  /// Random inputs of function classes (points of R^{point_dim-1}).
  virtual PointSet sample_inputs(std::size_t n, Rng& rng) const {
    (void)n;
    (void)rng;
    throw ContractError(name() + ": family has no evaluator");
  }
  /// Structured point sets worth trying first when looking for a shattered
  /// m-set (empty when the family has no natural candidates).
  virtual std::vector<PointSet> witness_candidates(std::size_t m) const {
    (void)m;
    return {};
  }
};

/// Shared immutable handle to a family.
class FamilyHandle {
 public:
  FamilyHandle() = default;
  explicit FamilyHandle(std::shared_ptr<const FamilyModel> model) : model_(std::move(model)) {
    require(model_ != nullptr, "FamilyHandle: null model");
  }

  std::string name() const { return model_->name(); }
  std::size_t param_dim() const { return model_->param_dim(); }
  std::size_t point_dim() const { return model_->point_dim(); }
  int certified_bound() const { return model_->certified_bound(); }
  bool has_evaluator() const { return model_->has_evaluator(); }
  SubgraphConvention convention() const { return model_->convention(); }

  void validate_params(ParamView params) const {
    if (params.size() != param_dim())
      throw ContractError(name() + ": expected " + std::to_string(param_dim()) + " parameters, got " +
                          std::to_string(params.size()));
    if (!model_->params_valid(params)) throw ContractError(name() + ": parameters outside the family's domain");
  }

  bool contains(ParamView params, PointView point) const { return model_->contains(params, point); }
  double evaluate(ParamView params, PointView x) const { return model_->evaluate(params, x); }

  Params sample_params(Rng& rng) const { return model_->sample_params(rng); }
  PointSet sample_points(std::size_t n, Rng& rng) const { return model_->sample_points(n, rng); }
  PointSet sample_inputs(std::size_t n, Rng& rng) const { return model_->sample_inputs(n, rng); }
  std::vector<PointSet> witness_candidates(std::size_t m) const { return model_->witness_candidates(m); }

  const FamilyModel& model() const { return *model_; }
  /// Concrete model when it has type M, else nullptr.
  template <class M>
  const M* model_as() const {
    return dynamic_cast<const M*>(model_.get());
  }

 private:
  std::shared_ptr<const FamilyModel> model_;
};

/// Trace of the member indexed by `params` on `pts`.
inline Trace trace(const FamilyHandle& family, ParamView params, const PointSet& pts) {
  family.validate_params(params);
  require(!pts.empty(), "trace: empty point set");
  require(pts.dim() == family.point_dim(), family.name() + ": points have dimension " + std::to_string(pts.dim()) +
                                               ", family expects " + std::to_string(family.point_dim()));
  Trace t(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (family.contains(params, pts[i])) t.set(i);
  return t;
}

/// Distinct traces realized by the given parameter list. Parallel over the
/// list; the merge is a set union so the result does not depend on `jobs`.
inline TraceSet collect_traces(const FamilyHandle& family, const std::vector<Params>& param_list,
                               const PointSet& pts, unsigned jobs = 1) {
  TraceSet out(pts.size());
  if (param_list.empty()) return out;
  auto traces = parallel_map(param_list.size(), jobs, [&](std::size_t i) { return trace(family, param_list[i], pts); });
  for (auto& t : traces) out.insert(std::move(t));
  return out;
}

}  // namespace vclab
