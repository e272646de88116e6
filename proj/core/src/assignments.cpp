#include "dnnflab/assignments.hpp"

#include <algorithm>
#include <sstream>

#include "dnnflab/error.hpp"

namespace dnnflab {

VarSet make_var_set(std::vector<Var> vars) {
  std::sort(vars.begin(), vars.end());
  vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
  return vars;
}

VarSet set_union(const VarSet& a, const VarSet& b) {
  VarSet out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

VarSet set_intersection(const VarSet& a, const VarSet& b) {
  VarSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

VarSet set_difference(const VarSet& a, const VarSet& b) {
  VarSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

bool set_contains(const VarSet& s, Var v) { return std::binary_search(s.begin(), s.end(), v); }

bool set_disjoint(const VarSet& a, const VarSet& b) {
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i == *j) return false;
    if (*i < *j) ++i; else ++j;
  }
  return true;
}

bool set_includes(const VarSet& super, const VarSet& sub) {
  return std::includes(super.begin(), super.end(), sub.begin(), sub.end());
}

// ---------------------------------------------------------------------------

Assignment::Assignment(std::initializer_list<Binding> bindings)
    : Assignment(from_bindings(std::vector<Binding>(bindings))) {}

Assignment Assignment::from_bindings(std::vector<Binding> bindings) {
  std::sort(bindings.begin(), bindings.end());
  for (std::size_t i = 1; i < bindings.size(); ++i) {
    if (bindings[i].first == bindings[i - 1].first)
      throw ContractError("variable " + std::to_string(bindings[i].first) + " bound twice");
  }
  Assignment a;
  a.bindings_ = std::move(bindings);
  return a;
}

VarSet Assignment::vars() const {
  VarSet out;
  out.reserve(bindings_.size());
  for (const auto& [v, b] : bindings_) out.push_back(v);
  return out;
}

std::optional<bool> Assignment::value(Var v) const {
  auto it = std::lower_bound(bindings_.begin(), bindings_.end(), v,
                             [](const Binding& b, Var x) { return b.first < x; });
  if (it == bindings_.end() || it->first != v) return std::nullopt;
  return it->second;
}

bool Assignment::consistent_with(const Assignment& other) const {
  auto i = bindings_.begin();
  auto j = other.bindings_.begin();
  while (i != bindings_.end() && j != other.bindings_.end()) {
    if (i->first == j->first) {
      if (i->second != j->second) return false;
      ++i;
      ++j;
    } else if (i->first < j->first) {
      ++i;
    } else {
      ++j;
    }
  }
  return true;
}

bool Assignment::subset_of(const Assignment& other) const {
  return std::includes(other.bindings_.begin(), other.bindings_.end(), bindings_.begin(),
                       bindings_.end());
}

Assignment Assignment::unite(const Assignment& other) const {
  if (!consistent_with(other)) throw ContractError("union of inconsistent assignments");
  Assignment out;
  std::set_union(bindings_.begin(), bindings_.end(), other.bindings_.begin(),
                 other.bindings_.end(), std::back_inserter(out.bindings_));
  return out;
}

Assignment Assignment::minus(const Assignment& other) const {
  Assignment out;
  std::set_difference(bindings_.begin(), bindings_.end(), other.bindings_.begin(),
                      other.bindings_.end(), std::back_inserter(out.bindings_));
  return out;
}

std::string Assignment::to_string() const {
  std::ostringstream os;
  os << '{';
  bool first = true;
  for (const auto& [v, b] : bindings_) {
    if (!first) os << ',';
    first = false;
    os << '(' << v << ',' << (b ? 1 : 0) << ')';
  }
  os << '}';
  return os.str();
}

Assignment project(const Assignment& a, const VarSet& vars) {
  std::vector<Binding> kept;
  for (const auto& b : a.bindings())
    if (set_contains(vars, b.first)) kept.push_back(b);
  return Assignment::from_bindings(std::move(kept));
}

// ---------------------------------------------------------------------------

AssignmentSet::AssignmentSet(VarSet universe, std::vector<Row> rows)
    : universe_(std::move(universe)), rows_(std::move(rows)) {
  if (!std::is_sorted(universe_.begin(), universe_.end()) ||
      std::adjacent_find(universe_.begin(), universe_.end()) != universe_.end())
    throw ContractError("assignment-set universe must be sorted and duplicate-free");
  for (const auto& r : rows_)
    if (r.size() != universe_.size()) throw ContractError("row width differs from universe");
  std::sort(rows_.begin(), rows_.end());
  rows_.erase(std::unique(rows_.begin(), rows_.end()), rows_.end());
}

AssignmentSet AssignmentSet::from_members(VarSet universe, const std::vector<Assignment>& members) {
  std::vector<Row> rows;
  rows.reserve(members.size());
  for (const auto& m : members) {
    if (m.vars() != universe) throw ContractError("member " + m.to_string() + " is not total over the universe");
    Row r(universe.size());
    std::size_t i = 0;
    for (const auto& b : m.bindings()) r[i++] = b.second;
    rows.push_back(std::move(r));
  }
  return AssignmentSet(std::move(universe), std::move(rows));
}

AssignmentSet AssignmentSet::unit() { return AssignmentSet({}, {Row{}}); }

AssignmentSet AssignmentSet::none(VarSet universe) { return AssignmentSet(std::move(universe), {}); }

AssignmentSet AssignmentSet::cube(VarSet vars) {
  if (vars.size() > 24) throw CapacityError("cube over more than 24 variables");
  const std::size_t n = vars.size();
  std::vector<Row> rows;
  rows.reserve(std::size_t{1} << n);
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) {
    Row r(n);
    for (std::size_t i = 0; i < n; ++i) r[i] = (m >> (n - 1 - i)) & 1U;
    rows.push_back(std::move(r));
  }
  return AssignmentSet(std::move(vars), std::move(rows));
}

Assignment AssignmentSet::member(std::size_t i) const {
  std::vector<Binding> b;
  b.reserve(universe_.size());
  for (std::size_t j = 0; j < universe_.size(); ++j) b.emplace_back(universe_[j], rows_[i][j]);
  return Assignment::from_bindings(std::move(b));
}

std::vector<Assignment> AssignmentSet::members() const {
  std::vector<Assignment> out;
  out.reserve(rows_.size());
  for (std::size_t i = 0; i < rows_.size(); ++i) out.push_back(member(i));
  return out;
}

bool AssignmentSet::contains(const Assignment& a) const {
  if (a.vars() != universe_) return false;
  Row r(universe_.size());
  std::size_t i = 0;
  for (const auto& b : a.bindings()) r[i++] = b.second;
  return std::binary_search(rows_.begin(), rows_.end(), r);
}

// ---------------------------------------------------------------------------

namespace {

// Positions (into h.universe()) of the universe variables that lie in vars.
std::vector<std::size_t> positions_of(const VarSet& universe, const VarSet& vars) {
  std::vector<std::size_t> pos;
  for (std::size_t i = 0; i < universe.size(); ++i)
    if (set_contains(vars, universe[i])) pos.push_back(i);
  return pos;
}

AssignmentSet::Row pick(const AssignmentSet::Row& row, const std::vector<std::size_t>& pos) {
  AssignmentSet::Row out(pos.size());
  for (std::size_t i = 0; i < pos.size(); ++i) out[i] = row[pos[i]];
  return out;
}

}  // namespace

AssignmentSet project_set(const AssignmentSet& h, const VarSet& vars) {
  VarSet u = set_intersection(h.universe(), vars);
  auto pos = positions_of(h.universe(), u);
  std::vector<AssignmentSet::Row> rows;
  rows.reserve(h.size());
  for (const auto& r : h.rows()) rows.push_back(pick(r, pos));
  return AssignmentSet(std::move(u), std::move(rows));
}

AssignmentSet restrict(const AssignmentSet& h, const Assignment& a) {
  const Assignment relevant = project(a, h.universe());
  std::vector<std::pair<std::size_t, bool>> fixed;
  for (const auto& [v, b] : relevant.bindings()) {
    auto it = std::lower_bound(h.universe().begin(), h.universe().end(), v);
    fixed.emplace_back(static_cast<std::size_t>(it - h.universe().begin()), b);
  }
  VarSet rest = set_difference(h.universe(), a.vars());
  auto pos = positions_of(h.universe(), rest);
  std::vector<AssignmentSet::Row> rows;
  for (const auto& r : h.rows()) {
    bool ok = true;
    for (const auto& [p, b] : fixed) {
      if (r[p] != b) {
        ok = false;
        break;
      }
    }
    if (ok) rows.push_back(pick(r, pos));
  }
  return AssignmentSet(std::move(rest), std::move(rows));
}

AssignmentSet product(const AssignmentSet& h1, const AssignmentSet& h2) {
  if (!set_disjoint(h1.universe(), h2.universe()))
    throw VariableCollision("product operands share variables");
  VarSet u = set_union(h1.universe(), h2.universe());
  // Column source for each output position: (operand, column).
  std::vector<std::pair<int, std::size_t>> src;
  src.reserve(u.size());
  std::size_t i = 0, j = 0;
  for (Var v : u) {
    if (i < h1.universe().size() && h1.universe()[i] == v) src.emplace_back(0, i++);
    else src.emplace_back(1, j++);
  }
  std::vector<AssignmentSet::Row> rows;
  rows.reserve(h1.size() * h2.size());
  for (const auto& a : h1.rows()) {
    for (const auto& b : h2.rows()) {
      AssignmentSet::Row r(u.size());
      for (std::size_t k = 0; k < u.size(); ++k)
        r[k] = src[k].first == 0 ? a[src[k].second] : b[src[k].second];
      rows.push_back(std::move(r));
    }
  }
  return AssignmentSet(std::move(u), std::move(rows));
}

namespace {

// Members packed into 64-bit masks; only used on small universes.
std::vector<std::uint64_t> pack_rows(const AssignmentSet& h) {
  std::vector<std::uint64_t> out;
  out.reserve(h.size());
  for (const auto& r : h.rows()) {
    std::uint64_t m = 0;
    for (std::size_t i = 0; i < r.size(); ++i)
      if (r[i]) m |= std::uint64_t{1} << i;
    out.push_back(m);
  }
  return out;
}

std::size_t distinct_under(const std::vector<std::uint64_t>& rows, std::uint64_t mask,
                           std::vector<std::uint64_t>& scratch) {
  scratch.clear();
  for (auto r : rows) scratch.push_back(r & mask);
  std::sort(scratch.begin(), scratch.end());
  return static_cast<std::size_t>(std::unique(scratch.begin(), scratch.end()) - scratch.begin());
}

// Cardinality test on packed rows: rows ⊆ Proj(S) × Proj(rest) always, so
// equality holds exactly when the sizes match.
bool splits_packed(const std::vector<std::uint64_t>& rows, std::uint64_t s, std::uint64_t all,
                   std::vector<std::uint64_t>& scratch) {
  const std::size_t a = distinct_under(rows, s, scratch);
  const std::size_t b = distinct_under(rows, all & ~s, scratch);
  return a * b == rows.size();
}

}  // namespace

bool is_product_split(const AssignmentSet& h, const VarSet& s) {
  if (!set_includes(h.universe(), s)) throw ContractError("split set is not inside Var(H)");
  const VarSet rest = set_difference(h.universe(), s);
  const std::size_t a = project_set(h, s).size();
  const std::size_t b = project_set(h, rest).size();
  return a * b == h.size();
}

std::vector<VarSet> finest_partition(const AssignmentSet& h) {
  if (h.empty()) throw ContractError("finest partition of an empty assignment set is undefined");
  const std::size_t n = h.universe().size();
  if (n > kMaxPartitionVars)
    throw CapacityError("finest partition limited to " + std::to_string(kMaxPartitionVars) +
                        " variables, got " + std::to_string(n));
  std::vector<VarSet> blocks;
  if (n == 0) return blocks;

  std::vector<std::uint64_t> rows = pack_rows(h);
  std::vector<std::uint64_t> scratch;
  std::uint64_t remaining = (n == 64) ? ~std::uint64_t{0} : ((std::uint64_t{1} << n) - 1);

  while (remaining != 0) {
    // Current residual set: distinct projections onto the remaining columns.
    std::vector<std::uint64_t> cur;
    for (auto r : rows) cur.push_back(r & remaining);
    std::sort(cur.begin(), cur.end());
    cur.erase(std::unique(cur.begin(), cur.end()), cur.end());

    const int pivot = __builtin_ctzll(remaining);
    const std::uint64_t pivot_bit = std::uint64_t{1} << pivot;
    std::vector<int> others;
    for (std::size_t i = 0; i < n; ++i)
      if (((remaining >> i) & 1U) && static_cast<int>(i) != pivot) others.push_back(static_cast<int>(i));

    // The smallest factor set containing the pivot is the pivot's block;
    // factor sets are closed under intersection. Search by increasing size.
    std::uint64_t block = remaining;
    const std::size_t m = others.size();
    bool found = false;
    for (std::size_t size = 0; size < m && !found; ++size) {
      std::vector<std::size_t> idx(size);
      for (std::size_t i = 0; i < size; ++i) idx[i] = i;
      while (true) {
        std::uint64_t s = pivot_bit;
        for (auto i : idx) s |= std::uint64_t{1} << others[i];
        if (splits_packed(cur, s, remaining, scratch)) {
          block = s;
          found = true;
          break;
        }
        // Next combination.
        std::size_t k = size;
        while (k > 0 && idx[k - 1] == m - size + (k - 1)) --k;
        if (k == 0) break;
        ++idx[k - 1];
        for (std::size_t i = k; i < size; ++i) idx[i] = idx[i - 1] + 1;
      }
    }
    VarSet b;
    for (std::size_t i = 0; i < n; ++i)
      if ((block >> i) & 1U) b.push_back(h.universe()[i]);
    blocks.push_back(std::move(b));
    remaining &= ~block;
  }
  std::sort(blocks.begin(), blocks.end());
  return blocks;
}

bool breaks(const AssignmentSet& h, const VarSet& y) {
  if (h.empty()) return false;  // Var(∅) = ∅
  const VarSet inside = set_intersection(y, h.universe());
  if (inside.size() < 2) return false;
  int hit = 0;
  for (const auto& block : finest_partition(h)) {
    if (!set_disjoint(block, inside)) ++hit;
    if (hit >= 2) return true;
  }
  return false;
}

}  // namespace dnnflab
