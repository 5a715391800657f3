#include "gogb/freegrp.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <queue>
#include <set>
#include <sstream>
#include <unordered_map>

namespace gogb::freegrp {

std::string MalnormalViolation::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::EmptyRoot: os << "peripheral " << i << " is trivial"; break;
    case Kind::NotCyclicallyReduced: os << "peripheral " << i << " is not cyclically reduced"; break;
    case Kind::NotPrimitive: os << "peripheral " << i << " is a proper power"; break;
    case Kind::ConjugatePair: os << "peripherals " << i << " and " << j << " are conjugate"; break;
    case Kind::ConjugateToInverse:
      if (i == j)
        os << "peripheral " << i << " is conjugate to its own inverse";
      else
        os << "peripheral " << i << " is conjugate to the inverse of " << j;
      break;
  }
  return os.str();
}

std::vector<MalnormalViolation> malnormal_family_check(const VertexGroupSpec& v) {
  std::vector<MalnormalViolation> out;
  const auto& ps = v.peripherals;
  const int n = static_cast<int>(ps.size());
  for (int i = 0; i < n; ++i) {
    if (ps[i].empty()) {
      out.push_back({MalnormalViolation::Kind::EmptyRoot, i, -1});
      continue;
    }
    if (!is_cyclically_reduced(ps[i])) {
      out.push_back({MalnormalViolation::Kind::NotCyclicallyReduced, i, -1});
      continue;
    }
    if (primitive_root(ps[i]).exponent != 1)
      out.push_back({MalnormalViolation::Kind::NotPrimitive, i, -1});
    if (conjugate_cyclic(ps[i], ps[i].inverse()))
      out.push_back({MalnormalViolation::Kind::ConjugateToInverse, i, i});
  }
  for (int i = 0; i < n; ++i) {
    if (ps[i].empty() || !is_cyclically_reduced(ps[i])) continue;
    for (int j = i + 1; j < n; ++j) {
      if (ps[j].empty() || !is_cyclically_reduced(ps[j])) continue;
      if (conjugate_cyclic(ps[i], ps[j]))
        out.push_back({MalnormalViolation::Kind::ConjugatePair, i, j});
      else if (conjugate_cyclic(ps[i], ps[j].inverse()))
        out.push_back({MalnormalViolation::Kind::ConjugateToInverse, i, j});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

CosetRep coset_canonical(const Word& g, const Word& m) {
  assert(!m.empty());
  const int ell = translation_length(m);
  assert(ell > 0);
  // Outside |t| <= window the length of g*m^t strictly exceeds |g|, so the
  // shortlex minimum of the coset is attained inside the window.
  const int window = static_cast<int>((g.size() + 2 * m.size()) / ell) + 3;
  Word best = g;
  int best_power = 0;
  Word fwd = g, bwd = g;
  const Word minv = m.inverse();
  for (int t = 1; t <= window; ++t) {
    fwd = rconcat(fwd, m);
    if (shortlex_less(fwd, best)) { best = fwd; best_power = -t; }
    bwd = rconcat(bwd, minv);
    if (shortlex_less(bwd, best)) { best = bwd; best_power = t; }
  }
  return {best, best_power};
}

// ---------------------------------------------------------------------------

FreeBoundaryPoint FreeBoundaryPoint::from_end(PeriodicEndForm e) {
  FreeBoundaryPoint p;
  p.kind = Kind::PeriodicEnd;
  p.end = std::move(e);
  return p;
}

FreeBoundaryPoint FreeBoundaryPoint::parabolic(Word rep, int peripheral) {
  FreeBoundaryPoint p;
  p.kind = Kind::ParabolicClass;
  p.coset_rep = std::move(rep);
  p.peripheral = peripheral;
  return p;
}

bool FreeBoundaryPoint::operator==(const FreeBoundaryPoint& o) const {
  if (kind != o.kind) return false;
  if (kind == Kind::PeriodicEnd) return end.prefix == o.end.prefix && end.period == o.end.period;
  return peripheral == o.peripheral && coset_rep == o.coset_rep;
}

std::string FreeBoundaryPoint::str() const {
  std::ostringstream os;
  if (kind == Kind::PeriodicEnd)
    os << "end " << end.prefix.str() << "(" << end.period.str() << ")^oo";
  else
    os << "class " << coset_rep.str() << "<P" << peripheral << ">";
  return os.str();
}

FreeBoundaryPoint canonicalize_point(const VertexGroupSpec& v, const FreeBoundaryPoint& p) {
  if (p.kind == FreeBoundaryPoint::Kind::ParabolicClass) {
    assert(p.peripheral >= 0 && p.peripheral < static_cast<int>(v.peripherals.size()));
    const Word& w = v.peripherals[p.peripheral];
    return FreeBoundaryPoint::parabolic(coset_canonical(p.coset_rep, w).rep, p.peripheral);
  }
  const Word& period = p.end.period;
  for (int i = 0; i < static_cast<int>(v.peripherals.size()); ++i) {
    const Word& w = v.peripherals[i];
    if (w.size() != period.size()) continue;
    for (int sign = 0; sign < 2; ++sign) {
      const Word ws = sign ? w.inverse() : w;
      for (int j = 0; j < ws.size(); ++j) {
        if (rotate(ws, j) != period) continue;
        // prefix * period^oo == prefix * pref_j(ws)^-1 * ws^oo
        const Word g = rconcat(p.end.prefix, ws.prefix(j).inverse());
        return FreeBoundaryPoint::parabolic(coset_canonical(g, w).rep, i);
      }
    }
  }
  return p;
}

FreeBoundaryPoint end_point(const VertexGroupSpec& v, const Word& prefix, const Word& period) {
  return canonicalize_point(v, FreeBoundaryPoint::from_end(canonical_end(prefix, period)));
}

std::pair<PeriodicEndForm, PeriodicEndForm> fixed_ends(const CyclicSubgroup& c, const Word& conj) {
  return {canonical_end(conj, c.root), canonical_end(conj, c.root.inverse())};
}

std::vector<PeriodicEndForm> directions(const VertexGroupSpec& v, const FreeBoundaryPoint& p) {
  if (p.kind == FreeBoundaryPoint::Kind::PeriodicEnd) return {p.end};
  const auto [pos, neg] = fixed_ends({v.peripherals[p.peripheral], 1}, p.coset_rep);
  return {pos, neg};
}

FreeBoundaryPoint translate_point(const VertexGroupSpec& v, const Word& g, const FreeBoundaryPoint& p) {
  if (p.kind == FreeBoundaryPoint::Kind::ParabolicClass) {
    const Word& w = v.peripherals[p.peripheral];
    return FreeBoundaryPoint::parabolic(coset_canonical(rconcat(g, p.coset_rep), w).rep, p.peripheral);
  }
  return canonicalize_point(
      v, FreeBoundaryPoint::from_end(canonical_end(rconcat(g, p.end.prefix), p.end.period)));
}

// ---------------------------------------------------------------------------
// Stallings folding over the wedge of generator loops.

namespace {
int letter_index(Letter x) { return x > 0 ? 2 * (x - 1) : 2 * (-x - 1) + 1; }
Letter index_letter_inv(int k) {
  const int gen = k / 2 + 1;
  return (k % 2 == 0) ? static_cast<Letter>(-gen) : static_cast<Letter>(gen);
}
}  // namespace

CoreGraph::CoreGraph(int rank, const std::vector<Word>& generators) : rank_(rank) {
  struct Edge { int s, t; int k; };  // s --k--> t and t --inv(k)--> s
  std::vector<Edge> edges;
  int n_states = 1;
  for (const Word& g : generators) {
    if (g.empty()) continue;
    int prev = 0;
    for (int i = 0; i < g.size(); ++i) {
      const int next = (i + 1 == g.size()) ? 0 : n_states++;
      edges.push_back({prev, next, letter_index(g.at(i))});
      prev = next;
    }
  }
  DisjointSets ds(n_states);
  // Fold: while some state reads one letter to two targets, merge the targets.
  bool changed = true;
  while (changed) {
    changed = false;
    std::map<std::pair<int, int>, int> seen;  // (state, letter) -> target
    for (const Edge& e : edges) {
      for (int dir = 0; dir < 2; ++dir) {
        const int s = ds.find(dir ? e.t : e.s);
        const int t = ds.find(dir ? e.s : e.t);
        const int k = dir ? letter_index(index_letter_inv(e.k)) : e.k;
        auto [it, fresh] = seen.try_emplace({s, k}, t);
        if (!fresh && ds.find(it->second) != t) {
          ds.unite(it->second, t);
          changed = true;
        }
      }
    }
  }
  std::unordered_map<int, int> compact;
  auto id_of = [&](int s) {
    auto [it, fresh] = compact.try_emplace(ds.find(s), static_cast<int>(compact.size()));
    if (fresh) next_.emplace_back(2 * rank_, -1);
    return it->second;
  };
  (void)id_of(0);  // base state is index 0
  for (const Edge& e : edges) {
    const int s = id_of(e.s), t = id_of(e.t);
    next_[s][e.k] = t;
    next_[t][letter_index(index_letter_inv(e.k))] = s;
  }
}

int CoreGraph::step(int state, Letter x) const {
  if (state < 0) return -1;
  const int k = letter_index(x);
  if (k < 0 || k >= 2 * rank_) return -1;
  return next_[state][k];
}

bool CoreGraph::contains(const Word& w) const {
  int s = 0;
  for (int i = 0; i < w.size() && s >= 0; ++i) s = step(s, w.at(i));
  return s == 0;
}

bool CoreGraph::traces_end(const PeriodicEndForm& e) const {
  assert(!e.period.empty());
  int s = 0;
  for (int i = 0; i < e.prefix.size() && s >= 0; ++i) s = step(s, e.prefix.at(i));
  std::set<int> boundary_states;
  while (s >= 0) {
    if (!boundary_states.insert(s).second) return true;  // periodic cycle found
    for (int i = 0; i < e.period.size() && s >= 0; ++i) s = step(s, e.period.at(i));
  }
  return false;
}

bool subgroup_membership(int rank, const std::vector<Word>& generators, const Word& w) {
  return CoreGraph(rank, generators).contains(w);
}

// ---------------------------------------------------------------------------

namespace {
struct ClassKey {
  int peripheral;
  std::vector<Letter> rep;
  bool operator<(const ClassKey& o) const {
    if (peripheral != o.peripheral) return peripheral < o.peripheral;
    return std::lexicographical_compare(rep.begin(), rep.end(), o.rep.begin(), o.rep.end(),
                                        [](Letter a, Letter b) { return letter_key(a) < letter_key(b); });
  }
};
}  // namespace

std::vector<VisibleClass> visible_classes(const VertexGroupSpec& v, int depth) {
  assert(depth >= 1);
  std::vector<VisibleClass> out;
  if (v.peripherals.empty()) return out;
  const auto balls = reduced_words_up_to(v.rank, depth - 1);
  std::map<ClassKey, VisibleClass> found;
  for (int i = 0; i < static_cast<int>(v.peripherals.size()); ++i) {
    const Word& w = v.peripherals[i];
    const CyclicSubgroup sub{w, 1};
    for (const Word& x : balls) {
      // Every coset whose axis meets the radius depth-1 ball around the
      // basepoint contains an axis vertex x with x * pref_j(w)^-1 a coset
      // element, for some j; conversely any such coset's axis meets the ball.
      for (int j = 0; j < w.size(); ++j) {
        const Word g = rconcat(x, w.prefix(j).inverse());
        const Word rep = coset_canonical(g, w).rep;
        ClassKey key{i, rep.letters()};
        if (found.count(key)) continue;
        const auto [pos, neg] = fixed_ends(sub, rep);
        if (common_prefix_len(pos, neg) >= depth) continue;  // below resolution
        VisibleClass vc;
        vc.rep = rep;
        vc.peripheral = i;
        vc.dir_pos = end_prefix(pos, depth);
        vc.dir_neg = end_prefix(neg, depth);
        found.emplace(std::move(key), std::move(vc));
      }
    }
  }
  out.reserve(found.size());
  for (auto& [k, vc] : found) out.push_back(std::move(vc));
  return out;
}

ComponentsResult vertex_components(const VertexGroupSpec& v, int depth,
                                   const std::vector<FreeBoundaryPoint>& removed) {
  ComponentsResult res;
  if (depth < 1) {
    res.error = "depth must be at least 1";
    return res;
  }
  std::vector<FreeBoundaryPoint> removed_canon;
  removed_canon.reserve(removed.size());
  for (const auto& p : removed) removed_canon.push_back(canonicalize_point(v, p));

  // Deleted depth-d cylinders: every direction cylinder of a removed point.
  std::set<std::vector<Letter>> deleted;
  for (const auto& p : removed_canon) {
    const auto dirs = directions(v, p);
    if (p.kind == FreeBoundaryPoint::Kind::ParabolicClass &&
        common_prefix_len(dirs[0], dirs[1]) >= depth) {
      res.error = "removed class not visible at this depth; increase depth";
      return res;
    }
    for (const auto& e : dirs) deleted.insert(end_prefix(e, depth).letters());
  }

  const auto nodes = reduced_words_of_length(v.rank, depth);
  std::map<std::vector<Letter>, int> index;
  int alive = 0;
  for (const auto& wd : nodes)
    if (!deleted.count(wd.letters())) index.emplace(wd.letters(), alive++);
  res.nodes = alive;
  if (alive == 0) {
    res.count = 0;
    return res;
  }

  DisjointSets ds(alive);
  int merges = 0;
  for (const auto& vc : visible_classes(v, depth)) {
    const auto cls = FreeBoundaryPoint::parabolic(vc.rep, vc.peripheral);
    if (std::find(removed_canon.begin(), removed_canon.end(), cls) != removed_canon.end()) continue;
    const auto a = index.find(vc.dir_pos.letters());
    const auto b = index.find(vc.dir_neg.letters());
    // A class inside a deleted cylinder is deleted with it: no identification.
    if (a == index.end() || b == index.end()) continue;
    if (ds.unite(a->second, b->second)) ++merges;
  }
  res.identifications = merges;
  res.count = alive - merges;
  return res;
}

DisjointSets::DisjointSets(int n) : up_(n) {
  for (int i = 0; i < n; ++i) up_[i] = i;
}

int DisjointSets::find(int a) {
  while (up_[a] != a) a = up_[a] = up_[up_[a]];
  return a;
}

bool DisjointSets::unite(int a, int b) {
  a = find(a);
  b = find(b);
  if (a == b) return false;
  up_[b] = a;
  return true;
}

}  // namespace gogb::freegrp
