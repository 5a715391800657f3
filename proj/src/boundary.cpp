#include "gogb/boundary.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>

#include "gogb/rng.hpp"

namespace gogb::boundary {

using freegrp::Letter;
using freegrp::VertexGroupSpec;
using tree::back_edge_trace;
using tree::base_vertex;

const char* verdict_str(Verdict v) {
  switch (v) {
    case Verdict::True:
      return "true";
    case Verdict::False:
      return "false";
    default:
      return "undecided";
  }
}

// ---------------------------------------------------------------------------
// Rays and prefixes.

PathForm path_prefix(const Compiled& c, const PathForm& p, int k) {
  assert(0 <= k && k <= p.length());
  PathForm out;
  out.steps.assign(p.steps.begin(), p.steps.begin() + k);
  out.start_vertex = p.start_vertex;
  out.end_vertex = k == 0 ? p.start_vertex : c.cross_target(out.steps.back().cross);
  return out;
}

int translation_steps(const Compiled& c, const GammaElement& g) {
  return std::max(0, gmul(c, g, g).path().length() - g.path().length());
}

namespace {

// w extends v as a tree vertex (v lies on the geodesic [base, w]).
bool extends(const PathForm& w, const PathForm& v) {
  return w.length() >= v.length() && tree::gromov(w, v) == v.length();
}

GammaElement as_element(const PathForm& p) {
  return {p.steps, Word(), p.start_vertex, p.end_vertex};
}

// First k steps of the ray towards lim pre*per^n*base. Once the geodesics to
// two consecutive orbit points agree past k they follow the ray there.
PathForm ray_path_raw(const Compiled& c, const GammaElement& pre, const GammaElement& per,
                      int k) {
  const int ts = translation_steps(c, per);
  if (ts <= 0) throw std::invalid_argument("ray period does not move the base vertex");
  const int n0 = (k + pre.path().length()) / ts + 3;
  GammaElement cur = gmul(c, pre, gpow(c, per, n0));
  for (int guard = 0; guard < 64 + k; ++guard) {
    const GammaElement nxt = gmul(c, cur, per);
    const PathForm pc = cur.path();
    const PathForm pn = nxt.path();
    if (pc.length() >= k && pn.length() >= k && tree::gromov(pc, pn) >= k)
      return path_prefix(c, pc, k);
    cur = nxt;
  }
  throw std::logic_error("ray prefix failed to stabilize");
}

// Does the class seen at ray vertex i continue across the next ray edge?
bool chain_holds_at(const Compiled& c, const PathForm& ray, int i) {
  assert(i >= 1 && i + 1 <= ray.length());
  const PathForm vi = path_prefix(c, ray, i);
  const LocalClass up = back_edge_trace(c, vi);
  const LocalClass down = tree::edge_trace(c, ray.steps[i].rep, ray.steps[i].cross);
  return up == down;
}

std::vector<PeriodicEndForm> class_directions(const Compiled& c, int vertex,
                                              const LocalClass& cls) {
  return freegrp::directions(c.group(vertex),
                             FreeBoundaryPoint::parabolic(cls.rep, cls.peripheral));
}

// The trace at `at` of the first edge of the geodesic from `at` towards
// `toward` (a different vertex, or a deeper prefix of a ray through it).
LocalClass route_trace(const Compiled& c, const PathForm& at, const PathForm& toward) {
  if (extends(toward, at) && toward.length() > at.length()) {
    const auto& s = toward.steps[at.length()];
    return tree::edge_trace(c, s.rep, s.cross);
  }
  return back_edge_trace(c, at);  // the route starts towards the base
}

}  // namespace

PathForm ray_path(const Compiled& c, const BoundaryPoint& xi, int k) {
  if (xi.kind != BoundaryPoint::Kind::TreeEnd)
    throw std::invalid_argument("ray_path needs a tree end");
  if (!xi.exact) {
    if (xi.approx.length() < k) throw std::invalid_argument("ray stub too shallow");
    return path_prefix(c, xi.approx, k);
  }
  return ray_path_raw(c, xi.pre, xi.per, k);
}

// ---------------------------------------------------------------------------
// Gluing.

BoundaryPoint glue_class(const Compiled& c, const ClassAt& at) {
  BoundaryPoint p;
  p.kind = BoundaryPoint::Kind::EdgeParabolic;
  p.cls = tree::minimize_class(c, at);
  return p;
}

BoundaryPoint glue_class(const Compiled& c, const PathForm& chart, const FreeBoundaryPoint& fp) {
  const VertexGroupSpec& g = c.group(chart.end_vertex);
  const FreeBoundaryPoint q = freegrp::canonicalize_point(g, fp);
  if (q.kind == FreeBoundaryPoint::Kind::ParabolicClass)
    return glue_class(c, ClassAt{chart, {q.coset_rep, q.peripheral}});
  BoundaryPoint p;
  p.kind = BoundaryPoint::Kind::VertexPoint;
  p.chart = chart;
  p.end = q.end;
  return p;
}

BoundaryPoint glue_class(const Compiled& c, const GammaElement& pre, const GammaElement& per) {
  if (per.start_vertex != per.end_vertex || per.start_vertex != pre.end_vertex)
    throw std::invalid_argument("ray data must compose: pre then a loop");
  const int ts = translation_steps(c, per);
  if (ts <= 0) throw std::invalid_argument("ray period does not move the base vertex");
  // One translation window past the axis entry decides identification: the
  // glue chain is periodic there, so all-true on the window means the tail
  // stays in one class domain.
  const int k0 = pre.path().length() + per.path().length() + 2;
  const PathForm ray = ray_path_raw(c, pre, per, k0 + ts + 1);
  bool identified = true;
  for (int i = k0; i < k0 + ts; ++i) {
    if (!chain_holds_at(c, ray, i)) {
      identified = false;
      break;
    }
  }
  if (identified) {
    const PathForm v = path_prefix(c, ray, k0 + ts);
    return glue_class(c, ClassAt{v, back_edge_trace(c, v)});
  }
  BoundaryPoint p;
  p.kind = BoundaryPoint::Kind::TreeEnd;
  p.pre = pre;
  p.per = per;
  p.exact = true;
  return p;
}

BoundaryPoint ray_stub(const Compiled& c, const PathForm& deep) {
  (void)c;
  BoundaryPoint p;
  p.kind = BoundaryPoint::Kind::TreeEnd;
  p.exact = false;
  p.approx = deep;
  return p;
}

bool equal(const Compiled& c, const BoundaryPoint& a, const BoundaryPoint& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case BoundaryPoint::Kind::VertexPoint:
      return a.chart == b.chart && a.end == b.end;
    case BoundaryPoint::Kind::EdgeParabolic:
      return a.cls == b.cls;
    case BoundaryPoint::Kind::TreeEnd: {
      if (a.exact != b.exact) return false;
      if (!a.exact) return a.approx == b.approx;
      // Two periodic rays agreeing past both preambles plus both periods
      // agree forever.
      const int n = a.pre.path().length() + b.pre.path().length() +
                    translation_steps(c, a.per) + translation_steps(c, b.per) + 4;
      return ray_path(c, a, n) == ray_path(c, b, n);
    }
  }
  return false;
}

// ---------------------------------------------------------------------------
// Chart opens and neighborhoods.

bool open_contains(const VertexGroupSpec& g, const ChartOpen& u,
                   const std::vector<PeriodicEndForm>& dirs) {
  (void)g;
  for (const PeriodicEndForm& d : dirs) {
    if (!u.include.empty()) {
      bool inside = false;
      for (const Word& w : u.include) {
        if (freegrp::end_prefix(d, w.size()) == w) {
          inside = true;
          break;
        }
      }
      if (!inside) return false;
    }
    for (const Word& w : u.exclude)
      if (freegrp::end_prefix(d, w.size()) == w) return false;
  }
  return true;
}

NeighborhoodSpec basic_nbhd(const Compiled& c, const BoundaryPoint& x, int m,
                            const NeighborhoodParams& params) {
  if (m < 1) throw std::invalid_argument("resolution level must be at least 1");
  NeighborhoodSpec w;
  w.m = m;
  switch (x.kind) {
    case BoundaryPoint::Kind::VertexPoint: {
      w.kind = NeighborhoodSpec::Kind::Chart;
      ChartOpen u;
      u.at = x.chart;
      u.include = {freegrp::end_prefix(x.end, m)};
      w.support = {u};
      return w;
    }
    case BoundaryPoint::Kind::EdgeParabolic: {
      w.kind = NeighborhoodSpec::Kind::Chart;
      tree::DomainParams dp;
      dp.radius = m;
      dp.max_vertices = params.support_cap;
      const tree::DomainView dom = tree::domain(c, x.cls, dp);
      for (const ClassAt& ca : dom.verts) {
        ChartOpen u;
        u.at = ca.vertex;
        for (const PeriodicEndForm& d : class_directions(c, ca.vertex.end_vertex, ca.cls))
          u.include.push_back(freegrp::end_prefix(d, m));
        w.support.push_back(u);
      }
      return w;
    }
    case BoundaryPoint::Kind::TreeEnd: {
      w.kind = NeighborhoodSpec::Kind::Branch;
      w.branch = ray_path(c, x, m + 1);
      return w;
    }
  }
  throw std::logic_error("unreachable");
}

Verdict subtree_contains(const Compiled& c, const ChartOpen& u, const PathForm& w) {
  if (w == u.at) return Verdict::True;
  const LocalClass t = route_trace(c, u.at, w);
  return open_contains(c.group(u.at.end_vertex), u, class_directions(c, u.at.end_vertex, t))
             ? Verdict::True
             : Verdict::False;
}

BoundaryPoint edge_class_point(const Compiled& c, const PathForm& child) {
  if (child.length() == 0) throw std::invalid_argument("the base vertex has no parent edge");
  return glue_class(c, ClassAt{child, back_edge_trace(c, child)});
}

// ---------------------------------------------------------------------------
// Membership.

namespace {

Membership branch_membership(const Compiled& c, const BoundaryPoint& q,
                             const NeighborhoodSpec& w) {
  const int bl = w.branch.length();
  switch (q.kind) {
    case BoundaryPoint::Kind::VertexPoint:
      return {extends(q.chart, w.branch) ? Verdict::True : Verdict::False, Clause::ChartC};
    case BoundaryPoint::Kind::EdgeParabolic:
      return {extends(q.cls.vertex, w.branch) ? Verdict::True : Verdict::False,
              Clause::DisjointB};
    case BoundaryPoint::Kind::TreeEnd: {
      if (q.exact) {
        return {ray_path(c, q, bl) == w.branch ? Verdict::True : Verdict::False, Clause::EndsA};
      }
      const int g = tree::gromov(q.approx, w.branch);
      if (g == bl && q.approx.length() >= bl) return {Verdict::True, Clause::EndsA};
      if (g < std::min(q.approx.length(), bl)) return {Verdict::False, Clause::EndsA};
      return {Verdict::Undecided, Clause::EndsA};  // known prefix of the branch only
    }
  }
  throw std::logic_error("unreachable");
}

Membership chart_membership(const Compiled& c, const BoundaryPoint& q,
                            const NeighborhoodSpec& w) {
  if (q.kind == BoundaryPoint::Kind::TreeEnd) {
    // The end enters every support subtree selection or leaves through a
    // rejected edge.
    for (const ChartOpen& u : w.support) {
      PathForm toward;
      if (q.exact) {
        toward = ray_path(c, q, u.at.length() + 1);
      } else {
        toward = q.approx;
        if (toward.length() <= tree::gromov(toward, u.at))
          return {Verdict::Undecided, Clause::EndsA};  // first edge unknown
      }
      const LocalClass t = route_trace(c, u.at, toward);
      if (!open_contains(c.group(u.at.end_vertex), u,
                         class_directions(c, u.at.end_vertex, t)))
        return {Verdict::False, Clause::EndsA};
    }
    return {Verdict::True, Clause::EndsA};
  }

  // Shared support vertices decide visible points exactly.
  bool shared_any = false;
  for (const ChartOpen& u : w.support) {
    std::optional<std::vector<PeriodicEndForm>> dirs;
    if (q.kind == BoundaryPoint::Kind::VertexPoint) {
      if (u.at == q.chart) dirs = std::vector<PeriodicEndForm>{q.end};
    } else if (const auto lc = tree::in_domain(c, q.cls, u.at)) {
      dirs = class_directions(c, u.at.end_vertex, *lc);
    }
    if (!dirs) continue;
    shared_any = true;
    if (!open_contains(c.group(u.at.end_vertex), u, *dirs))
      return {Verdict::False, Clause::ChartC};
  }
  if (shared_any) return {Verdict::True, Clause::ChartC};

  // Disjoint: the point sits behind one first edge per support vertex.
  const PathForm pos =
      q.kind == BoundaryPoint::Kind::VertexPoint ? q.chart : q.cls.vertex;
  for (const ChartOpen& u : w.support) {
    const LocalClass t = route_trace(c, u.at, pos);
    if (!open_contains(c.group(u.at.end_vertex), u, class_directions(c, u.at.end_vertex, t)))
      return {Verdict::False, Clause::DisjointB};
  }
  return {Verdict::True, Clause::DisjointB};
}

}  // namespace

Membership in_neighborhood_ex(const Compiled& c, const BoundaryPoint& q,
                              const NeighborhoodSpec& w) {
  if (w.kind == NeighborhoodSpec::Kind::Branch) return branch_membership(c, q, w);
  return chart_membership(c, q, w);
}

Verdict in_neighborhood(const Compiled& c, const BoundaryPoint& q, const NeighborhoodSpec& w) {
  return in_neighborhood_ex(c, q, w).verdict;
}

// ---------------------------------------------------------------------------
// Sampling.

namespace {

Word random_reduced(Rng& rng, int rank, int len) {
  std::vector<Letter> ls;
  while (static_cast<int>(ls.size()) < len) {
    const int g = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(rank)));
    const Letter l = rng.coin() ? static_cast<Letter>(g) : static_cast<Letter>(-g);
    if (!ls.empty() && ls.back() == freegrp::letter_inv(l)) continue;
    ls.push_back(l);
  }
  return Word(std::move(ls));
}

}  // namespace

std::vector<BoundaryPoint> sample_points(const Compiled& c, const SampleParams& params,
                                         const std::vector<GammaElement>& axes) {
  Rng rng(params.seed);
  std::vector<BoundaryPoint> out;
  std::set<std::string> seen;
  const auto push = [&](const BoundaryPoint& p) {
    if (static_cast<int>(out.size()) >= params.count) return;
    if (seen.insert(point_literal(c, p)).second) out.push_back(p);
  };

  for (const GammaElement& g : axes) {
    if (g.start_vertex != c.spec.base || g.end_vertex != c.spec.base) continue;
    if (translation_steps(c, g) == 0) continue;
    push(glue_class(c, gid(c, c.spec.base), g));
    push(glue_class(c, gid(c, c.spec.base), ginv(c, g)));
  }

  tree::BallParams bp;
  bp.radius = params.ball_radius;
  bp.transversal_len = params.transversal_len;
  bp.max_vertices = 4000;
  const tree::BallView ball = tree::tree_ball(c, base_vertex(c), bp);
  for (const PathForm& v : ball.verts) {
    const VertexGroupSpec& grp = c.group(v.end_vertex);
    for (const freegrp::VisibleClass& vc : freegrp::visible_classes(grp, params.class_depth))
      push(glue_class(c, v, FreeBoundaryPoint::parabolic(vc.rep, vc.peripheral)));
    for (int i = 0; i < params.per_vertex; ++i) {
      const Word prefix = random_reduced(
          rng, grp.rank, static_cast<int>(rng.below(params.word_len + 1)));
      const Word period =
          random_reduced(rng, grp.rank, 1 + static_cast<int>(rng.below(params.word_len)));
      push(glue_class(c, v, freegrp::end_point(grp, prefix, period)));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Separation tools.

namespace {

int position_depth(const BoundaryPoint& p) {
  switch (p.kind) {
    case BoundaryPoint::Kind::VertexPoint:
      return p.chart.length();
    case BoundaryPoint::Kind::EdgeParabolic:
      return p.cls.vertex.length();
    default:
      return 0;
  }
}

}  // namespace

NeighborhoodSpec avoid_edge(const Compiled& c, const BoundaryPoint& p, const PathForm& child) {
  const BoundaryPoint qe = edge_class_point(c, child);
  if (p.kind == BoundaryPoint::Kind::EdgeParabolic && p.cls == qe.cls)
    throw std::invalid_argument("the point is the class of the avoided edge");
  NeighborhoodParams np;
  const int max_m = 24;
  if (p.kind == BoundaryPoint::Kind::EdgeParabolic)
    np.support_cap = 8 + 4 * (tree::distance(p.cls.vertex, child) + max_m);
  for (int m = 1; m <= max_m; ++m) {
    if (p.kind == BoundaryPoint::Kind::TreeEnd && !p.exact && p.approx.length() < m + 1)
      throw std::invalid_argument("ray stub too shallow to avoid the edge");
    const NeighborhoodSpec w = basic_nbhd(c, p, m, np);
    if (in_neighborhood(c, qe, w) == Verdict::False) return w;
  }
  throw std::logic_error("no level separates the point from the edge class");
}

Separation separate(const Compiled& c, const BoundaryPoint& p, const BoundaryPoint& q,
                    const CertifyParams& params) {
  if (equal(c, p, q)) throw std::invalid_argument("cannot separate a point from itself");
  Separation out;
  std::vector<BoundaryPoint> universe = sample_points(c, params.sample);
  universe.push_back(p);
  universe.push_back(q);
  NeighborhoodParams np;
  np.support_cap = 8 + 2 * (position_depth(p) + position_depth(q) + params.max_m);
  for (int m = 1; m <= params.max_m; ++m) {
    NeighborhoodSpec wp, wq;
    try {
      wp = basic_nbhd(c, p, m, np);
      wq = basic_nbhd(c, q, m, np);
    } catch (const std::invalid_argument&) {
      out.witness = "truncated data too shallow";
      break;
    }
    if (in_neighborhood(c, q, wp) == Verdict::True ||
        in_neighborhood(c, p, wq) == Verdict::True) {
      out.witness = "cross containment at level " + std::to_string(m);
      continue;
    }
    bool overlap = false;
    for (const BoundaryPoint& z : universe) {
      if (in_neighborhood(c, z, wp) == Verdict::True &&
          in_neighborhood(c, z, wq) == Verdict::True) {
        overlap = true;
        out.witness = point_literal(c, z);
        break;
      }
    }
    if (!overlap) {
      out.left = wp;
      out.right = wq;
      out.m = m;
      out.certified = Verdict::True;
      out.witness.clear();
      return out;
    }
  }
  out.m = params.max_m;
  out.certified = Verdict::Undecided;
  return out;
}

FiltrationResult filtration(const Compiled& c, const NeighborhoodSpec& outer,
                            const BoundaryPoint& q, const CertifyParams& params) {
  if (in_neighborhood(c, q, outer) != Verdict::True)
    throw std::invalid_argument("the point must lie inside the neighborhood");
  FiltrationResult out;

  // Same-center ladder step: W_{m+1} <= W_m by construction.
  if (outer.m >= 1) {
    bool same = false;
    try {
      same = nbhd_literal(c, basic_nbhd(c, q, outer.m)) == nbhd_literal(c, outer);
    } catch (const std::invalid_argument&) {
    }
    if (same) {
      out.inner = basic_nbhd(c, q, outer.m + 1);
      out.m = outer.m + 1;
      out.certified = Verdict::True;
      return out;
    }
  }

  // A deeper branch of an interior end is contained in the outer branch.
  if (outer.kind == NeighborhoodSpec::Kind::Branch &&
      q.kind == BoundaryPoint::Kind::TreeEnd && q.exact) {
    const int mm = std::max(outer.m + 1, 1);
    const NeighborhoodSpec inner = basic_nbhd(c, q, mm);
    if (extends(inner.branch, outer.branch)) {
      out.inner = inner;
      out.m = mm;
      out.certified = Verdict::True;
      return out;
    }
  }

  std::vector<BoundaryPoint> universe = sample_points(c, params.sample);
  universe.push_back(q);
  for (int mm = 1; mm <= params.max_m; ++mm) {
    NeighborhoodSpec inner;
    try {
      inner = basic_nbhd(c, q, mm);
    } catch (const std::invalid_argument&) {
      out.witness = "truncated data too shallow";
      break;
    }
    bool bad = false;
    for (const BoundaryPoint& z : universe) {
      if (in_neighborhood(c, z, inner) == Verdict::True &&
          in_neighborhood(c, z, outer) == Verdict::False) {
        bad = true;
        out.witness = point_literal(c, z);
        break;
      }
    }
    if (!bad) {
      out.inner = inner;
      out.m = mm;
      out.certified = Verdict::True;
      out.witness.clear();
      return out;
    }
  }
  out.m = params.max_m;
  out.certified = Verdict::Undecided;
  return out;
}

// ---------------------------------------------------------------------------
// Closure gaps.

namespace {

// Every parabolic class with a direction inside one of the level-n include
// cylinders must keep all its directions inside the level-m data. Violating
// classes have short canonical representatives (a minimal coset rep cancels
// at most half a period against its root), so two finite families cover
// them: ends with a prefix of an include word before the periodic part, and
// representatives extending an include word.
bool marginal_classes_safe(const VertexGroupSpec& g, const std::vector<Word>& includes_n,
                           int m) {
  const auto matches_level = [&](const std::vector<PeriodicEndForm>& dirs, int level) {
    for (const PeriodicEndForm& d : dirs) {
      bool ok = false;
      for (const Word& w : includes_n) {
        const int k = std::min(level, w.size());
        if (freegrp::end_prefix(d, k) == w.prefix(k)) {
          ok = true;
          break;
        }
      }
      if (!ok) return false;
    }
    return true;
  };
  const auto marginal = [&](const std::vector<PeriodicEndForm>& dirs) {
    for (const PeriodicEndForm& d : dirs)
      for (const Word& w : includes_n)
        if (freegrp::end_prefix(d, w.size()) == w) return true;
    return false;
  };
  std::set<std::pair<std::string, int>> seen;
  const auto class_ok = [&](const FreeBoundaryPoint& raw) {
    const FreeBoundaryPoint fb = freegrp::canonicalize_point(g, raw);
    if (fb.kind != FreeBoundaryPoint::Kind::ParabolicClass) return true;  // cylinders are clopen
    if (!seen.insert({fb.coset_rep.str(), fb.peripheral}).second) return true;
    const auto dirs = freegrp::directions(g, fb);
    if (!marginal(dirs)) return true;
    return matches_level(dirs, m);
  };

  for (const Word& incl : includes_n) {
    const int n = incl.size();
    for (int pi = 0; pi < static_cast<int>(g.peripherals.size()); ++pi) {
      const Word& w = g.peripherals[pi];
      std::vector<Word> periods;
      for (int s = 0; s < 2; ++s) {
        const Word b = s ? w.inverse() : w;
        for (int j = 0; j < b.size(); ++j) periods.push_back(freegrp::rotate(b, j));
      }
      for (int k = 0; k <= n; ++k) {
        const Word u = incl.prefix(k);
        for (const Word& rho : periods) {
          const PeriodicEndForm e = freegrp::canonical_end(u, rho);
          if (freegrp::end_prefix(e, n) != incl) continue;
          if (!class_ok(FreeBoundaryPoint::from_end(e))) return false;
        }
      }
      std::vector<Word> stack{incl};
      while (!stack.empty()) {
        const Word r = stack.back();
        stack.pop_back();
        if (!class_ok(FreeBoundaryPoint::parabolic(r, pi))) return false;
        if (r.size() < m + w.size()) {
          for (int gen = 1; gen <= g.rank; ++gen) {
            for (int sgn = 0; sgn < 2; ++sgn) {
              const Letter l = static_cast<Letter>(sgn ? -gen : gen);
              if (!r.empty() && r.letters().back() == freegrp::letter_inv(l)) continue;
              auto ls = r.letters();
              ls.push_back(l);
              stack.push_back(Word(std::move(ls)));
            }
          }
        }
      }
    }
  }
  return true;
}

bool chart_levels_safe(const Compiled& c, const BoundaryPoint& p, int m, int n) {
  const NeighborhoodSpec wm = basic_nbhd(c, p, m);
  const NeighborhoodSpec wn = basic_nbhd(c, p, n);
  for (const ChartOpen& um : wm.support) {
    const ChartOpen* un = nullptr;
    for (const ChartOpen& u : wn.support) {
      if (u.at == um.at) {
        un = &u;
        break;
      }
    }
    if (!un) return false;
    if (!marginal_classes_safe(c.group(um.at.end_vertex), un->include, m)) return false;
  }
  return true;
}

std::optional<std::string> adherence_violation(const Compiled& c, const NeighborhoodSpec& inner,
                                               const NeighborhoodSpec& outer,
                                               const std::vector<BoundaryPoint>& universe,
                                               int probe) {
  for (const BoundaryPoint& z : universe) {
    if (z.kind == BoundaryPoint::Kind::TreeEnd && !z.exact) continue;
    bool adherent = in_neighborhood(c, z, inner) == Verdict::True;
    if (!adherent) {
      // z is adherent when some sampled member of inner lies inside z's own
      // probe neighborhood.
      const NeighborhoodSpec wz = basic_nbhd(c, z, probe);
      for (const BoundaryPoint& y : universe) {
        if (&y == &z) continue;
        if (in_neighborhood(c, y, inner) == Verdict::True &&
            in_neighborhood(c, y, wz) == Verdict::True) {
          adherent = true;
          break;
        }
      }
    }
    if (adherent && in_neighborhood(c, z, outer) != Verdict::True) return point_literal(c, z);
  }
  return std::nullopt;
}

}  // namespace

ClosureGapResult closure_gap(const Compiled& c, const BoundaryPoint& p, int m,
                             const CertifyParams& params) {
  if (m < 1) throw std::invalid_argument("resolution level must be at least 1");
  if (p.kind == BoundaryPoint::Kind::TreeEnd && !p.exact)
    throw std::invalid_argument("closure gaps need an exact point");
  ClosureGapResult out;
  const NeighborhoodSpec outer = basic_nbhd(c, p, m);
  std::vector<BoundaryPoint> universe = sample_points(c, params.sample);
  universe.push_back(p);

  const bool end_kind = p.kind == BoundaryPoint::Kind::TreeEnd;
  const int n_cap = m + 16;
  for (int n = end_kind ? m + 2 : m + 1; n <= n_cap; ++n) {
    if (end_kind) {
      // The frontier of the deeper branch set is its cut-edge class; it must
      // already lie inside the outer branch.
      const BoundaryPoint cut = edge_class_point(c, ray_path(c, p, n + 1));
      if (in_neighborhood(c, cut, outer) != Verdict::True) continue;
    } else {
      if (!chart_levels_safe(c, p, m, n)) continue;
    }
    const NeighborhoodSpec inner = basic_nbhd(c, p, n);
    if (const auto bad = adherence_violation(c, inner, outer, universe, n)) {
      out.witness = *bad;
      continue;
    }
    out.inner = inner;
    out.n = n;
    out.certified = Verdict::True;
    out.witness.clear();
    return out;
  }
  out.n = n_cap;
  out.certified = Verdict::Undecided;
  return out;
}

// ---------------------------------------------------------------------------
// Convergence.

ConvergenceReport converges(const Compiled& c, const std::vector<BoundaryPoint>& seq,
                            const BoundaryPoint& p, int levels,
                            const NeighborhoodParams& params) {
  if (seq.empty() || levels < 1)
    throw std::invalid_argument("need a nonempty sequence and levels >= 1");
  ConvergenceReport rep;
  bool any_false = false, any_undecided = false;
  for (int n = 1; n <= levels; ++n) {
    ConvergenceLevel lvl;
    lvl.level = n;
    NeighborhoodSpec w;
    try {
      w = basic_nbhd(c, p, n, params);
    } catch (const std::invalid_argument&) {
      lvl.verdict = Verdict::Undecided;
      any_undecided = true;
      if (rep.witness.empty()) rep.witness = "limit data too shallow at level " + std::to_string(n);
      rep.levels.push_back(lvl);
      continue;
    }
    int tail = static_cast<int>(seq.size());
    Verdict stopper = Verdict::False;
    for (int i = static_cast<int>(seq.size()) - 1; i >= 0; --i) {
      const Verdict v = in_neighborhood(c, seq[i], w);
      if (v != Verdict::True) {
        stopper = v;
        break;
      }
      tail = i;
    }
    if (tail < static_cast<int>(seq.size())) {
      lvl.tail_start = tail;
      lvl.verdict = Verdict::True;
    } else {
      lvl.verdict = stopper == Verdict::Undecided ? Verdict::Undecided : Verdict::False;
      if (lvl.verdict == Verdict::False) any_false = true;
      else any_undecided = true;
      if (rep.witness.empty())
        rep.witness = "no tail captured at level " + std::to_string(n);
    }
    rep.levels.push_back(lvl);
  }
  rep.verdict = any_false ? Verdict::False
                          : (any_undecided ? Verdict::Undecided : Verdict::True);
  return rep;
}

// ---------------------------------------------------------------------------
// Accumulation.

namespace {

struct ChartDatum {
  std::vector<PeriodicEndForm> dirs;
  std::vector<int> members;
};

// Greedy cylinder descent over the data, then a periodic pattern in the
// deepest shared cylinder names the limit.
bool chart_accumulate(const Compiled& c, const PathForm& pivot,
                      const std::vector<ChartDatum>& data, const AccumulationParams& params,
                      Accumulation& out) {
  const VertexGroupSpec& g = c.group(pivot.end_vertex);
  const auto extends_some = [&](const ChartDatum& d, const Word& w) {
    for (const PeriodicEndForm& e : d.dirs)
      if (freegrp::end_prefix(e, w.size()) == w) return true;
    return false;
  };
  Word w;
  for (int depth = 0; depth < params.dir_depth; ++depth) {
    Word best;
    int best_count = 0;
    for (int gen = 1; gen <= g.rank; ++gen) {
      for (int sgn = 0; sgn < 2; ++sgn) {
        const Letter l = static_cast<Letter>(sgn ? -gen : gen);
        if (!w.empty() && w.letters().back() == freegrp::letter_inv(l)) continue;
        auto ls = w.letters();
        ls.push_back(l);
        const Word cand(std::move(ls));
        int count = 0;
        for (const ChartDatum& d : data)
          if (extends_some(d, cand)) ++count;
        if (count > best_count) {
          best_count = count;
          best = cand;
        }
      }
    }
    if (best_count < params.min_bucket) break;
    w = best;
  }
  if (w.empty()) {
    out.note = "no shared direction cylinder";
    return false;
  }
  for (int L = 1; 2 * L <= w.size(); ++L) {
    if (!(w.subword(w.size() - 2 * L, w.size() - L) == w.subword(w.size() - L, w.size())))
      continue;
    const PeriodicEndForm e =
        freegrp::canonical_end(w.prefix(w.size() - L), w.subword(w.size() - L, w.size()));
    if (freegrp::end_prefix(e, w.size()) != w) continue;
    out.limit = glue_class(c, pivot, FreeBoundaryPoint::from_end(e));
    for (const ChartDatum& d : data)
      if (extends_some(d, w))
        out.indices.insert(out.indices.end(), d.members.begin(), d.members.end());
    std::sort(out.indices.begin(), out.indices.end());
    out.ok = true;
    out.note = "in-chart accumulation";
    return true;
  }
  out.note = "no periodic pattern in the shared cylinder";
  return false;
}

}  // namespace

Accumulation accumulation_point(const Compiled& c, const std::vector<BoundaryPoint>& seq,
                                const AccumulationParams& params) {
  Accumulation out;
  if (seq.empty()) {
    out.note = "empty sequence";
    return out;
  }
  std::vector<PathForm> pos;
  pos.reserve(seq.size());
  for (const BoundaryPoint& p : seq) {
    switch (p.kind) {
      case BoundaryPoint::Kind::VertexPoint:
        pos.push_back(p.chart);
        break;
      case BoundaryPoint::Kind::EdgeParabolic:
        pos.push_back(p.cls.vertex);
        break;
      case BoundaryPoint::Kind::TreeEnd:
        pos.push_back(p.exact ? ray_path(c, p, params.ray_budget + 2) : p.approx);
        break;
    }
  }

  std::vector<int> alive(seq.size());
  for (size_t i = 0; i < seq.size(); ++i) alive[i] = static_cast<int>(i);
  PathForm pivot = base_vertex(c);
  int r = 0;
  std::vector<int> here;
  std::map<gog::Step, std::vector<int>> buckets;
  while (true) {
    here.clear();
    buckets.clear();
    for (int i : alive) {
      if (pos[i].length() <= r) here.push_back(i);
      else buckets[pos[i].steps[r]].push_back(i);
    }
    const std::pair<const gog::Step, std::vector<int>>* best = nullptr;
    int deeper = 0;
    for (const auto& b : buckets) {
      deeper += static_cast<int>(b.second.size());
      if (!best || b.second.size() > best->second.size()) best = &b;
    }
    const bool can_descend =
        best && static_cast<int>(best->second.size()) >= params.min_bucket && r < params.ray_budget;
    if (can_descend && 2 * static_cast<int>(best->second.size()) > deeper) {
      alive = best->second;
      pivot.steps.push_back(best->first);
      pivot.end_vertex = c.cross_target(best->first.cross);
      ++r;
      continue;
    }
    if (static_cast<int>(here.size()) >= params.min_bucket) break;
    if (static_cast<int>(buckets.size()) >= params.min_bucket) break;
    if (can_descend) {  // two heavy branches: follow the heaviest
      alive = best->second;
      pivot.steps.push_back(best->first);
      pivot.end_vertex = c.cross_target(best->first.cross);
      ++r;
      continue;
    }
    break;
  }

  // Enough data at the pivot chart itself.
  if (static_cast<int>(here.size()) >= params.min_bucket) {
    std::vector<ChartDatum> data;
    for (int i : here) {
      ChartDatum d;
      d.members = {i};
      if (seq[i].kind == BoundaryPoint::Kind::VertexPoint) {
        d.dirs = {seq[i].end};
      } else if (seq[i].kind == BoundaryPoint::Kind::EdgeParabolic) {
        d.dirs = class_directions(c, pivot.end_vertex, seq[i].cls.cls);
      } else {
        continue;
      }
      data.push_back(std::move(d));
    }
    if (chart_accumulate(c, pivot, data, params, out)) return out;
    return out;
  }

  // Spread across many departing edges: accumulate their traces in-chart.
  if (static_cast<int>(buckets.size()) >= params.min_bucket) {
    std::map<LocalClass, ChartDatum> traces;
    for (const auto& b : buckets) {
      const LocalClass t = tree::edge_trace(c, b.first.rep, b.first.cross);
      ChartDatum& d = traces[t];
      if (d.dirs.empty()) d.dirs = class_directions(c, pivot.end_vertex, t);
      d.members.insert(d.members.end(), b.second.begin(), b.second.end());
    }
    std::vector<ChartDatum> data;
    for (auto& [t, d] : traces) data.push_back(std::move(d));
    if (chart_accumulate(c, pivot, data, params, out)) return out;
    return out;
  }

  // The survivors march down one branch: look for a periodic tail.
  if (r >= 4) {
    for (int L = 1; 2 * L + 2 <= r; ++L) {
      bool periodic = true;
      for (int i = r - 2 * L - 2; i < r - L; ++i) {
        if (!(pivot.steps[i] == pivot.steps[i + L])) {
          periodic = false;
          break;
        }
      }
      if (!periodic) continue;
      const int K = r - 2 * L;
      const GammaElement g1 = as_element(path_prefix(c, pivot, K));
      const GammaElement g2 = as_element(path_prefix(c, pivot, K + L));
      const GammaElement per = gmul(c, ginv(c, g1), g2);
      if (translation_steps(c, per) == 0) continue;
      if (!(ray_path_raw(c, g1, per, r) == pivot)) continue;
      out.limit = glue_class(c, g1, per);
      out.indices = alive;
      out.ok = true;
      out.note = "escaping ray";
      return out;
    }
  }
  if (r >= params.ray_budget) {
    out.limit = ray_stub(c, pivot);
    out.indices = alive;
    out.ok = true;
    out.note = "escaping ray, no period identified";
    return out;
  }
  out.note = "no accumulating subcollection";
  return out;
}

// ---------------------------------------------------------------------------
// Literals.

std::string path_literal(const Compiled& c, const PathForm& p) {
  if (p.steps.empty()) return "@";
  std::string s;
  for (size_t i = 0; i < p.steps.size(); ++i) {
    if (i) s += '/';
    s += p.steps[i].rep.str();
    s += '.';
    s += p.steps[i].cross.dir > 0 ? '+' : '-';
    s += c.spec.edges[p.steps[i].cross.edge].id;
  }
  return s;
}

PathForm parse_path(const Compiled& c, const std::string& s) {
  PathForm p;
  p.start_vertex = c.spec.base;
  p.end_vertex = c.spec.base;
  if (s == "@") return p;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, '/')) {
    const size_t dot = tok.find('.');
    if (dot == std::string::npos || dot + 2 > tok.size())
      throw std::invalid_argument("bad path step: " + tok);
    const Word rep = Word::parse(tok.substr(0, dot));
    const char sign = tok[dot + 1];
    if (sign != '+' && sign != '-') throw std::invalid_argument("bad step sign: " + tok);
    const std::string id = tok.substr(dot + 2);
    int edge = -1;
    for (int e = 0; e < c.edge_count(); ++e)
      if (c.spec.edges[e].id == id) edge = e;
    if (edge < 0) throw std::invalid_argument("unknown edge id: " + id);
    const gog::Cross x(edge, sign == '+' ? 1 : -1);
    if (c.cross_source(x) != p.end_vertex)
      throw std::invalid_argument("path step leaves the wrong vertex: " + tok);
    p.steps.push_back({rep, x});
    p.end_vertex = c.cross_target(x);
  }
  return p;
}

namespace {

std::string element_literal(const Compiled& c, const GammaElement& g) {
  return path_literal(c, g.path()) + ":" + g.tail.str();
}

GammaElement parse_element(const Compiled& c, const std::string& s) {
  const size_t colon = s.rfind(':');
  if (colon == std::string::npos) throw std::invalid_argument("bad element literal: " + s);
  const PathForm p = parse_path(c, s.substr(0, colon));
  return {p.steps, Word::parse(s.substr(colon + 1)), p.start_vertex, p.end_vertex};
}

std::string end_literal(const PeriodicEndForm& e) {
  return e.prefix.str() + "(" + e.period.str() + ")";
}

PeriodicEndForm parse_end(const std::string& s) {
  const size_t open = s.find('(');
  if (open == std::string::npos || s.back() != ')')
    throw std::invalid_argument("bad end literal: " + s);
  return freegrp::canonical_end(Word::parse(s.substr(0, open)),
                                Word::parse(s.substr(open + 1, s.size() - open - 2)));
}

std::string open_literal(const Compiled& c, const ChartOpen& u) {
  std::string s = path_literal(c, u.at) + "|i:";
  for (size_t i = 0; i < u.include.size(); ++i) {
    if (i) s += ',';
    s += u.include[i].str();
  }
  s += "|x:";
  for (size_t i = 0; i < u.exclude.size(); ++i) {
    if (i) s += ',';
    s += u.exclude[i].str();
  }
  return s;
}

std::vector<Word> parse_word_list(const std::string& s) {
  std::vector<Word> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(Word::parse(tok));
  return out;
}

ChartOpen parse_open(const Compiled& c, const std::string& s) {
  const size_t b1 = s.find("|i:");
  const size_t b2 = s.find("|x:", b1 == std::string::npos ? 0 : b1 + 3);
  if (b1 == std::string::npos || b2 == std::string::npos)
    throw std::invalid_argument("bad chart open literal: " + s);
  ChartOpen u;
  u.at = parse_path(c, s.substr(0, b1));
  u.include = parse_word_list(s.substr(b1 + 3, b2 - b1 - 3));
  u.exclude = parse_word_list(s.substr(b2 + 3));
  return u;
}

}  // namespace

std::string point_literal(const Compiled& c, const BoundaryPoint& p) {
  switch (p.kind) {
    case BoundaryPoint::Kind::VertexPoint:
      return "V " + path_literal(c, p.chart) + " " + end_literal(p.end);
    case BoundaryPoint::Kind::EdgeParabolic:
      return "P " + path_literal(c, p.cls.vertex) + " " + p.cls.cls.rep.str() + "#" +
             std::to_string(p.cls.cls.peripheral);
    case BoundaryPoint::Kind::TreeEnd:
      if (p.exact)
        return "E " + element_literal(c, p.pre) + " " + element_literal(c, p.per);
      return "T " + path_literal(c, p.approx);
  }
  throw std::logic_error("unreachable");
}

BoundaryPoint parse_point(const Compiled& c, const std::string& s) {
  std::stringstream ss(s);
  std::string tag, a, b;
  ss >> tag >> a;
  if (tag == "V") {
    ss >> b;
    const PathForm chart = parse_path(c, a);
    return glue_class(c, chart, FreeBoundaryPoint::from_end(parse_end(b)));
  }
  if (tag == "P") {
    ss >> b;
    const size_t hash = b.rfind('#');
    if (hash == std::string::npos) throw std::invalid_argument("bad class literal: " + b);
    const Word rep = Word::parse(b.substr(0, hash));
    const int pi = std::stoi(b.substr(hash + 1));
    return glue_class(c, ClassAt{parse_path(c, a), {rep, pi}});
  }
  if (tag == "E") {
    ss >> b;
    return glue_class(c, parse_element(c, a), parse_element(c, b));
  }
  if (tag == "T") return ray_stub(c, parse_path(c, a));
  throw std::invalid_argument("bad point literal: " + s);
}

std::string nbhd_literal(const Compiled& c, const NeighborhoodSpec& w) {
  if (w.kind == NeighborhoodSpec::Kind::Branch)
    return "N branch " + std::to_string(w.m) + " " + path_literal(c, w.branch);
  std::string s = "N chart " + std::to_string(w.m) + " ";
  for (size_t i = 0; i < w.support.size(); ++i) {
    if (i) s += ';';
    s += open_literal(c, w.support[i]);
  }
  return s;
}

NeighborhoodSpec parse_nbhd(const Compiled& c, const std::string& s) {
  std::stringstream ss(s);
  std::string tag, kind, rest;
  int m = 0;
  ss >> tag >> kind >> m;
  if (tag != "N") throw std::invalid_argument("bad neighborhood literal: " + s);
  NeighborhoodSpec w;
  w.m = m;
  if (kind == "branch") {
    ss >> rest;
    w.kind = NeighborhoodSpec::Kind::Branch;
    w.branch = parse_path(c, rest);
    return w;
  }
  if (kind != "chart") throw std::invalid_argument("bad neighborhood kind: " + kind);
  w.kind = NeighborhoodSpec::Kind::Chart;
  ss >> rest;
  std::stringstream parts(rest);
  std::string tok;
  while (std::getline(parts, tok, ';')) w.support.push_back(parse_open(c, tok));
  return w;
}

std::string BoundaryPoint::str(const Compiled& c) const { return point_literal(c, *this); }
std::string NeighborhoodSpec::str(const Compiled& c) const { return nbhd_literal(c, *this); }

}  // namespace gogb::boundary
