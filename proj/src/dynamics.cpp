#include "gogb/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace gogb::dynamics {

using freegrp::CoreGraph;
using freegrp::FreeBoundaryPoint;
using freegrp::Letter;
using freegrp::PeriodicEndForm;
using gog::Cross;
using gog::Step;
using tree::LocalClass;

using gog::gid;
using gog::ginv;
using gog::gmul;
using gog::gpow;

namespace {

GammaElement as_element(const PathForm& p) {
  return {p.steps, Word(), p.start_vertex, p.end_vertex};
}

void require_loop(const Compiled& c, const GammaElement& g, const char* who) {
  if (g.start_vertex != c.spec.base || g.end_vertex != c.spec.base)
    throw std::invalid_argument(std::string(who) + ": element must be a loop at the base vertex");
}

// Is `pre` a step-prefix of `long_p` (as tree vertices: the subtree order).
bool path_extends(const PathForm& long_p, const PathForm& pre) {
  if (pre.length() > long_p.length()) return false;
  for (int i = 0; i < pre.length(); ++i)
    if (!(long_p.steps[static_cast<size_t>(i)] == pre.steps[static_cast<size_t>(i)])) return false;
  return true;
}

// u = y * w^k * y^-1 for a peripheral root w of g (peripherals are primitive
// and cyclically reduced, so conjugacy is rotation matching on the core).
struct PeripheralConj {
  int peripheral = -1;
  Word conj;
};

std::optional<PeripheralConj> peripheral_conjugacy(const freegrp::VertexGroupSpec& g,
                                                   const Word& u) {
  const auto cr = freegrp::cyclic_reduce(u);
  if (cr.core.empty()) return std::nullopt;
  for (int pi = 0; pi < static_cast<int>(g.peripherals.size()); ++pi) {
    const Word& w = g.peripherals[static_cast<size_t>(pi)];
    if (w.empty() || cr.core.size() % w.size() != 0) continue;
    const int k = cr.core.size() / w.size();
    for (const Word& b : {w, w.inverse()}) {
      for (int j = 0; j < b.size(); ++j) {
        if (freegrp::rpow(freegrp::rotate(b, j), k) != cr.core) continue;
        // rot_j = p^-1 b p with p = b.prefix(j), so u = (conj p^-1) b^k (...)^-1
        return PeripheralConj{pi, freegrp::rconcat(cr.conj, b.prefix(j).inverse())};
      }
    }
  }
  return std::nullopt;
}

std::vector<PeriodicEndForm> point_dirs(const Compiled& c, const BoundaryPoint& p) {
  switch (p.kind) {
    case BoundaryPoint::Kind::VertexPoint:
      return {p.end};
    case BoundaryPoint::Kind::EdgeParabolic: {
      const auto& gs = c.group(p.cls.vertex.end_vertex);
      return freegrp::directions(gs, FreeBoundaryPoint::parabolic(p.cls.cls.rep, p.cls.cls.peripheral));
    }
    default:
      return {};
  }
}

PathForm point_position(const BoundaryPoint& p) {
  switch (p.kind) {
    case BoundaryPoint::Kind::VertexPoint:
      return p.chart;
    case BoundaryPoint::Kind::EdgeParabolic:
      return p.cls.vertex;
    default:
      return p.approx;
  }
}

}  // namespace

// ---------------------------------------------------------------------------

std::string ElementClass::str() const {
  switch (kind) {
    case Kind::Elliptic:
      return "elliptic(" + local.str() + ")";
    case Kind::EdgeParabolic:
      return "edge-parabolic(" + cls.cls.rep.str() + "<" + std::to_string(cls.cls.peripheral) +
             ">)";
    case Kind::Loxodromic:
      return "loxodromic(l=" + std::to_string(translation_length) + ")";
  }
  return "?";
}

ElementClass classify(const Compiled& c, const GammaElement& g) {
  require_loop(c, g, "classify");
  if (g.is_identity()) throw std::invalid_argument("classify: identity element");
  ElementClass out;
  const PathForm pos = g.path();
  const int displacement = pos.length();
  const int ts = boundary::translation_steps(c, g);
  if (ts > 0) {
    out.kind = ElementClass::Kind::Loxodromic;
    out.translation_length = ts;
    if ((displacement - ts) % 2 != 0) throw std::logic_error("classify: displacement parity");
    const auto entry = boundary::path_prefix(c, pos, (displacement - ts) / 2);
    out.axis = tree::geodesic(c, entry, gog::translate_vertex(c, g, entry));
    return out;
  }
  // Elliptic: the midpoint of [base, g base] is fixed; conjugating there
  // leaves a pure vertex-group word.
  if (displacement % 2 != 0) throw std::logic_error("classify: odd elliptic displacement");
  const auto mid = boundary::path_prefix(c, pos, displacement / 2);
  if (gog::translate_vertex(c, g, mid) != mid)
    throw std::logic_error("classify: midpoint not fixed");
  const auto em = as_element(mid);
  const auto loc = gmul(c, ginv(c, em), gmul(c, g, em));
  if (!loc.steps.empty()) throw std::logic_error("classify: local part crosses edges");
  out.fixed_vertex = mid;
  out.local = loc.tail;
  const auto pc = peripheral_conjugacy(c.group(mid.end_vertex), loc.tail);
  if (!pc) {
    out.kind = ElementClass::Kind::Elliptic;
    return out;
  }
  out.kind = ElementClass::Kind::EdgeParabolic;
  const Word& w = c.group(mid.end_vertex).peripherals[static_cast<size_t>(pc->peripheral)];
  const Word rep = freegrp::coset_canonical(pc->conj, w).rep;
  out.cls = tree::minimize_class(c, ClassAt{mid, {rep, pc->peripheral}});
  return out;
}

// ---------------------------------------------------------------------------

BoundaryPoint act(const Compiled& c, const GammaElement& g, const BoundaryPoint& p) {
  require_loop(c, g, "act");
  switch (p.kind) {
    case BoundaryPoint::Kind::VertexPoint: {
      const auto h = gmul(c, g, as_element(p.chart));
      const auto fp = freegrp::translate_point(c.group(h.end_vertex), h.tail,
                                               FreeBoundaryPoint::from_end(p.end));
      return boundary::glue_class(c, h.path(), fp);
    }
    case BoundaryPoint::Kind::EdgeParabolic: {
      const auto h = gmul(c, g, as_element(p.cls.vertex));
      const auto fp = freegrp::translate_point(
          c.group(h.end_vertex), h.tail,
          FreeBoundaryPoint::parabolic(p.cls.cls.rep, p.cls.cls.peripheral));
      return boundary::glue_class(c, ClassAt{h.path(), {fp.coset_rep, fp.peripheral}});
    }
    case BoundaryPoint::Kind::TreeEnd:
      if (p.exact) return boundary::glue_class(c, gmul(c, g, p.pre), p.per);
      return boundary::ray_stub(c, gog::translate_vertex(c, g, p.approx));
  }
  throw std::logic_error("act: unreachable");
}

NeighborhoodSpec translate_nbhd(const Compiled& c, const GammaElement& g,
                                const NeighborhoodSpec& w) {
  require_loop(c, g, "translate_nbhd");
  NeighborhoodSpec out;
  out.kind = w.kind;
  out.m = w.m;
  if (w.kind == NeighborhoodSpec::Kind::Branch) {
    if (path_extends(ginv(c, g).path(), w.branch))
      throw std::invalid_argument("translate_nbhd: image subtree contains the base");
    out.branch = gog::translate_vertex(c, g, w.branch);
    return out;
  }
  for (const auto& u : w.support) {
    const auto h = gmul(c, g, as_element(u.at));
    ChartOpen v;
    v.at = h.path();
    auto push = [&](const Word& word, std::vector<Word>& into) {
      const Word t = freegrp::rconcat(h.tail, word);
      const int cancelled = (h.tail.size() + word.size() - t.size()) / 2;
      if (cancelled >= word.size())
        throw std::invalid_argument("translate_nbhd: cylinder cancelled by the local part");
      into.push_back(t);
    };
    for (const auto& word : u.include) push(word, v.include);
    for (const auto& word : u.exclude) push(word, v.exclude);
    out.support.push_back(v);
  }
  return out;
}

// ---------------------------------------------------------------------------

SubgroupHandle SubgroupHandle::cyclic(const GammaElement& g) {
  SubgroupHandle h;
  h.generators = {g};
  return h;
}

SubgroupHandle SubgroupHandle::subgraph(std::vector<int> vertices, std::vector<int> edges) {
  SubgroupHandle h;
  h.sub_vertices = std::move(vertices);
  h.sub_edges = std::move(edges);
  return h;
}

namespace {

void check_handle(const Compiled& c, const SubgroupHandle& h) {
  if (h.is_subgraph()) {
    if (!h.generators.empty())
      throw std::invalid_argument("subgroup handle: subgraph with explicit generators");
    std::set<int> vs(h.sub_vertices.begin(), h.sub_vertices.end());
    if (!vs.count(c.spec.base))
      throw std::invalid_argument("subgroup handle: subgraph must contain the base vertex");
    for (int e : h.sub_edges) {
      if (e < 0 || e >= c.edge_count())
        throw std::invalid_argument("subgroup handle: edge index out of range");
      if (!vs.count(c.spec.edges[static_cast<size_t>(e)].v) ||
          !vs.count(c.spec.edges[static_cast<size_t>(e)].w))
        throw std::invalid_argument("subgroup handle: edge leaves the vertex set");
    }
    return;
  }
  if (h.generators.size() != 1)
    throw std::invalid_argument("subgroup handle: need one generator or a subgraph");
  require_loop(c, h.generators[0], "subgroup handle");
}

bool whole_graph(const Compiled& c, const SubgroupHandle& h) {
  if (static_cast<int>(h.sub_vertices.size()) != c.vertex_count()) return false;
  if (static_cast<int>(h.sub_edges.size()) != c.edge_count()) return false;
  for (const auto& [v, gens] : h.vertex_gens)
    if (!gens.empty()) return false;
  return true;
}

const std::vector<Word>* restricted_gens(const SubgroupHandle& h, int vertex) {
  const auto it = h.vertex_gens.find(vertex);
  if (it == h.vertex_gens.end() || it->second.empty()) return nullptr;
  return &it->second;
}

// Normal-form peel over the subgraph: strip steps from the left, each time
// factoring the step's coset representative as h * m^-k with h in the vertex
// subgroup, until only a vertex-group tail remains. Exact for full vertex
// groups; restricted vertex subgroups may exhaust the power budget.
struct Peel {
  Verdict ok = Verdict::Undecided;
  Word residual;
};

Peel peel_subgraph(const Compiled& c, const SubgroupHandle& h, const GammaElement& r0,
                   int budget) {
  const std::set<int> in_edges(h.sub_edges.begin(), h.sub_edges.end());
  GammaElement r = r0;
  int guard = static_cast<int>(r.steps.size()) + 2;
  while (!r.steps.empty()) {
    if (--guard < 0) return {Verdict::Undecided, {}};
    const Step s = r.steps.front();
    if (!in_edges.count(s.cross.edge)) return {Verdict::False, {}};
    const int v = c.cross_source(s.cross);
    const Word& m = c.source_status(s.cross).image;
    Word hw = s.rep;
    if (const auto* gens = restricted_gens(h, v)) {
      const CoreGraph core(c.group(v).rank, *gens);
      bool found = false;
      const int kb = std::max(4, budget / std::max(1, m.size()));
      for (int k = -kb; k <= kb && !found; ++k) {
        const Word cand = freegrp::rconcat(s.rep, freegrp::rpow(m, k));
        if (core.contains(cand)) {
          hw = cand;
          found = true;
        }
      }
      if (!found) return {Verdict::Undecided, {}};
    }
    const GammaElement th{{}, hw, v, v};
    const GammaElement tx{{Step{Word(), s.cross}}, Word(), v, c.cross_target(s.cross)};
    r = gmul(c, ginv(c, tx), gmul(c, ginv(c, th), r));
  }
  return {Verdict::True, r.tail};
}

Peel peel_vertex(const Compiled& c, const SubgroupHandle& h, const PathForm& w, int budget) {
  return peel_subgraph(c, h, as_element(w), budget);
}

// Total letter weight; bounds cyclic powers.
int element_weight(const GammaElement& g) {
  int n = g.tail.size();
  for (const auto& s : g.steps) n += s.rep.size() + 1;
  return n;
}

// The (at most two) limit points of a cyclic subgroup.
std::vector<BoundaryPoint> cyclic_limits(const Compiled& c, const GammaElement& gen) {
  if (gen.is_identity())
    throw std::invalid_argument("cyclic handle: identity generator has no limit set");
  const auto k = classify(c, gen);
  std::vector<BoundaryPoint> out;
  switch (k.kind) {
    case ElementClass::Kind::Loxodromic:
      out.push_back(boundary::glue_class(c, gid(c, c.spec.base), gen));
      out.push_back(boundary::glue_class(c, gid(c, c.spec.base), ginv(c, gen)));
      break;
    case ElementClass::Kind::EdgeParabolic:
      out.push_back(boundary::glue_class(c, k.cls));
      break;
    case ElementClass::Kind::Elliptic: {
      const auto rd = freegrp::primitive_root(k.local);
      const auto ends = freegrp::fixed_ends({rd.root, rd.exponent}, rd.conj);
      out.push_back(
          boundary::glue_class(c, k.fixed_vertex, FreeBoundaryPoint::from_end(ends.first)));
      out.push_back(
          boundary::glue_class(c, k.fixed_vertex, FreeBoundaryPoint::from_end(ends.second)));
      break;
    }
  }
  return out;
}

}  // namespace

Verdict handle_membership(const Compiled& c, const SubgroupHandle& h, const GammaElement& g,
                          int budget) {
  check_handle(c, h);
  require_loop(c, g, "handle_membership");
  if (h.is_subgraph()) {
    const auto p = peel_subgraph(c, h, g, budget);
    if (p.ok != Verdict::True) return p.ok;
    if (const auto* gens = restricted_gens(h, c.spec.base))
      return CoreGraph(c.group(c.spec.base).rank, *gens).contains(p.residual) ? Verdict::True
                                                                              : Verdict::False;
    return Verdict::True;
  }
  const auto& gen = h.generators[0];
  if (gen.is_identity()) return g.is_identity() ? Verdict::True : Verdict::False;
  if (g.is_identity()) return Verdict::True;
  const int kb = std::min(budget, element_weight(g) + 2);
  const auto gi = ginv(c, gen);
  GammaElement pos = gid(c, c.spec.base), neg = pos;
  for (int k = 1; k <= kb; ++k) {
    pos = gmul(c, pos, gen);
    if (pos == g) return Verdict::True;
    neg = gmul(c, neg, gi);
    if (neg == g) return Verdict::True;
  }
  return Verdict::False;
}

Verdict limit_contains(const Compiled& c, const SubgroupHandle& h, const BoundaryPoint& p,
                       int budget) {
  check_handle(c, h);
  if (!h.is_subgraph()) {
    for (const auto& q : cyclic_limits(c, h.generators[0]))
      if (boundary::equal(c, p, q)) return Verdict::True;
    return Verdict::False;
  }
  if (whole_graph(c, h)) return Verdict::True;
  switch (p.kind) {
    case BoundaryPoint::Kind::VertexPoint: {
      const auto pr = peel_vertex(c, h, p.chart, budget);
      if (pr.ok != Verdict::True) return pr.ok;
      const auto* gens = restricted_gens(h, p.chart.end_vertex);
      if (!gens) return Verdict::True;
      const auto& gs = c.group(p.chart.end_vertex);
      const auto fp =
          freegrp::translate_point(gs, pr.residual.inverse(), FreeBoundaryPoint::from_end(p.end));
      if (fp.kind != FreeBoundaryPoint::Kind::PeriodicEnd) return Verdict::False;
      return CoreGraph(gs.rank, *gens).traces_end(fp.end) ? Verdict::True : Verdict::False;
    }
    case BoundaryPoint::Kind::EdgeParabolic: {
      const auto dom = tree::domain(c, p.cls, {std::min(budget, 8), 4096});
      bool undecided = false;
      for (const auto& ca : dom.verts) {
        const auto pr = peel_vertex(c, h, ca.vertex, budget);
        if (pr.ok == Verdict::Undecided) undecided = true;
        if (pr.ok != Verdict::True) continue;
        const auto* gens = restricted_gens(h, ca.vertex.end_vertex);
        if (!gens) return Verdict::True;
        const auto& gs = c.group(ca.vertex.end_vertex);
        const auto fp = freegrp::translate_point(
            gs, pr.residual.inverse(),
            FreeBoundaryPoint::parabolic(ca.cls.rep, ca.cls.peripheral));
        const CoreGraph core(gs.rank, *gens);
        for (const auto& d : freegrp::directions(gs, fp))
          if (core.traces_end(d)) return Verdict::True;
      }
      if (undecided || !dom.complete) return Verdict::Undecided;
      return Verdict::False;
    }
    case BoundaryPoint::Kind::TreeEnd: {
      if (!p.exact) {
        for (int k = 1; k <= p.approx.length(); ++k) {
          const auto pr = peel_vertex(c, h, boundary::path_prefix(c, p.approx, k), budget);
          if (pr.ok == Verdict::False) return Verdict::False;
        }
        return Verdict::Undecided;
      }
      // A convex subtree meets the ray in an interval: the first vertex off
      // the subtree decides. Past one full period, a periodicity element in
      // the subgroup certifies the tail.
      const int window = p.pre.path().length() + 2 * p.per.path().length() + 4;
      const int scan = std::min(budget, window);
      for (int k = 1; k <= scan; ++k) {
        const auto pr = peel_vertex(c, h, boundary::ray_path(c, p, k), budget);
        if (pr.ok != Verdict::True) return pr.ok;
      }
      if (window > budget) return Verdict::Undecided;
      const auto tau = gmul(c, p.pre, gmul(c, p.per, ginv(c, p.pre)));
      for (int j = 1; j <= 3; ++j)
        if (handle_membership(c, h, gpow(c, tau, j), budget) == Verdict::True)
          return Verdict::True;
      return Verdict::Undecided;
    }
  }
  throw std::logic_error("limit_contains: unreachable");
}

std::vector<BoundaryPoint> limit_set_sample(const Compiled& c, const SubgroupHandle& h,
                                            const SampleParams& sp) {
  check_handle(c, h);
  if (!h.is_subgraph()) return cyclic_limits(c, h.generators[0]);
  std::vector<BoundaryPoint> out;
  for (const auto& p : boundary::sample_points(c, sp))
    if (limit_contains(c, h, p) == Verdict::True) out.push_back(p);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

struct NsCert {
  Verdict verdict = Verdict::Undecided;
  int n0 = 0;
  int captured = 0, skipped = 0, escapees = 0;
  std::string note;
};

NsCert certify_north_south(const Compiled& c, const std::vector<GammaElement>& seq,
                           const std::vector<BoundaryPoint>& sample,
                           const BoundaryPoint& attractor, const BoundaryPoint* repeller,
                           int depth) {
  NsCert out;
  NeighborhoodSpec wa = boundary::basic_nbhd(c, attractor, depth);
  std::optional<NeighborhoodSpec> wr;
  if (repeller) wr = boundary::basic_nbhd(c, *repeller, depth);
  bool undecided = false;
  for (const auto& q : sample) {
    if (repeller && boundary::equal(c, q, *repeller)) {
      ++out.skipped;
      continue;
    }
    if (wr && boundary::in_neighborhood(c, q, *wr) != Verdict::False) {
      ++out.skipped;
      continue;
    }
    int start = -1;
    bool saw_undecided = false;
    for (size_t i = 0; i < seq.size(); ++i) {
      const auto v = boundary::in_neighborhood(c, act(c, seq[i], q), wa);
      if (v == Verdict::True) {
        if (start < 0) start = static_cast<int>(i);
      } else {
        start = -1;
        if (v == Verdict::Undecided) saw_undecided = true;
      }
    }
    if (start < 0) {
      if (saw_undecided) {
        undecided = true;
      } else {
        ++out.escapees;
        if (out.note.empty()) out.note = "escapes: " + boundary::point_literal(c, q);
      }
      continue;
    }
    ++out.captured;
    out.n0 = std::max(out.n0, start + 1);
  }
  if (out.escapees > 0)
    out.verdict = Verdict::False;
  else if (undecided || out.captured == 0)
    out.verdict = Verdict::Undecided;
  else
    out.verdict = Verdict::True;
  return out;
}

}  // namespace

NorthSouthReport north_south_probe(const Compiled& c, const std::vector<GammaElement>& seq,
                                   const std::vector<BoundaryPoint>& sample, int depth) {
  if (seq.size() < 2) throw std::invalid_argument("north_south_probe: need at least two elements");
  if (depth < 1) throw std::invalid_argument("north_south_probe: depth >= 1");
  for (const auto& g : seq) require_loop(c, g, "north_south_probe");
  for (size_t i = 0; i < seq.size(); ++i)
    for (size_t j = i + 1; j < seq.size(); ++j)
      if (seq[i] == seq[j]) throw std::invalid_argument("north_south_probe: repeated element");

  NorthSouthReport out;
  const int tries = std::min<int>(4, static_cast<int>(sample.size()));
  auto accumulate = [&](bool inverse) {
    std::vector<BoundaryPoint> cands;
    for (int t = 0; t < tries; ++t) {
      std::vector<BoundaryPoint> images;
      images.reserve(seq.size());
      for (const auto& g : seq) images.push_back(act(c, inverse ? ginv(c, g) : g, sample[static_cast<size_t>(t)]));
      const auto acc = boundary::accumulation_point(c, images);
      if (!acc.ok) continue;
      bool fresh = true;
      for (const auto& p : cands)
        if (boundary::equal(c, p, acc.limit)) fresh = false;
      if (fresh) cands.push_back(acc.limit);
    }
    return cands;
  };
  const auto attractors = accumulate(false);
  const auto repellers = accumulate(true);
  if (attractors.empty()) {
    out.note = "no attractor candidate accumulated";
    return out;
  }

  // Try candidate pairs, distinct attractor/repeller first; keep the best.
  struct Pick {
    NsCert cert;
    const BoundaryPoint* a = nullptr;
    const BoundaryPoint* r = nullptr;
    bool set = false;
  } best;
  auto better = [](const NsCert& x, const NsCert& y) {
    auto rank = [](Verdict v) { return v == Verdict::True ? 2 : (v == Verdict::Undecided ? 1 : 0); };
    return rank(x.verdict) > rank(y.verdict);
  };
  auto consider = [&](const BoundaryPoint& a, const BoundaryPoint* r) {
    if (best.set && best.cert.verdict == Verdict::True) return;
    NsCert cert;
    try {
      cert = certify_north_south(c, seq, sample, a, r, depth);
    } catch (const std::invalid_argument& e) {
      cert.note = e.what();
    }
    if (!best.set || better(cert, best.cert)) best = {cert, &a, r, true};
  };
  for (const auto& a : attractors) {
    for (const auto& r : repellers)
      if (!boundary::equal(c, a, r)) consider(a, &r);
  }
  for (const auto& a : attractors) {
    for (const auto& r : repellers)
      if (boundary::equal(c, a, r)) consider(a, &r);
    if (repellers.empty()) consider(a, nullptr);
  }

  out.attractor = *best.a;
  out.have_attractor = true;
  if (best.r) {
    out.repeller = *best.r;
    out.have_repeller = true;
  }
  out.capture_n0 = best.cert.n0;
  out.captured = best.cert.captured;
  out.skipped = best.cert.skipped;
  out.escapees = best.cert.escapees;
  out.certified = best.cert.verdict;
  out.note = best.cert.note;
  return out;
}

// ---------------------------------------------------------------------------

namespace {

// The deepest cylinder level two distinct points share: letters within one
// chart, steps at tree level.
int agreement_depth(const Compiled& c, const BoundaryPoint& a, const BoundaryPoint& b) {
  const bool ta = a.kind == BoundaryPoint::Kind::TreeEnd;
  const bool tb = b.kind == BoundaryPoint::Kind::TreeEnd;
  if (ta || tb) {
    auto ray_or_pos = [&](const BoundaryPoint& p, int k) {
      if (p.kind == BoundaryPoint::Kind::TreeEnd)
        return p.exact ? boundary::ray_path(c, p, k) : p.approx;
      return point_position(p);
    };
    for (int k = 4; k <= 64; k *= 2) {
      const auto pa = ray_or_pos(a, k), pb = ray_or_pos(b, k);
      const int g = tree::gromov(pa, pb);
      if (g < std::min(pa.length(), pb.length())) return g;
    }
    return 64;
  }
  const auto pa = point_position(a), pb = point_position(b);
  if (!(pa == pb)) return tree::gromov(pa, pb);
  int bestd = 0;
  for (const auto& da : point_dirs(c, a))
    for (const auto& db : point_dirs(c, b))
      bestd = std::max(bestd, freegrp::common_prefix_len(da, db));
  return bestd;
}

}  // namespace

QcReport dyn_qc_probe(const Compiled& c, const SubgroupHandle& h,
                      const std::vector<GammaElement>& cosets, int depth) {
  check_handle(c, h);
  if (h.is_subgraph()) throw std::invalid_argument("dyn_qc_probe: cyclic handle required");
  if (depth < 1) throw std::invalid_argument("dyn_qc_probe: depth >= 1");
  for (size_t i = 0; i < cosets.size(); ++i) {
    require_loop(c, cosets[i], "dyn_qc_probe");
    if (handle_membership(c, h, cosets[i]) != Verdict::False)
      throw std::invalid_argument("dyn_qc_probe: coset representative lies in the subgroup");
    for (size_t j = 0; j < i; ++j)
      if (handle_membership(c, h, gmul(c, ginv(c, cosets[j]), cosets[i])) != Verdict::False)
        throw std::invalid_argument("dyn_qc_probe: coinciding cosets");
  }
  QcReport out;
  out.depth = depth;
  out.h_limits = cyclic_limits(c, h.generators[0]);
  const double bound = std::ldexp(1.0, 1 - depth);
  for (const auto& g : cosets) {
    QcRow row;
    row.g = g;
    if (out.h_limits.size() < 2) {
      row.agreement = 1 << 16;  // singleton limit set: zero diameter
      row.diameter = 0.0;
    } else {
      row.agreement =
          agreement_depth(c, act(c, g, out.h_limits[0]), act(c, g, out.h_limits[1]));
      row.diameter = std::ldexp(1.0, -row.agreement);
    }
    if (row.diameter > bound) ++out.exceeding;
    out.rows.push_back(row);
  }
  return out;
}

// ---------------------------------------------------------------------------

ConicalReport conical_witness(const Compiled& c, const BoundaryPoint& end, int count, int depth,
                              const SampleParams& sp) {
  if (end.kind != BoundaryPoint::Kind::TreeEnd || !end.exact)
    throw std::invalid_argument("conical_witness: exact tree end required");
  if (count < 2) throw std::invalid_argument("conical_witness: need at least two elements");
  if (depth < 1) throw std::invalid_argument("conical_witness: depth >= 1");
  ConicalReport out;
  for (int n = 1; n <= count; ++n) out.gammas.push_back(gmul(c, end.pre, gpow(c, end.per, n)));
  const auto pts = boundary::sample_points(c, sp, {end.per});

  // Accumulate over a longer power run than is reported: back-orbits shed
  // one point per shared level, so short runs stall before a period repeats.
  std::vector<GammaElement> acc_gammas = out.gammas;
  for (int n = count + 1; n <= std::max(count, 8); ++n)
    acc_gammas.push_back(gmul(c, end.pre, gpow(c, end.per, n)));

  // References equal to the end itself have constant back-orbits and would
  // nominate the end as its own collapse point; skip them.
  std::vector<BoundaryPoint> cands;
  int used = 0;
  for (size_t t = 0; t < pts.size() && used < 4; ++t) {
    if (boundary::equal(c, pts[t], end)) continue;
    ++used;
    std::vector<BoundaryPoint> back;
    for (const auto& g : acc_gammas) back.push_back(act(c, ginv(c, g), pts[t]));
    const auto acc = boundary::accumulation_point(c, back);
    if (!acc.ok) continue;
    bool fresh = true;
    for (const auto& p : cands)
      if (boundary::equal(c, p, acc.limit)) fresh = false;
    if (fresh) cands.push_back(acc.limit);
  }
  if (cands.empty()) {
    out.note = "no collapse candidate accumulated";
    return out;
  }

  struct Attempt {
    Verdict verdict = Verdict::Undecided;
    int collapsed = 0, skipped = 0;
    std::string note;
  };
  auto certify = [&](const BoundaryPoint& collapse) {
    Attempt at;
    NeighborhoodSpec w;
    try {
      w = boundary::basic_nbhd(c, collapse, depth);
    } catch (const std::invalid_argument& e) {
      at.note = e.what();
      return at;
    }
    bool all_ok = true, undecided = false;
    for (const auto& q : pts) {
      if (boundary::equal(c, q, end)) {
        ++at.skipped;
        continue;
      }
      int start = -1;
      bool saw_und = false;
      for (const auto& g : out.gammas) {
        const auto v = boundary::in_neighborhood(c, act(c, ginv(c, g), q), w);
        if (v == Verdict::True) {
          if (start < 0) start = 0;
        } else {
          start = -1;
          if (v == Verdict::Undecided) saw_und = true;
        }
      }
      if (start < 0) {
        all_ok = false;
        undecided = saw_und;
        at.note = "sample not collapsed: " + boundary::point_literal(c, q);
        break;
      }
      ++at.collapsed;
    }
    if (all_ok) {
      for (const auto& g : out.gammas) {
        const auto v = boundary::in_neighborhood(c, act(c, ginv(c, g), end), w);
        if (v != Verdict::False) {
          all_ok = false;
          undecided = v == Verdict::Undecided;
          at.note = "pulled-back end not separated from the collapse point";
          break;
        }
      }
    }
    at.verdict = all_ok ? Verdict::True : (undecided ? Verdict::Undecided : Verdict::False);
    return at;
  };

  auto rank = [](Verdict v) { return v == Verdict::True ? 2 : (v == Verdict::Undecided ? 1 : 0); };
  Attempt best;
  size_t best_i = 0;
  bool have = false;
  for (size_t i = 0; i < cands.size(); ++i) {
    const auto at = certify(cands[i]);
    if (!have || rank(at.verdict) > rank(best.verdict)) {
      best = at;
      best_i = i;
      have = true;
    }
    if (best.verdict == Verdict::True) break;
  }
  out.collapse = cands[best_i];
  out.have_collapse = true;
  out.collapsed = best.collapsed;
  out.skipped = best.skipped;
  out.note = best.note;
  out.certified = best.verdict;
  return out;
}

// ---------------------------------------------------------------------------

std::vector<GammaElement> parabolic_stabilizer(const Compiled& c, const BoundaryPoint& x,
                                               int radius) {
  if (x.kind != BoundaryPoint::Kind::EdgeParabolic)
    throw std::invalid_argument("parabolic_stabilizer: edge class required");
  std::vector<GammaElement> out;
  const auto dom = tree::domain(c, x.cls, {radius, 512});
  for (const auto& ca : dom.verts) {
    const auto& gs = c.group(ca.vertex.end_vertex);
    const Word& w = gs.peripherals[static_cast<size_t>(ca.cls.peripheral)];
    const Word loop = freegrp::rconcat(ca.cls.rep, freegrp::rconcat(w, ca.cls.rep.inverse()));
    const auto em = as_element(ca.vertex);
    const GammaElement local{{}, loop, ca.vertex.end_vertex, ca.vertex.end_vertex};
    out.push_back(gmul(c, em, gmul(c, local, ginv(c, em))));
  }
  // On an infinite domain a carrier shifts the minimal vertex to another
  // domain vertex in the same fiber, matching the local classes.
  if (!dom.complete) {
    const auto& minv = dom.verts.front();
    for (const auto& ca : dom.verts) {
      if (ca.vertex == minv.vertex) continue;
      if (ca.vertex.end_vertex != minv.vertex.end_vertex) continue;
      const GammaElement to_class{ca.vertex.steps,
                                  freegrp::rconcat(ca.cls.rep, minv.cls.rep.inverse()),
                                  ca.vertex.start_vertex, ca.vertex.end_vertex};
      const auto cand = gmul(c, to_class, ginv(c, as_element(minv.vertex)));
      if (boundary::equal(c, act(c, cand, x), x)) {
        out.push_back(cand);
        break;
      }
    }
  }
  return out;
}

CoverReport bounded_parabolic_witness(const Compiled& c, const BoundaryPoint& x, int depth,
                                      const SampleParams& sp, int translate_budget) {
  if (x.kind != BoundaryPoint::Kind::EdgeParabolic)
    throw std::invalid_argument("bounded_parabolic_witness: edge class required");
  if (depth < 1) throw std::invalid_argument("bounded_parabolic_witness: depth >= 1");
  CoverReport out;
  const auto dom = tree::domain(c, x.cls, {4, 64});
  std::vector<NeighborhoodSpec> kspecs;
  for (const auto& ca : dom.verts) {
    const auto& gs = c.group(ca.vertex.end_vertex);
    ChartOpen u;
    u.at = ca.vertex;
    for (const auto& d : freegrp::directions(
             gs, FreeBoundaryPoint::parabolic(ca.cls.rep, ca.cls.peripheral)))
      u.exclude.push_back(freegrp::end_prefix(d, depth));
    out.compacts.push_back(u);
    NeighborhoodSpec w;
    w.kind = NeighborhoodSpec::Kind::Chart;
    w.support = {u};
    w.m = depth;
    kspecs.push_back(w);
  }
  out.q_gens = parabolic_stabilizer(c, x);

  // Ball of stabilizer products.
  std::vector<GammaElement> qball{gid(c, c.spec.base)};
  std::set<std::string> seen{qball[0].str(c)};
  std::vector<GammaElement> frontier = qball;
  for (int d = 0; d < translate_budget; ++d) {
    std::vector<GammaElement> next;
    for (const auto& q : frontier) {
      for (const auto& g : out.q_gens) {
        for (int s : {1, -1}) {
          const auto e = gmul(c, q, s > 0 ? g : ginv(c, g));
          if (seen.insert(e.str(c)).second) {
            qball.push_back(e);
            next.push_back(e);
          }
        }
      }
    }
    frontier = std::move(next);
  }

  const auto near_x = boundary::basic_nbhd(c, x, depth);
  for (const auto& z : boundary::sample_points(c, sp)) {
    if (boundary::equal(c, z, x) || boundary::in_neighborhood(c, z, near_x) != Verdict::False) {
      ++out.skipped;
      continue;
    }
    bool covered = false;
    for (const auto& q : qball) {
      const auto zz = act(c, q, z);
      for (const auto& w : kspecs) {
        if (boundary::in_neighborhood(c, zz, w) == Verdict::True) {
          covered = true;
          break;
        }
      }
      if (covered) break;
    }
    if (covered)
      ++out.covered;
    else
      out.uncovered.push_back(boundary::point_literal(c, z));
  }
  out.certified = out.uncovered.empty() ? Verdict::True : Verdict::False;
  return out;
}

// ---------------------------------------------------------------------------

StabilizerReport stabilizer_probe(const Compiled& c, const SubgroupHandle& h,
                                  const std::vector<GammaElement>& candidates, int budget,
                                  const SampleParams& sp) {
  check_handle(c, h);
  StabilizerReport out;
  out.ok = Verdict::True;
  const auto lam = limit_set_sample(c, h, sp);
  for (const auto& g : candidates) {
    StabilizerRow row;
    row.g = g;
    row.member = handle_membership(c, h, g, budget);
    bool moved = false, und = false;
    for (const auto& p : lam) {
      const auto v = limit_contains(c, h, act(c, g, p), budget);
      if (v == Verdict::False) {
        moved = true;
        row.witness = boundary::point_literal(c, p);
        break;
      }
      if (v == Verdict::Undecided) und = true;
    }
    if (moved)
      row.preserved = Verdict::False;
    else if (und || lam.empty())
      row.preserved = Verdict::Undecided;
    else
      row.preserved = Verdict::True;
    if ((row.member == Verdict::True && row.preserved == Verdict::True) ||
        (row.member == Verdict::False && row.preserved == Verdict::False))
      ++out.consistent;
    else if (row.member == Verdict::True && row.preserved == Verdict::False)
      out.ok = Verdict::False;
    else if (out.ok == Verdict::True)
      out.ok = Verdict::Undecided;
    out.rows.push_back(row);
  }
  return out;
}

// ---------------------------------------------------------------------------

GammaElement random_element(const Compiled& c, Rng& rng, int crossings, int word_len) {
  auto random_word = [&](int rank) {
    const int len = rng.below(word_len + 1);
    std::vector<Letter> ls;
    ls.reserve(static_cast<size_t>(len));
    for (int i = 0; i < len && rank > 0; ++i) {
      Letter x;
      do {
        const int gen = rng.below(rank) + 1;
        x = static_cast<Letter>(rng.coin() ? gen : -gen);
      } while (!ls.empty() && x == freegrp::letter_inv(ls.back()));
      ls.push_back(x);
    }
    return Word(std::move(ls));
  };
  gog::Builder b(c);
  for (int i = 0; i < crossings; ++i) {
    b.push_word(random_word(c.group(b.vertex()).rank));
    const auto& inc = c.incident[static_cast<size_t>(b.vertex())];
    if (inc.empty()) break;
    const auto pick = inc[static_cast<size_t>(rng.below(static_cast<int>(inc.size())))];
    b.push_cross(pick.edge, pick.dir);
  }
  const auto back = c.tree_path[static_cast<size_t>(b.vertex())];
  for (auto it = back.rbegin(); it != back.rend(); ++it) b.push_cross(it->reversed());
  b.push_word(random_word(c.group(b.vertex()).rank));
  return b.element();
}

}  // namespace gogb::dynamics
