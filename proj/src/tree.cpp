#include "gogb/tree.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <queue>

namespace gogb::tree {

using freegrp::coset_canonical;
using freegrp::rconcat;
using freegrp::rpow;
using gog::EndpointStatus;
using gog::Incidence;
using gog::Step;

PathForm parent(const Compiled& c, const PathForm& v) {
  assert(!v.steps.empty());
  PathForm p = v;
  p.end_vertex = c.cross_source(p.steps.back().cross);
  p.steps.pop_back();
  return p;
}

namespace {

int common_steps(const PathForm& a, const PathForm& b) {
  const int n = std::min(a.length(), b.length());
  int i = 0;
  while (i < n && a.steps[i] == b.steps[i]) ++i;
  return i;
}

}  // namespace

int distance(const PathForm& a, const PathForm& b) {
  assert(a.start_vertex == b.start_vertex);
  const int cp = common_steps(a, b);
  return a.length() + b.length() - 2 * cp;
}

int gromov(const PathForm& a, const PathForm& b) {
  assert(a.start_vertex == b.start_vertex);
  return common_steps(a, b);
}

std::vector<PathForm> geodesic(const Compiled& c, const PathForm& a, const PathForm& b) {
  const int cp = common_steps(a, b);
  std::vector<PathForm> out;
  PathForm cur = a;
  while (cur.length() > cp) {
    out.push_back(cur);
    cur = parent(c, cur);
  }
  out.push_back(cur);  // the meet
  for (int i = cp; i < b.length(); ++i) {
    PathForm next = out.back();
    next.steps.push_back(b.steps[i]);
    next.end_vertex = c.cross_target(b.steps[i].cross);
    out.push_back(next);
  }
  return out;
}

// ---------------------------------------------------------------------------

LocalClass edge_trace(const Compiled& c, const Word& s, Cross x) {
  const EndpointStatus& st = c.source_status(x);
  assert(st.parabolic);
  const Word& w = c.group(c.cross_source(x)).peripherals[st.peripheral];
  return {coset_canonical(rconcat(s, st.kappa), w).rep, st.peripheral};
}

LocalClass far_trace(const Compiled& c, Cross x) {
  const EndpointStatus& st = c.target_status(x);
  assert(st.parabolic);
  const Word& w = c.group(c.cross_target(x)).peripherals[st.peripheral];
  return {coset_canonical(st.kappa, w).rep, st.peripheral};
}

LocalClass back_edge_trace(const Compiled& c, const PathForm& v) {
  assert(!v.steps.empty());
  return far_trace(c, v.steps.back().cross);
}

std::vector<GlueEdge> glue_edges(const Compiled& c, const ClassAt& x) {
  std::vector<GlueEdge> out;
  const int at = x.vertex.end_vertex;
  const bool has_parent = !x.vertex.steps.empty();
  const Step last = has_parent ? x.vertex.steps.back() : Step{};

  if (has_parent && far_trace(c, last.cross) == x.cls) {
    GlueEdge ge;
    ge.s = Word{};
    ge.cross = last.cross.reversed();
    ge.other = {parent(c, x.vertex), edge_trace(c, last.rep, last.cross)};
    ge.to_parent = true;
    out.push_back(std::move(ge));
  }

  for (const Incidence& inc : c.incident[at]) {
    const Cross cross{inc.edge, inc.dir};
    const EndpointStatus& st = c.source_status(cross);
    if (!st.parabolic || st.peripheral != x.cls.peripheral) continue;
    const Word& w = c.group(at).peripherals[st.peripheral];
    // Edge cosets through the class g<w>: s_j <m> for s_j == rep(g w^j k^-1),
    // one per residue j modulo the endpoint index.
    for (int j = 0; j < st.index; ++j) {
      const Word raw = rconcat(rconcat(x.cls.rep, rpow(w, j)), st.kappa.inverse());
      const Word s = coset_canonical(raw, st.image).rep;
      if (s.empty() && has_parent && cross == last.cross.reversed()) continue;  // parent edge
      GlueEdge ge;
      ge.s = s;
      ge.cross = cross;
      PathForm child = x.vertex;
      child.steps.push_back({s, cross});
      child.end_vertex = c.cross_target(cross);
      ge.other = {std::move(child), far_trace(c, cross)};
      out.push_back(std::move(ge));
    }
  }
  return out;
}

ClassAt minimize_class(const Compiled& c, const ClassAt& x) {
  ClassAt cur = x;
  while (!cur.vertex.steps.empty()) {
    const Step& last = cur.vertex.steps.back();
    if (far_trace(c, last.cross) != cur.cls) break;
    cur = {parent(c, cur.vertex), edge_trace(c, last.rep, last.cross)};
  }
  return cur;
}

std::optional<LocalClass> in_domain(const Compiled& c, const ClassAt& x, const PathForm& v) {
  const ClassAt m = minimize_class(c, x);
  // The domain is a subtree whose closest vertex to the base is m.vertex, so
  // every domain vertex extends m.vertex's path.
  if (v.length() < m.vertex.length()) return std::nullopt;
  if (common_steps(m.vertex, v) != m.vertex.length()) return std::nullopt;
  LocalClass cls = m.cls;
  for (int i = m.vertex.length(); i < v.length(); ++i) {
    const Step& st = v.steps[i];
    if (edge_trace(c, st.rep, st.cross) != cls) return std::nullopt;
    cls = far_trace(c, st.cross);
  }
  return cls;
}

DomainView domain(const Compiled& c, const ClassAt& x, const DomainParams& params) {
  const ClassAt m = minimize_class(c, x);
  DomainView view;
  view.complete = true;
  std::map<PathForm, int> index;
  std::queue<std::pair<int, int>> work;  // (vertex index, depth)
  view.verts.push_back(m);
  index.emplace(m.vertex, 0);
  work.push({0, 0});
  while (!work.empty()) {
    const auto [vi, depth] = work.front();
    work.pop();
    view.radius = std::max(view.radius, depth);
    const ClassAt cur = view.verts[vi];  // copy: view.verts may reallocate
    for (const GlueEdge& ge : glue_edges(c, cur)) {
      const auto it = index.find(ge.other.vertex);
      if (it != index.end()) continue;  // tree: already discovered from the other side
      if (depth + 1 > params.radius ||
          static_cast<int>(view.verts.size()) >= params.max_vertices) {
        view.complete = false;
        continue;
      }
      const int ni = static_cast<int>(view.verts.size());
      view.verts.push_back(ge.other);
      index.emplace(ge.other.vertex, ni);
      view.edges.push_back({vi, ni});
      work.push({ni, depth + 1});
    }
  }
  return view;
}

// ---------------------------------------------------------------------------

std::vector<Word> coset_transversal(const Compiled& c, int vertex, const Word& m, int max_len) {
  std::vector<Word> out;
  for (const Word& s : freegrp::reduced_words_up_to(c.group(vertex).rank, max_len))
    if (coset_canonical(s, m).rep == s) out.push_back(s);
  return out;
}

BallView tree_ball(const Compiled& c, const PathForm& center, const BallParams& params) {
  BallView view;
  std::map<PathForm, int> index;
  std::queue<int> work;
  view.verts.push_back(center);
  view.depth.push_back(0);
  index.emplace(center, 0);
  work.push(0);
  while (!work.empty()) {
    const int vi = work.front();
    work.pop();
    if (view.depth[vi] >= params.radius) continue;
    const PathForm cur = view.verts[vi];
    std::vector<PathForm> nbrs;
    if (!cur.steps.empty()) nbrs.push_back(parent(c, cur));
    for (const Incidence& inc : c.incident[cur.end_vertex]) {
      const Cross cross{inc.edge, inc.dir};
      const Word& m = c.source_status(cross).image;
      for (const Word& s : coset_transversal(c, cur.end_vertex, m, params.transversal_len)) {
        if (s.empty() && !cur.steps.empty() && cross == cur.steps.back().cross.reversed())
          continue;  // that's the parent
        PathForm child = cur;
        child.steps.push_back({s, cross});
        child.end_vertex = c.cross_target(cross);
        nbrs.push_back(std::move(child));
      }
    }
    for (PathForm& nb : nbrs) {
      if (index.count(nb)) continue;
      if (static_cast<int>(view.verts.size()) >= params.max_vertices) {
        view.vertex_limit_hit = true;
        break;
      }
      const int ni = static_cast<int>(view.verts.size());
      index.emplace(nb, ni);
      view.verts.push_back(std::move(nb));
      view.depth.push_back(view.depth[vi] + 1);
      view.edges.push_back({vi, ni});
      work.push(ni);
    }
  }
  return view;
}

}  // namespace gogb::tree
