#include "gogb/gog.hpp"

#include <algorithm>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>

namespace gogb::gog {

using freegrp::coset_canonical;
using freegrp::malnormal_family_check;
using freegrp::primitive_root;
using freegrp::rconcat;
using freegrp::RootData;
using freegrp::rotate;
using freegrp::rpow;

namespace {

EndpointStatus endpoint_status(const VertexGroupSpec& g, const Word& image) {
  EndpointStatus s;
  s.image = image;
  if (image.empty()) return s;
  const RootData rd = primitive_root(image);
  s.root = rd.root;
  s.index = rd.exponent;
  for (int p = 0; p < static_cast<int>(g.peripherals.size()); ++p) {
    const Word& w = g.peripherals[p];
    if (w.size() != rd.root.size()) continue;
    for (int sgn : {+1, -1}) {
      const Word ws = sgn > 0 ? w : w.inverse();
      for (int j = 0; j < ws.size(); ++j) {
        if (rotate(ws, j) != rd.root) continue;
        s.parabolic = true;
        s.peripheral = p;
        s.sign = sgn;
        s.kappa = rconcat(rd.conj, ws.prefix(j).inverse());
        return s;
      }
    }
  }
  return s;
}

bool word_in_rank(const Word& w, int rank) {
  for (int i = 0; i < w.size(); ++i)
    if (freegrp::gen_of(w.at(i)) >= rank) return false;
  return true;
}

}  // namespace

ValidationReport validate(const GraphSpec& spec) {
  ValidationReport rep;
  rep.status.resize(spec.edges.size());
  auto err = [&rep](std::string where, std::string msg) {
    rep.errors.push_back({std::move(where), std::move(msg)});
  };

  const int nv = static_cast<int>(spec.vertices.size());
  if (nv == 0) {
    err("graph", "no vertices");
    return rep;
  }
  if (spec.base < 0 || spec.base >= nv) err("graph", "base vertex out of range");

  std::set<std::string> vertex_ids;
  for (const auto& v : spec.vertices) {
    const std::string where = "vertex " + v.id;
    if (!vertex_ids.insert(v.id).second) err(where, "duplicate vertex id");
    if (v.group.rank < 0) err(where, "negative rank");
    for (const auto& viol : malnormal_family_check(v.group)) err(where, viol.describe());
    for (const Word& w : v.group.peripherals)
      if (!word_in_rank(w, v.group.rank)) err(where, "peripheral uses a generator outside the group");
  }

  std::set<std::string> edge_ids;
  int tree_edges = 0;
  for (int ei = 0; ei < static_cast<int>(spec.edges.size()); ++ei) {
    const auto& e = spec.edges[ei];
    const std::string where = "edge " + e.id;
    if (!edge_ids.insert(e.id).second) err(where, "duplicate edge id");
    if (e.v < 0 || e.v >= nv || e.w < 0 || e.w >= nv) {
      err(where, "endpoint vertex out of range");
      continue;
    }
    if (e.in_tree) ++tree_edges;
    const struct {
      const Word* image;
      int vertex;
    } sides[2] = {{&e.image_v, e.v}, {&e.image_w, e.w}};
    for (int side = 0; side < 2; ++side) {
      const auto& g = spec.vertices[sides[side].vertex].group;
      const std::string at = where + " at vertex " + spec.vertices[sides[side].vertex].id;
      if (sides[side].image->empty()) {
        err(at, "edge image is trivial");
        continue;
      }
      if (!word_in_rank(*sides[side].image, g.rank)) {
        err(at, "edge image uses a generator outside the vertex group");
        continue;
      }
      rep.status[ei][side] = endpoint_status(g, *sides[side].image);
      if (!rep.status[ei][side].parabolic)
        rep.warnings.push_back(
            {at, "edge image is loxodromic in the vertex group; parabolize before compiling"});
    }
  }

  // Spanning tree: exactly nv-1 tree edges connecting everything.
  if (tree_edges != nv - 1) {
    err("graph", "tree edges do not form a spanning tree (wrong count)");
  } else {
    std::vector<char> seen(nv, 0);
    std::queue<int> q;
    q.push(spec.base >= 0 && spec.base < nv ? spec.base : 0);
    seen[q.front()] = 1;
    int reached = 1;
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      for (int ei = 0; ei < static_cast<int>(spec.edges.size()); ++ei) {
        const auto& e = spec.edges[ei];
        if (!e.in_tree || (e.v != u && e.w != u)) continue;
        const int other = e.v == u ? e.w : e.v;
        if (other >= 0 && other < nv && !seen[other]) {
          seen[other] = 1;
          ++reached;
          q.push(other);
        }
      }
    }
    if (reached != nv) err("graph", "tree edges do not connect all vertices");
  }
  return rep;
}

GraphSpec parabolize(const GraphSpec& spec) {
  const ValidationReport rep = validate(spec);
  if (!rep.ok())
    throw std::invalid_argument("parabolize: invalid graph of groups: " + rep.errors[0].where +
                                ": " + rep.errors[0].message);
  GraphSpec out = spec;
  for (const auto& e : out.edges) {
    const struct {
      const Word* image;
      int vertex;
    } sides[2] = {{&e.image_v, e.v}, {&e.image_w, e.w}};
    for (const auto& side : sides) {
      // Recompute against the growing family: a second endpoint whose image
      // is conjugate to a root appended moments ago is already parabolic.
      auto& g = out.vertices[side.vertex].group;
      if (!endpoint_status(g, *side.image).parabolic)
        g.peripherals.push_back(primitive_root(*side.image).root);
    }
  }
  return out;
}

Compiled compile(const GraphSpec& spec) {
  const ValidationReport rep = validate(spec);
  if (!rep.ok())
    throw std::invalid_argument("invalid graph of groups: " + rep.errors[0].where + ": " +
                                rep.errors[0].message);
  for (const auto& st : rep.status)
    for (int side = 0; side < 2; ++side)
      if (!st[side].parabolic)
        throw std::invalid_argument(
            "edge image is not conjugate into a peripheral subgroup; parabolize the spec first");
  Compiled c;
  c.spec = spec;
  c.status.resize(spec.edges.size());
  c.incident.resize(spec.vertices.size());
  c.peripheral_used.resize(spec.vertices.size());
  for (int v = 0; v < c.vertex_count(); ++v)
    c.peripheral_used[v].assign(spec.vertices[v].group.peripherals.size(), false);

  for (int ei = 0; ei < c.edge_count(); ++ei) {
    const auto& e = spec.edges[ei];
    c.status[ei][0] = endpoint_status(spec.vertices[e.v].group, e.image_v);
    c.status[ei][1] = endpoint_status(spec.vertices[e.w].group, e.image_w);
    c.incident[e.v].push_back({ei, +1});
    c.incident[e.w].push_back({ei, -1});
    c.peripheral_used[e.v][c.status[ei][0].peripheral] = true;
    c.peripheral_used[e.w][c.status[ei][1].peripheral] = true;
  }

  c.tree_path.assign(spec.vertices.size(), {});
  std::vector<char> seen(spec.vertices.size(), 0);
  std::queue<int> q;
  q.push(spec.base);
  seen[spec.base] = 1;
  while (!q.empty()) {
    const int u = q.front();
    q.pop();
    for (const Incidence& inc : c.incident[u]) {
      if (!spec.edges[inc.edge].in_tree) continue;
      const Cross x{inc.edge, inc.dir};
      const int other = c.cross_target(x);
      if (seen[other]) continue;
      seen[other] = 1;
      c.tree_path[other] = c.tree_path[u];
      c.tree_path[other].push_back(x);
      q.push(other);
    }
  }
  return c;
}

// ---------------------------------------------------------------------------

bool PathForm::operator<(const PathForm& o) const {
  if (start_vertex != o.start_vertex) return start_vertex < o.start_vertex;
  if (end_vertex != o.end_vertex) return end_vertex < o.end_vertex;
  return std::lexicographical_compare(steps.begin(), steps.end(), o.steps.begin(), o.steps.end());
}

namespace {

void print_steps(std::ostringstream& os, const Compiled& c, const std::vector<Step>& steps) {
  for (const Step& s : steps) {
    if (!s.rep.empty()) os << s.rep.str() << " ";
    os << (s.cross.dir > 0 ? "" : "~") << c.spec.edges[s.cross.edge].id << "> ";
  }
}

}  // namespace

std::string PathForm::str(const Compiled& c) const {
  std::ostringstream os;
  print_steps(os, c, steps);
  os << "[" << c.spec.vertices[end_vertex].id << "]";
  return os.str();
}

std::string GammaElement::str(const Compiled& c) const {
  std::ostringstream os;
  print_steps(os, c, steps);
  os << tail.str();
  return os.str();
}

void Builder::push_word(const Word& u) { tail_ = rconcat(tail_, u); }

void Builder::push_cross(Cross x) {
  assert(x.edge >= 0 && x.edge < c_->edge_count() && (x.dir == 1 || x.dir == -1));
  assert(at_ == c_->cross_source(x));
  const Word& m_src = c_->source_status(x).image;
  const Word& m_tgt = c_->target_status(x).image;
  const auto cr = coset_canonical(tail_, m_src);
  const int target = c_->cross_target(x);
  // tail == rep * m_src^power and m_src^p * x == x * m_tgt^p.
  if (cr.rep.empty() && !steps_.empty() && steps_.back().cross == x.reversed()) {
    // immediate backtrack: ... s (~x) m_src^p (x) ...  ==  ... s m_tgt^p ...
    const Word s_last = steps_.back().rep;
    steps_.pop_back();
    tail_ = rconcat(s_last, rpow(m_tgt, cr.power));
  } else {
    steps_.push_back({cr.rep, x});
    tail_ = rpow(m_tgt, cr.power);
  }
  at_ = target;
}

void Builder::push_element(const GammaElement& g) {
  assert(g.start_vertex == at_);
  for (const Step& s : g.steps) {
    push_word(s.rep);
    push_cross(s.cross);
  }
  push_word(g.tail);
}

void Builder::push_path(const PathForm& p) {
  assert(p.start_vertex == at_);
  for (const Step& s : p.steps) {
    push_word(s.rep);
    push_cross(s.cross);
  }
}

GammaElement gmul(const Compiled& c, const GammaElement& a, const GammaElement& b) {
  Builder bld(c, a.start_vertex);
  bld.push_element(a);
  bld.push_element(b);
  return bld.element();
}

GammaElement ginv(const Compiled& c, const GammaElement& a) {
  Builder bld(c, a.end_vertex);
  bld.push_word(a.tail.inverse());
  for (auto it = a.steps.rbegin(); it != a.steps.rend(); ++it) {
    bld.push_cross(it->cross.reversed());
    bld.push_word(it->rep.inverse());
  }
  return bld.element();
}

GammaElement gpow(const Compiled& c, const GammaElement& a, int n) {
  if (n == 0) return gid(c, a.start_vertex);
  assert(a.start_vertex == a.end_vertex || n == 1 || n == -1);
  const GammaElement base = n > 0 ? a : ginv(c, a);
  Builder bld(c, base.start_vertex);
  for (int i = 0; i < (n > 0 ? n : -n); ++i) bld.push_element(base);
  return bld.element();
}

GammaElement gid(const Compiled&, int vertex) { return {{}, Word{}, vertex, vertex}; }

GammaElement vertex_element(const Compiled& c, int v, const Word& u) {
  Builder bld(c);
  for (const Cross& x : c.tree_path[v]) bld.push_cross(x);
  bld.push_word(u);
  for (auto it = c.tree_path[v].rbegin(); it != c.tree_path[v].rend(); ++it)
    bld.push_cross(it->reversed());
  return bld.element();
}

GammaElement stable_letter(const Compiled& c, int edge) {
  assert(!c.spec.edges[edge].in_tree);
  Builder bld(c);
  for (const Cross& x : c.tree_path[c.spec.edges[edge].v]) bld.push_cross(x);
  bld.push_cross(edge, +1);
  const auto& back = c.tree_path[c.spec.edges[edge].w];
  for (auto it = back.rbegin(); it != back.rend(); ++it) bld.push_cross(it->reversed());
  return bld.element();
}

GammaElement tree_transport(const Compiled& c, int v) {
  Builder bld(c);
  for (const Cross& x : c.tree_path[v]) bld.push_cross(x);
  return bld.element();
}

PathForm translate_vertex(const Compiled& c, const GammaElement& g, const PathForm& p) {
  Builder bld(c, g.start_vertex);
  bld.push_element(g);
  bld.push_path(p);
  return bld.path();
}

}  // namespace gogb::gog
