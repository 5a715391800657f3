#pragma once
// The tree on which the fundamental group acts: vertices are cosets of
// vertex groups, written as canonical path forms from the base. Edges carry
// parabolic "traces" in the charts at both endpoints; the trace data drives
// the domain of a parabolic boundary point: the subtree of all vertices
// whose chart still sees that point.

#include <optional>
#include <utility>
#include <vector>

#include "gogb/gog.hpp"

namespace gogb::tree {

using freegrp::Word;
using gog::Compiled;
using gog::Cross;
using gog::GammaElement;
using gog::PathForm;

inline PathForm base_vertex(const Compiled& c) { return {{}, c.spec.base, c.spec.base}; }
PathForm parent(const Compiled& c, const PathForm& v);  // drop the last step; not the base

int distance(const PathForm& a, const PathForm& b);
int gromov(const PathForm& a, const PathForm& b);  // common step prefix length
std::vector<PathForm> geodesic(const Compiled& c, const PathForm& a, const PathForm& b);

// ---------------------------------------------------------------------------
// A parabolic class in the chart of one tree vertex.
struct LocalClass {
  Word rep;  // shortlex-minimal coset representative of rep<w_peripheral>
  int peripheral = -1;
  bool operator==(const LocalClass& o) const {
    return peripheral == o.peripheral && rep == o.rep;
  }
  bool operator!=(const LocalClass& o) const { return !(*this == o); }
  bool operator<(const LocalClass& o) const {
    if (peripheral != o.peripheral) return peripheral < o.peripheral;
    return freegrp::shortlex_less(rep, o.rep);
  }
};

// A parabolic point seen at a particular tree vertex.
struct ClassAt {
  PathForm vertex;
  LocalClass cls;
  bool operator==(const ClassAt& o) const { return vertex == o.vertex && cls == o.cls; }
  bool operator!=(const ClassAt& o) const { return !(*this == o); }
  bool operator<(const ClassAt& o) const {
    if (vertex != o.vertex) return vertex < o.vertex;
    return cls < o.cls;
  }
};

// The trace at `at` of the tree edge from `at` crossing `x` with coset rep
// `s`: the class of (s * kappa)<w> in the chart of `at`.
LocalClass edge_trace(const Compiled& c, const Word& s, Cross x);
// The trace of the same tree edge in the chart of the far endpoint.
LocalClass far_trace(const Compiled& c, Cross x);
// The trace at `v` of the edge towards the base; v must not be the base.
LocalClass back_edge_trace(const Compiled& c, const PathForm& v);

// One glue edge of a domain: the tree edge leaves the current vertex with
// coset rep `s` crossing `x`; the far endpoint sees the point as `other`.
struct GlueEdge {
  Word s;
  Cross cross;
  ClassAt other;
  bool to_parent = false;
};
// All tree edges at x.vertex whose near-side trace is x.cls. At an endpoint
// of index n, exactly n such edges cross it (j = 0..n-1); the parent edge is
// reported through its own crossing when its trace matches.
std::vector<GlueEdge> glue_edges(const Compiled& c, const ClassAt& x);

// Walk towards the base while the back edge carries the class; the unique
// domain vertex closest to the base identifies the parabolic point.
ClassAt minimize_class(const Compiled& c, const ClassAt& x);

// Exact membership: does the chart at `v` see the point of `x`? When it
// does, the local class at `v` is returned.
std::optional<LocalClass> in_domain(const Compiled& c, const ClassAt& x, const PathForm& v);

struct DomainParams {
  int radius = 8;          // tree distance from the minimal vertex
  int max_vertices = 4096;
};

struct DomainView {
  std::vector<ClassAt> verts;              // verts[0] is the minimal vertex
  std::vector<std::pair<int, int>> edges;  // indices into verts
  bool complete = false;                   // no frontier was cut off
  int radius = 0;
};
DomainView domain(const Compiled& c, const ClassAt& x, const DomainParams& params = {});

// ---------------------------------------------------------------------------
// Truncated balls for inspection and export: children across every incident
// graph edge, one per coset representative up to the transversal length.
struct BallParams {
  int radius = 2;
  int transversal_len = 2;
  int max_vertices = 20000;
};

struct BallView {
  std::vector<PathForm> verts;
  std::vector<int> depth;                  // tree distance from the center
  std::vector<std::pair<int, int>> edges;  // indices into verts
  bool vertex_limit_hit = false;
};
BallView tree_ball(const Compiled& c, const PathForm& center, const BallParams& params = {});

// Canonical coset transversal of <m> in the vertex group, up to rep length.
std::vector<Word> coset_transversal(const Compiled& c, int vertex, const Word& m, int max_len);

}  // namespace gogb::tree
