#pragma once
// Finite graphs of free groups with cyclic parabolic edge groups, and exact
// normal forms for their fundamental groups.
//
// The fundamental group is presented over a spanning tree: vertex groups,
// plus one stable letter per non-tree edge. Elements are kept in the unique
// alternating normal form s_1 x_1 s_2 x_2 ... s_k x_k t: each x_i crosses an
// edge, each s_i is the shortlex-minimal representative of its coset of the
// crossing's source-side edge subgroup (never trivial on an immediate
// backtrack), and t is a free tail in the final vertex group. Vertices of
// the associated tree are the same data without the tail.

#include <array>
#include <cassert>
#include <string>
#include <vector>

#include "gogb/freegrp.hpp"

namespace gogb::gog {

using freegrp::Letter;
using freegrp::VertexGroupSpec;
using freegrp::Word;

struct NamedVertex {
  std::string id;
  VertexGroupSpec group;
};

struct EdgeSpec {
  std::string id;
  int v = 0, w = 0;      // endpoint vertex indices
  Word image_v, image_w;  // the edge generator's image in each endpoint group
  bool in_tree = false;
};

struct GraphSpec {
  std::vector<NamedVertex> vertices;
  std::vector<EdgeSpec> edges;
  int base = 0;
};

// image == kappa * peripheral^(sign*index) * kappa^-1 when parabolic.
struct EndpointStatus {
  Word image;
  Word root;  // cyclically reduced primitive root of image
  bool parabolic = false;
  int peripheral = -1;
  int index = 0;
  int sign = 1;
  Word kappa;
};

struct ValidationIssue {
  std::string where;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> errors;
  std::vector<ValidationIssue> warnings;
  // Per-edge endpoint statuses (side 0 = v), filled whenever the edge's
  // endpoints are in range and its images live in the vertex groups.
  std::vector<std::array<EndpointStatus, 2>> status;
  bool ok() const { return errors.empty(); }
};

// An oriented edge crossing: dir +1 runs v -> w, dir -1 runs w -> v.
struct Cross {
  int edge = -1;
  int dir = 0;
  Cross() = default;
  Cross(int e, int d) : edge(e), dir(d) {}
  Cross reversed() const { return {edge, -dir}; }
  bool operator==(const Cross& o) const { return edge == o.edge && dir == o.dir; }
  bool operator!=(const Cross& o) const { return !(*this == o); }
  bool operator<(const Cross& o) const { return edge != o.edge ? edge < o.edge : dir < o.dir; }
};

struct Incidence {
  int edge;
  int dir;  // +1 when this vertex is the edge's v end
};

struct Compiled {
  GraphSpec spec;
  std::vector<std::array<EndpointStatus, 2>> status;  // [edge][side]; side 0 = v
  std::vector<std::vector<Incidence>> incident;       // per vertex
  std::vector<std::vector<Cross>> tree_path;          // crossings base -> vertex
  std::vector<std::vector<bool>> peripheral_used;     // [vertex][peripheral]

  int vertex_count() const { return static_cast<int>(spec.vertices.size()); }
  int edge_count() const { return static_cast<int>(spec.edges.size()); }
  const VertexGroupSpec& group(int v) const { return spec.vertices[v].group; }
  int cross_source(Cross c) const {
    return c.dir > 0 ? spec.edges[c.edge].v : spec.edges[c.edge].w;
  }
  int cross_target(Cross c) const {
    return c.dir > 0 ? spec.edges[c.edge].w : spec.edges[c.edge].v;
  }
  const EndpointStatus& st(int edge, int side) const { return status[edge][side]; }
  const EndpointStatus& source_status(Cross c) const { return status[c.edge][c.dir > 0 ? 0 : 1]; }
  const EndpointStatus& target_status(Cross c) const { return status[c.edge][c.dir > 0 ? 1 : 0]; }
};

// Full report: structural problems (duplicate ids, out-of-range endpoints,
// trivial or out-of-rank images, peripheral malnormality failures, spanning
// tree defects) are errors; a loxodromic edge image only warns, with its
// status recorded, since parabolize() can repair it.
ValidationReport validate(const GraphSpec& spec);
// Extends each vertex's peripheral family until every incident edge image is
// conjugate into it, appending the primitive root of each loxodromic image.
// Idempotent; requires a spec that validates with no errors (throws
// std::invalid_argument otherwise). Re-validate the result: a freshly added
// root can break malnormality of the family, which is reported there.
GraphSpec parabolize(const GraphSpec& spec);
// Validates and precomputes; throws std::invalid_argument when not ok() or
// when any edge image is not conjugate into a peripheral subgroup (run
// parabolize first).
Compiled compile(const GraphSpec& spec);

// ---------------------------------------------------------------------------

struct Step {
  Word rep;  // shortlex-minimal coset representative, crossed afterwards
  Cross cross;
  bool operator==(const Step& o) const { return rep == o.rep && cross == o.cross; }
  bool operator!=(const Step& o) const { return !(*this == o); }
  bool operator<(const Step& o) const {
    if (cross != o.cross) return cross < o.cross;
    return freegrp::shortlex_less(rep, o.rep);
  }
};

// A vertex of the tree: the coset (s_1 x_1 ... s_k x_k) G_end.
struct PathForm {
  std::vector<Step> steps;
  int start_vertex = 0;
  int end_vertex = 0;
  bool operator==(const PathForm& o) const {
    return start_vertex == o.start_vertex && end_vertex == o.end_vertex && steps == o.steps;
  }
  bool operator!=(const PathForm& o) const { return !(*this == o); }
  bool operator<(const PathForm& o) const;
  int length() const { return static_cast<int>(steps.size()); }
  std::string str(const Compiled& c) const;
};

// A group(oid) element in normal form: steps plus the vertex-group tail.
struct GammaElement {
  std::vector<Step> steps;
  Word tail;
  int start_vertex = 0;
  int end_vertex = 0;
  bool operator==(const GammaElement& o) const {
    return start_vertex == o.start_vertex && end_vertex == o.end_vertex && steps == o.steps &&
           tail == o.tail;
  }
  bool operator!=(const GammaElement& o) const { return !(*this == o); }
  bool is_identity() const { return steps.empty() && tail.empty(); }
  PathForm path() const { return {steps, start_vertex, end_vertex}; }
  std::string str(const Compiled& c) const;
};

// Left-to-right normal form builder. Feeding the letters of any unreduced
// expression yields the canonical form: crossings absorb the source-side
// edge subgroup power out of the pending tail and either extend the form or
// pinch away an immediate backtrack.
class Builder {
 public:
  explicit Builder(const Compiled& c) : Builder(c, c.spec.base) {}
  Builder(const Compiled& c, int start) : c_(&c), start_(start), at_(start) {}

  void push_word(const Word& u);
  void push_cross(Cross x);
  void push_cross(int edge, int dir) { push_cross(Cross{edge, dir}); }
  void push_element(const GammaElement& g);  // g.start_vertex must equal vertex()
  void push_path(const PathForm& p);

  int vertex() const { return at_; }
  GammaElement element() const { return {steps_, tail_, start_, at_}; }
  PathForm path() const { return {steps_, start_, at_}; }

 private:
  const Compiled* c_;
  std::vector<Step> steps_;
  Word tail_;
  int start_;
  int at_;
};

GammaElement gmul(const Compiled& c, const GammaElement& a, const GammaElement& b);
GammaElement ginv(const Compiled& c, const GammaElement& a);
GammaElement gpow(const Compiled& c, const GammaElement& a, int n);
GammaElement gid(const Compiled& c, int vertex);

// The loop reading `u` inside the group of vertex `v`, conjugated to the
// base along the spanning tree.
GammaElement vertex_element(const Compiled& c, int v, const Word& u);
// The stable letter of a non-tree edge, as a base loop along the tree.
GammaElement stable_letter(const Compiled& c, int edge);
// The spanning-tree path base -> v as an element (trivial reps, no tail).
GammaElement tree_transport(const Compiled& c, int v);

// Apply a base loop to a tree vertex.
PathForm translate_vertex(const Compiled& c, const GammaElement& g, const PathForm& p);

}  // namespace gogb::gog
