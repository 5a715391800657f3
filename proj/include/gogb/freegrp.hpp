#pragma once
// A vertex group: finite-rank free group with a malnormal family of cyclic
// peripheral subgroups. Its boundary is the space of ends with, for every
// peripheral root w and coset g<w>, the pair {g w^inf, g w^-inf} collapsed
// to one parabolic point. Points, cosets, cylinders and the component
// counting of the collapsed space at finite word depth live here.

#include <optional>
#include <string>
#include <vector>

#include "gogb/words.hpp"

namespace gogb::freegrp {

// <root^exponent>; root cyclically reduced and primitive, exponent >= 1.
struct CyclicSubgroup {
  Word root;
  int exponent = 1;
};

struct VertexGroupSpec {
  int rank = 0;
  std::vector<Word> peripherals;  // primitive cyclically reduced roots
};

struct MalnormalViolation {
  enum class Kind {
    EmptyRoot,
    NotCyclicallyReduced,
    NotPrimitive,
    ConjugatePair,
    ConjugateToInverse,
  } kind;
  int i = -1, j = -1;
  std::string describe() const;
};
// Empty result iff the peripheral family is dynamically malnormal.
std::vector<MalnormalViolation> malnormal_family_check(const VertexGroupSpec& v);

// ---------------------------------------------------------------------------
// Cosets of cyclic subgroups. rep is the shortlex-minimal element of g<m>,
// and g == rep * m^power.
struct CosetRep {
  Word rep;
  int power = 0;
};
CosetRep coset_canonical(const Word& g, const Word& m);

// ---------------------------------------------------------------------------
// A point of the collapsed boundary of (F, peripherals):
//  - ParabolicClass: the collapsed pair of ends of the coset rep<w_i>;
//  - PeriodicEnd: an uncollapsed eventually periodic end (its period must not
//    be conjugate into a peripheral; canonicalize_point enforces that).
struct FreeBoundaryPoint {
  enum class Kind { PeriodicEnd, ParabolicClass } kind = Kind::PeriodicEnd;
  PeriodicEndForm end;  // PeriodicEnd
  Word coset_rep;       // ParabolicClass
  int peripheral = -1;  // ParabolicClass

  static FreeBoundaryPoint from_end(PeriodicEndForm e);
  static FreeBoundaryPoint parabolic(Word rep, int peripheral);
  bool operator==(const FreeBoundaryPoint& o) const;
  bool operator!=(const FreeBoundaryPoint& o) const { return !(*this == o); }
  std::string str() const;
};

// Collapse an end onto its parabolic class when the period is conjugate to a
// peripheral root (or its inverse); recanonicalize class reps otherwise.
FreeBoundaryPoint canonicalize_point(const VertexGroupSpec& v, const FreeBoundaryPoint& p);
FreeBoundaryPoint end_point(const VertexGroupSpec& v, const Word& prefix, const Word& period);

// Both fixed ends of conj * root^(+-inf) * conj^-1, i.e. of the conjugated
// cyclic subgroup; these are the two directions of the parabolic class.
std::pair<PeriodicEndForm, PeriodicEndForm> fixed_ends(const CyclicSubgroup& c, const Word& conj);

// The 1 or 2 direction ends of a point.
std::vector<PeriodicEndForm> directions(const VertexGroupSpec& v, const FreeBoundaryPoint& p);

// Act by a group element on the left.
FreeBoundaryPoint translate_point(const VertexGroupSpec& v, const Word& g, const FreeBoundaryPoint& p);

// ---------------------------------------------------------------------------
// Stallings folding: membership and end-tracing for finitely generated
// subgroups.
class CoreGraph {
 public:
  CoreGraph(int rank, const std::vector<Word>& generators);
  bool contains(const Word& w) const;
  // Does the infinite word prefix * period^inf trace a path from the base?
  bool traces_end(const PeriodicEndForm& e) const;

 private:
  int step(int state, Letter x) const;
  int rank_;
  std::vector<std::vector<int>> next_;  // state x (2*rank) -> state or -1
};
bool subgroup_membership(int rank, const std::vector<Word>& generators, const Word& w);

// ---------------------------------------------------------------------------
// Classes visible at word depth d: cosets g<w_i> whose two direction ends
// diverge before depth d (equivalently, axis within distance d-1 of 1).
struct VisibleClass {
  Word rep;
  int peripheral = -1;
  Word dir_pos, dir_neg;  // the two depth-d direction cylinders
};
std::vector<VisibleClass> visible_classes(const VertexGroupSpec& v, int depth);

// Connected components of the depth-d cylinder graph: nodes are the depth-d
// cylinders minus those holding a removed class's directions, one edge per
// visible class joining its two direction cylinders.
struct ComponentsResult {
  int count = 0;
  int nodes = 0;
  int identifications = 0;
  std::optional<std::string> error;
};
ComponentsResult vertex_components(const VertexGroupSpec& v, int depth,
                                   const std::vector<FreeBoundaryPoint>& removed);

// Small union-find, shared by the component counters.
class DisjointSets {
 public:
  explicit DisjointSets(int n);
  int find(int a);
  bool unite(int a, int b);

 private:
  std::vector<int> up_;
};

}  // namespace gogb::freegrp
