#pragma once
// Experiment workbench on top of the compiled graph of groups: scenario
// files, finite-resolution component counts of the boundary minus a
// parabolic class, construction and checking of boundary homeomorphisms
// induced by generator substitutions, graph/table exporters, and
// reproducible run manifests.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gogb/boundary.hpp"
#include "gogb/gog.hpp"
#include "gogb/tree.hpp"

namespace gogb::lab {

using boundary::BoundaryPoint;
using freegrp::VertexGroupSpec;
using freegrp::Word;
using gog::Compiled;
using gog::GammaElement;
using gog::GraphSpec;
using gog::PathForm;

// ---------------------------------------------------------------------------
// Scenario: a graph-of-groups spec plus experiment parameters and declared
// expectations. Loaded from JSON; serialization is canonical (sorted keys,
// stable field order) so equal scenarios hash equally.

struct ExperimentParams {
  int depth = 4;
  int radius = 8;
  int budget = 64;
  std::uint64_t seed = 1;
};

struct Expectations {
  std::vector<int> component_depths;  // empty = no component expectation
  std::vector<int> component_counts;  // exact counts, or empty with:
  bool strictly_increasing = false;
  std::optional<bool> homeo_builds;   // homeo runs: expect a map vs a refusal
};

struct Scenario {
  std::string name;
  GraphSpec spec;
  ExperimentParams params;
  Expectations expect;
  std::string removed;  // point literal for component runs; "" = base class
};

Scenario scenario_from_json(const std::string& text);
std::string scenario_to_json(const Scenario& s);
Scenario load_scenario(const std::string& path);

// Validate, parabolize, re-validate, compile. Throws std::invalid_argument
// carrying the first validation error when the scenario is unusable.
Compiled compile_scenario(const Scenario& s);

// The class removed in component runs: the scenario's literal, or the
// trivial class of the first peripheral at the base vertex.
BoundaryPoint removed_class(const Compiled& c, const Scenario& s);

// ---------------------------------------------------------------------------
// Finite-resolution components, assembled from the per-vertex cylinder
// graphs (freegrp::vertex_components) over the removed point's domain.

struct ComponentCount {
  int depth = 0;
  int count = 0;    // components of (boundary minus x) visible at this depth
  int region = 0;   // domain vertices within tree distance `depth` of the min
  bool complete = false;  // the whole finite domain fit inside that horizon
};

struct ComponentParams {
  int max_vertices = 4096;  // domain enumeration cap
};

// Count the components of the boundary minus the parabolic point x that are
// visible at each depth: enumerate x's domain out to tree distance = depth,
// and sum per-vertex cylinder-graph components with x's trace unglued. Every
// tree edge interior to the domain carries x, so no gluing survives between
// the enumerated vertices; chunks hanging past the horizon hide inside the
// cylinders adjacent to x and are not countable at this resolution.
std::vector<ComponentCount> run_components(const Compiled& c, const BoundaryPoint& x,
                                           const std::vector<int>& depths,
                                           const ComponentParams& params = {});

// ---------------------------------------------------------------------------
// Boundary homeomorphisms induced by per-vertex generator substitutions.
// A substitution maps each generator to a signed generator letter (a
// relabeling); it must permute the generators and carry the peripheral
// family of the source vertex onto the target's up to rotation and
// inversion. The induced coset map sends y<w> to (sigma(y) conj^-1)<w'>
// where sigma(w) = conj^-1 w'^sign conj, and extends level by level to a
// tree isomorphism phi and a boundary map f.

struct PeripheralMatch {
  int image = -1;  // target peripheral index
  int sign = 1;
  Word conj;  // sigma(w) == conj^-1 * target^sign * conj
};

struct VertexRule {
  std::vector<Word> gen_images;          // generator k+1 -> gen_images[k]
  std::vector<PeripheralMatch> matches;  // per source peripheral
};

struct CosetRow {
  PathForm a, b;
};

struct HomeoMapData {
  std::vector<VertexRule> rules;  // per graph vertex
  int table_depth = 0;
  std::vector<std::vector<CosetRow>> table;  // [tree depth][rows]
};

struct HomeoOutcome {
  std::optional<HomeoMapData> map;
  std::vector<std::string> refusals;  // nonempty <=> no map
  bool ok() const { return refusals.empty(); }
};

// Check the hypotheses and build the map, or refuse with reasons: graph
// shape mismatch, unusable substitution, peripheral families not aligned,
// or an edge endpoint index differing between the two sides. Refusal is a
// value, and is symmetric: build_homeo(b, a, inverse maps) refuses too.
HomeoOutcome build_homeo(const Compiled& a, const Compiled& b,
                         const std::vector<std::vector<Word>>& vertex_maps,
                         int table_depth = 3);

// phi on tree vertices, the induced map on group elements, and f on
// boundary points. All derive from the rules alone; the table is the
// materialized finite part used for checking.
PathForm map_vertex(const Compiled& a, const Compiled& b, const HomeoMapData& m,
                    const PathForm& v);
GammaElement map_element(const Compiled& a, const Compiled& b, const HomeoMapData& m,
                         const GammaElement& g);
BoundaryPoint map_point(const Compiled& a, const Compiled& b, const HomeoMapData& m,
                        const BoundaryPoint& x);

struct HomeoCheck {
  int points = 0;     // exact boundary points attempted
  int certified = 0;  // continuity certificates (V with f(V) inside W)
  int undecided = 0;
  int skipped = 0;    // stubs and points whose neighborhoods are out of range
  bool table_ok = true;  // stored table matches the rules, bijectively
  std::vector<std::string> witnesses;  // corruption / discontinuity reports
  bool ok() const { return table_ok && witnesses.empty() && undecided == 0; }
};

// Re-derive the table from the rules row by row (corruption check), verify
// the rows form a bijective tree map level by level, and certify continuity
// on a sample: around every W = nbhd(f(xi), depth) exhibit V = nbhd(xi, m)
// whose sampled points all land in W; tree-end branch neighborhoods must map
// root-to-root (phi of the branch root is the image's branch root).
HomeoCheck check_homeo(const Compiled& a, const Compiled& b, const HomeoMapData& m, int depth,
                       const boundary::SampleParams& sp = {});

// ---------------------------------------------------------------------------
// Exporters and run manifests.

std::string dot_domain(const Compiled& c, const tree::DomainView& dom);
std::string dot_ball(const Compiled& c, const tree::BallView& ball);
// The depth-d cylinder graph of one vertex group: deleted cylinders (the
// removed points' direction prefixes) are drawn dashed, glue edges labeled
// by their class rep.
std::string dot_cylinders(const VertexGroupSpec& g, int depth,
                          const std::vector<freegrp::FreeBoundaryPoint>& removed);
std::string csv_components(const std::vector<ComponentCount>& counts);

// FNV-1a over the canonical serialization.
std::uint64_t fnv1a(const std::string& bytes);
std::uint64_t scenario_hash(const Scenario& s);

struct RunManifest {
  std::string command;
  std::vector<std::pair<std::string, std::string>> inputs;
  std::vector<std::pair<std::string, std::string>> params;
  std::vector<std::string> outputs;  // file names relative to the run dir
};

// Canonical bytes: sorted keys, no timestamps; reruns with equal inputs
// produce identical manifests.
std::string manifest_json(const RunManifest& m);

}  // namespace gogb::lab
