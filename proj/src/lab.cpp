#include "gogb/lab.hpp"

#include <algorithm>
#include <cassert>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace gogb::lab {

using boundary::NeighborhoodSpec;
using boundary::Verdict;
using freegrp::FreeBoundaryPoint;
using freegrp::Letter;
using freegrp::PeriodicEndForm;
using nlohmann::json;

// ---------------------------------------------------------------------------
// Scenario serialization. Canonical form: nlohmann objects keep sorted keys,
// words print through Word::str ("1" = identity), vertices are referenced by
// id. dump(2) is deterministic, so equal scenarios serialize identically.

namespace {

int resolve_vertex(const std::map<std::string, int>& index, const std::string& id) {
  const auto it = index.find(id);
  if (it == index.end()) throw std::invalid_argument("scenario: unknown vertex id '" + id + "'");
  return it->second;
}

}  // namespace

std::string scenario_to_json(const Scenario& s) {
  const auto& sp = s.spec;
  if (sp.base < 0 || sp.base >= static_cast<int>(sp.vertices.size()))
    throw std::invalid_argument("scenario: base vertex out of range");
  json j;
  j["name"] = s.name;
  j["base"] = sp.vertices[sp.base].id;
  json verts = json::array();
  for (const auto& v : sp.vertices) {
    json g;
    g["id"] = v.id;
    g["rank"] = v.group.rank;
    json per = json::array();
    for (const auto& p : v.group.peripherals) per.push_back(p.str());
    g["peripherals"] = per;
    verts.push_back(g);
  }
  j["vertices"] = verts;
  json edges = json::array();
  for (const auto& e : sp.edges) {
    if (e.v < 0 || e.v >= static_cast<int>(sp.vertices.size()) || e.w < 0 ||
        e.w >= static_cast<int>(sp.vertices.size()))
      throw std::invalid_argument("scenario: edge endpoint out of range");
    json g;
    g["id"] = e.id;
    g["v"] = sp.vertices[e.v].id;
    g["w"] = sp.vertices[e.w].id;
    g["image_v"] = e.image_v.str();
    g["image_w"] = e.image_w.str();
    g["in_tree"] = e.in_tree;
    edges.push_back(g);
  }
  j["edges"] = edges;
  j["params"] = {{"budget", s.params.budget},
                 {"depth", s.params.depth},
                 {"radius", s.params.radius},
                 {"seed", s.params.seed}};
  json ex;
  ex["component_depths"] = s.expect.component_depths;
  ex["component_counts"] = s.expect.component_counts;
  ex["strictly_increasing"] = s.expect.strictly_increasing;
  if (s.expect.homeo_builds) ex["homeo_builds"] = *s.expect.homeo_builds;
  j["expect"] = ex;
  j["removed"] = s.removed;
  return j.dump(2) + "\n";
}

Scenario scenario_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("scenario: ") + e.what());
  }
  Scenario s;
  try {
    s.name = j.value("name", std::string());
    std::map<std::string, int> index;
    for (const auto& v : j.at("vertices")) {
      gog::NamedVertex nv;
      nv.id = v.at("id").get<std::string>();
      nv.group.rank = v.at("rank").get<int>();
      if (v.count("peripherals"))
        for (const auto& p : v.at("peripherals"))
          nv.group.peripherals.push_back(Word::parse(p.get<std::string>()));
      index[nv.id] = static_cast<int>(s.spec.vertices.size());
      s.spec.vertices.push_back(std::move(nv));
    }
    if (j.count("edges"))
      for (const auto& e : j.at("edges")) {
        gog::EdgeSpec es;
        es.id = e.at("id").get<std::string>();
        es.v = resolve_vertex(index, e.at("v").get<std::string>());
        es.w = resolve_vertex(index, e.at("w").get<std::string>());
        es.image_v = Word::parse(e.at("image_v").get<std::string>());
        es.image_w = Word::parse(e.at("image_w").get<std::string>());
        es.in_tree = e.value("in_tree", false);
        s.spec.edges.push_back(std::move(es));
      }
    s.spec.base = j.count("base") ? resolve_vertex(index, j.at("base").get<std::string>()) : 0;
    if (j.count("params")) {
      const auto& p = j.at("params");
      s.params.depth = p.value("depth", s.params.depth);
      s.params.radius = p.value("radius", s.params.radius);
      s.params.budget = p.value("budget", s.params.budget);
      s.params.seed = p.value("seed", s.params.seed);
    }
    if (j.count("expect")) {
      const auto& ex = j.at("expect");
      s.expect.component_depths = ex.value("component_depths", std::vector<int>());
      s.expect.component_counts = ex.value("component_counts", std::vector<int>());
      s.expect.strictly_increasing = ex.value("strictly_increasing", false);
      if (ex.count("homeo_builds")) s.expect.homeo_builds = ex.at("homeo_builds").get<bool>();
    }
    s.removed = j.value("removed", std::string());
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("scenario: ") + e.what());
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open scenario file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return scenario_from_json(buf.str());
}

Compiled compile_scenario(const Scenario& s) {
  auto fail = [&](const gog::ValidationReport& rep) {
    throw std::invalid_argument("scenario '" + s.name + "': " + rep.errors[0].where + ": " +
                                rep.errors[0].message);
  };
  const auto before = gog::validate(s.spec);
  if (!before.ok()) fail(before);
  const GraphSpec prepared = gog::parabolize(s.spec);
  const auto after = gog::validate(prepared);
  if (!after.ok()) fail(after);
  return gog::compile(prepared);
}

BoundaryPoint removed_class(const Compiled& c, const Scenario& s) {
  if (!s.removed.empty()) return boundary::parse_point(c, s.removed);
  if (c.group(c.spec.base).peripherals.empty())
    throw std::invalid_argument("removed_class: the base vertex has no peripheral to remove");
  return boundary::glue_class(c, tree::ClassAt{tree::base_vertex(c), {Word(), 0}});
}

// ---------------------------------------------------------------------------
// Component counts.

std::vector<ComponentCount> run_components(const Compiled& c, const BoundaryPoint& x,
                                           const std::vector<int>& depths,
                                           const ComponentParams& params) {
  if (x.kind != BoundaryPoint::Kind::EdgeParabolic)
    throw std::invalid_argument("run_components: the removed point must be a parabolic class");
  std::vector<ComponentCount> out;
  out.reserve(depths.size());
  for (const int d : depths) {
    if (d < 1) throw std::invalid_argument("run_components: depth must be >= 1");
    const auto dom = tree::domain(c, x.cls, {d, params.max_vertices});
    ComponentCount row{d, 0, static_cast<int>(dom.verts.size()), dom.complete};
    for (const auto& ca : dom.verts) {
      const auto& g = c.group(ca.vertex.end_vertex);
      const auto p = FreeBoundaryPoint::parabolic(ca.cls.rep, ca.cls.peripheral);
      const auto dirs = freegrp::directions(g, p);
      // A trace whose two directions agree past the resolution is hidden
      // inside the cylinders adjacent to x; nothing to count there yet.
      if (freegrp::common_prefix_len(dirs[0], dirs[1]) >= d) continue;
      const auto res = freegrp::vertex_components(g, d, {p});
      if (res.error) throw std::runtime_error("run_components: " + *res.error);
      row.count += res.count;
    }
    out.push_back(row);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Homeomorphisms from generator substitutions.

namespace {

// Apply a signed generator permutation letterwise; permutations preserve
// reducedness, so the image needs no further reduction.
Word apply_sub(const std::vector<Word>& gen_images, const Word& w) {
  std::vector<Letter> out;
  out.reserve(static_cast<size_t>(w.size()));
  for (const Letter l : w.letters()) {
    const Letter img = gen_images[static_cast<size_t>(std::abs(l) - 1)].at(0);
    out.push_back(l > 0 ? img : static_cast<Letter>(-img));
  }
  return Word{std::move(out)};
}

struct Mapper {
  const Compiled& a;
  const Compiled& b;
  const HomeoMapData& m;

  Word sub(int vertex, const Word& w) const { return apply_sub(m.rules[vertex].gen_images, w); }

  // The induced map on cosets of the side's edge subgroup image sends
  // y<u_A> to (sigma(y) * shift)<u_B> with shift = sigma(kappa_A) * conj^-1
  // * kappa_B^-1: conjugating data on both sides cancels against the
  // peripheral match.
  Word step_shift(int edge, int side) const {
    const auto& ea = a.spec.edges[edge];
    const int v = side == 0 ? ea.v : ea.w;
    const auto& sa = a.st(edge, side);
    const auto& sb = b.st(edge, side);
    const auto& pm = m.rules[v].matches[sa.peripheral];
    return freegrp::rconcat(freegrp::rconcat(sub(v, sa.kappa), pm.conj.inverse()),
                            sb.kappa.inverse());
  }
};

}  // namespace

PathForm map_vertex(const Compiled& a, const Compiled& b, const HomeoMapData& m,
                    const PathForm& v) {
  const Mapper mp{a, b, m};
  gog::Builder out(b, v.start_vertex);
  int cur = v.start_vertex;
  for (const auto& s : v.steps) {
    assert(cur == a.cross_source(s.cross));
    const int side = s.cross.dir == 1 ? 0 : 1;
    out.push_word(freegrp::rconcat(mp.sub(cur, s.rep), mp.step_shift(s.cross.edge, side)));
    out.push_cross(s.cross);
    cur = a.cross_target(s.cross);
  }
  return out.path();
}

GammaElement map_element(const Compiled& a, const Compiled& b, const HomeoMapData& m,
                         const GammaElement& g) {
  const Mapper mp{a, b, m};
  gog::Builder out(b, g.start_vertex);
  int cur = g.start_vertex;
  for (const auto& s : g.steps) {
    const int side = s.cross.dir == 1 ? 0 : 1;
    out.push_word(freegrp::rconcat(mp.sub(cur, s.rep), mp.step_shift(s.cross.edge, side)));
    out.push_cross(s.cross);
    cur = a.cross_target(s.cross);
  }
  out.push_word(mp.sub(cur, g.tail));
  return out.element();
}

BoundaryPoint map_point(const Compiled& a, const Compiled& b, const HomeoMapData& m,
                        const BoundaryPoint& x) {
  const Mapper mp{a, b, m};
  switch (x.kind) {
    case BoundaryPoint::Kind::VertexPoint: {
      const PathForm chart = map_vertex(a, b, m, x.chart);
      const int v = x.chart.end_vertex;
      const auto end =
          freegrp::canonical_end(mp.sub(v, x.end.prefix), mp.sub(v, x.end.period));
      return boundary::glue_class(b, chart, FreeBoundaryPoint::from_end(end));
    }
    case BoundaryPoint::Kind::EdgeParabolic: {
      const PathForm at = map_vertex(a, b, m, x.cls.vertex);
      const int v = x.cls.vertex.end_vertex;
      const auto& pm = m.rules[v].matches[x.cls.cls.peripheral];
      const Word raw = freegrp::rconcat(mp.sub(v, x.cls.cls.rep), pm.conj.inverse());
      const Word rep = freegrp::coset_canonical(raw, b.group(v).peripherals[pm.image]).rep;
      return boundary::glue_class(b, tree::ClassAt{at, {rep, pm.image}});
    }
    case BoundaryPoint::Kind::TreeEnd:
      if (x.exact) return boundary::glue_class(b, map_element(a, b, m, x.pre),
                                               map_element(a, b, m, x.per));
      return boundary::ray_stub(b, map_vertex(a, b, m, x.approx));
  }
  throw std::logic_error("map_point: unknown point kind");
}

HomeoOutcome build_homeo(const Compiled& a, const Compiled& b,
                         const std::vector<std::vector<Word>>& vertex_maps, int table_depth) {
  HomeoOutcome out;
  auto refuse = [&out](std::string why) { out.refusals.push_back(std::move(why)); };
  const auto& as = a.spec;
  const auto& bs = b.spec;

  if (as.vertices.size() != bs.vertices.size() || as.edges.size() != bs.edges.size() ||
      as.base != bs.base) {
    refuse("graph shape mismatch: vertex/edge counts or base vertex differ");
    return out;
  }
  const int nv = static_cast<int>(as.vertices.size());
  for (int i = 0; i < nv; ++i)
    if (a.group(i).rank != b.group(i).rank)
      refuse("graph shape mismatch: vertex " + as.vertices[i].id + " ranks differ");
  for (size_t e = 0; e < as.edges.size(); ++e)
    if (as.edges[e].v != bs.edges[e].v || as.edges[e].w != bs.edges[e].w ||
        as.edges[e].in_tree != bs.edges[e].in_tree)
      refuse("graph shape mismatch: edge " + as.edges[e].id + " endpoints differ");
  if (!out.refusals.empty()) return out;

  if (static_cast<int>(vertex_maps.size()) != nv) {
    refuse("need one generator substitution per vertex");
    return out;
  }

  HomeoMapData m;
  m.rules.resize(static_cast<size_t>(nv));
  for (int i = 0; i < nv; ++i) {
    const int rank = a.group(i).rank;
    const auto& imgs = vertex_maps[static_cast<size_t>(i)];
    bool usable = static_cast<int>(imgs.size()) == rank;
    std::set<int> hit;
    for (const auto& w : imgs) {
      if (w.size() != 1 || std::abs(w.at(0)) > rank || !hit.insert(std::abs(w.at(0))).second)
        usable = false;
    }
    if (!usable) {
      refuse("substitution at vertex " + as.vertices[i].id +
             " is not a signed permutation of the generators");
      continue;
    }
    m.rules[static_cast<size_t>(i)].gen_images = imgs;
  }
  if (!out.refusals.empty()) return out;

  // The substitution must carry the peripheral family onto the target's, up
  // to rotation and inversion, one-to-one.
  for (int i = 0; i < nv; ++i) {
    const auto& pa = a.group(i).peripherals;
    const auto& pb = b.group(i).peripherals;
    auto& rule = m.rules[static_cast<size_t>(i)];
    if (pa.size() != pb.size()) {
      refuse("peripheral families at vertex " + as.vertices[i].id + " have different sizes");
      continue;
    }
    std::vector<bool> used(pb.size(), false);
    for (const auto& w : pa) {
      const Word sw = apply_sub(rule.gen_images, w);
      PeripheralMatch match;
      for (int k = 0; match.image < 0 && k < static_cast<int>(pb.size()); ++k) {
        if (pb[static_cast<size_t>(k)].size() != sw.size()) continue;
        for (const int sign : {1, -1}) {
          const Word ws = sign > 0 ? pb[static_cast<size_t>(k)]
                                   : pb[static_cast<size_t>(k)].inverse();
          if (!freegrp::is_cyclically_reduced(ws)) continue;
          for (int r = 0; r < std::max(ws.size(), 1); ++r)
            if (sw == freegrp::rotate(ws, r)) {
              match = PeripheralMatch{k, sign, ws.prefix(r)};
              break;
            }
          if (match.image >= 0) break;
        }
      }
      if (match.image < 0) {
        refuse("substitution does not carry peripheral " + w.str() + " of vertex " +
               as.vertices[i].id + " into the target's peripheral family");
      } else if (used[static_cast<size_t>(match.image)]) {
        refuse("substitution maps two peripherals of vertex " + as.vertices[i].id +
               " onto the same target peripheral");
      } else {
        used[static_cast<size_t>(match.image)] = true;
      }
      rule.matches.push_back(match);
    }
  }
  if (!out.refusals.empty()) return out;

  // Edge endpoints must sit over matched peripherals with equal indices.
  for (size_t e = 0; e < as.edges.size(); ++e)
    for (int side = 0; side < 2; ++side) {
      const auto& sa = a.st(static_cast<int>(e), side);
      const auto& sb = b.st(static_cast<int>(e), side);
      if (sa.index != sb.index) {
        refuse("endpoint index mismatch at edge " + as.edges[e].id + ": " +
               std::to_string(sa.index) + " vs " + std::to_string(sb.index));
        continue;
      }
      const int v = side == 0 ? as.edges[e].v : as.edges[e].w;
      if (m.rules[static_cast<size_t>(v)].matches[static_cast<size_t>(sa.peripheral)].image !=
          sb.peripheral)
        refuse("substitution does not align the edge peripherals at edge " + as.edges[e].id);
    }
  if (!out.refusals.empty()) return out;

  m.table_depth = table_depth;
  m.table.assign(static_cast<size_t>(table_depth) + 1, {});
  const auto ball = tree::tree_ball(a, tree::base_vertex(a), {table_depth, 2, 20000});
  for (size_t i = 0; i < ball.verts.size(); ++i)
    m.table[static_cast<size_t>(ball.depth[i])].push_back(
        {ball.verts[i], map_vertex(a, b, m, ball.verts[i])});
  out.map = std::move(m);
  return out;
}

HomeoCheck check_homeo(const Compiled& a, const Compiled& b, const HomeoMapData& m, int depth,
                       const boundary::SampleParams& sp) {
  HomeoCheck rep;

  // Re-derive the table from the rules and verify levelwise injectivity.
  for (size_t d = 0; d < m.table.size(); ++d) {
    std::set<std::string> seen;
    for (const auto& row : m.table[d]) {
      const PathForm derived = map_vertex(a, b, m, row.a);
      if (!(derived == row.b)) {
        rep.table_ok = false;
        rep.witnesses.push_back("table: image of " + boundary::path_literal(a, row.a) +
                                " should be " + boundary::path_literal(b, derived) +
                                " but the table stores " + boundary::path_literal(b, row.b));
      }
      if (row.a.steps.size() != d || row.b.steps.size() != d) {
        rep.table_ok = false;
        rep.witnesses.push_back("table: row at level " + std::to_string(d) +
                                " has the wrong depth");
      }
      if (!seen.insert(boundary::path_literal(b, row.b)).second) {
        rep.table_ok = false;
        rep.witnesses.push_back("table: duplicate image " + boundary::path_literal(b, row.b) +
                                " at level " + std::to_string(d));
      }
    }
  }

  // Continuity sample: around each W = nbhd(f(xi), depth) find V = nbhd(xi, mm)
  // all of whose sampled members map into W. Stubs are truncations, not
  // boundary points; they are skipped.
  const auto pts = boundary::sample_points(a, sp);
  std::vector<std::optional<BoundaryPoint>> fpts(pts.size());
  for (size_t i = 0; i < pts.size(); ++i) {
    if (pts[i].kind == BoundaryPoint::Kind::TreeEnd && !pts[i].exact) {
      ++rep.skipped;
      continue;
    }
    fpts[i] = map_point(a, b, m, pts[i]);
  }

  for (size_t i = 0; i < pts.size(); ++i) {
    if (!fpts[i]) continue;
    NeighborhoodSpec W;
    try {
      W = boundary::basic_nbhd(b, *fpts[i], depth);
    } catch (const std::exception&) {
      ++rep.skipped;
      continue;
    }
    ++rep.points;

    if (pts[i].kind == BoundaryPoint::Kind::TreeEnd) {
      try {
        const auto Va = boundary::basic_nbhd(a, pts[i], depth);
        if (Va.kind == NeighborhoodSpec::Kind::Branch &&
            W.kind == NeighborhoodSpec::Kind::Branch &&
            !(map_vertex(a, b, m, Va.branch) == W.branch)) {
          rep.witnesses.push_back("branch roots disagree at " +
                                  boundary::point_literal(a, pts[i]));
        }
      } catch (const std::exception&) {
      }
    }

    bool certified = false;
    bool last_false = false;
    std::string false_witness;
    for (int mm = depth; mm <= depth + 4 && !certified; ++mm) {
      NeighborhoodSpec V;
      try {
        V = boundary::basic_nbhd(a, pts[i], mm);
      } catch (const std::exception&) {
        break;
      }
      bool all_true = boundary::in_neighborhood(b, *fpts[i], W) != Verdict::False;
      last_false = !all_true;
      if (!all_true) {
        false_witness = "f(" + boundary::point_literal(a, pts[i]) +
                        ") misses its own target neighborhood";
        break;
      }
      for (size_t q = 0; q < pts.size() && all_true; ++q) {
        if (!fpts[q]) continue;
        if (boundary::in_neighborhood(a, pts[q], V) != Verdict::True) continue;
        const auto verdict = boundary::in_neighborhood(b, *fpts[q], W);
        if (verdict == Verdict::True) continue;
        all_true = false;
        last_false = verdict == Verdict::False;
        if (last_false)
          false_witness = "f(" + boundary::point_literal(a, pts[q]) +
                          ") leaves the target neighborhood of f(" +
                          boundary::point_literal(a, pts[i]) + ")";
      }
      certified = all_true;
    }
    if (certified)
      ++rep.certified;
    else if (last_false)
      rep.witnesses.push_back(false_witness);
    else
      ++rep.undecided;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Exporters and manifests.

namespace {

std::string dot_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (const char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

}  // namespace

std::string dot_domain(const Compiled& c, const tree::DomainView& dom) {
  std::ostringstream os;
  os << "graph domain {\n";
  for (size_t i = 0; i < dom.verts.size(); ++i) {
    const auto& ca = dom.verts[i];
    os << "  v" << i << " [label=\""
       << dot_escape(ca.vertex.str(c) + " : " + ca.cls.rep.str() + "<" +
                     std::to_string(ca.cls.peripheral) + ">")
       << "\"];\n";
  }
  for (const auto& e : dom.edges) os << "  v" << e.first << " -- v" << e.second << ";\n";
  os << "}\n";
  return os.str();
}

std::string dot_ball(const Compiled& c, const tree::BallView& ball) {
  std::ostringstream os;
  os << "graph ball {\n";
  for (size_t i = 0; i < ball.verts.size(); ++i)
    os << "  v" << i << " [label=\"" << dot_escape(ball.verts[i].str(c)) << "\"];\n";
  for (const auto& e : ball.edges) os << "  v" << e.first << " -- v" << e.second << ";\n";
  os << "}\n";
  return os.str();
}

std::string dot_cylinders(const VertexGroupSpec& g, int depth,
                          const std::vector<freegrp::FreeBoundaryPoint>& removed) {
  if (depth < 1) throw std::invalid_argument("dot_cylinders: depth must be >= 1");
  std::set<std::string> deleted;
  std::set<std::pair<std::string, int>> removed_keys;
  for (const auto& p : removed) {
    const auto dirs = freegrp::directions(g, p);
    if (dirs.size() != 2 || freegrp::common_prefix_len(dirs[0], dirs[1]) >= depth)
      throw std::invalid_argument(
          "dot_cylinders: removed class not visible at this depth; increase depth");
    deleted.insert(freegrp::end_prefix(dirs[0], depth).str());
    deleted.insert(freegrp::end_prefix(dirs[1], depth).str());
    if (p.kind == freegrp::FreeBoundaryPoint::Kind::ParabolicClass)
      removed_keys.insert(
          {freegrp::coset_canonical(p.coset_rep, g.peripherals[static_cast<size_t>(p.peripheral)])
               .rep.str(),
           p.peripheral});
  }
  std::ostringstream os;
  os << "graph cylinders {\n";
  for (const auto& w : freegrp::reduced_words_of_length(g.rank, depth)) {
    os << "  \"" << w.str() << "\"";
    if (deleted.count(w.str())) os << " [style=dashed]";
    os << ";\n";
  }
  for (const auto& cls : freegrp::visible_classes(g, depth)) {
    os << "  \"" << cls.dir_pos.str() << "\" -- \"" << cls.dir_neg.str() << "\" [label=\""
       << dot_escape(cls.rep.str() + "<" + std::to_string(cls.peripheral) + ">") << "\"";
    if (removed_keys.count({cls.rep.str(), cls.peripheral})) os << ", style=dashed";
    os << "];\n";
  }
  os << "}\n";
  return os.str();
}

std::string csv_components(const std::vector<ComponentCount>& counts) {
  std::ostringstream os;
  os << "depth,count,region,complete\n";
  for (const auto& r : counts)
    os << r.depth << ',' << r.count << ',' << r.region << ',' << (r.complete ? 1 : 0) << '\n';
  return os.str();
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t scenario_hash(const Scenario& s) { return fnv1a(scenario_to_json(s)); }

std::string manifest_json(const RunManifest& m) {
  json j;
  j["command"] = m.command;
  json in = json::object();
  for (const auto& [k, v] : m.inputs) in[k] = v;
  j["inputs"] = in;
  json par = json::object();
  for (const auto& [k, v] : m.params) par[k] = v;
  j["params"] = par;
  auto outputs = m.outputs;
  std::sort(outputs.begin(), outputs.end());
  j["outputs"] = outputs;
  return j.dump(2) + "\n";
}

}  // namespace gogb::lab
