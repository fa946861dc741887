#include "qw/tailed_graph.hpp"

#include <algorithm>
#include <queue>
#include <set>
#include <string>

#include "qw/error.hpp"

namespace qw {

const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::DisconnectedGraph: return "DisconnectedGraph";
    case ErrorKind::InvalidEdge: return "InvalidEdge";
    case ErrorKind::DuplicateEdge: return "DuplicateEdge";
    case ErrorKind::UnknownBoundaryVertex: return "UnknownBoundaryVertex";
    case ErrorKind::ZeroTailCount: return "ZeroTailCount";
    case ErrorKind::NotBoundaryVertex: return "NotBoundaryVertex";
    case ErrorKind::ParamOutOfRange: return "ParamOutOfRange";
    case ErrorKind::BadBlockSizes: return "BadBlockSizes";
    case ErrorKind::DepthTooSmall: return "DepthTooSmall";
    case ErrorKind::SingularResolventNearContour: return "SingularResolventNearContour";
    case ErrorKind::NotAResonance: return "NotAResonance";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::ClassificationMismatch: return "ClassificationMismatch";
    case ErrorKind::GroupEscapedContour: return "GroupEscapedContour";
    case ErrorKind::Stage1NotSemisimple: return "Stage1NotSemisimple";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::Config: return "Config";
  }
  return "Unknown";
}

bool is_config_error(ErrorKind k) {
  switch (k) {
    case ErrorKind::DisconnectedGraph:
    case ErrorKind::InvalidEdge:
    case ErrorKind::DuplicateEdge:
    case ErrorKind::UnknownBoundaryVertex:
    case ErrorKind::ZeroTailCount:
    case ErrorKind::NotBoundaryVertex:
    case ErrorKind::ParamOutOfRange:
    case ErrorKind::BadBlockSizes:
    case ErrorKind::OutOfRange:
    case ErrorKind::Config:
      return true;
    default:
      return false;
  }
}

InternalGraph build_internal(int vertex_count, const std::vector<std::pair<int, int>>& edges) {
  if (vertex_count < 1) throw Error(ErrorKind::InvalidEdge, "vertex_count must be positive");
  std::set<std::pair<int, int>> seen;
  for (auto [u, v] : edges) {
    if (u < 0 || v < 0 || u >= vertex_count || v >= vertex_count)
      throw Error(ErrorKind::InvalidEdge, "edge {" + std::to_string(u) + "," + std::to_string(v) + "} out of range");
    if (u == v) throw Error(ErrorKind::InvalidEdge, "self-loop at " + std::to_string(u));
    if (!seen.insert({std::min(u, v), std::max(u, v)}).second)
      throw Error(ErrorKind::DuplicateEdge, "edge {" + std::to_string(u) + "," + std::to_string(v) + "}");
  }

  InternalGraph g;
  g.n_ = vertex_count;
  g.edges_ = edges;
  for (auto [u, v] : edges) {
    g.arcs_.push_back({u, v});
    g.arcs_.push_back({v, u});
  }
  std::sort(g.arcs_.begin(), g.arcs_.end(), [](const Arc& a, const Arc& b) {
    return a.terminal != b.terminal ? a.terminal < b.terminal : a.origin < b.origin;
  });
  const int na = g.arc_count();
  g.rev_.assign(na, -1);
  g.in_arcs_.assign(vertex_count, {});
  g.out_arcs_.assign(vertex_count, {});
  for (int a = 0; a < na; ++a) {
    g.in_arcs_[g.arcs_[a].terminal].push_back(a);
    g.out_arcs_[g.arcs_[a].origin].push_back(a);
  }
  for (int a = 0; a < na; ++a) {
    for (int b : g.in_arcs_[g.arcs_[a].origin])
      if (g.arcs_[b].origin == g.arcs_[a].terminal) g.rev_[a] = b;
  }

  std::vector<char> visited(vertex_count, 0);
  std::queue<int> q;
  q.push(0);
  visited[0] = 1;
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    for (int a : g.out_arcs_[v]) {
      int w = g.arcs_[a].terminal;
      if (!visited[w]) {
        visited[w] = 1;
        q.push(w);
      }
    }
  }
  for (int v = 0; v < vertex_count; ++v) {
    if (!visited[v]) throw Error(ErrorKind::DisconnectedGraph, "vertex " + std::to_string(v) + " unreachable from 0");
  }
  if (vertex_count == 1) throw Error(ErrorKind::DisconnectedGraph, "single vertex without edges");
  return g;
}

bool InternalGraph::bipartite() const {
  std::vector<int> color(n_, -1);
  std::queue<int> q;
  color[0] = 0;
  q.push(0);
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    for (int a : out_arcs_[v]) {
      int w = arcs_[a].terminal;
      if (color[w] < 0) {
        color[w] = 1 - color[v];
        q.push(w);
      } else if (color[w] == color[v]) {
        return false;
      }
    }
  }
  return true;
}

TailedGraph attach_tails(const InternalGraph& g, const TailSpec& spec) {
  TailedGraph t;
  t.g_ = g;
  t.spec_ = spec;
  t.tails_at_.assign(g.vertex_count(), {});
  for (const auto& at : spec.attachments) {
    if (at.vertex < 0 || at.vertex >= g.vertex_count())
      throw Error(ErrorKind::UnknownBoundaryVertex, "vertex " + std::to_string(at.vertex));
    if (at.count <= 0) throw Error(ErrorKind::ZeroTailCount, "vertex " + std::to_string(at.vertex));
    for (int k = 0; k < at.count; ++k) {
      t.tails_at_[at.vertex].push_back(static_cast<int>(t.tail_vertex_.size()));
      t.tail_vertex_.push_back(at.vertex);
    }
  }
  return t;
}

std::vector<int> TailedGraph::boundary_vertices() const {
  std::vector<int> out;
  for (int v = 0; v < vertex_count(); ++v)
    if (is_boundary(v)) out.push_back(v);
  return out;
}

std::vector<ArcSlot> TailedGraph::slots(int v) const {
  std::vector<ArcSlot> out;
  for (int a : g_.in_arcs(v)) out.push_back({false, a});
  for (int j : tails_at_[v]) out.push_back({true, j});
  return out;
}

std::vector<ArcSlot> boundary_arc_slots(const TailedGraph& g, int v) {
  if (v < 0 || v >= g.vertex_count() || !g.is_boundary(v))
    throw Error(ErrorKind::NotBoundaryVertex, "vertex " + std::to_string(v));
  return g.slots(v);
}

}  // namespace qw
