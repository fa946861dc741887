#pragma once

#include <utility>
#include <vector>

namespace qw {

struct Arc {
  int origin;
  int terminal;
};

class InternalGraph {
 public:
  int vertex_count() const { return n_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  int arc_count() const { return static_cast<int>(arcs_.size()); }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }

  // Arcs in canonical order: sorted by (terminal, origin).
  const std::vector<Arc>& arcs() const { return arcs_; }
  const Arc& arc(int a) const { return arcs_[a]; }
  int reverse(int a) const { return rev_[a]; }
  int degree(int v) const { return static_cast<int>(in_arcs_[v].size()); }
  // Arcs with terminal v, ascending index.
  const std::vector<int>& in_arcs(int v) const { return in_arcs_[v]; }
  // Arcs with origin v, ascending index.
  const std::vector<int>& out_arcs(int v) const { return out_arcs_[v]; }
  bool bipartite() const;

  friend InternalGraph build_internal(int vertex_count, const std::vector<std::pair<int, int>>& edges);

 private:
  int n_ = 0;
  std::vector<std::pair<int, int>> edges_;
  std::vector<Arc> arcs_;
  std::vector<int> rev_;
  std::vector<std::vector<int>> in_arcs_, out_arcs_;
};

InternalGraph build_internal(int vertex_count, const std::vector<std::pair<int, int>>& edges);

struct TailAttachment {
  int vertex;
  int count;
};

struct TailSpec {
  std::vector<TailAttachment> attachments;
};

// One entry of A^flat_v: either an internal arc index or a tail index.
struct ArcSlot {
  bool is_tail;
  int index;
};

class TailedGraph {
 public:
  const InternalGraph& internal() const { return g_; }
  const TailSpec& tail_spec() const { return spec_; }
  int tail_count() const { return static_cast<int>(tail_vertex_.size()); }
  int arc_count() const { return g_.arc_count(); }
  int vertex_count() const { return g_.vertex_count(); }

  // Boundary vertex of tail j (tails numbered by attachment-list position).
  int tail_vertex(int j) const { return tail_vertex_[j]; }
  // Tails at v in attachment order; empty for non-boundary vertices.
  const std::vector<int>& tails_at(int v) const { return tails_at_[v]; }
  int tails_count_at(int v) const { return static_cast<int>(tails_at_[v].size()); }
  bool is_boundary(int v) const { return !tails_at_[v].empty(); }
  std::vector<int> boundary_vertices() const;

  int n(int v) const { return g_.degree(v) + tails_count_at(v); }
  int n_i(int v) const { return g_.degree(v); }

  // A^flat_v: internal arcs into v (canonical order) followed by tail slots.
  std::vector<ArcSlot> slots(int v) const;

  friend TailedGraph attach_tails(const InternalGraph& g, const TailSpec& spec);

 private:
  InternalGraph g_;
  TailSpec spec_;
  std::vector<int> tail_vertex_;
  std::vector<std::vector<int>> tails_at_;
};

TailedGraph attach_tails(const InternalGraph& g, const TailSpec& spec);

// Same as slots(v) but rejects non-boundary vertices.
std::vector<ArcSlot> boundary_arc_slots(const TailedGraph& g, int v);

}  // namespace qw
