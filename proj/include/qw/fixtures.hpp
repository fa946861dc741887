#pragma once

#include <string>
#include <vector>

#include "qw/tailed_graph.hpp"

namespace qw {

// "cycle:<n>" or "complete:<n>".
InternalGraph preset_graph(const std::string& preset);
// "v0,v1,v2" or "0,1,2"; repeated entries add further tails; "v0*2" attaches two.
TailSpec parse_tails(const std::string& list);
// {"vertices": n, "edges": [[u,v],...], "tails": [{"vertex": id, "count": c}, ...]}
TailedGraph graph_from_json_text(const std::string& text);
TailedGraph graph_from_json_file(const std::string& path);
std::string graph_to_json_text(const TailedGraph& g);

struct Fixture {
  std::string id;
  std::string description;
  TailedGraph graph;
};

// c4-3tails (v0,v1,v2), c4-3tails-mid (v0,v1,v3), c4-4tails, k4-3tails, k4-4tails.
std::vector<Fixture> acceptance_fixtures();
Fixture fixture_by_id(const std::string& id);

}  // namespace qw
