#include "qw/fixtures.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "qw/error.hpp"

namespace qw {

namespace {

int parse_int(const std::string& s, const std::string& what) {
  try {
    size_t pos = 0;
    int v = std::stoi(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::Config, "bad " + what + ": '" + s + "'");
  }
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

}  // namespace

InternalGraph preset_graph(const std::string& preset) {
  const auto colon = preset.find(':');
  if (colon == std::string::npos) throw Error(ErrorKind::Config, "preset must be cycle:<n> or complete:<n>");
  const std::string kind = preset.substr(0, colon);
  const int n = parse_int(preset.substr(colon + 1), "preset size");
  std::vector<std::pair<int, int>> edges;
  if (kind == "cycle") {
    if (n < 3) throw Error(ErrorKind::Config, "cycle needs n >= 3");
    for (int k = 0; k < n; ++k) edges.push_back({k, (k + 1) % n});
  } else if (kind == "complete") {
    if (n < 2) throw Error(ErrorKind::Config, "complete graph needs n >= 2");
    for (int u = 0; u < n; ++u)
      for (int v = u + 1; v < n; ++v) edges.push_back({u, v});
  } else {
    throw Error(ErrorKind::Config, "unknown preset '" + kind + "'");
  }
  return build_internal(n, edges);
}

TailSpec parse_tails(const std::string& list) {
  TailSpec spec;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    int count = 1;
    if (auto star = item.find('*'); star != std::string::npos) {
      count = parse_int(item.substr(star + 1), "tail count");
      item = item.substr(0, star);
    }
    if (!item.empty() && (item[0] == 'v' || item[0] == 'V')) item = item.substr(1);
    spec.attachments.push_back({parse_int(item, "tail vertex"), count});
  }
  if (spec.attachments.empty()) throw Error(ErrorKind::Config, "empty tail list");
  return spec;
}

TailedGraph graph_from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    throw Error(ErrorKind::Config, std::string("graph JSON: ") + e.what());
  }
  try {
    const int n = j.at("vertices").get<int>();
    std::vector<std::pair<int, int>> edges;
    for (const auto& e : j.at("edges")) {
      if (!e.is_array() || e.size() != 2) throw Error(ErrorKind::InvalidEdge, "edge must be a pair");
      edges.push_back({e[0].get<int>(), e[1].get<int>()});
    }
    TailSpec spec;
    if (j.contains("tails"))
      for (const auto& t : j.at("tails")) spec.attachments.push_back({t.at("vertex").get<int>(), t.value("count", 1)});
    return attach_tails(build_internal(n, edges), spec);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Config, std::string("graph JSON: ") + e.what());
  }
}

TailedGraph graph_from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Config, "cannot open graph file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return graph_from_json_text(ss.str());
}

std::string graph_to_json_text(const TailedGraph& g) {
  nlohmann::json j;
  j["vertices"] = g.vertex_count();
  j["edges"] = nlohmann::json::array();
  for (auto [u, v] : g.internal().edges()) j["edges"].push_back({u, v});
  j["tails"] = nlohmann::json::array();
  for (const auto& a : g.tail_spec().attachments) j["tails"].push_back({{"vertex", a.vertex}, {"count", a.count}});
  return j.dump();
}

std::vector<Fixture> acceptance_fixtures() {
  const InternalGraph c4 = preset_graph("cycle:4");
  const InternalGraph k4 = preset_graph("complete:4");
  return {
      {"c4-3tails", "C4 with tails at v0,v1,v2", attach_tails(c4, parse_tails("v0,v1,v2"))},
      {"c4-3tails-mid", "C4 with tails at v0,v1,v3", attach_tails(c4, parse_tails("v0,v1,v3"))},
      {"c4-4tails", "C4 with tails at every vertex", attach_tails(c4, parse_tails("v0,v1,v2,v3"))},
      {"k4-3tails", "K4 with tails at v0,v1,v2", attach_tails(k4, parse_tails("v0,v1,v2"))},
      {"k4-4tails", "K4 with tails at every vertex", attach_tails(k4, parse_tails("v0,v1,v2,v3"))},
  };
}

Fixture fixture_by_id(const std::string& id) {
  for (auto& f : acceptance_fixtures())
    if (f.id == id) return f;
  throw Error(ErrorKind::Config, "unknown fixture '" + id + "'");
}

}  // namespace qw
