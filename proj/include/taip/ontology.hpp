#pragma once

// Competence ontology: a rooted tree of competence identifiers plus the
// semantic similarity and coverage metrics built on it.

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace taip {

using CompetenceId = std::string;

// Parameters of the similarity metric. Both regulate how fast similarity
// decays with path length (lambda) and saturates with subsumer depth (kappa).
struct SimilarityParams {
  double kappa = 1.0;
  double lambda = 1.0;

  bool valid() const {
    return kappa >= 1.0 && kappa <= 2.0 && lambda >= 1.0 && lambda <= 2.0;
  }
};

class CompetenceOntology {
 public:
  CompetenceOntology() = default;

  // Builds and validates a tree. `extra_nodes` lets callers declare nodes
  // that carry no edge (only legal for the root itself); anything else is
  // rejected as an orphan.
  static CompetenceOntology from_edges(
      const std::string& root,
      const std::vector<std::pair<std::string, std::string>>& edges,
      const std::vector<std::string>& extra_nodes = {}) {
    CompetenceOntology o;
    o.add_node(root);
    for (const auto& [parent_id, child_id] : edges) {
      if (child_id == root)
        throw std::invalid_argument("ontology: root '" + root +
                                    "' cannot appear as a child");
      o.add_node(parent_id);
      const int child = o.add_node(child_id);
      if (o.parent_[child] != -1)
        throw std::invalid_argument("ontology: duplicate id '" + child_id +
                                    "' (node has more than one parent edge)");
      o.parent_[child] = o.index_of(parent_id);
    }
    for (const auto& id : extra_nodes) o.add_node(id);

    // Every non-root node must hang off exactly one parent chain ending at
    // the root.
    const int root_ix = 0;
    std::vector<int> child_count(o.names_.size(), 0);
    for (std::size_t i = 0; i < o.names_.size(); ++i)
      if (o.parent_[i] >= 0) ++child_count[o.parent_[i]];
    for (std::size_t i = 0; i < o.names_.size(); ++i) {
      if (static_cast<int>(i) == root_ix || o.parent_[i] != -1) continue;
      if (child_count[i] == 0)
        throw std::invalid_argument("ontology: orphan node '" + o.names_[i] +
                                    "' (connected to no edge)");
      throw std::invalid_argument("ontology: multiple roots ('" + o.names_[i] +
                                  "' has no parent and is not the declared root)");
    }

    // Depths via parent walks; a walk longer than the node count is a cycle.
    o.depth_.assign(o.names_.size(), -1);
    o.depth_[root_ix] = 0;
    for (std::size_t i = 0; i < o.names_.size(); ++i) {
      int steps = 0;
      int at = static_cast<int>(i);
      std::vector<int> chain;
      while (o.depth_[at] < 0) {
        chain.push_back(at);
        at = o.parent_[at];
        if (++steps > static_cast<int>(o.names_.size()))
          throw std::invalid_argument("ontology: cycle involving '" +
                                      o.names_[i] + "'");
      }
      for (auto it = chain.rbegin(); it != chain.rend(); ++it)
        o.depth_[*it] = o.depth_[o.parent_[*it]] + 1;
    }

    o.children_.assign(o.names_.size(), {});
    for (std::size_t i = 0; i < o.names_.size(); ++i)
      if (o.parent_[i] >= 0) o.children_[o.parent_[i]].push_back(static_cast<int>(i));
    return o;
  }

  int node_count() const { return static_cast<int>(names_.size()); }
  int root_index() const { return 0; }
  const std::string& root_id() const { return names_[0]; }

  bool contains(const std::string& id) const { return index_.count(id) != 0; }

  int index_of(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end())
      throw std::out_of_range("ontology: unknown competence '" + id + "'");
    return it->second;
  }

  const std::string& id_of(int ix) const { return names_.at(ix); }
  int parent(int ix) const { return parent_.at(ix); }
  int depth(int ix) const { return depth_.at(ix); }
  std::span<const int> children(int ix) const { return children_.at(ix); }

  // Depth of the deepest common subsumer (LCA) of a and b.
  int subsumer_depth(int a, int b) const {
    check_ix(a);
    check_ix(b);
    while (depth_[a] > depth_[b]) a = parent_[a];
    while (depth_[b] > depth_[a]) b = parent_[b];
    while (a != b) {
      a = parent_[a];
      b = parent_[b];
    }
    return depth_[a];
  }

  // Tree distance between a and b.
  int shortest_path_len(int a, int b) const {
    return depth_.at(a) + depth_.at(b) - 2 * subsumer_depth(a, b);
  }

  // sim(a,b) = 1 when the distance is zero, else e^(-lambda*l) * tanh(kappa*h).
  double semantic_similarity(int a, int b, const SimilarityParams& params) const {
    if (a > b) std::swap(a, b);  // canonical order: exact symmetry
    const int l = shortest_path_len(a, b);
    if (l == 0) return 1.0;
    const int h = subsumer_depth(a, b);
    return std::exp(-params.lambda * l) * std::tanh(params.kappa * h);
  }

  // Best similarity between c and any member of the set; 0 for an empty set.
  double coverage(int c, std::span<const int> set,
                  const SimilarityParams& params) const {
    double best = 0.0;
    for (int member : set)
      best = std::max(best, semantic_similarity(c, member, params));
    return best;
  }

  // Id-based conveniences.
  int shortest_path_len(const std::string& a, const std::string& b) const {
    return shortest_path_len(index_of(a), index_of(b));
  }
  int subsumer_depth(const std::string& a, const std::string& b) const {
    return subsumer_depth(index_of(a), index_of(b));
  }
  double semantic_similarity(const std::string& a, const std::string& b,
                             const SimilarityParams& params) const {
    return semantic_similarity(index_of(a), index_of(b), params);
  }
  double coverage(const std::string& c, const std::vector<std::string>& set,
                  const SimilarityParams& params) const {
    std::vector<int> ixs;
    ixs.reserve(set.size());
    for (const auto& id : set) ixs.push_back(index_of(id));
    return coverage(index_of(c), ixs, params);
  }

  // Edges in construction order, for serialization.
  std::vector<std::pair<std::string, std::string>> edges() const {
    std::vector<std::pair<std::string, std::string>> out;
    for (std::size_t i = 1; i < names_.size(); ++i)
      out.emplace_back(names_[parent_[i]], names_[i]);
    return out;
  }

 private:
  int add_node(const std::string& id) {
    if (id.empty()) throw std::invalid_argument("ontology: empty competence id");
    auto it = index_.find(id);
    if (it != index_.end()) return it->second;
    const int ix = static_cast<int>(names_.size());
    index_.emplace(id, ix);
    names_.push_back(id);
    parent_.push_back(-1);
    return ix;
  }

  void check_ix(int ix) const {
    if (ix < 0 || ix >= node_count())
      throw std::out_of_range("ontology: node index out of range");
  }

  std::vector<std::string> names_;  // names_[0] is the root
  std::unordered_map<std::string, int> index_;
  std::vector<int> parent_;  // -1 for the root
  std::vector<int> depth_;
  std::vector<std::vector<int>> children_;
};

}  // namespace taip
