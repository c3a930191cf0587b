// Rotated surface-code lattice, code-capacity Pauli errors, syndrome
// computation and exact minimum-weight matching decoding.
//
// Layout: data qubits on a d x d grid, index q = row*d + col.  Stabilizer
// cells live at (i, j), i, j in [0, d]; a cell covers the up-to-four data
// qubits {(i-1, j-1), (i-1, j), (i, j-1), (i, j)} clipped to the grid.  Cells
// with (i+j) even are X-type, odd are Z-type.  All interior cells are kept;
// on the top/bottom boundary only X-type weight-2 cells are kept, on the
// left/right boundary only Z-type ones.  Logical Z is a Z string along row 0,
// logical X an X string along column 0.
//
// Decoding is CSS-split: X-stabilizer defects (caused by Z errors) and
// Z-stabilizer defects (caused by X errors) are matched independently.
// Matching weights are unit per lattice hop; the exact minimum over pairings
// (including boundary pairings) is found by recursive enumeration with
// branch-and-bound.  Tie-break: the lexicographically lowest defect-pair
// ordering wins, with the boundary counted as the lowest partner.
#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "pqec/errors.hpp"

namespace pqec {

using qubit_mask = unsigned __int128;

inline int popcount128(qubit_mask m) {
  return __builtin_popcountll(static_cast<std::uint64_t>(m)) +
         __builtin_popcountll(static_cast<std::uint64_t>(m >> 64));
}

inline qubit_mask qubit_bit(int q) { return qubit_mask(1) << q; }

struct PauliError {
  qubit_mask x_mask = 0;
  qubit_mask z_mask = 0;

  int weight() const { return popcount128(x_mask | z_mask); }

  PauliError operator*(const PauliError& other) const {
    return {x_mask ^ other.x_mask, z_mask ^ other.z_mask};
  }
};

enum class NoiseKind { depolarizing, independent_xz, dephasing_only };

inline std::string to_string(NoiseKind k) {
  switch (k) {
    case NoiseKind::depolarizing: return "depolarizing";
    case NoiseKind::independent_xz: return "independent_xz";
    case NoiseKind::dephasing_only: return "dephasing_only";
  }
  return "?";
}

struct NoiseModel {
  NoiseKind kind = NoiseKind::dephasing_only;
  double p_phys = 0.0;
  double mismatch_factor = 1.0;  // rescales the rate used for *simulation*

  void validate() const {
    if (p_phys < 0.0 || p_phys > 0.5)
      throw invalid_parameter_error("NoiseModel: p_phys outside [0, 0.5]");
    if (mismatch_factor <= 0.0)
      throw invalid_parameter_error("NoiseModel: mismatch_factor must be positive");
  }

  // the physics actually simulated; the nominal p_phys is what a compiler assumes
  NoiseModel actual() const {
    NoiseModel n = *this;
    n.p_phys = p_phys * mismatch_factor;
    n.mismatch_factor = 1.0;
    n.validate();
    return n;
  }
};

// ---------------------------------------------------------------------------

struct Stabilizer {
  char type;                 // 'X' or 'Z'
  std::vector<int> support;  // data-qubit indices
  qubit_mask mask = 0;
};

// One decoding sector: nodes are stabilizers of a single type plus a virtual
// boundary.  Each data qubit whose opposite-type error flips exactly two
// stabilizers is an internal edge; one stabilizer, a boundary edge.
struct MatchingGraph {
  int n_nodes = 0;
  std::vector<std::vector<int>> node_dist;        // hop distance between nodes
  std::vector<int> boundary_dist;                 // hops to the boundary
  std::vector<std::vector<qubit_mask>> node_path; // qubit set realizing node_dist
  std::vector<qubit_mask> boundary_path;
};

class SurfaceCode {
 public:
  explicit SurfaceCode(int distance) : distance_(distance) {
    if (distance < 3 || distance % 2 == 0)
      throw invalid_parameter_error("SurfaceCode: distance must be odd and >= 3");
    if (distance > 11)
      throw resource_limit_error("SurfaceCode: qubit masks support distance <= 11");
    build();
  }

  int distance() const { return distance_; }
  int n_data() const { return distance_ * distance_; }
  int n_stabilizers() const { return static_cast<int>(x_stabs_.size() + z_stabs_.size()); }
  // data plus syndrome ancillas
  int patch_qubits() const { return n_data() + n_stabilizers(); }

  const std::vector<Stabilizer>& x_stabilizers() const { return x_stabs_; }
  const std::vector<Stabilizer>& z_stabilizers() const { return z_stabs_; }
  qubit_mask logical_x_mask() const { return logical_x_; }
  qubit_mask logical_z_mask() const { return logical_z_; }

  const MatchingGraph& x_sector_graph() const { return x_graph_; }  // matches X-stab defects
  const MatchingGraph& z_sector_graph() const { return z_graph_; }  // matches Z-stab defects

  int qubit_index(int row, int col) const { return row * distance_ + col; }

  // --- syndromes ------------------------------------------------------------

  // X-stabilizer defects, flipped by the Z part of the error
  std::uint32_t x_syndrome(const PauliError& e) const {
    std::uint32_t s = 0;
    for (std::size_t k = 0; k < x_stabs_.size(); ++k)
      if (popcount128(x_stabs_[k].mask & e.z_mask) & 1) s |= (1u << k);
    return s;
  }

  // Z-stabilizer defects, flipped by the X part of the error
  std::uint32_t z_syndrome(const PauliError& e) const {
    std::uint32_t s = 0;
    for (std::size_t k = 0; k < z_stabs_.size(); ++k)
      if (popcount128(z_stabs_[k].mask & e.x_mask) & 1) s |= (1u << k);
    return s;
  }

  // bit per stabilizer, X stabilizers first then Z stabilizers
  std::vector<std::uint8_t> syndrome(const PauliError& e) const {
    std::vector<std::uint8_t> bits;
    bits.reserve(n_stabilizers());
    const std::uint32_t sx = x_syndrome(e), sz = z_syndrome(e);
    for (std::size_t k = 0; k < x_stabs_.size(); ++k) bits.push_back((sx >> k) & 1);
    for (std::size_t k = 0; k < z_stabs_.size(); ++k) bits.push_back((sz >> k) & 1);
    return bits;
  }

  bool commutes_with_all_stabilizers(const PauliError& e) const {
    return x_syndrome(e) == 0 && z_syndrome(e) == 0;
  }

  // logical action of a residual operator that commutes with all stabilizers:
  // returns (x_flip, z_flip) bits
  std::pair<int, int> logical_class(const PauliError& residual) const {
    const int bx = popcount128(residual.x_mask & logical_z_) & 1;
    const int bz = popcount128(residual.z_mask & logical_x_) & 1;
    return {bx, bz};
  }

 private:
  void build() {
    const int d = distance_;
    auto cell_support = [&](int i, int j) {
      std::vector<int> s;
      for (int r : {i - 1, i})
        for (int c : {j - 1, j})
          if (r >= 0 && r < d && c >= 0 && c < d) s.push_back(qubit_index(r, c));
      std::sort(s.begin(), s.end());
      return s;
    };
    for (int i = 0; i <= d; ++i)
      for (int j = 0; j <= d; ++j) {
        const auto support = cell_support(i, j);
        const char type = ((i + j) % 2 == 0) ? 'X' : 'Z';
        bool keep = false;
        if (support.size() == 4) keep = true;
        else if (support.size() == 2) {
          const bool horizontal_edge = (i == 0 || i == d);
          keep = horizontal_edge ? (type == 'X') : (type == 'Z');
        }
        if (!keep) continue;
        Stabilizer st{type, support, 0};
        for (int q : support) st.mask |= qubit_bit(q);
        (type == 'X' ? x_stabs_ : z_stabs_).push_back(std::move(st));
      }

    logical_z_ = 0;  // Z string along row 0
    for (int c = 0; c < d; ++c) logical_z_ |= qubit_bit(qubit_index(0, c));
    logical_x_ = 0;  // X string along column 0
    for (int r = 0; r < d; ++r) logical_x_ |= qubit_bit(qubit_index(r, 0));

    x_graph_ = build_graph(x_stabs_);
    z_graph_ = build_graph(z_stabs_);
  }

  MatchingGraph build_graph(const std::vector<Stabilizer>& stabs) const {
    const int n = static_cast<int>(stabs.size());
    MatchingGraph g;
    g.n_nodes = n;

    // per data qubit, the stabilizers of this type containing it
    struct Edge {
      int a, b;  // b == -1 for boundary
      int qubit;
    };
    std::vector<Edge> edges;
    for (int q = 0; q < n_data(); ++q) {
      std::vector<int> touching;
      for (int k = 0; k < n; ++k)
        if (stabs[k].mask & qubit_bit(q)) touching.push_back(k);
      if (touching.size() == 2) edges.push_back({touching[0], touching[1], q});
      else if (touching.size() == 1) edges.push_back({touching[0], -1, q});
      else if (touching.size() > 2)
        throw numeric_error("SurfaceCode: qubit in more than two same-type stabilizers");
    }

    std::vector<std::vector<std::pair<int, int>>> adj(n);  // (neighbor, qubit)
    std::vector<std::pair<int, int>> boundary_edges;       // (node, qubit)
    for (const Edge& e : edges) {
      if (e.b >= 0) {
        adj[e.a].push_back({e.b, e.qubit});
        adj[e.b].push_back({e.a, e.qubit});
      } else {
        boundary_edges.push_back({e.a, e.qubit});
      }
    }
    for (auto& a : adj) std::sort(a.begin(), a.end());  // deterministic BFS order

    const int kInf = 1 << 28;
    g.node_dist.assign(n, std::vector<int>(n, kInf));
    g.node_path.assign(n, std::vector<qubit_mask>(n, 0));

    // BFS from every node, tracking the qubit set of one shortest path
    for (int src = 0; src < n; ++src) {
      std::vector<int> dist(n, kInf);
      std::vector<int> pred_node(n, -1), pred_qubit(n, -1);
      std::vector<int> queue{src};
      dist[src] = 0;
      for (std::size_t head = 0; head < queue.size(); ++head) {
        const int u = queue[head];
        for (const auto& [v, q] : adj[u])
          if (dist[v] == kInf) {
            dist[v] = dist[u] + 1;
            pred_node[v] = u;
            pred_qubit[v] = q;
            queue.push_back(v);
          }
      }
      for (int dst = 0; dst < n; ++dst) {
        g.node_dist[src][dst] = dist[dst];
        qubit_mask path = 0;
        for (int v = dst; v != src && v != -1; v = pred_node[v]) path ^= qubit_bit(pred_qubit[v]);
        g.node_path[src][dst] = path;
      }
    }

    // boundary distance: hop to own boundary edge, or path to a node with one
    g.boundary_dist.assign(n, kInf);
    g.boundary_path.assign(n, 0);
    for (int u = 0; u < n; ++u) {
      for (const auto& [b_node, b_qubit] : boundary_edges) {
        const int total = g.node_dist[u][b_node] + 1;
        if (total < g.boundary_dist[u]) {
          g.boundary_dist[u] = total;
          g.boundary_path[u] = g.node_path[u][b_node] ^ qubit_bit(b_qubit);
        }
      }
      if (g.boundary_dist[u] >= kInf)
        throw numeric_error("SurfaceCode: sector not connected to boundary");
    }
    return g;
  }

  int distance_;
  std::vector<Stabilizer> x_stabs_, z_stabs_;
  qubit_mask logical_x_ = 0, logical_z_ = 0;
  MatchingGraph x_graph_, z_graph_;
};

inline SurfaceCode build_code(int distance) { return SurfaceCode(distance); }

// ---------------------------------------------------------------------------
// exact minimum-weight matching by branch-and-bound over defect pairings

namespace detail {

struct MatchState {
  const MatchingGraph* graph;
  std::vector<int> defects;
  std::vector<int> partner;  // index into defects, or -1 for boundary
  std::vector<bool> used;
  std::vector<int> best_partner;
  int best_weight = 1 << 28;

  void search(std::size_t pos, int weight, std::vector<int>& cur) {
    while (pos < defects.size() && used[pos]) ++pos;
    if (pos == defects.size()) {
      if (weight < best_weight) {
        best_weight = weight;
        best_partner = cur;
      }
      return;
    }
    if (weight >= best_weight) return;
    used[pos] = true;
    // boundary counts as the lowest partner, then defects in ascending order
    {
      const int w = graph->boundary_dist[defects[pos]];
      if (weight + w < best_weight) {
        cur[pos] = -1;
        search(pos + 1, weight + w, cur);
      }
    }
    for (std::size_t j = pos + 1; j < defects.size(); ++j) {
      if (used[j]) continue;
      const int w = graph->node_dist[defects[pos]][defects[j]];
      if (weight + w >= best_weight) continue;
      used[j] = true;
      cur[pos] = static_cast<int>(j);
      cur[j] = static_cast<int>(pos);
      search(pos + 1, weight + w, cur);
      used[j] = false;
      cur[j] = -2;
    }
    used[pos] = false;
    cur[pos] = -2;
  }
};

// minimum matching over one sector's defects; returns (correction mask, weight)
inline std::pair<qubit_mask, int> match_sector(const MatchingGraph& graph,
                                               std::uint32_t syndrome) {
  if (syndrome == 0) return {0, 0};
  MatchState st;
  st.graph = &graph;
  for (int k = 0; k < graph.n_nodes; ++k)
    if ((syndrome >> k) & 1) st.defects.push_back(k);
  st.used.assign(st.defects.size(), false);
  std::vector<int> cur(st.defects.size(), -2);
  st.search(0, 0, cur);

  qubit_mask mask = 0;
  for (std::size_t i = 0; i < st.defects.size(); ++i) {
    const int p = st.best_partner[i];
    if (p == -1) mask ^= graph.boundary_path[st.defects[i]];
    else if (p >= 0 && static_cast<std::size_t>(p) > i)
      mask ^= graph.node_path[st.defects[i]][st.defects[p]];
  }
  return {mask, st.best_weight};
}

}  // namespace detail

// Decoder with per-sector syndrome memoization.  Returned corrections always
// reproduce the requested syndrome; total matching weight is exactly minimal
// over defect pairings.
class MwpmDecoder {
 public:
  explicit MwpmDecoder(const SurfaceCode& code) : code_(&code) {}

  // correction for X-stabilizer defects (a Z-mask)
  qubit_mask correct_x_sector(std::uint32_t syndrome) const {
    return lookup(x_cache_, code_->x_sector_graph(), syndrome);
  }

  // correction for Z-stabilizer defects (an X-mask)
  qubit_mask correct_z_sector(std::uint32_t syndrome) const {
    return lookup(z_cache_, code_->z_sector_graph(), syndrome);
  }

  PauliError decode(const PauliError& error_or_syndrome_source) const {
    return decode_syndromes(code_->x_syndrome(error_or_syndrome_source),
                            code_->z_syndrome(error_or_syndrome_source));
  }

  PauliError decode_syndromes(std::uint32_t x_syn, std::uint32_t z_syn) const {
    PauliError c;
    c.z_mask = correct_x_sector(x_syn);
    c.x_mask = correct_z_sector(z_syn);
    return c;
  }

  int matching_weight_x_sector(std::uint32_t syndrome) const {
    return detail::match_sector(code_->x_sector_graph(), syndrome).second;
  }
  int matching_weight_z_sector(std::uint32_t syndrome) const {
    return detail::match_sector(code_->z_sector_graph(), syndrome).second;
  }

  const SurfaceCode& code() const { return *code_; }

 private:
  static qubit_mask lookup(std::unordered_map<std::uint32_t, qubit_mask>& cache,
                           const MatchingGraph& graph, std::uint32_t syndrome) {
    auto it = cache.find(syndrome);
    if (it != cache.end()) return it->second;
    const qubit_mask mask = detail::match_sector(graph, syndrome).first;
    cache.emplace(syndrome, mask);
    return mask;
  }

  const SurfaceCode* code_;
  mutable std::unordered_map<std::uint32_t, qubit_mask> x_cache_;
  mutable std::unordered_map<std::uint32_t, qubit_mask> z_cache_;
};

// convenience matching the operation-level interface: returns a correction
// whose syndrome equals the input bitvector (X stabilizers first, then Z)
inline PauliError decode_mwpm(const SurfaceCode& code, const std::vector<std::uint8_t>& bits) {
  if (bits.size() != static_cast<std::size_t>(code.n_stabilizers()))
    throw invalid_parameter_error("decode_mwpm: syndrome length mismatch");
  std::uint32_t sx = 0, sz = 0;
  const std::size_t nx = code.x_stabilizers().size();
  for (std::size_t k = 0; k < nx; ++k)
    if (bits[k]) sx |= (1u << k);
  for (std::size_t k = 0; k < code.z_stabilizers().size(); ++k)
    if (bits[nx + k]) sz |= (1u << k);
  return MwpmDecoder(code).decode_syndromes(sx, sz);
}

}  // namespace pqec
