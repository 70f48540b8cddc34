#include "toporec/persistence.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "toporec/errors.hpp"

namespace toporec {

namespace {

class UnionFind {
 public:
  explicit UnionFind(int n) : parent_(n, -1), rank_(n, 0) {}

  void make_set(int i) { parent_[i] = i; }
  bool contains(int i) const { return parent_[i] >= 0; }

  int find(int i) {
    int root = i;
    while (parent_[root] != root) root = parent_[root];
    while (parent_[i] != root) {
      int next = parent_[i];
      parent_[i] = root;
      i = next;
    }
    return root;
  }

  // links two roots, returns the new root
  int link(int a, int b) {
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
    return a;
  }

  void attach(int leaf, int root) {
    parent_[leaf] = root;
    if (rank_[root] == 0) rank_[root] = 1;
  }

 private:
  std::vector<int> parent_;
  std::vector<int> rank_;
};

constexpr int kNeighborOffsets[8][2] = {{-1, -1}, {0, -1}, {1, -1}, {-1, 0},
                                        {1, 0},   {-1, 1}, {0, 1},  {1, 1}};

}  // namespace

PersistenceDiagram compute_pd0(const HeightField& hf) {
  const int w = hf.width, h = hf.height;
  const int n = w * h;
  PersistenceDiagram pd;
  pd.h_infinity = hf.h_infinity;
  pd.direction_index = hf.direction.index;
  if (n == 0) return pd;

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (hf.values[a] != hf.values[b]) return hf.values[a] < hf.values[b];
    return a < b;
  });
  std::vector<int> rank(n);
  for (int pos = 0; pos < n; ++pos) rank[order[pos]] = pos;

  UnionFind uf(n);
  std::vector<double> birth_value(n, 0.0);
  std::vector<int> birth_index(n, 0);

  auto elder_first = [&](int ra, int rb) {
    // true when ra's component is the elder
    if (birth_value[ra] != birth_value[rb]) return birth_value[ra] < birth_value[rb];
    return birth_index[ra] < birth_index[rb];
  };

  int roots[8];
  for (int pos = 0; pos < n; ++pos) {
    const int v = order[pos];
    const double t = hf.values[v];
    const int col = v % w, row = v / w;

    int found = 0;
    for (const auto& off : kNeighborOffsets) {
      const int c = col + off[0], r = row + off[1];
      if (c < 0 || c >= w || r < 0 || r >= h) continue;
      const int u = r * w + c;
      if (rank[u] >= pos) continue;  // not inserted yet
      const int ru = uf.find(u);
      bool dup = false;
      for (int i = 0; i < found; ++i) dup = dup || roots[i] == ru;
      if (!dup) roots[found++] = ru;
    }

    if (found == 0) {
      uf.make_set(v);
      birth_value[v] = t;
      birth_index[v] = v;
      continue;
    }
    uf.attach(v, roots[0]);
    int acc = roots[0];
    for (int i = 1; i < found; ++i) {
      const int other = roots[i];
      const bool acc_elder = elder_first(acc, other);
      const int elder = acc_elder ? acc : other;
      const int younger = acc_elder ? other : acc;
      pd.pairs.push_back({birth_value[younger], t});
      const int next = uf.link(acc, other);
      birth_value[next] = birth_value[elder];
      birth_index[next] = birth_index[elder];
      acc = next;
    }
  }

  const int survivor = uf.find(order[0]);
  pd.pairs.push_back({birth_value[survivor], hf.h_infinity});
  return pd;
}

int component_count_oracle(const HeightField& hf, double t) {
  const int w = hf.width, h = hf.height;
  const int n = w * h;
  std::vector<char> in_set(n), seen(n, 0);
  for (int i = 0; i < n; ++i) in_set[i] = hf.values[i] <= t;

  int components = 0;
  std::vector<int> stack;
  for (int start = 0; start < n; ++start) {
    if (!in_set[start] || seen[start]) continue;
    ++components;
    seen[start] = 1;
    stack.assign(1, start);
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      const int col = v % w, row = v / w;
      for (const auto& off : kNeighborOffsets) {
        const int c = col + off[0], r = row + off[1];
        if (c < 0 || c >= w || r < 0 || r >= h) continue;
        const int u = r * w + c;
        if (!in_set[u] || seen[u]) continue;
        seen[u] = 1;
        stack.push_back(u);
      }
    }
  }
  return components;
}

int alive_pairs(const PersistenceDiagram& pd, double t) {
  int alive = 0;
  for (const auto& p : pd.pairs)
    if (p.birth <= t && t < p.death) ++alive;
  return alive;
}

void write_pd_text(std::ostream& out, const std::vector<PersistenceDiagram>& pds,
                   const std::string& source_id) {
  char buf[128];
  out << "# pd0 v1\n";
  if (!source_id.empty()) out << "# source " << source_id << "\n";
  for (const auto& pd : pds) {
    std::snprintf(buf, sizeof(buf), "# direction %d h_infinity %.17g", pd.direction_index,
                  pd.h_infinity);
    out << buf << "\n";
    for (const auto& p : pd.pairs) {
      std::snprintf(buf, sizeof(buf), "%d %.17g %.17g", pd.direction_index, p.birth, p.death);
      out << buf << "\n";
    }
  }
}

std::vector<PersistenceDiagram> read_pd_text(std::istream& in) {
  std::vector<PersistenceDiagram> pds;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    if (line[0] == '#') {
      std::string hash, word;
      ls >> hash >> word;
      if (word == "direction") {
        PersistenceDiagram pd;
        std::string key;
        ls >> pd.direction_index >> key >> pd.h_infinity;
        pds.push_back(std::move(pd));
      }
      continue;
    }
    int k;
    PersistencePair p;
    if (!(ls >> k >> p.birth >> p.death)) throw Error("bad pd text line: " + line);
    if (pds.empty() || pds.back().direction_index != k)
      throw Error("pd text pair line outside its direction block: " + line);
    pds.back().pairs.push_back(p);
  }
  return pds;
}

}  // namespace toporec
