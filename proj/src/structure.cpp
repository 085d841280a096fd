#include "pcf/structure.hpp"

#include <algorithm>
#include <numeric>

#include "pcf/error.hpp"

namespace pcf {

namespace {

class UnionFind {
 public:
  explicit UnionFind(std::int64_t n) : parent_(static_cast<std::size_t>(n)) {
    std::iota(parent_.begin(), parent_.end(), std::int64_t{0});
  }

  std::int64_t find(std::int64_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  // The smaller index always becomes the root, so every class is represented
  // by its lexicographically least slot.
  void unite(std::int64_t a, std::int64_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) {
      parent_[b] = a;
    } else {
      parent_[a] = b;
    }
  }

 private:
  std::vector<std::int64_t> parent_;
};

// Index of the word k k ... k of length t.
std::int64_t repeated_letter(int N, int k, int t) {
  std::int64_t w = 0;
  for (int i = 0; i < t; ++i) w = w * N + k;
  return w;
}

// Union-find over level-m address slots (w, p) -> w * n0 + p, closed under the
// gluings propagated through every prefix of length < m.
UnionFind identify(const SelfSimilarStructure& s, int m) {
  const std::int64_t words = word_count(s.N, m);
  UnionFind uf(words * s.n0);
  for (int prefix_len = 0; prefix_len < m; ++prefix_len) {
    const int tail = m - prefix_len - 1;
    const std::int64_t tail_words = word_count(s.N, tail);
    const std::int64_t prefixes = word_count(s.N, prefix_len);
    for (std::int64_t u = 0; u < prefixes; ++u) {
      for (const auto& g : s.gluings) {
        const std::int64_t wa = (u * s.N + g.cell_a) * tail_words +
                                repeated_letter(s.N, s.fixed_maps[g.label_a], tail);
        const std::int64_t wb = (u * s.N + g.cell_b) * tail_words +
                                repeated_letter(s.N, s.fixed_maps[g.label_b], tail);
        uf.unite(wa * s.n0 + g.label_a, wb * s.n0 + g.label_b);
      }
    }
  }
  return uf;
}

int read_int(const nlohmann::json& doc, const char* key) {
  if (!doc.contains(key)) throw InputError(std::string("definition is missing field '") + key + "'");
  const auto& v = doc.at(key);
  if (!v.is_number_integer()) throw InputError(std::string("field '") + key + "' must be an integer");
  return v.get<int>();
}

}  // namespace

std::int64_t word_count(int N, int m) {
  if (m < 0) throw PreconditionError("level must be non-negative");
  std::int64_t n = 1;
  for (int i = 0; i < m; ++i) {
    n *= N;
    if (n > (std::int64_t{1} << 40)) throw PreconditionError("level too deep: word count overflows");
  }
  return n;
}

std::vector<int> word_letters(std::int64_t word, int N, int m) {
  std::vector<int> letters(static_cast<std::size_t>(m));
  for (int i = m - 1; i >= 0; --i) {
    letters[i] = static_cast<int>(word % N);
    word /= N;
  }
  return letters;
}

std::string word_string(std::int64_t word, int N, int m) {
  std::string out;
  for (int l : word_letters(word, N, m)) out += std::to_string(l + 1);
  return out;
}

void validate(const SelfSimilarStructure& s) {
  if (s.N < 2) throw ValidationError("N must be at least 2");
  if (s.n0 < 1) throw ValidationError("n0 must be at least 1");
  for (const auto& g : s.gluings) {
    if (g.cell_a < 0 || g.cell_a >= s.N || g.cell_b < 0 || g.cell_b >= s.N)
      throw InputError("gluing cell index out of range 1.." + std::to_string(s.N));
    if (g.label_a < 0 || g.label_a >= s.n0 || g.label_b < 0 || g.label_b >= s.n0)
      throw InputError("gluing boundary label out of range 1.." + std::to_string(s.n0));
    if (g.cell_a == g.cell_b) throw InputError("gluing must join two different cells");
  }
  if (static_cast<int>(s.fixed_maps.size()) != s.n0)
    throw InputError("fixed_maps must list one contraction per boundary point");
  for (int k : s.fixed_maps) {
    if (k < 0 || k >= s.N) throw InputError("fixed map index out of range 1.." + std::to_string(s.N));
  }
  {
    auto sorted = s.fixed_maps;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw ValidationError("a contraction cannot fix two distinct boundary points");
  }

  UnionFind uf = identify(s, 1);
  for (int i = 0; i < s.N; ++i) {
    for (int p = 0; p < s.n0; ++p) {
      for (int q = p + 1; q < s.n0; ++q) {
        if (uf.find(i * s.n0 + p) == uf.find(i * s.n0 + q))
          throw ValidationError("gluings identify two boundary points of cell " + std::to_string(i + 1));
      }
    }
  }

  // Cells are connected when they share an identification class.
  UnionFind cells(s.N);
  std::vector<std::int64_t> owner(static_cast<std::size_t>(s.N * s.n0), -1);
  for (int i = 0; i < s.N; ++i) {
    for (int p = 0; p < s.n0; ++p) {
      const auto root = uf.find(i * s.n0 + p);
      if (owner[root] < 0) {
        owner[root] = i;
      } else {
        cells.unite(owner[root], i);
      }
    }
  }
  for (int i = 1; i < s.N; ++i) {
    if (cells.find(i) != cells.find(0)) throw ValidationError("disconnected level-1 graph");
  }
}

SelfSimilarStructure parse_structure(const nlohmann::json& doc) {
  if (!doc.is_object()) throw InputError("definition must be a JSON object");
  SelfSimilarStructure s;
  s.name = doc.value("name", std::string("unnamed"));
  s.N = read_int(doc, "N");
  s.n0 = read_int(doc, "n0");
  if (s.N < 2) throw ValidationError("N must be at least 2");
  if (s.n0 < 1) throw ValidationError("n0 must be at least 1");

  if (!doc.contains("gluings") || !doc.at("gluings").is_array())
    throw InputError("definition field 'gluings' must be an array");
  for (const auto& t : doc.at("gluings")) {
    if (!t.is_array() || t.size() != 4 || !std::all_of(t.begin(), t.end(), [](const auto& x) {
          return x.is_number_integer();
        }))
      throw InputError("each gluing must be an array of 4 integers [i,p,j,q]");
    s.gluings.push_back({t[0].get<int>() - 1, t[1].get<int>() - 1, t[2].get<int>() - 1, t[3].get<int>() - 1});
  }

  if (doc.contains("fixed_maps")) {
    const auto& f = doc.at("fixed_maps");
    if (!f.is_array()) throw InputError("'fixed_maps' must be an array");
    for (const auto& k : f) {
      if (!k.is_number_integer()) throw InputError("'fixed_maps' entries must be integers");
      s.fixed_maps.push_back(k.get<int>() - 1);
    }
  } else if (s.n0 <= s.N) {
    s.fixed_maps.resize(static_cast<std::size_t>(s.n0));
    std::iota(s.fixed_maps.begin(), s.fixed_maps.end(), 0);
  } else {
    throw InputError("n0 > N: 'fixed_maps' must be given explicitly");
  }

  validate(s);
  return s;
}

nlohmann::json to_json(const SelfSimilarStructure& s) {
  nlohmann::json g = nlohmann::json::array();
  for (const auto& x : s.gluings) g.push_back({x.cell_a + 1, x.label_a + 1, x.cell_b + 1, x.label_b + 1});
  nlohmann::json f = nlohmann::json::array();
  for (int k : s.fixed_maps) f.push_back(k + 1);
  return {{"name", s.name}, {"N", s.N}, {"n0", s.n0}, {"gluings", g}, {"fixed_maps", f}};
}

LevelComplex build_level(const SelfSimilarStructure& s, int m) {
  if (m < 0) throw PreconditionError("level must be non-negative");

  LevelComplex lc;
  lc.level = 0;
  lc.N = s.N;
  lc.n0 = s.n0;
  for (int p = 0; p < s.n0; ++p) {
    lc.vertices.push_back({0, p});
    lc.cells.push_back(p);
  }
  lc.nested_sizes.push_back(lc.vertices.size());

  for (int level = 1; level <= m; ++level) {
    const std::int64_t words = word_count(s.N, level);
    const std::int64_t slots = words * s.n0;
    UnionFind uf = identify(s, level);

    std::vector<int> id(static_cast<std::size_t>(slots), -1);
    std::vector<Address> vertices;
    vertices.reserve(lc.vertices.size() * 2);
    for (const auto& a : lc.vertices) {
      const std::int64_t lifted = (a.word * s.N + s.fixed_maps[a.label]) * s.n0 + a.label;
      const std::int64_t root = uf.find(lifted);
      if (id[root] >= 0) throw ValidationError("refinement merges two level-" + std::to_string(level - 1) + " vertices");
      id[root] = static_cast<int>(vertices.size());
      vertices.push_back({root / s.n0, static_cast<int>(root % s.n0)});
    }
    for (std::int64_t slot = 0; slot < slots; ++slot) {
      if (uf.find(slot) == slot && id[slot] < 0) {
        id[slot] = static_cast<int>(vertices.size());
        vertices.push_back({slot / s.n0, static_cast<int>(slot % s.n0)});
      }
    }

    std::vector<int> cells(static_cast<std::size_t>(slots));
    for (std::int64_t slot = 0; slot < slots; ++slot) cells[slot] = id[uf.find(slot)];

    lc.level = level;
    lc.vertices = std::move(vertices);
    lc.cells = std::move(cells);
    lc.nested_sizes.push_back(lc.vertices.size());
  }
  return lc;
}

std::vector<double> pullback(const LevelComplex& fine, const LevelComplex& coarse, int cell,
                             std::span<const double> u) {
  if (fine.level != coarse.level + 1 || fine.N != coarse.N || fine.n0 != coarse.n0)
    throw PreconditionError("pullback needs complexes of consecutive levels of one structure");
  if (cell < 0 || cell >= fine.N) throw PreconditionError("pullback cell index out of range");
  if (u.size() != fine.num_vertices()) throw PreconditionError("pullback: function size does not match V_{m+1}");

  const std::int64_t n = coarse.num_cells();
  std::vector<double> out(coarse.num_vertices(), 0.0);
  for (std::int64_t w = 0; w < n; ++w) {
    const auto src = fine.cell(cell * n + w);
    const auto dst = coarse.cell(w);
    for (int p = 0; p < coarse.n0; ++p) out[dst[p]] = u[src[p]];
  }
  return out;
}

}  // namespace pcf
