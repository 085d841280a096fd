#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace pcf {

/// Identification F_{cell_a}(label_a) == F_{cell_b}(label_b). Indices are zero-based.
struct Gluing {
  int cell_a = 0;
  int label_a = 0;
  int cell_b = 0;
  int label_b = 0;
};

/// Combinatorial p.c.f. self-similar structure: N contractions, n0 boundary
/// points and the gluing relations between level-1 cells.
///
/// `fixed_maps[p]` names the contraction whose fixed point is boundary point p.
/// It is used to locate F_w(p) inside deeper cells (F_w(p) = F_{w k k ... k}(p)
/// with k = fixed_maps[p]).
struct SelfSimilarStructure {
  std::string name;
  int N = 0;
  int n0 = 0;
  std::vector<Gluing> gluings;
  std::vector<int> fixed_maps;
};

/// Address (w, p) of the point F_w(p); `word` is the lexicographic index of w
/// among words of the owning level.
struct Address {
  std::int64_t word = 0;
  int label = 0;

  friend bool operator==(const Address&, const Address&) = default;
};

/// Vertex/cell complex V_m, W_m of one level.
///
/// Vertex indices are hierarchical: the first |V_{m-1}| vertices are the
/// level-(m-1) vertices in their level-(m-1) order, so the boundary V_0 is
/// always 0..n0-1. New vertices follow in order of their canonical address,
/// which is the lexicographically least address of the identification class.
struct LevelComplex {
  int level = 0;
  int N = 0;
  int n0 = 0;
  std::vector<Address> vertices;
  std::vector<int> cells;  // row-major, one row of n0 vertex indices per word
  std::vector<std::size_t> nested_sizes;  // |V_0|, |V_1|, ..., |V_level|

  std::size_t num_vertices() const { return vertices.size(); }
  std::int64_t num_cells() const { return static_cast<std::int64_t>(cells.size()) / n0; }
  std::span<const int> cell(std::int64_t w) const {
    return {cells.data() + w * n0, static_cast<std::size_t>(n0)};
  }
};

/// N^m, throwing if it does not fit comfortably in memory-sized integers.
std::int64_t word_count(int N, int m);

/// Letters (zero-based) of the word with lexicographic index `word` at length m.
std::vector<int> word_letters(std::int64_t word, int N, int m);

/// Human-readable one-based spelling, e.g. "132"; the empty word is "".
std::string word_string(std::int64_t word, int N, int m);

/// Checks ranges, fixed-map consistency and level-1 connectivity. Throws
/// InputError or ValidationError.
void validate(const SelfSimilarStructure& s);

/// Reads the structure part of a fractal-definition document and validates it.
/// Gluing tuples and fixed maps are one-based in the document.
SelfSimilarStructure parse_structure(const nlohmann::json& doc);

/// Serialises back to the (one-based) document form.
nlohmann::json to_json(const SelfSimilarStructure& s);

LevelComplex build_level(const SelfSimilarStructure& s, int m);

/// (u o F_i) on V_m for u given on V_{m+1}. `fine` must be level m+1 and
/// `coarse` level m of the same structure.
std::vector<double> pullback(const LevelComplex& fine, const LevelComplex& coarse, int cell,
                             std::span<const double> u);

}  // namespace pcf
