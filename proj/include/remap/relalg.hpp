#ifndef REMAP_RELALG_HPP_
#define REMAP_RELALG_HPP_

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "remap/error.hpp"

namespace remap {

class Relation;
class EventSet;
Relation restrict(const EventSet&, const Relation&, const EventSet&);

/// Subset of a universe of event ids, packed into 64-bit words.
class EventSet {
 public:
  EventSet() : n_(0) {}
  explicit EventSet(int n) : n_(n), words_((n + 63) / 64, 0) {}

  int universe() const { return n_; }

  bool contains(int a) const { return (words_[a >> 6] >> (a & 63)) & 1; }

  void insert(int a) { words_[a >> 6] |= uint64_t{1} << (a & 63); }
  void erase(int a) { words_[a >> 6] &= ~(uint64_t{1} << (a & 63)); }

  bool empty() const {
    for (uint64_t w : words_)
      if (w) return false;
    return true;
  }

  int count() const {
    int c = 0;
    for (uint64_t w : words_) c += __builtin_popcountll(w);
    return c;
  }

  EventSet operator|(const EventSet& o) const {
    EventSet r = *this;
    for (size_t i = 0; i < words_.size(); ++i) r.words_[i] |= o.words_[i];
    return r;
  }

  EventSet operator&(const EventSet& o) const {
    EventSet r = *this;
    for (size_t i = 0; i < words_.size(); ++i) r.words_[i] &= o.words_[i];
    return r;
  }

  EventSet operator-(const EventSet& o) const {
    EventSet r = *this;
    for (size_t i = 0; i < words_.size(); ++i) r.words_[i] &= ~o.words_[i];
    return r;
  }

  EventSet complement() const {
    EventSet r(n_);
    for (int a = 0; a < n_; ++a)
      if (!contains(a)) r.insert(a);
    return r;
  }

  bool operator==(const EventSet& o) const = default;

  std::vector<int> elements() const {
    std::vector<int> out;
    for (int a = 0; a < n_; ++a)
      if (contains(a)) out.push_back(a);
    return out;
  }

  static EventSet of(int n, std::initializer_list<int> xs) {
    EventSet s(n);
    for (int x : xs) s.insert(x);
    return s;
  }

  static EventSet where(int n, const std::function<bool(int)>& pred) {
    EventSet s(n);
    for (int a = 0; a < n; ++a)
      if (pred(a)) s.insert(a);
    return s;
  }

 private:
  friend class Relation;
  friend Relation restrict(const EventSet&, const Relation&, const EventSet&);
  int n_;
  std::vector<uint64_t> words_;
};

/// Finite binary relation over event ids 0..n-1 with O(1) membership.
/// Rows are bitsets: row(a) = successors of a.
class Relation {
 public:
  Relation() : n_(0), wpr_(0) {}
  explicit Relation(int n) : n_(n), wpr_((n + 63) / 64), bits_(size_t(n) * wpr_, 0) {}

  int universe() const { return n_; }

  bool contains(int a, int b) const {
    return (bits_[size_t(a) * wpr_ + (b >> 6)] >> (b & 63)) & 1;
  }

  void insert(int a, int b) { bits_[size_t(a) * wpr_ + (b >> 6)] |= uint64_t{1} << (b & 63); }
  void erase(int a, int b) { bits_[size_t(a) * wpr_ + (b >> 6)] &= ~(uint64_t{1} << (b & 63)); }

  bool empty() const {
    for (uint64_t w : bits_)
      if (w) return false;
    return true;
  }

  int size() const {
    int c = 0;
    for (uint64_t w : bits_) c += __builtin_popcountll(w);
    return c;
  }

  bool operator==(const Relation& o) const = default;

  Relation operator|(const Relation& o) const {
    check_universe(o);
    Relation r = *this;
    for (size_t i = 0; i < bits_.size(); ++i) r.bits_[i] |= o.bits_[i];
    return r;
  }

  Relation operator&(const Relation& o) const {
    check_universe(o);
    Relation r = *this;
    for (size_t i = 0; i < bits_.size(); ++i) r.bits_[i] &= o.bits_[i];
    return r;
  }

  Relation operator-(const Relation& o) const {
    check_universe(o);
    Relation r = *this;
    for (size_t i = 0; i < bits_.size(); ++i) r.bits_[i] &= ~o.bits_[i];
    return r;
  }

  Relation& operator|=(const Relation& o) {
    check_universe(o);
    for (size_t i = 0; i < bits_.size(); ++i) bits_[i] |= o.bits_[i];
    return *this;
  }

  Relation inverse() const {
    Relation r(n_);
    for (int a = 0; a < n_; ++a)
      for (int b : row_elements(a)) r.insert(b, a);
    return r;
  }

  static Relation identity(int n) {
    Relation r(n);
    for (int a = 0; a < n; ++a) r.insert(a, a);
    return r;
  }

  /// r? = r ∪ id.
  Relation refl() const { return *this | identity(n_); }

  std::vector<std::pair<int, int>> pairs() const {
    std::vector<std::pair<int, int>> out;
    for (int a = 0; a < n_; ++a)
      for (int b : row_elements(a)) out.emplace_back(a, b);
    return out;
  }

  std::vector<int> row_elements(int a) const {
    std::vector<int> out;
    for (int w = 0; w < wpr_; ++w) {
      uint64_t bitsw = bits_[size_t(a) * wpr_ + w];
      while (bitsw) {
        int b = (w << 6) + __builtin_ctzll(bitsw);
        out.push_back(b);
        bitsw &= bitsw - 1;
      }
    }
    return out;
  }

  static Relation of(int n, std::initializer_list<std::pair<int, int>> ps) {
    Relation r(n);
    for (auto [a, b] : ps) r.insert(a, b);
    return r;
  }

 private:
  void check_universe(const Relation& o) const {
    if (n_ != o.n_) throw Error(Errc::UniverseMismatch, "relation universes differ");
  }

  friend Relation compose(const Relation&, const Relation&);
  friend Relation tclosure(const Relation&);
  friend Relation restrict(const EventSet&, const Relation&, const EventSet&);

  int n_;
  int wpr_;  // words per row
  std::vector<uint64_t> bits_;
};

/// r;s — pairs (a,c) with some b where r(a,b) and s(b,c).
inline Relation compose(const Relation& r, const Relation& s) {
  r.check_universe(s);
  Relation out(r.n_);
  for (int a = 0; a < r.n_; ++a) {
    uint64_t* orow = &out.bits_[size_t(a) * out.wpr_];
    for (int w = 0; w < r.wpr_; ++w) {
      uint64_t bitsw = r.bits_[size_t(a) * r.wpr_ + w];
      while (bitsw) {
        int b = (w << 6) + __builtin_ctzll(bitsw);
        const uint64_t* srow = &s.bits_[size_t(b) * s.wpr_];
        for (int v = 0; v < s.wpr_; ++v) orow[v] |= srow[v];
        bitsw &= bitsw - 1;
      }
    }
  }
  return out;
}

/// Least transitive superset, by bit-parallel Warshall.
inline Relation tclosure(const Relation& r) {
  Relation c = r;
  for (int k = 0; k < c.n_; ++k) {
    const uint64_t* krow = &c.bits_[size_t(k) * c.wpr_];
    for (int a = 0; a < c.n_; ++a) {
      if (!c.contains(a, k)) continue;
      uint64_t* arow = &c.bits_[size_t(a) * c.wpr_];
      for (int w = 0; w < c.wpr_; ++w) arow[w] |= krow[w];
    }
  }
  return c;
}

inline Relation rtclosure(const Relation& r) { return tclosure(r) | Relation::identity(r.universe()); }

/// [a];r;[b] — pairs of r with source in a and target in b.
inline Relation restrict(const EventSet& a, const Relation& r, const EventSet& b) {
  Relation out(r.n_);
  for (int x = 0; x < r.n_; ++x) {
    if (!a.contains(x)) continue;
    uint64_t* orow = &out.bits_[size_t(x) * out.wpr_];
    const uint64_t* rrow = &r.bits_[size_t(x) * r.wpr_];
    for (int w = 0; w < r.wpr_; ++w) orow[w] = rrow[w] & b.words_[w];
  }
  return out;
}

inline bool is_irreflexive(const Relation& r) {
  for (int a = 0; a < r.universe(); ++a)
    if (r.contains(a, a)) return false;
  return true;
}

inline bool is_acyclic(const Relation& r) { return is_irreflexive(tclosure(r)); }

/// Some cycle of r as a vertex list (first == last implied), or empty when acyclic.
inline std::vector<int> find_cycle(const Relation& r) {
  int n = r.universe();
  Relation c = tclosure(r);
  for (int a = 0; a < n; ++a) {
    if (!c.contains(a, a)) continue;
    // Recover an explicit cycle through a by BFS over r restricted to
    // vertices that reach a and are reachable from a.
    std::vector<int> parent(n, -1);
    std::vector<int> queue{a};
    for (size_t qi = 0; qi < queue.size(); ++qi) {
      int u = queue[qi];
      for (int v : r.row_elements(u)) {
        if (v == a) {
          std::vector<int> path{a};
          std::vector<int> rev;
          for (int x = u; x != a; x = parent[x]) rev.push_back(x);
          for (auto it = rev.rbegin(); it != rev.rend(); ++it) path.push_back(*it);
          if (u == a) return {a};  // self loop
          return path;
        }
        if (parent[v] == -1 && v != a) {
          parent[v] = u;
          queue.push_back(v);
        }
      }
    }
  }
  return {};
}

}  // namespace remap

#endif  // REMAP_RELALG_HPP_
