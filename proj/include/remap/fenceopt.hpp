#ifndef REMAP_FENCEOPT_HPP_
#define REMAP_FENCEOPT_HPP_

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "remap/enumerate.hpp"
#include "remap/litmus.hpp"

namespace remap {

// ---------------------------------------------------------------------------
// Reachability helpers over a thread CFG. The avoid-set variants treat the
// fences in F as cut points: their nodes and incident edges are gone.

inline void check_node(const Cfg& g, int node) {
  if (node < 0 || node >= static_cast<int>(g.instrs.size()) || !g.alive(node))
    throw Error(Errc::NodeNotInCfg, "node " + std::to_string(node) + " not in cfg");
}

inline bool reach(const Cfg& g, int i, int j) {
  check_node(g, i);
  check_node(g, j);
  return cfg_reach(g, i, j);
}

inline bool opath(const Cfg& g, int i, int f, int j) {
  return reach(g, i, f) && reach(g, f, j);
}

inline bool reachwo(const Cfg& g, int i, int j, const std::set<int>& fences) {
  check_node(g, i);
  check_node(g, j);
  return cfg_reach_avoiding(g, i, j, fences);
}

/// opath through f in the graph with the `avoid` fences cut out.
inline bool onelim(const Cfg& g, int i, int f, int j, const std::set<int>& avoid) {
  if (avoid.count(f)) return false;
  return cfg_reach_avoiding(g, i, f, avoid) && cfg_reach_avoiding(g, f, j, avoid);
}

// ---------------------------------------------------------------------------
// Memory access pairs

enum class InstrClass { Load, Store, Access };  // Access = loads, stores, rmws

inline bool in_class(const Instruction& in, InstrClass c) {
  switch (c) {
    case InstrClass::Load: return in.reads_memory();
    case InstrClass::Store: return in.writes_memory();
    case InstrClass::Access: return in.is_access();
  }
  return false;
}

struct AccessPair {
  int i, j;
  enum class Alias { Must, May, No } alias;

  auto operator<=>(const AccessPair&) const = default;
};

using AccessPairSet = std::vector<AccessPair>;

/// Must-alias needs syntactic equality after folding and no redefinition of
/// an index register anywhere between the two accesses.
inline AccessPair::Alias alias_of(const Cfg& g, int i, int j) {
  const LocExpr &a = g.instrs[i].loc, &b = g.instrs[j].loc;
  if (!may_alias(a, b)) return AccessPair::Alias::No;
  if (!must_alias(a, b)) return AccessPair::Alias::May;
  std::set<std::string> regs;
  expr_regs(a.index, regs);
  expr_regs(b.index, regs);
  for (int k : g.order) {
    if (k == i || k == j) continue;
    const Instruction& in = g.instrs[k];
    if (!in.dest.empty() && regs.count(in.dest) && reach(g, i, k) && reach(g, k, j))
      return AccessPair::Alias::May;
  }
  return AccessPair::Alias::Must;
}

inline AccessPairSet mpairs(const Cfg& g, InstrClass a, InstrClass b) {
  AccessPairSet out;
  for (int i : g.order) {
    if (!in_class(g.instrs[i], a)) continue;
    for (int j : g.order) {
      if (!in_class(g.instrs[j], b) || !reach(g, i, j)) continue;
      out.push_back({i, j, alias_of(g, i, j)});
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Pairs that do not must-alias (may-aliasing array accesses stay in).
inline AccessPairSet diffloc_pairs(const AccessPairSet& ps) {
  AccessPairSet out;
  for (const auto& p : ps)
    if (p.alias != AccessPair::Alias::Must) out.push_back(p);
  return out;
}

inline AccessPairSet sameloc_pairs(const AccessPairSet& ps) {
  AccessPairSet out;
  for (const auto& p : ps)
    if (p.alias == AccessPair::Alias::Must) out.push_back(p);
  return out;
}

// ---------------------------------------------------------------------------
// Non-eliminable fence computation

using FenceSet = std::set<int>;

inline FenceSet fence_nodes(const Cfg& g, Flavor flavor) {
  FenceSet out;
  for (int k : g.order)
    if (g.instrs[k].kind == IKind::Fence && g.instrs[k].flavor == flavor) out.insert(k);
  return out;
}

/// Walks fences in ascending node order; a fence is non-eliminable when some
/// access pair still has a path through it once the already-kept barriers
/// are cut out. Optionally records one covering pair per kept fence.
inline FenceSet get_nfs(const Cfg& g, const AccessPairSet& pairs, const FenceSet& fences,
                        const FenceSet& seed,
                        std::map<int, std::pair<int, int>>* covers = nullptr) {
  FenceSet kept = seed;
  for (int f : fences) {
    for (const auto& pr : pairs) {
      if (onelim(g, pr.i, f, pr.j, kept)) {
        kept.insert(f);
        if (covers) (*covers)[f] = {pr.i, pr.j};
        break;
      }
    }
  }
  return kept;
}

// ---------------------------------------------------------------------------
// CFG rewriting: splice-deletion and full-fence weakening

/// Splices the given fence nodes out; every other path is preserved.
inline Cfg fdelete(const Cfg& g, const FenceSet& fences) {
  Cfg out = g;
  for (int f : fences) {
    check_node(g, f);
    if (g.instrs[f].kind != IKind::Fence)
      throw Error(Errc::NotAFence, "node " + std::to_string(f) + " is not a fence");
  }
  std::vector<int> order;
  for (int k : out.order)
    if (!fences.count(k)) order.push_back(k);
  out.order = std::move(order);
  out.rebuild_edges();
  return out;
}

/// Replaces each full fence in F by a dmbld followed by a dmbst.
inline Cfg fweaken(const Cfg& g, const FenceSet& fences) {
  Cfg out = g;
  for (int f : fences) {
    check_node(out, f);
    if (out.instrs[f].kind != IKind::Fence || out.instrs[f].flavor != Flavor::DmbFull)
      throw Error(Errc::NotAFence, "node " + std::to_string(f) + " is not a dmbfull");
    Instruction ld;
    ld.kind = IKind::Fence;
    ld.flavor = Flavor::DmbLd;
    Instruction st;
    st.kind = IKind::Fence;
    st.flavor = Flavor::DmbSt;
    int ld_id = static_cast<int>(out.instrs.size());
    out.instrs.push_back(ld);
    int st_id = static_cast<int>(out.instrs.size());
    out.instrs.push_back(st);
    std::vector<int> order;
    for (int k : out.order) {
      if (k == f) {
        order.push_back(ld_id);
        order.push_back(st_id);
      } else {
        order.push_back(k);
      }
    }
    out.order = std::move(order);
  }
  out.rebuild_edges();
  return out;
}

// ---------------------------------------------------------------------------
// Architecture passes

struct FenceLedger {
  std::map<int, std::pair<int, int>> kept;  // fence -> covering access pair
  std::vector<int> deleted;
  std::vector<int> weakened;
};

namespace detail {

inline void note_deleted(FenceLedger* led, const FenceSet& all, const FenceSet& kept) {
  if (!led) return;
  for (int f : all)
    if (!kept.count(f)) led->deleted.push_back(f);
}

/// Full fences adjacent to a release store or acquire load are never touched
/// (mixed hand-written code; the theorems only cover the mapped flavors).
inline FenceSet flavored_neighbors(const Cfg& g) {
  FenceSet out;
  for (int f : g.order) {
    if (g.instrs[f].kind != IKind::Fence) continue;
    for (const auto& adj : {g.succ[f], g.pred[f]})
      for (int n : adj) {
        const Instruction& in = g.instrs[n];
        if (in.is_access() && (in.flavor == Flavor::Acquire || in.flavor == Flavor::Release))
          out.insert(f);
      }
  }
  return out;
}

}  // namespace detail

/// Deletes every mfence that is not the only barrier on some path from a
/// store to a load on (potentially) different locations. Atomic updates act
/// as barriers.
inline Cfg x86_felim(const Cfg& g, FenceLedger* ledger = nullptr) {
  FenceSet fences = fence_nodes(g, Flavor::Mfence);
  FenceSet updates;
  for (int k : g.order)
    if (g.instrs[k].kind == IKind::Rmw) updates.insert(k);
  AccessPairSet sl = diffloc_pairs(mpairs(g, InstrClass::Store, InstrClass::Load));
  // plain store-load pairs only: updates already order their surroundings
  AccessPairSet plain;
  for (const auto& p : sl)
    if (g.instrs[p.i].kind == IKind::Store && g.instrs[p.j].kind == IKind::Load)
      plain.push_back(p);
  std::map<int, std::pair<int, int>> covers;
  FenceSet kept = get_nfs(g, plain, fences, updates, &covers);
  if (ledger) {
    for (int f : fences)
      if (kept.count(f)) ledger->kept[f] = covers.at(f);
    detail::note_deleted(ledger, fences, kept);
  }
  FenceSet doomed;
  for (int f : fences)
    if (!kept.count(f)) doomed.insert(f);
  return fdelete(g, doomed);
}

enum class Provenance { FromX86, FromArmv7 };

/// Three phases: dmbfull against store-load pairs (deleted when the program
/// came from x86, weakened otherwise), then dmbst against store-store pairs,
/// then dmbld against load-load and load-store pairs, both seeded with the
/// kept full fences.
inline Cfg armv8_felim(const Cfg& g0, Provenance prov, FenceLedger* ledger = nullptr) {
  FenceSet protect = detail::flavored_neighbors(g0);

  FenceSet full = fence_nodes(g0, Flavor::DmbFull);
  AccessPairSet sl = diffloc_pairs(mpairs(g0, InstrClass::Store, InstrClass::Load));
  std::map<int, std::pair<int, int>> covers;
  FenceSet seed0;
  for (int f : protect)
    if (full.count(f)) seed0.insert(f);
  FenceSet nelim = get_nfs(g0, sl, full, seed0, &covers);
  FenceSet gone;
  for (int f : full)
    if (!nelim.count(f)) gone.insert(f);
  Cfg g1 = prov == Provenance::FromX86 ? fdelete(g0, gone) : fweaken(g0, gone);
  if (ledger) {
    for (int f : full)
      if (nelim.count(f) && covers.count(f)) ledger->kept[f] = covers.at(f);
    if (prov == Provenance::FromX86) {
      for (int f : gone) ledger->deleted.push_back(f);
    } else {
      for (int f : gone) ledger->weakened.push_back(f);
    }
  }

  FenceSet protect1 = detail::flavored_neighbors(g1);
  FenceSet fst = fence_nodes(g1, Flavor::DmbSt);
  AccessPairSet ss = diffloc_pairs(mpairs(g1, InstrClass::Store, InstrClass::Store));
  FenceSet seed1 = nelim;
  for (int f : protect1)
    if (fst.count(f)) seed1.insert(f);
  std::map<int, std::pair<int, int>> covers1;
  FenceSet keep_st = get_nfs(g1, ss, fst, seed1, &covers1);
  FenceSet gone1;
  for (int f : fst)
    if (!keep_st.count(f)) gone1.insert(f);
  Cfg g2 = fdelete(g1, gone1);
  if (ledger) {
    for (int f : fst)
      if (keep_st.count(f) && covers1.count(f)) ledger->kept[f] = covers1.at(f);
    for (int f : gone1) ledger->deleted.push_back(f);
  }

  FenceSet protect2 = detail::flavored_neighbors(g2);
  FenceSet fld = fence_nodes(g2, Flavor::DmbLd);
  AccessPairSet lw = diffloc_pairs(mpairs(g2, InstrClass::Load, InstrClass::Store));
  AccessPairSet ll = diffloc_pairs(mpairs(g2, InstrClass::Load, InstrClass::Load));
  for (const auto& p : lw) ll.push_back(p);
  std::sort(ll.begin(), ll.end());
  FenceSet seed2 = nelim;
  for (int f : protect2)
    if (fld.count(f)) seed2.insert(f);
  std::map<int, std::pair<int, int>> covers2;
  FenceSet keep_ld = get_nfs(g2, ll, fld, seed2, &covers2);
  FenceSet gone2;
  for (int f : fld)
    if (!keep_ld.count(f)) gone2.insert(f);
  if (ledger) {
    for (int f : fld)
      if (keep_ld.count(f) && covers2.count(f)) ledger->kept[f] = covers2.at(f);
    for (int f : gone2) ledger->deleted.push_back(f);
  }
  return fdelete(g2, gone2);
}

/// Keeps one dmb per otherwise-unfenced access pair; repeated fences go.
inline Cfg armv7_felim(const Cfg& g, FenceLedger* ledger = nullptr) {
  FenceSet fences = fence_nodes(g, Flavor::Dmb);
  AccessPairSet pairs = mpairs(g, InstrClass::Access, InstrClass::Access);
  std::map<int, std::pair<int, int>> covers;
  FenceSet kept = get_nfs(g, pairs, fences, {}, &covers);
  if (ledger) {
    for (int f : fences)
      if (kept.count(f)) ledger->kept[f] = covers.at(f);
    detail::note_deleted(ledger, fences, kept);
  }
  FenceSet doomed;
  for (int f : fences)
    if (!kept.count(f)) doomed.insert(f);
  return fdelete(g, doomed);
}

// ---------------------------------------------------------------------------
// Whole-program driver

struct FenceOptResult {
  Program program;
  std::vector<FenceLedger> threads;
};

inline FenceOptResult fence_elim(const Program& p0,
                                 std::optional<Provenance> prov = std::nullopt) {
  Program p = Enumerator::expand_rmw_flavors(p0);
  FenceOptResult out;
  out.program = p;
  for (int tid = 0; tid < p.num_threads(); ++tid) {
    Cfg g = build_cfg(p, tid);
    FenceLedger led;
    Cfg opt = g;
    switch (p.arch) {
      case Arch::X86: opt = x86_felim(g, &led); break;
      case Arch::ARMv8:
        opt = armv8_felim(g, prov.value_or(Provenance::FromArmv7), &led);
        break;
      case Arch::ARMv7:
      case Arch::ARMv7MCA: opt = armv7_felim(g, &led); break;
      case Arch::SCREF: break;
    }
    out.program.threads[tid].code = opt.to_code();
    out.threads.push_back(std::move(led));
  }
  return out;
}

}  // namespace remap

#endif  // REMAP_FENCEOPT_HPP_
