#ifndef REMAP_ROBUST_HPP_
#define REMAP_ROBUST_HPP_

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "remap/enumerate.hpp"
#include "remap/fenceopt.hpp"
#include "remap/litmus.hpp"
#include "remap/models.hpp"

namespace remap {

// ---------------------------------------------------------------------------
// Robustness pairs: M strictly stronger than K, the seven analyzed rows.

struct RobustPair {
  ModelId m, k;

  bool operator==(const RobustPair&) const = default;
};

inline const std::vector<RobustPair>& robust_pairs() {
  static const std::vector<RobustPair> pairs = {
      {ModelId::SC, ModelId::X86A},     {ModelId::SC, ModelId::ARMV8},
      {ModelId::X86A, ModelId::ARMV8},  {ModelId::SC, ModelId::ARMV7},
      {ModelId::X86A, ModelId::ARMV7},  {ModelId::ARMV8, ModelId::ARMV7},
      {ModelId::ARMV7MCA, ModelId::ARMV7}};
  return pairs;
}

inline void check_pair(const RobustPair& rp) {
  for (const auto& p : robust_pairs())
    if (p == rp) return;
  throw Error(Errc::UnsupportedPair, std::string("unsupported robustness pair ") +
                                         model_name(rp.m) + " against " + model_name(rp.k));
}

inline bool arch_matches_model(Arch a, ModelId k) {
  switch (k) {
    case ModelId::X86A: return a == Arch::X86;
    case ModelId::ARMV8: return a == Arch::ARMv8;
    case ModelId::ARMV7: return a == Arch::ARMv7 || a == Arch::ARMv7MCA;
    default: return false;
  }
}

// ---------------------------------------------------------------------------
// Potential-cycle filter over pooled access pairs

struct ThreadPair {
  int tid;
  int i, j;

  auto operator<=>(const ThreadPair&) const = default;
};

/// Keeps (a,b) when two other pairs (p,q), (r,s) exist with b aliasing p's
/// source and a aliasing s's target - the shape of an external cycle.
inline std::vector<ThreadPair> oncyc(const Program& p, const std::vector<ThreadPair>& pairs) {
  auto loc = [&](int tid, int node) { return p.threads[tid].code[node].loc; };
  std::vector<ThreadPair> out;
  for (const auto& ab : pairs) {
    bool fst = false, snd = false;
    for (const auto& pq : pairs) {
      if (pq == ab) continue;
      if (may_alias(loc(ab.tid, ab.j), loc(pq.tid, pq.i))) fst = true;
    }
    for (const auto& rs : pairs) {
      if (rs == ab) continue;
      if (may_alias(loc(ab.tid, ab.i), loc(rs.tid, rs.j))) snd = true;
    }
    if (fst && snd) out.push_back(ab);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Per-row syntactic order check

namespace detail {

inline bool isld(const Instruction& in) { return in.reads_memory(); }
inline bool isst(const Instruction& in) { return in.writes_memory(); }
inline bool isll(const Instruction& in) { return in.kind == IKind::Rmw; }
inline bool issc(const Instruction& in) { return in.kind == IKind::Rmw; }
inline bool isacq(const Instruction& in) {
  return in.kind == IKind::Load && in.flavor == Flavor::Acquire;
}
inline bool isrel(const Instruction& in) {
  return in.kind == IKind::Store && in.flavor == Flavor::Release;
}

inline FenceSet nodes_of(const Cfg& g, const std::function<bool(const Instruction&)>& pred) {
  FenceSet out;
  for (int k : g.order)
    if (pred(g.instrs[k])) out.insert(k);
  return out;
}

/// Release stores that must-alias the target access (po;[L];coi orders them
/// before a same-location write).
inline FenceSet srels(const Cfg& g, int j) {
  FenceSet out;
  for (int k : g.order)
    if (isrel(g.instrs[k]) && must_alias(g.instrs[k].loc, g.instrs[j].loc)) out.insert(k);
  return out;
}

/// Acquire loads reachable from i only through release stores; they act as
/// barriers via po;[L] ; [L];po;[A] ; [A];po chains.
inline FenceSet rel_acq_barriers(const Cfg& g, int i, const FenceSet& rels,
                                 const FenceSet& acqs) {
  FenceSet out;
  for (int a : acqs)
    if (!cfg_reach_avoiding(g, i, a, std::set<int>(rels.begin(), rels.end())))
      out.insert(a);
  return out;
}

/// The Ordered procedure for the ARMv8 rows, evaluated syntactically over
/// fence sets and flavors; dependencies deliberately do not count. An rmw
/// occupies both classes, so both its halves must come out ordered.
inline bool ordered_armv8(const Cfg& g, int i, int j) {
  const Instruction &a = g.instrs[i], &b = g.instrs[j];
  if (must_alias(a.loc, b.loc) && a.is_access() && b.is_access() &&
      alias_of(g, i, j) == AccessPair::Alias::Must)
    return true;
  if (isrel(b) || isacq(a) || (isrel(a) && isacq(b))) return true;

  FenceSet ff = fence_nodes(g, Flavor::DmbFull);
  FenceSet fl = fence_nodes(g, Flavor::DmbLd);
  FenceSet fs = fence_nodes(g, Flavor::DmbSt);
  FenceSet rels = nodes_of(g, isrel);
  FenceSet acqs = nodes_of(g, isacq);
  FenceSet base = ff;
  for (int x : rel_acq_barriers(g, i, rels, acqs)) base.insert(x);

  auto covered = [&](const FenceSet& barriers) {
    return !reachwo(g, i, j, std::set<int>(barriers.begin(), barriers.end()));
  };

  // every (source half, target half) combination must be ordered
  bool ok = true;
  if (isst(a) && isld(b)) ok = ok && covered(base);
  if (isld(a) && isld(b)) {
    FenceSet bs = base;
    for (int x : fl) bs.insert(x);
    ok = ok && covered(bs);
  }
  if (isld(a) && isst(b)) {
    FenceSet bs = base;
    for (int x : fl) bs.insert(x);
    for (int x : srels(g, j)) bs.insert(x);
    ok = ok && covered(bs);
  }
  if (isst(a) && isst(b)) {
    FenceSet bs = base;
    for (int x : fs) bs.insert(x);
    for (int x : srels(g, j)) bs.insert(x);
    ok = ok && covered(bs);
  }
  return ok;
}

}  // namespace detail

/// True when the pair is ordered under the given row's condition on every
/// path. Exemptions (awr-shaped pairs) are handled by the caller.
inline bool ordered(const Cfg& g, const ThreadPair& pr, const RobustPair& rp) {
  check_pair(rp);
  int i = pr.i, j = pr.j;
  const Instruction &a = g.instrs[i], &b = g.instrs[j];
  bool must = a.is_access() && b.is_access() &&
              alias_of(g, i, j) == AccessPair::Alias::Must;

  if (rp.k == ModelId::X86A) {
    // (SC-x86A): [RU];po ∪ po;[WU] ∪ poloc ∪ fence
    if (must || detail::isld(a) || detail::isst(b)) return true;
    FenceSet barriers = fence_nodes(g, Flavor::Mfence);
    for (int k : g.order)
      if (g.instrs[k].kind == IKind::Rmw) barriers.insert(k);
    return !reachwo(g, i, j, std::set<int>(barriers.begin(), barriers.end()));
  }
  if (rp.k == ModelId::ARMV8) return detail::ordered_armv8(g, i, j);

  // ARMv7 rows: poloc and dmb fences order; ppo never counts
  if (must) return true;
  if (rp.m == ModelId::ARMV8 && detail::isst(a)) return true;  // ∪ [W];po
  FenceSet dmbs = fence_nodes(g, Flavor::Dmb);
  return !reachwo(g, i, j, std::set<int>(dmbs.begin(), dmbs.end()));
}

// ---------------------------------------------------------------------------
// The checker

struct RobustReport {
  bool robust = true;
  struct Offender {
    int tid, i, j;
    std::string reason;
  };
  std::vector<Offender> offending;
  struct Inserted {
    int tid, node;
    Flavor flavor;
  };
  std::vector<Inserted> inserted;
};

namespace detail {

inline std::vector<ThreadPair> candidate_pairs(const Program& p, const RobustPair& rp,
                                               const std::vector<Cfg>& cfgs) {
  std::vector<ThreadPair> pool;
  for (int tid = 0; tid < p.num_threads(); ++tid) {
    for (const auto& pr : mpairs(cfgs[tid], InstrClass::Access, InstrClass::Access)) {
      // the mca row watches read-read pairs only; writes order themselves
      if (rp.m == ModelId::ARMV7MCA && (cfgs[tid].instrs[pr.i].writes_memory() ||
                                        cfgs[tid].instrs[pr.j].writes_memory()))
        continue;
      pool.push_back({tid, pr.i, pr.j});
    }
  }
  return pool;
}

inline bool exempt(const Cfg& g, const ThreadPair& pr, const RobustPair& rp) {
  const Instruction &a = g.instrs[pr.i], &b = g.instrs[pr.j];
  if (rp.m != ModelId::X86A) return false;
  // awr: non-rmw store to load pairs are unordered in x86A itself
  bool isw = a.writes_memory() || isrel(a);
  bool isr = b.reads_memory() || isacq(b);
  return isw && isr && !issc(a) && !isll(b);
}

}  // namespace detail

inline RobustReport check_robust(const Program& p0, const RobustPair& rp) {
  check_pair(rp);
  Program p = Enumerator::expand_rmw_flavors(p0);
  if (!arch_matches_model(p.arch, rp.k))
    throw Error(Errc::UnsupportedPair,
                std::string("program arch ") + arch_name(p.arch) +
                    " does not fit robustness against " + model_name(rp.k));
  std::vector<Cfg> cfgs;
  for (int tid = 0; tid < p.num_threads(); ++tid) cfgs.push_back(build_cfg(p, tid));

  std::vector<ThreadPair> pool = detail::candidate_pairs(p, rp, cfgs);
  RobustReport report;
  for (const auto& pr : oncyc(p, pool)) {
    const Cfg& g = cfgs[pr.tid];
    if (detail::exempt(g, pr, rp)) continue;
    if (ordered(g, pr, rp)) continue;
    report.robust = false;
    report.offending.push_back(
        {pr.tid, pr.i, pr.j,
         std::string(model_name(rp.m)) + "-" + model_name(rp.k) + " leaves " +
             emit_instruction(g.instrs[pr.i]) + " .. " + emit_instruction(g.instrs[pr.j]) +
             " unordered on a potential cycle"});
  }
  return report;
}

/// Fence insertion. x86 rows place a fresh mfence immediately before the
/// target access, once per distinct target; the ARM rows place a fence
/// immediately after the source, once per distinct source (dmbld when the
/// source is a plain load on ARMv8, the full fence otherwise; ARMv7 skips
/// exclusive sources).
inline Program enforce_robust(const Program& p0, const RobustPair& rp,
                              RobustReport* out_report = nullptr) {
  Program p = Enumerator::expand_rmw_flavors(p0);
  RobustReport report = check_robust(p, rp);
  if (report.robust) {
    if (out_report) *out_report = report;
    return p;
  }

  bool before_target = rp.k == ModelId::X86A;
  std::map<std::pair<int, int>, Flavor> sites;  // (tid, node) -> fence
  for (const auto& off : report.offending) {
    const Instruction& a = p.threads[off.tid].code[off.i];
    if (before_target) {
      sites.emplace(std::make_pair(off.tid, off.j), Flavor::Mfence);
    } else if (rp.k == ModelId::ARMV8) {
      Flavor f = (a.kind == IKind::Load) ? Flavor::DmbLd : Flavor::DmbFull;
      sites.emplace(std::make_pair(off.tid, off.i), f);
    } else {
      if (a.kind == IKind::Rmw) continue;  // never between an exclusive pair
      sites.emplace(std::make_pair(off.tid, off.i), Flavor::Dmb);
    }
  }

  Program q = p;
  for (int tid = 0; tid < q.num_threads(); ++tid) {
    std::vector<Instruction> code;
    for (int node = 0; node < static_cast<int>(q.threads[tid].code.size()); ++node) {
      auto it = sites.find({tid, node});
      Instruction fence;
      fence.kind = IKind::Fence;
      if (it != sites.end() && before_target) {
        fence.flavor = it->second;
        if (out_report)
          report.inserted.push_back({tid, static_cast<int>(code.size()), it->second});
        code.push_back(fence);
      }
      code.push_back(q.threads[tid].code[node]);
      if (it != sites.end() && !before_target) {
        fence.flavor = it->second;
        if (out_report)
          report.inserted.push_back({tid, static_cast<int>(code.size()), it->second});
        code.push_back(fence);
      }
    }
    q.threads[tid].code = std::move(code);
  }
  if (out_report) *out_report = report;
  return q;
}

// ---------------------------------------------------------------------------
// Semantic ground truth via enumeration

namespace detail {

inline EventSet full_fences_class(const Execution& x) {
  EventSet s(x.size());
  for (const auto& e : x.events)
    if (e.op == Op::F &&
        (e.flavor == Flavor::Mfence || e.flavor == Flavor::Dmb || e.flavor == Flavor::DmbFull))
      s.insert(e.id);
  return s;
}

/// x86A consistency lifted onto ARM executions, with mo constructed from
/// ordered-before, program order, and coherence rather than quantified:
///   mo ⊇ [W∪F];ob;[W∪F] ∪ [W∪F];po;[W∪F] ∪ [F];po;fr ∪ co
/// and the five axioms AirrHB, AirrMOHB, AirrFRHB, AirrFMRP, AirrUF.
inline bool x86a_lifted_consistent(const Execution& x, const EvDeps& deps) {
  Relation xhb = tclosure(x.po | x.rf);
  if (!is_irreflexive(xhb)) return false;

  Relation ob = armv8_ob(x, deps);
  EventSet wf = x.cls_writes() | full_fences_class(x);
  EventSet ff = full_fences_class(x);
  Relation fr = derive_fr(x);
  Relation mo = restrict(wf, ob, wf) | restrict(wf, x.po, wf) |
                compose(restrict(ff, x.po, x.all()), fr) | x.co;
  mo = tclosure(mo);
  if (!is_irreflexive(mo)) return false;

  if (!is_irreflexive(compose(mo, xhb))) return false;
  if (!is_irreflexive(compose(fr, xhb))) return false;
  Relation rfe = external_part(x.rf, x);
  if (!is_irreflexive(compose(compose(fr, mo), compose(rfe, x.po)))) return false;
  EventSet uf = x.codom_rmw() | ff;
  if (!is_irreflexive(compose(compose(fr, mo), restrict(uf, x.po, x.all())))) return false;
  return true;
}

}  // namespace detail

/// M-consistency of one K-execution, with cross-signature lifting: full
/// fences translate across models, release/acquire flavors stay read/write.
inline bool m_consistent(ModelId m, const Execution& x, const EvDeps& deps) {
  switch (m) {
    case ModelId::SC: return check_sc(x).consistent;
    case ModelId::X86A: return detail::x86a_lifted_consistent(x, deps);
    case ModelId::ARMV8: return check_armv8(x, deps).consistent;
    case ModelId::ARMV7MCA: return check_armv7mca(x, deps).consistent;
    case ModelId::ARMV7: return check_armv7(x, deps).consistent;
    case ModelId::X86: return check_x86a(x).consistent;
  }
  return false;
}

/// Each thread function replicated `copies` times.
inline Program replicate(const Program& p, int copies) {
  Program q = p;
  q.outcome = nullptr;
  q.threads.clear();
  for (int c = 0; c < copies; ++c)
    for (const auto& t : p.threads) {
      Thread copy = t;
      copy.name = t.name + (c == 0 ? "" : "_" + std::to_string(c));
      q.threads.push_back(copy);
    }
  return q;
}

/// Ground truth: every K-consistent execution is also M-consistent. Thread
/// functions are instantiated `replication` times each (an intentional
/// under-approximation of the unbounded-replication guarantee).
inline bool semantic_robust_oracle(const Program& p0, const RobustPair& rp, int replication = 1,
                                   EnumOptions opts = {}) {
  check_pair(rp);
  Program p = replicate(p0, replication);
  bool robust = true;
  enumerate_executions(
      p, rp.k,
      [&](const Execution& x, const EvDeps& deps) {
        if (robust && !m_consistent(rp.m, x, deps)) robust = false;
      },
      opts);
  return robust;
}

}  // namespace remap

#endif  // REMAP_ROBUST_HPP_
