#ifndef REMAP_ENUMERATE_HPP_
#define REMAP_ENUMERATE_HPP_

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "remap/exec.hpp"
#include "remap/litmus.hpp"
#include "remap/models.hpp"
#include "remap/relalg.hpp"

namespace remap {

// ---------------------------------------------------------------------------
// Behaviors

struct Behavior {
  // (tid, register) -> final value; covers every register named in the thread
  std::map<std::pair<int, std::string>, int64_t> regs;
  // cell -> final value (wval of the co-maximal write, or the initial value)
  std::map<Cell, int64_t> mem;
  // strict mode: per-cell co order as (tid, write ordinal within thread);
  // ordinal counts memory-writing instructions in program text, so it is
  // stable under fence insertion and mapping
  std::map<Cell, std::vector<std::pair<int, int>>> co_order;

  auto operator<=>(const Behavior&) const = default;

  std::string to_line() const {
    std::string s;
    for (const auto& [k, v] : regs) {
      if (!s.empty()) s += " ";
      s += "P" + std::to_string(k.first) + ":" + k.second + "=" + std::to_string(v);
    }
    s += " |";
    for (const auto& [c, v] : mem) s += " " + c.str() + "=" + std::to_string(v);
    if (!co_order.empty()) {
      s += " ||";
      for (const auto& [c, ws] : co_order) {
        s += " " + c.str() + ":";
        for (size_t i = 0; i < ws.size(); ++i) {
          if (i) s += ",";
          s += std::to_string(ws[i].first) + "." + std::to_string(ws[i].second);
        }
      }
    }
    return s;
  }
};

struct BehaviorSet {
  std::set<Behavior> set;

  bool operator==(const BehaviorSet&) const = default;

  std::string to_text() const {
    std::string out;
    for (const auto& b : set) out += b.to_line() + "\n";
    return out;
  }
};

/// Set inclusion with a counterexample member of sub when it fails.
inline std::optional<Behavior> included(const BehaviorSet& sub, const BehaviorSet& sup) {
  for (const auto& b : sub.set)
    if (!sup.set.count(b)) return b;
  return std::nullopt;
}

inline bool outcome_holds(const Outcome& o, const Behavior& b) {
  switch (o.kind) {
    case Outcome::Kind::Atom: {
      if (o.is_reg) {
        auto it = b.regs.find({o.tid, o.reg});
        return it != b.regs.end() && it->second == o.val;
      }
      auto it = b.mem.find(o.cell);
      int64_t v = it == b.mem.end() ? 0 : it->second;
      return v == o.val;
    }
    case Outcome::Kind::And: return outcome_holds(*o.lhs, b) && outcome_holds(*o.rhs, b);
    case Outcome::Kind::Or: return outcome_holds(*o.lhs, b) || outcome_holds(*o.rhs, b);
  }
  return false;
}

inline bool outcome_satisfiable(const Outcome& o, const BehaviorSet& bs) {
  for (const auto& b : bs.set)
    if (outcome_holds(o, b)) return true;
  return false;
}

// ---------------------------------------------------------------------------
// Control paths

struct ThreadPath {
  std::vector<int> nodes;  // instruction node ids in execution order
  // taken[k] is meaningful when nodes[k] is a Branch: true = jump taken
  std::vector<bool> taken;
  // a branch whose jump target is its fall-through has no observable
  // direction; such positions are unconstrained
  std::vector<bool> constrained;
};

/// All maximal entry-to-exit paths of each thread. Loops are rejected.
inline std::vector<std::vector<ThreadPath>> control_paths(const Program& p) {
  std::vector<std::vector<ThreadPath>> out;
  for (int tid = 0; tid < p.num_threads(); ++tid) {
    Cfg g = build_cfg(p, tid);
    if (g.has_back_edge())
      throw Error(Errc::LoopDetected, "loop in thread " + p.threads[tid].name);
    std::vector<ThreadPath> paths;
    if (g.entry < 0) {
      paths.push_back({});
      out.push_back(std::move(paths));
      continue;
    }
    std::map<int, int> pos;
    for (size_t k = 0; k < g.order.size(); ++k) pos[g.order[k]] = static_cast<int>(k);

    ThreadPath cur;
    std::function<void(int)> walk = [&](int node) {
      cur.nodes.push_back(node);
      cur.taken.push_back(false);
      cur.constrained.push_back(true);
      const Instruction& in = g.instrs[node];
      if (in.kind == IKind::Branch) {
        // fall-through first, then the jump, for a stable path order
        int fall = -1, jump = -1;
        for (int s : g.succ[node]) {
          if (pos.at(s) == pos.at(node) + 1 && fall < 0) fall = s;
        }
        for (int s : g.succ[node])
          if (s != fall) jump = s;
        if (fall >= 0 && jump < 0) {
          // both directions land on the same node
          cur.constrained.back() = false;
          walk(fall);
        } else {
          if (fall >= 0) {
            cur.taken.back() = false;
            walk(fall);
          }
          if (jump >= 0) {
            cur.taken.back() = true;
            walk(jump);
          }
          if (fall < 0 && jump < 0) paths.push_back(cur);
        }
      } else if (g.succ[node].empty()) {
        paths.push_back(cur);
      } else {
        walk(g.succ[node][0]);
      }
      cur.nodes.pop_back();
      cur.taken.pop_back();
      cur.constrained.pop_back();
    };
    walk(g.entry);
    out.push_back(std::move(paths));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Enumeration options

struct EnumOptions {
  long long max_candidates = 10'000'000;
  long long paths_limit = 10'000;  // control paths per thread
  bool strict_behavior = false;    // include per-cell co order in behaviors
  bool draft_wo = false;           // alternate write-order for ARMv7-mca
};

namespace detail {

// Compiled form of one thread path for fast repeated evaluation.

struct CExpr {
  Expr::Op op;
  int64_t k = 0;
  int reg = -1;
  int lhs = -1, rhs = -1;
};

struct ExprPool {
  std::vector<CExpr> nodes;

  int compile(const ExprPtr& e, std::map<std::string, int>& regs) {
    if (!e) return -1;
    CExpr c;
    c.op = e->op;
    if (e->op == Expr::Op::Const) c.k = e->k;
    else if (e->op == Expr::Op::Reg) c.reg = intern(regs, e->reg);
    else {
      c.lhs = compile(e->lhs, regs);
      c.rhs = compile(e->rhs, regs);
    }
    nodes.push_back(c);
    return static_cast<int>(nodes.size()) - 1;
  }

  static int intern(std::map<std::string, int>& regs, const std::string& name) {
    auto it = regs.find(name);
    if (it != regs.end()) return it->second;
    int id = static_cast<int>(regs.size());
    regs.emplace(name, id);
    return id;
  }

  int64_t eval(int i, const std::vector<int64_t>& regs) const {
    const CExpr& c = nodes[i];
    using Op = Expr::Op;
    switch (c.op) {
      case Op::Const: return c.k;
      case Op::Reg: return regs[c.reg];
      case Op::Add: return eval(c.lhs, regs) + eval(c.rhs, regs);
      case Op::Sub: return eval(c.lhs, regs) - eval(c.rhs, regs);
      case Op::Mul: return eval(c.lhs, regs) * eval(c.rhs, regs);
      case Op::Eq: return eval(c.lhs, regs) == eval(c.rhs, regs);
      case Op::Ne: return eval(c.lhs, regs) != eval(c.rhs, regs);
      case Op::Le: return eval(c.lhs, regs) <= eval(c.rhs, regs);
      case Op::Lt: return eval(c.lhs, regs) < eval(c.rhs, regs);
      case Op::Ge: return eval(c.lhs, regs) >= eval(c.rhs, regs);
      case Op::Gt: return eval(c.lhs, regs) > eval(c.rhs, regs);
    }
    return 0;
  }
};

// One memory access occurrence on a chosen path.
struct Slot {
  int tid = 0;
  int pos = 0;      // position in the thread path
  int node = 0;     // instruction node id
  bool reads = false, writes = false, is_cas = false, is_fetchadd = false;
  int read_slot = -1;   // index into reads list
  int write_slot = -1;  // index into writes list
};

struct CInstr {
  IKind kind;
  Flavor flavor;
  C11 c11;
  int dest = -1;
  int base = -1;  // location base id
  int index = -1, value = -1, expected = -1, newval = -1, cond = -1;
  int slot = -1;  // memory access slot index, -1 otherwise
  int node = -1;
};

struct CThread {
  std::vector<CInstr> code;  // along the path
  std::vector<bool> taken;
  std::vector<bool> constrained;
  ExprPool pool;
  std::map<std::string, int> regs;
  int num_regs() const { return static_cast<int>(regs.size()); }
};

// rf choice per read slot: -1 = initial value, otherwise a write slot index.
constexpr int kFromInit = -1;

struct EvalState {
  bool valid = true;
  std::vector<Cell> cell;        // per slot
  std::vector<int64_t> rval;     // per read slot
  std::vector<int64_t> wval;     // per write slot
  std::vector<bool> active;      // per write slot: write actually happens
  std::vector<std::vector<int64_t>> final_regs;  // per tid
};

}  // namespace detail

/// True when model m can interpret programs of architecture a.
inline bool model_fits_arch(ModelId m, Arch a) {
  switch (m) {
    case ModelId::SC: return true;
    case ModelId::X86:
    case ModelId::X86A: return a == Arch::X86 || a == Arch::SCREF;
    case ModelId::ARMV7:
    case ModelId::ARMV7MCA:
      return a == Arch::ARMv7 || a == Arch::ARMv7MCA || a == Arch::SCREF;
    case ModelId::ARMV8: return a == Arch::ARMv8 || a == Arch::SCREF;
  }
  return false;
}

// ---------------------------------------------------------------------------
// The enumerator

class Enumerator {
 public:
  Enumerator(const Program& p, ModelId model, EnumOptions opts = {})
      : prog_(expand_rmw_flavors(p)), model_(model), opts_(opts) {
    if (!model_fits_arch(model, prog_.arch))
      throw Error(Errc::ArchMismatch, std::string("model ") + model_name(model) +
                                          " cannot interpret arch " + arch_name(prog_.arch));
    paths_ = control_paths(prog_);
    for (const auto& tp : paths_)
      if (static_cast<long long>(tp.size()) > opts_.paths_limit)
        throw Error(Errc::BudgetExceeded,
                    "control path budget exceeded (" + std::to_string(opts_.paths_limit) + ")");
    collect_registers();
    discover_cells();
  }

  /// Expands ARMv8 acquire/release rmw flavors into plain rmw plus fences
  /// before any checking: rmw_A ⇝ rmw;dmbld and rmw_L ⇝ dmbfull;rmw;dmbfull.
  static Program expand_rmw_flavors(const Program& p) {
    if (p.arch != Arch::ARMv8) return p;
    Program q = p;
    for (auto& t : q.threads) {
      std::vector<Instruction> code;
      for (const auto& in : t.code) {
        if (in.kind == IKind::Rmw && in.flavor == Flavor::Acquire) {
          Instruction plain = in;
          plain.flavor = Flavor::Plain;
          code.push_back(plain);
          Instruction f;
          f.kind = IKind::Fence;
          f.flavor = Flavor::DmbLd;
          code.push_back(f);
        } else if (in.kind == IKind::Rmw && in.flavor == Flavor::Release) {
          Instruction f;
          f.kind = IKind::Fence;
          f.flavor = Flavor::DmbFull;
          code.push_back(f);
          Instruction plain = in;
          plain.flavor = Flavor::Plain;
          code.push_back(plain);
          code.push_back(f);
        } else {
          code.push_back(in);
        }
      }
      t.code = std::move(code);
    }
    return q;
  }

  /// Streams every model-consistent execution in a deterministic order.
  void enumerate_executions(const std::function<void(const Execution&, const EvDeps&)>& yield) {
    run(yield, nullptr);
  }

  BehaviorSet behaviors() {
    BehaviorSet bs;
    run(nullptr, &bs);
    return bs;
  }

  const Program& program() const { return prog_; }

  /// Every cell the program can touch (discovered up front); these carry
  /// init events and form the memory domain of behaviors.
  const std::map<Cell, int64_t>& cells() const { return cells_; }

 private:
  // -- setup ----------------------------------------------------------------

  void collect_registers() {
    threads_regs_.resize(prog_.num_threads());
    for (int tid = 0; tid < prog_.num_threads(); ++tid) {
      std::set<std::string> names;
      for (const auto& in : prog_.threads[tid].code) {
        if (!in.dest.empty()) names.insert(in.dest);
        for (const auto& r : in.addr_reads()) names.insert(r);
        for (const auto& r : in.value_reads()) names.insert(r);
      }
      threads_regs_[tid].assign(names.begin(), names.end());
    }
  }

  int intern_base(const std::string& b) {
    auto it = base_ids_.find(b);
    if (it != base_ids_.end()) return it->second;
    int id = static_cast<int>(bases_.size());
    base_ids_[b] = id;
    bases_.push_back(b);
    return id;
  }

  detail::CThread compile_path(int tid, const ThreadPath& path) {
    detail::CThread ct;
    ct.taken = path.taken;
    ct.constrained = path.constrained;
    for (const auto& name : threads_regs_[tid]) detail::ExprPool::intern(ct.regs, name);
    for (int node : path.nodes) {
      const Instruction& in = prog_.threads[tid].code[node];
      detail::CInstr c;
      c.kind = in.kind;
      c.flavor = in.flavor;
      c.c11 = in.c11;
      c.node = node;
      if (!in.dest.empty()) c.dest = detail::ExprPool::intern(ct.regs, in.dest);
      if (in.is_access()) {
        c.base = intern_base(in.loc.base);
        c.index = ct.pool.compile(in.loc.index, ct.regs);
      }
      c.value = ct.pool.compile(in.value, ct.regs);
      c.expected = ct.pool.compile(in.expected, ct.regs);
      c.newval = ct.pool.compile(in.newval, ct.regs);
      c.cond = ct.pool.compile(in.cond, ct.regs);
      ct.code.push_back(c);
    }
    return ct;
  }

  /// Runs a cheap sweep over all path/rf candidates to find every cell the
  /// program can touch, so that init events exist for them. Undeclared cells
  /// start at 0. Programs whose addresses are all static skip the sweep.
  void discover_cells() {
    for (const auto& [cell, v] : prog_.init) cells_[cell] = v;
    bool dynamic = false;
    for (const auto& t : prog_.threads)
      for (const auto& in : t.code)
        if (in.is_access() && in.loc.index && !in.loc.static_cell()) dynamic = true;
    if (!dynamic) return;
    bool more = true;
    while (more) {
      more = false;
      size_t before = cells_.size();
      run(nullptr, nullptr, /*discover=*/true);
      if (cells_.size() != before) more = true;
    }
  }

  // -- main loop --------------------------------------------------------------

  void run(const std::function<void(const Execution&, const EvDeps&)>& yield, BehaviorSet* bs,
           bool discover = false) {
    candidates_ = 0;
    std::vector<size_t> idx(prog_.num_threads(), 0);
    while (true) {
      std::vector<const ThreadPath*> tuple;
      for (int tid = 0; tid < prog_.num_threads(); ++tid) tuple.push_back(&paths_[tid][idx[tid]]);
      run_tuple(tuple, yield, bs, discover);

      int t = prog_.num_threads() - 1;
      while (t >= 0) {
        if (++idx[t] < paths_[t].size()) break;
        idx[t] = 0;
        --t;
      }
      if (t < 0) break;
    }
  }

  void run_tuple(const std::vector<const ThreadPath*>& tuple,
                 const std::function<void(const Execution&, const EvDeps&)>& yield,
                 BehaviorSet* bs, bool discover) {
    int ntids = prog_.num_threads();
    std::vector<detail::CThread> cts;
    std::vector<detail::Slot> slots;
    std::vector<int> read_slots, write_slots;
    for (int tid = 0; tid < ntids; ++tid) {
      cts.push_back(compile_path(tid, *tuple[tid]));
      auto& ct = cts.back();
      for (size_t pos = 0; pos < ct.code.size(); ++pos) {
        auto& ci = ct.code[pos];
        if (ci.kind != IKind::Load && ci.kind != IKind::Store && ci.kind != IKind::Rmw) continue;
        detail::Slot s;
        s.tid = tid;
        s.pos = static_cast<int>(pos);
        s.node = ci.node;
        const Instruction& in = prog_.threads[tid].code[ci.node];
        s.reads = in.reads_memory();
        s.writes = in.writes_memory();
        s.is_cas = in.is_cas();
        s.is_fetchadd = in.kind == IKind::Rmw && !in.is_cas();
        if (s.reads) {
          s.read_slot = static_cast<int>(read_slots.size());
          read_slots.push_back(static_cast<int>(slots.size()));
        }
        if (s.writes) {
          s.write_slot = static_cast<int>(write_slots.size());
          write_slots.push_back(static_cast<int>(slots.size()));
        }
        ci.slot = static_cast<int>(slots.size());
        slots.push_back(s);
      }
    }

    int nreads = static_cast<int>(read_slots.size());
    int nwrites = static_cast<int>(write_slots.size());

    // per-read rf candidates: the initial value plus may-aliasing writes
    std::vector<std::vector<int>> cands(nreads);
    for (int r = 0; r < nreads; ++r) {
      cands[r].push_back(detail::kFromInit);
      const detail::Slot& rs = slots[read_slots[r]];
      const LocExpr& rloc = prog_.threads[rs.tid].code[rs.node].loc;
      for (int w = 0; w < nwrites; ++w) {
        const detail::Slot& ws = slots[write_slots[w]];
        if (may_alias(rloc, prog_.threads[ws.tid].code[ws.node].loc)) cands[r].push_back(w);
      }
    }

    // rf odometer over the candidate lists
    std::vector<int> pick(nreads, 0);
    std::vector<int> rf(nreads, detail::kFromInit);
    while (true) {
      for (int r = 0; r < nreads; ++r) rf[r] = cands[r][pick[r]];
      detail::EvalState st = evaluate(cts, slots, read_slots, write_slots, rf, discover);
      if (st.valid && !discover) emit_candidates(cts, slots, read_slots, write_slots, rf, st, yield, bs);
      if (discover) bump(1);

      int k = nreads - 1;
      while (k >= 0) {
        if (++pick[k] < static_cast<int>(cands[k].size())) break;
        pick[k] = 0;
        --k;
      }
      if (k < 0) break;
    }
  }

  void bump(long long n) {
    candidates_ += n;
    if (candidates_ > opts_.max_candidates)
      throw Error(Errc::BudgetExceeded,
                  "candidate budget exceeded (" + std::to_string(opts_.max_candidates) + ")");
  }

  // -- evaluation -------------------------------------------------------------

  detail::EvalState evaluate(const std::vector<detail::CThread>& cts,
                             const std::vector<detail::Slot>& slots,
                             const std::vector<int>& read_slots,
                             const std::vector<int>& write_slots, const std::vector<int>& rf,
                             bool discover) {
    int nslots = static_cast<int>(slots.size());
    detail::EvalState st;
    st.cell.resize(nslots);
    st.rval.assign(read_slots.size(), 0);
    st.wval.assign(write_slots.size(), 0);
    st.active.assign(write_slots.size(), false);
    st.final_regs.resize(cts.size());

    auto run_pass = [&](bool validate) {
      for (size_t tid = 0; tid < cts.size(); ++tid) {
        const detail::CThread& ct = cts[tid];
        std::vector<int64_t> regs(ct.num_regs(), 0);
        for (size_t pos = 0; pos < ct.code.size(); ++pos) {
          const detail::CInstr& ci = ct.code[pos];
          switch (ci.kind) {
            case IKind::RegOp:
              regs[ci.dest] = ct.pool.eval(ci.value, regs);
              break;
            case IKind::Branch: {
              bool want = ct.taken[pos];
              bool got = ct.pool.eval(ci.cond, regs) != 0;
              if (validate && ct.constrained[pos] && want != got) st.valid = false;
              break;
            }
            case IKind::Load:
            case IKind::Store:
            case IKind::Rmw: {
              const detail::Slot& s = slots[ci.slot];
              Cell cell{bases_[ci.base], std::nullopt};
              if (ci.index >= 0) cell.index = ct.pool.eval(ci.index, regs);
              st.cell[ci.slot] = cell;
              if (discover && !cells_.count(cell)) cells_[cell] = 0;
              if (s.reads) {
                int64_t v;
                if (rf[s.read_slot] == detail::kFromInit) {
                  auto itc = cells_.find(cell);
                  v = itc == cells_.end() ? 0 : itc->second;
                } else {
                  v = st.wval[rf[s.read_slot]];
                }
                st.rval[s.read_slot] = v;
                regs[ci.dest] = v;
              }
              if (s.writes) {
                if (s.is_cas) {
                  bool success = st.rval[s.read_slot] == ct.pool.eval(ci.expected, regs);
                  st.active[s.write_slot] = success;
                  st.wval[s.write_slot] = ct.pool.eval(ci.newval, regs);
                } else if (s.is_fetchadd) {
                  st.active[s.write_slot] = true;
                  st.wval[s.write_slot] =
                      st.rval[s.read_slot] + ct.pool.eval(ci.newval, regs);
                } else {
                  st.active[s.write_slot] = true;
                  st.wval[s.write_slot] = ct.pool.eval(ci.value, regs);
                }
              }
              break;
            }
            default: break;
          }
        }
        st.final_regs[tid] = std::move(regs);
      }
    };

    // Values flow along an acyclic dataflow in at most #slots passes.
    // Candidates whose values never ground out (an rf cycle feeding itself)
    // settle at the fixpoint reached from zero; every model here rejects
    // such executions independently of the chosen values, so nothing is lost.
    int passes = nslots + 2;
    std::vector<int64_t> prev_rval, prev_wval;
    bool stable = false;
    for (int it = 0; it < passes && !stable; ++it) {
      prev_rval = st.rval;
      prev_wval = st.wval;
      run_pass(false);
      stable = (st.rval == prev_rval && st.wval == prev_wval);
    }
    run_pass(true);  // validation against the settled values
    if (!st.valid) return st;

    // rf well-formedness: source exists, same cell, value consistent
    for (size_t r = 0; r < read_slots.size(); ++r) {
      const detail::Slot& rs = slots[read_slots[r]];
      if (rf[r] == detail::kFromInit) {
        // reading the initial value: no earlier active same-cell write
        // in the same thread (coherence would be violated otherwise)
        for (size_t w = 0; w < write_slots.size(); ++w) {
          const detail::Slot& ws = slots[write_slots[w]];
          if (st.active[w] && ws.tid == rs.tid && ws.pos < rs.pos &&
              st.cell[write_slots[w]] == st.cell[read_slots[r]]) {
            st.valid = false;
            return st;
          }
        }
        continue;
      }
      const detail::Slot& ws = slots[write_slots[rf[r]]];
      if (!st.active[rf[r]] || st.cell[write_slots[rf[r]]] != st.cell[read_slots[r]] ||
          st.wval[rf[r]] != st.rval[r]) {
        st.valid = false;
        return st;
      }
      if (ws.tid == rs.tid) {
        // same-thread rf must be po-forward with no intervening same-cell write
        if (!(ws.pos < rs.pos)) {
          st.valid = false;
          return st;
        }
        for (size_t w2 = 0; w2 < write_slots.size(); ++w2) {
          const detail::Slot& mid = slots[write_slots[w2]];
          if (st.active[w2] && mid.tid == rs.tid && ws.pos < mid.pos && mid.pos < rs.pos &&
              st.cell[write_slots[w2]] == st.cell[read_slots[r]]) {
            st.valid = false;
            return st;
          }
        }
      }
      // an rmw may not read from its own write
      if (read_slots[r] == write_slots[rf[r]]) {
        st.valid = false;
        return st;
      }
    }
    return st;
  }

  // -- candidate construction ---------------------------------------------------

  void emit_candidates(const std::vector<detail::CThread>& cts,
                       const std::vector<detail::Slot>& slots,
                       const std::vector<int>& read_slots, const std::vector<int>& write_slots,
                       const std::vector<int>& rf, const detail::EvalState& st,
                       const std::function<void(const Execution&, const EvDeps&)>& yield,
                       BehaviorSet* bs) {
    // x86 executions use update events; x86A (and the ARM models) work on
    // rmw pairs instead
    bool uform = prog_.arch == Arch::X86 && model_ != ModelId::X86A;

    // event skeleton
    std::vector<Event> events;
    std::map<Cell, int> init_event;
    for (const auto& [cell, v] : cells_) {
      Event e;
      e.id = static_cast<int>(events.size());
      e.tid = kInitTid;
      e.op = Op::W;
      e.loc = cell;
      e.wval = v;
      init_event[cell] = e.id;
      events.push_back(e);
    }
    int nslots = static_cast<int>(slots.size());
    std::vector<int> rev(nslots, -1), wev(nslots, -1);
    for (int si = 0; si < nslots; ++si) {
      const detail::Slot& s = slots[si];
      const Instruction& in = prog_.threads[s.tid].code[s.node];
      bool write_active = s.writes && st.active[s.write_slot];
      Event e;
      e.tid = s.tid;
      e.loc = st.cell[si];
      e.flavor = in.flavor;
      e.c11 = in.c11;
      e.instr = s.node;
      if (uform && s.reads && write_active) {
        e.op = Op::U;
        e.rval = st.rval[s.read_slot];
        e.wval = st.wval[s.write_slot];
        e.id = static_cast<int>(events.size());
        rev[si] = wev[si] = e.id;
        events.push_back(e);
        continue;
      }
      if (s.reads) {
        Event r = e;
        r.op = Op::R;
        r.rval = st.rval[s.read_slot];
        r.id = static_cast<int>(events.size());
        rev[si] = r.id;
        events.push_back(r);
      }
      if (write_active) {
        Event w = e;
        w.op = Op::W;
        w.wval = st.wval[s.write_slot];
        w.id = static_cast<int>(events.size());
        wev[si] = w.id;
        events.push_back(w);
      }
    }
    // fence events
    std::vector<std::vector<int>> tid_events(cts.size());
    std::vector<std::vector<int>> fence_events(cts.size());
    for (size_t tid = 0; tid < cts.size(); ++tid) {
      for (size_t pos = 0; pos < cts[tid].code.size(); ++pos) {
        const detail::CInstr& ci = cts[tid].code[pos];
        if (ci.kind == IKind::Fence && ci.flavor != Flavor::Isb) {
          Event f;
          f.id = static_cast<int>(events.size());
          f.tid = static_cast<int>(tid);
          f.op = Op::F;
          f.flavor = ci.flavor;
          f.instr = ci.node;
          events.push_back(f);
          tid_events[tid].push_back(f.id);
        } else if (ci.slot >= 0) {
          if (rev[ci.slot] >= 0) tid_events[tid].push_back(rev[ci.slot]);
          if (wev[ci.slot] >= 0 && wev[ci.slot] != rev[ci.slot])
            tid_events[tid].push_back(wev[ci.slot]);
        }
      }
    }

    int n = static_cast<int>(events.size());
    Execution x;
    x.events = events;
    x.po = Relation(n);
    x.rf = Relation(n);
    x.co = Relation(n);
    x.rmw = Relation(n);
    for (const auto& evs : tid_events)
      for (size_t i = 0; i < evs.size(); ++i)
        for (size_t j = i + 1; j < evs.size(); ++j) x.po.insert(evs[i], evs[j]);

    for (size_t r = 0; r < read_slots.size(); ++r) {
      int tgt = rev[read_slots[r]];
      int src = rf[r] == detail::kFromInit ? init_event.at(st.cell[read_slots[r]])
                                           : wev[write_slots[rf[r]]];
      x.rf.insert(src, tgt);
    }
    if (!uform) {
      for (int si = 0; si < nslots; ++si)
        if (slots[si].reads && slots[si].writes && wev[si] >= 0) x.rmw.insert(rev[si], wev[si]);
    }

    // dependencies on this path (pair-form archs only need them)
    EvDeps deps = path_deps(cts, slots, rev, wev, tid_events, n);

    // co enumeration: per-cell linear extensions of the po order on writes
    std::map<Cell, std::vector<int>> cell_writes;  // active write events per cell
    for (int si = 0; si < nslots; ++si)
      if (wev[si] >= 0) cell_writes[st.cell[si]].push_back(wev[si]);

    std::vector<std::pair<Cell, std::vector<std::vector<int>>>> cell_orders;
    for (auto& [cell, ws] : cell_writes) {
      std::vector<std::vector<int>> orders;
      std::vector<int> cur;
      std::vector<bool> used(ws.size(), false);
      std::function<void()> rec = [&]() {
        if (cur.size() == ws.size()) {
          orders.push_back(cur);
          return;
        }
        for (size_t i = 0; i < ws.size(); ++i) {
          if (used[i]) continue;
          bool ok = true;
          // respect po between same-cell writes
          for (size_t j = 0; j < ws.size(); ++j)
            if (!used[j] && j != i && x.po.contains(ws[j], ws[i])) ok = false;
          if (!ok) continue;
          used[i] = true;
          cur.push_back(ws[i]);
          rec();
          cur.pop_back();
          used[i] = false;
        }
      };
      rec();
      cell_orders.emplace_back(cell, std::move(orders));
    }

    std::vector<size_t> oidx(cell_orders.size(), 0);
    while (true) {
      bump(1);
      x.co = Relation(n);
      for (const auto& [cell, id] : init_event) {
        // init write precedes every same-cell write; init writes of other
        // cells are unrelated
        auto it = cell_writes.find(cell);
        if (it == cell_writes.end()) continue;
        for (int w : it->second) x.co.insert(id, w);
      }
      for (size_t c = 0; c < cell_orders.size(); ++c) {
        const auto& order = cell_orders[c].second[oidx[c]];
        for (size_t i = 0; i < order.size(); ++i)
          for (size_t j = i + 1; j < order.size(); ++j) x.co.insert(order[i], order[j]);
      }

      check_and_emit(x, deps, st, yield, bs);

      int c = static_cast<int>(cell_orders.size()) - 1;
      while (c >= 0) {
        if (++oidx[c] < cell_orders[c].second.size()) break;
        oidx[c] = 0;
        --c;
      }
      if (c < 0) break;
    }
  }

  void check_and_emit(Execution& x, const EvDeps& deps, const detail::EvalState& st,
                      const std::function<void(const Execution&, const EvDeps&)>& yield,
                      BehaviorSet* bs) {
    switch (model_) {
      case ModelId::SC:
        if (!check_sc(x).consistent) return;
        break;
      case ModelId::X86A:
        if (!check_x86a(x).consistent) return;
        break;
      case ModelId::ARMV7:
        if (!check_armv7(x, deps).consistent) return;
        break;
      case ModelId::ARMV7MCA:
        if (!check_armv7mca(x, deps, opts_.draft_wo).consistent) return;
        break;
      case ModelId::ARMV8:
        if (!check_armv8(x, deps).consistent) return;
        break;
      case ModelId::X86: {
        // stream: every mo linear extension that passes the axioms;
        // behaviors: one witness mo decides consistency
        if (yield) {
          enumerate_mo(x, [&](const Relation& mo) {
            x.mo = mo;
            if (check_x86(x).consistent) yield(x, deps);
          });
          x.mo.reset();
          return;
        }
        auto mo = witness_mo(x);
        if (!mo) return;
        x.mo = *mo;
        if (!check_x86(x).consistent) {
          // the unit-propagation shortcut is validated by tests; fall back
          // to the exhaustive stream if it ever disagrees
          bool found = false;
          enumerate_mo(x, [&](const Relation& m) {
            if (found) return;
            x.mo = m;
            if (check_x86(x).consistent) found = true;
          });
          if (!found) {
            x.mo.reset();
            return;
          }
        }
        break;
      }
    }
    if (yield) yield(x, deps);
    if (bs) bs->set.insert(behavior_of(x, st));
    if (model_ == ModelId::X86) x.mo.reset();
  }

  // -- x86 mo ---------------------------------------------------------------

  /// All strict total orders over W ∪ U ∪ F extending co, in lexicographic
  /// order of event id. Init writes come first, mirroring co.
  void enumerate_mo(const Execution& x, const std::function<void(const Relation&)>& f) {
    std::vector<int> inits, members;
    for (const auto& e : x.events) {
      if (!(e.writes() || e.op == Op::F)) continue;
      (e.is_init() ? inits : members).push_back(e.id);
    }
    int m = static_cast<int>(members.size());
    std::vector<int> order;
    std::vector<bool> used(m, false);
    std::function<void()> rec = [&]() {
      if (static_cast<int>(order.size()) == m) {
        bump(1);
        Relation mo(x.size());
        for (size_t i = 0; i < inits.size(); ++i) {
          for (size_t j = i + 1; j < inits.size(); ++j) mo.insert(inits[i], inits[j]);
          for (int b : members) mo.insert(inits[i], b);
        }
        for (size_t i = 0; i < order.size(); ++i)
          for (size_t j = i + 1; j < order.size(); ++j) mo.insert(order[i], order[j]);
        f(mo);
        return;
      }
      for (int i = 0; i < m; ++i) {
        if (used[i]) continue;
        bool ok = true;
        for (int j = 0; j < m; ++j)
          if (!used[j] && j != i && x.co.contains(members[j], members[i])) ok = false;
        if (!ok) continue;
        used[i] = true;
        order.push_back(members[i]);
        rec();
        order.pop_back();
        used[i] = false;
      }
    };
    rec();
  }

  /// Decides whether some valid mo exists, returning one witness. All mo
  /// constraints in the axioms are unit clauses, so the forced-edge digraph
  /// is acyclic iff a valid mo exists; any topological completion works.
  std::optional<Relation> witness_mo(const Execution& x) {
    Relation xhb = tclosure(x.po | x.rf);
    if (!is_irreflexive(xhb)) return std::nullopt;
    Relation fr = derive_fr(x);
    Relation rfe = external_part(x.rf, x);
    int n = x.size();
    EventSet wuf(n);
    for (const auto& e : x.events)
      if (e.writes() || e.op == Op::F) wuf.insert(e.id);

    Relation forced = x.co;
    // init writes come first in mo
    for (const auto& ea : x.events) {
      if (!ea.is_init()) continue;
      for (const auto& eb : x.events)
        if (eb.id != ea.id && wuf.contains(eb.id) && (!eb.is_init() || eb.id > ea.id))
          forced.insert(ea.id, eb.id);
    }
    // irrMOHB: xhb-ordered members must agree with mo
    for (int a = 0; a < n; ++a) {
      if (!wuf.contains(a)) continue;
      for (int b : xhb.row_elements(a))
        if (wuf.contains(b)) forced.insert(a, b);
    }
    // irrFRMO: fr(a,b) with a ∈ U forces mo(a,b)
    for (auto [a, b] : fr.pairs())
      if (x.events[a].op == Op::U) forced.insert(a, b);
    // irrFMRP: fr(a,b) ∧ rfe(c,d) ∧ po(d,a) forbids mo(b,c)
    for (auto [a, b] : fr.pairs())
      for (auto [c, d] : rfe.pairs())
        if (x.po.contains(d, a) && b != c) forced.insert(c, b);
    // irrUF: fr(a,b) ∧ c ∈ U∪F ∧ po(c,a) forbids mo(b,c)
    for (auto [a, b] : fr.pairs())
      for (const auto& ec : x.events)
        if ((ec.op == Op::U || ec.op == Op::F) && x.po.contains(ec.id, a) && b != ec.id)
          forced.insert(ec.id, b);

    Relation closed = tclosure(forced);
    if (!is_irreflexive(closed)) return std::nullopt;

    // lexicographically smallest topological completion
    std::vector<int> members = wuf.elements();
    Relation mo(n);
    std::vector<int> order;
    std::vector<bool> used(members.size(), false);
    for (size_t step = 0; step < members.size(); ++step) {
      for (size_t i = 0; i < members.size(); ++i) {
        if (used[i]) continue;
        bool minimal = true;
        for (size_t j = 0; j < members.size(); ++j)
          if (!used[j] && j != i && closed.contains(members[j], members[i])) minimal = false;
        if (minimal) {
          used[i] = true;
          order.push_back(members[i]);
          break;
        }
      }
    }
    for (size_t i = 0; i < order.size(); ++i)
      for (size_t j = i + 1; j < order.size(); ++j) mo.insert(order[i], order[j]);
    return mo;
  }

  // -- per-path dependencies --------------------------------------------------

  EvDeps path_deps(const std::vector<detail::CThread>& cts, const std::vector<detail::Slot>& slots,
                   const std::vector<int>& rev, const std::vector<int>& wev,
                   const std::vector<std::vector<int>>& tid_events, int n) {
    EvDeps deps(n);
    for (size_t tid = 0; tid < cts.size(); ++tid) {
      const detail::CThread& ct = cts[tid];
      int nregs = ct.num_regs();
      // taint[r] = set of read events whose value flows into register r
      std::vector<std::set<int>> taint(nregs);

      struct BranchRec {
        size_t pos;
        std::set<int> taints;
      };
      std::vector<BranchRec> branches;
      std::vector<size_t> isb_positions;
      // (read event, position of the addr-dependent access) for addr;po;[isb]
      std::vector<std::pair<int, size_t>> addr_sites;

      auto expr_taints = [&](int e, const detail::ExprPool& pool, std::set<int>& out) {
        std::function<void(int)> go = [&](int i) {
          if (i < 0) return;
          const detail::CExpr& c = pool.nodes[i];
          if (c.op == Expr::Op::Reg) {
            out.insert(taint[c.reg].begin(), taint[c.reg].end());
          } else {
            go(c.lhs);
            go(c.rhs);
          }
        };
        go(e);
      };

      for (size_t pos = 0; pos < ct.code.size(); ++pos) {
        const detail::CInstr& ci = ct.code[pos];
        if (ci.kind == IKind::Fence && ci.flavor == Flavor::Isb) {
          isb_positions.push_back(pos);
          continue;
        }
        if (ci.kind == IKind::Branch) {
          std::set<int> t;
          expr_taints(ci.cond, ct.pool, t);
          if (!t.empty()) branches.push_back({pos, t});
          continue;
        }
        if (ci.kind == IKind::RegOp) {
          std::set<int> t;
          expr_taints(ci.value, ct.pool, t);
          taint[ci.dest] = t;
          continue;
        }
        if (ci.slot < 0) continue;
        const detail::Slot& s = slots[ci.slot];

        std::set<int> at, dt;
        expr_taints(ci.index, ct.pool, at);
        if (s.writes) {
          expr_taints(ci.value, ct.pool, dt);
          expr_taints(ci.expected, ct.pool, dt);
          expr_taints(ci.newval, ct.pool, dt);
        }
        for (int src : at) {
          if (rev[ci.slot] >= 0) deps.addr.insert(src, rev[ci.slot]);
          if (wev[ci.slot] >= 0) deps.addr.insert(src, wev[ci.slot]);
          addr_sites.push_back({src, pos});
        }
        if (wev[ci.slot] >= 0)
          for (int src : dt) deps.data.insert(src, wev[ci.slot]);

        // ctrl from every earlier tainted branch; ctrl_isb when an isb sits
        // between the branch and this instruction
        for (const auto& br : branches) {
          for (int src : br.taints) {
            if (rev[ci.slot] >= 0) deps.ctrl.insert(src, rev[ci.slot]);
            if (wev[ci.slot] >= 0) deps.ctrl.insert(src, wev[ci.slot]);
          }
          bool isb_between = false;
          for (size_t ip : isb_positions)
            if (ip > br.pos && ip < pos) isb_between = true;
          if (isb_between)
            for (int src : br.taints) {
              if (rev[ci.slot] >= 0) deps.ctrl_isb.insert(src, rev[ci.slot]);
              if (wev[ci.slot] >= 0) deps.ctrl_isb.insert(src, wev[ci.slot]);
            }
        }
        // addr;po;[isb];po: an isb after an address-dependent access
        for (const auto& [src, apos] : addr_sites) {
          bool isb_between = false;
          for (size_t ip : isb_positions)
            if (ip > apos && ip < pos) isb_between = true;
          if (isb_between) {
            if (rev[ci.slot] >= 0) deps.addr_isb.insert(src, rev[ci.slot]);
            if (wev[ci.slot] >= 0) deps.addr_isb.insert(src, wev[ci.slot]);
          }
        }

        if (s.reads && rev[ci.slot] >= 0) taint[ci.dest] = {rev[ci.slot]};
      }
    }
    (void)tid_events;
    return deps;
  }

  // -- behaviors ----------------------------------------------------------------

  Behavior behavior_of(const Execution& x, const detail::EvalState& st) {
    Behavior b;
    for (int tid = 0; tid < prog_.num_threads(); ++tid) {
      // final_regs is indexed by the interned order, which follows the
      // sorted register-name list used at compile time
      const auto& names = threads_regs_[tid];
      for (size_t i = 0; i < names.size(); ++i)
        b.regs[{tid, names[i]}] = st.final_regs[tid].size() > i ? st.final_regs[tid][i] : 0;
    }
    for (const auto& [cell, v] : cells_) b.mem[cell] = v;
    // overwrite with co-maximal writes
    for (const auto& e : x.events) {
      if (!e.writes() || e.is_init()) continue;
      bool maximal = true;
      for (int succ : x.co.row_elements(e.id)) {
        (void)succ;
        maximal = false;
        break;
      }
      if (maximal) b.mem[e.loc] = e.wval;
    }
    if (opts_.strict_behavior) {
      std::map<Cell, std::vector<int>> order;
      for (const auto& e : x.events) {
        if (!e.writes() || e.is_init()) continue;
        order[e.loc].push_back(e.id);
      }
      for (auto& [cell, ws] : order) {
        std::sort(ws.begin(), ws.end(), [&](int a, int b) { return x.co.contains(a, b); });
        std::vector<std::pair<int, int>> seq;
        for (int w : ws) {
          const Event& e = x.events[w];
          int ordinal = 0;
          for (int node = 0; node < e.instr; ++node)
            if (prog_.threads[e.tid].code[node].writes_memory()) ordinal++;
          seq.push_back({e.tid, ordinal});
        }
        b.co_order[cell] = std::move(seq);
      }
    }
    return b;
  }

  Program prog_;
  ModelId model_;
  EnumOptions opts_;
  std::vector<std::vector<ThreadPath>> paths_;
  std::vector<std::vector<std::string>> threads_regs_;
  std::map<std::string, int> base_ids_;
  std::vector<std::string> bases_;
  std::map<Cell, int64_t> cells_;
  long long candidates_ = 0;
};

// ---------------------------------------------------------------------------
// Convenience entry points

inline BehaviorSet behaviors(const Program& p, ModelId m, EnumOptions opts = {}) {
  return Enumerator(p, m, opts).behaviors();
}

inline void enumerate_executions(const Program& p, ModelId m,
                                 const std::function<void(const Execution&, const EvDeps&)>& f,
                                 EnumOptions opts = {}) {
  Enumerator(p, m, opts).enumerate_executions(f);
}

/// Relabels a program's architecture; every instruction must stay legal.
inline Program reinterpret_arch(const Program& p, Arch arch) {
  Program q = p;
  q.arch = arch;
  for (const auto& t : q.threads)
    for (const auto& in : t.code)
      if (!legal_for_arch(in, arch))
        throw Error(Errc::ArchMismatch, "instruction illegal for " + std::string(arch_name(arch)));
  return q;
}

}  // namespace remap

#endif  // REMAP_ENUMERATE_HPP_
