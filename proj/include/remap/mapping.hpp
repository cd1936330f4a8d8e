#ifndef REMAP_MAPPING_HPP_
#define REMAP_MAPPING_HPP_

#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "remap/enumerate.hpp"
#include "remap/litmus.hpp"

namespace remap {

// ---------------------------------------------------------------------------
// Mapping schemes
//
// A scheme is an ordered rewrite table from source instruction patterns to
// target element sequences. Patterns:
//   ld ldA st stL rmw rmwA rmwL mfence dmb dmbfull dmbld dmbst isb
//   ld.na ld.at st.na st.at         (c11-aware splits)
// Elements:
//   acc accA accL                   (the access, with the given flavor)
//   mfence dmb dmbfull dmbld dmbst isb
//   cbisb                           (cmp;bc;isb keyed on the access register)

struct MappingScheme {
  std::string name;
  Arch from = Arch::X86;
  Arch to = Arch::ARMv8;
  bool c11_aware = false;
  std::map<std::string, std::vector<std::string>> rules;
};

namespace detail {

inline std::string pattern_of(const Instruction& in, bool c11_aware) {
  switch (in.kind) {
    case IKind::Load:
      if (in.flavor == Flavor::Acquire) return "ldA";
      if (c11_aware) return in.c11 == C11::NA ? "ld.na" : "ld.at";
      return "ld";
    case IKind::Store:
      if (in.flavor == Flavor::Release) return "stL";
      if (c11_aware) return in.c11 == C11::NA ? "st.na" : "st.at";
      return "st";
    case IKind::Rmw:
      if (in.flavor == Flavor::Acquire) return "rmwA";
      if (in.flavor == Flavor::Release) return "rmwL";
      return "rmw";
    case IKind::Fence: return fence_name(in.flavor);
    default: return "";
  }
}

inline std::optional<Flavor> fence_flavor(const std::string& s) {
  if (s == "mfence") return Flavor::Mfence;
  if (s == "dmb") return Flavor::Dmb;
  if (s == "dmbfull") return Flavor::DmbFull;
  if (s == "dmbld") return Flavor::DmbLd;
  if (s == "dmbst") return Flavor::DmbSt;
  if (s == "isb") return Flavor::Isb;
  return std::nullopt;
}

}  // namespace detail

/// Rewrites a program instruction by instruction. Thread and branch
/// structure is preserved; labels and branches pass through unchanged.
inline Program map_program(const Program& p, const MappingScheme& s) {
  if (p.arch != s.from)
    throw Error(Errc::ArchMismatch, "program arch " + std::string(arch_name(p.arch)) +
                                        " does not match scheme source " +
                                        std::string(arch_name(s.from)));
  Program out;
  out.arch = s.to;
  out.init = p.init;
  out.outcome = p.outcome;
  for (int tid = 0; tid < p.num_threads(); ++tid) {
    Thread t;
    t.name = p.threads[tid].name;
    int fresh = 0;
    for (const auto& in : p.threads[tid].code) {
      if (in.kind == IKind::Branch || in.kind == IKind::Label || in.kind == IKind::RegOp) {
        t.code.push_back(in);
        continue;
      }
      if (s.c11_aware && in.is_access() && in.c11 == C11::None)
        throw Error(Errc::MissingC11Annotation,
                    "c11-aware scheme needs annotated accesses");
      std::string pat = detail::pattern_of(in, s.c11_aware);
      auto rule = s.rules.find(pat);
      std::vector<std::string> elements;
      if (rule != s.rules.end()) {
        elements = rule->second;
      } else if (pat == "rmwA" || pat == "rmwL") {
        // flavored rmw without a dedicated row expands first:
        // rmw_A ⇝ rmw;dmbld and rmw_L ⇝ dmbfull;rmw;dmbfull, then each
        // piece maps through the scheme's own rules
        auto piece = [&](const std::string& k) -> const std::vector<std::string>& {
          auto it = s.rules.find(k);
          if (it == s.rules.end())
            throw Error(Errc::UnmappableInstruction, "no rule for pattern '" + k + "'");
          return it->second;
        };
        if (pat == "rmwA") {
          elements = piece("rmw");
          for (const auto& e : piece("dmbld")) elements.push_back(e);
        } else {
          elements = piece("dmbfull");
          for (const auto& e : piece("rmw")) elements.push_back(e);
          for (const auto& e : piece("dmbfull")) elements.push_back(e);
        }
      } else {
        throw Error(Errc::UnmappableInstruction, "no rule for pattern '" + pat + "'");
      }
      for (const std::string& el : elements) {
        if (el == "acc" || el == "accA" || el == "accL") {
          Instruction acc = in;
          acc.flavor = el == "accA"   ? Flavor::Acquire
                       : el == "accL" ? Flavor::Release
                                      : Flavor::Plain;
          t.code.push_back(acc);
        } else if (el == "cbisb") {
          // cmp;bc;isb — a branch on the access register followed by isb,
          // both directions landing on the same label
          if (in.dest.empty())
            throw Error(Errc::UnmappableInstruction, "cbisb needs a destination register");
          std::string lbl = "cb" + std::to_string(tid) + "_" + std::to_string(fresh++);
          Instruction br;
          br.kind = IKind::Branch;
          br.cond = Expr::binary(Expr::Op::Eq, Expr::regref(in.dest), Expr::regref(in.dest));
          br.target = lbl;
          t.code.push_back(br);
          Instruction lab;
          lab.kind = IKind::Label;
          lab.label = lbl;
          t.code.push_back(lab);
          Instruction isb;
          isb.kind = IKind::Fence;
          isb.flavor = Flavor::Isb;
          t.code.push_back(isb);
        } else if (auto f = detail::fence_flavor(el)) {
          Instruction fence;
          fence.kind = IKind::Fence;
          fence.flavor = *f;
          t.code.push_back(fence);
        } else {
          throw Error(Errc::UnmappableInstruction, "unknown rule element '" + el + "'");
        }
      }
    }
    out.threads.push_back(std::move(t));
  }
  for (const auto& t : out.threads)
    for (const auto& in : t.code)
      if (!legal_for_arch(in, out.arch))
        throw Error(Errc::UnmappableInstruction,
                    "rule emits an instruction illegal for " + std::string(arch_name(out.arch)));
  return out;
}

// ---------------------------------------------------------------------------
// The shipped schemes

inline MappingScheme scheme_x86_to_armv8() {
  return {"x86-to-armv8",
          Arch::X86,
          Arch::ARMv8,
          false,
          {{"ld", {"acc", "dmbld"}},
           {"st", {"dmbst", "acc"}},
           {"rmw", {"dmbfull", "acc", "dmbfull"}},
           {"mfence", {"dmbfull"}}}};
}

inline MappingScheme scheme_c11_x86_to_armv8() {
  return {"c11-x86-to-armv8",
          Arch::X86,
          Arch::ARMv8,
          true,
          {{"ld.na", {"acc"}},
           {"ld.at", {"acc", "dmbld"}},
           {"st.na", {"acc"}},
           {"st.at", {"dmbfull", "acc"}},
           {"rmw", {"dmbfull", "acc", "dmbfull"}},
           {"mfence", {"dmbfull"}}}};
}

inline MappingScheme scheme_armv8_to_x86() {
  return {"armv8-to-x86",
          Arch::ARMv8,
          Arch::X86,
          false,
          {{"ld", {"acc"}},
           {"ldA", {"acc"}},
           {"st", {"acc"}},
           {"stL", {"acc", "mfence"}},
           {"rmw", {"acc"}},
           {"dmbfull", {"mfence"}},
           {"dmbld", {}},
           {"dmbst", {}},
           {"isb", {}}}};
}

inline MappingScheme scheme_armv7_to_armv8(Arch from = Arch::ARMv7) {
  return {"armv7-to-armv8",
          from,
          Arch::ARMv8,
          false,
          {{"ld", {"acc"}},
           {"st", {"acc"}},
           {"rmw", {"acc"}},
           {"dmb", {"dmbfull"}},
           {"isb", {"isb"}}}};
}

inline MappingScheme scheme_armv8_to_armv7(Arch to = Arch::ARMv7) {
  MappingScheme s{"armv8-to-armv7",
                  Arch::ARMv8,
                  to,
                  false,
                  {{"ld", {"acc", "dmb"}},
                   {"ldA", {"acc", "dmb"}},
                   {"st", {"acc"}},
                   {"stL", {"dmb", "acc", "dmb"}},
                   {"rmw", {"acc", "dmb"}},
                   {"rmwA", {"acc", "dmb"}},
                   {"rmwL", {"dmb", "acc", "dmb"}},
                   {"dmbfull", {"dmb"}},
                   {"dmbld", {"dmb"}},
                   {"dmbst", {"dmb"}},
                   {"isb", {"isb"}}}};
  return s;
}

inline MappingScheme scheme_c11_armv8_to_armv7(Arch to = Arch::ARMv7) {
  MappingScheme s = scheme_armv8_to_armv7(to);
  s.name = "c11-armv8-to-armv7";
  s.c11_aware = true;
  s.rules.erase("ld");
  s.rules["ld.na"] = {"acc"};
  s.rules["ld.at"] = {"acc", "dmb"};
  s.rules.erase("st");
  s.rules["st.na"] = {"acc"};
  s.rules["st.at"] = {"acc"};
  return s;
}

/// Documented unsound variants, used as negative tests of verify_mapping.
inline MappingScheme broken_scheme(const std::string& name) {
  if (name == "rmw-no-leading") {
    MappingScheme s = scheme_x86_to_armv8();
    s.name = name;
    s.rules["rmw"] = {"acc", "dmbfull"};
    return s;
  }
  if (name == "rmw-no-trailing") {
    MappingScheme s = scheme_x86_to_armv8();
    s.name = name;
    s.rules["rmw"] = {"dmbfull", "acc"};
    return s;
  }
  if (name == "broken-ldr") {
    MappingScheme s = scheme_armv8_to_armv7(Arch::ARMv7MCA);
    s.name = name;
    s.rules["ld"] = {"acc"};
    return s;
  }
  if (name == "broken-ldr-cbisb") {
    MappingScheme s = scheme_armv8_to_armv7(Arch::ARMv7);
    s.name = name;
    s.rules["ld"] = {"acc", "cbisb"};
    return s;
  }
  if (name == "broken-ldr-cbisb-mca") {
    MappingScheme s = scheme_armv8_to_armv7(Arch::ARMv7MCA);
    s.name = name;
    s.rules["ld"] = {"acc", "cbisb"};
    return s;
  }
  if (name == "stlr-no-mfence") {
    MappingScheme s = scheme_armv8_to_x86();
    s.name = name;
    s.rules["stL"] = {"acc"};
    return s;
  }
  throw Error(Errc::Usage, "unknown scheme variant '" + name + "'");
}

inline std::vector<MappingScheme> shipped_schemes() {
  return {scheme_x86_to_armv8(),
          scheme_c11_x86_to_armv8(),
          scheme_armv8_to_x86(),
          scheme_armv7_to_armv8(Arch::ARMv7),
          scheme_armv7_to_armv8(Arch::ARMv7MCA),
          scheme_armv8_to_armv7(Arch::ARMv7),
          scheme_armv8_to_armv7(Arch::ARMv7MCA),
          scheme_c11_armv8_to_armv7(Arch::ARMv7),
          scheme_c11_armv8_to_armv7(Arch::ARMv7MCA)};
}

/// Scheme lookup by source/target arch (plus the c11 flag), as the CLI uses.
inline MappingScheme find_scheme(Arch from, Arch to, bool c11) {
  for (const auto& s : shipped_schemes())
    if (s.from == from && s.to == to && s.c11_aware == c11) return s;
  throw Error(Errc::Usage, std::string("no shipped scheme from ") + arch_name(from) + " to " +
                               arch_name(to) + (c11 ? " (c11)" : ""));
}

/// Parses a declarative scheme table:
///   scheme my-name
///   from x86
///   to armv8
///   ld -> acc dmbld
///   st -> dmbst acc
/// Lines starting with # are comments; "c11" on its own line marks the
/// scheme c11-aware; an empty right-hand side is written "skip".
inline MappingScheme parse_scheme_table(const std::string& text) {
  MappingScheme s;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream ls(line);
    std::string head;
    if (!(ls >> head)) continue;
    if (head == "scheme") {
      ls >> s.name;
    } else if (head == "from" || head == "to") {
      std::string a;
      ls >> a;
      auto arch = arch_from_name(a);
      if (!arch) throw Error(Errc::Usage, "unknown arch '" + a + "' in scheme table");
      (head == "from" ? s.from : s.to) = *arch;
    } else if (head == "c11") {
      s.c11_aware = true;
    } else {
      std::string arrow;
      if (!(ls >> arrow) || arrow != "->")
        throw Error(Errc::Usage, "expected '<pattern> -> <elements>' in scheme table");
      std::vector<std::string> els;
      std::string el;
      while (ls >> el)
        if (el != "skip") els.push_back(el);
      s.rules[head] = els;
    }
  }
  return s;
}

// ---------------------------------------------------------------------------
// Mapping verification: target behaviors must be included in source
// behaviors under the architectures' own models.

inline ModelId model_for_arch(Arch a) {
  switch (a) {
    case Arch::X86: return ModelId::X86A;  // equivalent to x86 and cheaper
    case Arch::ARMv7: return ModelId::ARMV7;
    case Arch::ARMv7MCA: return ModelId::ARMV7MCA;
    case Arch::ARMv8: return ModelId::ARMV8;
    case Arch::SCREF: return ModelId::SC;
  }
  return ModelId::SC;
}

struct MappingVerdict {
  bool sound = true;
  std::optional<Behavior> witness;  // a target behavior the source lacks
};

inline MappingVerdict verify_mapping(const Program& p, const MappingScheme& s,
                                     EnumOptions opts = {}) {
  Program target = map_program(p, s);
  BehaviorSet src = behaviors(p, model_for_arch(s.from), opts);
  BehaviorSet tgt = behaviors(target, model_for_arch(s.to), opts);
  MappingVerdict v;
  if (auto cex = included(tgt, src)) {
    v.sound = false;
    v.witness = *cex;
  }
  return v;
}

// ---------------------------------------------------------------------------
// The ARMv8 transformation table: reorderings a·b ⇝ b·a over adjacent,
// different-location, register-independent pairs, plus eliminations and
// strengthenings.

enum class TClass { W, R, L, A, DmbFull, DmbLd, DmbSt };

inline const char* tclass_name(TClass c) {
  switch (c) {
    case TClass::W: return "W";
    case TClass::R: return "R";
    case TClass::L: return "L";
    case TClass::A: return "A";
    case TClass::DmbFull: return "DMBFULL";
    case TClass::DmbLd: return "DMBLD";
    case TClass::DmbSt: return "DMBST";
  }
  return "?";
}

/// The 7x7 reordering matrix, exactly as printed. 'y' safe, 'n' unsafe,
/// '=' identical (fence against itself). Row = first element a, column = b.
inline char reorder_cell(TClass a, TClass b) {
  static const char table[7][7] = {
      //            W    R    L    A   FULL  LD   ST
      /* W    */ {'n', 'y', 'n', 'y', 'n', 'y', 'n'},
      /* R    */ {'n', 'y', 'n', 'y', 'n', 'n', 'y'},
      /* L    */ {'n', 'y', 'n', 'n', 'n', 'y', 'n'},
      /* A    */ {'n', 'n', 'n', 'n', 'y', 'y', 'y'},
      /* FULL */ {'n', 'n', 'y', 'n', '=', 'y', 'y'},
      /* LD   */ {'n', 'n', 'y', 'n', 'y', '=', 'y'},
      /* ST   */ {'n', 'y', 'y', 'y', 'y', 'y', '='},
  };
  return table[static_cast<int>(a)][static_cast<int>(b)];
}

inline bool reorder_safe(TClass a, TClass b) { return reorder_cell(a, b) == 'y'; }

/// Asymmetric yes/no pairs in the printed matrix, reported rather than
/// normalized away.
inline std::vector<std::pair<TClass, TClass>> reorder_table_asymmetries() {
  std::vector<std::pair<TClass, TClass>> out;
  for (int a = 0; a < 7; ++a)
    for (int b = a + 1; b < 7; ++b) {
      char ab = reorder_cell(static_cast<TClass>(a), static_cast<TClass>(b));
      char ba = reorder_cell(static_cast<TClass>(b), static_cast<TClass>(a));
      if ((ab == 'y') != (ba == 'y'))
        out.push_back({static_cast<TClass>(a), static_cast<TClass>(b)});
    }
  return out;
}

inline std::optional<TClass> classify(const Instruction& in) {
  switch (in.kind) {
    case IKind::Load:
      return in.flavor == Flavor::Acquire ? TClass::A : TClass::R;
    case IKind::Store:
      return in.flavor == Flavor::Release ? TClass::L : TClass::W;
    case IKind::Fence:
      if (in.flavor == Flavor::DmbFull) return TClass::DmbFull;
      if (in.flavor == Flavor::DmbLd) return TClass::DmbLd;
      if (in.flavor == Flavor::DmbSt) return TClass::DmbSt;
      return std::nullopt;
    default: return std::nullopt;
  }
}

struct Transform {
  enum class Kind {
    Reorder,
    ElimRAR,
    ElimRAA,
    ElimAAA,
    ElimOW,
    ElimRAW,
    StrengthenRtoA,
    StrengthenWtoL,
    StrengthenFence,
  };
  Kind kind;
  int tid = 0;
  int node = 0;  // first instruction of the site
};

namespace detail {

inline bool register_independent(const Instruction& a, const Instruction& b) {
  auto reads = [](const Instruction& in) {
    std::set<std::string> r = in.addr_reads();
    for (const auto& x : in.value_reads()) r.insert(x);
    return r;
  };
  if (!a.dest.empty() && (reads(b).count(a.dest) || b.dest == a.dest)) return false;
  if (!b.dest.empty() && reads(a).count(b.dest)) return false;
  return true;
}

}  // namespace detail

/// Applies one transformation. With enforce_safety the reordering table and
/// the safe-elimination list are consulted and unsafe sites are rejected;
/// without it, unsound transforms apply too (how the table's no-cells get
/// their witnesses demonstrated).
inline Program apply_transform(const Program& p, const Transform& t, bool enforce_safety = true) {
  auto mismatch = [](const std::string& why) -> Program {
    throw Error(Errc::PatternMismatch, why);
  };
  Program out = p;
  auto& code = out.threads.at(t.tid).code;
  if (t.node < 0 || t.node >= static_cast<int>(code.size())) return mismatch("no such site");
  Instruction& a = code[t.node];

  auto require_adjacent = [&]() -> Instruction& {
    if (t.node + 1 >= static_cast<int>(code.size()))
      throw Error(Errc::PatternMismatch, "site needs an adjacent successor");
    return code[t.node + 1];
  };

  switch (t.kind) {
    case Transform::Kind::Reorder: {
      Instruction& b = require_adjacent();
      auto ca = classify(a), cb = classify(b);
      if (!ca || !cb) return mismatch("unclassifiable reorder operands");
      if (a.is_access() && b.is_access() && may_alias(a.loc, b.loc))
        return mismatch("reorder needs different locations");
      if (!detail::register_independent(a, b)) return mismatch("reorder needs independent registers");
      if (enforce_safety && !reorder_safe(*ca, *cb))
        return mismatch(std::string("unsafe reordering ") + tclass_name(*ca) + "." +
                        tclass_name(*cb));
      std::swap(a, b);
      return out;
    }
    case Transform::Kind::ElimRAR:
    case Transform::Kind::ElimRAA:
    case Transform::Kind::ElimAAA: {
      Instruction& b = require_adjacent();
      bool first_acq = t.kind != Transform::Kind::ElimRAR;
      bool second_acq = t.kind == Transform::Kind::ElimAAA;
      if (a.kind != IKind::Load || b.kind != IKind::Load) return mismatch("needs two loads");
      if ((a.flavor == Flavor::Acquire) != first_acq) return mismatch("first load flavor");
      if ((b.flavor == Flavor::Acquire) != second_acq) return mismatch("second load flavor");
      if (!must_alias(a.loc, b.loc)) return mismatch("elimination needs must-alias");
      Instruction repl;
      repl.kind = IKind::RegOp;
      repl.dest = b.dest;
      repl.value = Expr::regref(a.dest);
      b = repl;
      return out;
    }
    case Transform::Kind::ElimOW: {
      Instruction& b = require_adjacent();
      if (a.kind != IKind::Store || b.kind != IKind::Store) return mismatch("needs two stores");
      if (!must_alias(a.loc, b.loc)) return mismatch("elimination needs must-alias");
      if (enforce_safety) return mismatch("overwritten-write elimination is unsound");
      code.erase(code.begin() + t.node);
      return out;
    }
    case Transform::Kind::ElimRAW: {
      Instruction& b = require_adjacent();
      if (a.kind != IKind::Store || b.kind != IKind::Load) return mismatch("needs store then load");
      if (!must_alias(a.loc, b.loc)) return mismatch("elimination needs must-alias");
      if (enforce_safety) return mismatch("read-after-write elimination is unsound");
      Instruction repl;
      repl.kind = IKind::RegOp;
      repl.dest = b.dest;
      repl.value = a.value;
      b = repl;
      return out;
    }
    case Transform::Kind::StrengthenRtoA:
      if (a.kind != IKind::Load || a.flavor != Flavor::Plain) return mismatch("needs a plain load");
      a.flavor = Flavor::Acquire;
      return out;
    case Transform::Kind::StrengthenWtoL:
      if (a.kind != IKind::Store || a.flavor != Flavor::Plain)
        return mismatch("needs a plain store");
      a.flavor = Flavor::Release;
      return out;
    case Transform::Kind::StrengthenFence:
      if (a.kind != IKind::Fence || (a.flavor != Flavor::DmbLd && a.flavor != Flavor::DmbSt))
        return mismatch("needs dmbld or dmbst");
      a.flavor = Flavor::DmbFull;
      return out;
  }
  return mismatch("unreachable");
}

/// All sites where a reorder of classes (a, b) applies.
inline std::vector<Transform> reorder_sites(const Program& p, TClass a, TClass b) {
  std::vector<Transform> out;
  for (int tid = 0; tid < p.num_threads(); ++tid) {
    const auto& code = p.threads[tid].code;
    for (int i = 0; i + 1 < static_cast<int>(code.size()); ++i) {
      auto ca = classify(code[i]), cb = classify(code[i + 1]);
      if (!ca || !cb || *ca != a || *cb != b) continue;
      if (code[i].is_access() && code[i + 1].is_access() &&
          may_alias(code[i].loc, code[i + 1].loc))
        continue;
      if (!detail::register_independent(code[i], code[i + 1])) continue;
      out.push_back({Transform::Kind::Reorder, tid, i});
    }
  }
  return out;
}

/// behaviors(after) ∖ behaviors(before) — a growth witness when the
/// transformation introduced new target behavior.
inline std::optional<Behavior> transform_growth(const Program& p, const Transform& t,
                                                EnumOptions opts = {}) {
  Program q = apply_transform(p, t, /*enforce_safety=*/false);
  BehaviorSet before = behaviors(p, model_for_arch(p.arch), opts);
  BehaviorSet after = behaviors(q, model_for_arch(q.arch), opts);
  return included(after, before);
}

/// Sites for the elimination and strengthening transforms.
inline std::vector<Transform> transform_sites(const Program& p, Transform::Kind kind) {
  std::vector<Transform> out;
  for (int tid = 0; tid < p.num_threads(); ++tid) {
    const auto& code = p.threads[tid].code;
    for (int i = 0; i < static_cast<int>(code.size()); ++i) {
      Transform t{kind, tid, i};
      try {
        apply_transform(p, t, /*enforce_safety=*/kind != Transform::Kind::ElimOW &&
                                  kind != Transform::Kind::ElimRAW);
        out.push_back(t);
      } catch (const Error&) {
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Table validation: safe cells never grow on the supplied contexts; unsafe
// cells each demonstrate strict growth on their designated witness.

struct TransformTableReport {
  struct Entry {
    std::string cell;
    bool safe = true;
    int sites_tested = 0;
    bool growth = false;  // any growth seen (bad for safe, required for unsafe)
    std::string detail;
  };
  std::vector<Entry> entries;
  std::vector<std::pair<TClass, TClass>> asymmetries;

  bool ok() const {
    for (const auto& e : entries) {
      if (e.safe && e.growth) return false;
      if (!e.safe && !e.growth) return false;
    }
    return true;
  }
};

inline std::string cell_key(TClass a, TClass b) {
  return std::string(tclass_name(a)) + "." + tclass_name(b);
}

/// `contexts`: programs exercised against every safe cell and the safe
/// eliminations/strengthenings. `witnesses`: per unsafe-cell program and
/// site expected to show strict growth.
inline TransformTableReport validate_transform_table(
    const std::vector<Program>& contexts,
    const std::map<std::string, std::pair<Program, Transform>>& witnesses,
    EnumOptions opts = {}) {
  TransformTableReport report;
  report.asymmetries = reorder_table_asymmetries();

  for (int a = 0; a < 7; ++a)
    for (int b = 0; b < 7; ++b) {
      TClass ca = static_cast<TClass>(a), cb = static_cast<TClass>(b);
      char cell = reorder_cell(ca, cb);
      if (cell == '=') continue;
      TransformTableReport::Entry entry;
      entry.cell = cell_key(ca, cb);
      entry.safe = cell == 'y';
      if (entry.safe) {
        for (const auto& ctx : contexts)
          for (const auto& t : reorder_sites(ctx, ca, cb)) {
            entry.sites_tested++;
            if (auto g = transform_growth(ctx, t, opts)) {
              entry.growth = true;
              entry.detail = "grew on a context: " + g->to_line();
            }
          }
      } else {
        auto it = witnesses.find(entry.cell);
        if (it != witnesses.end()) {
          entry.sites_tested = 1;
          if (auto g = transform_growth(it->second.first, it->second.second, opts)) {
            entry.growth = true;
            entry.detail = g->to_line();
          }
        } else {
          entry.detail = "no witness supplied";
        }
      }
      report.entries.push_back(entry);
    }

  // eliminations and strengthenings
  struct Named {
    const char* key;
    Transform::Kind kind;
    bool safe;
  };
  for (const auto& [key, kind, safe] :
       {Named{"RAR", Transform::Kind::ElimRAR, true}, Named{"RAA", Transform::Kind::ElimRAA, true},
        Named{"AAA", Transform::Kind::ElimAAA, true}, Named{"R-A", Transform::Kind::StrengthenRtoA, true},
        Named{"W-L", Transform::Kind::StrengthenWtoL, true},
        Named{"F", Transform::Kind::StrengthenFence, true}, Named{"OW", Transform::Kind::ElimOW, false},
        Named{"RAW", Transform::Kind::ElimRAW, false}}) {
    TransformTableReport::Entry entry;
    entry.cell = key;
    entry.safe = safe;
    if (safe) {
      for (const auto& ctx : contexts)
        for (const auto& t : transform_sites(ctx, kind)) {
          entry.sites_tested++;
          if (auto g = transform_growth(ctx, t, opts)) {
            entry.growth = true;
            entry.detail = "grew on a context: " + g->to_line();
          }
        }
    } else {
      auto it = witnesses.find(key);
      if (it != witnesses.end()) {
        entry.sites_tested = 1;
        if (auto g = transform_growth(it->second.first, it->second.second, opts)) {
          entry.growth = true;
          entry.detail = g->to_line();
        }
      } else {
        entry.detail = "no witness supplied";
      }
    }
    report.entries.push_back(entry);
  }
  return report;
}

}  // namespace remap

#endif  // REMAP_MAPPING_HPP_
