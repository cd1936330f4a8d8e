#ifndef REMAP_MODELS_HPP_
#define REMAP_MODELS_HPP_

#include <optional>
#include <string>
#include <vector>

#include "remap/exec.hpp"
#include "remap/litmus.hpp"
#include "remap/relalg.hpp"

namespace remap {

enum class ModelId { SC, X86, X86A, ARMV7, ARMV7MCA, ARMV8 };

inline const char* model_name(ModelId m) {
  switch (m) {
    case ModelId::SC: return "sc";
    case ModelId::X86: return "x86";
    case ModelId::X86A: return "x86a";
    case ModelId::ARMV7: return "armv7";
    case ModelId::ARMV7MCA: return "armv7mca";
    case ModelId::ARMV8: return "armv8";
  }
  return "?";
}

inline std::optional<ModelId> model_from_name(const std::string& s) {
  if (s == "sc") return ModelId::SC;
  if (s == "x86") return ModelId::X86;
  if (s == "x86a") return ModelId::X86A;
  if (s == "armv7") return ModelId::ARMV7;
  if (s == "armv7mca") return ModelId::ARMV7MCA;
  if (s == "armv8") return ModelId::ARMV8;
  return std::nullopt;
}

/// Strength rank: smaller is stronger. SC < x86 = x86A < ARMv8 < ARMv7-mca < ARMv7.
inline int model_strength(ModelId m) {
  switch (m) {
    case ModelId::SC: return 0;
    case ModelId::X86:
    case ModelId::X86A: return 1;
    case ModelId::ARMV8: return 2;
    case ModelId::ARMV7MCA: return 3;
    case ModelId::ARMV7: return 4;
  }
  return 99;
}

/// Dependencies lifted to event ids of one execution.
struct EvDeps {
  Relation addr, data, ctrl, ctrl_isb, addr_isb;

  explicit EvDeps(int n = 0)
      : addr(n), data(n), ctrl(n), ctrl_isb(n), addr_isb(n) {}
};

struct Verdict {
  bool consistent = true;
  std::string axiom;          // violated axiom when inconsistent
  std::vector<int> witness;   // cycle (acyclicity) or [e] self-pair (irreflexivity)
  std::vector<int> trace;     // expanded path for composite axioms, for display

  static Verdict ok() { return {}; }
  static Verdict fail(std::string ax, std::vector<int> cyc, std::vector<int> tr = {}) {
    Verdict v;
    v.consistent = false;
    v.axiom = std::move(ax);
    v.witness = std::move(cyc);
    v.trace = std::move(tr);
    return v;
  }
};

namespace detail {

/// Recovers intermediates of a self-loop (e,e) through composed relations.
inline std::vector<int> composite_trace(int e, const std::vector<const Relation*>& rels) {
  std::vector<std::vector<int>> layers{{e}};
  // forward reachable sets through each relation, then walk back
  for (const Relation* r : rels) {
    std::vector<int> next;
    for (int a : layers.back())
      for (int b : r->row_elements(a)) next.push_back(b);
    layers.push_back(next);
  }
  // DFS from e backwards picking intermediates that connect
  std::vector<int> path(rels.size() + 1, -1);
  path[0] = e;
  std::function<bool(size_t)> go = [&](size_t k) -> bool {
    if (k == rels.size()) return path[k] == e;
    for (int b : rels[k]->row_elements(path[k])) {
      path[k + 1] = b;
      if (go(k + 1)) return true;
    }
    return false;
  };
  if (!go(0)) return {e};
  return path;
}

inline std::optional<Verdict> check_acyclic(const std::string& name, const Relation& r) {
  if (is_acyclic(r)) return std::nullopt;
  return Verdict::fail(name, find_cycle(r));
}

inline std::optional<Verdict> check_irr_composite(const std::string& name,
                                                  const std::vector<const Relation*>& rels) {
  Relation comp = *rels[0];
  for (size_t i = 1; i < rels.size(); ++i) comp = compose(comp, *rels[i]);
  for (int e = 0; e < comp.universe(); ++e)
    if (comp.contains(e, e)) return Verdict::fail(name, {e}, composite_trace(e, rels));
  return std::nullopt;
}

/// Full fences under every model: mfence, dmb, dmbfull. Cross-model checks
/// (robustness oracles) treat an ARMv7 dmb as an ARMv8 dmbfull and vice versa.
inline EventSet full_fences(const Execution& x) {
  EventSet s(x.size());
  for (const auto& e : x.events)
    if (e.op == Op::F &&
        (e.flavor == Flavor::Mfence || e.flavor == Flavor::Dmb || e.flavor == Flavor::DmbFull))
      s.insert(e.id);
  return s;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// SC  (Fig. "SC and x86A model"):
//   acy(po ∪ rf ∪ fr ∪ co)         (sc)
//   rmw ∩ (fre;coe) = ∅            (atomicity)

inline std::optional<Verdict> check_atomicity(const Execution& x) {
  Relation fr = derive_fr(x);
  Relation fre = external_part(fr, x);
  Relation coe = external_part(x.co, x);
  Relation bad = x.rmw & compose(fre, coe);
  for (auto [a, b] : bad.pairs()) {
    (void)b;
    return Verdict::fail("atomicity", {a});
  }
  return std::nullopt;
}

inline Verdict check_sc(const Execution& x0) {
  Execution x = expand_updates(x0);
  Relation fr = derive_fr(x);
  if (auto v = detail::check_acyclic("sc", x.po | x.rf | fr | x.co)) return *v;
  if (auto v = check_atomicity(x)) return *v;
  return Verdict::ok();
}

// ---------------------------------------------------------------------------
// x86 (direct model): U events, total mo over W ∪ U ∪ F containing co.
//   xhb = (po ∪ rf)+
//   irr(xhb) irr(mo;xhb) irr(fr;xhb) irr(fr;mo) irr(fr;mo;rfe;po)
//   irr(fr;mo;[U ∪ F];po)

inline Verdict check_x86(const Execution& x) {
  if (!x.mo) throw Error(Errc::MissingMo, "x86 model needs a modification order");
  const Relation& mo = *x.mo;
  Relation xhb = tclosure(x.po | x.rf);
  Relation fr = derive_fr(x);
  Relation rfe = external_part(x.rf, x);
  EventSet uf = x.cls(Op::U) | x.cls(Op::F);
  Relation uf_po = restrict(uf, x.po, x.all());

  if (auto v = detail::check_irr_composite("irrHB", {&xhb})) return *v;
  if (auto v = detail::check_irr_composite("irrMOHB", {&mo, &xhb})) return *v;
  if (auto v = detail::check_irr_composite("irrFRHB", {&fr, &xhb})) return *v;
  if (auto v = detail::check_irr_composite("irrFRMO", {&fr, &mo})) return *v;
  if (auto v = detail::check_irr_composite("irrFMRP", {&fr, &mo, &rfe, &x.po})) return *v;
  if (auto v = detail::check_irr_composite("irrUF", {&fr, &mo, &uf_po})) return *v;
  return Verdict::ok();
}

// ---------------------------------------------------------------------------
// x86A (Fig. "SC and x86A model"): rmw pairs, no mo.
//   (sc-per-loc)  acy(poloc ∪ rf ∪ fr ∪ co)
//   (atomicity)   rmw ∩ (fre;coe) = ∅
//   (GHB)         acy((po ∖ awr) ∪ fence ∪ rfe ∪ co ∪ fr)
//     fence = po;[rmw ∪ F];po
//     awr   = [W ∖ codom(rmw)];po;[R ∖ dom(rmw)]

inline std::optional<Verdict> check_sc_per_loc(const Execution& x) {
  Relation fr = derive_fr(x);
  return detail::check_acyclic("sc-per-loc", x.poloc() | x.rf | fr | x.co);
}

inline Verdict check_x86a(const Execution& x0) {
  Execution x = expand_updates(x0);
  if (auto v = check_sc_per_loc(x)) return *v;
  if (auto v = check_atomicity(x)) return *v;

  EventSet rmw_events = x.dom_rmw() | x.codom_rmw();
  EventSet fence_class = rmw_events | detail::full_fences(x);
  Relation fence = compose(restrict(x.all(), x.po, fence_class),
                           restrict(fence_class, x.po, x.all()));
  EventSet w_nonrmw = x.cls_writes() - x.codom_rmw();
  EventSet r_nonrmw = x.cls_reads() - x.dom_rmw();
  Relation awr = restrict(w_nonrmw, x.po, r_nonrmw);
  Relation fr = derive_fr(x);
  Relation rfe = external_part(x.rf, x);
  Relation ghb = (x.po - awr) | fence | rfe | x.co | fr;
  if (auto v = detail::check_acyclic("GHB", ghb)) return *v;
  return Verdict::ok();
}

// ---------------------------------------------------------------------------
// ARMv7 ppo: least fixpoint of the ii/ic/ci/cc rule systems seeded by
//   ii0 = addr ∪ data ∪ rdw ∪ rfi      ic0 = ∅
//   ci0 = ctrl_isb ∪ detour            cc0 = data ∪ ctrl ∪ addr;po?
// with rdw = (fre;rfe) ∩ poloc and detour = (coe;rfe) ∩ poloc, then
//   ppo = [R];ii;[R] ∪ [R];ic;[W].

inline Relation armv7_ppo(const Execution& x, const EvDeps& deps) {
  Relation rfi = internal_part(x.rf, x);
  Relation rfe = external_part(x.rf, x);
  Relation fre = external_part(derive_fr(x), x);
  Relation coe = external_part(x.co, x);
  Relation poloc = x.poloc();
  Relation rdw = compose(fre, rfe) & poloc;
  Relation detour = compose(coe, rfe) & poloc;

  Relation ii0 = deps.addr | deps.data | rdw | rfi;
  Relation ci0 = deps.ctrl_isb | detour;
  Relation ic0(x.size());
  Relation cc0 = deps.data | deps.ctrl | compose(deps.addr, x.po.refl());

  Relation ii = ii0, ic = ic0, ci = ci0, cc = cc0;
  bool changed = true;
  while (changed) {
    Relation ii2 = ii0 | ci | compose(ic, ci) | compose(ii, ii);
    Relation ic2 = ic0 | ii | cc | compose(ic, cc) | compose(ii, ic);
    Relation ci2 = ci0 | compose(ci, ii) | compose(cc, ci);
    Relation cc2 = cc0 | ci | compose(ci, ic) | compose(cc, cc);
    changed = !(ii2 == ii && ic2 == ic && ci2 == ci && cc2 == cc);
    ii = ii2;
    ic = ic2;
    ci = ci2;
    cc = cc2;
  }

  EventSet r = x.cls(Op::R), w = x.cls(Op::W);
  return restrict(r, ii, r) | restrict(r, ic, w);
}

// ---------------------------------------------------------------------------
// ARMv7:
//   fence = [R ∪ W];po;[dmb];po;[R ∪ W]
//   ahb   = ppo ∪ fence ∪ rfe
//   prop1 = [W];rfe?;fence;ahb*;[W]
//   prop2 = (coe ∪ fre)?;rfe?;(fence;ahb*)?;fence;ahb*
//   axioms: sc-per-loc, observation, propagation, atomicity, no-thin-air

namespace detail {

struct Armv7Rels {
  Relation ppo, fence, ahb, prop;
};

inline Armv7Rels armv7_relations(const Execution& x, const EvDeps& deps) {
  Armv7Rels r;
  r.ppo = armv7_ppo(x, deps);
  EventSet mem = x.cls(Op::R) | x.cls(Op::W);
  EventSet dmb = full_fences(x);
  r.fence = compose(restrict(mem, x.po, dmb), restrict(dmb, x.po, mem));
  Relation rfe = external_part(x.rf, x);
  r.ahb = r.ppo | r.fence | rfe;

  Relation fre = external_part(derive_fr(x), x);
  Relation coe = external_part(x.co, x);
  Relation ahbs = rtclosure(r.ahb);
  Relation fence_ahbs = compose(r.fence, ahbs);
  EventSet w = x.cls(Op::W);
  Relation prop1 = restrict(w, compose(rfe.refl(), fence_ahbs), w);
  Relation prop2 =
      compose(compose((coe | fre).refl(), rfe.refl()), compose(fence_ahbs.refl(), fence_ahbs));
  r.prop = prop1 | prop2;
  return r;
}

}  // namespace detail

inline Verdict check_armv7(const Execution& x, const EvDeps& deps) {
  if (auto v = check_sc_per_loc(x)) return *v;
  auto rels = detail::armv7_relations(x, deps);
  Relation fre = external_part(derive_fr(x), x);
  Relation ahbs = rtclosure(rels.ahb);
  if (auto v = detail::check_irr_composite("observation", {&fre, &rels.prop, &ahbs})) return *v;
  if (auto v = detail::check_acyclic("propagation", x.co | rels.prop)) return *v;
  if (auto v = check_atomicity(x)) return *v;
  if (auto v = detail::check_acyclic("no-thin-air", rels.ahb)) return *v;
  return Verdict::ok();
}

/// ARMv7-mca: ARMv7 plus acyclic write-order, wo = rfe;ppo;fre.
/// The draft alternative wo' = ((rfe;ppo;rfe⁻¹) ∖ id);co is available for
/// comparison behind the flag.
inline Verdict check_armv7mca(const Execution& x, const EvDeps& deps,
                              bool draft_wo = false) {
  Verdict v7 = check_armv7(x, deps);
  if (!v7.consistent) return v7;
  Relation ppo = armv7_ppo(x, deps);
  Relation rfe = external_part(x.rf, x);
  Relation fre = external_part(derive_fr(x), x);
  Relation wo(x.size());
  if (!draft_wo) {
    wo = compose(rfe, compose(ppo, fre));
  } else {
    Relation base = compose(rfe, compose(ppo, rfe.inverse()));
    for (int a = 0; a < base.universe(); ++a) base.erase(a, a);
    wo = compose(base, x.co);
  }
  if (auto v = detail::check_acyclic("mca", wo)) return *v;
  return Verdict::ok();
}

// ---------------------------------------------------------------------------
// ARMv8:
//   obs = rfe ∪ fre ∪ coe
//   dob = addr ∪ data ∪ ctrl;[W] ∪ (ctrl ∪ addr;po);[isb];po;[R]
//       ∪ addr;po;[W] ∪ (ctrl ∪ data);coi ∪ (addr ∪ data);rfi
//   aob = rmw ∪ [codom(rmw)];rfi;[A]
//   bob = po;[dmbfull];po ∪ [L];po;[A] ∪ [R];po;[dmbld];po ∪ [A];po
//       ∪ [W];po;[dmbst];po;[W] ∪ po;[L] ∪ po;[L];coi
//   ob  = (obs ∪ dob ∪ aob ∪ bob)+
//
// ISB creates no event; its dob clause arrives through the ctrl_isb /
// addr_isb dependency relations.

inline Relation armv8_ob(const Execution& x, const EvDeps& deps) {
  Relation rfi = internal_part(x.rf, x);
  Relation rfe = external_part(x.rf, x);
  Relation fr = derive_fr(x);
  Relation fre = external_part(fr, x);
  Relation coi = internal_part(x.co, x);
  Relation coe = external_part(x.co, x);

  Relation obs = rfe | fre | coe;

  EventSet r = x.cls(Op::R), w = x.cls(Op::W), all = x.all();
  Relation dob = deps.addr | deps.data;
  dob |= restrict(all, deps.ctrl, w);
  dob |= restrict(all, deps.ctrl_isb | deps.addr_isb, r);
  dob |= restrict(all, compose(deps.addr, x.po), w);
  dob |= compose(deps.ctrl | deps.data, coi);
  dob |= compose(deps.addr | deps.data, rfi);

  EventSet acq = x.cls_acquire(), rel = x.cls_release();
  Relation aob = x.rmw | restrict(x.codom_rmw(), rfi, acq);

  EventSet ff = detail::full_fences(x);
  EventSet fld = x.cls_fence(Flavor::DmbLd);
  EventSet fst = x.cls_fence(Flavor::DmbSt);
  Relation bob = compose(restrict(all, x.po, ff), restrict(ff, x.po, all));
  bob |= restrict(rel, x.po, acq);
  bob |= compose(restrict(r, x.po, fld), restrict(fld, x.po, all));
  bob |= restrict(acq, x.po, all);
  bob |= compose(restrict(w, x.po, fst), restrict(fst, x.po, w));
  bob |= restrict(all, x.po, rel);
  bob |= compose(restrict(all, x.po, rel), coi);

  return tclosure(obs | dob | aob | bob);
}

inline Verdict check_armv8(const Execution& x, const EvDeps& deps) {
  Relation fr = derive_fr(x);
  if (auto v = detail::check_acyclic("internal", x.poloc() | fr | x.co | x.rf)) return *v;
  Relation ob = armv8_ob(x, deps);
  for (int e = 0; e < ob.universe(); ++e)
    if (ob.contains(e, e)) return Verdict::fail("external", {e});
  if (auto v = check_atomicity(x)) return *v;
  return Verdict::ok();
}

// ---------------------------------------------------------------------------
// Witness re-validation: recompute the named axiom's relation and confirm the
// stored witness really is a cycle (or self-pair) of it.

inline Relation axiom_relation(const std::string& axiom, const Execution& x0,
                               const EvDeps& deps) {
  Execution x = (axiom == "sc" || axiom == "sc-per-loc" || axiom == "GHB" ||
                 axiom == "atomicity")
                    ? expand_updates(x0)
                    : x0;
  const EvDeps* d = &deps;
  EvDeps resized(x.size());
  if (x.size() != x0.size()) d = &resized;  // expansion only happens for dep-free x86 checks

  Relation fr = derive_fr(x);
  if (axiom == "sc") return x.po | x.rf | fr | x.co;
  if (axiom == "sc-per-loc" || axiom == "internal") return x.poloc() | x.rf | fr | x.co;
  if (axiom == "atomicity")
    return x.rmw & compose(external_part(fr, x), external_part(x.co, x));
  if (axiom == "GHB") {
    EventSet rmw_events = x.dom_rmw() | x.codom_rmw();
    EventSet fence_class = rmw_events | detail::full_fences(x);
    Relation fence = compose(restrict(x.all(), x.po, fence_class),
                             restrict(fence_class, x.po, x.all()));
    EventSet w_nonrmw = x.cls_writes() - x.codom_rmw();
    EventSet r_nonrmw = x.cls_reads() - x.dom_rmw();
    Relation awr = restrict(w_nonrmw, x.po, r_nonrmw);
    return (x.po - awr) | fence | external_part(x.rf, x) | x.co | fr;
  }
  if (axiom == "irrHB") return tclosure(x.po | x.rf);
  if (axiom == "irrMOHB") return compose(*x.mo, tclosure(x.po | x.rf));
  if (axiom == "irrFRHB") return compose(fr, tclosure(x.po | x.rf));
  if (axiom == "irrFRMO") return compose(fr, *x.mo);
  if (axiom == "irrFMRP")
    return compose(compose(fr, *x.mo), compose(external_part(x.rf, x), x.po));
  if (axiom == "irrUF") {
    EventSet uf = x.cls(Op::U) | x.cls(Op::F);
    return compose(compose(fr, *x.mo), restrict(uf, x.po, x.all()));
  }
  if (axiom == "observation") {
    auto rels = detail::armv7_relations(x, *d);
    return compose(external_part(fr, x), compose(rels.prop, rtclosure(rels.ahb)));
  }
  if (axiom == "propagation") {
    auto rels = detail::armv7_relations(x, *d);
    return x.co | rels.prop;
  }
  if (axiom == "no-thin-air") return detail::armv7_relations(x, *d).ahb;
  if (axiom == "mca") {
    Relation ppo = armv7_ppo(x, *d);
    return compose(external_part(x.rf, x), compose(ppo, external_part(fr, x)));
  }
  if (axiom == "external") return armv8_ob(x, *d);
  throw Error(Errc::UnsupportedPair, "unknown axiom " + axiom);
}

inline bool revalidate(const Verdict& v, const Execution& x, const EvDeps& deps) {
  if (v.consistent) return v.witness.empty();
  if (v.witness.empty()) return false;
  Relation r = axiom_relation(v.axiom, x, deps);
  if (v.witness.size() == 1) {
    int e = v.witness[0];
    return r.contains(e, e) || tclosure(r).contains(e, e);
  }
  for (size_t i = 0; i < v.witness.size(); ++i) {
    int a = v.witness[i];
    int b = v.witness[(i + 1) % v.witness.size()];
    if (!r.contains(a, b)) return false;
  }
  return true;
}

}  // namespace remap

#endif  // REMAP_MODELS_HPP_
