#ifndef REMAP_EXEC_HPP_
#define REMAP_EXEC_HPP_

#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "remap/litmus.hpp"
#include "remap/relalg.hpp"

namespace remap {

enum class Op { R, W, U, F };

constexpr int kInitTid = -1;

struct Event {
  int id = 0;
  int tid = kInitTid;
  Op op = Op::R;
  Flavor flavor = Flavor::Plain;
  C11 c11 = C11::None;
  Cell loc;
  int64_t rval = 0;  // R and U
  int64_t wval = 0;  // W and U
  int instr = -1;    // originating instruction node, -1 for init events

  bool is_init() const { return tid == kInitTid; }
  bool is_mem() const { return op != Op::F; }
  bool reads() const { return op == Op::R || op == Op::U; }
  bool writes() const { return op == Op::W || op == Op::U; }
};

/// An execution graph: events plus po, rf, co, and the rmw pairing.
/// mo is present only for x86 executions checked under the direct model.
struct Execution {
  std::vector<Event> events;
  Relation po, rf, co, rmw;
  std::optional<Relation> mo;

  int size() const { return static_cast<int>(events.size()); }

  EventSet cls(Op op) const {
    EventSet s(size());
    for (const auto& e : events)
      if (e.op == op) s.insert(e.id);
    return s;
  }

  EventSet cls_reads() const {
    EventSet s(size());
    for (const auto& e : events)
      if (e.reads()) s.insert(e.id);
    return s;
  }

  EventSet cls_writes() const {
    EventSet s(size());
    for (const auto& e : events)
      if (e.writes()) s.insert(e.id);
    return s;
  }

  EventSet cls_fence(Flavor f) const {
    EventSet s(size());
    for (const auto& e : events)
      if (e.op == Op::F && e.flavor == f) s.insert(e.id);
    return s;
  }

  EventSet cls_acquire() const {  // A: acquire loads
    EventSet s(size());
    for (const auto& e : events)
      if (e.op == Op::R && e.flavor == Flavor::Acquire) s.insert(e.id);
    return s;
  }

  EventSet cls_release() const {  // L: release stores
    EventSet s(size());
    for (const auto& e : events)
      if (e.op == Op::W && e.flavor == Flavor::Release) s.insert(e.id);
    return s;
  }

  EventSet dom_rmw() const {
    EventSet s(size());
    for (auto [a, b] : rmw.pairs()) s.insert(a);
    return s;
  }

  EventSet codom_rmw() const {
    EventSet s(size());
    for (auto [a, b] : rmw.pairs()) s.insert(b);
    return s;
  }

  EventSet all() const {
    EventSet s(size());
    for (const auto& e : events) s.insert(e.id);
    return s;
  }

  bool same_loc(int a, int b) const {
    const Event &ea = events[a], &eb = events[b];
    if (!ea.is_mem() || !eb.is_mem())
      throw Error(Errc::FenceHasNoLocation, "fence event has no location");
    return ea.loc == eb.loc;
  }

  Relation poloc() const {
    Relation r(size());
    for (auto [a, b] : po.pairs())
      if (events[a].is_mem() && events[b].is_mem() && events[a].loc == events[b].loc)
        r.insert(a, b);
    return r;
  }
};

/// Pairs of r on equal locations. Throws if r touches a fence event.
inline Relation sameloc(const Relation& r, const Execution& x) {
  Relation out(r.universe());
  for (auto [a, b] : r.pairs())
    if (x.same_loc(a, b)) out.insert(a, b);
  return out;
}

inline Relation diffloc(const Relation& r, const Execution& x) {
  Relation out(r.universe());
  for (auto [a, b] : r.pairs())
    if (!x.same_loc(a, b)) out.insert(a, b);
  return out;
}

/// fr = rf⁻¹;co minus identity.
inline Relation derive_fr(const Execution& x) {
  Relation fr = compose(x.rf.inverse(), x.co);
  for (int a = 0; a < fr.universe(); ++a) fr.erase(a, a);
  return fr;
}

/// eco = (rf ∪ co ∪ fr)⁺, same-location by construction.
inline Relation derive_eco(const Execution& x) {
  return tclosure(x.rf | x.co | derive_fr(x));
}

/// Splits r into (internal, external) parts. Same-tid pairs are internal;
/// anything touching an init event is external.
inline std::pair<Relation, Relation> split_internal_external(const Relation& r,
                                                             const Execution& x) {
  Relation internal(r.universe()), external(r.universe());
  for (auto [a, b] : r.pairs()) {
    if (!x.events[a].is_init() && !x.events[b].is_init() && x.events[a].tid == x.events[b].tid)
      internal.insert(a, b);
    else
      external.insert(a, b);
  }
  return {internal, external};
}

inline Relation external_part(const Relation& r, const Execution& x) {
  return split_internal_external(r, x).second;
}
inline Relation internal_part(const Relation& r, const Execution& x) {
  return split_internal_external(r, x).first;
}

/// Rewrites U events into adjacent R/W pairs linked by rmw. Mo is dropped.
/// Used by checkers whose model wants rmw pairs rather than update events.
inline Execution expand_updates(const Execution& x) {
  bool any = false;
  for (const auto& e : x.events)
    if (e.op == Op::U) any = true;
  if (!any) return x;

  std::vector<Event> events;
  std::vector<int> read_of(x.size()), write_of(x.size());
  for (const auto& e : x.events) {
    if (e.op == Op::U) {
      Event r = e;
      r.op = Op::R;
      r.id = static_cast<int>(events.size());
      read_of[e.id] = r.id;
      events.push_back(r);
      Event w = e;
      w.op = Op::W;
      w.id = static_cast<int>(events.size());
      write_of[e.id] = w.id;
      events.push_back(w);
    } else {
      Event c = e;
      c.id = static_cast<int>(events.size());
      read_of[e.id] = write_of[e.id] = c.id;
      events.push_back(c);
    }
  }
  int n = static_cast<int>(events.size());
  Execution out;
  out.events = std::move(events);
  out.po = Relation(n);
  out.rf = Relation(n);
  out.co = Relation(n);
  out.rmw = Relation(n);
  for (auto [a, b] : x.po.pairs()) {
    // both halves inherit po on both sides
    out.po.insert(read_of[a], read_of[b]);
    out.po.insert(read_of[a], write_of[b]);
    out.po.insert(write_of[a], read_of[b]);
    out.po.insert(write_of[a], write_of[b]);
  }
  for (int e = 0; e < x.size(); ++e)
    if (x.events[e].op == Op::U) out.po.insert(read_of[e], write_of[e]);
  for (auto [w, r] : x.rf.pairs()) out.rf.insert(write_of[w], read_of[r]);
  for (auto [a, b] : x.co.pairs()) out.co.insert(write_of[a], write_of[b]);
  for (auto [a, b] : x.rmw.pairs()) out.rmw.insert(read_of[a], write_of[b]);
  for (int e = 0; e < x.size(); ++e)
    if (x.events[e].op == Op::U) out.rmw.insert(read_of[e], write_of[e]);
  return out;
}

// ---------------------------------------------------------------------------
// Text serialization (golden-test format)
//
//   event <id> <thread|init> <R|W|U|F> [<cell> r=<v> w=<v>] [<flavor>]
//   po <a> <b>    rf <a> <b>    co <a> <b>    rmw <a> <b>    mo <a> <b>

inline std::string exec_to_text(const Execution& x) {
  std::ostringstream out;
  for (const auto& e : x.events) {
    out << "event " << e.id << " " << (e.is_init() ? "init" : "P" + std::to_string(e.tid));
    switch (e.op) {
      case Op::R: out << " R " << e.loc.str() << " r=" << e.rval; break;
      case Op::W: out << " W " << e.loc.str() << " w=" << e.wval; break;
      case Op::U: out << " U " << e.loc.str() << " r=" << e.rval << " w=" << e.wval; break;
      case Op::F: out << " F " << fence_name(e.flavor); break;
    }
    if (e.is_mem() && e.flavor == Flavor::Acquire) out << " acq";
    if (e.is_mem() && e.flavor == Flavor::Release) out << " rel";
    out << "\n";
  }
  auto dump = [&](const char* name, const Relation& r) {
    for (auto [a, b] : r.pairs()) out << name << " " << a << " " << b << "\n";
  };
  dump("po", x.po);
  dump("rf", x.rf);
  dump("co", x.co);
  dump("rmw", x.rmw);
  if (x.mo) dump("mo", *x.mo);
  return out.str();
}

}  // namespace remap

#endif  // REMAP_EXEC_HPP_
