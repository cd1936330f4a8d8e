#ifndef REMAP_LITMUS_HPP_
#define REMAP_LITMUS_HPP_

#include <cctype>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "remap/error.hpp"

namespace remap {

enum class Arch { X86, ARMv7, ARMv7MCA, ARMv8, SCREF };

inline const char* arch_name(Arch a) {
  switch (a) {
    case Arch::X86: return "x86";
    case Arch::ARMv7: return "armv7";
    case Arch::ARMv7MCA: return "armv7mca";
    case Arch::ARMv8: return "armv8";
    case Arch::SCREF: return "sc";
  }
  return "?";
}

inline std::optional<Arch> arch_from_name(const std::string& s) {
  if (s == "x86") return Arch::X86;
  if (s == "armv7") return Arch::ARMv7;
  if (s == "armv7mca") return Arch::ARMv7MCA;
  if (s == "armv8") return Arch::ARMv8;
  if (s == "sc") return Arch::SCREF;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Expressions over registers and constants

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Op { Const, Reg, Add, Sub, Mul, Eq, Ne, Le, Lt, Ge, Gt };
  Op op;
  int64_t k = 0;    // Const
  std::string reg;  // Reg
  ExprPtr lhs, rhs;

  static ExprPtr constant(int64_t v) {
    auto e = std::make_shared<Expr>();
    e->op = Op::Const;
    e->k = v;
    return e;
  }
  static ExprPtr regref(std::string r) {
    auto e = std::make_shared<Expr>();
    e->op = Op::Reg;
    e->reg = std::move(r);
    return e;
  }
  static ExprPtr binary(Op op, ExprPtr l, ExprPtr r) {
    auto e = std::make_shared<Expr>();
    e->op = op;
    e->lhs = std::move(l);
    e->rhs = std::move(r);
    return e;
  }
};

inline void expr_regs(const ExprPtr& e, std::set<std::string>& out) {
  if (!e) return;
  if (e->op == Expr::Op::Reg) out.insert(e->reg);
  expr_regs(e->lhs, out);
  expr_regs(e->rhs, out);
}

inline int64_t eval_expr(const ExprPtr& e, const std::map<std::string, int64_t>& regs) {
  using Op = Expr::Op;
  switch (e->op) {
    case Op::Const: return e->k;
    case Op::Reg: {
      auto it = regs.find(e->reg);
      return it == regs.end() ? 0 : it->second;
    }
    case Op::Add: return eval_expr(e->lhs, regs) + eval_expr(e->rhs, regs);
    case Op::Sub: return eval_expr(e->lhs, regs) - eval_expr(e->rhs, regs);
    case Op::Mul: return eval_expr(e->lhs, regs) * eval_expr(e->rhs, regs);
    case Op::Eq: return eval_expr(e->lhs, regs) == eval_expr(e->rhs, regs);
    case Op::Ne: return eval_expr(e->lhs, regs) != eval_expr(e->rhs, regs);
    case Op::Le: return eval_expr(e->lhs, regs) <= eval_expr(e->rhs, regs);
    case Op::Lt: return eval_expr(e->lhs, regs) < eval_expr(e->rhs, regs);
    case Op::Ge: return eval_expr(e->lhs, regs) >= eval_expr(e->rhs, regs);
    case Op::Gt: return eval_expr(e->lhs, regs) > eval_expr(e->rhs, regs);
  }
  return 0;
}

/// Constant-folds an expression; registers stay symbolic.
inline ExprPtr fold_expr(const ExprPtr& e) {
  using Op = Expr::Op;
  if (!e || e->op == Op::Const || e->op == Op::Reg) return e;
  ExprPtr l = fold_expr(e->lhs), r = fold_expr(e->rhs);
  if (l->op == Op::Const && r->op == Op::Const) {
    std::map<std::string, int64_t> none;
    return Expr::constant(eval_expr(Expr::binary(e->op, l, r), none));
  }
  // x*0 folds even with x symbolic; the register read is still a dependency,
  // which the dependency analysis tracks from the unfolded form.
  if (e->op == Op::Mul) {
    if ((l->op == Op::Const && l->k == 0) || (r->op == Op::Const && r->k == 0))
      return Expr::constant(0);
  }
  if (l == e->lhs && r == e->rhs) return e;
  return Expr::binary(e->op, l, r);
}

inline std::string expr_to_string(const ExprPtr& e) {
  using Op = Expr::Op;
  auto bin = [&](const char* op) {
    return "(" + expr_to_string(e->lhs) + " " + op + " " + expr_to_string(e->rhs) + ")";
  };
  switch (e->op) {
    case Op::Const: return std::to_string(e->k);
    case Op::Reg: return e->reg;
    case Op::Add: return bin("+");
    case Op::Sub: return bin("-");
    case Op::Mul: return bin("*");
    case Op::Eq: return bin("==");
    case Op::Ne: return bin("!=");
    case Op::Le: return bin("<=");
    case Op::Lt: return bin("<");
    case Op::Ge: return bin(">=");
    case Op::Gt: return bin(">");
  }
  return "?";
}

inline bool expr_equal(const ExprPtr& a, const ExprPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->op != b->op) return false;
  switch (a->op) {
    case Expr::Op::Const: return a->k == b->k;
    case Expr::Op::Reg: return a->reg == b->reg;
    default: return expr_equal(a->lhs, b->lhs) && expr_equal(a->rhs, b->rhs);
  }
}

// ---------------------------------------------------------------------------
// Locations

/// A concrete memory cell: a scalar name or one array slot.
struct Cell {
  std::string base;
  std::optional<int64_t> index;

  auto operator<=>(const Cell&) const = default;

  std::string str() const {
    return index ? base + "[" + std::to_string(*index) + "]" : base;
  }
};

/// A location expression as written: base name plus optional index expression.
struct LocExpr {
  std::string base;
  ExprPtr index;  // null for scalars

  bool is_scalar() const { return !index; }

  /// Concrete cell when the (folded) index is constant.
  std::optional<Cell> static_cell() const {
    if (!index) return Cell{base, std::nullopt};
    ExprPtr f = fold_expr(index);
    if (f->op == Expr::Op::Const) return Cell{base, f->k};
    return std::nullopt;
  }

  std::string str() const {
    return index ? base + "[" + expr_to_string(index) + "]" : base;
  }
};

/// Syntactically identical after constant folding.
inline bool must_alias(const LocExpr& a, const LocExpr& b) {
  if (a.base != b.base) return false;
  if (!a.index && !b.index) return true;
  if (!a.index || !b.index) return false;
  return expr_equal(fold_expr(a.index), fold_expr(b.index));
}

/// Same base array, or either side unindexed with the same name.
inline bool may_alias(const LocExpr& a, const LocExpr& b) {
  if (a.base != b.base) return false;
  if (!a.index || !b.index) return true;
  ExprPtr fa = fold_expr(a.index), fb = fold_expr(b.index);
  if (fa->op == Expr::Op::Const && fb->op == Expr::Op::Const) return fa->k == fb->k;
  return true;
}

// ---------------------------------------------------------------------------
// Instructions

enum class IKind { Load, Store, Rmw, Fence, Branch, Label, RegOp };

enum class Flavor {
  Plain,    // ldr / str / mov / plain rmw
  Acquire,  // ldar (ARMv8 loads), rmw_A (ARMv8 rmw)
  Release,  // stlr (ARMv8 stores), rmw_L (ARMv8 rmw, release or stronger)
  Mfence,
  Dmb,      // ARMv7 full fence
  Isb,
  DmbFull,
  DmbLd,
  DmbSt,
};

enum class C11 { None, NA, RLX, ACQ, REL, SC };

inline const char* c11_name(C11 a) {
  switch (a) {
    case C11::None: return "";
    case C11::NA: return "na";
    case C11::RLX: return "rlx";
    case C11::ACQ: return "acq";
    case C11::REL: return "rel";
    case C11::SC: return "sc";
  }
  return "";
}

struct Instruction {
  IKind kind;
  Flavor flavor = Flavor::Plain;
  C11 c11 = C11::None;

  std::string dest;          // Load/Rmw/RegOp destination register
  LocExpr loc;               // Load/Store/Rmw
  ExprPtr value;             // Store value / RegOp value
  ExprPtr expected, newval;  // Rmw: CAS has both, fetch-add has newval only (the addend)
  ExprPtr cond;              // Branch condition
  std::string target;        // Branch target label
  std::string label;         // Label name

  bool is_cas() const { return kind == IKind::Rmw && expected != nullptr; }

  bool is_access() const {
    return kind == IKind::Load || kind == IKind::Store || kind == IKind::Rmw;
  }
  bool is_fence() const { return kind == IKind::Fence; }

  bool reads_memory() const { return kind == IKind::Load || kind == IKind::Rmw; }
  bool writes_memory() const { return kind == IKind::Store || kind == IKind::Rmw; }

  /// Registers read by the address expression.
  std::set<std::string> addr_reads() const {
    std::set<std::string> out;
    if (is_access()) expr_regs(loc.index, out);
    return out;
  }

  /// Registers read by value-like expressions (stored value, CAS operands,
  /// branch condition, regop body).
  std::set<std::string> value_reads() const {
    std::set<std::string> out;
    expr_regs(value, out);
    expr_regs(expected, out);
    expr_regs(newval, out);
    expr_regs(cond, out);
    return out;
  }
};

struct Thread {
  std::string name;
  std::vector<Instruction> code;
};

// ---------------------------------------------------------------------------
// Outcome predicate

struct Outcome {
  enum class Kind { Atom, And, Or };
  Kind kind = Kind::Atom;
  // Atom: either register (tid, reg) or cell, compared to val.
  bool is_reg = false;
  int tid = -1;
  std::string reg;
  Cell cell;
  int64_t val = 0;
  std::shared_ptr<const Outcome> lhs, rhs;
};

// ---------------------------------------------------------------------------
// Program

struct Program {
  Arch arch = Arch::SCREF;
  std::map<Cell, int64_t> init;
  std::vector<Thread> threads;
  std::shared_ptr<const Outcome> outcome;  // null when absent

  const Thread& thread(int tid) const { return threads[tid]; }
  int num_threads() const { return static_cast<int>(threads.size()); }
};

// ---------------------------------------------------------------------------
// Instruction legality per architecture

inline bool legal_for_arch(const Instruction& in, Arch arch) {
  switch (in.kind) {
    case IKind::Branch:
    case IKind::Label:
    case IKind::RegOp:
      return true;
    case IKind::Load:
    case IKind::Store:
      if (in.flavor == Flavor::Plain) return true;
      return arch == Arch::ARMv8;  // ldar / stlr
    case IKind::Rmw:
      if (in.flavor == Flavor::Plain) return true;
      return arch == Arch::ARMv8;  // rmw_A / rmw_L
    case IKind::Fence:
      switch (in.flavor) {
        case Flavor::Mfence: return arch == Arch::X86;
        case Flavor::Dmb: return arch == Arch::ARMv7 || arch == Arch::ARMv7MCA;
        case Flavor::Isb:
          return arch == Arch::ARMv7 || arch == Arch::ARMv7MCA || arch == Arch::ARMv8;
        case Flavor::DmbFull:
        case Flavor::DmbLd:
        case Flavor::DmbSt:
          return arch == Arch::ARMv8;
        default: return false;
      }
  }
  return false;
}

inline std::string fence_name(Flavor f) {
  switch (f) {
    case Flavor::Mfence: return "mfence";
    case Flavor::Dmb: return "dmb";
    case Flavor::Isb: return "isb";
    case Flavor::DmbFull: return "dmbfull";
    case Flavor::DmbLd: return "dmbld";
    case Flavor::DmbSt: return "dmbst";
    default: return "?";
  }
}

// ---------------------------------------------------------------------------
// Parser
//
// Line-oriented grammar:
//   arch <name>
//   init X=0 Y[1]=0            (optional)
//   thread <name> { stmt; ... }   (may span lines)
//   exists (P0:r1=1 /\ X=2)       (optional)
// Statements: r = X | X = e | r = rmw(X, e1, e2) | r = rmw(X, e)
//   | mfence | dmb | isb | dmbld | dmbst | dmbfull | r = e
//   | if e goto L | L:
// ARMv8 access flavors: "r = X @acq" (ldar), "X = e @rel" (stlr),
// rmw "@acq" / "@rel". C11 annotations: @@na @@rlx @@acq @@rel @@sc.
// Comments run from '#' to end of line. Identifiers starting with an
// upper-case letter are locations; others are registers.

namespace detail {

class Lexer {
 public:
  explicit Lexer(const std::string& text) : text_(&text) {}

  struct Pos {
    int line = 1, col = 1;
  };

  struct State {
    size_t i;
    Pos pos;
  };
  State save() const { return {i_, pos_}; }
  void restore(State s) {
    i_ = s.i;
    pos_ = s.pos;
  }

  void skip_ws() {
    while (i_ < size()) {
      char c = at(i_);
      if (c == '#') {
        while (i_ < size() && at(i_) != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  bool eof() {
    skip_ws();
    return i_ >= size();
  }

  char peek() {
    skip_ws();
    return i_ < size() ? at(i_) : '\0';
  }

  bool try_consume(const std::string& tok) {
    skip_ws();
    if (text_->compare(i_, tok.size(), tok) == 0) {
      // Word tokens must not run into a longer identifier.
      if (std::isalnum(static_cast<unsigned char>(tok.back())) && i_ + tok.size() < size()) {
        char next = at(i_ + tok.size());
        if (std::isalnum(static_cast<unsigned char>(next)) || next == '_') return false;
      }
      for (size_t k = 0; k < tok.size(); ++k) advance();
      return true;
    }
    return false;
  }

  void expect(const std::string& tok, const std::string& what) {
    if (!try_consume(tok)) fail("expected '" + tok + "' " + what);
  }

  std::string ident() {
    skip_ws();
    size_t start = i_;
    while (i_ < size() &&
           (std::isalnum(static_cast<unsigned char>(at(i_))) || at(i_) == '_'))
      advance();
    if (start == i_) fail("expected identifier");
    return text_->substr(start, i_ - start);
  }

  std::optional<std::string> try_ident() {
    skip_ws();
    if (i_ < size() &&
        (std::isalpha(static_cast<unsigned char>(at(i_))) || at(i_) == '_'))
      return ident();
    return std::nullopt;
  }

  int64_t number() {
    skip_ws();
    bool neg = false;
    if (i_ < size() && at(i_) == '-') {
      neg = true;
      advance();
    }
    size_t start = i_;
    while (i_ < size() && std::isdigit(static_cast<unsigned char>(at(i_)))) advance();
    if (start == i_) fail("expected number");
    int64_t v = std::stoll(text_->substr(start, i_ - start));
    return neg ? -v : v;
  }

  [[noreturn]] void fail(const std::string& msg) { throw SyntaxError(pos_.line, pos_.col, msg); }

  Pos position() {
    skip_ws();
    return pos_;
  }

 private:
  size_t size() const { return text_->size(); }
  char at(size_t i) const { return (*text_)[i]; }

  void advance() {
    if (at(i_) == '\n') {
      pos_.line++;
      pos_.col = 1;
    } else {
      pos_.col++;
    }
    i_++;
  }

  const std::string* text_;
  size_t i_ = 0;
  Pos pos_;
};

class Parser {
 public:
  explicit Parser(const std::string& text) : lx_(text) {}

  Program parse() {
    Program p;
    lx_.expect("arch", "at start of file");
    std::string aname = lx_.ident();
    auto arch = arch_from_name(aname);
    if (!arch) lx_.fail("unknown arch '" + aname + "'");
    p.arch = *arch;

    if (lx_.try_consume("init")) {
      while (true) {
        lx_.skip_ws();
        auto save = lx_.save();
        auto id = lx_.try_ident();
        if (!id || !is_location(*id)) {
          lx_.restore(save);
          break;
        }
        Cell cell{*id, std::nullopt};
        if (lx_.try_consume("[")) {
          cell.index = lx_.number();
          lx_.expect("]", "after array index");
        }
        lx_.expect("=", "in init");
        p.init[cell] = lx_.number();
      }
    }

    while (lx_.try_consume("thread")) {
      Thread t;
      t.name = lx_.ident();
      lx_.expect("{", "after thread name");
      while (!lx_.try_consume("}")) t.code.push_back(statement());
      p.threads.push_back(std::move(t));
    }

    if (lx_.try_consume("exists")) {
      lx_.expect("(", "after exists");
      p.outcome = outcome_or(p);
      lx_.expect(")", "closing outcome");
    }
    if (!lx_.eof()) lx_.fail("trailing input");

    finish(p);
    return p;
  }

 private:
  static bool is_location(const std::string& id) {
    return std::isupper(static_cast<unsigned char>(id[0]));
  }

  Instruction statement() {
    for (Flavor f : {Flavor::Mfence, Flavor::DmbFull, Flavor::DmbLd, Flavor::DmbSt, Flavor::Dmb,
                     Flavor::Isb}) {
      if (lx_.try_consume(fence_name(f))) {
        lx_.try_consume(";");
        Instruction in;
        in.kind = IKind::Fence;
        in.flavor = f;
        return in;
      }
    }
    if (lx_.try_consume("if")) {
      Instruction in;
      in.kind = IKind::Branch;
      in.cond = expr();
      lx_.expect("goto", "in branch");
      in.target = lx_.ident();
      lx_.try_consume(";");
      return in;
    }

    auto id = lx_.try_ident();
    if (!id) lx_.fail("expected statement");

    if (lx_.try_consume(":")) {
      Instruction in;
      in.kind = IKind::Label;
      in.label = *id;
      return in;
    }

    if (is_location(*id)) {
      // store:  X = e  /  X[e] = e
      Instruction in;
      in.kind = IKind::Store;
      in.loc = loc_expr(*id);
      lx_.expect("=", "in store");
      in.value = expr();
      annotations(in);
      lx_.try_consume(";");
      return in;
    }

    // register destination
    Instruction in;
    in.dest = *id;
    lx_.expect("=", "after register");
    if (lx_.try_consume("rmw")) {
      in.kind = IKind::Rmw;
      lx_.expect("(", "after rmw");
      std::string base = lx_.ident();
      if (!is_location(base)) lx_.fail("rmw needs a location");
      in.loc = loc_expr(base);
      lx_.expect(",", "in rmw");
      ExprPtr e1 = expr();
      if (lx_.try_consume(",")) {
        in.expected = e1;  // CAS
        in.newval = expr();
      } else {
        in.newval = e1;  // fetch-add
      }
      lx_.expect(")", "closing rmw");
      annotations(in);
      lx_.try_consume(";");
      return in;
    }

    lx_.skip_ws();
    auto save = lx_.save();
    auto rhs_id = lx_.try_ident();
    if (rhs_id && is_location(*rhs_id) && !starts_arith()) {
      // load: r = X / r = X[e]
      in.kind = IKind::Load;
      in.loc = loc_expr(*rhs_id);
      if (starts_arith()) {  // e.g. "r = X[0] + 1" is not a load
        lx_.restore(save);
        in.kind = IKind::RegOp;
        in.loc = {};
        in.value = expr();
      }
      annotations(in);
      lx_.try_consume(";");
      return in;
    }
    lx_.restore(save);
    in.kind = IKind::RegOp;
    in.value = expr();
    annotations(in);
    lx_.try_consume(";");
    return in;
  }

  bool starts_arith() {
    char c = lx_.peek();
    return c == '+' || c == '-' || c == '*' || c == '=' || c == '!' || c == '<' || c == '>';
  }

  LocExpr loc_expr(const std::string& base) {
    LocExpr le;
    le.base = base;
    if (lx_.try_consume("[")) {
      le.index = expr();
      lx_.expect("]", "after array index");
    }
    return le;
  }

  void annotations(Instruction& in) {
    while (true) {
      if (lx_.try_consume("@@")) {
        std::string a = lx_.ident();
        if (a == "na") in.c11 = C11::NA;
        else if (a == "rlx") in.c11 = C11::RLX;
        else if (a == "acq") in.c11 = C11::ACQ;
        else if (a == "rel") in.c11 = C11::REL;
        else if (a == "sc") in.c11 = C11::SC;
        else lx_.fail("unknown c11 annotation '" + a + "'");
      } else if (lx_.try_consume("@")) {
        std::string a = lx_.ident();
        if (a == "acq") in.flavor = Flavor::Acquire;
        else if (a == "rel") in.flavor = Flavor::Release;
        else if (a == "acqrel") in.flavor = Flavor::Release;
        else lx_.fail("unknown flavor '" + a + "'");
      } else {
        break;
      }
    }
  }

  // expr := sum (cmp sum)?
  ExprPtr expr() {
    ExprPtr l = sum();
    using Op = Expr::Op;
    if (lx_.try_consume("==")) return Expr::binary(Op::Eq, l, sum());
    if (lx_.try_consume("!=")) return Expr::binary(Op::Ne, l, sum());
    if (lx_.try_consume("<=")) return Expr::binary(Op::Le, l, sum());
    if (lx_.try_consume(">=")) return Expr::binary(Op::Ge, l, sum());
    if (lx_.try_consume("<")) return Expr::binary(Op::Lt, l, sum());
    if (lx_.try_consume(">")) return Expr::binary(Op::Gt, l, sum());
    return l;
  }

  ExprPtr sum() {
    ExprPtr l = term();
    while (true) {
      if (lx_.try_consume("+")) l = Expr::binary(Expr::Op::Add, l, term());
      else if (lx_.try_consume("-")) l = Expr::binary(Expr::Op::Sub, l, term());
      else break;
    }
    return l;
  }

  ExprPtr term() {
    ExprPtr l = factor();
    while (lx_.try_consume("*")) l = Expr::binary(Expr::Op::Mul, l, factor());
    return l;
  }

  ExprPtr factor() {
    if (lx_.try_consume("(")) {
      ExprPtr e = expr();
      lx_.expect(")", "closing parenthesis");
      return e;
    }
    auto id = lx_.try_ident();
    if (id) {
      if (is_location(*id)) lx_.fail("location '" + *id + "' in expression");
      return Expr::regref(*id);
    }
    return Expr::constant(lx_.number());
  }

  std::shared_ptr<const Outcome> outcome_or(const Program& p) {
    auto l = outcome_and(p);
    while (lx_.try_consume("\\/")) {
      auto node = std::make_shared<Outcome>();
      node->kind = Outcome::Kind::Or;
      node->lhs = l;
      node->rhs = outcome_and(p);
      l = node;
    }
    return l;
  }

  std::shared_ptr<const Outcome> outcome_and(const Program& p) {
    auto l = outcome_atom(p);
    while (lx_.try_consume("/\\")) {
      auto node = std::make_shared<Outcome>();
      node->kind = Outcome::Kind::And;
      node->lhs = l;
      node->rhs = outcome_atom(p);
      l = node;
    }
    return l;
  }

  std::shared_ptr<const Outcome> outcome_atom(const Program& p) {
    if (lx_.try_consume("(")) {
      auto e = outcome_or(p);
      lx_.expect(")", "closing parenthesis in outcome");
      return e;
    }
    auto node = std::make_shared<Outcome>();
    node->kind = Outcome::Kind::Atom;
    std::string id = lx_.ident();
    if (lx_.try_consume(":")) {
      node->is_reg = true;
      node->tid = -1;
      for (int t = 0; t < p.num_threads(); ++t)
        if (p.threads[t].name == id) node->tid = t;
      if (node->tid < 0) lx_.fail("unknown thread '" + id + "' in outcome");
      node->reg = lx_.ident();
    } else {
      node->is_reg = false;
      node->cell.base = id;
      if (lx_.try_consume("[")) {
        node->cell.index = lx_.number();
        lx_.expect("]", "after array index");
      }
    }
    lx_.expect("=", "in outcome atom");
    node->val = lx_.number();
    return node;
  }

  /// Post-parse checks: arch legality, label resolution, init defaults.
  void finish(Program& p) {
    for (int tid = 0; tid < p.num_threads(); ++tid) {
      std::set<std::string> labels;
      for (const auto& in : p.threads[tid].code)
        if (in.kind == IKind::Label) labels.insert(in.label);
      for (const auto& in : p.threads[tid].code) {
        if (!legal_for_arch(in, p.arch))
          throw Error(Errc::ArchMismatch, "instruction illegal for arch " +
                                              std::string(arch_name(p.arch)) + " in thread " +
                                              p.threads[tid].name);
        if (in.kind == IKind::Branch && !labels.count(in.target))
          throw Error(Errc::UnresolvedLabel, "unresolved label '" + in.target + "'");
        if (in.is_access()) {
          if (auto cell = in.loc.static_cell(); cell && !p.init.count(*cell)) p.init[*cell] = 0;
          if (in.loc.index && !in.loc.static_cell() && !p.init.count(Cell{in.loc.base, 0}))
            p.init[Cell{in.loc.base, 0}] = 0;  // dynamic index: 0th slot always exists
        }
      }
    }
  }

  Lexer lx_;
};

}  // namespace detail

inline Program parse(const std::string& text) { return detail::Parser(text).parse(); }

// ---------------------------------------------------------------------------
// Emitter

inline std::string emit_instruction(const Instruction& in) {
  std::string s;
  switch (in.kind) {
    case IKind::Load: s = in.dest + " = " + in.loc.str(); break;
    case IKind::Store: s = in.loc.str() + " = " + expr_to_string(in.value); break;
    case IKind::Rmw:
      s = in.dest + " = rmw(" + in.loc.str();
      if (in.expected) s += ", " + expr_to_string(in.expected);
      s += ", " + expr_to_string(in.newval) + ")";
      break;
    case IKind::Fence: s = fence_name(in.flavor); break;
    case IKind::Branch: s = "if " + expr_to_string(in.cond) + " goto " + in.target; break;
    case IKind::Label: return in.label + ":";
    case IKind::RegOp: s = in.dest + " = " + expr_to_string(in.value); break;
  }
  if (in.kind == IKind::Load && in.flavor == Flavor::Acquire) s += " @acq";
  if (in.kind == IKind::Store && in.flavor == Flavor::Release) s += " @rel";
  if (in.kind == IKind::Rmw && in.flavor == Flavor::Acquire) s += " @acq";
  if (in.kind == IKind::Rmw && in.flavor == Flavor::Release) s += " @rel";
  if (in.c11 != C11::None) s += std::string(" @@") + c11_name(in.c11);
  return s + ";";
}

inline std::string emit_outcome(const Outcome& o, const Program& p) {
  switch (o.kind) {
    case Outcome::Kind::Atom: {
      std::string lhs = o.is_reg ? (p.threads[o.tid].name + ":" + o.reg) : o.cell.str();
      return lhs + "=" + std::to_string(o.val);
    }
    case Outcome::Kind::And:
      return "(" + emit_outcome(*o.lhs, p) + " /\\ " + emit_outcome(*o.rhs, p) + ")";
    case Outcome::Kind::Or:
      return "(" + emit_outcome(*o.lhs, p) + " \\/ " + emit_outcome(*o.rhs, p) + ")";
  }
  return "";
}

/// Pretty-prints a program; parse(emit(p)) is structurally equal to p.
inline std::string emit(const Program& p) {
  std::ostringstream out;
  out << "arch " << arch_name(p.arch) << "\n";
  if (!p.init.empty()) {
    out << "init";
    for (const auto& [cell, v] : p.init) out << " " << cell.str() << "=" << v;
    out << "\n";
  }
  for (int tid = 0; tid < p.num_threads(); ++tid) {
    const Thread& t = p.threads[tid];
    out << "thread " << t.name << " {\n";
    for (const auto& in : t.code) out << "  " << emit_instruction(in) << "\n";
    out << "}\n";
  }
  if (p.outcome) out << "exists (" << emit_outcome(*p.outcome, p) << ")\n";
  return out.str();
}

inline bool program_equal(const Program& a, const Program& b) {
  return emit(a) == emit(b);
}

// ---------------------------------------------------------------------------
// Control-flow graph

/// Per-thread CFG over instruction node ids. `order` is the linear layout
/// used for emission; edges are derived from it plus branch targets.
struct Cfg {
  std::vector<Instruction> instrs;  // indexed by node id; grows under rewrites
  std::vector<int> order;           // alive nodes in layout order
  int entry = -1;                   // first node, -1 when empty

  std::vector<std::vector<int>> succ, pred;

  bool alive(int node) const {
    for (int x : order)
      if (x == node) return true;
    return false;
  }

  void rebuild_edges() {
    succ.assign(instrs.size(), {});
    pred.assign(instrs.size(), {});
    entry = order.empty() ? -1 : order[0];
    std::map<std::string, int> label_at;
    for (int node : order)
      if (instrs[node].kind == IKind::Label) label_at[instrs[node].label] = node;
    for (size_t k = 0; k < order.size(); ++k) {
      int node = order[k];
      const Instruction& in = instrs[node];
      if (k + 1 < order.size()) add_edge(node, order[k + 1]);
      if (in.kind == IKind::Branch) {
        auto it = label_at.find(in.target);
        if (it == label_at.end())
          throw Error(Errc::UnresolvedLabel, "unresolved label '" + in.target + "'");
        add_edge(node, it->second);
      }
    }
  }

  void add_edge(int a, int b) {
    for (int x : succ[a])
      if (x == b) return;
    succ[a].push_back(b);
    pred[b].push_back(a);
  }

  /// Layout as an instruction sequence (for emission back into a Thread).
  std::vector<Instruction> to_code() const {
    std::vector<Instruction> out;
    for (int node : order) out.push_back(instrs[node]);
    return out;
  }

  bool has_back_edge() const {
    // order positions; a branch to an earlier or equal position is a back edge
    std::map<int, int> pos;
    for (size_t k = 0; k < order.size(); ++k) pos[order[k]] = static_cast<int>(k);
    for (int node : order)
      for (int s : succ[node])
        if (pos.at(s) <= pos.at(node)) return true;
    return false;
  }
};

inline Cfg build_cfg(const Program& p, int tid) {
  Cfg g;
  g.instrs = p.threads[tid].code;
  for (int i = 0; i < static_cast<int>(g.instrs.size()); ++i) g.order.push_back(i);
  g.rebuild_edges();
  return g;
}

// ---------------------------------------------------------------------------
// Dependency derivation
//
// Dependencies are syntactic register dataflow: a load taints its destination
// register; regops propagate taints; addr/data/ctrl record which loads flow
// into address expressions, store values, and branch conditions. False
// dependencies (e.g. r*0) are kept.

struct ThreadDeps {
  std::set<std::pair<int, int>> addr, data, ctrl, ctrl_isb;
};

using DepInfo = std::vector<ThreadDeps>;

namespace detail {

using Taint = std::set<int>;                    // set of load/rmw node ids
using TaintEnv = std::map<std::string, Taint>;  // register -> taints

inline Taint taint_of(const TaintEnv& env, const std::set<std::string>& regs) {
  Taint t;
  for (const auto& r : regs) {
    auto it = env.find(r);
    if (it != env.end()) t.insert(it->second.begin(), it->second.end());
  }
  return t;
}

inline bool env_join(TaintEnv& into, const TaintEnv& from) {
  bool changed = false;
  for (const auto& [r, t] : from) {
    auto& dst = into[r];
    for (int x : t)
      if (dst.insert(x).second) changed = true;
  }
  return changed;
}

}  // namespace detail

/// Reach over a CFG avoiding a node set (nonempty paths; endpoints must not
/// be avoided).
inline bool cfg_reach_avoiding(const Cfg& g, int i, int j, const std::set<int>& avoid) {
  if (avoid.count(i) || avoid.count(j)) return false;
  std::vector<int> stack;
  std::set<int> seen;
  for (int s : g.succ[i])
    if (!avoid.count(s) && seen.insert(s).second) stack.push_back(s);
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    if (u == j) return true;
    for (int s : g.succ[u])
      if (!avoid.count(s) && seen.insert(s).second) stack.push_back(s);
  }
  return false;
}

inline bool cfg_reach(const Cfg& g, int i, int j) { return cfg_reach_avoiding(g, i, j, {}); }

/// Program-level syntactic dependencies per thread. ctrl and ctrl_isb are
/// suffix-closed under reachability.
inline DepInfo derive_deps(const Program& p) {
  DepInfo out;
  for (int tid = 0; tid < p.num_threads(); ++tid) {
    Cfg g = build_cfg(p, tid);
    int n = static_cast<int>(g.instrs.size());
    ThreadDeps deps;

    // taint environment at entry of each node, to fixpoint
    std::vector<detail::TaintEnv> at(n);
    bool changed = true;
    while (changed) {
      changed = false;
      for (int node : g.order) {
        detail::TaintEnv env = at[node];
        const Instruction& in = g.instrs[node];
        if (in.reads_memory()) env[in.dest] = {node};
        else if (in.kind == IKind::RegOp) env[in.dest] = detail::taint_of(at[node], in.value_reads());
        for (int s : g.succ[node])
          if (detail::env_join(at[s], env)) changed = true;
      }
    }

    std::set<int> isbs;
    for (int node : g.order)
      if (g.instrs[node].kind == IKind::Fence && g.instrs[node].flavor == Flavor::Isb)
        isbs.insert(node);

    for (int node : g.order) {
      const Instruction& in = g.instrs[node];
      if (in.is_access()) {
        for (int src : detail::taint_of(at[node], in.addr_reads())) deps.addr.insert({src, node});
        if (in.writes_memory())
          for (int src : detail::taint_of(at[node], in.value_reads())) deps.data.insert({src, node});
      }
      if (in.kind == IKind::Branch) {
        detail::Taint t = detail::taint_of(at[node], in.value_reads());
        if (t.empty()) continue;
        for (int tgt : g.order) {
          if (!cfg_reach(g, node, tgt)) continue;
          for (int src : t) deps.ctrl.insert({src, tgt});
          // ctrl_isb: an isb on every path from the branch to the target
          bool every_path = !cfg_reach_avoiding(g, node, tgt, isbs);
          if (every_path)
            for (int src : t) deps.ctrl_isb.insert({src, tgt});
        }
      }
    }
    // suffix-close ctrl_isb (ctrl is suffix-closed by construction)
    bool more = true;
    while (more) {
      more = false;
      for (auto [src, j] : std::set<std::pair<int, int>>(deps.ctrl_isb.begin(), deps.ctrl_isb.end()))
        for (int k : g.order)
          if (cfg_reach(g, j, k) && deps.ctrl_isb.insert({src, k}).second) more = true;
    }
    out.push_back(std::move(deps));
  }
  return out;
}

}  // namespace remap

#endif  // REMAP_LITMUS_HPP_
