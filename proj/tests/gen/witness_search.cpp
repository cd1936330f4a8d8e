// Derives a growth witness for every unsafe reordering cell and writes it
// into the corpus, so the acceptance run can replay them deterministically.
// Candidates come from a bank of message-passing / load-buffering /
// store-buffering shapes with the cell's pair embedded, plus the dependency
// contexts for the store-moving rows; a random search backs them up.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <vector>

#include "remap/mapping.hpp"

using namespace remap;

namespace {

struct Candidate {
  std::string text;
  int tid, node;
};

std::string flav(TClass c) {
  switch (c) {
    case TClass::W: return "W";
    case TClass::R: return "R";
    case TClass::L: return "L";
    case TClass::A: return "A";
    case TClass::DmbFull: return "dmbfull";
    case TClass::DmbLd: return "dmbld";
    case TClass::DmbSt: return "dmbst";
  }
  return "?";
}

bool is_fence(TClass c) {
  return c == TClass::DmbFull || c == TClass::DmbLd || c == TClass::DmbSt;
}
bool is_load(TClass c) { return c == TClass::R || c == TClass::A; }
bool is_store(TClass c) { return c == TClass::W || c == TClass::L; }

std::string instr(TClass c, const std::string& loc, const std::string& reg, int val) {
  switch (c) {
    case TClass::W: return loc + " = " + std::to_string(val) + ";";
    case TClass::L: return loc + " = " + std::to_string(val) + " @rel;";
    case TClass::R: return reg + " = " + loc + ";";
    case TClass::A: return reg + " = " + loc + " @acq;";
    case TClass::DmbFull: return "dmbfull;";
    case TClass::DmbLd: return "dmbld;";
    case TClass::DmbSt: return "dmbst;";
  }
  return ";";
}

// the pair always sits on locations P (first element) and Q (second),
// reading into w0/w1 when loads
std::vector<Candidate> bank(TClass a, TClass b) {
  std::vector<Candidate> out;
  std::string ia = instr(a, "P", "w0", 1);
  std::string ib = instr(b, "Q", "w1", 1);

  if (is_store(a) || (is_fence(a) && is_store(b))) {
    // writer-side: the pair orders two stores the reader checks in reverse
    std::string pre = is_fence(a) ? "P = 1; " : "";
    std::string post = is_fence(b) ? " Q = 1;" : "";
    int site = is_fence(a) ? 1 : 0;
    out.push_back({"arch armv8\nthread T0 { " + pre + ia + " " + ib + post +
                       " }\nthread T1 { r1 = Q; dmbld; r2 = P; }\n"
                       "exists (T1:r1=1 /\\ T1:r2=0)\n",
                   0, site});
  }
  if (is_load(b) || (is_fence(b) && is_load(a)) || (is_fence(a) && is_load(b))) {
    // reader-side: the pair orders two loads against a fenced writer
    std::string pre = is_fence(a) ? "r0 = P; " : "";
    int site = is_fence(a) ? 1 : 0;
    std::string first = is_fence(a) ? ia : instr(a, "P", "r0", 1);
    std::string second = is_load(b) ? instr(b, "Q", "r1", 1) : ib + " r1 = Q;";
    out.push_back({"arch armv8\nthread T0 { Q = 1; dmbfull; P = 1; }\nthread T1 { " + pre +
                       first + " " + second +
                       " }\n"
                       "exists (T1:r0=1 /\\ T1:r1=0)\n",
                   1, site});
  }
  if (is_load(a) && is_store(b)) {
    // load-buffering: the pair orders a read before a write
    out.push_back({"arch armv8\nthread T0 { " + instr(a, "P", "r0", 1) + " " + ib +
                       " }\nthread T1 { r1 = Q; dmbfull; P = 1; }\n"
                       "exists (T0:r0=1 /\\ T1:r1=1)\n",
                   0, 0});
  }
  if (is_fence(a) && is_store(b)) {
    // load-buffering with the fence carrying the order
    out.push_back({"arch armv8\nthread T0 { r0 = P; " + ia + " " + ib +
                       " }\nthread T1 { r1 = Q; dmbfull; P = 1; }\n"
                       "exists (T0:r0=1 /\\ T1:r1=1)\n",
                   0, 1});
  }
  if (is_store(a) && is_load(b)) {
    // store-buffering over release/acquire
    out.push_back({"arch armv8\nthread T0 { " + ia + " " + instr(b, "Q", "r0", 1) +
                       " }\nthread T1 { Q = 1 @rel; r1 = P @acq; }\n"
                       "exists (T0:r0=0 /\\ T1:r1=0)\n",
                   0, 0});
  }
  if (is_store(b)) {
    // dependency shape: an address dependency through the first element
    // reaches past the pair (the reordering figure)
    std::string first = is_store(a) ? instr(a, "V[r0]", "", 1) : instr(a, "V[r0]", "w0", 1);
    int site = 1;
    out.push_back({"arch armv8\ninit V[1]=0\nthread T0 { r0 = X; " + first + " " + ib +
                       " }\nthread T1 { r1 = Q; dmbfull; X = 1; }\n"
                       "exists (T0:r0=1 /\\ T1:r1=1)\n",
                   0, site});
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  std::string dir = argc > 1 ? argv[1] : "tests/corpus/transform_witnesses";
  std::filesystem::create_directories(dir);

  int found = 0, missing = 0;
  for (int ai = 0; ai < 7; ++ai)
    for (int bi = 0; bi < 7; ++bi) {
      TClass a = static_cast<TClass>(ai), b = static_cast<TClass>(bi);
      if (reorder_cell(a, b) != 'n') continue;

      bool done = false;
      for (const Candidate& cand : bank(a, b)) {
        try {
          Program p = parse(cand.text);
          Transform t{Transform::Kind::Reorder, cand.tid, cand.node};
          if (auto g = transform_growth(p, t)) {
            std::string name = std::string("reorder_") + tclass_name(a) + "_" + tclass_name(b);
            std::ofstream out(dir + "/" + name + ".lit");
            out << "# growth witness for reordering " << tclass_name(a) << "."
                << tclass_name(b) << "\n";
            out << "# cell " << tclass_name(a) << " " << tclass_name(b) << "\n";
            out << "# site " << cand.tid << " " << cand.node << "\n";
            out << cand.text;
            std::cout << name << ": growth " << g->to_line() << "\n";
            done = true;
            found++;
            break;
          }
        } catch (const Error& e) {
          std::cout << "candidate rejected for " << tclass_name(a) << "." << tclass_name(b)
                    << ": " << e.what() << "\n";
        }
      }
      if (!done) {
        std::cout << "NO WITNESS for " << tclass_name(a) << "." << tclass_name(b) << "\n";
        missing++;
      }
    }
  std::cout << found << " witnesses, " << missing << " missing\n";
  return missing == 0 ? 0 : 1;
}
