#ifndef REMAP_CLI_HPP_
#define REMAP_CLI_HPP_

#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "remap/enumerate.hpp"
#include "remap/fenceopt.hpp"
#include "remap/litmus.hpp"
#include "remap/mapping.hpp"
#include "remap/models.hpp"
#include "remap/robust.hpp"

namespace remap::cli {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitFinding = 2;   // unsound mapping / outcome forbidden / not robust
constexpr int kExitEnforced = 3;  // robustness violations repaired
constexpr int kExitUsage = 64;

namespace detail {

inline std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in.good()) throw Error(Errc::Usage, "cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Program load_program(const std::string& path) { return parse(slurp(path)); }

inline ModelId parse_model(const std::string& name) {
  auto m = model_from_name(name);
  if (!m) throw Error(Errc::Usage, "unknown model '" + name + "'");
  return *m;
}

inline Arch parse_arch(const std::string& name) {
  auto a = arch_from_name(name);
  if (!a) throw Error(Errc::Usage, "unknown arch '" + name + "'");
  return *a;
}

struct SchemeArgs {
  std::string from, to, name, file;
  bool c11 = false;

  MappingScheme resolve() const {
    if (!file.empty()) return parse_scheme_table(slurp(file));
    if (!name.empty()) {
      for (const auto& s : shipped_schemes())
        if (s.name == name) return s;
      return broken_scheme(name);
    }
    if (from.empty() || to.empty())
      throw Error(Errc::Usage, "need --from/--to, --scheme, or --scheme-file");
    return find_scheme(parse_arch(from), parse_arch(to), c11);
  }
};

struct BudgetArgs {
  long long max_candidates = EnumOptions{}.max_candidates;
  long long paths_limit = EnumOptions{}.paths_limit;
  bool strict = false;
  bool draft_wo = false;

  EnumOptions options() const {
    EnumOptions o;
    o.max_candidates = max_candidates;
    o.paths_limit = paths_limit;
    o.strict_behavior = strict;
    o.draft_wo = draft_wo;
    return o;
  }

  void attach(CLI::App* cmd) {
    cmd->add_option("--max-candidates", max_candidates,
                    "candidate budget for enumeration");
    cmd->add_option("--paths-limit", paths_limit, "control path budget per thread");
    cmd->add_flag("--draft-wo", draft_wo,
                  "alternate armv7-mca write-order definition, for comparison");
  }
};

inline const char* verdict_str(bool allowed) { return allowed ? "allowed" : "forbidden"; }

// corpus expectations, from "# expect <model> <allowed|forbidden>" and
// "# robust <m> <k> <yes|no>" comment lines
struct CorpusChecks {
  struct Expect {
    ModelId model;
    bool allowed;
  };
  struct RobustExpect {
    RobustPair pair;
    bool robust;
  };
  std::vector<Expect> expects;
  std::vector<RobustExpect> robusts;
};

inline CorpusChecks parse_checks(const std::string& text) {
  CorpusChecks out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string hash, kind;
    if (!(ls >> hash >> kind) || hash != "#") continue;
    if (kind == "expect") {
      std::string model, verdict;
      if (ls >> model >> verdict)
        out.expects.push_back({parse_model(model), verdict == "allowed"});
    } else if (kind == "robust") {
      std::string m, k, verdict;
      if (ls >> m >> k >> verdict)
        out.robusts.push_back({{parse_model(m), parse_model(k)}, verdict == "yes"});
    }
  }
  return out;
}

struct CorpusResult {
  std::string file;
  std::vector<std::string> lines;
  json doc;
  bool pass = true;
};

inline CorpusResult run_corpus_file(const std::filesystem::path& path, const EnumOptions& opts) {
  CorpusResult res;
  res.file = path.filename().string();
  res.doc["file"] = res.file;
  res.doc["checks"] = json::array();
  try {
    std::string text = slurp(path.string());
    Program p = parse(text);
    CorpusChecks checks = parse_checks(text);
    for (const auto& e : checks.expects) {
      bool got = p.outcome && outcome_satisfiable(*p.outcome, behaviors(p, e.model, opts));
      bool ok = got == e.allowed;
      res.pass = res.pass && ok;
      res.lines.push_back(std::string(model_name(e.model)) + " " + verdict_str(got) +
                          " (expected " + verdict_str(e.allowed) + ") " +
                          (ok ? "ok" : "MISMATCH"));
      res.doc["checks"].push_back({{"kind", "behavior"},
                                   {"model", model_name(e.model)},
                                   {"expected", verdict_str(e.allowed)},
                                   {"got", verdict_str(got)},
                                   {"pass", ok}});
    }
    for (const auto& e : checks.robusts) {
      bool got = check_robust(p, e.pair).robust;
      bool ok = got == e.robust;
      res.pass = res.pass && ok;
      res.lines.push_back(std::string(model_name(e.pair.m)) + " against " +
                          model_name(e.pair.k) + ": " + (got ? "robust" : "not robust") +
                          " (expected " + (e.robust ? "robust" : "not robust") + ") " +
                          (ok ? "ok" : "MISMATCH"));
      res.doc["checks"].push_back({{"kind", "robust"},
                                   {"m", model_name(e.pair.m)},
                                   {"k", model_name(e.pair.k)},
                                   {"expected", e.robust},
                                   {"got", got},
                                   {"pass", ok}});
    }
  } catch (const std::exception& ex) {
    res.pass = false;
    res.lines.push_back(std::string("error: ") + ex.what());
    res.doc["error"] = ex.what();
  }
  res.doc["pass"] = res.pass;
  return res;
}

}  // namespace detail

inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"relaxed-memory litmus toolkit"};
  app.require_subcommand(1);
  bool as_json = false;

  std::string file, model_name_arg, provenance, m_arg, k_arg, corpus_dir;
  bool enforce = false;
  int replication = 1;
  detail::SchemeArgs scheme;
  detail::BudgetArgs budget;

  auto* behaviors_cmd = app.add_subcommand("behaviors", "enumerate the behavior set");
  behaviors_cmd->add_flag("--json", as_json, "machine-readable output");
  behaviors_cmd->add_option("--model", model_name_arg, "memory model")->required();
  behaviors_cmd->add_option("file", file)->required();
  behaviors_cmd->add_flag("--strict", budget.strict, "include per-cell write orders");
  budget.attach(behaviors_cmd);

  auto* check_cmd = app.add_subcommand("check", "decide the outcome predicate");
  check_cmd->add_flag("--json", as_json, "machine-readable output");
  check_cmd->add_option("--model", model_name_arg, "memory model")->required();
  check_cmd->add_option("file", file)->required();
  budget.attach(check_cmd);

  auto* map_cmd = app.add_subcommand("map", "translate between architectures");
  map_cmd->add_flag("--json", as_json, "machine-readable output");
  map_cmd->add_option("--from", scheme.from);
  map_cmd->add_option("--to", scheme.to);
  map_cmd->add_flag("--c11", scheme.c11, "use the annotation-aware scheme");
  map_cmd->add_option("--scheme", scheme.name, "scheme or documented variant by name");
  map_cmd->add_option("--scheme-file", scheme.file, "declarative scheme table");
  map_cmd->add_option("file", file)->required();

  auto* verify_cmd = app.add_subcommand("verify-mapping", "behavior-inclusion check");
  verify_cmd->add_flag("--json", as_json, "machine-readable output");
  verify_cmd->add_option("--from", scheme.from);
  verify_cmd->add_option("--to", scheme.to);
  verify_cmd->add_flag("--c11", scheme.c11);
  verify_cmd->add_option("--scheme", scheme.name);
  verify_cmd->add_option("--scheme-file", scheme.file);
  verify_cmd->add_flag("--strict", budget.strict, "compare per-cell write orders too");
  verify_cmd->add_option("file", file)->required();
  budget.attach(verify_cmd);

  auto* felim_cmd = app.add_subcommand("fence-elim", "remove redundant fences");
  felim_cmd->add_flag("--json", as_json, "machine-readable output");
  felim_cmd->add_option("--provenance", provenance, "x86 or armv7 (armv8 programs)");
  felim_cmd->add_option("file", file)->required();

  auto* robust_cmd = app.add_subcommand("robust", "static M-robustness against K");
  robust_cmd->add_flag("--json", as_json, "machine-readable output");
  robust_cmd->add_option("--m", m_arg, "stronger model")->required();
  robust_cmd->add_option("--k", k_arg, "weaker model")->required();
  robust_cmd->add_flag("--enforce", enforce, "insert fences when not robust");
  robust_cmd->add_option("file", file)->required();

  auto* corpus_cmd = app.add_subcommand("corpus", "batch-check a corpus directory");
  auto* corpus_run = corpus_cmd->add_subcommand("run", "run every .lit file");
  corpus_run->add_flag("--json", as_json, "machine-readable output");
  corpus_run->add_option("dir", corpus_dir, "corpus root (or REMAP_CORPUS)");
  budget.attach(corpus_run);

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      out << app.help();
      return kExitOk;
    }
    err << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (behaviors_cmd->parsed()) {
      Program p = detail::load_program(file);
      ModelId m = detail::parse_model(model_name_arg);
      if (!model_fits_arch(m, p.arch))
        throw Error(Errc::Usage, std::string("model ") + model_name(m) +
                                     " cannot interpret arch " + arch_name(p.arch));
      BehaviorSet bs = behaviors(p, m, budget.options());
      bool allowed = p.outcome && outcome_satisfiable(*p.outcome, bs);
      if (as_json) {
        json doc{{"command", "behaviors"}, {"model", model_name(m)}};
        doc["behaviors"] = json::array();
        for (const auto& b : bs.set) doc["behaviors"].push_back(b.to_line());
        if (p.outcome) doc["outcome"] = detail::verdict_str(allowed);
        out << doc.dump(2) << "\n";
      } else {
        out << bs.to_text();
        if (p.outcome) out << "outcome: " << detail::verdict_str(allowed) << "\n";
      }
      return kExitOk;
    }

    if (check_cmd->parsed()) {
      Program p = detail::load_program(file);
      if (!p.outcome) throw Error(Errc::Usage, "program has no outcome clause");
      ModelId m = detail::parse_model(model_name_arg);
      if (!model_fits_arch(m, p.arch))
        throw Error(Errc::Usage, std::string("model ") + model_name(m) +
                                     " cannot interpret arch " + arch_name(p.arch));
      bool allowed = outcome_satisfiable(*p.outcome, behaviors(p, m, budget.options()));
      if (as_json)
        out << json{{"command", "check"},
                    {"model", model_name(m)},
                    {"outcome", detail::verdict_str(allowed)}}
                   .dump(2)
            << "\n";
      else
        out << detail::verdict_str(allowed) << "\n";
      return allowed ? kExitOk : kExitFinding;
    }

    if (map_cmd->parsed()) {
      Program p = detail::load_program(file);
      MappingScheme s = scheme.resolve();
      Program q = map_program(p, s);
      if (as_json)
        out << json{{"command", "map"}, {"scheme", s.name}, {"program", emit(q)}}.dump(2) << "\n";
      else
        out << emit(q);
      return kExitOk;
    }

    if (verify_cmd->parsed()) {
      Program p = detail::load_program(file);
      MappingScheme s = scheme.resolve();
      MappingVerdict v = verify_mapping(p, s, budget.options());
      if (as_json) {
        json doc{{"command", "verify-mapping"}, {"scheme", s.name}, {"sound", v.sound}};
        if (v.witness) doc["witness"] = v.witness->to_line();
        out << doc.dump(2) << "\n";
      } else {
        out << (v.sound ? "sound" : "unsound") << "\n";
        if (v.witness) out << "witness: " << v.witness->to_line() << "\n";
      }
      return v.sound ? kExitOk : kExitFinding;
    }

    if (felim_cmd->parsed()) {
      Program p = detail::load_program(file);
      std::optional<Provenance> prov;
      if (provenance == "x86") prov = Provenance::FromX86;
      else if (provenance == "armv7") prov = Provenance::FromArmv7;
      else if (!provenance.empty()) throw Error(Errc::Usage, "provenance is x86 or armv7");
      FenceOptResult res = fence_elim(p, prov);
      json doc{{"command", "fence-elim"}, {"arch", arch_name(p.arch)}};
      doc["threads"] = json::array();
      for (int tid = 0; tid < res.program.num_threads(); ++tid) {
        const FenceLedger& led = res.threads[tid];
        if (!as_json) {
          out << "thread " << res.program.threads[tid].name << ":\n";
          for (const auto& [f, pr] : led.kept)
            out << "  kept fence @" << f << " covering (" << pr.first << ", " << pr.second
                << ")\n";
          for (int f : led.deleted) out << "  deleted fence @" << f << "\n";
          for (int f : led.weakened) out << "  weakened fence @" << f << "\n";
        }
        json t;
        t["kept"] = json::array();
        for (const auto& [f, pr] : led.kept)
          t["kept"].push_back({{"fence", f}, {"pair", {pr.first, pr.second}}});
        t["deleted"] = led.deleted;
        t["weakened"] = led.weakened;
        doc["threads"].push_back(t);
      }
      doc["program"] = emit(res.program);
      if (as_json) out << doc.dump(2) << "\n";
      else out << emit(res.program);
      return kExitOk;
    }

    if (robust_cmd->parsed()) {
      Program p = detail::load_program(file);
      RobustPair rp{detail::parse_model(m_arg), detail::parse_model(k_arg)};
      RobustReport rep;
      Program result = p;
      if (enforce) {
        result = enforce_robust(p, rp, &rep);
      } else {
        rep = check_robust(p, rp);
      }
      if (as_json) {
        json doc{{"command", "robust"},
                 {"m", model_name(rp.m)},
                 {"k", model_name(rp.k)},
                 {"robust", rep.robust}};
        doc["offending"] = json::array();
        for (const auto& o : rep.offending)
          doc["offending"].push_back(
              {{"tid", o.tid}, {"i", o.i}, {"j", o.j}, {"reason", o.reason}});
        if (enforce) {
          doc["inserted"] = json::array();
          for (const auto& i : rep.inserted)
            doc["inserted"].push_back(
                {{"tid", i.tid}, {"node", i.node}, {"fence", fence_name(i.flavor)}});
          doc["program"] = emit(result);
        }
        out << doc.dump(2) << "\n";
      } else {
        out << (rep.robust ? "robust" : "not robust") << "\n";
        for (const auto& o : rep.offending)
          out << "  unordered pair thread " << o.tid << " (" << o.i << ", " << o.j << "): "
              << o.reason << "\n";
        if (enforce && !rep.robust) {
          for (const auto& i : rep.inserted)
            out << "  inserted " << fence_name(i.flavor) << " in thread " << i.tid << " at "
                << i.node << "\n";
          out << emit(result);
        }
      }
      if (rep.robust) return kExitOk;
      return enforce ? kExitEnforced : kExitFinding;
    }

    if (corpus_cmd->parsed()) {
      if (!corpus_run->parsed()) throw Error(Errc::Usage, "usage: corpus run <dir>");
      std::string dir = corpus_dir;
      if (dir.empty()) {
        const char* env = std::getenv("REMAP_CORPUS");
        if (env) dir = env;
      }
      if (dir.empty()) throw Error(Errc::Usage, "corpus directory required (or REMAP_CORPUS)");
      std::vector<std::filesystem::path> files;
      for (const auto& entry : std::filesystem::directory_iterator(dir))
        if (entry.path().extension() == ".lit") files.push_back(entry.path());
      std::sort(files.begin(), files.end());

      EnumOptions opts = budget.options();
      std::vector<std::future<detail::CorpusResult>> futures;
      for (const auto& f : files)
        futures.push_back(std::async(std::launch::async,
                                     [f, opts] { return detail::run_corpus_file(f, opts); }));
      bool all = true;
      json doc{{"command", "corpus"}};
      doc["results"] = json::array();
      int checks = 0;
      for (auto& fut : futures) {
        detail::CorpusResult res = fut.get();
        all = all && res.pass;
        checks += static_cast<int>(res.lines.size());
        if (!as_json) {
          out << res.file << ":\n";
          for (const auto& line : res.lines) out << "  " << line << "\n";
        }
        doc["results"].push_back(res.doc);
      }
      doc["pass"] = all;
      if (as_json) {
        out << doc.dump(2) << "\n";
      } else {
        out << files.size() << " files, " << checks << " checks, "
            << (all ? "all expected verdicts" : "MISMATCHES") << "\n";
      }
      return all ? kExitOk : kExitFinding;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.code() == Errc::Usage || e.code() == Errc::UnsupportedPair ? kExitUsage : kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitUsage;
}

inline int run_main(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.push_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace remap::cli

#endif  // REMAP_CLI_HPP_
