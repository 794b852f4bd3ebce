// Command-line workbench: reduction, occurrence analysis, classification,
// wrapper construction, bounded persistence checks and range experiments
// over the bundled corpus or inline terms.

#include <CLI11.hpp>
#include <chrono>
#include <iostream>

#include "lamlab/corpus.hpp"
#include "lamlab/persist.hpp"
#include "lamlab/report.hpp"

using namespace lamlab;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitParse = 2;
constexpr int kExitBudget = 3;
constexpr int kExitAssert = 4;

struct Options {
  uint64_t fuel_steps = 10000;
  size_t size_cap = 1000000;
  uint32_t depth = 6;
  uint32_t levels = 8;
  uint32_t event_threshold = 3;
  std::string json_path;
  uint64_t seed = 0;
  std::string corpus_dir;

  Fuel fuel() const {
    Fuel f;
    f.max_steps = fuel_steps;
    f.max_size = size_cap;
    return f;
  }
  AnalysisConfig analysis() const {
    AnalysisConfig cfg;
    cfg.fuel = fuel();
    cfg.levels = levels;
    cfg.event_threshold = event_threshold;
    return cfg;
  }
};

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  int64_t ms() const {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::steady_clock::now() - start)
        .count();
  }
};

void emit(const Options& opt, const std::string& command, const Json& params,
          const Json& verdicts, const Timer& timer, uint64_t fuel_used = 0) {
  if (opt.json_path.empty()) return;
  Json report = {{"command", command},
                 {"parameters", params},
                 {"verdicts", verdicts},
                 {"fuel_consumed", fuel_used},
                 {"wall_time_ms", timer.ms()}};
  if (opt.seed) report["parameters"]["seed"] = opt.seed;
  write_json_atomic(opt.json_path, report);
}

struct Source {
  CorpusFile content;  // rules + defs in scope
  TermPtr term;        // the focused term (F or --term)
};

Source resolve(const Options& opt, const std::string& corpus, const std::string& term_text,
               const std::string& def = "F") {
  Source src;
  if (!corpus.empty()) {
    CorpusEntry e = load_corpus(corpus, opt.corpus_dir);
    src.content = e.content;
    if (!term_text.empty()) {
      src.term = parse_term(term_text, src.content.rules, src.content.defs);
    } else {
      auto it = src.content.defs.find(def);
      if (it == src.content.defs.end())
        throw std::runtime_error("corpus " + corpus + " does not define " + def);
      src.term = it->second;
    }
    return src;
  }
  if (term_text.empty()) throw CLI::ValidationError("either --corpus or --term is required");
  src.content.defs = prelude();
  src.term = parse_term(term_text, src.content.rules, src.content.defs);
  return src;
}

// resolve a substitute: a corpus definition name or an inline term
TermPtr resolve_subst(const Source& src, const std::string& text) {
  auto it = src.content.defs.find(text);
  if (it != src.content.defs.end()) return it->second;
  return parse_term(text, src.content.rules, src.content.defs);
}

Family parse_family(const std::string& s) {
  if (s == "church") return Family::Church;
  if (s == "tower") return Family::Tower;
  throw CLI::ValidationError("--family must be church or tower");
}

struct AnalysisRun {
  Tree tree;
  BranchData branch;
  CaseReport report;
};

AnalysisRun analyze_source(const Source& src, const TermPtr& A, const AnalysisConfig& cfg) {
  AnalysisRun run;
  run.tree = tree_levels(src.term, cfg.x, A, cfg, src.content.rules);
  run.branch = find_good_branch(run.tree, cfg, src.content.rules);
  compute_head_events(run.branch, A, cfg.x, cfg, src.content.rules);
  run.report = classify(run.branch, cfg);
  return run;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lambda-calculus workbench: reductions, occurrence analysis, persistence"};
  app.require_subcommand(1);
  Options opt;
  app.add_option("--fuel", opt.fuel_steps, "step budget per engine run");
  app.add_option("--size-cap", opt.size_cap, "term size cap in nodes");
  app.add_option("--depth", opt.depth, "comparison / exploration depth");
  app.add_option("--levels", opt.levels, "analysis levels to build");
  app.add_option("--event-threshold", opt.event_threshold,
                 "distinct S blocks in head position for the 2a verdict");
  app.add_option("--json", opt.json_path, "write a machine-readable report here");
  app.add_option("--seed", opt.seed, "seed for randomized helpers");
  app.add_option("--corpus-dir", opt.corpus_dir, "directory with .lam files");

  std::string corpus, term_text, strategy = "head", subst, aprime, family = "church";
  std::string mode = "simple", scan_text, run_name;
  uint32_t n = 1, m = 2, simple_l = 0, h_levels = 2, jhat_const = 0;
  uint32_t breadth = 200;
  bool shortcut = false, with_jhat = false;

  CLI::App* c_reduce = app.add_subcommand("reduce", "reduce a term under a strategy");
  c_reduce->add_option("--term", term_text, "inline term");
  c_reduce->add_option("--corpus", corpus, "corpus entry supplying definitions");
  c_reduce->add_option("--strategy", strategy, "head | leftmost")
      ->check(CLI::IsMember({"head", "leftmost"}));

  CLI::App* c_analyze = app.add_subcommand("analyze", "occurrence tree and branch data");
  c_analyze->add_option("--corpus", corpus)->required();
  c_analyze->add_flag("--shortcut", shortcut, "run the normal-form range shortcut instead");

  CLI::App* c_classify = app.add_subcommand("classify", "case verdict for a corpus entry");
  c_classify->add_option("--corpus", corpus)->required();

  CLI::App* c_build = app.add_subcommand("build-aprime", "construct a wrapper term");
  c_build->add_option("--corpus", corpus)->required();
  c_build->add_option("--mode", mode, "simple | case1 | case2a")
      ->check(CLI::IsMember({"simple", "case1", "case2a"}));
  c_build->add_option("--l", simple_l, "abstraction count for the simple wrapper");
  c_build->add_option("--h-levels", h_levels, "staged levels to record");
  c_build->add_flag("--jhat", with_jhat, "also build the pure staged wrapper");
  c_build->add_option("--jhat-h-const", jhat_const,
                      "constant arity function for the pure wrapper");

  CLI::App* c_persist = app.add_subcommand("persist", "bounded persistence verification");
  c_persist->add_option("--corpus", corpus);
  c_persist->add_option("--term", term_text, "inline instantiated term");
  c_persist->add_option("--subst", subst, "x=<name-or-term> substituted into F");
  c_persist->add_option("--breadth", breadth, "reduct budget");
  c_persist->add_option("--scan", scan_text, "count reducts containing this closed term");

  CLI::App* c_dist = app.add_subcommand("distinguish", "compare two family instances");
  c_dist->add_option("--corpus", corpus)->required();
  c_dist->add_option("--aprime", aprime, "wrapper: corpus name or inline term")->required();
  c_dist->add_option("--family", family, "church | tower");
  c_dist->add_option("--n", n);
  c_dist->add_option("--m", m);

  CLI::App* c_scope = app.add_subcommand("scope-probe", "per-level family comparisons");
  c_scope->add_option("--corpus", corpus)->required();
  c_scope->add_option("--aprime", aprime)->required();
  c_scope->add_option("--family", family, "church | tower");
  c_scope->add_option("--n", n);
  c_scope->add_option("--m", m);

  CLI::App* c_corpus = app.add_subcommand("corpus", "list datasets or run their checks");
  CLI::App* c_list = c_corpus->add_subcommand("list", "list dataset names");
  CLI::App* c_run = c_corpus->add_subcommand("run", "run a dataset's checks");
  c_run->add_option("name", run_name, "dataset name or 'all'")->required();
  c_corpus->require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  Timer timer;
  try {
    set_max_term_size(opt.size_cap);
    if (*c_reduce) {
      Source src = resolve(opt, corpus, term_text);
      Strategy st = strategy == "head" ? Strategy::Head : Strategy::Leftmost;
      ReduceResult r = reduce(src.term, st, src.content.rules, opt.fuel());
      const char* status = r.status == ReduceResult::Status::NormalForm ? "normal-form"
                           : r.status == ReduceResult::Status::Hnf      ? "hnf"
                           : r.status == ReduceResult::Status::CycleCertified
                               ? "cycle-certified"
                               : "fuel-exhausted";
      std::cout << print_term(r.trace.end) << "\n";
      std::cout << "status: " << status << " steps: " << r.trace.steps.size() << "\n";
      emit(opt, "reduce",
           {{"term", print_term(src.term)}, {"strategy", strategy}, {"fuel", opt.fuel_steps}},
           {{"status", status}, {"trace", trace_json(r.trace)}}, timer,
           r.trace.steps.size());
      return 0;
    }
    if (*c_analyze) {
      Source src = resolve(opt, corpus, "");
      if (shortcut) {
        ShortcutResult r =
            normalizable_shortcut(src.term, "x", src.content.rules, opt.fuel(), opt.depth);
        Json j = shortcut_json(r);
        std::cout << j.dump(2) << "\n";
        emit(opt, "analyze-shortcut", {{"corpus", corpus}, {"fuel", opt.fuel_steps}}, j,
             timer);
        return 0;
      }
      AnalysisRun run = analyze_source(src, src.content.defs.at("A"), opt.analysis());
      Json j = analysis_json(run.tree, run.branch, run.report);
      std::cout << "verdict: " << verdict_str(run.report.verdict)
                << " head: " << stability_str(run.report.head_stability)
                << " events: " << run.report.event_sources << "\n";
      for (size_t k = 0; k < run.branch.levels.size(); ++k) {
        const BranchLevel& bl = run.branch.levels[k];
        std::cout << "  k=" << k << " |U|=" << bl.U.size()
                  << " t=" << (bl.t_term ? print_term(bl.t_term) : "?") << "\n";
      }
      emit(opt, "analyze",
           {{"corpus", corpus}, {"levels", opt.levels}, {"fuel", opt.fuel_steps}}, j, timer);
      return 0;
    }
    if (*c_classify) {
      Source src = resolve(opt, corpus, "");
      AnalysisRun run = analyze_source(src, src.content.defs.at("A"), opt.analysis());
      std::cout << verdict_str(run.report.verdict) << "\n";
      std::cout << "head: " << stability_str(run.report.head_stability)
                << " event-sources: " << run.report.event_sources;
      if (run.report.bound_l) std::cout << " l: " << *run.report.bound_l;
      std::cout << "\n";
      emit(opt, "classify", {{"corpus", corpus}, {"levels", opt.levels}},
           case_report_json(run.report), timer);
      return 0;
    }
    if (*c_build) {
      Source src = resolve(opt, corpus, "");
      Json verdicts;
      if (mode == "simple") {
        TermPtr ap = build_Aprime_simple(simple_l);
        std::cout << print_term(ap) << "\n";
        verdicts = {{"aprime", print_term(ap)}};
      } else if (mode == "case1") {
        AnalysisRun run = analyze_source(src, src.content.defs.at("A"), opt.analysis());
        Case1Aprime ap =
            build_Aprime_case1(src.content.defs.at("A"), run.branch, run.report,
                               src.content.rules);
        std::cout << print_term(ap.aprime) << "\n";
        std::cout << "p: " << ap.p << " (wrapper constant J of arity 2)\n";
        verdicts = {{"aprime", print_term(ap.aprime)}, {"p", ap.p}};
      } else {
        AnalysisRun run = analyze_source(src, src.content.defs.at("A"), opt.analysis());
        HPrefix hp = compute_h(run.branch, src.content.defs.at("A"), "x", h_levels,
                               opt.analysis(), src.content.rules);
        Json levels = Json::array();
        for (const auto& lv : hp.levels) {
          std::cout << "j=" << lv.j << " h=" << lv.h << " |X|=" << lv.x_len << "\n";
          levels.push_back({{"j", lv.j},
                            {"h", lv.h},
                            {"x_len", lv.x_len},
                            {"a", lv.a ? print_term(lv.a) : ""},
                            {"b_len", lv.b.size()}});
        }
        verdicts = {{"levels", levels}, {"horizon_exhausted", hp.horizon_exhausted}};
        if (hp.horizon_exhausted) {
          std::cout << "Inconclusive: " << hp.note << "\n";
          verdicts["note"] = hp.note;
        }
        if (with_jhat && jhat_const > 0) {
          TermPtr jhat = build_Jhat_pure(Term::lam(church(jhat_const), "k"));
          std::cout << "jhat: " << print_term(jhat) << "\n";
          verdicts["jhat"] = print_term(jhat);
        }
      }
      emit(opt, "build-aprime", {{"corpus", corpus}, {"mode", mode}}, verdicts, timer);
      return 0;
    }
    if (*c_persist) {
      Source src = resolve(opt, corpus, term_text);
      TermPtr inst = src.term;
      std::string subst_desc;
      if (!subst.empty()) {
        size_t eq = subst.find('=');
        if (eq == std::string::npos)
          throw CLI::ValidationError("--subst expects var=term");
        std::string var = subst.substr(0, eq);
        TermPtr val = resolve_subst(src, subst.substr(eq + 1));
        inst = substitute(src.term, var, val);
        subst_desc = subst;
      }
      PersistBudget budget;
      budget.depth = opt.depth;
      budget.breadth = breadth;
      budget.fuel = opt.fuel();
      TermPtr scan;
      if (!scan_text.empty()) scan = resolve_subst(src, scan_text);
      PersistenceVerdict v =
          check_persistence(inst, src.content.rules, budget, "nu", scan);
      Json j = persistence_json(v);
      std::cout << j["verdict"].get<std::string>();
      if (j.contains("kind")) std::cout << "(" << j["kind"].get<std::string>() << ")";
      std::cout << " explored: " << v.explored << " max-depth: " << v.max_depth << "\n";
      if (scan) std::cout << "scan-hits: " << v.scan_hits << "\n";
      emit(opt, "persist",
           {{"corpus", corpus},
            {"subst", subst_desc},
            {"depth", budget.depth},
            {"breadth", budget.breadth},
            {"fuel", opt.fuel_steps}},
           j, timer, v.steps_used);
      return 0;
    }
    if (*c_dist) {
      Source src = resolve(opt, corpus, "");
      TermPtr ap = resolve_subst(src, aprime);
      HEqual h = distinguish(src.term, "x", ap, "nu", parse_family(family), n, m, opt.depth,
                             src.content.rules, opt.fuel());
      std::cout << hequal_str(h.verdict) << "\n";
      emit(opt, "distinguish",
           {{"corpus", corpus},
            {"aprime", print_term(ap)},
            {"family", family},
            {"n", n},
            {"m", m},
            {"depth", opt.depth}},
           {{"verdict", hequal_str(h.verdict)}, {"detail", h.detail}}, timer);
      return 0;
    }
    if (*c_scope) {
      Source src = resolve(opt, corpus, "");
      AnalysisRun run = analyze_source(src, src.content.defs.at("A"), opt.analysis());
      TermPtr ap = resolve_subst(src, aprime);
      auto rows = scope_probe(run.branch, "x", ap, "nu", parse_family(family), n, m,
                              opt.depth, src.content.rules, opt.fuel());
      Json jrows = Json::array();
      for (const auto& row : rows) {
        std::cout << "k=" << row.k << " " << row.verdict << "\n";
        jrows.push_back({{"k", row.k}, {"verdict", row.verdict}});
      }
      emit(opt, "scope-probe",
           {{"corpus", corpus}, {"aprime", print_term(ap)}, {"n", n}, {"m", m}},
           {{"rows", jrows}}, timer);
      return 0;
    }
    if (*c_corpus) {
      if (*c_list) {
        for (const auto& name : corpus_names()) std::cout << name << "\n";
        return 0;
      }
      std::vector<std::string> names;
      if (run_name == "all")
        names = corpus_names();
      else
        names.push_back(run_name);
      bool all_pass = true;
      Json jentries = Json::object();
      for (const auto& name : names) {
        CorpusEntry e = load_corpus(name, opt.corpus_dir);
        auto results = run_corpus_assertions(e, opt.analysis());
        Json jres = Json::array();
        for (const AssertionResult& r : results) {
          std::cout << (r.pass ? "[pass] " : "[FAIL] ") << name << "." << r.id;
          if (!r.pass && !r.detail.empty()) std::cout << "  (" << r.detail << ")";
          std::cout << "\n";
          jres.push_back({{"id", r.id}, {"pass", r.pass}, {"detail", r.detail}});
          if (!r.pass) all_pass = false;
        }
        jentries[name] = jres;
      }
      emit(opt, "corpus-run", {{"name", run_name}}, jentries, timer);
      return all_pass ? 0 : kExitAssert;
    }
  } catch (const ParseError& e) {
    std::cerr << e.what() << "\n";
    return kExitParse;
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  } catch (const NoGoodBranchError& e) {
    std::cerr << "budget: " << e.what() << "\n";
    return kExitBudget;
  } catch (const TermSizeError& e) {
    std::cerr << "budget: " << e.what() << "\n";
    return kExitBudget;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return 0;
}
