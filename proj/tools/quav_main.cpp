#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "quav/ast.hpp"
#include "quav/diag.hpp"
#include "quav/kernel.hpp"
#include "quav/parser.hpp"
#include "quav/semantics.hpp"
#include "quav/smt.hpp"
#include "quav/transform.hpp"
#include "quav/verify.hpp"

using nlohmann::json;
using namespace quav;

namespace {

constexpr int kSchemaVersion = 1;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int exit_code(Verdict::Kind k) {
  switch (k) {
    case Verdict::Kind::Valid: return 0;
    case Verdict::Kind::Invalid: return 1;
    case Verdict::Kind::ValidBounded:
    case Verdict::Kind::Unknown: return 2;
    case Verdict::Kind::IllFormed: return 3;
  }
  return 3;
}

json state_json(const State& s) {
  json j;
  for (auto& [k, v] : s.scalars) j["scalars"][k] = v;
  for (auto& [k, av] : s.arrays) {
    json a;
    a["default"] = av.def;
    for (auto& [i, v] : av.elems) a["elems"][std::to_string(i)] = v;
    j["arrays"][k] = a;
  }
  return j;
}

State parse_state_args(const Program& prog,
                       const std::vector<std::string>& pairs,
                       std::vector<std::string>* defaulted) {
  State s;
  for (auto& d : prog.decls) {
    if (d.is_array)
      s.arrays[d.name] = ArrayVal{};
    else
      s.scalars[d.name] = 0;
  }
  std::set<std::string> given;
  for (auto& p : pairs) {
    auto eq = p.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("initial state entries look like name=int: " + p);
    std::string name = p.substr(0, eq);
    std::int64_t v = std::stoll(p.substr(eq + 1));
    if (!s.scalars.count(name))
      throw std::runtime_error("not a declared scalar: " + name);
    s.scalars[name] = v;
    given.insert(name);
  }
  if (defaulted)
    for (auto& d : prog.decls)
      if (!d.is_array && !given.count(d.name)) defaulted->push_back(d.name);
  return s;
}

Mode parse_mode(const std::string& flag) {
  auto m = mode_from_flag(flag);
  if (!m) throw std::runtime_error("--mode must be f, b or bd");
  return *m;
}

json trace_json(const std::vector<VcTrace>& trace) {
  json rows = json::array();
  for (auto& t : trace) {
    json r;
    r["label"] = t.vc.label;
    r["mode"] = mode_name(t.vc.mode);
    r["lhs"] = pretty_res(simplify(t.vc.lhs));
    r["rhs"] = pretty_res(simplify(t.vc.rhs));
    r["encodable"] = t.vc.encodable_vc;
    r["origin"] = t.vc.origin;
    r["status"] = t.status;
    if (!t.note.empty()) r["note"] = t.note;
    r["time_ms"] = t.time_ms;
    rows.push_back(r);
  }
  return rows;
}

void dump_scripts(const std::string& dir, const std::vector<VC>& vcs,
                  const std::string& logic) {
  for (auto& vc : vcs) {
    if (!vc.encodable_vc) continue;
    EncodeOpts opts;
    opts.logic = logic;
    std::ofstream out(dir + "/" + vc.label + ".smt2");
    out << encode_leq_query(vc.lhs, vc.rhs, opts);
  }
}

struct CheckSpec {
  std::string file;
  Mode mode;
  std::optional<std::string> pre, post;
};

Verdict run_check(const CheckSpec& cs, const SolverHandle& solver,
                  std::optional<std::int64_t> fallback,
                  std::vector<VcTrace>* trace) {
  Program prog = parse_program(slurp(cs.file));
  auto names = declared_names(prog);
  if (cs.pre) prog.annot.pre = parse_factored_string(*cs.pre, &names);
  if (cs.post) prog.annot.post = parse_factored_string(*cs.post, &names);
  return check(prog, cs.mode, solver, fallback, trace);
}

int cmd_check(const CheckSpec& cs, const SolverHandle& solver,
              std::optional<std::int64_t> fallback, bool as_json,
              const std::string& report_kind, const std::string& dump_dir) {
  std::vector<VcTrace> trace;
  Verdict v;
  try {
    v = run_check(cs, solver, fallback, &trace);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 3;
  }
  if (!dump_dir.empty()) {
    try {
      Program prog = parse_program(slurp(cs.file));
      auto names = declared_names(prog);
      if (cs.pre) prog.annot.pre = parse_factored_string(*cs.pre, &names);
      if (cs.post) prog.annot.post = parse_factored_string(*cs.post, &names);
      dump_scripts(dump_dir, gen_vcs(prog, cs.mode), solver.logic);
    } catch (const std::exception& e) {
      std::cerr << "dump-smt: " << e.what() << "\n";
    }
  }
  if (as_json || report_kind == "json") {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["command"] = "check";
    j["file"] = cs.file;
    j["mode"] = mode_name(cs.mode);
    j["verdict"] = Verdict::name(v.kind);
    if (!v.vc_label.empty()) j["vc"] = v.vc_label;
    if (!v.detail.empty()) j["detail"] = v.detail;
    if (v.witness) j["witness"] = state_json(*v.witness);
    j["vcs"] = trace_json(trace);
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << cs.file << " [" << mode_name(cs.mode)
              << "]: " << Verdict::name(v.kind) << "\n";
    for (auto& t : trace)
      std::cout << "  " << t.vc.label << ": " << t.status
                << (t.note.empty() ? "" : " (" + t.note + ")") << "\n";
    if (v.witness) {
      std::cout << "  witness:";
      for (auto& [k, val] : v.witness->scalars) std::cout << " " << k << "=" << val;
      std::cout << "\n";
    }
    if (!v.detail.empty() && v.kind == Verdict::Kind::IllFormed)
      std::cout << "  " << v.detail << "\n";
  }
  return exit_code(v.kind);
}

Interval parse_interval(const std::string& s, Interval fallback) {
  if (s.empty()) return fallback;
  auto colon = s.find(':');
  if (colon == std::string::npos)
    throw std::runtime_error("interval syntax is lo:hi");
  return {std::stoll(s.substr(0, colon)), std::stoll(s.substr(colon + 1))};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "quav: checks quantitative under-approximate triples (lower bounds on "
      "worst-case resource usage and high-water marks) of annotated programs"};
  app.require_subcommand(1);

  bool global_json = false;
  std::uint64_t global_seed = 1;
  app.add_flag("--json", global_json, "emit JSON on stdout");
  app.add_option("--seed", global_seed, "random seed");

  std::string solver_cmd;
  int timeout_ms = 60000;
  std::string logic = "ALL";
  auto add_solver_opts = [&](CLI::App* sub) {
    sub->add_option("--solver-cmd", solver_cmd,
                    "SMT-LIB 2 solver command (script path is appended)");
    sub->add_option("--timeout-ms", timeout_ms, "per-query solver timeout");
    sub->add_option("--logic", logic, "SMT logic to set");
  };
  auto make_solver = [&]() {
    SolverHandle h = solver_cmd.empty() ? default_solver() : SolverHandle{solver_cmd};
    h.timeout_ms = timeout_ms;
    h.logic = logic;
    return h;
  };

  // check
  auto* c_check = app.add_subcommand("check", "verify an annotated program");
  std::string file, mode_flag = "b", pre_text, post_text, report_kind = "text";
  std::string dump_dir;
  std::int64_t fallback_bound = -1;
  c_check->add_option("file", file)->required();
  c_check->add_option("--mode", mode_flag, "f | b | bd");
  c_check->add_option("--pre", pre_text, "override the pre annotation [S; R]");
  c_check->add_option("--post", post_text, "override the post annotation");
  c_check->add_option("--fallback-bound", fallback_bound,
                      "bounded-instantiation fallback on solver unknown");
  c_check->add_option("--report", report_kind, "text | json");
  c_check->add_option("--dump-smt", dump_dir, "write each VC script here");
  add_solver_opts(c_check);

  // run
  auto* c_run = app.add_subcommand("run", "execute one scripted run");
  std::vector<std::string> state_pairs;
  std::int64_t resource = 0;
  std::string script_text;
  c_run->add_option("file", file)->required();
  c_run->add_option("state", state_pairs, "initial state as name=int pairs");
  c_run->add_option("--resource", resource)->required();
  c_run->add_option("--script", script_text, "L,R,counts and local values");

  // enumerate
  auto* c_enum = app.add_subcommand("enumerate", "all outcomes within bounds");
  std::string var_range = "-3:3", local_range = "-3:3";
  std::int64_t unroll = 16, index_window = 4;
  c_enum->add_option("file", file)->required();
  c_enum->add_option("state", state_pairs);
  c_enum->add_option("--resource", resource);
  c_enum->add_option("--unroll", unroll);
  c_enum->add_option("--local-range", local_range);
  c_enum->add_option("--index-window", index_window);

  // vc
  auto* c_vc = app.add_subcommand("vc", "print verification conditions");
  c_vc->add_option("file", file)->required();
  c_vc->add_option("--mode", mode_flag, "f | b | bd");
  c_vc->add_option("--dump-smt", dump_dir);
  add_solver_opts(c_vc);

  // kernel-check
  auto* c_kc = app.add_subcommand("kernel-check", "check a derivation file");
  std::string side_flag = "bounded";
  std::int64_t side_bound = 4;
  c_kc->add_option("file", file)->required();
  c_kc->add_option("--side", side_flag, "bounded | smt");
  c_kc->add_option("--bound", side_bound, "bounded side-condition domain");
  add_solver_opts(c_kc);

  // fuzz
  auto* c_fuzz = app.add_subcommand("fuzz", "random-derivation soundness fuzz");
  int fuzz_count = 100;
  std::string fuzz_bounds = "-2:2";
  c_fuzz->add_option("--count", fuzz_count);
  c_fuzz->add_option("--bounds", fuzz_bounds, "variable range lo:hi");

  // corpus
  auto* c_corpus = app.add_subcommand("corpus", "run the bundled programs");
  std::string corpus_dir;
#ifdef QUAV_SOURCE_DIR
  corpus_dir = std::string(QUAV_SOURCE_DIR) + "/corpus";
#endif
  c_corpus->add_option("--dir", corpus_dir, "corpus directory");
  c_corpus->add_option("--fallback-bound", fallback_bound);
  add_solver_opts(c_corpus);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*c_check) {
      CheckSpec cs{file, parse_mode(mode_flag), {}, {}};
      if (!pre_text.empty()) cs.pre = pre_text;
      if (!post_text.empty()) cs.post = post_text;
      std::optional<std::int64_t> fb;
      if (fallback_bound >= 0) fb = fallback_bound;
      return cmd_check(cs, make_solver(), fb, global_json, report_kind, dump_dir);
    }

    if (*c_run) {
      Program prog = parse_program(slurp(file));
      std::vector<std::string> defaulted;
      State init = parse_state_args(prog, state_pairs, &defaulted);
      ChoiceScript script = parse_script(script_text);
      ExecResult r = exec(desugar(prog.body), init, resource, script);
      json j;
      j["schema_version"] = kSchemaVersion;
      j["command"] = "run";
      if (!defaulted.empty()) j["defaulted_to_zero"] = defaulted;
      if (r.stuck) {
        j["stuck"] = true;
      } else {
        j["state"] = state_json(r.out.state);
        j["q"] = r.out.q;
        j["l"] = r.out.l;
      }
      std::cout << j.dump(2) << "\n";
      return r.stuck ? 2 : 0;
    }

    if (*c_enum) {
      Program prog = parse_program(slurp(file));
      std::vector<std::string> defaulted;
      State init = parse_state_args(prog, state_pairs, &defaulted);
      DomainBounds bounds;
      bounds.unroll_cap = unroll;
      bounds.local_range = parse_interval(local_range, {-3, 3});
      bounds.wide_range = bounds.local_range;
      EnumResult r = enumerate_runs(desugar(prog.body), init, resource, bounds);
      json j;
      j["schema_version"] = kSchemaVersion;
      j["command"] = "enumerate";
      j["truncated"] = r.truncated;
      json outs = json::array();
      for (auto& o : r.outcomes) {
        json jo = state_json(o.state);
        jo["q"] = o.q;
        jo["l"] = o.l;
        jo["level_nonpos"] = o.level_nonpos();
        outs.push_back(jo);
      }
      j["outcomes"] = outs;
      std::cout << j.dump(2) << "\n";
      return 0;
    }

    if (*c_vc) {
      Program prog = parse_program(slurp(file));
      Mode m = parse_mode(mode_flag);
      std::vector<VC> vcs = gen_vcs(prog, m);
      if (!dump_dir.empty()) dump_scripts(dump_dir, vcs, logic);
      if (global_json) {
        json j;
        j["schema_version"] = kSchemaVersion;
        j["command"] = "vc";
        json rows = json::array();
        for (auto& vc : vcs) {
          json r;
          r["label"] = vc.label;
          r["lhs"] = pretty_res(simplify(vc.lhs));
          r["rhs"] = pretty_res(simplify(vc.rhs));
          r["encodable"] = vc.encodable_vc;
          r["origin"] = vc.origin;
          if (vc.encodable_vc)
            r["smtlib"] = encode_leq_query(vc.lhs, vc.rhs, {logic, {}});
          rows.push_back(r);
        }
        j["vcs"] = rows;
        std::cout << j.dump(2) << "\n";
      } else {
        for (auto& vc : vcs) {
          std::cout << "== " << vc.label << " (" << vc.origin << ")\n";
          std::cout << "  " << pretty_res(simplify(vc.lhs)) << "\n   <=\n  "
                    << pretty_res(simplify(vc.rhs)) << "\n";
          if (vc.encodable_vc)
            std::cout << encode_leq_query(vc.lhs, vc.rhs, {logic, {}}) << "\n";
          else
            std::cout << "  (not directly encodable)\n";
        }
      }
      return 0;
    }

    if (*c_kc) {
      DerivPtr d = parse_derivation(slurp(file));
      SideMethod side;
      if (side_flag == "smt") {
        side.use_smt = true;
        side.solver = make_solver();
      }
      side.bounds.local_range = side.bounds.wide_range = {-side_bound, side_bound};
      std::set<std::string> names = free_vars_res(d->P);
      side.bounds.scalars.clear();
      try {
        CheckedTriple t = check_derivation(*d, side);
        json j;
        j["schema_version"] = kSchemaVersion;
        j["command"] = "kernel-check";
        j["mode"] = mode_name(t.mode);
        j["pre"] = pretty_res(simplify(t.pre));
        j["cmd"] = pretty_cmd(t.cmd);
        j["post"] = pretty_res(simplify(t.post));
        std::cout << j.dump(2) << "\n";
        return 0;
      } catch (const KernelError& e) {
        std::cerr << "rejected: " << e.what() << "\n";
        return 1;
      }
    }

    if (*c_fuzz) {
      Interval iv = parse_interval(fuzz_bounds, {-2, 2});
      DomainBounds bounds;
      bounds.local_range = iv;
      bounds.wide_range = {iv.lo * 6, iv.hi * 6};
      bounds.unroll_cap = 8;
      FuzzReport rep = fuzz_soundness(global_seed, fuzz_count, bounds);
      json j;
      j["schema_version"] = kSchemaVersion;
      j["command"] = "fuzz";
      j["seed"] = global_seed;
      j["checked"] = rep.checked;
      j["semantic_failures"] = rep.semantic_failures;
      j["inconclusive"] = rep.truncated;
      j["notes"] = rep.notes;
      std::cout << j.dump(2) << "\n";
      return rep.semantic_failures == 0 && rep.truncated == 0 ? 0 : 1;
    }

    if (*c_corpus) {
      std::string manifest_path = corpus_dir + "/manifest.json";
      json manifest = json::parse(slurp(manifest_path));
      SolverHandle solver = make_solver();
      std::optional<std::int64_t> fb;
      if (fallback_bound >= 0) fb = fallback_bound;
      int failures = 0;
      for (auto& entry : manifest.at("programs")) {
        std::string f = corpus_dir + "/" + entry.at("file").get<std::string>();
        for (auto& chk : entry.at("checks")) {
          CheckSpec cs{f, parse_mode(chk.at("mode").get<std::string>()), {}, {}};
          if (chk.contains("pre")) cs.pre = chk.at("pre").get<std::string>();
          if (chk.contains("post")) cs.post = chk.at("post").get<std::string>();
          Verdict v = run_check(cs, solver, fb, nullptr);
          std::string got = Verdict::name(v.kind);
          bool ok = false;
          for (auto& want : chk.at("expect"))
            ok |= want.get<std::string>() == got;
          std::cout << entry.at("file").get<std::string>() << " ["
                    << chk.at("mode").get<std::string>() << "] -> " << got
                    << (ok ? "  PASS" : "  FAIL") << "\n";
          failures += ok ? 0 : 1;
        }
      }
      return failures == 0 ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 3;
}
