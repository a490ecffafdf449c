#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "qlc/denot/interp.hpp"
#include "qlc/opsem/opsem.hpp"
#include "qlc/syntax/parser.hpp"
#include "qlc/syntax/printer.hpp"
#include "qlc/typing/typing.hpp"

using json = nlohmann::ordered_json;
using namespace qlc;

namespace {

enum Exit { kOk = 0, kFailed = 1, kUsage = 2 };

struct Options {
  std::string file;
  std::uint64_t seed = 0;
  std::size_t max_steps = 100000;
  double tol = 1e-9;
  bool json = false;
  unsigned threads = 1;
  bool trace = false;
};

class UsageError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

// Rounded to 12 significant digits so the JSON number prints the same way.
double round12(double x) { return std::stod(fmt(x)); }

json complex_json(std::complex<double> z) { return json::array({round12(z.real()), round12(z.imag())}); }

std::string show(const Term& t) { return print_term(t, {true}); }

Program load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_program(ss.str());
}

json closure_json(const Closure& c) {
  json j;
  j["term"] = show(c.term);
  j["register"] = c.reg;
  json amps = json::array();
  for (Eigen::Index i = 0; i < c.psi.size(); ++i) amps.push_back(complex_json(c.psi(i)));
  j["state"] = amps;
  return j;
}

void print_closure(std::ostream& out, const Closure& c) {
  out << show(c.term);
  if (!c.reg.empty()) {
    out << "  [";
    for (std::size_t i = 0; i < c.reg.size(); ++i) out << (i ? " " : "") << c.reg[i];
    out << "]  ψ =";
    for (Eigen::Index i = 0; i < c.psi.size(); ++i) {
      auto z = c.psi(i);
      out << " " << fmt(z.real());
      if (z.imag() != 0) out << (z.imag() < 0 ? "" : "+") << fmt(z.imag()) << "i";
    }
  }
  out << "\n";
}

int cmd_check(const Options& o) {
  Program p = load(o.file);
  Derivation d = typecheck({}, p.term);
  if (o.json)
    std::cout << json{{"file", o.file}, {"type", print_type(d.type)}}.dump(2) << "\n";
  else
    std::cout << print_type(d.type) << "\n";
  return kOk;
}

int cmd_run(const Options& o) {
  Program p = load(o.file);
  typecheck({}, p.term);
  std::mt19937_64 rng(o.seed);
  Run r = sample(make_closure(p.term), rng, o.max_steps);
  if (o.json) {
    json j{{"file", o.file}, {"seed", o.seed}, {"finished", r.finished}, {"steps", r.trace.size()},
           {"result", closure_json(r.result)}};
    if (o.trace) {
      json t = json::array();
      for (auto& s : r.trace) t.push_back({{"rule", s.rule}, {"prob", round12(s.prob)}, {"term", show(s.closure.term)}});
      j["trace"] = t;
    }
    std::cout << j.dump(2) << "\n";
  } else {
    if (o.trace)
      for (auto& s : r.trace) std::cout << s.rule << "  " << fmt(s.prob) << "  " << show(s.closure.term) << "\n";
    print_closure(std::cout, r.result);
    if (!r.finished) std::cout << "stopped after " << r.trace.size() << " steps\n";
  }
  return r.finished ? kOk : kFailed;
}

Distribution enumerate(const Program& p, const Options& o) {
  BigStepOptions bo;
  bo.max_steps = o.max_steps;
  bo.threads = o.threads;
  return big_step(make_closure(p.term), bo);
}

int cmd_enumerate(const Options& o) {
  Program p = load(o.file);
  Type t = typecheck({}, p.term).type;
  Distribution d = enumerate(p, o);
  if (o.json) {
    json leaves = json::array();
    for (auto& l : d.leaves) {
      json j = closure_json(l.closure);
      j["prob"] = round12(l.prob);
      leaves.push_back(j);
    }
    json j{{"file", o.file}, {"type", print_type(t)}, {"leaves", leaves},
           {"truncated", round12(d.truncated)}, {"paths", d.paths}, {"longest_path", d.longest}};
    if (is_bit(t)) {
      auto [ff, tt] = observe(d);
      j["p_ff"] = round12(ff);
      j["p_tt"] = round12(tt);
    }
    std::cout << j.dump(2) << "\n";
  } else {
    for (auto& l : d.leaves) {
      std::cout << fmt(l.prob) << "  ";
      print_closure(std::cout, l.closure);
    }
    if (d.truncated > 0) std::cout << "truncated " << fmt(d.truncated) << "\n";
  }
  return d.truncated > 0 ? kFailed : kOk;
}

json matrix_json(const vna::Morphism& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.m.cols(); ++c) row.push_back(complex_json(m.m(r, c)));
    rows.push_back(row);
  }
  return rows;
}

int cmd_denote(const Options& o) {
  Program p = load(o.file);
  Type t = typecheck({}, p.term).type;
  try {
    vna::Morphism m = denot::denote(make_closure(p.term));
    if (o.json) {
      std::cout << json{{"file", o.file},
                        {"type", print_type(t)},
                        {"dom_blocks", m.dom.blocks},
                        {"cod_blocks", m.cod.blocks},
                        {"matrix", matrix_json(m)}}
                       .dump(2)
                << "\n";
    } else {
      std::cout << print_type(t) << " : " << vna::to_string(m.dom) << " -> " << vna::to_string(m.cod) << "\n";
      for (Eigen::Index r = 0; r < m.m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.m.cols(); ++c) {
          auto z = m.m(r, c);
          std::cout << (c ? "  " : "") << fmt(z.real());
          if (z.imag() != 0) std::cout << (z.imag() < 0 ? "" : "+") << fmt(z.imag()) << "i";
        }
        std::cout << "\n";
      }
    }
    return kOk;
  } catch (const denot::ResidualError& e) {
    std::string r = denot::print(e.residual());
    if (o.json)
      std::cout << json{{"file", o.file}, {"type", print_type(t)}, {"residual", r}}.dump(2) << "\n";
    else
      std::cout << print_type(t) << " : no matrix, residual " << r << "\n";
    return kFailed;
  }
}

int cmd_adequacy(const Options& o) {
  auto t0 = std::chrono::steady_clock::now();
  Program p = load(o.file);
  Type t = typecheck({}, p.term).type;
  if (!is_bit(t)) throw TypeError({}, "adequacy needs a program of type bit, got " + print_type(t));
  Distribution d = enumerate(p, o);
  auto [ff, tt] = observe(d);
  auto t1 = std::chrono::steady_clock::now();
  vna::Morphism m = denot::denote(make_closure(p.term));
  auto t2 = std::chrono::steady_clock::now();
  double dff = m.m(0, 0).real(), dtt = m.m(0, 1).real();
  double diff = std::max({std::abs(m.m(0, 0) - ff), std::abs(m.m(0, 1) - tt)});
  bool ok = diff <= o.tol && d.truncated == 0;
  auto ms = [](auto a, auto b) { return std::chrono::duration<double, std::milli>(b - a).count(); };
  if (o.json) {
    std::cout << json{{"file", o.file},
                      {"type", print_type(t)},
                      {"p_ff", round12(ff)},
                      {"p_tt", round12(tt)},
                      {"denot_p_ff", round12(dff)},
                      {"denot_p_tt", round12(dtt)},
                      {"difference", diff},
                      {"tol", o.tol},
                      {"ok", ok},
                      {"paths", d.paths},
                      {"longest_path", d.longest},
                      {"truncated", round12(d.truncated)},
                      {"operational_ms", ms(t0, t1)},
                      {"denotational_ms", ms(t1, t2)}}
                     .dump(2)
              << "\n";
  } else {
    std::cout << "operational    ff " << fmt(ff) << "  tt " << fmt(tt) << "\n"
              << "denotational   ff " << fmt(dff) << "  tt " << fmt(dtt) << "\n"
              << "difference     " << fmt(diff) << (ok ? "  ok" : "  FAIL") << "\n"
              << "paths " << d.paths << ", longest " << d.longest << " steps, " << fmt(ms(t0, t2)) << " ms\n";
  }
  return ok ? kOk : kFailed;
}

std::string error_kind(const std::exception& e) {
  if (dynamic_cast<const ParseError*>(&e)) return "parse";
  if (dynamic_cast<const TypeError*>(&e)) return "type";
  if (dynamic_cast<const denot::ResidualError*>(&e)) return "residual";
  if (dynamic_cast<const EvalError*>(&e)) return "eval";
  return "internal";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quantum lambda calculus: typechecker, evaluator and denotational semantics"};
  app.require_subcommand(1);
  Options o;
  std::map<std::string, int (*)(const Options&)> commands = {
      {"check", cmd_check}, {"run", cmd_run}, {"enumerate", cmd_enumerate},
      {"denote", cmd_denote}, {"adequacy", cmd_adequacy}};
  std::map<std::string, std::string> help = {
      {"check", "print the type of a closed program"},
      {"run", "sample one reduction path"},
      {"enumerate", "exact outcome distribution"},
      {"denote", "matrix of the program's denotation"},
      {"adequacy", "compare operational and denotational probabilities"}};
  for (auto& [name, fn] : commands) {
    CLI::App* sub = app.add_subcommand(name, help[name]);
    sub->add_option("file", o.file, "program file")->required();
    sub->add_option("--seed", o.seed, "random seed for run");
    sub->add_option("--max-steps", o.max_steps, "step cap per path")->check(CLI::PositiveNumber);
    sub->add_option("--tol", o.tol, "adequacy tolerance")->check(CLI::NonNegativeNumber);
    sub->add_flag("--json", o.json, "machine-readable output");
    sub->add_option("--threads", o.threads, "worker threads for enumeration")->check(CLI::Range(1u, 256u));
    sub->add_flag("--trace", o.trace, "print every step of run");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }
  const std::string name = app.get_subcommands().front()->get_name();
  try {
    return commands[name](o);
  } catch (const UsageError& e) {
    std::cerr << "qlc: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    if (o.json)
      std::cout << json{{"file", o.file}, {"error", {{"kind", error_kind(e)}, {"message", e.what()}}}}.dump(2)
                << "\n";
    std::cerr << "qlc: " << error_kind(e) << " error: " << e.what() << "\n";
    return kFailed;
  }
}
