// Command line driver: check, solve, normalize, shape.
//
// Exit codes: 0 success, 1 diagnostics were reported, 2 usage error,
// 3 internal error (including solver/oracle disagreement under --oracle).

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <unistd.h>

#include "CLI11.hpp"
#include "stt/checker.hpp"
#include "stt/frontend.hpp"
#include "stt/oracle.hpp"
#include "stt/shape.hpp"
#include "stt/solver.hpp"

namespace {

bool use_color() {
  // STT_COLOR=never disables colors; anything else (or unset) means auto:
  // color only when stderr is a terminal.
  const char* c = std::getenv("STT_COLOR");
  if (c && std::string(c) == "never") return false;
  return isatty(fileno(stderr)) != 0;
}

void emit(const std::vector<stt::Diagnostic>& diags) {
  bool color = use_color();
  for (const auto& d : diags) std::cerr << stt::render(d, color) << "\n";
}

int run_check(const std::vector<std::string>& files) {
  stt::Environment env;
  stt::Solver solver;
  stt::Loader loader(env, solver);
  for (const auto& f : files) loader.load(f);
  emit(loader.diagnostics());
  if (!loader.diagnostics().empty()) return 1;
  std::cout << "ok: " << env.declarations().size() << " declarations checked\n";
  return 0;
}

int run_solve(const std::string& query, bool oracle) {
  stt::SolveQuery q;
  try {
    q = stt::parse_solve_query(query);
  } catch (const stt::CheckError& ce) {
    emit({ce.diag});
    return 1;
  }
  stt::Solver solver;
  bool yes = solver.entails(q.ctx, q.hyps, q.goal);
  if (oracle) {
    bool reference = stt::oracle_entails(q.cubes, q.hyps, q.goal);
    if (reference != yes) {
      std::cerr << "internal error: solver and reference procedure disagree on '" << query
                << "'\n";
      return 3;
    }
  }
  if (yes) {
    std::cout << "yes\n";
  } else {
    std::cout << "no\n";
    if (auto cm = solver.countermodel(q.ctx, q.hyps, q.goal))
      std::cout << "countermodel: " << *cm << "\n";
  }
  return 0;
}

int run_normalize(const std::string& file, const std::string& name) {
  stt::Environment env;
  stt::Solver solver;
  stt::Loader loader(env, solver);
  if (!loader.load(file)) {
    emit(loader.diagnostics());
    return 1;
  }
  const stt::Declaration* d = env.find(name);
  if (!d) {
    stt::Diagnostic dg;
    dg.code = stt::DiagCode::UnboundVariable;
    dg.file = file;
    dg.message = "no declaration named '" + name + "'";
    emit({dg});
    return 1;
  }
  if (d->kind == stt::Declaration::Kind::ShapeAlias) {
    std::cout << stt::print_declaration(*d);
    return 0;
  }
  stt::Checker ck(env, solver);
  stt::TriContext ctx;
  stt::ExprPtr subject =
      d->kind == stt::Declaration::Kind::Definition ? d->body : stt::mk::cnst(d->name);
  stt::ExprPtr nf = ck.normalize(ctx, subject, d->type);
  std::cout << stt::print_term(nf) << "\n";
  return 0;
}

int run_shape(const std::vector<std::string>& spec) {
  auto usage = [&]() {
    std::cerr << "usage: shape simplex N | boundary N | horn N K | diagonal | join N M\n";
    return 2;
  };
  auto arg = [&](size_t i) { return std::stoi(spec.at(i)); };
  try {
    stt::Shape s;
    if (spec[0] == "simplex" && spec.size() == 2) {
      s = stt::simplex(arg(1));
    } else if (spec[0] == "boundary" && spec.size() == 2) {
      s = stt::boundary(arg(1));
    } else if (spec[0] == "horn" && spec.size() == 3) {
      s = stt::horn(arg(1), arg(2));
    } else if (spec[0] == "diagonal" && spec.size() == 1) {
      s = stt::diagonal();
    } else if (spec[0] == "join" && spec.size() == 3) {
      s = stt::join(stt::simplex_augmented(arg(1)), stt::simplex_augmented(arg(2))).restriction;
    } else {
      return usage();
    }
    std::cout << stt::print_shape(s) << "\n";
    return 0;
  } catch (const stt::CheckError& ce) {
    emit({ce.diag});
    return 2;
  } catch (const std::invalid_argument&) {
    return usage();
  } catch (const std::out_of_range&) {
    return usage();
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Proof checker for a type theory with shapes"};
  app.require_subcommand(1);

  auto* check = app.add_subcommand("check", "Type-check .stt files");
  std::vector<std::string> files;
  check->add_option("files", files, ".stt files to check")->required()->expected(-1);

  auto* solve = app.add_subcommand("solve", "Decide a tope entailment");
  std::string query;
  bool oracle = false;
  solve->add_option("query", query, "e.g. \"x:2,y:2 | x<=y, y<=x |- x===y\"")->required();
  solve->add_flag("--oracle", oracle, "Cross-check against the reference decision procedure");

  auto* norm = app.add_subcommand("normalize", "Print the normal form of a declaration");
  std::string nfile, term;
  norm->add_option("file", nfile, ".stt file to load")->required();
  norm->add_option("--term", term, "Declaration to normalize")->required();

  auto* shape = app.add_subcommand("shape", "Print a generated shape as a literal");
  std::vector<std::string> spec;
  shape->add_option("spec", spec, "simplex N | boundary N | horn N K | diagonal | join N M")
      ->required()
      ->expected(-1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (check->parsed()) return run_check(files);
    if (solve->parsed()) return run_solve(query, oracle);
    if (norm->parsed()) return run_normalize(nfile, term);
    if (shape->parsed()) return run_shape(spec);
    return 2;
  } catch (const stt::CheckError& ce) {
    emit({ce.diag});
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
}
