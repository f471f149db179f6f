#include "residua/driver.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "residua/constraints.hpp"
#include "residua/difftest.hpp"
#include "residua/parser.hpp"
#include "residua/pretty.hpp"
#include "residua/report.hpp"
#include "residua/specialize.hpp"
#include "residua/symbols.hpp"

namespace residua {

namespace fs = std::filesystem;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CompileError(ErrorKind::InputError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> expand_sources(const std::vector<std::string>& sources) {
  std::vector<std::string> paths;
  for (const auto& s : sources) {
    if (fs::is_directory(s)) {
      std::vector<std::string> found;
      for (const auto& e : fs::directory_iterator(s)) {
        if (e.is_regular_file() && e.path().extension() == ".f")
          found.push_back(e.path().string());
      }
      std::sort(found.begin(), found.end());
      paths.insert(paths.end(), found.begin(), found.end());
    } else if (fs::is_regular_file(s)) {
      paths.push_back(s);
    } else {
      throw CompileError(ErrorKind::InputError, "no such file or directory: " + s);
    }
  }
  if (paths.empty())
    throw CompileError(ErrorKind::InputError, "no .f source files found");
  return paths;
}

ReplacementPolicy parse_policy(const std::string& spec) {
  if (spec == "all") return ReplacementPolicy::all();
  if (spec == "none") return ReplacementPolicy::none();
  if (spec.rfind("keep:", 0) == 0) {
    std::string path = spec.substr(5);
    std::set<std::string> keep;
    std::istringstream in(read_file(path));
    std::string line;
    while (std::getline(in, line)) {
      size_t hash = line.find('#');
      if (hash != std::string::npos) line = line.substr(0, hash);
      size_t a = line.find_first_not_of(" \t\r");
      if (a == std::string::npos) continue;
      size_t b = line.find_last_not_of(" \t\r");
      std::string name = line.substr(a, b - a + 1);
      for (char& c : name) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      keep.insert(name);
    }
    return ReplacementPolicy::keep_list(std::move(keep));
  }
  throw CompileError(ErrorKind::InputError,
                     "bad --policy '" + spec + "' (want all | none | keep:<file>)");
}

// Test hook: flip an integer literal on the RHS of the given assignment.
void mutate_residual(Program& residual, int prov) {
  for (auto& u : residual.units) {
    std::function<bool(Body&)> walk = [&](Body& body) {
      for (auto& s : body) {
        if (s->prov == prov && s->kind == Stmt::Kind::Assign &&
            s->value->kind == Expr::Kind::Literal &&
            s->value->lit.type == Type::Integer) {
          auto fresh = std::make_shared<Stmt>(*s);
          fresh->value = Expr::literal(Value::integer(s->value->lit.i + 1), s->value->pos);
          s = fresh;
          return true;
        }
        auto mutate_nested = [&](Body& b) { return walk(b); };
        if (mutate_nested(s->then_body) || mutate_nested(s->else_body) ||
            mutate_nested(s->body))
          return true;
      }
      return false;
    };
    if (walk(u.body)) return;
  }
  throw CompileError(ErrorKind::InputError,
                     "debug-mutate: no integer-literal assignment with ProvId " +
                         std::to_string(prov));
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw CompileError(ErrorKind::InputError, "cannot write " + path.string());
  out << text;
}

}  // namespace

int run_pipeline(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    std::vector<std::pair<std::string, std::string>> files;
    for (const auto& p : expand_sources(config.sources))
      files.emplace_back(p, read_file(p));

    Program program = parse_program(files);
    SymbolTable symtab = resolve_symbols(program);

    ConstraintSet cs;
    if (!config.constraints_path.empty())
      cs = parse_constraints(read_file(config.constraints_path), config.constraints_path);

    SpecializeConfig sc;
    sc.policy = parse_policy(config.policy);
    sc.variant_cap = config.variant_cap;

    SpecializeResult result = specialize_program(program, symtab, cs, sc);
    if (config.debug_mutate) mutate_residual(result.residual, *config.debug_mutate);

    bool emit_program = config.emit == "program" || config.emit == "both";
    bool emit_report = config.emit == "report" || config.emit == "both";

    if (emit_program && !config.unchecked) {
      SymbolTable resid_symtab = resolve_symbols(result.residual);
      DiffConfig dc;
      dc.trials = config.trials;
      dc.seed = config.seed;
      dc.fuel = config.fuel;
      Verdict v = diff_test(program, symtab, result.residual, resid_symtab,
                            result.report, cs, dc);
      if (!v.passed) {
        err << "verification failed after " << v.trials << " trial(s): " << v.mismatch
            << "\n";
        if (v.counterexample) {
          err << "counterexample:\n";
          for (const auto& [key, entry] : *v.counterexample)
            err << "  " << key.str() << " = " << entry.value.printed() << "\n";
        }
        err << "no residual files written\n";
        return kExitVerifyFailed;
      }
      out << "verified: " << v.trials << " trials, no divergence\n";
    }

    fs::create_directories(config.out_dir);
    if (emit_program) {
      for (const auto& [name, text] : pretty_print(result.residual)) {
        fs::path dest = fs::path(config.out_dir) / fs::path(name).filename();
        write_text_file(dest, text);
        out << "wrote " << dest.string() << "\n";
      }
    }
    if (emit_report) {
      bool json = config.report_format == "json" || config.report_format == "both";
      bool html = config.report_format == "html" || config.report_format == "both";
      if (json) {
        std::string text = report_to_json(result.report, program, result.residual);
        auto problems = validate_report_json(text);
        if (!problems.empty())
          throw CompileError(ErrorKind::InternalError,
                             "report failed schema validation: " + problems.front());
        fs::path dest = fs::path(config.out_dir) / "report.json";
        write_text_file(dest, text);
        out << "wrote " << dest.string() << "\n";
      }
      if (html) {
        for (const auto& [name, text] :
             report_to_html(result.report, program, result.residual)) {
          fs::path dest = fs::path(config.out_dir) / name;
          write_text_file(dest, text);
        }
        out << "wrote " << (fs::path(config.out_dir) / "index.html").string()
            << " (+" << std::to_string(program.units.size()) << " unit pages)\n";
      }
    }
    return kExitOk;
  } catch (const CompileError& e) {
    err << e.what() << "\n";
    return kExitInputError;
  }
}

}  // namespace residua
