// iml: command-line front end for the invariant-metrics library.
//
//   iml catalog
//   iml eval    --domain <name|file.json> --quantity <id> --at <z> [--at <z> ...] [--out rows.csv]
//   iml dist    --domain <name|file.json> --kind <id> --from <z> --to <w> [--out rows.csv]
//   iml verify  <scenario> [--domain ..] [--anchor ..] [--eps ..] [--quantity ..] [--out report.json]
//   iml suite   [--out summary.csv] [--reports <dir>] [--jobs n]
//
// Exit status: 0 success or pass, 1 scenario fail, 2 usage or precondition error.

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <regex>
#include <map>
#include <sstream>

#include <unistd.h>

#include <CLI11.hpp>

#include "iml/iml.hpp"

namespace fs = std::filesystem;
using namespace iml;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

double parse_double(const std::string& s, const char* what) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw UsageError(std::string("malformed ") + what + " '" + s + "'");
  return v;
}

// <float>[+|-]<float>i, no spaces
cplx parse_complex(const std::string& s) {
  static const std::regex re(R"(^([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)([+-](?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)i$)");
  std::smatch m;
  if (!std::regex_match(s, m, re)) throw UsageError("malformed complex literal '" + s + "' (expected <float>[+|-]<float>i)");
  std::string im = m[2].str();
  if (im[0] == '+') im.erase(0, 1);
  return {parse_double(m[1].str(), "real part"), parse_double(im, "imaginary part")};
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string fmt(cplx z) {
  char buf[80];
  std::snprintf(buf, sizeof buf, "%.17g%+.17gi", z.real(), z.imag());
  return buf;
}

enum class DistKind { caratheodory, kobayashi, bergman, quasi_hyperbolic, s };

const std::map<std::string, DistKind> dist_kinds{{"caratheodory", DistKind::caratheodory},
                                                 {"kobayashi", DistKind::kobayashi},
                                                 {"bergman", DistKind::bergman},
                                                 {"quasi_hyperbolic", DistKind::quasi_hyperbolic},
                                                 {"s", DistKind::s}};

DomainSpec resolve_domain(const std::string& arg) {
  if (fs::is_regular_file(arg)) return load_domain(arg);
  if (arg.size() > 5 && arg.substr(arg.size() - 5) == ".json") throw UsageError("domain file not found: " + arg);
  return catalog_domain(arg);
}

void check_out_dir(const std::string& out) {
  if (out.empty()) return;
  const fs::path parent = fs::path(out).parent_path();
  if (!parent.empty() && !fs::is_directory(parent)) throw UsageError("output directory does not exist: " + parent.string());
}

// temp file in the target directory, then rename
void write_atomic(const std::string& path, const std::string& text) {
  const std::string tmp = path + ".tmp" + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary);
    if (!f) throw UsageError("cannot write " + tmp);
    f << text;
    if (!f.flush()) throw UsageError("write failed: " + tmp);
  }
  fs::rename(tmp, path);
}

void emit(const std::string& out, const std::string& text) {
  if (out.empty())
    std::cout << text;
  else
    write_atomic(out, text);
}

std::string suite_csv(const std::vector<SuiteResult>& results) {
  std::ostringstream os;
  os << "criterion,scenario,domain,anchor,eps,verdict,binding_check,estimate,error_indicator,target,tolerance\n";
  for (const auto& r : results) {
    const auto& e = r.entry;
    os << e.criterion << ',' << e.scenario << ',' << e.domain << ',';
    if (e.anchor) os << e.anchor->piece << ':' << fmt(e.anchor->t);
    os << ',' << (e.eps ? fmt(*e.eps) : "") << ',';
    if (!r.report) {
      os << "error,\"" << r.error << "\",,,,\n";
      continue;
    }
    const Check& b = r.report->binding();
    os << (r.pass() ? "pass" : "fail") << ",\"" << b.name << "\"," << fmt(b.estimate) << ',' << fmt(b.error_indicator)
       << ',' << fmt(b.target) << ',' << fmt(b.tolerance) << '\n';
  }
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Invariant metrics on planar domains: densities, distances and boundary-limit checks"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string tol_path = IML_DEFAULT_TOLERANCES, out;
  std::uint64_t seed = 0;
  app.add_option("--tolerances", tol_path, "tolerance profile (JSON)");
  app.add_option("--seed", seed, "seed for all sampling")->default_val(0);

  auto* cat = app.add_subcommand("catalog", "list the built-in domains");

  std::string domain_arg, quantity_arg = "kobayashi_kappa", kind_arg = "kobayashi", from_arg, to_arg;
  std::vector<std::string> at_args;
  auto* ev = app.add_subcommand("eval", "evaluate a density; CSV domain,z,quantity,value,uncertainty,method");
  ev->add_option("--domain", domain_arg, "catalog name or domain JSON file")->required();
  ev->add_option("--quantity", quantity_arg,
                 "caratheodory_gamma | kobayashi_kappa | bergman_beta_scaled | kernel_sqrt_scaled");
  ev->add_option("--at", at_args, "interior point(s), <float>[+|-]<float>i")->required();
  ev->add_option("--out", out, "CSV output file (default stdout)");

  auto* di = app.add_subcommand("dist", "evaluate a distance; CSV domain,z,w,kind,value,method,upper_bound,tolerance");
  di->add_option("--domain", domain_arg, "catalog name or domain JSON file")->required();
  di->add_option("--kind", kind_arg, "caratheodory | kobayashi | bergman | quasi_hyperbolic | s");
  di->add_option("--from", from_arg, "first point, <float>[+|-]<float>i")->required();
  di->add_option("--to", to_arg, "second point, <float>[+|-]<float>i")->required();
  di->add_option("--out", out, "CSV output file (default stdout)");

  std::string scenario_arg, anchor_arg;
  std::optional<double> eps_arg;
  std::optional<int> steps_arg;
  auto* ve = app.add_subcommand("verify", "run one scenario and write its JSON report");
  ve->add_option("scenario", scenario_arg, "scenario id (see `suite`)")->required();
  ve->add_option("--domain", domain_arg, "catalog name or domain JSON file");
  ve->add_option("--anchor", anchor_arg, "boundary anchor, <t> or <piece>:<t>");
  ve->add_option("--eps", eps_arg, "Hoelder exponent for the boundedness scenarios");
  ve->add_option("--quantity", quantity_arg, "restrict to one quantity");
  ve->add_option("--steps", steps_arg, "normal-ray schedule length K");
  ve->add_option("--out", out, "report file (default stdout)");

  unsigned jobs = 0;
  std::string reports_dir;
  auto* su = app.add_subcommand("suite", "run the acceptance scenarios; summary CSV");
  su->add_option("--out", out, "summary CSV (default stdout)");
  su->add_option("--reports", reports_dir, "directory for one JSON report per run");
  su->add_option("--jobs", jobs, "worker threads (0: hardware concurrency)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cat->parsed()) {
      for (const auto& e : catalog_entries()) std::cout << e.name << "\t" << e.description << "\n";
      return 0;
    }
    const Tolerances tol = Tolerances::load(tol_path);
    check_out_dir(out);

    if (ev->parsed()) {
      const QuantityId q = parse_quantity(quantity_arg);
      std::vector<cplx> pts;
      for (const auto& a : at_args) pts.push_back(parse_complex(a));
      const DomainSpec d = resolve_domain(domain_arg);
      std::ostringstream os;
      os << "domain,z,quantity,value,uncertainty,method\n";
      for (cplx z : pts) {
        const MetricSample m = density(d, z, q);
        os << d.name << ',' << fmt(z) << ',' << quantity_name(q) << ',' << fmt(m.value) << ',' << fmt(m.uncertainty) << ','
           << m.method << '\n';
      }
      emit(out, os.str());
      return 0;
    }

    if (di->parsed()) {
      const auto k = dist_kinds.find(kind_arg);
      if (k == dist_kinds.end()) throw UsageError("unknown distance kind '" + kind_arg + "'");
      const cplx z = parse_complex(from_arg), w = parse_complex(to_arg);
      const DomainSpec d = resolve_domain(domain_arg);
      DistanceResult r;
      switch (k->second) {
        case DistKind::caratheodory: r = poincare_dist(d, z, w, QuantityId::caratheodory_gamma); break;
        case DistKind::kobayashi: r = poincare_dist(d, z, w, QuantityId::kobayashi_kappa); break;
        case DistKind::bergman: r = bergman_dist(d, z, w); break;
        case DistKind::quasi_hyperbolic: r = quasi_hyperbolic_dist(d, z, w); break;
        case DistKind::s:
          if (!contains(d, z) || !contains(d, w)) throw PreconditionError("s_dist: points must be interior");
          r.value = s_dist(d, z, w);
          r.method = "closed_form";
          break;
      }
      std::ostringstream os;
      os << "domain,z,w,kind,value,method,upper_bound,tolerance\n";
      os << d.name << ',' << fmt(z) << ',' << fmt(w) << ',' << kind_arg << ',' << fmt(r.value) << ',' << r.method << ','
         << (r.upper_bound ? "true" : "false") << ',' << fmt(r.tolerance) << '\n';
      emit(out, os.str());
      return 0;
    }

    if (ve->parsed()) {
      const ScenarioInfo& info = find_scenario(scenario_arg);
      ScenarioInput in;
      in.seed = seed;
      in.eps = eps_arg;
      in.steps = steps_arg;
      if (ve->count("--quantity")) in.quantity = parse_quantity(quantity_arg);
      if (!anchor_arg.empty()) in.anchor = parse_anchor(anchor_arg);
      if (!domain_arg.empty()) in.domain = resolve_domain(domain_arg);
      if (info.needs_domain && !in.domain) throw UsageError("scenario '" + info.id + "' needs --domain");
      const ScenarioReport rep = info.run(in, tol);
      emit(out, rep.to_json().dump(2) + "\n");
      if (!out.empty()) {
        const Check& b = rep.binding();
        std::cout << rep.scenario << " " << (rep.pass() ? "pass" : "fail") << " estimate " << fmt(b.estimate) << " target "
                  << fmt(b.target) << " tolerance " << fmt(b.tolerance) << "\n";
      }
      return rep.pass() ? 0 : 1;
    }

    if (su->parsed()) {
      if (!reports_dir.empty() && !fs::is_directory(reports_dir))
        throw UsageError("reports directory does not exist: " + reports_dir);
      const auto results = run_suite(tol, seed, jobs);
      bool all = true;
      for (std::size_t i = 0; i < results.size(); ++i) {
        const auto& r = results[i];
        all = all && r.pass();
        std::cerr << (r.pass() ? "PASS " : "FAIL ") << r.entry.criterion << " " << r.entry.scenario << " "
                  << r.entry.domain << (r.error.empty() ? "" : "  error: " + r.error) << "  (" << fmt(r.seconds) << " s)\n";
        if (!reports_dir.empty() && r.report) {
          char name[32];
          std::snprintf(name, sizeof name, "%02zu-", i);
          write_atomic((fs::path(reports_dir) / (name + r.entry.scenario + ".json")).string(),
                       r.report->to_json().dump(2) + "\n");
        }
      }
      emit(out, suite_csv(results));
      return all ? 0 : 1;
    }
  } catch (const UsageError& e) {
    std::cerr << "iml: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "iml: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "iml: unexpected failure: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
