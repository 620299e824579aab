#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include "mqs/sweep.hpp"
#include "mqs/validation.hpp"

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitConfig = 2;

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    double lo = 0, hi = 0;
    int count = 0;
    char c1 = 0, c2 = 0;
    std::istringstream is(text);
    if (!(is >> lo >> c1 >> hi >> c2 >> count) || c1 != ':' || c2 != ':' || count < 1 || !(is >> std::ws).eof())
      throw mqs::ConfigError("r_grid range must read start:stop:count, got '" + text + "'");
    for (int i = 0; i < count; ++i) out.push_back(count == 1 ? lo : lo + (hi - lo) * i / (count - 1));
    return out;
  }
  std::istringstream is(text);
  for (std::string tok; std::getline(is, tok, ',');) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw mqs::ConfigError("bad r_grid entry '" + tok + "'");
    }
  }
  return out;
}

std::optional<int> parse_n_max(const std::string& s) {
  if (s.empty() || s == "auto") return std::nullopt;
  try {
    std::size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw mqs::ConfigError("n_max must be an integer or 'auto', got '" + s + "'");
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r"), e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

// key=value lines; keys name the subcommand's long options, '_' and '-' interchangeable.
// Options already given on the command line keep their values.
void apply_config_file(CLI::App* sub, const std::string& path) {
  std::ifstream is(path);
  if (!is) throw mqs::ConfigError("cannot read config file " + path);
  int lineno = 0;
  for (std::string line; std::getline(is, line);) {
    ++lineno;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw mqs::ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    std::replace(key.begin(), key.end(), '_', '-');
    CLI::Option* opt = key == "config" ? nullptr : sub->get_option_no_throw("--" + key);
    if (!opt) throw mqs::ConfigError(path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
    if (opt->count() > 0) continue;
    try {
      opt->add_result(value);
      opt->run_callback();
    } catch (const CLI::Error& e) {
      throw mqs::ConfigError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

void print_line(const char* label, double v) { std::printf("%-34s %.10g\n", label, v); }

int run_info(const std::string& family, const std::vector<double>& gs, const std::vector<double>& alphas,
             double phi, const std::vector<int>& Ns, const std::string& n_max_s, double tol) {
  const auto n_max = parse_n_max(n_max_s);
  const auto fam = mqs::parse_family(family);
  std::printf("tail_tolerance                     %.3g\n", tol);
  switch (fam) {
    case mqs::Family::coherent_mqs:
    case mqs::Family::coherent_pointer:
      for (double a : alphas.empty() ? std::vector<double>{4.0} : alphas) {
        const bool cat = fam == mqs::Family::coherent_mqs;
        auto tail = [&](int n) { return cat ? mqs::coherent_mqs_pair_tail(a, phi, n) : mqs::coherent_tail(a, n); };
        std::printf("alpha = %g\n", a);
        print_line("  mean photon number", a * a);
        print_line("  required n_max", mqs::required_n_max(tail, tol));
        if (n_max) print_line("  tail at n_max", tail(*n_max));
      }
      break;
    case mqs::Family::noon:
      for (int N : Ns.empty() ? std::vector<int>{2, 4, 8} : Ns) {
        std::printf("N = %d\n", N);
        print_line("  mean photon number", N);
        print_line("  required n_max", N);
      }
      break;
    default:
      for (double g : gs.empty() ? std::vector<double>{0.8, 1.1, 1.3, 1.5} : gs) {
        if (!(g > 0.0)) throw mqs::ConfigError("g must be > 0");
        std::printf("g = %g (C = %.10g, Gamma = %.10g)\n", g, std::cosh(g), std::tanh(g));
        print_line("  mean photon number", mqs::qiopa_mean_photon_number(g));
        print_line("  slope limit closed form", mqs::qiopa_slope_limit(g));
        print_line("  required n_max (equatorial)",
                   mqs::required_n_max([&](int n) { return mqs::qiopa_equatorial_tail(g, n); }, tol));
        print_line("  required n_max (H/V)", mqs::required_n_max([&](int n) { return mqs::qiopa_pi_tail(g, n); }, tol));
        if (n_max) {
          print_line("  equatorial tail at n_max", mqs::qiopa_equatorial_tail(g, *n_max));
          print_line("  H/V tail at n_max", mqs::qiopa_pi_tail(g, *n_max));
        }
      }
  }
  return 0;
}

int run_validate(const mqs::ValidationOptions& opt, const std::string& json_path) {
  const auto rep = mqs::validate(opt);
  for (const auto& c : rep.checks) {
    std::printf("%s %-44s observed=%.6g", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.observed);
    if (c.expected != 0.0) std::printf(" expected=%.6g", c.expected);
    std::printf(" tol=%.3g%s%s\n", c.tolerance, c.detail.empty() ? "" : " ", c.detail.c_str());
  }
  std::printf("%zu checks, %s, %.1f s\n", rep.checks.size(), rep.passed() ? "all passed" : "FAILURES", rep.seconds);
  if (rep.over_budget) std::fprintf(stderr, "warning: validation exceeded its %.0f s budget\n", opt.budget_seconds);
  if (!json_path.empty()) {
    nlohmann::json j;
    j["passed"] = rep.passed();
    j["seconds"] = rep.seconds;
    j["over_budget"] = rep.over_budget;
    for (const auto& c : rep.checks)
      j["checks"].push_back({{"name", c.name}, {"passed", c.passed}, {"observed", c.observed},
                             {"expected", c.expected}, {"tolerance", c.tolerance}, {"detail", c.detail}});
    if (json_path == "-") {
      std::cout << j.dump(2) << '\n';
    } else {
      std::ofstream os(json_path);
      if (!os) throw mqs::ConfigError("cannot open " + json_path);
      os << j.dump(2) << '\n';
    }
  }
  return rep.passed() ? 0 : kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decoherence of macroscopic superpositions under photon loss"};
  app.require_subcommand(1);

  auto* sweep = app.add_subcommand("sweep", "Evaluate Bures distances over a reflectivity grid and write CSV");
  std::string config_path, family = "coherent_mqs", r_grid, n_max_s = "auto", output = "-";
  sweep->add_option("--config", config_path, "key=value configuration file; flags override it");
  std::vector<double> alpha, phi, g;
  std::vector<int> N, k;
  double tol = 1e-10;
  unsigned workers = 0;
  sweep->add_option("--family", family, "coherent_mqs | coherent_pointer | noon | qiopa_equatorial | qiopa_hv | qiopa_ofiltered");
  sweep->add_option("--alpha", alpha, "coherent amplitudes")->delimiter(',');
  sweep->add_option("--phi", phi, "phases")->delimiter(',');
  sweep->add_option("--N", N, "NOON photon numbers")->delimiter(',');
  sweep->add_option("--g", g, "parametric gains")->delimiter(',');
  sweep->add_option("--k", k, "O-filter thresholds")->delimiter(',');
  sweep->add_option("--r-grid,--r_grid", r_grid, "reflectivities: comma list or start:stop:count");
  sweep->add_option("--n-max,--n_max", n_max_s, "photons per mode, or auto");
  sweep->add_option("--tail-tolerance,--tail_tolerance", tol, "admissible probability outside the truncation");
  sweep->add_option("--output,-o", output, "CSV path, - for stdout");
  sweep->add_option("--workers", workers, "worker threads (0: all cores; MQS_WORKERS overrides)");

  auto* val = app.add_subcommand("validate", "Run the oracle cross-check suite");
  mqs::ValidationOptions vopt;
  std::string json_path;
  val->add_option("--n-max,--n_max", vopt.n_max, "output truncation of the closed-form comparisons");
  val->add_option("--max-gain,--max_gain", vopt.max_gain, "largest gain exercised");
  val->add_option("--json", json_path, "write a JSON summary (- for stdout)");

  auto* info = app.add_subcommand("info", "Print mean photon number, slope limit and truncation diagnosis");
  std::string ifamily = "qiopa_equatorial", in_max = "auto";
  std::vector<double> ig, ialpha;
  std::vector<int> iN;
  double itol = 1e-10, iphi = std::numbers::pi / 2;
  info->add_option("--family", ifamily);
  info->add_option("--phi", iphi, "coherent_mqs phase");
  info->add_option("--g", ig)->delimiter(',');
  info->add_option("--alpha", ialpha)->delimiter(',');
  info->add_option("--N", iN)->delimiter(',');
  info->add_option("--n-max,--n_max", in_max);
  info->add_option("--tail-tolerance,--tail_tolerance", itol);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*sweep) {
      if (!config_path.empty()) apply_config_file(sweep, config_path);
      mqs::SweepConfig cfg;
      cfg.family = mqs::parse_family(family);
      cfg.alpha = alpha;
      cfg.phi = phi;
      cfg.N = N;
      cfg.g = g;
      cfg.k = k;
      if (!r_grid.empty()) cfg.r_grid = parse_grid(r_grid);
      cfg.n_max = parse_n_max(n_max_s);
      cfg.tail_tolerance = tol;
      cfg.output_path = output;
      cfg.workers = workers;
      cfg.apply_defaults();
      cfg.check();
      std::ofstream file;
      if (output != "-") {
        file.open(output);
        if (!file) throw mqs::ConfigError("cannot open " + output);
      }
      const auto rows = mqs::run_sweep(cfg);
      mqs::write_csv(output == "-" ? std::cout : file, rows);
      std::size_t failed = 0;
      for (const auto& r : rows) failed += !r.ok();
      if (failed) std::fprintf(stderr, "%zu of %zu rows failed; see the status column\n", failed, rows.size());
      return 0;
    }
    if (*val) return run_validate(vopt, json_path);
    if (*info) return run_info(ifamily, ig, ialpha, iphi, iN, in_max, itol);
  } catch (const mqs::ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  }
  return 0;
}
