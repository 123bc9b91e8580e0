#include "sphere_growth/cli.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "sphere_growth/characteristics.hpp"
#include "sphere_growth/classifier.hpp"
#include "sphere_growth/errors.hpp"
#include "sphere_growth/orbit.hpp"
#include "sphere_growth/quadrature.hpp"

namespace sphere_growth {

namespace {

using nlohmann::json;

// Bad user input discovered after CLI11 parsing.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string num(double v) { return fmt::format("{:.17g}", v); }

std::optional<double> parse_double(std::string_view s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::string_view rest = text;
  while (true) {
    const auto comma = rest.find(',');
    const auto v = parse_double(rest.substr(0, comma));
    if (!v) throw ConfigError(fmt::format("malformed {} '{}'", what, text));
    out.push_back(*v);
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return out;
}

ComplexPoint parse_complex(const std::string& text) {
  const auto v = parse_list(text, "point");
  if (v.size() == 1) return {v[0], 0.0};
  if (v.size() == 2) return {v[0], v[1]};
  throw ConfigError("a point is written re,im");
}

struct Settings {
  std::string map;
  std::string output;
  unsigned workers = 1;

  std::string region;
  int n = 1;
  std::string metric = "spherical";
  double abs_tol = 0.0, rel_tol = 0.0;
  int max_depth = 0;
  std::size_t samples = 1000000;
  std::uint64_t seed = 42;

  std::string z;
  double r = 0.0;
  int nmax = 0;
  Thresholds thresholds;
  bool two_radius = false;

  std::string rect = "-1.5,-1.5,1.5,1.5";
  int nx = 64, ny = 64;
  std::string pgm, slopes;

  std::string radii;
  double hadamard_k = 2.0;

  Tolerance tolerance() const { return Tolerance{abs_tol, rel_tol, max_depth}; }
};

unsigned default_workers() {
  if (const char* env = std::getenv("SPHERE_GROWTH_WORKERS")) {
    const auto v = parse_double(env);
    if (v && *v >= 1.0) return static_cast<unsigned>(*v);
  }
  return 1;
}

void add_tolerance(CLI::App* sub, Settings& s, const Tolerance& defaults) {
  s.abs_tol = defaults.abs_tol;
  s.rel_tol = defaults.rel_tol;
  s.max_depth = defaults.max_depth;
  sub->add_option("--abs-tol", s.abs_tol, "absolute quadrature tolerance");
  sub->add_option("--rel-tol", s.rel_tol, "relative quadrature tolerance");
  sub->add_option("--max-depth", s.max_depth, "quadtree depth limit (<= 24)");
}

void add_thresholds(CLI::App* sub, Settings& s) {
  sub->add_option("--tau-j", s.thresholds.tau_J, "slope threshold for Julia");
  sub->add_option("--v-min", s.thresholds.V_min, "minimal growth factor for Julia");
  sub->add_option("--b-f", s.thresholds.B_F, "area bound for Fatou");
}

// Everything the command resolved to, minus the worker count (which never
// changes results and would break byte-identical outputs).
json resolved_config(const CLI::App* sub, const MapSpec& map) {
  json j;
  j["command"] = sub->get_name();
  for (const CLI::Option* opt : sub->get_options()) {
    const std::string name = opt->get_single_name();
    if (name == "help" || name == "workers" || name == "config") continue;
    if (name == "map") {
      j["map"] = to_json(map);
      continue;
    }
    if (opt->get_expected_max() == 0) {
      j[name] = opt->count() > 0;
      continue;
    }
    std::string value = opt->count() > 0 ? opt->as<std::string>() : opt->get_default_str();
    if (const auto d = parse_double(value)) {
      j[name] = *d;
    } else {
      j[name] = value;
    }
  }
  return j;
}

std::string header(const CLI::App* sub, const MapSpec& map) {
  return "# config: " + resolved_config(sub, map).dump() + "\n";
}

// Writes to the named file, or to `out` when the name is empty.
void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open output file '" + path + "'");
  f << text;
}

int cmd_area(const CLI::App* sub, const Settings& s, std::ostream& out) {
  const MapSpec map = parse_map_argument(s.map);
  const Region region = Region::parse(s.region);
  std::string text = header(sub, map);
  int code = kExitOk;
  if (s.metric == "mc") {
    const McEstimate m = mc_area(map, s.n, region, s.samples, s.seed);
    text += "value,std_error,samples\n";
    text += fmt::format("{},{},{}\n", num(m.value), num(m.std_error), m.samples);
  } else {
    const Parallelism par{s.workers};
    const AreaEstimate a = s.metric == "euclidean" ? euclidean_area(map, s.n, region, s.tolerance(), par)
                                                   : spherical_area(map, s.n, region, s.tolerance(), par);
    text += csv_header_area() + "\n" + to_csv_row(a) + "\n";
    if (a.flagged()) code = kExitFlagged;
  }
  emit(s.output, text, out);
  return code;
}

int cmd_growth(const CLI::App* sub, const Settings& s, std::ostream& out) {
  const MapSpec map = parse_map_argument(s.map);
  const GrowthSeries g = growth_series(map, parse_complex(s.z), s.r, s.nmax, s.tolerance(), Parallelism{s.workers});
  std::string text = header(sub, map);
  text += "n,logS,value,error_est,cells,flags\n";
  bool flagged = false;
  for (std::size_t i = 0; i < g.n_values.size(); ++i) {
    const AreaEstimate& a = g.areas[i];
    text += fmt::format("{},{},{},{},{},{}\n", g.n_values[i], num(g.logS[i]), num(a.value), num(a.error_est), a.cells,
                        flags_string(a));
    flagged = flagged || a.flagged();
  }
  text += "# slope=" + (g.slope ? num(*g.slope) : std::string("undefined")) + "\n";
  emit(s.output, text, out);
  return flagged ? kExitFlagged : kExitOk;
}

int cmd_classify(const CLI::App* sub, const Settings& s, std::ostream& out) {
  const MapSpec map = parse_map_argument(s.map);
  const ComplexPoint z = parse_complex(s.z);
  const Parallelism par{s.workers};
  const GrowthSeries g = growth_series(map, z, s.r, s.nmax, s.tolerance(), par);
  Verdict v = classify_point(g, s.thresholds);
  if (s.two_radius) {
    const Verdict half = classify_point(growth_series(map, z, 0.5 * s.r, s.nmax, s.tolerance(), par), s.thresholds);
    if (half.kind != v.kind) v = Verdict::inconclusive("radius disagreement");
  }
  std::string text = header(sub, map);
  text += "z_re,z_im,r,verdict,slope\n";
  text += fmt::format("{},{},{},{},{}\n", num(z.real()), num(z.imag()), num(s.r), to_string(v),
                      g.slope ? num(*g.slope) : std::string());
  emit(s.output, text, out);
  return kExitOk;
}

int cmd_grid(const CLI::App* sub, const Settings& s, std::ostream& out) {
  const MapSpec map = parse_map_argument(s.map);
  const auto corners = parse_list(s.rect, "rect");
  if (corners.size() != 4) throw ConfigError("rect is x0,y0,x1,y1");
  GridJob job;
  job.rect = Region::rect({corners[0], corners[1]}, {corners[2], corners[3]});
  job.nx = s.nx;
  job.ny = s.ny;
  job.r = s.r;
  job.n_max = s.nmax;
  job.tol = s.tolerance();
  job.thresholds = s.thresholds;
  job.validate();
  const GridResult g = render_grid(map, job, Parallelism{s.workers});
  const std::string config = resolved_config(sub, map).dump();
  if (!s.slopes.empty()) emit(s.slopes, "# config: " + config + "\n" + slopes_csv(g), out);
  if (!s.pgm.empty() || s.slopes.empty()) emit(s.pgm, to_pgm(g, "config: " + config), out);
  return kExitOk;
}

int cmd_char(const CLI::App* sub, const Settings& s, std::ostream& out) {
  const MapSpec map = parse_map_argument(s.map);
  const auto radii = parse_list(s.radii, "radii");
  const double f0 = log_abs_eval(map, 0.0);
  std::string text = header(sub, map);
  text += "r,S_r,T0,m,N,T,logplusM,shimizu_slack,shimizu_pass,sandwich_left_slack,sandwich_right_slack,sandwich_pass\n";
  for (double r : radii) {
    const CharacteristicsSample c = characteristics_sample(map, r, Tolerance{}, Parallelism{s.workers});
    std::string shimizu = ",";
    if (std::isfinite(f0) || f0 == -std::numeric_limits<double>::infinity()) {
      const double slack = 0.5 * std::log(2.0) - std::abs(c.T0 - c.T - std::max(0.0, f0));
      shimizu = fmt::format("{},{}", num(slack), slack >= -1e-3 ? "PASS" : "FAIL");
    }
    std::string sandwich = ",,";
    if (map.is_entire()) {
      const SandwichReport sw = check_modulus_sandwich(map, r, 2.0 * r);
      sandwich = fmt::format("{},{},{}", num(sw.left_slack), num(sw.right_slack), sw.pass ? "PASS" : "FAIL");
    }
    text += fmt::format("{},{},{},{},{},{},{},{},{}\n", num(c.r), num(c.S_r), num(c.T0), num(c.m), num(c.N), num(c.T),
                        num(c.logplusM), shimizu, sandwich);
  }
  emit(s.output, text, out);
  return kExitOk;
}

bool is_monomial(const MapSpec& map, int* degree) {
  if (!map.is_polynomial()) return false;
  const auto& c = map.numerator().coeffs();
  const int d = map.numerator().degree();
  for (int k = 0; k < d; ++k) {
    if (c[static_cast<std::size_t>(k)] != ComplexPoint{}) return false;
  }
  if (c[static_cast<std::size_t>(d)] != ComplexPoint{1.0, 0.0} || map.denominator().coeffs()[0] != ComplexPoint{1.0, 0.0}) {
    return false;
  }
  *degree = d;
  return d >= 2;
}

int cmd_validate(const CLI::App* sub, const Settings& s, std::ostream& out) {
  const MapSpec map = parse_map_argument(s.map);
  const auto radii = parse_list(s.radii, "radii");
  const Parallelism par{s.workers};
  std::string text = header(sub, map);
  text += "check,param,value,slack,result\n";
  bool all_pass = true;
  auto row = [&](const std::string& check, const std::string& param, double value, double slack,
                 const std::string& result) {
    text += fmt::format("{},{},{},{},{}\n", check, param, num(value), num(slack), result);
    if (result == "FAIL") all_pass = false;
  };

  for (const ShimizuRow& r : check_shimizu_identity(map, s.n, radii, kT0Depth, par)) {
    row("shimizu", fmt::format("r={}", num(r.r)), r.T0 - r.T - r.log_plus_f0, r.slack, r.pass ? "PASS" : "FAIL");
  }
  if (map.is_entire()) {
    for (double r : radii) {
      const SandwichReport sw = check_modulus_sandwich(map, r, 2.0 * r);
      row("sandwich", fmt::format("r={};R={}", num(r), num(2.0 * r)), sw.log_plus_M,
          std::min(sw.left_slack, sw.right_slack), sw.pass ? "PASS" : "FAIL");
    }
  }
  if (map.is_entire() && !map.is_rational()) {
    for (double r : radii) {
      const HadamardReport h = hadamard_ratio_check(map, s.hadamard_k, r, 2.0 * r);
      if (!h.empirical_threshold) {
        row("hadamard", fmt::format("k={};r1={}", num(s.hadamard_k), num(r)), 0.0, 0.0, "THRESHOLD_NOT_FOUND");
        continue;
      }
      const std::string param = fmt::format("k={};r1={};threshold={}", num(s.hadamard_k), num(r),
                                            num(*h.empirical_threshold));
      row("hadamard_dense", param, *h.empirical_threshold, h.dense_min_margin, h.dense_pass ? "PASS" : "FAIL");
      if (h.r1_above_threshold) {
        row("hadamard_pair", param, h.pair_margin, h.pair_margin, h.pair_pass ? "PASS" : "FAIL");
      } else {
        row("hadamard_pair", param, h.pair_margin, h.pair_margin, "SKIPPED_BELOW_THRESHOLD");
      }
    }
  }
  int d = 0;
  if (is_monomial(map, &d)) {
    const auto [U, V] = monomial_covering_instance(d);
    for (const CoveringRow& c : check_covering_inequality(map, 1, U, V, {1, 2, 3, 4}, Tolerance{}, par)) {
      row("covering", fmt::format("n={}", c.n), c.lhs - c.rhs, c.lhs - c.rhs + c.budget, c.pass ? "PASS" : "FAIL");
    }
  }
  emit(s.output, text, out);
  return all_pass ? kExitOk : kExitFlagged;
}

int cmd_degree(const CLI::App* sub, const Settings& s, std::ostream& out) {
  const MapSpec map = parse_map_argument(s.map);
  const DegreeEstimate d = estimate_log_degree(map, parse_complex(s.z), s.r, s.nmax, s.tolerance(),
                                               Parallelism{s.workers});
  std::string text = header(sub, map);
  if (d.log_d) {
    text += "log_d_estimate=" + num(*d.log_d) + "\n";
    text += "d_estimate=" + num(std::exp(*d.log_d)) + "\n";
  } else {
    text += "log_d_estimate=undefined\n";
  }
  emit(s.output, text, out);
  return d.log_d ? kExitOk : kExitFlagged;
}

int cmd_orbit(const CLI::App* sub, const Settings& s, std::ostream& out) {
  const MapSpec map = parse_map_argument(s.map);
  const SpherePoint start = s.z == "inf" ? SpherePoint::infinity() : SpherePoint(parse_complex(s.z));
  const OrbitTrace t = orbit(map, start, s.n);
  std::string text = header(sub, map);
  text += "step,re,im,log_chordal_factor\n";
  for (std::size_t k = 0; k < t.points.size(); ++k) {
    const SpherePoint& p = t.points[k];
    const std::string re = p.is_infinity() ? "inf" : num(p.value().real());
    const std::string im = p.is_infinity() ? "inf" : num(p.value().imag());
    const std::string f = k < t.log_factors.size() ? num(t.log_factors[k]) : std::string();
    text += fmt::format("{},{},{},{}\n", k, re, im, f);
  }
  emit(s.output, text, out);
  return t.status == OrbitStatus::Saturated ? kExitFlagged : kExitOk;
}

// Turns {"key": value} into "--key value" tokens for the given subcommand.
std::vector<std::string> config_tokens(const std::string& path, const CLI::App* sub) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file '" + path + "'");
  json j;
  try {
    j = json::parse(f);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  std::vector<std::string> tokens;
  for (const auto& [key, value] : j.items()) {
    const CLI::Option* opt = sub->get_option_no_throw("--" + key);
    if (!opt || key == "config" || key == "help") throw ConfigError("unknown config key '" + key + "'");
    if (opt->get_expected_max() == 0) {
      if (!value.is_boolean()) throw ConfigError("config key '" + key + "' must be true or false");
      if (value.get<bool>()) tokens.push_back("--" + key);
      continue;
    }
    std::string text;
    if (value.is_string()) {
      text = value.get<std::string>();
    } else if (value.is_array() && key != "map") {
      for (const auto& item : value) {
        if (!text.empty()) text += ',';
        text += item.is_string() ? item.get<std::string>() : item.dump();
      }
    } else {
      text = value.dump();
    }
    tokens.push_back("--" + key);
    tokens.push_back(text);
  }
  return tokens;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spherical area growth of iterated holomorphic maps"};
  app.option_defaults()->always_capture_default()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  // One Settings per command: default_val() writes through immediately, so
  // sharing storage would let a later command overwrite earlier defaults.
  std::map<std::string, Settings> settings;

  std::map<std::string, std::function<int(const CLI::App*, const Settings&, std::ostream&)>> handlers;
  std::string config_path;
  auto command = [&](const std::string& name, const std::string& help, auto handler) {
    CLI::App* sub = app.add_subcommand(name, help);
    Settings& s = settings[name];
    s.workers = default_workers();
    sub->add_option("--map", s.map, "map as JSON or shortcut (id, z2, z3, exp, sin, cos, tan, quad:re,im)")
        ->required();
    sub->add_option("--config", config_path, "JSON file of option values");
    sub->add_option("--workers", s.workers, "worker threads (default $SPHERE_GROWTH_WORKERS or 1)");
    handlers[name] = handler;
    return std::pair{sub, &s};
  };

  {
    auto [area, sp] = command("area", "spherical, Euclidean or Monte-Carlo area of f^n over a region", cmd_area);
    Settings& s = *sp;
    area->add_option("--region", s.region, "disk:x,y,r | annulus:x,y,r_in,r_out | rect:x0,y0,x1,y1 | sphere")
        ->required();
    area->add_option("--n", s.n, "iteration count")->required();
    area->add_option("--metric", s.metric, "spherical, euclidean or mc")
        ->check(CLI::IsMember({"spherical", "euclidean", "mc"}));
    add_tolerance(area, s, Tolerance{});
    area->add_option("--samples", s.samples, "Monte-Carlo samples");
    area->add_option("--seed", s.seed, "Monte-Carlo seed");
    area->add_option("--output", s.output, "CSV file (default stdout)");
  }

  {
    auto [growth, sp] = command("growth", "log S(f^n, D(z,r)) for n = 1..nmax", cmd_growth);
    Settings& s = *sp;
    growth->add_option("--z", s.z, "center re,im")->required();
    growth->add_option("--r", s.r, "disk radius")->required();
    growth->add_option("--nmax", s.nmax, "largest n")->default_val(8);
    add_tolerance(growth, s, growth_tolerance());
    growth->add_option("--output", s.output, "CSV file (default stdout)");
  }

  {
    auto [classify, sp] = command("classify", "Julia/Fatou verdict at one point", cmd_classify);
    Settings& s = *sp;
    classify->add_option("--z", s.z, "point re,im")->required();
    classify->add_option("--r", s.r, "disk radius")->required();
    classify->add_option("--nmax", s.nmax, "largest n")->default_val(6);
    add_tolerance(classify, s, growth_tolerance());
    add_thresholds(classify, s);
    classify->add_flag("--two-radius", s.two_radius, "also classify at r/2 and require agreement");
    classify->add_option("--output", s.output, "CSV file (default stdout)");
  }

  {
    auto [grid, sp] = command("grid", "verdict grid over a rectangle", cmd_grid);
    Settings& s = *sp;
    grid->add_option("--rect", s.rect, "x0,y0,x1,y1");
    grid->add_option("--nx", s.nx, "columns");
    grid->add_option("--ny", s.ny, "rows");
    grid->add_option("--r", s.r, "disk radius")->default_val(0.05);
    grid->add_option("--nmax", s.nmax, "largest n")->default_val(6);
    add_tolerance(grid, s, grid_tolerance());
    add_thresholds(grid, s);
    grid->add_option("--pgm", s.pgm, "PGM file (default stdout)");
    grid->add_option("--slopes", s.slopes, "CSV file of slopes");
  }

  {
    auto [chr, sp] = command("char", "Nevanlinna and Ahlfors-Shimizu characteristics", cmd_char);
    Settings& s = *sp;
    chr->add_option("--radii", s.radii, "comma-separated radii")->required();
    chr->add_option("--output", s.output, "CSV file (default stdout)");
  }

  {
    auto [validate, sp] = command("validate", "run the characteristic inequalities", cmd_validate);
    Settings& s = *sp;
    validate->add_option("--radii", s.radii, "comma-separated radii")->default_val("0.5,1,2,4");
    validate->add_option("--n", s.n, "iterate used for the T0 identity")->default_val(1);
    validate->add_option("--hadamard-k", s.hadamard_k, "exponent in M(r2)/M(r1) >= (r2/r1)^k");
    validate->add_option("--output", s.output, "CSV file (default stdout)");
  }

  {
    auto [degree, sp] = command("degree", "estimate log d from the growth slope", cmd_degree);
    Settings& s = *sp;
    degree->add_option("--z", s.z, "center re,im")->required();
    degree->add_option("--r", s.r, "disk radius")->required();
    degree->add_option("--nmax", s.nmax, "largest n")->default_val(8);
    add_tolerance(degree, s, growth_tolerance());
    degree->add_option("--output", s.output, "file (default stdout)");
  }

  {
    auto [orb, sp] = command("orbit", "dump an orbit with its chordal factors", cmd_orbit);
    Settings& s = *sp;
    orb->add_option("--z", s.z, "start re,im or inf")->required();
    orb->add_option("--n", s.n, "steps")->required();
    orb->add_option("--output", s.output, "CSV file (default stdout)");
  }

  std::vector<std::string> argv = args;
  try {
    // --config is expanded before parsing so that explicit flags win (TakeLast).
    for (std::size_t i = 1; i < argv.size(); ++i) {
      std::string path;
      std::size_t width = 0;
      if (argv[i] == "--config" && i + 1 < argv.size()) {
        path = argv[i + 1];
        width = 2;
      } else if (argv[i].rfind("--config=", 0) == 0) {
        path = argv[i].substr(9);
        width = 1;
      }
      if (width == 0) continue;
      const CLI::App* sub = app.get_subcommand_no_throw(argv[0]);
      if (!sub) throw ConfigError("--config must follow a command name");
      const auto tokens = config_tokens(path, sub);
      argv.erase(argv.begin() + static_cast<std::ptrdiff_t>(i), argv.begin() + static_cast<std::ptrdiff_t>(i + width));
      argv.insert(argv.begin() + 1, tokens.begin(), tokens.end());
      break;
    }
    std::vector<std::string> reversed(argv.rbegin(), argv.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  const CLI::App* sub = app.get_subcommands().front();
  Settings& s = settings.at(sub->get_name());
  if (s.workers < 1) s.workers = 1;
  try {
    return handlers.at(sub->get_name())(sub, s, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    switch (e.kind()) {
      case ErrorKind::RootFindingFailed:
      case ErrorKind::SaturatedOrbit: return kExitFlagged;
      default: return kExitConfig;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}

}  // namespace sphere_growth
