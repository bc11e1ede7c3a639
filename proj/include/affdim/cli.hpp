#pragma once

// Command-line front end. Kept in the library so tests can drive it in-process.
//
// Exit status: 0 success, 2 validation error, 3 budget exhausted,
// 4 overlap found with --fail-on-overlap.

#include <cstddef>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "affdim/dimensions.hpp"
#include "affdim/error.hpp"
#include "affdim/estimator.hpp"
#include "affdim/io.hpp"
#include "affdim/separation.hpp"
#include "affdim/subsystem.hpp"

namespace affdim::cli {

enum ExitCode : int { kOk = 0, kValidation = 2, kBudget = 3, kOverlap = 4 };

enum class Command { dim, pressure, check_hochman, subsystem, boxcount, render };

struct RunConfig {
  Command command = Command::dim;
  std::string input_path;

  // pressure
  std::optional<double> t;
  bool root = false;
  // dim
  std::optional<std::string> weights;  // comma-separated, overrides the document
  std::size_t check_depth = 0;
  // check-hochman
  std::string axis = "x";
  std::size_t n = 10;
  double rate_floor = 1e-12;
  bool fail_on_overlap = false;
  // subsystem
  double epsilon = 0.1;
  std::size_t k_max = 12;
  // boxcount / render
  int max_exponent = 10;
  double delta = 1.0 / 256.0;
  std::string out_path;

  std::size_t max_words = kDefaultWordCap;
  std::size_t max_nodes = EstimatorOptions{}.node_cap;
  int max_bisect = 200;
};

namespace detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read input file '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void validate(const RunConfig& c) {
  if (c.max_words == 0 || c.max_nodes == 0 || c.max_bisect <= 0) throw ValidationError("budgets must be positive");
  switch (c.command) {
    case Command::pressure:
      if (c.t.has_value() == c.root) throw ValidationError("pressure needs exactly one of --t or --root");
      if (c.t && !(*c.t >= 0.0)) throw ValidationError("--t must be >= 0");
      break;
    case Command::check_hochman:
      if (c.axis != "x" && c.axis != "y") throw ValidationError("--axis must be x or y");
      if (c.n < 1) throw ValidationError("--n must be >= 1");
      break;
    case Command::subsystem:
      if (!(c.epsilon > 0.0)) throw ValidationError("--epsilon must be > 0");
      if (c.k_max < 1) throw ValidationError("--k-max must be >= 1");
      break;
    case Command::render:
      if (!(c.delta > 0.0) || c.delta > 1.0) throw ValidationError("--delta must lie in (0, 1]");
      if (c.out_path.empty()) throw ValidationError("render needs --out");
      break;
    default:
      break;
  }
}

inline std::vector<Rational> parse_weight_list(const std::string& s) {
  std::vector<Rational> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(Rational::parse(item));
  return out;
}

/// Writes the whole payload in one go: temp file then rename.
inline void write_atomically(const std::string& path, const std::string& payload) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw ValidationError("cannot write '" + path + "'");
    f << payload;
    if (!f) throw ValidationError("write to '" + path + "' failed");
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace detail

/// Executes one command; the report goes to `out` in a single write.
inline int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    detail::validate(config);
    const IfsDocument doc = parse_ifs_document(detail::read_file(config.input_path));
    const DiagonalIFS& ifs = doc.ifs;
    const RootOptions roots{1e-12, config.max_bisect};
    std::ostringstream payload;
    int status = kOk;

    switch (config.command) {
      case Command::dim: {
        DimensionReport b = theorem_b_dimension(ifs, roots);
        Json j = to_json(b);
        j["affinity_dimension"] = b.t0;
        std::optional<std::vector<Rational>> w = doc.weights;
        if (config.weights) w = detail::parse_weight_list(*config.weights);
        if (w) {
          const WeightVector wv = to_weight_vector(*w);
          const SpectralSummary s = lyapunov_exponents(wv, ifs);
          Json a = to_json(lyapunov_dimension(wv, ifs, roots));
          a["entropy"] = s.entropy;
          a["chi_x"] = s.chi_x;
          a["chi_y"] = s.chi_y;
          j["theorem_a"] = a;
        }
        if (config.check_depth > 0) {
          Json evidence = Json::object();
          for (Axis axis : b.hypotheses.hochman_required) {
            const SeparationReport r = hochman_report(project(ifs, axis), config.check_depth, config.max_words);
            if (r.budget_exhausted) status = kBudget;
            if (r.verdict == Verdict::overlap_found && config.fail_on_overlap && status == kOk) status = kOverlap;
            evidence[to_string(axis)] = {{"verdict", to_string(r.verdict)},
                                         {"levels", r.per_level.size()},
                                         {"overlap_witness", pair_json(r.overlap_witness)}};
          }
          j["hypotheses"]["checked_depth"] = config.check_depth;
          j["hochman_evidence"] = evidence;
        }
        j["note"] = "values are theorem conclusions only when the listed Hochman conditions hold";
        payload << j.dump(2) << '\n';
        break;
      }
      case Command::pressure: {
        Json j;
        if (config.t) {
          j["t"] = *config.t;
          j["pressure"] = pressure(ifs, *config.t);
        } else {
          j["affinity_dimension"] = affinity_dimension(ifs, roots);
        }
        payload << j.dump(2) << '\n';
        break;
      }
      case Command::check_hochman: {
        const Axis axis = axis_from_string(config.axis);
        const SeparationReport r = hochman_report(project(ifs, axis), config.n, config.max_words, config.rate_floor);
        Json j = to_json(r);
        j["axis"] = config.axis;
        payload << j.dump(2) << '\n';
        if (r.budget_exhausted) status = kBudget;
        else if (r.verdict == Verdict::overlap_found && config.fail_on_overlap) status = kOverlap;
        break;
      }
      case Command::subsystem: {
        std::optional<WeightVector> w;
        if (doc.weights) w = to_weight_vector(*doc.weights);
        const SubsystemResult r = approximate_subsystem(ifs, config.epsilon, config.k_max, config.max_words, w);
        payload << to_json(r).dump(2) << '\n';
        if (r.budget_exhausted && !r.target_reached) status = kBudget;
        break;
      }
      case Command::boxcount: {
        EstimatorOptions opt;
        opt.node_cap = config.max_nodes;
        const BoxCountSeries s = estimate_box_dimension(ifs, config.max_exponent, opt);
        write_csv(s, payload);
        err << "slope " << s.slope << " r_squared " << s.r_squared << " (fit from delta=" << s.scales[s.fit_start]
            << ")\n";
        break;
      }
      case Command::render: {
        std::ostringstream pgm;
        write_pgm(ifs, config.delta, pgm, config.max_nodes);
        detail::write_atomically(config.out_path, pgm.str());
        payload << Json{{"written", config.out_path}, {"delta", config.delta}}.dump() << '\n';
        break;
      }
    }
    out << payload.str();
    return status;
  } catch (const BudgetExceeded& e) {
    err << "budget exhausted: " << e.what() << '\n';
    return kBudget;
  } catch (const ValidationError& e) {
    err << config.input_path << ": " << e.what() << '\n';
    return kValidation;
  } catch (const std::filesystem::filesystem_error& e) {
    err << e.what() << '\n';
    return kValidation;
  }
}

/// Parses argv and runs. `--help` prints usage and returns 0.
inline int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"affdim: dimension tools for planar diagonal affine IFSs"};
  app.require_subcommand(1);
  RunConfig c;

  const auto common = [&](CLI::App* sub) {
    sub->add_option("input", c.input_path, "IFS document (JSON)")->required();
    sub->add_option("--max-words", c.max_words, "cap on enumerated words/maps")->capture_default_str();
    sub->add_option("--max-bisect", c.max_bisect, "bisection iteration cap")->capture_default_str();
  };

  auto* dim = app.add_subcommand("dim", "Theorem-style dimension report");
  common(dim);
  dim->add_option("--weights", c.weights, "comma-separated probability vector, e.g. 1/2,1/4,1/4");
  dim->add_option("--check-depth", c.check_depth, "run the separation check on required axes to this depth");
  dim->add_flag("--fail-on-overlap", c.fail_on_overlap, "exit 4 if a required axis has an exact overlap");

  auto* pr = app.add_subcommand("pressure", "Pressure P(t) or its root");
  common(pr);
  pr->add_option("--t", c.t, "evaluate P at t >= 0");
  pr->add_flag("--root", c.root, "print the affinity dimension (root of P = 1)");

  auto* ch = app.add_subcommand("check-hochman", "Finite-depth separation report for one axis");
  common(ch);
  ch->add_option("--axis", c.axis, "x or y")->capture_default_str();
  ch->add_option("--n", c.n, "maximum word length")->capture_default_str();
  ch->add_option("--rate-floor", c.rate_floor, "healthy-rate floor")->capture_default_str();
  ch->add_flag("--fail-on-overlap", c.fail_on_overlap, "exit 4 on an exact overlap");

  auto* ss = app.add_subcommand("subsystem", "Strongly separated homogeneous subsystem search");
  common(ss);
  ss->add_option("--epsilon", c.epsilon, "allowed dimension loss")->capture_default_str();
  ss->add_option("--k-max", c.k_max, "largest iterate depth tried")->capture_default_str();

  auto* bc = app.add_subcommand("boxcount", "Box-counting series as CSV");
  common(bc);
  bc->add_option("--max-exponent", c.max_exponent, "finest scale 2^-e")->capture_default_str();
  bc->add_option("--max-nodes", c.max_nodes, "cap on visited cylinders")->capture_default_str();

  auto* rd = app.add_subcommand("render", "Occupancy raster (plain PGM)");
  common(rd);
  rd->add_option("--delta", c.delta, "cell size")->capture_default_str();
  rd->add_option("--out", c.out_path, "output .pgm path")->required();
  rd->add_option("--max-nodes", c.max_nodes, "cap on visited cylinders")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return kValidation;
  }

  if (dim->parsed()) c.command = Command::dim;
  else if (pr->parsed()) c.command = Command::pressure;
  else if (ch->parsed()) c.command = Command::check_hochman;
  else if (ss->parsed()) c.command = Command::subsystem;
  else if (bc->parsed()) c.command = Command::boxcount;
  else c.command = Command::render;
  return run(c, out, err);
}

}  // namespace affdim::cli
