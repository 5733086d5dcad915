// bibliostat: command-line front end for the analysis pipeline.
//
//   bibliostat validate --config run.json
//   bibliostat run      --config run.json [--out DIR] [--venue V]... [--year-range 2005-2012]
//                       [--method default|pgf] [--tau 0.1] [--no-improvement]
//   bibliostat emit fig1 --out DIR
//   bibliostat tune     --config run.json [--target 0.8]
//
// Exit status: 0 success, 1 validation error, 2 runtime error.

#include "bibliostat/error.hpp"
#include "bibliostat/pipeline.hpp"
#include "bibliostat/text.hpp"
#include "bibliostat/tsv.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <iostream>

namespace {

namespace bp = bibliostat::pipeline;

constexpr int kOk = 0;
constexpr int kValidation = 1;
constexpr int kRuntime = 2;

struct Overrides {
  std::string config;
  std::string out;
  std::vector<std::string> venues;
  std::string year_range;
  std::string method;
  std::optional<double> tau;
  bool no_improvement = false;
};

void add_config_options(CLI::App* cmd, Overrides& o, bool full) {
  cmd->add_option("--config", o.config, "Run configuration (JSON)")->required();
  cmd->add_option("--out", o.out, "Output directory");
  if (!full) {
    return;
  }
  cmd->add_option("--venue", o.venues, "Restrict to a venue (repeatable)");
  cmd->add_option("--year-range", o.year_range, "First and last year, e.g. 2005-2012");
  cmd->add_option("--method", o.method, "Classification method")->check(CLI::IsMember({"default", "pgf"}));
  cmd->add_option("--tau", o.tau, "Uncertainty threshold");
  cmd->add_flag("--no-improvement", o.no_improvement, "Keep leading initials in name lookup");
}

std::pair<int, int> parse_year_range(const std::string& s) {
  const auto sep = s.find_first_of("-:,", 1);
  int lo = 0;
  int hi = 0;
  const char* end = s.data() + s.size();
  if (sep == std::string::npos ||
      std::from_chars(s.data(), s.data() + sep, lo).ptr != s.data() + sep ||
      std::from_chars(s.data() + sep + 1, end, hi).ptr != end) {
    throw bibliostat::ValidationError("--year-range expects FIRST-LAST, got '" + s + "'");
  }
  return {lo, hi};
}

bp::RunConfig effective_config(const Overrides& o) {
  bp::RunConfig cfg = bp::load_config(o.config);
  if (!o.out.empty()) {
    cfg.output_dir = o.out;
  }
  if (!o.venues.empty()) {
    cfg.venue_filter = o.venues;
  }
  if (!o.year_range.empty()) {
    cfg.year_range = parse_year_range(o.year_range);
  }
  if (!o.method.empty()) {
    cfg.classifier.method = *bibliostat::gender::parse_method(o.method);
  }
  if (o.tau) {
    cfg.classifier.tau = *o.tau;
  }
  if (o.no_improvement) {
    cfg.classifier.improvement_enabled = false;
  }
  return cfg;
}

int guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const bibliostat::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntime;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bibliometric analysis of venue corpora"};
  app.require_subcommand(1);

  Overrides validate_opts;
  auto* validate = app.add_subcommand("validate", "Check a run configuration and its inputs");
  add_config_options(validate, validate_opts, true);

  Overrides run_opts;
  auto* run = app.add_subcommand("run", "Run every enabled analysis and write its tables");
  add_config_options(run, run_opts, true);

  std::string figure;
  std::string emit_out;
  std::string emit_config;
  auto* emit = app.add_subcommand("emit", "Write the plot series of one figure from a finished run");
  emit->add_option("figure", figure, "Figure id (fig1..fig10, fig12..fig16)")->required();
  emit->add_option("--out", emit_out, "Output directory of the run");
  emit->add_option("--config", emit_config, "Run configuration naming the output directory");

  Overrides tune_opts;
  std::optional<double> target;
  auto* tune = app.add_subcommand("tune", "Choose the uncertainty threshold for a coverage target");
  add_config_options(tune, tune_opts, true);
  tune->add_option("--target", target, "Coverage to exceed, in (0, 1]");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  if (validate->parsed()) {
    return guarded([&] {
      const auto problems = bp::validate(effective_config(validate_opts));
      for (const auto& p : problems) {
        std::cout << p << '\n';
      }
      if (problems.empty()) {
        std::cout << "ok\n";
        return kOk;
      }
      return kValidation;
    });
  }
  if (run->parsed()) {
    return guarded([&] {
      const auto cfg = effective_config(run_opts);
      const auto manifest = bp::run(cfg);
      for (const auto& f : manifest.files) {
        std::cout << f.path << '\t' << f.rows << '\n';
      }
      return kOk;
    });
  }
  if (emit->parsed()) {
    return guarded([&] {
      std::filesystem::path dir = emit_out;
      if (dir.empty()) {
        if (emit_config.empty()) {
          throw bibliostat::ValidationError("emit needs --out or --config");
        }
        dir = bp::load_config(emit_config).output_dir;
      }
      const auto entry = bp::emit_plot_series(dir, figure);
      std::cout << entry.path << '\t' << entry.rows << '\n';
      return kOk;
    });
  }
  return guarded([&] {
    const auto report = bp::tune(effective_config(tune_opts), target);
    std::cout << "tau\tcoverage\n";
    for (const auto& [tau, coverage] : report.result.coverage_by_tau) {
      std::cout << bibliostat::tsv::format(tau) << '\t' << bibliostat::tsv::format(coverage) << '\n';
    }
    std::cout << "# names " << report.names << ", target " << bibliostat::tsv::format(report.target)
              << ", selected tau " << bibliostat::tsv::format(report.result.tau)
              << (report.result.target_met ? "" : " (target not reached)") << '\n';
    return kOk;
  });
}
