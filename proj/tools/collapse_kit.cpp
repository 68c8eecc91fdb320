#include <iostream>

#include <CLI11.hpp>

#include "cli/commands.hpp"
#include "cli/report.hpp"
#include "collapse/parallel.hpp"
#include "collapse/error.hpp"

namespace {

void common_flags(CLI::App* sub, collapse::cli::Options& o) {
  sub->add_option("--checks", o.checks, "Checks to run (default: all for the input kind)")->delimiter(',');
  sub->add_option("--tol", o.tolerances, "Per-check tolerance override, check=value")->delimiter(',');
  sub->add_option("--out", o.out, "Write the report here instead of stdout");
  sub->add_option("--format", o.format, "json or csv-summary");
  sub->add_option("--config", o.config, "Run configuration JSON");
  sub->add_flag("--serial", o.serial, "Evaluate on one thread");
}

}  // namespace

int main(int argc, char** argv) {
  namespace cli = collapse::cli;
  CLI::App app{"Collapsibility and Yule-Simpson analysis of three-variable models"};
  app.set_version_flag("--version", std::string(cli::kVersion));
  app.require_subcommand(1);

  cli::Options opts;
  cli::BatchArgs batch;
  std::string input;
  std::optional<int> threads;

  auto* table = app.add_subcommand("table", "Exact checks on a y,x,w,count CSV table");
  table->add_option("csv", input, "Table CSV")->required();
  table->add_option("--order", opts.order, "Level order: numeric or appearance");
  common_flags(table, opts);

  auto* model = app.add_subcommand("model", "Numerical checks on a continuous model config");
  model->add_option("config-json", input, "Model configuration")->required();
  model->add_option("--grid", opts.grid, "auto, NYxNXxNW or a grid JSON file");
  model->add_flag("--emit-fields", opts.emit_fields, "Include full dependence and quantile fields");
  model->add_option("--threads", threads, "OpenMP thread count")->check(CLI::PositiveNumber);
  common_flags(model, opts);

  auto* cochran = app.add_subcommand("cochran", "Cochran decomposition from a y,x,w sample CSV or 3x3 covariance JSON");
  cochran->add_option("input", input, "Sample CSV or covariance JSON")->required();
  common_flags(cochran, opts);

  auto* bat = app.add_subcommand("batch", "Seeded property batch");
  bat->add_option("--seed", batch.seed, "Random seed");
  bat->add_option("--count", batch.count, "Number of generated cases");
  bat->add_option("--suite", batch.suite, "sufficiency, necessity, lattice, chain or cox");
  bat->add_option("--threads", threads, "OpenMP thread count")->check(CLI::PositiveNumber);
  common_flags(bat, opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

#ifdef _OPENMP
  if (threads) omp_set_num_threads(*threads);
#endif

  try {
    cli::Outcome out;
    if (*table)
      out = cli::cmd_table(input, opts);
    else if (*model)
      out = cli::cmd_model(input, opts);
    else if (*cochran)
      out = cli::cmd_cochran(input, opts);
    else
      out = cli::cmd_batch(batch, opts);
    cli::emit(out);
    return out.exit_code;
  } catch (const collapse::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << " (estimate " << e.estimate() << ", error bound "
              << e.error_bound() << ")\n";
    return 2;
  } catch (const collapse::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: malformed JSON input: " << e.what() << '\n';
    return 1;
  }
}
