#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "hulluq/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Convex-hull uncertainty quantification for generative models"};
  app.require_subcommand(1);

  std::string config_path;
  hulluq::KeyValues cli_kv;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "key=value config file");
    auto capture = [&cli_kv](const std::string& key) {
      return [&cli_kv, key](const std::string& value) { cli_kv[key] = value; };
    };
    sub->add_option_function<std::string>("--seed", capture("seed"), "master RNG seed");
    sub->add_option_function<std::string>("--temperatures", capture("temperatures"),
                                          "comma-separated temperatures in (0,1]");
    sub->add_option_function<std::string>("--samples", capture("samples"),
                                          "responses per (instance, temperature)");
    sub->add_option_function<std::string>("--epsilon", capture("epsilon"),
                                          "DBSCAN epsilon");
    sub->add_option_function<std::string>("--min-samples", capture("min_samples"),
                                          "DBSCAN min_samples");
    sub->add_option_function<std::string>("--backend", capture("backend"),
                                          "generation backend: mock | remote");
    sub->add_option_function<std::string>("--embedder", capture("embedder"),
                                          "embedding backend: local | remote");
    sub->add_option_function<std::string>("--out", capture("out"), "output directory");
    sub->add_option_function<std::string>("--metadata-csv", capture("metadata_csv"),
                                          "dataset metadata CSV");
    sub->add_option_function<std::string>("--instances", capture("mock_instances"),
                                          "synthetic instance count (mock backend)");
    sub->add_option_function<std::string>("--top-k", capture("top_k"),
                                          "instances per report panel");
    sub->add_option_function<std::string>("--normalize", capture("normalize"),
                                          "divide areas by the run maximum");
  };

  CLI::App* collect = app.add_subcommand("collect", "sample responses from the backend");
  CLI::App* analyze = app.add_subcommand("analyze", "score responses and write tables");
  CLI::App* report = app.add_subcommand("report", "render the HTML report");
  add_common(collect);
  add_common(analyze);
  add_common(report);

  CLI11_PARSE(app, argc, argv);

  hulluq::RunConfig config;
  try {
    hulluq::KeyValues file_kv;
    if (!config_path.empty()) file_kv = hulluq::read_config_file(config_path);
    config = hulluq::make_config(file_kv, hulluq::read_env_overrides(), cli_kv);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return hulluq::kExitConfigError;
  }

  if (collect->parsed()) return hulluq::cmd_collect(config, std::cout);
  if (analyze->parsed()) return hulluq::cmd_analyze(config, std::cout);
  if (report->parsed()) return hulluq::cmd_report(config, std::cout);
  return hulluq::kExitConfigError;
}
