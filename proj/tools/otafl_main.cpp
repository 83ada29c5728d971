/*
 * Copyright 2026 The otafl Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// otafl: train | lemma1 | theorem1 | sweep
//
// Exit status: 0 success, 2 configuration error, 3 infrastructure error.

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

#include "otafl/errors.hpp"
#include "otafl/experiment.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kInfraError = 3;

otafl::ExperimentConfig load_config(const std::string& path,
                                    const std::vector<std::string>& overrides,
                                    const std::string& output_dir) {
  auto cfg = otafl::ExperimentConfig::from_file(path);
  for (const auto& o : overrides) cfg.apply_override(o);
  if (!output_dir.empty()) cfg.set("output_dir", output_dir);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Over-the-air federated learning under heavy-tailed noise"};
  app.set_version_flag("--version", otafl::version_string());
  app.require_subcommand(1);

  // train / sweep share the config-file interface.
  std::string config_path, output_dir;
  std::vector<std::string> overrides;
  auto add_config_opts = [&](CLI::App* sub) {
    sub->add_option("config", config_path, "key = value config file")->required();
    sub->add_option("--set", overrides, "override a config key (key=value); beats the file");
    sub->add_option("--out", output_dir, "output directory; beats output_dir in the file");
  };
  auto* train = app.add_subcommand("train", "run every configured method, one CSV each");
  add_config_opts(train);
  auto* sweep = app.add_subcommand("sweep", "threshold search over clip_grid");
  add_config_opts(sweep);

  otafl::Lemma1Options l1;
  std::string law = "stability";
  std::string l1_out = "lemma1.csv";
  auto* lemma1 = app.add_subcommand("lemma1", "clip probability against the tail law");
  lemma1->add_option("--alphas", l1.config.alphas, "tail indices")->delimiter(',');
  lemma1->add_option("--tau", l1.config.tau, "noise scale");
  lemma1->add_option("--c-grid", l1.config.c_grid, "thresholds")->delimiter(',');
  lemma1->add_option("--grad-bound", l1.config.grad_bound, "G");
  lemma1->add_option("--samples", l1.config.n_samples, "Monte Carlo samples per point");
  lemma1->add_option("--seed", l1.config.seed, "seed");
  lemma1->add_option("--law", law, "difference law")->check(CLI::IsMember({"stability", "sqrt2"}));
  lemma1->add_option("--out", l1_out, "output CSV");

  otafl::Theorem1Options t1;
  t1.base.channel.noise = otafl::StableParams{1.5, 0.1};
  t1.base.learning_rate = 1.0;
  t1.testbed.b_scale = 10.0;
  std::string t1_out = "theorem1.csv";
  bool ideal = false;
  std::string fading = "rayleigh";
  auto* theorem1 = app.add_subcommand("theorem1", "convergence bound on a quadratic testbed");
  theorem1->add_option("--k-grid", t1.k_grid, "round counts")->delimiter(',');
  theorem1->add_option("--seeds", t1.n_seeds, "seeds per K");
  theorem1->add_option("--eta", t1.base.learning_rate, "learning rate (L = 1)");
  theorem1->add_option("--eta-grid", t1.eta_grid, "extra learning rates at max K")->delimiter(',');
  theorem1->add_option("--dim", t1.testbed.dim, "d");
  theorem1->add_option("--clients", t1.testbed.n_clients, "N");
  theorem1->add_option("--b-scale", t1.testbed.b_scale, "std of the linear terms");
  theorem1->add_option("--testbed-seed", t1.testbed.seed, "seed of the quadratic instance");
  theorem1->add_option("--alpha", t1.base.channel.noise.alpha, "noise tail index");
  theorem1->add_option("--tau", t1.base.channel.noise.tau, "noise scale");
  theorem1->add_option("--fading", fading, "rayleigh or none")
      ->check(CLI::IsMember({"rayleigh", "none"}));
  theorem1->add_option("--seed", t1.base.seed, "base run seed");
  theorem1->add_flag("--ideal", ideal, "noiseless channel: classical bound");
  theorem1->add_flag("--measure-pc", t1.measure_p_c, "Monte Carlo p_C in the bound");
  theorem1->add_option("--out", t1_out, "output CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (train->parsed()) {
      const auto out = otafl::cmd_train(load_config(config_path, overrides, output_dir), std::cout);
      for (const auto& f : out.files) std::cout << "wrote " << f.string() << '\n';
    } else if (sweep->parsed()) {
      const auto path = otafl::cmd_sweep(load_config(config_path, overrides, output_dir), std::cout);
      std::cout << "wrote " << path.string() << '\n';
    } else if (lemma1->parsed()) {
      l1.config.law =
          law == "sqrt2" ? otafl::DifferenceLaw::kSqrt2Scale : otafl::DifferenceLaw::kStability;
      l1.output = l1_out;
      otafl::cmd_lemma1(l1, std::cout);
      std::cout << "wrote " << l1_out << '\n';
    } else if (theorem1->parsed()) {
      if (ideal) {
        t1.base.channel = otafl::ChannelConfig::ideal();
      } else if (fading == "none") {
        t1.base.channel.fading = otafl::FadingModel::none();
      }
      t1.output = t1_out;
      otafl::cmd_theorem1(t1, std::cout);
      std::cout << "wrote " << t1_out << '\n';
    }
  } catch (const otafl::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInfraError;
  } catch (const otafl::RegimeError& e) {
    std::cerr << "refused: condition \"" << e.condition() << "\" does not hold: " << e.what()
              << '\n';
    return kConfigError;
  } catch (const otafl::Error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInfraError;
  }
  return kOk;
}
