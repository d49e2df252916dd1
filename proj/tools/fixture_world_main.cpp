// Copyright 2026 The DomainHarvester Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Serves a scripted fixture world, or generates a larger random one.
#include <CLI11.hpp>

#include <csignal>
#include <filesystem>
#include <iostream>

#include "domainharvester/error.hpp"
#include "domainharvester/fixtureworld.hpp"
#include "domainharvester/io.hpp"

namespace {

volatile std::sig_atomic_t g_stop = 0;

void on_signal(int) { g_stop = 1; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fixture web and DNS world", "dh-fixture-world"};
  app.require_subcommand(1);

  std::string script_path, workdir, out_path;
  int iteration = 1;
  auto* serve = app.add_subcommand("serve", "Serve one iteration on loopback until interrupted");
  serve->add_option("--script", script_path, "World script (JSON)")->required();
  serve->add_option("--iteration", iteration, "Iteration to serve");
  serve->add_option("--workdir", workdir, "Write seeds, CA bundle and a pipeline config here")->required();

  dh::fixture::GeneratedWorldOptions gen;
  auto* generate = app.add_subcommand("generate", "Write a generated world script");
  generate->add_option("--out", out_path, "Output file")->required();
  generate->add_option("--seeds", gen.seeds, "Seed domains");
  generate->add_option("--externals", gen.externals, "Linked external domains");
  generate->add_option("--mutations-per-kind", gen.mutations_per_kind, "Mutations per category");
  generate->add_option("--iterations", gen.iterations, "Iterations");
  generate->add_option("--seed", gen.seed, "RNG seed");
  generate->add_option("--risky-fraction", gen.risky_fraction, "Share of externals on the budget host profile");

  auto* manifest = app.add_subcommand("manifest", "Print the expected labels of an iteration");
  manifest->add_option("--script", script_path, "World script (JSON)")->required();
  manifest->add_option("--iteration", iteration, "Iteration (>= 2)")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*generate) {
      dh::write_file_atomic(out_path, dh::fixture::to_json_text(dh::fixture::generate_world(gen)));
      return 0;
    }
    const auto script = dh::fixture::WorldScript::load(script_path);
    if (*manifest) {
      for (const auto& [domain, category] : dh::fixture::expected_labels(script, iteration)) {
        std::cout << domain << " " << dh::labeling::to_string(category) << "\n";
      }
      return 0;
    }
    auto world = dh::fixture::serve_world(script, iteration);
    const std::filesystem::path dir(workdir);
    const auto cfg = dh::fixture::pipeline_config(script, *world, iteration, dir);
    dh::write_file_atomic(dir / "config.json", cfg.dump(2) + "\n");
    std::cout << "iteration " << iteration << " of " << script.name << ": http 127.0.0.1:" << world->http_port()
              << ", dns 127.0.0.1:" << world->dns_port() << "\n"
              << "config written to " << (dir / "config.json").string() << "\n"
              << std::flush;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    while (!g_stop) pause();
    world->stop();
  } catch (const dh::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
