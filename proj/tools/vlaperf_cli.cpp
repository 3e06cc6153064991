// vlaperf: roofline performance model for vision-language-action inference.
//
//   vlaperf analyze --model pi0 --hw thor
//   vlaperf analyze --model pi0 --hw b100 --placement edge --net 5g --async
//   vlaperf sweep --hw b100 --axis steps=1,10,50 --axis chunk=5,50,250 --format csv
//   vlaperf reproduce T9
//   vlaperf list-presets
//
// Exit codes: 0 success (including N/A results), 1 usage or config error,
// 2 a reproduced table is outside tolerance.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "vlaperf/commands.hpp"
#include "vlaperf/config.hpp"
#include "vlaperf/reference.hpp"
#include "vlaperf/report.hpp"

namespace {

using namespace vlaperf;

constexpr int kExitUsage = 1;
constexpr int kExitGolden = 2;

// Flag values are bound here and copied into RunSettings only when given,
// so a config file keeps its values for flags left unset.
struct Flags {
  std::string model, hw, placement, net, cloud_net, device_hw, decoding, format, out;
  std::int64_t chunk = 0, steps = 0, context_steps = 0, cameras = 0, dof = 0,
               language_tokens = 0, observation_bytes = 0, precision = 0;
  double s2_cap = 0;
  bool async = false;
  std::vector<std::string> axes;
  std::string config;
};

void add_scenario_flags(CLI::App& cmd, Flags& f) {
  cmd.add_option("--model", f.model, "Model id (see list-presets)");
  cmd.add_option("--hw", f.hw, "Serving accelerator id");
  cmd.add_option("--placement", f.placement, "on-device | edge | cloud | collaborative");
  cmd.add_option("--net", f.net, "Network id (edge link, cloud access hop, or device link)");
  cmd.add_option("--cloud-net", f.cloud_net, "Cloud hop network id");
  cmd.add_option("--device-hw", f.device_hw, "Device accelerator for collaborative placement");
  cmd.add_option("--chunk", f.chunk, "Action chunk size")->check(CLI::PositiveNumber);
  cmd.add_option("--steps", f.steps, "Denoising steps")->check(CLI::NonNegativeNumber);
  cmd.add_option("--context-steps", f.context_steps, "Long-context timestep")
      ->check(CLI::PositiveNumber);
  cmd.add_option("--decoding", f.decoding, "diffusion | autoregressive | autoregressive-parallel");
  cmd.add_option("--cameras", f.cameras, "Number of cameras")->check(CLI::NonNegativeNumber);
  cmd.add_option("--dof", f.dof, "Action degrees of freedom")->check(CLI::PositiveNumber);
  cmd.add_option("--language-tokens", f.language_tokens, "Prompt length in tokens")
      ->check(CLI::NonNegativeNumber);
  cmd.add_option("--observation-bytes", f.observation_bytes,
                 "Compressed observation upload size per inference")
      ->check(CLI::PositiveNumber);
  cmd.add_option("--precision", f.precision, "Bytes per element (1, 2 or 4)");
  cmd.add_flag("--async", f.async, "Report asynchronous throughput");
}

void add_output_flags(CLI::App& cmd, Flags& f) {
  cmd.add_option("--format", f.format, "table | csv | json")
      ->check(CLI::IsMember({"table", "csv", "json"}));
  cmd.add_option("--out", f.out, "Write output to a file instead of stdout");
  cmd.add_option("--config", f.config,
                 fmt::format("JSON config file (also searched in ${})", kPresetPathEnv));
}

RunSettings settings_from_flags(const CLI::App& cmd, const Flags& f) {
  RunSettings run;
  auto given = [&](const char* name) {
    try {
      return cmd.get_option(name)->count() > 0;
    } catch (const CLI::OptionNotFound&) {
      return false;
    }
  };
  if (given("--model")) run.model = f.model;
  if (given("--hw")) run.hw = f.hw;
  if (given("--placement")) run.placement = f.placement;
  if (given("--net")) run.net = f.net;
  if (given("--cloud-net")) run.cloud_net = f.cloud_net;
  if (given("--device-hw")) run.device_hw = f.device_hw;
  if (given("--decoding")) run.decoding = f.decoding;
  if (given("--format")) run.format = f.format;
  if (given("--out")) run.out = f.out;
  if (given("--chunk")) run.chunk = f.chunk;
  if (given("--steps")) run.steps = f.steps;
  if (given("--context-steps")) run.context_steps = f.context_steps;
  if (given("--cameras")) run.cameras = f.cameras;
  if (given("--dof")) run.dof = f.dof;
  if (given("--language-tokens")) run.language_tokens = f.language_tokens;
  if (given("--observation-bytes")) run.observation_bytes = f.observation_bytes;
  if (given("--precision")) run.precision_bytes = f.precision;
  if (given("--s2-cap")) run.s2_cap = f.s2_cap;
  if (given("--async")) run.async = f.async;
  for (const auto& spec : f.axes) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0)
      throw ConfigError(fmt::format("--axis expects NAME=v1,v2,... (got '{}')", spec));
    std::vector<std::string> values;
    std::string rest = spec.substr(eq + 1), item;
    std::stringstream ss(rest);
    while (std::getline(ss, item, ','))
      if (!item.empty()) values.push_back(item);
    run.sweep.emplace_back(spec.substr(0, eq), std::move(values));
  }
  return run;
}

RunSettings load(Registry& registry, const CLI::App& cmd, const Flags& f) {
  RunSettings run;
  if (!f.config.empty()) run = load_config_file(resolve_config_path(f.config), registry);
  run.merge(settings_from_flags(cmd, f));
  return run;
}

void emit(const std::string& text, const RunSettings& run) {
  if (run.out) {
    std::ofstream file(*run.out);
    if (!file) throw ConfigError(fmt::format("cannot write '{}'", *run.out));
    file << text;
  } else {
    std::fwrite(text.data(), 1, text.size(), stdout);
  }
}

OutputFormat format_of(const RunSettings& run) {
  return parse_output_format(run.format.value_or("table"));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Roofline performance model for vision-language-action inference"};
  app.require_subcommand(1);
  Flags flags;

  auto* analyze = app.add_subcommand("analyze", "Evaluate one model on one placement");
  add_scenario_flags(*analyze, flags);
  add_output_flags(*analyze, flags);
  analyze->add_option("--s2-cap", flags.s2_cap, "Dual-system mode with this System 2 cap (Hz)")
      ->check(CLI::PositiveNumber);

  auto* sweep = app.add_subcommand("sweep", "Evaluate the cartesian product of axes");
  add_scenario_flags(*sweep, flags);
  add_output_flags(*sweep, flags);
  sweep->add_option("--axis", flags.axes,
                    "NAME=v1,v2,... (repeatable); names: " + [] {
                      std::string s;
                      for (const auto& a : sweep_axes()) s += (s.empty() ? "" : ", ") + a;
                      return s;
                    }());

  std::vector<std::string> table_ids;
  bool reproduce_all = false;
  auto* reproduce_cmd = app.add_subcommand("reproduce", "Compare a published table to the model");
  reproduce_cmd->add_option("table", table_ids, "T1 T3 T4 T5 T6 T8 T9 collab (or scaling)");
  reproduce_cmd->add_flag("--all", reproduce_all, "Reproduce every table");
  add_output_flags(*reproduce_cmd, flags);

  auto* list = app.add_subcommand("list-presets", "Print every preset identifier");
  add_output_flags(*list, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    Registry registry = Registry::builtin();
    CLI::App* active = app.get_subcommands().front();
    const RunSettings run = load(registry, *active, flags);
    const OutputFormat format = format_of(run);

    if (active == analyze) {
      emit(render(analyze_tables(registry, run), format), run);
      return 0;
    }
    if (active == sweep) {
      emit(render(sweep_table(registry, run), format), run);
      return 0;
    }
    if (active == list) {
      emit(render(preset_tables(registry), format), run);
      return 0;
    }
    // reproduce
    if (reproduce_all) table_ids = reproduction_ids();
    if (table_ids.empty()) throw ConfigError("reproduce needs a table id or --all");
    std::vector<Table> tables;
    bool ok = true;
    std::string verdicts;
    for (const auto& id : table_ids) {
      const Reproduction rep = reproduce(id, registry);
      tables.push_back(rep.table());
      ok = ok && rep.passed();
      const auto failed = std::count_if(rep.checks.begin(), rep.checks.end(),
                                        [](const Check& c) { return !c.passed(); });
      verdicts += fmt::format("{}: {} ({}/{} cells within tolerance)\n", rep.id,
                              rep.passed() ? "PASS" : "FAIL",
                              static_cast<long>(rep.checks.size()) - failed, rep.checks.size());
    }
    std::string text = render(tables, format);
    if (format == OutputFormat::table) text += "\n" + verdicts;
    else std::fputs(verdicts.c_str(), stderr);
    emit(text, run);
    return ok ? 0 : kExitGolden;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "vlaperf: %s\n", e.what());
    return kExitUsage;
  }
}
