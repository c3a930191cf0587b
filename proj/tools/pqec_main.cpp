// pqec: extract logical channels from surface-code rounds, compile dissipative
// targets into logical-channel mixtures, and run the dynamics and resource
// studies.
//
// Exit codes: 0 success, 2 config/input error, 3 compile failure
// (reachability gap; the fit result is dumped to stderr).

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pqec/channel.hpp"
#include "pqec/compiler.hpp"
#include "pqec/config.hpp"
#include "pqec/serialize.hpp"
#include "pqec/sim.hpp"

namespace fs = std::filesystem;
using namespace pqec;
using nlohmann::json;

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir = "out";
  std::vector<std::string> overrides;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

Config load_config(const CommonArgs& args) {
  std::ifstream in(args.config_path);
  if (!in) throw config_error("cannot open config: " + args.config_path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  Config cfg = Config::parse(buffer.str(), args.config_path);
  for (const std::string& o : args.overrides) cfg.apply_override(o);
  return cfg;
}

fs::path make_output_dir(const CommonArgs& args, const StudyHeader& header) {
  const fs::path dir = fs::path(args.out_dir) / header.kind / header.label;
  fs::create_directories(dir);
  return dir;
}

void write_manifest(const fs::path& dir, const Config& cfg, const StudyHeader& header,
                    const std::vector<std::string>& outputs) {
  json manifest{{"study", header.kind},
                {"label", header.label},
                {"seed", header.seed},
                {"config", cfg.to_json()},
                {"outputs", outputs}};
  serialize::write_json_file((dir / "manifest.json").string(), manifest);
}

int run_extract(const Config& cfg, StudyHeader header, const CommonArgs& args) {
  const ExtractSpec spec = read_extract_spec(cfg, header.seed);
  cfg.reject_unknown_keys();
  const SurfaceCode code(spec.distance);
  const std::vector<RecoveryPolicy> policies = spec.policies == "frames"
                                                   ? RecoveryPolicy::all_frames()
                                                   : std::vector<RecoveryPolicy>{
                                                         RecoveryPolicy::baseline()};
  const auto rounds = logical_channel_family(code, spec.noise, spec.method, policies);

  const fs::path dir = make_output_dir(args, header);
  json arr = json::array();
  for (const auto& r : rounds) arr.push_back(serialize::logical_round_to_json(r));
  json out{{"channels", arr}, {"seed", header.seed}};
  serialize::write_json_file((dir / "logical_channel.json").string(), out);
  serialize::write_json_file((dir / "channel.json").string(),
                             serialize::channel_to_json(rounds.front().to_channel()));
  write_manifest(dir, cfg, header, {"logical_channel.json", "channel.json"});
  std::cout << dir.string() << "\n";
  return 0;
}

int run_fit(const Config& cfg, StudyHeader header, const CommonArgs& args) {
  const FitStudySpec spec = read_fit_spec(cfg, header.seed);
  cfg.reject_unknown_keys();
  const FitStudyReport report = run_channel_fit_study(spec);

  const fs::path dir = make_output_dir(args, header);
  {
    std::ofstream csv(dir / "fit_study.csv");
    report.write_csv(csv);
  }
  json pts = json::array();
  for (const auto& p : report.points)
    pts.push_back(json{{"gamma_tau", p.gamma_tau},
                       {"mismatch", p.mismatch},
                       {"ideal_residual", p.ideal_residual},
                       {"ideal_z_weight", p.ideal_z_weight},
                       {"a_fit_residual", p.a_fit_residual},
                       {"a_realized_residual", p.a_realized_residual},
                       {"a_frame_z_weight", p.a_frame_z_weight},
                       {"a_ok", p.a_ok},
                       {"b_fit_residual", p.b_fit_residual},
                       {"b_ok", p.b_ok}});
  serialize::write_json_file((dir / "weights.json").string(),
                             json{{"points", pts}, {"seed", header.seed}});
  write_manifest(dir, cfg, header, {"fit_study.csv", "weights.json"});
  std::cout << dir.string() << "\n";
  return 0;
}

int run_dynamics(const Config& cfg, StudyHeader header, const CommonArgs& args) {
  const DynamicsSpec spec = read_dynamics_spec(cfg, header.seed);
  cfg.reject_unknown_keys();
  const TrajectoryReport report = run_dynamics_study(spec);

  const fs::path dir = make_output_dir(args, header);
  {
    std::ofstream csv(dir / "trajectory.csv");
    report.write_csv(csv);
  }
  json summary{{"a_fit_residual", report.a_fit_residual},
               {"b_fit_residual", report.b_fit_residual},
               {"a_final_distance", report.a_final_distance},
               {"a_max_distance", report.a_max_distance},
               {"b_final_distance", report.b_final_distance},
               {"b_max_distance", report.b_max_distance},
               {"a_step_diamond_lower", report.a_step_bounds.lower},
               {"a_step_diamond_upper", report.a_step_bounds.upper},
               {"b_step_diamond_lower", report.b_step_bounds.lower},
               {"b_step_diamond_upper", report.b_step_bounds.upper},
               {"seed", header.seed}};
  serialize::write_json_file((dir / "summary.json").string(), summary);
  write_manifest(dir, cfg, header, {"trajectory.csv", "summary.json"});
  std::cout << dir.string() << "\n";
  return 0;
}

int run_resources(const Config& cfg, StudyHeader header, const CommonArgs& args) {
  const ResourceStudySpec spec = read_resource_spec(cfg);
  cfg.reject_unknown_keys();
  const ResourceReport report = run_resource_study(spec);

  const fs::path dir = make_output_dir(args, header);
  {
    std::ofstream csv(dir / "resources.csv");
    report.write_csv(csv);
  }
  json rows = json::array();
  for (const auto& r : report.rows)
    rows.push_back(json{{"scenario", r.scenario},
                        {"d_A", r.d_a},
                        {"d_B", r.d_b},
                        {"footprint_A", r.footprint_a},
                        {"footprint_B", r.footprint_b},
                        {"ratio", r.ratio},
                        {"ratio_square_approx", r.ratio_square_approx},
                        {"x_A", r.x_a},
                        {"x_B", r.x_b},
                        {"feasible", r.feasible}});
  serialize::write_json_file((dir / "summary.json").string(),
                             json{{"rows", rows}, {"seed", header.seed}});
  write_manifest(dir, cfg, header, {"resources.csv", "summary.json"});
  std::cout << dir.string() << "\n";
  return 0;
}

int run_validate_channel(const std::string& path) {
  const json j = serialize::read_json_file(path);
  const serialize::RawChannel raw = serialize::raw_channel_from_json(j);
  const Mat choi = raw.to_choi();
  const double min_eig = min_hermitian_eigenvalue(choi);
  const Mat red = partial_trace_first(choi, raw.dim_out, raw.dim_in);
  const double tp_defect = (red - Mat::Identity(raw.dim_in, raw.dim_in)).norm();
  const bool cp = min_eig >= -kCpEigTol;
  const bool tp = tp_defect <= kTpTol;

  std::cout << "representation: " << raw.representation << "\n";
  std::cout << "cp_min_eigenvalue: " << csv_num(min_eig) << (cp ? "  (ok)" : "  (VIOLATION)")
            << "\n";
  std::cout << "tp_defect: " << csv_num(tp_defect) << (tp ? "  (ok)" : "  (VIOLATION)") << "\n";
  if (raw.dim_in == raw.dim_out && (raw.dim_in & (raw.dim_in - 1)) == 0) {
    int n = 0;
    while ((Eigen::Index(1) << n) < raw.dim_in) ++n;
    // PTM first row of a TP map is (1, 0, ..., 0)
    std::cout << "ptm_first_row:";
    const Eigen::Index m = pauli_num_labels(n);
    const double scale = 1.0 / static_cast<double>(raw.dim_in);
    for (Eigen::Index b = 0; b < m; ++b) {
      const Mat basis =
          kron(pauli_matrix(0, n), pauli_matrix(static_cast<int>(b), n).transpose());
      std::cout << ' ' << csv_num(((basis * choi).trace() * scale).real());
    }
    std::cout << "\n";
  }
  std::cout << (cp && tp ? "CPTP: pass" : "CPTP: FAIL") << "\n";
  return cp && tp ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"partial-QEC logical channel compiler and simulator"};
  app.require_subcommand(1);

  CommonArgs args;
  std::string channel_path;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", args.config_path, "config file path")->required();
    sub->add_option("--out", args.out_dir, "output directory (default: out)");
    sub->add_option("--seed", args.seed, "override [study].seed")
        ->each([&](const std::string&) { args.seed_set = true; });
    sub->add_option("--override", args.overrides,
                    "section.key=value, applied after the file is parsed");
  };

  CLI::App* extract = app.add_subcommand("extract", "extract a one-round logical channel");
  add_common(extract);
  CLI::App* fit = app.add_subcommand("fit", "channel-fit study (dephasing target)");
  add_common(fit);
  CLI::App* dynamics = app.add_subcommand("dynamics", "stroboscopic exciton dynamics study");
  add_common(dynamics);
  CLI::App* resources = app.add_subcommand("resources", "distance and footprint study");
  add_common(resources);
  CLI::App* validate = app.add_subcommand("validate-channel", "check a channel JSON file");
  validate->add_option("path", channel_path, "channel JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (validate->parsed()) return run_validate_channel(channel_path);

    Config cfg = load_config(args);
    StudyHeader header = read_study_header(cfg);
    if (args.seed_set) header.seed = args.seed;

    const std::string sub = app.get_subcommands().front()->get_name();
    if (header.kind != sub)
      throw config_error("[study].kind is '" + header.kind + "' but subcommand is '" + sub +
                         "'");
    if (sub == "extract") return run_extract(cfg, header, args);
    if (sub == "fit") return run_fit(cfg, header, args);
    if (sub == "dynamics") return run_dynamics(cfg, header, args);
    if (sub == "resources") return run_resources(cfg, header, args);
    throw config_error("unknown subcommand: " + sub);
  } catch (const compile_failure& e) {
    std::cerr << "compile failure: " << e.what() << "\n"
              << serialize::fit_result_to_json(e.fit).dump(2) << "\n";
    return 3;
  } catch (const config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
