#include "maketex/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "maketex/bench.hpp"
#include "maketex/error.hpp"
#include "maketex/generator.hpp"
#include "maketex/mesh.hpp"
#include "maketex/parallel.hpp"
#include "maketex/pipeline.hpp"
#include "maketex/png_io.hpp"
#include "maketex/viewsel.hpp"

namespace maketex::cli {
namespace {

namespace fs = std::filesystem;

struct Options {
  std::string mesh;
  std::string prompt;
  std::string out;
  std::string generator = "http";
  std::string init_texture;
  double strength = 0.5;
  bool dump = false;
  int threads = 0;
  int reps = 5;
  bool splat_only = false;
  PipelineConfig cfg;
};

void add_config_flags(CLI::App& app, Options& o) {
  PipelineConfig& c = o.cfg;
  app.add_option("--mesh", o.mesh, "Input OBJ with per-corner UVs");
  app.add_option("--seed", c.seed, "Base seed; each view derives its own")->capture_default_str();
  app.add_option("--views", c.n_views, "Views to generate, front and back included")->capture_default_str();
  app.add_option("--candidates", c.n_candidates, "Fibonacci-lattice candidate poses")->capture_default_str();
  app.add_option("--texture-size", c.texture_size, "Texture resolution")->capture_default_str();
  app.add_option("--render-size", c.render_size, "Render resolution per view")->capture_default_str();
  app.add_option("--gen-size", c.gen_size, "Generator tile size after cropping")->capture_default_str();
  app.add_option("--tau-keep", c.tau_keep, "Drop pixels whose normal z is below this")->capture_default_str();
  app.add_option("--depth-eps", c.depth_diff_eps,
                 "Culled/unculled depth gap, as a fraction of the depth range, that marks internal faces")
      ->capture_default_str();
  app.add_option("--coverage-stop", c.coverage_stop, "Stop once this chart fraction is painted")
      ->capture_default_str();
  app.add_option("--threads", o.threads, "Worker cap (0 = hardware concurrency)")->capture_default_str();
}

void add_run_flags(CLI::App& app, Options& o) {
  app.add_option("--prompt", o.prompt, "Text prompt");
  app.add_option("--out", o.out, "Output directory");
  app.add_option("--generator", o.generator,
                 "mock:flat | mock:depthshade | mock:checker | mock:identity | http:<url> | http "
                 "(MAT_GENERATOR_URL, else http://127.0.0.1:8000)")
      ->capture_default_str();
  app.add_flag("--dump-intermediates", o.dump, "Write per-view renders, masks and generations under <out>/intermediates");
}

void require(const std::string& value, const char* flag) {
  if (value.empty()) throw Error(Errc::InvalidArgument, std::string("missing required flag ") + flag);
}

void apply_threads(const Options& o) {
  if (o.threads < 0) throw Error(Errc::InvalidArgument, "--threads must be >= 0");
  if (o.threads > 0) set_num_threads(o.threads);
}

TriMesh load_input(const Options& o) {
  require(o.mesh, "--mesh");
  return load_mesh(o.mesh);
}

void write_outputs(const TriMesh& mesh, const PipelineResult& r, const fs::path& out, std::ostream& report) {
  fs::create_directories(out);
  // Image rows run top-down while v runs bottom-up.
  png::write8(out / "texture.png", png::flip_rows(r.texture));
  save_obj(mesh, out / "mesh.obj", "texture.png");
  nlohmann::json stages = nlohmann::json::array();
  for (const auto& s : r.stages) stages.push_back(to_json(s));
  nlohmann::json summary = {
      {"stages", stages},
      {"prefill_coverage", r.prefill_coverage},
      {"final_coverage", r.final_coverage},
      {"seconds", r.timings.total},
  };
  std::ofstream(out / "report.json") << summary.dump(2) << '\n';
  report << "wrote " << (out / "texture.png").string() << " (" << r.stages.size() << " views, coverage "
         << r.prefill_coverage << " before fill)\n";
}

int cmd_texture(Options& o, std::ostream& out) {
  apply_threads(o);
  const TriMesh mesh = load_input(o);
  require(o.prompt, "--prompt");
  require(o.out, "--out");
  if (o.dump) o.cfg.dump_dir = fs::path(o.out) / "intermediates";
  o.cfg.validate();
  auto gen = make_generator(o.generator);
  const PipelineResult r = texture_mesh(mesh, o.prompt, o.cfg, *gen);
  write_outputs(mesh, r, o.out, out);
  return kExitOk;
}

int cmd_enhance(Options& o, std::ostream& out) {
  apply_threads(o);
  const TriMesh mesh = load_input(o);
  require(o.prompt, "--prompt");
  require(o.out, "--out");
  require(o.init_texture, "--init-texture");
  if (o.dump) o.cfg.dump_dir = fs::path(o.out) / "intermediates";
  o.cfg.validate();
  const ImageF lq = png::flip_rows(png::read(o.init_texture, 3));
  auto gen = make_generator(o.generator);
  const PipelineResult r = enhance_texture(mesh, lq, o.prompt, o.strength, o.cfg, *gen);
  write_outputs(mesh, r, o.out, out);
  return kExitOk;
}

int cmd_views(Options& o, std::ostream& out) {
  apply_threads(o);
  const TriMesh mesh = normalize(load_input(o)).first;
  o.cfg.validate();
  SelectionSettings s;
  s.radius = o.cfg.radius;
  s.ortho_half_extent = o.cfg.ortho_half_extent;
  s.image_size = o.cfg.render_size;
  s.texture_size = o.cfg.texture_size;
  s.min_gain_fraction = o.cfg.min_gain_fraction;
  s.filter = o.cfg.filter();
  const auto poses = fibonacci_lattice(o.cfg.n_candidates, s.radius, s.ortho_half_extent, s.image_size);
  const auto order = selection_order(mesh, o.cfg.n_candidates, o.cfg.n_views - 2, s);
  auto pose_json = [](const CameraPose& p) {
    return nlohmann::json{{"azimuth", p.azimuth}, {"elevation", p.elevation}, {"label", std::string(to_string(view_label(p)))}};
  };
  nlohmann::json candidates = nlohmann::json::array();
  for (const auto& p : poses) candidates.push_back(pose_json(p));
  const auto [front, back] = front_back_pair(s.radius, s.ortho_half_extent, s.image_size);
  nlohmann::json report = {
      {"stage1", {pose_json(front), pose_json(back)}},
      {"candidates", candidates},
      {"greedy_order", order},
  };
  const std::string text = report.dump(2);
  if (!o.out.empty()) {
    fs::create_directories(o.out);
    std::ofstream(fs::path(o.out) / "views.json") << text << '\n';
  }
  out << text << '\n';
  return kExitOk;
}

int cmd_bench(Options& o, std::ostream& out) {
  apply_threads(o);
  if (o.splat_only) {
    const double median = bench_splat(512, 1024, o.reps);
    out << nlohmann::json{{"splat_512_into_1024", {{"median", median}, {"repetitions", o.reps}}}}.dump(2) << '\n';
    return kExitOk;
  }
  const TriMesh mesh = load_input(o);
  o.cfg.validate();
  const BenchReport report = bench_pipeline(mesh, o.cfg, o.reps);
  const std::string text = report.to_json().dump(2);
  if (!o.out.empty()) {
    fs::create_directories(o.out);
    std::ofstream(fs::path(o.out) / "bench.json") << text << '\n';
  }
  out << text << '\n';
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Bake a UV texture for a mesh from a text prompt with a depth-aware image generator", "maketex"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");

  auto* texture = app.add_subcommand("texture", "Generate a texture from scratch");
  add_config_flags(*texture, o);
  add_run_flags(*texture, o);

  auto* enhance = app.add_subcommand("enhance", "Refine an existing texture with partial regeneration");
  add_config_flags(*enhance, o);
  add_run_flags(*enhance, o);
  enhance->add_option("--init-texture", o.init_texture, "Existing texture PNG (texture_size square)");
  enhance->add_option("--strength", o.strength, "Share of each view that is regenerated")->capture_default_str();

  auto* views = app.add_subcommand("views", "Print the stage-1 pair, the candidate lattice and the greedy order");
  add_config_flags(*views, o);
  views->add_option("--out", o.out, "Also write views.json here");

  auto* bench = app.add_subcommand("bench", "Time the non-generator phases over repeated mock runs");
  add_config_flags(*bench, o);
  bench->add_option("--out", o.out, "Also write bench.json here");
  bench->add_option("--reps", o.reps, "Repetitions")->capture_default_str();
  bench->add_flag("--splat-only", o.splat_only, "Time a 512^2 splat into a 1024^2 texture instead");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    // Subcommand help requests arrive as CallForHelp from the subcommand.
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }

  try {
    if (texture->parsed()) return cmd_texture(o, out);
    if (enhance->parsed()) return cmd_enhance(o, out);
    if (views->parsed()) return cmd_views(o, out);
    return cmd_bench(o, out);
  } catch (const Error& e) {
    // Flag problems read as plain sentences; everything else keeps its code.
    err << "error: " << (e.code() == Errc::InvalidArgument ? e.message() : std::string(e.what())) << '\n';
    return is_generator_error(e.code()) ? kExitGenerator : kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }
}

}  // namespace maketex::cli
