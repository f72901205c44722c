// mobinfer: infer plausible node mobility from a wireless contact trace and
// evaluate how well it reproduces the original contacts and geometry.
//
// Exit codes: 0 ok, 2 config error, 3 parse error, 4 validation error,
// 5 runtime failure.

#include <CLI11.hpp>

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "mobinfer/errors.hpp"
#include "mobinfer/evaluation.hpp"
#include "mobinfer/extraction.hpp"
#include "mobinfer/inference.hpp"
#include "mobinfer/keyval.hpp"
#include "mobinfer/num_format.hpp"
#include "mobinfer/rwp.hpp"

namespace fs = std::filesystem;
using namespace mobinfer;

namespace {

bool g_quiet = false;

void info(const std::string& line) {
  if (!g_quiet) std::cout << line << "\n";
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  return in;
}

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  return out;
}

MovementTrace load_movement_file(const std::string& path) {
  auto in = open_input(path);
  try {
    return load_movement_trace(in);
  } catch (ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

// node_count and duration live next to the contact CSV in `<file>.meta`
// unless given explicitly on the command line.
ContactTrace load_contacts_file(const std::string& path, int nodes_flag,
                                double duration_flag) {
  int nodes = nodes_flag;
  double duration = duration_flag;
  if (nodes <= 0 || duration < 0) {
    const std::string meta_path = path + ".meta";
    if (!fs::exists(meta_path)) {
      throw ConfigError("need node count and duration for '" + path +
                        "': provide --nodes/--duration or a companion file '" +
                        meta_path + "'");
    }
    const KeyValues meta = KeyValues::parse_file(meta_path);
    if (nodes <= 0) {
      nodes = static_cast<int>(meta.get_int("node_count", 0));
    }
    if (duration < 0) duration = meta.get_double("duration", -1);
    if (nodes <= 0 || duration < 0) {
      throw ConfigError(meta_path + " must define node_count and duration");
    }
  }
  auto in = open_input(path);
  try {
    return load_contact_trace(in, nodes, duration);
  } catch (ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

void save_contacts_file(const fs::path& path, const ContactTrace& trace,
                        const KeyValues& extra_meta) {
  auto out = open_output(path);
  save_contact_trace(out, trace);
  KeyValues meta;
  meta.set_int("node_count", trace.node_count());
  meta.set_double("duration", trace.duration());
  for (const auto& [k, v] : extra_meta.entries()) meta.set(k, v);
  auto mout = open_output(path.string() + ".meta");
  meta.write(mout);
}

std::vector<Vec2> parse_anchor_list(const std::string& text) {
  std::vector<Vec2> anchors;
  if (text.empty()) return anchors;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) {
      throw ConfigError("anchors must be 'x:y;x:y;...', got '" + item + "'");
    }
    try {
      anchors.push_back({parse_double(item.substr(0, colon)),
                         parse_double(item.substr(colon + 1))});
    } catch (const ParseError&) {
      throw ConfigError("bad anchor coordinate in '" + item + "'");
    }
  }
  return anchors;
}

struct GenerateOptions {
  RwpConfig config;
  std::string initial_from;  // movement CSV; frame 0 seeds the start
  std::string out_name = "movement.csv";
};

RwpConfig rwp_from_keyvalues(const KeyValues& kv) {
  RwpConfig c;
  c.node_count = static_cast<int>(kv.get_int("nodes", c.node_count));
  c.width = kv.get_double("width", c.width);
  c.height = kv.get_double("height", c.height);
  c.v_min = kv.get_double("vmin", c.v_min);
  c.v_max = kv.get_double("vmax", c.v_max);
  c.pause = kv.get_double("pause", c.pause);
  c.duration = kv.get_double("duration", c.duration);
  c.dt = kv.get_double("dt", c.dt);
  c.seed = static_cast<std::uint64_t>(
      kv.get_int("seed", static_cast<std::int64_t>(c.seed)));
  if (auto a = kv.get("anchors")) c.anchors = parse_anchor_list(*a);
  return c;
}

MovementTrace run_generate(const GenerateOptions& opt, const fs::path& out_dir,
                           bool write) {
  RwpConfig config = opt.config;
  if (!opt.initial_from.empty()) {
    const auto seedtrace = load_movement_file(opt.initial_from);
    auto f0 = seedtrace.frame(0);
    config.initial_positions = std::vector<Vec2>(f0.begin(), f0.end());
  }
  auto movement = generate_rwp(config);
  if (write) {
    auto out = open_output(out_dir / opt.out_name);
    save_movement_trace(out, movement);
    info("wrote " + (out_dir / opt.out_name).string() + " (" +
         std::to_string(movement.frame_count()) + " frames, " +
         std::to_string(movement.node_count()) + " nodes, seed " +
         std::to_string(config.seed) + ")");
  }
  return movement;
}

void write_summary(const fs::path& path, const EvaluationReport& report,
                   double range, std::uint64_t seed) {
  KeyValues kv;
  kv.set_int("seed", static_cast<std::int64_t>(seed));
  kv.set_double("range", range);
  kv.set_double("eval_dt", report.eval_dt);
  if (report.pearson_correlation) {
    kv.set_double("pearson_correlation", *report.pearson_correlation);
  }
  kv.set_double("mean_missed_pct", report.accuracy.mean_missed_pct);
  kv.set_double("mean_added_pct", report.accuracy.mean_added_pct);
  kv.set_int("frames_counted", report.accuracy.frames_counted);
  kv.set_int("ict_samples_original",
             static_cast<std::int64_t>(report.ict_original.size()));
  kv.set_int("ict_samples_inferred",
             static_cast<std::int64_t>(report.ict_inferred.size()));
  auto out = open_output(path);
  kv.write(out);
}

void write_report_files(const fs::path& dir, const EvaluationReport& report,
                        double range, std::uint64_t seed) {
  write_summary(dir / "report_summary.txt", report, range, seed);
  {
    auto out = open_output(dir / "report_frames.csv");
    write_accuracy_csv(out, report.accuracy);
  }
  if (!report.ict_original.empty()) {
    auto out = open_output(dir / "ict_original_ccdf.csv");
    write_ccdf_csv(out, ccdf(report.ict_original));
  }
  if (!report.ict_inferred.empty()) {
    auto out = open_output(dir / "ict_inferred_ccdf.csv");
    write_ccdf_csv(out, ccdf(report.ict_inferred));
  }
}

// One synthetic pipeline run: generate, extract, infer, evaluate.
struct PipelineSpec {
  RwpConfig rwp;
  InferenceParams params;
  double range = 100.0;
  double period = 1.0;
  bool use_anchor_constraints = true;
  bool known_initial_positions = true;
};

struct PipelineResult {
  EvaluationReport report;
  MovementTrace movement;
  ContactTrace contacts;
  MovementTrace inferred;
};

PipelineResult run_pipeline(const PipelineSpec& spec) {
  auto movement = generate_rwp(spec.rwp);
  auto contacts = extract_contacts(movement, spec.range, spec.period);
  std::optional<std::vector<Vec2>> init;
  if (spec.known_initial_positions) {
    auto f0 = movement.frame(0);
    init = std::vector<Vec2>(f0.begin(), f0.end());
  }
  std::vector<std::pair<NodeId, NodeConstraint>> entries;
  if (spec.use_anchor_constraints) {
    for (std::size_t i = 0; i < spec.rwp.anchors.size(); ++i) {
      entries.emplace_back(static_cast<NodeId>(i),
                           NodeConstraint::anchored(spec.rwp.anchors[i]));
    }
  }
  ConstraintSet constraints(spec.rwp.node_count, entries);
  auto inferred = infer(contacts, constraints, init, spec.params);
  auto report = evaluate(movement, contacts, inferred, spec.range);
  return {std::move(report), std::move(movement), std::move(contacts),
          std::move(inferred)};
}

int dispatch(int argc, char** argv) {
  CLI::App app{
      "mobinfer - plausible mobility from wireless contact traces:\n"
      "generate synthetic mobility, extract contacts, infer movement with a\n"
      "force-based dynamic layout, and evaluate the reproduction quality."};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::int64_t seed_flag = -1;
  std::string out_dir = ".";
  app.add_option("--config", config_path,
                 "key=value config file (flags override it)");
  app.add_option("--seed", seed_flag, "base seed for all randomness");
  app.add_option("--out", out_dir, "output directory")->capture_default_str();
  app.add_flag("--quiet", g_quiet, "suppress progress output");

  // generate ---------------------------------------------------------------
  auto* gen = app.add_subcommand("generate",
                                 "generate a random-waypoint movement trace "
                                 "on a torus, with optional anchor nodes");
  struct {
    std::int64_t nodes = 50;
    double width = 1000, height = 1000;
    double vmin = 1, vmax = 10, pause = 0;
    double duration = 300, dt = 1;
    std::string anchors;
    std::string initial;
    std::string out_name = "movement.csv";
  } g;
  auto* g_nodes = gen->add_option("--nodes", g.nodes, "node count (anchors included)");
  auto* g_width = gen->add_option("--width", g.width, "torus width (m)");
  auto* g_height = gen->add_option("--height", g.height, "torus height (m)");
  auto* g_vmin = gen->add_option("--vmin", g.vmin, "min waypoint speed (m/s)");
  auto* g_vmax = gen->add_option("--vmax", g.vmax, "max waypoint speed (m/s)");
  auto* g_pause = gen->add_option("--pause", g.pause, "pause at waypoints (s)");
  auto* g_dur = gen->add_option("--duration", g.duration, "run length (s)");
  auto* g_dt = gen->add_option("--dt", g.dt, "frame timestep (s)");
  auto* g_anchors = gen->add_option(
      "--anchors", g.anchors, "fixed nodes as 'x:y;x:y;...' taking ids 0..k-1");
  gen->add_option("--initial-positions", g.initial,
                  "movement CSV whose first frame seeds the start positions");
  gen->add_option("--out-file", g.out_name, "output file name")
      ->capture_default_str();

  // extract ----------------------------------------------------------------
  auto* ext = app.add_subcommand(
      "extract", "sample a movement trace into a proximity contact trace");
  struct {
    std::string movement;
    double range = 100, period = 1;
    std::string out_name = "contacts.csv";
  } e;
  ext->add_option("--movement", e.movement, "movement CSV")->required();
  ext->add_option("--range", e.range, "transmission range (m)")
      ->capture_default_str();
  ext->add_option("--period", e.period, "sampling period (s)")
      ->capture_default_str();
  ext->add_option("--out-file", e.out_name, "output file name")
      ->capture_default_str();

  // infer ------------------------------------------------------------------
  auto* inf = app.add_subcommand(
      "infer", "run the force-based layout over a contact trace");
  struct {
    std::string contacts;
    std::string constraints;
    std::string initial;
    std::string params_file;
    std::int64_t nodes = 0;
    double duration = -1;
    std::string out_name = "inferred.csv";
    std::string layout;
    double r = 0, vmax = 0, K = 0, l0 = 0, G = 0, eps0 = 0, alpha = 0,
           dmax = 0, drag = 0, tau = 0, mass = 0, dt = 0, cutoff = 0;
    bool clamp = true;
  } i;
  inf->add_option("--contacts", i.contacts, "contact CSV")->required();
  inf->add_option("--nodes", i.nodes, "node count (else contacts meta file)");
  inf->add_option("--duration", i.duration,
                  "trace duration (else contacts meta file)");
  inf->add_option("--constraints", i.constraints,
                  "constraints CSV (anchor/axis rows); absent = all free");
  inf->add_option("--initial-positions", i.initial,
                  "movement CSV whose first frame gives known start positions");
  inf->add_option("--params", i.params_file, "key=value inference parameters");
  inf->add_option("--out-file", i.out_name, "output file name")
      ->capture_default_str();
  auto* i_r = inf->add_option("--r", i.r, "transmission range (m)");
  auto* i_vmax = inf->add_option("--vmax", i.vmax, "speed ceiling (m/s)");
  auto* i_K = inf->add_option("--K", i.K, "spring rigidity");
  auto* i_l0 = inf->add_option("--l0", i.l0, "spring rest length (m)");
  auto* i_G = inf->add_option("--G", i.G, "repulsion intensity (default: 3r/4 balance)");
  auto* i_eps0 = inf->add_option("--eps0", i.eps0, "repulsion regularizer (m)");
  auto* i_alpha = inf->add_option("--alpha", i.alpha, "repulsion exponent");
  auto* i_dmax = inf->add_option("--dmax", i.dmax, "repulsion cutoff (m)");
  auto* i_drag = inf->add_option("--drag", i.drag, "drag coefficient");
  auto* i_tau = inf->add_option("--tau", i.tau, "anticipation horizon (s)");
  auto* i_mass = inf->add_option("--mass", i.mass, "node mass");
  auto* i_dt = inf->add_option("--dt", i.dt, "integration step (s)");
  auto* i_cut = inf->add_option("--anticipation-cutoff", i.cutoff,
                                "drop future contacts beyond cutoff*tau");
  auto* i_clamp = inf->add_option("--clamp-speed", i.clamp,
                                  "rescale speeds to vmax (true/false)");
  inf->add_option("--layout", i.layout,
                  "layout domain: plane or torus,<w>,<h> (default plane)");

  // evaluate ---------------------------------------------------------------
  auto* ev = app.add_subcommand(
      "evaluate", "compare an inferred mobility against the original trace");
  struct {
    std::string contacts;
    std::string inferred;
    std::string movement;
    std::int64_t nodes = 0;
    double duration = -1;
    double range = 100;
    double eval_dt = 0;
  } v;
  ev->add_option("--contacts", v.contacts, "original contact CSV")->required();
  ev->add_option("--inferred", v.inferred, "inferred movement CSV")->required();
  ev->add_option("--movement", v.movement,
                 "original movement CSV (enables the distance correlation)");
  ev->add_option("--nodes", v.nodes, "node count (else contacts meta file)");
  ev->add_option("--duration", v.duration,
                 "trace duration (else contacts meta file)");
  ev->add_option("--range", v.range, "transmission range (m)")
      ->capture_default_str();
  ev->add_option("--eval-dt", v.eval_dt,
                 "evaluation grid (s); default: original movement timestep");

  // export-frames ----------------------------------------------------------
  auto* exf = app.add_subcommand(
      "export-frames", "write per-frame position files for external plotting");
  struct {
    std::string movement;
    std::int64_t stride = 1;
  } x;
  exf->add_option("--movement", x.movement, "movement CSV")->required();
  exf->add_option("--stride", x.stride, "keep every stride-th frame")
      ->capture_default_str();

  // sweep ------------------------------------------------------------------
  auto* sw = app.add_subcommand(
      "sweep",
      "repeat the generate/extract/infer/evaluate pipeline over a swept "
      "parameter (sampling period or generator max speed)");
  struct {
    std::string kind = "period";
    std::string values;
    std::int64_t reps = 3;
    std::int64_t jobs = 0;
    bool keep_artifacts = false;
    std::int64_t nodes = 50;
    double width = 1000, height = 1000;
    double vmin = 1, vmax = 10, pause = 0, duration = 300, dt = 1;
    std::string anchors = "250:250;250:750;750:250;750:750";
    double range = 100, period = 1;
    std::string params_file;
    bool no_anchor_constraints = false;
    bool random_initial = false;
  } s;
  sw->add_option("--kind", s.kind, "swept parameter: period | vmax")
      ->check(CLI::IsMember({"period", "vmax"}))
      ->capture_default_str();
  sw->add_option("--values", s.values,
                 "comma-separated sweep values (default per kind)");
  sw->add_option("--reps", s.reps, "repetitions per value; rep k uses seed "
                                   "base_seed+k")
      ->capture_default_str();
  sw->add_option("--jobs", s.jobs, "parallel workers (0 = hardware)");
  sw->add_flag("--keep-artifacts", s.keep_artifacts,
               "write movement/contact/inferred CSVs per run");
  // scenario keys; --config supplies the same names, these flags override
  auto* s_nodes = sw->add_option("--nodes", s.nodes)->capture_default_str();
  auto* s_width = sw->add_option("--width", s.width)->capture_default_str();
  auto* s_height = sw->add_option("--height", s.height)->capture_default_str();
  auto* s_vmin = sw->add_option("--vmin", s.vmin)->capture_default_str();
  auto* s_vmax = sw->add_option("--vmax", s.vmax,
                                "generator max speed (fixed unless swept)")
                     ->capture_default_str();
  auto* s_pause = sw->add_option("--pause", s.pause)->capture_default_str();
  auto* s_dur = sw->add_option("--duration", s.duration)->capture_default_str();
  auto* s_dt = sw->add_option("--dt", s.dt)->capture_default_str();
  auto* s_anchors = sw->add_option("--anchors", s.anchors)->capture_default_str();
  auto* s_range = sw->add_option("--range", s.range)->capture_default_str();
  auto* s_period = sw->add_option("--period", s.period,
                                  "sampling period (fixed unless swept)")
                       ->capture_default_str();
  sw->add_option("--params", s.params_file,
                 "key=value inference parameters (the scenario --config keys "
                 "vmax/dt/seed do not apply to the inference)");
  sw->add_flag("--no-anchor-constraints", s.no_anchor_constraints,
               "do not pin anchors during inference");
  sw->add_flag("--random-initial", s.random_initial,
               "hide the initial positions from the inference");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    if (err.get_exit_code() == 0) {  // --help
      std::cout << app.help();
      return 0;
    }
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  }

  const KeyValues file_config = config_path.empty()
                                    ? KeyValues{}
                                    : KeyValues::parse_file(config_path);
  const fs::path out(out_dir);
  const std::uint64_t base_seed =
      seed_flag >= 0 ? static_cast<std::uint64_t>(seed_flag)
                     : static_cast<std::uint64_t>(file_config.get_int("seed", 1));

  if (gen->parsed()) {
    GenerateOptions opt;
    opt.config = rwp_from_keyvalues(file_config);
    if (g_nodes->count()) opt.config.node_count = static_cast<int>(g.nodes);
    if (g_width->count()) opt.config.width = g.width;
    if (g_height->count()) opt.config.height = g.height;
    if (g_vmin->count()) opt.config.v_min = g.vmin;
    if (g_vmax->count()) opt.config.v_max = g.vmax;
    if (g_pause->count()) opt.config.pause = g.pause;
    if (g_dur->count()) opt.config.duration = g.duration;
    if (g_dt->count()) opt.config.dt = g.dt;
    if (g_anchors->count()) opt.config.anchors = parse_anchor_list(g.anchors);
    opt.config.seed = base_seed;
    opt.initial_from = g.initial;
    opt.out_name = g.out_name;
    run_generate(opt, out, true);
    return 0;
  }

  if (ext->parsed()) {
    const auto movement = load_movement_file(e.movement);
    const auto contacts = extract_contacts(movement, e.range, e.period);
    KeyValues meta;
    meta.set_double("range", e.range);
    meta.set_double("period", e.period);
    save_contacts_file(out / e.out_name, contacts, meta);
    info("wrote " + (out / e.out_name).string() + " (" +
         std::to_string(contacts.events().size()) + " events)");
    return 0;
  }

  if (inf->parsed()) {
    const auto contacts =
        load_contacts_file(i.contacts, static_cast<int>(i.nodes), i.duration);
    // flags overlay the params file (or --config); from_keyvalues then
    // derives l0/dmax/G from r unless they are pinned explicitly
    KeyValues pkv = i.params_file.empty() ? file_config
                                          : KeyValues::parse_file(i.params_file);
    if (i_r->count()) pkv.set_double("r", i.r);
    if (i_vmax->count()) pkv.set_double("vmax", i.vmax);
    if (i_K->count()) pkv.set_double("K", i.K);
    if (i_l0->count()) pkv.set_double("l0", i.l0);
    if (i_G->count()) pkv.set_double("G", i.G);
    if (i_eps0->count()) pkv.set_double("eps0", i.eps0);
    if (i_alpha->count()) pkv.set_double("alpha", i.alpha);
    if (i_dmax->count()) pkv.set_double("dmax", i.dmax);
    if (i_drag->count()) pkv.set_double("drag", i.drag);
    if (i_tau->count()) pkv.set_double("tau", i.tau);
    if (i_mass->count()) pkv.set_double("mass", i.mass);
    if (i_dt->count()) pkv.set_double("dt", i.dt);
    if (i_cut->count()) pkv.set_double("anticipation_cutoff", i.cutoff);
    if (i_clamp->count()) pkv.set_bool("clamp_speed", i.clamp);
    if (!i.layout.empty()) pkv.set("layout", i.layout);
    InferenceParams params = InferenceParams::from_keyvalues(pkv);
    params.seed = base_seed;

    ConstraintSet constraints(contacts.node_count());
    if (!i.constraints.empty()) {
      auto in = open_input(i.constraints);
      const auto entries = load_constraints(in);
      constraints = ConstraintSet(contacts.node_count(), entries);
    }
    std::optional<std::vector<Vec2>> init;
    if (!i.initial.empty()) {
      const auto seedtrace = load_movement_file(i.initial);
      auto f0 = seedtrace.frame(0);
      init = std::vector<Vec2>(f0.begin(), f0.end());
    }

    const auto inferred = infer(contacts, constraints, init, params);
    {
      auto outf = open_output(out / i.out_name);
      save_movement_trace(outf, inferred);
    }
    {
      KeyValues resolved;
      params.to_keyvalues(resolved);
      auto outf = open_output(out / (i.out_name + ".params"));
      resolved.write(outf);
    }
    info("wrote " + (out / i.out_name).string() + " (" +
         std::to_string(inferred.frame_count()) + " frames, seed " +
         std::to_string(params.seed) + ")");
    return 0;
  }

  if (ev->parsed()) {
    const auto contacts =
        load_contacts_file(v.contacts, static_cast<int>(v.nodes), v.duration);
    auto inferred = load_movement_file(v.inferred);
    std::optional<MovementTrace> original;
    if (!v.movement.empty()) original = load_movement_file(v.movement);
    if (v.eval_dt > 0) {
      inferred = resample(inferred, v.eval_dt);
      if (original) original = resample(*original, v.eval_dt);
    }
    const auto report = evaluate(original, contacts, inferred, v.range);
    write_report_files(out, report, v.range, base_seed);
    std::string line = "mean_missed_pct=" +
                       format_double(report.accuracy.mean_missed_pct) +
                       " mean_added_pct=" +
                       format_double(report.accuracy.mean_added_pct);
    if (report.pearson_correlation) {
      line = "pearson_correlation=" +
             format_double(*report.pearson_correlation) + " " + line;
    }
    info(line);
    info("wrote " + (out / "report_summary.txt").string());
    return 0;
  }

  if (exf->parsed()) {
    if (x.stride < 1) throw ConfigError("stride must be >= 1");
    const auto movement = load_movement_file(x.movement);
    const fs::path dir = out / "frames";
    int written = 0;
    for (int k = 0; k < movement.frame_count();
         k += static_cast<int>(x.stride)) {
      char name[32];
      std::snprintf(name, sizeof(name), "frame_%06d.csv", k);
      auto outf = open_output(dir / name);
      std::string buf = "node_id,x,y\n";
      auto frame = movement.frame(k);
      for (NodeId n = 0; n < movement.node_count(); ++n) {
        buf += std::to_string(n);
        buf += ',';
        append_double(buf, frame[n].x);
        buf += ',';
        append_double(buf, frame[n].y);
        buf += '\n';
      }
      outf << buf;
      ++written;
    }
    info("wrote " + std::to_string(written) + " frame files under " +
         dir.string());
    return 0;
  }

  // sweep
  std::vector<double> values;
  if (s.values.empty()) {
    values = s.kind == "period" ? std::vector<double>{1, 2, 5, 10, 20}
                                : std::vector<double>{5, 10, 15, 20};
  } else {
    std::stringstream ss(s.values);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        values.push_back(parse_double(item));
      } catch (const ParseError&) {
        throw ConfigError("bad sweep value '" + item + "'");
      }
    }
    if (values.empty()) throw ConfigError("no sweep values given");
  }
  if (s.reps < 1) throw ConfigError("repetitions must be >= 1");

  PipelineSpec base;
  base.rwp = rwp_from_keyvalues(file_config);
  if (s_nodes->count()) base.rwp.node_count = static_cast<int>(s.nodes);
  if (s_width->count()) base.rwp.width = s.width;
  if (s_height->count()) base.rwp.height = s.height;
  if (s_vmin->count()) base.rwp.v_min = s.vmin;
  if (s_vmax->count()) base.rwp.v_max = s.vmax;
  if (s_pause->count()) base.rwp.pause = s.pause;
  if (s_dur->count()) base.rwp.duration = s.duration;
  if (s_dt->count()) base.rwp.dt = s.dt;
  if (s_anchors->count() || !file_config.contains("anchors")) {
    base.rwp.anchors = parse_anchor_list(s.anchors);
  }
  base.range = s_range->count() ? s.range : file_config.get_double("range", s.range);
  base.period =
      s_period->count() ? s.period : file_config.get_double("period", s.period);
  base.use_anchor_constraints = !s.no_anchor_constraints;
  base.known_initial_positions = !s.random_initial;
  // inference keys come only from --params; the scenario config's vmax/dt/seed
  // mean generator quantities here
  const KeyValues sweep_pkv = s.params_file.empty()
                                  ? KeyValues{}
                                  : KeyValues::parse_file(s.params_file);
  base.params = InferenceParams::from_keyvalues(sweep_pkv);
  if (!sweep_pkv.contains("layout")) {
    // default the layout domain to the generation arena
    base.params.domain = Geometry::torus(base.rwp.width, base.rwp.height);
  }

  struct Run {
    double value;
    int rep;
    std::uint64_t seed;
    PipelineSpec spec;
  };
  std::vector<Run> runs;
  for (double value : values) {
    for (int rep = 0; rep < s.reps; ++rep) {
      Run run{value, rep, base_seed + static_cast<std::uint64_t>(rep), base};
      run.spec.rwp.seed = run.seed;
      run.spec.params.seed = run.seed;
      if (s.kind == "period") {
        run.spec.period = value;
      } else {
        run.spec.rwp.v_max = value;  // heuristic speed ceiling stays fixed
      }
      runs.push_back(std::move(run));
    }
  }

  unsigned jobs = s.jobs > 0 ? static_cast<unsigned>(s.jobs)
                             : std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min<unsigned>(jobs, runs.size());

  std::vector<std::optional<PipelineResult>> results(runs.size());
  std::atomic<std::size_t> next{0};
  std::vector<std::future<void>> workers;
  for (unsigned w = 0; w < jobs; ++w) {
    workers.push_back(std::async(std::launch::async, [&] {
      while (true) {
        const std::size_t idx = next.fetch_add(1);
        if (idx >= runs.size()) return;
        results[idx].emplace(run_pipeline(runs[idx].spec));
      }
    }));
  }
  for (auto& w : workers) w.get();  // rethrows worker failures

  // merge single-threaded, in run order
  std::string summary = "kind,value,rep,seed,pearson_correlation,"
                        "mean_missed_pct,mean_added_pct,frames_counted\n";
  struct Agg {
    double corr = 0, missed_run = 0, added_run = 0;
    double missed_pool = 0, added_pool = 0;
    long frames = 0;
    int n = 0;
  };
  std::vector<Agg> agg(values.size());
  for (std::size_t idx = 0; idx < runs.size(); ++idx) {
    const Run& run = runs[idx];
    const EvaluationReport& rep = results[idx]->report;
    summary += s.kind + ",";
    append_double(summary, run.value);
    summary += ',' + std::to_string(run.rep) + ',' + std::to_string(run.seed) +
               ',';
    append_double(summary, rep.pearson_correlation.value_or(
                               std::numeric_limits<double>::quiet_NaN()));
    summary += ',';
    append_double(summary, rep.accuracy.mean_missed_pct);
    summary += ',';
    append_double(summary, rep.accuracy.mean_added_pct);
    summary += ',' + std::to_string(rep.accuracy.frames_counted) + '\n';

    Agg& a = agg[idx / s.reps];
    a.corr += rep.pearson_correlation.value_or(0);
    a.missed_run += rep.accuracy.mean_missed_pct;
    a.added_run += rep.accuracy.mean_added_pct;
    for (const FrameAccuracy& f : rep.accuracy.frames) {
      if (f.existing == 0) continue;
      a.missed_pool += f.missed_pct;
      a.added_pool += f.added_pct;
      ++a.frames;
    }
    ++a.n;

    const fs::path run_dir = out / "runs" /
                             (s.kind + "-" + format_double(run.value)) /
                             ("rep" + std::to_string(run.rep));
    write_report_files(run_dir, rep, base.range, run.seed);
    if (s.keep_artifacts) {
      auto mo = open_output(run_dir / "movement.csv");
      save_movement_trace(mo, results[idx]->movement);
      save_contacts_file(run_dir / "contacts.csv", results[idx]->contacts, {});
      auto io = open_output(run_dir / "inferred.csv");
      save_movement_trace(io, results[idx]->inferred);
    }
  }
  {
    auto outf = open_output(out / "sweep_summary.csv");
    outf << summary;
  }
  {
    // both time-pooled and run-mean aggregates
    std::string ag =
        "kind,value,runs,base_seed,corr_mean,missed_run_mean,added_run_mean,"
        "missed_frame_mean,added_frame_mean\n";
    for (std::size_t vi = 0; vi < values.size(); ++vi) {
      const Agg& a = agg[vi];
      ag += s.kind + ",";
      append_double(ag, values[vi]);
      ag += ',' + std::to_string(a.n) + ',' + std::to_string(base_seed) + ',';
      append_double(ag, a.corr / a.n);
      ag += ',';
      append_double(ag, a.missed_run / a.n);
      ag += ',';
      append_double(ag, a.added_run / a.n);
      ag += ',';
      append_double(ag, a.frames ? a.missed_pool / a.frames : 0.0);
      ag += ',';
      append_double(ag, a.frames ? a.added_pool / a.frames : 0.0);
      ag += '\n';
    }
    auto outf = open_output(out / "sweep_agg.csv");
    outf << ag;
  }
  info("wrote " + (out / "sweep_summary.csv").string() + " and " +
       (out / "sweep_agg.csv").string() + " (" + std::to_string(runs.size()) +
       " runs, base seed " + std::to_string(base_seed) + ")");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return dispatch(argc, argv);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 3;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 5;
  }
}
