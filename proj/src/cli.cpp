// Copyright 2026 The engn-sim Authors
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

#include "engn/cli.hpp"

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "engn/dataflow.hpp"
#include "engn/graph.hpp"
#include "engn/model.hpp"
#include "engn/report.hpp"
#include "engn/schedule.hpp"
#include "engn/weights_io.hpp"

namespace engn::cli {

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T to_number(std::string_view text, std::string_view what) {
  T out{};
  const std::string t = trim(text);
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    throw std::invalid_argument(std::string(what) + ": cannot parse '" + t + "'");
  }
  return out;
}

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    parts.push_back(trim(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Options shared by the run and sweep subcommands.
struct RunArgs {
  std::string graph;
  std::string synthetic;
  std::string model = "gcn";
  std::vector<std::string> dims;
  std::string aggregator;
  std::string order = "auto";
  std::string tile_order = "adaptive";
  bool no_s_shape = false;
  std::size_t q = 0;
  std::uint64_t seed = 0;
  std::string config;
  std::vector<std::string> sets;
  std::vector<std::string> weights;
  std::string features;
  std::size_t relations = 0;
  std::size_t pool_dim = 0;
  std::string json_out;
  std::string csv_out;

  CLI::Option* seed_opt = nullptr;
  std::map<std::string, CLI::Option*> flags;  // run-level keys a config file may also set
};

void add_run_options(CLI::App* app, RunArgs& a) {
  auto* g = app->add_option("--graph", a.graph, "Edge-list file (src dst [relation] [weight] per line)");
  auto* s = app->add_option("--synthetic", a.synthetic, "Synthetic RMAT graph, e.g. n=1000,e=8000,seed=1");
  g->excludes(s);
  a.flags["graph"] = g;
  a.flags["synthetic"] = s;
  a.flags["model"] = app->add_option("--model", a.model, "gcn | gs-pool | r-gcn | gated-gcn | grn");
  a.flags["dims"] = app->add_option("--dims", a.dims, "Layer dimensions F:H, one per layer");
  a.flags["aggregator"] = app->add_option("--aggregator", a.aggregator, "Aggregator override: sum | max | mean");
  a.flags["order"] = app->add_option("--order", a.order, "Stage order: auto (DASR) | fau | afu");
  a.flags["tile_order"] = app->add_option("--tile-order", a.tile_order, "adaptive | column | row");
  app->add_flag("--no-s-shape", a.no_s_shape, "Plain (non-serpentine) tile traversal");
  a.flags["q"] = app->add_option("--q", a.q, "Grid partition count (0 = smallest q fitting the result banks)");
  a.seed_opt = app->add_option("--seed", a.seed, "Seed for weights and input features (default: ENGN_SEED or 1)");
  a.flags["seed"] = a.seed_opt;
  app->add_option("--config", a.config, "Flat key=value config file (flags take precedence)");
  app->add_option("--set", a.sets, "Simulator setting key=value (repeatable)");
  app->add_option("--weight", a.weights, "Weight file L:name=path (repeatable)");
  a.flags["features"] = app->add_option("--features", a.features, "Input feature matrix (weight-file format, N x F)");
  a.flags["relations"] = app->add_option("--relations", a.relations, "R-GCN relation count (0 = from graph)");
  a.flags["pool_dim"] = app->add_option("--pool-dim", a.pool_dim, "GS-Pool hidden width (0 = H)");
  app->add_option("--json", a.json_out, "Write the JSON-lines report here");
  app->add_option("--csv", a.csv_out, "Write the CSV report here");
}

// Config-file entries either name a SimConfig field or one of the run-level
// flags; a flag given on the command line wins over the file.
void apply_config_file(RunArgs& a, SimConfig& cfg) {
  if (a.config.empty()) return;
  for (const auto& [key, value] : parse_config_text(read_file(a.config))) {
    auto it = a.flags.find(key);
    if (it == a.flags.end()) {
      cfg.set(key, value);
      continue;
    }
    if (it->second->count() > 0) continue;
    if (key == "graph") a.graph = value;
    else if (key == "synthetic") a.synthetic = value;
    else if (key == "model") a.model = value;
    else if (key == "dims") {
      a.dims.clear();
      std::istringstream ss(value);
      for (std::string d; ss >> d;) a.dims.push_back(d);
    } else if (key == "aggregator") a.aggregator = value;
    else if (key == "order") a.order = value;
    else if (key == "tile_order") a.tile_order = value;
    else if (key == "q") a.q = to_number<std::size_t>(value, key);
    else if (key == "seed") a.seed = to_number<std::uint64_t>(value, key);
    else if (key == "features") a.features = value;
    else if (key == "relations") a.relations = to_number<std::size_t>(value, key);
    else if (key == "pool_dim") a.pool_dim = to_number<std::size_t>(value, key);
  }
}

void apply_sets(const std::vector<std::string>& sets, SimConfig& cfg) {
  for (const std::string& kv : sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + kv + "'");
    cfg.set(trim(std::string_view(kv).substr(0, eq)), trim(std::string_view(kv).substr(eq + 1)));
  }
}

Graph load_graph(const RunArgs& a, std::uint64_t seed) {
  if (!a.graph.empty()) return load_edge_list(a.graph);
  if (!a.synthetic.empty()) {
    const auto kv = parse_kv_list(a.synthetic);
    auto get = [&](const std::string& k) -> std::optional<std::string> {
      auto it = kv.find(k);
      return it == kv.end() ? std::nullopt : std::optional<std::string>(it->second);
    };
    for (const auto& [k, _] : kv) {
      if (k != "n" && k != "e" && k != "seed") throw std::invalid_argument("--synthetic: unknown key '" + k + "'");
    }
    if (!get("n") || !get("e")) throw std::invalid_argument("--synthetic needs n= and e=");
    const auto n = to_number<std::size_t>(*get("n"), "n");
    const auto e = to_number<std::size_t>(*get("e"), "e");
    const auto s = get("seed") ? to_number<std::uint64_t>(*get("seed"), "seed") : seed;
    return generate_synthetic(n, e, s);
  }
  throw UsageError("one of --graph or --synthetic is required");
}

struct Prepared {
  Graph graph;
  std::vector<LayerSpec> layers;
  PropertyMatrix<Fixed32> input;
  SimConfig cfg;
  RunOptions options;
};

Prepared prepare(RunArgs& a, SimConfig cfg) {
  apply_config_file(a, cfg);
  apply_sets(a.sets, cfg);
  cfg.validate();
  const std::uint64_t seed = a.seed_opt->count() > 0 || a.flags["seed"]->count() > 0 || a.seed != 0 ? a.seed : default_seed();

  Prepared p;
  p.graph = load_graph(a, seed);
  p.cfg = cfg;
  if (a.dims.empty()) throw UsageError("--dims is required (e.g. --dims 1433:16 16:7)");

  const ModelKind kind = parse_model_kind(a.model);
  LayerOptions lo;
  lo.num_relations = a.relations > 0 ? a.relations : std::max<std::size_t>(1, p.graph.num_relations());
  lo.pool_dim = a.pool_dim;
  if (!a.aggregator.empty()) lo.aggregator = parse_aggregator(a.aggregator);
  for (std::size_t l = 0; l < a.dims.size(); ++l) {
    const auto [f, h] = parse_dims(a.dims[l]);
    if (l > 0 && p.layers.back().h != f) {
      throw std::invalid_argument("layer " + std::to_string(l) + " input " + std::to_string(f) +
                                  " does not match previous output " + std::to_string(p.layers.back().h));
    }
    p.layers.push_back(make_layer(kind, f, h, seed + 1000 * (l + 1), lo));
  }
  for (const std::string& spec : a.weights) {
    const auto colon = spec.find(':');
    const auto eq = spec.find('=');
    if (colon == std::string::npos || eq == std::string::npos || eq < colon) {
      throw UsageError("--weight expects L:name=path, got '" + spec + "'");
    }
    const auto l = to_number<std::size_t>(std::string_view(spec).substr(0, colon), "--weight layer");
    if (l >= p.layers.size()) throw std::invalid_argument("--weight: layer " + std::to_string(l) + " does not exist");
    set_layer_weight(p.layers[l], spec.substr(colon + 1, eq - colon - 1), load_weight_matrix(spec.substr(eq + 1)));
  }
  for (const LayerSpec& l : p.layers) l.validate();

  const auto n = static_cast<Eigen::Index>(p.graph.num_vertices());
  const auto f0 = static_cast<Eigen::Index>(p.layers.front().f);
  Eigen::MatrixXd x;
  if (!a.features.empty()) {
    x = load_weight_matrix(a.features);
    if (x.rows() != n || x.cols() != f0) {
      throw std::invalid_argument("--features must be " + std::to_string(n) + "x" + std::to_string(f0));
    }
  } else {
    x = random_matrix(n, f0, seed);
  }
  p.input = quantize<Fixed32>(x);

  if (a.order != "auto") p.options.force_order = parse_stage_order(a.order);
  p.options.major = parse_major_choice(a.tile_order);
  p.options.s_shape = !a.no_s_shape;
  if (a.q > 0) p.options.q = a.q;
  p.options.run = {{"graph", a.graph.empty() ? "synthetic:" + a.synthetic : a.graph},
                   {"model", a.model},
                   {"seed", std::to_string(seed)},
                   {"order", a.order},
                   {"tile_order", a.tile_order}};
  std::string dims;
  for (const auto& d : a.dims) dims += (dims.empty() ? "" : " ") + d;
  p.options.run.emplace_back("dims", dims);
  return p;
}

void emit(const RunArgs& a, const std::vector<ReportRow>& rows, std::ostream& out) {
  if (!a.json_out.empty()) {
    std::ostringstream ss;
    write_jsonl(rows, ss);
    write_file_atomic(a.json_out, ss.str());
  }
  if (!a.csv_out.empty()) {
    std::ostringstream ss;
    write_csv(rows, ss);
    write_file_atomic(a.csv_out, ss.str());
  }
  write_summary(rows, out);
}

// Per-bank RER schedules for every non-empty (tile, source batch).
void dump_banks(const Graph& g, std::size_t q, std::size_t r, bool reorganized, std::ostream& out) {
  const TileGrid grid = grid_partition(g, q);
  out << "tile_i,tile_j,batch_first,bank,position,src,dst,cycle\n";
  for (std::size_t i = 0; i < q; ++i) {
    for (std::size_t j = 0; j < q; ++j) {
      const Interval& src_iv = grid.interval(i);
      const auto shard = grid.shard(i, j);
      for (VertexId first = src_iv.lo; first < src_iv.hi; first += static_cast<VertexId>(r)) {
        const SourceBatch batch{first, std::min<std::size_t>(r, src_iv.hi - first)};
        std::vector<Edge> edges;
        for (const Edge& e : shard)
          if (batch.contains(e.src)) edges.push_back(e);
        if (edges.empty()) continue;
        EdgeBankLayout layout = hash_edges(edges, r);
        if (reorganized) layout = reorganize(layout, batch);
        for (const Consumption& c : ring_trace(layout, batch).events) {
          out << i << ',' << j << ',' << first << ',' << c.bank << ',' << c.position << ',' << c.edge.src << ','
              << c.edge.dst << ',' << c.cycle << '\n';
        }
      }
    }
  }
}

}  // namespace

std::uint64_t default_seed() {
  if (const char* env = std::getenv("ENGN_SEED")) {
    std::uint64_t v = 0;
    const std::string_view s(env);
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (!s.empty() && ec == std::errc() && ptr == s.data() + s.size()) return v;
  }
  return 1;
}

std::map<std::string, std::string> parse_kv_list(std::string_view text) {
  std::map<std::string, std::string> kv;
  for (const std::string& part : split(text, ',')) {
    if (part.empty()) continue;
    const auto eq = part.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("expected key=value, got '" + part + "'");
    kv[trim(std::string_view(part).substr(0, eq))] = trim(std::string_view(part).substr(eq + 1));
  }
  return kv;
}

std::vector<std::pair<std::string, std::string>> parse_config_text(std::string_view text) {
  std::vector<std::pair<std::string, std::string>> out;
  std::size_t line_no = 0;
  for (const std::string& raw : split(text, '\n')) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key=value, got '" + line + "'");
    }
    out.emplace_back(trim(std::string_view(line).substr(0, eq)), trim(std::string_view(line).substr(eq + 1)));
  }
  return out;
}

std::pair<std::size_t, std::size_t> parse_dims(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) throw std::invalid_argument("dims must look like F:H, got '" + std::string(text) + "'");
  const auto f = to_number<std::size_t>(text.substr(0, colon), "dims F");
  const auto h = to_number<std::size_t>(text.substr(colon + 1), "dims H");
  if (f == 0 || h == 0) throw std::invalid_argument("dims must be positive, got '" + std::string(text) + "'");
  return {f, h};
}

std::vector<std::pair<std::string, SimConfig>> expand_sweep(const SimConfig& base, const std::vector<std::string>& axes) {
  std::vector<std::pair<std::string, SimConfig>> points{{"", base}};
  for (const std::string& axis : axes) {
    const auto eq = axis.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("sweep axis must be key=v1,v2,..., got '" + axis + "'");
    const std::string key = trim(std::string_view(axis).substr(0, eq));
    const auto values = split(std::string_view(axis).substr(eq + 1), ',');
    std::vector<std::pair<std::string, SimConfig>> next;
    for (const auto& [label, cfg] : points) {
      for (const std::string& v : values) {
        if (v.empty()) throw std::invalid_argument("sweep axis '" + key + "' has an empty value");
        SimConfig c = cfg;
        c.set(key, v);
        next.emplace_back(label + (label.empty() ? "" : ";") + key + "=" + v, c);
      }
    }
    points = std::move(next);
  }
  return points;
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"EnGN graph neural network accelerator simulator", "engn-sim"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "engn-sim 0.1.0");

  // run
  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Simulate a layer stack and write reports");
  add_run_options(run, run_args);

  // sweep
  RunArgs sweep_args;
  std::vector<std::string> axes;
  std::string sweep_davc;
  std::string sweep_rho;
  std::string sweep_rows;
  std::string sweep_cols;
  auto* sweep = app.add_subcommand("sweep", "Run the cross product of simulator settings");
  add_run_options(sweep, sweep_args);
  sweep->add_option("--sweep", axes, "Axis key=v1,v2,... (repeatable; cross product)");
  sweep->add_option("--davc-bytes", sweep_davc, "Shorthand for --sweep davc_bytes=...");
  sweep->add_option("--rho", sweep_rho, "Shorthand for --sweep davc_static_fraction=...");
  sweep->add_option("--rows", sweep_rows, "Shorthand for --sweep rows=...");
  sweep->add_option("--cols", sweep_cols, "Shorthand for --sweep cols=...");

  // analyze
  std::uint64_t an_q = 0, an_f = 0, an_h = 0, an_n = 0, an_r = 128, an_c = 16;
  std::string an_map;
  std::string an_graph;
  std::string an_dump;
  bool an_no_reorg = false;
  std::string an_model = "gcn";
  auto* analyze = app.add_subcommand("analyze", "Closed-form I/O cost, DASR and map-strategy reports");
  analyze->set_help_flag("--help", "Print this help message and exit");  // frees -h for --h
  analyze->add_option("--q", an_q, "Grid partition count");
  analyze->add_option("--f", an_f, "Input property dimension");
  analyze->add_option("--h", an_h, "Output property dimension");
  analyze->add_option("--n", an_n, "Vertex count (map strategy)");
  analyze->add_option("--r", an_r, "PE rows")->capture_default_str();
  analyze->add_option("--c", an_c, "PE columns")->capture_default_str();
  analyze->add_option("--map", an_map, "Map strategy: vs | vfs | hs");
  analyze->add_option("--model", an_model, "Model for the DASR decision")->capture_default_str();
  analyze->add_option("--graph", an_graph, "Edge list for --dump-banks");
  analyze->add_option("--dump-banks", an_dump, "Write per-bank ring schedules as CSV");
  analyze->add_flag("--no-reorganize", an_no_reorg, "Dump banks in canonical order");

  // gen-graph
  std::size_t gg_n = 0, gg_e = 0;
  std::uint64_t gg_seed = 0;
  std::string gg_out;
  RmatParams rmat;
  auto* gen = app.add_subcommand("gen-graph", "Generate an RMAT edge list");
  gen->set_help_flag("--help", "Print this help message and exit");
  gen->add_option("--n", gg_n, "Vertex count")->required();
  gen->add_option("--e", gg_e, "Edge count")->required();
  auto* gg_seed_opt = gen->add_option("--seed", gg_seed, "Seed (default: ENGN_SEED or 1)");
  gen->add_option("--out", gg_out, "Output path")->required();
  gen->add_option("--a", rmat.a, "RMAT a")->capture_default_str();
  gen->add_option("--b", rmat.b, "RMAT b")->capture_default_str();
  gen->add_option("--c", rmat.c, "RMAT c")->capture_default_str();
  gen->add_option("--d", rmat.d, "RMAT d")->capture_default_str();

  // validate
  std::string val_path;
  std::size_t val_n = 0;
  auto* validate = app.add_subcommand("validate", "Load an edge list and check graph invariants");
  validate->add_option("path", val_path, "Edge-list file")->required();
  validate->add_option("--n", val_n, "Declared vertex count (default: max id + 1)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*run) {
      Prepared p = prepare(run_args, SimConfig{});
      emit(run_args, run_report(p.graph, p.layers, p.input, p.cfg, p.options), out);
    } else if (*sweep) {
      if (!sweep_davc.empty()) axes.push_back("davc_bytes=" + sweep_davc);
      if (!sweep_rho.empty()) axes.push_back("davc_static_fraction=" + sweep_rho);
      if (!sweep_rows.empty()) axes.push_back("rows=" + sweep_rows);
      if (!sweep_cols.empty()) axes.push_back("cols=" + sweep_cols);
      Prepared p = prepare(sweep_args, SimConfig{});
      const auto points = expand_sweep(p.cfg, axes);
      emit(sweep_args, run_sweep(p.graph, p.layers, p.input, points, p.options), out);
    } else if (*analyze) {
      bool any = false;
      if (an_q > 0) {
        if (an_f == 0 || an_h == 0) throw UsageError("--q needs --f and --h");
        const IoCostReport io = io_cost(an_q, an_f, an_h);
        out << "io_cost q=" << an_q << " f=" << an_f << " h=" << an_h << " (interval units)\n"
            << "  column: read=" << io.read_col << " write=" << io.write_col << " total=" << io.total_col() << '\n'
            << "  row:    read=" << io.read_row << " write=" << io.write_row << " total=" << io.total_row() << '\n'
            << "  chosen=" << to_string(io.chosen) << '\n';
        any = true;
      }
      if (an_f > 0 && an_h > 0) {
        const ModelKind kind = parse_model_kind(an_model);
        const Aggregator agg = default_aggregator(kind);
        out << "dasr model=" << to_string(kind) << " f=" << an_f << " h=" << an_h
            << " order=" << to_string(dasr_decide(an_f, an_h, agg, kind)) << '\n';
        any = true;
      }
      if (!an_map.empty()) {
        if (an_n == 0 || an_f == 0 || an_h == 0) throw UsageError("--map needs --n, --f and --h");
        const auto m = map_strategy_metrics(parse_map_strategy(an_map), an_n, an_f, an_h, an_r, an_c);
        out << "map " << to_string(m.strategy) << " n=" << an_n << " f=" << an_f << " h=" << an_h << " r=" << an_r
            << " c=" << an_c << '\n'
            << "  latency=" << m.latency_cycles << " bandwidth=" << m.bandwidth_words
            << " utilization=" << m.utilization << '\n';
        any = true;
      }
      if (!an_dump.empty()) {
        if (an_graph.empty()) throw UsageError("--dump-banks needs --graph");
        const Graph g = load_edge_list(an_graph);
        std::ostringstream ss;
        dump_banks(g, an_q > 0 ? an_q : 1, an_r, !an_no_reorg, ss);
        write_file_atomic(an_dump, ss.str());
        out << "wrote bank schedules to " << an_dump << '\n';
        any = true;
      }
      if (!any) throw UsageError("analyze: nothing to do (give --q/--f/--h, --map, or --dump-banks)");
    } else if (*gen) {
      const std::uint64_t seed = gg_seed_opt->count() > 0 ? gg_seed : default_seed();
      const Graph g = generate_synthetic(gg_n, gg_e, seed, rmat);
      std::ostringstream ss;
      write_edge_list(g, ss);
      write_file_atomic(gg_out, ss.str());
      out << "wrote " << g.num_vertices() << " vertices, " << g.num_edges() << " edges to " << gg_out << '\n';
    } else if (*validate) {
      const Graph g = val_n > 0 ? load_edge_list(val_path, val_n) : load_edge_list(val_path);
      const auto problems = check_invariants(g);
      if (!problems.empty()) {
        for (const auto& p : problems) err << "invariant violated: " << p << '\n';
        return kInternalError;
      }
      out << "OK " << g.num_vertices() << " vertices, " << g.num_edges() << " edges\n";
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::logic_error& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternalError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }
  return kOk;
}

}  // namespace engn::cli
