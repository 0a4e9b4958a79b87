// vinedist command-line driver.
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vinedist/vinedist.hpp"

namespace fs = std::filesystem;
using namespace vinedist;
using io::json;

namespace {

struct Globals {
  std::uint64_t seed = 7;
  std::string output;
  std::string format = "json";
};

// Writes to --output when given, else stdout.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw Error(ErrorKind::InvalidArgument, "cannot write '" + path + "'");
    }
  }
  std::ostream& out() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

void emit_json(const Globals& g, const json& j) {
  Sink s(g.output);
  s.out() << j.dump(2) << '\n';
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write '" + path.string() + "'");
  out << text;
}

FilteredComplex load_function(const std::string& complex_path, const std::string& values_path) {
  CellComplex k = io::read_complex(complex_path);
  FilterFunction f = io::read_vertex_function(values_path, k);
  return {std::move(k), std::move(f)};
}

FilteredComplex load_image(const std::string& path, bool invert) {
  FilteredComplex fc = cubical_from_image(io::read_image(path));
  if (invert) fc.filter = filter_down(fc.complex, fc.filter, 256.0);
  return fc;
}

json report_to_json(const BoundsReport& r) {
  json j = {{"w_inf1", r.w_inf1},
            {"vineyard", r.vineyard},
            {"l1_sum", r.l1_sum},
            {"weighted_vineyard", r.weighted_vineyard},
            {"lower_ok", r.lower_ok},
            {"upper_ok", r.upper_ok},
            {"mvc_ok", r.mvc_ok},
            {"pass", r.all_ok()}};
  j["mvc"] = r.mvc ? json(*r.mvc) : json(nullptr);
  return j;
}

std::string matrix_csv(const std::vector<std::vector<double>>& m, const std::vector<std::string>& labels = {}) {
  std::ostringstream ss;
  io::write_matrix_csv(ss, m, labels);
  return ss.str();
}

std::string embedding_csv(const Embedding& e, const std::vector<int>& labels) {
  std::ostringstream ss;
  ss << "index,label,x,y\n" << std::setprecision(12);
  for (Eigen::Index i = 0; i < e.coords.rows(); ++i)
    ss << i << ',' << labels[static_cast<std::size_t>(i)] << ',' << e.coords(i, 0) << ','
       << (e.coords.cols() > 1 ? e.coords(i, 1) : 0.0) << '\n';
  return ss.str();
}

void add_vineyard_flags(CLI::App* cmd, VineyardOptions& opt, std::optional<double>& delta) {
  cmd->add_option("--steps", opt.initial_steps, "Initial uniform time steps")->check(CLI::PositiveNumber);
  cmd->add_option("--delta", delta, "Bottleneck threshold for bisection")->check(CLI::PositiveNumber);
  cmd->add_option("--max-depth", opt.max_depth, "Maximum bisection depth")->check(CLI::NonNegativeNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Vineyard distance toolkit"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "Random seed for synthetic data")->capture_default_str();
  app.add_option("--output,-o", g.output, "Write the result here instead of stdout");
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();

  // diagram
  auto* diagram = app.add_subcommand("diagram", "Persistence diagram of a filtered complex or image");
  int d_dim = 0;
  std::optional<double> d_ceiling;
  std::string d_complex, d_values, d_image;
  bool d_invert = false, d_union_find = false;
  diagram->add_option("--dim", d_dim, "Homology dimension")->check(CLI::NonNegativeNumber);
  diagram->add_option("--ceiling", d_ceiling, "Death value for essential classes");
  diagram->add_option("--image", d_image, "Image (CSV grid or P2 PGM) instead of complex + values");
  diagram->add_flag("--invert", d_invert, "Use 256 - intensity (filter down)");
  diagram->add_flag("--union-find", d_union_find, "Use the union-find path (dim 0 only)");
  diagram->add_option("complex", d_complex, "Complex JSON");
  diagram->add_option("values", d_values, "Vertex values CSV");

  // wasserstein / bottleneck
  auto* wass = app.add_subcommand("wasserstein", "Weighted W_{p,q} between two diagram CSVs");
  std::string w_p = "1", w_q = "1", w_weighting = "uniform", w_a, w_b;
  int w_dim = -1;
  bool w_exclude = false;
  wass->add_option("--p", w_p, "Ground exponent (number or inf)")->capture_default_str();
  wass->add_option("--q", w_q, "Outer exponent (number or inf)")->capture_default_str();
  wass->add_option("--weighting", w_weighting, "uniform or standard")->capture_default_str();
  wass->add_option("--dim", w_dim, "Homology dimension to read");
  wass->add_flag("--exclude-essential", w_exclude, "Leave ceiling-capped points out");
  wass->add_option("A", w_a)->required();
  wass->add_option("B", w_b)->required();

  auto* bneck = app.add_subcommand("bottleneck", "Bottleneck distance between two diagram CSVs");
  std::string b_a, b_b;
  bneck->add_option("--dim", w_dim, "Homology dimension to read");
  bneck->add_flag("--exclude-essential", w_exclude, "Leave ceiling-capped points out");
  bneck->add_option("A", b_a)->required();
  bneck->add_option("B", b_b)->required();

  // vineyard
  auto* vine = app.add_subcommand("vineyard", "Straight-line homotopy vineyard between two vertex functions");
  int v_dim = 0;
  std::string v_weighting = "uniform", v_f, v_g, v_complex;
  VineyardOptions v_opt;
  std::optional<double> v_delta;
  bool v_vertex_level = false;
  vine->add_option("--dim", v_dim, "Homology dimension")->check(CLI::NonNegativeNumber);
  vine->add_option("--weighting", v_weighting, "uniform or standard")->capture_default_str();
  vine->add_flag("--vertex-level", v_vertex_level, "Interpolate vertex values instead of cell values");
  add_vineyard_flags(vine, v_opt, v_delta);
  vine->add_option("f", v_f)->required();
  vine->add_option("g", v_g)->required();
  vine->add_option("complex", v_complex)->required();

  auto* vdist = app.add_subcommand("vineyard-distance", "Weighted length of a vineyard JSON");
  std::string vd_path, vd_weighting = "uniform";
  vdist->add_option("--weighting", vd_weighting, "uniform or standard")->capture_default_str();
  vdist->add_option("vineyard", vd_path)->required();

  auto* mvc_cmd = app.add_subcommand("mvc", "Minimum vine cost between two diagram CSVs");
  std::string m_a, m_b;
  mvc_cmd->add_option("--dim", w_dim, "Homology dimension to read");
  mvc_cmd->add_option("A", m_a)->required();
  mvc_cmd->add_option("B", m_b)->required();

  auto* bounds_cmd = app.add_subcommand("check-bounds", "Evaluate the lower/upper/MVC bounds for f and g");
  int cb_dim = 0;
  std::string cb_f, cb_g, cb_complex;
  VineyardOptions cb_opt;
  std::optional<double> cb_delta;
  bounds_cmd->add_option("--dim", cb_dim, "Homology dimension")->check(CLI::NonNegativeNumber);
  add_vineyard_flags(bounds_cmd, cb_opt, cb_delta);
  bounds_cmd->add_option("f", cb_f)->required();
  bounds_cmd->add_option("g", cb_g)->required();
  bounds_cmd->add_option("complex", cb_complex)->required();

  // experiment
  auto* exp = app.add_subcommand("experiment", "Synthetic experiments");
  exp->require_subcommand(1);
  auto* gauss = exp->add_subcommand("gaussian", "Mean and variance sweeps of a negated Gaussian (H0)");
  GaussianOptions g_opt;
  gauss->add_option("--grid-size", g_opt.grid_size, "Samples on the path graph")->check(CLI::Range(16, 100000));
  gauss->add_option("--max-shift", g_opt.max_mean_shift, "Largest mean shift");
  gauss->add_option("--mean-steps", g_opt.mean_steps, "Number of mean shifts")->check(CLI::PositiveNumber);
  gauss->add_option("--max-sigma", g_opt.max_sigma, "Largest standard deviation");
  gauss->add_option("--variance-steps", g_opt.variance_steps, "Number of variance values")->check(CLI::PositiveNumber);

  auto* digits = exp->add_subcommand("digits", "Synthetic 6/7/9 images: L1, W1 and vineyard (H1)");
  DigitsOptions dg_opt;
  std::string dg_dump;
  digits->add_option("--per-class", dg_opt.per_class, "Images per class")->check(CLI::Range(5, 10000));
  digits->add_option("--size", dg_opt.image_size, "Image side in pixels")->check(CLI::Range(8, 256));
  digits->add_option("--threads", dg_opt.threads, "Worker threads (0 = all cores)");
  digits->add_option("--dump", dg_dump, "Directory for matrices, MDS coordinates and images");

  // geo
  auto* geo = app.add_subcommand("geo", "Dual-graph datasets");
  geo->require_subcommand(1);
  auto* compare = geo->add_subcommand("compare", "L1, W1 and standard-weighted vineyard between two columns");
  std::string gc_path, gc_f, gc_g, gc_dump;
  bool gc_one_minus = false;
  compare->add_option("dataset", gc_path, "Dataset JSON")->required();
  compare->add_option("--f", gc_f, "First column")->required();
  compare->add_option("--g", gc_g, "Second column")->required();
  compare->add_flag("--one-minus", gc_one_minus, "Use 1 - x for both columns");
  compare->add_option("--dump", gc_dump, "Directory for diagrams and the vineyard");
  auto* fixture = geo->add_subcommand("fixture", "Write a synthetic two-bump city dataset");
  bool fx_separated = false;
  std::size_t fx_side = 12;
  fixture->add_flag("--separated", fx_separated, "Put the bumps in opposite corners");
  fixture->add_option("--side", fx_side, "Grid side")->check(CLI::Range(3, 1000));

  // seq
  auto* seq = app.add_subcommand("seq", "Diagram sequences");
  seq->require_subcommand(1);
  auto* summary = seq->add_subcommand("summary", "Vineyard distance through a sequence of diagram CSVs");
  std::vector<std::string> sq_files;
  std::string sq_weighting = "uniform", sq_vineyard;
  int sq_dim = -1;
  summary->add_option("--weighting", sq_weighting, "uniform or standard")->capture_default_str();
  summary->add_option("--dim", sq_dim, "Homology dimension to read");
  summary->add_option("--vineyard-out", sq_vineyard, "Where to dump the vineyard JSON");
  summary->add_option("files", sq_files, "Diagram CSVs in order")->required();

  // matrix
  auto* matrix = app.add_subcommand("matrix", "Pairwise distance matrix");
  std::string mx_distance = "l1", mx_weighting = "uniform", mx_complex;
  std::vector<std::string> mx_inputs;
  bool mx_images = false, mx_invert = false;
  MatrixOptions mx_opt;
  std::optional<double> mx_delta;
  matrix->add_option("--distance", mx_distance, "l1, w1 or vineyard")->check(CLI::IsMember({"l1", "w1", "vineyard"}));
  matrix->add_option("--dim", mx_opt.dim, "Homology dimension")->check(CLI::NonNegativeNumber);
  matrix->add_option("--weighting", mx_weighting, "uniform or standard")->capture_default_str();
  matrix->add_option("--threads", mx_opt.threads, "Worker threads (0 = all cores)");
  matrix->add_option("--complex", mx_complex, "Complex JSON shared by vertex-value inputs");
  matrix->add_flag("--images", mx_images, "Inputs are images");
  matrix->add_flag("--invert", mx_invert, "Use 256 - intensity for images");
  add_vineyard_flags(matrix, mx_opt.vineyard, mx_delta);
  matrix->add_option("inputs", mx_inputs, "Vertex CSVs (with --complex) or images")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*diagram) {
      FilteredComplex fc;
      if (!d_image.empty()) {
        fc = load_image(d_image, d_invert);
      } else {
        if (d_complex.empty() || d_values.empty())
          throw Error(ErrorKind::InvalidArgument, "diagram needs complex.json and values.csv, or --image");
        fc = load_function(d_complex, d_values);
      }
      PersistenceDiagram dgm;
      if (d_union_find) {
        if (d_dim != 0) throw Error(ErrorKind::InvalidArgument, "--union-find only computes dimension 0");
        dgm = compute_h0_union_find(fc.complex, fc.filter, d_ceiling);
      } else {
        dgm = compute_diagram(fc.complex, fc.filter, d_dim, d_ceiling);
      }
      Sink s(g.output);
      if (g.format == "csv") {
        io::write_diagram_csv(s.out(), dgm);
      } else {
        json pts = json::array();
        for (const auto& p : dgm.points) pts.push_back({{"birth", p.birth}, {"death", p.death}, {"essential", p.essential}});
        s.out() << json{{"dim", dgm.dim}, {"ceiling", dgm.ceiling}, {"points", pts}}.dump(2) << '\n';
      }
    } else if (*wass || *bneck || *mvc_cmd) {
      const bool is_w = wass->parsed();
      const std::string& a_path = is_w ? w_a : (*bneck ? b_a : m_a);
      const std::string& b_path = is_w ? w_b : (*bneck ? b_b : m_b);
      const PersistenceDiagram a = io::read_diagram(a_path, w_dim);
      const PersistenceDiagram b = io::read_diagram(b_path, w_dim);
      DistanceResult r;
      if (is_w) {
        auto exponent = [](const std::string& s) {
          if (s == "inf" || s == "infinity") return kInfinity;
          return io::detail::to_double(s, "exponent");
        };
        r = weighted_wasserstein(a, b, exponent(w_p), exponent(w_q), Weighting::from_name(w_weighting), !w_exclude);
      } else if (*bneck) {
        r = bottleneck(a, b, !w_exclude);
      } else {
        r = mvc(a, b);
      }
      emit_json(g, io::distance_to_json(r));
    } else if (*vine) {
      v_opt.delta = v_delta;
      auto k = std::make_shared<const CellComplex>(io::read_complex(v_complex));
      const FilterFunction f = io::read_vertex_function(v_f, *k);
      const FilterFunction gg = io::read_vertex_function(v_g, *k);
      const Weighting w = Weighting::from_name(v_weighting);
      const Homotopy h = straight_line_homotopy(
          k, f, gg, v_vertex_level ? HomotopyMode::VertexLevel : HomotopyMode::SimplexLevel);
      const Vineyard vy = build_vineyard(h, v_dim, w, v_opt);
      json j = io::vineyard_to_json(vy);
      j["weighting"] = w.name();
      j["distance"] = vineyard_distance(vy, w);
      emit_json(g, j);
    } else if (*vdist) {
      auto in = io::detail::open_in(vd_path);
      const Vineyard vy = io::vineyard_from_json(io::parse_json(in, vd_path));
      const Weighting w = Weighting::from_name(vd_weighting);
      emit_json(g, {{"weighting", w.name()}, {"distance", vineyard_distance(vy, w)}});
    } else if (*bounds_cmd) {
      cb_opt.delta = cb_delta;
      auto k = std::make_shared<const CellComplex>(io::read_complex(cb_complex));
      const FilterFunction f = io::read_vertex_function(cb_f, *k);
      const FilterFunction gg = io::read_vertex_function(cb_g, *k);
      emit_json(g, report_to_json(check_bounds(k, f, gg, cb_dim, Weighting::standard(), cb_opt)));
    } else if (*gauss) {
      const auto rows = gaussian_experiment(g_opt);
      Sink s(g.output);
      if (g.format == "csv") {
        s.out() << "sweep,shift,l1,w1,vineyard\n" << std::setprecision(12);
        for (const auto& r : rows)
          s.out() << r.sweep << ',' << r.shift << ',' << r.l1 << ',' << r.w1 << ',' << r.vineyard << '\n';
      } else {
        json arr = json::array();
        for (const auto& r : rows)
          arr.push_back({{"sweep", r.sweep}, {"shift", r.shift}, {"l1", r.l1}, {"w1", r.w1}, {"vineyard", r.vineyard}});
        s.out() << arr.dump(2) << '\n';
      }
    } else if (*digits) {
      dg_opt.seed = g.seed;
      const DigitsResult res = digits_experiment(dg_opt);
      json j = {{"per_class", dg_opt.per_class}, {"size", dg_opt.image_size}, {"seed", dg_opt.seed}};
      for (const auto& [name, acc] : res.accuracy) {
        j["accuracy"][name] = acc;
        j["six_nine_accuracy"][name] = res.six_nine_accuracy.at(name);
        j["mds_stress"][name] = res.embeddings.at(name).stress;
      }
      if (!dg_dump.empty()) {
        const fs::path dir(dg_dump);
        std::vector<std::string> labels;
        for (std::size_t i = 0; i < res.labels.size(); ++i)
          labels.push_back(std::to_string(res.labels[i]) + "_" + std::to_string(i));
        for (const auto& [name, m] : res.matrices) {
          write_file(dir / (name + ".csv"), matrix_csv(m, labels));
          write_file(dir / ("mds_" + name + ".csv"), embedding_csv(res.embeddings.at(name), res.labels));
        }
        for (std::size_t i = 0; i < res.images.size(); ++i) {
          std::ostringstream ss;
          io::write_image_csv(ss, res.images[i]);
          write_file(dir / "images" / (labels[i] + ".csv"), ss.str());
        }
      }
      emit_json(g, j);
    } else if (*compare) {
      const auto ds = io::read_dataset(gc_path);
      const GeoCompareResult r = geo_compare(ds, gc_f, gc_g, gc_one_minus);
      if (!gc_dump.empty()) {
        const fs::path dir(gc_dump);
        std::ostringstream a, b;
        io::write_diagram_csv(a, r.dgm_f);
        io::write_diagram_csv(b, r.dgm_g);
        write_file(dir / "dgm_f.csv", a.str());
        write_file(dir / "dgm_g.csv", b.str());
        write_file(dir / "vineyard.json", io::vineyard_to_json(r.vineyard).dump(2) + "\n");
      }
      if (g.format == "csv") {
        Sink s(g.output);
        s.out() << "l1,w1,vineyard,mvc\n"
                << std::setprecision(12) << r.distances.l1 << ',' << r.distances.w1 << ',' << r.distances.vineyard
                << ',' << r.mvc << '\n';
      } else {
        emit_json(g, {{"l1", r.distances.l1}, {"w1", r.distances.w1}, {"vineyard", r.distances.vineyard}, {"mvc", r.mvc}});
      }
    } else if (*fixture) {
      emit_json(g, io::dataset_to_json(synthetic_city(fx_separated, fx_side)));
    } else if (*summary) {
      const SequenceSummary s = diagram_sequence_summary(sq_files, Weighting::from_name(sq_weighting), sq_dim);
      if (!sq_vineyard.empty()) write_file(sq_vineyard, io::vineyard_to_json(s.vineyard).dump(2) + "\n");
      emit_json(g, {{"weighting", sq_weighting}, {"distance", s.distance}, {"diagrams", sq_files.size()}});
    } else if (*matrix) {
      mx_opt.vineyard.delta = mx_delta;
      mx_opt.weighting = Weighting::from_name(mx_weighting);
      std::shared_ptr<const CellComplex> k;
      std::vector<FilterFunction> fns;
      if (mx_images) {
        std::optional<std::pair<std::size_t, std::size_t>> shape;
        for (const auto& path : mx_inputs) {
          const ImageGrid img = io::read_image(path);
          if (!shape) {
            shape = {img.rows, img.cols};
            k = std::make_shared<const CellComplex>(cubical_from_image(img).complex);
          } else if (*shape != std::make_pair(img.rows, img.cols)) {
            throw Error(ErrorKind::DomainMismatch, "image '" + path + "' has a different size");
          }
          FilterFunction f = lower_star(*k, img.pixels);
          fns.push_back(mx_invert ? filter_down(*k, f, 256.0) : std::move(f));
        }
      } else {
        if (mx_complex.empty()) throw Error(ErrorKind::InvalidArgument, "vertex-value inputs need --complex");
        k = std::make_shared<const CellComplex>(io::read_complex(mx_complex));
        for (const auto& path : mx_inputs) fns.push_back(io::read_vertex_function(path, *k));
      }
      const auto m = distance_matrix(k, fns, distance_kind_from_name(mx_distance), mx_opt);
      if (g.format == "json") {
        emit_json(g, {{"distance", mx_distance}, {"inputs", mx_inputs}, {"matrix", m}});
      } else {
        Sink s(g.output);
        io::write_matrix_csv(s.out(), m, mx_inputs);
      }
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
