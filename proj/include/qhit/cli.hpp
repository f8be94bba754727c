#pragma once

// Command-line front end. Kept header-only so the test suite can drive the
// subcommands in-process; tools/qhit.cpp only forwards main().

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qhit/error.hpp"
#include "qhit/graph.hpp"
#include "qhit/hitting.hpp"
#include "qhit/imaging.hpp"
#include "qhit/quantum.hpp"
#include "qhit/stochastic.hpp"

namespace qhit::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { kOk = 0, kUsage = 2, kInput = 3, kNumerical = 4 };

inline int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidParameter: return kUsage;
    case ErrorKind::ParseError:
    case ErrorKind::MaskError:
    case ErrorKind::DegenerateImage:
    case ErrorKind::Io: return kInput;
    case ErrorKind::DimensionMismatch:
    case ErrorKind::IntegrationFailure:
    case ErrorKind::CapExceeded:
    case ErrorKind::NoConvergence:
    case ErrorKind::FitError:
    case ErrorKind::InvalidWindow: return kNumerical;
  }
  return kNumerical;
}

/// Everything that determines a run's output; recorded in every file header.
struct RunConfig {
  std::string graph = "hexagonal:n=2";
  std::optional<double> coupling;
  std::optional<double> rate;
  std::optional<double> omega;  // stochastic-walk weight for state dumps
  std::optional<double> z_max;
  std::optional<double> dz;
  std::uint64_t seed = 0;
  std::filesystem::path out_dir = ".";
  bool calibrate = false;
  bool dat = false;
};

inline std::string fmt(double v) { return format_number(v); }

/// Writes through a sibling temp file and renames into place.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  require(!ec, ErrorKind::Io, "cannot create directory " + path.parent_path().string());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    require(bool(os), ErrorKind::Io, "cannot open " + tmp.string());
    os << content;
    os.flush();
    require(bool(os), ErrorKind::Io, "write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path, ec);
  require(!ec, ErrorKind::Io, "cannot rename into " + path.string());
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  require(bool(is), ErrorKind::Io, "cannot read " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

/// CSV body -> whitespace .dat; header lines become comments.
inline std::string to_dat(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, out;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] == '#') {
      out += line + '\n';
      continue;
    }
    for (char& c : line)
      if (c == ',') c = ' ';
    out += (header_seen ? "" : "# ") + line + '\n';
    header_seen = true;
  }
  return out;
}

class Runner {
 public:
  Runner(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  int run(std::vector<std::string> args) {
    CLI::App app{"qhit: quantum fast-hitting simulator"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", kVersion);
    app.add_option("--out", cfg_.out_dir, "Output directory");
    app.add_option("--seed", cfg_.seed, "Seed for randomized graph construction");
    app.add_option("--coupling", cfg_.coupling, "Uniform coupling C in mm^-1 (default 1)")
        ->check(CLI::PositiveNumber);
    app.add_option("--rate", cfg_.rate, "Classical hop rate gamma in mm^-1 (default C)")->check(CLI::PositiveNumber);
    app.add_flag("--calibrate", cfg_.calibrate, "Rescale C so the depth-2 optimum sits at 25.2 mm");
    app.add_flag("--dat", cfg_.dat, "Also write whitespace .dat mirrors");

    auto* generate = app.add_subcommand("generate", "Write node and edge tables for a graph");
    generate->add_option("--graph", cfg_.graph, "Graph selector, e.g. hexagonal:n=4")->required();

    std::optional<double> state_at;
    std::string kind = "quantum";
    auto* scan = app.add_subcommand("scan", "Exit-probability curve and optimum for one graph");
    scan->add_option("--graph", cfg_.graph, "Graph selector")->required();
    scan->add_option("--zmax", cfg_.z_max, "Scan window in mm")->check(CLI::PositiveNumber);
    scan->add_option("--dz", cfg_.dz, "Scan step in mm")->check(CLI::PositiveNumber);
    scan->add_option("--kind", kind, "quantum or classical")->check(CLI::IsMember({"quantum", "classical"}));
    scan->add_option("--state-at", state_at, "Dump the walker state at this length")->check(CLI::NonNegativeNumber);
    scan->add_option("--omega", cfg_.omega, "With --state-at: stochastic-walk populations at this omega")
        ->check(CLI::Range(0.0, 1.0));

    std::string depths = "2..8";
    auto* sweep = app.add_subcommand("sweep", "Quantum optimum and classical convergence over depths");
    sweep->add_option("--depths", depths, "Depth range a..b or list a,b,c");

    int length = 101;
    std::string engine = "quantum";
    auto* variance = app.add_subcommand("variance", "Ballistic/diffusive variance exponent on a path");
    variance->add_option("--length", length, "Odd number of sites")->check(CLI::PositiveNumber);
    variance->add_option("--engine", engine, "quantum or classical")->check(CLI::IsMember({"quantum", "classical"}));
    variance->add_option("--zmax", cfg_.z_max, "Largest length sampled")->check(CLI::PositiveNumber);
    variance->add_option("--dz", cfg_.dz, "Sample spacing")->check(CLI::PositiveNumber);

    std::string image_path, mask_path;
    std::optional<NodeId> exit_id;
    std::optional<std::string> analyze_graph;
    auto* analyze = app.add_subcommand("analyze", "Per-node probabilities from an ASCII image and a mask");
    analyze->add_option("image", image_path, "ASCII pixel matrix")->required();
    analyze->add_option("mask", mask_path, "Mask CSV node_id,cx,cy,radius")->required();
    analyze->add_option("--exit", exit_id, "Exit node id");
    analyze->add_option("--graph", analyze_graph, "Graph the mask must cover; supplies the exit node");

    std::vector<const char*> argv{"qhit"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
      app.parse(int(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
      const int rc = app.exit(e, out_, err_);
      return rc == 0 ? kOk : kUsage;
    }

    try {
      resolve_scales();
      if (*generate) return cmd_generate();
      if (*scan) return cmd_scan(kind, state_at, cfg_.omega);
      if (*sweep) return cmd_sweep(depths);
      if (*variance) return cmd_variance(length, engine);
      if (*analyze) return cmd_analyze(image_path, mask_path, exit_id, analyze_graph);
    } catch (const Error& e) {
      err_ << "error: " << e.what() << '\n';
      return exit_code_for(e.kind());
    } catch (const std::filesystem::filesystem_error& e) {
      err_ << "error: " << e.what() << '\n';
      return kInput;
    }
    return kUsage;
  }

 private:
  void resolve_scales() {
    if (cfg_.calibrate) {
      require(!cfg_.coupling, ErrorKind::InvalidParameter, "--calibrate and --coupling are mutually exclusive");
      coupling_ = calibrated_coupling();
    } else {
      coupling_ = cfg_.coupling.value_or(1.0);
    }
    rate_ = cfg_.rate.value_or(coupling_);
  }

  std::string header(const std::string& command, const std::string& extra) const {
    std::string h = "# qhit " + std::string(kVersion) + " " + command + " coupling=" + fmt(coupling_) +
                    " rate=" + fmt(rate_) + " calibrate=" + (cfg_.calibrate ? "1" : "0") +
                    " seed=" + std::to_string(cfg_.seed);
    if (!extra.empty()) h += " " + extra;
    return h + "\n";
  }

  void emit(const std::string& name, const std::string& content) {
    write_file_atomic(cfg_.out_dir / name, content);
    if (cfg_.dat && name.size() > 4 && name.substr(name.size() - 4) == ".csv")
      write_file_atomic(cfg_.out_dir / (name.substr(0, name.size() - 4) + ".dat"), to_dat(content));
  }

  int cmd_generate() {
    const auto sel = parse_selector(cfg_.graph);
    const Graph g = build_graph(sel, cfg_.seed);
    const std::string h = header("generate", "graph=" + sel.to_string());
    std::ostringstream nodes, edges;
    write_nodes_csv(nodes, g);
    write_edges_csv(edges, g);
    emit("nodes.csv", h + nodes.str());
    emit("edges.csv", h + edges.str());
    out_ << "nodes=" << g.size() << " edges=" << g.edges().size() << '\n';
    return kOk;
  }

  int cmd_scan(const std::string& kind, std::optional<double> state_at, std::optional<double> omega) {
    const auto sel = parse_selector(cfg_.graph);
    const Graph g = build_graph(sel, cfg_.seed);
    const bool quantum = kind == "quantum";
    const double scale = quantum ? coupling_ : rate_;
    const double z_max = cfg_.z_max.value_or(kWindowPerDepth * sel.size / scale);
    const double dz = cfg_.dz.value_or(default_step(scale));
    const CouplingModel cm{coupling_, 0.0};
    const auto curve = quantum ? quantum_hitting_curve(g, cm, z_max, dz) : classical_hitting_curve(g, rate_, z_max, dz);
    if (curve.boundary_maximum)
      err_ << "warning: boundary-maximum: optimum at the edge of the scan window; widen --zmax\n";

    const std::string h = header("scan", "graph=" + sel.to_string() + " kind=" + kind + " zmax=" + fmt(z_max) +
                                             " dz=" + fmt(dz));
    std::string body = "z,p_exit\n";
    for (std::size_t k = 0; k < curve.z.size(); ++k) body += fmt(curve.z[k]) + ',' + fmt(curve.p_exit[k]) + '\n';
    emit("curve.csv", h + body);
    out_ << "z_opt=" << fmt(curve.z_opt) << " p_opt=" << fmt(curve.p_opt) << '\n';

    if (state_at) {
      const Hamiltonian ham = build_hamiltonian(g, cm);
      if (omega) {
        QswParams params;
        params.omega = *omega;
        params.rate = rate_;
        const auto rho = evolve_qsw(DensityMatrix::basis(g.size(), g.entry()), ham, params, *state_at);
        std::string dens = "node_id,population\n";
        const auto pop = rho.populations();
        for (Eigen::Index i = 0; i < pop.size(); ++i) dens += std::to_string(i) + ',' + fmt(pop(i)) + '\n';
        emit("density.csv", header("scan", "graph=" + sel.to_string() + " omega=" + fmt(*omega) +
                                               " t=" + fmt(*state_at)) + dens);
      } else {
        const auto psi = evolve_quantum(ham, QuantumState::basis(g.size(), g.entry()), *state_at);
        const auto p = site_probabilities(psi);
        std::string st = "node_id,re,im,prob\n";
        for (Eigen::Index i = 0; i < p.size(); ++i)
          st += std::to_string(i) + ',' + fmt(psi.amplitudes(i).real()) + ',' + fmt(psi.amplitudes(i).imag()) + ',' +
                fmt(p(i)) + '\n';
        emit("state.csv", header("scan", "graph=" + sel.to_string() + " z=" + fmt(*state_at)) + st);
      }
    }
    return kOk;
  }

  static std::vector<int> parse_depths(const std::string& text) {
    std::vector<int> out;
    auto as_int = [&](const std::string& s) { return int(detail::parse_integer("depths", s)); };
    if (auto dots = text.find(".."); dots != std::string::npos) {
      const int a = as_int(text.substr(0, dots)), b = as_int(text.substr(dots + 2));
      require(a <= b, ErrorKind::InvalidParameter, "depth range must be ascending");
      for (int n = a; n <= b; ++n) out.push_back(n);
    } else {
      std::istringstream ss(text);
      std::string item;
      while (std::getline(ss, item, ',')) out.push_back(as_int(item));
    }
    require(!out.empty(), ErrorKind::InvalidParameter, "no depths given");
    return out;
  }

  int cmd_sweep(const std::string& depth_text) {
    const auto depths = parse_depths(depth_text);
    const auto rows = depth_sweep(depths, CouplingModel{coupling_, 0.0}, rate_);
    const std::string h = header("sweep", "depths=" + depth_text);
    std::string body = "n,z_opt,p_opt,t_converge,t_low,t_high,P_a\n";
    std::vector<FitPoint> zq, tc;
    for (const auto& r : rows) {
      if (r.boundary_maximum) err_ << "warning: boundary-maximum at depth " << r.n << '\n';
      body += std::to_string(r.n) + ',' + fmt(r.z_opt) + ',' + fmt(r.p_opt) + ',' + fmt(r.t_converge) + ',' +
              fmt(r.t_low) + ',' + fmt(r.t_high) + ',' + fmt(r.p_a) + '\n';
      zq.push_back({double(r.n), r.z_opt});
      tc.push_back({double(r.n), r.t_converge});
    }
    emit("sweep.csv", h + body);
    if (rows.size() >= 3) {
      const auto lin = fit_linear(zq);
      const auto pow = fit_power(tc);
      std::string fit = "model,slope,intercept,r_squared\n";
      for (const auto* f : {&lin, &pow})
        fit += std::string(to_string(f->model)) + ',' + fmt(f->slope) + ',' + fmt(f->intercept) + ',' +
               fmt(f->r_squared) + '\n';
      emit("fit.csv", h + fit);
      out_ << "quantum_linear_slope=" << fmt(lin.slope) << " r_squared=" << fmt(lin.r_squared)
           << " classical_exponent=" << fmt(pow.slope) << '\n';
    } else {
      err_ << "warning: fewer than 3 depths; fit.csv not written\n";
    }
    return kOk;
  }

  int cmd_variance(int length, const std::string& engine) {
    const bool quantum = engine == "quantum";
    const double scale = quantum ? coupling_ : rate_;
    const double z_max = cfg_.z_max.value_or((quantum ? 0.3 : 4.0) * length / scale);
    const double dz = cfg_.dz.value_or((quantum ? 0.005 : 0.04) * length / scale);
    std::vector<double> grid;
    for (long k = 0; double(k) * dz <= z_max * (1.0 + 1e-12); ++k) grid.push_back(double(k) * dz);
    const auto kind = quantum ? WalkKind::Quantum : WalkKind::Classical;
    const auto profile = variance_profile(length, kind, grid, scale);
    const auto fit = variance_slope_1d(length, kind, grid, scale);
    const std::string h = header("variance", "length=" + std::to_string(length) + " engine=" + engine +
                                                 " zmax=" + fmt(z_max) + " dz=" + fmt(dz));
    std::string body = "z,variance\n";
    for (const auto& s : profile) body += fmt(s.z) + ',' + fmt(s.variance) + '\n';
    emit("variance.csv", h + body);
    emit("fit.csv", h + "model,slope,intercept,r_squared\n" + to_string(fit.model) + ',' + fmt(fit.slope) + ',' +
                        fmt(fit.intercept) + ',' + fmt(fit.r_squared) + '\n');
    out_ << "exponent=" << fmt(fit.slope) << " r_squared=" << fmt(fit.r_squared) << '\n';
    return kOk;
  }

  int cmd_analyze(const std::string& image_path, const std::string& mask_path, std::optional<NodeId> exit_id,
                  const std::optional<std::string>& graph_sel) {
    const PixelImage img = parse_image(read_file(image_path));
    const MaskSpec mask = parse_mask(read_file(mask_path));
    NodeId exit = 0;
    for (const auto& e : mask.entries) exit = std::max(exit, e.node_id);
    if (graph_sel) {
      const Graph g = build_graph(parse_selector(*graph_sel), cfg_.seed);
      validate_mask(mask, g);
      exit = g.exit();
    }
    if (exit_id) exit = *exit_id;
    const auto ex = extract_probabilities(img, mask, exit);
    const std::string h = header("analyze", "image=" + std::filesystem::path(image_path).filename().string() +
                                                " mask=" + std::filesystem::path(mask_path).filename().string() +
                                                " exit=" + std::to_string(exit));
    std::string body = "node_id,probability\n";
    for (std::size_t i = 0; i < ex.node_ids.size(); ++i)
      body += std::to_string(ex.node_ids[i]) + ',' + fmt(ex.probabilities[i]) + '\n';
    emit("probabilities.csv", h + body);
    const std::string record = "efficiency=" + fmt(ex.efficiency) + "\n";
    write_file_atomic(cfg_.out_dir / "efficiency.txt", record);
    out_ << record;
    return kOk;
  }

  std::ostream& out_;
  std::ostream& err_;
  RunConfig cfg_;
  double coupling_ = 1.0;
  double rate_ = 1.0;
};

inline int run(std::vector<std::string> args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  return Runner(out, err).run(std::move(args));
}

}  // namespace qhit::cli
