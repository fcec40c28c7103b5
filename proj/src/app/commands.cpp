#include "app/commands.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "app/report.hpp"
#include "nfr/csv.hpp"
#include "nfr/errors.hpp"
#include "nfr/filter1d.hpp"
#include "nfr/kernels.hpp"
#include "nfr/noise_metrics.hpp"
#include "nfr/pgm.hpp"
#include "nfr/rearrangement.hpp"
#include "nfr/reference_filters.hpp"
#include "nfr/segmentation.hpp"
#include "nfr/synthetic.hpp"

namespace nfr::app {

namespace {

class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct KernelFlags {
  std::string name = "gaussian";
  double h = 20.0;
  std::optional<double> p;

  void add_to(CLI::App& cmd) {
    cmd.add_option("--kernel", name, "Kernel profile")->check(CLI::IsMember({"gaussian", "power"}));
    cmd.add_option("--h", h, "Kernel scale (intensity window)");
    cmd.add_option("--p", p, "Power-decay exponent (power kernel only, default 2)");
  }

  Kernel<double> build() const {
    if (name == "gaussian") {
      if (p) throw UsageError("--p only applies to --kernel power");
      return Kernel<double>::gaussian(h);
    }
    return Kernel<double>::power_decay(h, p.value_or(2.0));
  }

  void describe(nlohmann::ordered_json& params) const {
    params["kernel"] = name;
    params["h"] = h;
    if (name == "power") params["p"] = p.value_or(2.0);
  }
};

struct IterationFlags {
  std::string scheme = "varying";
  double tolerance = 1e-5;
  int max_iterations = 100;
  std::optional<int> iterations;

  void add_to(CLI::App& cmd, bool with_count) {
    cmd.add_option("--scheme", scheme, "Kernel weights from the current iterate or the input")
        ->check(CLI::IsMember({"varying", "fixed"}));
    cmd.add_option("--tol", tolerance, "Relative J decrement that stops the iteration");
    cmd.add_option("--max-iter", max_iterations, "Iteration cap under the stopping rule");
    if (with_count) cmd.add_option("--iterations", iterations, "Run exactly this many steps (no stopping rule)");
  }

  Scheme parsed_scheme() const { return scheme == "fixed" ? Scheme::fixed_kernel : Scheme::varying_kernel; }

  FilterConfig<double> config(const Kernel<double>& k) const {
    FilterConfig<double> cfg(k, parsed_scheme());
    cfg.stop_tolerance = tolerance;
    cfg.max_iterations = max_iterations;
    if (iterations) {
      if (*iterations < 1) throw UsageError("--iterations must be at least 1");
      cfg.stop_on_tolerance = false;
      cfg.max_iterations = *iterations;
    }
    return cfg;
  }

  void describe(nlohmann::ordered_json& params) const {
    params["scheme"] = scheme;
    params["tol"] = tolerance;
    params["max_iter"] = max_iterations;
    if (iterations) params["iterations"] = *iterations;
  }
};

struct Context {
  std::ostream& out;
  std::ostream& err;
  std::vector<std::string> argv;
};

void emit_report(const RunReport& report, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << report.to_line();
    return;
  }
  std::ofstream file(path, std::ios::app);
  if (!file) throw IoError(path, "cannot open report for appending");
  file << report.to_line();
}


// rearrange ----------------------------------------------------------------------------

struct RearrangeCmd {
  std::string input;
  std::string prefix;
  std::string report_path;

  void add_to(CLI::App& app) {
    auto* cmd = app.add_subcommand("rearrange", "Write the decreasing rearrangement and histogram as CSV");
    cmd->add_option("--input,-i", input, "Input PGM")->required();
    cmd->add_option("--output-prefix,-o", prefix, "Prefix for <prefix>.rearrangement.csv / .histogram.csv")
        ->required();
    cmd->add_option("--report", report_path, "Append the JSON-lines run report here (default: stdout)");
  }

  void run(Context& ctx) const {
    RunReport report;
    report.command = "rearrange";
    report.argv = ctx.argv;
    report.parameters["input"] = input;

    Pgm pgm;
    {
      PhaseTimer t(report, "read");
      pgm = read_pgm(input);
    }
    std::string rearrangement_csv;
    std::string histogram_csv;
    {
      PhaseTimer t(report, "rearrange");
      const auto result = decreasing_rearrangement(pgm.image);
      rearrangement_csv = csv::rearrangement(result.rearrangement);
      histogram_csv = csv::histogram(histogram(pgm.image));
    }
    {
      PhaseTimer t(report, "write");
      write_file(prefix + ".rearrangement.csv", rearrangement_csv);
      write_file(prefix + ".histogram.csv", histogram_csv);
    }
    report.outputs = {prefix + ".rearrangement.csv", prefix + ".histogram.csv"};
    emit_report(report, report_path, ctx.out);
  }
};

// denoise ------------------------------------------------------------------------------

struct DenoiseCmd {
  std::string input;
  std::string output;
  std::string csv_path;
  std::string report_path;
  std::string filter = "nf";
  KernelFlags kernel;
  IterationFlags iteration;
  std::optional<double> rho;
  std::optional<int> patch;
  std::optional<int> window;

  void add_to(CLI::App& app) {
    auto* cmd = app.add_subcommand("denoise", "Filter an image with the NF, direct NF, bilateral or NLM filter");
    cmd->add_option("--input,-i", input, "Input PGM")->required();
    cmd->add_option("--output,-o", output, "Output PGM (rounded, clamped to the input maxval)");
    cmd->add_option("--csv", csv_path, "Lossless float dump (index,value)");
    cmd->add_option("--report", report_path, "Append the JSON-lines run report here (default: stdout)");
    cmd->add_option("--filter", filter, "Filter")->check(CLI::IsMember({"nf", "nf-direct", "bilateral", "nlm"}));
    kernel.add_to(*cmd);
    iteration.add_to(*cmd, true);
    cmd->add_option("--rho", rho, "Spatial scale (bilateral) or patch Gaussian std (nlm)");
    cmd->add_option("--patch", patch, "NLM patch radius");
    cmd->add_option("--window", window, "Spatial/search window radius");
  }

  void check_combinations() const {
    const bool spatial = filter == "bilateral" || filter == "nlm";
    if (!spatial && (rho || patch || window)) throw UsageError("--rho/--patch/--window apply to bilateral and nlm only");
    if (patch && filter != "nlm") throw UsageError("--patch applies to nlm only");
    if (spatial && iteration.scheme != "varying") throw UsageError("--scheme applies to nf and nf-direct only");
    if (output.empty() && csv_path.empty()) throw UsageError("denoise needs --output and/or --csv");
  }

  void run(Context& ctx) const {
    check_combinations();
    const Kernel<double> k = kernel.build();

    RunReport report;
    report.command = "denoise";
    report.argv = ctx.argv;
    report.parameters["input"] = input;
    report.parameters["filter"] = filter;
    kernel.describe(report.parameters);

    Pgm pgm;
    {
      PhaseTimer t(report, "read");
      pgm = read_pgm(input);
    }

    Image<double> result;
    if (filter == "nf") {
      iteration.describe(report.parameters);
      const FilterConfig<double> cfg = iteration.config(k);
      PhaseTimer t(report, "filter");
      const auto [v0, levels] = decreasing_rearrangement(pgm.image);
      const FilterTrace<double> trace = iterate(v0, cfg);
      result = reconstruct(levels, trace.final_iterate());
      report.iterations = trace.iterations();
      report.stop_reason = to_string(trace.stop_reason);
      report.j_trace = trace.j_values;
      report.kernel_evaluations = trace.kernel_evaluations;
    } else if (filter == "nf-direct") {
      iteration.describe(report.parameters);
      const FilterConfig<double> cfg = iteration.config(k);
      PhaseTimer t(report, "filter");
      result = run_direct(pgm.image, cfg, report);
    } else {
      SpatialConfig sp;
      sp.rho = rho.value_or(1.0);
      sp.patch_radius = patch.value_or(1);
      sp.window_radius = window;
      const int count = iteration.iterations.value_or(1);
      if (count < 1) throw UsageError("--iterations must be at least 1");
      report.parameters["rho"] = sp.rho;
      if (filter == "nlm") {
        report.parameters["patch"] = sp.patch_radius;
        report.parameters["window"] = sp.nlm_window();
      } else {
        report.parameters["window"] = sp.bilateral_window();
      }
      report.parameters["iterations"] = count;
      PhaseTimer t(report, "filter");
      result = filter == "nlm" ? nlm(pgm.image, k, sp, count) : bilateral(pgm.image, k, sp, count);
      report.iterations = count;
      report.stop_reason = "max_iterations";
    }

    {
      PhaseTimer t(report, "write");
      if (!output.empty()) {
        write_pgm(output, result, pgm.maxval);
        report.outputs.push_back(output);
      }
      if (!csv_path.empty()) {
        write_file(csv_path, csv::image_values(result));
        report.outputs.push_back(csv_path);
      }
    }
    emit_report(report, report_path, ctx.out);
  }

  static Image<double> run_direct(const Image<double>& img, const FilterConfig<double>& cfg, RunReport& report) {
    cfg.validate();
    Image<double> current = img;
    report.j_trace.push_back(functional_j_direct(current, cfg.kernel));
    report.stop_reason = "max_iterations";
    if (cfg.stop_on_tolerance && report.j_trace.back() == 0) {
      report.stop_reason = "tolerance";
      return current;
    }
    for (int n = 0; n < cfg.max_iterations; ++n) {
      const Image<double>& weights = cfg.scheme == Scheme::varying_kernel ? current : img;
      current = direct_nf_step(weights, current, cfg.kernel, &report.kernel_evaluations);
      ++report.iterations;
      const double j_prev = report.j_trace.back();
      report.j_trace.push_back(functional_j_direct(current, cfg.kernel));
      const double j_next = report.j_trace.back();
      if (cfg.stop_on_tolerance && (j_next == 0 || std::abs(j_next - j_prev) / std::abs(j_prev) < cfg.stop_tolerance)) {
        report.stop_reason = "tolerance";
        break;
      }
    }
    return current;
  }
};

// segment ------------------------------------------------------------------------------

struct SegmentCmd {
  std::string input;
  std::string prefix;
  std::string report_path;
  double merge_tol = 1e-3;
  KernelFlags kernel;
  IterationFlags iteration;

  void add_to(CLI::App& app) {
    auto* cmd = app.add_subcommand("segment", "Segment an image into the flat regions of the converged NF");
    cmd->add_option("--input,-i", input, "Input PGM")->required();
    cmd->add_option("--output-prefix,-o", prefix, "Prefix for label map, region masks and region table")
        ->required();
    cmd->add_option("--report", report_path, "Append the JSON-lines run report here (default: stdout)");
    cmd->add_option("--merge-tol", merge_tol, "Merge gap as a fraction of the dynamic range");
    kernel.add_to(*cmd);
    iteration.add_to(*cmd, true);
  }

  void run(Context& ctx) const {
    if (merge_tol < 0) throw UsageError("--merge-tol must be nonnegative");
    const Kernel<double> k = kernel.build();
    const FilterConfig<double> cfg = iteration.config(k);

    RunReport report;
    report.command = "segment";
    report.argv = ctx.argv;
    report.parameters["input"] = input;
    kernel.describe(report.parameters);
    iteration.describe(report.parameters);
    report.parameters["merge_tol"] = merge_tol;

    Pgm pgm;
    {
      PhaseTimer t(report, "read");
      pgm = read_pgm(input);
    }
    FilterTrace<double> trace;
    Segmentation<double> seg;
    {
      PhaseTimer t(report, "segment");
      seg = segment(pgm.image, cfg, merge_tol, &trace);
    }
    report.iterations = trace.iterations();
    report.stop_reason = to_string(trace.stop_reason);
    report.j_trace = trace.j_values;
    report.kernel_evaluations = trace.kernel_evaluations;

    {
      PhaseTimer t(report, "write");
      const std::string labels_path = prefix + ".labels.pgm";
      write_pgm(labels_path, Image<double>(seg.labels.cast<double>(), seg.shape), 65535);
      report.outputs.push_back(labels_path);
      for (Eigen::Index r = 0; r < seg.region_count(); ++r) {
        const Mask mask = seg.mask(r);
        VectorX<double> data(static_cast<Eigen::Index>(mask.size()));
        for (std::size_t i = 0; i < mask.size(); ++i) data[static_cast<Eigen::Index>(i)] = mask[i] ? 255.0 : 0.0;
        const std::string mask_path = prefix + ".region" + std::to_string(r) + ".pgm";
        write_pgm(mask_path, Image<double>(std::move(data), seg.shape), 255);
        report.outputs.push_back(mask_path);
      }
      const std::string table_path = prefix + ".regions.csv";
      write_file(table_path, csv::regions(seg));
      report.outputs.push_back(table_path);
    }
    report.parameters["region_count"] = seg.region_count();
    emit_report(report, report_path, ctx.out);
  }
};

// noise --------------------------------------------------------------------------------

struct NoiseCmd {
  std::string input;
  std::string output;
  std::string csv_path;
  std::string report_path;
  double snr = 10.0;
  std::uint64_t seed = 0;
  bool clamp_values = false;

  void add_to(CLI::App& app) {
    auto* cmd = app.add_subcommand("noise", "Add seeded Gaussian white noise at a given SNR");
    cmd->add_option("--input,-i", input, "Input PGM")->required();
    cmd->add_option("--output,-o", output, "Output PGM (rounded, clamped to maxval)");
    cmd->add_option("--csv", csv_path, "Lossless float dump (index,value)");
    cmd->add_option("--report", report_path, "Append the JSON-lines run report here (default: stdout)");
    cmd->add_option("--snr", snr, "sigma(image) / sigma(noise)");
    cmd->add_option("--seed", seed, "Generator seed");
    cmd->add_flag("--clamp", clamp_values, "Clamp noisy values to [0, maxval] before writing the CSV");
  }

  void run(Context& ctx) const {
    if (output.empty() && csv_path.empty()) throw UsageError("noise needs --output and/or --csv");
    RunReport report;
    report.command = "noise";
    report.argv = ctx.argv;
    report.parameters["input"] = input;
    report.parameters["snr"] = snr;
    report.parameters["seed"] = seed;
    report.parameters["clamp"] = clamp_values;
    report.parameters["generator"] = "mt19937_64+box-muller";

    Pgm pgm;
    {
      PhaseTimer t(report, "read");
      pgm = read_pgm(input);
    }
    Image<double> noisy;
    {
      PhaseTimer t(report, "noise");
      noisy = add_gaussian_noise(pgm.image, NoiseSpec{snr, seed});
      if (clamp_values) noisy = clamp(noisy, 0.0, static_cast<double>(pgm.maxval));
    }
    {
      PhaseTimer t(report, "write");
      if (!output.empty()) {
        write_pgm(output, noisy, pgm.maxval);
        report.outputs.push_back(output);
      }
      if (!csv_path.empty()) {
        write_file(csv_path, csv::image_values(noisy));
        report.outputs.push_back(csv_path);
      }
    }
    emit_report(report, report_path, ctx.out);
  }
};

// bench --------------------------------------------------------------------------------

struct BenchCmd {
  std::vector<int> sizes{64, 128, 256};
  int levels = 256;
  int repeats = 3;
  std::uint64_t seed = 1;
  std::string output;
  KernelFlags kernel;

  void add_to(CLI::App& app) {
    auto* cmd = app.add_subcommand("bench", "Kernel-evaluation counts and timings: 1D vs pixel-domain NF");
    cmd->add_option("--sizes", sizes, "Square image sides")->delimiter(',');
    cmd->add_option("--levels", levels, "Number of distinct grey levels Q");
    cmd->add_option("--repeats", repeats, "Timing repeats (minimum is reported)");
    cmd->add_option("--seed", seed, "Fixture seed");
    cmd->add_option("--output,-o", output, "CSV report path (default: stdout)");
    kernel.add_to(*cmd);
  }

  template <typename Fn>
  double best_ms(Fn&& fn) const {
    double best = std::numeric_limits<double>::infinity();
    for (int r = 0; r < repeats; ++r) {
      const auto start = std::chrono::steady_clock::now();
      fn();
      best = std::min(best, std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count());
    }
    return best;
  }

  void run(Context& ctx) const {
    if (levels < 1 || repeats < 1) throw UsageError("--levels and --repeats must be positive");
    const Kernel<double> k = kernel.build();
    std::string table =
        "side,pixels,levels,evals_1d_per_iteration,evals_direct_histogram_per_iteration,"
        "evals_direct_naive_per_iteration,ms_rearrange,ms_1d_iteration,ms_direct_histogram_iteration\n";
    for (int side : sizes) {
      if (side < 1) throw UsageError("--sizes entries must be positive");
      const Image<double> img = synthetic::exact_levels<double>(Shape{side, side}, levels, seed);
      const auto n = static_cast<std::uint64_t>(img.size());

      Rearranged<double> r;
      const double ms_rearrange = best_ms([&] { r = decreasing_rearrangement(img); });
      std::uint64_t evals_1d = 0;
      nf_step(r.rearrangement, r.rearrangement, k, &evals_1d);
      const double ms_1d = best_ms([&] { nf_step(r.rearrangement, r.rearrangement, k); });
      std::uint64_t evals_direct = 0;
      direct_nf_step_histogram(img, k, &evals_direct);
      const double ms_direct = best_ms([&] { direct_nf_step_histogram(img, k); });

      table += std::to_string(side) + ',' + std::to_string(n) + ',' + std::to_string(r.rearrangement.size()) + ',' +
               std::to_string(evals_1d) + ',' + std::to_string(evals_direct) + ',' + std::to_string(n * n) + ',' +
               csv::format_real(ms_rearrange) + ',' + csv::format_real(ms_1d) + ',' + csv::format_real(ms_direct) +
               '\n';
    }
    if (output.empty()) {
      ctx.out << table;
    } else {
      write_file(output, table);
    }
  }
};

// compare ------------------------------------------------------------------------------

Image<double> load_any(const std::string& path) {
  if (path.size() >= 4 && path.substr(path.size() - 4) == ".csv") return csv::parse_image_values(read_file(path), path);
  return read_pgm(path).image;
}

struct CompareCmd {
  std::string reference;
  std::string input;
  std::string output;

  void add_to(CLI::App& app) {
    auto* cmd = app.add_subcommand("compare", "RMSE, SNR and mask Dice between two images (PGM or float CSV)");
    cmd->add_option("--reference,-r", reference, "Clean / ground-truth image")->required();
    cmd->add_option("--input,-i", input, "Image to score")->required();
    cmd->add_option("--output,-o", output, "Write the JSON result here (default: stdout)");
  }

  void run(Context& ctx) const {
    const Image<double> ref = load_any(reference);
    const Image<double> img = load_any(input);
    if (ref.size() != img.size()) throw InvalidArgument("compare: images differ in sample count");
    const Image<double> flat_ref(ref.data(), Shape{ref.size()});
    const Image<double> flat_img(img.data(), Shape{img.size()});

    nlohmann::ordered_json j;
    j["reference"] = reference;
    j["input"] = input;
    j["rmse"] = rmse(flat_ref, flat_img);
    const double noise_std = empirical_std((flat_img.data() - flat_ref.data()).eval());
    if (noise_std > 0) {
      j["snr"] = snr_measure(flat_ref, flat_img);
    } else {
      j["snr"] = nullptr;
    }
    Mask a(static_cast<std::size_t>(ref.size()));
    Mask b(static_cast<std::size_t>(img.size()));
    for (Eigen::Index i = 0; i < ref.size(); ++i) {
      a[static_cast<std::size_t>(i)] = ref[i] != 0;
      b[static_cast<std::size_t>(i)] = img[i] != 0;
    }
    j["dice_nonzero"] = dice(a, b);
    const std::string line = j.dump() + '\n';
    if (output.empty()) {
      ctx.out << line;
    } else {
      write_file(output, line);
    }
  }
};

// squares ------------------------------------------------------------------------------

struct SquaresCmd {
  int size = 256;
  std::string output;

  void add_to(CLI::App& app) {
    auto* cmd = app.add_subcommand("squares", "Write the four-level Squares test image");
    cmd->add_option("--size", size, "Side length (even)");
    cmd->add_option("--output,-o", output, "Output PGM")->required();
  }

  void run(Context&) const { write_pgm(output, synthetic::squares<double>(size), 255); }
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Neighborhood filter through the decreasing rearrangement", "nfr"};
  // --h is the kernel scale, so help is long-form only.
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);

  RearrangeCmd rearrange;
  DenoiseCmd denoise;
  SegmentCmd seg;
  NoiseCmd noise;
  BenchCmd bench;
  CompareCmd compare;
  SquaresCmd squares;
  rearrange.add_to(app);
  denoise.add_to(app);
  seg.add_to(app);
  noise.add_to(app);
  bench.add_to(app);
  compare.add_to(app);
  squares.add_to(app);

  std::vector<std::string> argv_storage{"nfr"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_storage) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsage;
  }

  Context ctx{out, err, args};
  const std::string name = app.get_subcommands().front()->get_name();
  try {
    if (name == "rearrange") rearrange.run(ctx);
    else if (name == "denoise") denoise.run(ctx);
    else if (name == "segment") seg.run(ctx);
    else if (name == "noise") noise.run(ctx);
    else if (name == "bench") bench.run(ctx);
    else if (name == "compare") compare.run(ctx);
    else if (name == "squares") squares.run(ctx);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n" << app.get_subcommand(name)->help();
    return kUsage;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << "\n";
    return kIo;
  } catch (const InvalidArgument& e) {
    err << "precondition violated: " << e.what() << "\n";
    return kNumeric;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kSuccess;
}

}  // namespace nfr::app
