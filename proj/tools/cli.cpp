#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <fmt/chrono.h>
#include <fmt/format.h>
#include <json.hpp>
#include <openssl/evp.h>

#include "alignmark/bounds.hpp"
#include "alignmark/correlation.hpp"
#include "alignmark/io.hpp"
#include "alignmark/matrix.hpp"
#include "alignmark/search.hpp"
#include "alignmark/simulate.hpp"
#include "alignmark/spectrum.hpp"

#ifndef ALIGNMARK_VERSION
#define ALIGNMARK_VERSION "unknown"
#endif

namespace alignmark::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UniquenessAnomaly : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string utc_now() {
  return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(std::chrono::system_clock::to_time_t(
                                                  std::chrono::system_clock::now())));
}

int default_threads() {
  if (const char* env = std::getenv("ALIGNMARK_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

BinaryMatrix load_matrix(const std::string& path) {
  if (!fs::is_regular_file(path)) throw InputError("cannot read matrix file " + path);
  try {
    return read_matrix_file(path);
  } catch (const ParseError& e) {
    throw InputError(e.what());
  }
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

// Collects what a run did and writes it next to (or instead of) the outputs.
class RunManifest {
 public:
  RunManifest(std::string command, const std::vector<std::string>& args)
      : command_(std::move(command)), args_(args), started_(utc_now()) {}

  json& params() { return params_; }
  void set_seed(std::uint64_t seed) { seed_ = seed; }
  void add_input(const std::string& path) { inputs_.push_back(path); }
  void add_output(const fs::path& path) { outputs_.push_back(path.string()); }

  json finish() const {
    json inputs = json::array();
    for (const std::string& p : inputs_) inputs.push_back({{"path", p}, {"sha256", sha256_file(p)}});
    json outputs = json::array();
    for (const std::string& p : outputs_) outputs.push_back({{"path", p}, {"sha256", sha256_file(p)}});
    return {{"tool", "alignmark"},
            {"version", ALIGNMARK_VERSION},
            {"command", command_},
            {"argv", args_},
            {"params", params_},
            {"seed", seed_ ? json(*seed_) : json(nullptr)},
            {"started_at", started_},
            {"finished_at", utc_now()},
            {"inputs", std::move(inputs)},
            {"outputs", std::move(outputs)}};
  }

 private:
  std::string command_;
  std::vector<std::string> args_;
  std::string started_;
  json params_ = json::object();
  std::optional<std::uint64_t> seed_;
  std::vector<std::string> inputs_;
  std::vector<std::string> outputs_;
};

// Manifest for a single-file output: sweep.csv -> sweep.manifest.json.
fs::path sibling_manifest(const fs::path& out) {
  fs::path m = out;
  m.replace_extension(".manifest.json");
  return m;
}

// Without --out the result goes to `out` and the manifest to `err`.
void emit(RunManifest& manifest, const std::string& out_path, const std::string& result,
          std::ostream& out, std::ostream& err) {
  if (out_path.empty()) {
    out << result;
    err << manifest.finish().dump() << '\n';
    return;
  }
  write_file(out_path, result);
  manifest.add_output(out_path);
  write_file(sibling_manifest(out_path), manifest.finish().dump(2) + "\n");
}

struct DirOutput {
  fs::path dir;
  std::vector<std::pair<std::string, std::string>> files;  // name, contents
};

void emit_dir(RunManifest& manifest, const DirOutput& output) {
  fs::create_directories(output.dir);
  for (const auto& [name, text] : output.files) {
    write_file(output.dir / name, text);
    manifest.add_output(output.dir / name);
  }
  write_file(output.dir / "manifest.json", manifest.finish().dump(2) + "\n");
}

// ---- autocorr --------------------------------------------------------------

struct AutocorrArgs {
  std::string file;
  std::string out_dir;
  bool csv = false;
};

void cmd_autocorr(const AutocorrArgs& a, RunManifest& manifest, std::ostream& out, std::ostream& err) {
  const BinaryMatrix m = load_matrix(a.file);
  manifest.add_input(a.file);
  manifest.params() = {{"file", a.file}, {"csv", a.csv}};
  const AutocorrelationMap map = autocorrelate(m);
  const DistanceSpectrum spectrum = spectrum_of(map);

  json result = {{"matrix", format_matrix(m)},
                 {"p", spectrum.p},
                 {"s", spectrum.s},
                 {"d1", spectrum.d1},
                 {"histogram", to_string(spectrum)},
                 {"spectrum", to_json(spectrum)},
                 {"correlation", to_json(map)}};
  if (a.out_dir.empty()) {
    out << (a.csv ? to_csv(map) : result.dump(2) + "\n");
    err << manifest.finish().dump() << '\n';
    return;
  }
  result["manifest"] = "manifest.json";
  emit_dir(manifest, {a.out_dir, {{"result.json", result.dump(2) + "\n"}, {"correlation.csv", to_csv(map)}}});
}

// ---- rank ------------------------------------------------------------------

struct RankArgs {
  std::vector<std::string> files;
  std::string out_dir;
};

void cmd_rank(const RankArgs& a, RunManifest& manifest, std::ostream& out, std::ostream& err) {
  struct Entry {
    std::string file;
    BinaryMatrix matrix;
    DistanceSpectrum spectrum;
  };
  std::vector<Entry> entries;
  for (const std::string& f : a.files) {
    BinaryMatrix m = load_matrix(f);
    manifest.add_input(f);
    if (!entries.empty() && (m.rows() != entries.front().matrix.rows() ||
                             m.cols() != entries.front().matrix.cols())) {
      throw InputError(fmt::format("{} is {}x{} but {} is {}x{}; rank compares one size at a time", f,
                                   m.rows(), m.cols(), entries.front().file,
                                   entries.front().matrix.rows(), entries.front().matrix.cols()));
    }
    DistanceSpectrum s = spectrum_of(m);
    entries.push_back({f, std::move(m), std::move(s)});
  }
  manifest.params() = {{"files", a.files}};
  std::stable_sort(entries.begin(), entries.end(), [](const Entry& x, const Entry& y) {
    return ranks_above(x.spectrum, y.spectrum);
  });

  json ranking = json::array();
  int rank = 0;
  bool any_tie = false;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const bool tied = i > 0 && rank_order(entries[i - 1].spectrum, entries[i].spectrum) == 0;
    if (!tied) rank = static_cast<int>(i) + 1;
    any_tie = any_tie || tied;
    ranking.push_back({{"rank", rank},
                       {"file", entries[i].file},
                       {"histogram", to_string(entries[i].spectrum)},
                       {"tied_with_previous", tied}});
  }
  json result = {{"ranking", std::move(ranking)}, {"ties", any_tie}};
  if (a.out_dir.empty()) {
    out << result.dump(2) << '\n';
    err << manifest.finish().dump() << '\n';
    return;
  }
  result["manifest"] = "manifest.json";
  emit_dir(manifest, {a.out_dir, {{"result.json", result.dump(2) + "\n"}}});
}

// ---- bounds ----------------------------------------------------------------

struct BoundsArgs {
  int rows = 0;
  int cols = 0;
  std::string out;
};

void cmd_bounds(const BoundsArgs& a, RunManifest& manifest, std::ostream& out, std::ostream& err) {
  manifest.params() = {{"rows", a.rows}, {"cols", a.cols}};
  emit(manifest, a.out, to_csv(bound_table(a.rows, a.cols)), out, err);
}

// ---- search ----------------------------------------------------------------

struct SearchArgs {
  SearchConfig config;
  bool diagonal = false;
  bool no_flip_pruning = false;
  bool no_spiral = false;
  std::string out_dir;
};

void cmd_search(SearchArgs a, RunManifest& manifest, std::ostream& out, std::ostream& err) {
  SearchConfig& c = a.config;
  if (c.partition_depth < 0) c.partition_depth = std::min(1, c.rows - 1);
  c.restriction = a.diagonal ? SymmetryRestriction::kDiagonal : SymmetryRestriction::kNone;
  c.flip_pruning = !a.no_flip_pruning;
  c.spiral_early_exit = !a.no_spiral;
  manifest.params() = {{"rows", c.rows},
                       {"cols", c.cols},
                       {"restriction", to_string(c.restriction)},
                       {"top_k", c.top_k},
                       {"per_p", c.per_p},
                       {"partition_depth", c.partition_depth},
                       {"threads", c.threads},
                       {"flip_pruning", c.flip_pruning},
                       {"spiral_early_exit", c.spiral_early_exit},
                       {"leaf_budget", c.leaf_budget},
                       {"force", c.force},
                       {"checkpoint_dir", c.checkpoint_dir}};

  SearchReport report;
  try {
    report = search(c);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  json result = to_json(report);
  if (a.out_dir.empty()) {
    out << result.dump(2) << '\n';
    err << manifest.finish().dump() << '\n';
  } else {
    result["manifest"] = "manifest.json";
    emit_dir(manifest, {a.out_dir, {{"result.json", result.dump(2) + "\n"}, {"curves.csv", curves_csv(report)}}});
  }
  if (!report.unique_optimum) {
    throw UniquenessAnomaly("more than one class attains the optimal spectrum " +
                            to_string(report.optima.front().spectrum));
  }
}

// ---- simulate --------------------------------------------------------------

struct SimulateArgs {
  std::string mark;
  int expand = 1;
  int background = 5;
  std::string snr;
  int trials = 10000;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string out;
};

void cmd_simulate(const SimulateArgs& a, RunManifest& manifest, std::ostream& out, std::ostream& err) {
  TrialConfig config;
  config.mark = load_matrix(a.mark);
  manifest.add_input(a.mark);
  config.expansion_k = a.expand;
  config.background_factor = a.background;
  config.trials = a.trials;
  config.seed = a.seed;
  config.threads = a.threads;
  try {
    config.snr_db = parse_snr_grid(a.snr);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  manifest.set_seed(a.seed);
  manifest.params() = {{"mark", a.mark},       {"expand", a.expand}, {"background", a.background},
                       {"snr", a.snr},         {"trials", a.trials}, {"seed", a.seed},
                       {"threads", a.threads}};
  std::vector<SweepPoint> points;
  try {
    points = run_sweep(config);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  emit(manifest, a.out, sweep_to_csv(points), out, err);
}

// ---- expand ----------------------------------------------------------------

struct ExpandArgs {
  std::string file;
  int k = 1;
  std::string out;
};

void cmd_expand(const ExpandArgs& a, RunManifest& manifest, std::ostream& out, std::ostream& err) {
  const BinaryMatrix m = load_matrix(a.file);
  manifest.add_input(a.file);
  manifest.params() = {{"file", a.file}, {"k", a.k}};
  BinaryMatrix expanded;
  try {
    expanded = expand(m, a.k);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  emit(manifest, a.out, format_matrix(expanded), out, err);
}

}  // namespace

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buffer[1 << 14];
  while (in.read(buffer, sizeof buffer) || in.gcount() > 0) {
    EVP_DigestUpdate(ctx, buffer, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  EVP_DigestFinal_ex(ctx, digest, &length);
  EVP_MD_CTX_free(ctx);
  std::string hex;
  for (unsigned int i = 0; i < length; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Binary alignment marks: autocorrelation, ranking, bounds, exhaustive search, noise simulation",
               "alignmark"};
  app.set_version_flag("--version", ALIGNMARK_VERSION);
  app.require_subcommand(1);

  AutocorrArgs autocorr_args;
  auto* autocorr = app.add_subcommand("autocorr", "Autocorrelation map and distance spectrum of a matrix file");
  autocorr->add_option("file", autocorr_args.file, "Matrix text file")->required();
  autocorr->add_flag("--csv", autocorr_args.csv, "Print the map as tau1,tau2,value CSV");
  autocorr->add_option("--out", autocorr_args.out_dir, "Output directory");

  RankArgs rank_args;
  auto* rank = app.add_subcommand("rank", "Order matrix files by their distance spectra");
  rank->add_option("files", rank_args.files, "Matrix text files of one size")->required();
  rank->add_option("--out", rank_args.out_dir, "Output directory");

  BoundsArgs bounds_args;
  auto* bounds = app.add_subcommand("bounds", "Lower bounds on s_min(p) as CSV");
  bounds->add_option("--rows", bounds_args.rows)->required()->check(CLI::Range(1, BinaryMatrix::kMaxSide));
  bounds->add_option("--cols", bounds_args.cols)->required()->check(CLI::Range(1, BinaryMatrix::kMaxSide));
  bounds->add_option("--out", bounds_args.out, "CSV path");

  SearchArgs search_args;
  search_args.config.threads = default_threads();
  auto* search_cmd = app.add_subcommand("search", "Exhaustive search for maximal-d1 matrices");
  search_cmd->add_option("--rows", search_args.config.rows)->required()->check(CLI::Range(1, BinaryMatrix::kMaxSide));
  search_cmd->add_option("--cols", search_args.config.cols)->required()->check(CLI::Range(1, BinaryMatrix::kMaxSide));
  search_cmd->add_flag("--diagonal", search_args.diagonal, "Only matrices equal to their transpose");
  search_cmd->add_option("--top-k", search_args.config.top_k, "Ranked classes to report, 0 for all")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  search_cmd->add_flag("--per-p", search_args.config.per_p, "Record s_min(p)");
  search_args.config.partition_depth = -1;
  search_cmd->add_option("--depth", search_args.config.partition_depth, "Prefix rows per work item (default 1)")
      ->check(CLI::NonNegativeNumber);
  search_cmd->add_option("--threads", search_args.config.threads)->capture_default_str()->check(CLI::PositiveNumber);
  search_cmd->add_option("--checkpoint", search_args.config.checkpoint_dir, "Per-prefix checkpoint directory");
  search_cmd->add_flag("--force", search_args.config.force, "Run even above the leaf budget");
  search_cmd->add_option("--budget", search_args.config.leaf_budget, "Leaf budget")->capture_default_str();
  search_cmd->add_flag("--no-flip-pruning", search_args.no_flip_pruning);
  search_cmd->add_flag("--no-spiral", search_args.no_spiral);
  search_cmd->add_option("--out", search_args.out_dir, "Output directory");

  SimulateArgs sim_args;
  sim_args.threads = default_threads();
  auto* simulate = app.add_subcommand("simulate", "Monte-Carlo alignment under Gaussian noise");
  simulate->add_option("--mark", sim_args.mark, "Matrix text file")->required();
  simulate->add_option("--expand", sim_args.expand, "Pixels per mark cell")->capture_default_str()->check(CLI::PositiveNumber);
  simulate->add_option("--background", sim_args.background, "Background side over mark side")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  simulate->add_option("--snr", sim_args.snr, "SNR grid in dB, start:stop:step")->required();
  simulate->add_option("--trials", sim_args.trials)->capture_default_str()->check(CLI::PositiveNumber);
  simulate->add_option("--seed", sim_args.seed)->capture_default_str();
  simulate->add_option("--threads", sim_args.threads)->capture_default_str()->check(CLI::PositiveNumber);
  simulate->add_option("--out", sim_args.out, "CSV path");

  ExpandArgs expand_args;
  auto* expand_cmd = app.add_subcommand("expand", "Replace each cell by a k x k block");
  expand_cmd->add_option("file", expand_args.file, "Matrix text file")->required();
  expand_cmd->add_option("--k", expand_args.k)->required()->check(CLI::PositiveNumber);
  expand_cmd->add_option("--out", expand_args.out, "Output matrix path");

  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  RunManifest manifest(command, args);
  try {
    if (*autocorr) cmd_autocorr(autocorr_args, manifest, out, err);
    if (*rank) cmd_rank(rank_args, manifest, out, err);
    if (*bounds) cmd_bounds(bounds_args, manifest, out, err);
    if (*search_cmd) cmd_search(search_args, manifest, out, err);
    if (*simulate) cmd_simulate(sim_args, manifest, out, err);
    if (*expand_cmd) cmd_expand(expand_args, manifest, out, err);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const BudgetExceeded& e) {
    err << "error: " << e.what() << '\n';
    return kBudgetExceeded;
  } catch (const UniquenessAnomaly& e) {
    err << "anomaly: " << e.what() << '\n';
    return kUniquenessAnomaly;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kOk;
}

}  // namespace alignmark::cli
